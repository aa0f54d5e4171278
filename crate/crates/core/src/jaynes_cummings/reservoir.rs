//! Finite set of reservoir modes sampled from the Lorentzian, and brute-force
//! evolution of the single-excitation amplitudes.

use num_complex::Complex64;

use super::{lorentzian_j, rho_from_amplitudes, sqrt_2pi, JCParams};
use crate::error::{Error, Result};
use crate::integrate::{rk4_on_grid, uniform_step, OdeSystem};
use crate::linalg::{c64, I, ZERO};
use crate::states::DensityMatrix;

/// Default largest RK4 substep of [`simulate_discrete`].
pub const DISCRETE_MAX_STEP: f64 = 1e-3;

/// One bath oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub g: Complex64,
}

/// Modes on `[ω_c − W, ω_c + W]` with spacing `Δω`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteReservoir {
    modes: Vec<Mode>,
    center: f64,
    halfwidth: f64,
    spacing: f64,
}

impl DiscreteReservoir {
    /// An arbitrary mode list. Window metadata is taken from the extreme
    /// frequencies; the spacing is 0 for a single mode.
    pub fn from_modes(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Domain("reservoir needs at least one mode".into()));
        }
        if modes
            .iter()
            .any(|m| !m.omega.is_finite() || !m.g.is_finite())
        {
            return Err(Error::Domain(
                "mode frequencies and couplings must be finite".into(),
            ));
        }
        let lo = modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min);
        let hi = modes
            .iter()
            .map(|m| m.omega)
            .fold(f64::NEG_INFINITY, f64::max);
        let spacing = if modes.len() > 1 {
            (hi - lo) / (modes.len() - 1) as f64
        } else {
            0.0
        };
        Ok(Self {
            modes,
            center: 0.5 * (lo + hi),
            halfwidth: 0.5 * (hi - lo),
            spacing,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    /// `Δω`; the density of modes is `1/Δω`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `Σ |g_k|² e^{−iω_k τ}`.
    pub fn correlation(&self, tau: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|m| c64(0.0, -m.omega * tau).exp() * m.g.norm_sqr())
            .sum()
    }

    /// `Σ |g_k|² e^{i(ω₀−ω_k)τ}`, the discrete memory kernel.
    pub fn kernel(&self, tau: f64, omega0: f64) -> Complex64 {
        c64(0.0, omega0 * tau).exp() * self.correlation(tau)
    }
}

/// `N` modes uniformly spaced over `ω_c ± W` with `W = halfwidth_in_gammas·Γ`
/// and real couplings `g_k = √(J(ω_k)Δω/√2π)`.
pub fn sample_reservoir(
    p: &JCParams,
    n: usize,
    halfwidth_in_gammas: f64,
) -> Result<DiscreteReservoir> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 modes, got {n}")));
    }
    if !(halfwidth_in_gammas > 0.0 && halfwidth_in_gammas.is_finite()) {
        return Err(Error::Domain(format!(
            "half-width must be positive, got {halfwidth_in_gammas}"
        )));
    }
    let w = halfwidth_in_gammas * p.gamma();
    let dw = 2.0 * w / (n - 1) as f64;
    let modes = (0..n)
        .map(|k| {
            let omega = p.omega_c() - w + k as f64 * dw;
            let g = (lorentzian_j(omega, p) * dw / sqrt_2pi()).sqrt();
            Mode {
                omega,
                g: c64(g, 0.0),
            }
        })
        .collect();
    Ok(DiscreteReservoir {
        modes,
        center: p.omega_c(),
        halfwidth: w,
        spacing: dw,
    })
}

/// Output of [`simulate_discrete`].
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub times: Vec<f64>,
    pub c1: Vec<Complex64>,
    /// `Σ_k |d_k|²` at every grid time.
    pub reservoir_weight: Vec<f64>,
    /// `d_k` at the last grid time.
    pub d_final: Vec<Complex64>,
}

impl DiscreteSolution {
    /// `|c₁|² + Σ|d_k|²` along the grid.
    pub fn excitation_norm(&self) -> Vec<f64> {
        self.c1
            .iter()
            .zip(&self.reservoir_weight)
            .map(|(c, w)| c.norm_sqr() + w)
            .collect()
    }
}

// In the frame e_k = e^{iδ_k t} d_k with δ_k = ω₀ − ω_k the system is
// autonomous: i c₁' = Σ g_k e_k, i e_k' = ḡ_k c₁ − δ_k e_k.
struct Coupled<'a> {
    modes: &'a [Mode],
    detunings: Vec<f64>,
}

impl OdeSystem for Coupled<'_> {
    fn dim(&self) -> usize {
        self.modes.len() + 1
    }

    fn rhs(&mut self, _t: f64, y: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let c1 = y[0];
        let mut acc = ZERO;
        for (k, m) in self.modes.iter().enumerate() {
            let e = y[k + 1];
            acc += m.g * e;
            out[k + 1] = -I * (m.g.conj() * c1 - e * self.detunings[k]);
        }
        out[0] = -I * acc;
        Ok(())
    }
}

/// RK4 on `i c₁' = Σ g_k e^{i(ω₀−ω_k)t} d_k`, `i d_k' = ḡ_k e^{−i(ω₀−ω_k)t} c₁`
/// from `d_k(0) = 0`, with the default substep.
pub fn simulate_discrete(
    res: &DiscreteReservoir,
    p: &JCParams,
    grid: &[f64],
) -> Result<DiscreteSolution> {
    simulate_discrete_with(res, p, grid, DISCRETE_MAX_STEP)
}

/// [`simulate_discrete`] with an explicit substep bound.
pub fn simulate_discrete_with(
    res: &DiscreteReservoir,
    p: &JCParams,
    grid: &[f64],
    max_step: f64,
) -> Result<DiscreteSolution> {
    uniform_step(grid)?;
    let detunings: Vec<f64> = res.modes.iter().map(|m| p.omega0() - m.omega).collect();
    let mut sys = Coupled {
        modes: &res.modes,
        detunings: detunings.clone(),
    };
    let mut y0 = vec![ZERO; res.len() + 1];
    y0[0] = p.c1_0();

    let mut c1 = Vec::with_capacity(grid.len());
    let mut weight = Vec::with_capacity(grid.len());
    let y = rk4_on_grid(&mut sys, grid, y0, max_step, |_, _, y| {
        c1.push(y[0]);
        weight.push(y[1..].iter().map(|e| e.norm_sqr()).sum());
        Ok(())
    })?;
    let t = grid[grid.len() - 1];
    let d_final = y[1..]
        .iter()
        .zip(&detunings)
        .map(|(e, d)| c64(0.0, -d * t).exp() * e)
        .collect();
    Ok(DiscreteSolution {
        times: grid.to_vec(),
        c1,
        reservoir_weight: weight,
        d_final,
    })
}

/// Atom state from the full single-excitation amplitudes by tracing out
/// the reservoir: `ρ₁₁ = |c₁|²`, `ρ₁₀ = c₁c̄₀`, `ρ₀₀ = |c₀|² + Σ|d_k|²`.
/// The global state must be normalized.
pub fn reduced_state_from_amplitudes(
    c0: Complex64,
    c1: Complex64,
    d: &[Complex64],
) -> Result<DensityMatrix> {
    let mut rho = rho_from_amplitudes(c0, c1);
    let ground = c0.norm_sqr() + d.iter().map(|x| x.norm_sqr()).sum::<f64>();
    rho[(1, 1)] = c64(ground, 0.0);
    DensityMatrix::new(rho)
}
