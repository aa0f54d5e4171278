//! Dissipative Jaynes-Cummings model with a Lorentzian reservoir.
//!
//! A two-level atom (ground `|0⟩`, excited `|1⟩`) couples to a bath of
//! oscillators with spectral density
//!
//! ```text
//! J(ω) = (g/π) Γ / ((ω − ω_c)² + Γ²).
//! ```
//!
//! In the single-excitation sector the excited amplitude obeys
//! `c₁' = −∫₀ᵗ f(t−s) c₁(s) ds` with `f(τ) = (g/√2π) e^{−(Γ−iΔ)τ}` and
//! `Δ = ω₀ − ω_c`. Writing `a = Γ − iΔ` and `κ = g/√2π`,
//!
//! ```text
//! c₁(t) = c₁(0) e^{−at/2} [cosh(Rt/2) + (a/R) sinh(Rt/2)],   R = √(a² − 4κ).
//! ```
//!
//! Reduced density matrices use the ordered basis `{|1⟩, |0⟩}`, so
//! `σ₊σ₋ = diag(1, 0)` and `σ₋ = [[0, 0], [1, 0]]`.

mod reservoir;

pub use reservoir::{
    reduced_state_from_amplitudes, sample_reservoir, simulate_discrete, simulate_discrete_with,
    DiscreteReservoir, DiscreteSolution, Mode,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrate::{rk4_on_grid, volterra, OdeSystem};
use crate::io::csv_row;
use crate::linalg::{c64, ComplexMatrix, I, ZERO};
use crate::quadrature;
use crate::states::DensityMatrix;

/// Below this normalized modulus the decay rates are reported as divergent.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;
/// `|Rt|` below which the series form of the amplitude is used.
const SERIES_SWITCH: f64 = 1e-4;
/// `Re(Rt/2)` above which the exponential form avoids overflow.
const EXP_SWITCH: f64 = 20.0;

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// Model parameters. Frequencies share one unit; `g` carries frequency².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    g: f64,
    gamma: f64,
    omega0: f64,
    omega_c: f64,
    delta: f64,
    c1_0: Complex64,
    c0: Complex64,
}

impl JCParams {
    pub fn new(
        g: f64,
        gamma: f64,
        omega0: f64,
        omega_c: f64,
        c1_0: Complex64,
        c0: Complex64,
    ) -> Result<Self> {
        for (name, v) in [
            ("g", g),
            ("Gamma", gamma),
            ("omega0", omega0),
            ("omega_c", omega_c),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let weight = c1_0.norm_sqr() + c0.norm_sqr();
        if !weight.is_finite() || weight > 1.0 + 1e-12 {
            return Err(Error::Normalization(format!(
                "|c0|² + |c1(0)|² = {weight} exceeds 1"
            )));
        }
        Ok(Self {
            g,
            gamma,
            omega0,
            omega_c,
            delta: omega0 - omega_c,
            c1_0,
            c0,
        })
    }

    /// Parameters from the detuning, with `ω₀ = ω_c + Δ`.
    pub fn with_detuning(
        g: f64,
        gamma: f64,
        delta: f64,
        omega_c: f64,
        c1_0: Complex64,
        c0: Complex64,
    ) -> Result<Self> {
        let mut p = Self::new(g, gamma, omega_c + delta, omega_c, c1_0, c0)?;
        p.delta = delta;
        Ok(p)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    /// `Δ = ω₀ − ω_c`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c1_0(&self) -> Complex64 {
        self.c1_0
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    /// `κ = g/√2π = f(0)`.
    pub fn kappa(&self) -> f64 {
        self.g / sqrt_2pi()
    }

    /// `a = Γ − iΔ`.
    pub fn a(&self) -> Complex64 {
        c64(self.gamma, 0.0 - self.delta)
    }

    /// `R = √(a² − 4κ)`, principal branch.
    pub fn r(&self) -> Complex64 {
        let a = self.a();
        (a * a - 4.0 * self.kappa()).sqrt()
    }

    /// Long-time decay rate of `|c₁|²`, `Γ − Re R`. For resonant
    /// overdamped parameters this is `4κ/(R₀ + Γ)`.
    pub fn asymptotic_rate(&self) -> f64 {
        self.gamma - self.r().re
    }

    /// `Δ = 0` and `Γ² > 4κ`, where `R₀` is real and `c₁` monotone.
    pub fn is_overdamped_resonant(&self) -> bool {
        self.delta == 0.0 && self.gamma * self.gamma > 4.0 * self.kappa()
    }
}

/// `J(ω) = (g/π) Γ/((ω − ω_c)² + Γ²)`.
pub fn lorentzian_j(omega: f64, p: &JCParams) -> f64 {
    let x = omega - p.omega_c;
    p.g / PI * p.gamma / (x * x + p.gamma * p.gamma)
}

/// `f(τ) = (g/√2π) e^{−(Γ−iΔ)τ}`.
pub fn correlation_f(tau: f64, p: &JCParams) -> Result<Complex64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be ≥ 0, got {tau}")));
    }
    Ok((-p.a() * tau).exp() * p.kappa())
}

/// `f(τ) = (1/√2π) ∫ J(ω) e^{−i(ω−ω₀)τ} dω`, by quadrature.
///
/// The window `|ω − ω_c| ≤ W` with `W = max(60Γ, 30/τ)` is integrated
/// adaptively. The tails use the antiderivative `arctan` at `τ = 0` and an
/// integration-by-parts expansion in `1/τ` otherwise, whose terms come
/// from the partial fractions of the Lorentzian.
pub fn correlation_f_quadrature(tau: f64, p: &JCParams) -> Result<Complex64> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be ≥ 0, got {tau}")));
    }
    let gamma = p.gamma;
    let w = if tau > 0.0 {
        (60.0 * gamma).max(30.0 / tau)
    } else {
        60.0 * gamma
    };
    let lorentz = |x: f64| gamma / (x * x + gamma * gamma);
    let q = quadrature::integrate(
        |x| c64(0.0, -x * tau).exp() * lorentz(x),
        -w,
        w,
        1e-13,
        1e-13,
        4000,
    );
    let tails = if tau == 0.0 {
        c64(PI - 2.0 * (w / gamma).atan(), 0.0)
    } else {
        lorentzian_tails(gamma, w, tau)
    };
    let integral = q.value + tails;
    Ok(c64(0.0, p.delta * tau).exp() * integral * (p.g / PI / sqrt_2pi()))
}

/// `∫_{|x|>W} Γ/(x²+Γ²) e^{−ixτ} dx` from the series
/// `Σ_k h⁽ᵏ⁾(W) e^{−iWτ}/(iτ)^{k+1}` (and its mirror), truncated at the
/// smallest term.
fn lorentzian_tails(gamma: f64, w: f64, tau: f64) -> Complex64 {
    // h(x) = (1/2i)[(x − iΓ)⁻¹ − (x + iΓ)⁻¹],  d^k (x−a)⁻¹ = (−1)^k k! (x−a)^{−k−1}
    let deriv = |x: f64, k: usize, fact: f64| -> Complex64 {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let p1 = c64(x, -gamma).powi(-(k as i32) - 1);
        let p2 = c64(x, gamma).powi(-(k as i32) - 1);
        (p1 - p2) * (sign * fact) / c64(0.0, 2.0)
    };
    let itau = c64(0.0, tau);
    let mut upper = ZERO;
    let mut lower = ZERO;
    let mut fact = 1.0;
    let mut power = itau;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            fact *= k as f64;
            power *= itau;
        }
        let tu = deriv(w, k, fact) / power;
        let tl = deriv(-w, k, fact) / power;
        let size = tu.norm() + tl.norm();
        if size > last {
            break;
        }
        upper += tu;
        lower += tl;
        last = size;
        if size < 1e-18 {
            break;
        }
    }
    c64(0.0, -w * tau).exp() * upper - c64(0.0, w * tau).exp() * lower
}

/// `cosh z` and `sinh z / z`, with a series near zero.
fn cosh_sinhc(z: Complex64) -> (Complex64, Complex64) {
    if (2.0 * z).norm() < SERIES_SWITCH {
        let z2 = z * z;
        (
            1.0 + z2 / 2.0 + z2 * z2 / 24.0,
            1.0 + z2 / 6.0 + z2 * z2 / 120.0,
        )
    } else {
        (z.cosh(), z.sinh() / z)
    }
}

/// `c₁(t)/c₁(0)` and its time derivative.
fn normalized_amplitude(t: f64, p: &JCParams) -> (Complex64, Complex64) {
    let a = p.a();
    let kappa = p.kappa();
    let r = p.r();
    let z = r * (t / 2.0);
    if z.re > EXP_SWITCH {
        // e^{−at/2}[cosh z + (a/R) sinh z] = ½[(1 + a/R)e^{(R−a)t/2} + (1 − a/R)e^{−(R+a)t/2}]
        let ar = a / r;
        let grow = ((r - a) * (t / 2.0)).exp();
        let decay = (-(r + a) * (t / 2.0)).exp();
        let c = ((1.0 + ar) * grow + (1.0 - ar) * decay) * 0.5;
        let dc = -(kappa / r) * (grow - decay);
        (c, dc)
    } else {
        let (ch, shc) = cosh_sinhc(z);
        let env = (-a * (t / 2.0)).exp();
        let c = env * (ch + a * (t / 2.0) * shc);
        let dc = -env * kappa * t * shc;
        (c, dc)
    }
}

/// Closed-form excited amplitude.
pub fn c1_exact(t: f64, p: &JCParams) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    Ok(normalized_amplitude(t, p).0 * p.c1_0)
}

/// Closed-form `dc₁/dt`.
pub fn c1_derivative_exact(t: f64, p: &JCParams) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    Ok(normalized_amplitude(t, p).1 * p.c1_0)
}

/// Amplitude and derivative from the Volterra solver with an arbitrary kernel.
pub fn c1_volterra(
    grid: &[f64],
    p: &JCParams,
    kernel: impl Fn(f64) -> Complex64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let sol = volterra(grid, p.c1_0, kernel)?;
    Ok((sol.values, sol.derivatives))
}

/// The closed-form kernel `f` as a closure for [`c1_volterra`].
pub fn lorentzian_kernel(p: &JCParams) -> impl Fn(f64) -> Complex64 {
    let a = p.a();
    let kappa = p.kappa();
    move |tau| (-a * tau).exp() * kappa
}

/// Decay rates from `c₁'/c₁ = −γ/2 − iS/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub gamma: f64,
    pub s: f64,
}

impl Rates {
    fn from_ratio(ratio: Complex64) -> Self {
        Self {
            gamma: -2.0 * ratio.re,
            s: -2.0 * ratio.im,
        }
    }
}

/// `γ(t)` and `S(t)` from the closed form. They depend on `g, Γ, Δ` only.
pub fn rates(t: f64, p: &JCParams) -> Result<Rates> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    let r = p.r();
    let z = r * (t / 2.0);
    let ratio = if z.re > EXP_SWITCH {
        // −(2κ/R)(1 − e^{−Rt}) / ((1 + a/R) + (1 − a/R)e^{−Rt})
        let ar = p.a() / r;
        let e = (-r * t).exp();
        -(2.0 * p.kappa() / r) * (1.0 - e) / ((1.0 + ar) + (1.0 - ar) * e)
    } else {
        let (c, dc) = normalized_amplitude(t, p);
        if c.norm() < AMPLITUDE_FLOOR {
            return Err(Error::AmplitudeZero {
                t,
                modulus: c.norm(),
            });
        }
        dc / c
    };
    Ok(Rates::from_ratio(ratio))
}

/// `γ(t) = 4κ sinh(R₀t/2) / (R₀ cosh(R₀t/2) + Γ sinh(R₀t/2))` for the
/// resonant overdamped case.
pub fn gamma_resonant(t: f64, p: &JCParams) -> Result<f64> {
    if p.delta != 0.0 {
        return Err(Error::Regime(format!(
            "resonant formula needs Δ = 0, got {}",
            p.delta
        )));
    }
    let four_kappa = 4.0 * p.kappa();
    if p.gamma * p.gamma <= four_kappa {
        return Err(Error::Regime(format!(
            "Γ² = {} must exceed 4g/√2π = {four_kappa} for real R₀",
            p.gamma * p.gamma
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be ≥ 0, got {t}")));
    }
    let r0 = (p.gamma * p.gamma - four_kappa).sqrt();
    let th = (r0 * t / 2.0).tanh();
    Ok(four_kappa * th / (r0 + p.gamma * th))
}

/// `[[|c₁|², c̄₀c₁], [c₀c̄₁, 1 − |c₁|²]]` in the basis `{|1⟩, |0⟩}`.
pub fn rho_from_amplitudes(c0: Complex64, c1: Complex64) -> ComplexMatrix {
    let p1 = c1.norm_sqr();
    ComplexMatrix::from_rows(&[
        [c64(p1, 0.0), c0.conj() * c1],
        [c0 * c1.conj(), c64(1.0 - p1, 0.0)],
    ])
}

/// Reduced atom state in the interaction picture.
pub fn rho_interaction(t: f64, p: &JCParams) -> Result<DensityMatrix> {
    DensityMatrix::new(rho_from_amplitudes(p.c0, c1_exact(t, p)?))
}

/// Reduced atom state in the Schrödinger picture,
/// `e^{−itH_S} ρ_I e^{itH_S}` with `H_S = ω₀σ₊σ₋`.
pub fn rho_schrodinger(t: f64, p: &JCParams) -> Result<DensityMatrix> {
    DensityMatrix::new(to_schrodinger(rho_interaction(t, p)?.matrix(), t, p))
}

fn to_schrodinger(rho: &ComplexMatrix, t: f64, p: &JCParams) -> ComplexMatrix {
    let phase = c64(0.0, -p.omega0 * t).exp();
    let mut out = rho.clone();
    out[(0, 1)] *= phase;
    out[(1, 0)] *= phase.conj();
    out
}

/// Frame of a reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Interaction,
    Schrodinger,
}

fn excited_projector() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 0.0])
}

fn lowering() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]])
}

/// Right-hand side of the exact master equation for given rates.
///
/// Interaction picture: `−(i/2)S[σ₊σ₋, ρ] + γ(σ₋ρσ₊ − ½{σ₊σ₋, ρ})`.
/// The Schrödinger picture adds `−i[ω₀σ₊σ₋, ρ]`.
pub fn master_rhs_with_rates(
    rho: &ComplexMatrix,
    rates: Rates,
    p: &JCParams,
    picture: Picture,
) -> Result<ComplexMatrix> {
    if rho.shape() != (2, 2) {
        return Err(Error::Dimension(format!(
            "atom state must be 2x2, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let proj = excited_projector();
    let sm = lowering();
    let sp = sm.adjoint();
    let omega = match picture {
        Picture::Interaction => 0.0,
        Picture::Schrodinger => p.omega0,
    };
    let h_eff = proj.scale_real(omega + 0.5 * rates.s);
    let unitary = h_eff.commutator(rho).scale(-I);
    let jump = &(&sm * rho) * &sp;
    let dissipator = &jump - &proj.anticommutator(rho).scale_real(0.5);
    Ok(&unitary + &dissipator.scale_real(rates.gamma))
}

/// Master-equation right-hand side with analytic rates at time `t`.
pub fn master_rhs(rho: &DensityMatrix, t: f64, p: &JCParams) -> Result<ComplexMatrix> {
    master_rhs_with_rates(rho.matrix(), rates(t, p)?, p, Picture::Interaction)
}

/// Same as [`master_rhs`] in either picture, for any 2×2 matrix.
pub fn master_rhs_in(
    rho: &ComplexMatrix,
    t: f64,
    p: &JCParams,
    picture: Picture,
) -> Result<ComplexMatrix> {
    master_rhs_with_rates(rho, rates(t, p)?, p, picture)
}

/// Time-gridded record of the model.
#[derive(Debug, Clone)]
pub struct JCTrajectory {
    pub picture: Picture,
    pub times: Vec<f64>,
    pub c1: Vec<Complex64>,
    pub gamma: Vec<f64>,
    pub s: Vec<f64>,
    pub rho: Vec<DensityMatrix>,
    /// Set when the run stopped early at a rate singularity; the vectors
    /// hold the points before it.
    pub flag: Option<Error>,
}

impl JCTrajectory {
    fn empty(picture: Picture, capacity: usize) -> Self {
        Self {
            picture,
            times: Vec::with_capacity(capacity),
            c1: Vec::with_capacity(capacity),
            gamma: Vec::with_capacity(capacity),
            s: Vec::with_capacity(capacity),
            rho: Vec::with_capacity(capacity),
            flag: None,
        }
    }

    fn push(&mut self, t: f64, c1: Complex64, r: Rates, rho: DensityMatrix) {
        self.times.push(t);
        self.c1.push(c1);
        self.gamma.push(r.gamma);
        self.s.push(r.s);
        self.rho.push(rho);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Header and rows of the CSV trajectory format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for i in 0..self.len() {
            let c = self.c1[i];
            let r = self.rho[i].matrix();
            out.push_str(&csv_row(&[
                self.times[i],
                c.re,
                c.im,
                c.norm(),
                self.gamma[i],
                self.s[i],
                r[(0, 0)].re,
                r[(1, 1)].re,
                r[(0, 1)].re,
                r[(0, 1)].im,
            ]));
            out.push('\n');
        }
        out
    }
}

/// Column names of [`JCTrajectory::to_csv`].
pub const CSV_HEADER: &str = "t,re_c1,im_c1,abs_c1,gamma,S,rho11,rho00,re_rho10,im_rho10";

/// Trajectory from the closed form, in the interaction picture.
pub fn trajectory_exact(p: &JCParams, grid: &[f64]) -> Result<JCTrajectory> {
    crate::integrate::check_ascending(grid)?;
    let mut traj = JCTrajectory::empty(Picture::Interaction, grid.len());
    for &t in grid {
        let r = match rates(t, p) {
            Ok(r) => r,
            Err(e @ Error::AmplitudeZero { .. }) => {
                traj.flag = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        traj.push(t, c1_exact(t, p)?, r, rho_interaction(t, p)?);
    }
    Ok(traj)
}

/// Trajectory from the Volterra solver with the Lorentzian kernel. Rates
/// come from the solver's own derivative.
pub fn trajectory_volterra(p: &JCParams, grid: &[f64]) -> Result<JCTrajectory> {
    let (c, dc) = c1_volterra(grid, p, lorentzian_kernel(p))?;
    let mut traj = JCTrajectory::empty(Picture::Interaction, grid.len());
    for i in 0..grid.len() {
        let modulus = (c[i] / p.c1_0).norm();
        if p.c1_0 == ZERO || modulus < AMPLITUDE_FLOOR {
            traj.flag = Some(Error::AmplitudeZero {
                t: grid[i],
                modulus,
            });
            break;
        }
        let rho = DensityMatrix::relaxed(rho_from_amplitudes(p.c0, c[i]))?;
        traj.push(grid[i], c[i], Rates::from_ratio(dc[i] / c[i]), rho);
    }
    Ok(traj)
}

/// Default largest RK4 substep for [`integrate_master`].
pub const MASTER_MAX_STEP: f64 = 1e-3;

struct MasterSystem<'a> {
    p: &'a JCParams,
    picture: Picture,
    last: Option<Rates>,
}

impl OdeSystem for MasterSystem<'_> {
    fn dim(&self) -> usize {
        5
    }

    // state: ρ row-major (4 entries), then c₁
    fn rhs(&mut self, t: f64, y: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let r = rates(t, self.p)?;
        self.last = Some(r);
        let rho = ComplexMatrix::new(2, 2, y[..4].to_vec())?;
        let d = master_rhs_with_rates(&rho, r, self.p, self.picture)?;
        out[..4].copy_from_slice(d.entries());
        out[4] = c64(-0.5 * r.gamma, -0.5 * r.s) * y[4];
        Ok(())
    }
}

/// RK4 on the interaction-picture master equation with rates evaluated
/// analytically at every stage. `c₁` is carried along by
/// `c₁' = (−γ/2 − iS/2) c₁`.
pub fn integrate_master(p: &JCParams, grid: &[f64]) -> Result<JCTrajectory> {
    integrate_master_in(p, grid, Picture::Interaction, MASTER_MAX_STEP)
}

/// [`integrate_master`] in either picture with a chosen substep bound.
/// The initial state is the exact one at `grid[0]`.
pub fn integrate_master_in(
    p: &JCParams,
    grid: &[f64],
    picture: Picture,
    max_step: f64,
) -> Result<JCTrajectory> {
    crate::integrate::check_ascending(grid)?;
    let t0 = grid[0];
    let mut rho0 = rho_interaction(t0, p)?.into_matrix();
    if picture == Picture::Schrodinger {
        rho0 = to_schrodinger(&rho0, t0, p);
    }
    let mut y0 = rho0.into_entries();
    y0.push(c1_exact(t0, p)?);

    let mut sys = MasterSystem {
        p,
        picture,
        last: None,
    };
    let mut traj = JCTrajectory::empty(picture, grid.len());
    let result = rk4_on_grid(&mut sys, grid, y0, max_step, |_, t, y| {
        let r = rates(t, p)?;
        let rho = DensityMatrix::relaxed(ComplexMatrix::new(2, 2, y[..4].to_vec())?)?;
        traj.push(t, y[4], r, rho);
        Ok(())
    });
    match result {
        Ok(_) => Ok(traj),
        Err(e @ Error::AmplitudeZero { .. }) => {
            traj.flag = Some(e);
            Ok(traj)
        }
        Err(e) => Err(e),
    }
}
