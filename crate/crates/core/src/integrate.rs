//! Time stepping: classical Runge-Kutta for ODE systems and a
//! second-order solver for the Volterra equation `c' = −∫₀ᵗ k(t−s) c(s) ds`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for calling a grid uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// `n + 1` equally spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || steps == 0 {
        return Err(Error::Grid(format!(
            "need t_max > 0 and steps ≥ 1, got t_max={t_max}, steps={steps}"
        )));
    }
    Ok((0..=steps)
        .map(|i| t_max * i as f64 / steps as f64)
        .collect())
}

/// Checks the grid is strictly ascending and finite.
pub fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Grid("grid contains non-finite times".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Step of a uniform grid starting at 0. Grids with a single point have step 0.
pub fn uniform_step(grid: &[f64]) -> Result<f64> {
    check_ascending(grid)?;
    if grid[0] != 0.0 {
        return Err(Error::Grid(format!(
            "grid must start at 0, starts at {}",
            grid[0]
        )));
    }
    let n = grid.len();
    if n == 1 {
        return Ok(0.0);
    }
    let h = grid[n - 1] / (n - 1) as f64;
    for (i, &t) in grid.iter().enumerate() {
        if (t - i as f64 * h).abs() > UNIFORM_TOL * h {
            return Err(Error::Grid(format!(
                "grid is not uniform: point {i} is {t}, expected {}",
                i as f64 * h
            )));
        }
    }
    Ok(h)
}

/// Right-hand side `y' = f(t, y)`, written into `out`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: f64, y: &[Complex64], out: &mut [Complex64]) -> Result<()>;
}

/// Classical fourth-order Runge-Kutta with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    /// Advances `y` from `t` to `t + h`.
    pub fn step<S: OdeSystem>(
        &mut self,
        sys: &mut S,
        t: f64,
        h: f64,
        y: &mut [Complex64],
    ) -> Result<()> {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        sys.rhs(t, y, k1)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        sys.rhs(t + 0.5 * h, tmp, k2)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        sys.rhs(t + 0.5 * h, tmp, k3)?;
        for i in 0..y.len() {
            tmp[i] = y[i] + k3[i] * h;
        }
        sys.rhs(t + h, tmp, k4)?;
        let w = h / 6.0;
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
        Ok(())
    }
}

/// Integrates from `grid[0]` and records the state at every grid point.
/// Each grid interval is split into the fewest equal substeps not longer
/// than `max_step`. `observe` sees every recorded state; on error the
/// states recorded so far are kept by the caller through `observe`.
pub fn rk4_on_grid<S: OdeSystem>(
    sys: &mut S,
    grid: &[f64],
    y0: Vec<Complex64>,
    max_step: f64,
    mut observe: impl FnMut(usize, f64, &[Complex64]) -> Result<()>,
) -> Result<Vec<Complex64>> {
    check_ascending(grid)?;
    if !(max_step > 0.0) {
        return Err(Error::Grid(format!("max step {max_step} must be > 0")));
    }
    let mut rk = Rk4::new(sys.dim());
    let mut y = y0;
    observe(0, grid[0], &y)?;
    for (i, w) in grid.windows(2).enumerate() {
        let span = w[1] - w[0];
        let n = (span / max_step).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for s in 0..n {
            rk.step(sys, w[0] + s as f64 * h, h, &mut y)?;
        }
        observe(i + 1, w[1], &y)?;
    }
    Ok(y)
}

/// Solution of [`volterra`].
#[derive(Debug, Clone)]
pub struct VolterraSolution {
    pub values: Vec<Complex64>,
    /// `c'(t_n) = −∫₀^{t_n} k(t_n − s) c(s) ds` by the same quadrature.
    pub derivatives: Vec<Complex64>,
}

/// Solves `c'(t) = −∫₀ᵗ k(t−s) c(s) ds` on a uniform grid from 0.
///
/// The memory integral uses the trapezoidal rule on the grid and each
/// step is a Heun predictor-corrector, so the scheme is second order.
/// Cost is O(n²) kernel-value products; the kernel is sampled once at the
/// grid lags.
pub fn volterra(
    grid: &[f64],
    c0: Complex64,
    kernel: impl Fn(f64) -> Complex64,
) -> Result<VolterraSolution> {
    let h = uniform_step(grid)?;
    let n = grid.len();
    let lags: Vec<Complex64> = (0..n).map(|m| kernel(m as f64 * h)).collect();
    let mut c = Vec::with_capacity(n);
    let mut dc = Vec::with_capacity(n);
    c.push(c0);
    dc.push(Complex64::new(0.0, 0.0));

    // memory at t_m excluding the endpoint term ½ h k(0) c_m
    let partial_memory = |c: &[Complex64], m: usize| -> Complex64 {
        if m == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = lags[m] * c[0] * 0.5;
        for j in 1..m {
            acc += lags[m - j] * c[j];
        }
        acc * h
    };

    for m in 0..n - 1 {
        let predicted = c[m] + dc[m] * h;
        let base = partial_memory(&c, m + 1);
        let end = lags[0] * 0.5 * h;
        let dpred = -(base + end * predicted);
        let next = c[m] + (dc[m] + dpred) * (0.5 * h);
        c.push(next);
        dc.push(-(base + end * next));
    }
    Ok(VolterraSolution {
        values: c,
        derivatives: dc,
    })
}
