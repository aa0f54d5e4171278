//! Density matrices and pure states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, vec_norm, ComplexMatrix, HERMITIAN_TOL};

/// Trace tolerance of the strict constructor.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues above this floor (and below zero) are clamped to zero.
pub const PSD_FLOOR: f64 = -1e-10;
/// Trace tolerance of [`DensityMatrix::relaxed`].
pub const RELAXED_TRACE_TOL: f64 = 1e-6;
/// Norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m`. Near-Hermitian input is symmetrized and eigenvalues in
    /// `(PSD_FLOOR, 0)` are clamped to zero.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::validate(m, TRACE_TOL, false)
    }

    /// Like [`new`](Self::new) but accepts a trace within 1e-6 of one and
    /// renormalizes. Meant for integrator output.
    pub fn relaxed(m: ComplexMatrix) -> Result<Self> {
        Self::validate(m, RELAXED_TRACE_TOL, true)
    }

    fn validate(m: ComplexMatrix, trace_tol: f64, renormalize: bool) -> Result<Self> {
        m.require_square("density matrix")?;
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::Hermiticity { deviation });
        }
        let mut m = m.hermitian_part();
        let trace = m.trace().re;
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::Trace { trace });
        }
        if renormalize {
            m = m.scale_real(1.0 / trace);
        }
        let spec = eigh(&m)?;
        let min = spec.min();
        if min < PSD_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        if min < 0.0 {
            m = spec.apply_fn(|l| c64(l.max(0.0), 0.0));
        }
        Ok(Self { matrix: m })
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|i⟩⟨i|` in the canonical basis.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(dim, i, i),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `tr(ρA)`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<Complex64> {
        expectation(self, a)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.matrix
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension(
                "pure state must have dimension ≥ 1".into(),
            ));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!("state norm is {norm:.17e}")));
        }
        Ok(Self { amplitudes })
    }

    /// Divides by the norm first. Fails only for the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization(
                "cannot normalize a zero vector".into(),
            ));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    /// Canonical basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn project(psi: &PureState) -> DensityMatrix {
    DensityMatrix {
        matrix: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()),
    }
}

/// `tr(ρA)`.
pub fn expectation(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<Complex64> {
    let d = rho.dim();
    if a.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "observable is {}x{}, state has dimension {d}",
            a.rows(),
            a.cols()
        )));
    }
    let r = rho.matrix();
    Ok((0..d)
        .flat_map(|i| (0..d).map(move |k| (i, k)))
        .map(|(i, k)| r[(i, k)] * a[(k, i)])
        .sum())
}

/// `½ Σ|λ_k(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "states have dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix() - sigma.matrix();
    let spec = eigh(&diff)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
