//! Completely positive trace-preserving maps.
//!
//! # Choi convention
//!
//! With `v = Σ_j e_j ⊗ e_j` (unnormalized), the Choi matrix is
//!
//! ```text
//! C = (Φ ⊗ id)(|v⟩⟨v|) = Σ_jk Φ(|e_j⟩⟨e_k|) ⊗ |e_j⟩⟨e_k|
//! ```
//!
//! so the **output factor comes first**: `C[m·d + j, n·d + k] = Φ(E_jk)[m, n]`.
//! Trace preservation is `tr_1 C = I`, complete positivity is `C ≥ 0`.
//! Many references use the transposed ordering; converting means swapping
//! the two tensor factors.
//!
//! Kraus operators are read off the eigenvectors `s` of `C` by
//! `K[m, n] = √λ · s[m·d + n]`, and each one is phase-fixed so that its
//! largest-magnitude entry is real positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, canonicalize_phase, eigh, inner, kron, partial_trace, ComplexMatrix, Keep, ONE, ZERO,
};
use crate::states::{DensityMatrix, PureState};

/// Tolerance for the CP and TP invariants of a [`QuantumChannel`].
pub const CHANNEL_TOL: f64 = 1e-9;
/// Completeness tolerance of a [`KrausSet`].
pub const KRAUS_TOL: f64 = 1e-9;
/// Default relative cut-off for dropping Choi eigenvalues.
pub const KRAUS_TRUNCATION: f64 = 1e-12;
/// Orthonormality tolerance of [`extend_isometry`] inputs.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Gram-Schmidt candidates with a smaller residual are skipped.
const GS_SKIP: f64 = 1e-8;

/// A CPTP map on `d×d` matrices, stored as its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    choi: ComplexMatrix,
}

impl QuantumChannel {
    /// Validates `choi` as the Choi matrix of a CPTP map on dimension `dim`.
    pub fn from_choi(choi: ComplexMatrix, dim: usize) -> Result<Self> {
        let report = is_cptp(&choi, dim, CHANNEL_TOL)?;
        if !report.cp {
            return Err(Error::CompletePositivity {
                min_eigenvalue: report.min_choi_eig,
            });
        }
        if !report.tp {
            return Err(Error::NotTracePreserving {
                residual: report.tp_residual,
            });
        }
        Ok(Self {
            dim,
            choi: choi.hermitian_part(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        choi_from_kraus(&KrausSet::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `Φ(X)` for an arbitrary `d×d` matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim;
        if x.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "channel acts on {d}x{d}, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let c = &self.choi;
        let mut out = ComplexMatrix::zeros(d, d);
        for m in 0..d {
            for n in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    for k in 0..d {
                        acc += c[(m * d + j, n * d + k)] * x[(j, k)];
                    }
                }
                out[(m, n)] = acc;
            }
        }
        Ok(out)
    }

    /// `Φ(ρ)`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?)
    }
}

/// `Φ(ρ)`.
pub fn apply(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    channel.apply(rho)
}

/// Kraus operators `K_1..K_N` with `Σ K†K = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators
            .first()
            .ok_or_else(|| Error::Dimension("Kraus set is empty".into()))?
            .rows();
        for k in &operators {
            if k.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "Kraus operators must all be {dim}x{dim}, got {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let set = Self { dim, operators };
        let residual = set.completeness_residual();
        if residual > KRAUS_TOL {
            return Err(Error::Completeness { residual });
        }
        Ok(set)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Amplitude damping with decay probability `p`:
    /// `K₀ = |0⟩⟨0| + √(1−p)|1⟩⟨1|`, `K₁ = √p |0⟩⟨1|`.
    pub fn amplitude_damping(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "damping probability {p} outside [0, 1]"
            )));
        }
        Self::new(vec![
            ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, (1.0 - p).sqrt()]]),
            ComplexMatrix::from_real_rows(&[[0.0, p.sqrt()], [0.0, 0.0]]),
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            sum += &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ K X K†`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out += &k.try_matmul(x)?.try_matmul(&k.adjoint())?;
        }
        Ok(out)
    }
}

/// `C = Σ_α |w_α⟩⟨w_α|` with `w_α = (K_α ⊗ I) v`.
pub fn choi_from_kraus(kraus: &KrausSet) -> QuantumChannel {
    let d = kraus.dim();
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for k in kraus.operators() {
        // w[m·d + j] = K[m, j]
        let w = k.entries();
        for r in 0..d * d {
            if w[r] == ZERO {
                continue;
            }
            for c in 0..d * d {
                choi[(r, c)] += w[r] * w[c].conj();
            }
        }
    }
    QuantumChannel { dim: d, choi }
}

/// Kraus decomposition from the spectrum of the Choi matrix.
///
/// Eigenvalues at or below `tol · λ_max` are dropped. Operators come out
/// in order of decreasing weight.
pub fn kraus_from_choi(channel: &QuantumChannel, tol: f64) -> Result<KrausSet> {
    let d = channel.dim();
    let spec = eigh(channel.choi())?;
    let max = spec.max();
    if spec.min() < -CHANNEL_TOL {
        return Err(Error::CompletePositivity {
            min_eigenvalue: spec.min(),
        });
    }
    let mut operators = Vec::new();
    for idx in (0..d * d).rev() {
        let lambda = spec.eigenvalues[idx];
        if lambda <= tol * max || lambda <= 0.0 {
            continue;
        }
        let scale = lambda.sqrt();
        let mut entries: Vec<Complex64> = spec
            .eigenvectors
            .column(idx)
            .into_iter()
            .map(|z| z * scale)
            .collect();
        canonicalize_phase(&mut entries);
        operators.push(ComplexMatrix::new(d, d, entries)?);
    }
    KrausSet::new(operators)
}

/// Outcome of [`is_cptp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptpReport {
    pub cp: bool,
    pub tp: bool,
    pub min_choi_eig: f64,
    pub tp_residual: f64,
}

/// Checks complete positivity and trace preservation of a Choi candidate.
pub fn is_cptp(choi: &ComplexMatrix, dim: usize, tol: f64) -> Result<CptpReport> {
    let n = dim * dim;
    if choi.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "Choi matrix for d={dim} must be {n}x{n}, got {}x{}",
            choi.rows(),
            choi.cols()
        )));
    }
    let deviation = choi.hermitian_deviation();
    if deviation > tol {
        return Err(Error::Hermiticity { deviation });
    }
    let sym = choi.hermitian_part();
    let min_choi_eig = eigh(&sym)?.min();
    let tp_residual =
        partial_trace(&sym, dim, dim, Keep::B)?.max_abs_diff(&ComplexMatrix::identity(dim));
    Ok(CptpReport {
        cp: min_choi_eig >= -tol,
        tp: tp_residual <= tol,
        min_choi_eig,
        tp_residual,
    })
}

/// Unitary dilation `Φ(X) = tr_R[U (X ⊗ |Ω⟩⟨Ω|) U†]`.
///
/// The system factor comes first, so `U` acts on indices `m·dim_r + α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    dim: usize,
    dim_r: usize,
    omega: PureState,
    unitary: ComplexMatrix,
}

impl Dilation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn omega(&self) -> &PureState {
        &self.omega
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.unitary.rows();
        (&self.unitary.adjoint() * &self.unitary).max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// `tr_R[U (X ⊗ |Ω⟩⟨Ω|) U†]`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let omega = ComplexMatrix::outer(self.omega.amplitudes(), self.omega.amplitudes());
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::Dimension(format!(
                "dilation acts on {0}x{0}, got {1}x{2}",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        let joint = &(&self.unitary * &kron(x, &omega)) * &self.unitary.adjoint();
        partial_trace(&joint, self.dim, self.dim_r, Keep::A)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?)
    }
}

/// Builds the minimal dilation: the ancilla dimension is the Kraus rank
/// and `Ω = e_0`. On `e_i ⊗ Ω` the unitary acts as `Σ_α K_α e_i ⊗ e_α`.
pub fn dilate(channel: &QuantumChannel) -> Result<Dilation> {
    let kraus = kraus_from_choi(channel, KRAUS_TRUNCATION)?;
    let d = channel.dim();
    let n = kraus.len();
    let columns: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            let mut col = vec![ZERO; d * n];
            for m in 0..d {
                for (alpha, k) in kraus.operators().iter().enumerate() {
                    col[m * n + alpha] = k[(m, i)];
                }
            }
            col
        })
        .collect();
    let w = extend_isometry(&columns)?;
    // move W's first d columns to the slots e_i ⊗ Ω, fill the rest in order
    let mut slots: Vec<usize> = (0..d).map(|i| i * n).collect();
    slots.extend((0..d * n).filter(|s| s % n != 0));
    let mut unitary = ComplexMatrix::zeros(d * n, d * n);
    for (src, &dst) in slots.iter().enumerate() {
        for r in 0..d * n {
            unitary[(r, dst)] = w[(r, src)];
        }
    }
    Ok(Dilation {
        dim: d,
        dim_r: n,
        omega: PureState::basis(n, 0),
        unitary,
    })
}

/// Completes orthonormal columns in `ℂ^N` to an `N×N` unitary.
///
/// The inputs are kept verbatim as the leading columns. The remaining
/// columns come from Gram-Schmidt over `e_0, e_1, …`.
pub fn extend_isometry(columns: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
    let n = columns
        .first()
        .ok_or_else(|| Error::Dimension("no columns to extend".into()))?
        .len();
    if columns.iter().any(|c| c.len() != n) || columns.len() > n || n == 0 {
        return Err(Error::Dimension(format!(
            "need at most {n} columns of length {n}"
        )));
    }
    let mut deviation: f64 = 0.0;
    for (i, u) in columns.iter().enumerate() {
        for (j, v) in columns.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            deviation = deviation.max((inner(u, v) - target).norm());
        }
    }
    if deviation > ISOMETRY_TOL {
        return Err(Error::Isometry { deviation });
    }

    let mut basis: Vec<Vec<Complex64>> = columns.to_vec();
    for cand in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[cand] = ONE;
        for _ in 0..2 {
            for b in &basis {
                let overlap = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = crate::linalg::vec_norm(&v);
        if norm < GS_SKIP {
            continue;
        }
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_columns(&basis)
}

/// `ρ^{T_B}`: transposes the second tensor factor,
/// `ρ^{T_B}[(i,k),(j,l)] = ρ[(i,l),(j,k)]`.
pub fn partial_transpose(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if rho.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "partial transpose over {dim_a}x{dim_b} needs a {n}x{n} matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..dim_a {
        for j in 0..dim_a {
            for k in 0..dim_b {
                for l in 0..dim_b {
                    out[(i * dim_b + k, j * dim_b + l)] = rho[(i * dim_b + l, j * dim_b + k)];
                }
            }
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of `ρ^{T_B}`. Negative certifies entanglement.
pub fn ppt_min_eig(rho: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    Ok(eigh(&partial_transpose(rho.matrix(), dim_a, dim_b)?)?.min())
}

/// Channel file: either `{"dim": d, "kraus": [matrix, …]}` or
/// `{"dim": d, "choi": matrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelFile {
    Kraus {
        dim: usize,
        kraus: Vec<ComplexMatrix>,
    },
    Choi {
        dim: usize,
        choi: ComplexMatrix,
    },
}

impl ChannelFile {
    pub fn dim(&self) -> usize {
        match self {
            Self::Kraus { dim, .. } | Self::Choi { dim, .. } => *dim,
        }
    }

    /// The Choi matrix described by the file, unvalidated.
    pub fn choi_candidate(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Choi { choi, .. } => Ok(choi.clone()),
            Self::Kraus { dim, kraus } => {
                if kraus.is_empty() || kraus.iter().any(|k| k.shape() != (*dim, *dim)) {
                    return Err(Error::Dimension(format!(
                        "Kraus operators must be {dim}x{dim} and non-empty"
                    )));
                }
                let set = KrausSet {
                    dim: *dim,
                    operators: kraus.clone(),
                };
                Ok(choi_from_kraus(&set).choi)
            }
        }
    }

    /// Parses and validates the channel.
    pub fn into_channel(self) -> Result<QuantumChannel> {
        match self {
            Self::Kraus { kraus, dim } => {
                let set = KrausSet::new(kraus)?;
                if set.dim() != dim {
                    return Err(Error::Dimension(format!(
                        "declared dim {dim}, Kraus operators are {0}x{0}",
                        set.dim()
                    )));
                }
                Ok(choi_from_kraus(&set))
            }
            Self::Choi { dim, choi } => QuantumChannel::from_choi(choi, dim),
        }
    }
}

/// Dilation file: `{"dim", "dim_r", "omega": [[re, im], …], "unitary": matrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationFile {
    pub dim: usize,
    pub dim_r: usize,
    pub omega: Vec<[f64; 2]>,
    pub unitary: ComplexMatrix,
}

impl From<&Dilation> for DilationFile {
    fn from(d: &Dilation) -> Self {
        Self {
            dim: d.dim,
            dim_r: d.dim_r,
            omega: d.omega.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            unitary: d.unitary.clone(),
        }
    }
}

/// Kraus file as written by the CLI: `{"dim": d, "kraus": [matrix, …]}`.
impl From<&KrausSet> for ChannelFile {
    fn from(k: &KrausSet) -> Self {
        Self::Kraus {
            dim: k.dim,
            kraus: k.operators.clone(),
        }
    }
}

/// The swap operator on `ℂ^d ⊗ ℂ^d`, which is the Choi matrix of the
/// transpose map.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = c64(1.0, 0.0);
        }
    }
    s
}
