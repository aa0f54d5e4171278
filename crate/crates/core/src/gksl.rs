//! Quantum dynamical semigroups in GKSL form.
//!
//! Superoperators act on column-stacked matrices: `vec(X)[j·d + i] = X[i, j]`,
//! so the map `X ↦ A X B` has matrix `Bᵀ ⊗ A`. The generator
//!
//! ```text
//! L X = −i[H, X] + Σ_l γ_l (V_l X V_l† − ½{V_l† V_l, X})
//! ```
//!
//! therefore becomes
//!
//! ```text
//! −i(I ⊗ H − Hᵀ ⊗ I) + Σ_l γ_l (V̄_l ⊗ V_l − ½ I ⊗ V_l†V_l − ½ (V_l†V_l)ᵀ ⊗ I).
//! ```
//!
//! [`gksl_decompose`] runs the construction in reverse. It expands `L` in
//! the maps `X ↦ F_i X F_j†` built from an orthonormal operator basis with
//! `F_{d²} = I/√d`, reads off the Hamiltonian from the mixed terms and
//! diagonalizes the coefficient matrix of the traceless block. `H` is
//! returned traceless; the jump operators are only unique up to unitary
//! remixing, so compare superoperators rather than jump lists.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, expm, kron, solve, ComplexMatrix, HERMITIAN_TOL, I, ZERO};
use crate::states::DensityMatrix;

/// Precondition tolerance of [`gksl_decompose`] and the CP threshold on `A`.
pub const DECOMPOSE_TOL: f64 = 1e-8;
/// Lower bound on the rates of a [`GKSLGenerator`].
pub const RATE_FLOOR: f64 = -1e-12;

/// A linear map on `d×d` matrices in the column-stacking representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || matrix.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "superoperator for d={dim} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_map(dim: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let col = f(&ComplexMatrix::unit(dim, i, j)).vec();
                for (r, z) in col.into_iter().enumerate() {
                    matrix[(r, j * dim + i)] = z;
                }
            }
        }
        Self { dim, matrix }
    }

    /// The superoperator of a channel, read off its Choi matrix.
    pub fn from_channel(channel: &QuantumChannel) -> Self {
        let d = channel.dim();
        let c = channel.choi();
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        matrix[(n * d + m, k * d + j)] = c[(m * d + j, n * d + k)];
                    }
                }
            }
        }
        Self { dim: d, matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::Dimension(format!(
                "superoperator acts on {0}x{0}, got {1}x{2}",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        let out = self.matrix.matvec(&x.vec())?;
        ComplexMatrix::unvec(&out, self.dim, self.dim)
    }

    /// `max_X |tr(L X)|` over matrix units, i.e. `‖vec(I)† L‖_max`.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim;
        (0..d * d)
            .map(|c| {
                (0..d)
                    .map(|i| self.matrix[(i * d + i, c)])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max ‖L(E_ij†) − L(E_ij)†‖_max` over matrix units.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = self
                    .apply(&ComplexMatrix::unit(d, j, i))
                    .expect("shape checked");
                let b = self
                    .apply(&ComplexMatrix::unit(d, i, j))
                    .expect("shape checked");
                worst = worst.max(a.max_abs_diff(&b.adjoint()));
            }
        }
        worst
    }

    /// `e^{tL}` as a matrix.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        expm(&self.matrix.scale_real(t))
    }

    /// Choi matrix of the map, in the convention of [`crate::channels`].
    pub fn choi(&self) -> ComplexMatrix {
        choi_of_superop_matrix(&self.matrix, self.dim)
    }
}

/// Choi matrix `C[m·d + j, n·d + k] = Φ(E_jk)[m, n]` of a superoperator matrix.
pub fn choi_of_superop_matrix(s: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            for m in 0..d {
                for n in 0..d {
                    choi[(m * d + j, n * d + k)] = s[(n * d + m, k * d + j)];
                }
            }
        }
    }
    choi
}

/// One dissipation channel `γ (V X V† − ½{V†V, X})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    #[serde(rename = "V")]
    pub v: ComplexMatrix,
    pub gamma: f64,
}

/// Hamiltonian plus weighted jump operators.
#[derive(Debug, Clone, PartialEq)]
pub struct GKSLGenerator {
    dim: usize,
    h: ComplexMatrix,
    jumps: Vec<Jump>,
}

impl GKSLGenerator {
    pub fn new(h: ComplexMatrix, jumps: Vec<Jump>) -> Result<Self> {
        let dim = h.require_square("Hamiltonian")?;
        let deviation = h.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::Hermiticity { deviation });
        }
        for jump in &jumps {
            if jump.v.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "jump operator is {}x{}, Hamiltonian is {dim}x{dim}",
                    jump.v.rows(),
                    jump.v.cols()
                )));
            }
            if !jump.gamma.is_finite() || jump.gamma < RATE_FLOOR {
                return Err(Error::Domain(format!("rate {} is negative", jump.gamma)));
            }
        }
        Ok(Self {
            dim,
            h: h.hermitian_part(),
            jumps,
        })
    }

    /// `H = 0`, single jump `σ₋ = |0⟩⟨1|` with rate `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        Self::new(
            ComplexMatrix::zeros(2, 2),
            vec![Jump {
                v: crate::linalg::pauli::lowering(),
                gamma,
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn superoperator(&self) -> Superoperator {
        superop_from_generator(self)
    }

    /// Largest rate, or zero without jumps.
    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.gamma).fold(0.0, f64::max)
    }
}

/// Builds the column-stacked matrix of the generator.
pub fn superop_from_generator(g: &GKSLGenerator) -> Superoperator {
    let d = g.dim;
    let id = ComplexMatrix::identity(d);
    let mut m = (&kron(&id, &g.h) - &kron(&g.h.transpose(), &id)).scale(-I);
    for jump in &g.jumps {
        let v = &jump.v;
        let vdv = &v.adjoint() * v;
        let mut term = kron(&v.conj(), v);
        term -= &kron(&id, &vdv).scale_real(0.5);
        term -= &kron(&vdv.transpose(), &id).scale_real(0.5);
        m += &term.scale_real(jump.gamma);
    }
    Superoperator { dim: d, matrix: m }
}

/// `e^{tL} ρ₀`.
pub fn evolve(g: &GKSLGenerator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("evolution time {t} must be ≥ 0")));
    }
    if rho0.dim() != g.dim {
        return Err(Error::Dimension(format!(
            "state has dimension {}, generator {}",
            rho0.dim(),
            g.dim
        )));
    }
    let prop = superop_from_generator(g).propagator(t)?;
    let out = prop.matvec(&rho0.matrix().vec())?;
    DensityMatrix::relaxed(ComplexMatrix::unvec(&out, g.dim, g.dim)?)
}

/// `‖e^{(t+s)L} − e^{tL} e^{sL}‖_max`.
pub fn semigroup_check(g: &GKSLGenerator, t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(Error::Domain(format!(
            "times must be ≥ 0, got t={t}, s={s}"
        )));
    }
    let l = superop_from_generator(g);
    let joint = l.propagator(t + s)?;
    let split = &l.propagator(t)? * &l.propagator(s)?;
    Ok(joint.max_abs_diff(&split))
}

/// Orthonormal basis of `d×d` matrices under `⟨A, B⟩ = tr(A†B)`, with
/// traceless leading elements and `I/√d` last.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    /// Validates a user-supplied basis.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::Dimension("empty operator basis".into()))?
            .rows();
        if elements.len() != dim * dim || elements.iter().any(|f| f.shape() != (dim, dim)) {
            return Err(Error::Dimension(format!(
                "operator basis for d={dim} needs {} elements of shape {dim}x{dim}",
                dim * dim
            )));
        }
        let basis = Self { dim, elements };
        let deviation = basis.gram_deviation();
        if deviation > 1e-12 {
            return Err(Error::Isometry { deviation });
        }
        let last = basis.elements.last().expect("non-empty");
        let scaled_identity = ComplexMatrix::identity(dim).scale_real(1.0 / (dim as f64).sqrt());
        if last.max_abs_diff(&scaled_identity) > 1e-12 {
            return Err(Error::Domain("last basis element must be I/√d".into()));
        }
        Ok(basis)
    }

    /// Generalized Gell-Mann matrices: symmetric pairs, antisymmetric pairs,
    /// diagonal family, then `I/√d`. Each has unit Hilbert-Schmidt norm.
    pub fn gell_mann(dim: usize) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in j + 1..dim {
                let mut f = ComplexMatrix::zeros(dim, dim);
                f[(j, k)] = c64(r, 0.0);
                f[(k, j)] = c64(r, 0.0);
                elements.push(f);
            }
        }
        for j in 0..dim {
            for k in j + 1..dim {
                let mut f = ComplexMatrix::zeros(dim, dim);
                f[(j, k)] = c64(0.0, -r);
                f[(k, j)] = c64(0.0, r);
                elements.push(f);
            }
        }
        for l in 1..dim {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = vec![0.0; dim];
            for x in diag.iter_mut().take(l) {
                *x = norm;
            }
            diag[l] = -(l as f64) * norm;
            elements.push(ComplexMatrix::from_real_diag(&diag));
        }
        elements.push(ComplexMatrix::identity(dim).scale_real(1.0 / (dim as f64).sqrt()));
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// `‖G − I‖_max` for the Gram matrix `G_ij = tr(F_i† F_j)`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.hs_inner(b) - target).norm());
            }
        }
        worst
    }

    /// Matrix of `X ↦ F_i X F_j†`, i.e. `F̄_j ⊗ F_i`.
    fn product_map(&self, i: usize, j: usize) -> ComplexMatrix {
        kron(&self.elements[j].conj(), &self.elements[i])
    }

    /// Coefficients `c_ij` with `S = Σ c_ij F̄_j ⊗ F_i`, by solving the
    /// `d⁴`-dimensional linear system.
    pub fn expand(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.elements.len();
        if s.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "expected a {n}x{n} superoperator, got {}x{}",
                s.rows(),
                s.cols()
            )));
        }
        let columns: Vec<Vec<Complex64>> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.product_map(i, j).into_entries())
            .collect();
        let system = ComplexMatrix::from_columns(&columns)?;
        let rhs = ComplexMatrix::new(n * n, 1, s.entries().to_vec())?;
        let flat = solve(&system, &rhs)?;
        ComplexMatrix::new(n, n, flat.into_entries())
    }

    /// Coefficients by Hilbert-Schmidt projection, `c_ij = ⟨F̄_j ⊗ F_i, S⟩`.
    pub fn project(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.elements.len();
        if s.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "expected a {n}x{n} superoperator, got {}x{}",
                s.rows(),
                s.cols()
            )));
        }
        let mut c = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] = self.product_map(i, j).hs_inner(s);
            }
        }
        Ok(c)
    }
}

/// Result of [`gksl_decompose`].
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub generator: GKSLGenerator,
    /// Coefficient matrix `a_ij` over the traceless basis elements.
    pub a: ComplexMatrix,
    /// Eigenvalues of the Hermitian part of `a`, before clamping.
    pub a_eigenvalues: Vec<f64>,
    /// `‖L − L(recovered)‖_max`.
    pub residual: f64,
    /// `‖G + ½ Σ a_ij F_j† F_i‖_max` where `G` collects the anticommutator
    /// part of the mixed terms; zero for a trace-preserving input.
    pub consistency_residual: f64,
}

/// Coefficient matrix of the traceless block and the mixed-term operator `F`.
fn coefficient_blocks(
    c: &ComplexMatrix,
    basis: &OperatorBasis,
) -> (ComplexMatrix, ComplexMatrix, Complex64) {
    let d = basis.dim();
    let n = d * d;
    let k = n - 1;
    let mut a = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = c[(i, j)];
        }
    }
    let mut f = ComplexMatrix::zeros(d, d);
    for i in 0..k {
        f += &basis.elements()[i].scale(c[(i, k)]);
    }
    let f = f.scale_real(1.0 / (d as f64).sqrt());
    (a, f, c[(k, k)])
}

/// Splits a generator into `−i[H, ·]` and weighted jump terms.
///
/// The input must annihilate the trace and preserve Hermiticity within
/// [`DECOMPOSE_TOL`]. Eigenvalues of `A` in `(−DECOMPOSE_TOL, 0)` are
/// clamped; anything more negative means the semigroup is not completely
/// positive.
pub fn gksl_decompose(l: &Superoperator, basis: &OperatorBasis) -> Result<Decomposition> {
    let d = l.dim();
    if basis.dim() != d {
        return Err(Error::Dimension(format!(
            "basis dimension {} does not match superoperator dimension {d}",
            basis.dim()
        )));
    }
    let residual = l.trace_residual();
    if residual > DECOMPOSE_TOL {
        return Err(Error::NotTracePreserving { residual });
    }
    let residual = l.hermiticity_residual();
    if residual > DECOMPOSE_TOL {
        return Err(Error::NotHermiticityPreserving { residual });
    }

    let c = basis.expand(l.matrix())?;
    let (a, f, a_last) = coefficient_blocks(&c, basis);
    let h = (&f - &f.adjoint()).scale(c64(0.0, 0.5)); // −(F − F†)/(2i)
    let re_f = (&f + &f.adjoint()).scale_real(0.5);

    let elements = basis.elements();
    let k = a.rows();
    let mut g = &re_f + &ComplexMatrix::identity(d).scale(a_last / (2.0 * d as f64));
    for i in 0..k {
        for j in 0..k {
            if a[(i, j)] != ZERO {
                g += &(&elements[j].adjoint() * &elements[i]).scale(a[(i, j)] * 0.5);
            }
        }
    }
    let consistency_residual = g.max_abs();

    let spec = eigh(&a.hermitian_part())?;
    let min = spec.min();
    if min < -DECOMPOSE_TOL {
        return Err(Error::NotCompletelyPositiveGenerator {
            min_eigenvalue: min,
        });
    }
    let u = &spec.eigenvectors;
    let jumps = (0..k)
        .map(|l_idx| {
            let mut v = ComplexMatrix::zeros(d, d);
            for i in 0..k {
                v += &elements[i].scale(u[(i, l_idx)]);
            }
            Jump {
                v,
                gamma: spec.eigenvalues[l_idx].max(0.0),
            }
        })
        .collect();
    let generator = GKSLGenerator::new(h.hermitian_part(), jumps)?;
    let residual = superop_from_generator(&generator)
        .matrix
        .max_abs_diff(l.matrix());
    Ok(Decomposition {
        generator,
        a,
        a_eigenvalues: spec.eigenvalues,
        residual,
        consistency_residual,
    })
}

/// Finite-difference estimate of `A`: expands `e^{tL}` in the same basis and
/// returns `c_ij(t)/t` over the traceless block.
pub fn finite_difference_a(
    l: &Superoperator,
    basis: &OperatorBasis,
    t: f64,
) -> Result<ComplexMatrix> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("step {t} must be > 0")));
    }
    let c = basis.project(&l.propagator(t)?)?;
    let (a, _, _) = coefficient_blocks(&c, basis);
    Ok(a.scale_real(1.0 / t))
}

/// `L X = −i[H, X] + Σ_ij a_ij (F_i X F_j† − ½{F_j† F_i, X})` over the
/// traceless basis elements.
pub fn superop_from_coefficients(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    basis: &OperatorBasis,
) -> Result<Superoperator> {
    let d = basis.dim();
    let k = d * d - 1;
    if h.shape() != (d, d) || a.shape() != (k, k) {
        return Err(Error::Dimension(format!(
            "need a {d}x{d} Hamiltonian and a {k}x{k} coefficient matrix"
        )));
    }
    let id = ComplexMatrix::identity(d);
    let mut m = (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(-I);
    let f = basis.elements();
    for i in 0..k {
        for j in 0..k {
            let coeff = a[(i, j)];
            if coeff == ZERO {
                continue;
            }
            let fjfi = &f[j].adjoint() * &f[i];
            let mut term = kron(&f[j].conj(), &f[i]);
            term -= &kron(&id, &fjfi).scale_real(0.5);
            term -= &kron(&fjfi.transpose(), &id).scale_real(0.5);
            m += &term.scale(coeff);
        }
    }
    Superoperator::new(m, d)
}

/// Generator file: `{"dim": d, "H": matrix, "jumps": [{"V": matrix, "gamma": γ}, …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub dim: usize,
    #[serde(rename = "H")]
    pub h: ComplexMatrix,
    pub jumps: Vec<Jump>,
}

impl GeneratorFile {
    pub fn into_generator(self) -> Result<GKSLGenerator> {
        let g = GKSLGenerator::new(self.h, self.jumps)?;
        if g.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "declared dim {}, Hamiltonian is {1}x{1}",
                self.dim,
                g.dim()
            )));
        }
        Ok(g)
    }
}

impl From<&GKSLGenerator> for GeneratorFile {
    fn from(g: &GKSLGenerator) -> Self {
        Self {
            dim: g.dim,
            h: g.h.clone(),
            jumps: g.jumps.clone(),
        }
    }
}

/// Superoperator file: `{"dim": d, "superop": matrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperoperatorFile {
    pub dim: usize,
    pub superop: ComplexMatrix,
}

impl SuperoperatorFile {
    pub fn into_superoperator(self) -> Result<Superoperator> {
        Superoperator::new(self.superop, self.dim)
    }
}
