//! Random states, unitaries, channels and generators for tests and
//! self-checks. All samplers take an explicit RNG so runs are reproducible
//! from a seed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{choi_from_kraus, KrausSet, QuantumChannel};
use crate::gksl::{GKSLGenerator, Jump};
use crate::linalg::{inner, kron, vec_norm, ComplexMatrix};
use crate::states::{project, DensityMatrix, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("shape matches")
}

/// Haar-distributed unitary: Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let overlap = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= overlap * y;
                }
            }
        }
        let norm = vec_norm(&v);
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Uniformly distributed pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v = (0..dim).map(|_| gaussian(rng)).collect();
    PureState::normalized(v).expect("non-zero with probability one")
}

/// Full-rank mixed state `GG†/tr(GG†)` from a Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).expect("valid by construction")
}

/// Either a pure or a mixed random state, chosen by coin flip.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    if rng.random_bool(0.5) {
        project(&random_pure_state(dim, rng))
    } else {
        random_density(dim, rng)
    }
}

/// `ρ_A ⊗ ρ_B` with independent random factors.
pub fn random_product_state<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rng: &mut R,
) -> DensityMatrix {
    let a = random_state(dim_a, rng);
    let b = random_state(dim_b, rng);
    DensityMatrix::new(kron(a.matrix(), b.matrix())).expect("product of states")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}

/// `n` Kraus operators read off the first column block of a Haar unitary on
/// `ℂ^d ⊗ ℂ^n`, i.e. `K_α[m, i] = U[m·n + α, i·n]`.
pub fn random_kraus<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> KrausSet {
    let u = haar_unitary(dim * n, rng);
    let ops = (0..n)
        .map(|alpha| {
            let mut k = ComplexMatrix::zeros(dim, dim);
            for m in 0..dim {
                for i in 0..dim {
                    k[(m, i)] = u[(m * n + alpha, i * n)];
                }
            }
            k
        })
        .collect();
    KrausSet::new(ops).expect("isometry blocks are complete")
}

/// Random CPTP map: a Haar unitary on system ⊗ `d²`-dimensional ancilla,
/// ancilla prepared in `e_0`, ancilla traced out.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumChannel {
    choi_from_kraus(&random_kraus(dim, dim * dim, rng))
}

/// Random valid generator: Hermitian `H` and `n_jumps` Ginibre jump operators
/// with rates uniform in `[0.1, 1)`.
pub fn random_generator<R: Rng + ?Sized>(dim: usize, n_jumps: usize, rng: &mut R) -> GKSLGenerator {
    let h = random_hermitian(dim, rng);
    let jumps = (0..n_jumps)
        .map(|_| Jump {
            v: ginibre(dim, dim, rng),
            gamma: rng.random_range(0.1..1.0),
        })
        .collect();
    GKSLGenerator::new(h, jumps).expect("valid by construction")
}
