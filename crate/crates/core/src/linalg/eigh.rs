use num_complex::Complex64;

use super::{c64, ComplexMatrix, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues ascend; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]`. Each eigenvector is phase-fixed so that its
/// largest-magnitude component (first one on ties) is real and positive.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `V f(Λ) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum();
            }
        }
        out
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| c64(l, 0.0))
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Inputs within [`HERMITIAN_TOL`] of Hermitian are symmetrized first;
/// anything further off is rejected.
pub fn eigh(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.require_square("eigh input")?;
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::Hermiticity { deviation });
    }
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = c64(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * 1e-3 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col = v.column(old_col);
        canonicalize_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, new_col)] = z;
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Scale `v` by a unit phase so its largest-magnitude component is real
/// positive. Components within a relative 1e-12 of the maximum count as
/// ties and the first one wins.
pub(crate) fn canonicalize_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("max exists");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = c64(v[pivot].re, 0.0);
}

/// One Jacobi rotation zeroing `a[p,q]`: `A ← G† A G`, `V ← V G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase that makes the (p,q) element real, then a real symmetric rotation
    let phase = apq.conj() / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G restricted to (p,q): [[c, s], [-s·phase, c·phase]]
    let g_pp = c64(c, 0.0);
    let g_pq = c64(s, 0.0);
    let g_qp = -phase * s;
    let g_qq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c64(a[(p, p)].re, 0.0);
    a[(q, q)] = c64(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
