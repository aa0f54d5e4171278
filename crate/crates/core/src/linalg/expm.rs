//! Matrix exponential.
//!
//! Hermitian and anti-Hermitian inputs go through the spectral route;
//! everything else (superoperators are generally non-normal) uses
//! scaling and squaring with diagonal Padé approximants of degree
//! 3, 5, 7, 9 or 13, following Higham's 2005 selection thresholds.

use super::{c64, eigh, solve, ComplexMatrix};
use crate::error::Result;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^M` for square `M`.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.require_square("expm input")?;
    let scale = m.max_abs().max(1.0);
    let herm_dev = m.hermitian_deviation();
    if herm_dev <= 1e-14 * scale {
        return Ok(eigh(m)?.apply_fn(|l| c64(l.exp(), 0.0)));
    }
    // anti-Hermitian: M = -iH with H = iM Hermitian
    let h = m.scale(c64(0.0, 1.0));
    if h.hermitian_deviation() <= 1e-14 * scale {
        return Ok(eigh(&h)?.apply_fn(|l| c64(0.0, -l).exp()));
    }
    expm_pade(m)
}

/// Scaling-and-squaring Padé exponential, regardless of structure.
pub fn expm_pade(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square("expm input")?;
    let ident = ComplexMatrix::identity(n);
    let norm = m.norm1();
    if norm == 0.0 {
        return Ok(ident);
    }
    let a2 = m * m;
    for &(degree, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(m, &a2, coeffs);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(2f64.powi(-s));
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let id = |c: f64| ident.scale_real(c);

    let inner_u = &(&a6.scale_real(b[13]) + &a4.scale_real(b[11])) + &a2.scale_real(b[9]);
    let u_poly = &(&(&a6 * &inner_u) + &a6.scale_real(b[7]))
        + &(&(&a4.scale_real(b[5]) + &a2.scale_real(b[3])) + &id(b[1]));
    let u = &a * &u_poly;
    let inner_v = &(&a6.scale_real(b[12]) + &a4.scale_real(b[10])) + &a2.scale_real(b[8]);
    let v = &(&(&a6 * &inner_v) + &a6.scale_real(b[6]))
        + &(&(&a4.scale_real(b[4]) + &a2.scale_real(b[2])) + &id(b[0]));

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Padé approximant of degree 3..9 without scaling.
fn pade_low(a: &ComplexMatrix, a2: &ComplexMatrix, b: &[f64]) -> Result<ComplexMatrix> {
    let n = a.rows();
    let mut u_poly = ComplexMatrix::identity(n).scale_real(b[1]);
    let mut v = ComplexMatrix::identity(n).scale_real(b[0]);
    let mut power = ComplexMatrix::identity(n);
    let m = (b.len() - 1) / 2;
    for k in 1..=m {
        power = &power * a2;
        u_poly += &power.scale_real(b[2 * k + 1]);
        v += &power.scale_real(b[2 * k]);
    }
    let u = a * &u_poly;
    solve(&(&v - &u), &(&v + &u))
}
