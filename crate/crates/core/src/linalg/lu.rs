use num_complex::Complex64;

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.require_square("LU input")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (pivot, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs <= f64::EPSILON * scale * n as f64 || pivot_abs == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != k {
                perm.swap(pivot, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
            }
            let inv = 1.0 / lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let acc: Complex64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let acc: Complex64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - acc) / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.lu.rows() {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, expected {}",
                b.rows(),
                self.lu.rows()
            )));
        }
        let cols: Result<Vec<Vec<Complex64>>> = (0..b.cols())
            .map(|j| self.solve_vec(&b.column(j)))
            .collect();
        ComplexMatrix::from_columns(&cols?)
    }
}

/// Solves `A X = B`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    LuDecomposition::new(a)?.solve(b)
}
