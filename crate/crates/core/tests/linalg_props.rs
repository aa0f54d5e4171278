use nalgebra::DMatrix;
use num_complex::Complex64;
use oqs_core::linalg::{c64, eigh, expm, kron, partial_trace, ComplexMatrix, Keep};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        let entries = v
            .into_iter()
            .map(|(re, im)| c64(re * scale, im * scale))
            .collect();
        ComplexMatrix::new(rows, cols, entries).unwrap()
    })
}

fn square(max_dim: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim).prop_flat_map(move |n| matrix(n, n, scale))
}

fn hermitian(max_dim: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    square(max_dim, scale).prop_map(|m| m.hermitian_part())
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.entries())
}

fn taylor(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * m).scale_real(1.0 / k as f64);
        sum += &term;
    }
    sum
}

proptest! {
    #[test]
    fn kron_mixed_product(
        (a, c) in (1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(r, k, s)| (matrix(r, k, 1.0), matrix(k, s, 1.0))),
        (b, d) in (1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(r, k, s)| (matrix(r, k, 1.0), matrix(k, s, 1.0))),
    ) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_keeps_total_trace(
        (da, db, x) in (1..=3usize, 1..=3usize)
            .prop_flat_map(|(da, db)| (Just(da), Just(db), matrix(da * db, da * db, 1.0)))
    ) {
        for keep in [Keep::A, Keep::B] {
            let t = partial_trace(&x, da, db, keep).unwrap().trace();
            prop_assert!((t - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn expm_of_hermitian_is_positive_and_spectral(m in hermitian(5, 2.0)) {
        let e = expm(&m).unwrap();
        prop_assert!(e.hermitian_deviation() < 1e-10);
        let spec = eigh(&e).unwrap();
        prop_assert!(spec.min() > 0.0);

        let s = eigh(&m).unwrap();
        let v = &s.eigenvectors;
        let exp_diag = ComplexMatrix::from_real_diag(
            &s.eigenvalues.iter().map(|x| x.exp()).collect::<Vec<_>>(),
        );
        let rebuilt = &(v * &exp_diag) * &v.adjoint();
        prop_assert!(rebuilt.max_abs_diff(&e) < 1e-10);
    }

    #[test]
    fn expm_matches_taylor_on_unit_ball(m in square(5, 1.0)) {
        let m = m.scale_real(1.0 / m.norm1().max(1.0));
        prop_assert!(expm(&m).unwrap().max_abs_diff(&taylor(&m)) < 1e-10);
    }

    #[test]
    fn eigh_matches_nalgebra(m in hermitian(6, 3.0)) {
        let ours = eigh(&m).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&m).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.eigenvalues.iter().zip(&theirs) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        prop_assert!(ours.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_matches_nalgebra(m in square(5, 2.0)) {
        let ours = expm(&m).unwrap();
        let theirs = to_nalgebra(&m).exp();
        let scale = theirs.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                prop_assert!((ours[(i, j)] - theirs[(i, j)]).norm() < 1e-11 * scale);
            }
        }
    }
}
