use dimest::spectral::{column_means, svd, symmetric_eigen, truncated_reconstruct};
use dimest::DataMatrix;
use ndarray::{array, Array2};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = Array2<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-10.0..10.0f64, m * n)
            .prop_map(move |v| Array2::from_shape_vec((m, n), v).unwrap())
    })
}

fn frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn orthonormal_cols(q: &Array2<f64>) -> f64 {
    let g = q.t().dot(q);
    let k = g.nrows();
    (&g - &Array2::<f64>::eye(k)).iter().fold(0.0, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn svd_reconstructs_and_is_orthonormal(x in matrix(20)) {
        let s = svd(&DataMatrix::new(x.clone()).unwrap()).unwrap();
        let r = s.singular_values.len();
        prop_assert_eq!(r, x.nrows().min(x.ncols()));
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|&v| v >= 0.0));
        prop_assert!(orthonormal_cols(&s.u) <= 1e-8);
        prop_assert!(orthonormal_cols(&s.vt.t().to_owned()) <= 1e-8);
        let back = truncated_reconstruct(&s, r).unwrap();
        let norm = frob(&x);
        let err = frob(&(back.values() - &x));
        prop_assert!(if norm > 0.0 { err / norm <= 1e-8 } else { err == 0.0 }, "relative error {}", err / norm);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(x in matrix(6)) {
        // Independent oracle: nalgebra's symmetric eigensolver on XᵀX.
        let (m, n) = x.dim();
        let xt_x = nalgebra::DMatrix::from_fn(m, n, |i, j| x[[i, j]]).transpose()
            * nalgebra::DMatrix::from_fn(m, n, |i, j| x[[i, j]]);
        let mut oracle: Vec<f64> = xt_x.symmetric_eigen().eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let s = svd(&DataMatrix::new(x.clone()).unwrap()).unwrap().singular_values;
        let scale = oracle[0].max(1.0);
        for (a, b) in s.iter().zip(&oracle) {
            // sqrt amplifies eigenvalue rounding near zero.
            prop_assert!((a - b).abs() <= 1e-6 * scale, "{:?} vs {:?}", s, oracle);
        }
    }

    #[test]
    fn own_eigensolver_matches_nalgebra(x in matrix(6)) {
        let g = x.t().dot(&x);
        let (vals, vecs) = symmetric_eigen(&g).unwrap();
        let n = g.nrows();
        let mut oracle: Vec<f64> = nalgebra::DMatrix::from_fn(n, n, |i, j| g[[i, j]])
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let scale = oracle[0].abs().max(1.0);
        for (a, b) in vals.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
        let residual = g.dot(&vecs) - &vecs * &ndarray::Array1::from(vals.clone());
        prop_assert!(frob(&residual) <= 1e-8 * scale);
    }

    #[test]
    fn truncation_error_matches_discarded_energy(x in matrix(12)) {
        let s = svd(&DataMatrix::new(x.clone()).unwrap()).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=s.singular_values.len() {
            let err = frob(&(truncated_reconstruct(&s, k).unwrap().values() - &x));
            let tail: f64 = s.singular_values[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((err - tail).abs() <= 1e-8 * frob(&x).max(1.0));
            prop_assert!(err <= last + 1e-9);
            last = err;
        }
    }
}

#[test]
fn rank_one_example() {
    let s = svd(&DataMatrix::new(array![[1.0, 2.0], [2.0, 4.0]]).unwrap()).unwrap();
    assert!((s.singular_values[0] - 5.0).abs() < 1e-12);
    assert!(s.singular_values[1].abs() < 1e-12);
    let back = truncated_reconstruct(&s, 1).unwrap();
    assert!(back.values().iter().zip([1.0, 2.0, 2.0, 4.0]).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn truncating_a_diagonal_keeps_the_larger_entry() {
    let s = svd(&DataMatrix::new(array![[3.0, 0.0], [0.0, 4.0]]).unwrap()).unwrap();
    let k1 = truncated_reconstruct(&s, 1).unwrap();
    let expected = array![[0.0, 0.0], [0.0, 4.0]];
    assert!(k1.values().iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!(truncated_reconstruct(&s, 0).is_err());
    assert!(truncated_reconstruct(&s, 3).is_err());
}

#[test]
fn column_means_examples() {
    let m = |a: Array2<f64>| column_means(&DataMatrix::new(a).unwrap()).to_vec();
    assert_eq!(m(array![[1.0, 2.0], [3.0, 4.0]]), vec![2.0, 3.0]);
    assert_eq!(m(array![[7.0, -1.0, 0.5]]), vec![7.0, -1.0, 0.5]);
    assert_eq!(m(array![[-1.0, 0.0], [1.0, 0.0]]), vec![0.0, 0.0]);
}
