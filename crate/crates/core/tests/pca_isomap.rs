use dimest::data::synth_factor_panel;
use dimest::isomap::{double_center, geodesics, isomap_embed, knn_graph};
use dimest::pca::{fit_pca, reconstruction_error_curve, scree};
use dimest::DataMatrix;
use ndarray::{Array2, Axis};
use proptest::prelude::*;

fn points(max_rows: usize, dims: usize) -> impl Strategy<Value = DataMatrix> {
    (3..=max_rows).prop_flat_map(move |m| {
        proptest::collection::vec(-5.0..5.0f64, m * dims)
            .prop_map(move |v| DataMatrix::new(Array2::from_shape_vec((m, dims), v).unwrap()).unwrap())
    })
}

fn dist(x: &DataMatrix, i: usize, j: usize) -> f64 {
    let d = &x.values().row(i) - &x.values().row(j);
    d.dot(&d).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scree_sums_to_one_and_descends(x in points(15, 6), center in any::<bool>()) {
        let model = fit_pca(&x, center).unwrap();
        if let Ok(s) = scree(&model) {
            let v = &s.normalized_variance;
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(v.windows(2).all(|w| w[0] >= w[1]));
        }
        if center {
            let centered = x.values() - &model.mean().view().insert_axis(Axis(0));
            prop_assert!(centered.mean_axis(Axis(0)).unwrap().iter().all(|m| m.abs() <= 1e-10));
        }
    }

    #[test]
    fn error_curve_is_non_increasing(x in points(15, 6)) {
        let model = fit_pca(&x, false).unwrap();
        let ks: Vec<usize> = (1..=model.svd().rank_bound()).collect();
        let curve = reconstruction_error_curve(&model, &x, &ks).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        prop_assert!(curve.last().unwrap().1 <= 1e-8);
    }

    #[test]
    fn geodesics_dominate_euclidean_distances(x in points(12, 3), k in 1usize..4) {
        let k = k.min(x.row_count() - 1);
        if let Ok(geo) = geodesics(&knn_graph(&x, k).unwrap()) {
            let d = geo.distances();
            for i in 0..x.row_count() {
                prop_assert_eq!(d[[i, i]], 0.0);
                for j in 0..x.row_count() {
                    prop_assert!(d[[i, j]] >= dist(&x, i, j) - 1e-9);
                    prop_assert_eq!(d[[i, j]], d[[j, i]]);
                }
            }
        }
    }

    #[test]
    fn gram_rows_and_columns_sum_to_zero(x in points(12, 3)) {
        let geo = geodesics(&knn_graph(&x, x.row_count() - 1).unwrap()).unwrap();
        let s = double_center(&geo).unwrap();
        for sum in s.values().sum_axis(Axis(0)).iter().chain(s.values().sum_axis(Axis(1)).iter()) {
            prop_assert!(sum.abs() <= 1e-8 * (1.0 + s.frobenius_norm()));
        }
    }

    #[test]
    fn euclidean_geodesics_are_reproduced_by_the_embedding(x in points(10, 3)) {
        // A complete graph keeps geodesics Euclidean, so S is positive semi-definite.
        let m = x.row_count();
        let r = isomap_embed(&x, m - 1, m).unwrap();
        let e = &r.embedding;
        for i in 0..m {
            for j in 0..i {
                let want = dist(&x, i, j);
                prop_assert!((dist(e, i, j) - want).abs() <= 1e-6 * want.max(1.0));
            }
        }
    }
}

#[test]
fn factor_panel_has_exactly_r_large_scree_entries() {
    for (r, seed) in [(2, 1), (4, 2), (6, 3)] {
        let noise = 1e-3 * (r as f64).sqrt();
        let x = synth_factor_panel(80, 40, r, noise, seed).unwrap();
        let s = scree(&fit_pca(&x, false).unwrap()).unwrap();
        assert_eq!(s.normalized_variance.iter().filter(|&&v| v > 1e-3).count(), r);
    }
}

#[test]
fn rank_five_reconstruction() {
    let x = synth_factor_panel(30, 20, 5, 0.0, 8).unwrap();
    let model = fit_pca(&x, false).unwrap();
    let curve = reconstruction_error_curve(&model, &x, &[4, 5]).unwrap();
    assert!(curve[0].1 > 1e-3);
    assert!(curve[1].1 <= 1e-6);
}

#[test]
fn square_without_diagonals() {
    let square = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let g = geodesics(&knn_graph(&square, 2).unwrap()).unwrap();
    assert_eq!(g.distances()[[0, 2]], 2.0);
    assert_eq!(g.distances()[[1, 3]], 2.0);
}

#[test]
fn two_points_embed_symmetrically() {
    let d = 3.0;
    let x = DataMatrix::from_rows(&[[0.0, 0.0], [d, 0.0]]).unwrap();
    let r = isomap_embed(&x, 1, 1).unwrap();
    let e = r.embedding.values();
    assert!((e[[0, 0]].abs() - d / 2.0).abs() < 1e-12);
    assert!((e[[0, 0]] + e[[1, 0]]).abs() < 1e-12);
    // Gram eigenvalue d²/2; the spectrum holds its square root.
    assert!((r.gram_eigenvalues[0] - d * d / 2.0).abs() < 1e-12);
    assert!((r.spectrum.values()[0] - d / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn circle_has_two_dominant_values() {
    // 60 points on a unit circle, rotated into 10 dimensions.
    let n = 60;
    let q = dimest::spectral::svd(&synth_factor_panel(10, 10, 10, 0.0, 4).unwrap()).unwrap().u;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (0..10).map(|c| t.cos() * q[[c, 0]] + t.sin() * q[[c, 1]]).collect()
        })
        .collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    let s = isomap_embed(&x, 2, n).unwrap().spectrum;
    let v = s.values();
    assert!((v[0] - v[1]).abs() <= 1e-6 * v[0]);
    assert!(v[1] >= 2.0 * v[2], "{:?}", &v[..4]);
}
