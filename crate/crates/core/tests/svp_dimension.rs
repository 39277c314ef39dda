use dimest::autoencoder::HiddenBatch;
use dimest::dimension::{dim_cumulative, dim_gte, estimate_all};
use dimest::{to_svp, Share, Source, Spectrum};
use ndarray::{array, Array2};
use proptest::prelude::*;

fn batch() -> impl Strategy<Value = Array2<f64>> {
    (1usize..=12, 1usize..=16).prop_flat_map(|(m, n)| {
        proptest::collection::vec(prop_oneof![Just(0.0), -8.0..8.0f64], m * n)
            .prop_map(move |v| Array2::from_shape_vec((m, n), v).unwrap())
    })
}

fn svp(z: &Array2<f64>) -> Vec<f64> {
    to_svp(&HiddenBatch::new(z.clone()).unwrap()).unwrap().values().to_vec()
}

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..100.0f64, 1..=64).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        if v[0] == 0.0 {
            v[0] = 1.0;
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn svp_is_descending_and_non_negative(z in batch()) {
        let v = svp(&z);
        prop_assert_eq!(v.len(), z.ncols());
        prop_assert!(v.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(v.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn svp_ignores_unit_order_and_signs(z in batch(), seed in any::<u64>()) {
        // Reverse the columns and flip signs pseudo-randomly.
        let n = z.ncols();
        let shuffled = Array2::from_shape_fn(z.dim(), |(i, j)| {
            let sign = if (seed >> ((i + j) % 64)) & 1 == 1 { -1.0 } else { 1.0 };
            sign * z[[i, n - 1 - j]]
        });
        prop_assert_eq!(svp(&z), svp(&shuffled));
    }

    #[test]
    fn svp_ignores_row_order(z in batch()) {
        let m = z.nrows();
        let reversed = Array2::from_shape_fn(z.dim(), |(i, j)| z[[m - 1 - i, j]]);
        for (a, b) in svp(&z).iter().zip(svp(&reversed)) {
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn scaling_by_a_power_of_two_scales_svp_and_keeps_dimensions(z in batch(), e in -8i32..8) {
        let c = 2f64.powi(e);
        let a = svp(&z);
        let b = svp(&(&z * c));
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x * c == *y));
        if a.iter().any(|&x| x > 0.0) {
            let (g1, c1) = estimate_all(&Spectrum::new(a, Source::Autoencoder).unwrap()).unwrap();
            let (g2, c2) = estimate_all(&Spectrum::new(b, Source::Autoencoder).unwrap()).unwrap();
            prop_assert_eq!((g1.p, c1.p), (g2.p, c2.p));
        }
    }

    #[test]
    fn rules_are_bounded_and_monotone(v in spectrum(), t1 in 0.001..0.999f64, t2 in 0.001..0.999f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let s = Spectrum::new(v.clone(), Source::Pca).unwrap();
        let positive = v.iter().filter(|&&x| x > 0.0).count();
        for share in [Share::Raw, Share::Squared] {
            let a = dim_cumulative(&s, lo, share).unwrap().p;
            let b = dim_cumulative(&s, hi, share).unwrap().p;
            prop_assert!(1 <= a && a <= b && b <= positive.max(1));
        }
        let g_lo = dim_gte(&s, lo).unwrap().p;
        let g_hi = dim_gte(&s, hi).unwrap().p;
        prop_assert!(g_hi <= g_lo && g_lo <= positive);
    }
}

#[test]
fn svp_examples() {
    assert_eq!(svp(&array![[1.0, -2.0], [3.0, -1.0]]), vec![2.5, 1.0]);
    assert_eq!(svp(&array![[-5.0, 2.0, 0.0]]), vec![5.0, 2.0, 0.0]);
    assert_eq!(svp(&Array2::zeros((3, 4))), vec![0.0; 4]);
}
