//! Cross-module property tests.

use proptest::prelude::*;

use warplin::classifiers::{Classifier, ClassifierKind, ClassifierSpec};
use warplin::data::{synth_generate, SynthKind};
use warplin::maxlinear::MaxLinearModel;
use warplin::model_io::{model_from_str, model_to_string};
use warplin::products::{dtw_distance, warped_product, TimeSeries, WeightSequence};
use warplin::warping::{enumerate_paths, path_count, PathConstraint, WarpingPath};

fn finite_series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..=max_len)
}

proptest! {
    #[test]
    fn enumerated_paths_validate_and_count(m in 1usize..=5, n in 1usize..=5) {
        let paths = enumerate_paths(m, n, None).unwrap();
        prop_assert_eq!(paths.len() as u128, path_count(m, n, None).unwrap());
        for p in &paths {
            let rebuilt = WarpingPath::new(p.points().to_vec(), m, n).unwrap();
            prop_assert_eq!(&rebuilt, p);
            prop_assert!(p.len() >= m.max(n));
            prop_assert!(p.len() < m + n);
        }
    }

    #[test]
    fn banded_enumeration_is_a_subset(m in 2usize..=5, n in 2usize..=5, width in 0usize..=4) {
        if let Ok(q) = PathConstraint::band(m, n, width) {
            let constrained = enumerate_paths(m, n, Some(&q)).unwrap();
            let all = enumerate_paths(m, n, None).unwrap();
            prop_assert!(constrained.len() <= all.len());
            for p in &constrained {
                prop_assert!(all.contains(p));
                prop_assert!(p.admissible_under(&q));
            }
        }
    }

    #[test]
    fn tighter_bands_never_raise_the_warped_product(
        w in finite_series(5),
        x in finite_series(5),
    ) {
        let ws = WeightSequence::new(w.clone()).unwrap();
        let ts = TimeSeries::new(x.clone()).unwrap();
        let (unconstrained, _) = warped_product(&ws, &ts, None).unwrap();
        let mut last = unconstrained;
        for width in (0..4).rev() {
            if let Ok(q) = PathConstraint::band(w.len(), x.len(), width) {
                let (value, path) = warped_product(&ws, &ts, Some(&q)).unwrap();
                prop_assert!(value <= unconstrained + 1e-12);
                // Widening from this width back up can only help.
                prop_assert!(value <= last + 1e-9 || value <= unconstrained);
                last = value;
                prop_assert!(path.admissible_under(&q));
            }
        }
    }

    #[test]
    fn dtw_is_symmetric_and_zero_on_equal_inputs(
        x in finite_series(8),
        y in finite_series(8),
    ) {
        let xs = TimeSeries::new(x).unwrap();
        let ys = TimeSeries::new(y).unwrap();
        prop_assert!((dtw_distance(&xs, &ys) - dtw_distance(&ys, &xs)).abs() <= 1e-12);
        prop_assert_eq!(dtw_distance(&xs, &xs), 0.0);
        prop_assert!(dtw_distance(&xs, &ys) >= 0.0);
    }

    #[test]
    fn max_linear_evaluation_is_convex_and_consistent(
        comps in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 1..=5),
        x in prop::collection::vec(-5.0..5.0f64, 3),
        y in prop::collection::vec(-5.0..5.0f64, 3),
        t in 0.0..=1.0f64,
    ) {
        let m = MaxLinearModel::new(comps).unwrap();
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let fx = m.evaluate(&x).unwrap().0;
        let fy = m.evaluate(&y).unwrap().0;
        let fm = m.evaluate(&mix).unwrap().0;
        prop_assert!(fm <= t * fx + (1.0 - t) * fy + 1e-9);
        let (_, idx) = m.evaluate(&x).unwrap();
        prop_assert!(m.active_set(&x).unwrap().contains(&idx));
    }

    #[test]
    fn model_text_round_trip_is_lossless(
        params in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 6), 2),
        band in prop::option::of(0usize..4),
    ) {
        let c = Classifier::with_parameters(
            ClassifierSpec::per_class(ClassifierKind::Ep),
            2,
            3,
            2,
            band,
            params,
        )
        .unwrap();
        let back = model_from_str(&model_to_string(&c)).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn kfold_union_recovers_the_multiset() {
    let ds = synth_generate(SynthKind::Grid9, 7, 31).unwrap();
    for k in [2, 3, 7] {
        let folds = ds.kfold_split(k, 5).unwrap();
        let mut collected: Vec<(Vec<u64>, usize)> = folds
            .iter()
            .flat_map(|(_, test)| test.examples().iter().cloned())
            .map(|(x, y)| (x.values().iter().map(|v| v.to_bits()).collect(), y))
            .collect();
        let mut original: Vec<(Vec<u64>, usize)> = ds
            .examples()
            .iter()
            .map(|(x, y)| (x.values().iter().map(|v| v.to_bits()).collect(), *y))
            .collect();
        collected.sort();
        original.sort();
        assert_eq!(collected, original, "k = {k}");
    }
}
