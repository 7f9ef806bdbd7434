use ndarray::Array2;
use proptest::prelude::*;

use fakeboost::config::RunConfig;
use fakeboost::eval::{auc_from_scores, split_by_video, SplitRatios};
use fakeboost::features::{heart_rate_vector, Label, RatioGuard, RoiChannelMeans, PER_ROI};
use fakeboost::preprocess::{apply_standardizer, fit_standardizer, segment_indices, SegmentSpec};

fn labels_from(bits: &[bool]) -> Vec<Label> {
    bits.iter().map(|&b| if b { Label::Fake } else { Label::Bonafide }).collect()
}

fn pairwise(scores: &[f64], labels: &[Label]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (s_p, _) in scores.iter().zip(labels).filter(|(_, l)| **l == Label::Fake) {
        for (s_n, _) in scores.iter().zip(labels).filter(|(_, l)| **l == Label::Bonafide) {
            pairs += 1.0;
            wins += if s_p > s_n { 1.0 } else if s_p == s_n { 0.5 } else { 0.0 };
        }
    }
    wins / pairs
}

fn both_classes() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec((-5i32..5).prop_map(|v| v as f64 / 2.0), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_filter("needs both classes", |(_, b)| b.iter().any(|&x| x) && b.iter().any(|&x| !x))
    })
}

proptest! {
    #[test]
    fn auc_matches_pairwise_count((scores, bits) in both_classes()) {
        let labels = labels_from(&bits);
        let auc = auc_from_scores(&scores, &labels).unwrap();
        prop_assert!((auc - pairwise(&scores, &labels)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn negated_scores_complement_auc((scores, bits) in both_classes()) {
        let labels = labels_from(&bits);
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let a = auc_from_scores(&scores, &labels).unwrap();
        let b = auc_from_scores(&neg, &labels).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn standardized_columns_are_unit((rows, cols, seed) in (2usize..40, 1usize..6, any::<u64>())) {
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 10_000) as f64 / 100.0 - 50.0
        };
        let x = Array2::from_shape_fn((rows, cols), |_| next());
        let z = apply_standardizer(x.view(), &fit_standardizer(x.view()).unwrap()).unwrap();
        for (j, col) in z.columns().into_iter().enumerate() {
            let constant = x.column(j).iter().all(|&v| v == x[[0, j]]);
            let n = rows as f64;
            let mean = col.sum() / n;
            let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if constant {
                prop_assert!(col.iter().all(|&v| v == 0.0));
            } else {
                prop_assert!(mean.abs() <= 1e-9);
                prop_assert!((std - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn segments_tile_with_fixed_stride(n in 0usize..400, window in 1usize..60, overlap_frac in 0.0f64..1.0) {
        let overlap = ((window as f64) * overlap_frac) as usize % window;
        let spec = SegmentSpec::new(window, overlap).unwrap();
        let segs = segment_indices(n, spec);
        let expected = if n < window { 0 } else { (n - window) / (window - overlap) + 1 };
        prop_assert_eq!(segs.len(), expected);
        for (k, &(s, e)) in segs.iter().enumerate() {
            prop_assert_eq!(s, k * (window - overlap));
            prop_assert_eq!(e - s, window);
            prop_assert!(e <= n);
        }
    }

    #[test]
    fn video_split_is_a_stratified_partition(n_real in 1usize..60, n_fake in 1usize..20, seed in any::<u64>()) {
        let mut videos: Vec<(String, Label)> = (0..n_real).map(|i| (format!("r{i:03}"), Label::Bonafide)).collect();
        videos.extend((0..n_fake).map(|i| (format!("f{i:03}"), Label::Fake)));
        let ratios = SplitRatios::default();
        match split_by_video(&videos, ratios, seed) {
            Ok(s) => {
                let mut all: Vec<String> = s.train.iter().chain(&s.val).chain(&s.test).cloned().collect();
                prop_assert_eq!(all.len(), videos.len());
                all.sort();
                all.dedup();
                prop_assert_eq!(all.len(), videos.len());
                for part in [&s.train, &s.val, &s.test] {
                    prop_assert!(part.windows(2).all(|w| w[0] < w[1]));
                }
                for (prefix, size) in [("r", n_real), ("f", n_fake)] {
                    let train = s.train.iter().filter(|v| v.starts_with(prefix)).count();
                    prop_assert!(train >= 1);
                    prop_assert!((train as f64 - size as f64 * ratios.train).abs() <= 1.0 + 1e-9);
                }
                prop_assert_eq!(split_by_video(&videos, ratios, seed).unwrap(), s);
            }
            // too few videos to give the training part both classes
            Err(e) => prop_assert!(n_fake.min(n_real) < 2, "{e}"),
        }
    }

    #[test]
    fn ratio_slots_follow_channel_means(r in 0.5f64..255.0, g in 0.5f64..255.0, b in 0.5f64..255.0) {
        let hr = heart_rate_vector(&[RoiChannelMeans::new(r, g, b); 7], RatioGuard::default()).unwrap();
        let s = r + g + b;
        let expected = [r, g, b, r / g, r / b, g / b, r / s, g / s, b / s];
        for roi in hr.values.chunks(PER_ROI) {
            prop_assert_eq!(roi, &expected[..]);
        }
        prop_assert_eq!(hr.degenerate, 0);
    }

    #[test]
    fn config_echo_roundtrips(n_trees in 1usize..3000, lr in 0.001f64..1.0, depth in 0usize..12, seed in any::<u64>(), window in 2usize..60) {
        let mut c = RunConfig::default();
        c.train.n_trees = n_trees;
        c.train.learning_rate = lr;
        c.train.max_depth = depth;
        c.train.seed = seed;
        c.segment = SegmentSpec::new(window, window / 3).unwrap();
        let back = RunConfig::parse(&c.echo(), "echo").unwrap();
        prop_assert_eq!(back, c);
    }
}
