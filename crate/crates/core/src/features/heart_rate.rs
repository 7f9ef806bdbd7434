use crate::error::{Error, Result};
use crate::features::roi::{IntensityConvention, RoiChannelMeans, RoiId};

/// Values emitted per ROI.
pub const PER_ROI: usize = 9;
pub const HR_DIM: usize = PER_ROI * 7;

/// Names of the nine per-ROI slots, in emission order.
pub const SLOT_NAMES: [&str; PER_ROI] = ["r", "g", "b", "r_g", "r_b", "g_b", "r_sum", "g_sum", "b_sum"];

/// Denominator floor and the value substituted when a ratio falls below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioGuard {
    pub epsilon: f64,
    pub fallback: f64,
}

impl RatioGuard {
    pub fn for_convention(convention: IntensityConvention) -> Self {
        let epsilon = match convention {
            IntensityConvention::EightBit => 1e-3,
            IntensityConvention::Unit => 1e-6,
        };
        Self {
            epsilon,
            fallback: 0.0,
        }
    }
}

impl Default for RatioGuard {
    fn default() -> Self {
        Self::for_convention(IntensityConvention::EightBit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeartRateVector {
    pub values: Vec<f64>,
    /// Ratios replaced by the fallback because their denominator was below
    /// epsilon.
    pub degenerate: usize,
}

/// Builds the 63-wide heart-rate block from the seven ROI channel means.
///
/// Per ROI, in canonical ROI order: `[R, G, B, R/G, R/B, G/B, R/S, G/S, B/S]`
/// with `S = R + G + B`.
pub fn heart_rate_vector(means: &[RoiChannelMeans; 7], guard: RatioGuard) -> Result<HeartRateVector> {
    let mut values = Vec::with_capacity(HR_DIM);
    let mut degenerate = 0;
    let mut ratio = |num: f64, den: f64| {
        if den < guard.epsilon {
            degenerate += 1;
            guard.fallback
        } else {
            num / den
        }
    };
    for roi in RoiId::ALL {
        let m = means[roi.index()];
        for v in [m.r, m.g, m.b] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidIntensity {
                    roi: roi.to_string(),
                    value: v,
                });
            }
        }
        let s = m.r + m.g + m.b;
        let block = [
            m.r,
            m.g,
            m.b,
            ratio(m.r, m.g),
            ratio(m.r, m.b),
            ratio(m.g, m.b),
            ratio(m.r, s),
            ratio(m.g, s),
            ratio(m.b, s),
        ];
        values.extend_from_slice(&block);
    }
    Ok(HeartRateVector { values, degenerate })
}

/// Column names of the heart-rate block, e.g. `heart_rate_RC_r_g`.
pub fn heart_rate_column_names() -> Vec<String> {
    RoiId::ALL
        .iter()
        .flat_map(|roi| SLOT_NAMES.iter().map(move |s| format!("heart_rate_{}_{}", roi.abbrev(), s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_channels() {
        let hr = heart_rate_vector(&[RoiChannelMeans::splat(128.0); 7], RatioGuard::default()).unwrap();
        assert_eq!(hr.values.len(), 63);
        let block = [128.0, 128.0, 128.0, 1.0, 1.0, 1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for chunk in hr.values.chunks(9) {
            assert_eq!(chunk, block);
        }
        assert_eq!(hr.degenerate, 0);
    }

    #[test]
    fn single_roi_arithmetic() {
        let mut m = [RoiChannelMeans::splat(10.0); 7];
        m[RoiId::Chin.index()] = RoiChannelMeans::new(100.0, 50.0, 25.0);
        let hr = heart_rate_vector(&m, RatioGuard::default()).unwrap();
        let i = RoiId::Chin.index() * 9;
        assert_eq!(
            &hr.values[i..i + 9],
            &[100.0, 50.0, 25.0, 2.0, 4.0, 2.0, 100.0 / 175.0, 50.0 / 175.0, 25.0 / 175.0]
        );
    }

    #[test]
    fn zero_channel_falls_back() {
        let mut m = [RoiChannelMeans::splat(0.5); 7];
        m[0] = RoiChannelMeans::new(0.2, 0.0, 0.0);
        let hr = heart_rate_vector(&m, RatioGuard::for_convention(IntensityConvention::Unit)).unwrap();
        assert!(hr.values.iter().all(|v| v.is_finite()));
        // r/g, r/b, g/b
        assert_eq!(&hr.values[3..6], &[0.0, 0.0, 0.0]);
        assert_eq!(hr.values[6], 1.0);
        assert_eq!(hr.degenerate, 3);

        let all_black = heart_rate_vector(&[RoiChannelMeans::splat(0.0); 7], RatioGuard::default()).unwrap();
        assert_eq!(all_black.degenerate, 42);
        assert!(all_black.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_negative_and_nan() {
        let mut m = [RoiChannelMeans::splat(1.0); 7];
        m[3].g = f64::NAN;
        assert!(matches!(
            heart_rate_vector(&m, RatioGuard::default()),
            Err(Error::InvalidIntensity { .. })
        ));
        m[3].g = -1.0;
        assert!(heart_rate_vector(&m, RatioGuard::default()).is_err());
    }

    #[test]
    fn column_names() {
        let names = heart_rate_column_names();
        assert_eq!(names.len(), 63);
        assert_eq!(names[0], "heart_rate_RC_r");
        assert_eq!(names[62], "heart_rate_CE_b_sum");
    }

    proptest! {
        #[test]
        fn scaling_moves_raw_slots_only(
            raw in prop::collection::vec(1.0f64..255.0, 21),
            c in 0.01f64..100.0,
        ) {
            let mut m = [RoiChannelMeans::splat(0.0); 7];
            for (i, t) in raw.chunks(3).enumerate() {
                m[i] = RoiChannelMeans::new(t[0], t[1], t[2]);
            }
            let base = heart_rate_vector(&m, RatioGuard::default()).unwrap();
            let scaled = heart_rate_vector(&m.map(|x| x.scaled(c)), RatioGuard::default()).unwrap();
            for (k, (a, b)) in base.values.iter().zip(&scaled.values).enumerate() {
                let expect = if k % 9 < 3 { a * c } else { *a };
                prop_assert!((b - expect).abs() <= 1e-12 * expect.abs().max(1e-300), "slot {k}: {b} vs {expect}");
            }
        }
    }
}
