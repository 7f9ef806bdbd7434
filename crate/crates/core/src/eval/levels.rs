use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};

use super::auc::{roc_auc, Level, ScoredExample};
use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FrameFeatureTable, Label};
use crate::gbdt::{Model, TreeEnsemble};
use crate::preprocess::{aggregate_segment, apply_standardizer, segment_indices, Aggregation, SegmentSpec};

/// How a segment gets its score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentScoring {
    /// Score the aggregated segment vector.
    Aggregate(Aggregation),
    /// Average the member frames' probabilities.
    ScoreMean,
}

impl Default for SegmentScoring {
    fn default() -> Self {
        SegmentScoring::Aggregate(Aggregation::FeatureMean)
    }
}

impl fmt::Display for SegmentScoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentScoring::Aggregate(a) => a.fmt(f),
            SegmentScoring::ScoreMean => f.write_str("score_mean"),
        }
    }
}

impl FromStr for SegmentScoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "score_mean" => Ok(SegmentScoring::ScoreMean),
            other => Ok(SegmentScoring::Aggregate(other.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelScores {
    pub frame: Vec<ScoredExample>,
    pub segment: Vec<ScoredExample>,
    pub video: Vec<ScoredExample>,
}

impl LevelScores {
    pub fn get(&self, level: Level) -> &[ScoredExample] {
        match level {
            Level::Frame => &self.frame,
            Level::Segment => &self.segment,
            Level::Video => &self.video,
        }
    }

    pub fn auc(&self, level: Level) -> Result<f64> {
        roc_auc(self.get(level))
    }
}

/// Scores already-standardized frames of one video at all three levels,
/// appending to `out`.
pub(crate) fn score_standardized(
    video_id: &str,
    label: Label,
    z: ArrayView2<'_, f64>,
    frame_model: &TreeEnsemble,
    segment_model: Option<&TreeEnsemble>,
    spec: SegmentSpec,
    scoring: SegmentScoring,
    out: &mut LevelScores,
) -> Result<()> {
    let probs = frame_model.predict_proba(z)?;
    let example = |unit_id: String, score: f64, level: Level| ScoredExample {
        unit_id,
        video_id: video_id.to_string(),
        score,
        label,
        level,
    };
    for (i, &p) in probs.iter().enumerate() {
        out.frame.push(example(format!("{video_id}#{i}"), p, Level::Frame));
    }

    let windows = segment_indices(z.nrows(), spec);
    let seg_scores: Vec<f64> = match scoring {
        SegmentScoring::ScoreMean => windows
            .iter()
            .map(|&(s, e)| probs[s..e].iter().sum::<f64>() / (e - s) as f64)
            .collect(),
        SegmentScoring::Aggregate(mode) => {
            let model = match mode {
                Aggregation::FeatureMean => frame_model,
                Aggregation::FeatureMeanStd => segment_model.ok_or_else(|| {
                    Error::InvalidConfig("feature_mean_std scoring needs a segment-level ensemble".into())
                })?,
            };
            let dim = mode.output_dim(z.ncols());
            let mut seg = Array2::zeros((windows.len(), dim));
            for (k, &(s, e)) in windows.iter().enumerate() {
                let v = aggregate_segment(z.slice(ndarray::s![s..e, ..]), mode)?;
                seg.row_mut(k).assign(&ndarray::ArrayView1::from(&v));
            }
            model.predict_proba(seg.view())?
        }
    };
    for (&(s, e), &p) in windows.iter().zip(&seg_scores) {
        out.segment.push(example(format!("{video_id}#{s}-{e}"), p, Level::Segment));
    }

    let video_score = probs.iter().sum::<f64>() / probs.len() as f64;
    out.video.push(example(video_id.to_string(), video_score, Level::Video));
    Ok(())
}

/// Frame probabilities, segment scores and mean-frame video scores for each
/// table, using the standardization embedded in the model.
pub fn score_levels(
    model: &Model,
    tables: &[FrameFeatureTable],
    schema: &FeatureSchema,
    spec: SegmentSpec,
    scoring: SegmentScoring,
) -> Result<LevelScores> {
    model.check_schema(schema)?;
    let mut out = LevelScores::default();
    for t in tables {
        let z = apply_standardizer(t.rows().view(), &model.stats)?;
        score_standardized(
            &t.video_id,
            t.label,
            z.view(),
            &model.ensemble,
            model.segment_ensemble.as_ref(),
            spec,
            scoring,
            &mut out,
        )?;
    }
    Ok(out)
}
