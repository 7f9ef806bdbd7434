//! Evaluation: ROC-AUC, per-video splitting, multi-level scoring and the
//! feature-category ablation harness.

mod ablation;
mod auc;
mod levels;
mod pipeline;
mod split;

pub use ablation::{
    default_ablation_sets, default_combination_sets, default_individual_sets, run_ablation, AblationReport,
    AblationRow, CSV_HEADER,
};
pub use auc::{auc_from_scores, roc_auc, Level, ScoredExample};
pub use levels::{score_levels, LevelScores, SegmentScoring};
pub use pipeline::{fit_model, fit_on_split, Trained};
pub use split::{split_by_video, DatasetSplit, SplitRatios};
