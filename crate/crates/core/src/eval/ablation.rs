use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use super::auc::Level;
use super::levels::score_levels;
use super::pipeline::fit_model;
use super::split::DatasetSplit;
use crate::config::{format_combination, RunConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::features::{Category, FrameFeatureTable};
use crate::preprocess::{category_columns, sub_schema};

/// The seven single-category rows, in the order the categories are listed
/// in the results table.
pub fn default_individual_sets() -> Vec<Vec<Category>> {
    Category::ALL.iter().map(|&c| vec![c]).collect()
}

/// Combinations added in decreasing order of single-category
/// effectiveness, ending with the shape-augmented set.
pub fn default_combination_sets() -> Vec<Vec<Category>> {
    use Category::*;
    vec![
        vec![Landmark2d, Landmark3d],
        vec![EyeLandmark, Landmark2d, Landmark3d],
        vec![EyeLandmark, HeadPose, Landmark2d, Landmark3d],
        vec![EyeLandmark, HeadPose, Landmark2d, Landmark3d, HeartRate],
        vec![EyeLandmark, HeadPose, Landmark2d, Landmark3d, Shape, HeartRate],
    ]
}

pub fn default_ablation_sets() -> Vec<Vec<Category>> {
    let mut v = default_individual_sets();
    v.extend(default_combination_sets());
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub combination: Vec<Category>,
    pub auc_segment: f64,
    pub auc_frame: f64,
    pub n_trees: usize,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
}

pub const CSV_HEADER: &str = "combination,auc_segment,auc_frame,n_trees,elapsed_seconds";

impl AblationReport {
    pub fn row(&self, combo: &[Category]) -> Option<&AblationRow> {
        let mut key = combo.to_vec();
        key.sort();
        self.rows.iter().find(|r| {
            let mut c = r.combination.clone();
            c.sort();
            c == key
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            writeln!(
                s,
                "{},{:.6},{:.6},{},{:.3}",
                format_combination(&r.combination),
                r.auc_segment,
                r.auc_frame,
                r.n_trees,
                r.elapsed_seconds
            )
            .unwrap();
        }
        s
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let names: Vec<String> = self.rows.iter().map(|r| format_combination(&r.combination)).collect();
        let w = names.iter().map(String::len).max().unwrap_or(0).max("combination".len());
        let mut s = format!(
            "{:<w$}  {:>11}  {:>9}  {:>7}  {:>9}\n",
            "combination", "auc_segment", "auc_frame", "n_trees", "elapsed_s"
        );
        s.push_str(&"-".repeat(w + 46));
        s.push('\n');
        for (name, r) in names.iter().zip(&self.rows) {
            writeln!(
                s,
                "{:<w$}  {:>11.4}  {:>9.4}  {:>7}  {:>9.2}",
                name, r.auc_segment, r.auc_frame, r.n_trees, r.elapsed_seconds
            )
            .unwrap();
        }
        s
    }
}

/// For every combination: select its columns, fit standardization and the
/// classifier on the training videos, and report test AUC at frame and
/// segment level. All combinations share the split and seed. Rows come back
/// in input order.
pub fn run_ablation(
    data: &Dataset,
    split: &DatasetSplit,
    combinations: &[Vec<Category>],
    cfg: &RunConfig,
) -> Result<AblationReport> {
    if combinations.is_empty() {
        return Err(Error::InvalidConfig("no feature combinations to evaluate".into()));
    }
    for combo in combinations {
        if combo.is_empty() {
            return Err(Error::InvalidConfig("empty feature combination".into()));
        }
        category_columns(&data.schema, combo)?;
    }
    let train = data.tables_for(&split.train)?;
    let test = data.tables_for(&split.test)?;

    let rows = combinations
        .par_iter()
        .map(|combo| {
            let started = Instant::now();
            let cols = category_columns(&data.schema, combo)?;
            let schema = sub_schema(&data.schema, combo)?;
            let select = |ts: &[&FrameFeatureTable]| -> Result<Vec<FrameFeatureTable>> {
                ts.iter()
                    .map(|t| {
                        FrameFeatureTable::new(
                            t.video_id.clone(),
                            t.label,
                            t.fps,
                            t.rows().select(ndarray::Axis(1), &cols),
                            &schema,
                        )
                    })
                    .collect()
            };
            let train_sel = select(&train)?;
            let test_sel = select(&test)?;
            let train_refs: Vec<&FrameFeatureTable> = train_sel.iter().collect();
            let trained = fit_model(&train_refs, &schema, cfg)?;
            let scores = score_levels(&trained.model, &test_sel, &schema, cfg.segment, cfg.scoring)?;
            Ok(AblationRow {
                combination: combo.clone(),
                auc_segment: scores.auc(Level::Segment)?,
                auc_frame: scores.auc(Level::Frame)?,
                n_trees: cfg.train.n_trees,
                elapsed_seconds: started.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationReport { rows })
}
