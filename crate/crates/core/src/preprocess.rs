//! Standardization, sliding-window segmentation and category selection.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::features::{Category, FeatureSchema, Label};

/// Columns whose training std is below this map to 0 after standardization.
pub const MIN_STD: f64 = 1e-12;

/// Per-column mean and population standard deviation of the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n_samples: u64,
}

impl StandardizationStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Standardizes one row in place.
    pub fn apply_row(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "standardizer input".into(),
                expected: self.dim(),
                actual: row.len(),
            });
        }
        for ((x, &m), &s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = if s < MIN_STD { 0.0 } else { (*x - m) / s };
        }
        Ok(())
    }
}

/// Streaming (Welford) column moments, so training frames can be folded in
/// video by video without concatenating them.
#[derive(Debug, Clone)]
pub struct StatsAccumulator {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl StatsAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn push_rows(&mut self, rows: ArrayView2<'_, f64>) -> Result<()> {
        if rows.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                context: "standardizer training rows".into(),
                expected: self.mean.len(),
                actual: rows.ncols(),
            });
        }
        for row in rows.outer_iter() {
            self.n += 1;
            let n = self.n as f64;
            for ((x, mean), m2) in row.iter().zip(&mut self.mean).zip(&mut self.m2) {
                let delta = x - *mean;
                *mean += delta / n;
                *m2 += delta * (x - *mean);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<StandardizationStats> {
        if self.n < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.n as usize,
            });
        }
        let n = self.n as f64;
        let std = self.m2.iter().map(|m2| (m2.max(0.0) / n).sqrt()).collect();
        Ok(StandardizationStats {
            mean: self.mean,
            std,
            n_samples: self.n,
        })
    }
}

/// Fits per-column mean/std on training rows only.
pub fn fit_standardizer(train_rows: ArrayView2<'_, f64>) -> Result<StandardizationStats> {
    let mut acc = StatsAccumulator::new(train_rows.ncols());
    acc.push_rows(train_rows)?;
    acc.finish()
}

pub fn apply_standardizer(rows: ArrayView2<'_, f64>, stats: &StandardizationStats) -> Result<Array2<f64>> {
    if rows.ncols() != stats.dim() {
        return Err(Error::DimensionMismatch {
            context: "standardizer input".into(),
            expected: stats.dim(),
            actual: rows.ncols(),
        });
    }
    let mut out = rows.to_owned();
    for mut row in out.outer_iter_mut() {
        for ((x, &m), &s) in row.iter_mut().zip(&stats.mean).zip(&stats.std) {
            *x = if s < MIN_STD { 0.0 } else { (*x - m) / s };
        }
    }
    Ok(out)
}

/// Window length and overlap, in frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentSpec {
    window: usize,
    overlap: usize,
}

impl Default for SegmentSpec {
    fn default() -> Self {
        Self {
            window: 30,
            overlap: 10,
        }
    }
}

impl SegmentSpec {
    pub fn new(window: usize, overlap: usize) -> Result<Self> {
        if window == 0 || overlap >= window {
            return Err(Error::InvalidConfig(format!(
                "segment window {window} / overlap {overlap}: need 0 <= overlap < window"
            )));
        }
        Ok(Self { window, overlap })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn stride(&self) -> usize {
        self.window - self.overlap
    }
}

/// Full windows only; trailing frames that do not fill a window are dropped.
pub fn segment_indices(n_frames: usize, spec: SegmentSpec) -> Vec<(usize, usize)> {
    (0..)
        .map(|k| k * spec.stride())
        .take_while(|start| start + spec.window <= n_frames)
        .map(|start| (start, start + spec.window))
        .collect()
}

/// How a window of frames becomes one feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    FeatureMean,
    FeatureMeanStd,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::FeatureMean => "feature_mean",
            Aggregation::FeatureMeanStd => "feature_mean_std",
        }
    }

    pub fn output_dim(self, dim: usize) -> usize {
        match self {
            Aggregation::FeatureMean => dim,
            Aggregation::FeatureMeanStd => 2 * dim,
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "feature_mean" => Ok(Aggregation::FeatureMean),
            "feature_mean_std" => Ok(Aggregation::FeatureMeanStd),
            other => Err(Error::InvalidConfig(format!("unknown aggregation `{other}`"))),
        }
    }
}

pub fn aggregate_segment(frame_rows: ArrayView2<'_, f64>, mode: Aggregation) -> Result<Vec<f64>> {
    let n = frame_rows.nrows();
    if n == 0 {
        return Err(Error::EmptySegment);
    }
    let mean = frame_rows
        .mean_axis(Axis(0))
        .expect("non-empty segment")
        .to_vec();
    match mode {
        Aggregation::FeatureMean => Ok(mean),
        Aggregation::FeatureMeanStd => {
            let mut out = mean.clone();
            for (j, col) in frame_rows.axis_iter(Axis(1)).enumerate() {
                let var = col.iter().map(|x| (x - mean[j]).powi(2)).sum::<f64>() / n as f64;
                out.push(var.sqrt());
            }
            Ok(out)
        }
    }
}

/// One window of a video, reduced to a single vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub video_id: String,
    pub start_frame: usize,
    pub end_frame: usize,
    pub vector: Vec<f64>,
    pub label: Label,
}

/// Segments of a video whose (already standardized) frames are `rows`.
pub fn segments_of(
    video_id: &str,
    label: Label,
    rows: ArrayView2<'_, f64>,
    spec: SegmentSpec,
    mode: Aggregation,
) -> Result<Vec<Segment>> {
    segment_indices(rows.nrows(), spec)
        .into_iter()
        .map(|(start, end)| {
            Ok(Segment {
                video_id: video_id.to_string(),
                start_frame: start,
                end_frame: end,
                vector: aggregate_segment(rows.slice(ndarray::s![start..end, ..]), mode)?,
                label,
            })
        })
        .collect()
}

/// Column indices of the requested categories, in schema order.
pub fn category_columns(schema: &FeatureSchema, categories: &[Category]) -> Result<Vec<usize>> {
    if let Some(missing) = categories.iter().find(|c| !schema.contains(**c)) {
        return Err(Error::UnknownCategory(missing.to_string()));
    }
    Ok(schema
        .spans()
        .iter()
        .filter(|(c, _)| categories.contains(c))
        .flat_map(|(_, r)| r.clone())
        .collect())
}

/// Keeps only the requested categories' columns. Output follows schema
/// order regardless of the order of `categories`.
pub fn select_feature_categories(
    rows: ArrayView2<'_, f64>,
    schema: &FeatureSchema,
    categories: &[Category],
) -> Result<(Array2<f64>, FeatureSchema)> {
    if rows.ncols() != schema.total_dim() {
        return Err(Error::SchemaMismatch {
            expected: schema.total_dim(),
            actual: rows.ncols(),
            detail: String::new(),
        });
    }
    let cols = category_columns(schema, categories)?;
    let sub = sub_schema(schema, categories)?;
    Ok((rows.select(Axis(1), &cols), sub))
}

pub fn sub_schema(schema: &FeatureSchema, categories: &[Category]) -> Result<FeatureSchema> {
    if let Some(missing) = categories.iter().find(|c| !schema.contains(**c)) {
        return Err(Error::UnknownCategory(missing.to_string()));
    }
    let widths: Vec<_> = schema
        .widths()
        .into_iter()
        .filter(|(c, _)| categories.contains(c))
        .collect();
    FeatureSchema::new(&widths)
}
