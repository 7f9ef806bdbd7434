use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::HR_DIM;

/// The seven feature families a fused frame vector is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    EyeLandmark,
    HeadPose,
    #[serde(rename = "landmark_2d")]
    Landmark2d,
    #[serde(rename = "landmark_3d")]
    Landmark3d,
    Shape,
    ActionUnit,
    HeartRate,
}

impl Category {
    /// Canonical order, which is also the order of the single-category
    /// ablation rows.
    pub const ALL: [Category; 7] = [
        Category::EyeLandmark,
        Category::HeadPose,
        Category::Landmark2d,
        Category::Landmark3d,
        Category::Shape,
        Category::ActionUnit,
        Category::HeartRate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::EyeLandmark => "eye_landmark",
            Category::HeadPose => "head_pose",
            Category::Landmark2d => "landmark_2d",
            Category::Landmark3d => "landmark_3d",
            Category::Shape => "shape",
            Category::ActionUnit => "action_unit",
            Category::HeartRate => "heart_rate",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownCategory(s.trim().to_string()))
    }
}

/// Named categories laid out as contiguous, non-overlapping column spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    spans: Vec<(Category, Range<usize>)>,
    total_dim: usize,
}

impl FeatureSchema {
    /// Builds a schema from `(category, width)` pairs laid out in the given
    /// order.
    pub fn new(widths: &[(Category, usize)]) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::InvalidSchema("schema has no categories".into()));
        }
        let mut spans = Vec::with_capacity(widths.len());
        let mut offset = 0;
        for (i, &(cat, width)) in widths.iter().enumerate() {
            if widths[..i].iter().any(|&(c, _)| c == cat) {
                return Err(Error::InvalidSchema(format!("category {cat} listed twice")));
            }
            if width == 0 {
                return Err(Error::InvalidSchema(format!("category {cat} has zero width")));
            }
            if cat == Category::HeartRate && width != HR_DIM {
                return Err(Error::InvalidSchema(format!(
                    "heart_rate span must be {HR_DIM} wide, got {width}"
                )));
            }
            spans.push((cat, offset..offset + width));
            offset += width;
        }
        Ok(Self {
            spans,
            total_dim: offset,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn spans(&self) -> &[(Category, Range<usize>)] {
        &self.spans
    }

    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        self.spans.iter().map(|(c, _)| *c)
    }

    pub fn widths(&self) -> Vec<(Category, usize)> {
        self.spans.iter().map(|(c, r)| (*c, r.len())).collect()
    }

    pub fn span(&self, cat: Category) -> Option<Range<usize>> {
        self.spans
            .iter()
            .find(|(c, _)| *c == cat)
            .map(|(_, r)| r.clone())
    }

    pub fn contains(&self, cat: Category) -> bool {
        self.span(cat).is_some()
    }

    /// Category owning column `col`.
    pub fn category_of(&self, col: usize) -> Option<Category> {
        self.spans
            .iter()
            .find(|(_, r)| r.contains(&col))
            .map(|(c, _)| *c)
    }

    /// Slice of a fused vector belonging to `cat`.
    pub fn extract<'a>(&self, fused: &'a [f64], cat: Category) -> Result<&'a [f64]> {
        if fused.len() != self.total_dim {
            return Err(Error::DimensionMismatch {
                context: "fused vector".into(),
                expected: self.total_dim,
                actual: fused.len(),
            });
        }
        let span = self
            .span(cat)
            .ok_or_else(|| Error::UnknownCategory(cat.to_string()))?;
        Ok(&fused[span])
    }

    /// Canonical text form, `name:width` joined by commas.
    pub fn describe(&self) -> String {
        self.spans
            .iter()
            .map(|(c, r)| format!("{}:{}", c, r.len()))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the [`describe`](Self::describe) form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut widths = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, width) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidSchema(format!("expected name:width, got `{part}`")))?;
            let width = width
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidSchema(format!("bad width in `{part}`")))?;
            widths.push((name.parse()?, width));
        }
        Self::new(&widths)
    }

    /// Order-sensitive 64-bit digest of names and widths. Stored in model
    /// files and checked at scoring time.
    pub fn fingerprint(&self) -> u64 {
        let digest = Sha256::digest(self.describe().as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }
}

impl fmt::Display for FeatureSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Binary video label: 1 = deepfake, 0 = bonafide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Bonafide = 0,
    Fake = 1,
}

impl Label {
    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Bonafide),
            1 => Some(Label::Fake),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn as_f64(self) -> f64 {
        self as u8 as f64
    }
}

/// Per-frame fused features of one video.
#[derive(Debug, Clone)]
pub struct FrameFeatureTable {
    pub video_id: String,
    pub label: Label,
    pub fps: f64,
    rows: Array2<f64>,
}

impl FrameFeatureTable {
    pub fn new(
        video_id: impl Into<String>,
        label: Label,
        fps: f64,
        rows: Array2<f64>,
        schema: &FeatureSchema,
    ) -> Result<Self> {
        let video_id = video_id.into();
        if rows.ncols() != schema.total_dim() {
            return Err(Error::SchemaMismatch {
                expected: schema.total_dim(),
                actual: rows.ncols(),
                detail: format!(" (video {video_id})"),
            });
        }
        if rows.nrows() == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for (frame, row) in rows.outer_iter().enumerate() {
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue {
                    video: video_id,
                    frame,
                    column: col.to_string(),
                });
            }
        }
        Ok(Self {
            video_id,
            label,
            fps,
            rows,
        })
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn n_frames(&self) -> usize {
        self.rows.nrows()
    }
}
