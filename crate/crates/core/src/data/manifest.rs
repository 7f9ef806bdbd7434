//! TOML dataset manifest.
//!
//! ```toml
//! intensity = "8bit"          # default for every video; or "unit"
//!
//! [[schema]]
//! category = "landmark_2d"
//! width = 136
//!
//! [[schema]]
//! category = "heart_rate"
//! width = 63
//!
//! [[video]]
//! id = "clip01"
//! label = "bonafide"          # or "fake"
//! features = "clip01.csv"     # relative to the manifest
//! fps = 30.0
//! # roi_means = "clip01_roi.csv"   # heart-rate block computed from ROI means
//! # intensity = "unit"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Category, FeatureSchema, IntensityConvention, Label};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intensity: Option<String>,
    schema: Vec<RawSchemaEntry>,
    #[serde(default)]
    video: Vec<RawVideo>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchemaEntry {
    category: Category,
    width: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVideo {
    id: String,
    label: String,
    features: String,
    #[serde(default = "default_fps")]
    fps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    intensity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roi_means: Option<String>,
}

fn default_fps() -> f64 {
    30.0
}

/// One manifest entry. Paths are stored as written; [`DatasetManifest::resolve`]
/// makes them absolute against the manifest's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoEntry {
    pub id: String,
    pub label: Label,
    pub features: PathBuf,
    pub fps: f64,
    pub intensity: IntensityConvention,
    pub roi_means: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub schema: FeatureSchema,
    pub intensity: IntensityConvention,
    pub videos: Vec<VideoEntry>,
    pub base_dir: PathBuf,
}

pub fn parse_label(s: &str) -> Result<Label> {
    match s.trim().to_ascii_lowercase().as_str() {
        "bonafide" | "real" | "0" => Ok(Label::Bonafide),
        "fake" | "1" => Ok(Label::Fake),
        other => Err(Error::InvalidConfig(format!("unknown label `{other}` (bonafide or fake)"))),
    }
}

pub fn label_name(label: Label) -> &'static str {
    match label {
        Label::Bonafide => "bonafide",
        Label::Fake => "fake",
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl DatasetManifest {
    pub fn parse(text: &str, file: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
            Error::ParseError {
                file: file.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let widths: Vec<(Category, usize)> = raw.schema.iter().map(|s| (s.category, s.width)).collect();
        let schema = FeatureSchema::new(&widths)?;
        let intensity = match &raw.intensity {
            Some(s) => s.parse()?,
            None => IntensityConvention::default(),
        };
        let mut videos = Vec::with_capacity(raw.video.len());
        for v in raw.video {
            if videos.iter().any(|e: &VideoEntry| e.id == v.id) {
                return Err(Error::InvalidConfig(format!("duplicate video id `{}` in {file}", v.id)));
            }
            if !(v.fps.is_finite() && v.fps > 0.0) {
                return Err(Error::InvalidConfig(format!("video {}: fps must be positive", v.id)));
            }
            if v.roi_means.is_some() && !schema.contains(Category::HeartRate) {
                return Err(Error::InvalidSchema(format!(
                    "video {} has roi_means but the schema has no heart_rate block",
                    v.id
                )));
            }
            videos.push(VideoEntry {
                label: parse_label(&v.label)?,
                features: PathBuf::from(&v.features),
                fps: v.fps,
                intensity: match &v.intensity {
                    Some(s) => s.parse()?,
                    None => intensity,
                },
                roi_means: v.roi_means.map(PathBuf::from),
                id: v.id,
            });
        }
        if videos.is_empty() {
            return Err(Error::InvalidConfig(format!("{file} lists no videos")));
        }
        Ok(Self {
            schema,
            intensity,
            videos,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse(&text, &path.display().to_string(), &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Serializes back to TOML with paths as stored.
    pub fn to_toml(&self) -> String {
        let raw = RawManifest {
            intensity: Some(self.intensity.as_str().to_string()),
            schema: self
                .schema
                .widths()
                .into_iter()
                .map(|(category, width)| RawSchemaEntry { category, width })
                .collect(),
            video: self
                .videos
                .iter()
                .map(|v| RawVideo {
                    id: v.id.clone(),
                    label: label_name(v.label).to_string(),
                    features: v.features.to_string_lossy().replace('\\', "/"),
                    fps: v.fps,
                    intensity: (v.intensity != self.intensity).then(|| v.intensity.as_str().to_string()),
                    roi_means: v.roi_means.as_ref().map(|p| p.to_string_lossy().replace('\\', "/")),
                })
                .collect(),
        };
        toml::to_string(&raw).expect("manifest serializes")
    }
}
