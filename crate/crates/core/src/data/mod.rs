//! Datasets on disk: the TOML manifest, per-frame CSV ingestion and the
//! synthetic corpus generator.

mod frames;
mod manifest;
mod synth;

use std::path::Path;

use rayon::prelude::*;

pub use frames::{fuse_rows, heart_rate_from_roi_means, read_numeric_csv, roi_means_header, NumericCsv};
pub use manifest::{label_name, parse_label, DatasetManifest, VideoEntry};
pub use synth::{default_synth_widths, generate_synthetic, SynthSpec};

use crate::error::{Error, Result};
use crate::features::{Category, FeatureSchema, FrameFeatureTable, Label, HR_DIM};

/// Validated frame tables sharing one schema.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub tables: Vec<FrameFeatureTable>,
    /// Ratio slots that fell back to zero while computing heart-rate blocks
    /// from ROI means.
    pub hr_degenerate: usize,
}

impl Dataset {
    pub fn new(schema: FeatureSchema, tables: Vec<FrameFeatureTable>) -> Result<Self> {
        for t in &tables {
            if t.rows().ncols() != schema.total_dim() {
                return Err(Error::SchemaMismatch {
                    expected: schema.total_dim(),
                    actual: t.rows().ncols(),
                    detail: format!(" (video {})", t.video_id),
                });
            }
        }
        Ok(Self {
            schema,
            tables,
            hr_degenerate: 0,
        })
    }

    /// `(video_id, label)` for every table, in manifest order.
    pub fn videos(&self) -> Vec<(String, Label)> {
        self.tables.iter().map(|t| (t.video_id.clone(), t.label)).collect()
    }

    pub fn table(&self, id: &str) -> Option<&FrameFeatureTable> {
        self.tables.iter().find(|t| t.video_id == id)
    }

    pub fn tables_for(&self, ids: &[String]) -> Result<Vec<&FrameFeatureTable>> {
        ids.iter()
            .map(|id| {
                self.table(id)
                    .ok_or_else(|| Error::InvalidConfig(format!("video `{id}` is not in the dataset")))
            })
            .collect()
    }

    pub fn n_frames(&self) -> usize {
        self.tables.iter().map(FrameFeatureTable::n_frames).sum()
    }
}

fn load_video(manifest: &DatasetManifest, v: &VideoEntry) -> Result<(FrameFeatureTable, usize)> {
    let schema = &manifest.schema;
    let features = manifest.resolve(&v.features);
    let (rows, degenerate) = match &v.roi_means {
        None => (read_numeric_csv(&features, &v.id, schema.total_dim())?.rows, 0),
        Some(roi) => {
            let landmarks = read_numeric_csv(&features, &v.id, schema.total_dim() - HR_DIM)?;
            let means = read_numeric_csv(&manifest.resolve(roi), &v.id, 3 * 7)?;
            let (hr, degenerate) = heart_rate_from_roi_means(&means.rows, &v.id, v.intensity)?;
            (fuse_rows(&landmarks.rows, &hr, schema, &v.id)?, degenerate)
        }
    };
    Ok((FrameFeatureTable::new(v.id.clone(), v.label, v.fps, rows, schema)?, degenerate))
}

/// Loads and validates every video of a manifest. Videos are read in
/// parallel; tables come back in manifest order.
pub fn load_manifest(path: &Path) -> Result<Dataset> {
    let manifest = DatasetManifest::load(path)?;
    load_dataset(&manifest)
}

pub fn load_dataset(manifest: &DatasetManifest) -> Result<Dataset> {
    if manifest.videos.iter().any(|v| v.roi_means.is_some())
        && !matches!(manifest.schema.spans().last(), Some((Category::HeartRate, _)))
    {
        return Err(Error::InvalidSchema(
            "heart_rate must be the last schema entry when it is computed from ROI means".into(),
        ));
    }
    let loaded = manifest
        .videos
        .par_iter()
        .map(|v| load_video(manifest, v))
        .collect::<Result<Vec<_>>>()?;
    let hr_degenerate = loaded.iter().map(|(_, d)| d).sum();
    Ok(Dataset {
        schema: manifest.schema.clone(),
        tables: loaded.into_iter().map(|(t, _)| t).collect(),
        hr_degenerate,
    })
}
