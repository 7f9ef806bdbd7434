//! Feature construction: ROI colour means, the heart-rate block and the
//! fused per-frame vector.

mod heart_rate;
mod roi;
mod schema;

pub use heart_rate::{heart_rate_column_names, heart_rate_vector, HeartRateVector, RatioGuard, HR_DIM, PER_ROI, SLOT_NAMES};
pub use roi::{
    all_roi_means, inter_ocular_distance, point_in_polygon, roi_channel_means, template_face,
    IntensityConvention, Point, Raster, RoiChannelMeans, RoiId, RoiPolygon, RoiTable, VertexRef,
    N_LANDMARKS,
};
pub use schema::{Category, FeatureSchema, FrameFeatureTable, Label};

use crate::error::{Error, Result};

/// Places landmark features and the heart-rate block into a fused vector.
///
/// `landmark_row` holds every non-heart-rate category back to back in schema
/// order; the schema's last span must be `heart_rate`.
pub fn assemble_frame_vector(landmark_row: &[f64], hr: &[f64], schema: &FeatureSchema) -> Result<Vec<f64>> {
    match schema.spans().last() {
        Some((Category::HeartRate, _)) => {}
        _ => {
            return Err(Error::InvalidSchema(
                "heart_rate must be the final span of the schema".into(),
            ))
        }
    }
    if hr.len() != HR_DIM {
        return Err(Error::DimensionMismatch {
            context: "category heart_rate".into(),
            expected: HR_DIM,
            actual: hr.len(),
        });
    }
    let landmark_dim = schema.total_dim() - HR_DIM;
    if landmark_row.len() != landmark_dim {
        // name the first category whose span the row fails to fill
        let offender = schema
            .spans()
            .iter()
            .find(|(_, r)| r.end > landmark_row.len())
            .map(|(c, r)| format!("category {c} (span {}..{})", r.start, r.end))
            .unwrap_or_else(|| "landmark categories".into());
        return Err(Error::DimensionMismatch {
            context: offender,
            expected: landmark_dim,
            actual: landmark_row.len(),
        });
    }
    let mut fused = Vec::with_capacity(schema.total_dim());
    fused.extend_from_slice(landmark_row);
    fused.extend_from_slice(hr);
    Ok(fused)
}
