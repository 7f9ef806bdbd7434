use ndarray::{concatenate, Array2, Axis};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FrameFeatureTable, Label};
use crate::gbdt::{fit_traced, Model};
use crate::preprocess::{
    apply_standardizer, segments_of, Aggregation, StatsAccumulator,
};

use super::levels::SegmentScoring;

/// Model plus the per-round training log-loss of its frame ensemble.
pub struct Trained {
    pub model: Model,
    pub train_loss: Vec<f64>,
}

/// Fits standardization on the given training tables, then the frame
/// ensemble (and, for `feature_mean_std` scoring, a segment ensemble).
pub fn fit_model(train: &[&FrameFeatureTable], schema: &FeatureSchema, cfg: &RunConfig) -> Result<Trained> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut acc = StatsAccumulator::new(schema.total_dim());
    for t in train {
        acc.push_rows(t.rows().view())?;
    }
    let stats = acc.finish()?;

    let z_tables: Vec<Array2<f64>> = train
        .iter()
        .map(|t| apply_standardizer(t.rows().view(), &stats))
        .collect::<Result<_>>()?;
    let views: Vec<_> = z_tables.iter().map(|z| z.view()).collect();
    let x = concatenate(Axis(0), &views).expect("tables share the schema width");
    let labels: Vec<Label> = train
        .iter()
        .flat_map(|t| std::iter::repeat_n(t.label, t.n_frames()))
        .collect();

    let out = fit_traced(x.view(), &labels, &cfg.train)?;
    let mut model = Model::new(out.ensemble, stats, schema.clone(), cfg.train.clone(), cfg.echo())?;

    if cfg.scoring == SegmentScoring::Aggregate(Aggregation::FeatureMeanStd) {
        let mut rows = Vec::new();
        let mut seg_labels = Vec::new();
        for (t, z) in train.iter().zip(&z_tables) {
            for s in segments_of(&t.video_id, t.label, z.view(), cfg.segment, Aggregation::FeatureMeanStd)? {
                rows.extend(s.vector);
                seg_labels.push(s.label);
            }
        }
        let dim = 2 * schema.total_dim();
        let seg_x = Array2::from_shape_vec((seg_labels.len(), dim), rows).expect("segment rows are uniform");
        let seg = fit_traced(seg_x.view(), &seg_labels, &cfg.train)?;
        model = model.with_segment_ensemble(seg.ensemble)?;
    }

    Ok(Trained {
        model,
        train_loss: out.train_loss,
    })
}

/// Splits the dataset by video with the config's ratios and seed, then fits
/// on the training videos.
pub fn fit_on_split(data: &crate::data::Dataset, cfg: &RunConfig) -> Result<(Trained, super::DatasetSplit)> {
    let split = super::split_by_video(&data.videos(), cfg.split, cfg.train.seed)?;
    let train = data.tables_for(&split.train)?;
    let trained = fit_model(&train, &data.schema, cfg)?;
    Ok((trained, split))
}
