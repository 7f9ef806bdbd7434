//! Train on the toy corpus and report AUC at frame, segment and video level.
//!
//! cargo run --release --example evaluate_levels

use std::path::PathBuf;

use fakeboost::config::RunConfig;
use fakeboost::data::load_manifest;
use fakeboost::eval::{fit_model, score_levels, Level, SegmentScoring};

fn main() -> fakeboost::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy/manifest.toml");
    let data = load_manifest(&path)?;

    let mut cfg = RunConfig::default();
    cfg.train.n_trees = 30;
    cfg.train.learning_rate = 0.3;
    cfg.train.max_depth = 3;

    // two clips only, so train and score on both
    let tables: Vec<_> = data.tables.iter().collect();
    let trained = fit_model(&tables, &data.schema, &cfg)?;
    println!("final training loss {:.5}", trained.train_loss.last().unwrap());

    let scores = score_levels(&trained.model, &data.tables, &data.schema, cfg.segment, SegmentScoring::default())?;
    for level in [Level::Frame, Level::Segment, Level::Video] {
        println!("{:<8} {:>3} units  AUC {:.4}", level.as_str(), scores.get(level).len(), scores.auc(level)?);
    }
    for s in scores.get(Level::Segment) {
        println!("  {:<16} {:?} {:.4}", s.unit_id, s.label, s.score);
    }
    Ok(())
}
