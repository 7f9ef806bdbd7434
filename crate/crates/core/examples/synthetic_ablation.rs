//! Generate a synthetic corpus where only heart-rate and 2-D landmark
//! columns carry signal, then rank single categories and combinations.
//!
//! cargo run --release --example synthetic_ablation

use fakeboost::config::RunConfig;
use fakeboost::data::{generate_synthetic, load_manifest, SynthSpec};
use fakeboost::eval::{default_ablation_sets, run_ablation, split_by_video};

fn main() -> fakeboost::Result<()> {
    let dir = std::env::temp_dir().join("fakeboost-synthetic-ablation");
    let spec = SynthSpec {
        seed: 4,
        n_videos: 40,
        frames_per_video: 60,
        fraction_fake: 0.3,
        ..SynthSpec::default()
    };
    generate_synthetic(&spec, &dir)?;
    let data = load_manifest(&dir.join("manifest.toml"))?;

    let mut cfg = RunConfig::default();
    cfg.train.n_trees = 40;
    cfg.train.learning_rate = 0.2;
    cfg.train.max_depth = 4;
    let split = split_by_video(&data.videos(), cfg.split, cfg.train.seed)?;
    println!("{} train / {} val / {} test videos\n", split.train.len(), split.val.len(), split.test.len());

    let report = run_ablation(&data, &split, &default_ablation_sets(), &cfg)?;
    print!("{}", report.to_table());
    Ok(())
}
