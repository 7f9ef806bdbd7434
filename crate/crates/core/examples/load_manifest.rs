//! Load the bundled toy corpus. One clip carries precomputed heart-rate
//! columns; the other ships ROI colour means that the loader expands.
//!
//! cargo run --example load_manifest [path/to/manifest.toml]

use std::path::PathBuf;

use fakeboost::data::{load_dataset, DatasetManifest};

fn main() -> fakeboost::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy/manifest.toml"));
    let manifest = DatasetManifest::load(&path)?;
    println!("schema: {}", manifest.schema.describe());
    for v in &manifest.videos {
        let hr = if v.roi_means.is_some() { "from ROI means" } else { "precomputed" };
        println!("  {:<10} {:?}  fps {}  heart rate {hr}", v.id, v.label, v.fps);
    }

    let data = load_dataset(&manifest)?;
    for t in &data.tables {
        println!("{:<10} {} frames x {} columns", t.video_id, t.n_frames(), t.rows().ncols());
    }
    println!("{} frames total, {} guarded ratios", data.n_frames(), data.hr_degenerate);
    Ok(())
}
