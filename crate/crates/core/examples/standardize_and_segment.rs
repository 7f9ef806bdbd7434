//! Train-only z-scoring followed by sliding-window segmentation.
//!
//! cargo run --example standardize_and_segment

use ndarray::Array2;

use fakeboost::features::Label;
use fakeboost::preprocess::{apply_standardizer, fit_standardizer, segment_indices, segments_of, Aggregation, SegmentSpec};

fn main() -> fakeboost::Result<()> {
    let train = Array2::from_shape_fn((90, 3), |(i, j)| match j {
        0 => i as f64,
        1 => (i as f64 * 0.3).sin() * 5.0 + 40.0,
        _ => 7.0, // constant column maps to 0
    });
    let stats = fit_standardizer(train.view())?;
    println!("mean {:?}\nstd  {:?}", stats.mean, stats.std);

    // held-out rows reuse the training statistics
    let held_out = Array2::from_shape_fn((70, 3), |(i, _)| i as f64 * 1.5);
    let z = apply_standardizer(held_out.view(), &stats)?;

    let spec = SegmentSpec::default();
    println!(
        "\nwindow {} overlap {} stride {}: {:?}",
        spec.window(),
        spec.overlap(),
        spec.stride(),
        segment_indices(z.nrows(), spec)
    );
    for mode in [Aggregation::FeatureMean, Aggregation::FeatureMeanStd] {
        for s in segments_of("clip", Label::Bonafide, z.view(), spec, mode)? {
            let v: Vec<String> = s.vector.iter().map(|x| format!("{x:+.3}")).collect();
            println!("{mode:<16} [{:>2}, {:>2}) {}", s.start_frame, s.end_frame, v.join(" "));
        }
    }
    Ok(())
}
