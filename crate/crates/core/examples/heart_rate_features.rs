//! Heart-rate features from a rendered frame: place the 68-point template
//! face on a synthetic image, average each ROI's colour and expand the
//! seven means into the 63-wide heart-rate block.
//!
//! cargo run --example heart_rate_features

use fakeboost::features::{
    all_roi_means, heart_rate_column_names, heart_rate_vector, template_face, Raster, RatioGuard, RoiId, RoiTable,
};

fn main() -> fakeboost::Result<()> {
    let landmarks = template_face(160.0, 130.0, 140.0);
    // skin tone that warms towards the bottom of the frame
    let frame = Raster::from_fn(320, 260, |_, y| {
        let t = y as f64 / 260.0;
        [150.0 + 30.0 * t, 110.0 + 10.0 * t, 90.0]
    });

    let means = all_roi_means(&frame, &RoiTable::default(), &landmarks)?;
    for roi in RoiId::ALL {
        let m = means[roi.index()];
        println!("{:<12} r={:7.2} g={:7.2} b={:7.2}", roi.as_str(), m.r, m.g, m.b);
    }

    let hr = heart_rate_vector(&means, RatioGuard::default())?;
    println!("\n{} values, {} guarded ratios", hr.values.len(), hr.degenerate);
    for (name, v) in heart_rate_column_names().iter().zip(&hr.values).take(9) {
        println!("  {name:<8} {v:.4}");
    }

    // a black frame makes every ratio denominator vanish
    let dark = Raster::filled(320, 260, [0.0; 3]);
    let hr = heart_rate_vector(&all_roi_means(&dark, &RoiTable::default(), &landmarks)?, RatioGuard::default())?;
    println!("black frame: {} of 42 ratios fell back to 0", hr.degenerate);
    Ok(())
}
