//! Save a trained model, read it back and confirm identical predictions.
//! Also shows that a damaged file is rejected.
//!
//! cargo run --example model_file

use ndarray::Array2;

use fakeboost::features::{Category, FeatureSchema, Label};
use fakeboost::gbdt::{fit, load_model, read_model, save_model, write_model, Model, TrainConfig, FORMAT_MAJOR, FORMAT_MINOR};
use fakeboost::preprocess::fit_standardizer;

fn main() -> fakeboost::Result<()> {
    let x = Array2::from_shape_fn((200, 6), |(i, j)| ((i * 7 + j * 13) % 17) as f64);
    let y: Vec<Label> = (0..200).map(|i| if (i * 7) % 17 > 10 { Label::Fake } else { Label::Bonafide }).collect();
    let schema = FeatureSchema::new(&[(Category::HeadPose, 6)])?;
    let stats = fit_standardizer(x.view())?;
    let z = fakeboost::preprocess::apply_standardizer(x.view(), &stats)?;
    let cfg = TrainConfig {
        n_trees: 20,
        max_depth: 3,
        learning_rate: 0.3,
        ..TrainConfig::default()
    };
    let model = Model::new(fit(z.view(), &y, &cfg)?, stats, schema, cfg, "n_trees = 20\n".into())?;

    let path = std::env::temp_dir().join("fakeboost-example.model");
    save_model(&model, &path)?;
    let back = load_model(&path)?;
    let same = model.predict_proba_raw(x.view())? == back.predict_proba_raw(x.view())?;
    println!(
        "format {FORMAT_MAJOR}.{FORMAT_MINOR}: {} bytes, fingerprint {:016x}, predictions identical: {same}",
        write_model(&back).len(),
        back.fingerprint()
    );

    let mut bytes = write_model(&model);
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    match read_model(&bytes) {
        Err(e) => println!("flipped one bit: {e}"),
        Ok(_) => println!("flipped one bit: unexpectedly accepted"),
    }
    Ok(())
}
