//! Fit the boosted classifier on a small tabular problem, watch the
//! training loss and inspect the first tree.
//!
//! cargo run --release --example train_classifier

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fakeboost::eval::auc_from_scores;
use fakeboost::features::Label;
use fakeboost::gbdt::{fit_traced, Node, TrainConfig};

fn main() -> fakeboost::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 600;
    let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(-2.0..2.0));
    let y: Vec<Label> = x
        .rows()
        .into_iter()
        .map(|r| if r[0] * r[1] > 0.3 { Label::Fake } else { Label::Bonafide })
        .collect();

    let cfg = TrainConfig {
        n_trees: 60,
        learning_rate: 0.2,
        max_depth: 3,
        ..TrainConfig::default()
    };
    let out = fit_traced(x.view(), &y, &cfg)?;
    for (round, loss) in out.train_loss.iter().enumerate().step_by(10) {
        println!("round {round:>3}  loss {loss:.4}");
    }

    let p = out.ensemble.predict_proba(x.view())?;
    println!("training AUC {:.4}", auc_from_scores(&p, &y)?);

    println!("\nfirst tree:");
    for (i, node) in out.ensemble.trees[0].nodes().iter().enumerate() {
        match node {
            Node::Split { feature, threshold, gain, left, right } => {
                println!("  {i:>2}: x{feature} < {threshold:+.4} ? {left} : {right}   gain {gain:.3}")
            }
            Node::Leaf { weight } => println!("  {i:>2}: leaf {weight:+.4}"),
        }
    }
    Ok(())
}
