//! Second-order gradient-boosted trees for binary classification.
//!
//! Each round computes logistic gradients and hessians at the current
//! margins, grows one tree that minimizes the second-order approximation of
//! the loss plus `gamma * leaves + lambda/2 * sum(w^2)`, and adds
//! `learning_rate * tree(x)` to the margins.

mod model_file;
mod objective;
mod tree;

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use model_file::{load_model, read_model, save_model, write_model, FORMAT_MAJOR, FORMAT_MINOR, MAGIC};
pub use objective::{leaf_weight, log_loss, logistic_grad_hess, sigmoid, split_gain, GradPair};
pub use tree::{build_tree, find_best_split, Node, SplitCandidate, Tree};

use crate::error::{Error, Result};
use crate::features::{Category, FeatureSchema, Label};
use crate::preprocess::StandardizationStats;
use tree::{Columns, NodeSamples, TreeBuilder};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Minimum loss reduction for a split.
    pub gamma: f64,
    pub min_child_hessian: f64,
    /// Initial margin.
    pub base_score: f64,
    pub seed: u64,
    /// Fraction of rows drawn (without replacement) per tree.
    pub subsample: f64,
    /// Fraction of features drawn per tree.
    pub colsample: f64,
    /// Multiplier on the gradient and hessian of positive (fake) rows.
    pub pos_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_trees: 1500,
            learning_rate: 0.01,
            max_depth: 8,
            lambda: 1.0,
            gamma: 0.0,
            min_child_hessian: 1e-3,
            base_score: 0.0,
            seed: 0,
            subsample: 1.0,
            colsample: 1.0,
            pos_weight: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!("learning_rate {} not in (0, 1]", self.learning_rate));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda {} must be >= 0", self.lambda));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return bad(format!("gamma {} must be >= 0", self.gamma));
        }
        if !(self.min_child_hessian >= 0.0) {
            return bad(format!("min_child_hessian {} must be >= 0", self.min_child_hessian));
        }
        if !self.base_score.is_finite() {
            return bad("base_score must be finite".into());
        }
        for (name, v) in [("subsample", self.subsample), ("colsample", self.colsample)] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} {v} not in (0, 1]"));
            }
        }
        if !(self.pos_weight > 0.0) || !self.pos_weight.is_finite() {
            return bad(format!("pos_weight {} must be > 0", self.pos_weight));
        }
        Ok(())
    }
}

/// Trained trees plus what is needed to turn them into margins.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnsemble {
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub base_score: f64,
    pub n_features: usize,
}

impl TreeEnsemble {
    /// `base_score + learning_rate * sum(tree(row))`, trees summed in order.
    pub fn margin(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn predict_margin(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if rows.ncols() != self.n_features {
            return Err(Error::SchemaMismatch {
                expected: self.n_features,
                actual: rows.ncols(),
                detail: String::new(),
            });
        }
        Ok((0..rows.nrows())
            .into_par_iter()
            .map(|i| rows.row(i))
            .map(|r| match r.as_slice() {
                Some(s) => self.margin(s),
                None => self.margin(&r.to_vec()),
            })
            .collect())
    }

    pub fn predict_proba(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        Ok(self.predict_margin(rows)?.into_iter().map(sigmoid).collect())
    }
}

/// Training outcome with the mean log-loss before the first round and after
/// every round (`n_trees + 1` entries).
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub ensemble: TreeEnsemble,
    pub train_loss: Vec<f64>,
}

pub fn fit(x: ArrayView2<'_, f64>, labels: &[Label], cfg: &TrainConfig) -> Result<TreeEnsemble> {
    fit_traced(x, labels, cfg).map(|o| o.ensemble)
}

pub fn fit_traced(x: ArrayView2<'_, f64>, labels: &[Label], cfg: &TrainConfig) -> Result<FitOutput> {
    cfg.validate()?;
    let n = x.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "labels".into(),
            expected: n,
            actual: labels.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l == Label::Fake).count();
    if positives == 0 || positives == n {
        return Err(Error::DegenerateLabels {
            positives,
            negatives: n - positives,
        });
    }
    if let Some((i, j)) = x.indexed_iter().find(|(_, v)| !v.is_finite()).map(|(ij, _)| ij) {
        return Err(Error::NonFiniteValue {
            video: "<training matrix>".into(),
            frame: i,
            column: j.to_string(),
        });
    }

    let y: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
    let cols = Columns::new(x);
    let n_features = cols.n_features();
    let all_samples: Vec<u32> = (0..n as u32).collect();
    let presorted: Vec<Vec<u32>> = (0..n_features)
        .into_par_iter()
        .map(|f| cols.sorted(f, &all_samples))
        .collect();

    let mut margins = vec![cfg.base_score; n];
    let mean_loss = |m: &[f64]| y.iter().zip(m).map(|(&yi, &mi)| log_loss(yi, mi)).sum::<f64>() / n as f64;
    let mut train_loss = Vec::with_capacity(cfg.n_trees + 1);
    train_loss.push(mean_loss(&margins));
    let mut trees = Vec::with_capacity(cfg.n_trees);

    for round in 0..cfg.n_trees {
        let grads: Vec<GradPair> = y
            .par_iter()
            .zip(margins.par_iter())
            .map(|(&yi, &mi)| {
                let gh = logistic_grad_hess(yi, mi);
                if yi == 1.0 {
                    GradPair::new(gh.g * cfg.pos_weight, gh.h * cfg.pos_weight)
                } else {
                    gh
                }
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(round as u64);
        let features: Vec<usize> = if cfg.colsample < 1.0 {
            let k = ((n_features as f64 * cfg.colsample).round() as usize).clamp(1, n_features);
            let mut f = sample(&mut rng, n_features, k).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..n_features).collect()
        };
        let root = if cfg.subsample < 1.0 {
            let k = ((n as f64 * cfg.subsample).round() as usize).clamp(1, n);
            let mut keep = vec![false; n];
            for i in sample(&mut rng, n, k) {
                keep[i] = true;
            }
            let samples = all_samples.iter().copied().filter(|&i| keep[i as usize]).collect();
            let sorted = features
                .par_iter()
                .map(|&f| presorted[f].iter().copied().filter(|&i| keep[i as usize]).collect())
                .collect();
            NodeSamples { samples, sorted }
        } else {
            NodeSamples {
                samples: all_samples.clone(),
                sorted: features.iter().map(|&f| presorted[f].clone()).collect(),
            }
        };

        let tree = TreeBuilder {
            cols: &cols,
            features: &features,
            grads: &grads,
            cfg,
        }
        .build(root)?;

        margins.par_iter_mut().enumerate().for_each(|(i, m)| {
            let row = x.row(i);
            let out = match row.as_slice() {
                Some(s) => tree.predict(s),
                None => tree.predict(&row.to_vec()),
            };
            *m += cfg.learning_rate * out;
        });
        train_loss.push(mean_loss(&margins));
        trees.push(tree);
    }

    Ok(FitOutput {
        ensemble: TreeEnsemble {
            trees,
            learning_rate: cfg.learning_rate,
            base_score: cfg.base_score,
            n_features,
        },
        train_loss,
    })
}

/// Total split gain attributed to each feature and to each schema category.
#[derive(Debug, Clone, PartialEq)]
pub struct Importance {
    pub per_feature: Vec<f64>,
    pub per_category: Vec<(Category, f64)>,
}

impl Importance {
    pub fn total(&self) -> f64 {
        self.per_feature.iter().sum()
    }
}

pub fn feature_importance(ensemble: &TreeEnsemble, schema: &FeatureSchema) -> Result<Importance> {
    if schema.total_dim() != ensemble.n_features {
        return Err(Error::SchemaMismatch {
            expected: ensemble.n_features,
            actual: schema.total_dim(),
            detail: " (importance schema)".into(),
        });
    }
    let mut per_feature = vec![0.0; ensemble.n_features];
    for tree in &ensemble.trees {
        for node in tree.nodes() {
            if let Node::Split { feature, gain, .. } = *node {
                per_feature[feature] += gain;
            }
        }
    }
    let per_category = schema
        .spans()
        .iter()
        .map(|(c, r)| (*c, per_feature[r.clone()].iter().sum()))
        .collect();
    Ok(Importance {
        per_feature,
        per_category,
    })
}

/// Everything needed to score new frames: trees, the training-time
/// standardization, the frame schema and the configuration echo.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub ensemble: TreeEnsemble,
    pub stats: StandardizationStats,
    pub schema: FeatureSchema,
    pub config: TrainConfig,
    /// Free-form `key = value` lines describing the run that produced the
    /// model.
    pub run_config: String,
    /// Trees over `[mean, std]` segment vectors, present when the model was
    /// trained for `feature_mean_std` segment scoring.
    pub segment_ensemble: Option<TreeEnsemble>,
}

impl Model {
    pub fn new(
        ensemble: TreeEnsemble,
        stats: StandardizationStats,
        schema: FeatureSchema,
        config: TrainConfig,
        run_config: String,
    ) -> Result<Self> {
        for (what, dim) in [("ensemble", ensemble.n_features), ("standardization stats", stats.dim())] {
            if dim != schema.total_dim() {
                return Err(Error::SchemaMismatch {
                    expected: schema.total_dim(),
                    actual: dim,
                    detail: format!(" ({what})"),
                });
            }
        }
        Ok(Self {
            ensemble,
            stats,
            schema,
            config,
            run_config,
            segment_ensemble: None,
        })
    }

    pub fn with_segment_ensemble(mut self, ensemble: TreeEnsemble) -> Result<Self> {
        let expected = 2 * self.schema.total_dim();
        if ensemble.n_features != expected {
            return Err(Error::SchemaMismatch {
                expected,
                actual: ensemble.n_features,
                detail: " (segment ensemble)".into(),
            });
        }
        self.segment_ensemble = Some(ensemble);
        Ok(self)
    }

    pub fn fingerprint(&self) -> u64 {
        self.schema.fingerprint()
    }

    pub fn check_schema(&self, schema: &FeatureSchema) -> Result<()> {
        if schema.fingerprint() != self.fingerprint() {
            return Err(Error::SchemaMismatch {
                expected: self.schema.total_dim(),
                actual: schema.total_dim(),
                detail: format!(" (model schema {} vs data schema {})", self.schema, schema),
            });
        }
        Ok(())
    }

    /// Standardizes raw frame rows, then returns probabilities.
    pub fn predict_proba_raw(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let z = crate::preprocess::apply_standardizer(rows, &self.stats)?;
        self.ensemble.predict_proba(z.view())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn labels(v: &[u8]) -> Vec<Label> {
        v.iter().map(|&b| Label::from_u8(b).unwrap()).collect()
    }

    #[test]
    fn zero_trees_predict_base() {
        let x = array![[0.0], [1.0]];
        let cfg = TrainConfig {
            n_trees: 0,
            base_score: 0.3,
            ..TrainConfig::default()
        };
        let e = fit(x.view(), &labels(&[0, 1]), &cfg).unwrap();
        assert!(e.trees.is_empty());
        assert_eq!(e.predict_margin(x.view()).unwrap(), vec![0.3, 0.3]);
        let empty = TreeEnsemble {
            base_score: 0.0,
            ..e
        };
        assert_eq!(empty.predict_proba(x.view()).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn single_leaf_tree() {
        let e = TreeEnsemble {
            trees: vec![Tree::leaf(2.0)],
            learning_rate: 0.1,
            base_score: 0.0,
            n_features: 1,
        };
        assert_eq!(e.predict_proba(array![[7.0]].view()).unwrap(), vec![sigmoid(0.2)]);
    }

    #[test]
    fn single_class_rejected() {
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            fit(x.view(), &labels(&[1, 1]), &TrainConfig::default()),
            Err(Error::DegenerateLabels { positives: 2, negatives: 0 })
        ));
    }

    #[test]
    fn schema_mismatch_on_predict() {
        let e = TreeEnsemble {
            trees: vec![],
            learning_rate: 0.1,
            base_score: 0.0,
            n_features: 3,
        };
        assert!(matches!(
            e.predict_margin(Array2::zeros((2, 2)).view()),
            Err(Error::SchemaMismatch { expected: 3, actual: 2, .. })
        ));
    }

    #[test]
    fn bad_config() {
        let c = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
        let c = TrainConfig {
            subsample: 1.5,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn importance_of_single_split() {
        let schema = FeatureSchema::new(&[(Category::Shape, 2), (Category::HeadPose, 1)]).unwrap();
        let tree = Tree::from_nodes(vec![
            Node::Split {
                feature: 1,
                threshold: 0.0,
                gain: 2.0,
                left: 1,
                right: 2,
            },
            Node::Leaf { weight: -1.0 },
            Node::Leaf { weight: 1.0 },
        ]);
        let e = TreeEnsemble {
            trees: vec![tree, Tree::leaf(0.5)],
            learning_rate: 0.1,
            base_score: 0.0,
            n_features: 3,
        };
        let imp = feature_importance(&e, &schema).unwrap();
        assert_eq!(imp.per_feature, vec![0.0, 2.0, 0.0]);
        assert_eq!(imp.per_category, vec![(Category::Shape, 2.0), (Category::HeadPose, 0.0)]);

        let leaves = TreeEnsemble {
            trees: vec![Tree::leaf(1.0)],
            ..e
        };
        assert_eq!(feature_importance(&leaves, &schema).unwrap().total(), 0.0);
    }
}
