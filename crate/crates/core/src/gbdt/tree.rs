//! Regression trees grown by exact greedy search over pre-sorted columns.

use ndarray::ArrayView2;
use rayon::prelude::*;

use super::objective::{leaf_weight, split_gain, GradPair};
use super::TrainConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Leaf {
        weight: f64,
    },
    /// Rows with `x[feature] < threshold` go left. `gain` is the loss
    /// reduction before the gamma deduction, so it is always `>= gamma`.
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in pre-order; `nodes[0]` is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(weight: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { weight }],
        }
    }

    pub(crate) fn from_nodes(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Index of the leaf `row` falls into.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if row[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { weight } => weight,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

/// Best split of a node.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Objective reduction net of gamma (what `split_gain` returns).
    pub gain: f64,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Column-major copy of the training matrix.
pub(crate) struct Columns {
    cols: Vec<Vec<f64>>,
}

impl Columns {
    pub(crate) fn new(x: ArrayView2<'_, f64>) -> Self {
        let cols = x.columns().into_iter().map(|c| c.to_vec()).collect();
        Self { cols }
    }

    pub(crate) fn n_features(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn col(&self, f: usize) -> &[f64] {
        &self.cols[f]
    }

    /// Indices of `samples` ordered by feature value, ties by index.
    pub(crate) fn sorted(&self, f: usize, samples: &[u32]) -> Vec<u32> {
        let col = &self.cols[f];
        let mut idx = samples.to_vec();
        idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
        idx
    }
}

#[derive(Debug, Clone, Copy)]
struct ScanResult {
    threshold: f64,
    gain: f64,
}

/// Threshold halfway between two distinct adjacent values, nudged so that
/// `lo < t <= hi` survives rounding.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

/// Best qualifying threshold of one feature.
///
/// Candidates are ranked by the child score `G_L^2/(H_L+l) + G_R^2/(H_R+l)`
/// kept as a fraction and compared by cross-multiplication, so a division
/// only happens when a candidate beats the running best. The reported gain
/// is always [`split_gain`] of the winning partition.
fn scan_feature(col: &[f64], sorted: &[u32], grads: &[GradPair], g_sum: f64, h_sum: f64, cfg: &TrainConfig) -> Option<ScanResult> {
    let lambda = cfg.lambda;
    let mut best: Option<(f64, f64, ScanResult)> = None;
    let (mut g_l, mut h_l) = (0.0, 0.0);
    let &first = sorted.first()?;
    let mut v = col[first as usize];
    for w in sorted.windows(2) {
        let p = grads[w[0] as usize];
        g_l += p.g;
        h_l += p.h;
        let next = col[w[1] as usize];
        let lo = v;
        v = next;
        if lo >= next {
            continue;
        }
        let (g_r, h_r) = (g_sum - g_l, h_sum - h_l);
        if h_l < cfg.min_child_hessian || h_r < cfg.min_child_hessian {
            continue;
        }
        let (d_l, d_r) = (h_l + lambda, h_r + lambda);
        if !(d_l > 0.0 && d_r > 0.0) {
            continue;
        }
        let num = g_l * g_l * d_r + g_r * g_r * d_l;
        let den = d_l * d_r;
        if best.is_some_and(|(b_num, b_den, _)| num * b_den <= b_num * den) {
            continue;
        }
        let gain = split_gain(g_l, h_l, g_r, h_r, lambda, cfg.gamma);
        if gain >= 0.0 && best.is_none_or(|(_, _, b)| gain > b.gain) {
            best = Some((
                num,
                den,
                ScanResult {
                    threshold: midpoint(lo, next),
                    gain,
                },
            ));
        }
    }
    best.map(|(_, _, r)| r)
}

fn sums(samples: &[u32], grads: &[GradPair]) -> (f64, f64) {
    samples.iter().fold((0.0, 0.0), |(g, h), &i| {
        let p = grads[i as usize];
        (g + p.g, h + p.h)
    })
}

/// Per-feature scans run in parallel; the winner is chosen by a sequential
/// pass in feature order so ties always resolve to the lowest feature index.
fn best_over_features(
    cols: &Columns,
    features: &[usize],
    sorted: &[Vec<u32>],
    grads: &[GradPair],
    g_sum: f64,
    h_sum: f64,
    cfg: &TrainConfig,
) -> Option<(usize, ScanResult)> {
    let per_feature: Vec<Option<ScanResult>> = features
        .par_iter()
        .zip(sorted.par_iter())
        .map(|(&f, s)| scan_feature(cols.col(f), s, grads, g_sum, h_sum, cfg))
        .collect();
    let mut best: Option<(usize, ScanResult)> = None;
    for (k, r) in per_feature.into_iter().enumerate() {
        if let Some(r) = r {
            if best.is_none_or(|(_, b)| r.gain > b.gain) {
                best = Some((k, r));
            }
        }
    }
    best
}

/// Exact greedy split search over the given samples.
///
/// Candidate thresholds are midpoints between adjacent distinct sorted
/// values. A split qualifies when its gain (net of gamma) is non-negative
/// and both children carry at least `min_child_hessian`.
pub fn find_best_split(
    sample_indices: &[usize],
    x: ArrayView2<'_, f64>,
    grads: &[GradPair],
    cfg: &TrainConfig,
) -> Option<SplitCandidate> {
    if sample_indices.len() < 2 {
        return None;
    }
    let cols = Columns::new(x);
    let mut samples: Vec<u32> = sample_indices.iter().map(|&i| i as u32).collect();
    samples.sort_unstable();
    let features: Vec<usize> = (0..cols.n_features()).collect();
    let sorted: Vec<Vec<u32>> = features.iter().map(|&f| cols.sorted(f, &samples)).collect();
    let (g_sum, h_sum) = sums(&samples, grads);
    let (k, r) = best_over_features(&cols, &features, &sorted, grads, g_sum, h_sum, cfg)?;
    let feature = features[k];
    let col = cols.col(feature);
    let (left, right): (Vec<usize>, Vec<usize>) = samples
        .iter()
        .map(|&i| i as usize)
        .partition(|&i| col[i] < r.threshold);
    Some(SplitCandidate {
        feature,
        threshold: r.threshold,
        gain: r.gain,
        left,
        right,
    })
}

/// Samples of a node: ascending indices plus one value-sorted list per
/// active feature.
pub(crate) struct NodeSamples {
    pub samples: Vec<u32>,
    pub sorted: Vec<Vec<u32>>,
}

pub(crate) struct TreeBuilder<'a> {
    pub cols: &'a Columns,
    pub features: &'a [usize],
    pub grads: &'a [GradPair],
    pub cfg: &'a TrainConfig,
}

impl TreeBuilder<'_> {
    pub(crate) fn build(&self, root: NodeSamples) -> Result<Tree> {
        let mut nodes = Vec::new();
        self.grow(root, 0, &mut nodes)?;
        Ok(Tree { nodes })
    }

    fn grow(&self, node: NodeSamples, depth: usize, nodes: &mut Vec<Node>) -> Result<usize> {
        let (g_sum, h_sum) = sums(&node.samples, self.grads);
        let id = nodes.len();
        let split = if depth < self.cfg.max_depth && node.samples.len() >= 2 {
            best_over_features(self.cols, self.features, &node.sorted, self.grads, g_sum, h_sum, self.cfg)
        } else {
            None
        };
        let Some((k, r)) = split else {
            nodes.push(Node::Leaf {
                weight: leaf_weight(g_sum, h_sum, self.cfg.lambda)?,
            });
            return Ok(id);
        };

        let feature = self.features[k];
        let col = self.cols.col(feature);
        let goes_left = |i: &u32| col[*i as usize] < r.threshold;
        let (l_samples, r_samples): (Vec<u32>, Vec<u32>) = node.samples.iter().partition(|i| goes_left(i));
        let (l_sorted, r_sorted): (Vec<Vec<u32>>, Vec<Vec<u32>>) = node
            .sorted
            .into_par_iter()
            .map(|s| s.into_iter().partition::<Vec<u32>, _>(goes_left))
            .unzip();

        nodes.push(Node::Split {
            feature,
            threshold: r.threshold,
            gain: r.gain + self.cfg.gamma,
            left: 0,
            right: 0,
        });
        let left = self.grow(
            NodeSamples {
                samples: l_samples,
                sorted: l_sorted,
            },
            depth + 1,
            nodes,
        )?;
        let right = self.grow(
            NodeSamples {
                samples: r_samples,
                sorted: r_sorted,
            },
            depth + 1,
            nodes,
        )?;
        if let Node::Split { left: l, right: rt, .. } = &mut nodes[id] {
            *l = left;
            *rt = right;
        }
        Ok(id)
    }
}

/// Grows one tree on all rows and features of `x`.
pub fn build_tree(x: ArrayView2<'_, f64>, grads: &[GradPair], cfg: &TrainConfig) -> Result<Tree> {
    let cols = Columns::new(x);
    let samples: Vec<u32> = (0..x.nrows() as u32).collect();
    let features: Vec<usize> = (0..cols.n_features()).collect();
    let sorted = features.iter().map(|&f| cols.sorted(f, &samples)).collect();
    TreeBuilder {
        cols: &cols,
        features: &features,
        grads,
        cfg,
    }
    .build(NodeSamples { samples, sorted })
}
