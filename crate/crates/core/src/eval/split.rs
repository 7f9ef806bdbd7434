use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::Label;

/// Train / validation / test fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let r = Self { train, val, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = self.as_array();
        if parts.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidConfig(format!("split ratios {parts:?} must be >= 0")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("split ratios {parts:?} must sum to 1")));
        }
        if self.train <= 0.0 {
            return Err(Error::InvalidConfig("train ratio must be positive".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

/// Disjoint video-id sets. Every frame and segment of a video follows its
/// video into exactly one set.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    pub ratios: SplitRatios,
    pub seed: u64,
}

impl DatasetSplit {
    pub fn part(&self, k: usize) -> &[String] {
        match k {
            0 => &self.train,
            1 => &self.val,
            _ => &self.test,
        }
    }
}

/// Floors `n * ratio`, then hands out the leftover units by largest
/// fractional part (lower index on ties).
fn largest_remainder(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let ideal = ratios.map(|r| n as f64 * r);
    let mut out = ideal.map(|x| x.floor() as usize);
    let mut left = n - out.iter().sum::<usize>();
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| (ideal[b] - ideal[b].floor()).total_cmp(&(ideal[a] - ideal[a].floor())).then(a.cmp(&b)));
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if ratios[k] > 0.0 {
            out[k] += 1;
            left -= 1;
        }
    }
    out
}

/// Per-class counts for each split: rows are classes, columns splits. Row
/// sums equal the class sizes; column sums equal the overall
/// largest-remainder allocation.
fn stratified_counts(class_sizes: [usize; 2], ratios: [f64; 3]) -> [[usize; 3]; 2] {
    let n = class_sizes[0] + class_sizes[1];
    let targets = largest_remainder(n, ratios);
    let mut counts = [[0usize; 3]; 2];
    let mut frac = Vec::new();
    for c in 0..2 {
        for s in 0..3 {
            let ideal = class_sizes[c] as f64 * ratios[s];
            counts[c][s] = ideal.floor() as usize;
            frac.push((ideal - ideal.floor(), c, s));
        }
    }
    let mut need: [usize; 3] = std::array::from_fn(|s| targets[s] - counts[0][s] - counts[1][s]);
    let mut spare: [usize; 2] = std::array::from_fn(|c| class_sizes[c] - counts[c].iter().sum::<usize>());

    // Each cell rounds up or down. Prefer a pattern of round-ups that meets
    // every row and column total, so no class drifts a full video from its
    // share; among those take the one with the largest rounded-up mass.
    let mut best: Option<(f64, u32)> = None;
    for mask in 0u32..64 {
        let up = |c: usize, s: usize| mask >> (3 * c + s) & 1 == 1;
        let rows_ok = (0..2).all(|c| (0..3).filter(|&s| up(c, s)).count() == spare[c]);
        let cols_ok = (0..3).all(|s| (0..2).filter(|&c| up(c, s)).count() == need[s]);
        let fracs_ok = frac.iter().all(|&(f, c, s)| !up(c, s) || f > 0.0);
        if rows_ok && cols_ok && fracs_ok {
            let mass: f64 = frac.iter().filter(|&&(_, c, s)| up(c, s)).map(|t| t.0).sum();
            if best.is_none_or(|(m, _)| mass > m) {
                best = Some((mass, mask));
            }
        }
    }
    if let Some((_, mask)) = best {
        for (c, row) in counts.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                *v += (mask >> (3 * c + s) & 1) as usize;
            }
        }
        return counts;
    }

    frac.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(_, c, s) in &frac {
        if spare[c] > 0 && need[s] > 0 {
            counts[c][s] += 1;
            spare[c] -= 1;
            need[s] -= 1;
        }
    }
    for c in 0..2 {
        while spare[c] > 0 {
            let s = (0..3).max_by_key(|&s| (need[s], std::cmp::Reverse(s))).unwrap();
            counts[c][s] += 1;
            spare[c] -= 1;
            need[s] -= 1;
        }
    }
    counts
}

/// Stratified per-video split. Ids are sorted, shuffled per class with a
/// seeded generator, then cut by the allocated counts; each output list is
/// sorted by id.
pub fn split_by_video(videos: &[(String, Label)], ratios: SplitRatios, seed: u64) -> Result<DatasetSplit> {
    ratios.validate()?;
    let mut by_class: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    for (id, label) in videos {
        by_class[label.as_u8() as usize].push(id.clone());
    }
    for ids in &mut by_class {
        ids.sort();
    }
    let mut all: Vec<&String> = by_class.iter().flatten().collect();
    all.sort();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InsufficientVideos("duplicate video id".into()));
    }
    let sizes = [by_class[0].len(), by_class[1].len()];
    if sizes[0] == 0 || sizes[1] == 0 {
        return Err(Error::InsufficientVideos(format!(
            "need both classes, have {} bonafide and {} fake",
            sizes[0], sizes[1]
        )));
    }

    let counts = stratified_counts(sizes, ratios.as_array());
    if counts[0][0] == 0 || counts[1][0] == 0 {
        return Err(Error::InsufficientVideos(format!(
            "training split would lack a class ({} bonafide, {} fake)",
            counts[0][0], counts[1][0]
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<String>; 3] = Default::default();
    for (c, ids) in by_class.iter_mut().enumerate() {
        ids.shuffle(&mut rng);
        let mut start = 0;
        for (s, part) in parts.iter_mut().enumerate() {
            part.extend_from_slice(&ids[start..start + counts[c][s]]);
            start += counts[c][s];
        }
    }
    for p in &mut parts {
        p.sort();
    }
    let [train, val, test] = parts;
    Ok(DatasetSplit {
        train,
        val,
        test,
        ratios,
        seed,
    })
}
