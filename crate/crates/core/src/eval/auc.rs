use std::fmt;

use crate::error::{Error, Result};
use crate::features::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Frame,
    Segment,
    Video,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Frame => "frame",
            Level::Segment => "segment",
            Level::Video => "video",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "frame" => Ok(Level::Frame),
            "segment" => Ok(Level::Segment),
            "video" => Ok(Level::Video),
            other => Err(Error::InvalidConfig(format!("unknown level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExample {
    pub unit_id: String,
    pub video_id: String,
    pub score: f64,
    pub label: Label,
    pub level: Level,
}

pub fn roc_auc(examples: &[ScoredExample]) -> Result<f64> {
    if let Some(bad) = examples.iter().find(|e| !e.score.is_finite()) {
        return Err(Error::NonFiniteValue {
            video: bad.video_id.clone(),
            frame: 0,
            column: format!("score of {}", bad.unit_id),
        });
    }
    let scores: Vec<f64> = examples.iter().map(|e| e.score).collect();
    let labels: Vec<Label> = examples.iter().map(|e| e.label).collect();
    auc_from_scores(&scores, &labels)
}

/// Mann-Whitney estimate of the ROC area with midranks for tied scores.
pub fn auc_from_scores(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "scores vs labels".into(),
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l == Label::Fake).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass {
            positives: n_pos,
            negatives: n_neg,
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share their mean
        let midrank = (i + 1 + j) as f64 / 2.0;
        let tied_pos = order[i..j].iter().filter(|&&k| labels[k] == Label::Fake).count();
        pos_rank_sum += midrank * tied_pos as f64;
        i = j;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[u8]) -> Vec<Label> {
        v.iter().map(|&b| Label::from_u8(b).unwrap()).collect()
    }

    #[test]
    fn perfect_and_all_tied() {
        assert_eq!(auc_from_scores(&[0.1, 0.2, 0.8, 0.9], &labels(&[0, 0, 1, 1])).unwrap(), 1.0);
        assert_eq!(auc_from_scores(&[0.1, 0.2, 0.8, 0.9], &labels(&[1, 1, 0, 0])).unwrap(), 0.0);
        assert_eq!(auc_from_scores(&[0.5; 6], &labels(&[0, 1, 0, 1, 1, 0])).unwrap(), 0.5);
    }

    #[test]
    fn partial_ties() {
        // pairs: (0.4 vs 0.1) win, (0.4 vs 0.4) half, (0.9 vs both) win -> 3.5/4
        let auc = auc_from_scores(&[0.1, 0.4, 0.4, 0.9], &labels(&[0, 0, 1, 1])).unwrap();
        assert_eq!(auc, 0.875);
    }

    #[test]
    fn single_class() {
        assert!(matches!(
            auc_from_scores(&[0.1, 0.2], &labels(&[1, 1])),
            Err(Error::SingleClass { positives: 2, negatives: 0 })
        ));
    }

    #[test]
    fn rejects_nan_score() {
        let ex = ScoredExample {
            unit_id: "v#0".into(),
            video_id: "v".into(),
            score: f64::NAN,
            label: Label::Fake,
            level: Level::Frame,
        };
        assert!(roc_auc(&[ex]).is_err());
    }
}
