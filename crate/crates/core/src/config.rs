//! Flat `key = value` run configuration.
//!
//! Recognised keys, in the order [`RunConfig::echo`] writes them:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `n_trees` | 1500 | boosting rounds |
//! | `learning_rate` | 0.01 | shrinkage on every tree |
//! | `max_depth` | 8 | tree depth limit |
//! | `lambda` | 1 | L2 penalty on leaf weights |
//! | `gamma` | 0 | minimum split gain |
//! | `min_child_hessian` | 0.001 | minimum hessian sum per child |
//! | `base_score` | 0 | initial margin |
//! | `subsample` | 1 | row fraction per tree |
//! | `colsample` | 1 | feature fraction per tree |
//! | `pos_weight` | 1 | gradient multiplier on fake rows |
//! | `seed` | 0 | training and split seed |
//! | `window` | 30 | segment length in frames |
//! | `overlap` | 10 | frames shared by consecutive segments |
//! | `segment_scoring` | feature_mean | `feature_mean`, `feature_mean_std` or `score_mean` |
//! | `split` | 0.8,0.1,0.1 | train,val,test video fractions |
//! | `combinations` | default | `default`, or `;`-separated sets of `+`-joined categories |
//!
//! Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{default_ablation_sets, SegmentScoring, SplitRatios};
use crate::features::Category;
use crate::gbdt::TrainConfig;
use crate::preprocess::SegmentSpec;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub segment: SegmentSpec,
    pub scoring: SegmentScoring,
    pub split: SplitRatios,
    /// `None` means the default 7 single-category rows plus 5 combinations.
    pub combinations: Option<Vec<Vec<Category>>>,
}

pub const KEYS: [&str; 16] = [
    "n_trees",
    "learning_rate",
    "max_depth",
    "lambda",
    "gamma",
    "min_child_hessian",
    "base_score",
    "subsample",
    "colsample",
    "pos_weight",
    "seed",
    "window",
    "overlap",
    "segment_scoring",
    "split",
    "combinations",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

pub fn format_combination(combo: &[Category]) -> String {
    combo.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("+")
}

pub fn parse_combinations(value: &str) -> Result<Option<Vec<Vec<Category>>>> {
    let value = value.trim();
    if value == "default" {
        return Ok(None);
    }
    let mut out = Vec::new();
    for set in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let combo = set
            .split('+')
            .map(|c| c.parse::<Category>())
            .collect::<Result<Vec<_>>>()?;
        out.push(combo);
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("combinations list is empty".into()));
    }
    Ok(Some(out))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.train;
        match key {
            "n_trees" => t.n_trees = parse_num(key, value)?,
            "learning_rate" => t.learning_rate = parse_num(key, value)?,
            "max_depth" => t.max_depth = parse_num(key, value)?,
            "lambda" => t.lambda = parse_num(key, value)?,
            "gamma" => t.gamma = parse_num(key, value)?,
            "min_child_hessian" => t.min_child_hessian = parse_num(key, value)?,
            "base_score" => t.base_score = parse_num(key, value)?,
            "subsample" => t.subsample = parse_num(key, value)?,
            "colsample" => t.colsample = parse_num(key, value)?,
            "pos_weight" => t.pos_weight = parse_num(key, value)?,
            "seed" => t.seed = parse_num(key, value)?,
            "window" => self.segment = SegmentSpec::new(parse_num(key, value)?, self.segment.overlap())?,
            "overlap" => self.segment = SegmentSpec::new(self.segment.window(), parse_num(key, value)?)?,
            "segment_scoring" => self.scoring = value.parse()?,
            "split" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| parse_num(key, p))
                    .collect::<Result<_>>()?;
                let [train, val, test] = parts[..] else {
                    return Err(Error::InvalidConfig(format!("`split` needs three fractions, got `{value}`")));
                };
                self.split = SplitRatios::new(train, val, test)?;
            }
            "combinations" => self.combinations = parse_combinations(value)?,
            other => return Err(Error::InvalidConfig(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parses the flat format on top of the defaults.
    ///
    /// `window` and `overlap` are applied together at the end so their
    /// relative order in the file does not matter.
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut window = None;
        let mut overlap = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::ParseError {
                file: file.to_string(),
                line: lineno + 1,
                column: 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "window" => window = Some(parse_num::<usize>(key, value).map_err(|e| err(e.to_string()))?),
                "overlap" => overlap = Some(parse_num::<usize>(key, value).map_err(|e| err(e.to_string()))?),
                _ => cfg.set(key, value).map_err(|e| err(e.to_string()))?,
            }
        }
        cfg.segment = SegmentSpec::new(
            window.unwrap_or(cfg.segment.window()),
            overlap.unwrap_or(cfg.segment.overlap()),
        )?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.split.validate()?;
        if let Some(c) = &self.combinations {
            if c.iter().any(|set| set.is_empty()) {
                return Err(Error::InvalidConfig("empty category combination".into()));
            }
        }
        Ok(())
    }

    pub fn combination_list(&self) -> Vec<Vec<Category>> {
        self.combinations.clone().unwrap_or_else(default_ablation_sets)
    }

    /// Every key with its effective value, one per line. Parsing the echo
    /// gives back an equal config.
    pub fn echo(&self) -> String {
        let t = &self.train;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("n_trees", t.n_trees.to_string());
        kv("learning_rate", t.learning_rate.to_string());
        kv("max_depth", t.max_depth.to_string());
        kv("lambda", t.lambda.to_string());
        kv("gamma", t.gamma.to_string());
        kv("min_child_hessian", t.min_child_hessian.to_string());
        kv("base_score", t.base_score.to_string());
        kv("subsample", t.subsample.to_string());
        kv("colsample", t.colsample.to_string());
        kv("pos_weight", t.pos_weight.to_string());
        kv("seed", t.seed.to_string());
        kv("window", self.segment.window().to_string());
        kv("overlap", self.segment.overlap().to_string());
        kv("segment_scoring", self.scoring.to_string());
        kv("split", format!("{},{},{}", self.split.train, self.split.val, self.split.test));
        kv(
            "combinations",
            match &self.combinations {
                None => "default".into(),
                Some(c) => c.iter().map(|x| format_combination(x)).collect::<Vec<_>>().join(";"),
            },
        );
        s
    }

    /// The echo with every line prefixed by `# `, for CSV preambles.
    pub fn echo_commented(&self) -> String {
        self.echo().lines().map(|l| format!("# {l}\n")).collect()
    }
}
