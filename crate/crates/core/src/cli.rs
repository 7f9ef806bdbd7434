//! Command-line surface. `main.rs` only parses arguments, sizes the thread
//! pool and prints errors; the commands live here so they can be driven
//! from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::data::{generate_synthetic, load_manifest, Dataset, SynthSpec};
use crate::error::{Error, Result};
use crate::eval::{
    fit_on_split, roc_auc, run_ablation, score_levels, split_by_video, Level, LevelScores, ScoredExample,
};
use crate::features::{Category, FrameFeatureTable, Label};
use crate::gbdt::{feature_importance, load_model, save_model, Model, FORMAT_MAJOR, FORMAT_MINOR};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "FAKEBOOST_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fakeboost", version, about = "Landmark + heart-rate deepfake detection with boosted trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on the training split of a manifest and write a model file.
    Fit(FitArgs),
    /// Score every video of a manifest at one level.
    Predict(PredictArgs),
    /// AUC at frame, segment and video level.
    Evaluate(EvaluateArgs),
    /// Per-category and combined-category ablation.
    Ablate(AblateArgs),
    /// Write a seeded synthetic corpus.
    GenSynth(GenSynthArgs),
    /// Print a model's configuration and per-category importance.
    InspectModel(InspectArgs),
}

/// Flags layered over the config file.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Any config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = LevelArg::Frame)]
    pub level: LevelArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Frame,
    Segment,
    Video,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Frame => Level::Frame,
            LevelArg::Segment => Level::Segment,
            LevelArg::Video => Level::Video,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    All,
    Train,
    Val,
    Test,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Restrict to one part of the split recorded in the model.
    #[arg(long, value_enum, default_value_t = Subset::All)]
    pub subset: Subset,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct GenSynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub videos: usize,
    #[arg(long, default_value_t = 120)]
    pub frames: usize,
    #[arg(long, default_value_t = 0.05)]
    pub fake_frac: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Comma-separated categories carrying class signal.
    #[arg(long, default_value = "heart_rate,landmark_2d")]
    pub signal: String,
    #[arg(long, default_value_t = 3.0)]
    pub shift: f64,
    /// Write ROI means and let the loader compute the heart-rate block.
    #[arg(long)]
    pub roi_means: bool,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub model: PathBuf,
}

/// Reads the thread count from [`THREADS_ENV`]; unset means all cores.
pub fn thread_count_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// The single-line diagnostic printed on failure.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
    format!("error: kind={} message=\"{msg}\"", e.kind())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Ablate(a) => cmd_ablate(&a),
        Command::GenSynth(a) => cmd_gen_synth(&a),
        Command::InspectModel(a) => cmd_inspect(&a),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn effective_config(path: Option<&Path>, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = o.n_trees {
        cfg.train.n_trees = v;
    }
    if let Some(v) = o.learning_rate {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = o.max_depth {
        cfg.train.max_depth = v;
    }
    if let Some(v) = o.seed {
        cfg.train.seed = v;
    }
    for kv in &o.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("--set expects key=value, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn model_run_config(model: &Model) -> Result<RunConfig> {
    RunConfig::parse(&model.run_config, "<model run config>")
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let cfg = effective_config(a.config.as_deref(), &a.overrides)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let data = load_manifest(&a.manifest)?;
    let (trained, split) = fit_on_split(&data, &cfg)?;
    save_model(&trained.model, &a.out)?;

    let mut log = format!("# started_unix_seconds = {started}\n");
    log.push_str(&cfg.echo_commented());
    writeln!(
        log,
        "# videos train/val/test = {}/{}/{}",
        split.train.len(),
        split.val.len(),
        split.test.len()
    )
    .unwrap();
    log.push_str("round,train_loss\n");
    for (r, l) in trained.train_loss.iter().enumerate() {
        writeln!(log, "{r},{l}").unwrap();
    }
    write_file(&a.out.with_extension("log"), &log)?;
    println!(
        "trained {} trees on {} videos; final train loss {:.6}; model written to {}",
        trained.model.ensemble.trees.len(),
        split.train.len(),
        trained.train_loss.last().copied().unwrap_or(f64::NAN),
        a.out.display()
    );
    Ok(())
}

fn preamble(command: &str, model: &Model) -> String {
    let mut s = format!("# fakeboost {command}\n# schema = {}\n", model.schema);
    s.extend(model.run_config.lines().map(|l| format!("# {l}\n")));
    s
}

fn score_dataset(model: &Model, data: &Dataset, tables: &[FrameFeatureTable]) -> Result<LevelScores> {
    let cfg = model_run_config(model)?;
    score_levels(model, tables, &data.schema, cfg.segment, cfg.scoring)
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let data = load_manifest(&a.manifest)?;
    model.check_schema(&data.schema)?;
    let scores = score_dataset(&model, &data, &data.tables)?;
    let level = Level::from(a.level);
    let mut out = preamble("predict", &model);
    writeln!(out, "# level = {level}").unwrap();
    out.push_str("unit_id,video_id,label,score\n");
    for e in scores.get(level) {
        writeln!(out, "{},{},{},{}", e.unit_id, e.video_id, e.label.as_u8(), e.score).unwrap();
    }
    write_file(&a.out, &out)?;
    println!("{} {level} scores written to {}", scores.get(level).len(), a.out.display());
    Ok(())
}

fn level_counts(examples: &[ScoredExample]) -> (usize, usize) {
    let fake = examples.iter().filter(|e| e.label == Label::Fake).count();
    (fake, examples.len() - fake)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let data = load_manifest(&a.manifest)?;
    model.check_schema(&data.schema)?;
    let tables: Vec<FrameFeatureTable> = match a.subset {
        Subset::All => data.tables.clone(),
        part => {
            let cfg = model_run_config(&model)?;
            let split = split_by_video(&data.videos(), cfg.split, cfg.train.seed)?;
            let ids = match part {
                Subset::Train => &split.train,
                Subset::Val => &split.val,
                _ => &split.test,
            };
            data.tables_for(ids)?.into_iter().cloned().collect()
        }
    };
    let scores = score_dataset(&model, &data, &tables)?;

    let mut out = preamble("evaluate", &model);
    writeln!(out, "# subset = {}", a.subset.to_possible_value().expect("no skipped variants").get_name()).unwrap();
    out.push_str("level,auc,n_units,n_fake,n_bonafide\n");
    let mut table = format!("{:<8} {:>8} {:>8} {:>6} {:>9}\n", "level", "auc", "units", "fake", "bonafide");
    for level in [Level::Frame, Level::Segment, Level::Video] {
        let ex = scores.get(level);
        let auc = roc_auc(ex)?;
        let (fake, real) = level_counts(ex);
        writeln!(out, "{level},{auc},{},{fake},{real}", ex.len()).unwrap();
        writeln!(table, "{:<8} {auc:>8.4} {:>8} {fake:>6} {real:>9}", level.as_str(), ex.len()).unwrap();
    }
    write_file(&a.out, &out)?;
    print!("{table}");
    Ok(())
}

fn cmd_ablate(a: &AblateArgs) -> Result<()> {
    let cfg = effective_config(a.config.as_deref(), &a.overrides)?;
    let data = load_manifest(&a.manifest)?;
    let split = split_by_video(&data.videos(), cfg.split, cfg.train.seed)?;
    let report = run_ablation(&data, &split, &cfg.combination_list(), &cfg)?;

    let echo = cfg.echo_commented();
    write_file(&a.out_dir.join("ablation.csv"), &format!("{echo}{}", report.to_csv()))?;
    write_file(&a.out_dir.join("ablation.txt"), &format!("{echo}\n{}", report.to_table()))?;
    write_file(&a.out_dir.join("run_config.txt"), &cfg.echo())?;
    print!("{}", report.to_table());
    Ok(())
}

fn cmd_gen_synth(a: &GenSynthArgs) -> Result<()> {
    let signal = a
        .signal
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Category>>>()?;
    let spec = SynthSpec {
        seed: a.seed,
        n_videos: a.videos,
        frames_per_video: a.frames,
        fraction_fake: a.fake_frac,
        signal,
        shift: a.shift,
        roi_means_file: a.roi_means,
        ..SynthSpec::default()
    };
    let m = generate_synthetic(&spec, &a.out_dir)?;
    println!(
        "wrote {} videos ({} fake) to {}",
        m.videos.len(),
        spec.n_fake(),
        a.out_dir.join("manifest.toml").display()
    );
    Ok(())
}

fn cmd_inspect(a: &InspectArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let mut s = format!("format: {FORMAT_MAJOR}.{FORMAT_MINOR}\n");
    writeln!(s, "schema: {} ({} columns)", model.schema, model.schema.total_dim()).unwrap();
    writeln!(s, "fingerprint: {:016x}", model.fingerprint()).unwrap();
    writeln!(s, "trees: {}", model.ensemble.trees.len()).unwrap();
    if let Some(seg) = &model.segment_ensemble {
        writeln!(s, "segment trees: {}", seg.trees.len()).unwrap();
    }
    s.push_str("\nrun config:\n");
    s.extend(model.run_config.lines().map(|l| format!("  {l}\n")));

    let imp = feature_importance(&model.ensemble, &model.schema)?;
    let total = imp.total();
    writeln!(s, "\n{:<14} {:>6} {:>14} {:>7}", "category", "width", "gain", "share").unwrap();
    for ((cat, gain), (_, width)) in imp.per_category.iter().zip(model.schema.widths()) {
        let share = if total > 0.0 { gain / total } else { 0.0 };
        writeln!(s, "{:<14} {width:>6} {gain:>14.4} {share:>7.4}", cat.as_str()).unwrap();
    }
    print!("{s}");
    Ok(())
}
