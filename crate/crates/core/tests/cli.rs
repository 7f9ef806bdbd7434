use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fakeboost"));
    c.env_remove("FAKEBOOST_THREADS");
    c
}

fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy/manifest.toml")
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.lines().count(), 1, "{text}");
    text.trim_end().to_string()
}

fn quick_config(dir: &Path) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, "# quick\nn_trees = 15\nlearning_rate = 0.3\nmax_depth = 3\n").unwrap();
    p
}

fn fit_toy(dir: &Path) -> PathBuf {
    let model = dir.join("toy.bin");
    run(bin().arg("fit").arg("--manifest").arg(toy()).arg("--config").arg(quick_config(dir)).arg("--out").arg(&model));
    model
}

#[test]
fn fit_then_evaluate_on_toy_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_toy(dir.path());
    let log = std::fs::read_to_string(model.with_extension("log")).unwrap();
    assert!(log.lines().next().unwrap().starts_with("# started_unix_seconds = "));
    assert_eq!(log.lines().filter(|l| !l.starts_with('#')).count(), 1 + 16);

    let report = dir.path().join("report.csv");
    run(bin().arg("evaluate").arg("--model").arg(&model).arg("--manifest").arg(toy()).arg("--out").arg(&report));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("# n_trees = 15"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "level,auc,n_units,n_fake,n_bonafide");
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("frame,") && rows[2].starts_with("segment,") && rows[3].starts_with("video,"));
}

#[test]
fn predict_writes_each_level() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_toy(dir.path());
    for (level, units) in [("frame", 80), ("segment", 2), ("video", 2)] {
        let out = dir.path().join(format!("{level}.csv"));
        run(bin()
            .arg("predict")
            .arg("--model")
            .arg(&model)
            .arg("--manifest")
            .arg(toy())
            .args(["--level", level])
            .arg("--out")
            .arg(&out));
        let text = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "unit_id,video_id,label,score");
        assert_eq!(rows.len() - 1, units, "{level}");
        assert!(text.contains("# seed = 0"));
    }
}

#[test]
fn artifacts_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ma, mb) = (fit_toy(a.path()), fit_toy(b.path()));
    assert_eq!(std::fs::read(&ma).unwrap(), std::fs::read(&mb).unwrap());
    let strip = |p: PathBuf| -> String {
        std::fs::read_to_string(p.with_extension("log")).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(ma.clone()), strip(mb.clone()));
    let scores = |model: &Path, dir: &Path| {
        let out = dir.join("s.csv");
        run(bin().arg("predict").arg("--model").arg(model).arg("--manifest").arg(toy()).arg("--out").arg(&out));
        std::fs::read(out).unwrap()
    };
    assert_eq!(scores(&ma, a.path()), scores(&mb, b.path()));
}

#[test]
fn inputs_are_not_modified() {
    let toy_dir = toy().parent().unwrap().to_path_buf();
    let snapshot = || {
        let mut files: Vec<_> = std::fs::read_dir(&toy_dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.into_iter().map(|p| (p.clone(), std::fs::read(p).unwrap())).collect::<Vec<_>>()
    };
    let before = snapshot();
    let dir = tempfile::tempdir().unwrap();
    fit_toy(dir.path());
    assert_eq!(snapshot(), before);
}

#[test]
fn predict_with_other_schema_fails() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_toy(dir.path());
    // same columns, different category widths
    let toy_dir = toy().parent().unwrap().to_path_buf();
    let d = toy_dir.display();
    let text = std::fs::read_to_string(toy())
        .unwrap()
        .replace("width = 24\n", "width = 23\n")
        .replace("width = 6\n", "width = 7\n")
        .replace("features = \"", &format!("features = \"{d}/"))
        .replace("roi_means = \"", &format!("roi_means = \"{d}/"));
    let other = dir.path().join("other.toml");
    std::fs::write(&other, text).unwrap();
    let out = bin()
        .arg("predict")
        .arg("--model")
        .arg(&model)
        .arg("--manifest")
        .arg(&other)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let line = stderr_line(&out);
    assert!(line.starts_with("error: kind=SchemaMismatch message=\""), "{line}");
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["inspect-model", "--model"]).arg(dir.path().join("none.bin")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error: kind=IoError message="));

    let bad_cfg = dir.path().join("bad.cfg");
    std::fs::write(&bad_cfg, "n_trees = 10\nwindo = 5\n").unwrap();
    let out = bin()
        .arg("fit")
        .arg("--manifest")
        .arg(toy())
        .arg("--config")
        .arg(&bad_cfg)
        .arg("--out")
        .arg(dir.path().join("m.bin"))
        .output()
        .unwrap();
    let line = stderr_line(&out);
    assert!(line.starts_with("error: kind=ParseError") && line.contains("line 2"), "{line}");

    let garbage = dir.path().join("garbage.bin");
    std::fs::write(&garbage, b"not a model").unwrap();
    let out = bin().args(["inspect-model", "--model"]).arg(&garbage).output().unwrap();
    assert!(stderr_line(&out).starts_with("error: kind=CorruptModel"));

    let out = bin()
        .env("FAKEBOOST_THREADS", "zero")
        .args(["inspect-model", "--model"])
        .arg(&garbage)
        .output()
        .unwrap();
    assert!(stderr_line(&out).starts_with("error: kind=InvalidConfig"));
}

#[test]
fn inspect_model_shows_config_and_importance() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit_toy(dir.path());
    let out = run(bin().args(["inspect-model", "--model"]).arg(&model));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n_trees = 15"));
    for cat in ["eye_landmark", "head_pose", "landmark_2d", "landmark_3d", "shape", "action_unit", "heart_rate"] {
        assert!(text.lines().any(|l| l.starts_with(cat)), "{cat}");
    }
}

#[test]
fn gen_synth_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        run(bin().args(["gen-synth", "--seed", "7", "--videos", "6", "--frames", "10", "--fake-frac", "0.3", "--out-dir"]).arg(d));
    }
    for f in ["manifest.toml", "videos/vid0000.csv", "videos/vid0005.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let out = bin().args(["gen-synth", "--videos", "3", "--out-dir"]).arg(a.path().join("x")).output().unwrap();
    assert!(stderr_line(&out).starts_with("error: kind=InvalidConfig"));
}

#[test]
fn ablate_default_sets_emits_twelve_rows() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    run(bin().args(["gen-synth", "--seed", "3", "--videos", "12", "--frames", "40", "--fake-frac", "0.5", "--out-dir"]).arg(&corpus));
    let out_dir = dir.path().join("ablation");
    run(bin()
        .arg("ablate")
        .arg("--manifest")
        .arg(corpus.join("manifest.toml"))
        .arg("--config")
        .arg(quick_config(dir.path()))
        .args(["--set", "split=0.5,0,0.5"])
        .arg("--out-dir")
        .arg(&out_dir));
    let csv = std::fs::read_to_string(out_dir.join("ablation.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "combination,auc_segment,auc_frame,n_trees,elapsed_seconds");
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[1..].iter().filter(|r| !r.split(',').next().unwrap().contains('+')).count(), 7);
    assert!(csv.contains("# split = 0.5,0,0.5"));
    let table = std::fs::read_to_string(out_dir.join("ablation.txt")).unwrap();
    assert!(table.contains("heart_rate"));
    let echo = std::fs::read_to_string(out_dir.join("run_config.txt")).unwrap();
    assert!(echo.contains("n_trees = 15"));
}
