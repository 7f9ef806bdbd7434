//! Seeded synthetic corpus.
//!
//! Categories listed in the signal set carry class-dependent structure;
//! every other column is noise with a per-video offset. Landmark-style
//! columns are `label * shift * (+/-1) + N(0, 0.5) per video + N(0, 1) per
//! frame`. The heart-rate block is computed from simulated ROI colour means
//! (skin tone plus a small green-channel pulse); when it carries signal, fake
//! videos have their green and blue channels rescaled, which moves the
//! channel ratios by roughly `shift` noise standard deviations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::frames::{heart_rate_from_roi_means, roi_means_header};
use super::manifest::{DatasetManifest, VideoEntry};
use crate::error::{Error, Result};
use crate::features::{heart_rate_column_names, Category, FeatureSchema, IntensityConvention, Label, HR_DIM};

/// Compact per-category widths used by the generator by default.
pub fn default_synth_widths() -> Vec<(Category, usize)> {
    vec![
        (Category::EyeLandmark, 24),
        (Category::HeadPose, 6),
        (Category::Landmark2d, 32),
        (Category::Landmark3d, 32),
        (Category::Shape, 12),
        (Category::ActionUnit, 17),
        (Category::HeartRate, HR_DIM),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_videos: usize,
    pub frames_per_video: usize,
    pub fraction_fake: f64,
    pub fps: f64,
    pub widths: Vec<(Category, usize)>,
    /// Categories whose columns depend on the label.
    pub signal: Vec<Category>,
    /// Class separation in units of per-frame noise.
    pub shift: f64,
    /// Write ROI means to a companion CSV and leave the heart-rate block to
    /// the loader instead of writing it into the feature CSV.
    pub roi_means_file: bool,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_videos: 200,
            frames_per_video: 120,
            fraction_fake: 0.05,
            fps: 30.0,
            widths: default_synth_widths(),
            signal: vec![Category::HeartRate, Category::Landmark2d],
            shift: 3.0,
            roi_means_file: false,
        }
    }
}

impl SynthSpec {
    pub fn n_fake(&self) -> usize {
        ((self.n_videos as f64 * self.fraction_fake).round() as usize).clamp(1, self.n_videos - 1)
    }

    fn validate(&self) -> Result<FeatureSchema> {
        if self.n_videos < 4 {
            return Err(Error::InvalidConfig(format!("need at least 4 videos, got {}", self.n_videos)));
        }
        if !(self.fraction_fake > 0.0 && self.fraction_fake < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fake fraction must lie in (0, 1), got {}",
                self.fraction_fake
            )));
        }
        if self.frames_per_video == 0 {
            return Err(Error::InvalidConfig("frames per video must be positive".into()));
        }
        if !(self.shift.is_finite() && self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidConfig("shift and fps must be finite, fps positive".into()));
        }
        let schema = FeatureSchema::new(&self.widths)?;
        if let Some(c) = self.signal.iter().find(|c| !schema.contains(**c)) {
            return Err(Error::InvalidConfig(format!("signal category {c} is not in the schema")));
        }
        if self.roi_means_file && !matches!(schema.spans().last(), Some((Category::HeartRate, _))) {
            return Err(Error::InvalidConfig(
                "ROI-means output needs heart_rate as the last category".into(),
            ));
        }
        Ok(schema)
    }
}

fn quantize(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

struct VideoData {
    /// Full fused rows (heart-rate block included) or, with a ROI-means
    /// file, only the non-heart-rate columns.
    features: Array2<f64>,
    roi_means: Option<Array2<f64>>,
}

fn simulate_roi_means(spec: &SynthSpec, label: Label, signal: bool, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = spec.frames_per_video;
    let tone_noise = Normal::new(0.0, 2.0).unwrap();
    let frame_noise = Normal::new(0.0, 1.5).unwrap();
    let mut tone = [150.0, 110.0, 90.0];
    for t in &mut tone {
        *t += tone_noise.sample(rng);
    }
    let offsets: Vec<f64> = (0..21).map(|_| tone_noise.sample(rng)).collect();
    let (g_scale, b_scale) = if signal && label == Label::Fake {
        let k = spec.shift / 3.0;
        (1.0 - 0.12 * k, 1.0 + 0.08 * k)
    } else {
        (1.0, 1.0)
    };
    let pulse_hz = rng.random_range(0.9..1.8);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let mut out = Array2::zeros((n, 21));
    for f in 0..n {
        let pulse = 0.8 * (std::f64::consts::TAU * pulse_hz * f as f64 / spec.fps + phase).sin();
        for roi in 0..7 {
            let mut c = [0.0; 3];
            for (ch, v) in c.iter_mut().enumerate() {
                *v = tone[ch] + offsets[3 * roi + ch] + frame_noise.sample(rng);
            }
            c[1] = (c[1] + pulse) * g_scale;
            c[2] *= b_scale;
            for (ch, v) in c.iter().enumerate() {
                out[[f, 3 * roi + ch]] = quantize(v.clamp(0.0, 255.0));
            }
        }
    }
    out
}

fn simulate_video(spec: &SynthSpec, schema: &FeatureSchema, index: usize, label: Label) -> Result<VideoData> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64 + 1);
    let video_noise = Normal::new(0.0, 0.5).unwrap();
    let frame_noise = Normal::new(0.0, 1.0).unwrap();
    let n = spec.frames_per_video;
    let has_hr = schema.contains(Category::HeartRate);
    let width = if spec.roi_means_file { schema.total_dim() - HR_DIM } else { schema.total_dim() };
    let mut features = Array2::zeros((n, width));

    for (cat, range) in schema.spans() {
        if *cat == Category::HeartRate {
            continue;
        }
        let active = spec.signal.contains(cat) && label == Label::Fake;
        let base: Vec<f64> = range
            .clone()
            .map(|j| {
                let dir = if j % 2 == 0 { 1.0 } else { -1.0 };
                let mean = if active { spec.shift * dir } else { 0.0 };
                mean + video_noise.sample(&mut rng)
            })
            .collect();
        for f in 0..n {
            for (k, j) in range.clone().enumerate() {
                features[[f, j]] = quantize(base[k] + frame_noise.sample(&mut rng));
            }
        }
    }

    let mut roi_means = None;
    if has_hr {
        let means = simulate_roi_means(spec, label, spec.signal.contains(&Category::HeartRate), &mut rng);
        if spec.roi_means_file {
            roi_means = Some(means);
        } else {
            let (hr, _) = heart_rate_from_roi_means(&means, "synthetic", IntensityConvention::EightBit)?;
            let span = schema.span(Category::HeartRate).expect("schema has heart_rate");
            for f in 0..n {
                for (k, j) in span.clone().enumerate() {
                    features[[f, j]] = quantize(hr[[f, k]]);
                }
            }
        }
    }
    Ok(VideoData { features, roi_means })
}

fn write_csv(path: &Path, header: &[String], rows: &Array2<f64>) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows.outer_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                text.push(',');
            }
            write!(text, "{v:.6}").unwrap();
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn column_names(schema: &FeatureSchema, with_hr: bool) -> Vec<String> {
    let mut names = Vec::with_capacity(schema.total_dim());
    for (cat, range) in schema.spans() {
        if *cat == Category::HeartRate {
            if with_hr {
                names.extend(heart_rate_column_names());
            }
        } else {
            names.extend((0..range.len()).map(|j| format!("{cat}_{j}")));
        }
    }
    names
}

/// Writes `manifest.toml` and `videos/vidNNNN.csv` under `out_dir` and
/// returns the manifest. Output is byte-identical for a given spec.
pub fn generate_synthetic(spec: &SynthSpec, out_dir: &Path) -> Result<DatasetManifest> {
    let schema = spec.validate()?;
    let videos_dir = out_dir.join("videos");
    std::fs::create_dir_all(&videos_dir).map_err(|e| Error::io(&videos_dir, e))?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut fake = vec![false; spec.n_videos];
    for i in rand::seq::index::sample(&mut rng, spec.n_videos, spec.n_fake()) {
        fake[i] = true;
    }

    let header = column_names(&schema, !spec.roi_means_file);
    let roi_header = roi_means_header();
    let mut entries = Vec::with_capacity(spec.n_videos);
    for (i, &is_fake) in fake.iter().enumerate() {
        let id = format!("vid{i:04}");
        let label = if is_fake { Label::Fake } else { Label::Bonafide };
        let data = simulate_video(spec, &schema, i, label)?;
        let rel = PathBuf::from("videos").join(format!("{id}.csv"));
        write_csv(&out_dir.join(&rel), &header, &data.features)?;
        let roi_rel = match &data.roi_means {
            Some(m) => {
                let p = PathBuf::from("videos").join(format!("{id}_roi.csv"));
                write_csv(&out_dir.join(&p), &roi_header, m)?;
                Some(p)
            }
            None => None,
        };
        entries.push(VideoEntry {
            id,
            label,
            features: rel,
            fps: spec.fps,
            intensity: IntensityConvention::EightBit,
            roi_means: roi_rel,
        });
    }
    let manifest = DatasetManifest {
        schema,
        intensity: IntensityConvention::EightBit,
        videos: entries,
        base_dir: out_dir.to_path_buf(),
    };
    let path = out_dir.join("manifest.toml");
    std::fs::write(&path, manifest.to_toml()).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
