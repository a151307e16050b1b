//! Command-line front end: `tune`, `scan`, `hoc`, `simulate`, `decompose`
//! and `metrics`.
//!
//! Parameters come from flags, then an optional `--config` file (TOML or
//! JSON by extension), then built-in defaults. Exit codes: 0 success,
//! 2 usage or configuration error, 3 data error, 4 internal failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bandpass::{decompose, standard_bands, BandSpec};
use crate::degrade::{
    add_noise_with, angle_range, downsample_upsample, fbp, inscribed_disk_mask, kspace_undersample,
    make_phantom, radon, NoiseModel, PhantomKind,
};
use crate::error::Error;
use crate::frc::Window;
use crate::image::{fraction_to_normalized, Image, NYQUIST};
use crate::io::{
    read_annotations, read_image, read_pgm, write_hoc_curve, write_image, write_json,
    write_overlay, write_phantom, write_report, write_sinogram, DisplayWindow, ReportFile,
    TOOL_VERSION,
};
use crate::metrics::{hellinger, infer_data_range, psnr, ssim, DEFAULT_BINS};
use crate::scanner::{
    hoc_curve, scan, tune_x_ht, FrcParams, SfrcConfig, SlicePair, TuningResult, DEFAULT_EPSILON,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

/// Library errors raised while reading or processing inputs are data errors.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Output failures are internal: inputs were fine but results could not be
/// persisted.
fn output<T>(r: crate::error::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::internal(e.to_string()))
}

/// Parameter validation failures are configuration errors.
fn config<T>(r: crate::error::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::usage(e.to_string()))
}

#[derive(Debug, Parser)]
#[command(
    name = "sfrc",
    version,
    about = "Patch-wise Fourier ring correlation scans for hallucination detection"
)]
pub struct Cli {
    /// TOML or JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Seed for stochastic steps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune the hallucination threshold from annotated patches.
    Tune(TuneArgs),
    /// Scan test images against references and label hallucinated patches.
    Scan(ScanArgs),
    /// Sweep the hallucination threshold and write the HOC curve.
    Hoc(HocArgs),
    /// Generate degraded images with the built-in simulators.
    Simulate(SimulateArgs),
    /// Split an image into radial frequency bands.
    Decompose(DecomposeArgs),
    /// Full-image PSNR, SSIM and Hellinger distance.
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StackArgs {
    /// Reference image file or directory of images.
    #[arg(long, value_name = "PATH")]
    pub reference: Option<PathBuf>,
    /// Test image file or directory, paired with the references by file name.
    #[arg(long, value_name = "PATH")]
    pub test: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Pixel size for PGM inputs.
    #[arg(long)]
    pub pixel_size: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FrcArgs {
    /// Patch side in pixels (even, at least 8).
    #[arg(long)]
    pub patch_size: Option<usize>,
    /// FRC threshold Y in [0, 1].
    #[arg(long = "frc-threshold", short = 'y')]
    pub frc_threshold: Option<f64>,
    /// Ring width in cycles per pixel (default 1 / patch size).
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Apodization applied to each patch before the transform.
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowArg {
    None,
    Tukey,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::None => Window::None,
            WindowArg::Tukey => Window::Tukey,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct XhtArgs {
    /// Hallucination threshold in cycles per pixel.
    #[arg(long)]
    pub xht: Option<f64>,
    /// Hallucination threshold as a fraction of Nyquist.
    #[arg(long)]
    pub xht_fraction: Option<f64>,
    /// Hallucination threshold in cycles per unit length (uses the pixel size).
    #[arg(long)]
    pub xht_physical: Option<f64>,
    /// Label patches with x_ct <= x_ht instead of x_ct < x_ht.
    #[arg(long)]
    pub inclusive: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub stack: StackArgs,
    #[command(flatten)]
    pub frc: FrcArgs,
    /// Annotation JSON file.
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    /// Margin added to the largest annotated x_ct.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub stack: StackArgs,
    #[command(flatten)]
    pub frc: FrcArgs,
    #[command(flatten)]
    pub xht: XhtArgs,
    /// Overlay display window center (level).
    #[arg(long)]
    pub window_center: Option<f64>,
    /// Overlay display window width.
    #[arg(long)]
    pub window_width: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct HocArgs {
    #[command(flatten)]
    pub stack: StackArgs,
    #[command(flatten)]
    pub frc: FrcArgs,
    /// Lower end of the x_ht sweep as a fraction of Nyquist.
    #[arg(long)]
    pub xht_min_fraction: Option<f64>,
    /// Upper end of the x_ht sweep as a fraction of Nyquist.
    #[arg(long)]
    pub xht_max_fraction: Option<f64>,
    /// Number of thresholds in the sweep.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SimKind {
    /// Block-average downsampling with nearest-neighbour upsampling.
    Downsample,
    /// Equidistant Cartesian k-space undersampling.
    Kspace,
    /// Complete parallel-beam acquisition reconstructed with FBP.
    Full,
    /// Limited angular range.
    MissingWedge,
    /// Backprojection angles that disagree with the forward projection.
    Distortion,
    /// Reduced-dose transmission noise.
    Noise,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SimKind>,
    /// Source image; a phantom is generated when omitted.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Phantom kind: ellipses, texture or checker.
    #[arg(long)]
    pub phantom: Option<String>,
    /// Phantom side length in pixels.
    #[arg(long)]
    pub size: Option<usize>,
    /// Output directory.
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Projection angles as start:stop:step in degrees (stop excluded).
    #[arg(long)]
    pub angles: Option<String>,
    /// Backprojection angles for the distortion kind.
    #[arg(long)]
    pub back_angles: Option<String>,
    /// Downsampling factor.
    #[arg(long)]
    pub factor: Option<usize>,
    /// k-space acceleration.
    #[arg(long)]
    pub acceleration: Option<usize>,
    /// Dose fraction in (0, 1] for the noise kind.
    #[arg(long)]
    pub dose: Option<f64>,
    /// Incident flux (counts per ray at full dose).
    #[arg(long)]
    pub flux: Option<f64>,
    /// Standard deviation of additive electronic noise in counts.
    #[arg(long)]
    pub electronic_std: Option<f64>,
    /// Attenuation per intensity unit per unit length used for the noise kind.
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    /// Image to decompose.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, short, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Bands as comma-separated low:high Nyquist fractions, e.g. "0:0.25,0.25:1".
    #[arg(long)]
    pub bands: Option<String>,
    #[arg(long)]
    pub pixel_size: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub stack: StackArgs,
    /// Intensity range for PSNR and SSIM.
    #[arg(long)]
    pub data_range: Option<f64>,
    /// Use the joint min-max of each pair as the data range.
    #[arg(long)]
    pub infer_range: bool,
    /// Histogram bins for the Hellinger distance.
    #[arg(long)]
    pub bins: Option<usize>,
}

/// Values a config file may provide. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub reference: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub pixel_size: Option<f64>,

    pub patch_size: Option<usize>,
    pub frc_threshold: Option<f64>,
    pub bin_width: Option<f64>,
    pub window: Option<WindowArg>,

    pub x_ht: Option<f64>,
    pub xht_fraction: Option<f64>,
    pub xht_physical: Option<f64>,
    pub strict_comparison: Option<bool>,
    pub epsilon: Option<f64>,

    pub xht_min_fraction: Option<f64>,
    pub xht_max_fraction: Option<f64>,
    pub steps: Option<usize>,

    pub window_center: Option<f64>,
    pub window_width: Option<f64>,

    /// `[low, high]` pairs as Nyquist fractions.
    pub bands: Option<Vec<[f64; 2]>>,

    pub kind: Option<SimKind>,
    pub phantom: Option<String>,
    pub size: Option<usize>,
    pub angles: Option<String>,
    pub back_angles: Option<String>,
    pub factor: Option<usize>,
    pub acceleration: Option<usize>,
    pub dose: Option<f64>,
    pub flux: Option<f64>,
    pub electronic_std: Option<f64>,
    pub mu: Option<f64>,

    pub data_range: Option<f64>,
    pub infer_range: Option<bool>,
    pub bins: Option<usize>,

    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        let cfg: RunConfig = if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))?
        };
        Ok(cfg)
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn require<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("missing required parameter `{name}`")))
}

fn existing(path: Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    let p = require(path, name)?;
    if !p.exists() {
        return Err(CliError::usage(format!(
            "{name} path {} does not exist",
            p.display()
        )));
    }
    Ok(p)
}

fn frc_params(args: &FrcArgs, file: &RunConfig) -> CliResult<FrcParams> {
    let params = FrcParams {
        patch_size: pick(args.patch_size, file.patch_size).unwrap_or(64),
        frc_threshold: pick(args.frc_threshold, file.frc_threshold).unwrap_or(0.5),
        bin_width: pick(args.bin_width, file.bin_width),
        window: pick(args.window, file.window)
            .map(Window::from)
            .unwrap_or_default(),
    };
    config(params.validate())?;
    Ok(params)
}

/// One named image pair.
struct Slice {
    id: String,
    reference: Image,
    test: Image,
}

fn is_image_file(p: &Path) -> bool {
    matches!(
        p.extension().and_then(|e| e.to_str()),
        Some("sfrc") | Some("pgm")
    )
}

fn load_any(path: &Path, pixel_size: f64) -> crate::error::Result<Image> {
    if path.extension().is_some_and(|e| e == "pgm") {
        read_pgm(path, pixel_size)
    } else {
        read_image(path)
    }
}

fn image_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::data(format!("cannot list {}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image_file(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::data(format!("no images in {}", path.display())));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_stack(args: &StackArgs, file: &RunConfig) -> CliResult<Vec<Slice>> {
    let reference = existing(
        pick(args.reference.clone(), file.reference.clone()),
        "reference",
    )?;
    let test = existing(pick(args.test.clone(), file.test.clone()), "test")?;
    let pixel_size = pick(args.pixel_size, file.pixel_size).unwrap_or(1.0);
    let ref_files = image_files(&reference)?;
    let test_files = image_files(&test)?;
    if ref_files.len() != test_files.len() {
        return Err(CliError::data(format!(
            "reference has {} images but test has {}",
            ref_files.len(),
            test_files.len()
        )));
    }
    let single = ref_files.len() == 1;
    ref_files
        .iter()
        .zip(&test_files)
        .map(|(r, t)| {
            if !single && r.file_name() != t.file_name() {
                return Err(CliError::data(format!(
                    "unpaired images {} and {}",
                    r.display(),
                    t.display()
                )));
            }
            Ok(Slice {
                id: stem(r),
                reference: load_any(r, pixel_size)?,
                test: load_any(t, pixel_size)?,
            })
        })
        .collect()
}

fn pairs(slices: &[Slice]) -> Vec<SlicePair<'_>> {
    slices
        .iter()
        .map(|s| SlicePair::new(&s.id, &s.reference, &s.test))
        .collect()
}

fn output_dir(flag: Option<PathBuf>, file: &RunConfig) -> CliResult<PathBuf> {
    let dir = require(pick(flag, file.output.clone()), "output")?;
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::internal(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn resolve_x_ht(args: &XhtArgs, file: &RunConfig, pixel_size: f64) -> CliResult<f64> {
    let flags = [
        args.xht.is_some(),
        args.xht_fraction.is_some(),
        args.xht_physical.is_some(),
    ];
    if flags.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::usage(
            "give at most one of --xht, --xht-fraction, --xht-physical",
        ));
    }
    let from = |n: Option<f64>, f: Option<f64>, p: Option<f64>| {
        n.or(f.map(fraction_to_normalized))
            .or(p.map(|p| p * pixel_size))
    };
    let x = from(args.xht, args.xht_fraction, args.xht_physical)
        .or_else(|| from(file.x_ht, file.xht_fraction, file.xht_physical));
    let x = require(x, "x_ht (--xht, --xht-fraction or --xht-physical)")?;
    if !(0.0..=NYQUIST).contains(&x) {
        return Err(CliError::usage(format!(
            "hallucination threshold {x} is outside [0, 0.5] cycles/pixel"
        )));
    }
    Ok(x)
}

#[derive(Serialize)]
struct TuningFile<'a> {
    tool_version: &'a str,
    config: FrcParams,
    #[serde(flatten)]
    result: &'a TuningResult,
}

fn cmd_tune(args: TuneArgs, file: &RunConfig) -> CliResult<()> {
    let params = frc_params(&args.frc, file)?;
    let ann_path = existing(
        pick(args.annotations.clone(), file.annotations.clone()),
        "annotations",
    )?;
    let epsilon = pick(args.epsilon, file.epsilon).unwrap_or(DEFAULT_EPSILON);
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CliError::usage(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let out = output_dir(args.stack.output.clone(), file)?;
    let slices = load_stack(&args.stack, file)?;
    let annotations = read_annotations(&ann_path)?;
    let result = tune_x_ht(&pairs(&slices), &annotations, &params, epsilon)?;
    output(write_json(
        &out.join("tuning_report.json"),
        &TuningFile {
            tool_version: TOOL_VERSION,
            config: params,
            result: &result,
        },
    ))?;
    println!("{}", result.x_ht);
    Ok(())
}

#[derive(Serialize)]
struct SliceSummary {
    id: String,
    n_patches: usize,
    n_hallucinated: usize,
    hallucination_rate: f64,
}

#[derive(Serialize)]
struct ScanSummary {
    tool_version: &'static str,
    config: SfrcConfig,
    n_slices: usize,
    n_patches: usize,
    n_hallucinated: usize,
    hallucination_rate: f64,
    slices: Vec<SliceSummary>,
}

fn cmd_scan(args: ScanArgs, file: &RunConfig) -> CliResult<()> {
    let params = frc_params(&args.frc, file)?;
    let out = output_dir(args.stack.output.clone(), file)?;
    let slices = load_stack(&args.stack, file)?;
    let pixel_size = slices[0].reference.pixel_size();
    let cfg = SfrcConfig {
        frc: params,
        x_ht: resolve_x_ht(&args.xht, file, pixel_size)?,
        strict_comparison: if args.xht.inclusive {
            false
        } else {
            file.strict_comparison.unwrap_or(true)
        },
    };
    config(cfg.validate())?;
    let center = pick(args.window_center, file.window_center);
    let width = pick(args.window_width, file.window_width);
    let fixed_window = match (center, width) {
        (Some(c), Some(w)) => Some(config(DisplayWindow::new(c, w))?),
        (None, None) => None,
        _ => {
            return Err(CliError::usage(
                "give both --window-center and --window-width, or neither",
            ))
        }
    };

    let mut summaries = Vec::with_capacity(slices.len());
    for s in &slices {
        let report = scan(&s.reference, &s.test, &cfg)?;
        let window = fixed_window.unwrap_or_else(|| DisplayWindow::auto(&s.test));
        output(write_overlay(
            &out.join(format!("{}.overlay.png", s.id)),
            &s.test,
            &report,
            window,
        ))?;
        summaries.push(SliceSummary {
            id: s.id.clone(),
            n_patches: report.n_patches,
            n_hallucinated: report.n_hallucinated,
            hallucination_rate: report.hallucination_rate,
        });
        output(write_report(
            &out.join(format!("{}.report.json", s.id)),
            &ReportFile::new(&s.id, cfg, report),
        ))?;
    }
    let n_patches: usize = summaries.iter().map(|s| s.n_patches).sum();
    let n_hallucinated: usize = summaries.iter().map(|s| s.n_hallucinated).sum();
    let summary = ScanSummary {
        tool_version: TOOL_VERSION,
        config: cfg,
        n_slices: summaries.len(),
        n_patches,
        n_hallucinated,
        hallucination_rate: crate::scanner::rate(n_hallucinated, n_patches),
        slices: summaries,
    };
    output(write_json(&out.join("summary.json"), &summary))?;
    println!(
        "scanned {} slices: {} of {} patches hallucinated (rate {})",
        summary.n_slices, n_hallucinated, n_patches, summary.hallucination_rate
    );
    Ok(())
}

#[derive(Serialize)]
struct HocFile<'a> {
    tool_version: &'a str,
    config: FrcParams,
    thresholds: &'a [f64],
    rates: &'a [f64],
    au_hoc: f64,
}

fn cmd_hoc(args: HocArgs, file: &RunConfig) -> CliResult<()> {
    let params = frc_params(&args.frc, file)?;
    let lo = pick(args.xht_min_fraction, file.xht_min_fraction).unwrap_or(0.0);
    let hi = pick(args.xht_max_fraction, file.xht_max_fraction).unwrap_or(1.0);
    let steps = pick(args.steps, file.steps).unwrap_or(50);
    if !(lo >= 0.0 && lo < hi && hi <= 1.0) {
        return Err(CliError::usage(format!(
            "invalid x_ht range [{lo}, {hi}]: need 0 <= min < max <= 1 (Nyquist fractions)"
        )));
    }
    if steps < 2 {
        return Err(CliError::usage("need at least 2 steps"));
    }
    let out = output_dir(args.stack.output.clone(), file)?;
    let slices = load_stack(&args.stack, file)?;
    let hoc = hoc_curve(
        &pairs(&slices),
        &params,
        fraction_to_normalized(lo),
        fraction_to_normalized(hi),
        steps,
    )?;
    output(write_hoc_curve(&out.join("hoc.csv"), &hoc))?;
    output(write_json(
        &out.join("hoc.json"),
        &HocFile {
            tool_version: TOOL_VERSION,
            config: params,
            thresholds: &hoc.thresholds,
            rates: &hoc.rates,
            au_hoc: hoc.au_hoc,
        },
    ))?;
    println!("AU-HOC {}", hoc.au_hoc);
    Ok(())
}

fn parse_angles(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "angles must be start:stop:step, got {text:?}"
        )));
    }
    let mut nums = [0.0; 3];
    for (n, p) in nums.iter_mut().zip(&parts) {
        *n = p
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad angle value {p:?}")))?;
    }
    config(angle_range(nums[0], nums[1], nums[2]))
}

#[derive(Serialize)]
struct SimulationMeta {
    tool_version: &'static str,
    kind: SimKind,
    source: String,
    seed: u64,
    angles: Option<String>,
    back_angles: Option<String>,
    factor: Option<usize>,
    acceleration: Option<usize>,
    dose: Option<f64>,
    flux: Option<f64>,
    electronic_std: Option<f64>,
    mu: Option<f64>,
}

fn cmd_simulate(args: SimulateArgs, file: &RunConfig, seed: u64) -> CliResult<()> {
    let kind = require(pick(args.kind, file.kind), "kind")?;
    let out = output_dir(args.output.clone(), file)?;
    let (source, masked_source) = match pick(args.input.clone(), file.input.clone()) {
        Some(p) => {
            let p = existing(Some(p), "input")?;
            let img = read_image(&p)?;
            (img, format!("file:{}", p.display()))
        }
        None => {
            let kind_name = pick(args.phantom.clone(), file.phantom.clone())
                .unwrap_or_else(|| "texture".into());
            let phantom_kind: PhantomKind = config(kind_name.parse())?;
            let size = pick(args.size, file.size).unwrap_or(256);
            let phantom = config(make_phantom(phantom_kind, size, seed))?;
            output(write_phantom(&out.join("phantom.sfrc"), &phantom))?;
            (phantom.image, format!("phantom:{phantom_kind}:{size}"))
        }
    };
    let mut meta = SimulationMeta {
        tool_version: TOOL_VERSION,
        kind,
        source: masked_source,
        seed,
        angles: None,
        back_angles: None,
        factor: None,
        acceleration: None,
        dose: None,
        flux: None,
        electronic_std: None,
        mu: None,
    };
    let name = match kind {
        SimKind::Downsample => "downsample",
        SimKind::Kspace => "kspace",
        SimKind::Full => "full",
        SimKind::MissingWedge => "missing_wedge",
        SimKind::Distortion => "distortion",
        SimKind::Noise => "noise",
    };

    let (reference, degraded) = match kind {
        SimKind::Downsample => {
            let factor = pick(args.factor, file.factor).unwrap_or(4);
            meta.factor = Some(factor);
            (source.clone(), downsample_upsample(&source, factor)?)
        }
        SimKind::Kspace => {
            let a = pick(args.acceleration, file.acceleration).unwrap_or(2);
            meta.acceleration = Some(a);
            (source.clone(), kspace_undersample(&source, a)?)
        }
        SimKind::Full | SimKind::MissingWedge | SimKind::Distortion | SimKind::Noise => {
            if source.width() != source.height() {
                return Err(CliError::data(
                    "tomographic simulation needs a square image",
                ));
            }
            let size = source.width();
            let reference = inscribed_disk_mask(&source)?;
            let default_angles = match kind {
                SimKind::MissingWedge => "30:150:2",
                SimKind::Full => "0:180:1",
                _ => "0:360:0.5",
            };
            let angles_text = pick(args.angles.clone(), file.angles.clone())
                .unwrap_or_else(|| default_angles.into());
            let angles = parse_angles(&angles_text)?;
            meta.angles = Some(angles_text);
            let mu = pick(args.mu, file.mu).unwrap_or(1.0);
            if !(mu.is_finite() && mu > 0.0) {
                return Err(CliError::usage(format!("mu must be positive, got {mu}")));
            }
            let scaled = reference.map(|v| v * mu)?;
            let mut sino = radon(&scaled, &angles, size)?;
            if kind == SimKind::Distortion {
                let back_text = pick(args.back_angles.clone(), file.back_angles.clone())
                    .unwrap_or_else(|| format!("0:350:{}", 350.0 / angles.len() as f64));
                let back = parse_angles(&back_text)?;
                if back.len() != angles.len() {
                    return Err(CliError::usage(format!(
                        "back-projection angles ({}) must match forward angles ({})",
                        back.len(),
                        angles.len()
                    )));
                }
                meta.back_angles = Some(back_text);
                output(write_sinogram(
                    &out.join(format!("{name}.sino.sfrc")),
                    &sino,
                ))?;
                sino = sino.with_angles(back)?;
            } else if kind == SimKind::Noise {
                let model = NoiseModel {
                    flux: pick(args.flux, file.flux).unwrap_or(1.35e5),
                    dose_fraction: pick(args.dose, file.dose).unwrap_or(0.05),
                    electronic_std: pick(args.electronic_std, file.electronic_std).unwrap_or(0.0),
                };
                meta.mu = Some(mu);
                meta.dose = Some(model.dose_fraction);
                meta.flux = Some(model.flux);
                meta.electronic_std = Some(model.electronic_std);
                sino = add_noise_with(&sino, &model, seed)
                    .map_err(|e| CliError::usage(e.to_string()))?;
                output(write_sinogram(
                    &out.join(format!("{name}.sino.sfrc")),
                    &sino,
                ))?;
            } else {
                output(write_sinogram(
                    &out.join(format!("{name}.sino.sfrc")),
                    &sino,
                ))?;
            }
            let recon = fbp(&sino, size)?.map(|v| v / mu)?;
            (reference, recon)
        }
    };
    output(write_image(&out.join("reference.sfrc"), &reference))?;
    output(write_image(&out.join(format!("{name}.sfrc")), &degraded))?;
    output(write_json(&out.join(format!("{name}.json")), &meta))?;
    println!(
        "simulated {name}: {}x{}",
        degraded.width(),
        degraded.height()
    );
    Ok(())
}

fn parse_bands(text: &str) -> CliResult<Vec<BandSpec>> {
    text.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| CliError::usage(format!("band {part:?} is not low:high")))?;
            let lo: f64 = lo
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad band edge {lo:?}")))?;
            let hi: f64 = hi
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad band edge {hi:?}")))?;
            config(BandSpec::from_fractions(lo, hi))
        })
        .collect()
}

fn cmd_decompose(args: DecomposeArgs, file: &RunConfig) -> CliResult<()> {
    let input = existing(pick(args.input.clone(), file.input.clone()), "input")?;
    let bands = match (&args.bands, &file.bands) {
        (Some(text), _) => parse_bands(text)?,
        (None, Some(list)) => list
            .iter()
            .map(|[lo, hi]| config(BandSpec::from_fractions(*lo, *hi)))
            .collect::<CliResult<_>>()?,
        (None, None) => standard_bands(),
    };
    if bands.is_empty() {
        return Err(CliError::usage("band list is empty"));
    }
    let out = output_dir(args.output.clone(), file)?;
    let pixel_size = pick(args.pixel_size, file.pixel_size).unwrap_or(1.0);
    let img = load_any(&input, pixel_size)?;
    let parts = decompose(&img, &bands)?;
    let name = stem(&input);
    for (i, part) in parts.iter().enumerate() {
        output(write_image(&out.join(format!("{name}.band{i}.sfrc")), part))?;
    }
    output(write_json(&out.join(format!("{name}.bands.json")), &bands))?;
    println!("decomposed {name} into {} bands", parts.len());
    Ok(())
}

#[derive(Serialize)]
struct MetricRow {
    id: String,
    data_range: f64,
    #[serde(serialize_with = "ser_db")]
    psnr: f64,
    ssim: f64,
    hellinger: f64,
}

fn ser_db<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn cmd_metrics(args: MetricsArgs, file: &RunConfig) -> CliResult<()> {
    let infer = args.infer_range || file.infer_range.unwrap_or(false);
    let fixed = pick(args.data_range, file.data_range);
    if fixed.is_some() == infer {
        return Err(CliError::usage(
            "give exactly one of --data-range or --infer-range",
        ));
    }
    let bins = pick(args.bins, file.bins).unwrap_or(DEFAULT_BINS);
    let out = output_dir(args.stack.output.clone(), file)?;
    let slices = load_stack(&args.stack, file)?;
    let mut rows = Vec::with_capacity(slices.len());
    for s in &slices {
        let range = match fixed {
            Some(r) => r,
            None => infer_data_range(&s.reference, &s.test),
        };
        let row = MetricRow {
            id: s.id.clone(),
            data_range: range,
            psnr: psnr(&s.reference, &s.test, range)?,
            ssim: ssim(&s.reference, &s.test, range)?,
            hellinger: hellinger(&s.reference, &s.test, bins)?,
        };
        println!(
            "{}: psnr {} ssim {} hellinger {}",
            row.id,
            fmt_db(row.psnr),
            row.ssim,
            row.hellinger
        );
        rows.push(row);
    }
    output(write_json(&out.join("metrics.json"), &rows))?;
    Ok(())
}

fn dispatch(cli: Cli, file: RunConfig) -> CliResult<()> {
    let seed = pick(cli.seed, file.seed).unwrap_or(0);
    match cli.command {
        Command::Tune(a) => cmd_tune(a, &file),
        Command::Scan(a) => cmd_scan(a, &file),
        Command::Hoc(a) => cmd_hoc(a, &file),
        Command::Simulate(a) => cmd_simulate(a, &file, seed),
        Command::Decompose(a) => cmd_decompose(a, &file),
        Command::Metrics(a) => cmd_metrics(a, &file),
    }
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let file = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}", e.message);
                return e.code;
            }
        },
        None => RunConfig::default(),
    };
    let threads = pick(cli.threads, file.threads);
    let result = match threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli, file)),
            Err(e) => Err(CliError::internal(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli, file),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
