use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lightstage::{ProjectionMode, ToneOperator};

#[derive(Debug, Parser)]
#[command(name = "lightstage", version, about = "OLAT light-stage relighting pipeline")]
pub struct Cli {
    /// JSON configuration supplying defaults for unset flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Suppress the run report on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Also write the run report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a Fibonacci-sphere rig file.
    GenRig(GenRigArgs),
    /// Project an environment map onto a rig to obtain per-light weights.
    Project(ProjectArgs),
    /// Composite an OLAT stack with a weight file.
    Relight(RelightArgs),
    /// Render a pinhole view of an environment map.
    RenderBg(RenderBgArgs),
    /// Render a synthetic sphere OLAT stack and optional ground truth.
    Oracle(OracleArgs),
    /// Compare a prediction against ground truth.
    Eval(EvalArgs),
    /// Fit the linear bridge field on the affine toy problem.
    BridgeDemo(BridgeDemoArgs),
    /// Relight under a yaw sweep two ways and report their agreement.
    RotateSweep(RotateSweepArgs),
    /// Dataset manifest tools.
    #[command(subcommand)]
    Manifest(ManifestCommand),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenRig(_) => "gen-rig",
            Command::Project(_) => "project",
            Command::Relight(_) => "relight",
            Command::RenderBg(_) => "render-bg",
            Command::Oracle(_) => "oracle",
            Command::Eval(_) => "eval",
            Command::BridgeDemo(_) => "bridge-demo",
            Command::RotateSweep(_) => "rotate-sweep",
            Command::Manifest(ManifestCommand::Validate(_)) => "manifest validate",
            Command::Manifest(ManifestCommand::Fmt(_)) => "manifest fmt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cone,
    Point,
}

impl From<ModeArg> for ProjectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cone => ProjectionMode::Cone,
            ModeArg::Point => ProjectionMode::Point,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ToneArg {
    Reinhard,
    Clamp,
}

impl From<ToneArg> for ToneOperator {
    fn from(t: ToneArg) -> Self {
        match t {
            ToneArg::Reinhard => ToneOperator::Reinhard,
            ToneArg::Clamp => ToneOperator::Clamp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    /// Match the environment energy independently per channel.
    Channel,
    /// One luminance-matched scale for all channels.
    Scalar,
    /// Keep the raw projected weights.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MaterialArg {
    Lambert,
    BlinnPhong,
}

#[derive(Debug, Args)]
pub struct GenRigArgs {
    #[arg(long, default_value_t = 156)]
    pub count: usize,
    /// Cone half-angle in degrees.
    #[arg(long, default_value_t = 15.0)]
    pub cone_deg: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Radiance .hdr environment (2:1 equirectangular).
    #[arg(long)]
    pub env: Option<PathBuf>,
    #[arg(long)]
    pub rig: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = NormalizeArg::Channel)]
    pub normalize: NormalizeArg,
    /// Box-filter the environment by this factor first.
    #[arg(long, default_value_t = 1)]
    pub downsample: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ToneArgs {
    #[arg(long)]
    pub exposure: Option<f64>,
    #[arg(long, value_enum)]
    pub tonemap: Option<ToneArg>,
}

#[derive(Debug, Args)]
pub struct RelightArgs {
    /// Stack directory (`stack/NNN.png`, `alpha.png`, optional `uniform.png`).
    #[arg(long)]
    pub stack: Option<PathBuf>,
    /// Rig file; defaults to `<stack>/rig.json`.
    #[arg(long)]
    pub rig: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub alpha_blend: Option<f64>,
    #[command(flatten)]
    pub tone: ToneArgs,
    /// Display-referred PNG to composite behind the subject using the stack matte.
    #[arg(long)]
    pub background: Option<PathBuf>,
    /// `.hdr` writes the linear composite; anything else a tone-mapped 16-bit PNG.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderBgArgs {
    #[arg(long)]
    pub env: Option<PathBuf>,
    #[arg(long, default_value_t = 35.0)]
    pub focal_mm: f64,
    #[arg(long, default_value_t = 36.0)]
    pub sensor_mm: f64,
    #[arg(long, default_value_t = 1024)]
    pub width: usize,
    #[arg(long, default_value_t = 768)]
    pub height: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub yaw_deg: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub pitch_deg: f64,
    #[command(flatten)]
    pub tone: ToneArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Rig file; a 156-light, 15° rig is generated when absent.
    #[arg(long)]
    pub rig: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
    /// Sphere radius in view units; the frame spans [-1, 1].
    #[arg(long, default_value_t = 0.9)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = MaterialArg::Lambert)]
    pub material: MaterialArg,
    /// Diffuse albedo as `r,g,b`.
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 0.8, 0.8])]
    pub albedo: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub ks: f64,
    #[arg(long, default_value_t = 32.0)]
    pub shininess: f64,
    /// Steradians per unit OLAT exposure: `rig-mean` or a positive number.
    #[arg(long, default_value = "rig-mean")]
    pub solid_angle_unit: String,
    /// Environment for the brute-force ground truth render.
    #[arg(long)]
    pub env: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "psnr,ssim,energy,relrmse")]
    pub metrics: Vec<String>,
    /// Restrict all metrics to this matte (16-bit gray PNG).
    #[arg(long, value_name = "MATTE")]
    pub masked: Option<PathBuf>,
    /// Tone mapping used to derive display images from `.hdr` inputs.
    #[command(flatten)]
    pub tone: ToneArgs,
}

#[derive(Debug, Args)]
pub struct BridgeDemoArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    #[arg(long, default_value_t = 20)]
    pub conditions: usize,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Interpolation times t = k/steps, k = 0..steps.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct RotateSweepArgs {
    #[arg(long)]
    pub stack: Option<PathBuf>,
    /// Rig file; defaults to `<stack>/rig.json`.
    #[arg(long)]
    pub rig: Option<PathBuf>,
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Evenly spaced yaws k·360°/steps.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Explicit yaw list in degrees; overrides `--steps`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub yaws_deg: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub alpha_blend: Option<f64>,
    #[command(flatten)]
    pub tone: ToneArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ManifestCommand {
    /// Parse and check a manifest, optionally against a rig file.
    Validate(ManifestValidateArgs),
    /// Rewrite a manifest in canonical form.
    Fmt(ManifestFmtArgs),
}

#[derive(Debug, Args)]
pub struct ManifestValidateArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub rig: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ManifestFmtArgs {
    pub path: PathBuf,
    /// Destination; rewrites in place when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
