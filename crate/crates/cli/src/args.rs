use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critline_core::quadrature::QuadratureSpec;
use critline_core::selberg::{SelbergParams, DEFAULT_DELTA};
use critline_core::zeros::ScanSpec;
use critline_core::zeta_engine::Method;
use critline_core::Result;

/// Environment variable naming the default zero-cache directory.
pub const CACHE_DIR_ENV: &str = "CRITLINE_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "critline",
    version,
    about = "Numerical experiments on the critical line of the Riemann zeta function",
    args_override_self = true
)]
pub struct Cli {
    /// Output format for result tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,

    /// Directory holding the zero cache.
    #[arg(long, global = true, env = CACHE_DIR_ENV, default_value = ".critline")]
    pub cache_dir: PathBuf,

    /// Line-oriented `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Fail with a coverage error instead of extending the zero cache.
    #[arg(long, global = true)]
    pub no_scan: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Oracle,
    Fast,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Oracle => Method::ReferenceOracle,
            MethodArg::Fast => Method::FastCriticalLine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffArg {
    Logp,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityKind {
    Stieltjes,
    Ibp,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate zeta at a point or along a horizontal segment.
    ZetaEval(ZetaEvalArgs),
    /// Scan for zeros of Z(t) and store them in the cache.
    ZerosScan(ZerosScanArgs),
    /// Import a table of ordinates into the cache.
    ZerosIngest(ZerosIngestArgs),
    /// Compare the scanned count with ϑ(T)/π + 1 + S(T).
    NtCheck(NtCheckArgs),
    /// Profiles of S(t) and R(t).
    Sfunc(SfuncArgs),
    /// Measure of {t : |R(t)| ≥ V} against its moment certificate.
    Exceedance(ExceedanceArgs),
    /// The sum F(T, H) over zeros in (T, T+H].
    Fsum(FsumArgs),
    /// Shifted sum of |ζ|² over zeros against its main term.
    Gonek(GonekArgs),
    /// ∫|ζ|² S^k over [T, T+H].
    Wint(WintArgs),
    /// Second and fourth moments of ζ on the critical line.
    Moments(MomentsArgs),
    /// Least-squares fit of the fourth moment by a quartic in log T.
    P4fit(P4fitArgs),
    /// Weighted mean value of |ζ A|² against its main term.
    Mvt(MvtArgs),
    /// Residuals of the Stieltjes and integration-by-parts identities.
    Identity(IdentityArgs),
    /// Run the acceptance suite.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    /// Start of the interval.
    #[arg(long = "T")]
    pub height: f64,
    /// Length of the interval.
    #[arg(long = "H")]
    pub length: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SelbergArgs {
    /// Prime cutoff exponent, y = T^delta.
    #[arg(long, conflicts_with = "cutoff")]
    pub delta: Option<f64>,
    /// Absolute prime cutoff.
    #[arg(long = "y", id = "cutoff")]
    pub cutoff: Option<f64>,
}

impl SelbergArgs {
    pub fn params(&self, t_ref: f64) -> Result<SelbergParams> {
        match self.cutoff {
            Some(y) => SelbergParams::y_absolute(y, t_ref),
            None => SelbergParams::from_delta(self.delta.unwrap_or(DEFAULT_DELTA), t_ref),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Quadrature panels per mean zero gap.
    #[arg(long, default_value_t = 4.0)]
    pub quad_panels: f64,
    /// Maximum panel halvings.
    #[arg(long, default_value_t = 6)]
    pub quad_refine: u32,
    /// Gauss–Legendre order per panel.
    #[arg(long, default_value_t = 8)]
    pub quad_order: usize,
    /// Accepted relative change between refinement levels.
    #[arg(long, default_value_t = 1e-3)]
    pub quad_rtol: f64,
}

impl QuadArgs {
    pub fn spec(&self) -> Result<QuadratureSpec> {
        let spec = QuadratureSpec {
            base_step_factor: self.quad_panels,
            refinement_limit: self.quad_refine,
            order: self.quad_order,
            rel_change_tol: self.quad_rtol,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Final bracket width for each ordinate.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Grid step as a multiple of the mean zero spacing.
    #[arg(long, default_value_t = 0.2)]
    pub grid_factor: f64,
    /// Grid halvings allowed when the count audit fails.
    #[arg(long, default_value_t = 4)]
    pub max_rescans: u32,
}

impl ScanArgs {
    pub fn spec(&self) -> ScanSpec {
        ScanSpec {
            grid_factor: self.grid_factor,
            tol: self.tol,
            max_rescans: self.max_rescans,
            ..ScanSpec::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ZetaEvalArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Imaginary part, or the start of a profile.
    #[arg(long = "t", allow_negative_numbers = true)]
    pub height: f64,
    /// End of a profile; requires --points >= 2.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub points: usize,
    /// Absolute accuracy target.
    #[arg(long, default_value_t = 1e-10)]
    pub target: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Args)]
pub struct ZerosScanArgs {
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Cache file to write; defaults to the cache directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit one row per zero instead of a summary row.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ZerosIngestArgs {
    /// One ordinate per line, optionally followed by a tolerance.
    #[arg(long)]
    pub input: PathBuf,
    /// Cache file to write; defaults to the cache directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NtCheckArgs {
    /// Heights to audit, comma separated.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub heights: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SfuncArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Add S(t) from the argument path as a cross-check column.
    #[arg(long)]
    pub path: bool,
    #[command(flatten)]
    pub selberg: SelbergArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExceedanceArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Absolute levels V, comma separated.
    #[arg(long = "V", value_delimiter = ',', conflicts_with = "multiples")]
    pub levels: Vec<f64>,
    /// Levels as multiples of log log T, comma separated.
    #[arg(long = "c", id = "multiples", value_delimiter = ',')]
    pub multiples: Vec<f64>,
    /// Moment orders m (the moment is of R^{2m}), comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "1")]
    pub orders: Vec<u32>,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
    #[command(flatten)]
    pub selberg: SelbergArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FsumArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GonekArgs {
    #[arg(long = "T")]
    pub height: f64,
    /// Shifts as fractions c of L, so the ordinates move by c.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5")]
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WintArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Powers of S, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_value = "1,2")]
    pub powers: Vec<u32>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Upper limits, comma separated; each row integrates from --from.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub upper: Vec<f64>,
    /// Also integrate |ζ'|⁴.
    #[arg(long)]
    pub deriv: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct P4fitArgs {
    #[arg(long, default_value_t = 500.0)]
    pub from: f64,
    #[arg(long, default_value_t = 10_000.0)]
    pub to: f64,
    /// Number of log-spaced sample heights.
    #[arg(long, default_value_t = 12)]
    pub samples: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MvtArgs {
    #[arg(long = "T")]
    pub height: f64,
    /// Compare the difference over [T, T+H] instead of [0, T].
    #[arg(long = "H")]
    pub length: Option<f64>,
    /// Coefficient file with lines `m re im`.
    #[arg(long, conflicts_with = "primes_up_to")]
    pub poly: Option<PathBuf>,
    /// Support the coefficients on primes up to this bound.
    #[arg(long)]
    pub primes_up_to: Option<f64>,
    #[arg(long, value_enum, default_value_t = CoeffArg::Logp)]
    pub coeff: CoeffArg,
    /// Report only the main-term breakdown.
    #[arg(long)]
    pub main_only: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[arg(long, value_enum, default_value_t = IdentityKind::All)]
    pub which: IdentityKind,
    #[command(flatten)]
    pub selberg: SelbergArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Criteria to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}
