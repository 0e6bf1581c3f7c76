//! `qt` — batch driver for the (q,t) hypergeometric ensemble library.
//!
//! Every run prints a JSON report (command echo, resolved parameters,
//! per-case results with achieved error bounds, wall time) to stdout or
//! `--out`. Sequence-valued reports can be emitted as plot-ready CSV with
//! `--format csv`.
//!
//! Exit codes: 0 success, 2 tolerance failure, 3 truncation-budget failure,
//! 4 configuration error.

mod report;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Numeric parameters written as fractions ("1/2") parse as exact
/// rationals; decimal literals parse as floats at QT_PRECISION_BITS.
#[derive(Parser)]
#[command(name = "qt", version, about = "(q,t) hypergeometric ensembles: polynomials, measures, degenerations")]
pub struct Cli {
    /// Cap worker parallelism (default: hardware parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Output format; csv is available for sequence-valued reports
    #[arg(long, global = true, default_value = "json")]
    pub format: Format,

    /// Truncation budget for infinite products and lattice sums
    #[arg(long, global = true)]
    pub tail_bound: Option<f64>,

    /// Comparison tolerance for float-mode identities
    #[arg(long, global = true)]
    pub match_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Construct polynomials (Macdonald, interpolation, big q-Jacobi, Schur)
    Poly(PolyArgs),
    /// Expansion coefficients: sigma, rho, pi, binomial
    Coeff(CoeffArgs),
    /// Lattice-measure operations
    #[command(subcommand)]
    Ensemble(EnsembleCmd),
    /// Verification sweeps with pass/fail exit status
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Beta-ensemble degenerations (§ discrete links, kernels, q→1 limits)
    #[command(subcommand)]
    Degenerate(DegenerateCmd),
    /// Shorthand for `ensemble sample`
    Sample(SampleArgs),
    /// Shorthand for `ensemble probe`
    Probe(ProbeArgs),
}

#[derive(Args)]
pub struct PolyArgs {
    /// Which family to construct
    #[arg(value_enum)]
    pub family: PolyFamily,
    /// Partition, comma-separated (e.g. 2,1); empty for the empty partition
    #[arg(long, default_value = "")]
    pub nu: String,
    #[arg(long, short = 'N')]
    pub n: usize,
    #[arg(long, default_value = "1/2")]
    pub q: String,
    #[arg(long, default_value = "1/3")]
    pub t: String,
    /// Quadruple JSON file (required for bigqjacobi)
    #[arg(long)]
    pub quad: Option<std::path::PathBuf>,
    /// Also run the independent oracle and report agreement
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolyFamily {
    Macdonald,
    Interpolation,
    Bigqjacobi,
    Schur,
}

#[derive(Args)]
pub struct CoeffArgs {
    #[arg(value_enum)]
    pub kind: CoeffKind,
    /// Outer partition λ (or μ for sigma), comma-separated
    #[arg(long)]
    pub lambda: String,
    /// Inner partition; when omitted, the whole table over ν ⊆ λ is emitted
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub q: String,
    #[arg(long, default_value = "1/3")]
    pub t: String,
    /// BC-parameter s (binomial only)
    #[arg(long)]
    pub s: Option<String>,
    /// Quadruple JSON file (rho and pi)
    #[arg(long)]
    pub quad: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CoeffKind {
    Sigma,
    Rho,
    Pi,
    Binomial,
}

#[derive(Subcommand)]
pub enum EnsembleCmd {
    /// Single-particle weight table over the realized window
    Weights(EnsembleArgs),
    /// Partition function with tail report
    Partition(EnsembleArgs),
    /// Orthogonality sweep of the big q-Jacobi polynomials under 𝕄_N
    Orthogonality(OrthArgs),
    /// Exact inverse-CDF sampling
    Sample(SampleArgs),
    /// Large-N convergence probe (TV distances of a statistic)
    Probe(ProbeArgs),
}

#[derive(Args, Clone)]
pub struct EnsembleArgs {
    #[arg(long, default_value = "1/2")]
    pub q: String,
    /// τ = log_q t
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub zeta_plus: f64,
    #[arg(long, default_value_t = -1.0)]
    pub zeta_minus: f64,
    /// Quadruple JSON file
    #[arg(long)]
    pub quad: std::path::PathBuf,
    #[arg(long, short = 'N')]
    pub n: usize,
    /// Extra window margin in lattice steps
    #[arg(long, default_value_t = 0)]
    pub window: i64,
}

#[derive(Args)]
pub struct OrthArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value = "1/3")]
    pub t: String,
    #[arg(long, default_value_t = 3)]
    pub degree_cap: u32,
}

#[derive(Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
}

#[derive(Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Range of particle numbers, e.g. 2..8
    #[arg(long, default_value = "2..6")]
    pub n_range: String,
    #[arg(long, value_enum, default_value = "largest")]
    pub statistic: ProbeStat,
    /// Cutoff for the outside-epsilon statistic
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProbeStat {
    Largest,
    Outside,
}

#[derive(Subcommand)]
pub enum VerifyCmd {
    /// Expansion stability: triangular solve at N and N+1 vs pi, exact
    Stability(StabilityArgs),
    /// Big q-Jacobi orthogonality under 𝕄_N
    Orthogonality(OrthArgs),
    /// One-particle normalization: closed form vs direct summation
    Z1(Z1Args),
    /// pi-symmetry under α↔β and γ↔δ
    Symmetry(StabilityArgs),
}

#[derive(Args)]
pub struct StabilityArgs {
    #[arg(long, default_value_t = 4)]
    pub max_size: u32,
    #[arg(long, default_value = "1/2")]
    pub q: String,
    #[arg(long, default_value = "1/3")]
    pub t: String,
    #[arg(long)]
    pub quad: std::path::PathBuf,
}

#[derive(Args)]
pub struct Z1Args {
    /// JSON file with {"q":…,"a":…,"b":…,"c":…,"d":…,"zeta_plus":…,"zeta_minus":…,"tau":…}
    #[arg(long)]
    pub params: std::path::PathBuf,
}

#[derive(Subcommand)]
pub enum DegenerateCmd {
    /// Coherency P_N L = P_{N-1} of the discrete beta ensembles
    DiscreteCoherency(DiscreteCoherencyArgs),
    /// Row sums of the stochastic link at a given signature
    LinkRows(LinkRowsArgs),
    /// Total integral of the Dixon–Anderson kernel
    DaKernel(DaKernelArgs),
    /// Prop 7.A-style q→1 limit to the discrete beta ensemble
    LimitDiscrete(LimitDiscreteArgs),
    /// Prop 7.B-style q→1 limit to the s-measure
    LimitContinuous(LimitContinuousArgs),
}

#[derive(Args)]
pub struct DiscreteCoherencyArgs {
    /// JSON file with {"tau":…,"z":[re,im],"w":[re,im]}
    #[arg(long)]
    pub params: std::path::PathBuf,
    #[arg(long, short = 'N')]
    pub n: usize,
    #[arg(long, default_value_t = 40)]
    pub window: i64,
    /// Residual the run must beat to exit 0
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
}

#[derive(Args)]
pub struct LinkRowsArgs {
    #[arg(long)]
    pub tau: f64,
    /// Signature ν, comma-separated
    #[arg(long)]
    pub nu: String,
}

#[derive(Args)]
pub struct DaKernelArgs {
    #[arg(long)]
    pub tau: f64,
    /// Outer points u, comma-separated decreasing
    #[arg(long)]
    pub u: String,
    #[arg(long, default_value_t = 48)]
    pub nodes: usize,
}

#[derive(Args)]
pub struct LimitDiscreteArgs {
    #[arg(long)]
    pub params: std::path::PathBuf,
    #[arg(long)]
    pub nu: String,
    #[arg(long, short = 'N')]
    pub n: usize,
    /// q sequence, comma-separated
    #[arg(long, default_value = "0.9,0.99,0.995")]
    pub qs: String,
    #[arg(long, default_value_t = 40)]
    pub window: i64,
}

#[derive(Args)]
pub struct LimitContinuousArgs {
    /// JSON file with {"s":[re,im],"tau":…}
    #[arg(long)]
    pub params: std::path::PathBuf,
    #[arg(long, default_value = "0.9,0.99,0.995")]
    pub qs: String,
    /// CDF comparison grid, comma-separated
    #[arg(long, default_value = "-3,-2,-1,-0.5,0,0.5,1,2,3")]
    pub grid: String,
    #[arg(long, default_value_t = 160)]
    pub nodes: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        qt_core::parallel::set_thread_cap(threads);
    }
    match run::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(run::exit_code_for(&e))
        }
    }
}
