//! `dcopt` — dense-coding capacities and relative entropy of entanglement
//! from the command line.
//!
//! Machine-readable output (JSON, CSV) goes to stdout; diagnostics go to
//! stderr. Exit codes: 0 success, 1 verification violation, 2 bad
//! usage/input file/grid, 3 state-invariant violation in the input.

mod commands;
mod io;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcopt_core::states::{BellKind, StateKind, StateSpec};
use dcopt_core::Tolerances;

#[derive(Debug)]
pub enum ExitKind {
    /// Verification failure (exit 1).
    Violation(String),
    /// Bad usage, unreadable/unparseable input, malformed grid (exit 2).
    Usage(String),
    /// Input parsed but violates the density matrix invariants (exit 3).
    InvalidState(String),
    /// Internal failure (exit 4).
    Internal(String),
}

impl ExitKind {
    fn code(&self) -> u8 {
        match self {
            ExitKind::Violation(_) => 1,
            ExitKind::Usage(_) => 2,
            ExitKind::InvalidState(_) => 3,
            ExitKind::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            ExitKind::Violation(m)
            | ExitKind::Usage(m)
            | ExitKind::InvalidState(m)
            | ExitKind::Internal(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum KindArg {
    Bell,
    MaxEntangled,
    Werner,
    Isotropic,
    BellDiagonal,
    RandomMixed,
    RandomPure,
    RandomProduct,
    RandomSeparable,
}

impl From<KindArg> for StateKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bell => StateKind::Bell,
            KindArg::MaxEntangled => StateKind::MaxEntangled,
            KindArg::Werner => StateKind::Werner,
            KindArg::Isotropic => StateKind::Isotropic,
            KindArg::BellDiagonal => StateKind::BellDiagonal,
            KindArg::RandomMixed => StateKind::RandomMixed,
            KindArg::RandomPure => StateKind::RandomPure,
            KindArg::RandomProduct => StateKind::RandomProduct,
            KindArg::RandomSeparable => StateKind::RandomSeparable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum BellArg {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl From<BellArg> for BellKind {
    fn from(b: BellArg) -> Self {
        match b {
            BellArg::PsiMinus => BellKind::PsiMinus,
            BellArg::PsiPlus => BellKind::PsiPlus,
            BellArg::PhiMinus => BellKind::PhiMinus,
            BellArg::PhiPlus => BellKind::PhiPlus,
        }
    }
}

/// Where the input state comes from: a named family or a JSON file.
#[derive(Debug, Args)]
pub struct StateArgs {
    /// Named state family to build.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Factor dimension; states live on C^d (x) C^d.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Seed for random state kinds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overlap fraction for werner / isotropic.
    #[arg(long)]
    pub fidelity: Option<f64>,
    /// Bell-basis eigenvalues (Psi-, Psi+, Phi-, Phi+) for bell_diagonal.
    #[arg(long, value_delimiter = ',')]
    pub eigenvalues: Option<Vec<f64>>,
    /// Rank for random_mixed (defaults to full rank).
    #[arg(long)]
    pub rank: Option<usize>,
    /// Product components for random_separable.
    #[arg(long)]
    pub components: Option<usize>,
    /// Which Bell state `--kind bell` builds.
    #[arg(long, value_enum)]
    pub bell: Option<BellArg>,
    /// Load the state from a JSON file instead of building one.
    #[arg(
        long,
        conflicts_with_all = ["kind", "fidelity", "eigenvalues", "rank", "components", "bell"]
    )]
    pub file: Option<PathBuf>,
}

impl StateArgs {
    pub fn spec(&self) -> Result<StateSpec, ExitKind> {
        let Some(kind) = self.kind else {
            return Err(ExitKind::Usage(
                "provide either --kind or --file".into(),
            ));
        };
        let mut spec = StateSpec::new(kind.into(), self.d);
        spec.seed = self.seed;
        spec.fidelity = self.fidelity;
        spec.eigenvalues = self.eigenvalues.clone();
        spec.rank = self.rank;
        spec.components = self.components;
        spec.bell = self.bell.map(Into::into);
        Ok(spec)
    }

    /// Builds or loads the state plus a JSON echo of its provenance.
    pub fn resolve(&self) -> Result<(dcopt_core::DensityMatrix, serde_json::Value), ExitKind> {
        if let Some(path) = &self.file {
            let rho = io::load_state(path)?;
            return Ok((
                rho,
                serde_json::json!({ "file": path.display().to_string() }),
            ));
        }
        let spec = self.spec()?;
        let rho = dcopt_core::states::build(&spec)
            .map_err(|e| ExitKind::Usage(format!("cannot build state: {e}")))?;
        let echo = serde_json::to_value(&spec)
            .map_err(|e| ExitKind::Internal(e.to_string()))?;
        Ok((rho, echo))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Output destination and format.
#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format. Only `sweep` supports csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    pub fn require_json(&self) -> Result<(), ExitKind> {
        if self.format == Some(Format::Csv) {
            return Err(ExitKind::Usage(
                "this command emits JSON only; --format csv applies to sweep".into(),
            ));
        }
        Ok(())
    }

    pub fn write(&self, text: &str) -> Result<(), ExitKind> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| ExitKind::Internal(format!("cannot write {}: {e}", path.display()))),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

/// Tolerance overrides, applied process-wide before any computation.
#[derive(Debug, Args)]
pub struct TolArgs {
    /// Max |m - m^H| entry accepted from input states.
    #[arg(long = "tol-herm", global = true)]
    pub tol_herm: Option<f64>,
    /// Max |tr - 1| accepted from input states.
    #[arg(long = "tol-trace", global = true)]
    pub tol_trace: Option<f64>,
    /// Magnitude of the most negative eigenvalue accepted.
    #[arg(long = "tol-psd", global = true)]
    pub tol_psd: Option<f64>,
    /// Eigenvalue below which the reference state counts as kernel in
    /// relative entropies.
    #[arg(long = "tol-support-eig", global = true)]
    pub tol_support_eig: Option<f64>,
    /// Mass allowed to leak into the reference kernel before a relative
    /// entropy reports +infinity.
    #[arg(long = "tol-support-leak", global = true)]
    pub tol_support_leak: Option<f64>,
}

impl TolArgs {
    fn apply(&self) -> Result<(), ExitKind> {
        if self.tol_herm.is_none()
            && self.tol_trace.is_none()
            && self.tol_psd.is_none()
            && self.tol_support_eig.is_none()
            && self.tol_support_leak.is_none()
        {
            return Ok(());
        }
        let mut tols = Tolerances::default();
        if let Some(v) = self.tol_herm {
            tols.hermiticity = v;
        }
        if let Some(v) = self.tol_trace {
            tols.trace_one = v;
        }
        if let Some(v) = self.tol_psd {
            tols.psd_slack = v;
        }
        if let Some(v) = self.tol_support_eig {
            tols.support_eigenvalue = v;
        }
        if let Some(v) = self.tol_support_leak {
            tols.support_leak = v;
        }
        dcopt_core::configure_tolerances(tols)
            .map_err(|e| ExitKind::Usage(format!("bad tolerance override: {e}")))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dcopt",
    about = "Dense-coding capacity and relative entropy of entanglement toolkit",
    version
)]
struct Cli {
    #[command(flatten)]
    tols: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the optimal dense-coding capacity chi* and its structural
    /// residuals for a state.
    Capacity {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also run the randomized optimality audit with this many trials.
        #[arg(long)]
        audit_trials: Option<usize>,
        /// Max signals per audited ensemble (default 2 d^2).
        #[arg(long)]
        max_signals: Option<usize>,
    },
    /// Run a randomized verification suite; exit 1 on any violation.
    Verify {
        #[arg(long, value_enum)]
        suite: suites::Suite,
        /// Trials per suite (ensembles per state for theorem1).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Factor dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random base states for the theorem1 audit.
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep a one-parameter state family, reporting capacity and the E_R
    /// bracket per grid point (CSV by default).
    Sweep {
        #[arg(long, value_enum)]
        family: commands::Family,
        /// Grid start.
        #[arg(long)]
        from: f64,
        /// Grid end (inclusive within rounding).
        #[arg(long)]
        to: f64,
        /// Grid step (> 0).
        #[arg(long)]
        step: f64,
        /// Factor dimension (isotropic only; werner/bell_diagonal are
        /// two-qubit families).
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the relative entropy of entanglement bracket directly.
    Erel {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Frank-Wolfe iteration cap.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Seesaw restarts per linear subproblem.
        #[arg(long)]
        multistarts: Option<usize>,
        /// Duality-gap stopping threshold (bits).
        #[arg(long)]
        gap_tol: Option<f64>,
        /// Include the separable witness decomposition in the output.
        #[arg(long)]
        witness: bool,
    },
    /// Demonstrate the Weyl twirl identity: conjugation-averaging any
    /// matrix over the Weyl set yields d tr(m) I.
    TwirlCheck {
        /// Factor dimension.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Random matrices to test.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn init_threads() -> Result<(), ExitKind> {
    let Ok(raw) = std::env::var("DCOPT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| ExitKind::Usage(format!("DCOPT_THREADS must be a number, got {raw:?}")))?;
    if n == 0 {
        return Err(ExitKind::Usage("DCOPT_THREADS must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ExitKind::Internal(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), ExitKind> {
    cli.tols.apply()?;
    init_threads()?;
    match cli.command {
        Command::Capacity {
            state,
            output,
            audit_trials,
            max_signals,
        } => commands::capacity(&state, &output, audit_trials, max_signals),
        Command::Verify {
            suite,
            trials,
            d,
            seed,
            states,
            output,
        } => commands::verify(suite, trials, d, seed, states, &output),
        Command::Sweep {
            family,
            from,
            to,
            step,
            d,
            output,
        } => commands::sweep(family, from, to, step, d, &output),
        Command::Erel {
            state,
            output,
            max_iter,
            multistarts,
            gap_tol,
            witness,
        } => commands::erel(&state, &output, max_iter, multistarts, gap_tol, witness),
        Command::TwirlCheck {
            d,
            trials,
            seed,
            output,
        } => commands::twirl_check(d, trials, seed, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(kind) => {
            eprintln!("dcopt: {}", kind.message());
            ExitCode::from(kind.code())
        }
    }
}
