use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "twomode", version, about = "Variance-based entanglement criteria for two-mode bosonic states")]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Recurrence,
    Direct,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every criterion on a state file.
    Evaluate(EvaluateArgs),
    /// Tabulate the analytic bounds.
    Bounds(BoundsArgs),
    /// Constrained minimisation of the single-mode uncertainty functional.
    Minimize(MinimizeArgs),
    /// Draw separable ensembles and report their moments and verdicts.
    Sample(SampleArgs),
    /// Plane data at fixed <N>: boundaries, lines and separable samples.
    Fig1(Fig1Args),
    /// Numerical minima against the analytic bound, plus the N = 20 profile.
    Fig2(Fig2Args),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file, written atomically. Relative paths resolve against
    /// TWOMODE_OUT_DIR when it is set; without --out the result goes to
    /// TWOMODE_OUT_DIR/<default name> or, failing that, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// TOML state file.
    pub state: PathBuf,
    /// Weights for the weighted-sum criterion (repeatable or comma separated).
    #[arg(long = "w", value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.7])]
    pub w: Vec<f64>,
    /// Detection tolerance on the margin.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Particle numbers: `a..b`, `a..b:step` or a comma list.
    #[arg(long = "n", default_value = "0..400")]
    pub n: Vec<String>,
    /// Weights for L_w, f_w and f~_w.
    #[arg(long = "w", value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.7])]
    pub w: Vec<f64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Target <N_A> values: `a..b`, `a..b:step` or a comma list.
    #[arg(long = "n", required = true)]
    pub n: Vec<String>,
    /// Weight w of the weighted functional; omit for the unweighted one.
    #[arg(long = "w")]
    pub w: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Highest number state (default grows with the target).
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Also write the minimising amplitudes to this CSV file.
    #[arg(long)]
    pub dump_amplitudes: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// vacuum_product, random_product, random_mixture, fock_mixture or coherent_mixture.
    #[arg(long, default_value = "random_mixture")]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Component totals <N> are drawn from [0, n-max].
    #[arg(long, default_value_t = 50.0)]
    pub n_max: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Total particle number of every plotted state.
    #[arg(long = "n", default_value_t = 200.0)]
    pub n: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random samples per family.
    #[arg(long, default_value_t = 2000)]
    pub count: usize,
    /// Weights of the weighted-sum lines.
    #[arg(long = "w", value_delimiter = ',', default_values_t = vec![0.3, 0.7])]
    pub w: Vec<f64>,
    /// Points on the boundary curve.
    #[arg(long, default_value_t = 400)]
    pub resolution: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    /// Target <N_A> values: `a..b`, `a..b:step` or a comma list.
    #[arg(long = "n", default_values_t = vec!["0.25".to_string(), "1..200".to_string()])]
    pub n: Vec<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// CSV file for the N = 20 amplitude profile and its Gaussian fit.
    #[arg(long)]
    pub inset_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced grids and sample counts.
    #[arg(long)]
    pub quick: bool,
    /// Run only the named checks (repeatable).
    #[arg(long)]
    pub only: Vec<String>,
}

/// Expands `a..b` (unit step, inclusive), `a..b:step` and comma lists.
pub fn parse_grid(specs: &[String]) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for spec in specs {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, rest)) = part.split_once("..") {
                let (b, step) = match rest.split_once(':') {
                    Some((b, s)) => (b, s),
                    None => (rest, "1"),
                };
                let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number `{s}` in `{part}`"));
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || !(b >= a) {
                    return Err(format!("range `{part}` needs start <= end and a positive step"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                if count > 1_000_000 {
                    return Err(format!("range `{part}` has too many points"));
                }
                out.extend((0..=count).map(|i| a + step * i as f64));
            } else {
                out.push(part.parse::<f64>().map_err(|_| format!("bad number `{part}`"))?);
            }
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}
