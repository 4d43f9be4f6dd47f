use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "normwalk", version, about = "Random walks on Z^d observed through polyhedral norms")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sphere counts N(k) for a norm.
    Census(CensusArgs),
    /// Level local times of simple-walk paths.
    Simulate(SimulateArgs),
    /// Green function G(0,x) of the simple walk.
    Green(GreenArgs),
    /// Finite-horizon zero-one experiment for sums of f(|S_n|).
    ZeroOne(ZeroOneArgs),
    /// Distributional Cauchy check of scaled level local times.
    Invariance(InvarianceArgs),
    /// Stable-law scenarios around the limit form of Jeulin's lemma.
    Jeulin(JeulinArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Common {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
    /// Directory for CSV/JSON artifacts, manifest.json and run.cfg.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Accept norms whose census vanishes on some levels.
    #[arg(long)]
    pub allow_degenerate: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct NormArgs {
    /// max, l1, w1, scaled_max:F
    #[arg(long, default_value = "max")]
    pub norm: String,
    #[arg(long)]
    pub dim: usize,
    /// Row-major unimodular matrix applied before the norm.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub transform: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CensusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 15)]
    pub kmax: u64,
    /// Compare against brute force and exit 2 on any mismatch.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value = "1e4", value_parser = parse_count)]
    pub horizon: u64,
    /// Stop each path once its norm reaches this level.
    #[arg(long)]
    pub stop_radius: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenMethodArg {
    Dp,
    Mc,
    Asymptotic,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GreenArgs {
    /// Target site, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<i64>,
    #[arg(long, value_enum, default_value = "dp")]
    pub method: GreenMethodArg,
    #[arg(long, default_value_t = 2000)]
    pub nmax: u64,
    /// DP box radius; defaults to max(4|x|, 2 sqrt(nmax)).
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub box_radius: Option<u64>,
    #[arg(long, default_value_t = 20_000)]
    pub replicas: u64,
    /// Monte Carlo exit level of the max norm.
    #[arg(long, default_value_t = 40)]
    pub kcut: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ZeroOneArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    /// Power-law exponents; with --gamma, power-log exponents.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Extra test functions such as power:3, powerlog:2:2, indicator:5.
    #[arg(long = "f", value_delimiter = ',')]
    #[serde(rename = "f")]
    pub functions: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub replicas: u64,
    #[arg(long, value_delimiter = ',', default_value = "1e4,1e5", value_parser = parse_count)]
    pub horizons: Vec<u64>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct InvarianceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub k_ladder: Vec<u64>,
    #[arg(long, default_value_t = 500)]
    pub replicas: u64,
    /// Exit level as a multiple of k.
    #[arg(long, default_value_t = 8)]
    pub kcut_factor: u64,
    #[arg(long, default_value_t = 500)]
    pub permutations: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Shiga3,
    Shiga5,
    Bernoulli,
    Harness,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct JeulinArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Ladder of K (shiga3, harness) or of grid levels L (shiga5).
    #[arg(long = "K", value_delimiter = ',', value_parser = parse_count)]
    #[serde(rename = "K")]
    pub k: Vec<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Replicas for the shiga3 Laplace functional.
    #[arg(long)]
    pub laplace_replicas: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Accepts integers and exact floats such as `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("expected a nonnegative integer, got {s:?}")),
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Census(_) => "census",
            Command::Simulate(_) => "simulate",
            Command::Green(_) => "green",
            Command::ZeroOne(_) => "zero-one",
            Command::Invariance(_) => "invariance",
            Command::Jeulin(_) => "jeulin",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Census(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Green(a) => &a.common,
            Command::ZeroOne(a) => &a.common,
            Command::Invariance(a) => &a.common,
            Command::Jeulin(a) => &a.common,
        }
    }

    /// Resolved parameters as a JSON object.
    pub fn resolved(&self) -> serde_json::Value {
        let v = match self {
            Command::Census(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Green(a) => serde_json::to_value(a),
            Command::ZeroOne(a) => serde_json::to_value(a),
            Command::Invariance(a) => serde_json::to_value(a),
            Command::Jeulin(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}
