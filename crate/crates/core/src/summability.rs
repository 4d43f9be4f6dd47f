//! Summability criteria on structured test functions and the finite-horizon
//! zero-one experiment.
//!
//! (V) is `Σ k f(k) < ∞`, (IV) is `Σ k^{2−d} N(k) f(k) < ∞` and the even-level
//! criterion is `Σ k f(2k) < ∞`.

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{growth_bounds, SphereCensus};
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, TailRule};
use crate::norms::NormSpec;
use crate::walk::{check_a0, mean_se, simulate, SiteTracking, StepDistribution, WalkRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    IV,
    V,
    EvenV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Undecidable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    Symbolic,
    PartialSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub verdict: Verdict,
    pub method: VerdictMethod,
}

impl CriterionVerdict {
    fn new(criterion: Criterion, verdict: Verdict, method: VerdictMethod) -> Self {
        CriterionVerdict { criterion, verdict, method }
    }

    fn relabel(self, criterion: Criterion) -> Self {
        CriterionVerdict { criterion, ..self }
    }
}

fn from_bool(b: bool) -> Verdict {
    if b {
        Verdict::Converges
    } else {
        Verdict::Diverges
    }
}

/// Shared rule for `Σ k g(k)` where `g` behaves like `f` along a ray.
fn weighted_series(f: &FunctionSpec, criterion: Criterion) -> CriterionVerdict {
    use VerdictMethod::*;
    match f {
        FunctionSpec::PowerLaw { beta, .. } => CriterionVerdict::new(criterion, from_bool(*beta > 2.0), Symbolic),
        FunctionSpec::PowerLog { beta, gamma } => {
            let conv = *beta > 2.0 || (*beta == 2.0 && *gamma > 1.0);
            CriterionVerdict::new(criterion, from_bool(conv), Symbolic)
        }
        FunctionSpec::Table { values, tail } => match tail {
            TailRule::Unspecified => CriterionVerdict::new(criterion, Verdict::Undecidable, PartialSum),
            TailRule::Zero => CriterionVerdict::new(criterion, Verdict::Converges, PartialSum),
            TailRule::Power { beta } => {
                let conv = *beta > 2.0 || values.last().is_some_and(|&v| v == 0.0);
                CriterionVerdict::new(criterion, from_bool(conv), PartialSum)
            }
        },
        FunctionSpec::EvenOnly { inner } | FunctionSpec::OddOnly { inner } => weighted_series(inner, criterion),
    }
}

/// Criterion (V).
pub fn decide_v(f: &FunctionSpec) -> CriterionVerdict {
    if f.is_zero() {
        return CriterionVerdict::new(Criterion::V, Verdict::Converges, VerdictMethod::PartialSum);
    }
    weighted_series(f, Criterion::V)
}

/// `Σ k f(2k) < ∞`, which ignores the odd levels entirely.
pub fn decide_even_v(f: &FunctionSpec) -> CriterionVerdict {
    match f {
        FunctionSpec::OddOnly { inner } => {
            let method = weighted_series(inner, Criterion::EvenV).method;
            CriterionVerdict::new(Criterion::EvenV, Verdict::Converges, method)
        }
        FunctionSpec::EvenOnly { inner } => decide_even_v(inner),
        _ if f.is_zero() => CriterionVerdict::new(Criterion::EvenV, Verdict::Converges, VerdictMethod::PartialSum),
        _ => weighted_series(f, Criterion::EvenV),
    }
}

/// How the census grows, as far as criterion (IV) is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusShape {
    /// `N(k) ≍ k^{d−1}` on the whole table.
    Regular,
    /// Zero on odd levels, regular on even levels.
    EvenSupported,
    Irregular,
}

pub fn census_shape(census: &SphereCensus) -> CensusShape {
    if growth_bounds(census).is_ok_and(|g| g.c1 > 0.0) {
        return CensusShape::Regular;
    }
    let c = &census.counts;
    let odd_zero = c.iter().skip(1).step_by(2).all(|&n| n == 0);
    let evens: Vec<u64> = c.iter().step_by(2).skip(1).copied().collect();
    if odd_zero && !evens.is_empty() && evens.iter().all(|&n| n > 0) && evens.windows(2).all(|w| w[0] <= w[1]) {
        CensusShape::EvenSupported
    } else {
        CensusShape::Irregular
    }
}

/// Criterion (IV). On regular censuses it coincides with (V); on
/// even-supported ones it reduces to the even-level criterion.
pub fn decide_iv(f: &FunctionSpec, census: &SphereCensus) -> CriterionVerdict {
    match census_shape(census) {
        CensusShape::Regular => decide_v(f).relabel(Criterion::IV),
        CensusShape::EvenSupported => decide_even_v(f),
        CensusShape::Irregular => CriterionVerdict::new(Criterion::IV, Verdict::Undecidable, VerdictMethod::PartialSum),
    }
}

/// Partial sums of the criterion series at `K = 10, 100, …, 10^decades`.
pub fn criterion_partial_sums(f: &FunctionSpec, criterion: Criterion, decades: u32) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut next = 10u64;
    let top = 10u64.pow(decades);
    for k in 1..=top {
        acc += match criterion {
            Criterion::EvenV => k as f64 * f.eval(2 * k),
            _ => k as f64 * f.eval(k),
        };
        if k == next {
            out.push((k, acc));
            next *= 10;
        }
    }
    out
}

/// Reads a verdict off decade increments: the series is taken to converge
/// when the last decade adds less than 0.75 of the one before it.
pub fn cauchy_verdict(sums: &[(u64, f64)]) -> Verdict {
    if sums.len() < 3 {
        return Verdict::Undecidable;
    }
    let n = sums.len();
    let last = sums[n - 1].1 - sums[n - 2].1;
    let prev = sums[n - 2].1 - sums[n - 3].1;
    if prev == 0.0 && last == 0.0 {
        Verdict::Converges
    } else {
        from_bool(last < 0.75 * prev)
    }
}

/// Census-side series `f(0) + Σ_{k=1}^{K} k^{2−d} N(k) f(k)`.
pub fn census_side_sum(f: &FunctionSpec, census: &SphereCensus, k_max: usize) -> f64 {
    let d = census.dim() as i32;
    let top = k_max.min(census.k_max());
    f.eval(0)
        + (1..=top)
            .map(|k| (k as f64).powi(2 - d) * census.counts[k] as f64 * f.eval(k as u64))
            .sum::<f64>()
}

/// Stabilization thresholds and budgets for the zero-one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroOneConfig {
    pub horizons: Vec<u64>,
    pub replicas: u64,
    pub master_seed: u64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// Run on laws that fail (A0).
    pub allow_non_a0: bool,
}

/// Relative threshold calibrated by simulation (see the README).
pub const DEFAULT_EPS_REL: f64 = 0.27;
pub const DEFAULT_EPS_ABS: f64 = 1e-3;

impl Default for ZeroOneConfig {
    fn default() -> Self {
        ZeroOneConfig {
            horizons: vec![10_000, 100_000],
            replicas: 200,
            master_seed: 1,
            eps_abs: DEFAULT_EPS_ABS,
            eps_rel: DEFAULT_EPS_REL,
            allow_non_a0: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroOneRow {
    pub function: String,
    pub criterion_v: CriterionVerdict,
    pub criterion_iv: CriterionVerdict,
    pub stabilized_fraction: f64,
    /// Median over replicas at each horizon.
    pub median_sums: Vec<f64>,
    pub mean_sums: Vec<f64>,
    pub mean_se: Vec<f64>,
    /// `sums[replica][checkpoint]`.
    #[serde(skip)]
    pub sums: Vec<Vec<f64>>,
}

impl ZeroOneRow {
    /// True iff the observed fraction sits near the end predicted by (V).
    pub fn agrees_with(&self, lo: f64, hi: f64) -> bool {
        match self.criterion_v.verdict {
            Verdict::Converges => self.stabilized_fraction >= hi,
            Verdict::Diverges => self.stabilized_fraction <= lo,
            Verdict::Undecidable => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroOneReport {
    pub spec: String,
    pub dim: usize,
    pub config: ZeroOneConfig,
    pub rows: Vec<ZeroOneRow>,
}

const LOOKUP: usize = 1 << 16;

/// Every replica walks once; one set of paths serves all test functions.
pub fn zero_one_experiment(
    step: &StepDistribution,
    spec: &NormSpec,
    fs: &[FunctionSpec],
    census: &SphereCensus,
    cfg: &ZeroOneConfig,
) -> Result<ZeroOneReport> {
    if let Some(msg) = step.recurrence_note() {
        return Err(Error::usage(msg));
    }
    if !cfg.allow_non_a0 && !check_a0(step, 1e-12) {
        return Err(Error::usage("step law fails (A0); pass allow-non-a0 to run anyway"));
    }
    if cfg.horizons.len() < 2 || cfg.horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("need at least two strictly increasing horizons"));
    }
    if cfg.replicas == 0 {
        return Err(Error::usage("need at least one replica"));
    }
    for f in fs {
        f.validate()?;
    }
    let tables: Vec<Vec<f64>> = fs.iter().map(|f| f.table(LOOKUP)).collect();
    let h_max = *cfg.horizons.last().unwrap();
    let per_replica: Vec<Vec<Vec<f64>>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0.0f64; fs.len()];
            let mut out = vec![Vec::with_capacity(cfg.horizons.len()); fs.len()];
            let mut next = 0;
            let mut obs = |n: u64, _: &[i64], k: u64| {
                let ku = k as usize;
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += if ku < LOOKUP { tables[j][ku] } else { fs[j].eval(k) };
                }
                if n == cfg.horizons[next] {
                    for (o, &a) in out.iter_mut().zip(&acc) {
                        o.push(a);
                    }
                    next += 1;
                }
            };
            let run = WalkRun::new(step, spec, cfg.master_seed, i, h_max).purpose("zero-one");
            simulate(&run, SiteTracking::Off, &mut [&mut obs])?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let h = cfg.horizons.len();
    let rows = fs
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let sums: Vec<Vec<f64>> = per_replica.iter().map(|r| r[j].clone()).collect();
            let stable = sums
                .iter()
                .filter(|s| (s[h - 1] - s[h - 2]).abs() < cfg.eps_abs + cfg.eps_rel * s[h - 1].abs())
                .count();
            let median_sums = (0..h).map(|c| median(sums.iter().map(|s| s[c]).collect())).collect();
            let (mean_sums, mean_se) = (0..h).map(|c| mean_se(sums.iter().map(|s| s[c]))).unzip();
            ZeroOneRow {
                function: f.label(),
                criterion_v: decide_v(f),
                criterion_iv: decide_iv(f, census),
                stabilized_fraction: stable as f64 / cfg.replicas as f64,
                median_sums,
                mean_sums,
                mean_se,
                sums,
            }
        })
        .collect();
    Ok(ZeroOneReport { spec: spec.to_string(), dim: spec.dim(), config: cfg.clone(), rows })
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// MC mean of the truncated sum against the census-side series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub function: String,
    pub horizons: Vec<u64>,
    pub mc_mean: Vec<f64>,
    pub mc_se: Vec<f64>,
    /// Census level matched to each horizon, `⌈√h⌉`.
    pub census_levels: Vec<usize>,
    pub census_sums: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Uses the row of a finished zero-one run for `f`.
pub fn expectation_vs_criterion(row: &ZeroOneRow, f: &FunctionSpec, census: &SphereCensus, horizons: &[u64]) -> Result<ExpectationReport> {
    if f.is_zero() {
        return Err(Error::usage("f vanishes identically: the ratio is 0/0"));
    }
    let census_levels: Vec<usize> = horizons.iter().map(|&h| (h as f64).sqrt().ceil() as usize).collect();
    if let Some(&k) = census_levels.iter().find(|&&k| k > census.k_max()) {
        return Err(Error::usage(format!("census reaches k = {}, need {k}", census.k_max())));
    }
    let census_sums: Vec<f64> = census_levels.iter().map(|&k| census_side_sum(f, census, k)).collect();
    let ratios = row.mean_sums.iter().zip(&census_sums).map(|(m, c)| m / c).collect();
    Ok(ExpectationReport {
        function: f.label(),
        horizons: horizons.to_vec(),
        mc_mean: row.mean_sums.clone(),
        mc_se: row.mean_se.clone(),
        census_levels,
        census_sums,
        ratios,
    })
}
