//! Lattice random walks, local times and hitting statistics.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::green::spitzer_asymptotic;
use crate::norms::NormSpec;
use crate::rng::SeedTree;

/// Default sparse site-map budget.
pub const SITE_BUDGET: usize = 1 << 24;

/// Increment law on ℤᵈ with a finite support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDistribution {
    dim: usize,
    /// Row-major increments, `dim` entries per support point.
    increments: Vec<i64>,
    probs: Vec<f64>,
    #[serde(skip)]
    cdf: Vec<f64>,
    uniform: bool,
    mean: Vec<f64>,
    covariance: Vec<f64>,
}

impl StepDistribution {
    pub fn new(dim: usize, support: Vec<(Vec<i64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("dimension must be at least 1"));
        }
        if support.is_empty() {
            return Err(Error::usage("step law needs at least one support point"));
        }
        let mut increments = Vec::with_capacity(dim * support.len());
        let mut probs = Vec::with_capacity(support.len());
        for (inc, p) in support {
            check_dim(dim, inc.len())?;
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::usage(format!("step probability {p} is not a finite nonnegative number")));
            }
            increments.extend(inc);
            probs.push(p);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::usage(format!("step probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let uniform = probs.iter().all(|&p| p == probs[0]);
        let m = probs.len();
        let mut mean = vec![0.0; dim];
        let mut second = vec![0.0; dim * dim];
        for s in 0..m {
            let x = &increments[s * dim..(s + 1) * dim];
            for i in 0..dim {
                mean[i] += probs[s] * x[i] as f64;
                for j in 0..dim {
                    second[i * dim + j] += probs[s] * (x[i] * x[j]) as f64;
                }
            }
        }
        let covariance = (0..dim * dim).map(|ij| second[ij] - mean[ij / dim] * mean[ij % dim]).collect();
        Ok(StepDistribution { dim, increments, probs, cdf, uniform, mean, covariance })
    }

    /// Uniform law on the `2d` signed unit vectors.
    pub fn simple(dim: usize) -> Self {
        let p = 1.0 / (2 * dim) as f64;
        let support = (0..dim)
            .flat_map(|i| {
                [1i64, -1].map(|s| {
                    let mut v = vec![0; dim];
                    v[i] = s;
                    (v, p)
                })
            })
            .collect();
        Self::new(dim, support).expect("simple walk is a valid law")
    }

    /// Stays put with probability `stay`, otherwise a simple-walk step.
    pub fn lazy_simple(dim: usize, stay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&stay) {
            return Err(Error::usage("holding probability must lie in [0,1)"));
        }
        let mut support: Vec<(Vec<i64>, f64)> = Self::simple(dim)
            .support()
            .map(|(v, p)| (v.to_vec(), p * (1.0 - stay)))
            .collect();
        support.push((vec![0; dim], stay));
        Self::new(dim, support)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> impl Iterator<Item = (&[i64], f64)> + '_ {
        self.increments.chunks_exact(self.dim).zip(self.probs.iter().copied())
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Row-major `d × d` covariance matrix.
    pub fn covariance(&self) -> &[f64] {
        &self.covariance
    }

    /// `trace(Q)/d`.
    pub fn sigma2(&self) -> f64 {
        (0..self.dim).map(|i| self.covariance[i * self.dim + i]).sum::<f64>() / self.dim as f64
    }

    /// `max_{ij} |Q_ij − σ² δ_ij|`.
    pub fn isotropy_deviation(&self) -> f64 {
        let s2 = self.sigma2();
        (0..self.dim * self.dim)
            .map(|ij| {
                let target = if ij / self.dim == ij % self.dim { s2 } else { 0.0 };
                (self.covariance[ij] - target).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_recurrent(&self) -> bool {
        self.dim <= 2
    }

    /// Message for walks where the zero-one experiments make no sense.
    pub fn recurrence_note(&self) -> Option<String> {
        self.is_recurrent().then(|| {
            format!(
                "d={} walk is recurrent (every site is visited infinitely often); transient-walk quantities need d >= 3",
                self.dim
            )
        })
    }

    /// True when flipping the sign of any single coordinate leaves the law unchanged.
    pub fn is_sign_symmetric(&self) -> bool {
        let table: HashMap<&[i64], f64> = self.support().collect();
        (0..self.dim).all(|axis| {
            self.support().all(|(v, p)| {
                let mut w = v.to_vec();
                w[axis] = -w[axis];
                table.get(w.as_slice()).is_some_and(|&q| (q - p).abs() <= 1e-15)
            })
        })
    }

    /// True when every increment has odd ℓ¹ length.
    pub fn is_bipartite(&self) -> bool {
        self.support().all(|(v, p)| p == 0.0 || v.iter().map(|c| c.abs()).sum::<i64>() % 2 == 1)
    }

    /// Largest `|Δ|∞` over the support.
    pub fn max_jump(&self) -> i64 {
        self.increments.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    #[inline]
    fn sample<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a [i64] {
        let m = self.probs.len();
        let s = if self.uniform {
            rng.random_range(0..m)
        } else {
            let u: f64 = rng.random();
            self.cdf.partition_point(|&c| c <= u).min(m - 1)
        };
        &self.increments[s * self.dim..(s + 1) * self.dim]
    }
}

pub fn make_simple_walk(d: usize) -> StepDistribution {
    StepDistribution::simple(d)
}

/// (A0): zero mean and `Q = σ² I` within `tolerance`, with `σ² > 0`.
pub fn check_a0(step: &StepDistribution, tolerance: f64) -> bool {
    step.mean.iter().all(|m| m.abs() <= tolerance) && step.sigma2() > 0.0 && step.isotropy_deviation() <= tolerance
}

/// One replica: `(master_seed, replica)` determines the path.
#[derive(Debug, Clone)]
pub struct WalkRun<'a> {
    pub step: &'a StepDistribution,
    pub spec: &'a NormSpec,
    pub master_seed: u64,
    pub purpose: &'a str,
    pub replica: u64,
    pub horizon: u64,
    /// Stop once `‖Sₙ‖ ≥ stop_radius`.
    pub stop_radius: Option<u64>,
}

impl<'a> WalkRun<'a> {
    pub fn new(step: &'a StepDistribution, spec: &'a NormSpec, master_seed: u64, replica: u64, horizon: u64) -> Self {
        WalkRun { step, spec, master_seed, purpose: "walk", replica, horizon, stop_radius: None }
    }

    pub fn stop_at(mut self, radius: u64) -> Self {
        self.stop_radius = Some(radius);
        self
    }

    pub fn purpose(mut self, purpose: &'a str) -> Self {
        self.purpose = purpose;
        self
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.spec.dim(), self.step.dim())?;
        if self.horizon == 0 {
            return Err(Error::usage("horizon must be at least 1"));
        }
        Ok(())
    }
}

/// Streaming consumer of `(n, Sₙ, ‖Sₙ‖)` for `n ≥ 1`.
pub trait Observer {
    fn observe(&mut self, n: u64, position: &[i64], norm: u64);
}

impl<F: FnMut(u64, &[i64], u64)> Observer for F {
    fn observe(&mut self, n: u64, position: &[i64], norm: u64) {
        self(n, position, norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteTracking {
    Off,
    /// Full sparse map up to the given number of entries.
    Full { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalTimeRecord {
    /// `level_counts[k] = L^{‖S‖}_n(k)`.
    pub level_counts: Vec<u64>,
    #[serde(skip)]
    pub site_counts: HashMap<Vec<i64>, u64>,
    /// Once the site map fills up, only sites with `|x|∞ ≤ window` are kept.
    pub site_window: Option<i64>,
    pub n_effective: u64,
    /// The horizon was reached before the stop radius.
    pub truncated: bool,
    pub final_position: Vec<i64>,
}

impl LocalTimeRecord {
    pub fn level(&self, k: u64) -> u64 {
        self.level_counts.get(k as usize).copied().unwrap_or(0)
    }

    pub fn site(&self, x: &[i64]) -> u64 {
        self.site_counts.get(x).copied().unwrap_or(0)
    }

    fn observe_site(&mut self, x: &[i64], budget: usize) {
        if let Some(w) = self.site_window {
            if x.iter().any(|c| c.abs() > w) {
                return;
            }
        }
        if let Some(c) = self.site_counts.get_mut(x) {
            *c += 1;
            return;
        }
        if self.site_counts.len() >= budget {
            // shrink to the window holding half the current entries
            let mut radii: Vec<i64> =
                self.site_counts.keys().map(|k| k.iter().map(|c| c.abs()).max().unwrap_or(0)).collect();
            radii.sort_unstable();
            let w = radii[radii.len() / 2].max(0);
            self.site_counts.retain(|k, _| k.iter().all(|c| c.abs() <= w));
            self.site_window = Some(w);
            if x.iter().any(|c| c.abs() > w) {
                return;
            }
        }
        self.site_counts.insert(x.to_vec(), 1);
    }
}

/// Runs one path from the origin, feeding every observer at each step.
pub fn simulate(run: &WalkRun, tracking: SiteTracking, observers: &mut [&mut dyn Observer]) -> Result<LocalTimeRecord> {
    run.validate()?;
    let mut rng = SeedTree::new(run.master_seed, run.purpose).stream(run.replica);
    let d = run.step.dim();
    let mut pos = vec![0i64; d];
    let mut rec = LocalTimeRecord {
        level_counts: Vec::new(),
        site_counts: HashMap::new(),
        site_window: None,
        n_effective: 0,
        truncated: true,
        final_position: Vec::new(),
    };
    for n in 1..=run.horizon {
        let inc = run.step.sample(&mut rng);
        for (p, i) in pos.iter_mut().zip(inc) {
            *p += i;
        }
        let k = run.spec.eval(&pos);
        let ku = k as usize;
        if ku >= rec.level_counts.len() {
            rec.level_counts.resize(ku + 1, 0);
        }
        rec.level_counts[ku] += 1;
        if let SiteTracking::Full { budget } = tracking {
            rec.observe_site(&pos, budget);
        }
        for o in observers.iter_mut() {
            o.observe(n, &pos, k);
        }
        rec.n_effective = n;
        if run.stop_radius.is_some_and(|r| k >= r) {
            rec.truncated = false;
            break;
        }
    }
    rec.final_position = pos;
    Ok(rec)
}

/// `Σ_{n≤N} f(‖Sₙ‖)` at each checkpoint `N` (sorted ascending).
pub fn truncated_f_sum(run: &WalkRun, f: impl Fn(u64) -> f64, checkpoints: &[u64]) -> Result<Vec<f64>> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::usage("checkpoints must be sorted"));
    }
    let horizon = checkpoints.last().copied().unwrap_or(0).max(1);
    let run = WalkRun { horizon, ..run.clone() };
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut acc = 0.0;
    let mut next = 0;
    let mut obs = |n: u64, _: &[i64], k: u64| {
        acc += f(k);
        while next < checkpoints.len() && checkpoints[next] == n {
            out.push(acc);
            next += 1;
        }
    };
    simulate(&run, SiteTracking::Off, &mut [&mut obs])?;
    while out.len() < checkpoints.len() {
        // checkpoint 0, or a path that stopped at its radius
        out.push(if checkpoints[out.len()] == 0 { 0.0 } else { acc });
    }
    Ok(out)
}

/// Bias bound for statistics that treat exit from `B(0; K_cut)` as infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCertificate {
    pub k_cut: u64,
    /// Upper bound on the probability of coming back after the exit.
    pub return_probability: f64,
    /// Relative bias bound on the mean, `p/(1−p)`.
    pub relative_bias: f64,
}

/// Level-`k` certificate: `p ≤ min(1, (r_out k / (r_in K_cut))^{d−2})`.
pub fn level_certificate(spec: &NormSpec, k: u64, k_cut: u64) -> TruncationCertificate {
    let d = spec.dim() as i32;
    let (r_in, r_out) = spec.euclidean_bounds();
    let p = ((r_out * k as f64) / (r_in * k_cut as f64)).powi(d - 2).min(1.0);
    let relative_bias = if p < 1.0 { p / (1.0 - p) } else { f64::INFINITY };
    TruncationCertificate { k_cut, return_probability: p, relative_bias }
}

/// Replicated `L^{‖S‖}_∞(k)`, read off as visits before the first exit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelLocalTimeSample {
    pub k: u64,
    pub samples: Vec<u64>,
    pub certificate: TruncationCertificate,
    pub truncated_replicas: usize,
}

impl LevelLocalTimeSample {
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<u64>() as f64 / self.samples.len() as f64
    }
}

/// Shared Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McBudget {
    pub replicas: u64,
    pub master_seed: u64,
    /// Safety horizon for each path.
    pub horizon: u64,
}

impl McBudget {
    pub fn new(replicas: u64, master_seed: u64) -> Self {
        McBudget { replicas, master_seed, horizon: 50_000_000 }
    }
}

fn require_transient(step: &StepDistribution) -> Result<()> {
    match step.recurrence_note() {
        Some(msg) => Err(Error::usage(msg)),
        None => Ok(()),
    }
}

pub fn total_level_local_time(
    step: &StepDistribution,
    spec: &NormSpec,
    k: u64,
    k_cut: u64,
    budget: McBudget,
) -> Result<LevelLocalTimeSample> {
    require_transient(step)?;
    if k_cut < 2 * k {
        return Err(Error::usage(format!("K_cut = {k_cut} < 2k = {}: truncation bias is uncontrolled", 2 * k)));
    }
    let purpose = format!("level-local-time/k={k}");
    let rows: Vec<(u64, bool)> = (0..budget.replicas)
        .into_par_iter()
        .map(|i| {
            let run = WalkRun::new(step, spec, budget.master_seed, i, budget.horizon).stop_at(k_cut).purpose(&purpose);
            simulate(&run, SiteTracking::Off, &mut []).map(|r| (r.level(k), r.truncated))
        })
        .collect::<Result<_>>()?;
    Ok(LevelLocalTimeSample {
        k,
        truncated_replicas: rows.iter().filter(|r| r.1).count(),
        samples: rows.into_iter().map(|r| r.0).collect(),
        certificate: level_certificate(spec, k, k_cut),
    })
}

/// Per-replica visit counts at `x` and at the origin before the first exit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteVisits {
    pub visits_x: u64,
    pub visits_0: u64,
    pub exit: Vec<i64>,
    pub truncated: bool,
}

/// Runs `budget.replicas` paths until `‖Sₙ‖ ≥ K_cut`, counting visits to `x` and `0`.
pub fn site_visit_runs(
    step: &StepDistribution,
    spec: &NormSpec,
    x: &[i64],
    k_cut: u64,
    budget: McBudget,
    purpose: &str,
) -> Result<Vec<SiteVisits>> {
    require_transient(step)?;
    check_dim(step.dim(), x.len())?;
    (0..budget.replicas)
        .into_par_iter()
        .map(|i| {
            let (mut vx, mut v0) = (0u64, 0u64);
            let mut obs = |_: u64, p: &[i64], _: u64| {
                if p == x {
                    vx += 1;
                }
                if p.iter().all(|&c| c == 0) {
                    v0 += 1;
                }
            };
            let run = WalkRun::new(step, spec, budget.master_seed, i, budget.horizon).stop_at(k_cut).purpose(purpose);
            let rec = simulate(&run, SiteTracking::Off, &mut [&mut obs])?;
            Ok(SiteVisits { visits_x: vx, visits_0: v0, exit: rec.final_position, truncated: rec.truncated })
        })
        .collect()
}

/// Spitzer value of `G(0, z)` for the step law, used for post-exit corrections.
pub(crate) fn spitzer_for(step: &StepDistribution, z: &[i64]) -> f64 {
    let zf: Vec<f64> = z.iter().map(|&c| c as f64).collect();
    spitzer_asymptotic(step.covariance(), step.dim(), &zf).unwrap_or(0.0)
}

/// Mean and standard error.
pub fn mean_se(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
    for x in xs {
        n += 1.0;
        s += x;
        s2 += x * x;
    }
    let m = s / n;
    let var = if n > 1.0 { (s2 - n * m * m).max(0.0) / (n - 1.0) } else { 0.0 };
    (m, (var / n).sqrt())
}

/// Hitting probability `p(x) = P(T_x < ∞)` with `T_x = inf{n ≥ 1 : Sₙ = x}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingEstimate {
    pub x: Vec<i64>,
    /// Fraction of replicas that hit `x` before exiting.
    pub raw: f64,
    /// `raw` plus the Spitzer estimate of hits after the exit.
    pub value: f64,
    pub standard_error: f64,
    pub replicas: u64,
    /// Bound on the post-exit hitting probability from any exit point.
    pub certificate: f64,
    pub k_cut: u64,
}

/// Combines pre-exit hits with the post-exit correction
/// `P_y(T_x < ∞) = (1 − p(0)) G(0, x − y)`.
pub fn hitting_from_visits(step: &StepDistribution, spec: &NormSpec, x: &[i64], k_cut: u64, rows: &[SiteVisits]) -> HittingEstimate {
    let r = rows.len() as f64;
    let origin = x.iter().all(|&c| c == 0);
    let miss_x = |v: &SiteVisits| if v.visits_x == 0 && !v.truncated { spitzer_for(step, &diff(x, &v.exit)) } else { 0.0 };
    let miss_0 = |v: &SiteVisits| if v.visits_0 == 0 && !v.truncated { spitzer_for(step, &v.exit) } else { 0.0 };
    let raw0 = rows.iter().filter(|v| v.visits_0 > 0).count() as f64 / r;
    let c0 = rows.iter().map(miss_0).sum::<f64>() / r;
    let p0 = (raw0 + c0) / (1.0 + c0);
    let per_replica: Vec<f64> = rows
        .iter()
        .map(|v| if v.visits_x > 0 { 1.0 } else { (1.0 - p0) * miss_x(v) })
        .collect();
    let raw = rows.iter().filter(|v| v.visits_x > 0).count() as f64 / r;
    let (mut value, se) = mean_se(per_replica);
    if origin {
        value = p0;
    }
    // closest possible exit point
    let (r_in, _) = spec.euclidean_bounds();
    let xe = x.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
    let dist = (r_in * k_cut as f64 - xe).max(1.0);
    let certificate = spitzer_asymptotic(step.covariance(), step.dim(), &unit_ray(step.dim(), dist)).unwrap_or(f64::INFINITY);
    HittingEstimate { x: x.to_vec(), raw, value, standard_error: se, replicas: rows.len() as u64, certificate, k_cut }
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn unit_ray(d: usize, r: f64) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[0] = r;
    v
}

pub fn hitting_probability(
    step: &StepDistribution,
    spec: &NormSpec,
    x: &[i64],
    k_cut: u64,
    budget: McBudget,
) -> Result<HittingEstimate> {
    let norm_x = spec.norm_value(x)?;
    if k_cut < 4 * norm_x + 4 {
        return Err(Error::usage(format!("K_cut = {k_cut} must be at least 4‖x‖+4 = {}", 4 * norm_x + 4)));
    }
    let rows = site_visit_runs(step, spec, x, k_cut, budget, "hitting")?;
    Ok(hitting_from_visits(step, spec, x, k_cut, &rows))
}

/// Empirical law of `L^S_∞(x)` against the geometric prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteLocalTimeLaw {
    pub x: Vec<i64>,
    /// `tail[n] = P̂(L ≥ n)`, `n = 0..`.
    pub tail: Vec<f64>,
    pub replicas: u64,
    pub mean: f64,
    pub mean_se: f64,
    pub hitting: HittingEstimate,
    pub p0: HittingEstimate,
    /// `(n, P̂(L≥n+1)/P̂(L≥n), standard error)` for `n = 1..=4`.
    pub tail_ratios: Vec<(u64, f64, f64)>,
}

impl SiteLocalTimeLaw {
    /// Geometric prediction `p(x) p(0)^{n−1}`.
    pub fn predicted_tail(&self, n: u64) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.hitting.value * self.p0.value.powi(n as i32 - 1)
        }
    }

    /// `p(x)/(1 − p(0))`.
    pub fn predicted_mean(&self) -> f64 {
        self.hitting.value / (1.0 - self.p0.value)
    }
}

/// Tail of `L^S_∞(x)`, with `p(x)` from the same runs and `p(0)` from an independent stream.
pub fn total_site_local_time_distribution(
    step: &StepDistribution,
    spec: &NormSpec,
    x: &[i64],
    k_cut: u64,
    budget: McBudget,
) -> Result<SiteLocalTimeLaw> {
    let norm_x = spec.norm_value(x)?;
    if k_cut < 4 * norm_x + 4 {
        return Err(Error::usage(format!("K_cut = {k_cut} must be at least 4‖x‖+4 = {}", 4 * norm_x + 4)));
    }
    let rows = site_visit_runs(step, spec, x, k_cut, budget, "site-law")?;
    let origin = vec![0; x.len()];
    let rows0 = site_visit_runs(step, spec, &origin, k_cut, budget, "site-law/p0")?;
    let hitting = hitting_from_visits(step, spec, x, k_cut, &rows);
    let p0 = hitting_from_visits(step, spec, &origin, k_cut, &rows0);
    let max_l = rows.iter().map(|v| v.visits_x).max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max_l + 2];
    for v in &rows {
        hist[v.visits_x as usize] += 1;
    }
    let r = rows.len() as f64;
    let mut tail = vec![0.0; max_l + 2];
    let mut acc = 0u64;
    for n in (0..=max_l + 1).rev() {
        acc += hist[n];
        tail[n] = acc as f64 / r;
    }
    let mut tail_ratios = Vec::new();
    for n in 1..=4u64 {
        let a = hist_tail(&hist, n);
        let b = hist_tail(&hist, n + 1);
        if a > 0 {
            // binomial: of the a paths reaching n visits, b reach n+1
            let q = b as f64 / a as f64;
            tail_ratios.push((n, q, (q * (1.0 - q) / a as f64).sqrt()));
        }
    }
    let (mean, mean_se) = mean_se(rows.iter().map(|v| v.visits_x as f64));
    Ok(SiteLocalTimeLaw { x: x.to_vec(), tail, replicas: budget.replicas, mean, mean_se, hitting, p0, tail_ratios })
}

fn hist_tail(hist: &[u64], n: u64) -> u64 {
    hist.iter().skip(n as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_walk_moments() {
        let s = make_simple_walk(3);
        assert!((s.sigma2() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.isotropy_deviation(), 0.0);
        assert!(check_a0(&s, 0.0));
        assert!((make_simple_walk(5).sigma2() - 0.2).abs() < 1e-15);
        assert!(make_simple_walk(1).recurrence_note().unwrap().contains("recurrent"));
        assert!(make_simple_walk(3).recurrence_note().is_none());
        assert!(s.is_sign_symmetric() && s.is_bipartite());
    }

    #[test]
    fn a0_negative_and_lazy() {
        let degenerate = StepDistribution::new(2, vec![(vec![1, 0], 0.5), (vec![-1, 0], 0.5)]).unwrap();
        assert!(!check_a0(&degenerate, 1e-9));
        let lazy = StepDistribution::lazy_simple(3, 0.5).unwrap();
        assert!(check_a0(&lazy, 1e-12));
        assert!((lazy.sigma2() - 1.0 / 6.0).abs() < 1e-15);
        assert!(!lazy.is_bipartite());
        let drift = StepDistribution::new(1, vec![(vec![1], 0.75), (vec![-1], 0.25)]).unwrap();
        assert!(!check_a0(&drift, 1e-3));
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(StepDistribution::new(2, vec![(vec![1, 0], 0.4)]).is_err());
        assert!(StepDistribution::new(2, vec![(vec![1], 1.0)]).is_err());
        assert!(StepDistribution::new(2, vec![(vec![1, 0], f64::NAN)]).is_err());
    }

    #[test]
    fn deterministic_paths() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let a = simulate(&WalkRun::new(&s, &m, 42, 5, 10), SiteTracking::Full { budget: 100 }, &mut []).unwrap();
        let b = simulate(&WalkRun::new(&s, &m, 42, 5, 10), SiteTracking::Full { budget: 100 }, &mut []).unwrap();
        assert_eq!(a, b);
        let c = simulate(&WalkRun::new(&s, &m, 42, 6, 10), SiteTracking::Off, &mut []).unwrap();
        assert_ne!(a.final_position, c.final_position);
    }

    #[test]
    fn horizon_one_hits_level_one() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let r = simulate(&WalkRun::new(&s, &m, 1, 0, 1), SiteTracking::Off, &mut []).unwrap();
        assert_eq!(r.level_counts, vec![0, 1]);
        assert!(r.truncated);
    }

    #[test]
    fn counting_identities() {
        let s = make_simple_walk(3);
        for spec in [NormSpec::max(3), NormSpec::l1(3)] {
            let r = simulate(&WalkRun::new(&s, &spec, 9, 1, 5000), SiteTracking::Full { budget: SITE_BUDGET }, &mut [])
                .unwrap();
            assert_eq!(r.level_counts.iter().sum::<u64>(), r.n_effective);
            let mut by_level = vec![0u64; r.level_counts.len()];
            for (x, c) in &r.site_counts {
                by_level[spec.eval(x) as usize] += c;
            }
            assert_eq!(by_level, r.level_counts);
        }
    }

    #[test]
    fn norm_increments() {
        let s = make_simple_walk(3);
        let max = NormSpec::max(3);
        let l1 = NormSpec::l1(3);
        let mut prev = (0i64, 0i64);
        let mut obs = |n: u64, x: &[i64], _: u64| {
            let (a, b) = (max.eval(x) as i64, l1.eval(x) as i64);
            assert!((a - prev.0).abs() <= 1);
            assert_eq!((b - prev.1).abs(), 1);
            assert_eq!(b as u64 % 2, n % 2);
            prev = (a, b);
        };
        simulate(&WalkRun::new(&s, &max, 3, 0, 20_000), SiteTracking::Off, &mut [&mut obs]).unwrap();
    }

    #[test]
    fn sum_over_sites_equals_sum_over_path() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let g = |x: &[i64]| 1.0 / (1.0 + (x[0] * x[0] + 2 * x[1] * x[1] + 3 * x[2] * x[2]) as f64);
        let mut path_sum = 0.0;
        let mut obs = |_: u64, x: &[i64], _: u64| path_sum += g(x);
        let r = simulate(&WalkRun::new(&s, &m, 11, 2, 3000).stop_at(25), SiteTracking::Full { budget: SITE_BUDGET }, &mut [&mut obs])
            .unwrap();
        let site_sum: f64 = r.site_counts.iter().map(|(x, &c)| g(x) * c as f64).sum();
        assert!((site_sum - path_sum).abs() <= 1e-9 * path_sum);
    }

    #[test]
    fn site_window_degrades() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let r = simulate(&WalkRun::new(&s, &m, 4, 0, 20_000), SiteTracking::Full { budget: 64 }, &mut []).unwrap();
        assert!(r.site_window.is_some());
        assert!(r.site_counts.len() <= 64);
    }

    #[test]
    fn f_sums() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let run = WalkRun::new(&s, &m, 2, 0, 1);
        assert_eq!(truncated_f_sum(&run, |_| 0.0, &[10, 100]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(truncated_f_sum(&run, |_| 1.0, &[10, 100, 1000]).unwrap(), vec![10.0, 100.0, 1000.0]);
        let p = truncated_f_sum(&run, |k| (1.0 + k as f64).powi(-3), &[10, 100, 1000]).unwrap();
        assert!(p[0] <= p[1] && p[1] <= p[2]);
    }

    #[test]
    fn level_local_time_is_positive() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let out = total_level_local_time(&s, &m, 3, 24, McBudget::new(200, 5)).unwrap();
        assert!(out.samples.iter().all(|&v| v >= 1));
        assert_eq!(out.truncated_replicas, 0);
        assert!(total_level_local_time(&s, &m, 3, 5, McBudget::new(10, 5)).is_err());
        assert!(total_level_local_time(&make_simple_walk(2), &NormSpec::max(2), 3, 24, McBudget::new(10, 5)).is_err());
    }

    #[test]
    fn certificate_shrinks() {
        let m = NormSpec::max(3);
        let a = level_certificate(&m, 2, 16);
        let b = level_certificate(&m, 2, 32);
        assert!(b.return_probability < a.return_probability);
        assert!((a.return_probability - 3f64.sqrt() / 8.0).abs() < 1e-12);
    }

    #[test]
    fn kcut_preconditions() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        assert!(hitting_probability(&s, &m, &[1, 0, 0], 7, McBudget::new(10, 1)).is_err());
        assert!(hitting_probability(&s, &m, &[1, 0, 0], 8, McBudget::new(10, 1)).is_ok());
    }

    #[test]
    fn mean_se_basic() {
        let (m, se) = mean_se([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }
}
