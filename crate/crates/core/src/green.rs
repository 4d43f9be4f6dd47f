//! Green function `G(0,x) = Σ_{n≥1} P(Sₙ = x)`: exact lattice dynamic
//! programming, Monte Carlo through site local times, and the Spitzer
//! asymptotic.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{check_dim, Error, Result};
use crate::norms::NormSpec;
use crate::census::SphereCensus;
use crate::functions::FunctionSpec;
use crate::summability::census_side_sum;
use crate::walk::{mean_se, simulate, site_visit_runs, spitzer_for, McBudget, SiteTracking, StepDistribution, WalkRun};

/// Largest DP grid (cells, including ghost layers).
pub const DP_CELL_BUDGET: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenMethod {
    Dp,
    MonteCarlo,
    Asymptotic,
}

impl GreenMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            GreenMethod::Dp => "dp",
            GreenMethod::MonteCarlo => "mc",
            GreenMethod::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenEstimate {
    pub x: Vec<i64>,
    pub value: f64,
    pub method: GreenMethod,
    /// DP: width of the certified interval above `lower`. MC: standard error.
    pub error_bound: f64,
    /// DP: `Σ_{n≤n_max} P(Sₙ = x)`, a certified lower bound. MC: uncorrected mean.
    pub lower: f64,
    /// DP: `n_max`. MC: replica count.
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp: Option<DpDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpDiagnostics {
    pub box_radius: u64,
    pub folded: bool,
    /// Local-CLT estimate of `Σ_{n>n_max} P(Sₙ = x)`.
    pub tail_estimate: f64,
    /// Conservative tail constant `2(2πσ²)^{−d/2} N^{1−d/2}/(d/2−1)`.
    pub tail_bound: f64,
    /// Probability mass absorbed at the box boundary by time `n_max`.
    pub leaked_mass: f64,
    /// Bound on the visits lost with the leaked mass.
    pub leak_bound: f64,
    /// `partial[n−1] = Σ_{m≤n} P(S_m = x)` at `n = 1, 2, 4, 8, …` and `n_max`.
    pub checkpoints: Vec<(u64, f64)>,
}

/// `Γ(d/2−1)/(2π^{d/2}) |det Q|^{−1/2} (x·Q⁻¹x)^{1−d/2}`.
pub fn spitzer_asymptotic(q: &[f64], d: usize, x: &[f64]) -> Result<f64> {
    if d < 3 {
        return Err(Error::usage("the Spitzer asymptotic needs d >= 3"));
    }
    check_dim(d * d, q.len())?;
    check_dim(d, x.len())?;
    let m = DMatrix::from_row_slice(d, d, q);
    let det = m.determinant();
    let chol = m.clone().cholesky().ok_or_else(|| Error::usage("covariance matrix is singular or not positive definite"))?;
    if det.abs() < 1e-300 {
        return Err(Error::usage("covariance matrix is singular"));
    }
    let xv = nalgebra::DVector::from_column_slice(x);
    let quad = xv.dot(&chol.solve(&xv));
    if quad <= 0.0 {
        return Err(Error::usage("the Spitzer asymptotic is not defined at x = 0"));
    }
    let hd = d as f64 / 2.0;
    Ok(gamma(hd - 1.0) / (2.0 * std::f64::consts::PI.powf(hd)) * det.abs().powf(-0.5) * quad.powf(1.0 - hd))
}

/// Spitzer value as a [`GreenEstimate`].
pub fn green_asymptotic(step: &StepDistribution, x: &[i64]) -> Result<GreenEstimate> {
    let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
    let value = spitzer_asymptotic(step.covariance(), step.dim(), &xf)?;
    Ok(GreenEstimate { x: x.to_vec(), value, method: GreenMethod::Asymptotic, error_bound: f64::NAN, lower: value, budget: 0, dp: None })
}

/// Default DP box: `max(4‖x‖∞, 2√n_max)`.
pub fn default_box_radius(targets: &[Vec<i64>], n_max: u64) -> u64 {
    let m = targets.iter().flat_map(|x| x.iter().map(|c| c.unsigned_abs())).max().unwrap_or(0);
    (4 * m).max((2.0 * (n_max as f64).sqrt()).ceil() as u64)
}

struct Grid {
    d: usize,
    ghost: usize,
    /// Cells per axis including both ghost layers.
    side: usize,
    lo: i64,
    strides: Vec<usize>,
    folded: bool,
}

impl Grid {
    fn index(&self, y: &[i64]) -> Option<usize> {
        let interior = self.side - 2 * self.ghost;
        let mut idx = 0;
        for (i, &c) in y.iter().enumerate() {
            let c = if self.folded { c.abs() } else { c };
            let off = c - self.lo;
            if off < 0 || off as usize >= interior {
                return None;
            }
            idx += (off as usize + self.ghost) * self.strides[i];
        }
        Some(idx)
    }

    /// Start index of every interior row along the last axis.
    fn rows(&self) -> Vec<usize> {
        let interior = self.side - 2 * self.ghost;
        let mut out = Vec::new();
        let mut ix = vec![0usize; self.d.saturating_sub(1)];
        loop {
            let start: usize =
                ix.iter().enumerate().map(|(i, &v)| (v + self.ghost) * self.strides[i]).sum::<usize>() + self.ghost;
            out.push(start);
            let mut axis = ix.len();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                ix[axis] += 1;
                if ix[axis] < interior {
                    break;
                }
                ix[axis] = 0;
            }
        }
    }

    /// Multiplicity of each interior cell: number of lattice points it stands for.
    fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.side.pow(self.d as u32)];
        let interior = self.side - 2 * self.ghost;
        for start in self.rows() {
            for i in 0..interior {
                let idx = start + i;
                let mut m = 1.0;
                if self.folded {
                    for a in 0..self.d {
                        let c = (idx / self.strides[a]) % self.side;
                        if c != self.ghost {
                            m *= 2.0;
                        }
                    }
                }
                w[idx] = m;
            }
        }
        w
    }

    /// `(ghost, source)` copies that mirror the cells next to each zero plane
    /// into the ghost layer, axis by axis so corner ghosts are filled too.
    fn ghost_pairs(&self) -> Vec<(usize, usize)> {
        if !self.folded {
            return Vec::new();
        }
        let g = self.ghost;
        let total = self.side.pow(self.d as u32);
        let mut out = Vec::new();
        for axis in 0..self.d {
            let stride = self.strides[axis];
            for idx in 0..total {
                let c = (idx / stride) % self.side;
                if c < g {
                    out.push((idx, idx + 2 * (g - c) * stride));
                }
            }
        }
        out
    }
}

/// Tail `Σ_{n>N} P(Sₙ = x)` from the local CLT
/// `c (2πn)^{−d/2} det Q^{−1/2} exp(−x·Q⁻¹x / 2n)`, with `c = 2` on the
/// allowed parity class of bipartite walks.
fn lclt_tail(step: &StepDistribution, x: &[i64], n_max: u64) -> Result<f64> {
    let d = step.dim();
    let m = DMatrix::from_row_slice(d, d, step.covariance());
    let det = m.determinant();
    let inv = m.try_inverse().ok_or_else(|| Error::usage("covariance matrix is singular"))?;
    let xv = nalgebra::DVector::from_iterator(d, x.iter().map(|&c| c as f64));
    let quad = xv.dot(&(&inv * &xv));
    let bip = step.is_bipartite();
    let parity = x.iter().map(|c| c.abs()).sum::<i64>() as u64 % 2;
    let hd = d as f64 / 2.0;
    let pref = det.powf(-0.5) * (2.0 * std::f64::consts::PI).powf(-hd);
    let term = |n: f64| pref * n.powf(-hd) * (-quad / (2.0 * n)).exp();
    let stop = n_max.saturating_mul(200).max(n_max + 10_000);
    let mut sum = 0.0;
    for n in n_max + 1..=stop {
        if bip {
            if n % 2 == parity {
                sum += 2.0 * term(n as f64);
            }
        } else {
            sum += term(n as f64);
        }
    }
    // remainder past `stop`, where the exponential factor is ~1
    sum += pref * (stop as f64).powf(1.0 - hd) / (hd - 1.0);
    Ok(sum)
}

fn tail_constant_bound(step: &StepDistribution, n_max: u64) -> f64 {
    let hd = step.dim() as f64 / 2.0;
    2.0 * (2.0 * std::f64::consts::PI * step.sigma2()).powf(-hd) * (n_max as f64).powf(1.0 - hd) / (hd - 1.0)
}

/// DP over the box `[-R, R]^d` for several targets at once (the origin is
/// always tracked). Sign-symmetric laws are folded onto one orthant.
pub fn green_dp_many(step: &StepDistribution, targets: &[Vec<i64>], n_max: u64, box_radius: u64) -> Result<Vec<GreenEstimate>> {
    green_dp_impl(step, targets, n_max, box_radius, step.is_sign_symmetric())
}

pub fn green_dp(step: &StepDistribution, x: &[i64], n_max: u64, box_radius: u64) -> Result<GreenEstimate> {
    Ok(green_dp_many(step, &[x.to_vec()], n_max, box_radius)?.remove(0))
}

fn green_dp_impl(step: &StepDistribution, targets: &[Vec<i64>], n_max: u64, box_radius: u64, folded: bool) -> Result<Vec<GreenEstimate>> {
    let d = step.dim();
    if step.is_recurrent() {
        return Err(Error::usage(step.recurrence_note().unwrap_or_default()));
    }
    if n_max == 0 {
        return Err(Error::usage("n_max must be at least 1"));
    }
    for x in targets {
        check_dim(d, x.len())?;
        if x.iter().any(|c| c.unsigned_abs() > box_radius) {
            return Err(Error::usage(format!("target {x:?} lies outside the DP box of radius {box_radius}")));
        }
    }
    let r = box_radius as i64;
    let ghost = step.max_jump().max(1) as usize;
    let (lo, interior) = if folded { (0, r as usize + 1) } else { (-r, 2 * r as usize + 1) };
    let side = interior + 2 * ghost;
    let cells = side.checked_pow(d as u32).filter(|&c| c <= DP_CELL_BUDGET).ok_or_else(|| {
        Error::Resource(format!("DP box of radius {box_radius} in d={d} exceeds {DP_CELL_BUDGET} cells"))
    })?;
    let mut strides = vec![1usize; d];
    for i in (0..d.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * side;
    }
    let grid = Grid { d, ghost, side, lo, strides, folded };
    let offsets: Vec<(isize, f64)> = step
        .support()
        .filter(|(_, p)| *p > 0.0)
        .map(|(s, p)| (s.iter().zip(&grid.strides).map(|(&c, &st)| c as isize * st as isize).sum(), p))
        .collect();
    let rows = grid.rows();
    let weights = grid.weights();
    let ghosts = grid.ghost_pairs();
    let origin = vec![0i64; d];
    let mut tracked: Vec<usize> = targets.iter().map(|x| grid.index(x).expect("target checked against box")).collect();
    tracked.push(grid.index(&origin).expect("origin in box"));

    let mut u = vec![0.0f64; cells];
    let mut v = vec![0.0f64; cells];
    u[tracked[tracked.len() - 1]] = 1.0;
    let mut partial = vec![0.0f64; tracked.len()];
    let mut checkpoints: Vec<Vec<(u64, f64)>> = vec![Vec::new(); tracked.len()];
    let mut next_cp = 1u64;
    for n in 1..=n_max {
        for &(dst, src) in &ghosts {
            u[dst] = u[src];
        }
        for &start in &rows {
            for i in start..start + interior {
                let mut acc = 0.0;
                for &(off, p) in &offsets {
                    acc += p * u[(i as isize - off) as usize];
                }
                v[i] = acc;
            }
        }
        std::mem::swap(&mut u, &mut v);
        for (t, &idx) in tracked.iter().enumerate() {
            partial[t] += u[idx];
        }
        if n == next_cp || n == n_max {
            for t in 0..tracked.len() {
                checkpoints[t].push((n, partial[t]));
            }
            if n == next_cp {
                next_cp *= 2;
            }
        }
    }
    let mass: f64 = rows.iter().flat_map(|&s| s..s + interior).map(|i| u[i] * weights[i]).sum();
    let leaked = (1.0 - mass).max(0.0);
    let g0_tail = lclt_tail(step, &origin, n_max)?;
    let g0_total = partial[tracked.len() - 1] + g0_tail;
    let tail_bound = tail_constant_bound(step, n_max);
    let mut out = Vec::with_capacity(targets.len());
    for (t, x) in targets.iter().enumerate() {
        let tail = lclt_tail(step, x, n_max)?;
        // visits after leaving the box: at most (1 + G(0,0)) from any start
        let leak_bound = leaked * (1.0 + g0_total);
        out.push(GreenEstimate {
            x: x.clone(),
            value: partial[t] + tail,
            method: GreenMethod::Dp,
            error_bound: tail_bound.max(tail) + leak_bound,
            lower: partial[t],
            budget: n_max,
            dp: Some(DpDiagnostics {
                box_radius,
                folded,
                tail_estimate: tail,
                tail_bound,
                leaked_mass: leaked,
                leak_bound,
                checkpoints: std::mem::take(&mut checkpoints[t]),
            }),
        });
    }
    Ok(out)
}

/// Probability vector `P(Sₙ = ·)` on the full box after `n` steps, for tests
/// and parity checks, by sparse convolution. Mass leaving the box is dropped.
pub fn dp_distribution(step: &StepDistribution, n: u64, box_radius: u64) -> Result<Vec<(Vec<i64>, f64)>> {
    let d = step.dim();
    let r = box_radius as i64;
    let mut cur: std::collections::HashMap<Vec<i64>, f64> = std::collections::HashMap::new();
    cur.insert(vec![0; d], 1.0);
    for _ in 0..n {
        let mut next = std::collections::HashMap::new();
        for (y, p) in &cur {
            for (s, q) in step.support() {
                let z: Vec<i64> = y.iter().zip(s).map(|(a, b)| a + b).collect();
                if z.iter().all(|c| c.abs() <= r) {
                    *next.entry(z).or_insert(0.0) += p * q;
                }
            }
        }
        cur = next;
    }
    let mut out: Vec<_> = cur.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// `G(0,x)` as the mean of `L^S_∞(x)`; each replica adds the Spitzer value of
/// the visits expected after its exit point.
pub fn green_mc(step: &StepDistribution, spec: &NormSpec, x: &[i64], k_cut: u64, budget: McBudget) -> Result<GreenEstimate> {
    let rows = site_visit_runs(step, spec, x, k_cut, budget, "green-mc")?;
    Ok(green_from_visits(step, x, &rows, budget.replicas))
}

pub fn green_from_visits(step: &StepDistribution, x: &[i64], rows: &[crate::walk::SiteVisits], replicas: u64) -> GreenEstimate {
    let corrected = rows.iter().map(|v| {
        let z: Vec<i64> = x.iter().zip(&v.exit).map(|(a, b)| a - b).collect();
        v.visits_x as f64 + if v.truncated || z.iter().all(|&c| c == 0) { 0.0 } else { spitzer_for(step, &z) }
    });
    let (value, se) = mean_se(corrected);
    let (lower, _) = mean_se(rows.iter().map(|v| v.visits_x as f64));
    GreenEstimate { x: x.to_vec(), value, method: GreenMethod::MonteCarlo, error_bound: se, lower, budget: replicas, dp: None }
}

/// `|G − p(x)/(1−p(0))|` against three combined standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub green: f64,
    pub predicted: f64,
    pub difference: f64,
    pub combined_se: f64,
    pub z: f64,
    pub passes: bool,
}

pub fn green_vs_hitting(green: (f64, f64), p_x: (f64, f64), p_0: (f64, f64)) -> ConsistencyReport {
    let q = 1.0 - p_0.0;
    let predicted = p_x.0 / q;
    // delta method
    let pred_se = ((p_x.1 / q).powi(2) + (p_x.0 * p_0.1 / (q * q)).powi(2)).sqrt();
    let combined_se = (green.1.powi(2) + pred_se.powi(2)).sqrt();
    let difference = green.0 - predicted;
    let z = difference / combined_se;
    ConsistencyReport { green: green.0, predicted, difference, combined_se, z, passes: difference.abs() <= 3.0 * combined_se }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketRow {
    pub function: String,
    /// Monte Carlo `E[Σ_{n≤N} f(‖Sₙ‖)]`, including the `n = 0` term.
    pub mc_mean: f64,
    pub mc_se: f64,
    /// `f(0) + Σ_k k^{2−d} N(k) f(k)` over the census range.
    pub census_sum: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumBracket {
    pub horizon: u64,
    pub census_k_max: usize,
    pub rows: Vec<BracketRow>,
    pub lower: f64,
    pub upper: f64,
}

/// Empirical constants `c ≤ E[Σ f(‖Sₙ‖)] / (f(0) + Σ k^{2−d} N(k) f(k)) ≤ C`
/// across a family of `f`, sharing one path per replica.
pub fn expected_sum_bracket(
    step: &StepDistribution,
    spec: &NormSpec,
    fs: &[FunctionSpec],
    census: &SphereCensus,
    horizon: u64,
    budget: McBudget,
) -> Result<SumBracket> {
    check_dim(spec.dim(), step.dim())?;
    check_dim(census.dim(), step.dim())?;
    if fs.is_empty() {
        return Err(Error::usage("need at least one test function"));
    }
    if let Some(f) = fs.iter().find(|f| f.is_zero()) {
        return Err(Error::usage(format!("{} vanishes identically: the ratio is 0/0", f.label())));
    }
    if let Some(msg) = step.recurrence_note() {
        return Err(Error::usage(msg));
    }
    let tables: Vec<Vec<f64>> = fs.iter().map(|f| f.table(1 << 12)).collect();
    let sums: Vec<Vec<f64>> = (0..budget.replicas)
        .into_par_iter()
        .map(|r| {
            let mut acc: Vec<f64> = tables.iter().map(|t| t[0]).collect();
            let run = WalkRun::new(step, spec, budget.master_seed, r, horizon).purpose("sum-bracket");
            let mut obs = |_: u64, _: &[i64], k: u64| {
                for ((a, t), f) in acc.iter_mut().zip(&tables).zip(fs) {
                    *a += t.get(k as usize).copied().unwrap_or_else(|| f.eval(k));
                }
            };
            simulate(&run, SiteTracking::Off, &mut [&mut obs]).map(|_| acc)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<BracketRow> = fs
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let (mc_mean, mc_se) = mean_se(sums.iter().map(|s| s[j]));
            let census_sum = census_side_sum(f, census, census.k_max());
            BracketRow { function: f.label(), mc_mean, mc_se, census_sum, ratio: mc_mean / census_sum }
        })
        .collect();
    let lower = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let upper = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(SumBracket { horizon, census_k_max: census.k_max(), rows, lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::make_simple_walk;

    #[test]
    fn spitzer_simple_walk() {
        let s = make_simple_walk(3);
        let g = spitzer_asymptotic(s.covariance(), 3, &[2.0, 0.0, 0.0]).unwrap();
        assert!((g - 3.0 / (2.0 * std::f64::consts::PI) / 2.0).abs() < 1e-12);
        let g4 = spitzer_asymptotic(s.covariance(), 3, &[4.0, 0.0, 0.0]).unwrap();
        assert!((g / g4 - 2.0).abs() < 1e-12);
        // Q = σ²I: constant · σ⁻² |x|^{2−d}
        let s5 = make_simple_walk(5);
        let x = [1.0, 2.0, 0.0, 0.0, 1.0];
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let expect = gamma(1.5) / (2.0 * std::f64::consts::PI.powf(2.5)) * 5.0 * r2.powf(-1.5);
        assert!((spitzer_asymptotic(s5.covariance(), 5, &x).unwrap() / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spitzer_rejects_singular() {
        let q = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(spitzer_asymptotic(&q, 3, &[1.0, 0.0, 0.0]).is_err());
        assert!(spitzer_asymptotic(&[1.0, 0.0, 0.0, 1.0], 2, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn first_partial_sums_at_origin() {
        let s = make_simple_walk(3);
        let g = green_dp(&s, &[0, 0, 0], 4, 6).unwrap();
        let cp = &g.dp.unwrap().checkpoints;
        assert_eq!(cp[0], (1, 0.0));
        assert!((cp[1].1 - 1.0 / 6.0).abs() < 1e-15);
        // P(S4 = 0) = 90/6^4 · ... = 15/216 for d=3
        assert!((cp[2].1 - (1.0 / 6.0 + 15.0 / 216.0)).abs() < 1e-15);
    }

    #[test]
    fn folded_and_full_grids_agree() {
        let s = make_simple_walk(3);
        let xs = vec![vec![0, 0, 0], vec![1, 0, 0], vec![2, -1, 0], vec![-1, 1, 1]];
        let a = green_dp_impl(&s, &xs, 60, 12, true).unwrap();
        let b = green_dp_impl(&s, &xs, 60, 12, false).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.lower - q.lower).abs() < 1e-13, "{:?}", p.x);
            let (dp, dq) = (p.dp.as_ref().unwrap(), q.dp.as_ref().unwrap());
            assert!((dp.leaked_mass - dq.leaked_mass).abs() < 1e-12);
        }
    }

    #[test]
    fn dp_matches_sparse_convolution() {
        let s = StepDistribution::lazy_simple(3, 0.25).unwrap();
        let dist = dp_distribution(&s, 7, 7).unwrap();
        let want: f64 = (1..=7).map(|n| dp_distribution(&s, n, 7).unwrap().iter().find(|(y, _)| y == &vec![1, 1, 0]).map_or(0.0, |t| t.1)).sum();
        let g = green_dp(&s, &[1, 1, 0], 7, 7).unwrap();
        assert!((g.lower - want).abs() < 1e-14);
        let total: f64 = dist.iter().map(|t| t.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_zeros_are_exact() {
        let s = make_simple_walk(3);
        for (y, p) in dp_distribution(&s, 5, 5).unwrap() {
            if y.iter().map(|c| c.abs()).sum::<i64>() % 2 == 0 {
                assert_eq!(p, 0.0);
            }
        }
        let g = green_dp(&s, &[1, 0, 0], 8, 8).unwrap();
        let cp = g.dp.unwrap().checkpoints;
        // partial sums only change on odd n, so n=2 and n=1 agree exactly
        assert_eq!(cp[0].1, cp[1].1);
    }

    #[test]
    fn origin_value_and_symmetry() {
        let s = make_simple_walk(3);
        let xs = vec![vec![0, 0, 0], vec![1, 0, 0], vec![-1, 0, 0], vec![0, 2, 1], vec![0, -2, -1]];
        let g = green_dp_many(&s, &xs, 400, 40).unwrap();
        assert!((g[0].value - 0.5164).abs() < 0.005, "{}", g[0].value);
        assert!((g[1].value - g[0].value).abs() < 0.005);
        assert_eq!(g[1].lower, g[2].lower);
        assert_eq!(g[3].lower, g[4].lower);
        assert!(g[0].lower <= g[0].value && g[0].value <= g[0].lower + g[0].error_bound);
    }

    #[test]
    fn partial_sums_nondecreasing() {
        let s = make_simple_walk(3);
        let g = green_dp(&s, &[2, 1, 0], 128, 20).unwrap();
        let cp = g.dp.unwrap().checkpoints;
        assert!(cp.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn dp_budget_and_domain() {
        let s = make_simple_walk(3);
        assert!(green_dp(&s, &[0, 0, 0], 10, 5000).unwrap_err().is_resource());
        assert!(green_dp(&s, &[9, 0, 0], 10, 5).is_err());
        assert!(green_dp(&make_simple_walk(2), &[0, 0], 10, 5).is_err());
    }

    #[test]
    fn consistency_report() {
        let ok = green_vs_hitting((0.5, 0.01), (0.34, 0.005), (0.34, 0.005));
        assert!(ok.passes);
        let bad = green_vs_hitting((1.03, 0.01), (0.34, 0.005), (0.34, 0.005));
        assert!(!bad.passes);
    }

    #[test]
    fn mc_far_target_is_zero() {
        let s = make_simple_walk(3);
        let m = NormSpec::max(3);
        let g = green_mc(&s, &m, &[100, 0, 0], 8, McBudget::new(50, 3)).unwrap();
        assert_eq!(g.lower, 0.0);
        let g2 = green_mc(&s, &m, &[100, 0, 0], 8, McBudget::new(50, 3)).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn sum_bracket() {
        let s = make_simple_walk(3);
        let spec = NormSpec::max(3);
        let c = crate::census::census(&spec, 400, false).unwrap();
        let budget = McBudget::new(1500, 3);
        let fs = [FunctionSpec::indicator_le(5), FunctionSpec::power_law(4.0)];
        let a = expected_sum_bracket(&s, &spec, &fs, &c, 5_000, budget).unwrap();
        assert!(a.lower >= 0.1 && a.upper <= 10.0, "{a:?}");
        let b = expected_sum_bracket(&s, &spec, &fs[1..], &c, 10_000, budget).unwrap();
        assert!((b.rows[0].ratio / a.rows[1].ratio - 1.0).abs() < 0.05, "{a:?} {b:?}");
        assert!(expected_sum_bracket(&s, &spec, &[FunctionSpec::zero()], &c, 100, budget).is_err());
    }
}
