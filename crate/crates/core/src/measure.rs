//! Discrete sphere measures `μ_k`, their weak limit, and distributional checks
//! on scaled level local times.

use serde::Serialize;

use crate::census::{census, for_each_sphere_point};
use crate::error::{Error, Result};
use crate::norms::{NormFamily, NormSpec};
use crate::quadrature::gauss_legendre;
use crate::stats::{distributional_cauchy, permutation_band};
use crate::walk::{total_level_local_time, McBudget, StepDistribution, TruncationCertificate};

/// Bounded test functions on the unit sphere of a norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFn {
    One,
    Coord(usize),
    Square(usize),
    Product(usize, usize),
    /// `max(0, 1 − |x − c|/r)`, Lipschitz with constant `1/r`.
    Bump { center: Vec<f64>, radius: f64 },
}

impl TestFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFn::One => 1.0,
            TestFn::Coord(i) => x[*i],
            TestFn::Square(i) => x[*i] * x[*i],
            TestFn::Product(i, j) => x[*i] * x[*j],
            TestFn::Bump { center, radius } => {
                let r: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                (1.0 - r / radius).max(0.0)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFn::One => "1".into(),
            TestFn::Coord(i) => format!("x{}", i + 1),
            TestFn::Square(i) => format!("x{}^2", i + 1),
            TestFn::Product(i, j) => format!("x{}x{}", i + 1, j + 1),
            TestFn::Bump { radius, .. } => format!("bump(r={radius})"),
        }
    }

    /// Constant, coordinates, squares, two products and a bump.
    pub fn default_battery(d: usize) -> Vec<TestFn> {
        let mut v = vec![TestFn::One, TestFn::Coord(0), TestFn::Square(0)];
        if d >= 2 {
            v.push(TestFn::Square(d - 1));
            v.push(TestFn::Product(0, 1));
            v.push(TestFn::Product(0, d - 1));
        }
        let mut center = vec![0.0; d];
        center[0] = 1.0;
        if d >= 2 {
            center[1] = 0.5;
        }
        v.push(TestFn::Bump { center, radius: 0.75 });
        v
    }
}

/// `μ_k`: uniform mass on `{x/k : ‖x‖ = k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereMeasure {
    pub spec: NormSpec,
    pub k: u64,
    pub points: Vec<Vec<f64>>,
}

impl SphereMeasure {
    pub fn new(spec: &NormSpec, k: u64) -> Result<Self> {
        let mut points = Vec::new();
        let kf = k.max(1) as f64;
        for_each_sphere_point(spec, k, |x| points.push(x.iter().map(|&c| c as f64 / kf).collect()))?;
        if points.is_empty() {
            return Err(Error::usage(format!("N({k}) = 0 for {spec}: μ_k is undefined")));
        }
        Ok(SphereMeasure { spec: spec.clone(), k, points })
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }
}

/// First nonzero coordinate is positive.
fn leading_positive(x: &[i64]) -> Option<bool> {
    x.iter().find(|&&c| c != 0).map(|&c| c > 0)
}

/// `(1/N(k)) Σ_{‖x‖=k} f(x/k)`, summed over `±x` pairs so odd functions give 0 exactly.
pub fn mu_k_integral(spec: &NormSpec, k: u64, f: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let d = spec.dim();
    let kf = k.max(1) as f64;
    let (mut n, mut sum) = (0u64, 0.0f64);
    let mut y = vec![0.0; d];
    let mut ny = vec![0.0; d];
    for_each_sphere_point(spec, k, |x| {
        n += 1;
        match leading_positive(x) {
            Some(true) => {
                for i in 0..d {
                    y[i] = x[i] as f64 / kf;
                    ny[i] = -y[i];
                }
                sum += f(&y) + f(&ny);
            }
            Some(false) => {}
            None => sum += f(&vec![0.0; d]),
        }
    })?;
    if n == 0 {
        return Err(Error::usage(format!("N({k}) = 0 for {spec}: μ_k is undefined")));
    }
    Ok(sum / n as f64)
}

/// Uniform surface measure on the boundary of `[-1,1]^d`, integrated face by
/// face with a tensor Gauss–Legendre rule of the given order.
pub fn mu_surface_integral_max(spec: &NormSpec, f: &dyn Fn(&[f64]) -> f64, order: usize) -> Result<f64> {
    if spec.family() != NormFamily::Max || spec.transform().is_some() {
        return Err(Error::Unsupported(format!("analytic surface measure is only available for the max norm, not {spec}")));
    }
    let d = spec.dim();
    let (nodes, weights) = gauss_legendre(order);
    let mut total = 0.0;
    let mut x = vec![0.0; d];
    let mut ix = vec![0usize; d.saturating_sub(1)];
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            ix.iter_mut().for_each(|v| *v = 0);
            loop {
                let mut w = 1.0;
                let mut t = 0;
                for (j, xj) in x.iter_mut().enumerate() {
                    if j == axis {
                        *xj = sign;
                    } else {
                        *xj = nodes[ix[t]];
                        w *= weights[ix[t]];
                        t += 1;
                    }
                }
                total += w * f(&x);
                if !crate::norms::odometer_usize(&mut ix, order) {
                    break;
                }
            }
        }
    }
    Ok(total / (2.0 * d as f64 * 2f64.powi(d as i32 - 1)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvergenceRow {
    pub testfn: String,
    pub reference: f64,
    /// `(k, |∫ f dμ_k − reference|)`.
    pub discrepancies: Vec<(u64, f64)>,
    /// Number of ladder steps where the discrepancy went up.
    pub inversions: usize,
    /// `max_k k · discrepancy`.
    pub fitted_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvergenceReport {
    pub spec: String,
    /// `"analytic"` or `"proxy:k_ref"`.
    pub reference: String,
    pub rows: Vec<WeakConvergenceRow>,
}

/// Discrepancies along a `k` ladder, against the analytic cube-surface
/// reference for the max norm, or against `μ_{k_ref}` with
/// `k_ref = 4 · max(ladder)` otherwise.
pub fn weak_convergence_report(spec: &NormSpec, testfns: &[TestFn], ladder: &[u64]) -> Result<WeakConvergenceReport> {
    let analytic = spec.family() == NormFamily::Max && spec.transform().is_none();
    let k_ref = 4 * ladder.iter().copied().max().unwrap_or(1);
    let mut rows = Vec::new();
    for tf in testfns {
        let f = |x: &[f64]| tf.eval(x);
        let reference = if analytic { mu_surface_integral_max(spec, &f, 48)? } else { mu_k_integral(spec, k_ref, &f)? };
        let discrepancies: Vec<(u64, f64)> =
            ladder.iter().map(|&k| Ok((k, (mu_k_integral(spec, k, &f)? - reference).abs()))).collect::<Result<_>>()?;
        // differences at the level of rounding count as ties
        let inversions = discrepancies.windows(2).filter(|w| w[1].1 > w[0].1 + 1e-12).count();
        let fitted_c = discrepancies.iter().map(|&(k, e)| k as f64 * e).fold(0.0, f64::max);
        rows.push(WeakConvergenceRow { testfn: tf.label(), reference, discrepancies, inversions, fitted_c });
    }
    Ok(WeakConvergenceReport {
        spec: spec.to_string(),
        reference: if analytic { "analytic".into() } else { format!("proxy:{k_ref}") },
        rows,
    })
}

/// `L^{‖S‖}_∞(k)/(k^{2−d} N(k))` over replicas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledLocalTimeSample {
    pub k: u64,
    pub n_k: u64,
    pub scale: f64,
    pub samples: Vec<f64>,
    pub certificate: TruncationCertificate,
}

impl ScaledLocalTimeSample {
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

pub fn scaled_samples(step: &StepDistribution, spec: &NormSpec, k: u64, k_cut: u64, budget: McBudget) -> Result<ScaledLocalTimeSample> {
    let n_k = census(spec, k, false)?.counts[k as usize];
    if n_k == 0 {
        return Err(Error::usage(format!("N({k}) = 0 for {spec}")));
    }
    let raw = total_level_local_time(step, spec, k, k_cut, budget)?;
    let scale = (k as f64).powi(2 - spec.dim() as i32) * n_k as f64;
    Ok(ScaledLocalTimeSample {
        k,
        n_k,
        scale,
        samples: raw.samples.iter().map(|&v| v as f64 / scale).collect(),
        certificate: raw.certificate,
    })
}

/// Fraction of samples equal to zero.
pub fn positivity_report(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::usage("positivity report needs at least one sample"));
    }
    Ok(samples.iter().filter(|&&v| v == 0.0).count() as f64 / samples.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub ladder: Vec<u64>,
    /// `KS(k_i, k_{i+1})`.
    pub ks_sequence: Vec<f64>,
    /// Permutation 95% band for each consecutive pair.
    pub noise_bands: Vec<f64>,
    pub zero_fraction: f64,
    pub mean_sequence: Vec<f64>,
    /// `max mean / min mean` along the ladder.
    pub mean_spread: f64,
    /// Every KS step satisfies `KS_{i+1} ≤ KS_i + band_{i+1}`.
    pub ks_non_increasing: bool,
}

/// Distributional Cauchy check along a doubling ladder.
pub fn invariance_report(samples: &[ScaledLocalTimeSample], permutations: usize, seed: u64) -> Result<InvarianceReport> {
    if samples.len() < 2 {
        return Err(Error::usage("invariance check needs at least two ladder levels"));
    }
    let mut ks_sequence = Vec::new();
    let mut noise_bands = Vec::new();
    for (i, w) in samples.windows(2).enumerate() {
        ks_sequence.push(distributional_cauchy(&w[0].samples, &w[1].samples)?.statistic);
        noise_bands.push(permutation_band(&w[0].samples, &w[1].samples, permutations, seed.wrapping_add(i as u64)));
    }
    let all: Vec<f64> = samples.iter().flat_map(|s| s.samples.iter().copied()).collect();
    let mean_sequence: Vec<f64> = samples.iter().map(|s| s.mean()).collect();
    let hi = mean_sequence.iter().copied().fold(f64::MIN, f64::max);
    let lo = mean_sequence.iter().copied().fold(f64::MAX, f64::min);
    let ks_non_increasing = (1..ks_sequence.len()).all(|i| ks_sequence[i] <= ks_sequence[i - 1] + noise_bands[i]);
    Ok(InvarianceReport {
        ladder: samples.iter().map(|s| s.k).collect(),
        ks_sequence,
        noise_bands,
        zero_fraction: positivity_report(&all)?,
        mean_sequence,
        mean_spread: hi / lo,
        ks_non_increasing,
    })
}
