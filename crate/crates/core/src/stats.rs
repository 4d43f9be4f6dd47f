//! Two-sample Kolmogorov–Smirnov statistics.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::replica_rng;

/// Asymptotic 5% coefficient `c(α)` of the two-sample test.
pub const KS_C_05: f64 = 1.358;

/// `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    ks_sorted(&a, &b)
}

fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// `c(α) √((n+m)/(nm))` at the 5% level.
pub fn ks_critical(n: usize, m: usize) -> f64 {
    KS_C_05 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_05: f64,
    pub n: usize,
    pub m: usize,
    /// The 5% test does not reject equality in law.
    pub same_law: bool,
}

/// KS distance with the asymptotic 5% decision. Both samples need ≥ 100 points.
pub fn distributional_cauchy(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::usage(format!("KS comparison needs at least 100 samples per side (got {}, {})", a.len(), b.len())));
    }
    let statistic = ks_statistic(a, b);
    let critical_05 = ks_critical(a.len(), b.len());
    Ok(KsResult { statistic, critical_05, n: a.len(), m: b.len(), same_law: statistic <= critical_05 })
}

/// 95% quantile of the KS statistic over random relabelings of the pooled sample.
pub fn permutation_band(a: &[f64], b: &[f64], permutations: usize, seed: u64) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut rng = replica_rng(seed, "ks-permutation", 0);
    let mut stats: Vec<f64> = (0..permutations)
        .map(|_| {
            pooled.shuffle(&mut rng);
            let (x, y) = pooled.split_at(a.len());
            ks_statistic(x, y)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    stats[((0.95 * permutations as f64).ceil() as usize).min(permutations) - 1]
}
