//! One-sided α-stable laws with `E[e^{−λV}] = e^{−t λ^α}`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeedTree;
use crate::walk::mean_se;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableSampler {
    alpha: f64,
    scale: f64,
    /// `t^{1/α}`.
    factor: f64,
}

impl StableSampler {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::usage(format!("stable index must lie in (0,1), got {alpha}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::usage(format!("stable scale must be positive, got {scale}")));
        }
        Ok(StableSampler { alpha, scale, factor: scale.powf(1.0 / alpha) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Kanter's representation:
    /// `sin(αU)/sin(U)^{1/α} · (sin((1−α)U)/E)^{(1−α)/α}`, `U ~ Unif(0,π)`, `E ~ Exp(1)`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.factor * unit_stable(self.alpha, rng)
    }
}

pub(crate) fn unit_stable(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = std::f64::consts::PI * rng.random::<f64>();
        let e = -(1.0 - rng.random::<f64>()).ln();
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
        let b = ((1.0 - alpha) * u).sin() / e;
        let v = a * b.powf((1.0 - alpha) / alpha);
        if v > 0.0 && v.is_finite() {
            return v;
        }
    }
}

pub fn sample_stable(alpha: f64, t: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    Ok(StableSampler::new(alpha, t)?.sample(rng))
}

/// Draws `n` unit-scale samples; chunk `i` uses stream `i`, so the result
/// does not depend on the number of threads.
pub fn stable_draws(alpha: f64, t: f64, n: usize, seed: u64, purpose: &str) -> Result<Vec<f64>> {
    const CHUNK: usize = 4096;
    let sampler = StableSampler::new(alpha, t)?;
    let tree = SeedTree::new(seed, purpose);
    Ok((0..n.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = tree.stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(move |_| sampler.sample(&mut rng))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceRow {
    pub lambda: f64,
    pub empirical: f64,
    pub target: f64,
    pub standard_error: f64,
    pub z: f64,
}

/// `E[e^{−λV}]` against `e^{−λ^α}` for unit-scale draws.
pub fn laplace_check(alpha: f64, lambdas: &[f64], draws: usize, seed: u64) -> Result<Vec<LaplaceRow>> {
    if draws < 10_000 {
        return Err(Error::usage(format!("laplace check needs at least 10^4 draws, got {draws}")));
    }
    let v = stable_draws(alpha, 1.0, draws, seed, "laplace-check")?;
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let (empirical, se) = mean_se(v.iter().map(|&x| (-lambda * x).exp()));
            let target = (-lambda.powf(alpha)).exp();
            let z = if se > 0.0 { (empirical - target) / se } else if empirical == target { 0.0 } else { f64::INFINITY };
            LaplaceRow { lambda, empirical, target, standard_error: se, z }
        })
        .collect())
}
