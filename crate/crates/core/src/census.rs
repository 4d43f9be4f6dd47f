//! Sphere censuses `N(k) = #{x ∈ ℤᵈ : ‖x‖ = k}`.
//!
//! Counts come from independent routes: the max-norm closed form, the ℓ¹ and
//! weighted-ℓ¹ convolution recursions, and a brute-force box enumeration that
//! serves as the oracle for all of them.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{odometer, NormFamily, NormSpec};

/// Largest box (in lattice points) that [`count_bruteforce`] will enumerate.
pub const BRUTEFORCE_BUDGET: u128 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMethod {
    ClosedForm,
    Recursive,
    BruteForce,
}

impl CensusMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            CensusMethod::ClosedForm => "closed_form",
            CensusMethod::Recursive => "recursive",
            CensusMethod::BruteForce => "brute_force",
        }
    }
}

/// Table `k ↦ N(k)` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereCensus {
    pub spec: NormSpec,
    pub counts: Vec<u64>,
    pub method: CensusMethod,
}

impl SphereCensus {
    pub fn k_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn get(&self, k: usize) -> Option<u64> {
        self.counts.get(k).copied()
    }

    /// `#{x : ‖x‖ ≤ k}`.
    pub fn ball_count(&self, k: usize) -> u128 {
        self.counts[..=k.min(self.k_max())].iter().map(|&c| c as u128).sum()
    }

    /// CSV with header `k,count,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count,method\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{k},{c},{}\n", self.method.tag()));
        }
        out
    }
}

/// Enumerates a box of radius `R(spec, k_max)` and tallies every level.
///
/// The box is cut into slices along the first axis; slices are counted
/// independently and summed in slice order, so the result does not depend on
/// the number of worker threads.
pub fn count_bruteforce(spec: &NormSpec, k_max: u64) -> Result<SphereCensus> {
    let d = spec.dim();
    let r = spec.enclosing_box_radius(k_max) as i64;
    let side = 2 * r as u128 + 1;
    let cells = side.checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells > BRUTEFORCE_BUDGET {
        return Err(Error::Resource(format!(
            "brute-force box of radius {r} in d={d} has {cells} points (budget {BRUTEFORCE_BUDGET})"
        )));
    }
    let levels = k_max as usize + 1;
    let slices: Vec<Vec<u64>> = (-r..=r)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; levels];
            let mut x = vec![-r; d];
            x[0] = first;
            loop {
                let n = spec.eval(&x);
                if n <= k_max {
                    counts[n as usize] += 1;
                }
                if d == 1 || !odometer(&mut x[1..], -r, r) {
                    break;
                }
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; levels];
    for s in slices {
        for (c, v) in counts.iter_mut().zip(s) {
            *c += v;
        }
    }
    Ok(SphereCensus { spec: spec.clone(), counts, method: CensusMethod::BruteForce })
}

/// `(2k+1)^d − (2k−1)^d`, with `N(0) = 1`.
pub fn count_max_closed(d: usize, k: u64) -> Result<u64> {
    if k == 0 {
        return Ok(1);
    }
    let outer = (2 * k as u128 + 1).checked_pow(d as u32);
    let inner = (2 * k as u128 - 1).checked_pow(d as u32);
    match (outer, inner) {
        (Some(o), Some(i)) => u64::try_from(o - i).map_err(|_| Error::Overflow("evaluating the max-norm closed form")),
        _ => Err(Error::Overflow("evaluating the max-norm closed form")),
    }
}

/// One-dimensional ℓ¹ counts: 1, 2, 2, 2, …
fn l1_line(k_max: usize) -> Vec<u64> {
    (0..=k_max).map(|k| if k == 0 { 1 } else { 2 }).collect()
}

/// `out(k) = Σ_{j : k − stride·j ≥ 0} a(j) b(k − stride·j)`.
fn convolve_strided(a: &[u64], b: &[u64], stride: usize) -> Result<Vec<u64>> {
    (0..b.len())
        .map(|k| {
            let mut acc: u128 = 0;
            let mut j = 0;
            while stride * j <= k && j < a.len() {
                acc += a[j] as u128 * b[k - stride * j] as u128;
                j += 1;
            }
            u64::try_from(acc).map_err(|_| Error::Overflow("convolving census tables"))
        })
        .collect()
}

/// ℓ¹ counts from `N⁽ᵈ⁾ = N⁽¹⁾ * N⁽ᵈ⁻¹⁾`.
pub fn count_l1_recursive(d: usize, k_max: u64) -> Result<SphereCensus> {
    let spec = NormSpec::new(NormFamily::L1, d)?;
    let line = l1_line(k_max as usize);
    let mut table = line.clone();
    for _ in 1..d {
        table = convolve_strided(&line, &table, 1)?;
    }
    Ok(SphereCensus { spec, counts: table, method: CensusMethod::Recursive })
}

/// Weighted-ℓ¹ counts: the new coordinate has weight `d`, so the convolution
/// runs with stride `d` over the `(d−1)`-dimensional table.
pub fn count_w1_recursive(d: usize, k_max: u64) -> Result<SphereCensus> {
    let spec = NormSpec::new(NormFamily::WeightedL1, d)?;
    let line = l1_line(k_max as usize);
    let mut table = line.clone();
    for dd in 2..=d {
        table = convolve_strided(&line, &table, dd)?;
    }
    Ok(SphereCensus { spec, counts: table, method: CensusMethod::Recursive })
}

/// Census for the max family (closed form) or scaled max (closed form on even
/// levels, zero on the others).
pub fn count_max_family(spec: &NormSpec, k_max: u64) -> Result<SphereCensus> {
    let d = spec.dim();
    let counts = match spec.family() {
        NormFamily::Max => (0..=k_max).map(|k| count_max_closed(d, k)).collect::<Result<Vec<_>>>()?,
        NormFamily::ScaledMax { factor } => {
            let f = factor as u64;
            (0..=k_max)
                .map(|k| if k % f == 0 { count_max_closed(d, k / f) } else { Ok(0) })
                .collect::<Result<Vec<_>>>()?
        }
        _ => return Err(Error::usage("count_max_family needs a max or scaled-max norm")),
    };
    Ok(SphereCensus { spec: spec.clone(), counts, method: CensusMethod::ClosedForm })
}

/// The cheapest exact census for `spec`.
///
/// Unimodular transforms preserve sphere counts, so a transformed norm reuses
/// the table of its base family. Degenerate norms are refused unless
/// `allow_degenerate` is set.
pub fn census(spec: &NormSpec, k_max: u64, allow_degenerate: bool) -> Result<SphereCensus> {
    if spec.is_degenerate() && !allow_degenerate {
        return Err(Error::usage(format!(
            "{spec} violates (A3)/(A4); pass allow-degenerate to count it anyway"
        )));
    }
    let d = spec.dim();
    let mut c = match spec.family() {
        NormFamily::Max | NormFamily::ScaledMax { .. } => count_max_family(&spec.base(), k_max)?,
        NormFamily::L1 => count_l1_recursive(d, k_max)?,
        NormFamily::WeightedL1 => count_w1_recursive(d, k_max)?,
    };
    c.spec = spec.clone();
    Ok(c)
}

/// Compares the fast census for `spec` against brute force; returns the first
/// mismatching level, if any.
pub fn oracle_mismatch(spec: &NormSpec, k_max: u64) -> Result<Option<(usize, u64, u64)>> {
    let fast = census(spec, k_max, true)?;
    let brute = count_bruteforce(spec, k_max)?;
    Ok(fast
        .counts
        .iter()
        .zip(&brute.counts)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(k, (&a, &b))| (k, a, b)))
}

/// `|Σ_{k≤K} s^k N⁽ᵈ⁾₁(k) − ((1+s)/(1−s))^d|`.
pub fn gf_residual_l1(d: usize, s: f64, k_trunc: u64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::usage(format!("generating-function argument must lie in (0,1), got {s}")));
    }
    let table = count_l1_recursive(d, k_trunc)?;
    let mut partial = 0.0;
    let mut pow = 1.0;
    for &n in &table.counts {
        partial += pow * n as f64;
        pow *= s;
    }
    let target = ((1.0 + s) / (1.0 - s)).powi(d as i32);
    Ok((partial - target).abs())
}

/// `N(k) ~ c k^{d−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticConstant {
    pub family: &'static str,
    pub d: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub c: Ratio<u128>,
}

impl AsymptoticConstant {
    pub fn value(&self) -> f64 {
        *self.c.numer() as f64 / *self.c.denom() as f64
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

pub fn asymptotic_constant(spec: &NormSpec) -> Result<AsymptoticConstant> {
    if spec.transform().is_some() {
        return Err(Error::Unsupported("asymptotic constants are not claimed for transformed norms".into()));
    }
    let d = spec.dim();
    let c = match spec.family() {
        NormFamily::Max => Ratio::from_integer(d as u128 * (1u128 << d)),
        NormFamily::L1 => {
            let fact: u128 = (1..d as u128).product();
            Ratio::new(1u128 << d, fact)
        }
        NormFamily::WeightedL1 => (2..=d as u128).fold(Ratio::from_integer(2), |a, dd| a * Ratio::new(2, dd * (dd - 1))),
        NormFamily::ScaledMax { .. } => {
            return Err(Error::Unsupported("scaled max has zero counts on odd levels; no single constant".into()))
        }
    };
    Ok(AsymptoticConstant { family: spec.family().tag(), d, c })
}

/// (A4) on the table: `N(k)` non-decreasing for `k ≥ k0`.
pub fn check_a4(census: &SphereCensus, k0: usize) -> bool {
    census.counts.get(k0..).is_some_and(|tail| tail.windows(2).all(|w| w[0] <= w[1]))
}

/// Empirical `c1 ≤ N(k)/k^{d−1} ≤ c2` over `1 ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBounds {
    pub c1: f64,
    pub c2: f64,
}

pub fn growth_bounds(census: &SphereCensus) -> Result<GrowthBounds> {
    if census.k_max() < 1 {
        return Err(Error::usage("growth bounds need a census with k >= 1"));
    }
    if let Some(k) = (1..=census.k_max()).find(|&k| census.counts[k] == 0) {
        return Err(Error::ZeroCount { k });
    }
    if let Some(k) = (2..=census.k_max()).find(|&k| census.counts[k] < census.counts[k - 1]) {
        return Err(Error::NotMonotone { k });
    }
    Ok(ratio_bounds(census, census.dim() as i32 - 1, |k| census.counts[k] as f64))
}

/// Empirical constants for `#{‖x‖ ≤ k} ≍ k^d`.
pub fn ball_growth_bounds(census: &SphereCensus) -> GrowthBounds {
    let mut acc = census.counts[0] as f64;
    let cum: Vec<f64> = std::iter::once(acc)
        .chain(census.counts[1..].iter().map(|&c| {
            acc += c as f64;
            acc
        }))
        .collect();
    ratio_bounds(census, census.dim() as i32, |k| cum[k])
}

fn ratio_bounds(census: &SphereCensus, power: i32, value: impl Fn(usize) -> f64) -> GrowthBounds {
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for k in 1..=census.k_max() {
        let r = value(k) / (k as f64).powi(power);
        c1 = c1.min(r);
        c2 = c2.max(r);
    }
    GrowthBounds { c1, c2 }
}

/// Calls `visit` on every lattice point with `‖x‖ = k`, without scanning the
/// enclosing box. Transformed norms enumerate the base sphere and map it back
/// through `A⁻¹`.
pub fn for_each_sphere_point(spec: &NormSpec, k: u64, mut visit: impl FnMut(&[i64])) -> Result<()> {
    let d = spec.dim();
    let mut buf = vec![0i64; d];
    match spec.transform() {
        None => base_sphere(spec.family(), d, k, &mut buf, &mut visit),
        Some(a) => {
            let mut err = None;
            base_sphere(spec.family(), d, k, &mut buf, &mut |y: &[i64]| match a.apply_inverse(y) {
                Ok(x) => visit(&x),
                Err(e) => err = Some(e),
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(())
}

fn base_sphere(family: NormFamily, d: usize, k: u64, buf: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
    match family {
        NormFamily::Max => max_sphere(d, k as i64, 0, false, buf, visit),
        NormFamily::ScaledMax { factor } => {
            if k % factor as u64 == 0 {
                max_sphere(d, (k / factor as u64) as i64, 0, false, buf, visit)
            }
        }
        NormFamily::L1 => weighted_sphere(d, k as i64, 0, false, buf, visit),
        NormFamily::WeightedL1 => weighted_sphere(d, k as i64, 0, true, buf, visit),
    }
}

fn max_sphere(d: usize, k: i64, axis: usize, hit: bool, buf: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
    if k == 0 {
        buf.fill(0);
        visit(buf);
        return;
    }
    if axis == d - 1 {
        if hit {
            for v in -k..=k {
                buf[axis] = v;
                visit(buf);
            }
        } else {
            for v in [-k, k] {
                buf[axis] = v;
                visit(buf);
            }
        }
        return;
    }
    for v in -k..=k {
        buf[axis] = v;
        max_sphere(d, k, axis + 1, hit || v.abs() == k, buf, visit);
    }
}

fn weighted_sphere(d: usize, rem: i64, axis: usize, weighted: bool, buf: &mut [i64], visit: &mut dyn FnMut(&[i64])) {
    let w = if weighted { axis as i64 + 1 } else { 1 };
    if axis == d - 1 {
        if rem % w != 0 {
            return;
        }
        let v = rem / w;
        if v == 0 {
            buf[axis] = 0;
            visit(buf);
        } else {
            for s in [-v, v] {
                buf[axis] = s;
                visit(buf);
            }
        }
        return;
    }
    let top = rem / w;
    for v in -top..=top {
        buf[axis] = v;
        weighted_sphere(d, rem - w * v.abs(), axis + 1, weighted, buf, visit);
    }
}
