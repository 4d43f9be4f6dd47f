//! Integer-valued polytope norms on ℤᵈ.
//!
//! Every norm here is a base family (max, ℓ¹, weighted ℓ¹, scaled max)
//! optionally precomposed with a unimodular integer matrix, so that
//! `‖x‖ = ‖A x‖₀`. All lattice evaluations are exact and go through `i128`
//! intermediates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A point of ℤᵈ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::usage("lattice points need dimension >= 1"));
        }
        Ok(LatticePoint(coords))
    }

    pub fn origin(dim: usize) -> Self {
        LatticePoint(vec![0; dim.max(1)])
    }

    /// The `i`-th unit vector (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut c = vec![0; dim.max(1)];
        c[axis] = 1;
        LatticePoint(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        LatticePoint(self.0.iter().map(|c| -c).collect())
    }

    pub fn euclidean(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }
}

impl From<LatticePoint> for Vec<i64> {
    fn from(p: LatticePoint) -> Self {
        p.0
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for LatticePoint {
    type Err = Error;

    /// Parses `1,0,0` or `(1,0,0)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::usage(format!("bad lattice coordinate {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LatticePoint::new(coords)
    }
}

/// Exact determinant of a square integer matrix (row-major) by fraction-free
/// Bareiss elimination.
pub fn integer_determinant(dim: usize, entries: &[i64]) -> Result<i128> {
    check_dim(dim * dim, entries.len())?;
    if dim == 0 {
        return Ok(1);
    }
    let mut m: Vec<i128> = entries.iter().map(|&v| v as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..dim.saturating_sub(1) {
        if m[k * dim + k] == 0 {
            match (k + 1..dim).find(|&r| m[r * dim + k] != 0) {
                Some(r) => {
                    for c in 0..dim {
                        m.swap(k * dim + c, r * dim + c);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        let pivot = m[k * dim + k];
        for i in k + 1..dim {
            for j in k + 1..dim {
                let num = m[i * dim + j]
                    .checked_mul(pivot)
                    .and_then(|a| m[i * dim + k].checked_mul(m[k * dim + j]).and_then(|b| a.checked_sub(b)))
                    .ok_or(Error::Overflow("computing a determinant"))?;
                // Bareiss guarantees exact divisibility.
                m[i * dim + j] = num / prev;
            }
            m[i * dim + k] = 0;
        }
        prev = pivot;
    }
    Ok(sign * m[dim * dim - 1])
}

/// `true` iff the square integer matrix has determinant ±1.
pub fn validate_unimodular(dim: usize, entries: &[i64]) -> bool {
    matches!(integer_determinant(dim, entries), Ok(1) | Ok(-1))
}

/// A d×d integer matrix with determinant ±1, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatrix {
    dim: usize,
    entries: Vec<i64>,
    inverse: Vec<i64>,
    det: i8,
}

impl UnimodularMatrix {
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("transform dimension must be >= 1"));
        }
        let det = integer_determinant(dim, &entries)?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let inverse = adjugate(dim, &entries)?
            .into_iter()
            .map(|v| i64::try_from(v * det).map_err(|_| Error::Overflow("inverting a transform")))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnimodularMatrix { dim, entries, inverse, det: det as i8 })
    }

    pub fn identity(dim: usize) -> Self {
        let mut e = vec![0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 1;
        }
        UnimodularMatrix::new(dim, e).expect("identity is unimodular")
    }

    /// `I + E_{row,col}`: a shear, inverse `I - E_{row,col}`.
    pub fn shear(dim: usize, row: usize, col: usize) -> Result<Self> {
        if row == col || row >= dim || col >= dim {
            return Err(Error::usage("shear needs two distinct axes within the dimension"));
        }
        let mut e = UnimodularMatrix::identity(dim).entries;
        e[row * dim + col] = 1;
        UnimodularMatrix::new(dim, e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn inverse_entries(&self) -> &[i64] {
        &self.inverse
    }

    pub fn determinant(&self) -> i8 {
        self.det
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// `A x` in exact integer arithmetic.
    pub fn apply(&self, x: &[i64]) -> Vec<i128> {
        (0..self.dim).map(|i| dot_i128(self.row(i), x)).collect()
    }

    pub fn apply_inverse(&self, y: &[i64]) -> Result<Vec<i64>> {
        (0..self.dim)
            .map(|i| {
                let v = dot_i128(&self.inverse[i * self.dim..(i + 1) * self.dim], y);
                i64::try_from(v).map_err(|_| Error::Overflow("applying an inverse transform"))
            })
            .collect()
    }

    /// Largest absolute row sum of `A⁻¹`, i.e. the ∞→∞ operator norm.
    pub fn inverse_max_row_sum(&self) -> u64 {
        self.inverse
            .chunks(self.dim)
            .map(|r| r.iter().map(|v| v.unsigned_abs()).sum::<u64>())
            .max()
            .unwrap_or(1)
    }

    fn frobenius(&self) -> f64 {
        self.entries.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt()
    }
}

fn dot_i128(row: &[i64], x: &[i64]) -> i128 {
    row.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum()
}

fn adjugate(dim: usize, a: &[i64]) -> Result<Vec<i128>> {
    if dim == 1 {
        return Ok(vec![1]);
    }
    let mut adj = vec![0i128; dim * dim];
    let mut minor = Vec::with_capacity((dim - 1) * (dim - 1));
    for i in 0..dim {
        for j in 0..dim {
            minor.clear();
            for r in (0..dim).filter(|&r| r != i) {
                for c in (0..dim).filter(|&c| c != j) {
                    minor.push(a[r * dim + c]);
                }
            }
            let cof = integer_determinant(dim - 1, &minor)?;
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adj = transpose of the cofactor matrix
            adj[j * dim + i] = sign * cof;
        }
    }
    Ok(adj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormFamily {
    /// `max_i |xⁱ|`
    Max,
    /// `Σ |xⁱ|`
    L1,
    /// `Σ i·|xⁱ|` with 1-based weights.
    WeightedL1,
    /// `factor · max_i |xⁱ|`; violates (A3)/(A4) for factor ≥ 2.
    ScaledMax { factor: u32 },
}

impl NormFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            NormFamily::Max => "max",
            NormFamily::L1 => "l1",
            NormFamily::WeightedL1 => "weighted_l1",
            NormFamily::ScaledMax { .. } => "scaled_max",
        }
    }

    fn eval_i128(&self, ys: impl Iterator<Item = i128>) -> i128 {
        match *self {
            NormFamily::Max => ys.map(i128::abs).max().unwrap_or(0),
            NormFamily::L1 => ys.map(i128::abs).sum(),
            NormFamily::WeightedL1 => ys.enumerate().map(|(i, y)| (i as i128 + 1) * y.abs()).sum(),
            NormFamily::ScaledMax { factor } => factor as i128 * ys.map(i128::abs).max().unwrap_or(0),
        }
    }

    fn eval_f64(&self, ys: impl Iterator<Item = f64>) -> f64 {
        match *self {
            NormFamily::Max => ys.map(f64::abs).fold(0.0, f64::max),
            NormFamily::L1 => ys.map(f64::abs).sum(),
            NormFamily::WeightedL1 => ys.enumerate().map(|(i, y)| (i as f64 + 1.0) * y.abs()).sum(),
            NormFamily::ScaledMax { factor } => factor as f64 * ys.map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Sup of the base norm over the Euclidean unit sphere in dimension `d`.
    fn euclid_to_norm(&self, d: usize) -> f64 {
        match *self {
            NormFamily::Max => 1.0,
            NormFamily::L1 => (d as f64).sqrt(),
            NormFamily::WeightedL1 => ((1..=d).map(|i| (i * i) as f64).sum::<f64>()).sqrt(),
            NormFamily::ScaledMax { factor } => factor as f64,
        }
    }

    /// Vertices of the base unit ball.
    fn unit_ball_vertices(&self, d: usize) -> Vec<Vec<f64>> {
        match *self {
            NormFamily::Max | NormFamily::ScaledMax { .. } => {
                let s = match *self {
                    NormFamily::ScaledMax { factor } => 1.0 / factor as f64,
                    _ => 1.0,
                };
                (0..1u64 << d)
                    .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { s } else { -s }).collect())
                    .collect()
            }
            NormFamily::L1 | NormFamily::WeightedL1 => {
                let weighted = matches!(self, NormFamily::WeightedL1);
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..d {
                    let w = if weighted { 1.0 / (i + 1) as f64 } else { 1.0 };
                    for sign in [1.0, -1.0] {
                        let mut v = vec![0.0; d];
                        v[i] = sign * w;
                        out.push(v);
                    }
                }
                out
            }
        }
    }
}

impl FromStr for NormFamily {
    type Err = Error;

    /// Accepts `max`, `l1`, `w1`/`weighted_l1`, `scaled_max:<factor>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(f) = s.strip_prefix("scaled_max") {
            let factor = match f.trim_start_matches(':') {
                "" => 2,
                v => v.parse().map_err(|_| Error::usage(format!("bad scaled_max factor {v:?}")))?,
            };
            if factor == 0 {
                return Err(Error::usage("scaled_max factor must be positive"));
            }
            return Ok(NormFamily::ScaledMax { factor });
        }
        match s.as_str() {
            "max" | "linf" => Ok(NormFamily::Max),
            "l1" => Ok(NormFamily::L1),
            "w1" | "weighted_l1" | "wl1" => Ok(NormFamily::WeightedL1),
            other => Err(Error::usage(format!("unknown norm family {other:?}"))),
        }
    }
}

/// How (A3) stands for a norm. The crate never verifies (A3) algorithmically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    AssertedByFamily,
    Unverified,
    Violated,
}

/// A base family, its dimension, and an optional unimodular precomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecJson", into = "NormSpecJson")]
pub struct NormSpec {
    family: NormFamily,
    dim: usize,
    transform: Option<UnimodularMatrix>,
}

impl NormSpec {
    pub fn new(family: NormFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("norm dimension must be >= 1"));
        }
        if let NormFamily::ScaledMax { factor: 0 } = family {
            return Err(Error::usage("scaled_max factor must be positive"));
        }
        Ok(NormSpec { family, dim, transform: None })
    }

    pub fn max(dim: usize) -> Self {
        NormSpec::new(NormFamily::Max, dim).expect("dim >= 1")
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec::new(NormFamily::L1, dim).expect("dim >= 1")
    }

    pub fn weighted_l1(dim: usize) -> Self {
        NormSpec::new(NormFamily::WeightedL1, dim).expect("dim >= 1")
    }

    pub fn scaled_max(dim: usize, factor: u32) -> Result<Self> {
        NormSpec::new(NormFamily::ScaledMax { factor }, dim)
    }

    pub fn with_transform(mut self, transform: UnimodularMatrix) -> Result<Self> {
        check_dim(self.dim, transform.dim())?;
        self.transform = Some(transform);
        Ok(self)
    }

    /// The three-dimensional example `|x¹−x²| + |x²−x³| + |x¹−x²+x³|`.
    pub fn skew_l1_example() -> Self {
        let a = UnimodularMatrix::new(3, vec![1, -1, 0, 0, 1, -1, 1, -1, 1]).expect("unimodular");
        NormSpec::l1(3).with_transform(a).expect("dims match")
    }

    pub fn family(&self) -> NormFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transform(&self) -> Option<&UnimodularMatrix> {
        self.transform.as_ref()
    }

    /// The same family without the transform.
    pub fn base(&self) -> NormSpec {
        NormSpec { family: self.family, dim: self.dim, transform: None }
    }

    /// ScaledMax with factor ≥ 2 breaks (A3)/(A4).
    pub fn is_degenerate(&self) -> bool {
        matches!(self.family, NormFamily::ScaledMax { factor } if factor >= 2)
    }

    pub fn a3_status(&self) -> AssumptionStatus {
        match (self.family, &self.transform) {
            (NormFamily::ScaledMax { factor }, _) if factor >= 2 => AssumptionStatus::Violated,
            (NormFamily::WeightedL1, Some(_)) => AssumptionStatus::Unverified,
            _ => AssumptionStatus::AssertedByFamily,
        }
    }

    /// Exact norm of a lattice point.
    pub fn norm_value(&self, x: &[i64]) -> Result<u64> {
        check_dim(self.dim, x.len())?;
        u64::try_from(self.eval_i128(x)).map_err(|_| Error::Overflow("evaluating a norm"))
    }

    /// Unchecked fast path for hot loops; the caller guarantees `x.len() == dim`.
    #[inline]
    pub fn eval(&self, x: &[i64]) -> u64 {
        debug_assert_eq!(x.len(), self.dim);
        self.eval_i128(x) as u64
    }

    #[inline]
    fn eval_i128(&self, x: &[i64]) -> i128 {
        match &self.transform {
            None => self.family.eval_i128(x.iter().map(|&v| v as i128)),
            Some(a) => self.family.eval_i128((0..self.dim).map(|i| dot_i128(a.row(i), x))),
        }
    }

    pub fn norm_value_real(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval_real(x))
    }

    #[inline]
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        match &self.transform {
            None => self.family.eval_f64(x.iter().copied()),
            Some(a) => self.family.eval_f64(
                (0..self.dim).map(|i| a.row(i).iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()),
            ),
        }
    }

    /// Radius `R` of a max-norm box certified to contain `B(0; k)`.
    ///
    /// Every base family dominates the max norm, so `‖A x‖∞ ≤ k₀` and
    /// `‖x‖∞ ≤ ‖A⁻¹‖∞ k₀` where `k₀` is the base-box radius.
    pub fn enclosing_box_radius(&self, k: u64) -> u64 {
        let base = match self.family {
            NormFamily::ScaledMax { factor } => k / factor as u64,
            _ => k,
        };
        match &self.transform {
            None => base,
            Some(a) => base * a.inverse_max_row_sum(),
        }
    }

    /// `(r_in, r_out)`: the unit sphere of the norm lies between the Euclidean
    /// spheres of these radii. With a transform `r_in` is only a lower bound.
    pub fn euclidean_bounds(&self) -> (f64, f64) {
        let d = self.dim;
        let verts = self.family.unit_ball_vertices(d);
        let r_out = verts
            .iter()
            .map(|v| match &self.transform {
                None => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
                Some(a) => {
                    let inv = a.inverse_entries();
                    (0..d)
                        .map(|i| {
                            let s: f64 = (0..d).map(|j| inv[i * d + j] as f64 * v[j]).sum();
                            s * s
                        })
                        .sum::<f64>()
                        .sqrt()
                }
            })
            .fold(0.0, f64::max);
        let c0 = self.family.euclid_to_norm(d);
        let r_in = match &self.transform {
            None => 1.0 / c0,
            Some(a) => 1.0 / (c0 * a.frobenius()),
        };
        (r_in, r_out)
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            NormFamily::ScaledMax { factor } => write!(f, "scaled_max:{factor}")?,
            fam => write!(f, "{}", fam.tag())?,
        }
        write!(f, "/d={}", self.dim)?;
        if self.transform.is_some() {
            write!(f, "+transform")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormSpecJson {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factor: Option<u32>,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<Vec<i64>>,
}

impl TryFrom<NormSpecJson> for NormSpec {
    type Error = Error;

    fn try_from(j: NormSpecJson) -> Result<Self> {
        let family = match j.family.as_str() {
            "scaled_max" => NormFamily::ScaledMax {
                factor: j.factor.ok_or_else(|| Error::usage("scaled_max needs a factor"))?,
            },
            other => {
                if j.factor.is_some() {
                    return Err(Error::usage("factor only applies to scaled_max"));
                }
                other.parse()?
            }
        };
        let spec = NormSpec::new(family, j.dim)?;
        match j.transform {
            None => Ok(spec),
            Some(entries) => {
                check_dim(j.dim * j.dim, entries.len())?;
                spec.with_transform(UnimodularMatrix::new(j.dim, entries)?)
            }
        }
    }
}

impl From<NormSpec> for NormSpecJson {
    fn from(s: NormSpec) -> Self {
        NormSpecJson {
            family: s.family.tag().to_string(),
            factor: match s.family {
                NormFamily::ScaledMax { factor } => Some(factor),
                _ => None,
            },
            dim: s.dim,
            transform: s.transform.map(|t| t.entries),
        }
    }
}

/// Outcome of an (A1) scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Report {
    pub holds: bool,
    pub counterexample: Option<Vec<i64>>,
    pub points_checked: u64,
}

/// Scans the max-norm box of radius `box_radius` and checks that the real
/// evaluation of the norm is integral and agrees with the exact lattice value.
pub fn verify_a1(spec: &NormSpec, box_radius: u64) -> Result<A1Report> {
    if box_radius == 0 {
        return Err(Error::usage("box radius must be >= 1"));
    }
    let d = spec.dim();
    let r = box_radius as i64;
    let mut x = vec![-r; d];
    let mut xf = vec![0.0; d];
    let mut checked = 0u64;
    loop {
        for (f, &v) in xf.iter_mut().zip(&x) {
            *f = v as f64;
        }
        let exact = spec.norm_value(&x)?;
        let real = spec.eval_real(&xf);
        checked += 1;
        if real.fract() != 0.0 || real != exact as f64 {
            return Ok(A1Report { holds: false, counterexample: Some(x), points_checked: checked });
        }
        if !odometer(&mut x, -r, r) {
            break;
        }
    }
    Ok(A1Report { holds: true, counterexample: None, points_checked: checked })
}

/// Advances `x` through the box `[lo, hi]^d` in lexicographic order (last axis
/// fastest). Returns `false` once the box is exhausted.
pub(crate) fn odometer(x: &mut [i64], lo: i64, hi: i64) -> bool {
    for c in x.iter_mut().rev() {
        if *c < hi {
            *c += 1;
            return true;
        }
        *c = lo;
    }
    false
}

/// Same as [`odometer`] over `0..n` in every slot.
pub(crate) fn odometer_usize(x: &mut [usize], n: usize) -> bool {
    for c in x.iter_mut().rev() {
        if *c + 1 < n {
            *c += 1;
            return true;
        }
        *c = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        assert_eq!(NormSpec::max(3).norm_value(&[1, -2, 3]).unwrap(), 3);
        assert_eq!(NormSpec::weighted_l1(3).norm_value(&[1, -2, 3]).unwrap(), 14);
        assert_eq!(NormSpec::skew_l1_example().norm_value(&[1, 0, 0]).unwrap(), 2);
    }

    #[test]
    fn skew_example_matches_formula() {
        let n = NormSpec::skew_l1_example();
        let mut x = vec![-4i64; 3];
        loop {
            let expected = (x[0] - x[1]).abs() + (x[1] - x[2]).abs() + (x[0] - x[1] + x[2]).abs();
            assert_eq!(n.eval(&x), expected as u64, "{x:?}");
            if !odometer(&mut x, -4, 4) {
                break;
            }
        }
    }

    #[test]
    fn real_examples() {
        assert_eq!(NormSpec::l1(3).norm_value_real(&[0.5, -0.5, 0.0]).unwrap(), 1.0);
        assert_eq!(NormSpec::max(3).norm_value_real(&[0.0; 3]).unwrap(), 0.0);
        let s = NormSpec::scaled_max(3, 2).unwrap();
        assert_eq!(s.norm_value_real(&[1.0, 0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(matches!(
            NormSpec::max(3).norm_value(&[1, 2]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(NormSpec::l1(2).norm_value_real(&[1.0]).is_err());
    }

    #[test]
    fn weighted_sums_do_not_overflow() {
        let d = 40;
        let x = vec![-(1i64 << 31); d];
        let v = NormSpec::weighted_l1(d).norm_value(&x).unwrap();
        assert_eq!(v, (1u64 << 31) * (d as u64 * (d as u64 + 1) / 2));
    }

    #[test]
    fn determinants() {
        assert!(validate_unimodular(3, &[1, 0, 0, 0, 1, 0, 0, 0, 1]));
        assert_eq!(integer_determinant(3, &[1, -1, 0, 0, 1, -1, 1, -1, 1]).unwrap(), 1);
        assert!(validate_unimodular(3, &[1, -1, 0, 0, 1, -1, 1, -1, 1]));
        assert!(!validate_unimodular(3, &[2, 0, 0, 0, 1, 0, 0, 0, 1]));
        // needs a row swap
        assert_eq!(integer_determinant(2, &[0, 1, 1, 0]).unwrap(), -1);
        assert_eq!(integer_determinant(3, &[1, 2, 3, 2, 4, 6, 0, 1, 1]).unwrap(), 0);
    }

    /// Cofactor expansion along the first row; independent of Bareiss.
    fn det_cofactor(dim: usize, m: &[i64]) -> i128 {
        if dim == 1 {
            return m[0] as i128;
        }
        (0..dim)
            .map(|j| {
                let minor: Vec<i64> = (1..dim)
                    .flat_map(|r| (0..dim).filter(move |&c| c != j).map(move |c| (r, c)))
                    .map(|(r, c)| m[r * dim + c])
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[j] as i128 * det_cofactor(dim - 1, &minor)
            })
            .sum()
    }

    #[test]
    fn inverse_is_exact() {
        let a = UnimodularMatrix::new(3, vec![1, -1, 0, 0, 1, -1, 1, -1, 1]).unwrap();
        for x in [[1, 0, 0], [3, -2, 7], [0, 5, -5]] {
            let y: Vec<i64> = a.apply(&x).into_iter().map(|v| v as i64).collect();
            assert_eq!(a.apply_inverse(&y).unwrap(), x.to_vec());
        }
    }

    #[test]
    fn non_unimodular_transform_rejected_at_construction() {
        assert!(matches!(
            UnimodularMatrix::new(3, vec![2, 0, 0, 0, 1, 0, 0, 0, 1]),
            Err(Error::NotUnimodular { det: 2 })
        ));
        let json = r#"{"family":"l1","dim":2,"transform":[1,0.5,0,1]}"#;
        assert!(serde_json::from_str::<NormSpec>(json).is_err());
    }

    #[test]
    fn a1_scan() {
        assert!(verify_a1(&NormSpec::max(3), 5).unwrap().holds);
        assert!(verify_a1(&NormSpec::weighted_l1(4), 4).unwrap().holds);
        assert!(verify_a1(&NormSpec::skew_l1_example(), 3).unwrap().holds);
        assert!(verify_a1(&NormSpec::max(2), 0).is_err());
    }

    #[test]
    fn json_round_trip_reproduces_evaluations() {
        let specs = [
            NormSpec::max(3),
            NormSpec::scaled_max(2, 2).unwrap(),
            NormSpec::skew_l1_example(),
            NormSpec::weighted_l1(4).with_transform(UnimodularMatrix::shear(4, 0, 3).unwrap()).unwrap(),
        ];
        for s in specs {
            let json = serde_json::to_string(&s).unwrap();
            let back: NormSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
            assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
        let j = serde_json::to_string(&NormSpec::scaled_max(3, 2).unwrap()).unwrap();
        assert_eq!(j, r#"{"family":"scaled_max","factor":2,"dim":3}"#);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("max".parse::<NormFamily>().unwrap(), NormFamily::Max);
        assert_eq!("w1".parse::<NormFamily>().unwrap(), NormFamily::WeightedL1);
        assert_eq!("scaled-max:3".parse::<NormFamily>().unwrap(), NormFamily::ScaledMax { factor: 3 });
        assert!("euclid".parse::<NormFamily>().is_err());
    }

    #[test]
    fn enclosing_box_contains_ball() {
        let specs = [
            NormSpec::max(2),
            NormSpec::l1(2),
            NormSpec::weighted_l1(2),
            NormSpec::scaled_max(2, 2).unwrap(),
            NormSpec::skew_l1_example(),
        ];
        for s in specs {
            let k = 4;
            let r = s.enclosing_box_radius(k) as i64;
            let big = r + 3;
            let mut x = vec![-big; s.dim()];
            loop {
                if s.eval(&x) <= k {
                    assert!(x.iter().all(|c| c.abs() <= r), "{s}: {x:?} outside R={r}");
                }
                if !odometer(&mut x, -big, big) {
                    break;
                }
            }
        }
    }

    #[test]
    fn euclidean_bounds_bracket_the_sphere() {
        for s in [NormSpec::max(3), NormSpec::l1(3), NormSpec::weighted_l1(3), NormSpec::skew_l1_example()] {
            let (r_in, r_out) = s.euclidean_bounds();
            let mut x = vec![-3i64; 3];
            loop {
                let n = s.eval(&x);
                if n > 0 {
                    let e = LatticePoint(x.clone()).euclidean() / n as f64;
                    assert!(e >= r_in - 1e-12 && e <= r_out + 1e-12, "{s} {x:?}: {e} not in [{r_in},{r_out}]");
                }
                if !odometer(&mut x, -3, 3) {
                    break;
                }
            }
        }
    }

    fn arb_spec() -> impl Strategy<Value = NormSpec> {
        prop_oneof![
            Just(NormSpec::max(3)),
            Just(NormSpec::l1(3)),
            Just(NormSpec::weighted_l1(3)),
            Just(NormSpec::scaled_max(3, 2).unwrap()),
            Just(NormSpec::skew_l1_example()),
        ]
    }

    fn arb_point() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-5i64..=5, 3)
    }

    proptest! {
        #[test]
        fn norm_axioms(s in arb_spec(), x in arb_point(), y in arb_point(), n in 0i64..6) {
            let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert!(s.eval(&sum) <= s.eval(&x) + s.eval(&y));
            let neg: Vec<i64> = x.iter().map(|c| -c).collect();
            prop_assert_eq!(s.eval(&neg), s.eval(&x));
            prop_assert_eq!(s.eval(&x) == 0, x.iter().all(|&c| c == 0));
            let scaled: Vec<i64> = x.iter().map(|c| n * c).collect();
            prop_assert_eq!(s.eval(&scaled), n as u64 * s.eval(&x));
        }

        #[test]
        fn real_agrees_with_lattice(s in arb_spec(), x in arb_point()) {
            let xf: Vec<f64> = x.iter().map(|&c| c as f64).collect();
            prop_assert_eq!(s.eval_real(&xf), s.eval(&x) as f64);
        }

        #[test]
        fn real_is_homogeneous(s in arb_spec(), x in prop::collection::vec(-3.0f64..3.0, 3), lam in 0.0f64..10.0) {
            let lx: Vec<f64> = x.iter().map(|c| lam * c).collect();
            let lhs = s.eval_real(&lx);
            let rhs = lam * s.eval_real(&x);
            prop_assert!((lhs - rhs).abs() <= 64.0 * f64::EPSILON * rhs.abs().max(1.0));
        }

        #[test]
        fn bareiss_matches_cofactor(m in prop::collection::vec(-3i64..=3, 16)) {
            prop_assert_eq!(integer_determinant(4, &m).unwrap(), det_cofactor(4, &m));
        }
    }
}
