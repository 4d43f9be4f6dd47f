//! Nonnegative test functions `f` on ℤ≥0 with enough structure to decide the
//! summability criteria symbolically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a table is continued past its last value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// No rule: verdicts stay undecidable.
    Unspecified,
    Zero,
    /// `f(k) = f(K) (K/k)^β` past the last index `K`.
    Power { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `(s₀ + k)^{−β}`, `s₀ ≥ 1`.
    PowerLaw { beta: f64, shift: f64 },
    /// `(2 + k)^{−β} ln(2 + k)^{−γ}`.
    PowerLog { beta: f64, gamma: f64 },
    Table { values: Vec<f64>, tail: TailRule },
    /// `inner(k)` on even `k`, 0 on odd `k`.
    EvenOnly { inner: Box<FunctionSpec> },
    /// `inner(k)` on odd `k`, 0 on even `k`.
    OddOnly { inner: Box<FunctionSpec> },
}

impl FunctionSpec {
    pub fn power_law(beta: f64) -> Self {
        FunctionSpec::PowerLaw { beta, shift: 1.0 }
    }

    pub fn power_log(beta: f64, gamma: f64) -> Self {
        FunctionSpec::PowerLog { beta, gamma }
    }

    pub fn zero() -> Self {
        FunctionSpec::Table { values: Vec::new(), tail: TailRule::Zero }
    }

    pub fn constant(c: f64) -> Self {
        FunctionSpec::Table { values: vec![c], tail: TailRule::Power { beta: 0.0 } }
    }

    /// `1{k ≤ k_max}`.
    pub fn indicator_le(k_max: usize) -> Self {
        FunctionSpec::Table { values: vec![1.0; k_max + 1], tail: TailRule::Zero }
    }

    /// `1{k = k0}`.
    pub fn unit_mass(k0: usize) -> Self {
        let mut values = vec![0.0; k0 + 1];
        values[k0] = 1.0;
        FunctionSpec::Table { values, tail: TailRule::Zero }
    }

    pub fn even_only(inner: FunctionSpec) -> Self {
        FunctionSpec::EvenOnly { inner: Box::new(inner) }
    }

    pub fn odd_only(inner: FunctionSpec) -> Self {
        FunctionSpec::OddOnly { inner: Box::new(inner) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::PowerLaw { beta, shift } => {
                if !beta.is_finite() || shift.is_nan() || *shift < 1.0 {
                    return Err(Error::usage(format!("power law needs finite beta and shift >= 1 (got {beta}, {shift})")));
                }
            }
            FunctionSpec::PowerLog { beta, gamma } => {
                if !beta.is_finite() || !gamma.is_finite() {
                    return Err(Error::usage("power-log exponents must be finite"));
                }
            }
            FunctionSpec::Table { values, tail } => {
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::usage("table values must be finite and nonnegative"));
                }
                if let TailRule::Power { beta } = tail {
                    if !beta.is_finite() || values.is_empty() {
                        return Err(Error::usage("power tail needs a finite exponent and a nonempty table"));
                    }
                }
            }
            FunctionSpec::EvenOnly { inner } | FunctionSpec::OddOnly { inner } => inner.validate()?,
        }
        Ok(())
    }

    /// `f(k)`. Tables without a tail rule read as 0 past their end.
    pub fn eval(&self, k: u64) -> f64 {
        let kf = k as f64;
        match self {
            FunctionSpec::PowerLaw { beta, shift } => (shift + kf).powf(-beta),
            FunctionSpec::PowerLog { beta, gamma } => (2.0 + kf).powf(-beta) * (2.0 + kf).ln().powf(-gamma),
            FunctionSpec::Table { values, tail } => match values.get(k as usize) {
                Some(&v) => v,
                None => match tail {
                    TailRule::Unspecified | TailRule::Zero => 0.0,
                    TailRule::Power { beta } => {
                        let last = values.len() - 1;
                        let base = last.max(1) as f64;
                        values[last] * (base / kf).powf(*beta)
                    }
                },
            },
            FunctionSpec::EvenOnly { inner } => {
                if k % 2 == 0 {
                    inner.eval(k)
                } else {
                    0.0
                }
            }
            FunctionSpec::OddOnly { inner } => {
                if k % 2 == 1 {
                    inner.eval(k)
                } else {
                    0.0
                }
            }
        }
    }

    /// `f` tabulated on `0..len`.
    pub fn table(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|k| self.eval(k)).collect()
    }

    /// True when `f` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            FunctionSpec::Table { values, tail } => {
                values.iter().all(|&v| v == 0.0) && !matches!(tail, TailRule::Power { .. } if values.last().is_some_and(|&v| v > 0.0))
            }
            FunctionSpec::EvenOnly { inner } | FunctionSpec::OddOnly { inner } => inner.is_zero(),
            _ => false,
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::PowerLaw { beta, shift } if *shift == 1.0 => write!(f, "power({beta})"),
            FunctionSpec::PowerLaw { beta, shift } => write!(f, "power({beta},shift={shift})"),
            FunctionSpec::PowerLog { beta, gamma } => write!(f, "powerlog({beta},{gamma})"),
            FunctionSpec::Table { values, tail } => {
                let tail = match tail {
                    TailRule::Unspecified => "?".to_string(),
                    TailRule::Zero => "0".to_string(),
                    TailRule::Power { beta } => format!("k^-{beta}"),
                };
                write!(f, "table(len={},tail={tail})", values.len())
            }
            FunctionSpec::EvenOnly { inner } => write!(f, "even({inner})"),
            FunctionSpec::OddOnly { inner } => write!(f, "odd({inner})"),
        }
    }
}

/// Parses `power:BETA[:SHIFT]`, `powerlog:BETA:GAMMA`, `zero`, `indicator:K`,
/// `unit:K`, `even:<spec>` and `odd:<spec>`.
impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::usage(format!("cannot parse test function '{s}'"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let spec = if let Some(rest) = s.strip_prefix("even:") {
            FunctionSpec::even_only(rest.parse()?)
        } else if let Some(rest) = s.strip_prefix("odd:") {
            FunctionSpec::odd_only(rest.parse()?)
        } else {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                ["zero"] => FunctionSpec::zero(),
                ["power", b] => FunctionSpec::power_law(num(b)?),
                ["power", b, sh] => FunctionSpec::PowerLaw { beta: num(b)?, shift: num(sh)? },
                ["powerlog", b, g] => FunctionSpec::power_log(num(b)?, num(g)?),
                ["indicator", k] => FunctionSpec::indicator_le(k.parse().map_err(|_| bad())?),
                ["unit", k] => FunctionSpec::unit_mass(k.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(FunctionSpec::power_law(3.0).eval(0), 1.0);
        assert_eq!(FunctionSpec::power_law(3.0).eval(1), 0.125);
        assert_eq!(FunctionSpec::indicator_le(5).eval(5), 1.0);
        assert_eq!(FunctionSpec::indicator_le(5).eval(6), 0.0);
        assert_eq!(FunctionSpec::unit_mass(1).table(3), vec![0.0, 1.0, 0.0]);
        assert_eq!(FunctionSpec::constant(1.0).eval(1000), 1.0);
        let t = FunctionSpec::Table { values: vec![1.0, 4.0, 2.0], tail: TailRule::Power { beta: 2.0 } };
        assert!((t.eval(4) - 2.0 * 0.25).abs() < 1e-15);
        let odd = FunctionSpec::odd_only(FunctionSpec::constant(1.0));
        assert_eq!(odd.table(4), vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_detection() {
        assert!(FunctionSpec::zero().is_zero());
        assert!(FunctionSpec::even_only(FunctionSpec::zero()).is_zero());
        assert!(!FunctionSpec::constant(1.0).is_zero());
        assert!(!FunctionSpec::power_law(2.0).is_zero());
    }

    #[test]
    fn parsing() {
        assert_eq!("power:3".parse::<FunctionSpec>().unwrap(), FunctionSpec::power_law(3.0));
        assert_eq!("powerlog:2:2".parse::<FunctionSpec>().unwrap(), FunctionSpec::power_log(2.0, 2.0));
        assert_eq!(
            "odd:power:0".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::odd_only(FunctionSpec::power_law(0.0))
        );
        assert!("power:2:0.5".parse::<FunctionSpec>().is_err());
        assert!("cosine".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = FunctionSpec::even_only(FunctionSpec::power_log(2.0, 1.5));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FunctionSpec>(&s).unwrap(), f);
    }
}
