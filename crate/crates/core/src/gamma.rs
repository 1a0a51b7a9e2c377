//! Exact rational degree threshold.
//!
//! Every threshold comparison of the form `d >= ceil(gamma * x)` is evaluated
//! in integer arithmetic so boundary cases never depend on float rounding.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;

/// A rational `num / den` in `[0, 1]`, stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gamma {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Gamma {
    pub fn new(num: u64, den: u64) -> Result<Self, ConfigError> {
        if den == 0 {
            return Err(ConfigError::InvalidGamma("zero denominator".into()));
        }
        if num > den {
            return Err(ConfigError::InvalidGamma(format!("{num}/{den} exceeds 1")));
        }
        let g = gcd(num, den).max(1);
        Ok(Gamma { num: num / g, den: den / g })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// `ceil(gamma * x)`.
    #[inline]
    pub fn ceil_mul(&self, x: usize) -> usize {
        let p = self.num as u128 * x as u128;
        p.div_ceil(self.den as u128) as usize
    }

    /// `floor(d / gamma)`; `None` when gamma is zero (unbounded).
    #[inline]
    pub fn floor_div(&self, d: usize) -> Option<usize> {
        if self.num == 0 {
            return None;
        }
        Some((d as u128 * self.den as u128 / self.num as u128) as usize)
    }

    /// True iff `gamma >= 1/2`.
    pub fn at_least_half(&self) -> bool {
        2 * self.num >= self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Gamma {
    type Err = ConfigError;

    /// Accepts `p/q` or a plain decimal such as `0.89` (read exactly as 89/100).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ConfigError::InvalidGamma(format!("cannot parse {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Gamma::new(p, q);
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Gamma::new(num, den)
    }
}
