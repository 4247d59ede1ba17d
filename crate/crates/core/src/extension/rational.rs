use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An exponent `0 < p <= 1` kept as a reduced fraction, so that the case
/// split on whether `n (1/p - 1)` is an integer is decided exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RationalP {
    num: u32,
    den: u32,
}

impl RationalP {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::invalid("p must be a positive fraction"));
        }
        if num > den {
            return Err(Error::invalid(format!("p = {num}/{den} exceeds 1")));
        }
        let g = num.gcd(&den);
        Ok(RationalP { num: num / g, den: den / g })
    }

    pub fn one() -> Self {
        RationalP { num: 1, den: 1 }
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1/p` as a float.
    pub fn inverse(&self) -> f64 {
        self.den as f64 / self.num as f64
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// `|Q|^(-1/p)`, through logarithms so the exponent stays exact.
    pub fn size_bound(&self, volume: f64) -> f64 {
        (-(self.den as f64) * volume.ln() / self.num as f64).exp()
    }
}

impl fmt::Display for RationalP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalP {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("cannot read p from {s:?}; expected num/den")))
        };
        RationalP::new(parse(a)?, parse(b)?)
    }
}

impl TryFrom<String> for RationalP {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RationalP> for String {
    fn from(p: RationalP) -> String {
        p.to_string()
    }
}

/// `N_p = floor(n (1/p - 1))` and, when `n (1/p - 1)` is a nonnegative
/// integer `k`, that `k` (so `p = n/(n+k)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalOrder {
    pub n_p: u32,
    pub special_k: Option<u32>,
}

pub fn critical_order(p: RationalP, n: usize) -> CriticalOrder {
    // n (1/p - 1) = n (den - num) / num
    let top = n as u64 * (p.den - p.num) as u64;
    let bottom = p.num as u64;
    CriticalOrder {
        n_p: (top / bottom) as u32,
        special_k: top.is_multiple_of(bottom).then_some((top / bottom) as u32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        let p: RationalP = "4/6".parse().unwrap();
        assert_eq!((p.numerator(), p.denominator()), (2, 3));
        assert_eq!("1".parse::<RationalP>().unwrap(), RationalP::one());
        assert!("3/2".parse::<RationalP>().is_err());
        assert!("0/2".parse::<RationalP>().is_err());
        assert!("x".parse::<RationalP>().is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"2/3\"");
    }

    #[test]
    fn critical_orders() {
        assert_eq!(critical_order(RationalP::one(), 3), CriticalOrder { n_p: 0, special_k: Some(0) });
        assert_eq!(
            critical_order(RationalP::new(2, 3).unwrap(), 2),
            CriticalOrder { n_p: 1, special_k: Some(1) }
        );
        assert_eq!(
            critical_order(RationalP::new(3, 5).unwrap(), 1),
            CriticalOrder { n_p: 0, special_k: None }
        );
        assert_eq!(
            critical_order(RationalP::new(2, 5).unwrap(), 1),
            CriticalOrder { n_p: 1, special_k: None }
        );
        assert_eq!(
            critical_order(RationalP::new(3, 5).unwrap(), 3),
            CriticalOrder { n_p: 2, special_k: Some(2) }
        );
    }

    #[test]
    fn size_bound_exponent() {
        let p = RationalP::new(2, 3).unwrap();
        assert!((p.size_bound(0.25) - 0.25f64.powf(-1.5)).abs() < 1e-12);
    }
}
