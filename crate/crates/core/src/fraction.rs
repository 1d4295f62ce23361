//! Exact non-negative rationals for thresholds such as `δ` and edge
//! probabilities, so boundary comparisons never depend on float rounding.

use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    num: u64,
    den: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractionError {
    ZeroDenominator,
    Malformed,
}

impl fmt::Display for FractionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroDenominator => f.write_str("denominator must be positive"),
            Self::Malformed => f.write_str("expected a fraction of the form P/Q or an integer P"),
        }
    }
}

impl core::error::Error for FractionError {}

impl Fraction {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const ONE: Self = Self { num: 1, den: 1 };
    pub const HALF: Self = Self { num: 1, den: 2 };

    pub fn new(num: u64, den: u64) -> Result<Self, FractionError> {
        if den == 0 {
            return Err(FractionError::ZeroDenominator);
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// True when the value lies in `[0, 1]`.
    pub fn is_probability(self) -> bool {
        self.num <= self.den
    }

    /// `count < self * total`, exactly.
    pub fn exceeds(self, count: u64, total: u64) -> bool {
        (count as u128) * (self.den as u128) < (self.num as u128) * (total as u128)
    }

    /// `count <= self * total`, exactly.
    pub fn at_least(self, count: u64, total: u64) -> bool {
        (count as u128) * (self.den as u128) <= (self.num as u128) * (total as u128)
    }

    /// `floor(self * total)`.
    pub fn floor_mul(self, total: u64) -> u64 {
        ((self.num as u128 * total as u128) / self.den as u128) as u64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| FractionError::Malformed);
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse(p)?, parse(q)?),
            None => Self::new(parse(s)?, 1),
        }
    }
}
