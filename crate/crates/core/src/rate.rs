use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative real or `+∞`.
///
/// Rates whose conditioning event is empty (no discoveries, no
/// nondiscoveries) are infinite, and so are the penalties attached to them.
/// The arithmetic is closed: `∞ + x = ∞`, `λ·∞ = ∞` for `λ > 0`, and `∞`
/// compares above every finite value, so objectives built from these rates
/// stay totally ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedRate {
    Finite(f64),
    Infinite,
}

impl ExtendedRate {
    pub const ZERO: ExtendedRate = ExtendedRate::Finite(0.0);

    /// `numerator / denominator`, infinite when the denominator is zero.
    pub fn ratio(numerator: u64, denominator: u64) -> Self {
        if denominator == 0 {
            ExtendedRate::Infinite
        } else {
            ExtendedRate::Finite(numerator as f64 / denominator as f64)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedRate::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedRate::Finite(v) => Some(v),
            ExtendedRate::Infinite => None,
        }
    }

    /// The value as an `f64`, mapping `Infinite` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedRate::Finite(v) => v,
            ExtendedRate::Infinite => f64::INFINITY,
        }
    }

    /// `|self - other|`. Two infinite operands are treated as equal
    /// (distance zero); one infinite operand gives an infinite distance.
    pub fn abs_diff(self, other: ExtendedRate) -> ExtendedRate {
        match (self, other) {
            (ExtendedRate::Finite(a), ExtendedRate::Finite(b)) => ExtendedRate::Finite((a - b).abs()),
            (ExtendedRate::Infinite, ExtendedRate::Infinite) => ExtendedRate::ZERO,
            _ => ExtendedRate::Infinite,
        }
    }
}

impl From<ExtendedRate> for f64 {
    fn from(r: ExtendedRate) -> f64 {
        r.to_f64()
    }
}

/// Serialized as a JSON number, or the string `"inf"`.
impl Serialize for ExtendedRate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedRate::Finite(v) => serializer.serialize_f64(*v),
            ExtendedRate::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedRate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) if v.is_finite() => Ok(ExtendedRate::Finite(v)),
            Repr::Text(t) if t == "inf" => Ok(ExtendedRate::Infinite),
            _ => Err(serde::de::Error::custom("expected a finite number or \"inf\"")),
        }
    }
}

impl PartialOrd for ExtendedRate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl ExtendedRate {
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedRate::Finite(a), ExtendedRate::Finite(b)) => a.total_cmp(b),
            (ExtendedRate::Finite(_), ExtendedRate::Infinite) => Ordering::Less,
            (ExtendedRate::Infinite, ExtendedRate::Finite(_)) => Ordering::Greater,
            (ExtendedRate::Infinite, ExtendedRate::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for ExtendedRate {
    type Output = ExtendedRate;

    fn add(self, rhs: ExtendedRate) -> ExtendedRate {
        match (self, rhs) {
            (ExtendedRate::Finite(a), ExtendedRate::Finite(b)) => ExtendedRate::Finite(a + b),
            _ => ExtendedRate::Infinite,
        }
    }
}

impl Add<f64> for ExtendedRate {
    type Output = ExtendedRate;

    fn add(self, rhs: f64) -> ExtendedRate {
        self + ExtendedRate::Finite(rhs)
    }
}

/// Scaling by a positive weight.
impl Mul<ExtendedRate> for f64 {
    type Output = ExtendedRate;

    fn mul(self, rhs: ExtendedRate) -> ExtendedRate {
        debug_assert!(self > 0.0, "extended scaling requires a positive weight");
        match rhs {
            ExtendedRate::Finite(v) => ExtendedRate::Finite(self * v),
            ExtendedRate::Infinite => ExtendedRate::Infinite,
        }
    }
}

impl fmt::Display for ExtendedRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRate::Finite(v) => write!(f, "{v}"),
            ExtendedRate::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let one = ExtendedRate::Finite(1.0);
        assert_eq!(one + ExtendedRate::Infinite, ExtendedRate::Infinite);
        assert_eq!(3.0 * ExtendedRate::Infinite, ExtendedRate::Infinite);
        assert!(ExtendedRate::Infinite > ExtendedRate::Finite(1e300));
        assert_eq!(ExtendedRate::ratio(1, 0), ExtendedRate::Infinite);
        assert_eq!(ExtendedRate::ratio(1, 4), ExtendedRate::Finite(0.25));
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&ExtendedRate::Finite(0.5)).unwrap(), "0.5");
        assert_eq!(serde_json::to_string(&ExtendedRate::Infinite).unwrap(), "\"inf\"");
        let back: ExtendedRate = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, ExtendedRate::Infinite);
        assert!(serde_json::from_str::<ExtendedRate>("null").is_err());
    }
}
