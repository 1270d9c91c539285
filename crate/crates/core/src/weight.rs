//! The weight parameter `m` of the Bakry-Émery-Ricci tensor.

use std::fmt;

use crate::error::{Error, Result};

/// Weight `m ∈ (0, ∞]`.
///
/// `m = ∞` is a distinct variant rather than a large float so that the
/// reciprocal is exactly zero in soliton computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl Weight {
    /// Builds a finite weight. Zero, negative and non-finite values are rejected;
    /// `m = 0` has no well-defined reciprocal.
    pub fn finite(m: f64) -> Result<Self> {
        if m == 0.0 {
            return Err(Error::UnsupportedWeight(
                "m = 0 is not supported (1/m is singular)".into(),
            ));
        }
        if !m.is_finite() || m < 0.0 {
            return Err(Error::UnsupportedWeight(format!(
                "m must be a positive finite number or infinite, got {m}"
            )));
        }
        Ok(Weight::Finite(m))
    }

    /// Parses `"inf"`, `"infinity"`, `"∞"` or a positive number.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Weight::Infinite),
            other => {
                let value: f64 = other
                    .parse()
                    .map_err(|_| Error::UnsupportedWeight(format!("cannot parse weight {t:?}")))?;
                Weight::finite(value)
            }
        }
    }

    /// `ε = 1/m`, exactly `0` for `m = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Weight::Finite(m) => 1.0 / m,
            Weight::Infinite => 0.0,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Weight::Finite(m) => Some(m),
            Weight::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Weight::Infinite)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(m) => write!(f, "{m}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weight_is_unsupported() {
        assert!(matches!(Weight::finite(0.0), Err(Error::UnsupportedWeight(_))));
        assert!(matches!(Weight::parse("0"), Err(Error::UnsupportedWeight(_))));
    }

    #[test]
    fn reciprocal_invariants() {
        let m = Weight::finite(4.0).unwrap();
        assert_eq!(m.reciprocal() * m.value().unwrap(), 1.0);
        assert_eq!(Weight::Infinite.reciprocal(), 0.0);
    }

    #[test]
    fn parse_variants() {
        assert_eq!(Weight::parse("inf").unwrap(), Weight::Infinite);
        assert_eq!(Weight::parse(" Infinity ").unwrap(), Weight::Infinite);
        assert_eq!(Weight::parse("2.5").unwrap(), Weight::Finite(2.5));
        assert!(Weight::parse("-1").is_err());
        assert!(Weight::parse("nan").is_err());
        assert!(Weight::parse("abc").is_err());
    }
}
