//! Weight algebras.
//!
//! Every machine carries a [`Semiring`] tag and stores its weights as plain
//! [`Weight`] values. The tag decides how two weights combine along
//! alternative paths (`plus`) and along a single path (`times`).
//!
//! | kind       | carrier          | plus | times | zero  | one  |
//! |------------|------------------|------|-------|-------|------|
//! | `Boolean`  | {false, true}    | or   | and   | false | true |
//! | `Tropical` | reals and +inf   | min  | +     | +inf  | 0    |
//! | `Real`     | finite reals >= 0| +    | *     | 0     | 1    |
//!
//! Boolean weights are encoded as `0.0` (false) and `1.0` (true).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A single semiring element.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Weight(pub f64);

impl Weight {
    pub const INFINITY: Weight = Weight(f64::INFINITY);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for Weight {
    fn from(v: f64) -> Self {
        Weight(v)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "Infinity" | "+inf" => Ok(Weight::INFINITY),
            _ => s
                .parse::<f64>()
                .map(Weight)
                .map_err(|_| Error::Domain(format!("`{s}` is not a weight"))),
        }
    }
}

/// Which weight algebra a machine lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Semiring {
    Boolean,
    #[default]
    Tropical,
    Real,
}

impl Semiring {
    pub const ALL: [Semiring; 3] = [Semiring::Boolean, Semiring::Tropical, Semiring::Real];

    pub fn name(self) -> &'static str {
        match self {
            Semiring::Boolean => "boolean",
            Semiring::Tropical => "tropical",
            Semiring::Real => "real",
        }
    }

    #[inline]
    pub fn zero(self) -> Weight {
        match self {
            Semiring::Boolean | Semiring::Real => Weight(0.0),
            Semiring::Tropical => Weight::INFINITY,
        }
    }

    #[inline]
    pub fn one(self) -> Weight {
        match self {
            Semiring::Boolean | Semiring::Real => Weight(1.0),
            Semiring::Tropical => Weight(0.0),
        }
    }

    #[inline]
    pub fn is_zero(self, w: Weight) -> bool {
        w == self.zero()
    }

    #[inline]
    pub fn is_one(self, w: Weight) -> bool {
        w == self.one()
    }

    /// `true` when `a ⊕ a = a`; the algorithms that pick a single best
    /// alternative (determinization, Dijkstra) require it.
    pub fn is_idempotent(self) -> bool {
        !matches!(self, Semiring::Real)
    }

    /// Whether `w` belongs to the carrier set.
    ///
    /// Tropical weights may be negative: back-off costs and Bellman-Ford
    /// inputs need them. Only NaN and -inf are rejected there.
    pub fn contains(self, w: Weight) -> bool {
        let v = w.0;
        match self {
            Semiring::Boolean => v == 0.0 || v == 1.0,
            Semiring::Tropical => !v.is_nan() && v != f64::NEG_INFINITY,
            Semiring::Real => v.is_finite() && v >= 0.0,
        }
    }

    pub fn check(self, w: Weight) -> Result<Weight> {
        if self.contains(w) {
            Ok(w)
        } else {
            Err(Error::Domain(format!(
                "weight {} is outside the {} carrier",
                w,
                self.name()
            )))
        }
    }

    /// `a ⊕ b`, unchecked.
    #[inline]
    pub fn plus(self, a: Weight, b: Weight) -> Weight {
        match self {
            Semiring::Boolean => Weight(if a.0 != 0.0 || b.0 != 0.0 { 1.0 } else { 0.0 }),
            Semiring::Tropical => {
                if b.0 < a.0 {
                    b
                } else {
                    a
                }
            }
            Semiring::Real => Weight(a.0 + b.0),
        }
    }

    /// `a ⊗ b`, unchecked.
    #[inline]
    pub fn times(self, a: Weight, b: Weight) -> Weight {
        match self {
            Semiring::Boolean => Weight(if a.0 != 0.0 && b.0 != 0.0 { 1.0 } else { 0.0 }),
            // inf + x stays inf for every x admitted by the carrier.
            Semiring::Tropical => Weight(a.0 + b.0),
            Semiring::Real => Weight(a.0 * b.0),
        }
    }

    /// Left division `a ⊘ b`: the `x` with `b ⊗ x = a`.
    ///
    /// Defined for non-zero `b`. Boolean division by true is the identity.
    pub fn divide(self, a: Weight, b: Weight) -> Result<Weight> {
        if self.is_zero(b) {
            return Err(Error::Domain(format!("division by the {} zero", self.name())));
        }
        Ok(match self {
            Semiring::Boolean => a,
            Semiring::Tropical => {
                if a.0 == f64::INFINITY {
                    a
                } else {
                    Weight(a.0 - b.0)
                }
            }
            Semiring::Real => Weight(a.0 / b.0),
        })
    }

    /// Checked `a ⊕ b`.
    pub fn combine(self, a: Weight, b: Weight) -> Result<Weight> {
        Ok(self.plus(self.check(a)?, self.check(b)?))
    }

    /// Checked `a ⊗ b`.
    pub fn extend(self, a: Weight, b: Weight) -> Result<Weight> {
        Ok(self.times(self.check(a)?, self.check(b)?))
    }

    /// Orders weights best-first: `Less` means `a` is the better path weight.
    pub fn compare(self, a: Weight, b: Weight) -> Ordering {
        match self {
            Semiring::Tropical => a.0.total_cmp(&b.0),
            Semiring::Real | Semiring::Boolean => b.0.total_cmp(&a.0),
        }
    }

    /// ⊕ over an iterator.
    pub fn sum<I: IntoIterator<Item = Weight>>(self, it: I) -> Weight {
        it.into_iter().fold(self.zero(), |acc, w| self.plus(acc, w))
    }

    /// Approximate equality used when comparing machines built along different
    /// arithmetic routes.
    pub fn approx_eq(self, a: Weight, b: Weight, delta: f64) -> bool {
        if a.0 == b.0 {
            return true;
        }
        if !a.0.is_finite() || !b.0.is_finite() {
            return false;
        }
        (a.0 - b.0).abs() <= delta * (1.0f64).max(a.0.abs().max(b.0.abs()))
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boolean" | "bool" => Ok(Semiring::Boolean),
            "tropical" => Ok(Semiring::Tropical),
            "real" | "probability" => Ok(Semiring::Real),
            other => Err(Error::Domain(format!("unknown semiring `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering::*;

    const T: Semiring = Semiring::Tropical;
    const R: Semiring = Semiring::Real;
    const B: Semiring = Semiring::Boolean;

    #[test]
    fn tropical_combine_picks_min() {
        assert_eq!(T.combine(Weight(1.0), Weight(2.0)).unwrap(), Weight(1.0));
        assert_eq!(T.combine(Weight::INFINITY, Weight(7.5)).unwrap(), Weight(7.5));
    }

    #[test]
    fn real_combine_adds() {
        assert_eq!(R.combine(Weight(0.25), Weight(0.5)).unwrap(), Weight(0.75));
    }

    #[test]
    fn extend_examples() {
        assert_eq!(T.extend(Weight(2.0), Weight(3.0)).unwrap(), Weight(5.0));
        assert_eq!(T.extend(Weight::INFINITY, Weight(7.0)).unwrap(), Weight::INFINITY);
        assert_eq!(R.extend(Weight(0.5), Weight(0.5)).unwrap(), Weight(0.25));
        assert_eq!(B.extend(Weight(1.0), Weight(0.0)).unwrap(), Weight(0.0));
    }

    #[test]
    fn compare_is_best_first() {
        assert_eq!(T.compare(Weight(1.0), Weight(2.0)), Less);
        assert_eq!(T.compare(Weight::INFINITY, Weight::INFINITY), Equal);
        assert_eq!(R.compare(Weight(0.9), Weight(0.1)), Less);
        assert_eq!(B.compare(Weight(1.0), Weight(0.0)), Less);
    }

    #[test]
    fn carrier_violations_are_domain_errors() {
        assert!(matches!(R.combine(Weight(-1.0), Weight(0.0)), Err(Error::Domain(_))));
        assert!(R.extend(Weight(f64::INFINITY), Weight(1.0)).is_err());
        assert!(B.combine(Weight(0.5), Weight(1.0)).is_err());
        assert!(T.combine(Weight(f64::NAN), Weight(1.0)).is_err());
        assert!(T.combine(Weight(f64::NEG_INFINITY), Weight(1.0)).is_err());
    }

    #[test]
    fn divide_inverts_times() {
        assert_eq!(T.divide(Weight(5.0), Weight(2.0)).unwrap(), Weight(3.0));
        assert_eq!(R.divide(Weight(0.5), Weight(0.25)).unwrap(), Weight(2.0));
        assert!(T.divide(Weight(1.0), Weight::INFINITY).is_err());
    }

    #[test]
    fn weight_text_round_trip() {
        assert_eq!("inf".parse::<Weight>().unwrap(), Weight::INFINITY);
        assert_eq!(Weight(2.0).to_string(), "2");
        assert_eq!(Weight(0.1).to_string(), "0.1");
        assert_eq!(Weight::INFINITY.to_string(), "inf");
        assert!("x1".parse::<Weight>().is_err());
    }
}
