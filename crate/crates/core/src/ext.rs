//! Extended real numbers `[-inf, +inf]` with the arithmetic conventions used
//! throughout the crate:
//!
//! - `+inf + -inf = -inf`
//! - `0 * (+-inf) = 0`
//! - `exp(-inf) = 0`, `ln(0) = -inf`
//!
//! The representation is an `f64` that is never NaN, so infinities map onto
//! the IEEE ones and every operation is total.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const POS_INF: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);

    /// Panics on NaN.
    #[inline]
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "ExtReal cannot hold NaN");
        ExtReal(value)
    }

    #[inline]
    pub fn try_new(value: f64) -> Option<Self> {
        (!value.is_nan()).then_some(ExtReal(value))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    #[inline]
    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Finite value, or `None` for either infinity.
    #[inline]
    pub fn finite(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }

    #[inline]
    pub fn ext_add(self, other: ExtReal) -> ExtReal {
        let s = self.0 + other.0;
        if s.is_nan() {
            ExtReal::NEG_INF
        } else {
            ExtReal(s)
        }
    }

    #[inline]
    pub fn ext_mul(self, other: ExtReal) -> ExtReal {
        if self.0 == 0.0 || other.0 == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * other.0)
        }
    }

    /// Multiplication by a finite scalar, with `0 * inf = 0`.
    #[inline]
    pub fn scale(self, c: f64) -> ExtReal {
        self.ext_mul(ExtReal::new(c))
    }

    /// Division by a finite nonzero scalar. Infinities keep (or flip) sign.
    #[inline]
    pub fn div_scalar(self, c: f64) -> ExtReal {
        debug_assert!(c != 0.0 && c.is_finite());
        ExtReal(self.0 / c)
    }

    #[inline]
    pub fn exp(self) -> ExtReal {
        ExtReal(self.0.exp())
    }

    /// Natural log on `[0, +inf]`. Panics on negative input.
    #[inline]
    pub fn ln(self) -> ExtReal {
        assert!(self.0 >= 0.0, "ln of negative extended real {}", self.0);
        ExtReal(self.0.ln())
    }

    #[inline]
    pub fn pos_part(self) -> ExtReal {
        if self.0 > 0.0 {
            self
        } else {
            ExtReal::ZERO
        }
    }

    #[inline]
    pub fn neg_part(self) -> ExtReal {
        if self.0 < 0.0 {
            ExtReal(-self.0)
        } else {
            ExtReal::ZERO
        }
    }

    #[inline]
    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    #[inline]
    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `|a - b|` for comparisons; equal infinities have distance 0 and
    /// anything else involving an infinity is `+inf`.
    pub fn distance(self, other: ExtReal) -> f64 {
        if self == other {
            0.0
        } else {
            (self.0 - other.0).abs()
        }
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("ExtReal is never NaN")
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        self.ext_add(rhs)
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self.ext_add(-rhs)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        self.ext_mul(rhs)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.write_str("inf")
        } else if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_pos_inf() {
            s.serialize_str("inf")
        } else if self.is_neg_inf() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"+inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::try_new(v).ok_or_else(|| E::custom("NaN is not an extended real"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v.trim() {
                    "inf" | "+inf" | "Infinity" => Ok(ExtReal::POS_INF),
                    "-inf" | "-Infinity" => Ok(ExtReal::NEG_INF),
                    other => other
                        .parse::<f64>()
                        .ok()
                        .and_then(ExtReal::try_new)
                        .ok_or_else(|| E::custom(format!("invalid extended real {other:?}"))),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_minus_infinity_is_neg_inf() {
        assert_eq!(ExtReal::POS_INF + ExtReal::NEG_INF, ExtReal::NEG_INF);
        assert_eq!(ExtReal::NEG_INF + ExtReal::POS_INF, ExtReal::NEG_INF);
        assert_eq!(ExtReal::POS_INF - ExtReal::POS_INF, ExtReal::NEG_INF);
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::ZERO * ExtReal::POS_INF, ExtReal::ZERO);
        assert_eq!(ExtReal::NEG_INF * ExtReal::ZERO, ExtReal::ZERO);
        assert_eq!(ExtReal::new(2.0) * ExtReal::POS_INF, ExtReal::POS_INF);
        assert_eq!(ExtReal::new(-2.0) * ExtReal::POS_INF, ExtReal::NEG_INF);
    }

    #[test]
    fn finite_arithmetic() {
        assert_eq!(ExtReal::new(3.0) + ExtReal::new(4.0), ExtReal::new(7.0));
        assert_eq!(ExtReal::new(3.0) * ExtReal::new(4.0), ExtReal::new(12.0));
    }

    #[test]
    fn exp_and_ln_at_the_ends() {
        assert_eq!(ExtReal::NEG_INF.exp(), ExtReal::ZERO);
        assert_eq!(ExtReal::ZERO.ln(), ExtReal::NEG_INF);
        assert_eq!(ExtReal::POS_INF.ln(), ExtReal::POS_INF);
    }

    #[test]
    #[should_panic]
    fn nan_is_rejected() {
        let _ = ExtReal::new(f64::NAN);
    }

    #[test]
    fn serde_uses_inf_strings() {
        let v = vec![ExtReal::NEG_INF, ExtReal::new(1.5), ExtReal::POS_INF];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf",1.5,"inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let plus: ExtReal = serde_json::from_str(r#""+inf""#).unwrap();
        assert!(plus.is_pos_inf());
        assert!(serde_json::from_str::<ExtReal>(r#""nan""#).is_err());
    }

    #[test]
    fn total_order_puts_infinities_at_the_ends() {
        let mut v = [ExtReal::POS_INF, ExtReal::new(0.0), ExtReal::NEG_INF, ExtReal::new(-1.0)];
        v.sort();
        assert_eq!(v[0], ExtReal::NEG_INF);
        assert_eq!(v[3], ExtReal::POS_INF);
    }
}
