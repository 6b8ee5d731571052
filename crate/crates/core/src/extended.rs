//! Reals extended by `+∞`, with the arithmetic conventions used for points at
//! infinity: `∞ − y = y − ∞ = ∞` for finite `y`, `∞ − ∞ = 0`, `∞/2 = ∞`,
//! `|∞| = ∞`, `min{c, ∞} = c` and `max{c, ∞} = ∞`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

pub use ExtendedReal::{Finite, Infinity};

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    /// The finite value, or `None` at infinity.
    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            Infinity => None,
        }
    }

    /// Lossy conversion to `f64` (`+∞` maps to `f64::INFINITY`).
    pub fn to_f64(self) -> f64 {
        match self {
            Finite(v) => v,
            Infinity => f64::INFINITY,
        }
    }

    /// Subtraction under the extended conventions.
    pub fn minus(self, other: ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a - b),
            (Infinity, Infinity) => Finite(0.0),
            _ => Infinity,
        }
    }

    pub fn abs(self) -> ExtendedReal {
        match self {
            Finite(v) => Finite(v.abs()),
            Infinity => Infinity,
        }
    }

    pub fn half(self) -> ExtendedReal {
        match self {
            Finite(v) => Finite(v / 2.0),
            Infinity => Infinity,
        }
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Infinity
        } else {
            Finite(v)
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinity) => Some(Ordering::Less),
            (Infinity, Finite(_)) => Some(Ordering::Greater),
            (Infinity, Infinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => write!(f, "{v}"),
            Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => serializer.serialize_f64(*v),
            Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtendedVisitor;

        impl Visitor<'_> for ExtendedVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedReal, E> {
                Ok(Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedReal, E> {
                Ok(Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedReal, E> {
                Ok(Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedReal, E> {
                match v {
                    "inf" | "+inf" | "infinity" | "Infinity" => Ok(Infinity),
                    other => Err(E::custom(format!("unexpected string {other:?}"))),
                }
            }
        }

        deserializer.deserialize_any(ExtendedVisitor)
    }
}
