//! Angles written either in radians (`0.9066`) or as rational multiples of pi
//! (`-1/12pi`, `pi`, `2pi`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Radians(f64),
    /// `num / den * pi` with `den > 0`.
    PiFraction { num: i64, den: i64 },
}

impl Angle {
    pub fn radians(self) -> f64 {
        match self {
            Angle::Radians(x) => x,
            Angle::PiFraction { num, den } => num as f64 / den as f64 * PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad angle `{text}`: {reason}")]
pub struct AngleError {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for Angle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let fail = |reason| AngleError { text: s.to_string(), reason };
        let Some(coef) = text.strip_suffix("pi").or_else(|| text.strip_suffix('π')) else {
            let x: f64 = text.parse().map_err(|_| fail("not a number"))?;
            return if x.is_finite() { Ok(Angle::Radians(x)) } else { Err(fail("not finite")) };
        };
        let coef = coef.trim().trim_end_matches('*').trim();
        let (num, den) = match coef {
            "" | "+" => (1, 1),
            "-" => (-1, 1),
            _ => match coef.split_once('/') {
                Some((n, d)) => {
                    let n = match n.trim() {
                        "" | "+" => 1,
                        "-" => -1,
                        n => n.parse().map_err(|_| fail("numerator is not an integer"))?,
                    };
                    (n, d.trim().parse::<i64>().map_err(|_| fail("denominator is not an integer"))?)
                }
                None => (coef.parse().map_err(|_| fail("coefficient is not an integer fraction"))?, 1),
            },
        };
        if den <= 0 {
            return Err(fail("denominator must be positive"));
        }
        Ok(Angle::PiFraction { num, den })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Radians(x) => write!(f, "{x}"),
            Angle::PiFraction { num, den: 1 } => write!(f, "{num}pi"),
            Angle::PiFraction { num, den } => write!(f, "{num}/{den}pi"),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Angle::Radians(x) => serializer.serialize_f64(*x),
            Angle::PiFraction { .. } => serializer.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("radians or a string like \"-1/12pi\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle::Radians(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle::Radians(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle::Radians(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}

/// Comma-separated angles.
pub fn parse_list(s: &str) -> Result<Vec<Angle>, AngleError> {
    s.split(',').map(str::parse).collect()
}
