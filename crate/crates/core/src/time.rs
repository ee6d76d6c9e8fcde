//! Exact action of O(2) elements of finite order on the time circle.
//!
//! Times are measured as fractions of the period, so the circle is `Q/Z`.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces a rational into `[0, modulus)`.
fn reduce(x: Rational64, modulus: Rational64) -> Rational64 {
    let q = (x / modulus).floor();
    x - q * modulus
}

pub fn frac(x: Rational64) -> Rational64 {
    reduce(x, Rational64::one())
}

/// An element of O(2) acting on the circle `R/TZ`.
///
/// `Rotation(r)` maps the time fraction `f` to `f + r`; `Reflection(a)` is the
/// reflection across the axis at angle `2πa`, mapping `f` to `2a − f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeTransform {
    Rotation(Rational64),
    Reflection(Rational64),
}

impl TimeTransform {
    pub fn identity() -> Self {
        Self::Rotation(Rational64::zero())
    }

    pub fn rotation(num: i64, den: i64) -> Self {
        Self::Rotation(frac(Rational64::new(num, den)))
    }

    /// Reflection whose axis sits at the fraction `num/den` of a full turn.
    pub fn reflection(num: i64, den: i64) -> Self {
        Self::Reflection(reduce(Rational64::new(num, den), Rational64::new(1, 2)))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Rotation(r) if r.is_zero())
    }

    pub fn is_reflection(&self) -> bool {
        matches!(self, Self::Reflection(_))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        use TimeTransform::*;
        let half = Rational64::new(1, 2);
        match (*self, *other) {
            (Rotation(r), Rotation(s)) => Rotation(frac(r + s)),
            (Rotation(r), Reflection(a)) => Reflection(reduce(a + r / 2, half)),
            (Reflection(a), Rotation(r)) => Reflection(reduce(a - r / 2, half)),
            (Reflection(a), Reflection(b)) => Rotation(frac((a - b) * 2)),
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Self::Rotation(r) => Self::Rotation(frac(-r)),
            refl @ Self::Reflection(_) => refl,
        }
    }

    /// Image of a time fraction.
    pub fn apply(&self, f: Rational64) -> Rational64 {
        match *self {
            Self::Rotation(r) => frac(f + r),
            Self::Reflection(a) => frac(a * 2 - f),
        }
    }

    pub fn order(&self) -> u64 {
        match *self {
            Self::Rotation(r) => {
                if r.is_zero() {
                    1
                } else {
                    *r.reduced().denom() as u64
                }
            }
            Self::Reflection(_) => 2,
        }
    }

    /// Fixed time fractions: none for nontrivial rotations, two for reflections.
    pub fn fixed_points(&self) -> Vec<Rational64> {
        match *self {
            Self::Rotation(_) => Vec::new(),
            Self::Reflection(a) => vec![a, a + Rational64::new(1, 2)],
        }
    }

    /// Denominator the sample count must be a multiple of for this transform
    /// to map the uniform grid `j/M` onto itself.
    pub fn grid_denominator(&self) -> u64 {
        match *self {
            Self::Rotation(r) => *r.reduced().denom() as u64,
            Self::Reflection(a) => *(a * 2).reduced().denom() as u64,
        }
    }

    /// Index map of the transform on a grid of `m` samples, `j ↦ j'`.
    pub fn grid_map(&self, m: usize) -> Result<Vec<usize>> {
        let d = self.grid_denominator() as usize;
        if m % d != 0 {
            return Err(Error::GridIncompatible {
                samples: m,
                required: d,
            });
        }
        let mi = m as i64;
        let map = match *self {
            Self::Rotation(r) => {
                let shift = (r * mi).to_integer();
                (0..mi).map(|j| (j + shift).mod_floor(&mi) as usize).collect()
            }
            Self::Reflection(a) => {
                let s = (a * 2 * mi).to_integer();
                (0..mi).map(|j| (s - j).mod_floor(&mi) as usize).collect()
            }
        };
        Ok(map)
    }

    /// The O(2) matrix of the transform acting on `R²`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        match *self {
            Self::Rotation(r) => {
                let th = 2.0 * std::f64::consts::PI * rat_to_f64(r);
                let (s, c) = th.sin_cos();
                [[c, -s], [s, c]]
            }
            Self::Reflection(a) => {
                let th = 4.0 * std::f64::consts::PI * rat_to_f64(a);
                let (s, c) = th.sin_cos();
                [[c, s], [s, -c]]
            }
        }
    }

    pub fn parameter(&self) -> Rational64 {
        match *self {
            Self::Rotation(r) | Self::Reflection(r) => r,
        }
    }
}

pub fn rat_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for TimeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rotation(r) => write!(f, "rot({r})"),
            Self::Reflection(a) => write!(f, "refl({a})"),
        }
    }
}

/// Wire form `{kind, num, den}` used by configuration files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub kind: TimeKind,
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Rotation,
    Reflection,
}

impl TryFrom<&TimeSpec> for TimeTransform {
    type Error = Error;
    fn try_from(spec: &TimeSpec) -> Result<Self> {
        if spec.den == 0 {
            return Err(Error::InvalidAction("time transform with zero denominator".into()));
        }
        Ok(match spec.kind {
            TimeKind::Rotation => TimeTransform::rotation(spec.num, spec.den),
            TimeKind::Reflection => TimeTransform::reflection(spec.num, spec.den),
        })
    }
}

impl From<&TimeTransform> for TimeSpec {
    fn from(t: &TimeTransform) -> Self {
        let (kind, r) = match *t {
            TimeTransform::Rotation(r) => (TimeKind::Rotation, r),
            TimeTransform::Reflection(a) => (TimeKind::Reflection, a),
        };
        let r = r.reduced();
        TimeSpec {
            kind,
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

/// Least common multiple of grid denominators.
pub fn lcm_all(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(1u64, |acc, v| acc.lcm(&v.max(1)))
}
