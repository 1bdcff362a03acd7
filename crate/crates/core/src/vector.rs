//! Plane vectors and linear functionals.
//!
//! Primal points and dual functionals are kept as distinct types so the
//! pairing `<p, x>` is the only way to combine them.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};

/// A point (or direction) of the plane. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vector2 {
    pub x: f64,
    pub y: f64,
}

/// A linear functional acting by `<p, v> = p.x * v.x + p.y * v.y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct DualVector2 {
    pub x: f64,
    pub y: f64,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// `(cos θ, sin θ)`.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn ensure_finite(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(ModuliError::Input(format!("{what} has non-finite coordinates: {self:?}")))
        }
    }

    /// Signed area of the parallelogram spanned by `self` and `other`.
    #[inline]
    pub fn cross(self, other: Vector2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vector2 {
        Vector2::new(-self.y, self.x)
    }

    #[inline]
    pub fn euclidean_len(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }
}

impl DualVector2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `<p, v>`.
    #[inline]
    pub fn apply(self, v: Vector2) -> f64 {
        self.x * v.x + self.y * v.y
    }

    /// A direction spanning the kernel of the functional, turned
    /// counterclockwise from the functional itself.
    #[inline]
    pub fn kernel_direction(self) -> Vector2 {
        Vector2::new(-self.y, self.x)
    }

    /// Convex combination `(1 - t) self + t other`.
    #[inline]
    pub fn lerp(self, other: DualVector2, t: f64) -> DualVector2 {
        self * (1.0 - t) + other * t
    }

    /// The same coordinates read as a primal vector (used for polar bodies).
    #[inline]
    pub fn as_primal(self) -> Vector2 {
        Vector2::new(self.x, self.y)
    }

    pub fn angle(self) -> f64 {
        self.as_primal().angle()
    }
}

macro_rules! impl_linear_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            #[inline]
            fn add(self, o: $t) -> $t {
                Self::new(self.x + o.x, self.y + o.y)
            }
        }
        impl Sub for $t {
            type Output = $t;
            #[inline]
            fn sub(self, o: $t) -> $t {
                Self::new(self.x - o.x, self.y - o.y)
            }
        }
        impl Neg for $t {
            type Output = $t;
            #[inline]
            fn neg(self) -> $t {
                Self::new(-self.x, -self.y)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            #[inline]
            fn mul(self, s: f64) -> $t {
                Self::new(self.x * s, self.y * s)
            }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            #[inline]
            fn mul(self, v: $t) -> $t {
                v * self
            }
        }
        impl From<[f64; 2]> for $t {
            fn from(a: [f64; 2]) -> $t {
                Self::new(a[0], a[1])
            }
        }
        impl From<$t> for [f64; 2] {
            fn from(v: $t) -> [f64; 2] {
                [v.x, v.y]
            }
        }
    };
}

impl_linear_ops!(Vector2);
impl_linear_ops!(DualVector2);
