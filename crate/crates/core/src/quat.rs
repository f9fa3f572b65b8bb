//! Quaternion scalars and their transcendental functions.
//!
//! A quaternion is stored scalar-first as `w + x i + y j + z k`. Every
//! quaternion also splits uniquely as `c1 + c2 j` with complex
//! `c1 = w + x i` and `c2 = y + z i`; that split is what the complex adjoint
//! of a quaternion matrix is built from.

use std::f64::consts::PI;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QdetError, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds `a + b i` as `a + b i + 0 j + 0 k`.
    #[inline]
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `c1 + c2 j`.
    #[inline]
    pub fn from_parts(c1: Complex64, c2: Complex64) -> Self {
        Self::new(c1.re, c1.im, c2.re, c2.im)
    }

    /// The `(c1, c2)` split with `self = c1 + c2 j`.
    #[inline]
    pub fn parts(self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, self.z))
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Vector part `x i + y j + z k`.
    #[inline]
    pub fn im(self) -> Quaternion {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// True when the vector part is below the real-axis tolerance.
    #[inline]
    pub fn is_real(self) -> bool {
        self.im_norm() < tol::get().real_axis
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `conj(q) / |q|^2`.
    pub fn inverse(self) -> Result<Self> {
        let n = self.norm();
        if !(n > tol::get().algebraic) {
            return Err(QdetError::ZeroDivisor { norm: n });
        }
        Ok(self.conj().scale(1.0 / self.norm_sqr()))
    }

    /// Closed-form exponential `e^{Re q} (cos|Im q| + Im q/|Im q| sin|Im q|)`.
    pub fn exp(self) -> Self {
        let r = self.w.exp();
        let v = self.im_norm();
        if v < tol::get().real_axis {
            return Self::real(r);
        }
        let s = r * v.sin() / v;
        Self::new(r * v.cos(), self.x * s, self.y * s, self.z * s)
    }

    /// Principal argument `arccos(Re q / |q|)` in `[0, pi]`.
    pub fn arg(self) -> Result<f64> {
        let n = self.norm();
        if !(n > tol::get().algebraic) {
            return Err(QdetError::ZeroDivisor { norm: n });
        }
        // atan2 form is better conditioned than arccos near 0 and pi
        Ok(self.im_norm().atan2(self.w))
    }

    /// Principal logarithm.
    ///
    /// Non-real `q` maps to `ln|q| + (Im q/|Im q|) Arg q`; real `q` maps to
    /// `ln|q| + i pi (1 - sgn q)/2`, so negative reals land on the `i` axis.
    pub fn ln(self) -> Result<Self> {
        let n = self.norm();
        if !(n > tol::get().algebraic) {
            return Err(QdetError::ZeroDivisor { norm: n });
        }
        let log_norm = 0.5 * self.norm_sqr().ln();
        let v = self.im_norm();
        if v < tol::get().real_axis {
            let angle = if self.w < 0.0 { PI } else { 0.0 };
            return Ok(Self::new(log_norm, angle, 0.0, 0.0));
        }
        let s = v.atan2(self.w) / v;
        Ok(Self::new(log_norm, self.x * s, self.y * s, self.z * s))
    }

    /// Integer power by repeated squaring; negative powers go through the inverse.
    pub fn powi(self, n: i32) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Similarity `p = a^{-1} q a` for some nonzero `a`, decided by the
    /// invariants `Re p = Re q` and `|p| = |q|`.
    pub fn similar(self, other: Quaternion) -> bool {
        let t = tol::get().algebraic;
        let scale = 1.0_f64.max(self.norm()).max(other.norm());
        (self.w - other.w).abs() <= t * scale && (self.norm() - other.norm()).abs() <= t * scale
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(self, other: Quaternion) -> f64 {
        let d = self - other;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Self::from_complex(c)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product: `ij = k`, `jk = i`, `ki = j`, `i^2 = j^2 = k^2 = -1`.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(serde::de::Error::custom("quaternion components must be finite"));
        }
        Ok(Self::from_array(a))
    }
}
