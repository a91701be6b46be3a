//! Complex scalars, polar form, and the finite-difference Wirtinger oracle.
//!
//! A complex number is an ordered pair `(x, y)` with `z = x + iy`. Every
//! operation here is written out on the pair directly so results depend only on
//! IEEE-754 double arithmetic and the platform `libm`.
//!
//! # Conventions
//!
//! * `arg z` is the principal argument in `(-π, π]`. At the origin the
//!   argument is undefined and [`Complex::arg`] returns `NaN`.
//! * Elementary inverse functions use their principal branches. The cuts are
//!   the standard ones: `asin`, `acos`, `atanh` on the real axis with `|x| ≥ 1`;
//!   `atan`, `asinh` on the imaginary axis with `|y| ≥ 1`.
//!
//! # Wirtinger derivatives
//!
//! For `f = u + iv`,
//!
//! ```text
//! ∂f/∂z  = ½((u_x + v_y) + i(v_x − u_y))
//! ∂f/∂z* = ½((u_x − v_y) + i(v_x + u_y))
//! ```
//!
//! [`wirtinger_fd`] estimates the four real partials with central differences
//! and assembles both derivatives. It is the derivative oracle that every
//! analytic partial in the crate is tested against.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Default central-difference step for [`wirtinger_fd`].
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

pub const I: Complex = Complex { re: 0.0, im: 1.0 };
pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex::new(r * c, r * s)
    }

    /// `e^{iθ}`
    pub fn cis(theta: f64) -> Self {
        Complex::from_polar(1.0, theta)
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Principal argument in `(-π, π]`, `NaN` at the origin.
    pub fn arg(self) -> f64 {
        if self.re == 0.0 && self.im == 0.0 {
            return f64::NAN;
        }
        let a = self.im.atan2(self.re);
        // atan2 returns −π for a negative real with a negative-zero imaginary part.
        if a == -PI {
            PI
        } else {
            a
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Complex::new(self.re * k, self.im * k)
    }

    pub fn mul_i(self) -> Self {
        Complex::new(-self.im, self.re)
    }

    pub fn recip(self) -> Self {
        let d = self.norm_sqr();
        Complex::new(self.re / d, -self.im / d)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = ONE;
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Self {
        Complex::from_polar(self.re.exp(), self.im)
    }

    /// Principal logarithm `ln|z| + i arg z`.
    pub fn ln(self) -> Self {
        Complex::new(self.abs().ln(), self.im.atan2(self.re))
    }

    /// Principal square root (non-negative real part).
    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return Complex::new(0.0, self.im);
        }
        let r = self.abs();
        if self.re >= 0.0 {
            let t = ((r + self.re) * 0.5).sqrt();
            Complex::new(t, self.im / (2.0 * t))
        } else {
            let t = ((r - self.re) * 0.5).sqrt();
            Complex::new(self.im.abs() / (2.0 * t), t.copysign(self.im))
        }
    }

    pub fn sin(self) -> Self {
        Complex::new(self.re.sin() * self.im.cosh(), self.re.cos() * self.im.sinh())
    }

    pub fn cos(self) -> Self {
        Complex::new(self.re.cos() * self.im.cosh(), -self.re.sin() * self.im.sinh())
    }

    pub fn sinh(self) -> Self {
        Complex::new(self.re.sinh() * self.im.cos(), self.re.cosh() * self.im.sin())
    }

    pub fn cosh(self) -> Self {
        Complex::new(self.re.cosh() * self.im.cos(), self.re.sinh() * self.im.sin())
    }

    /// `tanh(x+iy) = (sinh 2x + i sin 2y) / (2(sinh²x + cos²y))`.
    ///
    /// The denominator is written as a sum of squares so it stays accurate
    /// next to the poles at `(n+½)πi`.
    pub fn tanh(self) -> Self {
        let (x, y) = (self.re, self.im);
        if x.abs() > 22.0 {
            // e^{-2|x|} is below 1e-19: the imaginary part is negligible.
            let t = 4.0 * y.sin() * y.cos() * (-2.0 * x.abs()).exp();
            return Complex::new(x.signum(), t);
        }
        let sx = x.sinh();
        let cy = y.cos();
        let d = 2.0 * (sx * sx + cy * cy);
        Complex::new((2.0 * x).sinh() / d, (2.0 * y).sin() / d)
    }

    /// `tan z = −i tanh(iz)`
    pub fn tan(self) -> Self {
        let t = self.mul_i().tanh();
        Complex::new(t.im, -t.re)
    }

    /// `asinh z = ln(z + √(z²+1))`, evaluated on the right half-plane and
    /// extended by oddness to avoid cancellation for `Re z < 0`.
    pub fn asinh(self) -> Self {
        if self.re < 0.0 {
            return -(-self).asinh();
        }
        (self + (self * self + ONE).sqrt()).ln()
    }

    /// `asin z = −i asinh(iz)`
    pub fn asin(self) -> Self {
        let w = self.mul_i().asinh();
        Complex::new(w.im, -w.re)
    }

    pub fn acos(self) -> Self {
        Complex::real(FRAC_PI_2) - self.asin()
    }

    /// `atan z = (i/2)(ln(1 − iz) − ln(1 + iz))`
    pub fn atan(self) -> Self {
        let iz = self.mul_i();
        ((ONE - iz).ln() - (ONE + iz).ln()).mul_i().scale(0.5)
    }

    /// `atanh z = ½(ln(1+z) − ln(1−z))`
    pub fn atanh(self) -> Self {
        ((ONE + self).ln() - (ONE - self).ln()).scale(0.5)
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Complex::real(re)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for Complex {
    type Output = Complex;
    fn div(self, o: Complex) -> Complex {
        let d = o.norm_sqr();
        Complex::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Add<f64> for Complex {
    type Output = Complex;
    fn add(self, o: f64) -> Complex {
        Complex::new(self.re + o, self.im)
    }
}

impl Sub<f64> for Complex {
    type Output = Complex;
    fn sub(self, o: f64) -> Complex {
        Complex::new(self.re - o, self.im)
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    fn mul(self, o: f64) -> Complex {
        self.scale(o)
    }
}

impl Div<f64> for Complex {
    type Output = Complex;
    fn div(self, o: f64) -> Complex {
        Complex::new(self.re / o, self.im / o)
    }
}

impl AddAssign for Complex {
    fn add_assign(&mut self, o: Complex) {
        *self = *self + o;
    }
}

impl SubAssign for Complex {
    fn sub_assign(&mut self, o: Complex) {
        *self = *self - o;
    }
}

impl std::iter::Sum for Complex {
    fn sum<It: Iterator<Item = Complex>>(iter: It) -> Complex {
        iter.fold(ZERO, |a, b| a + b)
    }
}

/// Shortest round-tripping text form, e.g. `0.5-2i`.
impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{}{}{}i", self.re, sign, self.im.abs())
    }
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` and `(a,b)`.
impl FromStr for Complex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a complex number: `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            return Ok(Complex::new(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ));
        }
        let Some(body) = t.strip_suffix('i') else {
            return t.parse().map(Complex::real).map_err(|_| bad());
        };
        // Find the sign separating the real and imaginary parts, skipping exponent signs.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let parse_im = |txt: &str| -> Result<f64> {
            match txt {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => txt.parse().map_err(|_| bad()),
            }
        };
        match split {
            Some(k) => Ok(Complex::new(
                body[..k].parse().map_err(|_| bad())?,
                parse_im(&body[k..])?,
            )),
            None => Ok(Complex::new(0.0, parse_im(body)?)),
        }
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}

/// Magnitude and principal argument. The argument is `NaN` at the origin.
pub fn polar(z: Complex) -> (f64, f64) {
    (z.abs(), z.arg())
}

/// Difference of two angles wrapped into `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

/// Value and first-order partials of `f = u + iv` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerJet {
    pub value: Complex,
    pub ux: f64,
    pub uy: f64,
    pub vx: f64,
    pub vy: f64,
    pub dz: Complex,
    pub dzbar: Complex,
}

impl WirtingerJet {
    pub fn from_partials(value: Complex, ux: f64, uy: f64, vx: f64, vy: f64) -> Self {
        WirtingerJet {
            value,
            ux,
            uy,
            vx,
            vy,
            dz: Complex::new(0.5 * (ux + vy), 0.5 * (vx - uy)),
            dzbar: Complex::new(0.5 * (ux - vy), 0.5 * (vx + uy)),
        }
    }

    /// Jet of a function that is complex-differentiable with derivative `d`.
    pub fn holomorphic(value: Complex, d: Complex) -> Self {
        WirtingerJet::from_partials(value, d.re, -d.im, d.im, d.re)
    }

    /// `∂f/∂x = u_x + i v_x`
    pub fn d_dx(&self) -> Complex {
        Complex::new(self.ux, self.vx)
    }

    /// `∂f/∂y = u_y + i v_y`
    pub fn d_dy(&self) -> Complex {
        Complex::new(self.uy, self.vy)
    }

    /// Jacobian determinant `u_x v_y − u_y v_x`.
    pub fn jacobian_det(&self) -> f64 {
        self.ux * self.vy - self.uy * self.vx
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && [self.ux, self.uy, self.vx, self.vy].iter().all(|v| v.is_finite())
    }
}

/// Central-difference jet of `f` at `z` with step `h`.
pub fn wirtinger_fd<F>(f: F, z: Complex, h: f64) -> Result<WirtingerJet>
where
    F: Fn(Complex) -> Complex,
{
    let eval = |p: Complex| {
        let v = f(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Oracle { point: p })
        }
    };
    let value = eval(z)?;
    let xp = eval(z + h)?;
    let xm = eval(z - h)?;
    let yp = eval(z + Complex::new(0.0, h))?;
    let ym = eval(z - Complex::new(0.0, h))?;
    let dx = (xp - xm) / (2.0 * h);
    let dy = (yp - ym) / (2.0 * h);
    Ok(WirtingerJet::from_partials(value, dx.re, dy.re, dx.im, dy.im))
}

/// Cauchy–Riemann residuals `(|u_x − v_y|, |u_y + v_x|)`.
pub fn cr_residual(jet: &WirtingerJet) -> (f64, f64) {
    ((jet.ux - jet.vy).abs(), (jet.uy + jet.vx).abs())
}
