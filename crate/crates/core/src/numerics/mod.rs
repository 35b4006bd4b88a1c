//! Extended-precision arithmetic, special-function kernels and quadrature.
//!
//! Values are plain [`rug::Float`] / [`rug::Complex`] numbers. The working
//! precision is tracked by [`Precision`], which converts a requested number
//! of decimal digits into a binary precision with a few guard bits.

mod erf;
mod gamma;
pub mod quad;

pub use erf::{erf, erf_real};
pub use gamma::{gamma, gamma_real, ln_gamma_real};
pub use quad::{
    integrate_finite, integrate_panels, integrate_semiinfinite, QuadValue, Quadrature,
    QuadratureSpec, Scheme,
};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};

pub type BigReal = Float;
pub type BigComplex = Complex;

const GUARD_BITS: u32 = 24;

/// Working precision: requested decimal digits plus the binary precision
/// used for intermediate arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
    bits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 60;
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::PrecisionTooLow {
                digits,
                min: Self::MIN_DIGITS,
            });
        }
        Ok(Self::with_digits(digits))
    }

    /// Precision without the lower bound check. Used for internal
    /// sub-computations that only need a handful of digits.
    pub(crate) fn with_digits(digits: u32) -> Self {
        let bits = (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        Self { digits, bits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Same target digits, more binary guard bits.
    pub fn with_extra_bits(&self, extra: u32) -> Self {
        Self {
            digits: self.digits,
            bits: self.bits + extra,
        }
    }

    /// Same binary guard, different target digits.
    pub fn with_target_digits(&self, digits: u32) -> Self {
        Self { digits, ..*self }
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn complex<T>(&self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.bits, v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// 10^(-digits), the relative accuracy targeted by this precision.
    pub fn epsilon(&self) -> Float {
        ten_pow(self.bits, -i64::from(self.digits))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::with_digits(Self::DEFAULT_DIGITS)
    }
}

pub(crate) fn ten_pow(bits: u32, e: i64) -> Float {
    Float::with_val(bits, 10).pow(e)
}

/// The imaginary unit at the given precision.
pub fn imag_unit(bits: u32) -> Complex {
    Complex::with_val(bits, (0, 1))
}

/// Modulus of a complex number.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Argument in (-pi, pi].
pub fn carg(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.arg_ref())
}

/// r e^{i theta} for real r, theta with theta not reduced.
pub fn polar(r: &Float, theta: &Float) -> Complex {
    let bits = r.prec().max(theta.prec());
    let (s, c) = theta.clone().sin_cos(Float::new(bits));
    Complex::with_val(bits, (c * r, s * r))
}

/// e^{i theta}.
pub fn expi(theta: &Float) -> Complex {
    let bits = theta.prec();
    polar(&Float::with_val(bits, 1), theta)
}

/// z^e using an explicit argument for z (so the branch can sit on any sheet).
pub fn pow_polar(r: &Float, theta: &Float, e: &Complex) -> Complex {
    let bits = r.prec().max(theta.prec()).max(e.prec().0);
    let ln = Complex::with_val(bits, (r.clone().ln(), theta.clone()));
    (ln * e).exp()
}

/// Number of agreeing significant decimal digits between `a` and a nonzero
/// reference `b`: `-log10(|a - b| / |b|)`, clamped to `[0, cap]`.
pub fn agreement_digits(a: &Float, b: &Float, cap: f64) -> f64 {
    if b.is_zero() {
        return if a.is_zero() { cap } else { 0.0 };
    }
    let bits = a.prec().max(b.prec());
    let diff = Float::with_val(bits, a - b).abs();
    if diff.is_zero() {
        return cap;
    }
    let rel = diff / b.clone().abs();
    let d = -rel.log10().to_f64();
    d.clamp(0.0, cap)
}

/// Complex counterpart of [`agreement_digits`].
pub fn agreement_digits_complex(a: &Complex, b: &Complex, cap: f64) -> f64 {
    let bits = a.prec().0.max(b.prec().0);
    let nb = cabs(b);
    if nb.is_zero() {
        return if cabs(a).is_zero() { cap } else { 0.0 };
    }
    let diff = cabs(&Complex::with_val(bits, a - b));
    if diff.is_zero() {
        return cap;
    }
    let d = -(diff / nb).log10().to_f64();
    d.clamp(0.0, cap)
}

/// Natural log of |x| as f64, usable for magnitudes far outside the f64 range.
pub fn ln_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.prec();
    Float::with_val(bits, x.abs_ref()).ln().to_f64()
}

/// Exact value of sin((2m+1) pi / 3): one of sqrt(3)/2, 0, -sqrt(3)/2.
pub fn sin_third_odd(m: usize, bits: u32) -> Float {
    let half_sqrt3 = Float::with_val(bits, 3).sqrt() / 2u32;
    match (2 * m + 1) % 6 {
        1 => half_sqrt3,
        3 => Float::with_val(bits, 0),
        _ => -half_sqrt3,
    }
}

/// Factorial as an exact integer converted to the working precision.
pub fn factorial(n: u32, bits: u32) -> Float {
    Float::with_val(bits, rug::Integer::from(rug::Integer::factorial(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_floor() {
        assert!(Precision::new(29).is_err());
        let p = Precision::new(30).unwrap();
        assert!(p.bits() >= 100);
        assert_eq!(Precision::default().digits(), 60);
    }

    #[test]
    fn agreement_counts_digits() {
        let p = Precision::default();
        let a = p.real(1.000001);
        let b = p.real(1.0);
        let d = agreement_digits(&a, &b, 60.0);
        assert!((d - 6.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn exact_sine_pattern() {
        let bits = 128;
        assert!(sin_third_odd(1, bits).is_zero());
        assert!(sin_third_odd(4, bits).is_zero());
        assert!(sin_third_odd(0, bits) > 0);
        assert!(sin_third_odd(2, bits) < 0);
        assert!(sin_third_odd(3, bits) > 0);
    }

    #[test]
    fn polar_power_tracks_sheet() {
        let p = Precision::default();
        let r = p.real(4);
        // sqrt on the sheet arg = 3pi/2 differs in sign from the principal one.
        let theta = p.pi() * 3u32 / 2u32;
        let half = p.complex(0.5);
        let v = pow_polar(&r, &theta, &half);
        // 2 e^{3 pi i / 4}
        let expect = polar(&p.real(2), &(p.pi() * 3u32 / 4u32));
        assert!(agreement_digits_complex(&v, &expect, 60.0) > 55.0);
    }
}
