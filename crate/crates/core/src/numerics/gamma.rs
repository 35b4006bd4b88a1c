use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::Precision;
use crate::error::{Error, Result};

fn is_nonpositive_integer(x: &Float) -> bool {
    x.is_integer() && *x <= 0
}

/// Gamma function of a real argument.
pub fn gamma_real(x: &Float, prec: Precision) -> Result<Float> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x.to_string_radix(10, Some(8))));
    }
    Ok(Float::with_val(prec.bits(), x.gamma_ref()))
}

/// ln Gamma(x) for x > 0.
pub fn ln_gamma_real(x: &Float, prec: Precision) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::Domain(format!(
            "ln_gamma_real needs a positive argument, got {}",
            x.to_string_radix(10, Some(8))
        )));
    }
    Ok(Float::with_val(prec.bits(), x.ln_gamma_ref()))
}

/// Gamma function of a complex argument.
///
/// Real arguments go straight to MPFR. Otherwise the argument is reflected
/// into the right half-plane, shifted up to `Re z >= r0` and the Stirling
/// series is summed with Bernoulli numbers obtained from zeta(2k).
pub fn gamma(z: &Complex, prec: Precision) -> Result<Complex> {
    let bits = prec.bits();
    if z.imag().is_zero() {
        let g = gamma_real(z.real(), prec)?;
        return Ok(Complex::with_val(bits, (g, 0)));
    }
    let work = bits + 32;
    let z = Complex::with_val(work, z);
    let half = Float::with_val(work, 0.5);
    if *z.real() < half {
        // Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        let pi = Float::with_val(work, Constant::Pi);
        let one_minus = Complex::with_val(work, 1 - &z);
        let g = gamma_shifted(&one_minus, work);
        let s = Complex::with_val(work, &z * &pi).sin();
        let out = Complex::with_val(work, pi) / (s * g);
        return Ok(Complex::with_val(bits, out));
    }
    Ok(Complex::with_val(bits, gamma_shifted(&z, work)))
}

/// Gamma for Re z >= 1/2 via recurrence and Stirling's series.
fn gamma_shifted(z: &Complex, work: u32) -> Complex {
    let r0 = 0.15 * f64::from(work) + 8.0;
    let re = z.real().to_f64();
    let shift = if re < r0 { (r0 - re).ceil() as u32 } else { 0 };

    let mut w = Complex::with_val(work, z);
    let mut prod = Complex::with_val(work, 1);
    for _ in 0..shift {
        prod *= &w;
        w += 1u32;
    }
    let lg = ln_gamma_stirling(&w, work);
    lg.exp() / prod
}

fn ln_gamma_stirling(w: &Complex, work: u32) -> Complex {
    let half = Float::with_val(work, 0.5);
    let ln_w = Complex::with_val(work, w.ln_ref());
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let mut acc = Complex::with_val(work, w - &half) * &ln_w;
    acc -= w;
    acc += Float::with_val(work, two_pi.ln()) * &half;

    let inv = Complex::with_val(work, w.recip_ref());
    let inv2 = Complex::with_val(work, inv.square_ref());
    let mut pow = inv; // w^{-(2k-1)}
    let tol = Float::with_val(work, Float::i_exp(1, -(work as i32)));
    let mut prev_mag: Option<Float> = None;
    for k in 1u32..4000 {
        let b2k = bernoulli_even(k, work);
        let denom = Float::with_val(work, 2 * k) * (2 * k - 1);
        let term = Complex::with_val(work, &pow * (b2k / denom));
        let mag = Float::with_val(work, term.abs_ref());
        if let Some(p) = &prev_mag {
            if mag > *p {
                break;
            }
        }
        acc += &term;
        if mag < tol {
            break;
        }
        prev_mag = Some(mag);
        pow *= &inv2;
    }
    acc
}

/// B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}.
fn bernoulli_even(k: u32, work: u32) -> Float {
    let two_k = 2 * k;
    let zeta = Float::with_val(work, Float::zeta_u(two_k));
    let fact = Float::with_val(work, rug::Integer::from(rug::Integer::factorial(two_k)));
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let mut b = zeta * fact * 2u32 / two_pi.pow(two_k);
    if k.is_multiple_of(2) {
        b = -b;
    }
    b
}
