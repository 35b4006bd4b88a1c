use rug::float::Constant;
use rug::{Complex, Float};

use super::Precision;

/// Error function of a real argument.
pub fn erf_real(x: &Float, prec: Precision) -> Float {
    Float::with_val(prec.bits(), x.erf_ref())
}

/// Error function of a complex argument.
///
/// Maclaurin series with enough guard bits to absorb the e^{|z|^2}
/// cancellation for moderate |z|; the asymptotic erfc series (truncated at
/// its least term) for large |z|, using oddness for Re z < 0.
pub fn erf(z: &Complex, prec: Precision) -> Complex {
    let bits = prec.bits();
    if z.imag().is_zero() {
        return Complex::with_val(bits, (erf_real(z.real(), prec), 0));
    }
    let mag2 = Float::with_val(53, z.norm_ref()).to_f64();
    if mag2 <= f64::from(bits).max(200.0) {
        erf_maclaurin(z, bits, mag2)
    } else if *z.real() >= 0 {
        let erfc = erfc_asymptotic(z, bits);
        Complex::with_val(bits, 1 - erfc)
    } else {
        let neg = Complex::with_val(bits, -z);
        let erfc = erfc_asymptotic(&neg, bits);
        Complex::with_val(bits, erfc - 1)
    }
}

fn erf_maclaurin(z: &Complex, bits: u32, mag2: f64) -> Complex {
    let guard = (mag2 * std::f64::consts::LOG2_E).ceil() as u32 + 32;
    let work = bits + guard;
    let z = Complex::with_val(work, z);
    let z2 = Complex::with_val(work, z.square_ref());
    let tol = Float::with_val(work, Float::i_exp(1, -(work as i32)));

    // sum_{n>=0} (-1)^n z^{2n+1} / (n! (2n+1))
    let mut power = z.clone(); // (-1)^n z^{2n+1} / n!
    let mut acc = z.clone();
    let mut n: u32 = 0;
    loop {
        n += 1;
        power *= &z2;
        power /= n;
        power = -power;
        let term = Complex::with_val(work, &power / (2 * n + 1));
        acc += &term;
        let tm = Float::with_val(64, term.abs_ref());
        if f64::from(n) > mag2 && tm < tol {
            break;
        }
    }
    let two_over_sqrt_pi = Float::with_val(work, Constant::Pi).sqrt().recip() * 2u32;
    Complex::with_val(bits, acc * two_over_sqrt_pi)
}

fn erfc_asymptotic(z: &Complex, bits: u32) -> Complex {
    let work = bits + 32;
    let z = Complex::with_val(work, z);
    let z2 = Complex::with_val(work, z.square_ref());
    let inv_2z2 = Complex::with_val(work, (z2.clone() * 2u32).recip());
    // sum_k (-1)^k (2k-1)!! / (2 z^2)^k
    let mut term = Complex::with_val(work, 1);
    let mut acc = term.clone();
    let mut prev = Float::with_val(64, 1);
    for k in 1u32..10_000 {
        term *= &inv_2z2;
        term *= 2 * k - 1;
        term = -term;
        let tm = Float::with_val(64, term.abs_ref());
        if tm > prev {
            break;
        }
        acc += &term;
        prev = tm;
    }
    let sqrt_pi = Float::with_val(work, Constant::Pi).sqrt();
    let pref = (-z2).exp() / (z * sqrt_pi);
    Complex::with_val(bits, acc * pref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{agreement_digits, agreement_digits_complex};

    #[test]
    fn erf_zero_and_oddness() {
        let p = Precision::default();
        assert!(erf(&p.complex(0), p).real().is_zero());
        for x in [0.1, 0.75, 2.5, 6.0] {
            let a = erf(&p.complex(x), p);
            let b = erf(&p.complex(-x), p);
            let s = Complex::with_val(p.bits(), &a + &b);
            assert!(Float::with_val(p.bits(), s.abs_ref()) < 1e-55);
        }
        let z = p.complex((0.4, -1.3));
        let nz = Complex::with_val(p.bits(), -&z);
        let s = Complex::with_val(p.bits(), erf(&z, p) + erf(&nz, p));
        assert!(Float::with_val(p.bits(), s.abs_ref()) < 1e-55);
    }

    #[test]
    fn complex_branch_agrees_with_real_kernel() {
        // Route a real argument through the complex Maclaurin code by adding
        // a tiny imaginary part and compare against MPFR erf.
        let p = Precision::default();
        let x = p.real(1);
        let z = Complex::with_val(
            p.bits(),
            (x.clone(), Float::with_val(p.bits(), Float::i_exp(1, -400))),
        );
        let via_series = erf(&z, p);
        let direct = erf_real(&x, p);
        assert!(agreement_digits(via_series.real(), &direct, 80.0) > 58.0);
    }

    #[test]
    fn large_argument_routes_agree() {
        // |z|^2 just under and over the Maclaurin cutoff must agree.
        let p = Precision::default();
        let z = p.complex((14.0, 3.0));
        let a = erf_maclaurin(&z, p.bits(), 205.0);
        let b = Complex::with_val(p.bits(), 1 - erfc_asymptotic(&z, p.bits()));
        assert!(agreement_digits_complex(&a, &b, 80.0) > 55.0);
    }

    #[test]
    fn erf_one_against_quadrature() {
        // erf(1) = (2/sqrt(pi)) int_0^1 e^{-t^2} dt, and the complex series
        // evaluated at 1 + 0i must agree with both.
        let p = Precision::new(50).unwrap();
        let spec = crate::numerics::QuadratureSpec::new(50);
        let q = crate::numerics::integrate_finite(
            |t: &Float| Ok((-Float::with_val(p.bits(), t.square_ref())).exp()),
            &p.real(0),
            &p.real(1),
            &spec,
            p,
        )
        .unwrap();
        let oracle = q.value * 2u32 / p.pi().sqrt();
        let z = p.complex(1);
        let series = erf_maclaurin(&z, p.bits(), 1.0);
        assert!(agreement_digits(series.real(), &oracle, 80.0) >= 40.0);
        assert!(agreement_digits(erf(&z, p).real(), &oracle, 80.0) >= 40.0);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = Precision::default();
        let z = p.complex((0.9, 2.2));
        let a = erf(&z, p);
        let b = erf(&Complex::with_val(p.bits(), z.conj_ref()), p);
        let b = Complex::with_val(p.bits(), b.conj_ref());
        assert!(agreement_digits_complex(&a, &b, 80.0) > 58.0);
    }
}
