//! The scaled terminant function
//!
//! T̂_p(w) = e^{pi i p} w^{1-p} e^{-w} / (2 pi i) int_0^inf t^{p-1} e^{-t} / (w + t) dt,
//!
//! its continuation to neighbouring sheets and its error-function
//! approximations near the Stokes line arg w = pi.

use std::f64::consts::{LOG2_E, PI};

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{
    cabs, carg, erf, expi, integrate_semiinfinite, pow_polar, Precision, Quadrature, QuadratureSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminantMethod {
    Quadrature,
    Connection,
    Erf,
}

impl TerminantMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            TerminantMethod::Quadrature => "quadrature",
            TerminantMethod::Connection => "connection",
            TerminantMethod::Erf => "erf",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TerminantValue {
    pub p: Float,
    /// Principal representative of w.
    pub w: Complex,
    /// arg w lies in ((2k-1) pi, (2k+1) pi].
    pub sheet: i32,
    /// Unreduced argument arg w + 2 pi k.
    pub arg: Float,
    pub value: Complex,
    pub method: TerminantMethod,
}

/// T̂_p(w e^{2 pi i sheet}) where `w` is read with its principal argument.
pub fn terminant(p: &Float, w: &Complex, sheet: i32, prec: Precision) -> Result<TerminantValue> {
    if *p <= 0 {
        return Err(Error::Domain("terminant order p must be positive".into()));
    }
    if w.is_zero() {
        return Err(Error::Domain("terminant argument must be nonzero".into()));
    }
    let bits = prec.bits();
    let r = cabs(w);
    let principal = carg(w);
    let two_pi = prec.pi() * 2u32;
    let arg = Float::with_val(bits, &principal + Float::with_val(bits, &two_pi * sheet));
    let base = terminant_principal(p, &r, &principal, prec)?;
    let (value, method) = match sheet {
        0 => (base, TerminantMethod::Quadrature),
        // T̂_p(w e^{2 pi i}) = e^{-2 pi i p} T̂_p(w) + 1
        1 => {
            let rot = expi(&-Float::with_val(bits, p * &two_pi));
            (base * rot + 1u32, TerminantMethod::Connection)
        }
        // T̂_p(w e^{-2 pi i}) = e^{2 pi i p} (T̂_p(w) - 1)
        -1 => {
            let rot = expi(&Float::with_val(bits, p * &two_pi));
            ((base - 1u32) * rot, TerminantMethod::Connection)
        }
        _ => {
            return Err(Error::Sector(format!(
                "sheet {sheet} is outside the supported range -1..=1"
            )))
        }
    };
    Ok(TerminantValue {
        p: p.clone(),
        w: w.clone(),
        sheet,
        arg,
        value,
        method,
    })
}

/// T̂_p at modulus `r` and unreduced argument `phi`, choosing the sheet
/// from `phi`. Values with |phi| <= pi come from quadrature.
pub fn terminant_polar(
    p: &Float,
    r: &Float,
    phi: &Float,
    prec: Precision,
) -> Result<TerminantValue> {
    let bits = prec.bits();
    let pi = prec.pi();
    let two_pi = Float::with_val(bits, &pi * 2u32);
    let mut sheet = 0i32;
    let mut principal = Float::with_val(bits, phi);
    while principal > pi {
        principal -= &two_pi;
        sheet += 1;
    }
    let neg_pi = Float::with_val(bits, -&pi);
    while principal <= neg_pi {
        principal += &two_pi;
        sheet -= 1;
    }
    if Float::with_val(bits, phi.abs_ref()) == pi {
        // arg w = +-pi: evaluate the boundary directly on the requested side.
        let value = terminant_principal(p, r, phi, prec)?;
        let w = crate::numerics::polar(r, phi);
        return Ok(TerminantValue {
            p: p.clone(),
            w,
            sheet: 0,
            arg: phi.clone(),
            value,
            method: TerminantMethod::Quadrature,
        });
    }
    let w = crate::numerics::polar(r, &principal);
    terminant(p, &w, sheet, prec)
}

/// Direct quadrature for |phi| < 7 pi / 6, continuing across arg w = +-pi
/// by rotating the integration ray instead of using the connection formula.
/// The integral cancels to O(1) from terms of size about e^{2|w|}, so for
/// large p it may fail to converge beyond |phi| - pi of roughly 0.4.
pub fn terminant_continued(p: &Float, r: &Float, phi: &Float, prec: Precision) -> Result<Complex> {
    let limit = 7.0 * PI / 6.0 - 1e-9;
    if phi.to_f64().abs() >= limit {
        return Err(Error::Sector(format!(
            "direct continuation needs |arg w| < 7 pi / 6, got {:.4}",
            phi.to_f64()
        )));
    }
    terminant_principal(p, r, phi, prec)
}

/// Ray angle keeping the pole t = -w at least pi/3 away from the contour.
fn ray_angle(phi: f64) -> f64 {
    let a = phi.abs();
    if a <= 2.0 * PI / 3.0 {
        0.0
    } else {
        phi.signum() * (a - 2.0 * PI / 3.0)
    }
}

fn terminant_principal(p: &Float, r: &Float, phi: &Float, prec: Precision) -> Result<Complex> {
    let phif = phi.to_f64();
    if phif.abs() >= 7.0 * PI / 6.0 {
        return Err(Error::Sector(
            "terminant quadrature needs |arg w| < 7 pi / 6".into(),
        ));
    }
    let psi = ray_angle(phif);
    let pf = p.to_f64();
    // Rotating the ray raises the integrand by about cos(psi)^{-(p-1)}.
    let extra = ((pf - 1.0).max(0.0) * (1.0 / psi.cos()).log2()
        + 32.0
        + (pf.max(1.0).ln() * LOG2_E))
        .ceil() as u32;
    let work = prec.with_extra_bits(extra);
    let wb = work.bits();
    let p = Float::with_val(wb, p);
    let r = Float::with_val(wb, r);
    let phi = Float::with_val(wb, phi);
    let w = crate::numerics::polar(&r, &phi);
    let psi_f = Float::with_val(wb, psi);
    let dir = expi(&psi_f);
    let pm1 = Float::with_val(wb, &p - 1u32);

    // int_0^inf t^{p-1} e^{-t} / (w + t) dt with t = s e^{i psi}
    let spec = QuadratureSpec::new(work.digits() + 4);
    let q: Quadrature<Complex> = integrate_semiinfinite(
        |s: &Float| {
            let t = Complex::with_val(wb, &dir * s);
            let pw = (Float::with_val(wb, s.ln_ref()) * &pm1).exp();
            let e = (-Complex::with_val(wb, &t)).exp();
            let den = Complex::with_val(wb, &w + &t);
            Ok(e * pw / den)
        },
        &spec,
        work,
    )?;
    // t^{p-1} dt = s^{p-1} e^{i psi p} ds
    let ray_factor = expi(&Float::with_val(wb, &psi_f * &p));
    let integral = q.value * ray_factor;

    let pi = Float::with_val(wb, Constant::Pi);
    let one_minus_p = Complex::with_val(wb, (Float::with_val(wb, 1 - &p), 0));
    let w_pow = pow_polar(&r, &phi, &one_minus_p);
    let e_pip = expi(&Float::with_val(wb, &pi * &p));
    let e_mw = (-Complex::with_val(wb, &w)).exp();
    let two_pi_i = Complex::with_val(wb, (0, Float::with_val(wb, &pi * 2u32)));
    let out = e_pip * w_pow * e_mw * integral / two_pi_i;
    Ok(Complex::with_val(prec.bits(), out))
}

/// c(phi), defined by c^2 / 2 = 1 + i (phi - pi) - e^{i (phi - pi)} with the
/// branch c ~ (phi - pi) + (i/6)(phi - pi)^2 near phi = pi.
pub fn stokes_c(phi: &Float, prec: Precision) -> Result<Complex> {
    let bits = prec.bits();
    let delta = Float::with_val(bits, phi - prec.pi());
    let df = delta.to_f64();
    if df.abs() >= 2.0 * PI {
        return Err(Error::Domain(
            "c(phi) is tracked only for |phi - pi| < 2 pi".into(),
        ));
    }
    if delta.is_zero() {
        return Ok(Complex::new(bits));
    }
    // c = delta sqrt(g), g = 2 (1 + i delta - e^{i delta}) / delta^2, Re g > 0 on the domain
    let extra = (3.0 * (-df.abs().log2()).max(0.0)).ceil() as u32 + 16;
    let wb = bits + extra;
    let d = Float::with_val(wb, &delta);
    let id = Complex::with_val(wb, (0, &d));
    let e = Complex::with_val(wb, id.exp_ref());
    let num = (Complex::with_val(wb, &id + 1u32) - e) * 2u32;
    let g = num / Float::with_val(wb, d.square_ref());
    let c = g.sqrt() * &d;
    Ok(Complex::with_val(bits, c))
}

/// ½ + ½ erf(c(phi) sqrt(|w|/2)) for -pi < phi < 3 pi, phi = arg w unreduced.
pub fn terminant_erf_upper(p: &Float, r: &Float, phi: &Float, prec: Precision) -> Result<Complex> {
    let _ = p;
    let f = phi.to_f64();
    if !(f > -PI && f < 3.0 * PI) {
        return Err(Error::Sector(format!(
            "upper erf form needs -pi < arg w < 3 pi, got {f:.4}"
        )));
    }
    let bits = prec.bits();
    let c = stokes_c(phi, prec)?;
    let scale = Float::with_val(bits, r / 2u32).sqrt();
    let z = c * scale;
    Ok((erf(&z, prec) + 1u32) / 2u32)
}

/// The lower form: T̂_p(w) ≈ e^{2 pi i p} (-½ + ½ erf(-conj(c(-phi)) sqrt(|w|/2)))
/// for -3 pi < phi < pi.
pub fn terminant_erf_lower(p: &Float, r: &Float, phi: &Float, prec: Precision) -> Result<Complex> {
    let f = phi.to_f64();
    if !(f > -3.0 * PI && f < PI) {
        return Err(Error::Sector(format!(
            "lower erf form needs -3 pi < arg w < pi, got {f:.4}"
        )));
    }
    let bits = prec.bits();
    let c = stokes_c(&Float::with_val(bits, -phi), prec)?;
    let scale = Float::with_val(bits, r / 2u32).sqrt();
    let z = -Complex::with_val(bits, c.conj_ref()) * scale;
    let inner = (erf(&z, prec) - 1u32) / 2u32;
    let two_pi_p = Float::with_val(bits, p * prec.pi()) * 2u32;
    Ok(inner * expi(&two_pi_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::agreement_digits_complex;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn parse_c(re: &str, im: &str, prec: Precision) -> Complex {
        Complex::with_val(
            prec.bits(),
            (Float::parse(re).unwrap(), Float::parse(im).unwrap()),
        )
    }

    #[test]
    fn quadrature_matches_incomplete_gamma_oracle() {
        // e^{pi i p} Gamma(p) Gamma(1-p, w) / (2 pi i) at p = 5.5, w = 10i
        let prec = p();
        let v = terminant(&prec.real(5.5), &prec.complex((0, 10)), 0, prec).unwrap();
        assert_eq!(v.method, TerminantMethod::Quadrature);
        let expect = parse_c(
            "-0.000017617599902433140011379212446612672980896364548477",
            "-0.000014259065118761547222847194701056279533552970316636",
            prec,
        );
        assert!(
            agreement_digits_complex(&v.value, &expect, 60.0) >= 36.0,
            "{}",
            v.value
        );
    }

    #[test]
    fn connection_formula_residual() {
        let prec = p();
        for (pv, r, phi) in [(3.5, 8.0, 2.9), (12.25, 12.0, -3.0), (20.5, 20.0, 3.1)] {
            let pf = prec.real(pv);
            let rf = prec.real(r);
            let phif = prec.real(phi);
            let a = terminant_polar(&pf, &rf, &phif, prec).unwrap().value;
            let shifted = Float::with_val(prec.bits(), &phif + prec.pi() * 2u32);
            let b = terminant_polar(&pf, &rf, &shifted, prec).unwrap();
            assert_eq!(b.method, TerminantMethod::Connection);
            let rot = expi(&(prec.pi() * 2u32 * &pf));
            let back = (b.value - 1u32) * rot;
            let res = Complex::with_val(prec.bits(), &a - &back);
            assert!(cabs(&res) < 1e-35, "p={pv} phi={phi}");
        }
    }

    #[test]
    fn rotated_continuation_agrees_with_connection() {
        let prec = p();
        let pf = prec.real(10.5);
        let rf = prec.real(10.0);
        let phi = prec.real(3.4);
        let direct = terminant_continued(&pf, &rf, &phi, prec).unwrap();
        let via = terminant_polar(&pf, &rf, &phi, prec).unwrap();
        assert_eq!(via.method, TerminantMethod::Connection);
        assert!(agreement_digits_complex(&direct, &via.value, 60.0) >= 34.0);
    }

    #[test]
    fn c_at_and_near_pi() {
        let prec = p();
        assert!(stokes_c(&prec.pi(), prec).unwrap().is_zero());
        let d = 0.1f64;
        let c = stokes_c(&(prec.pi() + d), prec).unwrap();
        let re = c.real().to_f64();
        let im = c.imag().to_f64();
        assert!((re - (d - d.powi(3) / 36.0)).abs() < 1e-5);
        assert!((im - d * d / 6.0).abs() < 1e-5);
        let cm = stokes_c(&(prec.pi() - d), prec).unwrap();
        assert!(cm.real().is_sign_negative());
        // defining relation
        let delta = prec.real(1.3);
        let c = stokes_c(&(prec.pi() + &delta), prec).unwrap();
        let lhs = Complex::with_val(prec.bits(), c.square_ref()) / 2u32;
        let id = Complex::with_val(prec.bits(), (0, delta));
        let rhs = Complex::with_val(prec.bits(), &id + 1u32) - id.exp();
        assert!(agreement_digits_complex(&lhs, &rhs, 60.0) > 38.0);
    }

    #[test]
    fn erf_forms_at_stokes_line_and_reflection() {
        let prec = p();
        let pf = prec.real(40.5);
        let rf = prec.real(40.0);
        let up = terminant_erf_upper(&pf, &rf, &prec.pi(), prec).unwrap();
        assert_eq!(up.real().to_f64(), 0.5);
        assert!(up.imag().is_zero());
        // lower(p, conj w) = -conj(upper(p, w)) once the e^{2 pi i p} factor is removed
        let phi = prec.real(2.8);
        let u = terminant_erf_upper(&pf, &rf, &phi, prec).unwrap();
        let l = terminant_erf_lower(&pf, &rf, &(-phi), prec).unwrap();
        let unrot = l * expi(&-(prec.pi() * 2u32 * &pf));
        let mirrored = -Complex::with_val(prec.bits(), u.conj_ref());
        assert!(agreement_digits_complex(&unrot, &mirrored, 60.0) > 38.0);
        assert!(terminant_erf_upper(&pf, &rf, &prec.real(-3.5), prec).is_err());
    }

    #[test]
    fn erf_form_tracks_quadrature_near_stokes_line() {
        let prec = p();
        for (r, tol) in [(20.0, 0.02), (60.0, 0.012)] {
            let rf = prec.real(r);
            let pf = prec.real(r + 0.5);
            for phi in [PI - 0.3, PI, PI + 0.3] {
                let phif = prec.real(phi);
                let t = terminant_polar(&pf, &rf, &phif, prec).unwrap().value;
                let e = terminant_erf_upper(&pf, &rf, &phif, prec).unwrap();
                let d = cabs(&Complex::with_val(prec.bits(), &t - &e)).to_f64();
                assert!(d < tol, "r={r} phi={phi} d={d}");
            }
        }
    }

    #[test]
    fn exponentially_small_on_principal_sheet() {
        // |i e^{-pi i p} T̂_p(w)| = O(e^{-Re w - |w|}) for |arg w| <= pi
        let prec = p();
        let r = 30.0;
        for phi in [0.0, 1.0, 2.0] {
            let t = terminant_polar(&prec.real(r), &prec.real(r), &prec.real(phi), prec).unwrap();
            let lg = cabs(&t.value).ln().to_f64();
            let env = -r * f64::cos(phi) - r;
            assert!(lg < env + 3.0, "phi={phi}: {lg} vs {env}");
        }
    }
}
