//! Inverse factorial expansions for the late coefficients a_n(lambda) with
//! their error bounds.
//!
//! All approximations are returned on the a_n scale, i.e. divided by (2n)!.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::kernels::{Lambda, Regime};
use crate::numerics::{cabs, factorial, gamma_real, sin_third_odd, Precision};
use crate::powser::{cusp_coeff_d, hankel_coeff_u};

/// Which error bound was applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCase {
    /// lambda > 1: the single bound on the first omitted term.
    Sec,
    /// lambda = 1 with M = 0 mod 3: two omitted terms.
    M0,
    /// lambda = 1 with M = 1 mod 3: the m = M term vanishes.
    M1,
    /// lambda = 1 with M = 2 mod 3.
    M2,
    None,
}

impl BoundCase {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundCase::Sec => "SEC",
            BoundCase::M0 => "M0",
            BoundCase::M1 => "M1",
            BoundCase::M2 => "M2",
            BoundCase::None => "NONE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LateCoeffApprox {
    pub n: usize,
    pub m: usize,
    pub approx: Float,
    pub errbound: Option<Float>,
    pub bound_case: BoundCase,
    pub regime: Regime,
    pub warning: Option<String>,
}

/// Gamma(2n - m + 1/2) / Gamma(2n + 1/2) for m = 0..=max, by the product
/// of the intermediate factors.
fn half_gamma_ratios(n: usize, max: usize, bits: u32) -> Vec<Float> {
    let mut out = Vec::with_capacity(max + 1);
    let mut r = Float::with_val(bits, 1);
    out.push(r.clone());
    for k in 1..=max {
        // divide by (2n - k + 1/2)
        let f = Float::with_val(bits, 2 * n as i64 - k as i64) + 0.5f64;
        r /= f;
        out.push(r.clone());
    }
    out
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::OutOfRange {
            index: n,
            constraint: "n >= 1".into(),
        })
    } else {
        Ok(())
    }
}

/// Expansion for lambda = sec(beta) > 1, truncated after M terms.
pub fn late_sec(
    n: usize,
    beta: &Float,
    m_trunc: usize,
    prec: Precision,
) -> Result<LateCoeffApprox> {
    check_n(n)?;
    if m_trunc > 2 * n {
        return Err(Error::OutOfRange {
            index: m_trunc,
            constraint: format!("0 <= M <= 2n = {}", 2 * n),
        });
    }
    let lambda = Lambda::from_beta(beta, prec)?;
    let work = prec.with_extra_bits(32);
    let bits = work.bits();
    let beta = Float::with_val(bits, beta);
    let pi = work.pi();
    let s = Float::with_val(bits, beta.tan_ref()) - &beta + &pi;
    let cot = Float::with_val(bits, beta.tan_ref()).recip();
    let x = Complex::with_val(bits, (0, &cot));
    let is = Complex::with_val(bits, (0, &s));

    let ratios = half_gamma_ratios(n, m_trunc, bits);
    let mut sum = Complex::new(bits);
    let mut is_pow = Complex::with_val(bits, 1);
    for (m, ratio) in ratios.iter().enumerate().take(m_trunc) {
        let u = hankel_coeff_u(m, &x, work)?;
        sum += Complex::with_val(bits, &is_pow * &u) * ratio;
        is_pow *= &is;
    }
    let u_m = hankel_coeff_u(m_trunc, &x, work)?;

    // sqrt(2 cot beta / (pi s)) (-1)^n Gamma(2n + 1/2) / s^{2n}
    let g = gamma_real(&(Float::with_val(bits, 2 * n as u32) + 0.5f64), work)?;
    let mut pref = Float::with_val(bits, &cot * 2u32) / Float::with_val(bits, &pi * &s);
    pref = pref.sqrt() * g / Float::with_val(bits, (&s).pow(2 * n as u32));
    if n % 2 == 1 {
        pref = -pref;
    }
    let fact = factorial(2 * n as u32, bits);
    let approx = Float::with_val(bits, sum.real()) * &pref / &fact;
    let bound = Float::with_val(bits, pref.abs_ref())
        * Float::with_val(bits, (&s).pow(m_trunc as u32))
        * cabs(&u_m)
        * &ratios[m_trunc]
        / &fact;
    Ok(LateCoeffApprox {
        n,
        m: m_trunc,
        approx: Float::with_val(prec.bits(), approx),
        errbound: Some(Float::with_val(prec.bits(), bound)),
        bound_case: BoundCase::Sec,
        regime: lambda.regime(),
        warning: None,
    })
}

/// Expansion for lambda = 1 with the bound selected by M mod 3.
pub fn late_one(n: usize, m_trunc: usize, prec: Precision) -> Result<LateCoeffApprox> {
    check_n(n)?;
    if m_trunc + 1 > 3 * n {
        return Err(Error::OutOfRange {
            index: m_trunc,
            constraint: format!("0 <= M <= 3n - 1 = {}", 3 * n - 1),
        });
    }
    let work = prec.with_extra_bits(32);
    let bits = work.bits();
    let pi = work.pi();
    let third = |k: i64| Float::with_val(bits, k) / 3u32;
    let g_lead = gamma_real(&third(6 * n as i64 + 2), work)?;
    let pi_third = Float::with_val(bits, (&pi).pow(&third(2)));

    // pi^{2m/3} d_{2m} Gamma((2m+1)/3) Gamma((6n-2m+2)/3) / Gamma(2n+2/3), without the sine
    let term = |m: usize| -> Result<Float> {
        let d = cusp_coeff_d(m, work)?;
        let a = gamma_real(&third(2 * m as i64 + 1), work)?;
        let b = gamma_real(&third(6 * n as i64 - 2 * m as i64 + 2), work)?;
        Ok(Float::with_val(bits, (&pi_third).pow(m as u32)) * d * a * b / &g_lead)
    };

    let mut sum = Float::new(bits);
    for m in 0..m_trunc {
        let s = sin_third_odd(m, bits);
        if s.is_zero() {
            continue;
        }
        let mut t = term(m)? * s;
        if m % 2 == 1 {
            t = -t;
        }
        sum += t;
    }

    // (-1)^n 2 Gamma(2n + 2/3) / (3 pi^{2n + 5/3})
    let mut pref = Float::with_val(bits, &g_lead * 2u32)
        / (Float::with_val(bits, (&pi).pow(&third(6 * n as i64 + 5))) * 3u32);
    if n % 2 == 1 {
        pref = -pref;
    }
    let fact = factorial(2 * n as u32, bits);
    let approx = Float::with_val(bits, &sum * &pref) / &fact;

    let half_sqrt3 = Float::with_val(bits, 3).sqrt() / 2u32;
    let t0 = || -> Result<Float> { Ok(term(m_trunc)?.abs() * &half_sqrt3) };
    let t1 = || -> Result<Float> { Ok(term(m_trunc + 1)?.abs() * &half_sqrt3) };
    let (raw, case) = match m_trunc % 3 {
        0 => (t0()? + t1()?, BoundCase::M0),
        1 => (t1()?, BoundCase::M1),
        _ => (t0()?, BoundCase::M2),
    };
    let bound = raw * pref.abs() / &fact;
    Ok(LateCoeffApprox {
        n,
        m: m_trunc,
        approx: Float::with_val(prec.bits(), approx),
        errbound: Some(Float::with_val(prec.bits(), bound)),
        bound_case: case,
        regime: Regime::Eq1,
        warning: None,
    })
}

/// Expansion for lambda = sech(alpha) < 1. No error bound is available.
/// M beyond 2n is accepted but flagged.
pub fn late_sech(
    n: usize,
    alpha: &Float,
    m_trunc: usize,
    prec: Precision,
) -> Result<LateCoeffApprox> {
    check_n(n)?;
    let warning = (m_trunc > 2 * n).then(|| format!("M = {m_trunc} exceeds 2n = {}", 2 * n));
    let lambda = Lambda::from_alpha(alpha, prec)?;
    let work = prec.with_extra_bits(32);
    let bits = work.bits();
    let alpha = Float::with_val(bits, alpha);
    let pi = work.pi();
    let tanh = Float::with_val(bits, alpha.tanh_ref());
    let coth = Float::with_val(bits, tanh.recip_ref());
    let s = Complex::with_val(bits, (Float::with_val(bits, &alpha - &tanh), &pi));
    let x = Complex::with_val(bits, (&coth, 0));

    let ratios = half_gamma_ratios(n, m_trunc, bits);
    let mut sum = Complex::new(bits);
    let mut s_pow = Complex::with_val(bits, 1);
    for (m, ratio) in ratios.iter().enumerate().take(m_trunc) {
        let u = hankel_coeff_u(m, &x, work)?;
        sum += Complex::with_val(bits, &s_pow * &u) * ratio;
        s_pow *= &s;
    }
    // sqrt(2 coth alpha / (pi s)) 2 Gamma(2n + 1/2) / s^{2n}
    let g = gamma_real(&(Float::with_val(bits, 2 * n as u32) + 0.5f64), work)?;
    let root =
        (Complex::with_val(bits, &s * &pi).recip() * Float::with_val(bits, &coth * 2u32)).sqrt();
    let s_2n = Complex::with_val(bits, (&s).pow(2 * n as u32));
    let v = root * g * 2u32 / s_2n * sum;
    let fact = factorial(2 * n as u32, bits);
    let approx = Float::with_val(bits, v.real()) / &fact;
    Ok(LateCoeffApprox {
        n,
        m: m_trunc,
        approx: Float::with_val(prec.bits(), approx),
        errbound: None,
        bound_case: BoundCase::None,
        regime: lambda.regime(),
        warning,
    })
}

/// The real-valued optimal truncation estimate for each regime.
pub fn optimal_m_formula(n: usize, lambda: &Lambda) -> f64 {
    let four_n1 = 4.0 * n as f64 + 1.0;
    match lambda.regime() {
        Regime::Gt1 => {
            let b = lambda.beta().expect("beta").to_f64();
            let g = b.tan() - b;
            g * four_n1 / (3.0 * g + std::f64::consts::PI)
        }
        Regime::Eq1 => 2.0 * n as f64,
        Regime::Lt1 => {
            let a = lambda.alpha().expect("alpha").to_f64();
            let g = a - a.tanh();
            g * four_n1 / (2.0 * g + g.hypot(std::f64::consts::PI))
        }
    }
}

/// Truncation index for the late-coefficient expansion.
///
/// For lambda >= 1 the computed bound is minimized over
/// floor(f)-1 ..= ceil(f)+1 around the formula value f; exact ties go to
/// the index closest to f, then to the larger index. For lambda < 1 the
/// formula is rounded.
pub fn optimal_m(n: usize, lambda: &Lambda, prec: Precision) -> Result<usize> {
    check_n(n)?;
    let f = optimal_m_formula(n, lambda);
    if lambda.regime() == Regime::Lt1 {
        return Ok(f.round().max(0.0) as usize);
    }
    let max_m = match lambda.regime() {
        Regime::Gt1 => 2 * n,
        _ => 3 * n - 1,
    };
    let lo = (f.floor() - 1.0).max(0.0) as usize;
    let hi = ((f.ceil() + 1.0) as usize).min(max_m);
    let tie = Float::with_val(64, 10).pow(-(prec.digits() as i32 - 10));
    let mut best: Option<(usize, Float)> = None;
    for m in lo..=hi {
        let approx = match lambda.regime() {
            Regime::Gt1 => late_sec(n, lambda.beta().expect("beta"), m, prec)?,
            _ => late_one(n, m, prec)?,
        };
        let b = approx.errbound.expect("bound present for lambda >= 1");
        best = match best {
            None => Some((m, b)),
            Some((bm, bb)) => {
                let rel = Float::with_val(64, &b - &bb).abs() / Float::with_val(64, bb.abs_ref());
                let better = if rel <= tie {
                    let (dm, db) = ((m as f64 - f).abs(), (bm as f64 - f).abs());
                    dm < db || (dm == db && m > bm)
                } else {
                    b < bb
                };
                if better {
                    Some((m, b))
                } else {
                    Some((bm, bb))
                }
            }
        };
    }
    Ok(best.expect("nonempty window").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::agreement_digits;

    fn p() -> Precision {
        Precision::default()
    }

    fn parse(s: &str, prec: Precision) -> Float {
        Float::with_val(prec.bits(), Float::parse(s).unwrap())
    }

    #[test]
    fn half_gamma_ratios_match_gamma() {
        let prec = p();
        let r = half_gamma_ratios(10, 7, prec.bits());
        let g = |x: f64| gamma_real(&prec.real(x), prec).unwrap();
        let expect = g(20.5 - 7.0) / g(20.5);
        assert!(agreement_digits(&r[7], &expect, 80.0) > 58.0);
    }

    #[test]
    fn sec_expansion_first_block() {
        let prec = p();
        let beta = prec.pi() / 6u32;
        let a = late_sec(50, &beta, 4, prec).unwrap();
        assert!(
            agreement_digits(
                &a.approx,
                &parse("0.1997204566354320191164985775448290e-51", prec),
                80.0
            ) >= 30.0
        );
        assert!(
            agreement_digits(
                a.errbound.as_ref().unwrap(),
                &parse("0.16182537012652011778281419657176e-53", prec),
                80.0
            ) >= 30.0
        );
        assert_eq!(a.bound_case, BoundCase::Sec);
        assert!(late_sec(50, &beta, 101, prec).is_err());
    }

    #[test]
    fn one_expansion_dispatches_on_m_mod_3() {
        let prec = p();
        let a = late_one(5, 10, prec).unwrap();
        assert_eq!(a.bound_case, BoundCase::M1);
        assert!(
            agreement_digits(
                &a.approx,
                &parse("-0.2039317236866484733447636037370858e-5", prec),
                80.0
            ) >= 30.0
        );
        assert!(
            agreement_digits(
                a.errbound.as_ref().unwrap(),
                &parse("0.5218454726884724646870658288e-11", prec),
                80.0
            ) >= 25.0
        );
        assert_eq!(late_one(5, 9, prec).unwrap().bound_case, BoundCase::M0);
        assert_eq!(late_one(5, 11, prec).unwrap().bound_case, BoundCase::M2);
        assert!(late_one(5, 15, prec).is_err());
    }

    #[test]
    fn sech_expansion_has_no_bound() {
        let prec = p();
        let a = late_sech(50, &prec.real(1), 14, prec).unwrap();
        assert!(a.errbound.is_none());
        assert!(
            agreement_digits(
                &a.approx,
                &parse("0.1279482903067682761677730364825915e-50", prec),
                80.0
            ) >= 30.0
        );
        assert!(late_sech(5, &prec.real(1), 12, prec)
            .unwrap()
            .warning
            .is_some());
    }

    #[test]
    fn optimal_m_matches_table_choices() {
        let prec = p();
        let pi3 = Lambda::from_beta(&(prec.pi() / 3u32), prec).unwrap();
        assert!((optimal_m_formula(50, &pi3) - 26.49).abs() < 0.01);
        assert_eq!(optimal_m(50, &pi3, prec).unwrap(), 27);
        let pi6 = Lambda::from_beta(&(prec.pi() / 6u32), prec).unwrap();
        assert_eq!(optimal_m(50, &pi6, prec).unwrap(), 4);
        let one = Lambda::one(prec);
        assert_eq!(optimal_m(25, &one, prec).unwrap(), 50);
        assert_eq!(optimal_m(5, &one, prec).unwrap(), 10);
        let a1 = Lambda::from_alpha(&prec.real(1), prec).unwrap();
        assert!((optimal_m_formula(50, &a1) - 13.2).abs() < 0.05);
        assert_eq!(optimal_m(50, &a1, prec).unwrap(), 13);
    }
}
