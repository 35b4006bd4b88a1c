//! Scans of arg nu across the Stokes lines arg nu = +-pi/2.

use std::f64::consts::PI;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::expansion::{
    improved_terms, measured_remainder, optimal_n, oracle_precision, poincare_sum, terminant_order,
    truncation_scale, Nu, Side,
};
use crate::kernels::{KernelTable, Lambda, Regime};
use crate::numerics::{erf_real, expi, Precision};
use crate::terminant::terminant_polar;

#[derive(Clone, Debug)]
pub struct StokesRow {
    pub theta: Float,
    /// The m = 0 terminant, normalized to run from 0 to 1 across the line.
    pub terminant_lead: Complex,
    pub erf_pred: Complex,
    pub measured_remainder: Option<Complex>,
    /// |R_N - terminant terms| where the remainder oracle is available.
    pub improved_residual: Option<Float>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct StokesProfile {
    pub lambda: Lambda,
    pub modulus: Float,
    pub side: Side,
    pub n: usize,
    pub m: usize,
    pub rows: Vec<StokesRow>,
}

impl StokesProfile {
    /// Largest |terminant_lead - erf_pred| over the grid, real parts only.
    pub fn max_real_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.terminant_lead.real().to_f64() - r.erf_pred.real().to_f64()).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let d = Complex::with_val(64, &r.terminant_lead - &r.erf_pred);
                Float::with_val(64, d.abs_ref()).to_f64()
            })
            .fold(0.0, f64::max)
    }

    /// Real part of the normalized terminant never decreases (upper side) or
    /// never increases (lower side) along the grid, up to `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let sign = if self.side == Side::Upper { 1.0 } else { -1.0 };
        self.rows.windows(2).all(|w| {
            let a = w[0].terminant_lead.real().to_f64();
            let b = w[1].terminant_lead.real().to_f64();
            sign * (b - a) >= -tol
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub side: Side,
    /// Terminant terms used for the residual column.
    pub m_terms: usize,
    pub oracle: Oracle,
}

/// Source of the measured remainder R_N on each row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    None,
    /// The defining integral continued along a deformed path.
    Integral,
    /// The remainder integral along one rotated ray shared by all rows.
    Kernel,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            side: Side::Upper,
            m_terms: 3,
            oracle: Oracle::None,
        }
    }
}

/// `steps` equally spaced angles from `lo` to `hi` inclusive.
pub fn grid(lo: &Float, hi: &Float, steps: usize, prec: Precision) -> Result<Vec<Float>> {
    if steps < 2 || hi <= lo {
        return Err(Error::Domain(
            "the scan window needs lo < hi and at least 2 points".into(),
        ));
    }
    let bits = prec.bits();
    let h = Float::with_val(bits, hi - lo) / (steps as u32 - 1);
    Ok((0..steps)
        .map(|k| Float::with_val(bits, lo + Float::with_val(bits, &h * k as u32)))
        .collect())
}

/// The default window: 41 points over [pi/2 - 0.5, pi/2 + 0.5], mirrored for
/// the lower line.
pub fn default_window(side: Side, prec: Precision) -> (Float, Float, usize) {
    let bits = prec.bits();
    let half_pi = prec.pi() / 2u32;
    let c = if side == Side::Upper {
        half_pi
    } else {
        -half_pi
    };
    (
        Float::with_val(bits, &c - 0.5f64),
        Float::with_val(bits, &c + 0.5f64),
        41,
    )
}

/// Normalized m = 0 terminant at arg nu = theta and its error-function prediction.
fn lead_and_prediction(
    lambda: &Lambda,
    modulus: &Float,
    theta: &Float,
    n_trunc: usize,
    side: Side,
    prec: Precision,
) -> Result<(Complex, Complex)> {
    let bits = prec.bits();
    let s = truncation_scale(lambda);
    let r = Float::with_val(bits, modulus * &s);
    let half_pi = prec.pi() / 2u32;
    let p = terminant_order(lambda, n_trunc, 0, bits);
    let k = (Float::with_val(bits, &r) / 2u32).sqrt();
    match side {
        Side::Upper => {
            let arg = Float::with_val(bits, theta + &half_pi);
            let t = terminant_polar(&p, &r, &arg, prec)?.value;
            let x = Float::with_val(bits, theta - &half_pi) * &k;
            let pred = (erf_real(&x, prec) + 1u32) / 2u32;
            Ok((t, Complex::with_val(bits, (pred, 0))))
        }
        Side::Lower => {
            let arg = Float::with_val(bits, theta - &half_pi);
            let t = terminant_polar(&p, &r, &arg, prec)?.value;
            // -e^{-2 pi i p} T̂_p runs from 0 to 1 as the lower line is crossed downwards
            let rot = expi(&-(Float::with_val(bits, &p * prec.pi()) * 2u32));
            let lead = -(t * rot);
            let x = Float::with_val(bits, theta + &half_pi) * &k;
            let pred = (1u32 - erf_real(&x, prec)) / 2u32;
            Ok((lead, Complex::with_val(bits, (pred, 0))))
        }
    }
}

/// Sweep arg nu over `thetas` at fixed |nu| for lambda >= 1.
pub fn stokes_scan(
    lambda: &Lambda,
    modulus: &Float,
    thetas: &[Float],
    options: &ScanOptions,
    prec: Precision,
) -> Result<StokesProfile> {
    if lambda.regime() == Regime::Lt1 {
        return Err(Error::RegimeUnsupported("LT1"));
    }
    if thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "scan grid must be strictly increasing".into(),
        ));
    }
    let n_trunc = optimal_n(modulus, lambda)?;
    let bits = prec.bits();
    let kernels = (options.oracle == Oracle::Kernel).then(|| KernelTable::new(lambda, prec));
    let mid = thetas
        .first()
        .zip(thetas.last())
        .map(|(a, b)| Float::with_val(bits, a + b) / 2u32)
        .unwrap_or_else(|| Float::new(bits));
    // one rotated ray for the whole scan so kernel values are shared
    let phi = Float::with_val(bits, &mid / 2u32);

    let mut rows = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let mut row = StokesRow {
            theta: theta.clone(),
            terminant_lead: Complex::new(bits),
            erf_pred: Complex::new(bits),
            measured_remainder: None,
            improved_residual: None,
            failure: None,
        };
        match lead_and_prediction(lambda, modulus, theta, n_trunc, options.side, prec) {
            Ok((t, e)) => {
                row.terminant_lead = t;
                row.erf_pred = e;
            }
            Err(e) => row.failure = Some(e.to_string()),
        }
        if options.oracle != Oracle::None {
            let th = theta.to_f64();
            let ok = th.abs() < PI - 1e-6
                && (kernels.is_none()
                    || ((th - phi.to_f64()).abs() < PI / 2.0 && phi.to_f64().abs() < PI / 2.0));
            if ok {
                let nu = Nu::new(modulus, theta)?;
                // the continued integral loses about |nu| s nats to cancellation
                let work = match &kernels {
                    Some(_) => prec,
                    None => oracle_precision(modulus, lambda, options.m_terms, prec),
                };
                let measured = match &kernels {
                    Some(k) => k.remainder_via_integral(n_trunc, &nu.value(), &phi),
                    None => measured_remainder(&nu, lambda, n_trunc, None, work),
                };
                let r = measured.and_then(|rn| {
                    let mut resid = rn.clone();
                    for t in improved_terms(&nu, lambda, n_trunc, options.m_terms, work)? {
                        resid -= &t.upper;
                        resid -= &t.lower;
                    }
                    Ok((
                        Complex::with_val(bits, rn),
                        Float::with_val(bits, resid.abs_ref()),
                    ))
                });
                match r {
                    Ok((rn, res)) => {
                        row.measured_remainder = Some(rn);
                        row.improved_residual = Some(res);
                    }
                    Err(e) => row.failure = Some(e.to_string()),
                }
            }
        }
        rows.push(row);
    }
    Ok(StokesProfile {
        lambda: lambda.clone(),
        modulus: modulus.clone(),
        side: options.side,
        n: n_trunc,
        m: options.m_terms,
        rows,
    })
}

/// A_nu from the truncated series plus the full re-expansion, for plotting
/// against the compound expansions on either side of a line.
pub fn smoothed_value(
    nu: &Nu,
    lambda: &Lambda,
    m_terms: usize,
    prec: Precision,
) -> Result<Complex> {
    let n_trunc = optimal_n(nu.modulus(), lambda)?;
    let mut v = poincare_sum(nu, lambda, n_trunc, prec)?;
    for t in improved_terms(nu, lambda, n_trunc, m_terms, prec)? {
        v += &t.upper;
        v += &t.lower;
    }
    Ok(v)
}
