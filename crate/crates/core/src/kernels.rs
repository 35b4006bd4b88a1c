//! Parameter handling for lambda and quadrature-based kernels: K of
//! imaginary order, the Hankel kernel iH(t) = (2/pi) e^{pi t/2} K_{it}(lambda t),
//! and the integral forms of a_n, ã_n and the remainder R_N.

use std::collections::HashMap;
use std::f64::consts::{LN_2, LOG2_E, PI};
use std::sync::RwLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numerics::{
    cabs, carg, expi, factorial, gamma, integrate_finite, integrate_panels, integrate_semiinfinite,
    polar, Precision, QuadratureSpec,
};

/// Which side of lambda = 1 we are on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// lambda = sec(beta) > 1
    Gt1,
    Eq1,
    /// lambda = sech(alpha) < 1
    Lt1,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::Gt1 => "GT1",
            Regime::Eq1 => "EQ1",
            Regime::Lt1 => "LT1",
        }
    }
}

/// The parameter lambda with its regime and singulant.
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda {
    value: Float,
    regime: Regime,
    /// beta for `Gt1`, alpha for `Lt1`.
    angle: Option<Float>,
    singulant: Complex,
}

impl Lambda {
    pub fn from_value(lambda: &Float, prec: Precision) -> Result<Self> {
        let bits = prec.bits();
        if *lambda <= 0 {
            return Err(Error::Domain("lambda must be positive".into()));
        }
        if *lambda == 1 {
            return Ok(Self::one(prec));
        }
        let inv = Float::with_val(bits, lambda.recip_ref());
        if *lambda > 1 {
            Self::from_beta(&inv.acos(), prec)
        } else {
            Self::from_alpha(&inv.acosh(), prec)
        }
    }

    /// lambda = sec(beta), 0 < beta < pi/2.
    pub fn from_beta(beta: &Float, prec: Precision) -> Result<Self> {
        let bits = prec.bits();
        let half_pi = prec.pi() / 2u32;
        if *beta <= 0 || *beta >= half_pi {
            return Err(Error::Domain("beta must lie in (0, pi/2)".into()));
        }
        let beta = Float::with_val(bits, beta);
        let value = Float::with_val(bits, beta.cos_ref()).recip();
        let s = Float::with_val(bits, beta.tan_ref()) - &beta + prec.pi();
        Ok(Self {
            value,
            regime: Regime::Gt1,
            angle: Some(beta),
            singulant: Complex::with_val(bits, (0, s)),
        })
    }

    /// lambda = sech(alpha), alpha > 0.
    pub fn from_alpha(alpha: &Float, prec: Precision) -> Result<Self> {
        let bits = prec.bits();
        if *alpha <= 0 {
            return Err(Error::Domain("alpha must be positive".into()));
        }
        let alpha = Float::with_val(bits, alpha);
        let value = Float::with_val(bits, alpha.cosh_ref()).recip();
        let re = Float::with_val(bits, &alpha - Float::with_val(bits, alpha.tanh_ref()));
        Ok(Self {
            value,
            regime: Regime::Lt1,
            angle: Some(alpha),
            singulant: Complex::with_val(bits, (re, prec.pi())),
        })
    }

    pub fn one(prec: Precision) -> Self {
        Self {
            value: prec.real(1),
            regime: Regime::Eq1,
            angle: None,
            singulant: Complex::with_val(prec.bits(), (0, prec.pi())),
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn beta(&self) -> Option<&Float> {
        match self.regime {
            Regime::Gt1 => self.angle.as_ref(),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<&Float> {
        match self.regime {
            Regime::Lt1 => self.angle.as_ref(),
            _ => None,
        }
    }

    /// i(tan beta - beta + pi), i pi, or alpha - tanh alpha + pi i.
    pub fn singulant(&self) -> &Complex {
        &self.singulant
    }

    pub fn singulant_modulus(&self) -> Float {
        cabs(&self.singulant)
    }

    pub fn is_at_least_one(&self) -> bool {
        self.regime != Regime::Lt1
    }
}

/// t -> lambda sinh t + t.
#[derive(Clone, Debug)]
pub struct PhaseFunction {
    lambda: Float,
}

impl PhaseFunction {
    pub fn new(lambda: &Lambda) -> Self {
        Self {
            lambda: lambda.value().clone(),
        }
    }

    pub fn eval(&self, t: &Float) -> Float {
        let bits = t.prec().max(self.lambda.prec());
        Float::with_val(bits, t.sinh_ref()) * &self.lambda + t
    }
}

const SERIES_CUTOFF: f64 = 4.0;

/// K_{it}(x) for real t and x > 0.
pub fn bessel_k_imag(t: &Float, x: &Float, prec: Precision) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::Domain("K_it(x) needs x > 0".into()));
    }
    let bits = prec.bits();
    let tc = Complex::with_val(bits, (t, 0));
    let xc = Complex::with_val(bits, (x, 0));
    if x.to_f64() <= SERIES_CUTOFF && !t.is_zero() {
        let v = k_series(&tc, &xc, prec)?;
        return Ok(Float::with_val(bits, v.real()));
    }
    k_integral_real(t, x, prec)
}

/// K_{i tau}(x) for complex tau and Re x > 0.
pub fn bessel_k_imag_complex(tau: &Complex, x: &Complex, prec: Precision) -> Result<Complex> {
    if *x.real() <= 0 {
        return Err(Error::Domain("K_{i tau}(x) needs Re x > 0".into()));
    }
    if tau.imag().is_zero() && x.imag().is_zero() {
        let v = bessel_k_imag(tau.real(), x.real(), prec)?;
        return Ok(Complex::with_val(prec.bits(), (v, 0)));
    }
    if cabs(x).to_f64() <= SERIES_CUTOFF && !tau.is_zero() {
        return k_series(tau, x, prec);
    }
    k_integral_complex(tau, x, prec)
}

/// Bits lost to cancellation: log2 of (largest integrand value / expected |K|).
fn cancellation_bits(maxlog: f64, re_tau: f64, decay: f64) -> u32 {
    let nats = maxlog + re_tau.abs() * (PI / 2.0 + decay);
    (nats.max(0.0) * LOG2_E).ceil() as u32 + 32
}

/// max over u >= 0 of -a cosh u + b u (a > 0, b >= 0), and where it sits.
fn log_envelope_peak(a: f64, b: f64) -> (f64, f64) {
    let u = (b / a).asinh();
    (-a * u.cosh() + b * u, u)
}

/// Smallest u beyond the peak with -a cosh u + b u <= level.
fn log_envelope_cut(a: f64, b: f64, from: f64, level: f64) -> f64 {
    let g = |u: f64| -a * u.cosh() + b * u - level;
    let mut lo = from;
    let mut hi = from + 1.0;
    while g(hi) > 0.0 {
        hi = from + 2.0 * (hi - from);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Panel breakpoints on [0, u_max] limited by the oscillation and decay
/// rates of e^{-x cosh u} cos(tau u).
fn kernel_breaks(
    re_tau: f64,
    im_tau: f64,
    re_x: f64,
    im_x: f64,
    u_max: f64,
    bits: u32,
) -> Vec<Float> {
    let mut out = vec![Float::with_val(bits, 0)];
    let mut u = 0.0f64;
    while u < u_max {
        let mut w = 1.0f64;
        for _ in 0..2 {
            let at = (u + w).min(u_max);
            let omega = re_tau.abs() + im_x.abs() * at.sinh();
            let rho = re_x.abs() * at.sinh() + im_tau.abs();
            w = 1.0f64
                .min(PI / omega.max(1e-300))
                .min(6.0 / rho.max(1e-300));
        }
        u = (u + w).min(u_max);
        out.push(Float::with_val(bits, u));
    }
    out
}

fn k_integral_real(t: &Float, x: &Float, prec: Precision) -> Result<Float> {
    let tf = t.to_f64();
    let xf = x.to_f64();
    let decay = if xf > tf.abs() {
        let beta = (tf.abs() / xf).acos();
        beta.tan() - beta
    } else {
        0.0
    };
    let (maxlog, peak) = log_envelope_peak(xf, 0.0);
    let extra = cancellation_bits(maxlog, tf, decay);
    let work = prec.with_extra_bits(extra);
    let wb = work.bits();
    let u_max = log_envelope_cut(xf, 0.0, peak, maxlog - f64::from(wb) * LN_2 - 10.0);
    let breaks = kernel_breaks(tf, 0.0, xf, 0.0, u_max, wb);
    let t = Float::with_val(wb, t);
    let x = Float::with_val(wb, x);
    let abs_tol =
        Float::with_val(64, maxlog).exp() * Float::with_val(64, Float::i_exp(1, 24 - wb as i32));
    let mut f = |u: &Float| -> Result<Float> {
        let e = (-Float::with_val(wb, u.cosh_ref()) * &x).exp();
        Ok(e * Float::with_val(wb, &t * u).cos())
    };
    let q = integrate_panels(&mut f, &breaks, &abs_tol, 2_000_000, work)?;
    Ok(Float::with_val(prec.bits(), q.value))
}

fn k_integral_complex(tau: &Complex, x: &Complex, prec: Precision) -> Result<Complex> {
    let (re_tau, im_tau) = (tau.real().to_f64(), tau.imag().to_f64());
    let (re_x, im_x) = (x.real().to_f64(), x.imag().to_f64());
    let decay = {
        // the real-order estimate evaluated on |tau|, |x|
        let (m_tau, m_x) = (re_tau.hypot(im_tau), re_x.hypot(im_x));
        if m_x > m_tau {
            let beta = (m_tau / m_x).acos();
            beta.tan() - beta
        } else {
            0.0
        }
    };
    let (maxlog, peak) = log_envelope_peak(re_x, im_tau.abs());
    let extra = cancellation_bits(maxlog, re_tau, decay);
    let work = prec.with_extra_bits(extra);
    let wb = work.bits();
    let u_max = log_envelope_cut(
        re_x,
        im_tau.abs(),
        peak,
        maxlog - f64::from(wb) * LN_2 - 10.0,
    );
    let breaks = kernel_breaks(re_tau, im_tau, re_x, im_x, u_max, wb);
    let tau = Complex::with_val(wb, tau);
    let x = Complex::with_val(wb, x);
    let abs_tol =
        Float::with_val(64, maxlog).exp() * Float::with_val(64, Float::i_exp(1, 24 - wb as i32));
    let mut f = |u: &Float| -> Result<Complex> {
        let e = (-Complex::with_val(wb, &x * Float::with_val(wb, u.cosh_ref()))).exp();
        Ok(e * Complex::with_val(wb, &tau * u).cos())
    };
    let q = integrate_panels(&mut f, &breaks, &abs_tol, 2_000_000, work)?;
    Ok(Complex::with_val(prec.bits(), q.value))
}

/// K_{i tau}(x) = (pi/2) (I_{-i tau}(x) - I_{i tau}(x)) / (i sinh(pi tau)), for small |x|.
fn k_series(tau: &Complex, x: &Complex, prec: Precision) -> Result<Complex> {
    let mag_tau = cabs(tau).to_f64();
    let mag_x = cabs(x).to_f64();
    // I_{-i tau} - I_{i tau} = O(tau) for small tau, which costs log2(1/|tau|) more bits.
    let small = (-mag_tau.log2()).max(0.0);
    let extra = ((PI * mag_tau + 2.0 * mag_x) * LOG2_E + small).ceil() as u32 + 32;
    let work = prec.with_extra_bits(extra);
    let wb = work.bits();
    let i = Complex::with_val(wb, (0, 1));
    let nu = Complex::with_val(wb, &i * tau);
    let neg_nu = Complex::with_val(wb, -&nu);
    let x = Complex::with_val(wb, x);
    let ip = bessel_i_series(&nu, &x, work)?;
    let im = bessel_i_series(&neg_nu, &x, work)?;
    let pi = Float::with_val(wb, Constant::Pi);
    let sh = Complex::with_val(wb, tau * &pi).sinh();
    let num = Complex::with_val(wb, &im - &ip) * (pi / 2u32);
    let out = num / (sh * i);
    Ok(Complex::with_val(prec.bits(), out))
}

/// I_nu(x) = (x/2)^nu / Gamma(nu+1) sum_k (x^2/4)^k / (k! (nu+1)_k).
fn bessel_i_series(nu: &Complex, x: &Complex, prec: Precision) -> Result<Complex> {
    let wb = prec.bits();
    let q = Complex::with_val(wb, x.square_ref()) / 4u32;
    let tol = Float::with_val(64, Float::i_exp(1, -(wb as i32)));
    let mut term = Complex::with_val(wb, 1);
    let mut acc = term.clone();
    for k in 1u32..100_000 {
        term *= &q;
        term /= Complex::with_val(wb, nu + k) * k;
        acc += &term;
        let m = Float::with_val(64, term.abs_ref());
        if f64::from(k) > cabs(&q).to_f64() && m < tol {
            break;
        }
    }
    let half_x = Complex::with_val(wb, x / 2u32);
    let lead = (Complex::with_val(wb, half_x.ln_ref()) * nu).exp();
    let nu1 = Complex::with_val(wb, nu + 1u32);
    let g = gamma(&nu1, prec)?;
    Ok(acc * lead / g)
}

/// iH(t) = (2/pi) e^{pi t/2} K_{it}(lambda t) for real t > 0.
pub fn ih1_imag(t: &Float, lambda: &Lambda, prec: Precision) -> Result<Float> {
    if *t <= 0 {
        return Err(Error::Domain("iH(t) needs t > 0".into()));
    }
    let bits = prec.bits();
    let x = Float::with_val(bits, t * lambda.value());
    let k = bessel_k_imag(t, &x, prec)?;
    let pi = prec.pi();
    let e = (Float::with_val(bits, t * &pi) / 2u32).exp();
    Ok(k * e * 2u32 / pi)
}

/// iH(tau) for complex tau with Re tau > 0.
pub fn ih1_imag_complex(tau: &Complex, lambda: &Lambda, prec: Precision) -> Result<Complex> {
    let bits = prec.bits();
    let x = Complex::with_val(bits, tau * lambda.value());
    let k = bessel_k_imag_complex(tau, &x, prec)?;
    let pi = prec.pi();
    let e = (Complex::with_val(bits, tau * &pi) / 2u32).exp();
    Ok(k * e * 2u32 / pi)
}

fn float_key(x: &Float) -> (rug::Integer, i32) {
    x.to_integer_exp().unwrap_or_default()
}

/// Cache of iH values for one lambda and precision, keyed by the exact
/// bits of the node. Outer double-exponential integrals place nodes at the
/// same t for every n, N and nu, so repeated integrals reuse them.
#[derive(Debug)]
pub struct KernelTable {
    lambda: Lambda,
    prec: Precision,
    kernel_prec: Precision,
    real: RwLock<HashMap<(rug::Integer, i32), Float>>,
    rotated: RwLock<HashMap<[(rug::Integer, i32); 2], Complex>>,
}

impl KernelTable {
    pub fn new(lambda: &Lambda, prec: Precision) -> Self {
        Self {
            lambda: lambda.clone(),
            prec,
            kernel_prec: prec.with_extra_bits(16),
            real: RwLock::new(HashMap::new()),
            rotated: RwLock::new(HashMap::new()),
        }
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn len(&self) -> usize {
        self.real.read().expect("kernel table").len()
            + self.rotated.read().expect("kernel table").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ih1(&self, t: &Float) -> Result<Float> {
        let key = float_key(t);
        if let Some(v) = self.real.read().expect("kernel table").get(&key) {
            return Ok(v.clone());
        }
        let v = ih1_imag(t, &self.lambda, self.kernel_prec)?;
        self.real
            .write()
            .expect("kernel table")
            .insert(key, v.clone());
        Ok(v)
    }

    /// iH at r e^{i phi}.
    pub fn ih1_ray(&self, r: &Float, phi: &Float) -> Result<Complex> {
        if phi.is_zero() {
            let v = self.ih1(r)?;
            return Ok(Complex::with_val(self.kernel_prec.bits(), (v, 0)));
        }
        let key = [float_key(r), float_key(phi)];
        if let Some(v) = self.rotated.read().expect("kernel table").get(&key) {
            return Ok(v.clone());
        }
        let tau = polar(r, phi);
        let v = ih1_imag_complex(&tau, &self.lambda, self.kernel_prec)?;
        self.rotated
            .write()
            .expect("kernel table")
            .insert(key, v.clone());
        Ok(v)
    }

    /// a_n(lambda) = ((-1)^n / (2n)!) int_0^inf t^{2n} e^{-pi t} iH(t) dt.
    pub fn coeff_via_integral(&self, n: usize) -> Result<Float> {
        let prec = self.prec;
        let bits = prec.bits();
        let pi = prec.pi();
        let spec = QuadratureSpec::new(prec.digits());
        let q = integrate_semiinfinite(
            |t: &Float| {
                let w = Float::with_val(bits, t.pow(2 * n as u32))
                    * Float::with_val(bits, -(t * pi.clone())).exp();
                Ok(w * self.ih1(t)?)
            },
            &spec,
            prec,
        )?;
        let mut v = q.value / factorial(2 * n as u32, bits);
        if n % 2 == 1 {
            v = -v;
        }
        Ok(v)
    }

    /// ã_n(lambda) = (1/(2n)!) int_0^inf t^{2n} e^{-pi t} |iH(t)| dt.
    ///
    /// The integral is split at the sign changes of iH so every piece has a
    /// smooth integrand.
    pub fn tilde_a(&self, n: usize) -> Result<Float> {
        if self.lambda.regime() != Regime::Lt1 {
            return Err(Error::Domain("ã_n is defined for 0 < lambda < 1".into()));
        }
        let prec = self.prec;
        let bits = prec.bits();
        let pi = prec.pi();
        let weight = |t: &Float| -> Float {
            Float::with_val(bits, t.pow(2 * n as u32))
                * Float::with_val(bits, -(t * pi.clone())).exp()
        };
        // Upper end: t^{2n} e^{-pi t / 2} (the envelope of the integrand) below target.
        let target = f64::from(prec.digits() + 10) * std::f64::consts::LN_10;
        let peak = (4.0 * n as f64 / PI).max(1.0);
        let env = |t: f64| 2.0 * n as f64 * t.ln() - PI * t / 2.0;
        let env_peak = env(peak);
        let mut t_end = peak * 2.0 + 10.0;
        while env(t_end) > env_peak - target {
            t_end *= 1.25;
        }
        let zeros = self.sign_changes(t_end)?;
        let spec = QuadratureSpec::new(prec.digits());
        let mut acc = Float::new(bits);
        let mut lo = prec.real(0);
        for z in zeros
            .iter()
            .chain(std::iter::once(&Float::with_val(bits, t_end)))
        {
            let q = integrate_finite(
                |t: &Float| {
                    if t.is_zero() {
                        return Ok(Float::new(bits));
                    }
                    Ok(weight(t) * self.ih1(t)?.abs())
                },
                &lo,
                z,
                &spec,
                prec,
            )?;
            acc += q.value;
            lo = z.clone();
        }
        Ok(acc / factorial(2 * n as u32, bits))
    }

    /// Zeros of iH on (0, t_end), located by scanning and refined by bisection
    /// followed by secant steps.
    fn sign_changes(&self, t_end: f64) -> Result<Vec<Float>> {
        let prec = self.prec;
        let bits = prec.bits();
        let alpha = self.lambda.alpha().map(|a| a.to_f64()).unwrap_or(1.0);
        let spacing = PI / (alpha - alpha.tanh()).max(1e-3);
        let step = (spacing / 8.0).min(0.5);
        let mut out = Vec::new();
        let mut a = step;
        let mut fa = ih1_imag(&Float::with_val(bits, a), &self.lambda, prec)?;
        while a < t_end {
            let b = a + step;
            let fb = ih1_imag(&Float::with_val(bits, b), &self.lambda, prec)?;
            if fa.is_sign_negative() != fb.is_sign_negative() {
                out.push(self.refine_zero(a, b, &fa, &fb)?);
            }
            a = b;
            fa = fb;
        }
        Ok(out)
    }

    fn refine_zero(&self, a: f64, b: f64, fa: &Float, fb: &Float) -> Result<Float> {
        let prec = self.prec;
        let bits = prec.bits();
        let mut x0 = Float::with_val(bits, a);
        let mut x1 = Float::with_val(bits, b);
        let mut f0 = fa.clone();
        let mut f1 = fb.clone();
        let tol = Float::with_val(64, Float::i_exp(1, 8 - bits as i32));
        // Illinois variant of regula falsi: keeps the bracket, converges superlinearly.
        let mut side = 0i32;
        for _ in 0..200 {
            let dx = Float::with_val(bits, &x1 - &x0);
            let df = Float::with_val(bits, &f1 - &f0);
            let x2 = Float::with_val(bits, &x1 - Float::with_val(bits, &f1 * &dx) / &df);
            let f2 = ih1_imag(&x2, &self.lambda, prec)?;
            if Float::with_val(64, dx.abs_ref()) < Float::with_val(64, &tol * &x2) || f2.is_zero() {
                return Ok(x2);
            }
            if f2.is_sign_negative() == f1.is_sign_negative() {
                x1 = x2;
                f1 = f2;
                if side == 1 {
                    f0 /= 2u32;
                }
                side = 1;
            } else {
                x0 = std::mem::replace(&mut x1, x2);
                f0 = std::mem::replace(&mut f1, f2);
                side = -1;
            }
        }
        Ok(x1)
    }

    /// R_N(nu, lambda) = ((-1)^N / (pi nu^{2N+1})) int t^{2N} e^{-pi t} iH(t) / (1 + (t/nu)^2) dt
    /// along the ray arg t = phi.
    pub fn remainder_via_integral(
        &self,
        n_trunc: usize,
        nu: &Complex,
        phi: &Float,
    ) -> Result<Complex> {
        let prec = self.prec;
        let bits = prec.bits();
        let theta = carg(nu).to_f64();
        let phif = phi.to_f64();
        if phif.abs() >= PI / 2.0 {
            return Err(Error::Sector(format!(
                "rotation |phi| = {:.4} must be below pi/2",
                phif.abs()
            )));
        }
        if (theta - phif).abs() >= PI / 2.0 {
            return Err(Error::Sector(format!(
                "|arg nu - phi| = {:.4} must be below pi/2",
                (theta - phif).abs()
            )));
        }
        if !phi.is_zero() && !self.lambda.is_at_least_one() {
            return Err(Error::Sector("rotated contours need lambda >= 1".into()));
        }
        let pi = prec.pi();
        let dir = expi(&Float::with_val(bits, phi));
        let inv_nu = Complex::with_val(bits, nu.recip_ref());
        let mut min_den = f64::INFINITY;
        let spec = QuadratureSpec::new(prec.digits());
        let p2n = 2 * n_trunc as u32;
        let q: crate::numerics::Quadrature<Complex> = integrate_semiinfinite(
            |r: &Float| {
                let t = Complex::with_val(bits, &dir * r);
                let ratio = Complex::with_val(bits, &t * &inv_nu);
                let den = Complex::with_val(bits, ratio.square_ref()) + 1u32;
                let dm = cabs(&den).to_f64();
                if dm < min_den {
                    min_den = dm;
                }
                let w = Complex::with_val(bits, (&t).pow(p2n))
                    * (-Complex::with_val(bits, &t * &pi)).exp();
                Ok(w * self.ih1_ray(r, phi)? / den)
            },
            &spec,
            prec,
        )?;
        if min_den < 1e-3 {
            return Err(Error::PoleProximity { distance: min_den });
        }
        let nu_pow = Complex::with_val(bits, nu.pow(p2n + 1));
        let mut v = q.value * dir / (nu_pow * pi);
        if n_trunc % 2 == 1 {
            v = -v;
        }
        Ok(v)
    }
}

/// a_n(lambda) by quadrature of the integral form, with a private kernel cache.
pub fn coeff_via_integral(n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
    KernelTable::new(lambda, prec).coeff_via_integral(n)
}

/// ã_n(lambda) for 0 < lambda < 1, with a private kernel cache.
pub fn tilde_a(n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
    KernelTable::new(lambda, prec).tilde_a(n)
}

/// R_N(nu, lambda) along arg t = phi, with a private kernel cache.
pub fn remainder_via_integral(
    n_trunc: usize,
    nu: &Complex,
    lambda: &Lambda,
    phi: &Float,
    prec: Precision,
) -> Result<Complex> {
    KernelTable::new(lambda, prec).remainder_via_integral(n_trunc, nu, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{agreement_digits, agreement_digits_complex};

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn parse(s: &str, prec: Precision) -> Float {
        Float::with_val(prec.bits(), Float::parse(s).unwrap())
    }

    #[test]
    fn lambda_regimes() {
        let prec = p();
        let l = Lambda::from_value(&prec.real(2), prec).unwrap();
        assert_eq!(l.regime(), Regime::Gt1);
        let beta = l.beta().unwrap();
        assert!(agreement_digits(beta, &(prec.pi() / 3u32), 60.0) > 38.0);
        assert_eq!(
            Lambda::from_value(&prec.real(1), prec).unwrap().regime(),
            Regime::Eq1
        );
        let h = Lambda::from_value(&prec.real(0.5), prec).unwrap();
        assert_eq!(h.regime(), Regime::Lt1);
        assert!(h.singulant().real().is_sign_positive());
        assert!(Lambda::from_value(&prec.real(-1), prec).is_err());
        let phase = PhaseFunction::new(&l);
        assert!(phase.eval(&prec.real(0)).is_zero());
        assert!(phase.eval(&prec.real(1)) > phase.eval(&prec.real(0.5)));
    }

    #[test]
    fn k0_at_one() {
        let prec = p();
        let v = bessel_k_imag(&prec.real(0), &prec.real(1), prec).unwrap();
        let expect = parse("0.42102443824070833333562737921260903613621974822666", prec);
        assert!(agreement_digits(&v, &expect, 60.0) >= 38.0);
    }

    #[test]
    fn k_imag_order_matches_oracle_on_both_routes() {
        let prec = p();
        let cases = [
            (
                5.0,
                "3.7",
                "0.00050955107558209038559267499986749564516931971393972",
            ),
            (
                5.0,
                "10",
                "0.0000052781217651491219933022050407280366666263693843362",
            ),
            (
                30.0,
                "20",
                "1.5285858144529010819603253980658532954485452442136e-21",
            ),
        ];
        for (t, x, k) in cases {
            let x = parse(x, prec);
            let v = bessel_k_imag(&prec.real(t), &x, prec).unwrap();
            assert!(agreement_digits(&v, &parse(k, prec), 60.0) >= 36.0, "t={t}");
            let w = k_integral_real(&prec.real(t), &x, prec).unwrap();
            assert!(
                agreement_digits(&w, &parse(k, prec), 60.0) >= 36.0,
                "t={t} (integral)"
            );
            let neg = bessel_k_imag(&prec.real(-t), &x, prec).unwrap();
            assert!(agreement_digits(&neg, &v, 60.0) >= 36.0, "evenness t={t}");
        }
    }

    #[test]
    fn complex_order_kernel() {
        let prec = p();
        let tau = prec.complex((3.0, 1.5));
        let x = Complex::with_val(prec.bits(), &tau * 2u32);
        let v = bessel_k_imag_complex(&tau, &x, prec).unwrap();
        let expect = Complex::with_val(
            prec.bits(),
            (
                parse(
                    "-0.00052171889436844124646907326418765689461798480215419",
                    prec,
                ),
                parse(
                    "0.00025994834694295978923456555676902020103477276240239",
                    prec,
                ),
            ),
        );
        assert!(agreement_digits_complex(&v, &expect, 60.0) >= 36.0);
        let s = k_series(&tau, &x, prec).unwrap();
        assert!(agreement_digits_complex(&s, &expect, 60.0) >= 36.0);
    }

    #[test]
    fn small_order_approaches_k0() {
        let prec = p();
        let x = prec.real(2.5);
        let k0 = bessel_k_imag(&prec.real(0), &x, prec).unwrap();
        let kt = bessel_k_imag(&prec.real(1e-6), &x, prec).unwrap();
        assert!(kt > 0);
        assert!(agreement_digits(&kt, &k0, 60.0) > 10.0);
    }

    #[test]
    fn hankel_kernel_values() {
        let prec = p();
        let two = Lambda::from_value(&prec.real(2), prec).unwrap();
        let v = ih1_imag(&prec.real(1), &two, prec).unwrap();
        assert!(
            agreement_digits(
                &v,
                &parse("0.28292539112286673242646790352047893100722980746215", prec),
                60.0
            ) >= 36.0
        );
        let half = Lambda::from_value(&prec.real(0.5), prec).unwrap();
        let v = ih1_imag(&prec.real(12), &half, prec).unwrap();
        assert!(
            agreement_digits(
                &v,
                &parse(
                    "-0.049907930787169431565870363757842474146107819664077",
                    prec
                ),
                60.0
            ) >= 34.0
        );
    }

    #[test]
    fn hankel_kernel_sign_and_log_growth() {
        let prec = p();
        let two = Lambda::from_value(&prec.real(2), prec).unwrap();
        for t in [0.1, 0.7, 3.0, 9.0, 25.0] {
            assert!(ih1_imag(&prec.real(t), &two, prec).unwrap() > 0, "t={t}");
        }
        let half = Lambda::from_value(&prec.real(0.5), prec).unwrap();
        let signs: Vec<bool> = (1..40)
            .map(|k| {
                ih1_imag(&prec.real(k as f64), &half, prec)
                    .unwrap()
                    .is_sign_negative()
            })
            .collect();
        assert!(signs.windows(2).any(|w| w[0] != w[1]));
        // iH(t) + (2/pi) ln t stays bounded as t -> 0+
        let one = Lambda::one(prec);
        let g = |t: f64| {
            let v = ih1_imag(&prec.real(t), &one, prec).unwrap().to_f64();
            v + 2.0 / PI * t.ln()
        };
        assert!((g(1e-6) - g(1e-9)).abs() < 1e-4);
    }
}
