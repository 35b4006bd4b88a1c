//! Evaluation of A_nu(lambda nu): the defining integral, the truncated
//! large-nu series with error bounds, and the terminant re-expansion of the
//! remainder for lambda >= 1.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::sync::OnceLock;

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::kernels::{KernelTable, Lambda, Regime};
use crate::numerics::{
    factorial, gamma_real, integrate_semiinfinite, polar, pow_polar, sin_third_odd, Precision,
    Quadrature, QuadratureSpec,
};
use crate::powser::{CoeffEntry, CoeffKind, CoeffTable, Provenance};
use crate::terminant::terminant_polar;

fn table() -> &'static CoeffTable {
    static TABLE: OnceLock<CoeffTable> = OnceLock::new();
    TABLE.get_or_init(CoeffTable::new)
}

/// nu given by modulus and an unreduced argument, so that fractional powers
/// can be taken on any sheet.
#[derive(Clone, Debug)]
pub struct Nu {
    modulus: Float,
    arg: Float,
}

impl Nu {
    pub fn new(modulus: &Float, arg: &Float) -> Result<Self> {
        if *modulus <= 0 {
            return Err(Error::Domain("|nu| must be positive".into()));
        }
        Ok(Self {
            modulus: modulus.clone(),
            arg: arg.clone(),
        })
    }

    /// Principal argument of `z`.
    pub fn from_complex(z: &Complex) -> Result<Self> {
        let bits = z.prec().0;
        Self::new(
            &Float::with_val(bits, z.abs_ref()),
            &Float::with_val(bits, z.arg_ref()),
        )
    }

    pub fn modulus(&self) -> &Float {
        &self.modulus
    }

    pub fn arg(&self) -> &Float {
        &self.arg
    }

    pub fn value(&self) -> Complex {
        polar(&self.modulus, &self.arg)
    }

    /// nu^e on the sheet fixed by the stored argument.
    pub fn pow(&self, e: &Complex) -> Complex {
        pow_polar(&self.modulus, &self.arg, e)
    }

    fn conj(&self) -> Self {
        Self {
            modulus: self.modulus.clone(),
            arg: -self.arg.clone(),
        }
    }
}

/// Which bound accompanies a truncated expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundId {
    /// First omitted term times the csc(2 theta) factor (or 1).
    Eq14,
    /// sqrt(e (N + 3/2) / 2) times the first omitted term, valid up to the Stokes line.
    Eq16,
    /// ã_N in place of |a_N|, for lambda < 1.
    Tilde,
    /// Real positive nu: the remainder is a fraction in (0, 1) of the first omitted term.
    Theta,
    None,
}

impl BoundId {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundId::Eq14 => "EQ14",
            BoundId::Eq16 => "EQ16",
            BoundId::Tilde => "TILDE",
            BoundId::Theta => "THETA",
            BoundId::None => "NONE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedExpansion {
    pub value: Complex,
    pub n: usize,
    pub m: Option<usize>,
    pub bound: Option<Float>,
    pub bound_id: BoundId,
    pub regime: Regime,
    /// Order-of-magnitude size of the re-expansion remainder (no constant).
    pub envelope: Option<Float>,
    pub notes: Vec<String>,
}

/// A_nu(lambda nu) = (1/pi) int_0^inf e^{-nu (lambda sinh t + t)} dt for |arg nu| < pi/2.
pub fn anger_weber_direct(nu: &Complex, lambda: &Lambda, prec: Precision) -> Result<Complex> {
    if *nu.real() <= 0 {
        return Err(Error::Sector(
            "the defining integral needs |arg nu| < pi/2".into(),
        ));
    }
    let work = prec.with_extra_bits(16);
    let bits = work.bits();
    let lam = Float::with_val(bits, lambda.value());
    let nu = Complex::with_val(bits, nu);
    let spec = QuadratureSpec::new(work.digits());
    let q: Quadrature<Complex> = integrate_semiinfinite(
        |t: &Float| {
            let f = Float::with_val(bits, t.sinh_ref()) * &lam + t;
            Ok((-Complex::with_val(bits, &nu * &f)).exp())
        },
        &spec,
        work,
    )?;
    Ok(Complex::with_val(prec.bits(), q.value / work.pi()))
}

/// Continuation of the defining integral to |arg nu| < pi. For
/// |arg nu| > pi/4 the path runs from 0 down to -i c sgn(theta) and then
/// horizontally to infinity, with c = |theta| - pi/4, which keeps
/// Re(nu f(t)) growing along the tail.
pub fn anger_weber_continued(nu: &Nu, lambda: &Lambda, prec: Precision) -> Result<Complex> {
    let theta = nu.arg().to_f64();
    if theta.abs() >= PI {
        return Err(Error::Sector(
            "the continued integral needs |arg nu| < pi".into(),
        ));
    }
    if theta.abs() <= FRAC_PI_4 {
        return anger_weber_direct(&nu.value(), lambda, prec);
    }
    let work = prec.with_extra_bits(16);
    let bits = work.bits();
    let lam = Float::with_val(bits, lambda.value());
    let z = Complex::with_val(bits, nu.value());
    let sgn = theta.signum();
    let c = Float::with_val(bits, nu.arg().abs_ref()) - work.pi() / 4u32;
    let down = Complex::with_val(bits, (0, -sgn));
    let f = |t: &Complex| -> Complex {
        let sh = Complex::with_val(bits, t.sinh_ref()) * &lam + t;
        (-Complex::with_val(bits, &z * &sh)).exp()
    };
    let spec = QuadratureSpec::new(work.digits());
    let vertical: Quadrature<Complex> = crate::numerics::integrate_finite(
        |y: &Float| Ok(f(&Complex::with_val(bits, &down * y)) * &down),
        &Float::new(bits),
        &c,
        &spec,
        work,
    )?;
    let corner = Complex::with_val(bits, &down * &c);
    let tail: Quadrature<Complex> = integrate_semiinfinite(
        |s: &Float| Ok(f(&Complex::with_val(bits, &corner + s))),
        &spec,
        work,
    )?;
    Ok(Complex::with_val(
        prec.bits(),
        (vertical.value + tail.value) / work.pi(),
    ))
}

/// a_n(lambda) from the shared coefficient cache.
pub fn coefficient(n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
    table().a(n, lambda, prec)
}

fn tilde_coefficient(n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
    let key = Complex::with_val(prec.bits(), (lambda.value(), 0));
    if let Some(e) = table().lookup(CoeffKind::TildeA, n, &key, prec) {
        return Ok(e.value.real().clone());
    }
    let v = crate::kernels::tilde_a(n, lambda, prec)?;
    table().insert(
        CoeffKind::TildeA,
        n,
        &key,
        prec,
        CoeffEntry {
            value: Complex::with_val(prec.bits(), (&v, 0)),
            provenance: Provenance::Integral,
        },
    );
    Ok(v)
}

/// (1/pi) sum_{n<N} (2n)! a_n / nu^{2n+1}.
pub fn poincare_sum(nu: &Nu, lambda: &Lambda, n_trunc: usize, prec: Precision) -> Result<Complex> {
    let work = prec.with_extra_bits(16);
    let bits = work.bits();
    let z = Complex::with_val(bits, nu.value());
    let inv = Complex::with_val(bits, z.recip_ref());
    let inv2 = Complex::with_val(bits, inv.square_ref());
    let mut pw = inv;
    let mut sum = Complex::new(bits);
    for n in 0..n_trunc {
        let a = coefficient(n, lambda, prec)?;
        let t = Complex::with_val(bits, &pw * factorial(2 * n as u32, bits))
            * Float::with_val(bits, &a);
        sum += t;
        pw *= &inv2;
    }
    Ok(Complex::with_val(prec.bits(), sum / work.pi()))
}

/// (1/pi) (2N)! |x_N| / |nu|^{2N+1} for a given coefficient magnitude.
fn first_omitted(x: &Float, modulus: &Float, n_trunc: usize, prec: Precision) -> Float {
    let bits = prec.bits();
    let num = factorial(2 * n_trunc as u32, bits) * Float::with_val(bits, x.abs_ref());
    num / Float::with_val(bits, modulus.pow(2 * n_trunc as u32 + 1)) / prec.pi()
}

/// theta reduced to [-pi, pi).
fn reduced_arg(theta: &Float) -> f64 {
    let t = theta.to_f64();
    t - 2.0 * PI * ((t + PI) / (2.0 * PI)).floor()
}

/// The truncated series with the sharpest certified bound available at arg nu.
pub fn eval_poincare(
    nu: &Nu,
    lambda: &Lambda,
    n_trunc: usize,
    prec: Precision,
) -> Result<TruncatedExpansion> {
    let value = poincare_sum(nu, lambda, n_trunc, prec)?;
    let theta = reduced_arg(nu.arg());
    let at = theta.abs();
    let regime = lambda.regime();
    let mut bound = None;
    let mut bound_id = BoundId::None;
    if at <= FRAC_PI_2 {
        let csc = if at > FRAC_PI_4 {
            1.0 / (2.0 * at).sin()
        } else {
            1.0
        };
        if lambda.is_at_least_one() {
            let first = first_omitted(
                &coefficient(n_trunc, lambda, prec)?,
                nu.modulus(),
                n_trunc,
                prec,
            );
            if theta == 0.0 {
                bound = Some(first);
                bound_id = BoundId::Theta;
            } else {
                let mut cands: Vec<(Float, BoundId)> = Vec::new();
                if at < FRAC_PI_2 {
                    cands.push((Float::with_val(prec.bits(), &first * csc), BoundId::Eq14));
                }
                let n = n_trunc as f64;
                let edge = FRAC_PI_4 + (2.0 / (4.0 * n + 5.0)).sqrt().atan();
                if at > edge || (n_trunc >= 1 && at > FRAC_PI_4) {
                    let k = (std::f64::consts::E / 2.0 * (n + 1.5)).sqrt();
                    cands.push((Float::with_val(prec.bits(), &first * k), BoundId::Eq16));
                }
                if let Some((b, id)) = cands
                    .into_iter()
                    .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite bounds"))
                {
                    bound = Some(b);
                    bound_id = id;
                }
            }
        } else if at < FRAC_PI_2 {
            let t = tilde_coefficient(n_trunc, lambda, prec)?;
            bound = Some(Float::with_val(
                prec.bits(),
                first_omitted(&t, nu.modulus(), n_trunc, prec) * csc,
            ));
            bound_id = BoundId::Tilde;
        }
    }
    Ok(TruncatedExpansion {
        value,
        n: n_trunc,
        m: None,
        bound,
        bound_id,
        regime,
        envelope: None,
        notes: Vec::new(),
    })
}

/// Multiplier of |nu| in the optimal truncation index: tan beta - beta + pi,
/// pi, or |alpha - tanh alpha + pi i|.
pub fn truncation_scale(lambda: &Lambda) -> Float {
    lambda.singulant_modulus()
}

/// N = round(|nu| s / 2) with s from [`truncation_scale`]. For lambda < 1 the
/// rule is a heuristic.
pub fn optimal_n(modulus: &Float, lambda: &Lambda) -> Result<usize> {
    if *modulus < 2 {
        return Err(Error::Domain("optimal truncation needs |nu| >= 2".into()));
    }
    let v = Float::with_val(modulus.prec(), modulus * truncation_scale(lambda)) / 2u32;
    Ok(v.to_f64().round() as usize)
}

/// Working precision for comparisons against an oracle at |nu| = `modulus`:
/// enough guard bits for a remainder of size e^{-|nu| s} |nu|^{-M-1} to
/// survive its subtraction from A_nu.
pub fn oracle_precision(
    modulus: &Float,
    lambda: &Lambda,
    m_terms: usize,
    prec: Precision,
) -> Precision {
    let r = modulus.to_f64();
    let s = truncation_scale(lambda).to_f64();
    let nats = r * s + (m_terms as f64 + 1.0) * r.ln().max(0.0);
    prec.with_extra_bits((nats / LN_2).ceil() as u32 + 16)
}

/// One re-expansion term, split by side.
#[derive(Clone, Debug)]
pub struct ImprovedTerm {
    pub m: usize,
    /// Terminant order p.
    pub order: Float,
    pub upper_terminant: Complex,
    pub lower_terminant: Complex,
    /// Contributions to R_N from the w = +i|nu|s and w = -i|nu|s sides.
    pub upper: Complex,
    pub lower: Complex,
}

fn lambda_at_least_one(lambda: &Lambda) -> Result<()> {
    if lambda.regime() == Regime::Lt1 {
        Err(Error::RegimeUnsupported("LT1"))
    } else {
        Ok(())
    }
}

fn check_improved_sector(nu: &Nu) -> Result<()> {
    if nu.arg().to_f64().abs() > 1.5 * PI + 1e-12 {
        return Err(Error::Sector(
            "exponentially improved expansions need |arg nu| <= 3 pi / 2".into(),
        ));
    }
    Ok(())
}

/// Terminant order for the m-th term: 2N - m + 1/2, or 2N - (2m - 2)/3 when lambda = 1.
pub fn terminant_order(lambda: &Lambda, n_trunc: usize, m: usize, bits: u32) -> Float {
    match lambda.regime() {
        Regime::Eq1 => Float::with_val(bits, 6 * n_trunc as i64 - 2 * m as i64 + 2) / 3u32,
        _ => Float::with_val(bits, 2 * n_trunc as i64 - m as i64) + 0.5f64,
    }
}

/// Weights multiplying the terminants: for lambda > 1 the Hankel coefficients
/// U_m(i cot beta) with the nu^{-m} factor, for lambda = 1 the cusp terms.
struct Weights {
    bits: u32,
    /// i e^{i nu s - pi i/4} / (nu pi tan beta / 2)^{1/2} or -i e^{pi i nu} 2/(3 pi).
    upper_pref: Complex,
    lower_pref: Complex,
}

fn weights(nu: &Nu, lambda: &Lambda, prec: Precision) -> Result<Weights> {
    let bits = prec.bits();
    let pi = prec.pi();
    let z = nu.value();
    let i = Complex::with_val(bits, (0, 1));
    match lambda.regime() {
        Regime::Gt1 => {
            let beta = lambda.beta().expect("beta");
            let s = truncation_scale(lambda);
            let tan = Float::with_val(bits, beta.tan_ref());
            let half = Complex::with_val(bits, (0.5, 0));
            let root = nu.pow(&half) * (Float::with_val(bits, &pi * &tan) / 2u32).sqrt();
            let phase = Complex::with_val(bits, &z * &s) * &i;
            let quarter = Complex::with_val(bits, (0, Float::with_val(bits, &pi / 4u32)));
            let up = (Complex::with_val(bits, &phase - &quarter)).exp() * &i / &root;
            let dn = -(Complex::with_val(bits, &quarter - &phase)).exp() * &i / &root;
            Ok(Weights {
                bits,
                upper_pref: up,
                lower_pref: dn,
            })
        }
        Regime::Eq1 => {
            let two_thirds_pi = Float::with_val(bits, 2u32) / (Float::with_val(bits, &pi * 3u32));
            let phase = Complex::with_val(bits, &z * &pi) * &i;
            let up = -(Complex::with_val(bits, phase.exp_ref())) * &i * &two_thirds_pi;
            let dn = -(Complex::with_val(bits, (-phase).exp_ref())) * &i * &two_thirds_pi;
            Ok(Weights {
                bits,
                upper_pref: up,
                lower_pref: dn,
            })
        }
        Regime::Lt1 => Err(Error::RegimeUnsupported("LT1")),
    }
}

/// Coefficients of the m-th emergent term without the exponential prefactor:
/// (upper, lower).
fn emergent_coeffs(
    m: usize,
    nu: &Nu,
    lambda: &Lambda,
    prec: Precision,
) -> Result<(Complex, Complex)> {
    let bits = prec.bits();
    match lambda.regime() {
        Regime::Gt1 => {
            let beta = lambda.beta().expect("beta");
            let cot = Float::with_val(bits, beta.tan_ref()).recip();
            let x = Complex::with_val(bits, (0, cot));
            let u = table().u(m, &x, prec)?;
            let nm = nu.pow(&Complex::with_val(bits, (-(m as i64), 0)));
            let lower = Complex::with_val(bits, &u * &nm);
            let upper = if m % 2 == 1 {
                -lower.clone()
            } else {
                lower.clone()
            };
            Ok((upper, lower))
        }
        Regime::Eq1 => {
            let d = table().d(m, prec)?;
            let s = sin_third_odd(m, bits);
            let g = gamma_real(&(Float::with_val(bits, 2 * m as u32 + 1) / 3u32), prec)?;
            let e = Complex::with_val(bits, (-(Float::with_val(bits, 2 * m as u32 + 1) / 3u32), 0));
            let base = nu.pow(&e) * (d * s * g);
            let rot = crate::numerics::expi(
                &(prec.pi() * Float::with_val(bits, 2 * (2 * m as u32 + 1)) / 3u32),
            );
            Ok((Complex::with_val(bits, &base * &rot), base))
        }
        Regime::Lt1 => Err(Error::RegimeUnsupported("LT1")),
    }
}

/// The terms of the terminant re-expansion of R_N(nu, lambda) for m < M.
pub fn improved_terms(
    nu: &Nu,
    lambda: &Lambda,
    n_trunc: usize,
    m_terms: usize,
    prec: Precision,
) -> Result<Vec<ImprovedTerm>> {
    lambda_at_least_one(lambda)?;
    check_improved_sector(nu)?;
    let bits = prec.bits();
    let w = weights(nu, lambda, prec)?;
    let r = Float::with_val(bits, nu.modulus() * truncation_scale(lambda));
    let half_pi = prec.pi() / 2u32;
    let up_arg = Float::with_val(bits, nu.arg() + &half_pi);
    let dn_arg = Float::with_val(bits, nu.arg() - &half_pi);
    let mut out = Vec::with_capacity(m_terms);
    for m in 0..m_terms {
        let p = terminant_order(lambda, n_trunc, m, bits);
        if p <= 0 {
            return Err(Error::OutOfRange {
                index: m,
                constraint: "terminant order must stay positive".into(),
            });
        }
        let (cu, cl) = emergent_coeffs(m, nu, lambda, prec)?;
        let tu = terminant_polar(&p, &r, &up_arg, prec)?.value;
        let tl = terminant_polar(&p, &r, &dn_arg, prec)?.value;
        let upper = Complex::with_val(w.bits, &w.upper_pref * &cu) * &tu;
        let lower = Complex::with_val(w.bits, &w.lower_pref * &cl) * &tl;
        out.push(ImprovedTerm {
            m,
            order: p,
            upper_terminant: tu,
            lower_terminant: tl,
            upper,
            lower,
        });
    }
    Ok(out)
}

/// Size of the re-expansion remainder without its O-constant.
pub fn improved_envelope(
    nu: &Nu,
    lambda: &Lambda,
    m_terms: usize,
    prec: Precision,
) -> Result<Float> {
    lambda_at_least_one(lambda)?;
    let bits = prec.bits();
    let s = truncation_scale(lambda);
    let theta = nu.arg().to_f64();
    let modulus = nu.modulus();
    let expo = if theta.abs() <= FRAC_PI_2 {
        -Float::with_val(bits, modulus * &s)
    } else {
        let im = Float::with_val(bits, modulus * Float::with_val(bits, nu.arg().sin_ref()));
        let signed = if theta > 0.0 { im } else { -im };
        -(signed * &s)
    };
    let e = expo.exp();
    match lambda.regime() {
        Regime::Gt1 => {
            let beta = lambda.beta().expect("beta");
            let tan = Float::with_val(bits, beta.tan_ref());
            let x = Complex::with_val(bits, (0, Float::with_val(bits, tan.recip_ref())));
            let u = table().u(m_terms, &x, prec)?;
            let root = (Float::with_val(bits, modulus * &tan) * prec.pi() / 2u32).sqrt();
            Ok(e / root * Float::with_val(bits, u.abs_ref())
                / Float::with_val(bits, modulus.pow(m_terms as u32)))
        }
        _ => {
            let k = if m_terms % 3 == 1 {
                m_terms + 1
            } else {
                m_terms
            };
            let d = table().d(k, prec)?.abs();
            let third = Float::with_val(bits, 2 * k as u32 + 1) / 3u32;
            let g = gamma_real(&third, prec)?;
            Ok(e * d * g / Float::with_val(bits, modulus.pow(&third)))
        }
    }
}

/// The re-expanded evaluation for lambda >= 1 with N from [`optimal_n`]:
/// the truncated series plus M terminant-weighted terms on each side.
pub fn eval_improved(
    nu: &Nu,
    lambda: &Lambda,
    m_terms: usize,
    prec: Precision,
) -> Result<TruncatedExpansion> {
    lambda_at_least_one(lambda)?;
    check_improved_sector(nu)?;
    let n_trunc = optimal_n(nu.modulus(), lambda)?;
    eval_improved_with_n(nu, lambda, n_trunc, m_terms, prec)
}

/// As [`eval_improved`] with an explicit truncation index.
pub fn eval_improved_with_n(
    nu: &Nu,
    lambda: &Lambda,
    n_trunc: usize,
    m_terms: usize,
    prec: Precision,
) -> Result<TruncatedExpansion> {
    lambda_at_least_one(lambda)?;
    check_improved_sector(nu)?;
    let limit = match lambda.regime() {
        Regime::Eq1 => 3 * n_trunc,
        _ => n_trunc,
    };
    if m_terms > 0 && m_terms >= limit {
        return Err(Error::OutOfRange {
            index: m_terms,
            constraint: format!("M < {limit}"),
        });
    }
    let mut value = poincare_sum(nu, lambda, n_trunc, prec)?;
    for t in improved_terms(nu, lambda, n_trunc, m_terms, prec)? {
        value += &t.upper;
        value += &t.lower;
    }
    Ok(TruncatedExpansion {
        value,
        n: n_trunc,
        m: Some(m_terms),
        bound: None,
        bound_id: BoundId::None,
        regime: lambda.regime(),
        envelope: Some(improved_envelope(nu, lambda, m_terms, prec)?),
        notes: Vec::new(),
    })
}

/// R_N(nu, lambda) from an oracle for |arg nu| < pi. Without a kernel table
/// this is the continued defining integral minus the truncated series;
/// with one it is the remainder integral along the ray arg t = arg nu / 2.
pub fn measured_remainder(
    nu: &Nu,
    lambda: &Lambda,
    n_trunc: usize,
    kernels: Option<&KernelTable>,
    prec: Precision,
) -> Result<Complex> {
    if nu.arg().to_f64().abs() >= PI {
        return Err(Error::Sector(
            "no remainder oracle for |arg nu| >= pi".into(),
        ));
    }
    match kernels {
        Some(k) => {
            let phi = Float::with_val(prec.bits(), nu.arg() / 2u32);
            k.remainder_via_integral(n_trunc, &nu.value(), &phi)
        }
        None => {
            let a = anger_weber_continued(nu, lambda, prec)?;
            Ok(a - poincare_sum(nu, lambda, n_trunc, prec)?)
        }
    }
}

/// |R_N - (terminant terms)|, i.e. the size of R_{N,M}, against an oracle.
pub fn improved_residual(
    nu: &Nu,
    lambda: &Lambda,
    m_terms: usize,
    prec: Precision,
) -> Result<Float> {
    lambda_at_least_one(lambda)?;
    let n_trunc = optimal_n(nu.modulus(), lambda)?;
    let work = oracle_precision(nu.modulus(), lambda, m_terms, prec);
    let mut r = measured_remainder(nu, lambda, n_trunc, None, work)?;
    for t in improved_terms(nu, lambda, n_trunc, m_terms, work)? {
        r -= &t.upper;
        r -= &t.lower;
    }
    Ok(Float::with_val(prec.bits(), r.abs_ref()))
}

/// Which Stokes line has been crossed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// The first M terms of the exponentially small series that switches on
/// across arg nu = pi/2 (upper) or -pi/2 (lower), prefactor included.
pub fn emergent_series(
    nu: &Nu,
    lambda: &Lambda,
    m_terms: usize,
    side: Side,
    prec: Precision,
) -> Result<Vec<Complex>> {
    lambda_at_least_one(lambda)?;
    let w = weights(nu, lambda, prec)?;
    let bits = w.bits;
    let mut out = Vec::with_capacity(m_terms);
    for m in 0..m_terms {
        let (cu, cl) = emergent_coeffs(m, nu, lambda, prec)?;
        let t = match side {
            Side::Upper => Complex::with_val(bits, &w.upper_pref * &cu),
            Side::Lower => {
                // Across the lower line the terminant tends to -e^{2 pi i p},
                // which folds into the weight.
                let p = terminant_order(lambda, 0, m, bits);
                let rot = crate::numerics::expi(&(Float::with_val(bits, &p * prec.pi()) * 2u32));
                -(Complex::with_val(bits, &w.lower_pref * &cl) * rot)
            }
        };
        out.push(t);
    }
    Ok(out)
}

/// The compound expansion beyond a Stokes line: the truncated series plus
/// the first M terms of the emergent series. Needs pi/2 < |arg nu| < 3 pi/2.
pub fn compound_expansion(
    nu: &Nu,
    lambda: &Lambda,
    n_trunc: usize,
    m_terms: usize,
    prec: Precision,
) -> Result<Complex> {
    lambda_at_least_one(lambda)?;
    let theta = nu.arg().to_f64();
    if !(theta.abs() > FRAC_PI_2 && theta.abs() < 1.5 * PI) {
        return Err(Error::Sector(
            "compound expansion needs pi/2 < |arg nu| < 3 pi/2".into(),
        ));
    }
    let side = if theta > 0.0 {
        Side::Upper
    } else {
        Side::Lower
    };
    let mut v = poincare_sum(nu, lambda, n_trunc, prec)?;
    for t in emergent_series(nu, lambda, m_terms, side, prec)? {
        v += t;
    }
    Ok(v)
}

/// Conjugate-symmetric evaluation helper used by tests and the scanner.
pub fn mirrored(nu: &Nu) -> Nu {
    nu.conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::agreement_digits_complex;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn nu_real(x: f64, prec: Precision) -> Nu {
        Nu::new(&prec.real(x), &prec.real(0)).unwrap()
    }

    #[test]
    fn direct_lies_below_leading_term() {
        let prec = p();
        let lam = Lambda::one(prec);
        let v = anger_weber_direct(&prec.complex(10), &lam, prec).unwrap();
        assert!(*v.real() > 0 && *v.real() < 1.0 / (PI * 20.0));
        assert!(v.imag().is_zero() || Float::with_val(64, v.imag().abs_ref()) < 1e-45);
    }

    #[test]
    fn direct_rejects_left_half_plane() {
        let prec = p();
        let lam = Lambda::one(prec);
        assert!(anger_weber_direct(&prec.complex((-1, 3)), &lam, prec).is_err());
    }

    #[test]
    fn continued_integral_matches_direct_before_the_line() {
        let prec = p();
        let lam = Lambda::from_value(&prec.real(2), prec).unwrap();
        let nu = Nu::new(&prec.real(8), &(prec.pi() * 0.4f64)).unwrap();
        let a = anger_weber_direct(&nu.value(), &lam, prec).unwrap();
        let b = anger_weber_continued(&nu, &lam, prec).unwrap();
        assert!(agreement_digits_complex(&a, &b, 80.0) > 36.0);
    }

    #[test]
    fn continued_integral_matches_rotated_remainder() {
        // beyond the Stokes line: continued integral minus the series against
        // the remainder integral along a rotated ray
        let prec = Precision::new(30).unwrap();
        let lam = Lambda::from_value(&prec.real(2), prec).unwrap();
        let nu = Nu::new(&prec.real(4), &(prec.pi() * 0.6f64)).unwrap();
        let a = measured_remainder(&nu, &lam, 2, None, prec).unwrap();
        let k = KernelTable::new(&lam, prec);
        let b = measured_remainder(&nu, &lam, 2, Some(&k), prec).unwrap();
        assert!(agreement_digits_complex(&a, &b, 80.0) > 22.0);
    }

    #[test]
    fn optimal_n_rules() {
        let prec = p();
        assert_eq!(optimal_n(&prec.real(10), &Lambda::one(prec)).unwrap(), 16);
        let l = Lambda::from_beta(&(prec.pi() / 3u32), prec).unwrap();
        assert_eq!(optimal_n(&prec.real(10), &l).unwrap(), 19);
        assert!(optimal_n(&prec.real(1), &l).is_err());
    }

    #[test]
    fn empty_sum_bound_is_leading_term() {
        let prec = p();
        let lam = Lambda::from_value(&prec.real(2), prec).unwrap();
        let e = eval_poincare(&nu_real(10.0, prec), &lam, 0, prec).unwrap();
        assert!(e.value.is_zero());
        assert_eq!(e.bound_id, BoundId::Theta);
        let expect = Float::with_val(prec.bits(), 1) / 3u32 / (prec.pi() * 10u32);
        assert!(crate::numerics::agreement_digits(e.bound.as_ref().unwrap(), &expect, 80.0) > 38.0);
    }

    #[test]
    fn csc_bound_branch() {
        let prec = p();
        let lam = Lambda::from_value(&prec.real(2), prec).unwrap();
        let theta = prec.pi() * 2u32 / 5u32;
        let nu = Nu::new(&prec.real(10), &theta).unwrap();
        let e = eval_poincare(&nu, &lam, 5, prec).unwrap();
        let first = first_omitted(&coefficient(5, &lam, prec).unwrap(), nu.modulus(), 5, prec);
        let eq14 = first.clone() / (0.8 * PI).sin();
        let eq16 = first * (std::f64::consts::E / 2.0 * 6.5).sqrt();
        let expect = if eq14 < eq16 { eq14 } else { eq16 };
        assert!(crate::numerics::agreement_digits(e.bound.as_ref().unwrap(), &expect, 80.0) > 14.0);
        assert!(matches!(e.bound_id, BoundId::Eq14 | BoundId::Eq16));
    }

    #[test]
    fn improved_at_m0_is_truncated_series() {
        let prec = p();
        let lam = Lambda::one(prec);
        let nu = nu_real(10.0, prec);
        let a = eval_improved(&nu, &lam, 0, prec).unwrap();
        let b = eval_poincare(&nu, &lam, 16, prec).unwrap();
        assert_eq!(a.n, 16);
        assert!(agreement_digits_complex(&a.value, &b.value, 80.0) >= 39.0);
    }

    #[test]
    fn improved_rejects_lambda_below_one() {
        let prec = p();
        let lam = Lambda::from_value(&prec.real(0.5), prec).unwrap();
        let nu = Nu::new(&prec.real(10), &(prec.pi() * 0.6f64)).unwrap();
        let e = eval_improved(&nu, &lam, 2, prec).unwrap_err();
        assert!(e.to_string().contains("regime LT1 unsupported"));
    }

    #[test]
    fn improved_beats_truncated_series_at_lambda_one() {
        let prec = p();
        let lam = Lambda::one(prec);
        let nu = nu_real(12.0, prec);
        let r0 = improved_residual(&nu, &lam, 0, prec).unwrap();
        let r3 = improved_residual(&nu, &lam, 3, prec).unwrap();
        assert!(r3 < Float::with_val(64, &r0 * 1e-3));
        let env = improved_envelope(&nu, &lam, 3, prec).unwrap();
        assert!(r3 < env * 10u32);
    }

    #[test]
    fn emergent_leading_term_shape() {
        let prec = p();
        let beta = prec.pi() / 3u32;
        let lam = Lambda::from_beta(&beta, prec).unwrap();
        let nu = Nu::new(&prec.real(12), &(prec.pi() * 0.7f64)).unwrap();
        let t = emergent_series(&nu, &lam, 1, Side::Upper, prec).unwrap();
        // i e^{i nu s - pi i/4} / (nu pi tan beta / 2)^{1/2}
        let bits = prec.bits();
        let z = nu.value();
        let s = truncation_scale(&lam);
        let tan = Float::with_val(bits, beta.tan_ref());
        let arg = Complex::with_val(bits, &z * &s) * Complex::with_val(bits, (0, 1))
            - Complex::with_val(bits, (0, prec.pi() / 4u32));
        let den = (Complex::with_val(bits, &z * &tan) * prec.pi() / 2u32).sqrt();
        let expect = arg.exp() * Complex::with_val(bits, (0, 1)) / den;
        assert!(agreement_digits_complex(&t[0], &expect, 80.0) > 35.0);
    }

    #[test]
    fn emergent_cusp_weight() {
        let prec = p();
        let lam = Lambda::one(prec);
        let nu = Nu::new(&prec.real(1), &prec.real(0)).unwrap();
        let (up, _) = emergent_coeffs(0, &nu, &lam, prec).unwrap();
        // d_0 e^{2 pi i/3} sin(pi/3) Gamma(1/3), d_0 = 6^{1/3}
        let bits = prec.bits();
        let d0 = Float::with_val(bits, 6).cbrt();
        let g = gamma_real(&(Float::with_val(bits, 1) / 3u32), prec).unwrap();
        let mag = d0 * (Float::with_val(bits, 3).sqrt() / 2u32) * g;
        let expect = crate::numerics::expi(&(prec.pi() * 2u32 / 3u32)) * mag;
        assert!(agreement_digits_complex(&up, &expect, 80.0) > 35.0);
    }

    #[test]
    fn emergent_conjugate_symmetry() {
        let prec = p();
        let lam = Lambda::from_beta(&(prec.pi() / 4u32), prec).unwrap();
        let nu = Nu::new(&prec.real(15), &prec.real(2.0)).unwrap();
        let up = emergent_series(&nu, &lam, 3, Side::Upper, prec).unwrap();
        let dn = emergent_series(&mirrored(&nu), &lam, 3, Side::Lower, prec).unwrap();
        for (a, b) in up.iter().zip(&dn) {
            let c = Complex::with_val(prec.bits(), b.conj_ref());
            assert!(agreement_digits_complex(a, &c, 80.0) > 35.0);
        }
    }
}
