//! Truncated power series and the coefficient sequences a_n(lambda), U_m(x)
//! and d_{2n} extracted from them.

use std::collections::HashMap;
use std::sync::RwLock;

use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::kernels::Lambda;
use crate::numerics::{factorial, Precision};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Sinh,
    Cosh,
}

/// c_0 + c_1 t + ... + c_K t^K, exact up to degree K.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[Float]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|c| Complex::with_val(c.prec(), (c, 0)))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Complex {
        &self.coeffs[k]
    }

    fn bits(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec())
    }

    /// Divide by t^k, dropping the first k coefficients (which must vanish).
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs[k..].to_vec())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &Complex) -> Self {
        let bits = self.bits();
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Complex::with_val(bits, c * s))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let bits = self.bits();
        Self::new(
            (0..=k)
                .map(|i| Complex::with_val(bits, &self.coeffs[i] + &other.coeffs[i]))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let bits = self.bits();
        Self::new(
            (0..=k)
                .map(|i| Complex::with_val(bits, &self.coeffs[i] - &other.coeffs[i]))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let bits = self.bits();
        let out = (0..=k)
            .map(|n| {
                let mut acc = Complex::new(bits);
                for i in 0..=n {
                    acc += Complex::with_val(bits, &self.coeffs[i] * &other.coeffs[n - i]);
                }
                acc
            })
            .collect();
        Self::new(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.coeffs[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let k = self.order().min(other.order());
        let bits = self.bits();
        let inv0 = Complex::with_val(bits, other.coeffs[0].recip_ref());
        let mut q: Vec<Complex> = Vec::with_capacity(k + 1);
        for n in 0..=k {
            let mut acc = self.coeffs[n].clone();
            for i in 1..=n {
                acc -= Complex::with_val(bits, &other.coeffs[i] * &q[n - i]);
            }
            q.push(acc * &inv0);
        }
        Ok(Self::new(q))
    }

    /// s^e for rational e, principal branch of c_0^e.
    ///
    /// Uses the J.C.P. Miller recurrence
    /// `b_k = sum_{j=1..k} (e j - (k - j)) a_j b_{k-j} / (k a_0)`.
    pub fn pow(&self, e: &Rational) -> Result<Self> {
        let a = &self.coeffs;
        if a[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let bits = self.bits();
        let ef = Float::with_val(bits, e);
        let b0 = if e.denom() == &1u32 {
            let ei = e.numer().to_i32().expect("integer exponent fits in i32");
            Complex::with_val(bits, rug::ops::Pow::pow(&a[0], ei))
        } else if a[0].imag().is_zero() && *a[0].real() > 0 {
            let r = rug::ops::Pow::pow(Float::with_val(bits, a[0].real()), &ef);
            Complex::with_val(bits, (r, 0))
        } else {
            let ln = Complex::with_val(bits, a[0].ln_ref());
            (ln * &ef).exp()
        };
        let inv_a0 = Complex::with_val(bits, a[0].recip_ref());
        let mut b: Vec<Complex> = Vec::with_capacity(a.len());
        b.push(b0);
        for k in 1..a.len() {
            let mut acc = Complex::new(bits);
            for j in 1..=k {
                if a[j].is_zero() {
                    continue;
                }
                let w = Float::with_val(bits, &ef * j as u32) - (k - j) as u32;
                let term = Complex::with_val(bits, &a[j] * &b[k - j]) * w;
                acc += term;
            }
            acc *= &inv_a0;
            acc /= k as u32;
            b.push(acc);
        }
        Ok(Self::new(b))
    }

    /// (t^k q)^e for a series with declared zero of order `zero_order`.
    ///
    /// Returns the integer power of t that was factored out together with
    /// the series q^e. Fails unless k e is an integer.
    pub fn pow_factored(&self, zero_order: usize, e: &Rational) -> Result<(i64, Self)> {
        if self.coeffs[..zero_order.min(self.coeffs.len())]
            .iter()
            .any(|c| !c.is_zero())
        {
            return Err(Error::Domain(format!(
                "series does not vanish to order {zero_order} at t = 0"
            )));
        }
        let ke = Rational::from(e * Integer::from(zero_order));
        if ke.denom() != &1u32 {
            return Err(Error::NonIntegralPower {
                order: zero_order,
                exponent: e.to_string(),
            });
        }
        let shift = ke.numer().to_i64().expect("shift fits in i64");
        Ok((shift, self.shift_down(zero_order).pow(e)?))
    }
}

/// Maclaurin series of sinh or cosh to degree `order`.
pub fn ps_elementary(kind: Elementary, order: usize, prec: Precision) -> PowerSeries {
    let bits = prec.bits();
    let parity = match kind {
        Elementary::Sinh => 1,
        Elementary::Cosh => 0,
    };
    let coeffs = (0..=order)
        .map(|k| {
            if k % 2 == parity {
                let r = Rational::from((1, Integer::from(Integer::factorial(k as u32))));
                Complex::with_val(bits, (Float::with_val(bits, &r), 0))
            } else {
                Complex::new(bits)
            }
        })
        .collect();
    PowerSeries::new(coeffs)
}

fn inv_factorial(k: usize, bits: u32) -> Float {
    factorial(k as u32, bits).recip()
}

fn check_order(needed: usize, got: usize) -> Result<()> {
    if got < needed {
        Err(Error::InsufficientOrder { needed, got })
    } else {
        Ok(())
    }
}

/// a_n(lambda) as the degree-2n coefficient of (t / (lambda sinh t + t))^{2n+1}.
pub fn anger_weber_coeff(n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
    anger_weber_coeff_with_order(n, lambda, 2 * n, prec)
}

pub fn anger_weber_coeff_with_order(
    n: usize,
    lambda: &Lambda,
    order: usize,
    prec: Precision,
) -> Result<Float> {
    check_order(2 * n, order)?;
    let guard = prec.with_extra_bits(32 + n as u32);
    let bits = guard.bits();
    let lam = Float::with_val(bits, lambda.value());
    // (lambda sinh t + t) / t = (1 + lambda) + lambda sum_{k>=1} t^{2k} / (2k+1)!
    let q: Vec<Float> = (0..=order)
        .map(|k| {
            let mut c = if k % 2 == 0 {
                Float::with_val(bits, &lam * inv_factorial(k + 1, bits))
            } else {
                Float::new(bits)
            };
            if k == 0 {
                c += 1u32;
            }
            c
        })
        .collect();
    let e = Rational::from(-(2 * n as i64 + 1));
    let p = PowerSeries::from_real(&q).pow(&e)?;
    Ok(Float::with_val(prec.bits(), p.coeff(2 * n).real()))
}

/// U_m(x) = (-1)^m x^m / (2^m m!) (2m)! [t^{2m}] (t^2 / (2 (x (t - sinh t) + cosh t - 1)))^{m + 1/2}.
pub fn hankel_coeff_u(m: usize, x: &Complex, prec: Precision) -> Result<Complex> {
    hankel_coeff_u_with_order(m, x, 2 * m, prec)
}

pub fn hankel_coeff_u_with_order(
    m: usize,
    x: &Complex,
    order: usize,
    prec: Precision,
) -> Result<Complex> {
    check_order(2 * m, order)?;
    let guard = prec.with_extra_bits(32 + 4 * m as u32);
    let bits = guard.bits();
    let x = Complex::with_val(bits, x);
    // 2 (x (t - sinh t) + cosh t - 1) / t^2, coefficient of t^k is twice that of t^{k+2}
    let q: Vec<Complex> = (0..=order)
        .map(|k| {
            let j = k + 2;
            let c = inv_factorial(j, bits) * 2u32;
            if j % 2 == 0 {
                Complex::with_val(bits, (c, 0))
            } else {
                -Complex::with_val(bits, &x * c)
            }
        })
        .collect();
    let e = Rational::from((-(2 * m as i64 + 1), 2));
    let p = PowerSeries::new(q).pow(&e)?;
    let mut v = p.coeff(2 * m).clone();
    v *= factorial(2 * m as u32, bits);
    v /= factorial(m as u32, bits);
    v >>= m as i32;
    v *= Complex::with_val(bits, rug::ops::Pow::pow(&x, m as u32));
    if m % 2 == 1 {
        v = -v;
    }
    Ok(Complex::with_val(prec.bits(), v))
}

/// d_{2n}: degree-2n coefficient of (t^3 / (sinh t - t))^{(2n+1)/3}.
pub fn cusp_coeff_d(n: usize, prec: Precision) -> Result<Float> {
    cusp_coeff_d_with_order(n, 2 * n, prec)
}

pub fn cusp_coeff_d_with_order(n: usize, order: usize, prec: Precision) -> Result<Float> {
    check_order(2 * n, order)?;
    let guard = prec.with_extra_bits(32 + n as u32);
    let bits = guard.bits();
    // (sinh t - t) / t^3 = sum_{k even} t^k / (k+3)!
    let q: Vec<Float> = (0..=order)
        .map(|k| {
            if k % 2 == 0 {
                inv_factorial(k + 3, bits)
            } else {
                Float::new(bits)
            }
        })
        .collect();
    let e = Rational::from((-(2 * n as i64 + 1), 3));
    let p = PowerSeries::from_real(&q).pow(&e)?;
    Ok(Float::with_val(prec.bits(), p.coeff(2 * n).real()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffKind {
    A,
    TildeA,
    U,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Series,
    Integral,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CoeffKey {
    kind: CoeffKind,
    index: usize,
    input: String,
    bits: u32,
}

#[derive(Clone, Debug)]
pub struct CoeffEntry {
    pub value: Complex,
    pub provenance: Provenance,
}

fn exact_key_real(x: &Float) -> String {
    x.to_string_radix(16, None)
}

fn exact_key_complex(x: &Complex) -> String {
    format!("{}|{}", exact_key_real(x.real()), exact_key_real(x.imag()))
}

/// Memo table for coefficient sequences, keyed by exact input bits and
/// precision. Readers run concurrently; inserts take the write lock.
#[derive(Debug, Default)]
pub struct CoeffTable {
    entries: RwLock<HashMap<CoeffKey, CoeffEntry>>,
}

impl CoeffTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("coefficient table").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_insert(
        &self,
        key: CoeffKey,
        provenance: Provenance,
        compute: impl FnOnce() -> Result<Complex>,
    ) -> Result<CoeffEntry> {
        if let Some(e) = self.entries.read().expect("coefficient table").get(&key) {
            return Ok(e.clone());
        }
        let entry = CoeffEntry {
            value: compute()?,
            provenance,
        };
        self.entries
            .write()
            .expect("coefficient table")
            .insert(key, entry.clone());
        Ok(entry)
    }

    pub fn a(&self, n: usize, lambda: &Lambda, prec: Precision) -> Result<Float> {
        let key = CoeffKey {
            kind: CoeffKind::A,
            index: n,
            input: exact_key_complex(&Complex::with_val(prec.bits(), (lambda.value(), 0))),
            bits: prec.bits(),
        };
        let e = self.get_or_insert(key, Provenance::Series, || {
            let v = anger_weber_coeff(n, lambda, prec)?;
            Ok(Complex::with_val(prec.bits(), (v, 0)))
        })?;
        Ok(e.value.real().clone())
    }

    /// Record a value obtained elsewhere (for example ã_n from quadrature).
    pub fn insert(
        &self,
        kind: CoeffKind,
        index: usize,
        input: &Complex,
        prec: Precision,
        entry: CoeffEntry,
    ) {
        let key = CoeffKey {
            kind,
            index,
            input: exact_key_complex(input),
            bits: prec.bits(),
        };
        self.entries
            .write()
            .expect("coefficient table")
            .insert(key, entry);
    }

    pub fn lookup(
        &self,
        kind: CoeffKind,
        index: usize,
        input: &Complex,
        prec: Precision,
    ) -> Option<CoeffEntry> {
        let key = CoeffKey {
            kind,
            index,
            input: exact_key_complex(input),
            bits: prec.bits(),
        };
        self.entries
            .read()
            .expect("coefficient table")
            .get(&key)
            .cloned()
    }

    pub fn u(&self, m: usize, x: &Complex, prec: Precision) -> Result<Complex> {
        let key = CoeffKey {
            kind: CoeffKind::U,
            index: m,
            input: exact_key_complex(x),
            bits: prec.bits(),
        };
        Ok(self
            .get_or_insert(key, Provenance::Series, || hankel_coeff_u(m, x, prec))?
            .value)
    }

    pub fn d(&self, n: usize, prec: Precision) -> Result<Float> {
        let key = CoeffKey {
            kind: CoeffKind::D,
            index: n,
            input: String::new(),
            bits: prec.bits(),
        };
        let e = self.get_or_insert(key, Provenance::Series, || {
            let v = cusp_coeff_d(n, prec)?;
            Ok(Complex::with_val(prec.bits(), (v, 0)))
        })?;
        Ok(e.value.real().clone())
    }
}
