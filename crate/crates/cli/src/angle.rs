//! Exact parsing of angles written as rational multiples of pi.
//!
//! Accepted forms: `pi`, `-pi`, `pi/6`, `5pi/12`, `5*pi/12`, `0.25pi`,
//! `0.25*pi`, `3/4pi`, and plain decimals (taken as radians).

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// A real number `q` or `q * pi` with rational `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Angle {
    pub coeff: Rational,
    pub times_pi: bool,
}

impl Angle {
    pub fn to_float(&self, bits: u32) -> Float {
        if !self.times_pi {
            return Float::with_val(bits, &self.coeff);
        }
        let wide = bits + 64;
        let pi = Float::with_val(wide, rug::float::Constant::Pi);
        let v = pi * self.coeff.numer() / self.coeff.denom();
        Float::with_val(bits, v)
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num)?;
        let d = parse_decimal(den)?;
        if d == 0 {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut q = Rational::from(
        Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?,
    );
    let scale = exp - frac.len() as i32;
    let ten = Rational::from(Integer::from(10).pow(scale.unsigned_abs()));
    if scale >= 0 {
        q *= ten;
    } else {
        q /= ten;
    }
    Some(if neg { -q } else { q })
}

/// Parse an angle or real value. Returns `None` on malformed input.
pub fn parse_angle(s: &str) -> Option<Angle> {
    let t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    let Some(pos) = t.find("pi") else {
        return parse_decimal(&t).map(|coeff| Angle {
            coeff,
            times_pi: false,
        });
    };
    let before = t[..pos].trim_end_matches('*');
    let after = &t[pos + 2..];
    let lead = match before {
        "" | "+" => Rational::from(1),
        "-" => Rational::from(-1),
        b => parse_decimal(b)?,
    };
    let coeff = if after.is_empty() {
        lead
    } else {
        let den = after.strip_prefix('/')?;
        let d = parse_decimal(den)?;
        if d == 0 {
            return None;
        }
        lead / d
    };
    Some(Angle {
        coeff,
        times_pi: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn pi_forms() {
        assert_eq!(parse_angle("pi/6").unwrap().coeff, q(1, 6));
        assert_eq!(parse_angle("5pi/12").unwrap().coeff, q(5, 12));
        assert_eq!(parse_angle("5*pi/12").unwrap().coeff, q(5, 12));
        assert_eq!(parse_angle("0.25pi").unwrap().coeff, q(1, 4));
        assert_eq!(parse_angle("-pi").unwrap().coeff, q(-1, 1));
        assert_eq!(parse_angle("3/4pi").unwrap().coeff, q(3, 4));
        assert!(parse_angle("PI").unwrap().times_pi);
    }

    #[test]
    fn plain_values() {
        let a = parse_angle("0.5").unwrap();
        assert!(!a.times_pi);
        assert_eq!(a.coeff, q(1, 2));
        assert_eq!(parse_angle("2").unwrap().coeff, q(2, 1));
        assert_eq!(parse_angle("1.5e-1").unwrap().coeff, q(3, 20));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "pix", "pi/0", "abc", "1..2", "pi/"] {
            assert!(parse_angle(s).is_none(), "{s}");
        }
    }

    #[test]
    fn value_is_exact_to_working_precision() {
        let a = parse_angle("5pi/12").unwrap().to_float(256);
        let b = Float::with_val(1024, rug::float::Constant::Pi) * 5u32 / 12u32;
        let err = Float::with_val(1024, &b - &a).abs();
        assert!(
            err <= a
                .get_exp()
                .map(|e| Float::with_val(64, Float::i_exp(1, e - 256)))
                .unwrap()
        );
    }

    proptest! {
        #[test]
        fn decimal_times_pi_round_trips(n in -10_000i64..10_000, d in 1i64..500) {
            let text = format!("{n}/{d}pi");
            let a = parse_angle(&text).unwrap();
            prop_assert!(a.times_pi);
            prop_assert_eq!(a.coeff, q(n, d));
        }
    }
}
