//! Serde adapters: big integers as decimal strings, rationals as "num/den".
//! No JSON number ever carries a value that might exceed 53 bits.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serializer};

/// `"n/d"` in lowest terms, or just `"n"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let d: BigInt = d.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            if d == BigInt::from(0) {
                return Err(format!("{s}: zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|e| format!("{s}: {e}"))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub mod big {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod big_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Decimal expansion of `r` truncated toward zero after `digits` places.
pub fn decimal(r: &BigRational, digits: usize) -> String {
    use num_traits::{Signed, Zero};
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale) / a.denom();
    let int_part = &scaled / &scale;
    let frac = &scaled % &scale;
    let mut s = String::new();
    if neg && !(int_part.is_zero() && frac.is_zero()) {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}

/// `d.ddd...e<exp>` with `digits` significant digits, rounded down or up;
/// `r` must be positive.
pub fn scientific(r: &BigRational, digits: usize, round_up: bool) -> String {
    use num_traits::Signed;
    assert!(r.is_positive() && digits > 0);
    let ten = BigInt::from(10);
    // estimate the exponent from digit counts, then correct
    let mut e = r.numer().to_string().len() as i64 - r.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            BigRational::new(BigInt::from(1), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while *r < pow10(e) {
        e -= 1;
    }
    while *r >= pow10(e + 1) {
        e += 1;
    }
    let scaled = r * pow10(digits as i64 - 1 - e);
    let mut m = if round_up { scaled.ceil() } else { scaled.floor() }.to_integer();
    if m == num_traits::pow(ten.clone(), digits) {
        m /= &ten;
        e += 1;
    }
    let ds = m.to_string();
    let (head, tail) = ds.split_at(1);
    if tail.is_empty() {
        format!("{head}e{e}")
    } else {
        format!("{head}.{tail}e{e}")
    }
}
