use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::BinaryQuarticForm;
use crate::error::{Error, Result};
use crate::poly;

/// Exact invariants of a form. `signature_i` is `None` for degenerate forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantData {
    #[serde(rename = "I", with = "crate::serde_util::big")]
    pub i: BigInt,
    #[serde(rename = "J", with = "crate::serde_util::big")]
    pub j: BigInt,
    #[serde(rename = "D", with = "crate::serde_util::big")]
    pub d: BigInt,
    #[serde(rename = "H", with = "crate::serde_util::rational")]
    pub h: BigRational,
    #[serde(rename = "i")]
    pub signature_i: Option<u8>,
}

/// `(I, J)` only.
pub fn ij(f: &BinaryQuarticForm) -> (BigInt, BigInt) {
    let [a0, a1, a2, a3, a4] = f.coeffs();
    let i = a2 * a2 - 3 * a1 * a3 + 12 * a0 * a4;
    let j = 2 * a2 * a2 * a2 - 9 * a1 * a2 * a3 + 27 * a1 * a1 * a4 - 72 * a0 * a2 * a4
        + 27 * a0 * a3 * a3;
    (i, j)
}

/// `D = (4I^3 - J^2) / 27`.
pub fn discriminant(i: &BigInt, j: &BigInt) -> Result<BigInt> {
    let num: BigInt = 4 * i * i * i - j * j;
    let (q, r) = num.div_rem(&BigInt::from(27));
    if !r.is_zero() {
        return Err(Error::internal(format!(
            "27 does not divide 4I^3 - J^2 for I={i}, J={j}"
        )));
    }
    Ok(q)
}

/// `max(|I^3|, J^2/4)`.
pub fn height(i: &BigInt, j: &BigInt) -> BigRational {
    let a = BigRational::from_integer((i * i * i).abs());
    let b = BigRational::new(j * j, BigInt::from(4));
    a.max(b)
}

pub fn invariants(f: &BinaryQuarticForm) -> Result<InvariantData> {
    let (i, j) = ij(f);
    let d = discriminant(&i, &j)?;
    let h = height(&i, &j);
    let signature_i = if d.is_zero() {
        None
    } else {
        Some(signature_unchecked(f))
    };
    Ok(InvariantData {
        i,
        j,
        d,
        h,
        signature_i,
    })
}

/// Number of complex-conjugate root pairs; the projective root at infinity
/// (when `a0 = 0`) counts as real.
pub fn real_signature(f: &BinaryQuarticForm) -> Result<u8> {
    let (i, j) = ij(f);
    if discriminant(&i, &j)?.is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(signature_unchecked(f))
}

fn signature_unchecked(f: &BinaryQuarticForm) -> u8 {
    let mut real = poly::count_real_roots(&f.dehomogenize());
    if f.a(0).is_zero() {
        real += 1;
    }
    ((4 - real) / 2) as u8
}

/// Integer Hessian covariant, coefficients of `x^4 .. y^4`. Vanishes
/// identically exactly when the form is a constant times a fourth power.
pub fn hessian(f: &BinaryQuarticForm) -> [BigInt; 5] {
    let [a0, a1, a2, a3, a4] = f.coeffs();
    [
        3 * a1 * a1 - 8 * a0 * a2,
        4 * a1 * a2 - 24 * a0 * a3,
        4 * a2 * a2 - 6 * a1 * a3 - 48 * a0 * a4,
        4 * a2 * a3 - 24 * a1 * a4,
        3 * a3 * a3 - 8 * a2 * a4,
    ]
}

/// Integer sextic covariant, coefficients of `x^6 .. y^6`. Vanishes on
/// every form `c M^2` with `M` quadratic, so any prime at which `F` reduces
/// to such a square class divides its content.
pub fn sextic_covariant(f: &BinaryQuarticForm) -> [BigInt; 7] {
    let [a0, a1, a2, a3, a4] = f.coeffs();
    [
        a1 * a1 * a1 - 4 * a0 * a1 * a2 + 8 * a0 * a0 * a3,
        a1 * a1 * a2 + 2 * a0 * a1 * a3 - 4 * a0 * a2 * a2 + 16 * a0 * a0 * a4,
        a1 * a1 * a3 - 4 * a0 * a2 * a3 + 8 * a0 * a1 * a4,
        a0 * a3 * a3 - a1 * a1 * a4,
        a1 * a3 * a3 - 4 * a1 * a2 * a4 + 8 * a0 * a3 * a4,
        a2 * a3 * a3 - 4 * a2 * a2 * a4 + 2 * a1 * a3 * a4 + 16 * a0 * a4 * a4,
        a3 * a3 * a3 - 4 * a2 * a3 * a4 + 8 * a1 * a4 * a4,
    ]
}

/// Which of the four congruence classes an invariant pair falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdmissibleCase {
    A,
    B,
    C,
    D,
}

pub fn admissible_case(i: &BigInt, j: &BigInt) -> Option<AdmissibleCase> {
    let i9: i64 = i.mod_floor(&BigInt::from(9)).try_into().expect("small");
    let j27: i64 = j.mod_floor(&BigInt::from(27)).try_into().expect("small");
    let pm = |r: i64| j27 == r || j27 == 27 - r;
    if i9 % 3 == 0 && j27 == 0 {
        Some(AdmissibleCase::A)
    } else if i9 == 1 && pm(2) {
        Some(AdmissibleCase::B)
    } else if i9 == 4 && pm(16) {
        Some(AdmissibleCase::C)
    } else if i9 == 7 && pm(7) {
        Some(AdmissibleCase::D)
    } else {
        None
    }
}

pub fn invariant_pair_admissible(i: &BigInt, j: &BigInt) -> bool {
    admissible_case(i, j).is_some()
}

/// Bounded search for a form with the given invariants. Tries the family
/// `(0, 1, k, a3, a4)` first, then `(0, a1, a2, a3, a4)` with `|a1|, |a2|`
/// up to `search_bound`. `Ok(None)` does not prove non-existence.
pub fn realize_invariants(
    i: &BigInt,
    j: &BigInt,
    search_bound: u64,
) -> Result<Option<BinaryQuarticForm>> {
    if !invariant_pair_admissible(i, j) {
        return Err(Error::Inadmissible(i.to_string(), j.to_string()));
    }
    let bound = search_bound as i64;
    let signed = |n: i64| [n, -n].into_iter().take(if n == 0 { 1 } else { 2 });
    for k in (0..=bound).flat_map(signed) {
        if let Some(f) = solve_tail(&BigInt::from(1), &BigInt::from(k), i, j) {
            return Ok(Some(f));
        }
    }
    for a1 in (2..=bound).flat_map(signed) {
        for a2 in (0..=bound).flat_map(signed) {
            if let Some(f) = solve_tail(&BigInt::from(a1), &BigInt::from(a2), i, j) {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

/// With `a0 = 0`: `I = a2^2 - 3 a1 a3` and `J = 2 a2^3 - 9 a1 a2 a3 + 27 a1^2 a4`.
fn solve_tail(a1: &BigInt, a2: &BigInt, i: &BigInt, j: &BigInt) -> Option<BinaryQuarticForm> {
    let lhs: BigInt = a2 * a2 - i;
    let (a3, r) = lhs.div_rem(&(3 * a1));
    if !r.is_zero() {
        return None;
    }
    let rhs: BigInt = j - 2 * a2 * a2 * a2 + 9 * a1 * a2 * &a3;
    let (a4, r) = rhs.div_rem(&(27 * a1 * a1));
    if !r.is_zero() {
        return None;
    }
    Some(BinaryQuarticForm::new([
        BigInt::zero(),
        a1.clone(),
        a2.clone(),
        a3,
        a4,
    ]))
}
