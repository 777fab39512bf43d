//! Integral binary quartic forms and the `GL_2` action on them.

mod invariants;
mod irreducible;
mod maximal;
mod stabilizer;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use invariants::{
    admissible_case, discriminant, height, hessian, ij, invariant_pair_admissible, invariants,
    real_signature, realize_invariants, sextic_covariant, AdmissibleCase, InvariantData,
};
pub use irreducible::{is_irreducible, rational_factorization, RationalFactorization};
pub use maximal::{is_maximal, maximality_candidate_primes, MaximalityReport, PrimeMaximality};
pub use stabilizer::{stabilizer, stabilizer_is_trivial, StabilizerElement, StabilizerReport};

/// `a0 x^4 + a1 x^3 y + a2 x^2 y^2 + a3 x y^3 + a4 y^4` with integer
/// coefficients of any size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryQuarticForm {
    coeffs: [BigInt; 5],
}

impl BinaryQuarticForm {
    pub fn new(coeffs: [BigInt; 5]) -> Self {
        BinaryQuarticForm { coeffs }
    }

    pub fn from_i64(c: [i64; 5]) -> Self {
        Self::new(c.map(BigInt::from))
    }

    pub fn zero() -> Self {
        Self::new(std::array::from_fn(|_| BigInt::zero()))
    }

    pub fn coeffs(&self) -> &[BigInt; 5] {
        &self.coeffs
    }

    /// Coefficient of `x^(4-i) y^i`.
    pub fn a(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        // Horner in x with y-powers accumulated
        let mut acc = BigInt::zero();
        let mut ypow = BigInt::one();
        for c in &self.coeffs {
            acc = acc * x + c * &ypow;
            ypow *= y;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64, y: i64) -> BigInt {
        self.eval(&BigInt::from(x), &BigInt::from(y))
    }

    /// `F(X, 1)` in ascending-degree order.
    pub fn dehomogenize(&self) -> Vec<BigInt> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.clone().map(|c| -c))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.clone().map(|c| c * k))
    }

    /// Exact division of every coefficient; `None` when not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let mut out = self.coeffs.clone();
        for c in out.iter_mut() {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            *c = q;
        }
        Some(Self::new(out))
    }

    /// Positive gcd of the coefficients.
    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::ZeroForm);
        }
        Ok(self
            .coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
            .abs())
    }

    pub fn primitive_part(&self) -> Result<Self> {
        let c = self.content()?;
        Ok(self.div_exact(&c).expect("content divides every coefficient"))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_ok_and(|c| c.is_one())
    }

    /// `F(ax + by, cx + dy)`.
    pub fn apply_matrix(&self, m: &IntegerMatrix2x2) -> Self {
        let l1 = [m.a.clone(), m.b.clone()];
        let l2 = [m.c.clone(), m.d.clone()];
        // powers of each linear form, homogeneous, index = power of y
        let p1 = linear_powers(&l1);
        let p2 = linear_powers(&l2);
        let mut out: [BigInt; 5] = std::array::from_fn(|_| BigInt::zero());
        for (i, ai) in self.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let term = hom_mul(&p1[4 - i], &p2[i]);
            for (k, t) in term.iter().enumerate() {
                out[k] += ai * t;
            }
        }
        Self::new(out)
    }
}

fn hom_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn linear_powers(l: &[BigInt; 2]) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![BigInt::one()]];
    for k in 1..=4 {
        let next = hom_mul(&out[k - 1], l);
        out.push(next);
    }
    out
}

impl fmt::Display for BinaryQuarticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2, a3, a4] = &self.coeffs;
        write!(f, "{a0},{a1},{a2},{a3},{a4}")
    }
}

impl FromStr for BinaryQuarticForm {
    type Err = Error;

    /// Five integers `a0 a1 a2 a3 a4`, separated by commas and/or whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!(
                "expected 5 coefficients, found {} in {s:?}",
                parts.len()
            )));
        }
        let mut coeffs: [BigInt; 5] = std::array::from_fn(|_| BigInt::zero());
        for (slot, t) in coeffs.iter_mut().zip(parts) {
            *slot = t
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer: {t:?}")))?;
        }
        Ok(Self::new(coeffs))
    }
}

impl Serialize for BinaryQuarticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_util::big_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for BinaryQuarticForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::serde_util::big_vec::deserialize(d)?;
        let arr: [BigInt; 5] = v
            .try_into()
            .map_err(|_| serde::de::Error::custom("a quartic form has 5 coefficients"))?;
        Ok(Self::new(arr))
    }
}

/// `((a, b), (c, d))`, acting on forms by `F(ax + by, cx + dy)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix2x2 {
    #[serde(with = "crate::serde_util::big")]
    pub a: BigInt,
    #[serde(with = "crate::serde_util::big")]
    pub b: BigInt,
    #[serde(with = "crate::serde_util::big")]
    pub c: BigInt,
    #[serde(with = "crate::serde_util::big")]
    pub d: BigInt,
}

impl IntegerMatrix2x2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        IntegerMatrix2x2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Matrix product; `(F^A)^B = F^(AB)`.
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(c: [i64; 5]) -> BinaryQuarticForm {
        BinaryQuarticForm::from_i64(c)
    }

    #[test]
    fn apply_matrix_examples() {
        let x4y4 = f([1, 0, 0, 0, 1]);
        assert_eq!(
            x4y4.apply_matrix(&IntegerMatrix2x2::from_i64(1, 1, 0, 1)),
            f([1, 4, 6, 4, 2])
        );
        assert_eq!(x4y4.apply_matrix(&IntegerMatrix2x2::identity()), x4y4);
        assert_eq!(
            x4y4.apply_matrix(&IntegerMatrix2x2::from_i64(1, 0, 0, 2)),
            f([1, 0, 0, 0, 16])
        );
        let g = f([3, -1, 4, 1, -5]);
        let a = IntegerMatrix2x2::from_i64(2, -1, 3, 7);
        let b = IntegerMatrix2x2::from_i64(0, 1, -1, 4);
        assert_eq!(g.apply_matrix(&a).apply_matrix(&b), g.apply_matrix(&a.mul(&b)));
    }

    #[test]
    fn apply_matrix_agrees_with_pointwise_evaluation() {
        let g = f([3, -1, 4, 1, -5]);
        let m = IntegerMatrix2x2::from_i64(2, -1, 3, 7);
        let h = g.apply_matrix(&m);
        for (x, y) in [(1, 0), (0, 1), (2, -3), (-5, 4)] {
            let (u, v) = (2 * x - y, 3 * x + 7 * y);
            assert_eq!(h.eval_i64(x, y), g.eval_i64(u, v));
        }
    }

    #[test]
    fn content_and_primitive_part() {
        assert_eq!(f([2, 4, 6, 8, 10]).content().unwrap(), BigInt::from(2));
        assert_eq!(f([2, 4, 6, 8, 10]).primitive_part().unwrap(), f([1, 2, 3, 4, 5]));
        assert_eq!(f([1, 0, 0, 0, 1]).content().unwrap(), BigInt::from(1));
        assert_eq!(f([-3, 0, 6, 0, -9]).content().unwrap(), BigInt::from(3));
        assert_eq!(BinaryQuarticForm::zero().content(), Err(Error::ZeroForm));
    }

    #[test]
    fn parse_and_display() {
        let g: BinaryQuarticForm = "2,-20, 70 -100\t53".parse().unwrap();
        assert_eq!(g, f([2, -20, 70, -100, 53]));
        assert_eq!(g.to_string(), "2,-20,70,-100,53");
        assert!("1,2,3,4".parse::<BinaryQuarticForm>().is_err());
        assert!("1,2,3,4,x".parse::<BinaryQuarticForm>().is_err());
        let big: BinaryQuarticForm = "123456789012345678901234567890 0 0 0 1".parse().unwrap();
        assert_eq!(big.a(0).to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn json_uses_strings() {
        let g = f([2, -20, 70, -100, 53]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"["2","-20","70","-100","53"]"#);
        let back: BinaryQuarticForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
