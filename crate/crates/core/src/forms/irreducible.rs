use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{invariants::ij, BinaryQuarticForm};
use crate::error::{Error, Result};
use crate::forms::invariants::discriminant;
use crate::poly;

/// A nontrivial factorisation `F = left * right` over the integers, each
/// factor a binary form given by its coefficients from `x^k` down to `y^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFactorization {
    #[serde(with = "crate::serde_util::big_vec")]
    pub left: Vec<BigInt>,
    #[serde(with = "crate::serde_util::big_vec")]
    pub right: Vec<BigInt>,
}

fn check_pre(f: &BinaryQuarticForm) -> Result<()> {
    let c = f.content()?;
    if !c.is_one() {
        return Err(Error::NotPrimitive(c.to_string()));
    }
    let (i, j) = ij(f);
    if discriminant(&i, &j)?.is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

pub fn is_irreducible(f: &BinaryQuarticForm) -> Result<bool> {
    Ok(rational_factorization(f)?.is_none())
}

/// Find a factorisation over Q if one exists.
///
/// Linear factors come from rational roots of `F(X, 1)` (plus `y` when
/// `a0 = 0`). A quadratic split `a0 (X^2 + uX + v)(X^2 + u'X + v')` forces
/// `a0 (v + v')` to be an integer root of the monic resolvent cubic
/// `t^3 - a2 t^2 + (a1 a3 - 4 a0 a4) t - (a1^2 a4 - 4 a0 a2 a4 + a0 a3^2)`,
/// from which `u, v` are recovered by two quadratic equations and checked by
/// multiplication. No coefficient is ever factored.
pub fn rational_factorization(f: &BinaryQuarticForm) -> Result<Option<RationalFactorization>> {
    check_pre(f)?;
    let [a0, a1, a2, a3, a4] = f.coeffs();
    if a0.is_zero() {
        return Ok(Some(split_off_linear(f, &BigInt::zero(), &BigInt::from(-1))));
    }
    let fx = f.dehomogenize();
    if let Some(r) = poly::rational_roots(&fx).first() {
        // root X = n/d gives the factor d x - n y
        return Ok(Some(split_off_linear(f, r.denom(), r.numer())));
    }
    let resolvent = resolvent_cubic(f);
    let q = |n: &BigInt| BigRational::new(n.clone(), a0.clone());
    let (b, c, d, e) = (q(a1), q(a2), q(a3), q(a4));
    let two = BigRational::from_integer(BigInt::from(2));
    for t in poly::rational_roots(&resolvent) {
        let theta = t / BigRational::from_integer(a0.clone());
        // v, v' are the roots of Z^2 - theta Z + e; u, u' of Z^2 - b Z + (c - theta)
        let Some(sv) = rational_sqrt(&(&theta * &theta - &e * BigInt::from(4))) else {
            continue;
        };
        let Some(su) = rational_sqrt(&(&b * &b - (&c - &theta) * BigInt::from(4))) else {
            continue;
        };
        for sign in [1i32, -1] {
            let u = (&b + &su) / &two;
            let u2 = (&b - &su) / &two;
            let v = (&theta + &sv * BigInt::from(sign)) / &two;
            let v2 = (&theta - &sv * BigInt::from(sign)) / &two;
            // compare the expanded product against the monic quartic
            let ok_b = &u + &u2 == b;
            let ok_c = &v + &v2 + &u * &u2 == c;
            let ok_d = &u * &v2 + &u2 * &v == d;
            let ok_e = &v * &v2 == e;
            if ok_b && ok_c && ok_d && ok_e {
                let left = primitive_int(&[BigRational::one(), u, v]);
                let right = exact_quotient(f, &left);
                return Ok(Some(RationalFactorization { left, right }));
            }
        }
    }
    Ok(None)
}

/// Monic integer resolvent cubic in `t = a0 (r1 r2 + r3 r4)`, ascending.
pub(crate) fn resolvent_cubic(f: &BinaryQuarticForm) -> Vec<BigInt> {
    let [a0, a1, a2, a3, a4] = f.coeffs();
    let c0: BigInt = a1 * a1 * a4 - 4 * a0 * a2 * a4 + a0 * a3 * a3;
    let c1: BigInt = a1 * a3 - 4 * a0 * a4;
    vec![-c0, c1, -a2.clone(), BigInt::one()]
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Clear denominators and content of a coefficient list (descending order).
fn primitive_int(c: &[BigRational]) -> Vec<BigInt> {
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

fn split_off_linear(f: &BinaryQuarticForm, d: &BigInt, n: &BigInt) -> RationalFactorization {
    let left = vec![d.clone(), -n.clone()];
    let right = exact_quotient(f, &left);
    RationalFactorization { left, right }
}

/// `F / g` for a primitive integer factor `g` (descending coefficients).
/// Gauss's lemma makes the quotient integral.
fn exact_quotient(f: &BinaryQuarticForm, g: &[BigInt]) -> Vec<BigInt> {
    // ascending powers of x with y = 1
    let fa: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
    let ga: Vec<BigInt> = g.iter().rev().cloned().collect();
    let deg_g = ga.len() - 1;
    let mut r = fa;
    let mut qa = vec![BigInt::zero(); 5 - deg_g];
    // divide from the lowest power of x, so a vanishing x-leading term is fine
    let low = ga.iter().position(|c| !c.is_zero()).expect("nonzero factor");
    for k in 0..qa.len() {
        let (qk, rem) = r[k + low].div_rem(&ga[low]);
        debug_assert!(rem.is_zero());
        for (i, gi) in ga.iter().enumerate() {
            if k + i < r.len() {
                r[k + i] -= &qk * gi;
            }
        }
        qa[k] = qk;
    }
    qa.into_iter().rev().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(c: [i64; 5]) -> BinaryQuarticForm {
        BinaryQuarticForm::from_i64(c)
    }

    fn product(l: &[BigInt], r: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); l.len() + r.len() - 1];
        for (i, a) in l.iter().enumerate() {
            for (j, b) in r.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    #[test]
    fn examples() {
        assert_eq!(is_irreducible(&f([1, 0, 0, 0, 1])), Ok(true));
        assert_eq!(is_irreducible(&f([1, 0, -5, 0, 6])), Ok(false));
        assert_eq!(is_irreducible(&f([0, 1, 0, 0, 1])), Ok(false));
        assert_eq!(is_irreducible(&f([2, 4, 6, 8, 10])), Err(Error::NotPrimitive("2".into())));
        assert_eq!(is_irreducible(&f([1, 2, 1, 0, 0])), Err(Error::Degenerate));
    }

    #[test]
    fn factorizations_multiply_back() {
        for c in [
            [1, 0, -5, 0, 6],
            [0, 1, 0, 0, 1],
            [6, -5, -11, 8, 4],
            [4, 0, 1, 0, 9],
            [1, 0, 0, 0, 4],
            [3, 1, 4, 1, -5],
            [2, 1, 3, 1, 2],
            [3, -1, 4, 1, 5],
        ] {
            let g = f(c);
            if let Some(fac) = rational_factorization(&g).unwrap() {
                assert_eq!(product(&fac.left, &fac.right), g.coeffs().to_vec(), "{g}");
            }
        }
        // x^4 + 4 y^4 = (x^2 + 2xy + 2y^2)(x^2 - 2xy + 2y^2)
        assert!(rational_factorization(&f([1, 0, 0, 0, 4])).unwrap().is_some());
        assert!(rational_factorization(&f([2, 1, 3, 1, 2])).unwrap().is_some());
        // 4 x^4 + x^2 y^2 + 9 y^4 has no rational factor
        assert_eq!(is_irreducible(&f([4, 0, 1, 0, 9])), Ok(true));
    }
}
