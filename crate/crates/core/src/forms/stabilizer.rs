use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{is_irreducible, BinaryQuarticForm, IntegerMatrix2x2};
use crate::error::{Error, Result};
use crate::poly;

/// A non-scalar rational matrix `A` with `F^A = lambda F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerElement {
    pub matrix: IntegerMatrix2x2,
    #[serde(with = "crate::serde_util::rational")]
    pub lambda: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub trivial: bool,
    /// Integer roots of the resolvent cubic; one involution per root.
    #[serde(with = "crate::serde_util::big_vec")]
    pub resolvent_roots: Vec<BigInt>,
    pub elements: Vec<StabilizerElement>,
}

/// Projective stabilizer of an irreducible form in `PGL_2(Q)`.
///
/// A rational `A` with `F^A` proportional to `F` permutes the four roots
/// and its permutation commutes with the Galois action. For a transitive
/// Galois group that forces a double transposition somewhere in the group,
/// and the involution realising the pairing `{r1, r2}, {r3, r4}` is rational
/// exactly when `r1 r2 + r3 r4` is. So the stabilizer is nontrivial iff the
/// resolvent cubic has a rational root; each such root yields an explicit
/// involution, verified exactly.
pub fn stabilizer(f: &BinaryQuarticForm) -> Result<StabilizerReport> {
    if !is_irreducible(f)? {
        return Err(Error::Reducible);
    }
    let [a0, a1, a2, a3, _] = f.coeffs();
    let resolvent = super::irreducible::resolvent_cubic(f);
    let roots: Vec<BigInt> = poly::rational_roots(&resolvent)
        .into_iter()
        .map(|r| r.to_integer())
        .collect();
    let q = |n: &BigInt| BigRational::new(n.clone(), a0.clone());
    let (b, c, d) = (q(a1), q(a2), q(a3));
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let mut elements = Vec::new();
    for t in &roots {
        let theta = q(t);
        let delta2 = &b * &b - &four * (&c - &theta);
        let m = if delta2.is_zero() {
            [BigRational::one(), &b / &two, BigRational::zero(), -BigRational::one()]
        } else {
            let alpha = &d * &two - &b * &theta;
            let beta = &b * &d - &two * &theta * (&c - &theta);
            [alpha.clone(), beta, delta2, -alpha]
        };
        let matrix = integral(&m);
        let lambda = proportionality(f, &f.apply_matrix(&matrix)).ok_or_else(|| {
            Error::internal(format!("resolvent root {t} gave a non-stabilizing matrix"))
        })?;
        elements.push(StabilizerElement { matrix, lambda });
    }
    Ok(StabilizerReport {
        trivial: elements.is_empty(),
        resolvent_roots: roots,
        elements,
    })
}

pub fn stabilizer_is_trivial(f: &BinaryQuarticForm) -> Result<bool> {
    Ok(stabilizer(f)?.trivial)
}

fn integral(m: &[BigRational; 4]) -> IntegerMatrix2x2 {
    let l = m.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let [a, b, c, d] = m.clone().map(|x| (x * &l).to_integer());
    let g = [&a, &b, &c, &d]
        .into_iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    IntegerMatrix2x2::new(a / &g, b / &g, c / &g, d / &g)
}

/// `lambda` with `g = lambda f`, if any.
pub(crate) fn proportionality(f: &BinaryQuarticForm, g: &BinaryQuarticForm) -> Option<BigRational> {
    let k = f.coeffs().iter().position(|c| !c.is_zero())?;
    let (fk, gk) = (f.a(k), g.a(k));
    let ok = (0..5).all(|i| g.a(i) * fk == gk * f.a(i));
    (ok && !gk.is_zero()).then(|| BigRational::new(gk.clone(), fk.clone()))
}
