use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{hessian, invariants::discriminant, invariants::ij, BinaryQuarticForm, IntegerMatrix2x2};
use crate::arith;
use crate::error::{Error, Result};

/// Outcome at one candidate prime. `witness`, when present, is a matrix `B`
/// with `|det B| = p` and `p^4 | F^B`, so that `F = (F^B / p^4)^(adj B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeMaximality {
    pub p: u64,
    pub maximal: bool,
    pub witness: Option<IntegerMatrix2x2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub maximal: bool,
    /// `gcd(content of the Hessian, D)`; every prime at which `F` could be
    /// a proper subform divides it.
    #[serde(with = "crate::serde_util::big")]
    pub screen: BigInt,
    pub primes: Vec<PrimeMaximality>,
}

/// Primes `p` with `p^12 | D` at which `F` reduces to a constant times a
/// fourth power (the only shape a proper subform can have mod `p`).
pub fn maximality_candidate_primes(f: &BinaryQuarticForm) -> Result<(BigInt, Vec<u64>)> {
    let (i, j) = ij(f);
    let d = discriminant(&i, &j)?;
    if d.is_zero() {
        return Err(Error::Degenerate);
    }
    let hc = hessian(f).iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let screen = hc.gcd(&d);
    if screen.is_one() {
        return Ok((screen, Vec::new()));
    }
    let fac = arith::factor(&arith::magnitude(&screen), 5_000_000);
    if let Some(rest) = fac.cofactor {
        return Err(Error::BudgetExceeded(format!(
            "could not factor maximality screen {screen}: cofactor {rest}"
        )));
    }
    let mut out = Vec::new();
    for p in fac.primes.keys() {
        let Some(p) = p.to_u64() else {
            if divides_power(&d, p, 12) {
                return Err(Error::InvalidArgument(format!(
                    "maximality candidate prime {p} exceeds 64 bits"
                )));
            }
            continue;
        };
        if arith::valuation(&d, p).unwrap_or(0) >= 12 {
            out.push(p);
        }
    }
    Ok((screen, out))
}

fn divides_power(d: &BigInt, p: &BigUint, k: usize) -> bool {
    let pk = BigInt::from(num_traits::pow(p.clone(), k));
    (d % pk).is_zero()
}

pub fn is_maximal(f: &BinaryQuarticForm) -> Result<MaximalityReport> {
    let c = f.content()?;
    if !c.is_one() {
        return Err(Error::NotPrimitive(c.to_string()));
    }
    let (screen, primes) = maximality_candidate_primes(f)?;
    let mut reports = Vec::new();
    for p in primes {
        let witness = subform_witness(f, p);
        reports.push(PrimeMaximality {
            p,
            maximal: witness.is_none(),
            witness,
        });
    }
    Ok(MaximalityReport {
        maximal: reports.iter().all(|r| r.maximal),
        screen,
        primes: reports,
    })
}

/// The `p + 1` index-`p` candidates, narrowed to the one matching the root
/// of `F mod p` when `p` is odd and `F` is a fourth power there.
fn subform_witness(f: &BinaryQuarticForm, p: u64) -> Option<IntegerMatrix2x2> {
    let pp = BigInt::from(p);
    let p4 = num_traits::pow(pp.clone(), 4);
    let candidates: Vec<IntegerMatrix2x2> = if p <= 3 {
        (0..p)
            .map(|b| IntegerMatrix2x2::new(pp.clone(), b.into(), 0.into(), 1.into()))
            .chain(std::iter::once(IntegerMatrix2x2::from_i64(1, 0, 0, p as i64)))
            .collect()
    } else {
        let a0 = arith::residue(f.a(0), p);
        if a0 == 0 {
            vec![IntegerMatrix2x2::from_i64(1, 0, 0, p as i64)]
        } else {
            // c (x - b y)^4 has a1 = -4 b c
            let a1 = arith::residue(f.a(1), p);
            let inv = arith::inv_mod(arith::mul_mod(4, a0, p), p);
            let b = arith::mul_mod((p - a1) % p, inv, p);
            vec![IntegerMatrix2x2::new(pp.clone(), b.into(), 0.into(), 1.into())]
        }
    };
    candidates.into_iter().find(|m| {
        f.apply_matrix(m)
            .coeffs()
            .iter()
            .all(|c| (c % &p4).is_zero())
    })
}
