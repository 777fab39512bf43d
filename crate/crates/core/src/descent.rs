//! Descent at a simple root mod `p`: the integral quotients `F_b`, `F_inf`,
//! the 64-member family over three split primes, and the maps carrying
//! solutions between a form and its quotients.
//!
//! For a finite root `b`, `F_b(x, y) = F(p x + b y, y) / p`. At the root at
//! infinity, `F_inf(x, y) = F(y, p x) / p`, so a solution `(X, Y)` of the
//! quotient pushes to `(Y, p X)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::{self, BinaryQuarticForm, IntegerMatrix2x2, InvariantData};
use crate::modp::{self, ProjectiveRoot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DescentLabel {
    pub p: u64,
    pub root: ProjectiveRoot,
}

impl DescentLabel {
    pub fn new(p: u64, root: ProjectiveRoot) -> Self {
        DescentLabel { p, root }
    }

    /// The matrix `A` with `F_label = F^A / p`.
    pub fn matrix(&self) -> IntegerMatrix2x2 {
        let p = self.p as i64;
        match self.root {
            ProjectiveRoot::Finite(b) => IntegerMatrix2x2::from_i64(p, b as i64, 0, 1),
            ProjectiveRoot::Infinity => IntegerMatrix2x2::from_i64(0, 1, p, 0),
        }
    }
}

/// `F_b` or `F_inf` at a simple root of `F mod p`.
pub fn descend_at(f: &BinaryQuarticForm, p: u64, root: ProjectiveRoot) -> Result<BinaryQuarticForm> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let c = f.content()?;
    if !c.is_one() {
        return Err(Error::NotPrimitive(c.to_string()));
    }
    let r = modp::reduce_unchecked(f, p);
    let slope = match root {
        ProjectiveRoot::Finite(b) => {
            if b >= p {
                return Err(Error::InvalidArgument(format!("root {b} is not reduced mod {p}")));
            }
            let fx: Vec<u64> = r.iter().rev().copied().collect();
            if horner(&fx, b, p) != 0 {
                return Err(not_a_root(p, root));
            }
            let dfx: Vec<u64> = fx
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| arith::mul_mod(c, i as u64, p))
                .collect();
            horner(&dfx, b, p)
        }
        ProjectiveRoot::Infinity => {
            if r[0] != 0 {
                return Err(not_a_root(p, root));
            }
            r[1]
        }
    };
    if slope == 0 {
        return Err(Error::MultipleRoot {
            p: p.to_string(),
            root: root.to_string(),
        });
    }
    let label = DescentLabel::new(p, root);
    let pp = BigInt::from(p);
    let g = f
        .apply_matrix(&label.matrix())
        .div_exact(&pp)
        .ok_or_else(|| Error::internal(format!("quotient at {p}:{root} is not integral")))?;
    check_residual(&g, p, slope)?;
    check_scaling(f, &g, p)?;
    Ok(g)
}

fn not_a_root(p: u64, root: ProjectiveRoot) -> Error {
    Error::NotARoot {
        p: p.to_string(),
        root: root.to_string(),
    }
}

fn horner(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter()
        .rev()
        .fold(0, |acc, &c| (arith::mul_mod(acc, x, p) + c) % p)
}

/// `G = y^3 L(x, y) mod p` with the `x`-coefficient of `L` equal to `slope`.
fn check_residual(g: &BinaryQuarticForm, p: u64, slope: u64) -> Result<()> {
    let r = modp::reduce_unchecked(g, p);
    if r[0] != 0 || r[1] != 0 || r[2] != 0 || r[3] != slope {
        return Err(Error::internal(format!(
            "quotient {g} is not y^3 L mod {p} with slope {slope}"
        )));
    }
    Ok(())
}

fn check_scaling(f: &BinaryQuarticForm, g: &BinaryQuarticForm, p: u64) -> Result<()> {
    let (fi, fj) = forms::ij(f);
    let (gi, gj) = forms::ij(g);
    let pp = BigInt::from(p);
    let p2 = &pp * &pp;
    let p3 = &p2 * &pp;
    if gi != fi * &p2 || gj != fj * &p3 {
        return Err(Error::internal(format!("invariants of {g} do not scale by p^2, p^3")));
    }
    Ok(())
}

/// The four quotients of a form split mod `p`, in root order.
pub fn descend_all(f: &BinaryQuarticForm, p: u64) -> Result<Vec<(ProjectiveRoot, BinaryQuarticForm)>> {
    let split = modp::splits_completely(f, p)?.ok_or_else(|| Error::NotSplit(p.to_string()))?;
    split
        .roots
        .iter()
        .map(|&root| Ok((root, descend_at(f, p, root)?)))
        .collect()
}

/// Descend at four distinct simple roots without the nonzero-root
/// normalisation. Descendants keep four simple roots mod every other family
/// prime, but a finite descent can move a root onto `0` while another sits
/// at infinity.
fn descend_all_simple(
    f: &BinaryQuarticForm,
    p: u64,
) -> Result<Vec<(ProjectiveRoot, BinaryQuarticForm)>> {
    let r = modp::reduce_unchecked(f, p);
    let roots = if r.iter().all(|&c| c == 0) {
        Vec::new()
    } else {
        modp::roots_residue(&r, p)
    };
    if roots.len() != 4 || roots.iter().any(|&(_, m)| m != 1) {
        return Err(Error::internal(format!(
            "descendant {f} lost four simple roots mod {p}"
        )));
    }
    roots
        .into_iter()
        .map(|(root, _)| Ok((root, descend_at(f, p, root)?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub index: usize,
    pub path: Vec<DescentLabel>,
    #[serde(rename = "coefficients")]
    pub form: BinaryQuarticForm,
    #[serde(flatten)]
    pub invariants: InvariantData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFamily {
    #[serde(with = "crate::serde_util::big")]
    pub h: BigInt,
    pub primes: [u64; 3],
    pub parent: BinaryQuarticForm,
    pub members: Vec<FamilyMember>,
}

/// Check `primes` for use with `h`: distinct primes above 4 not dividing `h`.
pub fn check_primes(primes: &[u64; 3], h: &BigInt) -> Result<()> {
    if h.is_zero() {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    for (k, &p) in primes.iter().enumerate() {
        if !arith::is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if p <= 4 {
            return Err(Error::PrimeOutOfRange {
                p: p.to_string(),
                reason: "family primes must exceed 4",
            });
        }
        if (h % BigInt::from(p)).is_zero() {
            return Err(Error::PrimeOutOfRange {
                p: p.to_string(),
                reason: "family primes must not divide h",
            });
        }
        if primes[..k].contains(&p) {
            return Err(Error::InvalidArgument(format!("prime {p} repeated")));
        }
    }
    Ok(())
}

/// Descend at `p1`, then `p2`, then `p3`; members are indexed by their
/// paths in lexicographic order (roots ascending, infinity last).
pub fn build_family(
    f: &BinaryQuarticForm,
    primes: [u64; 3],
    h: &BigInt,
    exec: Exec,
) -> Result<GFamily> {
    check_primes(&primes, h)?;
    if !forms::is_irreducible(f)? {
        return Err(Error::Reducible);
    }
    if !forms::stabilizer_is_trivial(f)? {
        return Err(Error::InvalidArgument(
            "parent form has a nontrivial stabilizer".into(),
        ));
    }
    for &p in &primes {
        if modp::splits_completely(f, p)?.is_none() {
            return Err(Error::NotSplit(p.to_string()));
        }
    }
    let mut level: Vec<(Vec<DescentLabel>, BinaryQuarticForm)> = vec![(Vec::new(), f.clone())];
    for (depth, &p) in primes.iter().enumerate() {
        let next = exec.map(level, |(path, g)| -> Result<Vec<_>> {
            let kids = if depth == 0 {
                descend_all(&g, p)?
            } else {
                descend_all_simple(&g, p)?
            };
            Ok(kids
                .into_iter()
                .map(|(root, child)| {
                    let mut path = path.clone();
                    path.push(DescentLabel::new(p, root));
                    (path, child)
                })
                .collect())
        });
        level = next
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
    }
    let parent_inv = forms::invariants(f)?;
    let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let q6 = num_traits::pow(q.clone(), 6);
    let members = exec.map(level.into_iter().enumerate().collect(), |(index, (path, g))| {
        let inv = forms::invariants(&g)?;
        if inv.d != &parent_inv.d * &q6
            || inv.h != &parent_inv.h * &q6
            || inv.i != &parent_inv.i * &q * &q
            || inv.j != &parent_inv.j * &q * &q * &q
        {
            return Err(Error::internal(format!("member {index} breaks invariant scaling")));
        }
        for &p in &primes {
            if arith::valuation(&inv.d, p) != Some(6) {
                return Err(Error::internal(format!(
                    "member {index}: {p}^6 does not exactly divide D"
                )));
            }
        }
        Ok(FamilyMember {
            index,
            path,
            form: g,
            invariants: inv,
        })
    });
    let members = members.into_iter().collect::<Result<Vec<_>>>()?;
    if members.len() != 64 {
        return Err(Error::internal(format!("family has {} members", members.len())));
    }
    Ok(GFamily {
        h: h.clone(),
        primes,
        parent: f.clone(),
        members,
    })
}

pub type Point = (BigInt, BigInt);

fn is_primitive_point((x, y): &Point) -> bool {
    x.gcd(y).is_one()
}

/// One step up: a point of the quotient at `label` to the point of the
/// form it was taken from.
pub fn push_step(label: &DescentLabel, (x, y): &Point) -> Point {
    let p = BigInt::from(label.p);
    match label.root {
        ProjectiveRoot::Finite(b) => (&p * x + BigInt::from(b) * y, y.clone()),
        ProjectiveRoot::Infinity => (y.clone(), &p * x),
    }
}

/// Map a primitive solution of the member at `path` to the parent:
/// the last descent is undone first.
pub fn push_solution(path: &[DescentLabel], pt: &Point) -> Result<Point> {
    if !is_primitive_point(pt) {
        return Err(Error::InvalidArgument(format!(
            "({}, {}) is not primitive",
            pt.0, pt.1
        )));
    }
    Ok(path.iter().rev().fold(pt.clone(), |acc, l| push_step(l, &acc)))
}

/// Inverse of one descent step: the unique root of `F mod p` through which
/// `(x, y)` passes, and the corresponding point of that quotient.
pub fn lift_solution(f: &BinaryQuarticForm, p: u64, pt: &Point) -> Result<(DescentLabel, Point)> {
    if !is_primitive_point(pt) {
        return Err(Error::InvalidArgument(format!(
            "({}, {}) is not primitive",
            pt.0, pt.1
        )));
    }
    let (x, y) = pt;
    let pp = BigInt::from(p);
    if !(f.eval(x, y) % &pp).is_zero() {
        return Err(Error::InvalidArgument(format!(
            "{p} does not divide F({x}, {y})"
        )));
    }
    if (y % &pp).is_zero() {
        let label = DescentLabel::new(p, ProjectiveRoot::Infinity);
        return Ok((label, (y / &pp, x.clone())));
    }
    let yi = arith::inv_mod(arith::residue(y, p), p);
    let b = arith::mul_mod(arith::residue(x, p), yi, p);
    let bb = BigInt::from(b);
    let diff: BigInt = x - &bb * y;
    let label = DescentLabel::new(p, ProjectiveRoot::Finite(b));
    Ok((label, (diff / &pp, y.clone())))
}

/// Lift through `primes` in order, returning the path taken and the point
/// on the final quotient.
pub fn lift_through(
    f: &BinaryQuarticForm,
    primes: &[u64],
    pt: &Point,
) -> Result<(Vec<DescentLabel>, Point)> {
    let mut form = f.clone();
    let mut cur = pt.clone();
    let mut path = Vec::new();
    for &p in primes {
        let (label, next) = lift_solution(&form, p, &cur)?;
        form = descend_at(&form, p, label.root)?;
        path.push(label);
        cur = next;
    }
    Ok((path, cur))
}

/// `max(|x|, |y|)`.
pub fn sup_norm((x, y): &Point) -> BigInt {
    x.abs().max(y.abs())
}
