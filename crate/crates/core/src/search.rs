//! Primitive solutions of `F(x, y) = m` in a box, the a priori count bound
//! for `|F(x, y)| = m`, and the check that the descent tree matches
//! solutions of a parent with solutions of its 64 descendants.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::descent::{self, GFamily, Point};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::BinaryQuarticForm;
use crate::poly::{self, RootLoc};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub form: BinaryQuarticForm,
    #[serde(with = "crate::serde_util::big")]
    pub m: BigInt,
    pub bound: u64,
    #[serde(with = "point_vec")]
    pub solutions: Vec<Point>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, pt: &Point) -> bool {
        self.solutions.binary_search(pt).is_ok()
    }

    /// Every pair is primitive, in the box, solves the equation, and the
    /// list is strictly increasing.
    pub fn verify(&self) -> bool {
        let b = BigInt::from(self.bound);
        self.solutions.windows(2).all(|w| w[0] < w[1])
            && self.solutions.iter().all(|(x, y)| {
                x.abs() <= b && y.abs() <= b && x.gcd(y).is_one() && self.form.eval(x, y) == self.m
            })
    }
}

/// Exhaustive search over `|x|, |y| <= bound`. Any solution with `y != 0`
/// has `|F(x/y, 1)| = |m| / y^4 <= |m|`, so `x/y` lies in the sublevel set
/// `S = {t : |F(t, 1)| <= |m|}`; `S` is enclosed once by rational intervals
/// around the real roots of `F(t, 1)^2 - m^2`, and row `y` only scans `y S`.
/// `(-x, -y)` is added for every hit.
pub fn primitive_solutions_in_box(
    f: &BinaryQuarticForm,
    m: &BigInt,
    bound: u64,
    exec: Exec,
) -> Result<SolutionSet> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("m must be nonzero".into()));
    }
    if bound == 0 {
        return Err(Error::InvalidArgument("box bound must be at least 1".into()));
    }
    let cover = sublevel_cover(f, m, bound);
    let per_row = exec.map_range(0..bound + 1, |y| row_solutions(f, m, y, bound, cover.as_deref()));
    let mut solutions: Vec<Point> = Vec::new();
    for row in per_row {
        for (x, y) in row {
            if !y.is_zero() {
                solutions.push((-&x, -&y));
            }
            solutions.push((x, y));
        }
    }
    solutions.sort();
    solutions.dedup();
    Ok(SolutionSet {
        form: f.clone(),
        m: m.clone(),
        bound,
        solutions,
    })
}

type Interval = (BigRational, BigRational);

/// Closed rational intervals covering `{t : |f(t)| <= |m|}`, merged and
/// sorted; `None` when `F(t, 1)` is constant.
fn sublevel_cover(f: &BinaryQuarticForm, m: &BigInt, bound: u64) -> Option<Vec<Interval>> {
    let ft = f.dehomogenize();
    if poly::degree(&ft).unwrap_or(0) == 0 {
        return None;
    }
    let width = BigRational::new(BigInt::one(), BigInt::from(4 * bound));
    // the roots of f - m and f + m can nearly coincide, so each factor is
    // isolated on its own
    let mut roots: Vec<Interval> = Vec::new();
    for shift in [m.clone(), -m] {
        let mut h = ft.clone();
        h[0] -= &shift;
        let h = poly::trim_int(h);
        let sf = poly::squarefree_part(&h);
        roots.extend(poly::isolate_real_roots(&h).into_iter().map(|loc| {
            match poly::refine(&sf, loc, &width) {
                RootLoc::Exact(r) => (r.clone(), r),
                RootLoc::Between(lo, hi) => (lo, hi),
            }
        }));
    }
    let mut g = poly::mul_int(&ft, &ft);
    g[0] -= m * m;
    let g = poly::trim_int(g);
    let merged = merge(roots);
    // g has constant sign on each gap between the merged root intervals
    let mut pieces = merged.clone();
    for w in merged.windows(2) {
        let probe = (&w[0].1 + &w[1].0) / BigInt::from(2);
        if poly::sign_at(&g, &probe) <= 0 {
            pieces.push((w[0].1.clone(), w[1].0.clone()));
        }
    }
    Some(merge(pieces))
}

fn merge(mut pieces: Vec<Interval>) -> Vec<Interval> {
    pieces.sort();
    let mut merged: Vec<Interval> = Vec::new();
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

fn row_solutions(
    f: &BinaryQuarticForm,
    m: &BigInt,
    y: u64,
    bound: u64,
    cover: Option<&[Interval]>,
) -> Vec<Point> {
    let by = BigInt::from(y);
    if y == 0 {
        // only (1, 0) and (-1, 0) are primitive
        return if f.a(0) == m {
            vec![(BigInt::one(), BigInt::zero()), (-BigInt::one(), BigInt::zero())]
        } else {
            Vec::new()
        };
    }
    let b = BigInt::from(bound);
    let ranges: Vec<(BigInt, BigInt)> = match cover {
        None => vec![(-&b, b.clone())],
        Some(cover) => cover
            .iter()
            .map(|(lo, hi)| {
                let lo = (lo.numer() * &by).div_ceil(lo.denom()).max(-&b);
                let hi = (hi.numer() * &by).div_floor(hi.denom()).min(b.clone());
                (lo, hi)
            })
            .collect(),
    };
    let mut hits = Vec::new();
    for (lo, hi) in ranges {
        for x in num_iter(lo, hi) {
            if x.gcd(&by).is_one() && f.eval(&x, &by) == *m {
                hits.push((x, by.clone()));
            }
        }
    }
    hits
}

fn num_iter(lo: BigInt, hi: BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi {
        out.push(x.clone());
        x += 1;
    }
    out
}

fn check_epsilon(eps: &BigRational) -> Result<()> {
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    if eps.is_positive() && *eps < sixth {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(eps.to_string()))
    }
}

/// `36 - 16 i + ceil((4 - i) / (3 eps))`.
pub fn count_bound(signature_i: u8, eps: &BigRational) -> Result<i64> {
    check_epsilon(eps)?;
    if signature_i > 2 {
        return Err(Error::InvalidArgument(format!("signature {signature_i} not in 0..=2")));
    }
    let i = i64::from(signature_i);
    let frac = BigRational::from_integer(BigInt::from(4 - i)) / (eps * BigInt::from(3));
    let ceil = frac.ceil().to_integer().to_i64().ok_or_else(|| Error::internal("bound overflow"))?;
    Ok(36 - 16 * i + ceil)
}

/// `0 < m <= |D|^(1/6 - eps) / (3.5^2 4^(2/3))`, decided exactly: with
/// `1/6 - eps = r/s` this is `(49 m)^(3s) <= |D|^(3r) 4^s`.
pub fn bound_applicable(d: &BigInt, m: &BigInt, eps: &BigRational) -> Result<bool> {
    check_epsilon(eps)?;
    if !m.is_positive() {
        return Ok(false);
    }
    let e = BigRational::new(BigInt::one(), BigInt::from(6)) - eps;
    let r = e.numer().to_usize().ok_or_else(|| Error::internal("exponent overflow"))?;
    let s = e.denom().to_usize().ok_or_else(|| Error::internal("exponent overflow"))?;
    let lhs = num_traits::pow(BigInt::from(49) * m, 3 * s);
    let rhs = num_traits::pow(d.abs(), 3 * r) * num_traits::pow(BigInt::from(4), s);
    Ok(lhs <= rhs)
}

/// Solutions of `|F| = m` in the box: both signs of the right-hand side.
pub fn abs_solution_count(f: &BinaryQuarticForm, m: &BigInt, bound: u64, exec: Exec) -> Result<usize> {
    let plus = primitive_solutions_in_box(f, &m.abs(), bound, exec)?;
    let minus = primitive_solutions_in_box(f, &-m.abs(), bound, exec)?;
    Ok(plus.len() + minus.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedSolution {
    #[serde(with = "point")]
    pub parent: Point,
    pub member: usize,
    #[serde(with = "point")]
    pub lifted: Point,
    pub in_box: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEvent {
    pub member: usize,
    #[serde(with = "point")]
    pub member_point: Point,
    #[serde(with = "point")]
    pub parent_point: Point,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberSolutions {
    pub index: usize,
    #[serde(with = "point_vec")]
    pub direct: Vec<Point>,
    #[serde(with = "point_vec")]
    pub lifted: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub bound: u64,
    #[serde(with = "crate::serde_util::big")]
    pub m: BigInt,
    pub parent: SolutionSet,
    pub lifts: Vec<LiftedSolution>,
    pub members: Vec<MemberSolutions>,
    /// In-box member solutions whose image in the parent lies outside the box.
    pub boundary: Vec<BoundaryEvent>,
    pub mismatches: Vec<String>,
    pub injective: bool,
    /// `#parent solutions = sum over members of #lifted solutions`.
    pub counts_match: bool,
    /// Members with no primitive solution of `G_j = h` in the box.
    pub empty_members: Vec<usize>,
}

impl CorrespondenceReport {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty() && self.injective && self.counts_match
    }
}

pub fn verify_correspondence(family: &GFamily, bound: u64, exec: Exec) -> Result<CorrespondenceReport> {
    let q: u64 = family.primes.iter().product();
    let m = &family.h * BigInt::from(q);
    let parent = primitive_solutions_in_box(&family.parent, &m, bound, exec)?;
    let by_path: BTreeMap<_, usize> = family
        .members
        .iter()
        .map(|mem| (mem.path.clone(), mem.index))
        .collect();
    let b = BigInt::from(bound);
    let mut mismatches = Vec::new();

    let mut lifts = Vec::new();
    for pt in &parent.solutions {
        let (path, lifted) = descent::lift_through(&family.parent, &family.primes, pt)?;
        let member = by_path[&path];
        let g = &family.members[member].form;
        if g.eval(&lifted.0, &lifted.1) != family.h || !lifted.0.gcd(&lifted.1).is_one() {
            mismatches.push(format!(
                "({}, {}) lifts to ({}, {}) which does not solve member {member}",
                pt.0, pt.1, lifted.0, lifted.1
            ));
        }
        if descent::push_solution(&path, &lifted)? != *pt {
            mismatches.push(format!("({}, {}) does not return under push", pt.0, pt.1));
        }
        lifts.push(LiftedSolution {
            parent: pt.clone(),
            member,
            in_box: descent::sup_norm(&lifted) <= b,
            lifted,
        });
    }
    let distinct: BTreeSet<(usize, &Point)> = lifts.iter().map(|l| (l.member, &l.lifted)).collect();
    let injective = distinct.len() == lifts.len();

    let direct = exec.map(family.members.iter().collect(), |mem| {
        primitive_solutions_in_box(&mem.form, &family.h, bound, Exec::Sequential)
    });
    let mut members = Vec::new();
    let mut boundary = Vec::new();
    for (mem, set) in family.members.iter().zip(direct) {
        let set = set?;
        for pt in &set.solutions {
            let up = descent::push_solution(&mem.path, pt)?;
            if parent.contains(&up) {
                continue;
            }
            if descent::sup_norm(&up) > b {
                boundary.push(BoundaryEvent {
                    member: mem.index,
                    member_point: pt.clone(),
                    parent_point: up,
                });
            } else {
                mismatches.push(format!(
                    "member {} solution ({}, {}) pushes to ({}, {}) missing from the parent search",
                    mem.index, pt.0, pt.1, up.0, up.1
                ));
            }
        }
        let lifted: Vec<Point> = lifts
            .iter()
            .filter(|l| l.member == mem.index)
            .map(|l| l.lifted.clone())
            .collect();
        for l in lifts.iter().filter(|l| l.member == mem.index && l.in_box) {
            if !set.contains(&l.lifted) {
                mismatches.push(format!(
                    "lift ({}, {}) of member {} missing from its own search",
                    l.lifted.0, l.lifted.1, mem.index
                ));
            }
        }
        members.push(MemberSolutions {
            index: mem.index,
            direct: set.solutions,
            lifted,
        });
    }
    let counts_match = members.iter().map(|m| m.lifted.len()).sum::<usize>() == parent.len();
    let empty_members = members
        .iter()
        .filter(|m| m.direct.is_empty() && m.lifted.is_empty())
        .map(|m| m.index)
        .collect();
    Ok(CorrespondenceReport {
        bound,
        m,
        parent,
        lifts,
        members,
        boundary,
        mismatches,
        injective,
        counts_match,
        empty_members,
    })
}

mod point {
    use super::Point;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>((x, y): &Point, s: S) -> Result<S::Ok, S::Error> {
        [x.to_string(), y.to_string()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        let parse = |t: &str| t.parse().map_err(serde::de::Error::custom);
        Ok((parse(&x)?, parse(&y)?))
    }
}

mod point_vec {
    use super::Point;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Point], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(x, y)| [x.to_string(), y.to_string()])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point>, D::Error> {
        Vec::<[String; 2]>::deserialize(d)?
            .into_iter()
            .map(|[x, y]| {
                let parse = |t: &str| t.parse().map_err(serde::de::Error::custom);
                Ok((parse(&x)?, parse(&y)?))
            })
            .collect()
    }
}
