//! Solubility of `F(x, y) = h` over the reals and over `Z_p`, with
//! certificates that can be rechecked from the report alone.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::{self, BinaryQuarticForm};
use crate::modp::{self, ProjectiveRoot};
use crate::poly;

/// Primes at most this size are decided by exhaustive lifting; larger ones
/// by locating one smooth point mod `p`.
pub const TREE_PRIME_LIMIT: u64 = 200;

/// Live nodes allowed per level before the tree search gives up.
pub const NODE_BUDGET: usize = 1 << 20;

/// Every prime up to this bound is certified individually.
pub const SMALL_PRIME_BOUND: u64 = 49;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Soluble,
    Insoluble,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    Real,
    P(u64),
}

/// A point `p^t (x, y)` with `(x, y)` primitive, `F(x, y) = h / p^(4t)`
/// mod `p^k`, and the smaller partial derivative of valuation `v`, where
/// `k >= 2v + 1`. Hensel's lemma lifts it to a solution in `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselPoint {
    #[serde(with = "crate::serde_util::big")]
    pub x: BigInt,
    #[serde(with = "crate::serde_util::big")]
    pub y: BigInt,
    pub t: u32,
    pub k: u32,
    pub v: u32,
}

/// A point with `sign F(x, y) = sign h`; scaling by `(h / F(x, y))^(1/4)`
/// gives a real solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPoint {
    #[serde(with = "crate::serde_util::big")]
    pub x: BigInt,
    #[serde(with = "crate::serde_util::big")]
    pub y: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCertificate {
    pub place: Place,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hensel: Option<HenselPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub real_point: Option<RealPoint>,
    /// Deepest level explored (Insoluble: level at which every branch died).
    pub depth: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl LocalCertificate {
    /// Recheck a Soluble certificate against `F` and `h`.
    pub fn verify(&self, f: &BinaryQuarticForm, h: &BigInt) -> bool {
        match (self.place, self.verdict) {
            (Place::Real, Verdict::Soluble) => self.real_point.as_ref().is_some_and(|pt| {
                arith::sign_of(&f.eval(&pt.x, &pt.y)) == arith::sign_of(h)
            }),
            (Place::P(p), Verdict::Soluble) => self
                .hensel
                .as_ref()
                .is_some_and(|w| verify_hensel(f, h, p, w)),
            _ => true,
        }
    }
}

pub fn verify_hensel(f: &BinaryQuarticForm, h: &BigInt, p: u64, w: &HenselPoint) -> bool {
    let pp = BigInt::from(p);
    let scale = num_traits::pow(pp.clone(), 4 * w.t as usize);
    let primitive_mod_p = !(w.x.gcd(&w.y) % &pp).is_zero();
    if !(h % &scale).is_zero() || !primitive_mod_p {
        return false;
    }
    let target = h / &scale;
    let m = num_traits::pow(pp, w.k as usize);
    let ok_value = ((f.eval(&w.x, &w.y) - target) % &m).is_zero();
    let (fx, fy) = gradient(f, &w.x, &w.y);
    let v = min_valuation(&fx, &fy, p, w.k);
    ok_value && v == Some(w.v) && w.k > 2 * w.v
}

fn gradient(f: &BinaryQuarticForm, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
    let [a0, a1, a2, a3, a4] = f.coeffs();
    let (x2, y2) = (x * x, y * y);
    let (x3, y3) = (&x2 * x, &y2 * y);
    let xy = x * y;
    let fx = 4 * a0 * &x3 + 3 * a1 * &x2 * y + 2 * a2 * &xy * y + a3 * &y3;
    let fy = a1 * &x3 + 2 * a2 * &x2 * y + 3 * a3 * x * &y2 + 4 * a4 * &y3;
    (fx, fy)
}

/// `min(v_p(fx), v_p(fy))` if it is below `cap`.
fn min_valuation(fx: &BigInt, fy: &BigInt, p: u64, cap: u32) -> Option<u32> {
    let v = |n: &BigInt| arith::valuation(n, p).unwrap_or(u32::MAX);
    let m = v(fx).min(v(fy));
    (m < cap).then_some(m)
}

fn check_nondegenerate(f: &BinaryQuarticForm, h: &BigInt) -> Result<()> {
    if h.is_zero() {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    let (i, j) = forms::ij(f);
    if forms::discriminant(&i, &j)?.is_zero() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

/// Definite forms take only the sign of `a0`; anything with a real root
/// takes both signs.
pub fn soluble_over_r(f: &BinaryQuarticForm, h: &BigInt) -> Result<LocalCertificate> {
    check_nondegenerate(f, h)?;
    let sig = forms::real_signature(f)?;
    let want = arith::sign_of(h);
    let mut cert = LocalCertificate {
        place: Place::Real,
        verdict: Verdict::Insoluble,
        hensel: None,
        real_point: None,
        depth: 0,
        note: None,
    };
    let mut candidates = vec![(BigInt::one(), BigInt::zero()), (BigInt::zero(), BigInt::one())];
    if sig < 2 {
        // endpoints of an isolating interval straddle a simple root
        let fx = f.dehomogenize();
        if let Some(loc) = poly::isolate_real_roots(&fx).into_iter().next() {
            let (lo, hi) = match loc {
                poly::RootLoc::Exact(r) => around_exact(&fx, &r),
                poly::RootLoc::Between(lo, hi) => (lo, hi),
            };
            for r in [lo, hi] {
                candidates.push((r.numer().clone(), r.denom().clone()));
            }
        }
    }
    if let Some((x, y)) = candidates
        .into_iter()
        .find(|(x, y)| arith::sign_of(&f.eval(x, y)) == want)
    {
        cert.verdict = Verdict::Soluble;
        cert.real_point = Some(RealPoint { x, y });
    } else if sig < 2 {
        return Err(Error::internal("indefinite form attains only one sign"));
    }
    Ok(cert)
}

/// A symmetric interval around the rational root `r` holding no other root
/// and with non-root endpoints; `F` is squarefree, so the endpoint signs
/// differ.
fn around_exact(fx: &[BigInt], r: &BigRational) -> (BigRational, BigRational) {
    let sturm = poly::Sturm::new(&poly::squarefree_part(fx));
    let mut eps = BigRational::one();
    loop {
        let (lo, hi) = (r - &eps, r + &eps);
        if sturm.count_in(&lo, &hi) == 1 && poly::sign_at(fx, &lo) != 0 && poly::sign_at(fx, &hi) != 0 {
            return (lo, hi);
        }
        eps /= BigInt::from(2);
    }
}

pub fn default_depth(d: &BigInt, h: &BigInt, p: u64) -> u32 {
    let vd = arith::valuation(d, p).unwrap_or(0);
    let vh = arith::valuation(h, p).unwrap_or(0);
    let v16 = if p == 2 { 4 } else { 0 };
    2 * (vd + 4 * vh + v16) + 3
}

/// Decide `F(x, y) = h` over `Z_p`. `max_depth` defaults to
/// `2 (v_p(D) + 4 v_p(h) + v_p(16)) + 3`.
pub fn soluble_over_zp(
    f: &BinaryQuarticForm,
    h: &BigInt,
    p: u64,
    max_depth: Option<u32>,
) -> Result<LocalCertificate> {
    if !arith::is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    check_nondegenerate(f, h)?;
    let (i, j) = forms::ij(f);
    let d = forms::discriminant(&i, &j)?;
    let depth = max_depth.unwrap_or_else(|| default_depth(&d, h, p));
    let vh = arith::valuation(h, p).expect("h nonzero");
    let pp = BigInt::from(p);
    let mut overall = Verdict::Insoluble;
    let mut deepest = 0;
    let mut notes = Vec::new();
    for t in 0..=vh / 4 {
        let target = h / num_traits::pow(pp.clone(), 4 * t as usize);
        let outcome = if p <= TREE_PRIME_LIMIT {
            tree_search(f, &target, p, depth)
        } else {
            smooth_point(f, &target, p)
        };
        match outcome {
            Search::Found(mut w) => {
                w.t = t;
                return Ok(LocalCertificate {
                    place: Place::P(p),
                    verdict: Verdict::Soluble,
                    depth: w.k,
                    hensel: Some(w),
                    real_point: None,
                    note: None,
                });
            }
            Search::Exhausted(level) => deepest = deepest.max(level),
            Search::Open(level, why) => {
                overall = Verdict::Unknown;
                deepest = deepest.max(level);
                notes.push(format!("t={t}: {why}"));
            }
        }
    }
    Ok(LocalCertificate {
        place: Place::P(p),
        verdict: overall,
        hensel: None,
        real_point: None,
        depth: deepest,
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

enum Search {
    Found(HenselPoint),
    /// Every branch refuted by this level.
    Exhausted(u32),
    /// Live branches remain at this level.
    Open(u32, String),
}

/// Breadth-first lifting over primitive residue pairs.
fn tree_search(f: &BinaryQuarticForm, target: &BigInt, p: u64, max_depth: u32) -> Search {
    let pp = BigInt::from(p);
    let top = num_traits::pow(pp.clone(), max_depth as usize + 1);
    let coeffs: [BigInt; 5] = std::array::from_fn(|i| f.a(i).mod_floor(&top));
    let fr = BinaryQuarticForm::new(coeffs);
    let target = target.mod_floor(&top);
    let mut modulus = pp.clone();
    let mut level: Vec<(BigInt, BigInt)> = Vec::new();
    for x in 0..p {
        for y in 0..p {
            if x % p == 0 && y % p == 0 {
                continue;
            }
            let (bx, by) = (BigInt::from(x), BigInt::from(y));
            if ((fr.eval(&bx, &by) - &target) % &modulus).is_zero() {
                level.push((bx, by));
            }
        }
    }
    let mut k = 1u32;
    loop {
        if level.is_empty() {
            return Search::Exhausted(k);
        }
        for (x, y) in &level {
            let (fx, fy) = gradient(&fr, x, y);
            if let Some(v) = min_valuation(&fx, &fy, p, k) {
                if k > 2 * v {
                    return Search::Found(HenselPoint {
                        x: x.clone(),
                        y: y.clone(),
                        t: 0,
                        k,
                        v,
                    });
                }
            }
        }
        if k >= max_depth {
            return Search::Open(k, format!("{} live branches at depth {k}", level.len()));
        }
        let next_mod = &modulus * &pp;
        let mut next = Vec::new();
        for (x, y) in &level {
            for i in 0..p {
                let nx = x + &modulus * BigInt::from(i);
                for j in 0..p {
                    let ny = y + &modulus * BigInt::from(j);
                    if ((fr.eval(&nx, &ny) - &target) % &next_mod).is_zero() {
                        next.push((nx.clone(), ny));
                    }
                }
            }
            if next.len() > NODE_BUDGET {
                return Search::Open(k + 1, format!("node budget exceeded at depth {}", k + 1));
            }
        }
        level = next;
        modulus = next_mod;
        k += 1;
    }
}

/// For large `p`: a point mod `p` with `F = target` and nonzero gradient
/// lifts. With `p | target` the simple roots of `F mod p` are such points;
/// otherwise Euler's identity `x F_x + y F_y = 4F` makes every point
/// smooth, and points are found by root finding on `F(X, w) - target`.
fn smooth_point(f: &BinaryQuarticForm, target: &BigInt, p: u64) -> Search {
    let r = modp::reduce_unchecked(f, p);
    let t = arith::residue(target, p);
    let mut candidates: Vec<(u64, u64)> = Vec::new();
    if t == 0 {
        if r.iter().any(|&c| c != 0) {
            for (root, m) in modp::roots_residue(&r, p) {
                if m == 1 {
                    candidates.push(match root {
                        ProjectiveRoot::Finite(b) => (b, 1),
                        ProjectiveRoot::Infinity => (1, 0),
                    });
                }
            }
        }
    } else {
        for w in 1..=256u64.min(p - 1) {
            // F(X, w) - t, ascending in X
            let mut poly = vec![0u64; 5];
            let mut wp = 1u64;
            for i in 0..5 {
                poly[4 - i] = arith::mul_mod(r[i], wp, p);
                wp = arith::mul_mod(wp, w, p);
            }
            poly[0] = (poly[0] + p - t) % p;
            if let Some(&x) = modp::finite_roots(&poly, p).first() {
                candidates.push((x, w));
                break;
            }
        }
    }
    for (x, y) in candidates {
        let (bx, by) = (BigInt::from(x), BigInt::from(y));
        let ok = ((f.eval(&bx, &by) - target) % BigInt::from(p)).is_zero();
        let (fx, fy) = gradient(f, &bx, &by);
        if ok && min_valuation(&fx, &fy, p, 1) == Some(0) {
            return Search::Found(HenselPoint {
                x: bx,
                y: by,
                t: 0,
                k: 1,
                v: 0,
            });
        }
    }
    Search::Open(1, format!("no smooth point found mod {p}"))
}

/// `ceil(q + 1 - 2 g sqrt(q))`, exactly.
pub fn hasse_weil_min_points(q: u64, g: u64) -> i128 {
    let disc = 4u128 * (g as u128) * (g as u128) * q as u128;
    q as i128 + 1 - disc.sqrt() as i128
}

/// Odd `u` is a fourth power of a unit in `Z_2` iff `u = 1 mod 16`.
pub fn fourth_power_unit_2adic(u: &BigInt) -> Result<bool> {
    if u.is_even() {
        return Err(Error::InvalidArgument(format!("{u} is even")));
    }
    Ok(u.mod_floor(&BigInt::from(16)).is_one())
}

/// How the primes not individually certified are covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargePrimeArgument {
    /// Primes above the small bound dividing `2 h D` that were found.
    pub certified_primes: Vec<u64>,
    /// Product of the prime factors of `D` that were not isolated (or do
    /// not fit in 64 bits); `1` when `D` factored completely.
    #[serde(with = "crate::serde_util::big")]
    pub residual_part: BigInt,
    /// `gcd(residual_part, content(G6))`: `1` means no prime of the
    /// residual part is a square class for `F`.
    #[serde(with = "crate::serde_util::big")]
    pub residual_square_screen: BigInt,
    /// `gcd(residual_part, h)`.
    #[serde(with = "crate::serde_util::big")]
    pub residual_h_gcd: BigInt,
    /// Square-class test at every certified prime above the small bound
    /// that divides `D`.
    pub square_class_at: Vec<(u64, bool)>,
    /// Hasse–Weil lower bound for genus 3 at the first prime past the bound.
    pub hasse_weil_min_points_53: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub form: BinaryQuarticForm,
    #[serde(with = "crate::serde_util::big")]
    pub h: BigInt,
    pub certificates: Vec<LocalCertificate>,
    pub large_primes: LargePrimeArgument,
    pub locally_soluble_everywhere: Verdict,
}

/// Prime support of `D` split into individually usable primes and an
/// unfactored remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantSupport {
    pub primes: Vec<u64>,
    pub residual: BigUint,
}

pub const DEFAULT_RHO_BUDGET: u64 = 200_000;

pub fn discriminant_support(d: &BigInt, rho_budget: u64) -> DiscriminantSupport {
    let fac = arith::factor(&arith::magnitude(d), rho_budget);
    let mut primes = Vec::new();
    let mut residual = fac.cofactor.unwrap_or_else(BigUint::one);
    for (p, e) in fac.primes {
        match p.to_u64() {
            Some(small) => primes.push(small),
            None => residual *= num_traits::pow(p, e as usize),
        }
    }
    DiscriminantSupport { primes, residual }
}

pub fn local_everywhere(f: &BinaryQuarticForm, h: &BigInt, exec: Exec) -> Result<LocalReport> {
    let (i, j) = forms::ij(f);
    let d = forms::discriminant(&i, &j)?;
    let support = discriminant_support(&d, DEFAULT_RHO_BUDGET);
    local_everywhere_with(f, h, &support, exec)
}

/// As [`local_everywhere`], reusing a known prime support of `D` (for
/// descendants, whose discriminants differ by a known factor).
pub fn local_everywhere_with(
    f: &BinaryQuarticForm,
    h: &BigInt,
    support: &DiscriminantSupport,
    exec: Exec,
) -> Result<LocalReport> {
    check_nondegenerate(f, h)?;
    let c = f.content()?;
    if !c.is_one() {
        return Err(Error::NotPrimitive(c.to_string()));
    }
    if !forms::is_irreducible(f)? {
        return Err(Error::Reducible);
    }
    let (i, j) = forms::ij(f);
    let d = forms::discriminant(&i, &j)?;
    let mut places: Vec<u64> = arith::primes_up_to(SMALL_PRIME_BOUND);
    let h_primes: Vec<u64> = match h.abs().to_u64() {
        Some(hm) => arith::prime_factors_u64(hm).into_iter().map(|(p, _)| p).collect(),
        None => {
            let fac = arith::factor(&arith::magnitude(h), DEFAULT_RHO_BUDGET);
            if fac.cofactor.is_some() {
                return Err(Error::BudgetExceeded(format!("could not factor h = {h}")));
            }
            fac.primes
                .keys()
                .map(|p| {
                    p.to_u64()
                        .ok_or_else(|| Error::InvalidArgument(format!("prime {p} of h exceeds 64 bits")))
                })
                .collect::<Result<_>>()?
        }
    };
    let mut large: Vec<u64> = support
        .primes
        .iter()
        .chain(h_primes.iter())
        .copied()
        .filter(|&p| p > SMALL_PRIME_BOUND && (d.is_zero() || (&d % BigInt::from(p)).is_zero() || (h % BigInt::from(p)).is_zero()))
        .collect();
    large.sort_unstable();
    large.dedup();
    places.extend(large.iter().copied());

    let real = soluble_over_r(f, h)?;
    let padic = exec.map(places.clone(), |p| soluble_over_zp(f, h, p, None));
    let mut certificates = vec![real];
    for c in padic {
        certificates.push(c?);
    }

    let residual = BigInt::from(support.residual.clone());
    let g6 = forms::sextic_covariant(f)
        .iter()
        .fold(BigInt::zero(), |g, c| g.gcd(c));
    let square_class_at = large
        .iter()
        .filter(|&&p| (&d % BigInt::from(p)).is_zero())
        .map(|&p| Ok((p, modp::is_square_class(f, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let large_primes = LargePrimeArgument {
        certified_primes: large,
        residual_square_screen: residual.gcd(&g6),
        residual_h_gcd: residual.gcd(h),
        residual_part: residual,
        square_class_at,
        hasse_weil_min_points_53: hasse_weil_min_points(53, 3),
    };
    let residual_ok = large_primes.residual_square_screen.is_one() && large_primes.residual_h_gcd.is_one();
    let worst = certificates
        .iter()
        .map(|c| c.verdict)
        .max_by_key(|v| match v {
            Verdict::Soluble => 0,
            Verdict::Unknown => 1,
            Verdict::Insoluble => 2,
        })
        .unwrap_or(Verdict::Soluble);
    let summary = match worst {
        Verdict::Soluble if residual_ok => Verdict::Soluble,
        Verdict::Soluble => Verdict::Unknown,
        other => other,
    };
    Ok(LocalReport {
        form: f.clone(),
        h: h.clone(),
        certificates,
        large_primes,
        locally_soluble_everywhere: summary,
    })
}
