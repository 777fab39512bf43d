//! Forms over `F_p`: projective roots with multiplicities, complete
//! splitting, and the square-class and `L1 L2^3` shape predicates.
//!
//! Every predicate has a residue-level variant taking `[u64; 5]` so that
//! exhaustive enumerations avoid big-integer work.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, inv_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::forms::BinaryQuarticForm;

/// Residues of `(a0, .., a4)` in `[0, p)`.
pub type ResidueForm = [u64; 5];

/// Above this size roots are found by gcd with `X^p - X` and equal-degree
/// splitting instead of by evaluation at every residue.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjectiveRoot {
    /// `(b : 1)`, the zero of `x - b y`.
    Finite(u64),
    /// `(1 : 0)`, the zero of `y`.
    Infinity,
}

impl ProjectiveRoot {
    /// The linear form vanishing here, as `(x-coefficient, y-coefficient)`.
    pub fn linear_form(self, p: u64) -> [u64; 2] {
        match self {
            ProjectiveRoot::Finite(b) => [1, (p - b % p) % p],
            ProjectiveRoot::Infinity => [0, 1],
        }
    }
}

impl fmt::Display for ProjectiveRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveRoot::Finite(b) => write!(f, "{b}"),
            ProjectiveRoot::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ProjectiveRoot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(ProjectiveRoot::Infinity),
            t => t
                .parse()
                .map(ProjectiveRoot::Finite)
                .map_err(|_| Error::Parse(format!("not a projective root: {s:?}"))),
        }
    }
}

impl Serialize for ProjectiveRoot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProjectiveRoot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A complete splitting `F = m0 * prod (x - b y)` or, with a root at
/// infinity, `F = m0 * y * prod (x - b y)` over the three finite roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitData {
    pub p: u64,
    pub m0: u64,
    /// Ascending, infinity last.
    pub roots: Vec<ProjectiveRoot>,
}

impl SplitData {
    /// Re-expand the factorisation.
    pub fn expand(&self) -> ResidueForm {
        let p = self.p;
        // descending coefficients in x, homogeneous
        let mut acc = vec![self.m0 % p];
        for r in &self.roots {
            let [lx, ly] = r.linear_form(p);
            let mut next = vec![0u64; acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i] = (next[i] + mul_mod(c, lx, p)) % p;
                next[i + 1] = (next[i + 1] + mul_mod(c, ly, p)) % p;
            }
            acc = next;
        }
        [acc[0], acc[1], acc[2], acc[3], acc[4]]
    }
}

fn check_prime(p: u64) -> Result<()> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

pub fn reduce_mod_p(f: &BinaryQuarticForm, p: u64) -> Result<ResidueForm> {
    check_prime(p)?;
    Ok(reduce_unchecked(f, p))
}

pub(crate) fn reduce_unchecked(f: &BinaryQuarticForm, p: u64) -> ResidueForm {
    std::array::from_fn(|i| arith::residue(f.a(i), p))
}

/// All projective roots with multiplicities, ascending with infinity last.
pub fn roots_mod_p(f: &BinaryQuarticForm, p: u64) -> Result<Vec<(ProjectiveRoot, u32)>> {
    let r = reduce_mod_p(f, p)?;
    if r.iter().all(|&c| c == 0) {
        return Err(Error::ZeroModP(p.to_string()));
    }
    Ok(roots_residue(&r, p))
}

/// Roots of a nonzero residue form.
pub fn roots_residue(r: &ResidueForm, p: u64) -> Vec<(ProjectiveRoot, u32)> {
    // F(X, 1) ascending; its degree drop is the multiplicity at infinity
    let f: Vec<u64> = r.iter().rev().copied().collect();
    let f = trim(f);
    let inf_mult = 4 - (f.len() as u32 - 1);
    let mut out: Vec<(ProjectiveRoot, u32)> = finite_roots(&f, p)
        .into_iter()
        .map(|b| (ProjectiveRoot::Finite(b), multiplicity(&f, b, p)))
        .collect();
    if inf_mult > 0 {
        out.push((ProjectiveRoot::Infinity, inf_mult));
    }
    out
}

/// Distinct roots in `F_p` of a nonzero polynomial (ascending coefficients),
/// sorted.
pub fn finite_roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = trim(f.iter().map(|c| c % p).collect());
    if f.len() <= 1 {
        return Vec::new();
    }
    let mut roots = if p <= EXHAUSTIVE_LIMIT {
        (0..p).filter(|&x| eval(&f, x, p) == 0).collect()
    } else {
        algebraic_roots(&f, p)
    };
    roots.sort_unstable();
    roots
}

fn multiplicity(f: &[u64], b: u64, p: u64) -> u32 {
    let mut q = f.to_vec();
    let mut m = 0;
    while q.len() > 1 {
        let (quot, rem) = div_linear(&q, b, p);
        if rem != 0 {
            break;
        }
        q = quot;
        m += 1;
    }
    m
}

/// Complete splitting with the nonzero-root constraint: when infinity is a
/// root, `0` may not be one.
pub fn splits_completely(f: &BinaryQuarticForm, p: u64) -> Result<Option<SplitData>> {
    check_prime(p)?;
    if p < 5 {
        return Err(Error::PrimeOutOfRange {
            p: p.to_string(),
            reason: "complete splitting needs p >= 5",
        });
    }
    Ok(split_residue(&reduce_unchecked(f, p), p))
}

pub fn split_residue(r: &ResidueForm, p: u64) -> Option<SplitData> {
    if r.iter().all(|&c| c == 0) {
        return None;
    }
    let roots = roots_residue(r, p);
    if roots.len() != 4 || roots.iter().any(|&(_, m)| m != 1) {
        return None;
    }
    let roots: Vec<ProjectiveRoot> = roots.into_iter().map(|(x, _)| x).collect();
    let has_inf = roots.contains(&ProjectiveRoot::Infinity);
    if has_inf && roots.contains(&ProjectiveRoot::Finite(0)) {
        return None;
    }
    let m0 = if has_inf { r[1] } else { r[0] };
    Some(SplitData { p, m0, roots })
}

/// `F = c M^2` for a quadratic `M` over `F_p` (irreducible `M` and
/// `M = L^2` included).
pub fn is_square_class(f: &BinaryQuarticForm, p: u64) -> Result<bool> {
    let r = reduce_mod_p(f, p)?;
    if r.iter().all(|&c| c == 0) {
        return Err(Error::ZeroModP(p.to_string()));
    }
    Ok(square_class_residue(&r, p))
}

pub fn square_class_residue(r: &ResidueForm, p: u64) -> bool {
    let [a0, a1, a2, a3, a4] = *r;
    if r.iter().all(|&c| c == 0) {
        return false;
    }
    if p == 2 {
        // squaring is additive in characteristic 2
        return a1 == 0 && a3 == 0;
    }
    if a0 == 0 {
        // M has no x^2 term, so F = y^2 (a2 x^2 + a3 x y + a4 y^2) with a
        // square quadratic
        return a1 == 0 && mul_mod(a3, a3, p) == mul_mod(4, mul_mod(a2, a4, p), p);
    }
    // monic: F / a0 = (X^2 + u X + v)^2
    let inv = inv_mod(a0, p);
    let [b, c, d, e] = [a1, a2, a3, a4].map(|x| mul_mod(x, inv, p));
    let inv2 = inv_mod(2, p);
    let u = mul_mod(b, inv2, p);
    let v = mul_mod((c + p - mul_mod(u, u, p)) % p, inv2, p);
    mul_mod(2, mul_mod(u, v, p), p) == d && mul_mod(v, v, p) == e
}

/// Square class whose `M` has a root over `F_p`: `c L1^2 L2^2` or `c L^4`.
pub fn is_split_square_class(f: &BinaryQuarticForm, p: u64) -> Result<bool> {
    let r = reduce_mod_p(f, p)?;
    if r.iter().all(|&c| c == 0) {
        return Err(Error::ZeroModP(p.to_string()));
    }
    Ok(split_square_class_residue(&r, p))
}

pub fn split_square_class_residue(r: &ResidueForm, p: u64) -> bool {
    square_class_residue(r, p) && !roots_residue(r, p).is_empty()
}

/// `F = L1 L2^3` with independent linear forms; returns `(L1, L2)` as
/// `(x-coefficient, y-coefficient)` pairs, the constant folded into `L1`.
pub fn is_l1_l2_cubed(f: &BinaryQuarticForm, p: u64) -> Result<Option<([u64; 2], [u64; 2])>> {
    check_prime(p)?;
    Ok(l1_l2_cubed_residue(&reduce_unchecked(f, p), p))
}

pub fn l1_l2_cubed_residue(r: &ResidueForm, p: u64) -> Option<([u64; 2], [u64; 2])> {
    if r.iter().all(|&c| c == 0) {
        return None;
    }
    let roots = roots_residue(r, p);
    if roots.len() != 2 {
        return None;
    }
    let (simple, triple) = match (roots[0], roots[1]) {
        ((a, 1), (b, 3)) => (a, b),
        ((a, 3), (b, 1)) => (b, a),
        _ => return None,
    };
    let l2 = triple.linear_form(p);
    let l1 = simple.linear_form(p);
    // leading constant: compare any nonzero coefficient of l1 * l2^3
    let unit = SplitData {
        p,
        m0: 1,
        roots: vec![simple, triple, triple, triple],
    }
    .expand();
    let k = (0..5).find(|&i| unit[i] != 0).expect("nonzero product");
    let c = mul_mod(r[k], inv_mod(unit[k], p), p);
    Some(([mul_mod(c, l1[0], p), mul_mod(c, l1[1], p)], l2))
}

// ---- polynomials over F_p, ascending coefficients ----

fn trim(mut f: Vec<u64>) -> Vec<u64> {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
    f
}

fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Synthetic division by `X - b`.
fn div_linear(f: &[u64], b: u64, p: u64) -> (Vec<u64>, u64) {
    let n = f.len() - 1;
    let mut q = vec![0u64; n];
    let mut carry = 0u64;
    for i in (0..=n).rev() {
        let v = (f[i] + mul_mod(carry, b, p)) % p;
        if i == 0 {
            return (q, v);
        }
        q[i - 1] = v;
        carry = v;
    }
    unreachable!()
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let q = mul_mod(r[dr], inv_lead, p);
        for i in 0..=dm {
            let t = mul_mod(q, m[i], p);
            r[dr - dm + i] = (r[dr - dm + i] + p - t) % p;
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(0);
        }
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().unwrap(), p);
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn sub_poly(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Roots via `gcd(f, X^p - X)` and deterministic equal-degree splitting
/// with `(X + a)^((p-1)/2) - 1`, `a = 0, 1, 2, ..`. Requires odd `p`.
fn algebraic_roots(f: &[u64], p: u64) -> Vec<u64> {
    let inv = inv_mod(*f.last().unwrap(), p);
    let monic: Vec<u64> = f.iter().map(|&c| mul_mod(c, inv, p)).collect();
    let xp = poly_powmod(&[0, 1], p, &monic, p);
    let g = poly_gcd(&monic, &sub_poly(&xp, &[0, 1], p), p);
    let mut out = Vec::new();
    split_linear(g, p, 0, &mut out);
    out
}

fn split_linear(g: Vec<u64>, p: u64, mut a: u64, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            // monic X + g0
            out.push((p - g[0]) % p);
            return;
        }
        _ => {}
    }
    loop {
        let h = poly_powmod(&[a % p, 1], (p - 1) / 2, &g, p);
        let d = poly_gcd(&g, &sub_poly(&h, &[1], p), p);
        a += 1;
        if d.len() > 1 && d.len() < g.len() {
            let (q, _) = poly_divmod(&g, &d, p);
            split_linear(d, p, a, out);
            split_linear(q, p, a, out);
            return;
        }
    }
}

fn poly_divmod(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], p);
    let mut q = vec![0u64; a.len().saturating_sub(dm)];
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = mul_mod(r[dr], inv_lead, p);
        q[dr - dm] = c;
        for i in 0..=dm {
            let t = mul_mod(c, m[i], p);
            r[dr - dm + i] = (r[dr - dm + i] + p - t) % p;
        }
        r.pop();
    }
    (trim(q), trim(r))
}

/// Square roots of `a` modulo an odd prime via Tonelli–Shanks; `None` for
/// non-residues.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}
