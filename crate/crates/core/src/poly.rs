//! Exact univariate tools over Z and Q: evaluation, Sturm sequences, real
//! root isolation and refinement, and rational-root recovery.
//!
//! Polynomials are coefficient vectors in ascending degree order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntPoly = Vec<BigInt>;
type RatPoly = Vec<BigRational>;

pub fn trim_int(mut p: IntPoly) -> IntPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn trim_rat(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Sign of `p(x)` at a rational point, computed from the homogenised
/// integer value `sum c_i u^i v^(n-i)` with `v > 0`.
pub fn sign_at(p: &[BigInt], x: &BigRational) -> i8 {
    let (u, v) = (x.numer(), x.denom());
    let n = p.len();
    if n == 0 {
        return 0;
    }
    let mut acc = BigInt::zero();
    let mut vpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * u + c * &vpow;
        vpow *= v;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn to_rat(p: &[BigInt]) -> RatPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn derivative(p: &[BigInt]) -> IntPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn rat_rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut r = trim_rat(a.clone());
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let q = &r[dr] / lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &q * bc;
            r[dr - db + i] -= t;
        }
        r.pop();
        r = trim_rat(r);
    }
    r
}

fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut a, mut b) = (trim_rat(a.clone()), trim_rat(b.clone()));
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn rat_div_exact(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let da = r.len() - 1;
    let mut q = vec![BigRational::zero(); da - db + 1];
    for k in (0..=da - db).rev() {
        let c = &r[k + db] / &b[db];
        for i in 0..=db {
            let t = &c * &b[i];
            r[k + i] -= t;
        }
        q[k] = c;
    }
    q
}

/// Primitive integer polynomial with the same roots as `p`, each simple.
pub fn squarefree_part(p: &[BigInt]) -> IntPoly {
    let p = trim_int(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return p;
    }
    let pr = to_rat(&p);
    let g = rat_gcd(&pr, &to_rat(&derivative(&p)));
    let sf = if g.len() <= 1 {
        pr
    } else {
        rat_div_exact(&pr, &g)
    };
    primitive_from_rat(&sf)
}

fn primitive_from_rat(p: &RatPoly) -> IntPoly {
    let l = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: IntPoly = p.iter().map(|c| (c * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Sturm sequence of a squarefree polynomial.
pub struct Sturm {
    seq: Vec<RatPoly>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let p0 = to_rat(&trim_int(p.to_vec()));
        let mut seq = vec![p0.clone()];
        if p0.len() > 1 {
            let p1 = to_rat(&derivative(&trim_int(p.to_vec())));
            seq.push(p1);
            loop {
                let n = seq.len();
                let r = rat_rem(&seq[n - 2], &seq[n - 1]);
                if r.is_empty() {
                    break;
                }
                seq.push(r.into_iter().map(|c| -c).collect());
            }
        }
        Sturm { seq }
    }

    fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        Self::variations(self.seq.iter().map(|q| rat_sign_at(q, x)))
    }

    /// Variations at `+inf` (`positive = true`) or `-inf`.
    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|q| {
            let lead = q.last().map_or(0, |c| if c.is_positive() { 1 } else { -1 });
            let odd = (q.len().saturating_sub(1)) % 2 == 1;
            if !positive && odd {
                -lead
            } else {
                lead
            }
        }))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

fn rat_sign_at(p: &RatPoly, x: &BigRational) -> i8 {
    let v = p
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &[BigInt]) -> usize {
    let p = trim_int(p.to_vec());
    match degree(&p) {
        None | Some(0) => 0,
        _ => Sturm::new(&squarefree_part(&p)).count_real(),
    }
}

/// A real root located either exactly or inside an open interval whose
/// endpoints are not roots and carry opposite signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLoc {
    Exact(BigRational),
    Between(BigRational, BigRational),
}

impl RootLoc {
    pub fn lo(&self) -> &BigRational {
        match self {
            RootLoc::Exact(r) => r,
            RootLoc::Between(lo, _) => lo,
        }
    }
    pub fn hi(&self) -> &BigRational {
        match self {
            RootLoc::Exact(r) => r,
            RootLoc::Between(_, hi) => hi,
        }
    }
    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }
}

/// Power of two strictly above every root modulus (Cauchy bound).
pub fn root_bound(p: &[BigInt]) -> BigRational {
    let p = trim_int(p.to_vec());
    let n = p.len() - 1;
    let lead = p[n].abs();
    let m = p[..n].iter().map(|c| c.abs()).max().unwrap_or_default();
    let bound = BigRational::new(m, lead) + BigRational::one();
    let mut b = BigRational::one();
    while b <= bound {
        b *= BigInt::from(2);
    }
    b
}

/// Isolate every real root of `p` (any polynomial of degree >= 1), sorted.
pub fn isolate_real_roots(p: &[BigInt]) -> Vec<RootLoc> {
    let p = trim_int(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = squarefree_part(&p);
    let sturm = Sturm::new(&sf);
    let b = root_bound(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            if sign_at(&sf, &hi) == 0 {
                out.push(RootLoc::Exact(hi));
                continue;
            }
            if sign_at(&sf, &lo) != 0 {
                out.push(RootLoc::Between(lo, hi));
                continue;
            }
        }
        let mid = (&lo + &hi) / &two;
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.lo().cmp(b.lo()));
    out
}

/// Bisect an isolating interval of the squarefree polynomial `sf` until its
/// width is at most `width`.
pub fn refine(sf: &[BigInt], loc: RootLoc, width: &BigRational) -> RootLoc {
    let (mut lo, mut hi) = match loc {
        RootLoc::Exact(r) => return RootLoc::Exact(r),
        RootLoc::Between(lo, hi) => (lo, hi),
    };
    let two = BigRational::from_integer(BigInt::from(2));
    let slo = sign_at(sf, &lo);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let s = sign_at(sf, &mid);
        if s == 0 {
            return RootLoc::Exact(mid);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootLoc::Between(lo, hi)
}

/// Continued-fraction convergents of a rational number.
pub fn convergents(x: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        num = std::mem::replace(&mut den, r);
    }
    out
}

/// All rational roots of an integer polynomial, sorted, without factoring
/// any coefficient: each real root is refined until any rational root with
/// denominator dividing the leading coefficient must be a convergent of the
/// interval midpoint (Legendre), and the candidates are checked exactly.
pub fn rational_roots(p: &[BigInt]) -> Vec<BigRational> {
    let p = trim_int(p.to_vec());
    let Some(d) = degree(&p) else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let sf = squarefree_part(&p);
    let lead = sf.last().expect("nonzero").abs();
    let width = BigRational::new(BigInt::one(), BigInt::from(4) * &lead * &lead);
    let mut out = Vec::new();
    for loc in isolate_real_roots(&sf) {
        match refine(&sf, loc, &width) {
            RootLoc::Exact(r) => out.push(r),
            RootLoc::Between(lo, hi) => {
                let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
                for c in convergents(&mid) {
                    if c.denom() > &lead {
                        break;
                    }
                    if c > lo && c < hi && sign_at(&sf, &c) == 0 {
                        out.push(c);
                        break;
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Integer multiplication of polynomials.
pub fn mul_int(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_int(out)
}
