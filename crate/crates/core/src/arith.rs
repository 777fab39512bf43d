//! Integer helpers: primality, partial factorisation, valuations, modular
//! arithmetic on machine words.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo prime `p` (`a` nonzero mod `p`).
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primality of an arbitrary-size integer: exact below 2^64, Miller–Rabin
/// with 24 fixed prime bases above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'outer: for a in primes_up_to(89) {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Reduce to the canonical residue in `[0, p)`.
pub fn residue(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue below modulus")
}

/// Result of a budgeted factorisation: fully proven prime factors plus, if
/// the budget ran out, a composite cofactor that remains unsplit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub primes: BTreeMap<BigUint, u32>,
    pub cofactor: Option<BigUint>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }
}

/// Trial division to `10^4`, then Pollard–Brent with `rho_budget` total
/// iterations. Deterministic.
pub fn factor(n: &BigUint, rho_budget: u64) -> Factorization {
    let mut primes = BTreeMap::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Factorization {
            primes,
            cofactor: None,
        };
    }
    for p in primes_up_to(10_000) {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            *primes.entry(bp.clone()).or_insert(0) += 1;
        }
    }
    let mut pending = Vec::new();
    let mut unsplit: Option<BigUint> = None;
    if rest > BigUint::one() {
        pending.push(rest);
    }
    let mut budget = rho_budget;
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *primes.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(root) = perfect_power_root(&m) {
            // m = root^k; push k copies
            let mut t = m.clone();
            while (&t % &root).is_zero() {
                t /= &root;
                pending.push(root.clone());
            }
            continue;
        }
        match pollard_brent(&m, &mut budget) {
            Some(d) => {
                let other = &m / &d;
                pending.push(d);
                pending.push(other);
            }
            None => {
                unsplit = Some(match unsplit {
                    Some(u) => u * m,
                    None => m,
                });
            }
        }
    }
    Factorization {
        primes,
        cofactor: unsplit,
    }
}

fn perfect_power_root(m: &BigUint) -> Option<BigUint> {
    let bits = m.bits() as u32;
    for k in 2..=bits.max(2) {
        let r = m.nth_root(k);
        if r <= BigUint::one() {
            break;
        }
        if num_traits::pow(r.clone(), k as usize) == *m {
            return Some(r);
        }
    }
    None
}

fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut x;
        let mut ys;
        let m = 128u64;
        loop {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            let mut g = one.clone();
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                *budget = budget.saturating_sub(steps);
                g = q.gcd(n);
                k += steps;
                if g == *n {
                    // backtrack one step at a time
                    loop {
                        ys = f(&ys);
                        let diff = if x > ys { &x - &ys } else { &ys - &x };
                        g = diff.gcd(n);
                        if !g.is_one() {
                            break;
                        }
                    }
                }
                if *budget == 0 && g.is_one() {
                    return None;
                }
            }
            if !g.is_one() {
                if g != *n {
                    return Some(g);
                }
                break;
            }
            r *= 2;
        }
    }
    None
}

/// Factor a machine-word magnitude completely.
pub fn prime_factors_u64(n: u64) -> Vec<(u64, u32)> {
    let f = factor(&BigUint::from(n), u64::MAX);
    f.primes
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of u64"), e))
        .collect()
}

/// Unsigned magnitude of a signed integer.
pub fn magnitude(n: &BigInt) -> BigUint {
    n.abs().to_biguint().expect("nonnegative")
}

pub fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
