//! Local densities of the shapes used in the construction, their
//! enumeration over `F_p`, and an enclosure of the product `mu`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::descent;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::modp::{self, ResidueForm};

/// Enumeration of `p^5` vectors is allowed up to here.
pub const BRUTE_FORCE_MAX_P: u64 = 13;

/// Digits kept when the exact partial product over large primes is
/// rounded outward.
pub const LAMBDA_DIGITS: usize = 60;

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn require_prime(p: u64) -> Result<()> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Density of forms splitting into four distinct linear factors mod `p`
/// (infinity and `0` not both roots).
pub fn sigma(p: u64) -> Result<BigRational> {
    require_prime(p)?;
    if p < 5 {
        return Err(Error::PrimeOutOfRange {
            p: p.to_string(),
            reason: "sigma needs p >= 5",
        });
    }
    let p = BigInt::from(p);
    let num = (&p - 1u32) * (&p - 1u32) * (&p + 4u32) * (&p - 2u32) * (&p - 3u32);
    Ok(rat(num, 24u32 * num_traits::pow(p, 5)))
}

/// Density of `L1 L2^3` mod 2.
pub fn delta2() -> BigRational {
    rat(3, 16)
}

/// One minus the density of `c L1^2 L2^2` and `c L^4` mod `p`.
pub fn lambda(p: u64) -> Result<BigRational> {
    require_prime(p)?;
    let (n, d) = lambda_parts(p);
    Ok(rat(n, d))
}

/// Numerator and denominator `2 p^5` of `lambda(p)`, unreduced.
fn lambda_parts(p: u64) -> (BigInt, BigInt) {
    let p = BigInt::from(p);
    let p5 = num_traits::pow(p.clone(), 5);
    let sq = &p * &p - 1u32;
    let num = 2u32 * &p5 - &sq * &p - 2u32 * &sq;
    (num, 2u32 * p5)
}

/// Density of `L1 L2^3` with independent factors mod an odd prime.
pub fn gamma(p: u64) -> Result<BigRational> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::PrimeOutOfRange {
            p: "2".into(),
            reason: "the density at 2 is delta2",
        });
    }
    let p = BigInt::from(p);
    Ok(rat((&p + 1u32) * &p * (&p - 1u32), num_traits::pow(p, 5)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Split,
    SquareClass,
    SplitSquareClass,
    L1L2Cubed,
}

impl Shape {
    pub fn holds(self, r: &ResidueForm, p: u64) -> bool {
        match self {
            Shape::Split => modp::split_residue(r, p).is_some(),
            Shape::SquareClass => modp::square_class_residue(r, p),
            Shape::SplitSquareClass => modp::split_square_class_residue(r, p),
            Shape::L1L2Cubed => modp::l1_l2_cubed_residue(r, p).is_some(),
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" | "splits_completely" => Ok(Shape::Split),
            "square_class" | "square-class" => Ok(Shape::SquareClass),
            "split_square_class" | "split-square-class" => Ok(Shape::SplitSquareClass),
            "l1l2cubed" | "l1_l2_cubed" | "L1L2^3" => Ok(Shape::L1L2Cubed),
            other => Err(Error::Parse(format!("unknown shape {other:?}"))),
        }
    }
}

/// `#{r in F_p^5 : shape(r)} / p^5`, counted over every coefficient vector.
pub fn brute_force_density(p: u64, shape: Shape, exec: Exec) -> Result<BigRational> {
    require_prime(p)?;
    if p > BRUTE_FORCE_MAX_P {
        return Err(Error::BudgetExceeded(format!(
            "enumerating {p}^5 vectors (limit p <= {BRUTE_FORCE_MAX_P})"
        )));
    }
    let total = p.pow(5);
    let hits = exec.count_range(0..total, |idx| {
        let mut r = [0u64; 5];
        let mut k = idx;
        for slot in r.iter_mut() {
            *slot = k % p;
            k /= p;
        }
        shape.holds(&r, p)
    });
    Ok(rat(hits, total))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityInterval {
    #[serde(with = "crate::serde_util::rational")]
    pub lower: BigRational,
    #[serde(with = "crate::serde_util::rational")]
    pub upper: BigRational,
}

impl DensityInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        self.lower <= *x && *x <= self.upper
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuBound {
    pub primes: [u64; 3],
    pub cutoff: u64,
    #[serde(with = "crate::serde_util::rational")]
    pub prefactor: BigRational,
    #[serde(with = "crate::serde_util::rational")]
    pub delta2: BigRational,
    #[serde(with = "crate::serde_util::rational")]
    pub sigma_product: BigRational,
    /// Primes carrying the `L1 L2^3` factor.
    pub gamma_primes: Vec<u64>,
    #[serde(with = "crate::serde_util::rational")]
    pub gamma_product: BigRational,
    /// Number of primes in `[53, cutoff]` whose factor was multiplied exactly.
    pub lambda_count: usize,
    /// Exact partial product, rounded outward to `LAMBDA_DIGITS` digits.
    pub lambda_partial: DensityInterval,
    /// Lower bound for the product over primes beyond the cutoff.
    #[serde(with = "crate::serde_util::rational")]
    pub tail_lower: BigRational,
    pub mu: DensityInterval,
}

/// Lower and upper bounds for
/// `12 / (p1 p2 p3)^5 * delta2 * prod sigma(p_i) * prod lambda(p) * prod gamma(q)`,
/// with `lambda` over primes `p >= 53` outside `P` not dividing `h`, and
/// `gamma` over odd primes `q` outside `P` with `q < 49` or `q | h`.
pub fn mu_lower_bound(h: &BigInt, primes: [u64; 3], cutoff: u64, exec: Exec) -> Result<MuBound> {
    descent::check_primes(&primes, h)?;
    if cutoff < 49 {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} is below 49")));
    }
    let fac = arith::factor(&arith::magnitude(h), 1_000_000);
    if fac.cofactor.is_some() {
        return Err(Error::BudgetExceeded(format!("could not factor h = {h}")));
    }
    let h_primes: Vec<u64> = fac
        .primes
        .keys()
        .map(|p| p.to_u64().ok_or_else(|| Error::InvalidArgument(format!("prime {p} of h too large"))))
        .collect::<Result<_>>()?;

    let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let prefactor = rat(12, num_traits::pow(q, 5));
    let mut sigma_product = BigRational::one();
    for &p in &primes {
        sigma_product *= sigma(p)?;
    }
    let mut gamma_primes: Vec<u64> = arith::primes_up_to(48)
        .into_iter()
        .chain(h_primes.iter().copied())
        .filter(|&p| p != 2 && !primes.contains(&p))
        .collect();
    gamma_primes.sort_unstable();
    gamma_primes.dedup();
    let mut gamma_product = BigRational::one();
    for &p in &gamma_primes {
        gamma_product *= gamma(p)?;
    }

    let lambda_primes: Vec<u64> = arith::primes_up_to(cutoff)
        .into_iter()
        .filter(|p| *p >= 49 && !primes.contains(p) && !h_primes.contains(p))
        .collect();
    let lambda_count = lambda_primes.len();
    let (num, den) = product_tree(exec.map(lambda_primes, lambda_parts), exec);
    let scale = num_traits::pow(BigInt::from(10), LAMBDA_DIGITS);
    let (fl, rem) = (&num * &scale).div_rem(&den);
    let ce = if rem.is_zero() { fl.clone() } else { &fl + 1u32 };
    let lambda_partial = DensityInterval {
        lower: rat(fl, scale.clone()),
        upper: rat(ce, scale),
    };
    let c = BigInt::from(cutoff);
    let tail_lower = BigRational::one() - rat(1, 2u32 * &c) - rat(1, 2u32 * &c * &c);

    let fixed = &prefactor * delta2() * &sigma_product * &gamma_product;
    let mu = DensityInterval {
        lower: &fixed * &lambda_partial.lower * &tail_lower,
        upper: &fixed * &lambda_partial.upper,
    };
    if !(mu.lower.is_positive() && mu.lower <= mu.upper && mu.upper < BigRational::one()) {
        return Err(Error::internal("density enclosure out of order"));
    }
    Ok(MuBound {
        primes,
        cutoff,
        prefactor,
        delta2: delta2(),
        sigma_product,
        gamma_primes,
        gamma_product,
        lambda_count,
        lambda_partial,
        tail_lower,
        mu,
    })
}

/// Products of numerators and of denominators, by balanced halving.
fn product_tree(mut items: Vec<(BigInt, BigInt)>, exec: Exec) -> (BigInt, BigInt) {
    if items.is_empty() {
        return (BigInt::one(), BigInt::one());
    }
    while items.len() > 1 {
        let mut pairs = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            pairs.push((a, it.next()));
        }
        items = exec.map(pairs, |(a, b)| match b {
            Some(b) => (a.0 * b.0, a.1 * b.1),
            None => a,
        });
    }
    items.pop().expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn closed_forms() {
        assert_eq!(sigma(5).unwrap(), r(36, 3125));
        assert_eq!(sigma(7).unwrap(), r(330, 16807));
        assert_eq!(4 * 4 * 9 * 3 * 2, 24 * 36);
        assert!(matches!(sigma(3), Err(Error::PrimeOutOfRange { .. })));
        assert!(matches!(sigma(9), Err(Error::NotPrime(_))));
        assert_eq!(delta2(), r(3, 16));
        assert_eq!(BigRational::one() - delta2(), r(13, 16));
        assert_eq!(lambda(5).unwrap(), r(3041, 3125));
        let p = BigInt::from(53);
        let p5 = num_traits::pow(p.clone(), 5);
        let expected = BigRational::one()
            - BigRational::new(BigInt::from(52 * 54 * 53), 2 * &p5)
            - BigRational::new(BigInt::from(52 * 54), p5);
        assert_eq!(lambda(53).unwrap(), expected);
        assert_eq!(gamma(3).unwrap(), r(8, 81));
        assert_eq!(gamma(5).unwrap(), r(24, 625));
        assert!(matches!(gamma(2), Err(Error::PrimeOutOfRange { .. })));
    }

    #[test]
    fn enumeration_matches_closed_forms() {
        let exec = Exec::Parallel;
        assert_eq!(brute_force_density(2, Shape::L1L2Cubed, exec).unwrap(), delta2());
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(brute_force_density(p, Shape::L1L2Cubed, exec).unwrap(), gamma(p).unwrap(), "gamma({p})");
        }
        for p in [2u64, 3, 5, 7, 11, 13] {
            let split_sq = brute_force_density(p, Shape::SplitSquareClass, exec).unwrap();
            assert_eq!(BigRational::one() - split_sq, lambda(p).unwrap(), "lambda({p})");
        }
        for p in [5u64, 7, 11, 13] {
            assert_eq!(brute_force_density(p, Shape::Split, exec).unwrap(), sigma(p).unwrap(), "sigma({p})");
        }
        assert_eq!(brute_force_density(5, Shape::SplitSquareClass, exec).unwrap(), r(84, 3125));
        // c M^2 with M irreducible as well: (p - 1)(p^2 + p + 1)
        assert_eq!(brute_force_density(5, Shape::SquareClass, exec).unwrap(), r(124, 3125));
        assert!(matches!(brute_force_density(17, Shape::Split, exec), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn lambda_increases() {
        let mut prev = lambda(5).unwrap();
        for p in arith::primes_up_to(2000).into_iter().filter(|&p| p > 5) {
            let l = lambda(p).unwrap();
            assert!(l > prev);
            let pp = BigInt::from(p);
            let floor = BigRational::one()
                - BigRational::new(BigInt::one(), 2 * &pp * &pp)
                - BigRational::new(BigInt::one(), num_traits::pow(pp, 3));
            assert!(l >= floor);
            prev = l;
        }
    }

    #[test]
    fn mu_enclosure() {
        let one = BigInt::one();
        let m = mu_lower_bound(&one, [5, 7, 11], 1000, Exec::Parallel).unwrap();
        assert_eq!(m.prefactor, BigRational::new(BigInt::from(12), num_traits::pow(BigInt::from(385), 5)));
        assert_eq!(m.gamma_primes, vec![3, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(m.mu.lower.is_positive() && m.mu.lower <= m.mu.upper);
        let wide = mu_lower_bound(&one, [5, 7, 11], 200, Exec::Sequential).unwrap();
        let narrow = mu_lower_bound(&one, [5, 7, 11], 5000, Exec::Parallel).unwrap();
        assert!(narrow.mu.width() <= wide.mu.width());
        assert!(narrow.mu.lower >= wide.mu.lower);
        // the exact partial product sits inside its rounding
        let exact: BigRational = arith::primes_up_to(1000)
            .into_iter()
            .filter(|&p| p >= 53)
            .map(|p| lambda(p).unwrap())
            .product();
        assert!(m.lambda_partial.contains(&exact));
        // h = 53 moves 53 from the lambda product to the gamma product
        let h53 = mu_lower_bound(&BigInt::from(53), [5, 7, 11], 1000, Exec::Sequential).unwrap();
        assert!(h53.gamma_primes.contains(&53));
        assert_eq!(h53.lambda_count + 1, m.lambda_count);
        assert!(mu_lower_bound(&one, [5, 7, 5], 1000, Exec::Sequential).is_err());
        assert!(mu_lower_bound(&one, [5, 7, 11], 30, Exec::Sequential).is_err());
        assert!(mu_lower_bound(&BigInt::from(5), [5, 7, 11], 100, Exec::Sequential).is_err());
    }
}
