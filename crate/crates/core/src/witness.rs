//! End-to-end construction: a form `F` split at three primes with the
//! local shapes that make every descendant equation `G_j = h` soluble
//! everywhere locally, large enough for the count bound to apply to
//! `F = h p1 p2 p3`, followed by the family, local certificates and the box
//! search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::arith;
use crate::descent::{self, GFamily};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::{self, BinaryQuarticForm, InvariantData, MaximalityReport, StabilizerReport};
use crate::local::{self, LocalReport, Verdict};
use crate::modp::{self, SplitData};
use crate::search::{self, CorrespondenceReport, SolutionSet};

pub const SCHEMA: &str = "qhl.witness/1";
pub const MAX_ATTEMPTS: u32 = 64;
/// Odd primes below this bound carry the `L1 L2^3` shape.
pub const SHAPE_BOUND: u64 = 49;
pub const DEFAULT_BOX: u64 = 10_000;

pub fn default_epsilon() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(12))
}

/// The three smallest primes above 4 not dividing `h`.
pub fn choose_primes(h: &BigInt) -> Result<[u64; 3]> {
    if h.is_zero() {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    let mut out = Vec::with_capacity(3);
    let mut p = 5u64;
    while out.len() < 3 {
        if arith::is_prime_u64(p) && !(h % BigInt::from(p)).is_zero() {
            out.push(p);
        }
        p += 2;
    }
    Ok([out[0], out[1], out[2]])
}

/// `3.5^24 * 4^8 * (p1 p2 p3)^12 = 7^24 (p1 p2 p3)^12 / 2^8`.
pub fn discriminant_threshold(primes: &[u64; 3]) -> BigRational {
    let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    BigRational::new(
        num_traits::pow(BigInt::from(7), 24) * num_traits::pow(q, 12),
        BigInt::from(256),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetShape {
    Split,
    L1L2Cubed,
}

/// Coefficients of `F` prescribed modulo one prime or prime power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueTarget {
    pub modulus: u64,
    pub shape: TargetShape,
    pub residues: [u64; 5],
    /// `(x, y)` coefficients of `L1` and `L2` for the `L1 L2^3` shape.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub l1: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub l2: Option<[u64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSpec {
    #[serde(with = "crate::serde_util::big")]
    pub h: BigInt,
    pub primes: [u64; 3],
    #[serde(with = "crate::serde_util::big")]
    pub modulus: BigInt,
    pub targets: Vec<ResidueTarget>,
    pub leading_sign: i8,
    #[serde(with = "crate::serde_util::rational")]
    pub threshold: BigRational,
    #[serde(with = "crate::serde_util::rational")]
    pub epsilon: BigRational,
    pub seed: u64,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCheck {
    pub modulus: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareClassScreen {
    /// `gcd(content(G6), D)`: every prime at which `F` is `c M^2` divides it.
    #[serde(with = "crate::serde_util::big")]
    pub gcd: BigInt,
    pub fully_factored: bool,
    /// `(p, F is c M^2 mod p)` for each prime `p > 49` of the gcd.
    pub primes: Vec<(u64, bool)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChecks {
    #[serde(with = "crate::serde_util::big")]
    pub content: BigInt,
    pub primitive: bool,
    pub irreducible: bool,
    pub maximal: MaximalityReport,
    pub stabilizer: StabilizerReport,
    #[serde(with = "crate::serde_util::big")]
    pub discriminant: BigInt,
    pub discriminant_exceeds_threshold: bool,
    pub split: Vec<(u64, Option<SplitData>)>,
    pub shapes: Vec<ShapeCheck>,
    pub square_class_screen: SquareClassScreen,
    pub sign_matches_h: bool,
    pub bound_applicable: bool,
}

impl WitnessChecks {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut need = |ok: bool, name: &'static str| {
            if !ok {
                out.push(name);
            }
        };
        need(self.primitive, "primitive");
        need(self.irreducible, "irreducible");
        need(self.maximal.maximal, "maximal");
        need(self.stabilizer.trivial, "trivial stabilizer");
        need(self.discriminant_exceeds_threshold, "|D| > T");
        need(self.split.iter().all(|(_, s)| s.is_some()), "split at family primes");
        need(self.shapes.iter().all(|s| s.holds), "L1 L2^3 shapes");
        need(self.square_class_screen.passed, "no square class above 49");
        need(self.sign_matches_h, "sign of a0");
        need(self.bound_applicable, "count bound applicable");
        out
    }

    pub fn all_passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Moduli carrying the `L1 L2^3` shape: 16, the odd primes below 49
/// outside `P`, and every odd prime of `h`.
fn shape_moduli(h: &BigInt, primes: &[u64; 3]) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = arith::primes_up_to(SHAPE_BOUND)
        .into_iter()
        .filter(|&q| q != 2 && !primes.contains(&q))
        .collect();
    for q in prime_divisors(h)? {
        if q != 2 && !out.contains(&q) {
            out.push(q);
        }
    }
    out.sort_unstable();
    out.insert(0, 16);
    Ok(out)
}

fn prime_divisors(h: &BigInt) -> Result<Vec<u64>> {
    let fac = arith::factor(&arith::magnitude(h), 1_000_000);
    if fac.cofactor.is_some() {
        return Err(Error::BudgetExceeded(format!("could not factor h = {h}")));
    }
    fac.primes
        .keys()
        .map(|p| {
            p.to_u64()
                .ok_or_else(|| Error::InvalidArgument(format!("prime {p} of h exceeds 64 bits")))
        })
        .collect()
}

/// `L1 L2^3` mod `q` with coefficients of `x^4 .. y^4`.
fn l1_l2_cubed_coeffs(l1: [u64; 2], l2: [u64; 2], q: u64) -> [u64; 5] {
    let q = q as u128;
    let mul = |a: &[u128], l: [u64; 2]| -> Vec<u128> {
        let mut out = vec![0u128; a.len() + 1];
        for (i, &c) in a.iter().enumerate() {
            out[i] = (out[i] + c * l[0] as u128) % q;
            out[i + 1] = (out[i + 1] + c * l[1] as u128) % q;
        }
        out
    };
    let mut acc = vec![1u128];
    for l in [l1, l2, l2, l2] {
        acc = mul(&acc, l);
    }
    std::array::from_fn(|i| acc[i] as u64)
}

/// Some `L1, L2` over `Z/16` with odd determinant and `L1 L2^3 = F mod 16`.
pub fn l1_l2_cubed_mod16(f: &BinaryQuarticForm) -> Option<([u64; 2], [u64; 2])> {
    let target: [u64; 5] = std::array::from_fn(|i| f.a(i).mod_floor(&BigInt::from(16)).to_u64().unwrap());
    for a in 0..16 {
        for b in 0..16 {
            for c in 0..16 {
                for d in 0..16 {
                    if (a * d + 16 * 16 - b * c) % 2 == 0 {
                        continue;
                    }
                    if l1_l2_cubed_coeffs([a, b], [c, d], 16) == target {
                        return Some(([a, b], [c, d]));
                    }
                }
            }
        }
    }
    None
}

fn random_independent_pair(rng: &mut ChaCha8Rng, q: u64) -> ([u64; 2], [u64; 2]) {
    // determinant must be a unit: odd for 16, nonzero for a prime
    let unit_mod = if q == 16 { 2 } else { q };
    loop {
        let l1 = [rng.gen_range(0..q), rng.gen_range(0..q)];
        let l2 = [rng.gen_range(0..q), rng.gen_range(0..q)];
        let det = (l1[0] as u128 * l2[1] as u128 + (q as u128).pow(2) - l1[1] as u128 * l2[0] as u128) % unit_mod as u128;
        if det != 0 {
            return (l1, l2);
        }
    }
}

/// `(x - y)(x - 2y)(x - 3y)(x - 4y)`.
const SPLIT_PATTERN: [i64; 5] = [1, -10, 35, -50, 24];

fn crt(residues: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, n) in residues {
        let inv = m.extended_gcd(n).x.mod_floor(n);
        let t = ((r - &x) * inv).mod_floor(n);
        x += &m * t;
        m *= n;
    }
    (x.mod_floor(&m), m)
}

pub fn compute_checks(
    f: &BinaryQuarticForm,
    h: &BigInt,
    primes: &[u64; 3],
    eps: &BigRational,
) -> Result<WitnessChecks> {
    let content = f.content()?;
    let primitive = content.is_one();
    let irreducible = primitive && forms::is_irreducible(f)?;
    let (i, j) = forms::ij(f);
    let d = forms::discriminant(&i, &j)?;
    let maximal = forms::is_maximal(f)?;
    let stabilizer = if irreducible {
        forms::stabilizer(f)?
    } else {
        StabilizerReport {
            trivial: false,
            resolvent_roots: Vec::new(),
            elements: Vec::new(),
        }
    };
    let threshold = discriminant_threshold(primes);
    let discriminant_exceeds_threshold = BigRational::from_integer(d.abs()) > threshold;
    let split = primes
        .iter()
        .map(|&p| Ok((p, modp::splits_completely(f, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let shapes = shape_moduli(h, primes)?
        .into_iter()
        .map(|q| {
            let holds = if q == 16 {
                l1_l2_cubed_mod16(f).is_some()
            } else {
                modp::is_l1_l2_cubed(f, q)?.is_some()
            };
            Ok(ShapeCheck { modulus: q, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    let square_class_screen = square_class_screen(f, &d)?;
    let sign_matches_h = arith::sign_of(f.a(0)) == arith::sign_of(h);
    let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let bound_applicable = search::bound_applicable(&d, &(h.abs() * q), eps)?;
    Ok(WitnessChecks {
        content,
        primitive,
        irreducible,
        maximal,
        stabilizer,
        discriminant: d,
        discriminant_exceeds_threshold,
        split,
        shapes,
        square_class_screen,
        sign_matches_h,
        bound_applicable,
    })
}

fn square_class_screen(f: &BinaryQuarticForm, d: &BigInt) -> Result<SquareClassScreen> {
    let g6 = forms::sextic_covariant(f)
        .iter()
        .fold(BigInt::zero(), |g, c| g.gcd(c));
    let gcd = g6.gcd(d);
    let fac = arith::factor(&arith::magnitude(&gcd), 1_000_000);
    let fully_factored = fac.cofactor.is_none();
    let mut primes = Vec::new();
    for p in fac.primes.keys() {
        let Some(p) = p.to_u64() else {
            return Ok(SquareClassScreen {
                gcd,
                fully_factored,
                primes,
                passed: false,
            });
        };
        if p > SHAPE_BOUND {
            primes.push((p, modp::is_square_class(f, p)?));
        }
    }
    let passed = fully_factored && primes.iter().all(|&(_, sq)| !sq);
    Ok(SquareClassScreen {
        gcd,
        fully_factored,
        primes,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub spec: WitnessSpec,
    pub form: BinaryQuarticForm,
    pub checks: WitnessChecks,
}

/// CRT construction with seeded shapes and lifts, retried until every
/// check passes.
pub fn construct_witness(h: &BigInt, seed: u64) -> Result<Witness> {
    construct_witness_with(h, seed, &default_epsilon())
}

pub fn construct_witness_with(h: &BigInt, seed: u64, eps: &BigRational) -> Result<Witness> {
    let primes = choose_primes(h)?;
    let moduli = shape_moduli(h, &primes)?;
    let threshold = discriminant_threshold(&primes);
    let sign = arith::sign_of(h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no attempt made");
    for attempt in 1..=MAX_ATTEMPTS {
        let mut targets: Vec<ResidueTarget> = primes
            .iter()
            .map(|&p| ResidueTarget {
                modulus: p,
                shape: TargetShape::Split,
                residues: SPLIT_PATTERN.map(|c| c.rem_euclid(p as i64) as u64),
                l1: None,
                l2: None,
            })
            .collect();
        for &q in &moduli {
            let (l1, l2) = random_independent_pair(&mut rng, q);
            targets.push(ResidueTarget {
                modulus: q,
                shape: TargetShape::L1L2Cubed,
                residues: l1_l2_cubed_coeffs(l1, l2, q),
                l1: Some(l1),
                l2: Some(l2),
            });
        }
        targets.sort_by_key(|t| t.modulus);
        let mut coeffs: [BigInt; 5] = Default::default();
        let mut modulus = BigInt::one();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let system: Vec<(BigInt, BigInt)> = targets
                .iter()
                .map(|t| (BigInt::from(t.residues[i]), BigInt::from(t.modulus)))
                .collect();
            let (r, m) = crt(&system);
            *c = r;
            modulus = m;
        }
        // lift each coefficient by a seeded multiple of the modulus; the
        // range widens with the attempt count
        let spread = 3i64 << (attempt / 16);
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = if i == 0 {
                let mag = rng.gen_range(0..=spread);
                if sign > 0 {
                    mag
                } else {
                    -1 - mag
                }
            } else {
                rng.gen_range(-spread..=spread)
            };
            *c += &modulus * k;
        }
        let f = BinaryQuarticForm::new(coeffs);
        let checks = compute_checks(&f, h, &primes, eps)?;
        let failures = checks.failures();
        if failures.is_empty() {
            return Ok(Witness {
                spec: WitnessSpec {
                    h: h.clone(),
                    primes,
                    modulus,
                    targets,
                    leading_sign: sign,
                    threshold,
                    epsilon: eps.clone(),
                    seed,
                    attempts: attempt,
                },
                form: f,
                checks,
            });
        }
        last = format!("attempt {attempt}: {f} failed {}", failures.join(", "));
    }
    Err(Error::RetriesExhausted {
        attempts: MAX_ATTEMPTS,
        last,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema: String,
    #[serde(with = "crate::serde_util::big")]
    pub h: BigInt,
    pub seed: u64,
    pub bound: u64,
    pub spec: WitnessSpec,
    pub form: BinaryQuarticForm,
    pub invariants: InvariantData,
    pub checks: WitnessChecks,
    pub family: GFamily,
    /// Local report for `F = h p1 p2 p3`.
    pub parent_local: LocalReport,
    pub member_local: Vec<LocalReport>,
    pub all_members_locally_soluble: bool,
    /// Primitive solutions of `F = h p1 p2 p3` in the box.
    pub solutions: SolutionSet,
    /// In-box primitive solutions of `|F| = |h| p1 p2 p3`.
    pub abs_solution_count: usize,
    pub count_bound: i64,
    pub correspondence: CorrespondenceReport,
    /// Members with no primitive solution of `G_j = h` in the box.
    pub flagged_members: Vec<usize>,
    /// `64 - count_bound`.
    pub required_flagged: i64,
    pub passed: bool,
}

pub fn verify_theorem(h: &BigInt, bound: u64, seed: u64, exec: Exec) -> Result<WitnessReport> {
    verify_theorem_with(h, bound, seed, &default_epsilon(), exec)
}

pub fn verify_theorem_with(
    h: &BigInt,
    bound: u64,
    seed: u64,
    eps: &BigRational,
    exec: Exec,
) -> Result<WitnessReport> {
    if bound == 0 {
        return Err(Error::InvalidArgument("box bound must be at least 1".into()));
    }
    // argument errors surface unwrapped, ahead of the staged pipeline
    choose_primes(h)?;
    search::count_bound(1, eps)?;
    let w = construct_witness_with(h, seed, eps).map_err(|e| Error::stage("construct", e))?;
    let primes = w.spec.primes;
    let invariants = forms::invariants(&w.form).map_err(|e| Error::stage("invariants", e))?;
    let family =
        descent::build_family(&w.form, primes, h, exec).map_err(|e| Error::stage("family", e))?;

    let support = local::discriminant_support(&invariants.d, local::DEFAULT_RHO_BUDGET);
    let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let m = h * &q;
    let mut jobs = vec![(w.form.clone(), m.clone())];
    jobs.extend(family.members.iter().map(|mem| (mem.form.clone(), h.clone())));
    let mut reports = exec
        .map(jobs, |(g, value)| {
            local::local_everywhere_with(&g, &value, &support, Exec::Sequential)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::stage("local", e))?;
    let parent_local = reports.remove(0);
    let member_local = reports;
    let all_members_locally_soluble = member_local
        .iter()
        .all(|r| r.locally_soluble_everywhere == Verdict::Soluble);

    let correspondence =
        search::verify_correspondence(&family, bound, exec).map_err(|e| Error::stage("search", e))?;
    let abs_solution_count = search::abs_solution_count(&w.form, &m, bound, exec)
        .map_err(|e| Error::stage("search", e))?;
    let signature = invariants
        .signature_i
        .ok_or_else(|| Error::stage("invariants", "degenerate form"))?;
    let count_bound =
        search::count_bound(signature, &w.spec.epsilon).map_err(|e| Error::stage("bound", e))?;
    let flagged_members = correspondence.empty_members.clone();
    let required_flagged = 64 - count_bound;
    let passed = w.checks.all_passed()
        && all_members_locally_soluble
        && correspondence.consistent()
        && abs_solution_count as i64 <= count_bound
        && flagged_members.len() as i64 >= required_flagged;
    Ok(WitnessReport {
        schema: SCHEMA.into(),
        h: h.clone(),
        seed,
        bound,
        solutions: correspondence.parent.clone(),
        spec: w.spec,
        form: w.form,
        invariants,
        checks: w.checks,
        family,
        parent_local,
        member_local,
        all_members_locally_soluble,
        abs_solution_count,
        count_bound,
        correspondence,
        flagged_members,
        required_flagged,
        passed,
    })
}

impl WitnessReport {
    /// Recompute everything that does not need a search from the form and
    /// `h` alone, and compare with the stored data. Returns the list of
    /// disagreements.
    pub fn recheck(&self) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        let primes = choose_primes(&self.h)?;
        if primes != self.spec.primes {
            bad.push("prime choice".to_string());
        }
        let checks = compute_checks(&self.form, &self.h, &primes, &self.spec.epsilon)?;
        if checks != self.checks {
            bad.push("checkmarks".into());
        }
        for t in &self.spec.targets {
            let m = BigInt::from(t.modulus);
            let got: Vec<u64> = (0..5)
                .map(|i| self.form.a(i).mod_floor(&m).to_u64().unwrap())
                .collect();
            if got != t.residues {
                bad.push(format!("residues mod {}", t.modulus));
            }
            if let (Some(l1), Some(l2)) = (t.l1, t.l2) {
                if l1_l2_cubed_coeffs(l1, l2, t.modulus) != t.residues {
                    bad.push(format!("L1 L2^3 target mod {}", t.modulus));
                }
            }
        }
        if forms::invariants(&self.form)? != self.invariants {
            bad.push("invariants".into());
        }
        let family = descent::build_family(&self.form, primes, &self.h, Exec::default())?;
        if family != self.family {
            bad.push("family".into());
        }
        let q: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
        if self.parent_local.h != &self.h * q || self.member_local.iter().any(|r| r.h != self.h) {
            bad.push("local report values".into());
        }
        for (r, g) in std::iter::once(&self.parent_local)
            .chain(&self.member_local)
            .zip(std::iter::once(&self.form).chain(self.family.members.iter().map(|m| &m.form)))
        {
            if r.form != *g || !r.certificates.iter().all(|c| c.verify(g, &r.h)) {
                bad.push(format!("local certificates for {g}"));
            }
        }
        if !self.solutions.verify() {
            bad.push("solution list".into());
        }
        let signature = self.invariants.signature_i.unwrap_or(0);
        if search::count_bound(signature, &self.spec.epsilon)? != self.count_bound {
            bad.push("count bound".into());
        }
        Ok(bad)
    }
}

/// A directory of reports, one JSON file per `(h, seed)`.
#[derive(Clone, Debug)]
pub struct Corpus {
    dir: PathBuf,
}

impl Corpus {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Corpus { dir })
    }

    pub fn path(&self, h: &BigInt, seed: u64) -> PathBuf {
        self.dir.join(format!("witness_h{h}_s{seed}.json"))
    }

    pub fn store(&self, report: &WitnessReport) -> Result<PathBuf> {
        let path = self.path(&report.h, report.seed);
        let text = serde_json::to_string_pretty(report).map_err(|e| Error::internal(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn load(&self, h: &BigInt, seed: u64) -> Result<Option<WitnessReport>> {
        let path = self.path(h, seed);
        if !path.exists() {
            return Ok(None);
        }
        let text =
            fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// `(h, seed)` keys present, sorted.
    pub fn keys(&self) -> Result<Vec<(BigInt, u64)>> {
        let entries = fs::read_dir(&self.dir).map_err(|e| Error::Io(e.to_string()))?;
        let mut out = Vec::new();
        for entry in entries.flatten() {
            let name = entry.file_name().to_string_lossy().into_owned();
            let Some(rest) = name.strip_prefix("witness_h").and_then(|r| r.strip_suffix(".json"))
            else {
                continue;
            };
            if let Some((h, s)) = rest.split_once("_s") {
                if let (Ok(h), Ok(s)) = (h.parse(), s.parse()) {
                    out.push((h, s));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}
