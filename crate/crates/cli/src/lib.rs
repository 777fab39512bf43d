//! `qhl` command-line front end. Every subcommand prints one JSON document
//! carrying a versioned `schema` field.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use qhl_core::density;
use qhl_core::descent;
use qhl_core::forms;
use qhl_core::local::{self, Verdict};
use qhl_core::modp::{self, ProjectiveRoot};
use qhl_core::search;
use qhl_core::serde_util;
use qhl_core::witness::{self, Corpus, WitnessReport};
use qhl_core::{BinaryQuarticForm, Error, Exec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qhl", version, about = "Quartic Thue equations that fail the Hasse principle")]
pub struct Cli {
    /// Write the JSON document here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, env = "QHL_JOBS", global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// I, J, D, H and the real signature of a form.
    Invariants { form: Form },
    /// Whether (I, J) occurs for an integral quartic form.
    Admissible {
        #[arg(allow_hyphen_values = true)]
        i: BigInt,
        #[arg(allow_hyphen_values = true)]
        j: BigInt,
        /// Coefficient bound when looking for a form with these invariants.
        #[arg(long, default_value_t = 30)]
        search_bound: u64,
    },
    /// Factorisation pattern of a form mod p.
    Split {
        form: Form,
        #[arg(short)]
        p: u64,
    },
    /// One descent step at a simple root mod p.
    Descend {
        form: Form,
        #[arg(short)]
        p: u64,
        /// A residue in [0, p) or `inf`.
        #[arg(short = 'b')]
        root: Root,
    },
    /// The 64-member family over three primes.
    #[command(disable_help_flag = true)]
    Family {
        #[arg(long, action = clap::ArgAction::Help)]
        help: Option<bool>,
        form: Form,
        #[arg(short = 'h', long = "h", allow_hyphen_values = true)]
        h: BigInt,
        #[arg(short = 'P', value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// Local solubility of F = h at every place, or at one place.
    #[command(disable_help_flag = true)]
    Local {
        #[arg(long, action = clap::ArgAction::Help)]
        help: Option<bool>,
        form: Form,
        #[arg(short = 'h', long = "h", allow_hyphen_values = true)]
        h: BigInt,
        /// A prime, or `real`.
        #[arg(short)]
        p: Option<PlaceArg>,
        /// Hensel search depth at a single prime.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Primitive solutions of F = m with |x|, |y| <= B.
    Search {
        form: Form,
        #[arg(short, allow_hyphen_values = true)]
        m: BigInt,
        #[arg(short = 'B')]
        bound: u64,
        #[command(flatten)]
        eps: EpsArg,
    },
    /// Local densities at p, or the lower bound for the proportion of
    /// failures.
    #[command(disable_help_flag = true)]
    Density {
        #[arg(long, action = clap::ArgAction::Help)]
        help: Option<bool>,
        #[arg(short)]
        p: Option<u64>,
        #[arg(long)]
        mu: bool,
        #[arg(short = 'h', long = "h", allow_hyphen_values = true)]
        h: Option<BigInt>,
        #[arg(long, default_value_t = 1000)]
        cutoff: u64,
        /// Significant digits in the decimal rendering of the bound.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=200))]
        digits: u64,
    },
    /// Construct and certify a witness family for h.
    #[command(disable_help_flag = true)]
    Witness {
        #[arg(long, action = clap::ArgAction::Help)]
        help: Option<bool>,
        #[arg(short = 'h', long = "h", allow_hyphen_values = true)]
        h: BigInt,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'B', default_value_t = witness::DEFAULT_BOX)]
        bound: u64,
        #[command(flatten)]
        eps: EpsArg,
        /// Store the report in this corpus directory, keyed by (h, seed).
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Re-verify a stored witness report.
    Recheck { report: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct EpsArg {
    /// Exponent slack in the count bound, a rational in (0, 1/6).
    #[arg(long = "eps", default_value = "1/12")]
    pub eps: Rational,
}

#[derive(Debug, Clone)]
pub struct Form(pub BinaryQuarticForm);

impl FromStr for Form {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(Form).map_err(|e: Error| e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Rational(pub BigRational);

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        serde_util::parse_rational(s).map(Rational)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Root(pub ProjectiveRoot);

impl FromStr for Root {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Root(ProjectiveRoot::Infinity));
        }
        s.parse::<u64>()
            .map(|b| Root(ProjectiveRoot::Finite(b)))
            .map_err(|_| format!("expected a residue or `inf`, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PlaceArg {
    Real,
    Prime(u64),
}

impl FromStr for PlaceArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("real") || s.eq_ignore_ascii_case("inf") {
            return Ok(PlaceArg::Real);
        }
        s.parse()
            .map(PlaceArg::Prime)
            .map_err(|_| format!("expected a prime or `real`, got {s:?}"))
    }
}

/// A finished command: the document to print and the exit code.
struct Outcome {
    doc: Value,
    negative: bool,
}

fn doc<T: Serialize>(schema: &str, body: &T) -> Result<Value, Error> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::Internal(e.to_string()))?;
    match v.as_object_mut() {
        Some(map) => {
            map.insert("schema".into(), Value::String(format!("qhl.{schema}/1")));
            Ok(v)
        }
        None => Ok(json!({ "schema": format!("qhl.{schema}/1"), "value": v })),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded(_)
        | Error::RetriesExhausted { .. }
        | Error::Stage { .. }
        | Error::Io(_)
        | Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let exec = match configure_jobs(cli.jobs) {
        Ok(exec) => exec,
        Err(msg) => {
            eprintln!("qhl: {msg}");
            return EXIT_USAGE;
        }
    };
    let outcome = match dispatch(&cli.command, exec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qhl: {e}");
            return exit_code(&e);
        }
    };
    let text = match serde_json::to_string_pretty(&outcome.doc) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("qhl: {e}");
            return EXIT_INTERNAL;
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("qhl: {}: {e}", path.display());
                return EXIT_INTERNAL;
            }
        }
        None => print!("{text}"),
    }
    if outcome.negative {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<Exec, String> {
    match jobs {
        Some(0) => Err("--jobs must be at least 1".into()),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // a pool may already exist when run() is called twice in one
            // process; the first size wins
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None => Ok(Exec::default()),
    }
}

fn dispatch(cmd: &Command, exec: Exec) -> Result<Outcome, Error> {
    match cmd {
        Command::Invariants { form } => {
            let inv = forms::invariants(&form.0)?;
            let mut d = doc("invariants", &inv)?;
            d["form"] = json!(form.0.to_string());
            d["case"] = json!(forms::admissible_case(&inv.i, &inv.j));
            Ok(Outcome { doc: d, negative: false })
        }
        Command::Admissible { i, j, search_bound } => {
            let case = forms::admissible_case(i, j);
            let realized = match case {
                Some(_) => forms::realize_invariants(i, j, *search_bound)?.map(|f| f.to_string()),
                None => None,
            };
            let d = doc(
                "admissible",
                &json!({
                    "I": i.to_string(),
                    "J": j.to_string(),
                    "admissible": case.is_some(),
                    "case": case,
                    "realized_by": realized,
                }),
            )?;
            Ok(Outcome { doc: d, negative: case.is_none() })
        }
        Command::Split { form, p } => {
            let f = &form.0;
            let split = modp::splits_completely(f, *p)?;
            let roots: Vec<Value> = modp::roots_mod_p(f, *p)?
                .into_iter()
                .map(|(r, mult)| json!({ "root": r.to_string(), "multiplicity": mult }))
                .collect();
            let l1l2 = modp::is_l1_l2_cubed(f, *p)?;
            let d = doc(
                "split",
                &json!({
                    "form": f.to_string(),
                    "p": p,
                    "reduction": modp::reduce_mod_p(f, *p)?,
                    "roots": roots,
                    "splits_completely": split.is_some(),
                    "split": split,
                    "square_class": modp::is_square_class(f, *p)?,
                    "l1_l2_cubed": l1l2.map(|(a, b)| json!({ "l1": a, "l2": b })),
                }),
            )?;
            Ok(Outcome { doc: d, negative: split.is_none() })
        }
        Command::Descend { form, p, root } => {
            let g = descent::descend_at(&form.0, *p, root.0)?;
            let d = doc(
                "descend",
                &json!({
                    "parent": form.0.to_string(),
                    "p": p,
                    "root": root.0.to_string(),
                    "matrix": descent::DescentLabel::new(*p, root.0).matrix(),
                    "form": g.to_string(),
                    "invariants": forms::invariants(&g)?,
                }),
            )?;
            Ok(Outcome { doc: d, negative: false })
        }
        Command::Family { form, h, primes, .. } => {
            let primes: [u64; 3] = primes
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidArgument("-P takes exactly three primes".into()))?;
            let fam = descent::build_family(&form.0, primes, h, exec)?;
            Ok(Outcome { doc: doc("family", &fam)?, negative: false })
        }
        Command::Local { form, h, p, depth, .. } => {
            let f = &form.0;
            let (d, verdict) = match p {
                None => {
                    let r = local::local_everywhere(f, h, exec)?;
                    let v = r.locally_soluble_everywhere;
                    (doc("local", &r)?, v)
                }
                Some(PlaceArg::Real) => {
                    let c = local::soluble_over_r(f, h)?;
                    let v = c.verdict;
                    (doc("local_place", &c)?, v)
                }
                Some(PlaceArg::Prime(p)) => {
                    let c = local::soluble_over_zp(f, h, *p, *depth)?;
                    let v = c.verdict;
                    (doc("local_place", &c)?, v)
                }
            };
            Ok(Outcome { doc: d, negative: verdict == Verdict::Insoluble })
        }
        Command::Search { form, m, bound, eps } => {
            let f = &form.0;
            let set = search::primitive_solutions_in_box(f, m, *bound, exec)?;
            let inv = forms::invariants(f)?;
            let mut d = doc("search", &set)?;
            d["count"] = json!(set.len());
            d["epsilon"] = json!(serde_util::format_rational(&eps.eps.0));
            if let Some(sig) = inv.signature_i {
                let applicable = search::bound_applicable(&inv.d, m, &eps.eps.0)?;
                d["bound_applicable"] = json!(applicable);
                d["count_bound"] = json!(search::count_bound(sig, &eps.eps.0)?);
                d["abs_count"] = json!(search::abs_solution_count(f, m, *bound, exec)?);
            }
            Ok(Outcome { doc: d, negative: false })
        }
        Command::Density { p, mu, h, cutoff, digits, .. } => density_doc(*p, *mu, h.as_ref(), *cutoff, *digits as usize, exec),
        Command::Witness { h, seed, bound, eps, corpus, .. } => {
            let report = witness::verify_theorem_with(h, *bound, *seed, &eps.eps.0, exec)?;
            if let Some(dir) = corpus {
                Corpus::open(dir)?.store(&report)?;
            }
            let negative = !report.passed;
            Ok(Outcome { doc: doc("witness", &report)?, negative })
        }
        Command::Recheck { report } => {
            let text = fs::read_to_string(report).map_err(|e| Error::Io(format!("{}: {e}", report.display())))?;
            let parsed: WitnessReport =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", report.display())))?;
            let problems = parsed.recheck()?;
            let d = doc(
                "recheck",
                &json!({
                    "report": report.display().to_string(),
                    "consistent": problems.is_empty(),
                    "passed": parsed.passed,
                    "problems": problems,
                }),
            )?;
            Ok(Outcome { doc: d, negative: !problems.is_empty() || !parsed.passed })
        }
    }
}

fn density_doc(
    p: Option<u64>,
    mu: bool,
    h: Option<&BigInt>,
    cutoff: u64,
    digits: usize,
    exec: Exec,
) -> Result<Outcome, Error> {
    let r = |x: BigRational| serde_util::format_rational(&x);
    let mut body = serde_json::Map::new();
    if let Some(p) = p {
        body.insert("p".into(), json!(p));
        if p == 2 {
            body.insert("delta2".into(), json!(r(density::delta2())));
        } else {
            body.insert("gamma".into(), json!(r(density::gamma(p)?)));
        }
        if p >= 5 {
            body.insert("sigma".into(), json!(r(density::sigma(p)?)));
        }
        body.insert("lambda".into(), json!(r(density::lambda(p)?)));
    }
    if mu {
        let h = h.ok_or_else(|| Error::InvalidArgument("--mu needs -h".into()))?;
        let primes = witness::choose_primes(h)?;
        let bound = density::mu_lower_bound(h, primes, cutoff, exec)?;
        body.insert(
            "mu_decimal".into(),
            json!({
                "lower": serde_util::scientific(&bound.mu.lower, digits, false),
                "upper": serde_util::scientific(&bound.mu.upper, digits, true),
            }),
        );
        body.insert(
            "mu".into(),
            serde_json::to_value(&bound).map_err(|e| Error::Internal(e.to_string()))?,
        );
    } else if h.is_some() {
        return Err(Error::InvalidArgument("-h is only used with --mu".into()));
    }
    if p.is_none() && !mu {
        body.insert("delta2".into(), json!(r(density::delta2())));
    }
    Ok(Outcome {
        doc: doc("density", &Value::Object(body))?,
        negative: false,
    })
}
