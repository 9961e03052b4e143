//! Command-line front end.

use std::io::Read;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::basis::{global_basis, Options};
use crate::intarith::discriminant;
use crate::irreducible::{check, Irreducibility};
use crate::poly::IntPoly;
use crate::sfom::{om_prime, sfom, SFOMRep, SplitOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_REDUCIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sfom", version, about = "Integral bases of number fields via squarefree OM trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PolyArgs {
    /// Ascending coefficients `a0,a1,...,1`, a file containing them, or `-` for stdin.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// Seed for randomized factorization steps.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Global integral basis.
    Basis {
        #[command(flatten)]
        poly: PolyArgs,
        /// Multiple of the relevant discriminant part (default: disc f).
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<String>,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Only the merged global lattice.
        #[arg(long)]
        merged_only: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Type tree modulo N, as JSON.
    Tree {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        modulus: String,
        /// Treat the modulus as a prime and factor residual polynomials completely.
        #[arg(long)]
        prime: bool,
    },
    /// Newton polygon of f at the given level of the tree modulo N.
    Polygon {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        modulus: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        prime: bool,
        /// Emit SVG instead of the text dump.
        #[arg(long)]
        svg: bool,
    },
    /// Run the validation oracles on the global basis.
    #[cfg(feature = "validation")]
    Verify {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<String>,
        /// Comma-separated primes at which p-maximality is tested.
        #[arg(long, value_delimiter = ',')]
        known_primes: Vec<String>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Debug)]
pub struct InputError(pub String);

pub fn parse_int(s: &str) -> Result<BigInt, InputError> {
    s.trim().parse::<BigInt>().map_err(|_| InputError(format!("not an integer: {s:?}")))
}

/// Parses whitespace- or comma-separated ascending coefficients.
pub fn parse_coeffs(text: &str) -> Result<IntPoly, InputError> {
    let coeffs: Vec<BigInt> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_int)
        .collect::<Result<_, _>>()?;
    if coeffs.is_empty() {
        return Err(InputError("empty polynomial".into()));
    }
    Ok(IntPoly::new(coeffs))
}

fn read_poly(arg: &str) -> Result<IntPoly, InputError> {
    let f = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| InputError(e.to_string()))?;
        parse_coeffs(&s)?
    } else if let Ok(f) = parse_coeffs(arg) {
        f
    } else if Path::new(arg).is_file() {
        let s = std::fs::read_to_string(arg).map_err(|e| InputError(e.to_string()))?;
        parse_coeffs(&s)?
    } else {
        return Err(InputError(format!("cannot read polynomial from {arg:?}")));
    };
    if f.degree().unwrap_or(0) < 2 || !f.is_monic() {
        return Err(InputError("f must be monic of degree at least 2".into()));
    }
    Ok(f)
}

fn read_modulus(s: &str) -> Result<BigInt, InputError> {
    let n = parse_int(s)?;
    if n <= BigInt::one() {
        return Err(InputError("modulus must exceed 1".into()));
    }
    Ok(n)
}

fn read_disc(s: Option<&String>, f: &IntPoly) -> Result<BigInt, InputError> {
    match s {
        Some(s) => {
            let d = parse_int(s)?;
            if d.is_zero() {
                return Err(InputError("D must be nonzero".into()));
            }
            Ok(d)
        }
        None => Ok(discriminant(f)),
    }
}

/// `Err(code)` for inputs that must not be processed.
fn screen(f: &IntPoly, seed: u64) -> Result<(), i32> {
    match check(f, seed) {
        Irreducibility::Reducible(why) => {
            eprintln!("error: f is reducible over Z ({why})");
            Err(EXIT_REDUCIBLE)
        }
        Irreducibility::Unknown => {
            eprintln!("warning: irreducibility of f was not proved");
            Ok(())
        }
        Irreducibility::Irreducible => Ok(()),
    }
}

fn run_tree(f: &IntPoly, n: &BigInt, prime: bool, seed: u64) -> Result<SFOMRep, BigInt> {
    if prime {
        return Ok(om_prime(f, n, seed));
    }
    match sfom(f, n) {
        SplitOutcome::Rep(rep) => Ok(rep),
        SplitOutcome::Factor(d) => Err(d),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn basis_text(gb: &crate::basis::GlobalBasis, merged_only: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("f = {}\nD = {}\n", gb.f, gb.d));
    if !merged_only {
        for m in &gb.moduli {
            out.push_str(&format!("N = {}{}\n", m.n, if m.prime { " (prime)" } else { "" }));
            for e in &m.basis {
                match e.den_exp {
                    0 => out.push_str(&format!("  {}\n", e.num)),
                    1 => out.push_str(&format!("  ({}) / {}\n", e.num, m.n)),
                    k => out.push_str(&format!("  ({}) / {}^{}\n", e.num, m.n, k)),
                }
            }
        }
    }
    out.push_str(&format!("global basis, denominator {}:\n", gb.merged.den()));
    for (num, _) in gb.merged.elements() {
        out.push_str(&format!("  {num}\n"));
    }
    out.push_str(&format!("index [O : Z[x]] = {}\n", gb.merged.index()));
    out
}

fn dispatch(cli: Cli) -> Result<i32, InputError> {
    match cli.command {
        Command::Basis { poly, disc, json, merged_only, threads } => {
            let f = read_poly(&poly.poly)?;
            let d = read_disc(disc.as_ref(), &f)?;
            if let Err(code) = screen(&f, poly.seed) {
                return Ok(code);
            }
            let gb = global_basis(&f, &d, Options { seed: poly.seed, threads: threads.max(1) });
            if json {
                print_json(&gb.to_json(merged_only));
            } else {
                print!("{}", basis_text(&gb, merged_only));
            }
            Ok(EXIT_OK)
        }
        Command::Tree { poly, modulus, prime } => {
            let f = read_poly(&poly.poly)?;
            let n = read_modulus(&modulus)?;
            if let Err(code) = screen(&f, poly.seed) {
                return Ok(code);
            }
            match run_tree(&f, &n, prime, poly.seed) {
                Ok(rep) => {
                    print_json(&rep.to_json());
                    Ok(EXIT_OK)
                }
                Err(d) => {
                    print_json(&serde_json::json!({ "N": n.to_string(), "factor": d.to_string() }));
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Polygon { poly, modulus, level, prime, svg } => {
            let f = read_poly(&poly.poly)?;
            let n = read_modulus(&modulus)?;
            if let Err(code) = screen(&f, poly.seed) {
                return Ok(code);
            }
            let rep = match run_tree(&f, &n, prime, poly.seed) {
                Ok(rep) => rep,
                Err(d) => {
                    eprintln!("modulus splits: factor {d}");
                    return Ok(EXIT_FAILED_CHECK);
                }
            };
            match rep.polygon_at_level(level) {
                Some(p) if svg => print!("{}", p.to_svg(40)),
                Some(p) => println!("{}", p.dump()),
                None => {
                    eprintln!("no polygon at level {level}");
                    return Ok(EXIT_FAILED_CHECK);
                }
            }
            Ok(EXIT_OK)
        }
        #[cfg(feature = "validation")]
        Command::Verify { poly, disc, known_primes, threads } => {
            let f = read_poly(&poly.poly)?;
            let d = disc.as_ref().map(|_| read_disc(disc.as_ref(), &f)).transpose()?;
            let primes: Vec<BigInt> = known_primes.iter().map(|s| parse_int(s)).collect::<Result<_, _>>()?;
            if let Err(code) = screen(&f, poly.seed) {
                return Ok(code);
            }
            let checks =
                crate::validate::verify(&f, d.as_ref(), &primes, Options { seed: poly.seed, threads: threads.max(1) });
            print_json(&crate::validate::report_json(&checks));
            Ok(if checks.iter().all(|c| c.ok) { EXIT_OK } else { EXIT_FAILED_CHECK })
        }
    }
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_MALFORMED
        }
    }
}
