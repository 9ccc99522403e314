//! `brcert`: sample tensors, check membership, derive polynomial families
//! and run the verification suites.
//!
//! Exit codes: 0 member or success, 1 non-member or failed verification,
//! 2 usage or data error, 3 inconclusive (float mode only).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use brcert::driver::acceptance::{self, Status};
use brcert::driver::{
    cross_validate_334, float_check, matmul_tensor, mode_stability_334, two_prime_444, ExperimentSpec,
    SampleClass, ToleranceModel,
};
use brcert::error::{Error, Result};
use brcert::field::{Field, Float64, PrimeField, Rationals, P31};
use brcert::io::{read_tensor, write_tensor, AnyTensor};
use brcert::lift444::{self, lift_generate_modp, membership444, LiftConfig, LiftFamily, LiftSupport};
use brcert::lm6::{basis, membership_route_b, restricted_identity_check, LmFamily};
use brcert::report::MembershipReport;
use brcert::sample::{self, DEFAULT_BOUND};
use brcert::strassen::{self, strassen_dimension, strassen_generate};
use brcert::sym9::membership_route_a;
use brcert::tensor::Tensor3;

#[derive(Parser)]
#[command(name = "brcert", version, about = "Border rank <= 4 certificates for 3x3x4 and 4x4x4 tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a sampled tensor file.
    Gen(GenArgs),
    /// Membership test of a tensor file.
    Check(CheckArgs),
    /// Generate polynomial families and audits.
    #[command(subcommand)]
    Derive(Derive),
    /// Cross-validation and acceptance suites.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Rank,
    Dense,
    SpecialDependent,
    SpecialCornerZero,
    SpecialGeneric,
    #[value(name = "essentially-2x3x4")]
    Essentially2x3x4,
    #[value(name = "essentially-2x2x4")]
    Essentially2x2x4,
    Matmul,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileMode {
    Rational,
    Gfp,
    Float,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "rank")]
    kind: Kind,
    #[arg(long, default_value_t = 4)]
    rank: usize,
    /// Comma-separated, e.g. 3,3,4.
    #[arg(long, default_value = "3,3,4", value_parser = parse_dims)]
    dims: (usize, usize, usize),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Integer entries are drawn from [-bound, bound].
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: i64,
    #[arg(long, value_enum, default_value = "rational")]
    mode: FileMode,
    #[arg(long, default_value_t = P31)]
    prime: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variety {
    #[value(name = "334")]
    V334,
    #[value(name = "444")]
    V444,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    A,
    B,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    Exact,
    Modp,
    Float,
}

#[derive(Args)]
struct CheckArgs {
    /// Tensor file.
    input: PathBuf,
    /// Defaults to the tensor's format.
    #[arg(long, value_enum)]
    variety: Option<Variety>,
    /// Defaults to b for 3x3x4 and full for 4x4x4.
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Defaults to the scalar mode of the file.
    #[arg(long, value_enum)]
    mode: Option<CheckMode>,
    #[arg(long)]
    lm_file: Option<PathBuf>,
    /// Prime used to reduce a rational tensor in modp mode.
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, default_value_t = lift444::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = brcert::driver::float::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Report file; stdout if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SupportArg {
    Full,
    Diagonal,
}

#[derive(Subcommand)]
enum Derive {
    /// Regenerate the ten degree-6 polynomials.
    LmBasis {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Degree-5 commutation coefficients for one direction.
    Strassen {
        #[arg(long, default_value_t = 3)]
        l: usize,
        #[arg(long, default_value_t = P31)]
        prime: u64,
        #[arg(long, default_value_t = 20_000_000)]
        term_cap: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Dimension of the span of the degree-5 coefficients.
    StrassenDimension {
        /// Comma-separated subset of 1,2,3.
        #[arg(long, default_value = "3", value_delimiter = ',')]
        directions: Vec<usize>,
        #[arg(long, default_value_t = P31)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4000)]
        max_samples: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of a lifted degree-6 or degree-9 family.
    Lift {
        #[arg(long, value_enum)]
        family: LiftArg,
        #[arg(long, default_value_t = 3)]
        l: usize,
        #[arg(long, default_value_t = P31)]
        prime: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "diagonal")]
        support: SupportArg,
        #[arg(long)]
        lm_file: Option<PathBuf>,
        /// Coverage report (JSON).
        #[arg(long)]
        coverage: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Audit of the degree-6 family on the special zero pattern.
    Restricted {
        #[arg(long)]
        lm_file: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LiftArg {
    Lm6,
    Sym9,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CrossMode {
    Exact,
    Modp,
}

#[derive(Subcommand)]
enum Verify {
    /// Route A against route B on sampled 3x3x4 tensors.
    Cross {
        #[arg(long, default_value_t = 100)]
        positives: usize,
        #[arg(long, default_value_t = 100)]
        negatives: usize,
        /// Samples per special-form variant.
        #[arg(long, default_value_t = 100)]
        special: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: i64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: CrossMode,
        #[arg(long, default_value_t = P31)]
        prime: u64,
        #[arg(long)]
        lm_file: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Verdicts of one rational tensor across primes (and seeds for 4x4x4).
    Stability {
        input: PathBuf,
        #[arg(long, default_value = "2147483647,2305843009213693951", value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value = "0,1", value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = lift444::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        lm_file: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// The acceptance suite, one line per criterion.
    Acceptance {
        /// Criterion numbers to run; all if empty.
        only: Vec<u8>,
    },
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("bad dimension {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        &[m, n, l] => Ok((m, n, l)),
        _ => Err("expected three comma-separated dimensions".into()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn sample_in<F: Field>(field: F, a: &GenArgs) -> Result<Tensor3<F>> {
    let need = |dims| {
        if a.dims == dims {
            Ok(())
        } else {
            Err(Error::Precondition(format!("kind needs dims {dims:?}")))
        }
    };
    let (b, s) = (a.bound, a.seed);
    Ok(match a.kind {
        Kind::Rank => sample::rank_r(field, a.dims, a.rank, b, s),
        Kind::Dense => sample::dense(field, a.dims, b, s),
        Kind::SpecialDependent => {
            need((3, 3, 4))?;
            SampleClass::SpecialDependent.sample(field, b, s)
        }
        Kind::SpecialCornerZero | Kind::Essentially2x2x4 => {
            need((3, 3, 4))?;
            SampleClass::SpecialCornerZero.sample(field, b, s)
        }
        Kind::SpecialGeneric => {
            need((3, 3, 4))?;
            SampleClass::SpecialGeneric.sample(field, b, s)
        }
        Kind::Essentially2x3x4 => {
            need((3, 3, 4))?;
            sample::essentially_2x3x4(field, b, s)
        }
        Kind::Matmul => {
            need((4, 4, 4))?;
            matmul_tensor(field)
        }
    })
}

fn gen(a: &GenArgs) -> Result<i32> {
    if a.dims.0 == 0 || a.dims.1 == 0 || a.dims.2 == 0 {
        return Err(Error::Precondition("dimensions must be positive".into()));
    }
    let text = match a.mode {
        FileMode::Rational => write_tensor(&sample_in(Rationals, a)?),
        FileMode::Gfp => write_tensor(&sample_in(PrimeField::new(a.prime)?, a)?),
        FileMode::Float => {
            let t = sample_in(Rationals, a)?;
            write_tensor(&t.map_into(&Float64, |v| Float64.from_rational(v))?)
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn load_lm(path: Option<&Path>) -> Result<LmFamily> {
    LmFamily::load(path)
}

fn check_in<F: Field>(t: &Tensor3<F>, variety: Variety, route: Route, a: &CheckArgs) -> Result<MembershipReport> {
    let lm = load_lm(a.lm_file.as_deref())?;
    match variety {
        Variety::V334 => {
            t.require_dims((3, 3, 4))?;
            match route {
                Route::A => membership_route_a(t),
                Route::B => membership_route_b(t, &lm),
                Route::Full => {
                    let mut stages = membership_route_a(t)?.stages;
                    stages.extend(membership_route_b(t, &lm)?.stages);
                    Ok(MembershipReport::from_stages(
                        "full",
                        t.field().mode().to_string(),
                        stages,
                        None,
                    ))
                }
            }
        }
        Variety::V444 => {
            if route != Route::Full {
                return Err(Error::Precondition("4x4x4 membership has only the full route".into()));
            }
            let cfg = LiftConfig {
                trials: a.trials,
                seed: a.seed,
            };
            membership444(t, &lm.in_field(t.field())?, &cfg)
        }
    }
}

fn reduce(t: &Tensor3<Rationals>, p: u64) -> Result<Tensor3<PrimeField>> {
    let f = PrimeField::new(p)?;
    t.map_into(&f, |v| f.from_rational(v))
}

fn check(a: &CheckArgs) -> Result<i32> {
    let tensor = read_tensor(&fs::read_to_string(&a.input)?)?;
    let variety = match (a.variety, tensor.dims()) {
        (Some(v), _) => v,
        (None, (3, 3, 4)) => Variety::V334,
        (None, (4, 4, 4)) => Variety::V444,
        (None, d) => return Err(Error::DimensionMismatch(format!("no variety for dims {d:?}"))),
    };
    let route = a.route.unwrap_or(match variety {
        Variety::V334 => Route::B,
        Variety::V444 => Route::Full,
    });
    let mode = a.mode.unwrap_or(match tensor {
        AnyTensor::Rational(_) => CheckMode::Exact,
        AnyTensor::Gfp(_) => CheckMode::Modp,
        AnyTensor::Float(_) => CheckMode::Float,
    });
    let report = match (tensor, mode) {
        (AnyTensor::Rational(t), CheckMode::Exact) => check_in(&t, variety, route, a)?,
        (AnyTensor::Rational(t), CheckMode::Modp) => check_in(&reduce(&t, a.prime.unwrap_or(P31))?, variety, route, a)?,
        (AnyTensor::Gfp(t), CheckMode::Modp) => {
            if a.prime.is_some_and(|p| p != t.field().modulus()) {
                return Err(Error::Precondition("--prime differs from the file's modulus".into()));
            }
            check_in(&t, variety, route, a)?
        }
        (t, CheckMode::Float) => {
            if variety != Variety::V334 || route != Route::B {
                return Err(Error::Precondition("float mode supports only --variety 334 --route b".into()));
            }
            let t = match t {
                AnyTensor::Float(t) => t,
                AnyTensor::Rational(t) => t.map_into(&Float64, |v| Float64.from_rational(v))?,
                AnyTensor::Gfp(_) => return Err(Error::ModeMismatch("gfp".into(), "float".into())),
            };
            let tol = ToleranceModel {
                epsilon: a.epsilon,
                ..ToleranceModel::default()
            };
            float_check(&t, &load_lm(a.lm_file.as_deref())?, &tol)?
        }
        (AnyTensor::Gfp(t), CheckMode::Exact) => {
            return Err(Error::ModeMismatch(t.field().mode().to_string(), "exact".into()))
        }
        (AnyTensor::Float(_), m) => {
            let name = if m == CheckMode::Exact { "exact" } else { "modp" };
            return Err(Error::ModeMismatch("float".into(), name.into()));
        }
    };
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(report.verdict.exit_code())
}

fn derive(d: &Derive) -> Result<i32> {
    match d {
        Derive::LmBasis { seed, out } => {
            emit(out.as_deref(), &basis::family_file(*seed)?)?;
            Ok(0)
        }
        Derive::Strassen {
            l,
            prime,
            term_cap,
            out,
        } => {
            let polys = strassen_generate(&PrimeField::new(*prime)?, *l, *term_cap)?;
            emit(out.as_deref(), &strassen::format_generated(&polys, *l))?;
            Ok(0)
        }
        Derive::StrassenDimension {
            directions,
            prime,
            seed,
            max_samples,
            out,
        } => {
            let r = strassen_dimension(directions, *prime, *max_samples, *seed)?;
            emit(out.as_deref(), &json(&r))?;
            Ok(0)
        }
        Derive::Lift {
            family,
            l,
            prime,
            budget,
            seed,
            support,
            lm_file,
            coverage,
            out,
        } => {
            let family = match family {
                LiftArg::Lm6 => LiftFamily::Lm6,
                LiftArg::Sym9 => LiftFamily::Sym9,
            };
            let support = match support {
                SupportArg::Full => LiftSupport::full(),
                SupportArg::Diagonal => LiftSupport::diagonal(),
            };
            let lm = load_lm(lm_file.as_deref())?;
            let g = lift_generate_modp(family, Some(&lm), *l, *prime, &support, *budget, *seed)?;
            emit(out.as_deref(), &lift444::format_generated(&g))?;
            if let Some(path) = coverage {
                fs::write(path, json(&g.coverage))?;
            }
            Ok(if g.coverage.audit_pass { 0 } else { 1 })
        }
        Derive::Restricted { lm_file, out } => {
            let report = restricted_identity_check(load_lm(lm_file.as_deref())?.polys());
            emit(out.as_deref(), &json(&report))?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn cross_in<F: Field>(field: &F, spec: &ExperimentSpec, lm: &LmFamily, out: Option<&Path>) -> Result<i32> {
    let report = cross_validate_334(field, spec, lm)?;
    eprintln!(
        "route A {:.2} s, route B {:.2} s",
        report.timing.route_a.as_secs_f64(),
        report.timing.route_b.as_secs_f64()
    );
    emit(out, &report.to_json())?;
    Ok(if report.clean() { 0 } else { 1 })
}

fn verify(v: &Verify) -> Result<i32> {
    match v {
        Verify::Cross {
            positives,
            negatives,
            special,
            seed,
            bound,
            mode,
            prime,
            lm_file,
            out,
        } => {
            let spec = ExperimentSpec {
                positives: *positives,
                negatives: *negatives,
                special_per_variant: *special,
                seed: *seed,
                bound: *bound,
            };
            let lm = load_lm(lm_file.as_deref())?;
            match mode {
                CrossMode::Exact => cross_in(&Rationals, &spec, &lm, out.as_deref()),
                CrossMode::Modp => cross_in(&PrimeField::new(*prime)?, &spec, &lm, out.as_deref()),
            }
        }
        Verify::Stability {
            input,
            primes,
            seeds,
            trials,
            lm_file,
            out,
        } => {
            let t = match read_tensor(&fs::read_to_string(input)?)? {
                AnyTensor::Rational(t) => t,
                _ => return Err(Error::Precondition("stability needs a rational tensor".into())),
            };
            let lm = load_lm(lm_file.as_deref())?;
            let check = match t.dims() {
                (3, 3, 4) => mode_stability_334(&t, &lm, primes)?,
                (4, 4, 4) => two_prime_444(&t, &lm, *trials, primes, seeds)?,
                d => return Err(Error::DimensionMismatch(format!("no variety for dims {d:?}"))),
            };
            emit(out.as_deref(), &json(&check))?;
            Ok(match check.verdict() {
                Some(v) => v.exit_code(),
                None => 1,
            })
        }
        Verify::Acceptance { only } => {
            let (lm, err) = acceptance::family();
            let mut failed = false;
            for &n in acceptance::CRITERIA.iter().filter(|n| only.is_empty() || only.contains(n)) {
                let o = acceptance::run(n, &lm, err.as_ref());
                println!("{}", o.line());
                failed |= o.status == Status::Fail;
            }
            Ok(failed as i32)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Check(a) => check(a),
        Command::Derive(d) => derive(d),
        Command::Verify(v) => verify(v),
    };
    eprintln!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use brcert::report::Verdict;

    #[test]
    fn dims_parse() {
        assert_eq!(parse_dims("3,3,4"), Ok((3, 3, 4)));
        assert!(parse_dims("3,3").is_err());
        assert!(parse_dims("a,3,4").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn inconclusive_exit_code() {
        assert_eq!(Verdict::Inconclusive.exit_code(), 3);
    }
}
