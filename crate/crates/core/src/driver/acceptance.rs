//! End-to-end acceptance suite. Each criterion runs on seeded samples and
//! yields one [`Outcome`]; failures carry the first few offending cases.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals, P31, P61};
use crate::lift444::{membership444, DEFAULT_TRIALS, LiftConfig};
use crate::lm6::family::{FAMILY_DEGREE, FAMILY_SIZE, RESTRICTED_TERMS};
use crate::lm6::{f_det, membership_route_b, restricted_identity_check, route_b_compiled, LmFamily};
use crate::matrix::{combinations, Matrix};
use crate::report::{MembershipReport, Verdict};
use crate::rng::{derive_seed, seeded};
use crate::sample::{self, DEFAULT_BOUND};
use crate::strassen::{strassen_dimension, strassen_eval};
use crate::sym9::{
    build_sym_matrices, extract_lr, membership_route_a, sym9_minors, sym9_test, trace16_check, MINORS_PER_MATRIX,
    SYS_COLS, SYS_ROWS,
};
use crate::tensor::Tensor3;

use super::cross::{cross_validate_334, mode_stability_334, two_prime_444, ExperimentSpec};
use super::matmul_tensor;

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Master seed of every sample drawn by the suite.
pub const SUITE_SEED: u64 = 20;

/// Problems listed in a failing outcome.
const SHOWN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub number: u8,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Outcome {
    /// One line: status, number, title, detail and wall-clock time.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: {} ({:.1} s)",
            self.status,
            self.number,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects failed checks for one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    problems: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, problem: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.problems.push(problem());
        }
    }

    fn finish(self, summary: String) -> (Status, String) {
        if self.problems.is_empty() {
            (Status::Pass, summary)
        } else {
            let shown: Vec<_> = self.problems.iter().take(SHOWN).cloned().collect();
            (
                Status::Fail,
                format!(
                    "{} of {} checks failed: {}",
                    self.problems.len(),
                    self.checks,
                    shown.join("; ")
                ),
            )
        }
    }
}

fn seed(criterion: u8, tags: &[u64]) -> u64 {
    let mut all = vec![criterion as u64];
    all.extend_from_slice(tags);
    derive_seed(SUITE_SEED, &all)
}

fn title(number: u8) -> &'static str {
    match number {
        1 => "shape and count fixed points",
        2 => "restricted identity audit",
        3 => "rank-4 samples pass degrees 9, 16 and 6",
        4 => "dense samples fail both routes",
        5 => "route A and route B agree",
        6 => "degenerate strata are members",
        7 => "4x4x4 membership",
        8 => "invariance suite",
        9 => "degree-5 dimension stability",
        _ => "unknown criterion",
    }
}

/// The family used by criteria 3 to 8, and the load error if the external
/// file could not be read (criterion 2 is then skipped).
pub fn family() -> (LmFamily, Option<Error>) {
    match LmFamily::load(None) {
        Ok(f) => (f, None),
        Err(e) => (LmFamily::bundled(), Some(e)),
    }
}

/// Runs one criterion.
pub fn run(number: u8, lm: &LmFamily, load_error: Option<&Error>) -> Outcome {
    let start = Instant::now();
    let result = match number {
        1 => shapes(lm),
        2 => match load_error {
            Some(e) => Ok((Status::Skipped, format!("family file unavailable: {e}"))),
            None => restricted(lm),
        },
        3 => positives_334(lm),
        4 => negatives_334(lm),
        5 => equivalence(lm),
        6 => degenerate(lm),
        7 => membership_444(lm),
        8 => invariance(lm),
        9 => dimension(),
        n => Err(Error::Precondition(format!("no criterion {n}"))),
    };
    let (status, detail) = result.unwrap_or_else(|e| (Status::Fail, format!("error: {e}")));
    Outcome {
        number,
        title: title(number),
        status,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<Outcome> {
    let (lm, err) = family();
    CRITERIA.iter().map(|&n| run(n, &lm, err.as_ref())).collect()
}

type Check = Result<(Status, String)>;

fn shapes(lm: &LmFamily) -> Check {
    let mut t = Tally::default();
    let x = sample::rank_r(Rationals, (3, 3, 4), 4, DEFAULT_BOUND, seed(1, &[]));
    let s = build_sym_matrices(&x)?;
    for m in [&s.cl, &s.cr] {
        t.check((m.rows(), m.cols()) == (12, 9), || {
            format!("coefficient matrix is {}x{}", m.rows(), m.cols())
        });
    }
    t.check(
        (SYS_ROWS, SYS_COLS) == (12, 9) && combinations(SYS_ROWS, SYS_COLS).len() == 220,
        || "system shape constants".into(),
    );
    let minors = sym9_minors(&s)?;
    t.check(minors.len() == 2 * MINORS_PER_MATRIX && MINORS_PER_MATRIX == 220, || {
        format!("{} minors", minors.len())
    });
    t.check(lm.polys().len() == FAMILY_SIZE && FAMILY_SIZE == 10, || {
        format!("family has {} polynomials", lm.polys().len())
    });
    let degrees: Vec<i64> = lm.polys().iter().map(|p| p.degree()).collect();
    t.check(degrees.iter().all(|&d| d == FAMILY_DEGREE && d == 6), || {
        format!("family degrees {degrees:?}")
    });
    let audit = restricted_identity_check(lm.polys());
    let terms: Vec<usize> = audit.entries.iter().map(|e| e.terms).collect();
    t.check(terms.iter().all(|&n| n == RESTRICTED_TERMS && n == 24), || {
        format!("restricted term counts {terms:?}")
    });
    Ok(t.finish(format!(
        "C_L, C_R 12x9; 2x220 minors; {} polynomials of degree 6; restricted terms {}",
        lm.polys().len(),
        RESTRICTED_TERMS
    )))
}

fn restricted(lm: &LmFamily) -> Check {
    let audit = restricted_identity_check(lm.polys());
    let mut t = Tally::default();
    for e in &audit.entries {
        t.check(e.problem.is_none(), || {
            format!("polynomial {}: {}", e.index, e.problem.clone().unwrap_or_default())
        });
    }
    t.check(audit.missing_pairs.is_empty(), || {
        format!("pairs not covered {:?}", audit.missing_pairs)
    });
    t.check(audit.repeated_pairs.is_empty(), || {
        format!("pairs covered twice {:?}", audit.repeated_pairs)
    });
    t.check(audit.pass, || "audit failed".into());
    Ok(t.finish(format!(
        "{} restrictions equal f * c * x33k * x33l, all 10 pairs covered once (source {})",
        audit.entries.len(),
        lm.source()
    )))
}

fn positives_334(lm: &LmFamily) -> Check {
    let compiled = lm.in_field(&Rationals)?;
    let rows = (0..100u64)
        .into_par_iter()
        .map(|n| -> Result<(Vec<String>, bool)> {
            let x = sample::rank_r(Rationals, (3, 3, 4), 4, DEFAULT_BOUND, seed(3, &[n]));
            let mut problems = Vec::new();
            let s = build_sym_matrices(&x)?;
            let nonzero = sym9_minors(&s)?.iter().filter(|(_, m)| !Rationals.is_zero(&m.value)).count();
            if nonzero > 0 || !sym9_test(&s)?.pass {
                problems.push(format!("sample {n}: {nonzero} nonzero minors"));
            }
            let lr = extract_lr(&s)?;
            if let Some((l, r)) = &lr.lr {
                if !trace16_check(l, r)? {
                    problems.push(format!("sample {n}: trace condition fails"));
                }
            }
            if compiled.first_nonzero(&x)?.is_some() {
                problems.push(format!("sample {n}: nonzero degree-6 value"));
            }
            Ok((problems, lr.defined()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    let defined = rows.iter().filter(|r| r.1).count();
    for (problems, _) in rows {
        t.check(problems.is_empty(), || problems.join(", "));
    }
    Ok(t.finish(format!(
        "100/100 rank-4 samples: 440 minors zero, degree-6 values zero; trace condition held on {defined} samples with ranks 8, 8"
    )))
}

fn negatives_334(lm: &LmFamily) -> Check {
    let compiled = lm.in_field(&Rationals)?;
    let rows = (0..100u64)
        .into_par_iter()
        .map(|n| -> Result<Option<String>> {
            let x = sample::dense(Rationals, (3, 3, 4), DEFAULT_BOUND, seed(4, &[n]));
            let a = membership_route_a(&x)?;
            let b = route_b_compiled(&x, &compiled)?;
            let rejected = |r: &MembershipReport| {
                r.verdict == Verdict::NonMember && r.first_failure().is_some_and(|s| s.witness.is_some())
            };
            Ok((!(rejected(&a) && rejected(&b))).then(|| {
                format!("sample {n}: route A {:?}, route B {:?}", a.verdict, b.verdict)
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    for r in rows {
        t.check(r.is_none(), || r.unwrap_or_default());
    }
    Ok(t.finish("100/100 dense samples rejected by both routes with witnesses".into()))
}

fn equivalence(lm: &LmFamily) -> Check {
    let spec = ExperimentSpec {
        positives: 100,
        negatives: 100,
        special_per_variant: 100,
        seed: seed(5, &[]),
        bound: DEFAULT_BOUND,
    };
    let r = cross_validate_334(&Rationals, &spec, lm)?;
    let mut t = Tally::default();
    for c in &r.disagreements {
        t.check(false, || format!("{:?} seed {}: A {:?}, B {:?}", c.class, c.seed, c.route_a, c.route_b));
    }
    for c in &r.oracle_mismatches {
        t.check(false, || format!("{:?} seed {}: oracle {:?}", c.class, c.seed, c.oracle));
    }
    t.check(r.cases == 500, || format!("{} cases", r.cases));
    Ok(t.finish(format!(
        "{}/{} agreements (100 rank-4, 100 dense, 3x100 special form), oracle agrees on all 300 special cases, {} members",
        r.agreements, r.cases, r.members
    )))
}

fn degenerate(lm: &LmFamily) -> Check {
    let compiled = lm.in_field(&Rationals)?;
    let mut t = Tally::default();
    for n in 0..50u64 {
        let cases = [
            ("2x3x4", sample::essentially_2x3x4(Rationals, DEFAULT_BOUND, seed(6, &[0, n]))),
            ("2x2x4", sample::special_form(Rationals, true, false, DEFAULT_BOUND, seed(6, &[1, n]))),
        ];
        for (name, x) in cases {
            let a = membership_route_a(&x)?.verdict;
            let b = route_b_compiled(&x, &compiled)?.verdict;
            t.check(a == Verdict::Member && b == Verdict::Member, || {
                format!("{name} sample {n}: A {a:?}, B {b:?}")
            });
        }
    }
    Ok(t.finish("100/100 degenerate samples accepted by both routes".into()))
}

fn membership_444(lm: &LmFamily) -> Check {
    let f31 = PrimeField::new(P31)?;
    let lm31 = lm.in_field(&f31)?;
    let mut t = Tally::default();
    let positives = (0..100u64)
        .into_par_iter()
        .map(|n| -> Result<Option<String>> {
            let x = sample::rank_r(Rationals, (4, 4, 4), 4, DEFAULT_BOUND, seed(7, &[0, n]));
            let check = two_prime_444(&x, lm, DEFAULT_TRIALS, &[P31, P61], &[seed(7, &[2, n])])?;
            Ok((check.verdict() != Some(Verdict::Member))
                .then(|| format!("rank-4 sample {n}: {:?}", check.verdicts)))
        })
        .collect::<Result<Vec<_>>>()?;
    for p in positives {
        t.check(p.is_none(), || p.unwrap_or_default());
    }
    for n in 0..100u64 {
        let x = sample::dense(f31, (4, 4, 4), DEFAULT_BOUND, seed(7, &[1, n]));
        let cfg = LiftConfig {
            trials: DEFAULT_TRIALS,
            seed: seed(7, &[3, n]),
        };
        let v = membership444(&x, &lm31, &cfg)?.verdict;
        t.check(v == Verdict::NonMember, || format!("generic sample {n}: {v:?}"));
    }
    let mm = matmul_tensor(Rationals);
    let cfg = LiftConfig {
        trials: DEFAULT_TRIALS,
        seed: seed(7, &[4]),
    };
    let report = membership444(&mm, &lm.in_field(&Rationals)?, &cfg)?;
    let first = report.first_failure().map(|s| s.name.clone()).unwrap_or_default();
    t.check(report.verdict == Verdict::NonMember && first.starts_with("strassen5"), || {
        format!("matmul tensor: {:?}, first failing stage {first:?}", report.verdict)
    });
    let exact = strassen_eval(&mm, 1, DEFAULT_TRIALS, seed(7, &[4]))?;
    t.check(!exact.pass && exact.witness.is_some(), || {
        "no exact degree-5 witness for the matmul tensor".into()
    });
    Ok(t.finish(format!(
        "100/100 rank-4 MEMBER at GF({P31}) and GF({P61}), 100/100 generic NON_MEMBER, matmul tensor NON_MEMBER at {first} with a rational witness"
    )))
}

fn invertible_triple(dims: (usize, usize, usize), s: u64) -> [Matrix<Rationals>; 3] {
    let mut rng = seeded(s);
    [
        sample::invertible(&Rationals, dims.0, 3, &mut rng),
        sample::invertible(&Rationals, dims.1, 3, &mut rng),
        sample::invertible(&Rationals, dims.2, 3, &mut rng),
    ]
}

fn swap_slices(x: &Tensor3<Rationals>, a: usize, b: usize) -> Result<Tensor3<Rationals>> {
    let mut slices = x.slices(3)?;
    slices.swap(a, b);
    Tensor3::from_frontal_slices(Rationals, &slices)
}

fn invariance(lm: &LmFamily) -> Check {
    let mut t = Tally::default();
    // Basis changes on all three axes, 50 tensor pairs.
    let classes = [super::SampleClass::Rank4, super::SampleClass::Dense, super::SampleClass::SpecialGeneric];
    for n in 0..50u64 {
        let class = classes[n as usize % classes.len()];
        let x = class.sample(Rationals, DEFAULT_BOUND, seed(8, &[0, n]));
        let [a, b, c] = invertible_triple((3, 3, 4), seed(8, &[1, n]));
        let y = x.basis_change(&a, &b, &c)?;
        let before = (membership_route_a(&x)?.verdict, membership_route_b(&x, lm)?.verdict);
        let after = (membership_route_a(&y)?.verdict, membership_route_b(&y, lm)?.verdict);
        t.check(before == after, || format!("pair {n} ({class:?}): {before:?} vs {after:?}"));
    }
    // Scaling L and R independently leaves the trace condition unchanged.
    let mut rng = seeded(seed(8, &[2]));
    let mut pairs = Vec::new();
    for n in 0..10u64 {
        let x = sample::rank_r(Rationals, (3, 3, 4), 4, DEFAULT_BOUND, seed(8, &[3, n]));
        if let Some(lr) = extract_lr(&build_sym_matrices(&x)?)?.lr {
            pairs.push(lr);
        }
        let l = sample::uniform_matrix(&Rationals, 3, 3, &mut rng);
        let r = sample::uniform_matrix(&Rationals, 3, 3, &mut rng);
        pairs.push((l, r));
    }
    let scalings = 1000 / pairs.len();
    for (l, r) in &pairs {
        let base = trace16_check(l, r)?;
        for _ in 0..scalings {
            let a = Rationals.from_i64(sample::nonzero_int(&mut rng, 1000));
            let b = Rationals.from_i64(sample::nonzero_int(&mut rng, 1000));
            let scaled = trace16_check(&l.scale(&a), &r.scale(&b))?;
            t.check(scaled == base, || "trace condition changed under scaling".into());
        }
    }
    let scaled_checks = scalings * pairs.len();
    // Swapping two slices negates the block determinant.
    for n in 0..10u64 {
        let x = sample::special_form(Rationals, false, false, DEFAULT_BOUND, seed(8, &[4, n]));
        let d = f_det(&x)?;
        for pair in combinations(4, 2) {
            let swapped = f_det(&swap_slices(&x, pair[0], pair[1])?)?;
            t.check(swapped == Rationals.neg(&d), || {
                format!("sample {n}: swap {:?} does not negate", pair)
            });
        }
    }
    // Two primes and two seeds agree, on 3x3x4 and 4x4x4 samples.
    let mut alarms = 0;
    for n in 0..10u64 {
        let class = classes[n as usize % classes.len()];
        let x = class.sample(Rationals, DEFAULT_BOUND, seed(8, &[5, n]));
        let c = mode_stability_334(&x, lm, &[P31, P61])?;
        alarms += c.alarm as usize;
        t.check(!c.alarm, || format!("3x3x4 sample {n}: {:?}", c.verdicts));
    }
    for n in 0..6u64 {
        let x = if n % 2 == 0 {
            sample::rank_r(Rationals, (4, 4, 4), 4, DEFAULT_BOUND, seed(8, &[6, n]))
        } else {
            sample::dense(Rationals, (4, 4, 4), DEFAULT_BOUND, seed(8, &[6, n]))
        };
        let c = two_prime_444(&x, lm, DEFAULT_TRIALS, &[P31, P61], &[seed(8, &[7, n]), seed(8, &[8, n])])?;
        alarms += c.alarm as usize;
        t.check(!c.alarm, || format!("4x4x4 sample {n}: {:?}", c.verdicts));
    }
    Ok(t.finish(format!(
        "50 basis-change pairs agree; {scaled_checks} scalings keep the trace condition; 60 slice swaps negate f; {alarms} two-prime alarms"
    )))
}

fn dimension() -> Check {
    let runs = [(P31, 1), (P31, 2), (P61, 1), (P61, 2)]
        .into_iter()
        .map(|(p, s)| strassen_dimension(&[3], p, 2000, s))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::default();
    let dims: Vec<usize> = runs.iter().map(|r| r.dimension).collect();
    t.check(dims.windows(2).all(|w| w[0] == w[1]), || format!("dimensions differ: {dims:?}"));
    t.check(runs.iter().all(|r| r.saturated), || "rank did not stabilize".into());
    Ok(t.finish(format!(
        "dimension {} for direction 3 at both primes and seeds 1, 2 ({} coefficient polynomials)",
        dims[0], runs[0].polynomials
    )))
}
