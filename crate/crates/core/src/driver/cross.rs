//! Cross-validation of the two 3x3x4 routes and agreement checks across
//! scalar modes, primes and seeds.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::field::{Field, PrimeField, Rationals};
use crate::lift444::{membership444, LiftConfig};
use crate::lm6::{route_b_compiled, special_membership, LmFamily};
use crate::report::Verdict;
use crate::rng::derive_seed;
use crate::sample;
use crate::sym9::membership_route_a;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleClass {
    /// Sum of four random rank-one tensors.
    Rank4,
    /// Independent random entries.
    Dense,
    /// Special form, dependent 2x2 blocks.
    SpecialDependent,
    /// Special form, every corner entry zero.
    SpecialCornerZero,
    /// Special form, no constraint.
    SpecialGeneric,
}

impl SampleClass {
    pub const SPECIAL: [SampleClass; 3] = [
        SampleClass::SpecialDependent,
        SampleClass::SpecialCornerZero,
        SampleClass::SpecialGeneric,
    ];

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    pub fn is_special(self) -> bool {
        Self::SPECIAL.contains(&self)
    }

    pub fn sample<F: Field>(self, field: F, bound: i64, seed: u64) -> Tensor3<F> {
        match self {
            SampleClass::Rank4 => sample::rank_r(field, (3, 3, 4), 4, bound, seed),
            SampleClass::Dense => sample::dense(field, (3, 3, 4), bound, seed),
            SampleClass::SpecialDependent => sample::special_form(field, false, true, bound, seed),
            SampleClass::SpecialCornerZero => sample::special_form(field, true, false, bound, seed),
            SampleClass::SpecialGeneric => sample::special_form(field, false, false, bound, seed),
        }
    }
}

/// Sample plan for a cross-validation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentSpec {
    pub positives: usize,
    pub negatives: usize,
    /// Samples for each of the three special-form variants.
    pub special_per_variant: usize,
    pub seed: u64,
    pub bound: i64,
}

impl ExperimentSpec {
    /// Sample classes and seeds, in report order.
    pub fn plan(&self) -> Vec<(SampleClass, u64)> {
        let mut out = Vec::new();
        let mut push = |class: SampleClass, count: usize| {
            for n in 0..count {
                out.push((class, derive_seed(self.seed, &[class.tag(), n as u64])));
            }
        };
        push(SampleClass::Rank4, self.positives);
        push(SampleClass::Dense, self.negatives);
        for class in SampleClass::SPECIAL {
            push(class, self.special_per_variant);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub class: SampleClass,
    pub seed: u64,
    pub route_a: Verdict,
    pub route_b: Verdict,
    /// Closed-form membership on the special stratum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Verdict>,
}

impl CaseResult {
    pub fn routes_agree(&self) -> bool {
        self.route_a == self.route_b
    }

    pub fn oracle_agrees(&self) -> bool {
        self.oracle.map_or(true, |o| o == self.route_a && o == self.route_b)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timing {
    pub route_a: Duration,
    pub route_b: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossReport {
    pub spec: ExperimentSpec,
    pub mode: String,
    pub cases: usize,
    pub agreements: usize,
    pub disagreements: Vec<CaseResult>,
    pub oracle_mismatches: Vec<CaseResult>,
    pub members: usize,
    /// Wall-clock time per route, summed over cases. Not serialized, so
    /// reports stay byte-identical across runs.
    #[serde(skip)]
    pub timing: Timing,
}

impl CrossReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn clean(&self) -> bool {
        self.disagreements.is_empty() && self.oracle_mismatches.is_empty()
    }
}

/// Runs both routes on every planned sample and compares verdicts with each
/// other and, on the special stratum, with the closed-form oracle.
pub fn cross_validate_334<F: Field>(field: &F, spec: &ExperimentSpec, lm: &LmFamily) -> Result<CrossReport> {
    let compiled = lm.in_field(field)?;
    let results = spec
        .plan()
        .into_par_iter()
        .map(|(class, seed)| -> Result<(CaseResult, Timing)> {
            let t = class.sample(field.clone(), spec.bound, seed);
            let start = Instant::now();
            let route_a = membership_route_a(&t)?.verdict;
            let mid = Instant::now();
            let route_b = route_b_compiled(&t, &compiled)?.verdict;
            let timing = Timing {
                route_a: mid - start,
                route_b: mid.elapsed(),
            };
            let oracle = if class.is_special() {
                Some(Verdict::from_pass(special_membership(&t)?))
            } else {
                None
            };
            Ok((
                CaseResult {
                    class,
                    seed,
                    route_a,
                    route_b,
                    oracle,
                },
                timing,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut timing = Timing::default();
    for (_, t) in &results {
        timing.route_a += t.route_a;
        timing.route_b += t.route_b;
    }
    let cases: Vec<CaseResult> = results.into_iter().map(|(c, _)| c).collect();
    Ok(CrossReport {
        spec: spec.clone(),
        mode: field.mode().to_string(),
        cases: cases.len(),
        agreements: cases.iter().filter(|c| c.routes_agree()).count(),
        members: cases.iter().filter(|c| c.route_a == Verdict::Member).count(),
        disagreements: cases.iter().filter(|c| !c.routes_agree()).cloned().collect(),
        oracle_mismatches: cases.iter().filter(|c| !c.oracle_agrees()).cloned().collect(),
        timing,
    })
}

/// Verdicts of one computation under several settings; `alarm` is set when
/// they differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementCheck {
    pub settings: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub alarm: bool,
}

impl AgreementCheck {
    fn new(runs: Vec<(String, Verdict)>) -> Self {
        let alarm = runs.windows(2).any(|w| w[0].1 != w[1].1);
        let (settings, verdicts) = runs.into_iter().unzip();
        AgreementCheck {
            settings,
            verdicts,
            alarm,
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        (!self.alarm).then(|| self.verdicts[0])
    }
}

fn reduce(t: &Tensor3<Rationals>, p: u64) -> Result<Tensor3<PrimeField>> {
    let f = PrimeField::new(p)?;
    t.map_into(&f, |v| f.from_rational(v))
}

/// Route B over the rationals and over each prime. A modular verdict that
/// differs from the rational one is a false zero and raises the alarm.
pub fn mode_stability_334(t: &Tensor3<Rationals>, lm: &LmFamily, primes: &[u64]) -> Result<AgreementCheck> {
    let mut runs = vec![(
        "rational".to_string(),
        route_b_compiled(t, &lm.in_field(&Rationals)?)?.verdict,
    )];
    for &p in primes {
        let tp = reduce(t, p)?;
        let verdict = route_b_compiled(&tp, &lm.in_field(tp.field())?)?.verdict;
        runs.push((format!("gfp({p})"), verdict));
    }
    Ok(AgreementCheck::new(runs))
}

/// 4x4x4 membership for every (prime, seed) pair.
pub fn two_prime_444(
    t: &Tensor3<Rationals>,
    lm: &LmFamily,
    trials: usize,
    primes: &[u64],
    seeds: &[u64],
) -> Result<AgreementCheck> {
    let mut runs = Vec::new();
    for &p in primes {
        let tp = reduce(t, p)?;
        let compiled = lm.in_field(tp.field())?;
        for &seed in seeds {
            let cfg = LiftConfig { trials, seed };
            runs.push((
                format!("gfp({p}) seed {seed}"),
                membership444(&tp, &compiled, &cfg)?.verdict,
            ));
        }
    }
    Ok(AgreementCheck::new(runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{P31, P61};

    #[test]
    fn plan_layout() {
        let spec = ExperimentSpec {
            positives: 2,
            negatives: 3,
            special_per_variant: 1,
            seed: 9,
            bound: 9,
        };
        let plan = spec.plan();
        assert_eq!(plan.len(), 8);
        assert_eq!(plan[0].0, SampleClass::Rank4);
        assert_eq!(plan[4].0, SampleClass::Dense);
        assert_eq!(plan[7].0, SampleClass::SpecialGeneric);
        let seeds: std::collections::HashSet<u64> = plan.iter().map(|p| p.1).collect();
        assert_eq!(seeds.len(), 8);
    }

    #[test]
    fn empty_plan_gives_empty_report() {
        let spec = ExperimentSpec {
            positives: 0,
            negatives: 0,
            special_per_variant: 0,
            seed: 0,
            bound: 9,
        };
        let r = cross_validate_334(&Rationals, &spec, &LmFamily::bundled()).unwrap();
        assert_eq!((r.cases, r.agreements), (0, 0));
        assert!(r.clean());
    }

    #[test]
    fn small_run_agrees() {
        let spec = ExperimentSpec {
            positives: 3,
            negatives: 3,
            special_per_variant: 3,
            seed: 1,
            bound: 9,
        };
        let r = cross_validate_334(&Rationals, &spec, &LmFamily::bundled()).unwrap();
        assert_eq!(r.cases, 15);
        assert!(r.clean(), "{}", r.to_json());
        assert!(r.members >= 3);
        // Reports are reproducible.
        let again = cross_validate_334(&Rationals, &spec, &LmFamily::bundled()).unwrap();
        assert_eq!(r.to_json(), again.to_json());
    }

    #[test]
    fn modes_agree_on_samples() {
        let lm = LmFamily::bundled();
        for seed in 0..3 {
            for class in [SampleClass::Rank4, SampleClass::Dense, SampleClass::SpecialGeneric] {
                let t = class.sample(Rationals, 9, seed);
                let check = mode_stability_334(&t, &lm, &[P31, P61]).unwrap();
                assert!(!check.alarm);
                assert_eq!(check.verdicts.len(), 3);
            }
        }
    }

    #[test]
    fn agreement_alarm() {
        let c = AgreementCheck::new(vec![("a".into(), Verdict::Member), ("b".into(), Verdict::NonMember)]);
        assert!(c.alarm);
        assert_eq!(c.verdict(), None);
    }
}
