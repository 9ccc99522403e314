//! Floating-point evaluation with a scale-aware zero test.
//!
//! A value `v` of a polynomial `g` at `T` counts as zero when
//! `|v| <= epsilon * |coeffs(g)|_1 * max(1, |T|_inf)^deg(g)`. Values within
//! a factor `band` of that threshold on either side make the verdict
//! INCONCLUSIVE.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Float64, Rationals};
use crate::lm6::LmFamily;
use crate::matrix::combinations;
use crate::poly::{poly_det, MultiPoly, VarRegistry};
use crate::report::{MembershipReport, Stage, Verdict, Witness};
use crate::sym9::{build_sym_matrices, entry_form, sym9_minors, Side, SYS_COLS, SYS_ROWS};
use crate::tensor::Tensor3;

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_BAND: f64 = 1e3;
const MINOR_DEGREE: i32 = 9;
const LM_DEGREE: i32 = 6;

const MINOR_NORMS: &str = include_str!("../../data/sym9_minor_norms.txt");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceModel {
    pub epsilon: f64,
    pub band: f64,
}

impl Default for ToleranceModel {
    fn default() -> Self {
        ToleranceModel {
            epsilon: DEFAULT_EPSILON,
            band: DEFAULT_BAND,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Zero,
    Ambiguous,
    Nonzero,
}

impl ToleranceModel {
    pub fn threshold(&self, norm1: f64, t_inf: f64, degree: i32) -> f64 {
        self.epsilon * norm1 * t_inf.max(1.0).powi(degree)
    }

    pub fn classify(&self, value: f64, threshold: f64) -> Class {
        let ratio = value.abs() / threshold;
        if ratio.is_nan() || ratio > self.band {
            Class::Nonzero
        } else if ratio * self.band > 1.0 {
            Class::Ambiguous
        } else {
            Class::Zero
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub family: &'static str,
    /// 1-based position in the family.
    pub index: usize,
    pub value: f64,
    pub threshold: f64,
    pub class: Class,
}

impl Residual {
    pub fn ratio(&self) -> f64 {
        self.value.abs() / self.threshold
    }
}

/// Bundled 1-norms of the 440 degree-9 minors, in [`sym9_minors`] order.
pub fn minor_norms() -> &'static [f64] {
    static NORMS: OnceLock<Vec<f64>> = OnceLock::new();
    NORMS.get_or_init(|| {
        let v: Vec<f64> = MINOR_NORMS
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| l.trim().parse().expect("bundled norm"))
            .collect();
        assert_eq!(v.len(), 440, "bundled minor norms");
        v
    })
}

/// The minor on `rows` of one system as a polynomial in the 36 entries.
pub fn symbolic_minor(side: Side, rows: &[usize]) -> MultiPoly<Rationals> {
    let reg = VarRegistry::new(3, 3, 4);
    let entries: Vec<Vec<MultiPoly<Rationals>>> = rows
        .iter()
        .map(|&r| {
            (0..SYS_COLS)
                .map(|c| {
                    entry_form(side, r, c)
                        .into_iter()
                        .fold(MultiPoly::zero(Rationals), |acc, (neg, k, i, j)| {
                            let x = MultiPoly::var(Rationals, reg.x(i + 1, j + 1, k + 1));
                            if neg {
                                acc.sub(&x)
                            } else {
                                acc.add(&x)
                            }
                        })
                })
                .collect()
        })
        .collect();
    poly_det(&Rationals, &entries)
}

pub fn norm1(p: &MultiPoly<Rationals>) -> f64 {
    p.terms()
        .map(|(_, c)| Float64.from_rational(c).expect("finite").abs())
        .sum()
}

/// Text of the bundled norm file, recomputed from the symbolic minors.
pub fn minor_norms_file() -> String {
    let mut s = String::from(
        "# 1-norms of the coefficient vectors of the 9x9 minors of the two\n\
         # symmetrization systems, left system first, row subsets in\n\
         # lexicographic order. Regenerate with\n\
         # `cargo test -p brcert-core --lib -- --ignored regenerate_minor_norms`.\n",
    );
    for side in [Side::Left, Side::Right] {
        for rows in combinations(SYS_ROWS, SYS_COLS) {
            s.push_str(&format!("{}\n", norm1(&symbolic_minor(side, &rows))));
        }
    }
    s
}

fn inf_norm(t: &Tensor3<Float64>) -> f64 {
    t.entries().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Residuals of the 440 minors and, if given, the ten degree-6 values.
pub fn float_residuals(
    t: &Tensor3<Float64>,
    lm: Option<&LmFamily>,
    tol: &ToleranceModel,
) -> Result<Vec<Residual>> {
    t.require_dims((3, 3, 4))?;
    if t.entries().iter().any(|v| !v.is_finite()) {
        return Err(Error::MalformedTensor("non-finite entry".into()));
    }
    let scale = inf_norm(t);
    let mut out = Vec::new();
    let minors = sym9_minors(&build_sym_matrices(t)?)?;
    for (n, ((_, m), norm)) in minors.iter().zip(minor_norms()).enumerate() {
        let threshold = tol.threshold(*norm, scale, MINOR_DEGREE);
        out.push(Residual {
            family: "sym9",
            index: n + 1,
            value: m.value,
            threshold,
            class: tol.classify(m.value, threshold),
        });
    }
    if let Some(lm) = lm {
        let values = lm.in_field(&Float64)?.eval(t)?;
        for (n, (v, p)) in values.into_iter().zip(lm.polys()).enumerate() {
            let threshold = tol.threshold(norm1(p), scale, LM_DEGREE);
            out.push(Residual {
                family: "lm6",
                index: n + 1,
                value: v,
                threshold,
                class: tol.classify(v, threshold),
            });
        }
    }
    Ok(out)
}

fn float_stage(name: &str, residuals: &[&Residual]) -> Stage {
    let worst = residuals
        .iter()
        .max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
        .copied();
    let class = residuals.iter().map(|r| r.class).fold(Class::Zero, |acc, c| match (acc, c) {
        (Class::Nonzero, _) | (_, Class::Nonzero) => Class::Nonzero,
        (Class::Ambiguous, _) | (_, Class::Ambiguous) => Class::Ambiguous,
        _ => Class::Zero,
    });
    let witness = worst.filter(|_| class != Class::Zero).map(|r| Witness::Residual {
        index: r.index,
        value: r.value,
        threshold: r.threshold,
    });
    let stage = Stage::new(name, class == Class::Zero, witness);
    match (class, worst) {
        (Class::Ambiguous, _) => stage.with_note("inconclusive"),
        (_, Some(w)) => stage.with_note(format!("max ratio {:.3e}", w.ratio())),
        _ => stage,
    }
}

/// Degree-9 and degree-6 conditions in floating point. NON_MEMBER needs a
/// value clearly above its threshold; a value near it gives INCONCLUSIVE.
pub fn float_check(t: &Tensor3<Float64>, lm: &LmFamily, tol: &ToleranceModel) -> Result<MembershipReport> {
    let residuals = float_residuals(t, Some(lm), tol)?;
    let pick = |fam: &str| residuals.iter().filter(|r| r.family == fam).collect::<Vec<_>>();
    let stages = vec![float_stage("sym9", &pick("sym9")), float_stage("lm6", &pick("lm6"))];
    let mut report = MembershipReport::from_stages("B", Float64.mode().to_string(), stages, None);
    report.verdict = if residuals.iter().any(|r| r.class == Class::Nonzero) {
        Verdict::NonMember
    } else if residuals.iter().any(|r| r.class == Class::Ambiguous) {
        Verdict::Inconclusive
    } else {
        Verdict::Member
    };
    Ok(report)
}
