//! Membership for 4x4x4 tensors by lifting the 3x3x4 conditions.
//!
//! For 4x4 matrices `P`, `Q` and a direction `l`, the leading 3x3 blocks of
//! `P X_k Q` (with `X_k` the sections along `l`) form a 3x3x4 tensor of
//! border rank at most 4 whenever the 4x4x4 tensor has. Requiring the
//! degree-6 and degree-9 conditions on it for all `P`, `Q`, together with
//! the degree-5 commutation conditions, decides membership.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::lm6::{CompiledFamily, LmFamily};
use crate::matrix::{combinations, Matrix};
use crate::poly::{format_poly_lines, poly_det_capped, Monomial, MultiPoly, Var, VarRegistry};
use crate::report::{MembershipReport, Stage, Witness};
use crate::rng::{derive_seed, seeded};
use crate::sample::uniform_matrix;
use crate::strassen::{self, sections, stage_prime, DIRECTIONS};
use crate::sym9::{build_sym_matrices, entry_form, sym9_test, Side, SYS_COLS, SYS_ROWS};
use crate::tensor::Tensor3;

pub const DEFAULT_TRIALS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftFamily {
    Lm6,
    Sym9,
}

impl LiftFamily {
    pub fn label(self) -> &'static str {
        match self {
            LiftFamily::Lm6 => "lm6",
            LiftFamily::Sym9 => "sym9",
        }
    }

    fn tag(self) -> u64 {
        match self {
            LiftFamily::Lm6 => 6,
            LiftFamily::Sym9 => 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftConfig {
    /// Random `(P, Q)` draws per (family, direction); also the number of
    /// `u` draws per degree-5 stage.
    pub trials: usize,
    pub seed: u64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig {
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

/// The 3x3x4 tensor whose k-th frontal slice is the leading 3x3 block of
/// `P X_k Q`.
pub fn lifted_tensor<F: Field>(xs: &[Matrix<F>], p: &Matrix<F>, q: &Matrix<F>) -> Result<Tensor3<F>> {
    let keep = [0, 1, 2];
    let slices = xs
        .iter()
        .map(|x| Ok(p.mul(x)?.mul(q)?.submatrix(&keep, &keep)))
        .collect::<Result<Vec<_>>>()?;
    Tensor3::from_frontal_slices(p.field().clone(), &slices)
}

/// First violated condition of `family` at a 3x3x4 tensor, as
/// (condition name, value).
fn violation<F: Field>(
    family: LiftFamily,
    lm: Option<&CompiledFamily<F>>,
    y: &Tensor3<F>,
) -> Result<Option<(String, String)>> {
    let f = y.field();
    match family {
        LiftFamily::Lm6 => {
            let lm = lm.ok_or_else(|| Error::Precondition("degree-6 lift needs the LM family".into()))?;
            Ok(lm
                .first_nonzero(y)?
                .map(|(n, v)| (format!("lm{}", n + 1), f.format(&v))))
        }
        LiftFamily::Sym9 => {
            let test = sym9_test(&build_sym_matrices(y)?)?;
            Ok(test
                .witnesses
                .first()
                .map(|(side, m)| (minor_name(*side, &m.rows), f.format(&m.value))))
        }
    }
}

fn minor_name(side: Side, rows: &[usize]) -> String {
    let rows: Vec<String> = rows.iter().map(|r| (r + 1).to_string()).collect();
    format!("{}:{}", side.label(), rows.join(","))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftOutcome {
    pub pass: bool,
    pub witness: Option<Witness>,
}

/// Randomized test of the lifted `family` conditions along direction `l`.
pub fn lift_eval<F: Field>(
    t: &Tensor3<F>,
    l: usize,
    family: LiftFamily,
    lm: Option<&CompiledFamily<F>>,
    cfg: &LiftConfig,
) -> Result<LiftOutcome> {
    let f = t.field().clone();
    if !F::EXACT {
        return Err(Error::InexactMode(f.mode().to_string()));
    }
    if cfg.trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    if family == LiftFamily::Lm6 && lm.is_none() {
        return Err(Error::Precondition("degree-6 lift needs the LM family".into()));
    }
    let xs = sections(t, l)?;
    let found = (0..cfg.trials)
        .into_par_iter()
        .map(|n| -> Result<Option<Witness>> {
            let mut rng = seeded(derive_seed(cfg.seed, &[l as u64, family.tag(), n as u64]));
            let p = uniform_matrix(&f, 4, 4, &mut rng);
            let q = uniform_matrix(&f, 4, 4, &mut rng);
            let y = lifted_tensor(&xs, &p, &q)?;
            Ok(violation(family, lm, &y)?.map(|(condition, value)| Witness::Lift {
                p: p.data().iter().map(|v| f.format(v)).collect(),
                q: q.data().iter().map(|v| f.format(v)).collect(),
                condition,
                value,
            }))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        Some(Err(e)) => Err(e),
        Some(Ok(witness)) => Ok(LiftOutcome {
            pass: witness.is_none(),
            witness,
        }),
        None => Ok(LiftOutcome {
            pass: true,
            witness: None,
        }),
    }
}

/// Report stage `lift_{family}_l{l}`.
pub fn lift_stage<F: Field>(
    t: &Tensor3<F>,
    l: usize,
    family: LiftFamily,
    lm: Option<&CompiledFamily<F>>,
    cfg: &LiftConfig,
) -> Result<Stage> {
    let out = lift_eval(t, l, family, lm, cfg)?;
    let mut s = Stage::new(format!("lift_{}_l{l}", family.label()), out.pass, out.witness);
    s.l = Some(l);
    s.family = Some(family.label().into());
    s.trials = Some(cfg.trials);
    s.prime = stage_prime(t.field());
    Ok(s)
}

/// Degree-5 stages for the three directions, then the lifted degree-6 and
/// degree-9 stages. Every stage runs; the verdict is MEMBER iff all pass.
pub fn membership444<F: Field>(t: &Tensor3<F>, lm: &CompiledFamily<F>, cfg: &LiftConfig) -> Result<MembershipReport> {
    t.require_dims((4, 4, 4))?;
    let mut stages = Vec::with_capacity(9);
    for l in DIRECTIONS {
        stages.push(strassen::strassen_stage(t, l, cfg.trials, cfg.seed)?);
    }
    for family in [LiftFamily::Lm6, LiftFamily::Sym9] {
        for l in DIRECTIONS {
            stages.push(lift_stage(t, l, family, Some(lm), cfg)?);
        }
    }
    Ok(MembershipReport::from_stages(
        "full",
        t.field().mode().to_string(),
        stages,
        Some(cfg.seed),
    ))
}

/// Entries of `P` and `Q` (1-based) kept symbolic during extraction; the
/// others are treated as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftSupport {
    pub p: Vec<(usize, usize)>,
    pub q: Vec<(usize, usize)>,
}

impl LiftSupport {
    pub fn full() -> Self {
        let all: Vec<(usize, usize)> = (1..=4).flat_map(|a| (1..=4).map(move |b| (a, b))).collect();
        LiftSupport {
            p: all.clone(),
            q: all,
        }
    }

    pub fn diagonal() -> Self {
        let d: Vec<(usize, usize)> = (1..=4).map(|a| (a, a)).collect();
        LiftSupport { p: d.clone(), q: d }
    }
}

/// Coefficient of one `(p, q)`-monomial in one lifted condition.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftPoly {
    pub condition: String,
    pub pq: Monomial,
    pub poly: MultiPoly<PrimeField>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftCoverage {
    pub family: LiftFamily,
    pub l: usize,
    pub prime: u64,
    pub seed: u64,
    pub support: LiftSupport,
    pub budget: usize,
    pub terms_spent: usize,
    pub conditions_total: usize,
    pub conditions_complete: usize,
    pub polynomials: usize,
    /// Where the budget ran out; `None` when every condition was expanded.
    pub frontier: Option<String>,
    /// Re-summing the coefficients at a seeded random `(P, Q, T)` matched
    /// direct evaluation for every complete condition.
    pub audit_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftGenerated {
    pub polys: Vec<LiftPoly>,
    pub coverage: LiftCoverage,
}

/// Symbolic lifted tensor: `y[k][i][j] = sum p(i,a) x_l(a,b,k) q(b,j)` over
/// the support, in the 4x4x4 registry.
fn symbolic_lift(
    field: &PrimeField,
    reg: &VarRegistry,
    l: usize,
    support: &LiftSupport,
) -> Vec<[[MultiPoly<PrimeField>; 3]; 3]> {
    (0..4)
        .map(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let mut y = MultiPoly::zero(*field);
                    for &(pi, a) in support.p.iter().filter(|e| e.0 == i + 1) {
                        for &(b, qj) in support.q.iter().filter(|e| e.1 == j + 1) {
                            let x = match l {
                                1 => reg.x(k + 1, a, b),
                                2 => reg.x(a, k + 1, b),
                                _ => reg.x(a, b, k + 1),
                            };
                            let m = Monomial::var(reg.p(pi, a))
                                .mul(&Monomial::var(x))
                                .mul(&Monomial::var(reg.q(b, qj)));
                            y.add_term(m, field.one());
                        }
                    }
                    y
                })
            })
        })
        .collect()
}

/// The conditions of a family in processing order.
fn condition_names(family: LiftFamily) -> Vec<String> {
    match family {
        LiftFamily::Lm6 => (1..=10).map(|n| format!("lm{n}")).collect(),
        LiftFamily::Sym9 => [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|side| {
                combinations(SYS_ROWS, SYS_COLS)
                    .into_iter()
                    .map(move |rows| minor_name(side, &rows))
            })
            .collect(),
    }
}

fn parse_minor(name: &str) -> (Side, Vec<usize>) {
    let (side, rows) = name.split_once(':').expect("minor name");
    let side = if side == "CL" { Side::Left } else { Side::Right };
    (side, rows.split(',').map(|r| r.parse::<usize>().expect("row") - 1).collect())
}

struct Budget {
    cap: usize,
    spent: usize,
}

impl Budget {
    fn charge(&mut self, terms: usize) -> bool {
        self.spent += terms;
        self.spent <= self.cap
    }
}

/// One lifted condition expanded over `(p, q, x)`.
fn expand_condition(
    field: &PrimeField,
    family: LiftFamily,
    lm: Option<&LmFamily>,
    name: &str,
    y: &[[[MultiPoly<PrimeField>; 3]; 3]],
    budget: &mut Budget,
) -> Result<std::result::Result<MultiPoly<PrimeField>, String>> {
    match family {
        LiftFamily::Lm6 => {
            let lm = lm.ok_or_else(|| Error::Precondition("degree-6 lift needs the LM family".into()))?;
            let n: usize = name[2..].parse().expect("lm index");
            let g = &lm.polys()[n - 1];
            let small = VarRegistry::new(3, 3, 4);
            let mut acc = MultiPoly::zero(*field);
            for (count, (m, c)) in g.terms().enumerate() {
                let mut prod = MultiPoly::constant(*field, field.from_rational(c)?);
                for &(id, e) in m.exps() {
                    let Var::X(i, j, k) = small.var(id) else {
                        unreachable!("family polynomials use tensor variables only")
                    };
                    for _ in 0..e {
                        prod = prod.mul(&y[k as usize - 1][i as usize - 1][j as usize - 1]);
                        if !budget.charge(prod.num_terms()) {
                            return Ok(Err(format!(
                                "term {} of {} in {name}",
                                count + 1,
                                g.num_terms()
                            )));
                        }
                    }
                }
                for (tm, tc) in prod.terms() {
                    acc.add_term(tm.clone(), *tc);
                }
            }
            Ok(Ok(acc))
        }
        LiftFamily::Sym9 => {
            let (side, rows) = parse_minor(name);
            let entries: Vec<Vec<MultiPoly<PrimeField>>> = rows
                .iter()
                .map(|&row| {
                    (0..SYS_COLS)
                        .map(|col| {
                            entry_form(side, row, col).into_iter().fold(
                                MultiPoly::zero(*field),
                                |acc, (neg, k, i, j)| {
                                    if neg {
                                        acc.sub(&y[k][i][j])
                                    } else {
                                        acc.add(&y[k][i][j])
                                    }
                                },
                            )
                        })
                        .collect()
                })
                .collect();
            let room = budget.cap.saturating_sub(budget.spent);
            match poly_det_capped(field, &entries, room) {
                Ok(d) => {
                    if budget.charge(d.num_terms()) {
                        Ok(Ok(d))
                    } else {
                        Ok(Err(format!("result of {name}")))
                    }
                }
                Err(Error::BudgetExceeded { context, .. }) => {
                    budget.spent = budget.cap + 1;
                    Ok(Err(format!("{context} in {name}")))
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// Direct value of a named condition at a numeric 3x3x4 tensor.
fn condition_value(
    family: LiftFamily,
    lm: Option<&CompiledFamily<PrimeField>>,
    name: &str,
    y: &Tensor3<PrimeField>,
) -> Result<u64> {
    match family {
        LiftFamily::Lm6 => {
            let n: usize = name[2..].parse().expect("lm index");
            Ok(lm.expect("checked").eval(y)?[n - 1])
        }
        LiftFamily::Sym9 => {
            let (side, rows) = parse_minor(name);
            let s = build_sym_matrices(y)?;
            let cols: Vec<usize> = (0..SYS_COLS).collect();
            s.matrix(side).submatrix(&rows, &cols).det()
        }
    }
}

/// Coefficients over `(p, q)`-monomials of the lifted conditions, mod
/// `prime`. Conditions are expanded in order until `budget` terms have
/// been produced; completed conditions are returned with coverage
/// metadata naming the frontier.
pub fn lift_generate_modp(
    family: LiftFamily,
    lm: Option<&LmFamily>,
    l: usize,
    prime: u64,
    support: &LiftSupport,
    budget: usize,
    seed: u64,
) -> Result<LiftGenerated> {
    let field = PrimeField::new(prime)?;
    if !DIRECTIONS.contains(&l) {
        return Err(Error::Precondition(format!("direction {l} not in 1..=3")));
    }
    if family == LiftFamily::Lm6 && lm.is_none() {
        return Err(Error::Precondition("degree-6 lift needs the LM family".into()));
    }
    let reg = VarRegistry::new(4, 4, 4);
    let y = symbolic_lift(&field, &reg, l, support);
    let names = condition_names(family);
    let mut meter = Budget { cap: budget, spent: 0 };
    let mut expanded: Vec<(String, BTreeMap<Monomial, MultiPoly<PrimeField>>)> = Vec::new();
    let mut frontier = None;
    for (n, name) in names.iter().enumerate() {
        match expand_condition(&field, family, lm, name, &y, &mut meter)? {
            Ok(poly) => expanded.push((name.clone(), poly.extract_coeffs(|id| reg.is_pq(id)))),
            Err(at) => {
                frontier = Some(format!("condition {} of {}: {at}", n + 1, names.len()));
                break;
            }
        }
    }

    // Audit: re-sum each complete condition at a random point.
    let compiled = lm.map(|f| f.in_field(&field)).transpose()?;
    let mut rng = seeded(seed);
    let t = Tensor3::from_fn(field, (4, 4, 4), |_, _, _| field.random_uniform(&mut rng))?;
    let mut p = Matrix::zeros(field, 4, 4);
    let mut q = Matrix::zeros(field, 4, 4);
    let mut values = t.registry_values(&reg)?;
    for &(a, b) in &support.p {
        let v = field.random_uniform(&mut rng);
        p.set(a - 1, b - 1, v);
        values[reg.p(a, b) as usize] = v;
    }
    for &(a, b) in &support.q {
        let v = field.random_uniform(&mut rng);
        q.set(a - 1, b - 1, v);
        values[reg.q(a, b) as usize] = v;
    }
    let lifted = lifted_tensor(&sections(&t, l)?, &p, &q)?;
    let mut audit_pass = true;
    for (name, coeffs) in &expanded {
        let resum = coeffs.iter().fold(0, |acc, (m, c)| {
            let mv = m.exps().iter().fold(1, |acc, &(id, e)| {
                field.mul(&acc, &field.pow(&values[id as usize], e as u32))
            });
            field.add(&acc, &field.mul(&mv, &c.eval_dense(&values)))
        });
        audit_pass &= resum == condition_value(family, compiled.as_ref(), name, &lifted)?;
    }

    let complete = expanded.len();
    let polys: Vec<LiftPoly> = expanded
        .into_iter()
        .flat_map(|(name, coeffs)| {
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).map(move |(pq, poly)| LiftPoly {
                condition: name.clone(),
                pq,
                poly,
            })
        })
        .collect();
    let coverage = LiftCoverage {
        family,
        l,
        prime,
        seed,
        support: support.clone(),
        budget,
        terms_spent: meter.spent.min(budget),
        conditions_total: names.len(),
        conditions_complete: complete,
        polynomials: polys.len(),
        frontier,
        audit_pass,
    };
    Ok(LiftGenerated { polys, coverage })
}

/// Polynomial file: coverage header, then each coefficient preceded by a
/// comment naming its condition and `(p, q)`-monomial.
pub fn format_generated(g: &LiftGenerated) -> String {
    let reg = VarRegistry::new(4, 4, 4);
    let c = &g.coverage;
    let mut header = vec![
        format!("lifted {} conditions, direction l = {}, field gfp({})", c.family.label(), c.l, c.prime),
        format!(
            "conditions {} of {} complete, {} polynomials, audit seed {} {}",
            c.conditions_complete,
            c.conditions_total,
            c.polynomials,
            c.seed,
            if c.audit_pass { "passed" } else { "FAILED" }
        ),
    ];
    if let Some(f) = &c.frontier {
        header.push(format!("budget {} exhausted at {f}", c.budget));
    }
    let mut s = format_poly_lines::<PrimeField>(&reg, &[], &header);
    for p in &g.polys {
        s.push_str(&format!("# {} {}\n", p.condition, p.pq.format(&reg)));
        s.push_str(&p.poly.to_text(&reg, |v| p.poly.field().format(v)));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rationals, P31, P61};
    use crate::lm6::route_b_compiled;
    use crate::report::Verdict;
    use crate::sample;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn zero_tensor_passes() {
        let f = gf(P31);
        let lm = LmFamily::bundled().in_field(&f).unwrap();
        let t = Tensor3::zeros(f, (4, 4, 4)).unwrap();
        let cfg = LiftConfig { trials: 2, seed: 0 };
        for family in [LiftFamily::Lm6, LiftFamily::Sym9] {
            assert!(lift_eval(&t, 2, family, Some(&lm), &cfg).unwrap().pass);
        }
    }

    #[test]
    fn rank_four_members_and_dense_non_members() {
        let f = gf(P31);
        let lm = LmFamily::bundled().in_field(&f).unwrap();
        let cfg = LiftConfig { trials: 4, seed: 3 };
        for seed in 0..4 {
            let t = sample::rank_r(f, (4, 4, 4), 4, 9, seed);
            let r = membership444(&t, &lm, &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Member, "{}", r.to_json());
            assert_eq!(r.stages.len(), 9);
            assert!(r.stages.iter().all(|s| s.trials == Some(4) && s.prime == Some(P31)));
            let t = sample::dense(f, (4, 4, 4), 9, seed);
            let r = membership444(&t, &lm, &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::NonMember);
            assert!(r.stages.iter().filter(|s| !s.pass).all(|s| s.witness.is_some()));
        }
    }

    #[test]
    fn lift_witness_reproduces() {
        let f = gf(P61);
        let t = sample::dense(f, (4, 4, 4), 9, 8);
        let cfg = LiftConfig { trials: 1, seed: 0 };
        let out = lift_eval(&t, 1, LiftFamily::Sym9, None, &cfg).unwrap();
        let Some(Witness::Lift { p, q, condition, value }) = out.witness else {
            panic!("expected a lift witness");
        };
        let m = |v: &[String]| Matrix::from_elems(f, 4, 4, |i, j| f.parse(&v[4 * i + j]).unwrap());
        let y = lifted_tensor(&t.slices(1).unwrap(), &m(&p), &m(&q)).unwrap();
        let v = condition_value(LiftFamily::Sym9, None, &condition, &y).unwrap();
        assert_eq!(f.format(&v), value);
    }

    #[test]
    fn lm6_without_family_is_rejected() {
        let f = gf(P31);
        let t = Tensor3::zeros(f, (4, 4, 4)).unwrap();
        let cfg = LiftConfig::default();
        assert!(matches!(
            lift_eval(&t, 1, LiftFamily::Lm6, None, &cfg),
            Err(Error::Precondition(_))
        ));
        let small = Tensor3::zeros(f, (3, 3, 4)).unwrap();
        assert!(lift_eval(&small, 1, LiftFamily::Sym9, None, &cfg).is_err());
    }

    #[test]
    fn embedded_tensors_agree_with_route_b() {
        let f = gf(P31);
        let lm = LmFamily::bundled().in_field(&f).unwrap();
        let cfg = LiftConfig { trials: 4, seed: 1 };
        for seed in 0..6 {
            let t = match seed % 3 {
                0 => sample::rank_r(f, (3, 3, 4), 4, 9, seed),
                1 => sample::dense(f, (3, 3, 4), 9, seed),
                _ => sample::special_form(f, false, false, 9, seed),
            };
            let small = route_b_compiled(&t, &lm).unwrap().verdict;
            let big = membership444(&t.embed((4, 4, 4)).unwrap(), &lm, &cfg).unwrap().verdict;
            assert_eq!(small, big, "seed {seed}");
        }
    }

    #[test]
    fn rational_mode_matches_modular() {
        let lm = LmFamily::bundled();
        let cq = lm.in_field(&Rationals).unwrap();
        let cfg = LiftConfig { trials: 2, seed: 5 };
        let t = sample::rank_r(Rationals, (4, 4, 4), 4, 5, 2);
        assert_eq!(membership444(&t, &cq, &cfg).unwrap().verdict, Verdict::Member);
    }

    #[test]
    fn lm6_generation_on_small_support() {
        let lm = LmFamily::bundled();
        let mut support = LiftSupport::diagonal();
        support.p.push((1, 4));
        let g = lift_generate_modp(LiftFamily::Lm6, Some(&lm), 3, P31, &support, usize::MAX, 4).unwrap();
        let c = &g.coverage;
        assert_eq!((c.conditions_complete, c.conditions_total), (10, 10));
        assert!(c.frontier.is_none());
        assert!(c.audit_pass);
        let reg = VarRegistry::new(4, 4, 4);
        for p in &g.polys {
            assert!(p.poly.is_homogeneous() && p.poly.degree() == 6);
            assert!(p.poly.variables().iter().all(|&v| reg.is_x(v)));
        }
        let f = gf(P31);
        for seed in 0..20 {
            let t = sample::rank_r(f, (4, 4, 4), 4, 9, seed);
            let v = t.registry_values(&reg).unwrap();
            assert!(g.polys.iter().step_by(7).all(|p| p.poly.eval_dense(&v) == 0));
        }
    }

    #[test]
    fn budget_exhaustion_keeps_complete_conditions() {
        let g = lift_generate_modp(LiftFamily::Sym9, None, 3, P31, &LiftSupport::diagonal(), 60_000, 2).unwrap();
        let c = &g.coverage;
        assert!(c.frontier.is_some());
        assert!(c.conditions_complete > 0 && c.conditions_complete < c.conditions_total);
        assert!(c.audit_pass);
        for p in &g.polys {
            assert!(p.poly.is_homogeneous() && p.poly.degree() == 9);
        }
        let names: Vec<&str> = g.polys.iter().map(|p| p.condition.as_str()).collect();
        assert!(names.iter().all(|n| n.starts_with("CL:")));
        let text = format_generated(&g);
        assert!(text.contains("exhausted"));
    }
}
