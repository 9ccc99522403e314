//! The ten degree-6 polynomials: file format, validation and evaluation.

use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals, P61};
use crate::matrix::Matrix;
use crate::poly::{format_poly_lines, parse_poly_lines, Monomial, MultiPoly, VarRegistry};
use crate::rng::seeded;
use crate::tensor::Tensor3;

use super::basis::slice_pairs;
use super::special::f_poly;

/// Environment variable naming a family file to use instead of the bundled
/// one.
pub const LM_FILE_ENV: &str = "BRCERT_LM_FILE";

pub const FAMILY_SIZE: usize = 10;
pub const FAMILY_DEGREE: i64 = 6;
/// Random points used by the independence check.
const INDEPENDENCE_POINTS: usize = 12;

const BUNDLED: &str = include_str!("../../data/lm_deg6.txt");

fn registry() -> VarRegistry {
    VarRegistry::new(3, 3, 4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmFamily {
    polys: Vec<MultiPoly<Rationals>>,
    source: String,
}

impl LmFamily {
    /// Validate and wrap: exactly ten nonzero polynomials, homogeneous of
    /// degree 6 in the 36 tensor variables, linearly independent.
    pub fn new(polys: Vec<MultiPoly<Rationals>>, source: impl Into<String>) -> Result<Self> {
        let reg = registry();
        if polys.len() != FAMILY_SIZE {
            return Err(Error::InvalidFamily(format!(
                "expected {FAMILY_SIZE} polynomials, found {}",
                polys.len()
            )));
        }
        for (n, p) in polys.iter().enumerate() {
            if p.is_zero() {
                return Err(Error::InvalidFamily(format!("polynomial {} is zero", n + 1)));
            }
            if !p.is_homogeneous() || p.degree() != FAMILY_DEGREE {
                return Err(Error::InvalidFamily(format!(
                    "polynomial {} is not homogeneous of degree {FAMILY_DEGREE}",
                    n + 1
                )));
            }
            if let Some(v) = p.variables().into_iter().find(|&v| !reg.is_x(v)) {
                return Err(Error::InvalidFamily(format!(
                    "polynomial {} uses non-tensor variable {}",
                    n + 1,
                    reg.name(v)
                )));
            }
        }
        let rank = independence_rank(&polys)?;
        if rank != FAMILY_SIZE {
            return Err(Error::InvalidFamily(format!(
                "polynomials are dependent (evaluation rank {rank})"
            )));
        }
        Ok(LmFamily {
            polys,
            source: source.into(),
        })
    }

    pub fn parse(text: &str, source: impl Into<String>) -> Result<Self> {
        let polys = parse_poly_lines(&Rationals, &registry(), text)?;
        Self::new(polys, source)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.display().to_string())
    }

    /// The family shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, "bundled").expect("bundled family is valid")
    }

    /// `path` if given, else the file named by [`LM_FILE_ENV`], else the
    /// bundled family.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::from_file(p);
        }
        match std::env::var_os(LM_FILE_ENV) {
            Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
            _ => Ok(Self::bundled()),
        }
    }

    pub fn polys(&self) -> &[MultiPoly<Rationals>] {
        &self.polys
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn to_text(&self) -> String {
        format_family(&self.polys, &[])
    }

    /// Coefficients mapped into `field`, ready for repeated evaluation.
    pub fn in_field<F: Field>(&self, field: &F) -> Result<CompiledFamily<F>> {
        let polys = self
            .polys
            .iter()
            .map(|p| Compiled::new(p, field))
            .collect::<Result<_>>()?;
        Ok(CompiledFamily {
            field: field.clone(),
            polys,
        })
    }

    /// The ten values at a 3x3x4 tensor, in family order.
    pub fn eval<F: Field>(&self, t: &Tensor3<F>) -> Result<Vec<F::Elem>> {
        self.in_field(t.field())?.eval(t)
    }
}

/// Text form with optional leading comment lines.
pub fn format_family(polys: &[MultiPoly<Rationals>], header: &[String]) -> String {
    format_poly_lines(&registry(), polys, header)
}

fn independence_rank(polys: &[MultiPoly<Rationals>]) -> Result<usize> {
    let field = PrimeField::new(P61)?;
    let compiled = polys
        .iter()
        .map(|p| Compiled::new(p, &field))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = seeded(0x1d6);
    let mut data = Vec::with_capacity(INDEPENDENCE_POINTS * polys.len());
    for _ in 0..INDEPENDENCE_POINTS {
        let point: Vec<u64> = (0..36).map(|_| field.random_uniform(&mut rng)).collect();
        data.extend(compiled.iter().map(|c| c.eval(&field, &point)));
    }
    Matrix::new(field, INDEPENDENCE_POINTS, polys.len(), data)?.rank()
}

/// Flat term list over the 36 tensor variables.
#[derive(Debug, Clone)]
struct Compiled<E> {
    terms: Vec<(E, Vec<u16>)>,
}

impl<E: Clone> Compiled<E> {
    fn new<F: Field<Elem = E>>(p: &MultiPoly<Rationals>, field: &F) -> Result<Self> {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let vars = m
                    .exps()
                    .iter()
                    .flat_map(|&(id, e)| std::iter::repeat(id).take(e as usize))
                    .collect();
                Ok((field.from_rational(c)?, vars))
            })
            .collect::<Result<_>>()?;
        Ok(Compiled { terms })
    }

    fn eval<F: Field<Elem = E>>(&self, field: &F, values: &[E]) -> E {
        let mut total = field.zero();
        for (c, vars) in &self.terms {
            let mut t = c.clone();
            for &v in vars {
                t = field.mul(&t, &values[v as usize]);
            }
            total = field.add(&total, &t);
        }
        total
    }
}

/// The family with coefficients in a fixed field.
#[derive(Debug, Clone)]
pub struct CompiledFamily<F: Field> {
    field: F,
    polys: Vec<Compiled<F::Elem>>,
}

impl<F: Field> CompiledFamily<F> {
    /// Values at a 3x3x4 tensor, in family order.
    pub fn eval(&self, t: &Tensor3<F>) -> Result<Vec<F::Elem>> {
        t.require_dims((3, 3, 4))?;
        let values = t.registry_values(&registry())?;
        Ok(self.eval_values(&values))
    }

    /// Values at raw variable values indexed like the 3x3x4 registry.
    pub fn eval_values(&self, values: &[F::Elem]) -> Vec<F::Elem> {
        self.polys
            .iter()
            .map(|c| c.eval(&self.field, values))
            .collect()
    }

    /// Index and value of the first nonzero evaluation.
    pub fn first_nonzero(&self, t: &Tensor3<F>) -> Result<Option<(usize, F::Elem)>> {
        Ok(self
            .eval(t)?
            .into_iter()
            .enumerate()
            .find(|(_, v)| !self.field.is_zero(v)))
    }
}

/// Outcome for one polynomial of the restricted-identity audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedEntry {
    /// 1-based position in the family.
    pub index: usize,
    pub terms: usize,
    /// Slice pair `(k, l)` of the quotient `c * x(3,3,k) * x(3,3,l)`.
    pub pair: Option<(usize, usize)>,
    pub scalar: Option<String>,
    pub problem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedIdentityReport {
    pub pass: bool,
    pub expected_terms: usize,
    pub entries: Vec<RestrictedEntry>,
    /// Pairs hit by no polynomial, then pairs hit more than once.
    pub missing_pairs: Vec<(usize, usize)>,
    pub repeated_pairs: Vec<(usize, usize)>,
}

/// Number of terms of each restricted polynomial: the 24 terms of the
/// 4x4 determinant times one monomial.
pub const RESTRICTED_TERMS: usize = 24;

/// Restrict every polynomial to the special zero pattern, divide by the
/// determinant polynomial and identify the quotient as `c * x33k * x33l`.
pub fn restricted_identity_check(polys: &[MultiPoly<Rationals>]) -> RestrictedIdentityReport {
    let reg = registry();
    let zero_ids: Vec<_> = crate::tensor::special_zero_positions()
        .into_iter()
        .map(|(i, j, k)| reg.x(i, j, k))
        .collect();
    let f = f_poly(&Rationals);
    let mut entries = Vec::new();
    let mut hits = vec![0usize; 10];
    let pairs = slice_pairs();
    for (n, p) in polys.iter().enumerate() {
        let r = p.restrict_zero(|id| zero_ids.contains(&id));
        let mut e = RestrictedEntry {
            index: n + 1,
            terms: r.num_terms(),
            pair: None,
            scalar: None,
            problem: None,
        };
        if r.is_zero() {
            e.problem = Some("restriction vanishes".into());
        } else if r.num_terms() != RESTRICTED_TERMS {
            e.problem = Some(format!(
                "restriction has {} terms, expected {RESTRICTED_TERMS}",
                r.num_terms()
            ));
        }
        match r.div_exact(&f) {
            Err(_) => {
                e.problem.get_or_insert_with(|| "not divisible by the determinant".into());
            }
            Ok(q) => match quotient_pair(&q, &reg) {
                Some((pair, c)) => {
                    e.pair = Some(pair);
                    e.scalar = Some(Rationals.format(&c));
                    hits[pairs.iter().position(|&x| x == pair).expect("valid pair")] += 1;
                }
                None => {
                    e.problem
                        .get_or_insert_with(|| "quotient is not a multiple of x33k*x33l".into());
                }
            },
        }
        entries.push(e);
    }
    let missing_pairs: Vec<_> = pairs.iter().zip(&hits).filter(|(_, &h)| h == 0).map(|(p, _)| *p).collect();
    let repeated_pairs: Vec<_> = pairs.iter().zip(&hits).filter(|(_, &h)| h > 1).map(|(p, _)| *p).collect();
    RestrictedIdentityReport {
        pass: polys.len() == FAMILY_SIZE
            && entries.iter().all(|e| e.problem.is_none())
            && missing_pairs.is_empty()
            && repeated_pairs.is_empty(),
        expected_terms: RESTRICTED_TERMS,
        entries,
        missing_pairs,
        repeated_pairs,
    }
}

/// `Some(((k, l), c))` when `q = c * x(3,3,k) * x(3,3,l)` with `k <= l`.
fn quotient_pair(q: &MultiPoly<Rationals>, reg: &VarRegistry) -> Option<((usize, usize), BigRational)> {
    if q.num_terms() != 1 {
        return None;
    }
    let (m, c) = q.terms().next()?;
    let slices: Vec<usize> = (1..=4)
        .flat_map(|k| std::iter::repeat(k).take(m.exponent(reg.x(3, 3, k)) as usize))
        .collect();
    let [k, l] = slices.as_slice() else { return None };
    let expected = Monomial::var(reg.x(3, 3, *k)).mul(&Monomial::var(reg.x(3, 3, *l)));
    (m == &expected).then(|| ((*k, *l), c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    #[test]
    fn bundled_family_is_valid() {
        let fam = LmFamily::bundled();
        assert_eq!(fam.polys().len(), 10);
        assert!(fam.polys().iter().all(|p| p.degree() == 6 && p.is_homogeneous()));
        let again = LmFamily::parse(&fam.to_text(), "round trip").unwrap();
        assert_eq!(again.polys(), fam.polys());
    }

    #[test]
    fn rejects_wrong_count_and_degree() {
        let fam = LmFamily::bundled();
        let text = fam.to_text();
        let nine: String = text.lines().take(9).map(|l| format!("{l}\n")).collect();
        assert!(matches!(LmFamily::parse(&nine, "t"), Err(Error::InvalidFamily(_))));

        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3].push_str(" + x_1_1_1^5");
        assert!(matches!(LmFamily::parse(&lines.join("\n"), "t"), Err(Error::InvalidFamily(_))));

        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[9] = lines[0].clone();
        assert!(matches!(LmFamily::parse(&lines.join("\n"), "t"), Err(Error::InvalidFamily(_))));
    }

    #[test]
    fn restricted_identity_holds() {
        let fam = LmFamily::bundled();
        let report = restricted_identity_check(fam.polys());
        assert!(report.pass, "{report:#?}");
        assert!(report.entries.iter().all(|e| e.terms == 24));
    }

    #[test]
    fn restricted_identity_flags_bad_member() {
        let fam = LmFamily::bundled();
        let reg = registry();
        let mut polys = fam.polys().to_vec();
        let x111 = MultiPoly::var(Rationals, reg.x(1, 1, 1));
        polys[4] = f_poly(&Rationals).mul(&x111).mul(&x111);
        let report = restricted_identity_check(&polys);
        assert!(!report.pass);
        assert!(report.entries[4].problem.is_some());
        assert_eq!(report.missing_pairs.len(), 1);
    }

    #[test]
    fn vanishes_on_rank_four() {
        let fam = LmFamily::bundled();
        let f = PrimeField::new(crate::field::P31).unwrap();
        let compiled = fam.in_field(&f).unwrap();
        for seed in 0..10 {
            let t = sample::rank_r(f, (3, 3, 4), 4, 1 << 20, seed);
            assert!(compiled.eval(&t).unwrap().iter().all(|v| *v == 0));
            let t = sample::rank_r(Rationals, (3, 3, 4), 4, 9, seed);
            assert!(fam.eval(&t).unwrap().iter().all(|v| Rationals.is_zero(v)));
        }
        let t = sample::dense(f, (3, 3, 4), 1 << 20, 5);
        assert!(compiled.first_nonzero(&t).unwrap().is_some());
    }
}
