//! Sparse multivariate polynomials over a fixed variable registry.
//!
//! Monomials are sparse exponent vectors sorted by variable id. Terms are
//! kept in a `BTreeMap` under graded-lexicographic order, with variable ids
//! ordered x < u < p < q and lexicographically by indices inside a class, so
//! the leading term is the largest key and serialization is deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::Field;

pub type VarId = u16;

/// A structured variable name. Indices are 1-based. The derived order is the
/// registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Tensor entry x(i,j,k).
    X(u8, u8, u8),
    /// Coefficient u(j,i) of slice j in the i-th combination U_i.
    U(u8, u8),
    /// Entry p(a,b) of the left transformation.
    P(u8, u8),
    /// Entry q(a,b) of the right transformation.
    Q(u8, u8),
}

const U_ROWS: usize = 4;
const U_COLS: usize = 3;
const PQ_DIM: usize = 4;

/// Variable registry: tensor entries for fixed dimensions plus the u, p and q
/// substitution variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarRegistry {
    dims: (usize, usize, usize),
}

impl VarRegistry {
    pub fn new(m: usize, n: usize, l: usize) -> Self {
        VarRegistry { dims: (m, n, l) }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    fn nx(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn len(&self) -> usize {
        self.nx() + U_ROWS * U_COLS + 2 * PQ_DIM * PQ_DIM
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn id(&self, v: Var) -> Option<VarId> {
        let (m, n, l) = self.dims;
        let in_range = |v: u8, hi: usize| v >= 1 && (v as usize) <= hi;
        let id = match v {
            Var::X(i, j, k) => {
                if !(in_range(i, m) && in_range(j, n) && in_range(k, l)) {
                    return None;
                }
                ((i as usize - 1) * n + (j as usize - 1)) * l + (k as usize - 1)
            }
            Var::U(j, i) => {
                if !(in_range(j, U_ROWS) && in_range(i, U_COLS)) {
                    return None;
                }
                self.nx() + (j as usize - 1) * U_COLS + (i as usize - 1)
            }
            Var::P(a, b) | Var::Q(a, b) => {
                if !(in_range(a, PQ_DIM) && in_range(b, PQ_DIM)) {
                    return None;
                }
                let base = self.nx()
                    + U_ROWS * U_COLS
                    + if matches!(v, Var::Q(..)) { PQ_DIM * PQ_DIM } else { 0 };
                base + (a as usize - 1) * PQ_DIM + (b as usize - 1)
            }
        };
        Some(id as VarId)
    }

    pub fn var(&self, id: VarId) -> Var {
        let (_, n, l) = self.dims;
        let mut r = id as usize;
        if r < self.nx() {
            let k = r % l;
            let j = (r / l) % n;
            let i = r / (l * n);
            return Var::X(i as u8 + 1, j as u8 + 1, k as u8 + 1);
        }
        r -= self.nx();
        if r < U_ROWS * U_COLS {
            return Var::U((r / U_COLS) as u8 + 1, (r % U_COLS) as u8 + 1);
        }
        r -= U_ROWS * U_COLS;
        let (a, b) = (((r % 16) / PQ_DIM) as u8 + 1, (r % PQ_DIM) as u8 + 1);
        if r < PQ_DIM * PQ_DIM {
            Var::P(a, b)
        } else {
            Var::Q(a, b)
        }
    }

    /// Id of x(i,j,k); panics when out of range.
    pub fn x(&self, i: usize, j: usize, k: usize) -> VarId {
        self.id(Var::X(i as u8, j as u8, k as u8))
            .unwrap_or_else(|| panic!("x({i},{j},{k}) outside registry {:?}", self.dims))
    }

    pub fn u(&self, j: usize, i: usize) -> VarId {
        self.id(Var::U(j as u8, i as u8)).expect("u index in range")
    }

    pub fn p(&self, a: usize, b: usize) -> VarId {
        self.id(Var::P(a as u8, b as u8)).expect("p index in range")
    }

    pub fn q(&self, a: usize, b: usize) -> VarId {
        self.id(Var::Q(a as u8, b as u8)).expect("q index in range")
    }

    pub fn is_x(&self, id: VarId) -> bool {
        (id as usize) < self.nx()
    }

    pub fn is_u(&self, id: VarId) -> bool {
        matches!(self.var(id), Var::U(..))
    }

    pub fn is_pq(&self, id: VarId) -> bool {
        matches!(self.var(id), Var::P(..) | Var::Q(..))
    }

    pub fn name(&self, id: VarId) -> String {
        match self.var(id) {
            Var::X(i, j, k) => format!("x_{i}_{j}_{k}"),
            Var::U(j, i) => format!("u_{j}_{i}"),
            Var::P(a, b) => format!("p_{a}_{b}"),
            Var::Q(a, b) => format!("q_{a}_{b}"),
        }
    }

    pub fn parse_name(&self, s: &str) -> Option<VarId> {
        let mut parts = s.split('_');
        let class = parts.next()?;
        let idx: Vec<u8> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        let v = match (class, idx.as_slice()) {
            ("x", &[i, j, k]) => Var::X(i, j, k),
            ("u", &[j, i]) => Var::U(j, i),
            ("p", &[a, b]) => Var::P(a, b),
            ("q", &[a, b]) => Var::Q(a, b),
            _ => return None,
        };
        self.id(v)
    }
}

/// Sparse exponent vector, sorted by variable id, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[(VarId, u16); 6]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(id: VarId) -> Self {
        Self::var_pow(id, 1)
    }

    pub fn var_pow(id: VarId, e: u16) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut exps = SmallVec::new();
        exps.push((id, e));
        Monomial {
            deg: e as u32,
            exps,
        }
    }

    /// Normalizes arbitrary (id, exponent) pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, u16)>) -> Self {
        let mut v: SmallVec<[(VarId, u16); 6]> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort_unstable_by_key(|p| p.0);
        let mut exps: SmallVec<[(VarId, u16); 6]> = SmallVec::new();
        for (id, e) in v {
            match exps.last_mut() {
                Some(last) if last.0 == id => last.1 += e,
                _ => exps.push((id, e)),
            }
        }
        let deg = exps.iter().map(|p| p.1 as u32).sum();
        Monomial { deg, exps }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[(VarId, u16)] {
        &self.exps
    }

    pub fn exponent(&self, id: VarId) -> u16 {
        self.exps
            .binary_search_by_key(&id, |p| p.0)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.exps, &other.exps);
        let mut exps = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    exps.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&a[i..]);
        exps.extend_from_slice(&b[j..]);
        Monomial {
            deg: self.deg + other.deg,
            exps,
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.deg > self.deg {
            return None;
        }
        let mut exps = SmallVec::new();
        let mut j = 0;
        for &(id, e) in &self.exps {
            if j < other.exps.len() && other.exps[j].0 == id {
                let d = other.exps[j].1;
                if d > e {
                    return None;
                }
                if e > d {
                    exps.push((id, e - d));
                }
                j += 1;
            } else if j < other.exps.len() && other.exps[j].0 < id {
                return None;
            } else {
                exps.push((id, e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial {
            deg: self.deg - other.deg,
            exps,
        })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.div(self).is_some()
    }

    /// Split into the part over variables selected by `pred` and the rest.
    pub fn split(&self, pred: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.exps.iter().partition(|p| pred(p.0));
        (Monomial::from_pairs(a), Monomial::from_pairs(b))
    }

    pub fn degree_in(&self, pred: impl Fn(VarId) -> bool) -> u32 {
        self.exps
            .iter()
            .filter(|p| pred(p.0))
            .map(|p| p.1 as u32)
            .sum()
    }

    pub fn format(&self, reg: &VarRegistry) -> String {
        let mut s = String::new();
        for (n, &(id, e)) in self.exps.iter().enumerate() {
            if n > 0 {
                s.push('*');
            }
            s.push_str(&reg.name(id));
            if e > 1 {
                let _ = write!(s, "^{e}");
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// largest variable where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            let (a, b) = (&self.exps, &other.exps);
            let (mut i, mut j) = (a.len(), b.len());
            loop {
                match (i, j) {
                    (0, 0) => return Ordering::Equal,
                    (_, 0) => return Ordering::Greater,
                    (0, _) => return Ordering::Less,
                    _ => {}
                }
                let (va, ea) = a[i - 1];
                let (vb, eb) = b[j - 1];
                match va.cmp(&vb) {
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal if ea != eb => return ea.cmp(&eb),
                    Ordering::Equal => {
                        i -= 1;
                        j -= 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<F: Field> {
    field: F,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: F) -> Self {
        MultiPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::monomial(field, Monomial::one(), c)
    }

    pub fn var(field: F, id: VarId) -> Self {
        let one = field.one();
        Self::monomial(field, Monomial::var(id), one)
    }

    pub fn monomial(field: F, m: Monomial, c: F::Elem) -> Self {
        let mut p = Self::zero(field);
        p.add_term(m, c);
        p
    }

    /// Sum of the given terms; repeated monomials are combined.
    pub fn from_terms(field: F, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(v) => *v = field.add(v, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        MultiPoly { field, terms }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.exps().iter().map(|p| p.0))
            .collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = self.field.add(v, &c);
                if self.field.is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(
            self.field, other.field,
            "polynomials over different fields combined"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_field(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        if self.field.is_zero(s) {
            return Self::zero(self.field.clone());
        }
        MultiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.field.mul(c, s)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let f = &self.field;
        let mut acc: HashMap<Monomial, F::Elem> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = f.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(v) => *v = f.add(v, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        MultiPoly {
            field: f.clone(),
            terms: acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f.clone());
        }
        MultiPoly {
            field: f.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, v)| (t.mul(m), f.mul(v, c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.field.clone(), self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient `self / g`. A nonzero remainder is reported as
    /// [`Error::NotDivisible`].
    pub fn div_exact(&self, g: &Self) -> Result<Self> {
        self.check_field(g);
        let f = &self.field;
        let (lm_g, lc_g) = g.leading_term().ok_or(Error::DivisionByZero)?;
        let inv = f.inv(lc_g).ok_or(Error::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = Self::zero(f.clone());
        while let Some((lm, lc)) = rem.leading_term() {
            let m = lm.div(lm_g).ok_or(Error::NotDivisible)?;
            let c = f.mul(lc, &inv);
            for (t, v) in &g.terms {
                rem.add_term(t.mul(&m), f.neg(&f.mul(v, &c)));
            }
            quot.add_term(m, c);
        }
        Ok(quot)
    }

    /// Group terms by their monomial in the selected variables. Coefficient
    /// polynomials contain none of the selected variables.
    pub fn extract_coeffs(&self, pred: impl Fn(VarId) -> bool) -> BTreeMap<Monomial, Self> {
        let mut out: BTreeMap<Monomial, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.split(&pred);
            out.entry(sel)
                .or_insert_with(|| Self::zero(self.field.clone()))
                .add_term(rest, c.clone());
        }
        out
    }

    /// Evaluate with a lookup; fails on the first variable without a value.
    pub fn eval_with<'a>(
        &self,
        lookup: impl Fn(VarId) -> Option<&'a F::Elem>,
        reg: &VarRegistry,
    ) -> Result<F::Elem>
    where
        F::Elem: 'a,
    {
        let f = &self.field;
        let mut total = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(id, e) in m.exps() {
                let v = lookup(id).ok_or_else(|| Error::MissingVariable(reg.name(id)))?;
                t = f.mul(&t, &f.pow(v, e as u32));
            }
            total = f.add(&total, &t);
        }
        Ok(total)
    }

    pub fn eval(&self, assignment: &HashMap<VarId, F::Elem>, reg: &VarRegistry) -> Result<F::Elem> {
        self.eval_with(|id| assignment.get(&id), reg)
    }

    /// Evaluate with values indexed by variable id. Panics when a variable
    /// of `self` is beyond `values`.
    pub fn eval_dense(&self, values: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let mut total = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(id, e) in m.exps() {
                let v = &values[id as usize];
                for _ in 0..e {
                    t = f.mul(&t, v);
                }
            }
            total = f.add(&total, &t);
        }
        total
    }

    /// Replace variables by polynomials; variables mapped to `None` stay.
    pub fn substitute(&self, map: impl Fn(VarId) -> Option<Self>) -> Self {
        let f = &self.field;
        let mut cache: HashMap<VarId, Option<Self>> = HashMap::new();
        let mut out = Self::zero(f.clone());
        for (m, c) in &self.terms {
            let mut term = Self::constant(f.clone(), c.clone());
            let mut kept = Vec::new();
            for &(id, e) in m.exps() {
                let image = cache.entry(id).or_insert_with(|| map(id));
                match image {
                    Some(p) => {
                        for _ in 0..e {
                            term = term.mul(p);
                        }
                    }
                    None => kept.push((id, e)),
                }
                if term.is_zero() {
                    break;
                }
            }
            if term.is_zero() {
                continue;
            }
            let kept = Monomial::from_pairs(kept);
            for (t, v) in term.terms {
                out.add_term(t.mul(&kept), v);
            }
        }
        out
    }

    pub fn derivative(&self, id: VarId) -> Self {
        let f = &self.field;
        let x = Monomial::var(id);
        let mut out = Self::zero(f.clone());
        for (m, c) in &self.terms {
            let e = m.exponent(id);
            if e > 0 {
                let q = m.div(&x).expect("variable present");
                out.add_term(q, f.mul(c, &f.from_i64(e as i64)));
            }
        }
        out
    }

    /// Set the selected variables to zero.
    pub fn restrict_zero(&self, pred: impl Fn(VarId) -> bool) -> Self {
        MultiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exps().iter().all(|p| !pred(p.0)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Map coefficients into another field; terms that vanish are dropped.
    pub fn map_field<G: Field>(
        &self,
        target: &G,
        conv: impl Fn(&F::Elem) -> Result<G::Elem>,
    ) -> Result<MultiPoly<G>> {
        let mut out = MultiPoly::zero(target.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), conv(c)?);
        }
        Ok(out)
    }

    /// Rename variables through `map` (e.g. between registries).
    pub fn rename(&self, map: impl Fn(VarId) -> VarId) -> Self {
        Self::from_terms(
            self.field.clone(),
            self.terms.iter().map(|(m, c)| {
                (
                    Monomial::from_pairs(m.exps().iter().map(|&(id, e)| (map(id), e))),
                    c.clone(),
                )
            }),
        )
    }

    /// Text form: terms in descending order, e.g. `3*x_1_1_1^2 - x_2_2_1`.
    pub fn to_text(&self, reg: &VarRegistry, coeff: impl Fn(&F::Elem) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (n, (m, c)) in self.terms().enumerate() {
            let cs = coeff(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            match (n, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if m.is_one() {
                s.push_str(&mag);
            } else {
                if mag != "1" {
                    s.push_str(&mag);
                    s.push('*');
                }
                s.push_str(&m.format(reg));
            }
        }
        s
    }
}

/// Parse one polynomial in the text format: terms `[sign] coefficient
/// (*name[^e])*`, whitespace ignored. A bare monomial has coefficient 1.
pub fn parse_poly<F: Field>(field: &F, reg: &VarRegistry, text: &str) -> Result<MultiPoly<F>> {
    let err = |msg: String| Error::Parse { line: 0, msg };
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty polynomial".into()));
    }
    let bytes = s.as_bytes();
    let mut starts = vec![0];
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && bytes[i - 1] != b'^' {
            starts.push(i);
        }
    }
    starts.push(s.len());
    let mut poly = MultiPoly::zero(field.clone());
    for w in starts.windows(2) {
        let term = &s[w[0]..w[1]];
        let (negative, body) = match term.as_bytes()[0] {
            b'-' => (true, &term[1..]),
            b'+' => (false, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(err(format!("dangling sign in '{term}'")));
        }
        let mut coeff = field.one();
        let mut seen_coeff = false;
        let mut pairs = Vec::new();
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(err(format!("empty factor in '{term}'")));
            }
            if factor.as_bytes()[0].is_ascii_digit() {
                if seen_coeff {
                    return Err(err(format!("two coefficients in '{term}'")));
                }
                seen_coeff = true;
                coeff = field.parse(factor).map_err(|_| err(format!("bad coefficient '{factor}'")))?;
                continue;
            }
            let (name, e) = match factor.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<u16>()
                        .map_err(|_| err(format!("bad exponent in '{factor}'")))?,
                ),
                None => (factor, 1),
            };
            let id = reg
                .parse_name(name)
                .ok_or_else(|| err(format!("unknown variable '{name}'")))?;
            pairs.push((id, e));
        }
        if negative {
            coeff = field.neg(&coeff);
        }
        poly.add_term(Monomial::from_pairs(pairs), coeff);
    }
    Ok(poly)
}

/// Parse a file with one polynomial per line; `#` starts a comment.
pub fn parse_poly_lines<F: Field>(
    field: &F,
    reg: &VarRegistry,
    text: &str,
) -> Result<Vec<MultiPoly<F>>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = parse_poly(field, reg, line).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: n + 1, msg },
            other => other,
        })?;
        out.push(p);
    }
    Ok(out)
}

/// One polynomial per line, preceded by `# ` comment lines.
pub fn format_poly_lines<F: Field>(reg: &VarRegistry, polys: &[MultiPoly<F>], header: &[String]) -> String {
    let mut s = String::new();
    for h in header {
        s.push_str("# ");
        s.push_str(h);
        s.push('\n');
    }
    for p in polys {
        s.push_str(&p.to_text(reg, |c| p.field().format(c)));
        s.push('\n');
    }
    s
}

/// Determinant of a square matrix of polynomials by expansion along rows,
/// memoized on the set of used columns.
pub fn poly_det<F: Field>(field: &F, entries: &[Vec<MultiPoly<F>>]) -> MultiPoly<F> {
    poly_det_capped(field, entries, usize::MAX).expect("no cap")
}

/// [`poly_det`] failing once the partial determinants of one expansion
/// level hold more than `cap` terms together.
pub fn poly_det_capped<F: Field>(
    field: &F,
    entries: &[Vec<MultiPoly<F>>],
    cap: usize,
) -> Result<MultiPoly<F>> {
    let n = entries.len();
    if n == 0 {
        return Ok(MultiPoly::constant(field.clone(), field.one()));
    }
    assert!(n <= 16, "symbolic determinant limited to 16x16");
    // memo[mask] = det of rows (n - popcount(mask) .. n) restricted to the
    // columns not in mask, built bottom-up.
    let full = (1u32 << n) - 1;
    let mut memo: HashMap<u32, MultiPoly<F>> = HashMap::new();
    memo.insert(full, MultiPoly::constant(field.clone(), field.one()));
    for row in (0..n).rev() {
        let used = row as u32;
        let mut next: HashMap<u32, MultiPoly<F>> = HashMap::new();
        for mask in 0..=full {
            if mask.count_ones() != used {
                continue;
            }
            let mut acc = MultiPoly::zero(field.clone());
            let mut sign_pos = 0;
            for col in 0..n {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let e = &entries[row][col];
                if !e.is_zero() {
                    if let Some(sub) = memo.get(&(mask | (1 << col))) {
                        let t = e.mul(sub);
                        acc = if sign_pos % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
                    }
                }
                sign_pos += 1;
            }
            if !acc.is_zero() {
                next.insert(mask, acc);
            }
        }
        let held: usize = next.values().map(|p| p.num_terms()).sum();
        if held > cap {
            return Err(Error::BudgetExceeded {
                cap,
                context: format!("expanding row {} of a {n}x{n} determinant", row + 1),
            });
        }
        memo = next;
    }
    Ok(memo.remove(&0).unwrap_or_else(|| MultiPoly::zero(field.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, P31};
    use num_rational::BigRational;

    fn reg() -> VarRegistry {
        VarRegistry::new(3, 3, 4)
    }

    fn p(s: &str) -> MultiPoly<Rationals> {
        parse_poly(&Rationals, &reg(), s).unwrap()
    }

    fn q(v: i64) -> BigRational {
        Rationals.from_i64(v)
    }

    #[test]
    fn registry_round_trip() {
        for r in [VarRegistry::new(3, 3, 4), VarRegistry::new(4, 4, 4)] {
            let mut prev: Option<Var> = None;
            for id in 0..r.len() as VarId {
                let v = r.var(id);
                assert_eq!(r.id(v), Some(id));
                assert_eq!(r.parse_name(&r.name(id)), Some(id));
                if let Some(pv) = prev {
                    assert!(pv < v, "registry order must follow variable order");
                }
                prev = Some(v);
            }
        }
        assert_eq!(reg().id(Var::X(4, 1, 1)), None);
        assert_eq!(reg().parse_name("x_1_1_5"), None);
        assert_eq!(reg().parse_name("y_1_1_1"), None);
    }

    #[test]
    fn grlex_order() {
        let r = reg();
        let a = Monomial::var(r.x(1, 1, 1));
        let b = Monomial::var(r.x(3, 3, 4));
        let c = Monomial::var_pow(r.x(1, 1, 1), 2);
        assert!(a < b);
        assert!(b < c);
        assert!(Monomial::one() < a);
        let u = Monomial::var(r.u(1, 1));
        assert!(b < u);
    }

    #[test]
    fn parse_and_print() {
        let f = p("3*x_1_1_1^2*x_2_2_3 - 2*x_1_2_1 + 5 - x_1_2_1");
        assert_eq!(f.num_terms(), 3);
        assert_eq!(f.degree(), 3);
        let text = f.to_text(&reg(), |c| Rationals.format(c));
        assert_eq!(text, "3*x_1_1_1^2*x_2_2_3 - 3*x_1_2_1 + 5");
        assert_eq!(p(&text), f);
        assert!(parse_poly(&Rationals, &reg(), "2*x_9_9_9").is_err());
        assert!(parse_poly(&Rationals, &reg(), "2**x_1_1_1").is_err());
        assert!(parse_poly(&Rationals, &reg(), "").is_err());
        let lines = "# header\n x_1_1_1 \n\n2*x_1_1_2 # trailing\n";
        assert_eq!(parse_poly_lines(&Rationals, &reg(), lines).unwrap().len(), 2);
        let err = parse_poly_lines(&Rationals, &reg(), "x_1_1_1\nx_1_1_?").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn zero_polynomial_degree() {
        let z = MultiPoly::zero(Rationals);
        assert_eq!(z.degree(), -1);
        assert!(z.is_homogeneous());
        assert_eq!(p("x_1_1_1 - x_1_1_1").degree(), -1);
    }

    #[test]
    fn exact_division() {
        let f = p("x_1_1_1^2 - x_2_2_2^2");
        let g = p("x_1_1_1 - x_2_2_2");
        assert_eq!(f.div_exact(&g).unwrap(), p("x_1_1_1 + x_2_2_2"));
        assert_eq!(MultiPoly::zero(Rationals).div_exact(&g).unwrap(), MultiPoly::zero(Rationals));
        assert_eq!(p("x_1_1_1^2 + 1").div_exact(&g), Err(Error::NotDivisible));
        assert_eq!(f.div_exact(&MultiPoly::zero(Rationals)), Err(Error::DivisionByZero));
    }

    #[test]
    fn coefficient_extraction() {
        let r = reg();
        let f = p("u_1_1*x_1_1_1 + u_1_1*x_1_1_2");
        let c = f.extract_coeffs(|id| r.is_u(id));
        assert_eq!(c.len(), 1);
        assert_eq!(c[&Monomial::var(r.u(1, 1))], p("x_1_1_1 + x_1_1_2"));
        let g = p("x_1_1_1^2");
        let c = g.extract_coeffs(|id| r.is_u(id));
        assert_eq!(c[&Monomial::one()], g);
    }

    #[test]
    fn evaluation() {
        let r = reg();
        let f = p("x_1_1_1 + x_1_1_2");
        let mut a = HashMap::new();
        a.insert(r.x(1, 1, 1), q(1));
        assert!(matches!(f.eval(&a, &r), Err(Error::MissingVariable(_))));
        a.insert(r.x(1, 1, 2), q(2));
        assert_eq!(f.eval(&a, &r).unwrap(), q(3));
    }

    #[test]
    fn substitution_and_restriction() {
        let r = reg();
        let f = p("x_1_1_1*x_1_1_2 + x_2_2_2");
        let g = f.substitute(|id| (id == r.x(1, 1, 1)).then(|| p("2 + x_3_3_3")));
        assert_eq!(g, p("2*x_1_1_2 + x_3_3_3*x_1_1_2 + x_2_2_2"));
        let h = f.restrict_zero(|id| id == r.x(2, 2, 2));
        assert_eq!(h, p("x_1_1_1*x_1_1_2"));
    }

    #[test]
    fn symbolic_det_2x2() {
        let a = p("x_1_1_1");
        let b = p("x_1_2_1");
        let c = p("x_2_1_1");
        let d = p("x_2_2_1");
        let det = poly_det(&Rationals, &[vec![a, b], vec![c, d]]);
        assert_eq!(det, p("x_1_1_1*x_2_2_1 - x_1_2_1*x_2_1_1"));
    }

    #[test]
    fn symbolic_det_agrees_with_numeric() {
        let r = reg();
        let f = PrimeField::new(P31).unwrap();
        // 4x4 matrix of distinct variables has 24 terms
        let vars: Vec<Vec<MultiPoly<PrimeField>>> = (0..4)
            .map(|row| {
                (0..4)
                    .map(|col| MultiPoly::var(f, r.x(1 + col / 3, 1 + col % 3, row + 1)))
                    .collect()
            })
            .collect();
        let det = poly_det(&f, &vars);
        assert_eq!(det.num_terms(), 24);
        assert!(det.is_homogeneous());
        let values: Vec<u64> = (0..r.len() as u64).map(|v| v * v + 3).collect();
        let numeric = crate::matrix::Matrix::from_elems(f, 4, 4, |i, j| {
            vars[i][j].eval_dense(&values)
        });
        assert_eq!(det.eval_dense(&values), numeric.det().unwrap());
    }

    #[test]
    fn derivative_of_power() {
        let r = reg();
        let p = |s: &str| parse_poly(&Rationals, &r, s).unwrap();
        let d = p("3*x_1_1_1^2*x_1_2_1 - x_1_2_1 + 5").derivative(r.x(1, 1, 1));
        assert_eq!(d, p("6*x_1_1_1*x_1_2_1"));
        assert!(p("x_2_2_2").derivative(r.x(1, 1, 1)).is_zero());
    }
}
