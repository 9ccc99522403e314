//! Symmetrization systems of a 3x3x4 tensor.
//!
//! `C_L vec(L)` stacks the strictly upper entries of `L X_k - X_k^T L^T` and
//! `C_R vec(R)` those of `X_k R - R^T X_k^T`, for the four frontal slices.
//! Rows are ordered slice-major, then (1,2), (1,3), (2,3); columns are
//! `vec(L)` row-major. Border rank at most 4 forces both matrices to have
//! rank at most 8 (the degree-9 conditions), and when both ranks are 8 the
//! kernel directions must satisfy the trace condition (degree 16).

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{combinations, Matrix, Minor};
use crate::report::{MembershipReport, Stage, Witness};
use crate::tensor::Tensor3;

/// Strict-upper positions of a 3x3 skew matrix, 0-based.
pub const UPPER: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
pub const SYS_ROWS: usize = 12;
pub const SYS_COLS: usize = 9;
/// Number of 9x9 minors of a 12x9 matrix.
pub const MINORS_PER_MATRIX: usize = 220;

/// 1-based `(k, a, b)` label of each row.
pub fn row_map() -> Vec<(usize, usize, usize)> {
    (0..4)
        .flat_map(|k| UPPER.iter().map(move |&(a, b)| (k + 1, a + 1, b + 1)))
        .collect()
}

/// 1-based matrix position `(r, c)` of each column.
pub fn col_map() -> Vec<(usize, usize)> {
    (0..9).map(|c| (c / 3 + 1, c % 3 + 1)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "CL",
            Side::Right => "CR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymSystem<F: Field> {
    pub cl: Matrix<F>,
    pub cr: Matrix<F>,
}

impl<F: Field> SymSystem<F> {
    pub fn matrix(&self, side: Side) -> &Matrix<F> {
        match side {
            Side::Left => &self.cl,
            Side::Right => &self.cr,
        }
    }
}

/// Entry `(row, col)` of one system as a signed sum of slice entries
/// `(negated, k, i, j)`, 0-based.
pub fn entry_form(side: Side, row: usize, col: usize) -> Vec<(bool, usize, usize, usize)> {
    let (k, a, b) = (row / 3, UPPER[row % 3].0, UPPER[row % 3].1);
    let (r, c) = (col / 3, col % 3);
    let mut out = Vec::with_capacity(2);
    match side {
        // coefficient of L[r,c] in (L X - X^T L^T)[a,b]
        Side::Left => {
            if r == a {
                out.push((false, k, c, b));
            }
            if r == b {
                out.push((true, k, c, a));
            }
        }
        // coefficient of R[r,c] in (X R - R^T X^T)[a,b]
        Side::Right => {
            if c == b {
                out.push((false, k, a, r));
            }
            if c == a {
                out.push((true, k, b, r));
            }
        }
    }
    out
}

/// The two 12x9 systems from four 3x3 slices.
pub fn sym_from_slices<F: Field>(field: &F, xs: &[Matrix<F>]) -> SymSystem<F> {
    assert_eq!(xs.len(), 4, "four slices");
    let f = field;
    let build = |side| {
        Matrix::from_elems(f.clone(), SYS_ROWS, SYS_COLS, |row, col| {
            entry_form(side, row, col)
                .into_iter()
                .fold(f.zero(), |acc, (neg, k, i, j)| {
                    let x = xs[k].get(i, j);
                    if neg {
                        f.sub(&acc, x)
                    } else {
                        f.add(&acc, x)
                    }
                })
        })
    };
    SymSystem {
        cl: build(Side::Left),
        cr: build(Side::Right),
    }
}

pub fn build_sym_matrices<F: Field>(t: &Tensor3<F>) -> Result<SymSystem<F>> {
    t.require_dims((3, 3, 4))?;
    Ok(sym_from_slices(t.field(), &t.slices(3)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTest<E> {
    pub pass: bool,
    pub rank_l: usize,
    pub rank_r: usize,
    /// One nonzero 9x9 minor per matrix of full column rank.
    pub witnesses: Vec<(Side, Minor<E>)>,
}

/// Rank test of both systems; a failing matrix yields the minor on its
/// pivot rows.
pub fn sym9_test<F: Field>(s: &SymSystem<F>) -> Result<SymTest<F::Elem>> {
    let mut ranks = [0; 2];
    let mut witnesses = Vec::new();
    for (n, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        let m = s.matrix(side);
        let profile = m.rank_profile()?;
        ranks[n] = profile.rank;
        if profile.rank == SYS_COLS {
            let mut rows = profile.pivot_rows.clone();
            rows.sort_unstable();
            let cols: Vec<usize> = (0..SYS_COLS).collect();
            let value = m.submatrix(&rows, &cols).det()?;
            debug_assert!(!m.field().is_zero(&value));
            witnesses.push((side, Minor { rows, cols, value }));
        }
    }
    Ok(SymTest {
        pass: witnesses.is_empty(),
        rank_l: ranks[0],
        rank_r: ranks[1],
        witnesses,
    })
}

/// All 440 maximal minors, left system first, each in lexicographic order.
pub fn sym9_minors<F: Field>(s: &SymSystem<F>) -> Result<Vec<(Side, Minor<F::Elem>)>> {
    let mut out = Vec::with_capacity(2 * MINORS_PER_MATRIX);
    for side in [Side::Left, Side::Right] {
        out.extend(s.matrix(side).minor_values(SYS_COLS)?.into_iter().map(|m| (side, m)));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrPair<F: Field> {
    pub rank_l: usize,
    pub rank_r: usize,
    /// Kernel directions when both ranks are 8.
    pub lr: Option<(Matrix<F>, Matrix<F>)>,
}

impl<F: Field> LrPair<F> {
    pub fn defined(&self) -> bool {
        self.lr.is_some()
    }
}

fn reshape<F: Field>(field: &F, v: &[F::Elem]) -> Matrix<F> {
    Matrix::from_elems(field.clone(), 3, 3, |r, c| v[3 * r + c].clone())
}

/// Kernel directions of both systems, reshaped row-major. Undefined when
/// either rank is at most 7; full rank is a precondition violation.
pub fn extract_lr<F: Field>(s: &SymSystem<F>) -> Result<LrPair<F>> {
    let f = s.cl.field().clone();
    let kl = s.cl.kernel_basis()?;
    let kr = s.cr.kernel_basis()?;
    let (rank_l, rank_r) = (SYS_COLS - kl.len(), SYS_COLS - kr.len());
    if rank_l == SYS_COLS || rank_r == SYS_COLS {
        return Err(Error::Precondition(format!(
            "symmetrization system has full rank (ranks {rank_l}, {rank_r})"
        )));
    }
    let lr = (kl.len() == 1 && kr.len() == 1).then(|| (reshape(&f, &kl[0]), reshape(&f, &kr[0])));
    Ok(LrPair { rank_l, rank_r, lr })
}

/// Kernel vectors written as signed 8x8 minors: for every 8-row subset,
/// entry `c` is `(-1)^c` times the minor omitting column `c`. Nonzero
/// results are multiples of the kernel direction when the rank is 8; every
/// result vanishes when the rank is lower.
pub fn minor_kernel_expressions<F: Field>(c: &Matrix<F>) -> Result<Vec<(Vec<usize>, Vec<F::Elem>)>> {
    let f = c.field();
    let cols: Vec<usize> = (0..c.cols()).collect();
    let mut out = Vec::new();
    for rows in combinations(c.rows(), c.cols() - 1) {
        let sub = c.submatrix(&rows, &cols);
        let v = (0..c.cols())
            .map(|omit| {
                let keep: Vec<usize> = cols.iter().copied().filter(|&x| x != omit).collect();
                let d = sub.submatrix(&(0..rows.len()).collect::<Vec<_>>(), &keep).det()?;
                Ok(if omit % 2 == 0 { d } else { f.neg(&d) })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push((rows, v));
    }
    Ok(out)
}

/// `L R^T = R^T L = (tr(L R^T) / 3) I`. Returns the first violated entry.
pub fn trace16_witness<F: Field>(l: &Matrix<F>, r: &Matrix<F>) -> Result<Option<Witness>> {
    if !F::EXACT {
        return Err(Error::InexactMode("trace condition".into()));
    }
    let f = l.field();
    let rt = r.transpose();
    let lrt = l.mul(&rt)?;
    let rtl = rt.mul(l)?;
    let third = f.inv(&f.from_i64(3)).expect("characteristic is not 3");
    let t = f.mul(&lrt.trace()?, &third);
    let target = Matrix::identity(f.clone(), 3).scale(&t);
    for (name, m) in [("L*R^T", &lrt), ("R^T*L", &rtl)] {
        let d = m.sub(&target)?;
        for i in 0..3 {
            for j in 0..3 {
                if !f.is_zero(d.get(i, j)) {
                    return Ok(Some(Witness::Trace {
                        product: name.to_string(),
                        row: i + 1,
                        col: j + 1,
                        value: f.format(m.get(i, j)),
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn trace16_check<F: Field>(l: &Matrix<F>, r: &Matrix<F>) -> Result<bool> {
    Ok(trace16_witness(l, r)?.is_none())
}

pub(crate) fn minor_witness<F: Field>(field: &F, side: Side, m: &Minor<F::Elem>) -> Witness {
    Witness::Minor {
        matrix: side.label().to_string(),
        rows: m.rows.iter().map(|r| r + 1).collect(),
        cols: m.cols.iter().map(|c| c + 1).collect(),
        value: field.format(&m.value),
    }
}

/// Stage for the degree-9 conditions.
pub fn sym9_stage<F: Field>(s: &SymSystem<F>) -> Result<Stage> {
    let test = sym9_test(s)?;
    let f = s.cl.field();
    let witness = test.witnesses.first().map(|(side, m)| minor_witness(f, *side, m));
    Ok(Stage::new("sym9", test.pass, witness)
        .with_note(format!("ranks {} {}", test.rank_l, test.rank_r)))
}

/// Degree 9 plus degree 16 membership.
pub fn membership_route_a<F: Field>(t: &Tensor3<F>) -> Result<MembershipReport> {
    let s = build_sym_matrices(t)?;
    let mode = t.field().mode().to_string();
    let first = sym9_stage(&s)?;
    let mut stages = vec![first];
    if stages[0].pass {
        let lr = extract_lr(&s)?;
        stages.push(match &lr.lr {
            None => Stage::new("trace16", true, None).with_note(format!(
                "vacuous: ranks {} {}",
                lr.rank_l, lr.rank_r
            )),
            Some((l, r)) => {
                let w = trace16_witness(l, r)?;
                Stage::new("trace16", w.is_none(), w)
            }
        });
    }
    Ok(MembershipReport::from_stages("A", mode, stages, None))
}
