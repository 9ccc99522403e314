//! Normal forms of a pair of rank-one symmetrizers.
//!
//! With `A1 = P A Q`, `L1 = Q^T L P^-1` and `R1 = Q^-1 R P^T`, symmetry of
//! `L A` and `A R` carries over to `L1 A1` and `A1 R1`. The pair is moved to
//! `L1 ~ e3 e3^T` and `R1` one of `e3 e3^T`, `e3 e2^T`, `e2 e3^T`,
//! `e2 e2^T` (all up to scale).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseId {
    #[serde(rename = "E33_E33")]
    E33E33,
    #[serde(rename = "E33_E32")]
    E33E32,
    #[serde(rename = "E23_E33")]
    E23E33,
    #[serde(rename = "E22_E22")]
    E22E22,
}

impl CaseId {
    /// 0-based `(row, col)` of the single nonzero entry of `R1`.
    pub fn r1_position(self) -> (usize, usize) {
        match self {
            CaseId::E33E33 => (2, 2),
            CaseId::E33E32 => (2, 1),
            CaseId::E23E33 => (1, 2),
            CaseId::E22E22 => (1, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormCase<F: Field> {
    pub case_id: CaseId,
    pub p: Matrix<F>,
    pub q: Matrix<F>,
    pub l1: Matrix<F>,
    pub r1: Matrix<F>,
    /// The pattern-preserving steps applied after moving `L` to
    /// `e3 e3^T`: `P = p_step P0`, `Q^-1 = q_step Q0^-1`.
    pub p_step: Matrix<F>,
    pub q_step: Matrix<F>,
    /// The pair was replaced by `(R^T, L^T)`, i.e. the tensor by its
    /// transpose in the first two axes.
    pub transposed: bool,
}

fn col<F: Field>(m: &Matrix<F>, c: usize) -> Vec<F::Elem> {
    (0..m.rows()).map(|r| m.get(r, c).clone()).collect()
}

/// `M = u v^T` with `u` the first nonzero column of `M`.
pub fn rank_one_factor<F: Field>(m: &Matrix<F>) -> Result<(Vec<F::Elem>, Vec<F::Elem>)> {
    let rank = m.rank()?;
    if rank != 1 {
        return Err(Error::WrongRank {
            expected: 1,
            found: rank,
        });
    }
    let f = m.field();
    let c = (0..m.cols())
        .find(|&c| (0..m.rows()).any(|r| !f.is_zero(m.get(r, c))))
        .expect("rank one has a nonzero column");
    let u = col(m, c);
    let r = u.iter().position(|x| !f.is_zero(x)).expect("nonzero column");
    let v = (0..m.cols())
        .map(|j| f.div(m.get(r, j), &u[r]).expect("nonzero pivot"))
        .collect();
    Ok((u, v))
}

/// Invertible `B` with last column `w`, other columns standard basis
/// vectors avoiding the last nonzero coordinate of `w`.
fn completion<F: Field>(f: &F, w: &[F::Elem]) -> Matrix<F> {
    let c = (0..3).rev().find(|&i| !f.is_zero(&w[i])).expect("nonzero vector");
    let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
    Matrix::from_elems(f.clone(), 3, 3, |i, j| {
        if j == 2 {
            w[i].clone()
        } else if i == others[j] {
            f.one()
        } else {
            f.zero()
        }
    })
}

/// Matrix with zero pattern `[* * *; * * *; 0 0 *]` sending `y` to a
/// multiple of `e3` (when `y3 != 0`) or of `e2`.
pub fn pattern_reduction<F: Field>(f: &F, y: &[F::Elem]) -> Matrix<F> {
    let z = f.zero();
    let o = f.one();
    let rows: [[F::Elem; 3]; 3] = if !f.is_zero(&y[2]) {
        [
            [y[2].clone(), z.clone(), f.neg(&y[0])],
            [z.clone(), y[2].clone(), f.neg(&y[1])],
            [z.clone(), z.clone(), o],
        ]
    } else if !f.is_zero(&y[0]) {
        [
            [y[1].clone(), f.neg(&y[0]), z.clone()],
            [o.clone(), z.clone(), z.clone()],
            [z.clone(), z.clone(), o],
        ]
    } else {
        return Matrix::identity(f.clone(), 3);
    };
    Matrix::from_elems(f.clone(), 3, 3, |i, j| rows[i][j].clone())
}

fn single_entry<F: Field>(m: &Matrix<F>) -> Option<(usize, usize)> {
    let f = m.field();
    let nz: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|&(i, j)| !f.is_zero(m.get(i, j)))
        .collect();
    (nz.len() == 1).then(|| nz[0])
}

fn normalize_once<F: Field>(l: &Matrix<F>, r: &Matrix<F>) -> Result<NormalFormCase<F>> {
    let f = l.field().clone();
    let (u, v) = rank_one_factor(l)?;
    let (x, y) = rank_one_factor(r)?;
    // Base changes moving u and v to e3.
    let b = completion(&f, &u);
    let q0 = b.inverse()?.expect("completion is invertible").transpose();
    let p0 = completion(&f, &v).transpose();
    // Images of the R factors: R' = (Q0^-1 x)(P0 y)^T.
    let q0_inv = q0.inverse()?.expect("invertible");
    let x1 = q0_inv.mul_vec(&x)?;
    let y1 = p0.mul_vec(&y)?;
    let p1 = pattern_reduction(&f, &y1);
    let q1 = pattern_reduction(&f, &x1);
    let p = p1.mul(&p0)?;
    let q = q0.mul(&q1.inverse()?.expect("pattern step is invertible"))?;
    let p_inv = p.inverse()?.expect("invertible");
    let q_inv = q.inverse()?.expect("invertible");
    let l1 = q.transpose().mul(l)?.mul(&p_inv)?;
    let r1 = q_inv.mul(r)?.mul(&p.transpose())?;
    if single_entry(&l1) != Some((2, 2)) {
        return Err(Error::Precondition("left factor did not normalize".into()));
    }
    let case_id = match single_entry(&r1) {
        Some((2, 2)) => CaseId::E33E33,
        Some((2, 1)) => CaseId::E33E32,
        Some((1, 2)) => CaseId::E23E33,
        Some((1, 1)) => CaseId::E22E22,
        _ => return Err(Error::Precondition("right factor did not normalize".into())),
    };
    Ok(NormalFormCase {
        case_id,
        p,
        q,
        l1,
        r1,
        p_step: p1,
        q_step: q1,
        transposed: false,
    })
}

/// Normalize a pair of rank-one matrices. The `E23_E33` case is redone on
/// `(R^T, L^T)`, which lands in `E33_E32`.
pub fn normalize_pair<F: Field>(l: &Matrix<F>, r: &Matrix<F>) -> Result<NormalFormCase<F>> {
    let nf = normalize_once(l, r)?;
    if nf.case_id != CaseId::E23E33 {
        return Ok(nf);
    }
    let mut swapped = normalize_once(&r.transpose(), &l.transpose())?;
    swapped.transposed = true;
    Ok(swapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, P31};
    use crate::rng::seeded;
    use crate::sample;
    use proptest::prelude::*;

    fn unit(i: usize, j: usize) -> Matrix<Rationals> {
        Matrix::from_fn(Rationals, 3, 3, |a, b| (a == i && b == j) as i64)
    }

    fn outer<F: Field>(f: &F, u: &[F::Elem], v: &[F::Elem]) -> Matrix<F> {
        Matrix::from_elems(f.clone(), 3, 3, |i, j| f.mul(&u[i], &v[j]))
    }

    fn has_pattern<F: Field>(m: &Matrix<F>) -> bool {
        let f = m.field();
        f.is_zero(m.get(2, 0)) && f.is_zero(m.get(2, 1))
    }

    #[test]
    fn rank_one_factors() {
        let (u, v) = rank_one_factor(&unit(2, 2)).unwrap();
        assert_eq!(outer(&Rationals, &u, &v), unit(2, 2));
        let m = Matrix::from_i64(Rationals, 3, 3, &[2, 4, 0, 1, 2, 0, 0, 0, 0]).unwrap();
        let (u, v) = rank_one_factor(&m).unwrap();
        let i = |x: i64| Rationals.from_i64(x);
        assert_eq!(u, vec![i(2), i(1), i(0)]);
        assert_eq!(v, vec![i(1), i(2), i(0)]);
        assert!(matches!(
            rank_one_factor(&Matrix::identity(Rationals, 3)),
            Err(Error::WrongRank { expected: 1, found: 3 })
        ));
    }

    #[test]
    fn standard_cases() {
        let nf = normalize_pair(&unit(2, 2), &unit(2, 2)).unwrap();
        assert_eq!(nf.case_id, CaseId::E33E33);
        assert_eq!(nf.p, Matrix::identity(Rationals, 3));
        assert_eq!(nf.q, Matrix::identity(Rationals, 3));

        let nf = normalize_pair(&unit(2, 2), &unit(2, 1)).unwrap();
        assert_eq!(nf.case_id, CaseId::E33E32);
        let l1r1t = nf.l1.mul(&nf.r1.transpose()).unwrap();
        let r1tl1 = nf.r1.transpose().mul(&nf.l1).unwrap();
        assert!(l1r1t.is_zero());
        assert_eq!(single_entry(&r1tl1), Some((1, 2)));

        let nf = normalize_pair(&unit(2, 2), &unit(1, 2)).unwrap();
        assert_eq!(nf.case_id, CaseId::E33E32);
        assert!(nf.transposed);

        let nf = normalize_pair(&unit(2, 2), &unit(1, 1)).unwrap();
        assert_eq!(nf.case_id, CaseId::E22E22);
    }

    #[test]
    fn generic_pairs_land_in_first_case() {
        let f = PrimeField::new(P31).unwrap();
        let mut rng = seeded(9);
        for _ in 0..50 {
            let v = |rng: &mut _| (0..3).map(|_| f.random_uniform(rng)).collect::<Vec<u64>>();
            let l = outer(&f, &v(&mut rng), &v(&mut rng));
            let r = outer(&f, &v(&mut rng), &v(&mut rng));
            let nf = normalize_pair(&l, &r).unwrap();
            assert_eq!(nf.case_id, CaseId::E33E33);
            assert!(has_pattern(&nf.p_step) && has_pattern(&nf.q_step));
            assert!(nf.p.det().map(|d| d != 0).unwrap());
            assert!(nf.q.det().map(|d| d != 0).unwrap());
        }
    }

    /// Random `A` with `L A` and `A R` symmetric.
    fn constrained<F: Field>(l: &Matrix<F>, r: &Matrix<F>, rng: &mut crate::rng::Rng) -> Matrix<F> {
        let f = l.field().clone();
        // Rows: skew parts of L A and A R as linear forms in vec(A).
        let mut data = Vec::new();
        for &(a, b) in &crate::sym9::UPPER {
            for n in 0..9 {
                let (i, j) = (n / 3, n % 3);
                let la = |a: usize, b: usize| if j == b { l.get(a, i).clone() } else { f.zero() };
                data.push(f.sub(&la(a, b), &la(b, a)));
            }
            for n in 0..9 {
                let (i, j) = (n / 3, n % 3);
                let ar = |a: usize, b: usize| if i == a { r.get(j, b).clone() } else { f.zero() };
                data.push(f.sub(&ar(a, b), &ar(b, a)));
            }
        }
        let sys = Matrix::new(f.clone(), 6, 9, data).unwrap();
        let kernel = sys.kernel_basis().unwrap();
        let weights: Vec<F::Elem> = kernel.iter().map(|_| f.random_int(rng, 50)).collect();
        let v: Vec<F::Elem> = (0..9)
            .map(|n| {
                kernel.iter().zip(&weights).fold(f.zero(), |acc, (k, w)| f.add(&acc, &f.mul(w, &k[n])))
            })
            .collect();
        Matrix::from_elems(f, 3, 3, |i, j| v[3 * i + j].clone())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conjugation_preserves_symmetry(seed in any::<u64>(), zero_y3 in any::<bool>(), zero_x3 in any::<bool>()) {
            let f = Rationals;
            let mut rng = seeded(seed);
            let mut v = |zero_last: bool| -> Vec<_> {
                let mut w: Vec<_> = (0..3).map(|_| Rationals.from_i64(sample::nonzero_int(&mut rng, 9))).collect();
                if zero_last { w[2] = Rationals.zero(); }
                w
            };
            let (u, vv, x, y) = (v(false), v(false), v(zero_x3), v(zero_y3));
            let l = outer(&f, &u, &vv);
            let r = outer(&f, &x, &y);
            let nf = normalize_pair(&l, &r).unwrap();
            prop_assert!(nf.case_id != CaseId::E23E33);
            let (l0, r0) = if nf.transposed { (r.transpose(), l.transpose()) } else { (l.clone(), r.clone()) };
            let a = constrained(&l0, &r0, &mut rng);
            prop_assert!(l0.mul(&a).unwrap().is_symmetric(), "LA");
            prop_assert!(a.mul(&r0).unwrap().is_symmetric(), "AR");
            let a1 = nf.p.mul(&a).unwrap().mul(&nf.q).unwrap();
            prop_assert!(nf.l1.mul(&a1).unwrap().is_symmetric());
            prop_assert!(a1.mul(&nf.r1).unwrap().is_symmetric());
            prop_assert!(unit(2, 2).mul(&a1).unwrap().is_symmetric());
        }
    }
}
