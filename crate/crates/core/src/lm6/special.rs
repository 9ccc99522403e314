//! The special stratum: tensors whose slices are a 2x2 block plus an
//! isolated (3,3) entry, and the quartic `f` detecting dependence of the
//! four 2x2 blocks.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::poly::{poly_det, MultiPoly, VarRegistry};
use crate::tensor::Tensor3;

/// Positions (1-based) of the 2x2 block entries, in column order of the
/// determinant matrix.
const BLOCK: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// The 4x4 matrix whose row k lists the leading 2x2 block of slice k.
pub fn block_matrix<F: Field>(t: &Tensor3<F>) -> Result<Matrix<F>> {
    t.require_dims((3, 3, 4))?;
    Ok(Matrix::from_elems(t.field().clone(), 4, 4, |k, c| {
        let (i, j) = BLOCK[c];
        t.get(i - 1, j - 1, k).clone()
    }))
}

/// Determinant of [`block_matrix`]; zero iff the four blocks are dependent.
pub fn f_det<F: Field>(t: &Tensor3<F>) -> Result<F::Elem> {
    block_matrix(t)?.det()
}

/// `f` as a polynomial in the 3x3x4 registry (24 terms).
pub fn f_poly<F: Field>(field: &F) -> MultiPoly<F> {
    let reg = VarRegistry::new(3, 3, 4);
    let entries: Vec<Vec<MultiPoly<F>>> = (1..=4)
        .map(|k| {
            BLOCK
                .iter()
                .map(|&(i, j)| MultiPoly::var(field.clone(), reg.x(i, j, k)))
                .collect()
        })
        .collect();
    poly_det(field, &entries)
}

/// Closed-form membership on the special stratum: the blocks are dependent
/// or every `x(3,3,k)` vanishes.
pub fn special_membership<F: Field>(t: &Tensor3<F>) -> Result<bool> {
    t.require_dims((3, 3, 4))?;
    if !t.special_form_flags().is_special {
        return Err(Error::Precondition("tensor is not of special form".into()));
    }
    let f = t.field();
    Ok(f.is_zero(&f_det(t)?) || (0..4).all(|k| f.is_zero(t.get(2, 2, k))))
}

/// New slice basis with `z[0..3]` supported on the 2x2 block and `z[3]` a
/// multiple of `e3 e3^T`. Row `i` of `coeffs` expresses `z[i]` in the
/// original slices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialBasis<F: Field> {
    pub z: Vec<Matrix<F>>,
    pub coeffs: Matrix<F>,
}

/// Change of slice basis for a special tensor with dependent blocks and
/// independent slices.
pub fn special_basis_change<F: Field>(t: &Tensor3<F>) -> Result<SpecialBasis<F>> {
    t.require_dims((3, 3, 4))?;
    let f = t.field().clone();
    if !t.special_form_flags().is_special {
        return Err(Error::Precondition("tensor is not of special form".into()));
    }
    let xs = t.slices(3)?;
    let vecs = Matrix::from_elems(f.clone(), 9, 4, |e, k| xs[k].get(e / 3, e % 3).clone());
    if vecs.rank()? < 4 {
        return Err(Error::Precondition("frontal slices are linearly dependent".into()));
    }
    // Columns are the vectorized blocks; a kernel vector is a dependency.
    let blocks = block_matrix(t)?.transpose();
    let kernel = blocks.kernel_basis()?;
    let corner = |c: &[F::Elem]| {
        (0..4).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&c[k], t.get(2, 2, k))))
    };
    // Independence of the slices forces a nonzero corner for some dependency.
    let Some(c) = kernel.into_iter().find(|c| !f.is_zero(&corner(c))) else {
        return Err(Error::Precondition("blocks are linearly independent (f != 0)".into()));
    };
    let zeta = corner(&c);
    let pivot = (0..4).find(|&k| !f.is_zero(&c[k])).expect("nonzero kernel vector");
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for k in (0..4).filter(|&k| k != pivot) {
        let s = f.div(t.get(2, 2, k), &zeta).expect("nonzero corner");
        rows.push(
            (0..4)
                .map(|m| {
                    let base = if m == k { f.one() } else { f.zero() };
                    f.sub(&base, &f.mul(&s, &c[m]))
                })
                .collect(),
        );
    }
    rows.push(c);
    let coeffs = Matrix::from_elems(f.clone(), 4, 4, |i, m| rows[i][m].clone());
    let z = rows
        .iter()
        .map(|r| {
            Matrix::from_elems(f.clone(), 3, 3, |i, j| {
                (0..4).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&r[k], xs[k].get(i, j))))
            })
        })
        .collect();
    Ok(SpecialBasis { z, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::sample;

    fn unit_blocks(x33: [i64; 4]) -> Tensor3<Rationals> {
        Tensor3::from_fn(Rationals, (3, 3, 4), |i, j, k| {
            let v = match (i, j) {
                (0..=1, 0..=1) => (2 * i + j == k) as i64,
                (2, 2) => x33[k],
                _ => 0,
            };
            Rationals.from_i64(v)
        })
        .unwrap()
    }

    #[test]
    fn f_of_matrix_units_is_one() {
        assert_eq!(f_det(&unit_blocks([0; 4])).unwrap(), Rationals.one());
        let reg = VarRegistry::new(3, 3, 4);
        let f = f_poly(&Rationals);
        assert_eq!(f.num_terms(), 24);
        let vals = unit_blocks([0; 4]).registry_values(&reg).unwrap();
        assert_eq!(f.eval_dense(&vals), Rationals.one());
    }

    #[test]
    fn f_vanishes_on_dependent_blocks() {
        let mut t = unit_blocks([0; 4]);
        for (i, j) in [(0, 0), (0, 1)] {
            t.set(i, j, 3, Rationals.one());
        }
        t.set(1, 0, 3, Rationals.zero());
        t.set(1, 1, 3, Rationals.zero());
        assert_eq!(f_det(&t).unwrap(), Rationals.zero());
    }

    #[test]
    fn f_alternates_under_slice_transpositions() {
        let t = sample::dense(Rationals, (3, 3, 4), 9, 11);
        let base = f_det(&t).unwrap();
        assert!(!Rationals.is_zero(&base));
        for a in 0..4 {
            for b in a + 1..4 {
                let mut perm: Vec<usize> = (0..4).collect();
                perm.swap(a, b);
                let xs = t.slices(3).unwrap();
                let swapped: Vec<_> = perm.iter().map(|&k| xs[k].clone()).collect();
                let s = Tensor3::from_frontal_slices(Rationals, &swapped).unwrap();
                assert_eq!(f_det(&s).unwrap(), Rationals.neg(&base));
            }
        }
    }

    #[test]
    fn special_membership_cases() {
        for seed in 0..10 {
            assert!(special_membership(&sample::special_form(Rationals, false, true, 9, seed)).unwrap());
            assert!(special_membership(&sample::special_form(Rationals, true, false, 9, seed)).unwrap());
        }
        assert!(!special_membership(&unit_blocks([1, 0, 0, 0])).unwrap());
        let dense = sample::dense(Rationals, (3, 3, 4), 9, 1);
        assert!(special_membership(&dense).is_err());
    }

    #[test]
    fn basis_change_identity_when_already_normal() {
        // X_1..X_3 unit blocks, X_4 = e3 e3^T.
        let t = Tensor3::from_fn(Rationals, (3, 3, 4), |i, j, k| {
            let v = match (i, j, k) {
                (2, 2, 3) => 1,
                (0..=1, 0..=1, 0..=2) => (2 * i + j == k) as i64,
                _ => 0,
            };
            Rationals.from_i64(v)
        })
        .unwrap();
        let b = special_basis_change(&t).unwrap();
        assert_eq!(b.coeffs, Matrix::identity(Rationals, 4));
        assert_eq!(b.z, t.slices(3).unwrap());
    }

    #[test]
    fn basis_change_pattern_on_samples() {
        for seed in 0..20 {
            let t = sample::special_form(Rationals, false, true, 9, seed);
            let Ok(b) = special_basis_change(&t) else { continue };
            for z in &b.z[..3] {
                for e in 0..3 {
                    assert!(Rationals.is_zero(z.get(2, e)) && Rationals.is_zero(z.get(e, 2)));
                }
            }
            let z4 = &b.z[3];
            assert!(!Rationals.is_zero(z4.get(2, 2)));
            assert_eq!(z4.data().iter().filter(|v| !Rationals.is_zero(v)).count(), 1);
            assert_eq!(b.coeffs.rank().unwrap(), 4);
        }
    }

    #[test]
    fn basis_change_rejects_dependent_slices() {
        let mut t = sample::special_form(Rationals, false, true, 9, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v = t.get(i, j, 0).clone();
                t.set(i, j, 3, v);
            }
        }
        assert!(matches!(special_basis_change(&t), Err(Error::Precondition(_))));
    }
}
