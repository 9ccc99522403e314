//! Three-way tensors with at most four entries per axis.
//!
//! Entries are stored with k slowest, then i, then j: the frontal slices
//! `X_k = [x_{i,j,k}]` are concatenated in row-major order.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::poly::VarRegistry;

pub type Dims = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<F: Field> {
    field: F,
    dims: Dims,
    entries: Vec<F::Elem>,
}

/// The sixteen positions (1,3,k), (2,3,k), (3,1,k), (3,2,k) that vanish on
/// the block-diagonal special form. Indices are 1-based.
pub fn special_zero_positions() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity(16);
    for k in 1..=4 {
        out.extend([(1, 3, k), (2, 3, k), (3, 1, k), (3, 2, k)]);
    }
    out
}

/// Whether a 3x3x4 tensor has the 2x2-plus-1x1 block shape in every
/// frontal slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialFormFlags {
    pub is_special: bool,
    pub zero_positions: Vec<(usize, usize, usize)>,
}

fn check_dims(dims: Dims) -> Result<()> {
    let ok = |d: usize| (1..=4).contains(&d);
    if !(ok(dims.0) && ok(dims.1) && ok(dims.2)) {
        return Err(Error::DimensionMismatch(format!(
            "tensor dimensions {dims:?} outside 1..=4"
        )));
    }
    Ok(())
}

impl<F: Field> Tensor3<F> {
    pub fn new(field: F, dims: Dims, entries: Vec<F::Elem>) -> Result<Self> {
        check_dims(dims)?;
        if entries.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries declared {}x{}x{}",
                entries.len(),
                dims.0,
                dims.1,
                dims.2
            )));
        }
        Ok(Tensor3 {
            field,
            dims,
            entries,
        })
    }

    pub fn zeros(field: F, dims: Dims) -> Result<Self> {
        let n = dims.0 * dims.1 * dims.2;
        let z = field.zero();
        Self::new(field, dims, vec![z; n])
    }

    /// Build from a function of 0-based (i, j, k).
    pub fn from_fn(
        field: F,
        dims: Dims,
        mut f: impl FnMut(usize, usize, usize) -> F::Elem,
    ) -> Result<Self> {
        check_dims(dims)?;
        let (m, n, l) = dims;
        let mut entries = Vec::with_capacity(m * n * l);
        for k in 0..l {
            for i in 0..m {
                for j in 0..n {
                    entries.push(f(i, j, k));
                }
            }
        }
        Self::new(field, dims, entries)
    }

    /// Sum of rank-one terms `a_s (x) b_s (x) c_s`.
    pub fn from_rank_one_terms(
        field: F,
        dims: Dims,
        terms: &[(Vec<F::Elem>, Vec<F::Elem>, Vec<F::Elem>)],
    ) -> Result<Self> {
        let f = field.clone();
        Self::from_fn(field, dims, |i, j, k| {
            terms.iter().fold(f.zero(), |acc, (a, b, c)| {
                f.add(&acc, &f.mul(&f.mul(&a[i], &b[j]), &c[k]))
            })
        })
    }

    pub fn from_frontal_slices(field: F, slices: &[Matrix<F>]) -> Result<Self> {
        let l = slices.len();
        let (m, n) = slices
            .first()
            .map(|s| (s.rows(), s.cols()))
            .ok_or_else(|| Error::DimensionMismatch("no slices".into()))?;
        if slices.iter().any(|s| s.rows() != m || s.cols() != n) {
            return Err(Error::DimensionMismatch("slices of different shapes".into()));
        }
        Self::from_fn(field, (m, n, l), |i, j, k| slices[k].get(i, j).clone())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn entries(&self) -> &[F::Elem] {
        &self.entries
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims.0 + i) * self.dims.1 + j
    }

    /// Entry at 0-based (i, j, k).
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &F::Elem {
        &self.entries[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: F::Elem) {
        let idx = self.index(i, j, k);
        self.entries[idx] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| self.field.is_zero(v))
    }

    pub fn require_dims(&self, dims: Dims) -> Result<()> {
        if self.dims != dims {
            return Err(Error::DimensionMismatch(format!(
                "expected a {}x{}x{} tensor, got {:?}",
                dims.0, dims.1, dims.2, self.dims
            )));
        }
        Ok(())
    }

    /// Sections obtained by fixing the index of axis `direction` (1, 2 or
    /// 3), in increasing order of the fixed index. Rows run over the
    /// lower-numbered remaining axis.
    pub fn slices(&self, direction: usize) -> Result<Vec<Matrix<F>>> {
        let (m, n, l) = self.dims;
        let f = self.field.clone();
        let out = match direction {
            1 => (0..m)
                .map(|i| Matrix::from_elems(f.clone(), n, l, |j, k| self.get(i, j, k).clone()))
                .collect(),
            2 => (0..n)
                .map(|j| Matrix::from_elems(f.clone(), m, l, |i, k| self.get(i, j, k).clone()))
                .collect(),
            3 => (0..l)
                .map(|k| Matrix::from_elems(f.clone(), m, n, |i, j| self.get(i, j, k).clone()))
                .collect(),
            d => {
                return Err(Error::DimensionMismatch(format!(
                    "slice direction {d} not in 1..=3"
                )))
            }
        };
        Ok(out)
    }

    /// Flattening along `axis`: rows indexed by that axis, columns by the
    /// other two (lexicographically).
    pub fn flattening(&self, axis: usize) -> Result<Matrix<F>> {
        let (m, n, l) = self.dims;
        let f = self.field.clone();
        Ok(match axis {
            1 => Matrix::from_elems(f, m, n * l, |i, c| self.get(i, c / l, c % l).clone()),
            2 => Matrix::from_elems(f, n, m * l, |j, c| self.get(c / l, j, c % l).clone()),
            3 => Matrix::from_elems(f, l, m * n, |k, c| self.get(c / n, c % n, k).clone()),
            d => {
                return Err(Error::DimensionMismatch(format!(
                    "flattening axis {d} not in 1..=3"
                )))
            }
        })
    }

    /// Ranks of the three flattenings.
    pub fn flattening_ranks(&self) -> Result<[usize; 3]> {
        Ok([
            self.flattening(1)?.rank()?,
            self.flattening(2)?.rank()?,
            self.flattening(3)?.rank()?,
        ])
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        Tensor3 {
            field: self.field.clone(),
            dims: self.dims,
            entries: self.entries.iter().map(|v| self.field.mul(v, s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModeMismatch(
                self.field.mode().to_string(),
                other.field.mode().to_string(),
            ));
        }
        other.require_dims(self.dims)?;
        Ok(Tensor3 {
            field: self.field.clone(),
            dims: self.dims,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| self.field.add(a, b))
                .collect(),
        })
    }

    /// Reorder axes: axis `a` of the result is axis `perm[a]` of `self`
    /// (0-based axes).
    pub fn permute_axes(&self, perm: [usize; 3]) -> Result<Self> {
        let mut sorted = perm;
        sorted.sort();
        if sorted != [0, 1, 2] {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
        let d = [self.dims.0, self.dims.1, self.dims.2];
        let dims = (d[perm[0]], d[perm[1]], d[perm[2]]);
        Self::from_fn(self.field.clone(), dims, |i, j, k| {
            let mut src = [0; 3];
            src[perm[0]] = i;
            src[perm[1]] = j;
            src[perm[2]] = k;
            self.get(src[0], src[1], src[2]).clone()
        })
    }

    /// Swap the first two axes (transposes every frontal slice).
    pub fn transpose12(&self) -> Self {
        self.permute_axes([1, 0, 2]).expect("valid permutation")
    }

    /// `(A, B, C) . T`: `T'_{ijk} = sum A_{ia} B_{jb} C_{kc} T_{abc}`.
    pub fn basis_change(&self, a: &Matrix<F>, b: &Matrix<F>, c: &Matrix<F>) -> Result<Self> {
        let (m, n, l) = self.dims;
        for (mat, d) in [(a, m), (b, n), (c, l)] {
            if mat.rows() != d || mat.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "basis change of size {}x{} on axis of length {d}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            if mat.field() != &self.field {
                return Err(Error::ModeMismatch(
                    mat.field().mode().to_string(),
                    self.field.mode().to_string(),
                ));
            }
        }
        let f = &self.field;
        // contract one axis at a time
        let step1 = Self::from_fn(f.clone(), self.dims, |i, j, k| {
            (0..m).fold(f.zero(), |acc, s| f.add(&acc, &f.mul(a.get(i, s), self.get(s, j, k))))
        })?;
        let step2 = Self::from_fn(f.clone(), self.dims, |i, j, k| {
            (0..n).fold(f.zero(), |acc, s| f.add(&acc, &f.mul(b.get(j, s), step1.get(i, s, k))))
        })?;
        Self::from_fn(f.clone(), self.dims, |i, j, k| {
            (0..l).fold(f.zero(), |acc, s| f.add(&acc, &f.mul(c.get(k, s), step2.get(i, j, s))))
        })
    }

    /// Zero-pad into larger dimensions.
    pub fn embed(&self, dims: Dims) -> Result<Self> {
        let (m, n, l) = self.dims;
        if dims.0 < m || dims.1 < n || dims.2 < l {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed {:?} into {dims:?}",
                self.dims
            )));
        }
        let f = self.field.clone();
        Self::from_fn(f.clone(), dims, |i, j, k| {
            if i < m && j < n && k < l {
                self.get(i, j, k).clone()
            } else {
                f.zero()
            }
        })
    }

    pub fn map_into<G: Field>(
        &self,
        target: &G,
        conv: impl Fn(&F::Elem) -> Result<G::Elem>,
    ) -> Result<Tensor3<G>> {
        let entries = self.entries.iter().map(conv).collect::<Result<Vec<_>>>()?;
        Tensor3::new(target.clone(), self.dims, entries)
    }

    /// Values of the x-variables of `reg`, indexed by variable id; the
    /// substitution variables are set to zero.
    pub fn registry_values(&self, reg: &VarRegistry) -> Result<Vec<F::Elem>> {
        if reg.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!(
                "registry for {:?} applied to a {:?} tensor",
                reg.dims(),
                self.dims
            )));
        }
        let mut values = vec![self.field.zero(); reg.len()];
        let (m, n, l) = self.dims;
        for i in 0..m {
            for j in 0..n {
                for k in 0..l {
                    values[reg.x(i + 1, j + 1, k + 1) as usize] = self.get(i, j, k).clone();
                }
            }
        }
        Ok(values)
    }

    /// Special-form flags; only 3x3x4 tensors can be special.
    pub fn special_form_flags(&self) -> SpecialFormFlags {
        let zero_positions = special_zero_positions();
        let is_special = self.dims == (3, 3, 4)
            && zero_positions
                .iter()
                .all(|&(i, j, k)| self.field.is_zero(self.get(i - 1, j - 1, k - 1)));
        SpecialFormFlags {
            is_special,
            zero_positions,
        }
    }

    pub fn entry_strings(&self) -> Vec<String> {
        self.entries.iter().map(|v| self.field.format(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rationals, PrimeField, P31};
    use crate::sample;

    #[test]
    fn frontal_slices_match_entries() {
        let t = sample::dense(Rationals, (3, 3, 4), 9, 4);
        let s = t.slices(3).unwrap();
        assert_eq!(s.len(), 4);
        for (k, x) in s.iter().enumerate() {
            assert_eq!((x.rows(), x.cols()), (3, 3));
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(x.get(i, j), t.get(i, j, k));
                }
            }
        }
        assert!(t.slices(0).is_err());
        assert!(t.slices(4).is_err());
    }

    #[test]
    fn sections_reconstruct_tensor() {
        let t = sample::dense(Rationals, (4, 4, 4), 9, 8);
        for d in 1..=3 {
            let s = t.slices(d).unwrap();
            assert_eq!(s.len(), 4);
            let rebuilt = Tensor3::from_fn(Rationals, (4, 4, 4), |i, j, k| match d {
                1 => s[i].get(j, k).clone(),
                2 => s[j].get(i, k).clone(),
                _ => s[k].get(i, j).clone(),
            })
            .unwrap();
            assert_eq!(rebuilt, t);
        }
    }

    #[test]
    fn rank_one_slices_are_scaled_outer_products() {
        let f = Rationals;
        let a: Vec<_> = [1, 2, -1].iter().map(|&v| f.from_i64(v)).collect();
        let b: Vec<_> = [3, 0, 1].iter().map(|&v| f.from_i64(v)).collect();
        let c: Vec<_> = [2, -1, 5, 1].iter().map(|&v| f.from_i64(v)).collect();
        let t = Tensor3::from_rank_one_terms(f, (3, 3, 4), &[(a.clone(), b.clone(), c.clone())])
            .unwrap();
        let ab = Matrix::column(f, a).mul(&Matrix::column(f, b).transpose()).unwrap();
        for (k, s) in t.slices(3).unwrap().iter().enumerate() {
            assert_eq!(s, &ab.scale(&c[k]));
            assert!(s.rank().unwrap() <= 1);
        }
    }

    #[test]
    fn dimension_checks() {
        let f = PrimeField::new(P31).unwrap();
        assert!(Tensor3::new(f, (3, 3, 4), vec![0; 35]).is_err());
        assert!(Tensor3::new(f, (5, 1, 1), vec![0; 5]).is_err());
        assert!(Tensor3::new(f, (3, 3, 4), vec![0; 36]).is_ok());
    }

    #[test]
    fn basis_change_by_identity_and_permutation() {
        let f = Rationals;
        let t = sample::dense(f, (3, 3, 4), 5, 1);
        let i3 = Matrix::identity(f, 3);
        let i4 = Matrix::identity(f, 4);
        assert_eq!(t.basis_change(&i3, &i3, &i4).unwrap(), t);
        let swap = Matrix::from_i64(f, 3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]).unwrap();
        let moved = t.basis_change(&swap, &i3, &i4).unwrap();
        assert_eq!(moved.get(0, 2, 1), t.get(1, 2, 1));
        assert_eq!(t.transpose12().transpose12(), t);
        assert_eq!(t.transpose12().get(0, 1, 2), t.get(1, 0, 2));
    }

    #[test]
    fn special_flags() {
        let f = Rationals;
        let t = sample::special_form(f, false, false, 9, 3);
        assert!(t.special_form_flags().is_special);
        assert_eq!(t.special_form_flags().zero_positions.len(), 16);
        let d = sample::dense(f, (3, 3, 4), 9, 3);
        assert!(!d.special_form_flags().is_special);
    }
}
