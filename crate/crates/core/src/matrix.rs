//! Dense matrices over a [`Field`], with the exact linear algebra the
//! condition families are built from: determinants, adjugates, ranks,
//! kernels and minor enumeration.

use crate::error::{Error, Result};
use crate::field::{Field, RankProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// One `k x k` minor: sorted row and column index sets plus its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Minor<E> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: E,
}

impl<F: Field> Matrix<F> {
    pub fn new(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| (i == j) as i64)
    }

    /// Build from integer-valued entries.
    pub fn from_fn(
        field: F,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.from_i64(f(i, j)));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_elems(
        field: F,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> F::Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_i64(field: F, rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        let data = values.iter().map(|&v| field.from_i64(v)).collect();
        Self::new(field, rows, cols, data)
    }

    /// Column vector.
    pub fn column(field: F, v: Vec<F::Elem>) -> Self {
        let n = v.len();
        Matrix {
            field,
            rows: n,
            cols: 1,
            data: v,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }
    pub fn into_data(self) -> Vec<F::Elem> {
        self.data
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_elems(self.field.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    fn check_mode(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModeMismatch(
                self.field.mode().to_string(),
                other.field.mode().to_string(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.get(k, j));
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &t);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&F::Elem, &F::Elem) -> F::Elem,
    ) -> Result<Self> {
        self.check_mode(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| op(a, b))
            .collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| self.field.mul(v, s)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i + 1..self.cols).all(|j| {
                    self.field.is_zero(&self.field.sub(self.get(i, j), self.get(j, i)))
                })
            })
    }

    pub fn trace(&self) -> Result<F::Elem> {
        self.require_square()?;
        Ok((0..self.rows).fold(self.field.zero(), |acc, i| {
            self.field.add(&acc, self.get(i, i))
        }))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_elems(self.field.clone(), rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    fn require_exact(&self) -> Result<()> {
        if !F::EXACT {
            return Err(Error::InexactMode(self.field.mode().to_string()));
        }
        Ok(())
    }

    /// Determinant. Over the rationals this is fraction-free (Bareiss) on
    /// the row-wise denominator-cleared integer matrix; over GF(p) it is
    /// Gaussian elimination. Float input uses partial pivoting and is only
    /// as good as the conditioning allows.
    pub fn det(&self) -> Result<F::Elem> {
        self.require_square()?;
        Ok(self.field.determinant(self.rows, self.data.clone()))
    }

    /// Transposed cofactor matrix, so that `M * adj(M) = det(M) * I`.
    pub fn adjugate(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let f = &self.field;
        if n == 1 {
            return Ok(Self::identity(f.clone(), 1));
        }
        let mut out = Self::zeros(f.clone(), n, n);
        let mut buf = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            for j in 0..n {
                // cofactor C_{ij} lands at adj position (j, i)
                buf.clear();
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        buf.push(self.get(r, c).clone());
                    }
                }
                let d = f.determinant(n - 1, buf.clone());
                let v = if (i + j) % 2 == 0 { d } else { f.neg(&d) };
                out.set(j, i, v);
            }
        }
        Ok(out)
    }

    pub fn rank_profile(&self) -> Result<RankProfile> {
        self.require_exact()?;
        Ok(self
            .field
            .rank_profile(self.rows, self.cols, self.data.clone()))
    }

    /// Exact rank; rejected for floats.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.rank_profile()?.rank)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> Result<(Self, Vec<usize>)> {
        self.require_exact()?;
        let f = &self.field;
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    a.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = f.mul(a.get(r, j), &inv);
                a.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(a.get(i, c)) {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((a, pivots))
    }

    /// Basis of the right null space. Each vector has a 1 in its free
    /// coordinate and zeros in the other free coordinates.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<F::Elem>>> {
        let (rref, pivots) = self.rref()?;
        let f = &self.field;
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rref.get(i, free));
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Inverse, or `None` when singular.
    pub fn inverse(&self) -> Result<Option<Self>> {
        self.require_square()?;
        let n = self.rows;
        let f = &self.field;
        let aug = Self::from_elems(f.clone(), n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let (r, pivots) = aug.rref()?;
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        Ok(Some(Self::from_elems(f.clone(), n, n, |i, j| {
            r.get(i, n + j).clone()
        })))
    }

    /// All `size x size` minors, ordered lexicographically by (row set,
    /// column set).
    pub fn minor_values(&self, size: usize) -> Result<Vec<Minor<F::Elem>>> {
        if size > self.rows.min(self.cols) {
            return Err(Error::MinorTooLarge {
                size,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let row_sets = combinations(self.rows, size);
        let col_sets = combinations(self.cols, size);
        let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
        for rs in &row_sets {
            for cs in &col_sets {
                let value = self.submatrix(rs, cs).det()?;
                out.push(Minor {
                    rows: rs.clone(),
                    cols: cs.clone(),
                    value,
                });
            }
        }
        Ok(out)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| self.field.format(v)).collect())
            .collect()
    }

    /// Reinterpret the entries in another field.
    pub fn map_into<G: Field>(
        &self,
        target: &G,
        conv: impl Fn(&F::Elem) -> Result<G::Elem>,
    ) -> Result<Matrix<G>> {
        let data = self.data.iter().map(conv).collect::<Result<Vec<_>>>()?;
        Matrix::new(target.clone(), self.rows, self.cols, data)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    out
}
