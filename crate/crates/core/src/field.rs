//! Scalar fields: arbitrary-precision rationals, prime fields and `f64`.
//!
//! Elements are plain values; all arithmetic goes through a field handle so
//! that prime-field residues don't carry their modulus around. Values of two
//! different fields never meet inside one matrix or polynomial: every
//! container stores its field and binary operations compare handles.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Mersenne prime 2^31 - 1.
pub const P31: u64 = (1 << 31) - 1;
/// Mersenne prime 2^61 - 1.
pub const P61: u64 = (1 << 61) - 1;

/// Integers drawn by [`Field::random_uniform`] over the rationals lie in
/// `[-RATIONAL_SAMPLE_BOUND, RATIONAL_SAMPLE_BOUND]`.
pub const RATIONAL_SAMPLE_BOUND: i64 = 1 << 20;

/// Scalar mode tag, used for reports and for mode checks between containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Rational,
    PrimeField(u64),
    Float64,
}

impl Mode {
    pub fn is_exact(self) -> bool {
        !matches!(self, Mode::Float64)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => write!(f, "rational"),
            Mode::PrimeField(p) => write!(f, "gfp({p})"),
            Mode::Float64 => write!(f, "float"),
        }
    }
}

/// Rank, pivot positions and permutation sign from an elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub rank: usize,
    /// Original row indices of the pivots, in elimination order.
    pub pivot_rows: Vec<usize>,
    /// Original column indices of the pivots, in elimination order.
    pub pivot_cols: Vec<usize>,
}

pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync + 'static;

    /// Whether equality with zero is decided exactly.
    const EXACT: bool;

    fn mode(&self) -> Mode;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Fails over a prime field when the denominator vanishes mod p.
    fn from_rational(&self, v: &BigRational) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Uniform integer in `[-bound, bound]`, mapped into the field.
    fn random_int<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Self::Elem {
        self.from_i64(rng.gen_range(-bound..=bound))
    }

    /// A draw for identity testing: uniform over GF(p), a wide integer range
    /// over the rationals, uniform in [-1, 1] for floats.
    fn random_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    /// Determinant of an `n x n` row-major matrix.
    fn determinant(&self, n: usize, data: Vec<Self::Elem>) -> Self::Elem {
        gaussian_det(self, n, data)
    }

    /// Rank profile of a `rows x cols` row-major matrix (full pivoting).
    fn rank_profile(&self, rows: usize, cols: usize, data: Vec<Self::Elem>) -> RankProfile {
        gaussian_rank(self, rows, cols, data)
    }
}

fn gaussian_det<F: Field + ?Sized>(f: &F, n: usize, mut a: Vec<F::Elem>) -> F::Elem {
    let mut det = f.one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !f.is_zero(&a[i * n + k])) else {
            return f.zero();
        };
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            det = f.neg(&det);
        }
        let pivot = a[k * n + k].clone();
        det = f.mul(&det, &pivot);
        let inv = f.inv(&pivot).expect("nonzero pivot");
        for i in k + 1..n {
            if f.is_zero(&a[i * n + k]) {
                continue;
            }
            let factor = f.mul(&a[i * n + k], &inv);
            for j in k + 1..n {
                let t = f.mul(&factor, &a[k * n + j]);
                a[i * n + j] = f.sub(&a[i * n + j], &t);
            }
        }
    }
    det
}

fn gaussian_rank<F: Field + ?Sized>(
    f: &F,
    rows: usize,
    cols: usize,
    mut a: Vec<F::Elem>,
) -> RankProfile {
    let mut rp: Vec<usize> = (0..rows).collect();
    let mut cp: Vec<usize> = (0..cols).collect();
    let mut k = 0;
    while k < rows.min(cols) {
        let found = (k..cols)
            .flat_map(|j| (k..rows).map(move |i| (i, j)))
            .find(|&(i, j)| !f.is_zero(&a[i * cols + j]));
        let Some((pi, pj)) = found else { break };
        swap_rows(&mut a, cols, k, pi);
        rp.swap(k, pi);
        swap_cols(&mut a, rows, cols, k, pj);
        cp.swap(k, pj);
        let inv = f.inv(&a[k * cols + k]).expect("nonzero pivot");
        for i in k + 1..rows {
            if f.is_zero(&a[i * cols + k]) {
                continue;
            }
            let factor = f.mul(&a[i * cols + k], &inv);
            for j in k..cols {
                let t = f.mul(&factor, &a[k * cols + j]);
                a[i * cols + j] = f.sub(&a[i * cols + j], &t);
            }
        }
        k += 1;
    }
    RankProfile {
        rank: k,
        pivot_rows: rp[..k].to_vec(),
        pivot_cols: cp[..k].to_vec(),
    }
}

fn swap_rows<T>(a: &mut [T], cols: usize, r1: usize, r2: usize) {
    if r1 != r2 {
        for j in 0..cols {
            a.swap(r1 * cols + j, r2 * cols + j);
        }
    }
}

fn swap_cols<T>(a: &mut [T], rows: usize, cols: usize, c1: usize, c2: usize) {
    if c1 != c2 {
        for i in 0..rows {
            a.swap(i * cols + c1, i * cols + c2);
        }
    }
}

/// Outcome of fraction-free elimination over the integers.
struct Bareiss {
    rank: usize,
    pivot_rows: Vec<usize>,
    pivot_cols: Vec<usize>,
    /// Last pivot times the permutation sign; the determinant for square
    /// full-rank input.
    signed_last_pivot: BigInt,
}

/// Bareiss elimination with full pivoting. All intermediate entries are
/// minors of the input, so divisions are exact.
fn bareiss(rows: usize, cols: usize, mut a: Vec<BigInt>) -> Bareiss {
    let mut rp: Vec<usize> = (0..rows).collect();
    let mut cp: Vec<usize> = (0..cols).collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    let mut k = 0;
    while k < rows.min(cols) {
        // Prefer the smallest nonzero entry; keeps the integers short.
        let mut best: Option<(usize, usize)> = None;
        for j in k..cols {
            for i in k..rows {
                let v = &a[i * cols + j];
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if a[bi * cols + bj].magnitude() <= v.magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        if pi != k {
            swap_rows(&mut a, cols, k, pi);
            rp.swap(k, pi);
            negate = !negate;
        }
        if pj != k {
            swap_cols(&mut a, rows, cols, k, pj);
            cp.swap(k, pj);
            negate = !negate;
        }
        let pivot = a[k * cols + k].clone();
        for i in k + 1..rows {
            let lead = a[i * cols + k].clone();
            for j in k + 1..cols {
                let v = &pivot * &a[i * cols + j] - &lead * &a[k * cols + j];
                a[i * cols + j] = v / &prev;
            }
            a[i * cols + k] = BigInt::zero();
        }
        prev = pivot;
        k += 1;
    }
    let last = if k == 0 { BigInt::one() } else { prev };
    Bareiss {
        rank: k,
        pivot_rows: rp[..k].to_vec(),
        pivot_cols: cp[..k].to_vec(),
        signed_last_pivot: if negate { -last } else { last },
    }
}

/// Scale each row by the lcm of its denominators. Returns the integer matrix
/// and the product of the scale factors.
fn clear_denominators(rows: usize, cols: usize, data: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut out = Vec::with_capacity(rows * cols);
    let mut total = BigInt::one();
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        for v in row {
            out.push(v.numer() * (&lcm / v.denom()));
        }
        total *= lcm;
    }
    (out, total)
}

/// The rationals with arbitrary-precision numerator and denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    const EXACT: bool = true;

    fn mode(&self) -> Mode {
        Mode::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_rational(&self, v: &BigRational) -> Result<BigRational> {
        Ok(v.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn random_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.random_int(rng, RATIONAL_SAMPLE_BOUND)
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }

    fn determinant(&self, n: usize, data: Vec<BigRational>) -> BigRational {
        if n == 0 {
            return BigRational::one();
        }
        let (ints, scale) = clear_denominators(n, n, &data);
        let b = bareiss(n, n, ints);
        if b.rank < n {
            return BigRational::zero();
        }
        BigRational::new(b.signed_last_pivot, scale)
    }

    fn rank_profile(&self, rows: usize, cols: usize, data: Vec<BigRational>) -> RankProfile {
        let (ints, _) = clear_denominators(rows, cols, &data);
        let b = bareiss(rows, cols, ints);
        RankProfile {
            rank: b.rank,
            pivot_rows: b.pivot_rows,
            pivot_cols: b.pivot_cols,
        }
    }
}

/// Parse `"a"` or `"a/b"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse {
        line: 0,
        msg: format!("invalid rational '{s}'"),
    };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// GF(p) for an odd prime `p < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn signed(&self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }

    fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u64().expect("residue fits in u64")
    }
}

impl Field for PrimeField {
    type Elem = u64;
    const EXACT: bool = true;

    fn mode(&self) -> Mode {
        Mode::PrimeField(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        self.reduce_bigint(v)
    }
    fn from_rational(&self, v: &BigRational) -> Result<u64> {
        let n = self.reduce_bigint(v.numer());
        let d = self.reduce_bigint(v.denom());
        self.div(&n, &d).ok_or(Error::DivisionByZero)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(pow_mod(*a, self.p - 2, self.p))
    }
    fn random_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u64> {
        self.from_rational(&parse_rational(s)?)
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// IEEE double precision. Zero tests are exact comparisons here; tolerance
/// decisions live in the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Float64;

impl Field for Float64 {
    type Elem = f64;
    const EXACT: bool = false;

    fn mode(&self) -> Mode {
        Mode::Float64
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }
    fn from_bigint(&self, v: &BigInt) -> f64 {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn from_rational(&self, v: &BigRational) -> Result<f64> {
        Ok(v.to_f64().unwrap_or(f64::NAN))
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Option<f64> {
        (*a != 0.0).then(|| 1.0 / a)
    }
    fn random_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(-1.0..=1.0)
    }
    fn format(&self, a: &f64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<f64> {
        s.trim().parse().map_err(|_| Error::Parse {
            line: 0,
            msg: format!("invalid float '{s}'"),
        })
    }

    /// Partial pivoting on magnitude.
    fn determinant(&self, n: usize, mut a: Vec<f64>) -> f64 {
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                .unwrap();
            if a[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                swap_rows(&mut a, n, p, k);
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[i * n + k] / pivot;
                for j in k + 1..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(P31));
        assert!(is_prime(P61));
        assert!(!is_prime(P31 + 2));
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(P61).unwrap();
        let a = f.from_i64(-5);
        assert_eq!(f.add(&a, &f.from_i64(5)), 0);
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), 1);
        assert_eq!(f.signed(a), -5);
        let half = f.parse("1/2").unwrap();
        assert_eq!(f.mul(&half, &2), 1);
        assert!(f.parse("1/0").is_err());
        let g = PrimeField::new(7).unwrap();
        assert_eq!(g.from_rational(&parse_rational("3/14").unwrap()), Err(Error::DivisionByZero));
    }

    #[test]
    fn rationals_are_canonical() {
        let q = Rationals;
        let v = q.parse("3/6").unwrap();
        assert_eq!(q.format(&v), "1/2");
        let v = q.parse("4/-2").unwrap();
        assert_eq!(q.format(&v), "-2");
        assert!(v.denom() > &BigInt::zero());
    }

    #[test]
    fn bareiss_matches_gaussian_over_fp() {
        let q = Rationals;
        let data: Vec<BigRational> = [2, -1, 0, 3, 1, 4, 5, 0, -2, 7, 1, 1, 0, 3, 3, 2]
            .iter()
            .map(|&v| q.from_i64(v))
            .collect();
        let det_q = q.determinant(4, data.clone());
        let f = PrimeField::new(P31).unwrap();
        let data_p: Vec<u64> = data.iter().map(|v| f.from_rational(v).unwrap()).collect();
        assert_eq!(f.from_rational(&det_q).unwrap(), f.determinant(4, data_p));
    }
}
