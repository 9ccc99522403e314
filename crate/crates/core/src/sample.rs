//! Seeded tensor samplers. Integer draws are uniform in `[-bound, bound]`
//! and mapped into the target field.

use rand::Rng as _;

use crate::field::Field;
use crate::matrix::Matrix;
use crate::rng::{seeded, Rng};
use crate::tensor::{Dims, Tensor3};

/// Default bound on factor and entry draws.
pub const DEFAULT_BOUND: i64 = 9;

fn draw_vec<F: Field>(f: &F, rng: &mut Rng, len: usize, bound: i64) -> Vec<F::Elem> {
    (0..len).map(|_| f.random_int(rng, bound)).collect()
}

/// Sum of `r` random rank-one tensors.
pub fn rank_r<F: Field>(field: F, dims: Dims, r: usize, bound: i64, seed: u64) -> Tensor3<F> {
    let mut rng = seeded(seed);
    let terms: Vec<_> = (0..r)
        .map(|_| {
            (
                draw_vec(&field, &mut rng, dims.0, bound),
                draw_vec(&field, &mut rng, dims.1, bound),
                draw_vec(&field, &mut rng, dims.2, bound),
            )
        })
        .collect();
    Tensor3::from_rank_one_terms(field, dims, &terms).expect("valid dims")
}

/// Independent uniform entries.
pub fn dense<F: Field>(field: F, dims: Dims, bound: i64, seed: u64) -> Tensor3<F> {
    let mut rng = seeded(seed);
    let f = field.clone();
    Tensor3::from_fn(field, dims, |_, _, _| f.random_int(&mut rng, bound)).expect("valid dims")
}

/// 3x3x4 tensor whose slices are `Y_k (+) z_k` with `Y_k` 2x2. With
/// `x33_zero` every `z_k` is zero; with `force_f_zero` the fourth block is a
/// random combination of the first three.
pub fn special_form<F: Field>(
    field: F,
    x33_zero: bool,
    force_f_zero: bool,
    bound: i64,
    seed: u64,
) -> Tensor3<F> {
    let mut rng = seeded(seed);
    let f = field.clone();
    let mut blocks: Vec<Vec<F::Elem>> = (0..3).map(|_| draw_vec(&f, &mut rng, 4, bound)).collect();
    let fourth = if force_f_zero {
        let c = draw_vec(&f, &mut rng, 3, bound);
        (0..4)
            .map(|e| {
                (0..3).fold(f.zero(), |acc, s| f.add(&acc, &f.mul(&c[s], &blocks[s][e])))
            })
            .collect()
    } else {
        draw_vec(&f, &mut rng, 4, bound)
    };
    blocks.push(fourth);
    let z: Vec<F::Elem> = if x33_zero {
        vec![f.zero(); 4]
    } else {
        draw_vec(&f, &mut rng, 4, bound)
    };
    Tensor3::from_fn(field, (3, 3, 4), |i, j, k| match (i, j) {
        (0..=1, 0..=1) => blocks[k][2 * i + j].clone(),
        (2, 2) => z[k].clone(),
        _ => f.zero(),
    })
    .expect("valid dims")
}

/// 3x3x4 tensor with zero third row and `x_{1,3,k} = 0`: effectively a
/// 2x3x4 tensor.
pub fn essentially_2x3x4<F: Field>(field: F, bound: i64, seed: u64) -> Tensor3<F> {
    let mut rng = seeded(seed);
    let f = field.clone();
    Tensor3::from_fn(field, (3, 3, 4), |i, j, _| {
        if i == 2 || (i == 0 && j == 2) {
            f.zero()
        } else {
            f.random_int(&mut rng, bound)
        }
    })
    .expect("valid dims")
}

/// Random invertible `n x n` matrix with entries in `[-bound, bound]`.
pub fn invertible<F: Field>(field: &F, n: usize, bound: i64, rng: &mut Rng) -> Matrix<F> {
    loop {
        let m = Matrix::from_elems(field.clone(), n, n, |_, _| field.random_int(rng, bound));
        if !field.is_zero(&m.det().expect("square")) {
            return m;
        }
    }
}

/// Matrix with independent uniform draws (GF(p): whole field).
pub fn uniform_matrix<F: Field>(field: &F, rows: usize, cols: usize, rng: &mut Rng) -> Matrix<F> {
    Matrix::from_elems(field.clone(), rows, cols, |_, _| field.random_uniform(rng))
}

/// Random nonzero small integer in `[-bound, bound]`.
pub fn nonzero_int(rng: &mut Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, P61};

    #[test]
    fn rank_one_slices() {
        let t = rank_r(Rationals, (3, 3, 4), 1, DEFAULT_BOUND, 3);
        for s in t.slices(3).unwrap() {
            assert!(s.rank().unwrap() <= 1);
        }
    }

    #[test]
    fn rank_four_flattenings() {
        for seed in 0..20 {
            let t = rank_r(Rationals, (3, 3, 4), 4, DEFAULT_BOUND, seed);
            assert!(t.flattening_ranks().unwrap().iter().all(|&r| r <= 4));
            let t = rank_r(PrimeField::new(P61).unwrap(), (4, 4, 4), 4, DEFAULT_BOUND, seed);
            assert!(t.flattening_ranks().unwrap().iter().all(|&r| r <= 4));
        }
    }

    #[test]
    fn samplers_are_reproducible() {
        assert_eq!(
            rank_r(Rationals, (3, 3, 4), 4, 9, 42),
            rank_r(Rationals, (3, 3, 4), 4, 9, 42)
        );
        assert_ne!(
            rank_r(Rationals, (3, 3, 4), 4, 9, 42),
            rank_r(Rationals, (3, 3, 4), 4, 9, 43)
        );
        assert_eq!(
            special_form(Rationals, false, true, 9, 1),
            special_form(Rationals, false, true, 9, 1)
        );
    }

    #[test]
    fn special_form_variants() {
        for seed in 0..10 {
            let t = special_form(Rationals, true, false, 9, seed);
            assert!(t.special_form_flags().is_special);
            for k in 0..4 {
                assert_eq!(t.get(2, 2, k), &Rationals.zero());
            }
            let t = essentially_2x3x4(Rationals, 9, seed);
            assert!((0..4).all(|k| (0..3).all(|j| t.get(2, j, k) == &Rationals.zero())));
        }
    }
}
