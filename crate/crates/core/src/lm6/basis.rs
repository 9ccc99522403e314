//! Reconstruction of the degree-6 family by interpolation.
//!
//! The family spans one irreducible module whose weight vectors have row and
//! column content (2,2,2) and slice content (1,1,1,1) + e_k + e_l. The
//! vector for (k,l) = (1,1) is the unique (up to scale) polynomial of that
//! weight vanishing on random rank-4 points; the others follow from slice
//! permutations and the slice lowering operators.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals, P31, P61};
use crate::matrix::Matrix;
use crate::poly::{Monomial, MultiPoly, VarRegistry};
use crate::rng::seeded;

/// Monomials in the x variables with prescribed row, column and slice
/// content (number of factors with each index value).
pub fn weight_monomials(
    reg: &VarRegistry,
    rows: &[u8],
    cols: &[u8],
    slices: &[u8],
) -> Vec<Monomial> {
    let (m, n, l) = reg.dims();
    assert!(rows.len() == m && cols.len() == n && slices.len() == l);
    let cells: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|i| (0..n).flat_map(move |j| (0..l).map(move |k| (i, j, k))))
        .collect();
    let mut out = Vec::new();
    let mut rem = (rows.to_vec(), cols.to_vec(), slices.to_vec());
    let mut exps = Vec::new();
    fn rec(
        reg: &VarRegistry,
        cells: &[(usize, usize, usize)],
        c: usize,
        rem: &mut (Vec<u8>, Vec<u8>, Vec<u8>),
        exps: &mut Vec<(u16, u16)>,
        out: &mut Vec<Monomial>,
    ) {
        if rem.2.iter().all(|&v| v == 0) {
            if rem.0.iter().all(|&v| v == 0) && rem.1.iter().all(|&v| v == 0) {
                out.push(Monomial::from_pairs(exps.iter().copied()));
            }
            return;
        }
        if c == cells.len() {
            return;
        }
        let (i, j, k) = cells[c];
        let cap = rem.0[i].min(rem.1[j]).min(rem.2[k]);
        for e in (0..=cap).rev() {
            rem.0[i] -= e;
            rem.1[j] -= e;
            rem.2[k] -= e;
            if e > 0 {
                exps.push((reg.x(i + 1, j + 1, k + 1), e as u16));
            }
            rec(reg, cells, c + 1, rem, exps, out);
            if e > 0 {
                exps.pop();
            }
            rem.0[i] += e;
            rem.1[j] += e;
            rem.2[k] += e;
        }
    }
    rec(reg, &cells, 0, &mut rem, &mut exps, &mut out);
    out.sort();
    out
}

/// Basis of the coefficient vectors (over `monomials`) of polynomials that
/// vanish at `monomials.len() + extra` random rank-4 points over `field`.
pub fn vanishing_kernel(
    field: PrimeField,
    reg: &VarRegistry,
    monomials: &[Monomial],
    extra: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    let dims = reg.dims();
    let points = monomials.len() + extra;
    let mut rng = seeded(seed);
    let mut data = Vec::with_capacity(points * monomials.len());
    for _ in 0..points {
        let terms: Vec<_> = (0..4)
            .map(|_| {
                let v = |n: usize, rng: &mut _| -> Vec<u64> {
                    (0..n).map(|_| field.random_uniform(rng)).collect()
                };
                (v(dims.0, &mut rng), v(dims.1, &mut rng), v(dims.2, &mut rng))
            })
            .collect();
        let t = crate::tensor::Tensor3::from_rank_one_terms(field, dims, &terms)?;
        let values = t.registry_values(reg)?;
        for m in monomials {
            let mut acc = 1u64;
            for &(id, e) in m.exps() {
                acc = field.mul(&acc, &field.pow(&values[id as usize], e as u32));
            }
            data.push(acc);
        }
    }
    Matrix::new(field, points, monomials.len(), data)?.kernel_basis()
}

/// Smallest `(num, den)` with `num/den = a (mod p)`, `|num|, den <= sqrt(p/2)`.
pub fn rational_reconstruct(a: u64, p: u64) -> Option<(i128, i128)> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    Some(if t1 < 0 { (-r1, -t1) } else { (r1, t1) })
}

/// Lift a modular vector to the primitive integer vector it represents,
/// with positive last nonzero entry.
pub fn lift_to_integers(field: &PrimeField, v: &[u64]) -> Result<Vec<BigInt>> {
    use num_integer::Integer;
    let p = field.modulus();
    let fracs = v
        .iter()
        .map(|&a| rational_reconstruct(a, p))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("rational reconstruction failed".into()))?;
    let lcm = fracs
        .iter()
        .fold(BigInt::from(1), |acc, &(_, d)| acc.lcm(&BigInt::from(d)));
    let mut ints: Vec<BigInt> = fracs
        .iter()
        .map(|&(n, d)| BigInt::from(n) * (&lcm / BigInt::from(d)))
        .collect();
    let g = ints.iter().fold(BigInt::from(0), |acc, x| acc.gcd(x));
    if g == BigInt::from(0) {
        return Err(Error::Precondition("zero vector".into()));
    }
    let last_negative = ints.iter().rev().find(|x| *x != &BigInt::from(0)).map(|x| x < &BigInt::from(0));
    let g = if last_negative == Some(true) { -g } else { g };
    for x in &mut ints {
        *x = &*x / &g;
    }
    Ok(ints)
}

/// Index pairs `(k, l)`, `k <= l`, in family order.
pub fn slice_pairs() -> Vec<(usize, usize)> {
    (1..=4).flat_map(|k| (k..=4).map(move |l| (k, l))).collect()
}

/// Lowering operator on the slice index: sum over (i,j) of
/// `x(i,j,to) * d/dx(i,j,from)`.
pub fn lower_slice<F: Field>(
    p: &MultiPoly<F>,
    reg: &VarRegistry,
    from: usize,
    to: usize,
) -> MultiPoly<F> {
    let (m, n, _) = reg.dims();
    let f = p.field().clone();
    let mut out = MultiPoly::zero(f.clone());
    for i in 1..=m {
        for j in 1..=n {
            let d = p.derivative(reg.x(i, j, from));
            out = out.add(&d.mul_monomial(&Monomial::var(reg.x(i, j, to)), &f.one()));
        }
    }
    out
}

/// Swap slice indices `a` and `b` in every variable.
pub fn swap_slices<F: Field>(p: &MultiPoly<F>, reg: &VarRegistry, a: usize, b: usize) -> MultiPoly<F> {
    p.rename(|id| match reg.var(id) {
        crate::poly::Var::X(i, j, k) => {
            let k = k as usize;
            let k = if k == a { b } else if k == b { a } else { k };
            reg.x(i as usize, j as usize, k)
        }
        _ => id,
    })
}

/// Divide by the gcd of the coefficients and make the leading coefficient
/// positive. Input coefficients must be integers.
pub fn primitive(p: &MultiPoly<Rationals>) -> MultiPoly<Rationals> {
    use num_integer::Integer;
    use num_rational::BigRational;
    let g = p
        .terms()
        .fold(BigInt::from(0), |acc, (_, c)| acc.gcd(c.numer()));
    let Some((_, lead)) = p.leading_term() else {
        return p.clone();
    };
    let g = if lead.numer() < &BigInt::from(0) { -g } else { g };
    p.scale(&BigRational::from_integer(g).recip())
}

/// Rebuild the ten polynomials from scratch. Returns them in
/// [`slice_pairs`] order. Deterministic for a fixed seed.
pub fn derive_family(seed: u64) -> Result<Vec<MultiPoly<Rationals>>> {
    let reg = VarRegistry::new(3, 3, 4);
    let field = PrimeField::new(P61)?;
    let mons = weight_monomials(&reg, &[2, 2, 2], &[2, 2, 2], &[3, 1, 1, 1]);
    let kernel = vanishing_kernel(field, &reg, &mons, 8, seed)?;
    if kernel.len() != 1 {
        return Err(Error::Precondition(format!(
            "expected a one-dimensional vanishing space, found {}",
            kernel.len()
        )));
    }
    let coeffs = lift_to_integers(&field, &kernel[0])?;
    let top = primitive(&MultiPoly::from_terms(
        Rationals,
        mons.into_iter()
            .zip(coeffs)
            .map(|(m, c)| (m, Rationals.from_bigint(&c))),
    ));
    // The reconstruction above used one prime; confirm at another.
    let check = PrimeField::new(P31)?;
    let top_check = top.map_field(&check, |c| check.from_rational(c))?;
    for s in 0..4 {
        let t = crate::sample::rank_r(check, (3, 3, 4), 4, 1 << 20, crate::rng::derive_seed(seed, &[s]));
        if !check.is_zero(&top_check.eval_dense(&t.registry_values(&reg)?)) {
            return Err(Error::Precondition("reconstructed polynomial fails the second prime".into()));
        }
    }
    let mut out = Vec::new();
    for (k, l) in slice_pairs() {
        let diag = swap_slices(&top, &reg, 1, k);
        out.push(if k == l { diag } else { primitive(&lower_slice(&diag, &reg, k, l)) });
    }
    Ok(out)
}

/// Full text of the family file produced by [`derive_family`].
pub fn family_file(seed: u64) -> Result<String> {
    let polys = derive_family(seed)?;
    let header = vec![
        "Degree-6 equations vanishing on border rank <= 4 tensors of format 3x3x4.".to_string(),
        "Line n is the weight vector for slice pair n of (1,1),(1,2),(1,3),(1,4),(2,2),...,(4,4).".to_string(),
        format!("Generated by `brcert derive lm-basis --seed {seed}`."),
    ];
    Ok(super::family::format_family(&polys, &header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::P61;

    #[test]
    fn weight_space_sizes() {
        let reg = VarRegistry::new(3, 3, 4);
        assert_eq!(weight_monomials(&reg, &[2, 2, 2], &[2, 2, 2], &[3, 1, 1, 1]).len(), 1512);
        assert_eq!(weight_monomials(&reg, &[2, 2, 2], &[2, 2, 2], &[2, 2, 1, 1]).len(), 2196);
    }

    #[test]
    fn reconstruct_small_fractions() {
        let f = PrimeField::new(P61).unwrap();
        let a = f.div(&f.from_i64(-7), &f.from_i64(12)).unwrap();
        assert_eq!(rational_reconstruct(a, P61), Some((-7, 12)));
    }

    #[test]
    #[ignore = "slow; run to inspect the interpolation kernels"]
    fn kernel_dimension_probe() {
        let reg = VarRegistry::new(3, 3, 4);
        let f = PrimeField::new(P61).unwrap();
        for content in [[3u8, 1, 1, 1], [2, 2, 1, 1]] {
            let mons = weight_monomials(&reg, &[2, 2, 2], &[2, 2, 2], &content);
            let t = std::time::Instant::now();
            let k = vanishing_kernel(f, &reg, &mons, 8, 1).unwrap();
            eprintln!("{content:?}: {} monomials, kernel dim {}, {:?}", mons.len(), k.len(), t.elapsed());
        }
    }
}
