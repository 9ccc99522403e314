//! Experiment harness: reference tensors, route cross-validation,
//! agreement checks and the floating-point layer.

pub mod acceptance;
pub mod cross;
pub mod float;

pub use cross::{
    cross_validate_334, mode_stability_334, two_prime_444, AgreementCheck, CrossReport, ExperimentSpec,
    SampleClass,
};
pub use float::{float_check, ToleranceModel};

use crate::field::Field;
use crate::tensor::Tensor3;

/// The 2x2 matrix multiplication tensor: a one at
/// `((i,j), (j,k), (k,i))` for `i, j, k` in {1, 2}, with pairs flattened
/// as `(a, b) -> 2(a-1) + b`.
pub fn matmul_tensor<F: Field>(field: F) -> Tensor3<F> {
    let pair = |a: usize, b: usize| 2 * a + b;
    let mut t = Tensor3::zeros(field.clone(), (4, 4, 4)).expect("valid dims");
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                t.set(pair(i, j), pair(j, k), pair(k, i), field.one());
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, P31};
    use crate::lift444::{membership444, LiftConfig};
    use crate::lm6::LmFamily;
    use crate::report::{Verdict, Witness};

    #[test]
    fn matmul_shape() {
        let t = matmul_tensor(Rationals);
        let ones = t.entries().iter().filter(|v| **v == Rationals.one()).count();
        let zeros = t.entries().iter().filter(|v| Rationals.is_zero(v)).count();
        assert_eq!((ones, zeros), (8, 56));
        assert_eq!(t.flattening_ranks().unwrap(), [4, 4, 4]);
        // ((1,2),(2,1),(1,1)) -> (2, 3, 1) in 1-based flattening.
        assert_eq!(*t.get(1, 2, 0), Rationals.one());
    }

    #[test]
    fn matmul_is_rejected_by_degree_five() {
        let f = PrimeField::new(P31).unwrap();
        let lm = LmFamily::bundled().in_field(&f).unwrap();
        let r = membership444(&matmul_tensor(f), &lm, &LiftConfig { trials: 4, seed: 0 }).unwrap();
        assert_eq!(r.verdict, Verdict::NonMember);
        let first = r.first_failure().unwrap();
        assert!(first.name.starts_with("strassen5"));
        assert!(matches!(first.witness, Some(Witness::Strassen { .. })));
    }
}
