//! The degree-6 layer: the quartic `f`, the ten degree-6 polynomials, the
//! special stratum and membership by degrees 6 and 9.

pub mod basis;
pub mod family;
pub mod normal_form;
pub mod special;

pub use family::{restricted_identity_check, CompiledFamily, LmFamily};
pub use special::{f_det, f_poly, special_basis_change, special_membership};

use crate::error::Result;
use crate::field::Field;
use crate::report::{MembershipReport, Stage, Witness};
use crate::sym9::{build_sym_matrices, sym9_stage};
use crate::tensor::Tensor3;

/// Stage for the ten degree-6 conditions.
pub fn lm6_stage<F: Field>(family: &CompiledFamily<F>, t: &Tensor3<F>) -> Result<Stage> {
    let witness = family
        .first_nonzero(t)?
        .map(|(index, v)| Witness::LmValue {
            index: index + 1,
            value: t.field().format(&v),
        });
    Ok(Stage::new("lm6", witness.is_none(), witness))
}

/// Degree 9 plus degree 6 membership with a precompiled family.
pub fn route_b_compiled<F: Field>(t: &Tensor3<F>, family: &CompiledFamily<F>) -> Result<MembershipReport> {
    let s = build_sym_matrices(t)?;
    let stages = vec![sym9_stage(&s)?, lm6_stage(family, t)?];
    Ok(MembershipReport::from_stages(
        "B",
        t.field().mode().to_string(),
        stages,
        None,
    ))
}

/// Degree 9 plus degree 6 membership.
pub fn membership_route_b<F: Field>(t: &Tensor3<F>, family: &LmFamily) -> Result<MembershipReport> {
    route_b_compiled(t, &family.in_field(t.field())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rationals, PrimeField, P61};
    use crate::report::Verdict;
    use crate::sample;

    #[test]
    fn route_b_examples() {
        let fam = LmFamily::bundled();
        let compiled = fam.in_field(&Rationals).unwrap();
        for seed in 0..5 {
            let t = sample::rank_r(Rationals, (3, 3, 4), 4, 9, seed);
            assert_eq!(route_b_compiled(&t, &compiled).unwrap().verdict, Verdict::Member);
            let t = sample::dense(Rationals, (3, 3, 4), 9, seed);
            assert_eq!(route_b_compiled(&t, &compiled).unwrap().verdict, Verdict::NonMember);
        }
        // Special form with f != 0 and x(3,3,1) = 1: only the degree-6 stage fails.
        let mut t = sample::special_form(Rationals, true, false, 9, 3);
        t.set(2, 2, 0, Rationals.one());
        assert!(!Rationals.is_zero(&f_det(&t).unwrap()));
        let r = route_b_compiled(&t, &compiled).unwrap();
        assert!(r.stages[0].pass);
        assert!(matches!(r.stages[1].witness, Some(Witness::LmValue { .. })));
    }

    #[test]
    fn route_b_scale_invariant() {
        let fam = LmFamily::bundled();
        let f = PrimeField::new(P61).unwrap();
        for seed in 0..5 {
            let t = sample::special_form(f, false, seed % 2 == 0, 9, seed);
            let a = membership_route_b(&t, &fam).unwrap().verdict;
            let scaled = t.scale(&f.from_i64(-7));
            assert_eq!(membership_route_b(&scaled, &fam).unwrap().verdict, a);
        }
    }
}
