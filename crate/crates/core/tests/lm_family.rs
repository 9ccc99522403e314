//! The bundled degree-6 family is reproducible from scratch.

use brcert::field::{Field, PrimeField, P61};
use brcert::lm6::basis::family_file;
use brcert::lm6::LmFamily;
use brcert::sample;

#[test]
fn derivation_reproduces_bundled_file() {
    let derived = family_file(1).unwrap();
    let bundled = LmFamily::bundled();
    let parsed = LmFamily::parse(&derived, "derived").unwrap();
    assert_eq!(parsed.polys(), bundled.polys());
    assert_eq!(
        derived,
        include_str!("../data/lm_deg6.txt"),
        "comment lines or term order differ"
    );
}

#[test]
fn bundled_family_separates_samples_mod_p() {
    let f = PrimeField::new(P61).unwrap();
    let lm = LmFamily::bundled().in_field(&f).unwrap();
    for seed in 0..20 {
        let t = sample::rank_r(f, (3, 3, 4), 4, 1000, seed);
        assert!(lm.eval(&t).unwrap().iter().all(|v| f.is_zero(v)));
        let d = sample::dense(f, (3, 3, 4), 1000, seed);
        let nonzero = lm.eval(&d).unwrap().iter().filter(|v| !f.is_zero(v)).count();
        assert_eq!(nonzero, 10, "seed {seed}");
    }
}
