use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::finring::{ring_isomorphic, Specker};
use crate::topo::SubringSpace;

fn gf(k: u32) -> Arc<FiniteRing> {
    Arc::new(FiniteRing::gf(2, k, None).unwrap())
}

/// `R_a = gf(4)`, `R_b = gf(2)` inside `R = gf(4)`.
fn gf4_example() -> PatchAlgebra {
    let r = gf(2);
    let prime = r.prime_subring();
    let p = PatchPresheaf::from_atoms(r.clone(), vec![r.whole(), prime]).unwrap();
    PatchAlgebra::build(&p).unwrap()
}

fn full_space(r: FiniteRing) -> PatchAlgebra {
    let space = SubringSpace::enumerate(r, DEFAULT_CAP).unwrap();
    PatchAlgebra::build(&space.presheaf().unwrap()).unwrap()
}

#[test]
fn one_atom_algebra_is_the_top_section() {
    let r = gf(2);
    let p = PatchPresheaf::from_atoms(r.clone(), vec![r.whole()]).unwrap();
    let a = PatchAlgebra::build(&p).unwrap();
    assert_eq!(a.size(), 4);
    assert!(ring_isomorphic(a.oracle(), &r).unwrap().is_some());
    let psi = a.psi(&a.algebra().maximal_ideal_at(0).unwrap()).unwrap();
    assert!(psi.hom.is_bijective(&psi.ring));
}

#[test]
fn gf4_example_is_gf4_times_gf2() {
    let a = gf4_example();
    assert_eq!(a.size(), 8);
    let product = FiniteRing::product(&[&FiniteRing::gf(2, 2, None).unwrap(), &FiniteRing::zmod(2).unwrap()]).unwrap();
    assert!(ring_isomorphic(a.oracle(), &product).unwrap().is_some());
}

#[test]
fn squaring_in_the_gf4_example() {
    let a = gf4_example();
    // In gf(4) = gf(2)[x]/(x²+x+1), ω = x has index 2 and ω² = x+1 index 3.
    assert_eq!(a.ring().label(2), "x");
    let w = a.normalize(&[(2, 0b01), (1, 0b10)]).unwrap();
    let sq = a.mul(&w, &w).unwrap();
    assert_eq!(sq.terms(), &[(1, 0b10), (3, 0b01)]);
}

#[test]
fn identities_hold_for_every_element() {
    let a = gf4_example();
    for x in a.elements() {
        assert_eq!(&a.add(x, &a.zero()).unwrap(), x);
        assert_eq!(&a.mul(x, &a.one()).unwrap(), x);
        assert_eq!(a.add(x, &a.neg(x).unwrap()).unwrap(), a.zero());
    }
}

#[test]
fn constant_presheaf_gives_the_specker_algebra() {
    let r = gf(2);
    let p = PatchPresheaf::constant(r.clone(), BoolAlg::new(2).unwrap()).unwrap();
    let a = PatchAlgebra::build(&p).unwrap();
    assert_eq!(a.size(), 16);
    let s = Specker::new(&r, BoolAlg::new(2).unwrap()).unwrap();
    assert!(ring_isomorphic(a.oracle(), s.ring()).unwrap().is_some());
}

#[test]
fn colon_recovers_sections() {
    let a = gf4_example();
    let alg = a.algebra();
    assert_eq!(a.colon(alg.bottom()).unwrap(), a.ring().whole());
    assert_eq!(a.colon(alg.element(0b10).unwrap()).unwrap(), a.ring().prime_subring());
    assert_eq!(a.colon(alg.top()).unwrap(), a.ring().prime_subring());
}

#[test]
fn psi_at_the_ideal_below_b() {
    let a = gf4_example();
    let alg = a.algebra();
    let m = alg.principal_ideal(alg.element(0b10).unwrap()).unwrap();
    let psi = a.psi(&m).unwrap();
    let w = a.normalize(&[(2, 0b01), (1, 0b10)]).unwrap();
    let value = psi.hom.apply(a.evaluate(&w).unwrap());
    assert_eq!(psi.embedding[value], 2);
    let b = a.idempotent(alg.element(0b10).unwrap()).unwrap();
    let b_a: Vec<usize> = a.elements().iter().map(|x| a.evaluate(&a.mul(&b, x).unwrap()).unwrap()).collect();
    let zero_at_a: Vec<usize> = (0..a.size()).filter(|&i| a.elements()[i].coefficient_at(0) == Some(a.ring().zero())).collect();
    let mut b_a_sorted = b_a.clone();
    b_a_sorted.sort_unstable();
    b_a_sorted.dedup();
    assert_eq!(psi.kernel.elements().collect::<Vec<_>>(), zero_at_a);
    assert_eq!(b_a_sorted, zero_at_a);
}

#[test]
fn psi_rejects_non_maximal_ideals() {
    let a = gf4_example();
    let zero = a.algebra().principal_ideal(a.algebra().bottom()).unwrap();
    assert_eq!(a.psi(&zero).unwrap_err(), Error::NotMaximal);
}

#[test]
fn forms_are_unique_and_non_members_rejected() {
    let a = gf4_example();
    assert!(a.check_unique_forms().unwrap() >= a.size());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sample = a.sample_non_members(100, &mut rng).unwrap();
    assert!(sample.tested > 0);
    assert_eq!(sample.tested + sample.vacuous, 100);
}

#[test]
fn constant_presheaf_has_no_non_members() {
    let r = gf(2);
    let p = PatchPresheaf::constant(r, BoolAlg::new(2).unwrap()).unwrap();
    let a = PatchAlgebra::build(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_eq!(a.sample_non_members(20, &mut rng).unwrap(), NonMemberSample { tested: 0, vacuous: 20 });
}

#[test]
fn normalize_rejects_overlaps_and_out_of_section_coefficients() {
    let a = gf4_example();
    assert!(matches!(a.normalize(&[(1, 0b11), (0, 0b01)]), Err(Error::InvalidArgument(_))));
    assert!(matches!(a.normalize(&[(2, 0b10)]), Err(Error::NotInAlgebra(_))));
    assert!(matches!(a.scalar(2), Err(Error::NotInAlgebra(_))));
}

#[test]
fn degenerate_presheaf_is_rejected() {
    let r = gf(2);
    let p = PatchPresheaf::new(r.clone(), BoolAlg::degenerate(), vec![r.whole()]).unwrap();
    assert_eq!(PatchAlgebra::build(&p).unwrap_err(), Error::ZeroRing);
}

#[test]
fn gf16_pierce_stalks_are_its_subfields() {
    let a = full_space(FiniteRing::gf(2, 4, None).unwrap());
    assert_eq!(a.size(), 2 * 4 * 16);
    let report = a.pierce_report().unwrap();
    assert!(report.certified(), "{:?}", report.failures);
    assert!(report.idempotents_are_b && report.fibers_distinct && report.supports_clopen);
    let mut sizes = report.pierce_stalk_sizes.clone();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![2, 4, 16]);
    let s = a.structure_report(DEFAULT_CAP).unwrap();
    assert!(s.certified(), "{:?}", s.failures);
    assert!(s.predicates.is_rickart && s.predicates.is_clean && s.predicates.is_gelfand);
    assert_eq!(s.minimal_primes.len(), 3);
}

#[test]
fn decomposable_ambient_raises_the_hypothesis_flag() {
    let f2 = FiniteRing::zmod(2).unwrap();
    let r = Arc::new(FiniteRing::product(&[&f2, &f2]).unwrap());
    let p = PatchPresheaf::constant(r, BoolAlg::new(2).unwrap()).unwrap();
    let report = PatchAlgebra::build(&p).unwrap().pierce_report().unwrap();
    assert!(report.hypothesis_flag);
    assert_eq!((report.idempotents_of_a, report.elements_of_b), (16, 4));
    assert!(!report.idempotents_are_b);
}

#[test]
fn repeated_fibers_give_isomorphic_stalks() {
    let r = gf(2);
    let f = PatchBundle::new(r.clone(), vec![r.whole(), r.whole()]).unwrap();
    let report = PatchAlgebra::build_from_bundle(&f).unwrap().pierce_report().unwrap();
    assert!(report.certified());
    assert!(!report.fibers_distinct);
    assert_eq!(report.pierce_stalk_sizes, vec![4, 4]);
}

#[test]
fn dual_numbers_are_clean_but_not_rickart() {
    let r = FiniteRing::poly_quotient(2, &[0, 0, 1]).unwrap();
    let a = full_space(r);
    let s = a.structure_report(DEFAULT_CAP).unwrap();
    assert!(s.certified(), "{:?}", s.failures);
    assert!(s.predicates.is_clean);
    assert!(!s.predicates.is_rickart);
    assert!(s.rickart_failure.is_some());
}
