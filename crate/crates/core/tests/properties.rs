use std::sync::{Arc, OnceLock};

use patchalg::boolalg::{BoolAlg, BoolElem};
use patchalg::bundle::{self, random_bundle};
use patchalg::finring::FiniteRing;
use patchalg::patchalg::PatchAlgebra;
use patchalg::presheaf::PatchPresheaf;
use patchalg::topo::SubringSpace;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Multiplication in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1, by shift and add.
fn gf256_mul(mut a: u16, mut b: u16) -> u16 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a & 0x100 != 0 {
            a ^= 0x11b;
        }
        b >>= 1;
    }
    acc
}

fn gf256() -> &'static FiniteRing {
    static R: OnceLock<FiniteRing> = OnceLock::new();
    R.get_or_init(|| FiniteRing::gf(2, 8, Some(&[1, 1, 0, 1, 1, 0, 0, 0, 1])).unwrap())
}

fn gf(k: u32) -> FiniteRing {
    FiniteRing::gf(2, k, None).unwrap()
}

fn spaces() -> &'static [SubringSpace] {
    static S: OnceLock<Vec<SubringSpace>> = OnceLock::new();
    S.get_or_init(|| {
        let rings = vec![
            gf(2),
            gf(4),
            FiniteRing::product(&[&gf(2), &gf(1)]).unwrap(),
            FiniteRing::poly_quotient(2, &[0, 0, 1]).unwrap(),
            FiniteRing::zmod(12).unwrap(),
        ];
        rings.into_iter().map(|r| SubringSpace::enumerate(Arc::new(r), 4096).unwrap()).collect()
    })
}

fn elem(alg: &BoolAlg, bits: u64) -> BoolElem {
    alg.element(bits & mask(alg)).unwrap()
}

fn mask(alg: &BoolAlg) -> u64 {
    (1u64 << alg.atom_count()) - 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gf256_tables_match_shift_and_add(a in 0u16..256, b in 0u16..256) {
        let r = gf256();
        prop_assert_eq!(r.mul(a as usize, b as usize), gf256_mul(a, b) as usize);
        prop_assert_eq!(r.add(a as usize, b as usize), (a ^ b) as usize);
    }

    #[test]
    fn zmod_tables_are_residue_arithmetic(n in 2usize..80, x in 0usize..1000, y in 0usize..1000) {
        let r = FiniteRing::zmod(n).unwrap();
        let (x, y) = (x % n, y % n);
        prop_assert_eq!(r.mul(x, y), x * y % n);
        prop_assert_eq!(r.sub(x, y), (x + n - y) % n);
        prop_assert_eq!(r.is_unit(x), (1..=n).any(|d| x * d % n == 1));
    }

    #[test]
    fn boolean_laws_and_stone_map(k in 1u32..=6, x in any::<u64>(), y in any::<u64>()) {
        let alg = BoolAlg::new(k).unwrap();
        let (x, y) = (elem(&alg, x), elem(&alg, y));
        let nx = alg.complement(x).unwrap();
        let ny = alg.complement(y).unwrap();
        prop_assert_eq!(alg.complement(alg.join(x, y).unwrap()).unwrap(), alg.meet(nx, ny).unwrap());
        prop_assert_eq!(alg.leq(x, y).unwrap(), alg.meet(x, y).unwrap() == x);
        let stone = alg.stone_iso().unwrap();
        prop_assert_eq!(stone.apply(alg.join(x, y).unwrap()).unwrap().bits(), stone.apply(x).unwrap().bits() | stone.apply(y).unwrap().bits());
        prop_assert_eq!(stone.apply(nx).unwrap().bits(), !stone.apply(x).unwrap().bits() & mask(&alg));
    }

    #[test]
    fn join_cover_decides_ideal_membership(k in 1u32..=6, gens in prop::collection::vec(any::<u64>(), 0..5), e in any::<u64>()) {
        let alg = BoolAlg::new(k).unwrap();
        let gens: Vec<BoolElem> = gens.into_iter().map(|g| elem(&alg, g)).collect();
        let e = elem(&alg, e);
        let union = gens.iter().fold(0, |acc, g| acc | g.bits());
        let ideal = alg.ideal_generated(&gens).unwrap();
        prop_assert_eq!(ideal.contains(e), e.bits() & !union == 0);
        prop_assert_eq!(alg.join_cover(&gens, e).unwrap().is_some(), ideal.contains(e));
    }

    #[test]
    fn random_presheaves_satisfy_the_intersection_law(ring in 0usize..5, atoms in 1u32..=4, seed in any::<u64>()) {
        let space = &spaces()[ring];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PatchPresheaf::random(space, atoms, &mut rng).unwrap();
        let alg = p.algebra();
        prop_assert!(p.section(alg.bottom()) == &space.ring().whole());
        for e in alg.elements().unwrap() {
            for f in alg.elements().unwrap() {
                let meet = p.section(e).intersection(p.section(f));
                prop_assert!(&meet == p.section(alg.join(e, f).unwrap()));
            }
            prop_assert!(&p.recover_section(e).unwrap() == p.section(e));
        }
    }

    #[test]
    fn patch_algebra_operations_match_the_oracle(ring in 0usize..5, atoms in 1u32..=3, seed in any::<u64>(), i in any::<usize>(), j in any::<usize>()) {
        let space = &spaces()[ring];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PatchPresheaf::random(space, atoms, &mut rng).unwrap();
        let a = PatchAlgebra::build(&p).unwrap();
        let expected: usize = (0..atoms as u64).map(|t| p.sections()[1 << t].len()).product();
        prop_assert_eq!(a.size(), expected);
        let (i, j) = (i % a.size(), j % a.size());
        let (x, y) = (a.element(i).unwrap().clone(), a.element(j).unwrap().clone());
        prop_assert_eq!(a.evaluate(&x).unwrap(), i);
        let o = a.oracle();
        prop_assert_eq!(a.evaluate(&a.add(&x, &y).unwrap()).unwrap(), o.add(i, j));
        prop_assert_eq!(a.evaluate(&a.mul(&x, &y).unwrap()).unwrap(), o.mul(i, j));
        prop_assert_eq!(a.evaluate(&a.neg(&x).unwrap()).unwrap(), o.neg(i));
        for (t, c) in a.coordinates(&x).into_iter().enumerate() {
            prop_assert!(p.sections()[1 << t].contains(c));
        }
    }

    #[test]
    fn random_bundles_round_trip(ring in 0usize..5, points in 0usize..=4, seed in any::<u64>()) {
        let space = &spaces()[ring];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bundle(space, points, &mut rng).unwrap();
        prop_assert!(bundle::check_bundle_round_trip(&f).is_ok());
        prop_assert!(bundle::check_presheaf_round_trip(&bundle::functor_r(&f).unwrap()).is_ok());
    }
}

#[test]
fn field_units_are_the_nonzero_elements() {
    for k in 1..=6 {
        let r = gf(k);
        assert_eq!(r.units().count_ones(..), r.size() - 1);
        assert_eq!(r.idempotents(), vec![r.zero(), r.one()]);
    }
}

#[test]
fn boolean_products_have_all_idempotents() {
    let f2 = gf(1);
    for m in 1..=4 {
        let factors = vec![&f2; m];
        let r = FiniteRing::product(&factors).unwrap();
        assert_eq!(r.idempotents().len(), 1 << m);
        assert_eq!(r.pierce().unwrap().stalks.len(), m);
    }
}
