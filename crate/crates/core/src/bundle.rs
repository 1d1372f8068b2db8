//! Patch bundles and the functors between bundles and presheaves.
//!
//! A patch bundle is a map `f: Y → Σ(R)` from a finite discrete space, so
//! it is just a list of fibers indexed by the points `0..|Y|`. `Clop(Y)` is
//! the powerset of `Y` with atoms the points, and `Max(B)` is listed in atom
//! order, so the Stone maps relating `Y`, `Max(Clop(Y))`, `B` and
//! `Clop(Max(B))` all preserve labels. The round-trip checks compute those
//! maps anyway and compare through them.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt};

use crate::boolalg::{stone_homeo, BoolAlg, BoolHom, MAX_ENUM_ATOMS};
use crate::error::{Error, Result};
use crate::finring::{FiniteRing, Subring};
use crate::presheaf::{Distinguished, PatchPresheaf, PresheafMorphism};
use crate::topo::SubringSpace;

/// A map from the points `0..n` of a finite discrete space to subrings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchBundle {
    ring: Arc<FiniteRing>,
    fibers: Vec<Subring>,
}

impl PatchBundle {
    pub fn new(ring: Arc<FiniteRing>, fibers: Vec<Subring>) -> Result<Self> {
        if fibers.len() > MAX_ENUM_ATOMS as usize {
            return Err(Error::TooManyAtoms(fibers.len() as u32));
        }
        for s in &fibers {
            ring.check_subring(s)?;
        }
        let bundle = PatchBundle { ring, fibers };
        bundle.check_continuity()?;
        Ok(bundle)
    }

    /// The identity of a space, viewed as a bundle over itself.
    pub fn identity(space: &SubringSpace) -> Result<Self> {
        Self::new(space.ring().clone(), space.members().to_vec())
    }

    /// Preimages of the basic Zariski opens `U(r)` are subsets of `Y`, hence
    /// open in the discrete topology; checks each is an element of
    /// `Clop(Y)`.
    fn check_continuity(&self) -> Result<()> {
        let clop = self.clop_algebra()?;
        for r in self.ring.elements() {
            let pre = self
                .fibers
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(r))
                .fold(0u64, |acc, (y, _)| acc | 1 << y);
            clop.element(pre)?;
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn points(&self) -> usize {
        self.fibers.len()
    }

    pub fn fibers(&self) -> &[Subring] {
        &self.fibers
    }

    pub fn fiber(&self, y: usize) -> &Subring {
        &self.fibers[y]
    }

    pub fn clop_algebra(&self) -> Result<BoolAlg> {
        BoolAlg::new(self.fibers.len() as u32)
    }

    /// `f(Y)`.
    pub fn image(&self) -> Result<SubringSpace> {
        SubringSpace::from_subrings(self.ring.clone(), self.fibers.clone())
    }

    pub fn is_injective(&self) -> bool {
        self.image().map(|x| x.len() == self.fibers.len()).unwrap_or(false)
    }
}

/// A morphism `f₁ → f₂` of bundles: `g: Y₁ → Y₂` with
/// `f₂(g(y)) ⊆ f₁(y)` for every `y ∈ Y₁`.
#[derive(Clone, Debug)]
pub struct BundleMorphism {
    pub source: PatchBundle,
    pub target: PatchBundle,
    pub map: Vec<usize>,
}

impl BundleMorphism {
    pub fn new(source: PatchBundle, target: PatchBundle, map: Vec<usize>) -> Result<Self> {
        let m = BundleMorphism { source, target, map };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(f: &PatchBundle) -> Result<Self> {
        Self::new(f.clone(), f.clone(), (0..f.points()).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.map.len() != self.source.points() || self.map.iter().any(|&y| y >= self.target.points()) {
            return Err(Error::Morphism("point map has the wrong shape".into()));
        }
        for (y, &gy) in self.map.iter().enumerate() {
            if !self.target.fibers[gy].is_subset(&self.source.fibers[y]) {
                return Err(Error::Morphism(format!("f₂(g(y)) ⊄ f₁(y) at y = {y}")));
            }
        }
        Ok(())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &BundleMorphism) -> Result<BundleMorphism> {
        if self.target != next.source {
            return Err(Error::Morphism("morphisms are not composable".into()));
        }
        let map = self.map.iter().map(|&y| next.map[y]).collect();
        BundleMorphism::new(self.source.clone(), next.target.clone(), map)
    }
}

/// **R**: the presheaf `U ↦ ⋂_{y ∈ U} f(y)` over `Clop(Y)`, with `R_∅ = R`.
pub fn functor_r(f: &PatchBundle) -> Result<PatchPresheaf> {
    let alg = f.clop_algebra()?;
    let sections = alg
        .elements()?
        .map(|u| u.atoms().fold(f.ring.whole(), |acc, y| acc.intersection(&f.fibers[y])))
        .collect();
    PatchPresheaf::new(f.ring.clone(), alg, sections)
}

/// **R** on morphisms: `g` goes to `g*: Clop(Y₂) → Clop(Y₁)`, `V ↦ g⁻¹(V)`,
/// whose atom map is `g` itself.
pub fn functor_r_morphism(m: &BundleMorphism) -> Result<PresheafMorphism> {
    let hom = BoolHom::new(m.target.clop_algebra()?, m.source.clop_algebra()?, m.map.clone())?;
    PresheafMorphism::new(functor_r(&m.source)?, functor_r(&m.target)?, hom)
}

/// **B**: the bundle `Max(B) → X(𝓡)`, `m ↦ 𝓡_m`, with `Max(B)` in atom
/// order. Surjectivity onto the stalk space is checked.
pub fn functor_b(p: &PatchPresheaf) -> Result<PatchBundle> {
    let stalks = p.all_stalks()?;
    let bundle = PatchBundle::new(p.ring().clone(), stalks)?;
    let space = p.stalk_space()?;
    if bundle.image()?.members() != space.members() {
        return Err(Error::Internal("stalk bundle does not map onto the stalk space".into()));
    }
    Ok(bundle)
}

/// **B** on morphisms: `h` goes to its dual map `h*: Max(B₁) → Max(B₂)`.
pub fn functor_b_morphism(m: &PresheafMorphism) -> Result<BundleMorphism> {
    let map = m.hom.dual_map()?;
    BundleMorphism::new(functor_b(&m.source)?, functor_b(&m.target)?, map)
}

/// Checks `B(R(f)) ≅ f` through the Stone homeomorphism
/// `Y → Max(Clop(Y))`, and that `f(Y)` is the stalk space of `R(f)`.
pub fn check_bundle_round_trip(f: &PatchBundle) -> Result<()> {
    let p = functor_r(f)?;
    let back = functor_b(&p)?;
    let homeo = stone_homeo(f.points())?;
    for y in 0..f.points() {
        if back.fiber(homeo.position(y)) != f.fiber(y) {
            return Err(Error::Internal(format!("B(R(f)) differs from f at point {y}")));
        }
    }
    if f.image()?.members() != p.stalk_space()?.members() {
        return Err(Error::Internal("image of f is not the stalk space of R(f)".into()));
    }
    Ok(())
}

/// Checks `R(B(P)) ≅ P` through the Stone isomorphism
/// `e ↦ { m : e ∉ m }`.
pub fn check_presheaf_round_trip(p: &PatchPresheaf) -> Result<()> {
    let back = functor_r(&functor_b(p)?)?;
    let iso = p.algebra().stone_iso()?;
    if back.algebra() != iso.clop_algebra() {
        return Err(Error::Internal("R(B(P)) is not over Clop(Max(B))".into()));
    }
    for e in p.algebra().elements()? {
        if back.section(iso.apply(e)?) != p.section(e) {
            return Err(Error::Internal(format!("R(B(P)) differs from P at e = {:#b}", e.bits())));
        }
    }
    Ok(())
}

/// Naturality of `B∘R ≅ id` on a bundle morphism: the point map of
/// `B(R(g))` is `g` transported along the Stone homeomorphisms.
pub fn check_bundle_morphism_naturality(g: &BundleMorphism) -> Result<()> {
    let brg = functor_b_morphism(&functor_r_morphism(g)?)?;
    let h1 = stone_homeo(g.source.points())?;
    let h2 = stone_homeo(g.target.points())?;
    for (y, &gy) in g.map.iter().enumerate() {
        if brg.map[h1.position(y)] != h2.position(gy) {
            return Err(Error::Internal(format!("naturality square fails at point {y}")));
        }
    }
    Ok(())
}

/// Naturality of `R∘B ≅ id` on a presheaf morphism: the homomorphism of
/// `R(B(h))` is `h` transported along the Stone isomorphisms.
pub fn check_presheaf_morphism_naturality(m: &PresheafMorphism) -> Result<()> {
    let rbh = functor_r_morphism(&functor_b_morphism(m)?)?;
    let iso1 = m.source.algebra().stone_iso()?;
    let iso2 = m.target.algebra().stone_iso()?;
    for f in m.target.algebra().elements()? {
        let left = rbh.hom.apply(iso2.apply(f)?)?;
        let right = iso1.apply(m.hom.apply(f)?)?;
        if left != right {
            return Err(Error::Internal(format!("naturality square fails at f = {:#b}", f.bits())));
        }
    }
    Ok(())
}

/// Functoriality on a composable pair `f₁ → f₂ → f₃`: identities go to
/// identities and composites to composites, under both **R** and **B∘R**.
pub fn check_functoriality(g1: &BundleMorphism, g2: &BundleMorphism) -> Result<()> {
    let r1 = functor_r_morphism(g1)?;
    let r2 = functor_r_morphism(g2)?;
    let r12 = functor_r_morphism(&g1.then(g2)?)?;
    if r1.then(&r2)?.hom != r12.hom {
        return Err(Error::Internal("R does not preserve composition".into()));
    }
    let b12 = functor_b_morphism(&r12)?;
    if functor_b_morphism(&r1)?.then(&functor_b_morphism(&r2)?)?.map != b12.map {
        return Err(Error::Internal("B does not preserve composition".into()));
    }
    let id = BundleMorphism::identity(&g1.source)?;
    if functor_r_morphism(&id)?.hom != PresheafMorphism::identity(&r1.source)?.hom {
        return Err(Error::Internal("R does not preserve identities".into()));
    }
    let pid = PresheafMorphism::identity(&r1.source)?;
    if functor_b_morphism(&pid)?.map != (0..g1.source.points()).collect::<Vec<_>>() {
        return Err(Error::Internal("B does not preserve identities".into()));
    }
    Ok(())
}

/// Checks, for the subspace `X` of `space` selected by `mask`, that
/// `R(X)` is distinguished with `e_t = U_X(t)`, that `X(R(X)) = X`, and that
/// **R** of the identity bundle of `X` is `R(X)`.
pub fn check_space_round_trip(space: &SubringSpace, mask: u64) -> Result<()> {
    let x = space.subspace(space.clop_algebra().element(mask)?)?;
    let p = x.presheaf()?;
    let Distinguished::Yes { e_t } = p.distinguished()? else {
        return Err(Error::Internal(format!("R(X) is not distinguished for X = {mask:#b}")));
    };
    for t in space.ring().elements() {
        if e_t[t] != x.zariski_open(&[t])?.bits() {
            return Err(Error::Internal(format!("e_t ≠ U_X(t) at t = {t}")));
        }
    }
    if p.stalk_space()?.members() != x.members() {
        return Err(Error::Internal(format!("X(R(X)) ≠ X for X = {mask:#b}")));
    }
    let via_bundle = functor_r(&PatchBundle::identity(&x)?)?;
    if via_bundle.sections() != p.sections() {
        return Err(Error::Internal("R of the identity bundle differs from R(X)".into()));
    }
    Ok(())
}

/// Checks `R(X(P)) = P` for a distinguished presheaf, up to the Boolean
/// isomorphism induced by the bijection `Max(B) → X(P)`, `m ↦ 𝓡_m`.
pub fn check_distinguished_round_trip(p: &PatchPresheaf) -> Result<()> {
    if !p.distinguished()?.is_distinguished() {
        return Err(Error::InvalidArgument("presheaf is not distinguished".into()));
    }
    let x = p.stalk_space()?;
    let stalks = p.all_stalks()?;
    let phi: Vec<usize> = stalks
        .iter()
        .map(|s| x.index_of(s).ok_or_else(|| Error::Internal("stalk missing from X(P)".into())))
        .collect::<Result<_>>()?;
    let mut sorted = phi.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != phi.len() || phi.len() != x.len() {
        return Err(Error::Internal("Max(B) → X(P) is not bijective".into()));
    }
    let q = x.presheaf()?;
    for e in p.algebra().elements()? {
        let image = e.atoms().fold(0u64, |acc, a| acc | 1 << phi[a]);
        if q.sections()[image as usize] != *p.section(e) {
            return Err(Error::Internal(format!("R(X(P)) differs from P at e = {:#b}", e.bits())));
        }
    }
    Ok(())
}

/// A random bundle with `points` fibers drawn from `space`.
pub fn random_bundle(space: &SubringSpace, points: usize, rng: &mut impl Rng) -> Result<PatchBundle> {
    let fibers = (0..points)
        .map(|_| space.members().choose(rng).cloned())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidArgument("empty subring space".into()))?;
    PatchBundle::new(space.ring().clone(), fibers)
}

/// A random composable pair `f₁ → f₂ → f₃` over `space`. The bundles are
/// built backwards so each fiber contains the fiber it maps to.
pub fn random_composable_pair(space: &SubringSpace, rng: &mut impl Rng) -> Result<(BundleMorphism, BundleMorphism)> {
    let max_points = 3;
    let f3 = random_bundle(space, rng.random_range(1..=max_points), rng)?;
    let (f2, g2) = random_preimage(space, &f3, rng.random_range(1..=max_points), rng)?;
    let (f1, g1) = random_preimage(space, &f2, rng.random_range(1..=max_points), rng)?;
    let m1 = BundleMorphism::new(f1, f2.clone(), g1)?;
    let m2 = BundleMorphism::new(f2, f3, g2)?;
    Ok((m1, m2))
}

fn random_preimage(
    space: &SubringSpace,
    target: &PatchBundle,
    points: usize,
    rng: &mut impl Rng,
) -> Result<(PatchBundle, Vec<usize>)> {
    let mut map = Vec::with_capacity(points);
    let mut fibers = Vec::with_capacity(points);
    for _ in 0..points {
        let gy = rng.random_range(0..target.points());
        let above: Vec<&Subring> = space.members().iter().filter(|s| target.fiber(gy).is_subset(s)).collect();
        let fiber = above.choose(rng).map(|s| (*s).clone()).unwrap_or_else(|| target.fiber(gy).clone());
        map.push(gy);
        fibers.push(fiber);
    }
    Ok((PatchBundle::new(space.ring().clone(), fibers)?, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::DEFAULT_CAP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(k: u32) -> SubringSpace {
        SubringSpace::enumerate(FiniteRing::gf(2, k, None).unwrap(), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn one_point_bundle_gives_one_atom_presheaf() {
        let s = gf(2);
        let f = PatchBundle::new(s.ring().clone(), vec![s.member(0).clone()]).unwrap();
        let p = functor_r(&f).unwrap();
        assert_eq!(p.algebra().atom_count(), 1);
        assert_eq!(p.sections()[1], *s.member(0));
    }

    #[test]
    fn two_point_bundle_intersects_fibers() {
        let s = gf(2);
        let f = PatchBundle::new(s.ring().clone(), vec![s.member(1).clone(), s.member(0).clone()]).unwrap();
        let p = functor_r(&f).unwrap();
        assert_eq!(p.sections()[0b11], *s.member(0));
        check_bundle_round_trip(&f).unwrap();
    }

    #[test]
    fn constant_presheaf_gives_non_injective_bundle() {
        let s = gf(2);
        let p = PatchPresheaf::constant(s.ring().clone(), BoolAlg::new(2).unwrap()).unwrap();
        let b = functor_b(&p).unwrap();
        assert_eq!(b.points(), 2);
        assert_eq!(b.image().unwrap().len(), 1);
        assert!(!b.is_injective());
        check_presheaf_round_trip(&p).unwrap();
    }

    #[test]
    fn gf16_space_round_trips() {
        let s = gf(4);
        for mask in 0..1u64 << s.len() {
            check_space_round_trip(&s, mask).unwrap();
        }
        let p = s.presheaf().unwrap();
        check_distinguished_round_trip(&p).unwrap();
    }

    #[test]
    fn empty_space_is_the_degenerate_presheaf() {
        let s = gf(4);
        let x = s.subspace(s.clop_algebra().bottom()).unwrap();
        let p = x.presheaf().unwrap();
        assert!(p.algebra().is_degenerate());
        assert_eq!(p.sections(), [s.ring().whole()]);
        check_space_round_trip(&s, 0).unwrap();
    }

    #[test]
    fn random_pairs_are_functorial() {
        let s = gf(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (g1, g2) = random_composable_pair(&s, &mut rng).unwrap();
            check_functoriality(&g1, &g2).unwrap();
            check_bundle_morphism_naturality(&g1).unwrap();
            check_presheaf_morphism_naturality(&functor_r_morphism(&g2).unwrap()).unwrap();
        }
    }
}
