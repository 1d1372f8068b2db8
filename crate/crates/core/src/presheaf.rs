//! Patch presheaves: subrings `R_e` indexed by a Boolean algebra with
//! `R_0 = R` and `R_e ∩ R_f = R_{e∨f}`.
//!
//! Sections are stored for every element of the algebra, so validation can
//! check the intersection law directly. The law on orthogonal pairs already
//! implies it on all pairs; [`PatchPresheaf::validate_orthogonal`] checks
//! only those, and the test suites compare both validators.
//!
//! Stalks are indexed by maximal ideals. With the atom-ordered listing of
//! `Max(B)` the stalk at `m_a` is the union of `R_e` over `e` containing `a`,
//! which is `R_{atom a}` by monotonicity.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::boolalg::{BoolAlg, BoolElem, BoolHom, BoolIdeal};
use crate::error::{Error, Result};
use crate::finring::{FiniteRing, Subring};
use crate::topo::SubringSpace;

/// A patch presheaf of subrings of one ring.
#[derive(Clone, Debug)]
pub struct PatchPresheaf {
    ring: Arc<FiniteRing>,
    algebra: BoolAlg,
    sections: Vec<Subring>,
}

/// The first failure found by a validator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `R_0` is not the whole ring.
    BottomNotWhole,
    /// `R_e` is not a subring.
    NotSubring { e: u64 },
    /// `R_e ∩ R_f ≠ R_{e∨f}`.
    Intersection { e: u64, f: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BottomNotWhole => write!(f, "R_0 is not the whole ring"),
            Violation::NotSubring { e } => write!(f, "R_{e:#b} is not a subring"),
            Violation::Intersection { e, f: g } => {
                write!(f, "intersection law R_e ∩ R_f = R_(e∨f) fails at e = {e:#b}, f = {g:#b}")
            }
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::Presheaf(v.to_string())
    }
}

/// Outcome of testing whether a presheaf is distinguished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinguished {
    /// Both conditions hold; `e_t[t]` is the largest `e` with `t ∈ R_e`.
    Yes { e_t: Vec<u64> },
    /// `{ e : t ∈ R_e }` has no largest element.
    NoLargestIndex { t: usize },
    /// No `e_t` lies in exactly one of `m_a`, `m_b`.
    NotSeparating { a: usize, b: usize },
}

impl Distinguished {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, Distinguished::Yes { .. })
    }
}

impl PatchPresheaf {
    /// A validated presheaf.
    pub fn new(ring: Arc<FiniteRing>, algebra: BoolAlg, sections: Vec<Subring>) -> Result<Self> {
        let p = Self::unvalidated(ring, algebra, sections)?;
        p.validate()?;
        Ok(p)
    }

    /// A presheaf whose intersection law has not been checked. Only the
    /// shape (one section per element) is enforced.
    pub fn unvalidated(ring: Arc<FiniteRing>, algebra: BoolAlg, sections: Vec<Subring>) -> Result<Self> {
        algebra.ensure_enumerable()?;
        if sections.len() != algebra.size() {
            return Err(Error::Presheaf(format!(
                "{} sections for an algebra with {} elements",
                sections.len(),
                algebra.size()
            )));
        }
        if sections.iter().any(|s| s.as_bitset().len() != ring.size()) {
            return Err(Error::Presheaf("section is not a subset of the ambient ring".into()));
        }
        Ok(PatchPresheaf { ring, algebra, sections })
    }

    /// `R_e = ⋂_{a ∈ e} R_a` from one subring per atom, `R_0 = R`.
    pub fn from_atoms(ring: Arc<FiniteRing>, atom_sections: Vec<Subring>) -> Result<Self> {
        let algebra = BoolAlg::new(atom_sections.len() as u32)?;
        algebra.ensure_enumerable()?;
        for s in &atom_sections {
            ring.check_subring(s)?;
        }
        let sections = (0..algebra.size() as u64)
            .map(|e| {
                (0..atom_sections.len())
                    .filter(|a| e >> a & 1 == 1)
                    .fold(ring.whole(), |acc, a| acc.intersection(&atom_sections[a]))
            })
            .collect();
        Self::new(ring, algebra, sections)
    }

    /// `R_e = R` for every `e`.
    pub fn constant(ring: Arc<FiniteRing>, algebra: BoolAlg) -> Result<Self> {
        algebra.ensure_enumerable()?;
        let sections = vec![ring.whole(); algebra.size()];
        Self::new(ring, algebra, sections)
    }

    /// A random valid presheaf with `atoms` atoms whose atom sections are
    /// drawn from `space`.
    pub fn random(space: &SubringSpace, atoms: u32, rng: &mut impl Rng) -> Result<Self> {
        let atom_sections = (0..atoms)
            .map(|_| space.members().choose(rng).cloned())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidArgument("empty subring space".into()))?;
        Self::from_atoms(space.ring().clone(), atom_sections)
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn algebra(&self) -> BoolAlg {
        self.algebra
    }

    pub fn section(&self, e: BoolElem) -> &Subring {
        &self.sections[e.bits() as usize]
    }

    pub fn sections(&self) -> &[Subring] {
        &self.sections
    }

    /// Replaces one section without validating, for building negative
    /// instances.
    pub fn with_section_replaced(&self, e: u64, s: Subring) -> Self {
        let mut p = self.clone();
        p.sections[e as usize] = s;
        p
    }

    /// Replaces `R_0` or a section at a non-atom nonzero index with a
    /// different subring from `space`. Either replacement breaks validity:
    /// `R_0 = R` fails, or `R_e = R_a ∩ R_{e∖a}` fails for an atom `a ≤ e`.
    /// Returns the index and the mutant, or `None` if `space` offers no
    /// alternative subring.
    pub fn random_mutant(&self, space: &SubringSpace, rng: &mut impl Rng) -> Option<(u64, Self)> {
        let mut order: Vec<u64> = (0..self.algebra.size() as u64).filter(|e| e.count_ones() != 1).collect();
        order.shuffle(rng);
        for e in order {
            let alternatives: Vec<&Subring> =
                space.members().iter().filter(|s| **s != self.sections[e as usize]).collect();
            if let Some(s) = alternatives.choose(rng) {
                return Some((e, self.with_section_replaced(e, (*s).clone())));
            }
        }
        None
    }

    fn validate_with(&self, pair_filter: impl Fn(u64, u64) -> bool) -> std::result::Result<(), Violation> {
        if self.sections[0] != self.ring.whole() {
            return Err(Violation::BottomNotWhole);
        }
        for (e, s) in self.sections.iter().enumerate() {
            if self.ring.check_subring(s).is_err() {
                return Err(Violation::NotSubring { e: e as u64 });
            }
        }
        let size = self.algebra.size() as u64;
        for e in 0..size {
            for f in e..size {
                if pair_filter(e, f) && self.sections[e as usize].intersection(&self.sections[f as usize]) != self.sections[(e | f) as usize] {
                    return Err(Violation::Intersection { e, f });
                }
            }
        }
        Ok(())
    }

    /// Checks `R_0 = R` and the intersection law on every pair.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        self.validate_with(|_, _| true)
    }

    /// Checks `R_0 = R` and the intersection law on orthogonal pairs only.
    pub fn validate_orthogonal(&self) -> std::result::Result<(), Violation> {
        self.validate_with(|e, f| e & f == 0)
    }

    /// `𝓡_m = ⋃_{e ∉ m} R_e`, verified to be a subring.
    pub fn stalk(&self, m: &BoolIdeal) -> Result<Subring> {
        if !self.algebra.is_maximal(m)? {
            return Err(Error::NotMaximal);
        }
        let mut union = FixedBitSet::with_capacity(self.ring.size());
        for e in 0..self.algebra.size() as u64 {
            if !m.contains(self.algebra.elem_unchecked(e)) {
                union.union_with(self.sections[e as usize].as_bitset());
            }
        }
        let stalk = Subring::from_bitset_unchecked(union);
        self.ring
            .check_subring(&stalk)
            .map_err(|e| Error::Internal(format!("stalk is not a subring: {e}")))?;
        Ok(stalk)
    }

    /// Stalks at `m_0, …, m_{k-1}`, each also checked to equal `R_{atom}`.
    pub fn all_stalks(&self) -> Result<Vec<Subring>> {
        let max = self.algebra.maximal_ideals()?;
        let mut out = Vec::with_capacity(max.len());
        for (a, m) in max.iter().enumerate() {
            let s = self.stalk(m)?;
            if s != self.sections[1 << a] {
                return Err(Error::Internal(format!("stalk at m_{a} differs from the atom section")));
            }
            out.push(s);
        }
        Ok(out)
    }

    /// `X(𝓡)`, the set of stalks.
    pub fn stalk_space(&self) -> Result<SubringSpace> {
        SubringSpace::from_subrings(self.ring.clone(), self.all_stalks()?)
    }

    /// `⋂_{m ∌ e} 𝓡_m` (the empty intersection being `R`), certified equal
    /// to `R_e`.
    pub fn recover_section(&self, e: BoolElem) -> Result<Subring> {
        let max = self.algebra.maximal_ideals()?;
        let mut acc = self.ring.whole();
        for m in &max {
            if !m.contains(e) {
                acc = acc.intersection(&self.stalk(m)?);
            }
        }
        if acc != *self.section(e) {
            return Err(Error::Internal(format!("section {:#b} is not recovered from stalks", e.bits())));
        }
        Ok(acc)
    }

    /// Tests both conditions for being distinguished and, when they hold,
    /// checks `t ∈ 𝓡_m ⇔ e_t ∉ m` for every `t` and `m`.
    pub fn distinguished(&self) -> Result<Distinguished> {
        let size = self.algebra.size() as u64;
        let mut e_t = Vec::with_capacity(self.ring.size());
        for t in self.ring.elements() {
            let holds = |e: u64| self.sections[e as usize].contains(t);
            // The join of all holders is the only candidate for e_t.
            let top = (0..size).filter(|&e| holds(e)).fold(0u64, |acc, e| acc | e);
            if (0..size).any(|e| (e & !top == 0) != holds(e)) {
                return Ok(Distinguished::NoLargestIndex { t });
            }
            e_t.push(top);
        }
        let max = self.algebra.maximal_ideals()?;
        let k = max.len();
        for a in 0..k {
            for b in a + 1..k {
                let separated = e_t.iter().any(|&e| {
                    let e = self.algebra.elem_unchecked(e);
                    max[a].contains(e) != max[b].contains(e)
                });
                if !separated {
                    return Ok(Distinguished::NotSeparating { a, b });
                }
            }
        }
        for (a, m) in max.iter().enumerate() {
            let stalk = self.stalk(m)?;
            for t in self.ring.elements() {
                if stalk.contains(t) == m.contains(self.algebra.elem_unchecked(e_t[t])) {
                    return Err(Error::Internal(format!("stalk membership at m_{a} disagrees with e_t for t = {t}")));
                }
            }
        }
        Ok(Distinguished::Yes { e_t })
    }
}

/// A morphism from `source = (R_e, B₁)` to `target = (S_f, B₂)`: a Boolean
/// homomorphism `h: B₂ → B₁` with `S_f ⊆ R_{h(f)}` for every `f ∈ B₂`.
/// The homomorphism runs against the direction of the morphism.
#[derive(Clone, Debug)]
pub struct PresheafMorphism {
    pub source: PatchPresheaf,
    pub target: PatchPresheaf,
    pub hom: BoolHom,
}

impl PresheafMorphism {
    pub fn new(source: PatchPresheaf, target: PatchPresheaf, hom: BoolHom) -> Result<Self> {
        let m = PresheafMorphism { source, target, hom };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(p: &PatchPresheaf) -> Result<Self> {
        Self::new(p.clone(), p.clone(), BoolHom::identity(p.algebra))
    }

    /// Checks every containment `S_f ⊆ R_{h(f)}`, and that for `f' ≤ f` the
    /// inclusions `S_f ⊆ S_{f'}` and `R_{h(f)} ⊆ R_{h(f')}` are present, so
    /// the square of inclusions commutes.
    pub fn validate(&self) -> Result<()> {
        if self.hom.domain() != self.target.algebra || self.hom.codomain() != self.source.algebra {
            return Err(Error::Morphism("homomorphism does not match the presheaf algebras".into()));
        }
        if !Arc::ptr_eq(&self.source.ring, &self.target.ring) && *self.source.ring != *self.target.ring {
            return Err(Error::Morphism("presheaves live over different rings".into()));
        }
        let (r, s) = (&self.source.sections, &self.target.sections);
        let size = self.target.algebra.size() as u64;
        for f in 0..size {
            let hf = self.hom.apply_bits(f);
            if !s[f as usize].is_subset(&r[hf as usize]) {
                return Err(Error::Morphism(format!("S_f ⊄ R_h(f) at f = {f:#b}")));
            }
        }
        for f in 0..size {
            let mut sub = f;
            loop {
                let (hf, hsub) = (self.hom.apply_bits(f), self.hom.apply_bits(sub));
                if !s[f as usize].is_subset(&s[sub as usize]) || !r[hf as usize].is_subset(&r[hsub as usize]) {
                    return Err(Error::Morphism(format!("restriction square fails at {sub:#b} ≤ {f:#b}")));
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & f;
            }
        }
        Ok(())
    }

    /// `next ∘ self`: first `self: P₁ → P₂`, then `next: P₂ → P₃`. The
    /// underlying homomorphism is `h ∘ h'`.
    pub fn then(&self, next: &PresheafMorphism) -> Result<PresheafMorphism> {
        let hom = self.hom.compose(&next.hom)?;
        PresheafMorphism::new(self.source.clone(), next.target.clone(), hom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::DEFAULT_CAP;

    /// Over gf(4) with atoms a, b: R_a = gf(4), R_b = gf(2).
    fn gf4_example() -> (Arc<FiniteRing>, Subring, Subring) {
        let ring = Arc::new(FiniteRing::gf(2, 2, None).unwrap());
        let whole = ring.whole();
        let prime = ring.prime_subring();
        (ring, whole, prime)
    }

    #[test]
    fn constant_presheaf_is_valid() {
        let (ring, _, _) = gf4_example();
        assert!(PatchPresheaf::constant(ring, BoolAlg::new(3).unwrap()).is_ok());
    }

    #[test]
    fn gf4_example_is_valid() {
        let (ring, whole, prime) = gf4_example();
        let sections = vec![whole.clone(), whole, prime.clone(), prime];
        assert!(PatchPresheaf::new(ring, BoolAlg::new(2).unwrap(), sections).is_ok());
    }

    #[test]
    fn wrong_top_section_names_the_atom_pair() {
        let (ring, whole, prime) = gf4_example();
        let sections = vec![whole.clone(), whole.clone(), prime, whole];
        let p = PatchPresheaf::unvalidated(ring, BoolAlg::new(2).unwrap(), sections).unwrap();
        assert_eq!(p.validate(), Err(Violation::Intersection { e: 0b01, f: 0b10 }));
        assert_eq!(p.validate_orthogonal(), Err(Violation::Intersection { e: 0b01, f: 0b10 }));
    }

    #[test]
    fn stalks_of_gf4_example() {
        let (ring, whole, prime) = gf4_example();
        let p = PatchPresheaf::from_atoms(ring, vec![whole.clone(), prime.clone()]).unwrap();
        assert_eq!(p.all_stalks().unwrap(), vec![whole.clone(), prime]);
        let a = p.algebra().atom(0).unwrap();
        assert_eq!(p.recover_section(a).unwrap(), whole);
    }

    #[test]
    fn one_atom_stalk_is_top_section() {
        let (ring, _, prime) = gf4_example();
        let p = PatchPresheaf::from_atoms(ring, vec![prime.clone()]).unwrap();
        assert_eq!(p.all_stalks().unwrap(), vec![prime]);
        assert!(p.distinguished().unwrap().is_distinguished());
    }

    #[test]
    fn empty_intersection_recovers_the_whole_ring() {
        let (ring, _, prime) = gf4_example();
        let p = PatchPresheaf::from_atoms(ring.clone(), vec![prime.clone(), prime]).unwrap();
        assert_eq!(p.recover_section(p.algebra().bottom()).unwrap(), ring.whole());
    }

    #[test]
    fn non_maximal_ideal_has_no_stalk() {
        let (ring, _, _) = gf4_example();
        let p = PatchPresheaf::constant(ring, BoolAlg::new(2).unwrap()).unwrap();
        let zero = p.algebra().ideal_generated(&[]).unwrap();
        assert_eq!(p.stalk(&zero), Err(Error::NotMaximal));
    }

    #[test]
    fn constant_presheaf_does_not_separate() {
        let (ring, _, _) = gf4_example();
        let p = PatchPresheaf::constant(ring, BoolAlg::new(2).unwrap()).unwrap();
        assert_eq!(p.distinguished().unwrap(), Distinguished::NotSeparating { a: 0, b: 1 });
    }

    #[test]
    fn space_presheaf_is_distinguished_with_u_sets() {
        let space = SubringSpace::enumerate(FiniteRing::gf(2, 4, None).unwrap(), DEFAULT_CAP).unwrap();
        let p = space.presheaf().unwrap();
        let Distinguished::Yes { e_t } = p.distinguished().unwrap() else {
            panic!("not distinguished")
        };
        for t in space.ring().elements() {
            assert_eq!(e_t[t], space.zariski_open(&[t]).unwrap().bits());
        }
    }

    #[test]
    fn coarsening_along_atom_collapse() {
        // Source over 2 atoms (gf(4), gf(2)); target over 1 atom, with h
        // sending the single atom to the top of the source algebra.
        let (ring, whole, prime) = gf4_example();
        let source = PatchPresheaf::from_atoms(ring.clone(), vec![whole, prime.clone()]).unwrap();
        let b1 = source.algebra();
        let b2 = BoolAlg::new(1).unwrap();
        let hom = BoolHom::new(b2, b1, vec![0, 0]).unwrap();
        let fits = PatchPresheaf::from_atoms(ring.clone(), vec![prime]).unwrap();
        assert!(PresheafMorphism::new(source.clone(), fits, hom.clone()).is_ok());
        let too_big = PatchPresheaf::constant(ring, b2).unwrap();
        assert!(PresheafMorphism::new(source, too_big, hom).is_err());
    }

    #[test]
    fn identity_then_identity() {
        let (ring, whole, prime) = gf4_example();
        let p = PatchPresheaf::from_atoms(ring, vec![whole, prime]).unwrap();
        let id = PresheafMorphism::identity(&p).unwrap();
        assert_eq!(id.then(&id).unwrap().hom, id.hom);
    }
}
