//! Patch algebras `𝓡[B] = { t₁e₁ + ⋯ + tₙeₙ : eᵢ orthogonal, tᵢ ∈ R_{eᵢ} }`.
//!
//! Every patch algebra over a finite `B` is carried in two forms: the
//! symbolic one, whose elements are canonical full orthogonal decompositions
//! with arithmetic by common refinement, and the product `∏ₐ R_{atom a}` of
//! the atom sections as a [`FiniteRing`]. Evaluation (reading off the
//! coefficient at each atom) is checked to be a ring isomorphism between the
//! two when the algebra is built, and the product then serves as the ring on
//! which ideals, spectra and predicates are computed.

mod elem;
mod report;

use std::collections::BTreeMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use elem::PaElem;
pub use report::{MaximalWitness, MinimalPrimeWitness, PierceReport, PointWitness, StructureReport};

use crate::boolalg::{BoolAlg, BoolElem, BoolIdeal};
use crate::bundle::{functor_r, PatchBundle};
use crate::error::{Error, Result};
use crate::finring::{
    set_partitions, FiniteRing, MixedRadix, RingHom, RingIdeal, Subring, AXIOM_EXHAUSTIVE_LIMIT, AXIOM_SAMPLES,
    DEFAULT_CAP, MAX_TABLE_SIZE,
};
use crate::presheaf::PatchPresheaf;

/// Largest Boolean algebra (in atoms) over which a patch algebra is built.
/// Building enumerates set partitions of the atoms.
pub const MAX_PATCH_ATOMS: u32 = 8;

#[derive(Clone, Debug)]
struct AtomRing {
    ring: FiniteRing,
    embedding: Vec<usize>,
    /// Inverse of `embedding`, `usize::MAX` off the subring.
    position: Vec<usize>,
}

/// A patch algebra with its product-of-stalks representation.
#[derive(Clone, Debug)]
pub struct PatchAlgebra {
    presheaf: PatchPresheaf,
    atom_rings: Vec<AtomRing>,
    radix: MixedRadix,
    oracle: FiniteRing,
    /// Canonical forms, indexed by their position in the product ring.
    elements: Vec<PaElem>,
    /// Product-ring index of the idempotent `1·e + 0·¬e`, for every `e ∈ B`.
    iota: Vec<usize>,
}

/// `ψ_m: A → 𝓡_m` together with its kernel.
#[derive(Clone, Debug)]
pub struct Psi {
    /// The stalk `𝓡_m` as a subring of the ambient ring.
    pub stalk: Subring,
    /// The stalk as a ring, with its embedding into the ambient ring.
    pub ring: FiniteRing,
    pub embedding: Vec<usize>,
    pub hom: RingHom,
    pub kernel: RingIdeal,
}

/// Outcome of sampling decompositions with an out-of-section coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonMemberSample {
    /// Samples that had a coefficient outside its section and were rejected.
    pub tested: usize,
    /// Samples whose partition had every section equal to `R`, so that no
    /// out-of-section coefficient exists.
    pub vacuous: usize,
}

impl PatchAlgebra {
    pub fn build(p: &PatchPresheaf) -> Result<Self> {
        Self::build_with_cap(p, DEFAULT_CAP)
    }

    /// Builds both representations and checks that evaluation is a ring
    /// isomorphism, that `A` is a subring of `R[B]` containing `R_1`, and
    /// that `B` embeds as faithful idempotents.
    pub fn build_with_cap(p: &PatchPresheaf, cap: usize) -> Result<Self> {
        let alg = p.algebra();
        if alg.is_degenerate() {
            return Err(Error::ZeroRing);
        }
        if alg.atom_count() > MAX_PATCH_ATOMS {
            return Err(Error::TooManyAtoms(alg.atom_count()));
        }
        let k = alg.atom_count() as usize;
        let sizes: Vec<usize> = (0..k).map(|a| p.sections()[1 << a].len()).collect();
        let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).unwrap_or(usize::MAX);
        let limit = cap.min(MAX_TABLE_SIZE);
        if total > limit {
            return Err(Error::CapExceeded { size: total, cap: limit });
        }
        let ring = p.ring();
        let mut atom_rings = Vec::with_capacity(k);
        for a in 0..k {
            let (r, embedding) = ring.restrict(&p.sections()[1 << a])?;
            let mut position = vec![usize::MAX; ring.size()];
            for (i, &x) in embedding.iter().enumerate() {
                position[x] = i;
            }
            atom_rings.push(AtomRing { ring: r, embedding, position });
        }
        let factors: Vec<&FiniteRing> = atom_rings.iter().map(|r| &r.ring).collect();
        let oracle = FiniteRing::product(&factors)?;
        let radix = MixedRadix::new(sizes);
        let mut algebra = PatchAlgebra {
            presheaf: p.clone(),
            atom_rings,
            radix,
            oracle,
            elements: Vec::new(),
            iota: Vec::new(),
        };

        let mut slots: Vec<Option<PaElem>> = vec![None; total];
        for x in algebra.canonical_forms() {
            let i = algebra.evaluate(&x)?;
            if slots[i].replace(x).is_some() {
                return Err(Error::Internal(format!("two canonical forms evaluate to element {i}")));
            }
        }
        algebra.elements = slots
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| Error::Internal(format!("element {i} has no canonical form"))))
            .collect::<Result<_>>()?;
        algebra.iota = (0..alg.size() as u64)
            .map(|e| {
                let x = algebra.normalize(&[(ring.one(), e), (ring.zero(), !e & alg.full_mask())])?;
                algebra.evaluate(&x)
            })
            .collect::<Result<_>>()?;
        algebra.verify_evaluation()?;
        algebra.verify_structure()?;
        Ok(algebra)
    }

    /// The patch algebra of `R(f)`.
    pub fn build_from_bundle(f: &PatchBundle) -> Result<Self> {
        Self::build(&functor_r(f)?)
    }

    /// All canonical forms: for each set partition of the atoms, every
    /// injective choice of coefficients with `tᵢ ∈ R_{blockᵢ}`.
    fn canonical_forms(&self) -> Vec<PaElem> {
        let mut out = Vec::new();
        for blocks in set_partitions(self.algebra().atom_count() as usize) {
            let mut used = vec![false; self.ring().size()];
            let mut terms = Vec::with_capacity(blocks.len());
            self.assign(&blocks, &mut used, &mut terms, &mut |terms| {
                let mut terms = terms.to_vec();
                terms.sort_unstable();
                out.push(PaElem { terms });
            });
        }
        out
    }

    fn assign(&self, blocks: &[u64], used: &mut [bool], terms: &mut Vec<(usize, u64)>, f: &mut impl FnMut(&[(usize, u64)])) {
        let i = terms.len();
        if i == blocks.len() {
            f(terms);
            return;
        }
        for t in self.presheaf.sections()[blocks[i] as usize].elements() {
            if !used[t] {
                used[t] = true;
                terms.push((t, blocks[i]));
                self.assign(blocks, used, terms, f);
                terms.pop();
                used[t] = false;
            }
        }
    }

    /// Pairs to check: all of them for small algebras, a fixed seeded sample
    /// otherwise.
    fn check_pairs(&self, mut check: impl FnMut(usize, usize) -> Result<()>) -> Result<()> {
        let n = self.size();
        if n <= AXIOM_EXHAUSTIVE_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    check(i, j)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..AXIOM_SAMPLES {
                check(rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(())
    }

    /// Evaluation commutes with `+` and `·`, and the pointwise operations of
    /// `R[B] = R^atoms` agree with the symbolic ones.
    fn verify_evaluation(&self) -> Result<()> {
        let r = self.ring().clone();
        if self.evaluate(&self.zero())? != self.oracle.zero() || self.evaluate(&self.one())? != self.oracle.one() {
            return Err(Error::Internal("evaluation does not preserve 0 and 1".into()));
        }
        self.check_pairs(|i, j| {
            let (x, y) = (&self.elements[i], &self.elements[j]);
            let (s, p) = (self.add(x, y)?, self.mul(x, y)?);
            if self.evaluate(&s)? != self.oracle.add(i, j) || self.evaluate(&p)? != self.oracle.mul(i, j) {
                return Err(Error::Internal(format!("evaluation is not a homomorphism at ({i}, {j})")));
            }
            let (cx, cy) = (self.coordinates(x), self.coordinates(y));
            let sum: Vec<usize> = cx.iter().zip(&cy).map(|(&a, &b)| r.add(a, b)).collect();
            let prod: Vec<usize> = cx.iter().zip(&cy).map(|(&a, &b)| r.mul(a, b)).collect();
            if self.coordinates(&s) != sum || self.coordinates(&p) != prod {
                return Err(Error::Internal(format!("arithmetic differs from R[B] at ({i}, {j})")));
            }
            Ok(())
        })
    }

    /// `A ∩ R = R_1`, `B → Id(A)` is a lattice embedding, and `t·e = 0` only
    /// for `t = 0` or `e = 0`.
    fn verify_structure(&self) -> Result<()> {
        let r = self.ring();
        let top = self.presheaf.sections()[self.algebra().full_mask() as usize].clone();
        for t in r.elements() {
            if self.scalar(t).is_ok() != top.contains(t) {
                return Err(Error::Internal(format!("scalar {t} membership differs from R_1")));
            }
        }
        let o = &self.oracle;
        let size = self.iota.len();
        for e in 0..size {
            let ie = self.iota[e];
            if !o.is_idempotent(ie) {
                return Err(Error::Internal(format!("image of {e:#b} is not idempotent")));
            }
            for f in 0..size {
                let jf = self.iota[f];
                if o.mul(ie, jf) != self.iota[e & f] || o.sub(o.add(ie, jf), o.mul(ie, jf)) != self.iota[e | f] {
                    return Err(Error::Internal(format!("B → Id(A) is not a lattice map at ({e:#b}, {f:#b})")));
                }
            }
            for t in top.elements() {
                let zero = o.mul(self.evaluate(&self.scalar(t)?)?, ie) == o.zero();
                if zero != (t == r.zero() || e == 0) {
                    return Err(Error::Internal(format!("idempotent {e:#b} is not faithful at t = {t}")));
                }
            }
        }
        Ok(())
    }

    pub fn presheaf(&self) -> &PatchPresheaf {
        &self.presheaf
    }

    /// The ambient ring `R`.
    pub fn ring(&self) -> &Arc<FiniteRing> {
        self.presheaf.ring()
    }

    pub fn algebra(&self) -> BoolAlg {
        self.presheaf.algebra()
    }

    /// `∏ₐ R_{atom a}`, indexed in the same way as [`elements`](Self::elements).
    pub fn oracle(&self) -> &FiniteRing {
        &self.oracle
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PaElem] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> Result<&PaElem> {
        self.elements.get(i).ok_or(Error::ElementOutOfRing { element: i, size: self.size() })
    }

    /// `R_{atom a}` as a ring, with its embedding into `R`.
    pub fn atom_ring(&self, a: usize) -> (&FiniteRing, &[usize]) {
        let r = &self.atom_rings[a];
        (&r.ring, &r.embedding)
    }

    /// Product-ring index of the idempotent `e`.
    pub fn idempotent_index(&self, e: BoolElem) -> Result<usize> {
        self.algebra().element(e.bits())?;
        Ok(self.iota[e.bits() as usize])
    }

    pub fn zero(&self) -> PaElem {
        PaElem { terms: vec![(self.ring().zero(), self.algebra().full_mask())] }
    }

    pub fn one(&self) -> PaElem {
        PaElem { terms: vec![(self.ring().one(), self.algebra().full_mask())] }
    }

    /// `t·1`, defined exactly for `t ∈ R_1`.
    pub fn scalar(&self, t: usize) -> Result<PaElem> {
        self.normalize(&[(t, self.algebra().full_mask())])
    }

    /// `1·e + 0·¬e`.
    pub fn idempotent(&self, e: BoolElem) -> Result<PaElem> {
        let alg = self.algebra();
        alg.element(e.bits())?;
        self.normalize(&[(self.ring().one(), e.bits()), (self.ring().zero(), !e.bits() & alg.full_mask())])
    }

    /// Brings an orthogonal decomposition `Σ tᵢeᵢ` to canonical form: pads
    /// with `0·¬(⋁eᵢ)`, drops zero idempotents, merges equal coefficients and
    /// sorts. Fails if the `eᵢ` overlap or a merged coefficient lies outside
    /// its section.
    pub fn normalize(&self, terms: &[(usize, u64)]) -> Result<PaElem> {
        let alg = self.algebra();
        let r = self.ring();
        let mut seen = 0u64;
        let mut merged: BTreeMap<usize, u64> = BTreeMap::new();
        for &(t, e) in terms {
            r.check_element(t)?;
            alg.element(e)?;
            if seen & e != 0 {
                return Err(Error::InvalidArgument(format!("idempotents overlap at {:#b}", seen & e)));
            }
            seen |= e;
            if e != 0 {
                *merged.entry(t).or_default() |= e;
            }
        }
        let rest = alg.full_mask() & !seen;
        if rest != 0 {
            *merged.entry(r.zero()).or_default() |= rest;
        }
        for (&t, &e) in &merged {
            if !self.presheaf.sections()[e as usize].contains(t) {
                return Err(Error::NotInAlgebra(format!("coefficient {} is not in R_{{{e:#b}}}", r.label(t))));
            }
        }
        Ok(PaElem { terms: merged.into_iter().collect() })
    }

    fn refine(&self, x: &PaElem, y: &PaElem, op: impl Fn(usize, usize) -> usize) -> Result<PaElem> {
        let mut terms = Vec::with_capacity(x.len() * y.len());
        for &(t, e) in &x.terms {
            for &(s, f) in &y.terms {
                if e & f != 0 {
                    terms.push((op(t, s), e & f));
                }
            }
        }
        self.normalize(&terms).map_err(|e| Error::Internal(format!("refinement left the algebra: {e}")))
    }

    pub fn add(&self, x: &PaElem, y: &PaElem) -> Result<PaElem> {
        let r = self.ring();
        self.refine(x, y, |a, b| r.add(a, b))
    }

    pub fn mul(&self, x: &PaElem, y: &PaElem) -> Result<PaElem> {
        let r = self.ring();
        self.refine(x, y, |a, b| r.mul(a, b))
    }

    pub fn sub(&self, x: &PaElem, y: &PaElem) -> Result<PaElem> {
        let r = self.ring();
        self.refine(x, y, |a, b| r.sub(a, b))
    }

    pub fn neg(&self, x: &PaElem) -> Result<PaElem> {
        let r = self.ring();
        let terms: Vec<(usize, u64)> = x.terms.iter().map(|&(t, e)| (r.neg(t), e)).collect();
        self.normalize(&terms)
    }

    /// The element as a function from atoms to `R`, i.e. in `R[B]`.
    pub fn coordinates(&self, x: &PaElem) -> Vec<usize> {
        let k = self.algebra().atom_count() as usize;
        let mut out = vec![self.ring().zero(); k];
        for &(t, e) in &x.terms {
            for (a, slot) in out.iter_mut().enumerate() {
                if e >> a & 1 == 1 {
                    *slot = t;
                }
            }
        }
        out
    }

    /// Whether a function from atoms to `R` lies in the product of the atom
    /// sections.
    pub fn contains_coordinates(&self, coords: &[usize]) -> bool {
        coords.len() == self.atom_rings.len()
            && coords.iter().zip(&self.atom_rings).all(|(&t, ar)| ar.position.get(t).is_some_and(|&p| p != usize::MAX))
    }

    /// The index in the product ring of the tuple of atom coefficients.
    pub fn evaluate(&self, x: &PaElem) -> Result<usize> {
        let coords = self.coordinates(x);
        let digits: Vec<usize> = coords
            .iter()
            .zip(&self.atom_rings)
            .enumerate()
            .map(|(a, (&t, ar))| match ar.position.get(t) {
                Some(&p) if p != usize::MAX => Ok(p),
                _ => Err(Error::NotInAlgebra(format!("coefficient {t} at atom {a} is outside R_{{atom}}"))),
            })
            .collect::<Result<_>>()?;
        Ok(self.radix.encode(&digits))
    }

    /// `(A :_R e) = { r ∈ R : r·e ∈ A }` by scanning `R`, certified equal to
    /// `R_e`.
    pub fn colon(&self, e: BoolElem) -> Result<Subring> {
        let alg = self.algebra();
        alg.element(e.bits())?;
        let r = self.ring();
        let k = alg.atom_count() as usize;
        let members = r.elements().filter(|&t| {
            let coords: Vec<usize> = (0..k).map(|a| if e.has_atom(a) { t } else { r.zero() }).collect();
            self.contains_coordinates(&coords)
        });
        let colon = r.subring_from_elements(members)?;
        if colon != *self.presheaf.section(e) {
            return Err(Error::Internal(format!("(A : {:#b}) differs from the section", e.bits())));
        }
        Ok(colon)
    }

    /// `𝔪A = ⋃_{e ∈ 𝔪} eA`, checked to be an ideal of the product ring.
    pub fn extended_ideal(&self, m: &BoolIdeal) -> Result<RingIdeal> {
        let o = &self.oracle;
        let mut members = FixedBitSet::with_capacity(o.size());
        for e in m.members() {
            let ie = self.idempotent_index(e)?;
            for x in o.elements() {
                members.insert(o.mul(ie, x));
            }
        }
        o.ideal_from_elements(members.ones())
    }

    /// `ψ_m(Σ tᵢeᵢ) = tᵢ` for the unique `eᵢ ∉ m`, verified to be a
    /// surjective ring homomorphism onto `𝓡_m` with kernel `𝔪A`.
    pub fn psi(&self, m: &BoolIdeal) -> Result<Psi> {
        let alg = self.algebra();
        match alg.is_maximal(m) {
            Ok(true) => {}
            Ok(false) | Err(Error::ImproperIdeal) => return Err(Error::NotMaximal),
            Err(e) => return Err(e),
        }
        let stalk = self.presheaf.stalk(m)?;
        let r = self.ring();
        let (ring, embedding) = r.restrict(&stalk)?;
        let mut position = vec![usize::MAX; r.size()];
        for (i, &x) in embedding.iter().enumerate() {
            position[x] = i;
        }
        let survivor = m.maximal_atom().ok_or_else(|| Error::Internal("maximal ideal has no atom".into()))?;
        let mut map = Vec::with_capacity(self.size());
        for (i, x) in self.elements.iter().enumerate() {
            let mut outside = x.terms.iter().filter(|&&(_, e)| !m.contains(alg.element(e).expect("mask in range")));
            let (Some(&(t, _)), None) = (outside.next(), outside.next()) else {
                return Err(Error::Internal(format!("element {i} has no unique term outside the ideal")));
            };
            if Some(t) != x.coefficient_at(survivor) {
                return Err(Error::Internal(format!("ψ disagrees with the coordinate at atom {survivor}")));
            }
            match position[t] {
                usize::MAX => return Err(Error::Internal(format!("ψ({i}) lies outside the stalk"))),
                p => map.push(p),
            }
        }
        let hom = self.oracle.ring_hom(&ring, map)?;
        if !hom.is_surjective(&ring) {
            return Err(Error::Internal("ψ is not surjective".into()));
        }
        let kernel = hom.kernel(&self.oracle, &ring);
        if kernel != self.extended_ideal(m)? {
            return Err(Error::Internal("ker ψ differs from 𝔪A".into()));
        }
        Ok(Psi { stalk, ring, embedding, hom, kernel })
    }

    /// Enumerates every full orthogonal decomposition with coefficients in
    /// the sections, repeated coefficients allowed, and checks that each
    /// normalizes to the canonical form of its value and that each value has
    /// exactly one decomposition with distinct coefficients. Returns the
    /// number of decompositions examined.
    pub fn check_unique_forms(&self) -> Result<usize> {
        let k = self.algebra().atom_count() as usize;
        let mut distinct = vec![0usize; self.size()];
        let mut examined = 0usize;
        for blocks in set_partitions(k) {
            let choices: Vec<Vec<usize>> =
                blocks.iter().map(|&b| self.presheaf.sections()[b as usize].elements().collect()).collect();
            let mut idx = vec![0usize; blocks.len()];
            loop {
                let terms: Vec<(usize, u64)> = idx.iter().zip(&blocks).enumerate().map(|(i, (&j, &b))| (choices[i][j], b)).collect();
                let value = self.evaluate(&PaElem { terms: terms.clone() })?;
                if self.normalize(&terms)? != self.elements[value] {
                    return Err(Error::Internal(format!("a decomposition of element {value} normalizes elsewhere")));
                }
                let mut coeffs: Vec<usize> = terms.iter().map(|&(t, _)| t).collect();
                coeffs.sort_unstable();
                coeffs.dedup();
                if coeffs.len() == terms.len() {
                    distinct[value] += 1;
                }
                examined += 1;
                let Some(pos) = (0..idx.len()).find(|&i| idx[i] + 1 < choices[i].len()) else { break };
                idx[pos] += 1;
                idx[..pos].iter_mut().for_each(|d| *d = 0);
            }
        }
        if let Some(i) = distinct.iter().position(|&c| c != 1) {
            return Err(Error::Internal(format!("element {i} has {} canonical forms", distinct[i])));
        }
        Ok(examined)
    }

    /// Draws full orthogonal families with at least one coefficient outside
    /// its section and checks that the resulting element of `R[B]` is not in
    /// `A`, both by coordinates and by normalization.
    pub fn sample_non_members(&self, samples: usize, rng: &mut impl Rng) -> Result<NonMemberSample> {
        let k = self.algebra().atom_count() as usize;
        let r = self.ring();
        let sections = self.presheaf.sections();
        let mut outcome = NonMemberSample { tested: 0, vacuous: 0 };
        for _ in 0..samples {
            let mut blocks = vec![0u64; k];
            for a in 0..k {
                blocks[rng.random_range(0..k)] |= 1 << a;
            }
            blocks.retain(|&b| b != 0);
            let mut terms: Vec<(usize, u64)> = blocks.iter().map(|&b| (rng.random_range(0..r.size()), b)).collect();
            let open: Vec<usize> = (0..blocks.len()).filter(|&i| sections[blocks[i] as usize].len() < r.size()).collect();
            if open.is_empty() {
                outcome.vacuous += 1;
                continue;
            }
            if terms.iter().all(|&(t, b)| sections[b as usize].contains(t)) {
                let i = open[rng.random_range(0..open.len())];
                let outside: Vec<usize> = r.elements().filter(|&t| !sections[blocks[i] as usize].contains(t)).collect();
                terms[i].0 = outside[rng.random_range(0..outside.len())];
            }
            let mut coords = vec![r.zero(); k];
            for &(t, b) in &terms {
                for (a, c) in coords.iter_mut().enumerate() {
                    if b >> a & 1 == 1 {
                        *c = t;
                    }
                }
            }
            if self.contains_coordinates(&coords) {
                return Err(Error::Internal(format!("out-of-section decomposition {terms:?} lies in A")));
            }
            match self.normalize(&terms) {
                Err(Error::NotInAlgebra(_)) => {}
                other => return Err(Error::Internal(format!("normalizing {terms:?} gave {other:?}"))),
            }
            outcome.tested += 1;
        }
        Ok(outcome)
    }

    /// Checks, for every element, that its support over the Pierce points of
    /// the product ring is the set of points not containing `⋁{eᵢ : tᵢ ≠ 0}`.
    /// `points[a]` is the Pierce point matched with atom `a`.
    pub(crate) fn check_supports(&self, pierce: &crate::finring::PierceData, points: &[usize]) -> Result<()> {
        let zero = self.ring().zero();
        for (i, x) in self.elements.iter().enumerate() {
            let expected = points
                .iter()
                .enumerate()
                .filter(|&(a, _)| x.support_mask(zero) >> a & 1 == 1)
                .fold(0u64, |acc, (_, &q)| acc | 1 << q);
            if self.oracle.support(pierce, i)? != expected {
                return Err(Error::Internal(format!("support of element {i} is not the expected clopen")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
