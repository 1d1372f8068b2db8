//! Finite Boolean algebras in atom form.
//!
//! Every finite Boolean algebra is the powerset of its atoms, so a
//! [`BoolAlg`] is nothing more than an atom count `k` and an element is a
//! `k`-bit mask. Join, meet and complement are union, intersection and
//! complement of atom sets.
//!
//! Ideals are stored as explicit member sets (a bitset indexed by the
//! element mask), which keeps the closure-style definitions executable:
//! [`BoolAlg::ideal_generated`] computes a fixpoint, [`BoolAlg::join_cover`]
//! searches for a finite join cover, and the two are cross-checked in tests.
//!
//! Maximal ideals are exactly `m_a = { e : a ∉ e }`, one per atom `a`. We
//! always list `Max(B)` in atom order, which turns Stone duality into the
//! identity on labels: the clopen `{ m : e ∉ m }` of `Max(B)` has the same
//! bit pattern as `e`. [`StoneIso`] and [`StoneHomeo`] compute the duality
//! maps from their definitions and verify this rather than assuming it.
//!
//! The degenerate algebra with zero atoms (`0 = 1`) is allowed. It has no
//! maximal ideals and is used for the empty space of subrings.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest atom count representable in a mask.
pub const MAX_ATOMS: u32 = 63;

/// Largest atom count for operations that materialize all `2^k` elements.
pub const MAX_ENUM_ATOMS: u32 = 16;

/// Largest atom count for enumerating *all ideals* (there are `2^(2^k)`
/// candidate subsets).
pub const MAX_IDEAL_ENUM_ATOMS: u32 = 4;

/// A finite Boolean algebra, the powerset of `atom_count` atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoolAlg {
    atoms: u32,
}

/// An element of a [`BoolAlg`]: a set of atoms, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BoolElem {
    atoms: u32,
    bits: u64,
}

impl BoolElem {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn atom_count(&self) -> u32 {
        self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn has_atom(&self, atom: usize) -> bool {
        self.bits >> atom & 1 == 1
    }

    /// Atoms below this element, in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.atoms as usize).filter(move |&a| self.has_atom(a))
    }
}

fn full_mask(atoms: u32) -> u64 {
    if atoms == 64 {
        u64::MAX
    } else {
        (1u64 << atoms) - 1
    }
}

impl BoolAlg {
    pub fn new(atoms: u32) -> Result<Self> {
        if atoms > MAX_ATOMS {
            return Err(Error::TooManyAtoms(atoms));
        }
        Ok(BoolAlg { atoms })
    }

    /// The one-element algebra in which `0 = 1`.
    pub fn degenerate() -> Self {
        BoolAlg { atoms: 0 }
    }

    pub fn atom_count(&self) -> u32 {
        self.atoms
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms == 0
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.atoms)
    }

    /// Number of elements, `2^k`. Only meaningful for enumerable algebras.
    pub fn size(&self) -> usize {
        1usize << self.atoms
    }

    pub fn bottom(&self) -> BoolElem {
        BoolElem { atoms: self.atoms, bits: 0 }
    }

    pub fn top(&self) -> BoolElem {
        BoolElem { atoms: self.atoms, bits: self.full_mask() }
    }

    pub fn atom(&self, index: usize) -> Result<BoolElem> {
        if index >= self.atoms as usize {
            return Err(Error::InvalidArgument(format!(
                "atom {index} out of range for {} atoms",
                self.atoms
            )));
        }
        Ok(BoolElem { atoms: self.atoms, bits: 1 << index })
    }

    pub fn element(&self, bits: u64) -> Result<BoolElem> {
        if bits & !self.full_mask() != 0 {
            return Err(Error::ElementOutOfRange { atoms: self.atoms, bits });
        }
        Ok(BoolElem { atoms: self.atoms, bits })
    }

    /// Element from a mask already known to be in range.
    pub(crate) fn elem_unchecked(&self, bits: u64) -> BoolElem {
        debug_assert_eq!(bits & !self.full_mask(), 0);
        BoolElem { atoms: self.atoms, bits }
    }

    pub(crate) fn ensure_enumerable(&self) -> Result<()> {
        if self.atoms > MAX_ENUM_ATOMS {
            Err(Error::TooManyAtoms(self.atoms))
        } else {
            Ok(())
        }
    }

    /// All `2^k` elements in mask order.
    pub fn elements(&self) -> Result<impl Iterator<Item = BoolElem> + '_> {
        self.ensure_enumerable()?;
        Ok((0..self.size() as u64).map(move |bits| self.elem_unchecked(bits)))
    }

    fn check(&self, x: &BoolElem) -> Result<()> {
        if x.atoms != self.atoms {
            return Err(Error::AlgebraMismatch { left: self.atoms, right: x.atoms });
        }
        if x.bits & !self.full_mask() != 0 {
            return Err(Error::ElementOutOfRange { atoms: self.atoms, bits: x.bits });
        }
        Ok(())
    }

    pub fn join(&self, x: BoolElem, y: BoolElem) -> Result<BoolElem> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.elem_unchecked(x.bits | y.bits))
    }

    pub fn meet(&self, x: BoolElem, y: BoolElem) -> Result<BoolElem> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.elem_unchecked(x.bits & y.bits))
    }

    pub fn complement(&self, x: BoolElem) -> Result<BoolElem> {
        self.check(&x)?;
        Ok(self.elem_unchecked(!x.bits & self.full_mask()))
    }

    pub fn leq(&self, x: BoolElem, y: BoolElem) -> Result<bool> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(x.bits & !y.bits == 0)
    }

    /// Does `set` (indexed by element mask) satisfy the ideal axioms?
    pub fn is_ideal(&self, set: &FixedBitSet) -> bool {
        if self.atoms > MAX_ENUM_ATOMS || set.len() != self.size() || !set.contains(0) {
            return false;
        }
        let members: Vec<u64> = set.ones().map(|b| b as u64).collect();
        for &x in &members {
            // Downward closure is equivalent to closure under meets with
            // arbitrary elements; checking immediate predecessors suffices.
            let mut rest = x;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                if !set.contains((x & !low) as usize) {
                    return false;
                }
                rest &= !low;
            }
            for &y in &members {
                if !set.contains((x | y) as usize) {
                    return false;
                }
            }
        }
        true
    }

    pub fn ideal_from_members(&self, members: impl IntoIterator<Item = BoolElem>) -> Result<BoolIdeal> {
        self.ensure_enumerable()?;
        let mut set = FixedBitSet::with_capacity(self.size());
        for m in members {
            self.check(&m)?;
            set.insert(m.bits as usize);
        }
        if !self.is_ideal(&set) {
            return Err(Error::NotBoolIdeal(format!("{:?}", set.ones().collect::<Vec<_>>())));
        }
        Ok(BoolIdeal { atoms: self.atoms, members: set })
    }

    /// Smallest ideal containing `gens`, computed as a closure fixpoint under
    /// joins and meets with arbitrary elements.
    pub fn ideal_generated(&self, gens: &[BoolElem]) -> Result<BoolIdeal> {
        self.ensure_enumerable()?;
        for g in gens {
            self.check(g)?;
        }
        let size = self.size();
        let mut set = FixedBitSet::with_capacity(size);
        let mut members = vec![0u64];
        set.insert(0);
        for g in gens {
            if !set.put(g.bits as usize) {
                members.push(g.bits);
            }
        }
        loop {
            let mut fresh = Vec::new();
            for (i, &x) in members.iter().enumerate() {
                for &y in &members[i..] {
                    let j = x | y;
                    if !set.put(j as usize) {
                        fresh.push(j);
                    }
                }
                for a in 0..size as u64 {
                    let m = a & x;
                    if !set.put(m as usize) {
                        fresh.push(m);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            members.extend(fresh);
        }
        Ok(BoolIdeal { atoms: self.atoms, members: set })
    }

    /// Searches for a finite subset `F` of `gens` with `e ≤ ⋁F`, returning a
    /// smallest one. This is the join-cover membership test for generated
    /// ideals; it shares no code with [`BoolAlg::ideal_generated`].
    pub fn join_cover(&self, gens: &[BoolElem], e: BoolElem) -> Result<Option<Vec<BoolElem>>> {
        self.check(&e)?;
        for g in gens {
            self.check(g)?;
        }
        if gens.len() > 20 {
            return Err(Error::InvalidArgument(format!(
                "join-cover search over {} generators",
                gens.len()
            )));
        }
        let n = gens.len();
        let mut best: Option<(u32, u32)> = None;
        for subset in 0u32..(1 << n) {
            let join = (0..n)
                .filter(|i| subset >> i & 1 == 1)
                .fold(0u64, |acc, i| acc | gens[i].bits);
            if e.bits & !join == 0 {
                let size = subset.count_ones();
                if best.is_none_or(|(s, _)| size < s) {
                    best = Some((size, subset));
                }
            }
        }
        Ok(best.map(|(_, subset)| (0..n).filter(|i| subset >> i & 1 == 1).map(|i| gens[i]).collect()))
    }

    /// The principal ideal `eB = { x : x ≤ e }`.
    pub fn principal_ideal(&self, e: BoolElem) -> Result<BoolIdeal> {
        self.ensure_enumerable()?;
        self.check(&e)?;
        let mut set = FixedBitSet::with_capacity(self.size());
        // enumerate submasks of e
        let mut sub = e.bits;
        loop {
            set.insert(sub as usize);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & e.bits;
        }
        Ok(BoolIdeal { atoms: self.atoms, members: set })
    }

    /// Every ideal, by testing all `2^(2^k)` subsets. Only for `k ≤ 4`.
    pub fn all_ideals(&self) -> Result<Vec<BoolIdeal>> {
        if self.atoms > MAX_IDEAL_ENUM_ATOMS {
            return Err(Error::TooManyAtoms(self.atoms));
        }
        let size = self.size();
        let mut out = Vec::new();
        for subset in 0u64..(1u64 << size) {
            if subset & 1 == 0 {
                continue;
            }
            let mut set = FixedBitSet::with_capacity(size);
            for i in 0..size {
                if subset >> i & 1 == 1 {
                    set.insert(i);
                }
            }
            if self.is_ideal(&set) {
                out.push(BoolIdeal { atoms: self.atoms, members: set });
            }
        }
        Ok(out)
    }

    /// `m_a = { e : a ∉ e }`.
    pub fn maximal_ideal_at(&self, atom: usize) -> Result<BoolIdeal> {
        self.ensure_enumerable()?;
        if atom >= self.atoms as usize {
            return Err(Error::InvalidArgument(format!("atom {atom} out of range")));
        }
        let mut set = FixedBitSet::with_capacity(self.size());
        for bits in 0..self.size() {
            if bits >> atom & 1 == 0 {
                set.insert(bits);
            }
        }
        Ok(BoolIdeal { atoms: self.atoms, members: set })
    }

    /// `Max(B)`, listed in atom order.
    pub fn maximal_ideals(&self) -> Result<Vec<BoolIdeal>> {
        (0..self.atoms as usize).map(|a| self.maximal_ideal_at(a)).collect()
    }

    /// Evaluates the three characterizations of maximality separately.
    pub fn maximality_criteria(&self, ideal: &BoolIdeal) -> Result<MaximalityCriteria> {
        self.check_ideal(ideal)?;
        if !ideal.is_proper() {
            return Err(Error::ImproperIdeal);
        }
        let size = self.size() as u64;
        let full = self.full_mask();
        let complement = (0..size).all(|e| ideal.contains_bits(e) || ideal.contains_bits(!e & full));
        let prime = (0..size).all(|e| {
            (0..size).all(|f| !ideal.contains_bits(e & f) || ideal.contains_bits(e) || ideal.contains_bits(f))
        });
        let members: Vec<BoolElem> = ideal.members().collect();
        let non_extendable = (0..size).filter(|&e| !ideal.contains_bits(e)).all(|e| {
            let mut gens = members.clone();
            gens.push(self.elem_unchecked(e));
            self.ideal_generated(&gens).map(|j| !j.is_proper()).unwrap_or(false)
        });
        Ok(MaximalityCriteria { complement, prime, non_extendable })
    }

    /// Maximality, decided three independent ways that must agree.
    pub fn is_maximal(&self, ideal: &BoolIdeal) -> Result<bool> {
        let c = self.maximality_criteria(ideal)?;
        if c.complement != c.prime || c.prime != c.non_extendable {
            return Err(Error::Internal(format!("maximality criteria disagree: {c:?}")));
        }
        Ok(c.complement)
    }

    fn check_ideal(&self, ideal: &BoolIdeal) -> Result<()> {
        if ideal.atoms != self.atoms {
            return Err(Error::AlgebraMismatch { left: self.atoms, right: ideal.atoms });
        }
        Ok(())
    }

    /// The Stone isomorphism `B → Clop(Max(B))`.
    pub fn stone_iso(&self) -> Result<StoneIso> {
        let max = self.maximal_ideals()?;
        let clop = BoolAlg::new(max.len() as u32)?;
        let mut image = Vec::with_capacity(self.size());
        for e in 0..self.size() as u64 {
            let mut bits = 0u64;
            for (i, m) in max.iter().enumerate() {
                if !m.contains_bits(e) {
                    bits |= 1 << i;
                }
            }
            image.push(bits);
        }
        let iso = StoneIso { algebra: *self, clop, image };
        iso.verify()?;
        Ok(iso)
    }
}

/// The three maximality tests for a proper ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityCriteria {
    /// For every `e`, `e` or its complement lies in the ideal.
    pub complement: bool,
    /// `e ∧ f ∈ I` implies `e ∈ I` or `f ∈ I`.
    pub prime: bool,
    /// Adjoining any outside element generates the improper ideal.
    pub non_extendable: bool,
}

/// An ideal of a [`BoolAlg`], as an explicit member set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolIdeal {
    atoms: u32,
    members: FixedBitSet,
}

impl BoolIdeal {
    pub fn atom_count(&self) -> u32 {
        self.atoms
    }

    pub fn contains(&self, e: BoolElem) -> bool {
        e.atoms == self.atoms && self.contains_bits(e.bits)
    }

    pub(crate) fn contains_bits(&self, bits: u64) -> bool {
        self.members.contains(bits as usize)
    }

    pub fn members(&self) -> impl Iterator<Item = BoolElem> + '_ {
        let atoms = self.atoms;
        self.members.ones().map(move |b| BoolElem { atoms, bits: b as u64 })
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_proper(&self) -> bool {
        !self.contains_bits(full_mask(self.atoms))
    }

    pub fn is_subset(&self, other: &BoolIdeal) -> bool {
        self.atoms == other.atoms && self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &BoolIdeal) -> BoolIdeal {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        BoolIdeal { atoms: self.atoms, members }
    }

    /// The largest member. Every ideal of a finite algebra is principal, and
    /// this is its generator.
    pub fn generator(&self) -> BoolElem {
        let bits = self.members.ones().fold(0u64, |acc, b| acc | b as u64);
        BoolElem { atoms: self.atoms, bits }
    }

    /// If this is `m_a` for some atom `a`, return `a`.
    pub fn maximal_atom(&self) -> Option<usize> {
        let missing = !self.generator().bits & full_mask(self.atoms);
        if missing.count_ones() == 1 && self.len() == 1 << (self.atoms - 1) {
            Some(missing.trailing_zeros() as usize)
        } else {
            None
        }
    }
}

/// The Stone isomorphism `e ↦ { m ∈ Max(B) : e ∉ m }`, with `Max(B)` in
/// atom order so that clopens are masks over the same index set.
#[derive(Clone, Debug)]
pub struct StoneIso {
    algebra: BoolAlg,
    clop: BoolAlg,
    image: Vec<u64>,
}

impl StoneIso {
    pub fn clop_algebra(&self) -> BoolAlg {
        self.clop
    }

    pub fn apply(&self, e: BoolElem) -> Result<BoolElem> {
        self.algebra.check(&e)?;
        Ok(self.clop.elem_unchecked(self.image[e.bits as usize]))
    }

    /// Bijective and preserves join, meet and complement.
    fn verify(&self) -> Result<()> {
        let mut seen = FixedBitSet::with_capacity(self.clop.size());
        for &img in &self.image {
            if seen.put(img as usize) {
                return Err(Error::Internal("Stone map is not injective".into()));
            }
        }
        if self.image.len() != self.clop.size() {
            return Err(Error::Internal("Stone map is not surjective".into()));
        }
        let full = self.algebra.full_mask();
        let cfull = self.clop.full_mask();
        for e in 0..self.image.len() {
            let ie = self.image[e];
            if self.image[!e as u64 as usize & full as usize] != !ie & cfull {
                return Err(Error::Internal(format!("Stone map breaks complement at {e:#x}")));
            }
            for f in 0..self.image.len() {
                let jf = self.image[f];
                if self.image[e | f] != ie | jf || self.image[e & f] != ie & jf {
                    return Err(Error::Internal(format!("Stone map breaks lattice ops at ({e:#x}, {f:#x})")));
                }
            }
        }
        Ok(())
    }

    /// Under the atom-order labeling of `Max(B)` the isomorphism fixes every
    /// bit pattern.
    pub fn is_identity_on_labels(&self) -> bool {
        self.image.iter().enumerate().all(|(e, &img)| e as u64 == img)
    }
}

/// The homeomorphism `X → Max(Clop(X))`, `x ↦ { U : x ∉ U }`, for a finite
/// (hence discrete) space `X = {0, …, n-1}`.
#[derive(Clone, Debug)]
pub struct StoneHomeo {
    clop: BoolAlg,
    images: Vec<BoolIdeal>,
    positions: Vec<usize>,
}

pub fn stone_homeo(points: usize) -> Result<StoneHomeo> {
    let clop = BoolAlg::new(points as u32)?;
    clop.ensure_enumerable()?;
    let max = clop.maximal_ideals()?;
    let mut images = Vec::with_capacity(points);
    let mut positions = Vec::with_capacity(points);
    for x in 0..points {
        let members = (0..clop.size() as u64)
            .filter(|u| u >> x & 1 == 0)
            .map(|u| clop.elem_unchecked(u));
        let ideal = clop.ideal_from_members(members)?;
        if !clop.is_maximal(&ideal)? {
            return Err(Error::Internal(format!("point {x} does not give a maximal ideal")));
        }
        let pos = max
            .iter()
            .position(|m| *m == ideal)
            .ok_or_else(|| Error::Internal(format!("point {x} missing from Max(Clop(X))")))?;
        images.push(ideal);
        positions.push(pos);
    }
    let mut sorted = positions.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != points || max.len() != points {
        return Err(Error::Internal("Stone homeomorphism is not bijective".into()));
    }
    Ok(StoneHomeo { clop, images, positions })
}

impl StoneHomeo {
    pub fn clop_algebra(&self) -> BoolAlg {
        self.clop
    }

    pub fn image(&self, point: usize) -> &BoolIdeal {
        &self.images[point]
    }

    /// Index in `Max(Clop(X))` (atom order) of the image of `point`.
    pub fn position(&self, point: usize) -> usize {
        self.positions[point]
    }
}

/// A homomorphism `h: B2 → B1` presented by its atom map
/// `φ: atoms(B1) → atoms(B2)`, with `h(e) = { a : φ(a) ∈ e }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoolHom {
    domain: BoolAlg,
    codomain: BoolAlg,
    atom_map: Vec<usize>,
}

/// Exhaustive pair checks stop here; above it the hom laws are checked on
/// atoms and complements, which determine them.
const HOM_PAIR_CHECK_ATOMS: u32 = 8;

impl BoolHom {
    pub fn new(domain: BoolAlg, codomain: BoolAlg, atom_map: Vec<usize>) -> Result<Self> {
        if atom_map.len() != codomain.atoms as usize {
            return Err(Error::NotBoolHom(format!(
                "atom map has {} entries for {} codomain atoms",
                atom_map.len(),
                codomain.atoms
            )));
        }
        if let Some(&bad) = atom_map.iter().find(|&&b| b >= domain.atoms as usize) {
            return Err(Error::NotBoolHom(format!("atom {bad} is not an atom of the domain")));
        }
        let hom = BoolHom { domain, codomain, atom_map };
        hom.verify()?;
        Ok(hom)
    }

    pub fn identity(algebra: BoolAlg) -> Self {
        BoolHom { domain: algebra, codomain: algebra, atom_map: (0..algebra.atoms as usize).collect() }
    }

    /// Recovers the atom map of a map given on elements, then checks that it
    /// reproduces the map everywhere.
    pub fn from_element_map(
        domain: BoolAlg,
        codomain: BoolAlg,
        f: impl Fn(BoolElem) -> BoolElem,
    ) -> Result<Self> {
        domain.ensure_enumerable()?;
        let mut atom_map = vec![usize::MAX; codomain.atoms as usize];
        for b in 0..domain.atoms as usize {
            let img = f(domain.atom(b)?);
            codomain.check(&img)?;
            for a in img.atoms() {
                if atom_map[a] != usize::MAX {
                    return Err(Error::NotBoolHom(format!("images of atoms overlap at {a}")));
                }
                atom_map[a] = b;
            }
        }
        if atom_map.contains(&usize::MAX) {
            return Err(Error::NotBoolHom("images of atoms do not cover the top".into()));
        }
        let hom = BoolHom::new(domain, codomain, atom_map)?;
        for e in domain.elements()? {
            if hom.apply(e)? != f(e) {
                return Err(Error::NotBoolHom(format!("map is not determined by atoms at {:#x}", e.bits)));
            }
        }
        Ok(hom)
    }

    pub fn domain(&self) -> BoolAlg {
        self.domain
    }

    pub fn codomain(&self) -> BoolAlg {
        self.codomain
    }

    pub fn atom_map(&self) -> &[usize] {
        &self.atom_map
    }

    pub fn apply(&self, e: BoolElem) -> Result<BoolElem> {
        self.domain.check(&e)?;
        Ok(self.codomain.elem_unchecked(self.apply_bits(e.bits)))
    }

    pub(crate) fn apply_bits(&self, bits: u64) -> u64 {
        self.atom_map
            .iter()
            .enumerate()
            .filter(|(_, &b)| bits >> b & 1 == 1)
            .fold(0u64, |acc, (a, _)| acc | 1 << a)
    }

    fn verify(&self) -> Result<()> {
        let d = self.domain;
        let c = self.codomain;
        if self.apply_bits(0) != 0 {
            return Err(Error::NotBoolHom("0 is not preserved".into()));
        }
        if self.apply_bits(d.full_mask()) != c.full_mask() {
            return Err(Error::NotBoolHom("1 is not preserved".into()));
        }
        if d.atoms <= HOM_PAIR_CHECK_ATOMS {
            let size = d.size() as u64;
            for e in 0..size {
                let he = self.apply_bits(e);
                if self.apply_bits(!e & d.full_mask()) != !he & c.full_mask() {
                    return Err(Error::NotBoolHom(format!("complement not preserved at {e:#x}")));
                }
                for f in 0..size {
                    let hf = self.apply_bits(f);
                    if self.apply_bits(e | f) != he | hf || self.apply_bits(e & f) != he & hf {
                        return Err(Error::NotBoolHom(format!("lattice ops not preserved at ({e:#x}, {f:#x})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `self ∘ inner`, where `inner: B3 → B2` and `self: B2 → B1`.
    pub fn compose(&self, inner: &BoolHom) -> Result<BoolHom> {
        if inner.codomain != self.domain {
            return Err(Error::AlgebraMismatch { left: self.domain.atoms, right: inner.codomain.atoms });
        }
        let atom_map = self.atom_map.iter().map(|&b| inner.atom_map[b]).collect();
        BoolHom::new(inner.domain, self.codomain, atom_map)
    }

    /// The dual map `h*: Max(B1) → Max(B2)`, `m ↦ h⁻¹(m)`, as indices in the
    /// atom-ordered listings. Each preimage is computed as a set, checked to
    /// be maximal, and checked against the atom map.
    pub fn dual_map(&self) -> Result<Vec<usize>> {
        let d = self.domain;
        let max_d = d.maximal_ideals()?;
        let max_c = self.codomain.maximal_ideals()?;
        let mut out = Vec::with_capacity(max_c.len());
        for (a, m) in max_c.iter().enumerate() {
            let pre = d.elements()?.filter(|&e| m.contains_bits(self.apply_bits(e.bits)));
            let pre = d.ideal_from_members(pre)?;
            if !d.is_maximal(&pre)? {
                return Err(Error::Internal(format!("preimage of m_{a} is not maximal")));
            }
            let b = max_d
                .iter()
                .position(|n| *n == pre)
                .ok_or_else(|| Error::Internal(format!("preimage of m_{a} not found in Max")))?;
            if b != self.atom_map[a] {
                return Err(Error::Internal(format!("dual map disagrees with atom map at {a}")));
            }
            out.push(b);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(k: u32) -> BoolAlg {
        BoolAlg::new(k).unwrap()
    }

    #[test]
    fn orthogonal_atoms_join_and_meet() {
        let b = alg(2);
        let (x, y) = (b.atom(0).unwrap(), b.atom(1).unwrap());
        assert_eq!(b.join(x, y).unwrap(), b.top());
        assert_eq!(b.meet(x, y).unwrap(), b.bottom());
    }

    #[test]
    fn complement_laws() {
        let b = alg(3);
        for x in b.elements().unwrap() {
            let c = b.complement(x).unwrap();
            assert_eq!(b.join(x, c).unwrap(), b.top());
            assert_eq!(b.meet(x, c).unwrap(), b.bottom());
        }
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let x = alg(2).atom(0).unwrap();
        let y = alg(3).atom(0).unwrap();
        assert!(matches!(alg(2).join(x, y), Err(Error::AlgebraMismatch { .. })));
    }

    #[test]
    fn generated_ideal_edge_cases() {
        let b = alg(3);
        let empty = b.ideal_generated(&[]).unwrap();
        assert_eq!(empty.members().collect::<Vec<_>>(), vec![b.bottom()]);
        let all = b.ideal_generated(&[b.top()]).unwrap();
        assert_eq!(all.len(), 8);
        assert!(!all.is_proper());
    }

    #[test]
    fn ideal_of_two_atoms_and_its_cover() {
        let b = alg(3);
        let gens = [b.atom(0).unwrap(), b.atom(1).unwrap()];
        let ideal = b.ideal_generated(&gens).unwrap();
        let expected: Vec<u64> = vec![0b000, 0b001, 0b010, 0b011];
        assert_eq!(ideal.members().map(|e| e.bits()).collect::<Vec<_>>(), expected);
        let ab = b.element(0b011).unwrap();
        let cover = b.join_cover(&gens, ab).unwrap().unwrap();
        assert_eq!(cover, gens.to_vec());
        assert!(b.join_cover(&gens, b.atom(2).unwrap()).unwrap().is_none());
    }

    #[test]
    fn one_atom_has_one_maximal_ideal() {
        let max = alg(1).maximal_ideals().unwrap();
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].members().map(|e| e.bits()).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn two_atom_maximal_ideals_by_enumeration() {
        let b = alg(2);
        let ideals = b.all_ideals().unwrap();
        let maximal: Vec<Vec<u64>> = ideals
            .iter()
            .filter(|i| i.is_proper() && b.is_maximal(i).unwrap())
            .map(|i| i.members().map(|e| e.bits()).collect())
            .collect();
        assert_eq!(maximal, vec![vec![0, 0b01], vec![0, 0b10]]);
    }

    #[test]
    fn improper_ideal_is_an_error() {
        let b = alg(2);
        let top = b.ideal_generated(&[b.top()]).unwrap();
        assert_eq!(b.is_maximal(&top), Err(Error::ImproperIdeal));
    }

    #[test]
    fn degenerate_algebra_has_no_points() {
        let b = BoolAlg::degenerate();
        assert!(b.maximal_ideals().unwrap().is_empty());
        assert_eq!(b.top(), b.bottom());
        assert!(b.stone_iso().unwrap().is_identity_on_labels());
    }

    #[test]
    fn stone_iso_on_one_atom() {
        let b = alg(1);
        let iso = b.stone_iso().unwrap();
        assert_eq!(iso.apply(b.top()).unwrap().bits(), 1);
        assert_eq!(iso.apply(b.bottom()).unwrap().bits(), 0);
    }

    #[test]
    fn stone_round_trip_three_atoms() {
        assert!(alg(3).stone_iso().unwrap().is_identity_on_labels());
    }

    #[test]
    fn stone_homeo_four_points() {
        let h = stone_homeo(4).unwrap();
        let positions: Vec<usize> = (0..4).map(|x| h.position(x)).collect();
        assert_eq!(positions, vec![0, 1, 2, 3]);
    }

    #[test]
    fn identity_dual_map() {
        let b = alg(3);
        assert_eq!(BoolHom::identity(b).dual_map().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn collapse_dual_map_picks_preimage_atom() {
        // B2 has atoms {a1, a2}; B1 has one atom sent to a2.
        let h = BoolHom::new(alg(2), alg(1), vec![1]).unwrap();
        assert_eq!(h.dual_map().unwrap(), vec![1]);
        // direct preimage: h^{-1}({0}) = {0, {a1}} = m_{a2}
        let pre: Vec<u64> = alg(2).elements().unwrap().filter(|&e| h.apply(e).unwrap().is_zero()).map(|e| e.bits()).collect();
        assert_eq!(pre, vec![0b00, 0b01]);
    }

    #[test]
    fn homs_into_and_out_of_the_degenerate_algebra() {
        assert!(BoolHom::new(BoolAlg::degenerate(), alg(1), vec![0]).is_err());
        // every algebra maps onto the one-element algebra
        assert!(BoolHom::new(alg(1), BoolAlg::degenerate(), vec![]).is_ok());
        assert!(BoolHom::new(BoolAlg::degenerate(), BoolAlg::degenerate(), vec![]).is_ok());
    }

    #[test]
    fn element_map_recovers_atom_map() {
        let h = BoolHom::new(alg(2), alg(3), vec![0, 1, 0]).unwrap();
        let g = BoolHom::from_element_map(alg(2), alg(3), |e| h.apply(e).unwrap()).unwrap();
        assert_eq!(g, h);
    }
}
