//! Finite commutative unital rings given by explicit tables.
//!
//! Elements are indices `0..n`. The additive and multiplicative tables are
//! stored row-major as `u16`, so every ring operation is one lookup. Rings
//! are verified on construction: all axioms are checked exhaustively up to
//! [`AXIOM_EXHAUSTIVE_LIMIT`] elements and on a seeded sample of triples
//! above that.

mod construct;
mod ideal;
mod iso;
mod pierce;
mod specker;

pub use construct::{first_irreducible, is_irreducible, MixedRadix};
pub use ideal::Spectra;
pub use iso::ring_isomorphic;
pub use pierce::{IdempotentAlgebra, PierceData, Predicates};
pub use specker::{set_partitions, Specker};

use fixedbitset::FixedBitSet;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Rings up to this size have every axiom checked on every triple.
pub const AXIOM_EXHAUSTIVE_LIMIT: usize = 256;

/// Triples sampled per axiom above the exhaustive limit.
pub(crate) const AXIOM_SAMPLES: usize = 20_000;

/// Largest ring that can be materialized as tables.
pub const MAX_TABLE_SIZE: usize = 4096;

/// Default cap on ring sizes for exhaustive enumeration (ideals, subrings,
/// predicates). Overridden by `PATCHALG_CAP`.
pub const DEFAULT_CAP: usize = 4096;

/// The enumeration cap, honoring the `PATCHALG_CAP` environment variable.
pub fn cap_from_env() -> usize {
    std::env::var("PATCHALG_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// A finite commutative ring with identity, `1 ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRing {
    n: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    zero: usize,
    one: usize,
    labels: Option<Vec<String>>,
}

impl FiniteRing {
    /// Builds a ring from full tables, locating `0` and `1` and checking the
    /// axioms.
    pub fn from_tables(add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = add.len();
        if n == 0 {
            return Err(Error::RingAxiom("empty carrier".into()));
        }
        if n > MAX_TABLE_SIZE {
            return Err(Error::CapExceeded { size: n, cap: MAX_TABLE_SIZE });
        }
        if mul.len() != n || add.iter().chain(&mul).any(|row| row.len() != n) {
            return Err(Error::RingAxiom("tables are not square of equal size".into()));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::RingAxiom(format!("{} labels for {n} elements", l.len())));
            }
        }
        let mut flat_add = Vec::with_capacity(n * n);
        let mut flat_mul = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (s, p) = (add[i][j], mul[i][j]);
                if s >= n || p >= n {
                    return Err(Error::RingAxiom(format!("table entry at ({i}, {j}) out of range")));
                }
                flat_add.push(s as u16);
                flat_mul.push(p as u16);
            }
        }
        Self::from_flat(n, flat_add, flat_mul, labels)
    }

    /// Builds from row-major tables whose entries are already in range.
    pub(crate) fn from_flat(n: usize, add: Vec<u16>, mul: Vec<u16>, labels: Option<Vec<String>>) -> Result<Self> {
        let zero = (0..n)
            .find(|&z| (0..n).all(|x| add[z * n + x] as usize == x))
            .ok_or_else(|| Error::RingAxiom("no additive identity".into()))?;
        let one = (0..n)
            .find(|&u| (0..n).all(|x| mul[u * n + x] as usize == x))
            .ok_or_else(|| Error::RingAxiom("no multiplicative identity".into()))?;
        if n == 1 {
            return Err(Error::ZeroRing);
        }
        let mut neg = vec![0u16; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| add[x * n + y] as usize == zero)
                .ok_or_else(|| Error::RingAxiom(format!("element {x} has no additive inverse")))?;
            neg[x] = y as u16;
        }
        let ring = FiniteRing { n, add, mul, neg, zero, one, labels };
        ring.verify_axioms()?;
        Ok(ring)
    }

    /// Checks commutativity, associativity and distributivity. Exhaustive up
    /// to [`AXIOM_EXHAUSTIVE_LIMIT`], sampled with a fixed seed above.
    pub fn verify_axioms(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                if self.add(x, y) != self.add(y, x) {
                    return Err(Error::RingAxiom(format!("addition not commutative at ({x}, {y})")));
                }
                if self.mul(x, y) != self.mul(y, x) {
                    return Err(Error::RingAxiom(format!("multiplication not commutative at ({x}, {y})")));
                }
            }
        }
        let check = |x: usize, y: usize, z: usize| -> Result<()> {
            if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)) {
                return Err(Error::RingAxiom(format!("addition not associative at ({x}, {y}, {z})")));
            }
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                return Err(Error::RingAxiom(format!("multiplication not associative at ({x}, {y}, {z})")));
            }
            if self.mul(x, self.add(y, z)) != self.add(self.mul(x, y), self.mul(x, z)) {
                return Err(Error::RingAxiom(format!("distributivity fails at ({x}, {y}, {z})")));
            }
            Ok(())
        };
        if n <= AXIOM_EXHAUSTIVE_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        check(x, y, z)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..AXIOM_SAMPLES {
                check(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.n + y] as usize
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y] as usize
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg[x] as usize
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// `k · x` for a non-negative integer `k`.
    pub fn scale(&self, k: usize, x: usize) -> usize {
        (0..k).fold(self.zero, |acc, _| self.add(acc, x))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn check_element(&self, x: usize) -> Result<()> {
        if x >= self.n {
            Err(Error::ElementOutOfRing { element: x, size: self.n })
        } else {
            Ok(())
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidArgument(format!("{} labels for {} elements", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Rows of the addition table.
    pub fn add_table(&self) -> Vec<Vec<usize>> {
        self.add.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    /// Rows of the multiplication table.
    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).collect()).collect()
    }

    /// Additive order of `x`.
    pub fn additive_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut k = 1;
        while acc != self.zero {
            acc = self.add(acc, x);
            k += 1;
        }
        k
    }

    pub fn characteristic(&self) -> usize {
        self.additive_order(self.one)
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.inverse(x).is_some()
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        (0..self.n).find(|&y| self.mul(x, y) == self.one)
    }

    /// Bitset of units.
    pub fn units(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        for x in 0..self.n {
            for y in x..self.n {
                if self.mul(x, y) == self.one {
                    set.insert(x);
                    set.insert(y);
                }
            }
        }
        set
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.is_idempotent(x)).collect()
    }

    /// Exactly two idempotents, `0` and `1`.
    pub fn is_indecomposable(&self) -> bool {
        self.idempotents().len() == 2
    }

    pub fn is_field(&self) -> bool {
        (0..self.n).filter(|&x| x != self.zero).all(|x| self.is_unit(x))
    }

    pub fn is_domain(&self) -> bool {
        (0..self.n)
            .filter(|&x| x != self.zero)
            .all(|x| (0..self.n).filter(|&y| y != self.zero).all(|y| self.mul(x, y) != self.zero))
    }

    /// `ann(a) = { r : ra = 0 }`.
    pub fn annihilator(&self, a: usize) -> Result<RingIdeal> {
        self.check_element(a)?;
        let mut members = FixedBitSet::with_capacity(self.n);
        for r in 0..self.n {
            if self.mul(r, a) == self.zero {
                members.insert(r);
            }
        }
        Ok(RingIdeal { members })
    }

    pub(crate) fn enumeration_guard(&self, cap: usize) -> Result<()> {
        if self.n > cap {
            Err(Error::CapExceeded { size: self.n, cap })
        } else {
            Ok(())
        }
    }

    /// Subset of elements, as a bitset of this ring's size.
    pub(crate) fn bitset(&self, elems: impl IntoIterator<Item = usize>) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.n);
        for x in elems {
            self.check_element(x)?;
            set.insert(x);
        }
        Ok(set)
    }

    /// Smallest subring containing `gens` (and `0`, `1`).
    pub fn subring_generated(&self, gens: &[usize]) -> Result<Subring> {
        let mut set = FixedBitSet::with_capacity(self.n);
        let mut members = Vec::new();
        for &g in gens.iter().chain(&[self.zero, self.one]) {
            self.check_element(g)?;
            if !set.put(g) {
                members.push(g);
            }
        }
        Ok(self.close_subring(set, members))
    }

    /// Closure of an existing subring with one more element.
    pub fn subring_extend(&self, base: &Subring, x: usize) -> Result<Subring> {
        self.check_element(x)?;
        let mut set = base.members.clone();
        let mut members: Vec<usize> = set.ones().collect();
        if !set.put(x) {
            members.push(x);
        }
        Ok(self.close_subring(set, members))
    }

    fn close_subring(&self, mut set: FixedBitSet, mut members: Vec<usize>) -> Subring {
        // In a finite ring additive closure already yields negatives.
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for j in 0..=i {
                let y = members[j];
                for z in [self.add(x, y), self.mul(x, y)] {
                    if !set.put(z) {
                        members.push(z);
                    }
                }
            }
            i += 1;
        }
        Subring { members: set }
    }

    /// Validates an explicit element set as a subring.
    pub fn subring_from_elements(&self, elems: impl IntoIterator<Item = usize>) -> Result<Subring> {
        let set = self.bitset(elems)?;
        let s = Subring { members: set };
        self.check_subring(&s)?;
        Ok(s)
    }

    pub fn check_subring(&self, s: &Subring) -> Result<()> {
        if s.members.len() != self.n {
            return Err(Error::NotSubring(format!("subset has universe {} for a ring of size {}", s.members.len(), self.n)));
        }
        if !s.contains(self.zero) || !s.contains(self.one) {
            return Err(Error::NotSubring("missing 0 or 1".into()));
        }
        let elems: Vec<usize> = s.elements().collect();
        for &x in &elems {
            if !s.contains(self.neg(x)) {
                return Err(Error::NotSubring(format!("not closed under negation at {}", self.label(x))));
            }
            for &y in &elems {
                if !s.contains(self.add(x, y)) || !s.contains(self.mul(x, y)) {
                    return Err(Error::NotSubring(format!(
                        "not closed at ({}, {})",
                        self.label(x),
                        self.label(y)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn whole(&self) -> Subring {
        let mut members = FixedBitSet::with_capacity(self.n);
        members.insert_range(..);
        Subring { members }
    }

    /// The subring generated by `1`.
    pub fn prime_subring(&self) -> Subring {
        self.subring_generated(&[]).expect("0 and 1 are elements")
    }

    pub fn ring_hom(&self, codomain: &FiniteRing, map: Vec<usize>) -> Result<RingHom> {
        let hom = RingHom { map };
        hom.verify(self, codomain)?;
        Ok(hom)
    }
}

/// A unital subring, as a set of element indices of its ambient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subring {
    members: FixedBitSet,
}

impl Subring {
    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &Subring) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Intersection of two subrings, itself a subring.
    pub fn intersection(&self, other: &Subring) -> Subring {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Subring { members }
    }

    pub fn as_bitset(&self) -> &FixedBitSet {
        &self.members
    }

    pub(crate) fn from_bitset_unchecked(members: FixedBitSet) -> Self {
        Subring { members }
    }
}

/// An ideal, as a set of element indices of its ambient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingIdeal {
    members: FixedBitSet,
}

impl RingIdeal {
    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &RingIdeal) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn as_bitset(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn is_proper(&self) -> bool {
        self.len() < self.members.len()
    }

    pub(crate) fn from_bitset_unchecked(members: FixedBitSet) -> Self {
        RingIdeal { members }
    }
}

/// A unital ring homomorphism, as an element map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingHom {
    map: Vec<usize>,
}

impl RingHom {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Checks `+`, `·` and `1` are preserved, exhaustively.
    pub fn verify(&self, dom: &FiniteRing, cod: &FiniteRing) -> Result<()> {
        if self.map.len() != dom.size() || self.map.iter().any(|&y| y >= cod.size()) {
            return Err(Error::Morphism("element map has the wrong shape".into()));
        }
        if self.map[dom.one()] != cod.one() {
            return Err(Error::Morphism("1 is not preserved".into()));
        }
        for x in dom.elements() {
            for y in dom.elements() {
                if self.map[dom.add(x, y)] != cod.add(self.map[x], self.map[y]) {
                    return Err(Error::Morphism(format!("addition not preserved at ({x}, {y})")));
                }
                if self.map[dom.mul(x, y)] != cod.mul(self.map[x], self.map[y]) {
                    return Err(Error::Morphism(format!("multiplication not preserved at ({x}, {y})")));
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self, cod: &FiniteRing) -> bool {
        let mut seen = FixedBitSet::with_capacity(cod.size());
        self.map.iter().all(|&y| !seen.put(y)) && self.map.len() == cod.size()
    }

    pub fn is_surjective(&self, cod: &FiniteRing) -> bool {
        let mut seen = FixedBitSet::with_capacity(cod.size());
        for &y in &self.map {
            seen.insert(y);
        }
        seen.is_full()
    }

    /// Kernel, the preimage of zero.
    pub fn kernel(&self, dom: &FiniteRing, cod: &FiniteRing) -> RingIdeal {
        let mut members = FixedBitSet::with_capacity(dom.size());
        for x in dom.elements() {
            if self.map[x] == cod.zero() {
                members.insert(x);
            }
        }
        RingIdeal { members }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_four_has_four_elements() {
        assert_eq!(FiniteRing::zmod(4).unwrap().size(), 4);
    }

    #[test]
    fn zero_ring_is_rejected() {
        assert_eq!(FiniteRing::zmod(1), Err(Error::ZeroRing));
    }

    #[test]
    fn non_ring_tables_name_the_axiom() {
        // subtraction mod 3 is not commutative
        let add: Vec<Vec<usize>> = (0..3).map(|x| (0..3).map(|y| (x + 3 - y) % 3).collect()).collect();
        let mul: Vec<Vec<usize>> = (0..3).map(|x| (0..3).map(|y| x * y % 3).collect()).collect();
        let err = FiniteRing::from_tables(add, mul, None).unwrap_err();
        assert!(matches!(err, Error::RingAxiom(_)), "{err:?}");
    }

    #[test]
    fn annihilator_edge_cases() {
        let r = FiniteRing::zmod(6).unwrap();
        assert_eq!(r.annihilator(0).unwrap().len(), 6);
        assert_eq!(r.annihilator(1).unwrap().elements().collect::<Vec<_>>(), vec![0]);
        assert_eq!(r.annihilator(2).unwrap().elements().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn zmod_six_idempotents() {
        assert_eq!(FiniteRing::zmod(6).unwrap().idempotents(), vec![0, 1, 3, 4]);
    }

    #[test]
    fn field_has_two_idempotents() {
        let r = FiniteRing::gf(3, 2, None).unwrap();
        assert!(r.is_indecomposable());
        assert!(r.is_field());
    }

    #[test]
    fn subring_closure_and_validation() {
        let r = FiniteRing::zmod(6).unwrap();
        assert_eq!(r.prime_subring(), r.whole());
        assert!(r.subring_from_elements([0, 3]).is_err());
    }

    #[test]
    fn characteristic_and_units() {
        let r = FiniteRing::zmod(4).unwrap();
        assert_eq!(r.characteristic(), 4);
        assert_eq!(r.units().ones().collect::<Vec<_>>(), vec![1, 3]);
    }
}
