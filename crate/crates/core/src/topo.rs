//! Spaces of subrings with their Zariski and patch topologies.
//!
//! A [`SubringSpace`] is a finite set of subrings of one ambient ring, kept
//! in a canonical order (by size, then by element set). Subsets of the space
//! are masks over that order, so they are elements of the Boolean algebra
//! `Clop(X)`, the powerset of `X`.
//!
//! The basic Zariski opens are `U(r₁,…,rₙ) = { S : r₁,…,rₙ ∈ S }` and the
//! patch topology adds the complements `V(r) = { S : r ∉ S }`. On a finite
//! set both topologies are determined by minimal neighborhoods. The patch
//! closure here is computed from the neighborhood criterion and is checked,
//! not assumed, to be the identity.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::boolalg::{BoolAlg, BoolElem, MAX_ATOMS};
use crate::error::{Error, Result};
use crate::finring::{FiniteRing, Subring};
use crate::presheaf::PatchPresheaf;

/// A finite set of subrings of one ring, in canonical order.
#[derive(Clone, Debug)]
pub struct SubringSpace {
    ring: Arc<FiniteRing>,
    members: Vec<Subring>,
}

fn canonical_order(members: &mut Vec<Subring>) {
    members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    members.dedup();
}

/// Patch-space status of a subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchSpaceCheck {
    /// The subset equals its patch closure.
    pub closed: bool,
    /// Every point of the ambient space has the singleton as a patch
    /// neighborhood, so every subset is closed.
    pub finite_collapse: bool,
}

impl SubringSpace {
    /// `Σ(R)`: every subring, found by closing the prime subring under
    /// adjunction of one element at a time.
    pub fn enumerate(ring: impl Into<Arc<FiniteRing>>, cap: usize) -> Result<Self> {
        let ring = ring.into();
        if ring.size() > cap {
            return Err(Error::CapExceeded { size: ring.size(), cap });
        }
        let start = ring.prime_subring();
        let mut seen: HashSet<Subring> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for x in ring.elements() {
                if s.contains(x) {
                    continue;
                }
                let t = ring.subring_extend(&s, x)?;
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        let mut members: Vec<Subring> = seen.into_iter().collect();
        canonical_order(&mut members);
        Self::check_size(members.len())?;
        Ok(SubringSpace { ring, members })
    }

    /// A space from explicit subrings, each verified.
    pub fn from_subrings(ring: impl Into<Arc<FiniteRing>>, members: Vec<Subring>) -> Result<Self> {
        let ring = ring.into();
        for s in &members {
            ring.check_subring(s)?;
        }
        let mut members = members;
        canonical_order(&mut members);
        Self::check_size(members.len())?;
        Ok(SubringSpace { ring, members })
    }

    fn check_size(len: usize) -> Result<()> {
        if len > MAX_ATOMS as usize {
            Err(Error::TooManyAtoms(len as u32))
        } else {
            Ok(())
        }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subring] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Subring {
        &self.members[i]
    }

    pub fn index_of(&self, s: &Subring) -> Option<usize> {
        self.members.iter().position(|m| m == s)
    }

    /// `Clop(X)`, with atoms the members of `X`.
    pub fn clop_algebra(&self) -> BoolAlg {
        BoolAlg::new(self.members.len() as u32).expect("size checked on construction")
    }

    fn mask_where(&self, pred: impl Fn(&Subring) -> bool) -> u64 {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, s)| pred(s))
            .fold(0u64, |acc, (i, _)| acc | 1 << i)
    }

    /// `U(r₁,…,rₙ)`: members containing every `rᵢ`.
    pub fn zariski_open(&self, elems: &[usize]) -> Result<BoolElem> {
        for &r in elems {
            self.ring.check_element(r)?;
        }
        let bits = self.mask_where(|s| elems.iter().all(|&r| s.contains(r)));
        self.clop_algebra().element(bits)
    }

    /// `V(r)`: members not containing `r`.
    pub fn v_set(&self, r: usize) -> Result<BoolElem> {
        self.ring.check_element(r)?;
        self.clop_algebra().element(self.mask_where(|s| !s.contains(r)))
    }

    /// A basic patch clopen `U(r₁,…,rₙ) ∩ V(s₁) ∩ … ∩ V(sₘ)`.
    pub fn patch_basic(&self, inside: &[usize], outside: &[usize]) -> Result<BoolElem> {
        let alg = self.clop_algebra();
        let mut acc = self.zariski_open(inside)?;
        for &s in outside {
            acc = alg.meet(acc, self.v_set(s)?)?;
        }
        Ok(acc)
    }

    /// Smallest basic patch neighborhood of a member: `U(S) ∩ ⋂_{r∉S} V(r)`.
    pub fn minimal_patch_neighborhood(&self, i: usize) -> Result<BoolElem> {
        let s = &self.members[i];
        let inside: Vec<usize> = s.elements().collect();
        let outside: Vec<usize> = self.ring.elements().filter(|&r| !s.contains(r)).collect();
        self.patch_basic(&inside, &outside)
    }

    /// Smallest Zariski neighborhood of a member, `U(S)`.
    pub fn minimal_zariski_neighborhood(&self, i: usize) -> Result<BoolElem> {
        let inside: Vec<usize> = self.members[i].elements().collect();
        self.zariski_open(&inside)
    }

    /// Patch closure of `y`: a member lies in it iff every basic patch
    /// neighborhood of it meets `y`. Basic neighborhoods of `S` are
    /// intersections of `U(F)`, `F ⊆ S`, with finitely many `V(r)`, `r ∉ S`;
    /// all of them contain the minimal one, so testing that one suffices.
    pub fn patch_closure(&self, y: BoolElem) -> Result<BoolElem> {
        let alg = self.clop_algebra();
        let mut bits = 0u64;
        for i in 0..self.members.len() {
            if !alg.meet(self.minimal_patch_neighborhood(i)?, y)?.is_zero() {
                bits |= 1 << i;
            }
        }
        alg.element(bits)
    }

    pub fn is_patch_space(&self, y: BoolElem) -> Result<PatchSpaceCheck> {
        let closed = self.patch_closure(y)? == y;
        let mut finite_collapse = true;
        for i in 0..self.members.len() {
            finite_collapse &= self.minimal_patch_neighborhood(i)?.bits() == 1 << i;
        }
        Ok(PatchSpaceCheck { closed, finite_collapse })
    }

    /// Spectral subspaces of `Σ(R)^zar` are exactly the patch-closed ones.
    /// The Zariski subspace topology on `y` is also checked to be T0; the
    /// traces of `U`-sets are finite, hence quasicompact.
    pub fn is_spectral_subspace(&self, y: BoolElem) -> Result<bool> {
        let closed = self.is_patch_space(y)?.closed;
        let pts: Vec<usize> = y.atoms().collect();
        let mut t0 = true;
        for &a in &pts {
            for &b in &pts {
                if a < b {
                    let na = self.minimal_zariski_neighborhood(a)?.bits();
                    let nb = self.minimal_zariski_neighborhood(b)?.bits();
                    t0 &= na >> b & 1 == 0 || nb >> a & 1 == 0;
                }
            }
        }
        if closed && !t0 {
            return Err(Error::Internal("patch-closed subspace is not T0".into()));
        }
        Ok(closed && t0)
    }

    /// `O_X(U) = ⋂_{S ∈ U} S`, with `O_X(∅) = R`.
    pub fn sections(&self, u: BoolElem) -> Result<Subring> {
        let alg = self.clop_algebra();
        alg.element(u.bits())?;
        if u.atom_count() != alg.atom_count() {
            return Err(Error::AlgebraMismatch { left: alg.atom_count(), right: u.atom_count() });
        }
        Ok(u.atoms().fold(self.ring.whole(), |acc, i| acc.intersection(&self.members[i])))
    }

    /// The presheaf `U ↦ O_X(U)` over `Clop(X)`, validated.
    pub fn presheaf(&self) -> Result<PatchPresheaf> {
        let alg = self.clop_algebra();
        alg.ensure_enumerable()?;
        let sections = alg.elements()?.map(|u| self.sections(u)).collect::<Result<Vec<_>>>()?;
        PatchPresheaf::new(self.ring.clone(), alg, sections)
    }

    /// The subspace on the members selected by `y`.
    pub fn subspace(&self, y: BoolElem) -> Result<SubringSpace> {
        let members = y.atoms().map(|i| self.members[i].clone()).collect();
        SubringSpace::from_subrings(self.ring.clone(), members)
    }

    /// Covering pairs `(smaller, larger)` of the inclusion order.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.members.len();
        let below = |a: usize, b: usize| a != b && self.members[a].is_subset(&self.members[b]);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if below(a, b) && !(0..n).any(|c| below(a, c) && below(c, b)) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    /// Elements of a member, as a sorted list.
    pub fn member_elements(&self, i: usize) -> Vec<usize> {
        self.members[i].elements().collect()
    }

    /// Bitset of a member in the ambient ring.
    pub fn member_bitset(&self, i: usize) -> &FixedBitSet {
        self.members[i].as_bitset()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::DEFAULT_CAP;

    fn sigma(r: FiniteRing) -> SubringSpace {
        SubringSpace::enumerate(r, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn prime_field_has_one_subring() {
        assert_eq!(sigma(FiniteRing::gf(5, 1, None).unwrap()).len(), 1);
    }

    #[test]
    fn gf16_subrings_form_a_chain() {
        let s = sigma(FiniteRing::gf(2, 4, None).unwrap());
        let sizes: Vec<usize> = s.members().iter().map(|m| m.len()).collect();
        assert_eq!(sizes, vec![2, 4, 16]);
        assert_eq!(s.hasse_edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn gf4_has_only_the_prime_subfield_below_it() {
        let s = sigma(FiniteRing::gf(2, 2, None).unwrap());
        assert_eq!(s.member_elements(0), vec![0, 1]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn gf2_squared_has_diagonal_and_whole() {
        let f2 = FiniteRing::gf(2, 1, None).unwrap();
        let s = sigma(FiniteRing::product(&[&f2, &f2]).unwrap());
        assert_eq!(s.len(), 2);
        assert_eq!(s.member_elements(0), vec![0, 3]);
    }

    #[test]
    fn u_and_v_sets() {
        let s = sigma(FiniteRing::gf(2, 4, None).unwrap());
        assert_eq!(s.zariski_open(&[]).unwrap().bits(), 0b111);
        // x generates gf(16) under x^4 + x + 1
        assert_eq!(s.zariski_open(&[2]).unwrap().bits(), 0b100);
        assert!(s.v_set(1).unwrap().is_zero());
    }

    #[test]
    fn sections_of_gf16_space() {
        let s = sigma(FiniteRing::gf(2, 4, None).unwrap());
        let alg = s.clop_algebra();
        assert_eq!(s.sections(alg.bottom()).unwrap(), s.ring().whole());
        assert_eq!(s.sections(alg.element(0b110).unwrap()).unwrap(), *s.member(1));
        assert_eq!(s.sections(alg.element(0b010).unwrap()).unwrap(), *s.member(1));
    }

    #[test]
    fn closure_is_identity_on_gf16() {
        let s = sigma(FiniteRing::gf(2, 4, None).unwrap());
        for y in s.clop_algebra().elements().unwrap() {
            assert_eq!(s.patch_closure(y).unwrap(), y);
            let check = s.is_patch_space(y).unwrap();
            assert!(check.closed && check.finite_collapse);
            assert!(s.is_spectral_subspace(y).unwrap());
        }
    }

    /// With only `U(F) ∩ V(r)` for one excluded `r` as neighborhoods, the
    /// closure in Σ(gf(64)) of {gf(4), gf(8)} would pick up gf(2): every
    /// single element outside gf(2) is missing from gf(4) or gf(8). Finite
    /// intersections of `V`-sets are needed to isolate gf(2).
    #[test]
    fn one_excluded_element_does_not_isolate_points() {
        let s = sigma(FiniteRing::gf(2, 6, None).unwrap());
        let sizes: Vec<usize> = s.members().iter().map(|m| m.len()).collect();
        assert_eq!(sizes, vec![2, 4, 8, 64]);
        let gf2 = s.member(0);
        let y = 0b0110u64;
        let meets_y = |mask: u64| mask & y != 0;
        let single_exclusion = s.ring().elements().filter(|&r| !gf2.contains(r)).all(|r| {
            let inside: Vec<usize> = gf2.elements().collect();
            meets_y(s.patch_basic(&inside, &[r]).unwrap().bits())
        });
        assert!(single_exclusion);
        let closure = s.patch_closure(s.clop_algebra().element(y).unwrap()).unwrap();
        assert_eq!(closure.bits(), y);
    }

    #[test]
    fn every_basic_neighborhood_agrees_with_the_minimal_one() {
        // Exhaustive over all (F, G) with F ⊆ S and G ⊆ R \ S on a small ring.
        let a = FiniteRing::gf(2, 2, None).unwrap();
        let b = FiniteRing::gf(2, 1, None).unwrap();
        let s = sigma(FiniteRing::product(&[&a, &b]).unwrap());
        let n = s.ring().size();
        for y in s.clop_algebra().elements().unwrap() {
            let mut bits = 0u64;
            for i in 0..s.len() {
                let m = s.member(i);
                let all_meet = (0u32..1 << n).all(|mask| {
                    let inside: Vec<usize> = (0..n).filter(|&r| mask >> r & 1 == 1 && m.contains(r)).collect();
                    let outside: Vec<usize> = (0..n).filter(|&r| mask >> r & 1 == 1 && !m.contains(r)).collect();
                    s.patch_basic(&inside, &outside).unwrap().bits() & y.bits() != 0
                });
                if all_meet {
                    bits |= 1 << i;
                }
            }
            assert_eq!(bits, s.patch_closure(y).unwrap().bits());
        }
    }
}
