use fixedbitset::FixedBitSet;

use super::{FiniteRing, RingHom};
use crate::error::{Error, Result};

/// Largest ring size for isomorphism search.
pub const ISO_SEARCH_CAP: usize = 64;

/// Cheap isomorphism invariants, compared before any search.
#[derive(Debug, PartialEq, Eq)]
struct Invariants {
    size: usize,
    characteristic: usize,
    units: usize,
    idempotents: usize,
    additive_orders: Vec<usize>,
    square_zero: usize,
}

fn invariants(r: &FiniteRing) -> Invariants {
    let mut additive_orders: Vec<usize> = r.elements().map(|x| r.additive_order(x)).collect();
    additive_orders.sort_unstable();
    Invariants {
        size: r.size(),
        characteristic: r.characteristic(),
        units: r.units().count_ones(..),
        idempotents: r.idempotents().len(),
        additive_orders,
        square_zero: r.elements().filter(|&x| r.mul(x, x) == r.zero()).count(),
    }
}

/// Partial map under construction, closed under `+` and `·` on its domain.
struct Partial<'a> {
    dom: &'a FiniteRing,
    cod: &'a FiniteRing,
    map: Vec<Option<usize>>,
    used: FixedBitSet,
    known: Vec<usize>,
}

impl Partial<'_> {
    /// Assigns `x ↦ y` and closes under the ring operations. Returns false on
    /// a conflict with an existing assignment or with injectivity.
    fn assign(&mut self, x: usize, y: usize) -> bool {
        let mut pending = vec![(x, y)];
        while let Some((x, y)) = pending.pop() {
            match self.map[x] {
                Some(z) if z == y => continue,
                Some(_) => return false,
                None => {}
            }
            if self.used.contains(y) {
                return false;
            }
            self.map[x] = Some(y);
            self.used.insert(y);
            self.known.push(x);
            for i in 0..self.known.len() {
                let k = self.known[i];
                let fk = self.map[k].expect("known is mapped");
                pending.push((self.dom.add(x, k), self.cod.add(y, fk)));
                pending.push((self.dom.mul(x, k), self.cod.mul(y, fk)));
            }
        }
        true
    }

    fn snapshot(&self) -> (Vec<Option<usize>>, FixedBitSet, usize) {
        (self.map.clone(), self.used.clone(), self.known.len())
    }

    fn restore(&mut self, snap: (Vec<Option<usize>>, FixedBitSet, usize)) {
        self.map = snap.0;
        self.used = snap.1;
        self.known.truncate(snap.2);
    }
}

/// Searches for a ring isomorphism `r1 → r2`. Invariants are compared
/// first; then images of a greedy generating set of `r1` are chosen by
/// backtracking, each choice propagated through the ring operations.
/// A returned map has been verified as a bijective homomorphism.
pub fn ring_isomorphic(r1: &FiniteRing, r2: &FiniteRing) -> Result<Option<RingHom>> {
    for r in [r1, r2] {
        if r.size() > ISO_SEARCH_CAP {
            return Err(Error::CapExceeded { size: r.size(), cap: ISO_SEARCH_CAP });
        }
    }
    if invariants(r1) != invariants(r2) {
        return Ok(None);
    }
    let mut gens = Vec::new();
    let mut span = r1.prime_subring();
    while span.len() < r1.size() {
        let x = r1.elements().find(|&x| !span.contains(x)).expect("span is proper");
        gens.push(x);
        span = r1.subring_extend(&span, x)?;
    }
    let mut partial = Partial {
        dom: r1,
        cod: r2,
        map: vec![None; r1.size()],
        used: FixedBitSet::with_capacity(r2.size()),
        known: Vec::new(),
    };
    if !partial.assign(r1.zero(), r2.zero()) || !partial.assign(r1.one(), r2.one()) {
        return Ok(None);
    }
    let orders1: Vec<usize> = r1.elements().map(|x| r1.additive_order(x)).collect();
    let orders2: Vec<usize> = r2.elements().map(|x| r2.additive_order(x)).collect();
    if !search(&mut partial, &gens, &orders1, &orders2) {
        return Ok(None);
    }
    let map: Vec<usize> = partial.map.iter().map(|m| m.expect("generators span")).collect();
    let hom = r1.ring_hom(r2, map)?;
    if !hom.is_bijective(r2) {
        return Err(Error::Internal("isomorphism search produced a non-bijection".into()));
    }
    Ok(Some(hom))
}

fn search(p: &mut Partial<'_>, gens: &[usize], o1: &[usize], o2: &[usize]) -> bool {
    let Some((&g, rest)) = gens.split_first() else {
        return p.map.iter().all(Option::is_some);
    };
    if p.map[g].is_some() {
        return search(p, rest, o1, o2);
    }
    for y in p.cod.elements() {
        if p.used.contains(y) || o2[y] != o1[g] {
            continue;
        }
        let snap = p.snapshot();
        if p.assign(g, y) && search(p, rest, o1, o2) {
            return true;
        }
        p.restore(snap);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_isomorphism() {
        let r = FiniteRing::gf(2, 3, None).unwrap();
        assert!(ring_isomorphic(&r, &r).unwrap().is_some());
    }

    #[test]
    fn gf4_is_not_zmod4() {
        let a = FiniteRing::gf(2, 2, None).unwrap();
        assert!(ring_isomorphic(&a, &FiniteRing::zmod(4).unwrap()).unwrap().is_none());
    }

    #[test]
    fn dual_numbers_are_not_zmod4() {
        let a = FiniteRing::poly_quotient(2, &[0, 0, 1]).unwrap();
        assert!(ring_isomorphic(&a, &FiniteRing::zmod(4).unwrap()).unwrap().is_none());
    }

    #[test]
    fn different_moduli_give_isomorphic_fields() {
        let a = FiniteRing::gf(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        let b = FiniteRing::gf(2, 3, Some(&[1, 0, 1, 1])).unwrap();
        let hom = ring_isomorphic(&a, &b).unwrap().unwrap();
        assert!(hom.is_bijective(&b));
    }

    #[test]
    fn zmod6_is_product() {
        let p = FiniteRing::product(&[&FiniteRing::zmod(2).unwrap(), &FiniteRing::zmod(3).unwrap()]).unwrap();
        assert!(ring_isomorphic(&FiniteRing::zmod(6).unwrap(), &p).unwrap().is_some());
    }

    #[test]
    fn oversized_search_is_capped() {
        let r = FiniteRing::zmod(65).unwrap();
        assert!(matches!(ring_isomorphic(&r, &r), Err(Error::CapExceeded { .. })));
    }
}
