use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{FiniteRing, RingIdeal, Spectra};
use crate::boolalg::{BoolAlg, BoolElem};
use crate::error::{Error, Result};

/// `Id(R)` in atom form together with its embedding into `R`.
///
/// The atoms are the primitive idempotents, in increasing element order, and
/// the element with mask `bits` embeds as the sum of the atoms it contains.
#[derive(Clone, Debug)]
pub struct IdempotentAlgebra {
    algebra: BoolAlg,
    atoms: Vec<usize>,
    embedding: Vec<usize>,
}

impl IdempotentAlgebra {
    pub fn algebra(&self) -> BoolAlg {
        self.algebra
    }

    /// Primitive idempotents, indexed by atom.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn embed(&self, e: BoolElem) -> usize {
        self.embedding[e.bits() as usize]
    }

    /// The algebra element whose embedding is `x`, if `x` is idempotent.
    pub fn element_of(&self, x: usize) -> Option<BoolElem> {
        self.embedding
            .iter()
            .position(|&y| y == x)
            .map(|b| self.algebra.element(b as u64).expect("mask in range"))
    }
}

/// Pierce spectrum and stalks: one point per primitive idempotent `e_a`,
/// with stalk `R/m_a R` where `m_a R` is generated by the idempotents of
/// the maximal ideal `m_a` of `Id(R)`.
#[derive(Clone, Debug)]
pub struct PierceData {
    pub idempotents: IdempotentAlgebra,
    /// `m_a R` for each point `a`.
    pub kernels: Vec<RingIdeal>,
    /// `R/m_a R` and the projection onto it.
    pub stalks: Vec<(FiniteRing, Vec<usize>)>,
}

/// Ring-theoretic predicates, each by brute force on its definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub is_field: bool,
    pub is_domain: bool,
    pub is_local: bool,
    pub is_indecomposable: bool,
    pub is_rickart: bool,
    pub is_clean: bool,
    pub is_gelfand: bool,
    pub is_arithmetical: bool,
    /// Semihereditary, decided only through the criterion "Rickart and every
    /// Pierce stalk is an arithmetical domain". Finite domains are fields, so
    /// the stalk condition amounts to every stalk being a field.
    pub is_semihereditary: bool,
}

impl FiniteRing {
    /// Enumerates idempotents, finds the primitive ones, and checks that
    /// `e ∨ f = e + f − ef` and `e ∧ f = ef` match the atom-form operations.
    pub fn idempotent_algebra(&self) -> Result<IdempotentAlgebra> {
        let idem = self.idempotents();
        let nonzero: Vec<usize> = idem.iter().copied().filter(|&e| e != self.zero).collect();
        let atoms: Vec<usize> = nonzero
            .iter()
            .copied()
            .filter(|&e| !nonzero.iter().any(|&f| f != e && self.mul(e, f) == f))
            .collect();
        let algebra = BoolAlg::new(atoms.len() as u32)?;
        algebra.ensure_enumerable()?;
        let embedding: Vec<usize> = (0..algebra.size() as u64)
            .map(|bits| {
                (0..atoms.len())
                    .filter(|a| bits >> a & 1 == 1)
                    .fold(self.zero, |acc, a| self.add(acc, atoms[a]))
            })
            .collect();
        let mut sorted = embedding.clone();
        sorted.sort_unstable();
        if sorted != idem {
            return Err(Error::Internal("primitive idempotents do not generate Id(R)".into()));
        }
        for x in 0..embedding.len() {
            for y in 0..embedding.len() {
                let (e, f) = (embedding[x], embedding[y]);
                let join = self.sub(self.add(e, f), self.mul(e, f));
                if join != embedding[x | y] || self.mul(e, f) != embedding[x & y] {
                    return Err(Error::Internal(format!("Boolean operations disagree at ({x:#x}, {y:#x})")));
                }
            }
            let full = algebra.full_mask() as usize;
            if self.sub(self.one, embedding[x]) != embedding[!x & full] {
                return Err(Error::Internal(format!("complement disagrees at {x:#x}")));
            }
        }
        Ok(IdempotentAlgebra { algebra, atoms, embedding })
    }

    /// Pierce spectrum and stalks, each stalk verified indecomposable.
    pub fn pierce(&self) -> Result<PierceData> {
        let idempotents = self.idempotent_algebra()?;
        let alg = idempotents.algebra();
        let mut kernels = Vec::new();
        let mut stalks = Vec::new();
        for a in 0..alg.atom_count() as usize {
            let m = alg.maximal_ideal_at(a)?;
            let gens: Vec<usize> = m.members().map(|e| idempotents.embed(e)).collect();
            let kernel = self.ideal_generated(&gens)?;
            let (stalk, proj) = self.quotient(&kernel)?;
            if !stalk.is_indecomposable() {
                return Err(Error::Internal(format!("Pierce stalk {a} is decomposable")));
            }
            kernels.push(kernel);
            stalks.push((stalk, proj));
        }
        Ok(PierceData { idempotents, kernels, stalks })
    }

    /// The support `{ m : a ∉ mR }` as a mask over Pierce points.
    pub fn support(&self, pierce: &PierceData, a: usize) -> Result<u64> {
        self.check_element(a)?;
        Ok(pierce
            .kernels
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.contains(a))
            .fold(0u64, |acc, (i, _)| acc | 1 << i))
    }

    /// Every annihilator has the form `eR` for an idempotent `e`.
    pub fn is_rickart(&self) -> Result<bool> {
        Ok(self.rickart_failure()?.is_none())
    }

    /// An element whose annihilator is not generated by an idempotent.
    pub fn rickart_failure(&self) -> Result<Option<usize>> {
        let generated: HashSet<FixedBitSet> = self
            .idempotents()
            .into_iter()
            .map(|e| self.principal_ideal(e).map(|i| i.as_bitset().clone()))
            .collect::<Result<_>>()?;
        for a in 0..self.n {
            if !generated.contains(self.annihilator(a)?.as_bitset()) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    /// Rickart, computed instead as: every Pierce stalk is a domain and every
    /// support is a clopen of the form `{ m : e ∉ m }` for an idempotent `e`.
    pub fn is_rickart_via_stalks(&self, pierce: &PierceData) -> Result<bool> {
        if !pierce.stalks.iter().all(|(s, _)| s.is_domain()) {
            return Ok(false);
        }
        let alg = pierce.idempotents.algebra();
        let max = alg.maximal_ideals()?;
        let clopens: HashSet<u64> = alg
            .elements()?
            .map(|e| (0..max.len()).filter(|&i| !max[i].contains(e)).fold(0u64, |acc, i| acc | 1 << i))
            .collect();
        for a in 0..self.n {
            if !clopens.contains(&self.support(pierce, a)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every element is an idempotent plus a unit.
    pub fn is_clean(&self) -> bool {
        let units = self.units();
        let idem = self.idempotents();
        (0..self.n).all(|a| idem.iter().any(|&e| units.contains(self.sub(a, e))))
    }

    pub fn is_gelfand(&self, spectra: &Spectra) -> bool {
        spectra
            .prime_ideals()
            .all(|p| spectra.maximal_ideals().filter(|m| p.is_subset(m)).count() == 1)
    }

    pub fn is_local(&self, spectra: &Spectra) -> bool {
        spectra.maximal.len() == 1
    }

    /// Arithmetical: the ideals of each local factor `e_a R` form a chain.
    pub fn is_arithmetical(&self, cap: usize) -> Result<bool> {
        let idem = self.idempotent_algebra()?;
        for &e in idem.atoms() {
            let (factor, _) = self.corner(e)?;
            let ideals = factor.all_ideals(cap)?;
            for i in &ideals {
                for j in &ideals {
                    if !i.is_subset(j) && !j.is_subset(i) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn predicates(&self, cap: usize) -> Result<Predicates> {
        self.enumeration_guard(cap)?;
        let spectra = self.spectra(cap)?;
        let pierce = self.pierce()?;
        let is_rickart = self.is_rickart()?;
        let mut stalks_arithmetical_domains = true;
        for (stalk, _) in &pierce.stalks {
            stalks_arithmetical_domains &= stalk.is_domain() && stalk.is_arithmetical(cap)?;
        }
        Ok(Predicates {
            is_field: self.is_field(),
            is_domain: self.is_domain(),
            is_local: self.is_local(&spectra),
            is_indecomposable: self.is_indecomposable(),
            is_rickart,
            is_clean: self.is_clean(),
            is_gelfand: self.is_gelfand(&spectra),
            is_arithmetical: self.is_arithmetical(cap)?,
            is_semihereditary: is_rickart && stalks_arithmetical_domains,
        })
    }

    /// The localization `R_M` at a maximal ideal. A finite ring is the
    /// product of the corner rings `e_a R` of its primitive idempotents, each
    /// local, and `R_M` is the factor whose idempotent lies outside `M`.
    /// Returns the factor and the projection `r ↦ e_a r`.
    pub fn localize_at_max(&self, m: &RingIdeal) -> Result<(FiniteRing, Vec<usize>)> {
        if !self.is_maximal_ideal(m)? {
            return Err(Error::NotMaximalRingIdeal);
        }
        let idem = self.idempotent_algebra()?;
        let outside: Vec<usize> = idem.atoms().iter().copied().filter(|&e| !m.contains(e)).collect();
        let [e] = outside[..] else {
            return Err(Error::Internal(format!("{} primitive idempotents outside a maximal ideal", outside.len())));
        };
        let (factor, _) = self.corner(e)?;
        if factor.spectra(usize::MAX)?.maximal.len() != 1 {
            return Err(Error::Internal("local factor is not local".into()));
        }
        let mut proj = Vec::with_capacity(self.n);
        let (_, embedding) = self.corner(e)?;
        for r in 0..self.n {
            let image = self.mul(e, r);
            proj.push(embedding.binary_search(&image).map_err(|_| Error::Internal("corner lookup".into()))?);
        }
        Ok((factor, proj))
    }

    /// Kernel of `R → R_M`, computed from its definition:
    /// `{ r : s·r = 0 for some s ∉ M }`.
    pub fn localization_kernel(&self, m: &RingIdeal) -> Result<RingIdeal> {
        let elems = (0..self.n).filter(|&r| (0..self.n).any(|s| !m.contains(s) && self.mul(s, r) == self.zero));
        self.ideal_from_elements(elems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::ring_isomorphic;

    #[test]
    fn zmod_six_pierce_stalks() {
        let r = FiniteRing::zmod(6).unwrap();
        let p = r.pierce().unwrap();
        let sizes: Vec<usize> = p.stalks.iter().map(|(s, _)| s.size()).collect();
        assert_eq!(sizes, vec![2, 3]);
    }

    #[test]
    fn product_of_three_fields_has_three_stalks() {
        let f2 = FiniteRing::gf(2, 1, None).unwrap();
        let f3 = FiniteRing::gf(3, 1, None).unwrap();
        let f4 = FiniteRing::gf(2, 2, None).unwrap();
        let r = FiniteRing::product(&[&f2, &f3, &f4]).unwrap();
        let p = r.pierce().unwrap();
        assert_eq!(p.idempotents.algebra().atom_count(), 3);
        let mut sizes: Vec<usize> = p.stalks.iter().map(|(s, _)| s.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 3, 4]);
    }

    #[test]
    fn zmod_four_is_clean_not_rickart() {
        let r = FiniteRing::zmod(4).unwrap();
        let p = r.predicates(64).unwrap();
        assert!(p.is_clean && p.is_local);
        assert!(!p.is_rickart);
        assert_eq!(r.rickart_failure().unwrap(), Some(2));
    }

    #[test]
    fn fields_satisfy_everything() {
        let r = FiniteRing::gf(2, 3, None).unwrap();
        let p = r.predicates(64).unwrap();
        assert!(p.is_field && p.is_domain && p.is_local && p.is_rickart);
        assert!(p.is_clean && p.is_gelfand && p.is_arithmetical && p.is_semihereditary);
    }

    #[test]
    fn gf4_times_gf2_predicates() {
        let a = FiniteRing::gf(2, 2, None).unwrap();
        let b = FiniteRing::gf(2, 1, None).unwrap();
        let r = FiniteRing::product(&[&a, &b]).unwrap();
        let p = r.predicates(64).unwrap();
        assert!(p.is_rickart && p.is_clean && p.is_gelfand && p.is_semihereditary);
        assert!(!p.is_local);
    }

    #[test]
    fn localize_gf4_times_gf2_at_first_factor_ideal() {
        let a = FiniteRing::gf(2, 2, None).unwrap();
        let b = FiniteRing::gf(2, 1, None).unwrap();
        let r = FiniteRing::product(&[&a, &b]).unwrap();
        // M = gf(4) × {0}: elements whose second coordinate is 0
        let m = r.ideal_from_elements((0..8).filter(|&x| x / 4 == 0)).unwrap();
        let (loc, _) = r.localize_at_max(&m).unwrap();
        assert_eq!(loc.size(), 2);
        let (oracle, _) = r.quotient(&r.localization_kernel(&m).unwrap()).unwrap();
        assert!(ring_isomorphic(&loc, &oracle).unwrap().is_some());
    }

    #[test]
    fn localize_zmod_six_at_two() {
        let r = FiniteRing::zmod(6).unwrap();
        let m = r.principal_ideal(2).unwrap();
        let (loc, _) = r.localize_at_max(&m).unwrap();
        assert!(ring_isomorphic(&loc, &FiniteRing::zmod(2).unwrap()).unwrap().is_some());
    }

    #[test]
    fn localize_local_ring_is_itself() {
        let r = FiniteRing::zmod(4).unwrap();
        let (loc, proj) = r.localize_at_max(&r.principal_ideal(2).unwrap()).unwrap();
        assert_eq!(loc.size(), 4);
        assert_eq!(proj, vec![0, 1, 2, 3]);
    }

    #[test]
    fn non_maximal_ideal_is_rejected() {
        let r = FiniteRing::zmod(6).unwrap();
        assert_eq!(r.localize_at_max(&r.zero_ideal()).unwrap_err(), Error::NotMaximalRingIdeal);
    }
}
