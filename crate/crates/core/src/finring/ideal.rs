use std::collections::{HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use super::{FiniteRing, RingIdeal};
use crate::error::{Error, Result};

/// All ideals of a ring with its prime, maximal and minimal-prime ideals
/// marked by index into `ideals`.
#[derive(Clone, Debug)]
pub struct Spectra {
    pub ideals: Vec<RingIdeal>,
    pub primes: Vec<usize>,
    pub maximal: Vec<usize>,
    pub minimal: Vec<usize>,
}

impl Spectra {
    pub fn prime_ideals(&self) -> impl Iterator<Item = &RingIdeal> {
        self.primes.iter().map(|&i| &self.ideals[i])
    }

    pub fn maximal_ideals(&self) -> impl Iterator<Item = &RingIdeal> {
        self.maximal.iter().map(|&i| &self.ideals[i])
    }

    pub fn minimal_primes(&self) -> impl Iterator<Item = &RingIdeal> {
        self.minimal.iter().map(|&i| &self.ideals[i])
    }
}

impl FiniteRing {
    pub fn check_ideal(&self, ideal: &RingIdeal) -> Result<()> {
        let set = ideal.as_bitset();
        if set.len() != self.n {
            return Err(Error::NotRingIdeal(format!("universe {} for a ring of size {}", set.len(), self.n)));
        }
        if !set.contains(self.zero) {
            return Err(Error::NotRingIdeal("missing 0".into()));
        }
        let elems: Vec<usize> = set.ones().collect();
        for &x in &elems {
            for &y in &elems {
                if !set.contains(self.add(x, y)) {
                    return Err(Error::NotRingIdeal(format!(
                        "not closed under addition at ({}, {})",
                        self.label(x),
                        self.label(y)
                    )));
                }
            }
            for r in 0..self.n {
                if !set.contains(self.mul(r, x)) {
                    return Err(Error::NotRingIdeal(format!(
                        "does not absorb {} · {}",
                        self.label(r),
                        self.label(x)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ideal_from_elements(&self, elems: impl IntoIterator<Item = usize>) -> Result<RingIdeal> {
        let ideal = RingIdeal::from_bitset_unchecked(self.bitset(elems)?);
        self.check_ideal(&ideal)?;
        Ok(ideal)
    }

    /// `aR`.
    pub fn principal_ideal(&self, a: usize) -> Result<RingIdeal> {
        self.check_element(a)?;
        let mut members = FixedBitSet::with_capacity(self.n);
        for r in 0..self.n {
            members.insert(self.mul(a, r));
        }
        Ok(RingIdeal::from_bitset_unchecked(members))
    }

    pub fn zero_ideal(&self) -> RingIdeal {
        let mut members = FixedBitSet::with_capacity(self.n);
        members.insert(self.zero);
        RingIdeal::from_bitset_unchecked(members)
    }

    /// `I + J`. Grows `I` one coset layer at a time: for each `g ∈ J` not yet
    /// covered, the set becomes `⋃_k (S + k·g)`.
    pub fn ideal_sum(&self, i: &RingIdeal, j: &RingIdeal) -> RingIdeal {
        let mut set = i.as_bitset().clone();
        let mut members: Vec<usize> = set.ones().collect();
        for g in j.elements() {
            if set.contains(g) {
                continue;
            }
            let base = members.clone();
            let mut shift = g;
            while !set.contains(shift) {
                for &s in &base {
                    let t = self.add(s, shift);
                    set.insert(t);
                    members.push(t);
                }
                shift = self.add(shift, g);
            }
        }
        RingIdeal::from_bitset_unchecked(set)
    }

    /// Ideal generated by `gens`, the sum of the principal ideals.
    pub fn ideal_generated(&self, gens: &[usize]) -> Result<RingIdeal> {
        let mut acc = self.zero_ideal();
        for &g in gens {
            acc = self.ideal_sum(&acc, &self.principal_ideal(g)?);
        }
        Ok(acc)
    }

    /// Every ideal: each is a sum of principal ideals, so closing the set of
    /// principal ideals under sums finds them all.
    pub fn all_ideals(&self, cap: usize) -> Result<Vec<RingIdeal>> {
        self.enumeration_guard(cap)?;
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut principals = Vec::new();
        for a in 0..self.n {
            let p = self.principal_ideal(a)?;
            if seen.insert(p.as_bitset().clone()) {
                principals.push(p);
            }
        }
        let mut out = principals.clone();
        let mut queue: VecDeque<RingIdeal> = principals.iter().cloned().collect();
        while let Some(i) = queue.pop_front() {
            for p in &principals {
                if p.is_subset(&i) {
                    continue;
                }
                let s = self.ideal_sum(&i, p);
                if seen.insert(s.as_bitset().clone()) {
                    out.push(s.clone());
                    queue.push_back(s);
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// Primality, tested on pairs of coset representatives of `R/I`.
    pub fn is_prime_ideal(&self, ideal: &RingIdeal) -> bool {
        if !ideal.is_proper() {
            return false;
        }
        let mut covered = FixedBitSet::with_capacity(self.n);
        let mut reps = Vec::new();
        for x in 0..self.n {
            if covered.contains(x) {
                continue;
            }
            reps.push(x);
            for i in ideal.elements() {
                covered.insert(self.add(x, i));
            }
        }
        let outside: Vec<usize> = reps.into_iter().filter(|&x| !ideal.contains(x)).collect();
        outside.iter().all(|&a| outside.iter().all(|&b| !ideal.contains(self.mul(a, b))))
    }

    /// `I` is maximal iff `R/I` is a field.
    pub fn is_maximal_ideal(&self, ideal: &RingIdeal) -> Result<bool> {
        self.check_ideal(ideal)?;
        if !ideal.is_proper() {
            return Ok(false);
        }
        let (q, _) = self.quotient(ideal)?;
        Ok(q.is_field())
    }

    /// All ideals with prime, maximal and minimal-prime ones identified.
    pub fn spectra(&self, cap: usize) -> Result<Spectra> {
        let ideals = self.all_ideals(cap)?;
        let primes: Vec<usize> = (0..ideals.len()).filter(|&i| self.is_prime_ideal(&ideals[i])).collect();
        let proper: Vec<usize> = (0..ideals.len()).filter(|&i| ideals[i].is_proper()).collect();
        let maximal: Vec<usize> = proper
            .iter()
            .copied()
            .filter(|&i| !proper.iter().any(|&j| j != i && ideals[i].is_subset(&ideals[j])))
            .collect();
        let minimal: Vec<usize> = primes
            .iter()
            .copied()
            .filter(|&i| !primes.iter().any(|&j| j != i && ideals[j].is_subset(&ideals[i])))
            .collect();
        Ok(Spectra { ideals, primes, maximal, minimal })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elems(i: &RingIdeal) -> Vec<usize> {
        i.elements().collect()
    }

    #[test]
    fn zmod_six_spectra() {
        let r = FiniteRing::zmod(6).unwrap();
        let s = r.spectra(64).unwrap();
        assert_eq!(s.ideals.len(), 4);
        let primes: Vec<Vec<usize>> = s.prime_ideals().map(elems).collect();
        assert_eq!(primes, vec![vec![0, 3], vec![0, 2, 4]]);
        assert_eq!(s.primes, s.maximal);
        assert_eq!(s.primes, s.minimal);
    }

    #[test]
    fn field_spectra_is_zero_ideal() {
        let r = FiniteRing::gf(2, 3, None).unwrap();
        let s = r.spectra(64).unwrap();
        let zero = vec![vec![0]];
        assert_eq!(s.prime_ideals().map(elems).collect::<Vec<_>>(), zero);
        assert_eq!(s.maximal_ideals().map(elems).collect::<Vec<_>>(), zero);
        assert_eq!(s.minimal_primes().map(elems).collect::<Vec<_>>(), zero);
    }

    #[test]
    fn zmod_eight_ideals_form_a_chain() {
        let r = FiniteRing::zmod(8).unwrap();
        let ideals = r.all_ideals(64).unwrap();
        assert_eq!(ideals.len(), 4);
        assert!(ideals.windows(2).all(|w| w[0].is_subset(&w[1])));
    }

    #[test]
    fn sum_of_ideals() {
        let r = FiniteRing::zmod(12).unwrap();
        let s = r.ideal_sum(&r.principal_ideal(4).unwrap(), &r.principal_ideal(6).unwrap());
        assert_eq!(elems(&s), vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn cap_is_enforced() {
        let r = FiniteRing::zmod(12).unwrap();
        assert_eq!(r.all_ideals(8).unwrap_err(), Error::CapExceeded { size: 12, cap: 8 });
    }

    #[test]
    fn invalid_ideal_is_named() {
        let r = FiniteRing::zmod(6).unwrap();
        assert!(matches!(r.ideal_from_elements([0, 1]), Err(Error::NotRingIdeal(_))));
    }
}
