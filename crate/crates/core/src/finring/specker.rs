use super::construct::MixedRadix;
use super::FiniteRing;
use crate::boolalg::{BoolAlg, BoolElem};
use crate::error::{Error, Result};

/// All set partitions of `{0, …, k-1}`, each as a list of block masks in
/// order of their smallest element.
pub fn set_partitions(k: usize) -> Vec<Vec<u64>> {
    fn go(i: usize, k: usize, blocks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            go(i + 1, k, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        go(i + 1, k, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

/// The Specker algebra `R[B]`, materialized as the ring of functions from
/// the atoms of `B` to `R` with pointwise operations, and `α: B → Id(R[B])`
/// sending `e` to the indicator of its atoms.
#[derive(Clone, Debug)]
pub struct Specker {
    base: FiniteRing,
    algebra: BoolAlg,
    ring: FiniteRing,
    radix: MixedRadix,
}

impl Specker {
    pub fn new(base: &FiniteRing, algebra: BoolAlg) -> Result<Self> {
        if algebra.is_degenerate() {
            return Err(Error::ZeroRing);
        }
        let k = algebra.atom_count() as usize;
        let factors = vec![base; k];
        let ring = FiniteRing::product(&factors)?;
        let radix = MixedRadix::new(vec![base.size(); k]);
        let s = Specker { base: base.clone(), algebra, ring, radix };
        s.verify()?;
        Ok(s)
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn base(&self) -> &FiniteRing {
        &self.base
    }

    pub fn algebra(&self) -> BoolAlg {
        self.algebra
    }

    /// The constant function `t`, i.e. the image of `t` under `R → R[B]`.
    pub fn scalar(&self, t: usize) -> usize {
        self.radix.encode(&vec![t; self.radix.sizes().len()])
    }

    pub fn alpha(&self, e: BoolElem) -> usize {
        self.alpha_bits(e.bits())
    }

    fn alpha_bits(&self, bits: u64) -> usize {
        let k = self.radix.sizes().len();
        let digits: Vec<usize> = (0..k)
            .map(|a| if bits >> a & 1 == 1 { self.base.one() } else { self.base.zero() })
            .collect();
        self.radix.encode(&digits)
    }

    /// `Σ t_i α(e_i)`.
    pub fn combination(&self, terms: &[(usize, u64)]) -> usize {
        terms.iter().fold(self.ring.zero(), |acc, &(t, e)| {
            self.ring.add(acc, self.ring.mul(self.scalar(t), self.alpha_bits(e)))
        })
    }

    /// Value of an element at an atom.
    pub fn coefficient(&self, x: usize, atom: usize) -> usize {
        self.radix.digit(x, atom)
    }

    /// Checks that `α` is a Boolean embedding into `Id(R[B])`, that
    /// `t·α(e) = 0` only when `t = 0` or `e = 0`, and that every element is
    /// an `R`-combination of the `α(e)`.
    fn verify(&self) -> Result<()> {
        let r = &self.ring;
        let alg = self.algebra;
        if alg.atom_count() > 12 {
            return Ok(());
        }
        let size = alg.size() as u64;
        for e in 0..size {
            let ae = self.alpha_bits(e);
            if !r.is_idempotent(ae) {
                return Err(Error::Internal(format!("α({e:#x}) is not idempotent")));
            }
            for f in 0..size {
                let af = self.alpha_bits(f);
                if r.mul(ae, af) != self.alpha_bits(e & f)
                    || r.sub(r.add(ae, af), r.mul(ae, af)) != self.alpha_bits(e | f)
                {
                    return Err(Error::Internal(format!("α is not a lattice map at ({e:#x}, {f:#x})")));
                }
            }
            for t in self.base.elements() {
                let zero = r.mul(self.scalar(t), ae) == r.zero();
                if zero != (t == self.base.zero() || e == 0) {
                    return Err(Error::Internal(format!("faithfulness fails at t = {t}, e = {e:#x}")));
                }
            }
        }
        let k = alg.atom_count() as usize;
        for x in r.elements() {
            let terms: Vec<(usize, u64)> = (0..k).map(|a| (self.coefficient(x, a), 1 << a)).collect();
            if self.combination(&terms) != x {
                return Err(Error::Internal(format!("element {x} is not a combination of atoms")));
            }
        }
        Ok(())
    }

    /// For every element, the number of full orthogonal decompositions
    /// `Σ t_i α(e_i)` with nonzero, pairwise orthogonal `e_i` joining to `1`
    /// and pairwise distinct `t_i`, by exhaustive enumeration.
    pub fn full_orthogonal_form_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.ring.size()];
        let n = self.base.size();
        for blocks in set_partitions(self.algebra.atom_count() as usize) {
            let mut coeffs = vec![0usize; blocks.len()];
            let mut used = vec![false; n];
            injective(&mut coeffs, &mut used, 0, &mut |c| {
                let terms: Vec<(usize, u64)> = c.iter().copied().zip(blocks.iter().copied()).collect();
                counts[self.combination(&terms)] += 1;
            });
        }
        counts
    }
}

/// Calls `f` on every injective assignment of values `0..used.len()` to the
/// slots of `coeffs`.
pub(crate) fn injective(coeffs: &mut Vec<usize>, used: &mut Vec<bool>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == coeffs.len() {
        f(coeffs);
        return;
    }
    for v in 0..used.len() {
        if !used[v] {
            used[v] = true;
            coeffs[i] = v;
            injective(coeffs, used, i + 1, f);
            used[v] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::ring_isomorphic;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|k| set_partitions(k).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn one_atom_gives_the_base_ring() {
        let r = FiniteRing::gf(2, 2, None).unwrap();
        let s = Specker::new(&r, BoolAlg::new(1).unwrap()).unwrap();
        assert!(ring_isomorphic(s.ring(), &r).unwrap().is_some());
    }

    #[test]
    fn gf2_two_atoms_is_gf2_squared() {
        let r = FiniteRing::gf(2, 1, None).unwrap();
        let s = Specker::new(&r, BoolAlg::new(2).unwrap()).unwrap();
        assert_eq!(s.ring().size(), 4);
        let sq = FiniteRing::product(&[&r, &r]).unwrap();
        assert!(ring_isomorphic(s.ring(), &sq).unwrap().is_some());
    }

    #[test]
    fn full_orthogonal_forms_are_unique() {
        for (base, k) in [(FiniteRing::gf(2, 2, None).unwrap(), 3), (FiniteRing::zmod(6).unwrap(), 2)] {
            let s = Specker::new(&base, BoolAlg::new(k).unwrap()).unwrap();
            assert!(s.full_orthogonal_form_counts().iter().all(|&c| c == 1));
        }
    }
}
