use serde::Serialize;

use crate::finring::FiniteRing;

/// An element `t₁e₁ + ⋯ + tₙeₙ` of a patch algebra in canonical full
/// orthogonal form.
///
/// The `eᵢ` are nonzero, pairwise orthogonal and join to the top; the `tᵢ`
/// are pairwise distinct and `tᵢ ∈ R_{eᵢ}`. Pairs are sorted by coefficient
/// index, so two elements are equal exactly when their term lists are.
/// Elements are only produced by [`PatchAlgebra`](super::PatchAlgebra),
/// which enforces these invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PaElem {
    pub(super) terms: Vec<(usize, u64)>,
}

impl PaElem {
    /// `(tᵢ, eᵢ)` pairs, `eᵢ` given as atom masks.
    pub fn terms(&self) -> &[(usize, u64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the block containing `atom`.
    pub fn coefficient_at(&self, atom: usize) -> Option<usize> {
        self.terms.iter().find(|(_, e)| e >> atom & 1 == 1).map(|&(t, _)| t)
    }

    /// `⋁ { eᵢ : tᵢ ≠ 0 }`.
    pub fn support_mask(&self, zero: usize) -> u64 {
        self.terms.iter().filter(|(t, _)| *t != zero).fold(0, |acc, (_, e)| acc | e)
    }

    /// Renders the element with the ring's labels, e.g. `1·{1} + (x+1)·{0}`.
    pub fn display(&self, ring: &FiniteRing) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(t, e)| {
                let atoms: Vec<String> = (0..64).filter(|a| e >> a & 1 == 1).map(|a| a.to_string()).collect();
                let label = ring.label(t);
                let label = if label.contains(['+', ' ']) { format!("({label})") } else { label };
                format!("{label}·{{{}}}", atoms.join(","))
            })
            .collect();
        parts.join(" + ")
    }
}
