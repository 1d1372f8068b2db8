//! JSON input documents.
//!
//! A ring is described by a [`RingSpec`], tagged by `kind`:
//!
//! ```json
//! {"kind": "zmod", "n": 6}
//! {"kind": "gf", "p": 2, "k": 4}
//! {"kind": "gf", "p": 2, "k": 3, "modulus": [1, 0, 1, 1]}
//! {"kind": "poly", "p": 2, "modulus": [0, 0, 1]}
//! {"kind": "product", "factors": [{"kind": "gf", "p": 2, "k": 2}, {"kind": "zmod", "n": 2}]}
//! {"kind": "quotient", "ring": {"kind": "zmod", "n": 12}, "ideal": [4]}
//! {"kind": "tables", "add": [[0, 1], [1, 0]], "mul": [[0, 0], [0, 1]]}
//! ```
//!
//! Polynomial coefficients are listed from the constant term up. Elements
//! are always referred to by index; `labels` may rename them for display.

use std::sync::Arc;

use patchalg::boolalg::BoolAlg;
use patchalg::finring::{FiniteRing, Subring};
use patchalg::presheaf::PatchPresheaf;
use patchalg::topo::SubringSpace;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingSpec {
    Zmod {
        n: usize,
    },
    Gf {
        p: u64,
        k: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u64>>,
    },
    Poly {
        p: u64,
        modulus: Vec<u64>,
    },
    Product {
        factors: Vec<RingSpec>,
    },
    /// The quotient by the ideal generated by the listed elements.
    Quotient {
        ring: Box<RingSpec>,
        ideal: Vec<usize>,
    },
    Tables {
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
    },
}

impl RingSpec {
    pub fn build(&self) -> patchalg::Result<FiniteRing> {
        match self {
            RingSpec::Zmod { n } => FiniteRing::zmod(*n),
            RingSpec::Gf { p, k, modulus } => FiniteRing::gf(*p, *k, modulus.as_deref()),
            RingSpec::Poly { p, modulus } => FiniteRing::poly_quotient(*p, modulus),
            RingSpec::Product { factors } => {
                let rings = factors.iter().map(RingSpec::build).collect::<patchalg::Result<Vec<_>>>()?;
                FiniteRing::product(&rings.iter().collect::<Vec<_>>())
            }
            RingSpec::Quotient { ring, ideal } => {
                let r = ring.build()?;
                let i = r.ideal_generated(ideal)?;
                if !i.is_proper() {
                    return Err(patchalg::Error::ZeroRing);
                }
                Ok(r.quotient(&i)?.0)
            }
            RingSpec::Tables { add, mul } => FiniteRing::from_tables(add.clone(), mul.clone(), None),
        }
    }

    /// A short human-readable name, e.g. `gf(2^4)` or `gf(2^2)×Z/2`.
    pub fn name(&self) -> String {
        match self {
            RingSpec::Zmod { n } => format!("Z/{n}"),
            RingSpec::Gf { p, k, .. } => format!("gf({p}^{k})"),
            RingSpec::Poly { p, modulus } => {
                let terms: Vec<String> = modulus
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "x".into(),
                        (i, 1) => format!("x^{i}"),
                        (1, c) => format!("{c}x"),
                        (i, c) => format!("{c}x^{i}"),
                    })
                    .collect();
                format!("gf({p})[x]/({})", terms.join("+"))
            }
            RingSpec::Product { factors } => factors.iter().map(RingSpec::name).collect::<Vec<_>>().join("×"),
            RingSpec::Quotient { ring, ideal } => format!("{}/{ideal:?}", ring.name()),
            RingSpec::Tables { add, .. } => format!("tables({})", add.len()),
        }
    }
}

/// A set of subrings, either all of `Σ(R)` or an explicit list of element
/// sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    All(String),
    Members(Vec<Vec<usize>>),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::All("all".into())
    }
}

/// The document read by `ring`, `space`, `presheaf` and `algebra`: a ring
/// spec plus optional display labels, a selection of subrings, and a
/// presheaf given by atom sections or by all sections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Input {
    #[serde(flatten)]
    pub ring: RingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<Selection>,
    /// One subring per atom; the presheaf is `R_e = ⋂_{a ∈ e} R_a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Vec<usize>>>,
    /// Every section `R_e`, indexed by the atom mask `e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<Vec<usize>>>,
}

impl Input {
    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build_ring(&self) -> CliResult<Arc<FiniteRing>> {
        let r = self.ring.build()?;
        let r = match &self.labels {
            Some(l) => r.with_labels(l.clone())?,
            None => r,
        };
        Ok(Arc::new(r))
    }
}

fn subring(ring: &FiniteRing, elems: &[usize], what: &str) -> CliResult<Subring> {
    ring.subring_from_elements(elems.iter().copied())
        .map_err(|e| CliError::Admissibility(format!("{what} {elems:?}: {e}")))
}

/// The subspace of `Σ(R)` named by `selection`.
pub fn resolve_selection(sigma: &SubringSpace, selection: &Selection) -> CliResult<SubringSpace> {
    match selection {
        Selection::All(s) if s == "all" => Ok(sigma.clone()),
        Selection::All(s) => Err(CliError::Schema(format!("select: expected \"all\" or a list of element lists, got {s:?}"))),
        Selection::Members(lists) => {
            let mut members = Vec::with_capacity(lists.len());
            for elems in lists {
                let s = subring(sigma.ring(), elems, "select: unknown subring")?;
                if sigma.index_of(&s).is_none() {
                    return Err(CliError::Admissibility(format!("select: unknown subring {elems:?}")));
                }
                members.push(s);
            }
            Ok(SubringSpace::from_subrings(sigma.ring().clone(), members)?)
        }
    }
}

/// The presheaf described by `input`: explicit sections if given, else atom
/// sections, else the presheaf of the selected subspace.
pub fn resolve_presheaf(input: &Input, sigma: &SubringSpace, selection: &Selection) -> CliResult<PatchPresheaf> {
    let ring = sigma.ring();
    if let Some(sections) = &input.sections {
        let n = sections.len();
        if !n.is_power_of_two() {
            return Err(CliError::Schema(format!("sections: expected 2^k entries, got {n}")));
        }
        let algebra = BoolAlg::new(n.trailing_zeros())?;
        let subrings = sections
            .iter()
            .enumerate()
            .map(|(e, elems)| subring(ring, elems, &format!("sections[{e}]")))
            .collect::<CliResult<Vec<_>>>()?;
        let p = PatchPresheaf::unvalidated(ring.clone(), algebra, subrings)?;
        p.validate().map_err(|v| CliError::Admissibility(format!("invalid presheaf: {v}")))?;
        return Ok(p);
    }
    if let Some(atoms) = &input.atoms {
        let subrings = atoms
            .iter()
            .enumerate()
            .map(|(a, elems)| subring(ring, elems, &format!("atoms[{a}]")))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(PatchPresheaf::from_atoms(ring.clone(), subrings)?);
    }
    Ok(resolve_selection(sigma, selection)?.presheaf()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        for text in [
            r#"{"kind":"zmod","n":6}"#,
            r#"{"kind":"gf","p":2,"k":4}"#,
            r#"{"kind":"poly","p":2,"modulus":[0,0,1]}"#,
            r#"{"kind":"product","factors":[{"kind":"gf","p":2,"k":2},{"kind":"zmod","n":2}]}"#,
            r#"{"kind":"quotient","ring":{"kind":"zmod","n":12},"ideal":[4]}"#,
            r#"{"kind":"tables","add":[[0,1],[1,0]],"mul":[[0,0],[0,1]]}"#,
        ] {
            let input = Input::parse(text).unwrap();
            input.build_ring().unwrap();
        }
    }

    #[test]
    fn sizes_match_the_constructions() {
        let size = |t: &str| Input::parse(t).unwrap().build_ring().unwrap().size();
        assert_eq!(size(r#"{"kind":"quotient","ring":{"kind":"zmod","n":12},"ideal":[4]}"#), 4);
        assert_eq!(size(r#"{"kind":"product","factors":[{"kind":"gf","p":2,"k":2},{"kind":"zmod","n":2}]}"#), 8);
    }

    #[test]
    fn zero_ring_is_inadmissible() {
        let err = Input::parse(r#"{"kind":"zmod","n":1}"#).unwrap().build_ring().unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn unknown_kind_is_a_schema_error() {
        assert_eq!(Input::parse(r#"{"kind":"nope"}"#).unwrap_err().exit_code(), 2);
        assert_eq!(Input::parse("{").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn names() {
        let poly = RingSpec::Poly { p: 2, modulus: vec![0, 0, 1] };
        assert_eq!(poly.name(), "gf(2)[x]/(x^2)");
        let prod = RingSpec::Product { factors: vec![RingSpec::Gf { p: 2, k: 2, modulus: None }, RingSpec::Zmod { n: 2 }] };
        assert_eq!(prod.name(), "gf(2^2)×Z/2");
    }
}
