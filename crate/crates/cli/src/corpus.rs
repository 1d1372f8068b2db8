use serde::{Deserialize, Serialize};

use crate::spec::RingSpec;

fn gf(k: u32) -> RingSpec {
    RingSpec::Gf { p: 2, k, modulus: None }
}

fn default_rings() -> Vec<RingSpec> {
    vec![
        gf(1),
        gf(2),
        gf(3),
        gf(4),
        gf(6),
        RingSpec::Poly { p: 2, modulus: vec![0, 0, 1] },
        RingSpec::Zmod { n: 6 },
        RingSpec::Product { factors: vec![gf(2), gf(1)] },
        RingSpec::Product { factors: vec![gf(1), gf(1)] },
    ]
}

fn default_equivalence_rings() -> Vec<RingSpec> {
    vec![gf(4), RingSpec::Product { factors: vec![gf(2), gf(1)] }]
}

fn default_field_spaces() -> Vec<RingSpec> {
    vec![gf(4), gf(6)]
}

fn default_seed() -> u64 {
    0x5eed
}

fn default_presheaves() -> usize {
    200
}

fn default_mutants() -> usize {
    200
}

fn default_pairs() -> usize {
    100
}

fn default_samples() -> usize {
    500
}

/// A presheaf expected to be valid, given by all its sections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub ring: RingSpec,
    pub sections: Vec<Vec<usize>>,
}

/// What `patchalg verify` runs. Every field has a default, so `{}` is the
/// default corpus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusConfig {
    #[serde(default = "default_rings")]
    pub rings: Vec<RingSpec>,
    /// Spaces whose small bundles are checked exhaustively against the
    /// bundle–presheaf equivalence.
    #[serde(default = "default_equivalence_rings")]
    pub equivalence_rings: Vec<RingSpec>,
    /// Rings all of whose subspaces are checked for the space–presheaf
    /// correspondence and the Pierce-spectrum theorem.
    #[serde(default = "default_field_spaces")]
    pub subspace_rings: Vec<RingSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default = "default_presheaves")]
    pub presheaves_per_ring: usize,
    #[serde(default = "default_mutants")]
    pub mutants_per_ring: usize,
    #[serde(default = "default_pairs")]
    pub morphism_pairs: usize,
    #[serde(default = "default_samples")]
    pub non_member_samples: usize,
    /// Suite tags to run; all of them when absent.
    #[serde(default)]
    pub suites: Option<Vec<String>>,
    #[serde(default)]
    pub fixtures: Vec<Fixture>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}
