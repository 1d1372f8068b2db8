use serde::Serialize;

use super::PatchAlgebra;
use crate::boolalg::BoolIdeal;
use crate::error::{Error, Result};
use crate::finring::{ring_isomorphic, FiniteRing, PierceData, Predicates, RingHom, RingIdeal, Subring};

/// How one point of `Y` (an atom of `B`) matches a Pierce point of `A`.
#[derive(Clone, Debug, Serialize)]
pub struct PointWitness {
    pub atom: usize,
    pub pierce_point: usize,
    /// Elements of `f(y)` in the ambient ring.
    pub fiber: Vec<usize>,
    /// The isomorphism `A/𝔪A → f(y)` induced by `ψ`, indexed by coset and
    /// valued in the ambient ring.
    pub quotient_iso: Vec<usize>,
    /// Whether an independent isomorphism search agrees; `None` when the
    /// stalk is too large to search.
    pub iso_search: Option<bool>,
}

/// Pierce spectrum and stalks of a patch algebra, compared with `Y` and the
/// fibers of the bundle.
#[derive(Clone, Debug, Serialize)]
pub struct PierceReport {
    pub ambient_indecomposable: bool,
    /// Set when the ambient ring is decomposable, in which case `Id(A)` may
    /// be larger than `B` and the point matching is not attempted.
    pub hypothesis_flag: bool,
    pub idempotents_of_a: usize,
    pub elements_of_b: usize,
    pub idempotents_are_b: bool,
    pub pierce_stalk_sizes: Vec<usize>,
    pub points: Vec<PointWitness>,
    /// Whether distinct points have distinct fibers, i.e. the stalks are in
    /// one-to-one correspondence with the image of the bundle.
    pub fibers_distinct: bool,
    pub supports_clopen: bool,
    pub failures: Vec<String>,
}

impl PierceReport {
    pub fn certified(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalPrimeWitness {
    pub size: usize,
    /// The atom `a` with `𝔭 ∩ B = 𝔪_a`, if any.
    pub atom: Option<usize>,
    pub generated_by_idempotents: bool,
    /// An isomorphism `A/𝔭 → f(y_a)`, valued in the ambient ring.
    pub quotient_iso: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalWitness {
    pub atom: usize,
    /// Indices into the maximal spectrum of the maximal ideals containing
    /// `𝔪_a A`.
    pub containing: Vec<usize>,
    /// An isomorphism `A_M → f(y_a)` for the unique such `M`.
    pub localization_iso: Option<Vec<usize>>,
}

/// Ring-theoretic structure of a patch algebra, with each conclusion
/// enforced only when its hypotheses on the ambient ring and the fibers
/// hold.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub predicates: Predicates,
    pub ambient_domain: bool,
    pub ambient_indecomposable: bool,
    pub fibers_local: bool,
    /// An element whose annihilator is not generated by an idempotent.
    pub rickart_failure: Option<usize>,
    pub rickart_via_stalks: bool,
    pub minimal_primes: Vec<MinimalPrimeWitness>,
    pub maximal: Vec<MaximalWitness>,
    /// For each minimal prime, the index of the unique maximal ideal above
    /// it, if unique.
    pub gelfand_map: Vec<Option<usize>>,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn certified(&self) -> bool {
        self.failures.is_empty()
    }
}

fn search(a: &FiniteRing, b: &FiniteRing) -> Result<Option<RingHom>> {
    match ring_isomorphic(a, b) {
        Err(Error::CapExceeded { .. }) => Ok(None),
        other => other,
    }
}

fn is_injective(points: &[usize]) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == points.len()
}

impl PatchAlgebra {
    fn extended_ideals(&self) -> Result<(Vec<BoolIdeal>, Vec<RingIdeal>)> {
        let max = self.algebra().maximal_ideals()?;
        let ext = max.iter().map(|m| self.extended_ideal(m)).collect::<Result<_>>()?;
        Ok((max, ext))
    }

    fn fiber_rings(&self) -> Result<Vec<(Subring, FiniteRing, Vec<usize>)>> {
        self.presheaf()
            .all_stalks()?
            .into_iter()
            .map(|s| {
                let (r, emb) = self.ring().restrict(&s)?;
                Ok((s, r, emb))
            })
            .collect()
    }

    /// Compares the Pierce spectrum and stalks of `A` with the points and
    /// fibers of its bundle.
    pub fn pierce_report(&self) -> Result<PierceReport> {
        let o = self.oracle();
        let pd: PierceData = o.pierce()?;
        let ambient_indecomposable = self.ring().is_indecomposable();
        let idem = o.idempotents();
        let mut from_b = self.iota.clone();
        from_b.sort_unstable();
        let idempotents_are_b = idem == from_b;
        let mut failures = Vec::new();
        if ambient_indecomposable && !idempotents_are_b {
            failures.push(format!("Id(A) has {} elements but B has {}", idem.len(), from_b.len()));
        }
        let fibers = self.fiber_rings()?;
        let fiber_sets: Vec<&Subring> = fibers.iter().map(|(s, _, _)| s).collect();
        let fibers_distinct = (0..fiber_sets.len()).all(|i| (i + 1..fiber_sets.len()).all(|j| fiber_sets[i] != fiber_sets[j]));

        let mut points = Vec::new();
        let mut supports_clopen = false;
        if idempotents_are_b {
            let (max, ext) = self.extended_ideals()?;
            let matched: Vec<Option<usize>> = ext.iter().map(|e| pd.kernels.iter().position(|k| k == e)).collect();
            let qs: Vec<usize> = matched.iter().flatten().copied().collect();
            if qs.len() != max.len() || !is_injective(&qs) || qs.len() != pd.kernels.len() {
                failures.push("Pierce points of A are not in bijection with Y".into());
            } else {
                for (a, &q) in qs.iter().enumerate() {
                    let psi = self.psi(&max[a])?;
                    let (stalk, proj) = &pd.stalks[q];
                    let mut induced = vec![usize::MAX; stalk.size()];
                    for (x, &c) in proj.iter().enumerate() {
                        induced[c] = psi.hom.apply(x);
                    }
                    let iso = stalk.ring_hom(&psi.ring, induced)?;
                    if !iso.is_bijective(&psi.ring) {
                        failures.push(format!("A/𝔪A → f(y) is not bijective at atom {a}"));
                    }
                    let iso_search = match ring_isomorphic(stalk, &psi.ring) {
                        Ok(h) => Some(h.is_some()),
                        Err(Error::CapExceeded { .. }) => None,
                        Err(e) => return Err(e),
                    };
                    if iso_search == Some(false) {
                        failures.push(format!("no isomorphism found between A/𝔪A and f(y) at atom {a}"));
                    }
                    points.push(PointWitness {
                        atom: a,
                        pierce_point: q,
                        fiber: psi.stalk.elements().collect(),
                        quotient_iso: iso.map().iter().map(|&i| psi.embedding[i]).collect(),
                        iso_search,
                    });
                }
                supports_clopen = match self.check_supports(&pd, &qs) {
                    Ok(()) => true,
                    Err(Error::Internal(msg)) => {
                        failures.push(msg);
                        false
                    }
                    Err(e) => return Err(e),
                };
            }
        }
        Ok(PierceReport {
            ambient_indecomposable,
            hypothesis_flag: !ambient_indecomposable,
            idempotents_of_a: idem.len(),
            elements_of_b: from_b.len(),
            idempotents_are_b,
            pierce_stalk_sizes: pd.stalks.iter().map(|(s, _)| s.size()).collect(),
            points,
            fibers_distinct,
            supports_clopen,
            failures,
        })
    }

    /// Rickart, semihereditary, minimal-prime, clean and Gelfand structure of
    /// `A`, computed on the product ring.
    pub fn structure_report(&self, cap: usize) -> Result<StructureReport> {
        let o = self.oracle();
        let r = self.ring();
        let spectra = o.spectra(cap)?;
        let predicates = o.predicates(cap)?;
        let pd = o.pierce()?;
        let ambient_domain = r.is_domain();
        let ambient_indecomposable = r.is_indecomposable();
        let fibers = self.fiber_rings()?;
        let mut fibers_local = true;
        for (_, fr, _) in &fibers {
            fibers_local &= fr.is_local(&fr.spectra(cap)?);
        }
        let rickart_failure = o.rickart_failure()?;
        let rickart_via_stalks = o.is_rickart_via_stalks(&pd)?;
        let mut failures = Vec::new();
        if rickart_via_stalks != predicates.is_rickart {
            failures.push("Rickart by annihilators disagrees with Rickart by stalks".into());
        }
        if ambient_domain && !predicates.is_rickart {
            failures.push(format!("not Rickart over a domain; witness {rickart_failure:?}"));
        }
        if ambient_domain && !predicates.is_semihereditary {
            failures.push("not semihereditary over a domain".into());
        }

        let (max, ext) = self.extended_ideals()?;
        let k = max.len();
        let b_size = self.algebra().size() as u64;
        let mut minimal_primes = Vec::new();
        for p in spectra.minimal_primes() {
            let atom = (0..k).find(|&a| {
                (0..b_size).all(|e| max[a].contains(self.algebra().element(e).expect("in range")) == p.contains(self.iota[e as usize]))
            });
            let generated_by_idempotents = atom.is_some_and(|a| ext[a] == *p);
            let quotient_iso = match atom {
                Some(a) => {
                    let (q, _) = o.quotient(p)?;
                    let (_, fr, emb) = &fibers[a];
                    search(&q, fr)?.map(|h| h.map().iter().map(|&i| emb[i]).collect())
                }
                None => None,
            };
            minimal_primes.push(MinimalPrimeWitness { size: p.len(), atom, generated_by_idempotents, quotient_iso });
        }
        if ambient_domain {
            let atoms: Vec<usize> = minimal_primes.iter().filter_map(|w| w.atom).collect();
            if atoms.len() != minimal_primes.len() || atoms.len() != k || !is_injective(&atoms) {
                failures.push("minimal primes are not in bijection with the Pierce spectrum".into());
            }
            for w in &minimal_primes {
                if !w.generated_by_idempotents {
                    failures.push(format!("minimal prime at atom {:?} is not 𝔪A", w.atom));
                }
                if w.quotient_iso.is_none() {
                    failures.push(format!("A/𝔭 is not isomorphic to the fiber at atom {:?}", w.atom));
                }
            }
        }

        let maximal_ideals: Vec<&RingIdeal> = spectra.maximal_ideals().collect();
        let mut maximal = Vec::with_capacity(k);
        for (a, e) in ext.iter().enumerate() {
            let containing: Vec<usize> = (0..maximal_ideals.len()).filter(|&j| e.is_subset(maximal_ideals[j])).collect();
            let localization_iso = match containing.as_slice() {
                [j] => {
                    let (loc, _) = o.localize_at_max(maximal_ideals[*j])?;
                    let (_, fr, emb) = &fibers[a];
                    search(&loc, fr)?.map(|h| h.map().iter().map(|&i| emb[i]).collect())
                }
                _ => None,
            };
            maximal.push(MaximalWitness { atom: a, containing, localization_iso });
        }
        if ambient_indecomposable && fibers_local {
            if !predicates.is_clean {
                failures.push("not clean over local fibers".into());
            }
            let tops: Vec<usize> = maximal.iter().filter(|w| w.containing.len() == 1).map(|w| w.containing[0]).collect();
            if tops.len() != k || !is_injective(&tops) || tops.len() != maximal_ideals.len() {
                failures.push("Pierce spectrum is not in bijection with the maximal spectrum".into());
            }
            for w in &maximal {
                if w.localization_iso.is_none() {
                    failures.push(format!("A_M is not isomorphic to the fiber at atom {}", w.atom));
                }
            }
        }

        let gelfand_map: Vec<Option<usize>> = spectra
            .minimal_primes()
            .map(|p| {
                let above: Vec<usize> = (0..maximal_ideals.len()).filter(|&j| p.is_subset(maximal_ideals[j])).collect();
                match above.as_slice() {
                    [j] => Some(*j),
                    _ => None,
                }
            })
            .collect();
        if ambient_domain && fibers_local {
            if !predicates.is_gelfand {
                failures.push("not Gelfand over local fibers of a domain".into());
            }
            let targets: Vec<usize> = gelfand_map.iter().flatten().copied().collect();
            if targets.len() != gelfand_map.len() || !is_injective(&targets) || targets.len() != maximal_ideals.len() {
                failures.push("minimal and maximal spectra are not in bijection".into());
            }
        }

        Ok(StructureReport {
            predicates,
            ambient_domain,
            ambient_indecomposable,
            fibers_local,
            rickart_failure,
            rickart_via_stalks,
            minimal_primes,
            maximal,
            gelfand_map,
            failures,
        })
    }
}
