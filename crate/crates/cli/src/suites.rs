//! The verification suites run by `patchalg verify`.
//!
//! Each suite checks one family of statements over the corpus and either
//! passes with a count of checks performed or stops at the first
//! counterexample, which is serialized into the report.

use std::sync::Arc;
use std::thread;
use std::time::Instant;

use patchalg::boolalg::{stone_homeo, BoolAlg, BoolElem, BoolIdeal};
use patchalg::bundle::{self, PatchBundle};
use patchalg::finring::{FiniteRing, Subring};
use patchalg::patchalg::PatchAlgebra;
use patchalg::presheaf::PatchPresheaf;
use patchalg::topo::SubringSpace;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::CorpusConfig;
use crate::report::{Certificate, Report};
use crate::spec::RingSpec;

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub tag: String,
    pub statement: String,
    pub passed: bool,
    pub checks: u64,
    pub notes: Vec<String>,
    pub counterexample: Option<Value>,
}

struct Failure(Value);

impl From<patchalg::Error> for Failure {
    fn from(e: patchalg::Error) -> Self {
        Failure(json!({ "error": e.to_string() }))
    }
}

type Step<T = ()> = Result<T, Failure>;

fn ensure(cond: bool, witness: impl FnOnce() -> Value) -> Step {
    if cond {
        Ok(())
    } else {
        Err(Failure(witness()))
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    notes: Vec<String>,
}

struct Suite {
    tag: &'static str,
    statement: &'static str,
    run: fn(&CorpusConfig, usize, &mut Tally) -> Step,
}

const SUITES: &[Suite] = &[
    Suite {
        tag: "boolean-layer",
        statement: "generated ideals match the finite join-cover criterion; maximal ideals are exactly the ideals containing e or ¬e for every e, exactly the prime ideals, and exactly the non-extendable ones; every proper ideal lies in a maximal one and is the intersection of those containing it; Stone maps are identities",
        run: boolean_layer,
    },
    Suite {
        tag: "presheaf-layer",
        statement: "random presheaves satisfy R_0 = R and R_e ∩ R_f = R_(e∨f); the orthogonal-pair check agrees; every section is recovered from stalks; single-entry mutants are rejected",
        run: presheaf_layer,
    },
    Suite {
        tag: "bundle-equivalence",
        statement: "B(R(f)) ≅ f and R(B(P)) ≅ P through Stone maps, naturally, and R and B preserve identities and composition",
        run: equivalence,
    },
    Suite {
        tag: "space-correspondence",
        statement: "for every subspace X, R(X) is distinguished and X(R(X)) = X; R(X(P)) ≅ P for distinguished P",
        run: correspondence,
    },
    Suite {
        tag: "patch-algebra-core",
        statement: "evaluation is a ring isomorphism onto the product of the atom sections; full orthogonal forms are unique; out-of-section coefficients leave A; (A :_R e) = R_e; ψ_m is onto the stalk with kernel 𝔪A",
        run: algebra_core,
    },
    Suite {
        tag: "pierce-spectrum",
        statement: "over an indecomposable ring, Id(A) = B, the Pierce spectrum of A is Y and the Pierce stalks are the fibers; a decomposable ambient ring is flagged",
        run: pierce_spectrum,
    },
    Suite {
        tag: "algebra-structure",
        statement: "over a field A is Rickart, semihereditary, clean and Gelfand, minimal primes and maximal ideals both match Y, and A/𝔭 and A_M recover the fibers; over a local non-domain A is clean but not Rickart",
        run: structure,
    },
    Suite {
        tag: "fixtures",
        statement: "patch presheaf axioms R_0 = R and R_e ∩ R_f = R_(e∨f) hold for every supplied fixture",
        run: fixtures,
    },
];

/// Tags of all suites, in run order.
pub fn suite_tags() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.tag).collect()
}

/// Runs the selected suites in parallel and returns their results in the
/// fixed suite order.
pub fn run_suites(cfg: &CorpusConfig, cap: usize) -> Vec<SuiteResult> {
    let selected: Vec<&Suite> = SUITES
        .iter()
        .filter(|s| match &cfg.suites {
            Some(tags) => tags.iter().any(|t| t == s.tag),
            None => s.tag != "fixtures" || !cfg.fixtures.is_empty(),
        })
        .collect();
    thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|s| {
                scope.spawn(move || {
                    let mut tally = Tally::default();
                    let outcome = (s.run)(cfg, cap, &mut tally);
                    SuiteResult {
                        tag: s.tag.into(),
                        statement: s.statement.into(),
                        passed: outcome.is_ok(),
                        checks: tally.checks,
                        notes: tally.notes,
                        counterexample: outcome.err().map(|f| f.0),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    })
}

/// Runs the suites and wraps them in a report.
pub fn verify(cfg: &CorpusConfig, cap: usize) -> Report {
    let start = Instant::now();
    let results = run_suites(cfg, cap);
    let certificates = results
        .iter()
        .map(|r| {
            Certificate::new(
                &r.tag,
                &r.statement,
                r.passed,
                json!({ "checks": r.checks, "notes": r.notes, "counterexample": r.counterexample }),
            )
        })
        .collect();
    Report {
        command: "verify".into(),
        inputs: serde_json::to_value(cfg).expect("config serializes"),
        certificates,
        data: json!({ "suites": results.len(), "cap": cap }),
        timing_ms: start.elapsed().as_millis() as u64,
    }
}

fn build(spec: &RingSpec) -> Step<Arc<FiniteRing>> {
    spec.build().map(Arc::new).map_err(|e| Failure(json!({ "ring": spec.name(), "error": e.to_string() })))
}

fn sigma(spec: &RingSpec, cap: usize) -> Step<SubringSpace> {
    Ok(SubringSpace::enumerate(build(spec)?, cap)?)
}

fn rng(cfg: &CorpusConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn elems(s: &Subring) -> Vec<usize> {
    s.elements().collect()
}

fn ideal_bits(i: &BoolIdeal) -> Vec<u64> {
    i.members().map(|e| e.bits()).collect()
}

fn boolean_layer(_cfg: &CorpusConfig, _cap: usize, t: &mut Tally) -> Step {
    for k in 1..=4u32 {
        let alg = BoolAlg::new(k)?;
        let all: Vec<BoolElem> = alg.elements()?.collect();
        let n = all.len();
        let mut gen_sets: Vec<Vec<BoolElem>> = vec![vec![]];
        for i in 0..n {
            gen_sets.push(vec![all[i]]);
            for j in i + 1..n {
                gen_sets.push(vec![all[i], all[j]]);
                for l in j + 1..n {
                    gen_sets.push(vec![all[i], all[j], all[l]]);
                }
            }
        }
        for gens in &gen_sets {
            let ideal = alg.ideal_generated(gens)?;
            for &e in &all {
                let cover = alg.join_cover(gens, e)?;
                if let Some(f) = &cover {
                    let join = f.iter().fold(0u64, |acc, x| acc | x.bits());
                    ensure(f.iter().all(|x| gens.contains(x)) && e.bits() & !join == 0, || {
                        json!({ "atoms": k, "generators": gens.iter().map(|g| g.bits()).collect::<Vec<_>>(), "element": e.bits(), "bad_cover": f.iter().map(|x| x.bits()).collect::<Vec<_>>() })
                    })?;
                }
                ensure(cover.is_some() == ideal.contains(e), || {
                    json!({ "atoms": k, "generators": gens.iter().map(|g| g.bits()).collect::<Vec<_>>(), "element": e.bits(), "in_ideal": ideal.contains(e) })
                })?;
                t.checks += 1;
            }
        }

        let ideals = alg.all_ideals()?;
        let proper: Vec<&BoolIdeal> = ideals.iter().filter(|i| i.is_proper()).collect();
        // Maximal by inclusion among proper ideals, computed from the list.
        let by_inclusion: Vec<&BoolIdeal> =
            proper.iter().copied().filter(|i| !proper.iter().any(|j| *j != *i && i.is_subset(j))).collect();
        let listed = alg.maximal_ideals()?;
        ensure(listed.len() == by_inclusion.len() && listed.iter().all(|m| by_inclusion.contains(&m)), || {
            json!({ "atoms": k, "listed_maximal": listed.iter().map(ideal_bits).collect::<Vec<_>>() })
        })?;
        for ideal in &ideals {
            let above: Vec<&BoolIdeal> = by_inclusion.iter().copied().filter(|m| ideal.is_subset(m)).collect();
            if ideal.is_proper() {
                let c = alg.maximality_criteria(ideal)?;
                let maximal = by_inclusion.contains(&ideal);
                ensure(c.complement == maximal && c.prime == maximal && c.non_extendable == maximal, || {
                    json!({ "atoms": k, "ideal": ideal_bits(ideal), "criteria": [c.complement, c.prime, c.non_extendable], "maximal": maximal })
                })?;
                ensure(!above.is_empty(), || json!({ "atoms": k, "ideal": ideal_bits(ideal), "no_maximal_above": true }))?;
            }
            let meet = above.iter().fold(None::<BoolIdeal>, |acc, m| Some(match acc {
                None => (*m).clone(),
                Some(a) => a.intersection(m),
            }));
            let meet_bits = meet.map(|m| ideal_bits(&m)).unwrap_or_else(|| all.iter().map(|e| e.bits()).collect());
            ensure(meet_bits == ideal_bits(ideal), || json!({ "atoms": k, "ideal": ideal_bits(ideal), "meet_of_maximal": meet_bits }))?;
            t.checks += 1;
        }

        let iso = alg.stone_iso()?;
        ensure(iso.is_identity_on_labels(), || json!({ "atoms": k, "stone_iso": "not the identity on labels" }))?;
        for &e in &all {
            let direct = (0..k as usize).filter(|&a| !listed[a].contains(e)).fold(0u64, |acc, a| acc | 1 << a);
            ensure(iso.apply(e)?.bits() == direct, || json!({ "atoms": k, "element": e.bits(), "stone_image": direct }))?;
        }
        let homeo = stone_homeo(k as usize)?;
        for y in 0..k as usize {
            ensure(homeo.position(y) == y && *homeo.image(y) == alg.maximal_ideal_at(y)?, || {
                json!({ "points": k, "point": y, "stone_homeo": "moves the point" })
            })?;
            t.checks += 1;
        }
    }
    Ok(())
}

fn presheaf_layer(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    for (i, spec) in cfg.rings.iter().enumerate() {
        let space = sigma(spec, cap)?;
        let mut rng = rng(cfg, 100 + i as u64);
        for _ in 0..cfg.presheaves_per_ring {
            let atoms = rng.random_range(1..=4);
            let p = PatchPresheaf::random(&space, atoms, &mut rng)?;
            let sections: Vec<Vec<usize>> = p.sections().iter().map(elems).collect();
            ensure(p.validate().is_ok() && p.validate_orthogonal().is_ok(), || {
                json!({ "ring": spec.name(), "sections": sections })
            })?;
            for e in p.algebra().elements()? {
                p.recover_section(e).map_err(|err| Failure(json!({ "ring": spec.name(), "sections": sections, "e": e.bits(), "error": err.to_string() })))?;
            }
            t.checks += 1;
        }
        let mut produced = 0;
        for _ in 0..cfg.mutants_per_ring {
            let atoms = rng.random_range(1..=4);
            let p = PatchPresheaf::random(&space, atoms, &mut rng)?;
            let Some((e, mutant)) = p.random_mutant(&space, &mut rng) else { continue };
            let full = mutant.validate();
            let orth = mutant.validate_orthogonal();
            ensure(full.is_err() && orth.is_err(), || {
                json!({ "ring": spec.name(), "mutated_index": e, "sections": mutant.sections().iter().map(elems).collect::<Vec<_>>() })
            })?;
            produced += 1;
            t.checks += 1;
        }
        if produced < cfg.mutants_per_ring {
            t.notes.push(format!(
                "{}: {produced} of {} mutants; Σ(R) has {} member(s), so no other subring can replace a section",
                spec.name(),
                cfg.mutants_per_ring,
                space.len()
            ));
        }
    }
    Ok(())
}

fn bundles(space: &SubringSpace, points: usize) -> Step<Vec<PatchBundle>> {
    let n = space.len();
    let total = n.pow(points as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let fibers = (0..points).map(|y| space.member(code / n.pow(y as u32) % n).clone()).collect();
        out.push(PatchBundle::new(space.ring().clone(), fibers)?);
    }
    Ok(out)
}

fn equivalence(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    for (i, spec) in cfg.equivalence_rings.iter().enumerate() {
        let space = sigma(spec, cap)?;
        for points in 0..=3 {
            for f in bundles(&space, points)? {
                let fibers: Vec<Vec<usize>> = f.fibers().iter().map(elems).collect();
                let witness = |e: patchalg::Error| Failure(json!({ "ring": spec.name(), "fibers": fibers, "error": e.to_string() }));
                bundle::check_bundle_round_trip(&f).map_err(witness)?;
                bundle::check_presheaf_round_trip(&bundle::functor_r(&f)?).map_err(witness)?;
                t.checks += 2;
            }
        }
        let mut rng = rng(cfg, 200 + i as u64);
        for _ in 0..cfg.morphism_pairs {
            let (g1, g2) = bundle::random_composable_pair(&space, &mut rng)?;
            let witness = |e: patchalg::Error| {
                Failure(json!({ "ring": spec.name(), "first": g1.map, "second": g2.map, "error": e.to_string() }))
            };
            bundle::check_functoriality(&g1, &g2).map_err(witness)?;
            bundle::check_bundle_morphism_naturality(&g1).map_err(witness)?;
            bundle::check_presheaf_morphism_naturality(&bundle::functor_r_morphism(&g2)?).map_err(witness)?;
            t.checks += 3;
        }
    }
    Ok(())
}

fn correspondence(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    for spec in &cfg.subspace_rings {
        let space = sigma(spec, cap)?;
        for mask in 0..1u64 << space.len() {
            bundle::check_space_round_trip(&space, mask)
                .map_err(|e| Failure(json!({ "ring": spec.name(), "subspace_mask": mask, "error": e.to_string() })))?;
            let x = space.subspace(space.clop_algebra().element(mask)?)?;
            bundle::check_distinguished_round_trip(&x.presheaf()?)
                .map_err(|e| Failure(json!({ "ring": spec.name(), "subspace_mask": mask, "error": e.to_string() })))?;
            t.checks += 2;
        }
    }
    let mut distinguished = 0;
    for (i, spec) in cfg.rings.iter().enumerate() {
        let space = sigma(spec, cap)?;
        let mut rng = rng(cfg, 300 + i as u64);
        for _ in 0..cfg.presheaves_per_ring / 4 {
            let p = PatchPresheaf::random(&space, rng.random_range(1..=4), &mut rng)?;
            if p.distinguished()?.is_distinguished() {
                bundle::check_distinguished_round_trip(&p).map_err(|e| {
                    Failure(json!({ "ring": spec.name(), "sections": p.sections().iter().map(elems).collect::<Vec<_>>(), "error": e.to_string() }))
                })?;
                distinguished += 1;
                t.checks += 1;
            }
        }
    }
    t.notes.push(format!("{distinguished} random corpus presheaves were distinguished"));
    Ok(())
}

/// The algebras examined for each corpus ring: the presheaf of `Σ(R)`, the
/// constant presheaf on two atoms, and a few random presheaves.
fn corpus_algebras(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step<Vec<(String, PatchAlgebra)>> {
    let mut out = Vec::new();
    let mut skipped = 0;
    for (i, spec) in cfg.rings.iter().enumerate() {
        let space = sigma(spec, cap)?;
        let mut rng = rng(cfg, 400 + i as u64);
        let mut presheaves = vec![space.presheaf()?, PatchPresheaf::constant(space.ring().clone(), BoolAlg::new(2)?)?];
        for _ in 0..3 {
            presheaves.push(PatchPresheaf::random(&space, rng.random_range(1..=3), &mut rng)?);
        }
        for p in presheaves {
            match PatchAlgebra::build_with_cap(&p, cap) {
                Ok(a) => out.push((spec.name(), a)),
                Err(patchalg::Error::CapExceeded { .. }) => skipped += 1,
                Err(e) => {
                    return Err(Failure(json!({ "ring": spec.name(), "sections": p.sections().iter().map(elems).collect::<Vec<_>>(), "error": e.to_string() })))
                }
            }
        }
    }
    if skipped > 0 {
        t.notes.push(format!("{skipped} corpus algebras exceed the cap and were skipped"));
    }
    Ok(out)
}

fn algebra_core(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    let mut rng = rng(cfg, 500);
    let (mut tested, mut vacuous) = (0, 0);
    for (name, a) in corpus_algebras(cfg, cap, t)? {
        let witness = |e: patchalg::Error| {
            Failure(json!({ "ring": name, "sections": a.presheaf().sections().iter().map(elems).collect::<Vec<_>>(), "error": e.to_string() }))
        };
        a.check_unique_forms().map_err(witness)?;
        let sample = a.sample_non_members(cfg.non_member_samples, &mut rng).map_err(witness)?;
        tested += sample.tested;
        vacuous += sample.vacuous;
        for e in a.algebra().elements()? {
            a.colon(e).map_err(witness)?;
        }
        for m in a.algebra().maximal_ideals()? {
            a.psi(&m).map_err(witness)?;
        }
        t.checks += 1;
    }
    t.notes.push(format!("{tested} out-of-section decompositions rejected, {vacuous} draws had no out-of-section coefficient"));
    Ok(())
}

fn nonempty_subspaces(space: &SubringSpace) -> Step<Vec<(u64, SubringSpace)>> {
    (1..1u64 << space.len())
        .map(|mask| Ok((mask, space.subspace(space.clop_algebra().element(mask)?)?)))
        .collect()
}

fn pierce_spectrum(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    for spec in &cfg.subspace_rings {
        let space = sigma(spec, cap)?;
        for (mask, x) in nonempty_subspaces(&space)? {
            let a = PatchAlgebra::build_from_bundle(&PatchBundle::identity(&x)?)?;
            let report = a.pierce_report()?;
            let needs_indecomposable = !report.ambient_indecomposable;
            ensure(
                needs_indecomposable
                    || (report.certified()
                        && report.idempotents_are_b
                        && report.points.len() == x.len()
                        && report.fibers_distinct),
                || json!({ "ring": spec.name(), "subspace_mask": mask, "report": report }),
            )?;
            t.checks += 1;
        }
    }
    let f2 = RingSpec::Gf { p: 2, k: 1, modulus: None };
    let r = build(&RingSpec::Product { factors: vec![f2.clone(), f2] })?;
    let a = PatchAlgebra::build(&PatchPresheaf::constant(r, BoolAlg::new(2)?)?)?;
    let report = a.pierce_report()?;
    ensure(report.hypothesis_flag && !report.idempotents_are_b, || json!({ "decomposable_fixture": report }))?;
    t.notes.push(format!(
        "decomposable ambient gf(2)×gf(2): |Id(A)| = {} vs |B| = {}, hypothesis flagged",
        report.idempotents_of_a, report.elements_of_b
    ));
    t.checks += 1;
    Ok(())
}

fn structure(cfg: &CorpusConfig, cap: usize, t: &mut Tally) -> Step {
    let mut local_non_domains = 0;
    for spec in &cfg.rings {
        let space = sigma(spec, cap)?;
        let r = space.ring();
        if r.is_field() {
            for (mask, x) in nonempty_subspaces(&space)? {
                let a = PatchAlgebra::build_from_bundle(&PatchBundle::identity(&x)?)?;
                let s = a.structure_report(cap)?;
                let p = &s.predicates;
                ensure(
                    s.certified()
                        && p.is_rickart
                        && p.is_semihereditary
                        && p.is_clean
                        && p.is_gelfand
                        && s.minimal_primes.len() == x.len()
                        && s.maximal.iter().all(|w| w.containing.len() == 1),
                    || json!({ "ring": spec.name(), "subspace_mask": mask, "report": s }),
                )?;
                t.checks += 1;
            }
        } else if r.is_local(&r.spectra(cap)?) && !r.is_domain() {
            let a = PatchAlgebra::build(&space.presheaf()?)?;
            let s = a.structure_report(cap)?;
            let witness = s.rickart_failure;
            ensure(s.certified() && s.predicates.is_clean && !s.predicates.is_rickart && witness.is_some(), || {
                json!({ "ring": spec.name(), "report": s })
            })?;
            local_non_domains += 1;
            t.notes.push(format!(
                "{}: clean, not Rickart (the annihilator of oracle element {} is not generated by an idempotent)",
                spec.name(),
                witness.unwrap_or_default()
            ));
            t.checks += 1;
        }
    }
    if local_non_domains == 0 {
        t.notes.push("no local non-domain ring in the corpus".into());
    }
    t.notes.push("finite domains are fields, so non-field domains are not exercised".into());
    Ok(())
}

fn fixtures(cfg: &CorpusConfig, _cap: usize, t: &mut Tally) -> Step {
    for fx in &cfg.fixtures {
        let r = build(&fx.ring)?;
        let n = fx.sections.len();
        ensure(n.is_power_of_two(), || json!({ "fixture": fx.name, "error": format!("{n} sections is not a power of two") }))?;
        let sections = fx
            .sections
            .iter()
            .map(|s| r.subring_from_elements(s.iter().copied()))
            .collect::<patchalg::Result<Vec<_>>>()
            .map_err(|e| Failure(json!({ "fixture": fx.name, "statement": "patch presheaf axioms", "error": e.to_string() })))?;
        let p = PatchPresheaf::unvalidated(r, BoolAlg::new(n.trailing_zeros())?, sections)?;
        if let Err(v) = p.validate() {
            return Err(Failure(json!({
                "fixture": fx.name,
                "statement": "patch presheaf axioms: R_0 = R and the intersection law R_e ∩ R_f = R_(e∨f)",
                "violation": v.to_string(),
            })));
        }
        t.checks += 1;
    }
    Ok(())
}
