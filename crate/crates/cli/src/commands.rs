//! The `ring`, `space`, `presheaf` and `algebra` commands.

use std::time::Instant;

use patchalg::finring::{FiniteRing, Subring};
use patchalg::patchalg::PatchAlgebra;
use patchalg::presheaf::{Distinguished, PatchPresheaf};
use patchalg::topo::SubringSpace;
use serde_json::{json, Value};

use crate::dot;
use crate::error::CliResult;
use crate::report::{Certificate, Report};
use crate::spec::{resolve_presheaf, resolve_selection, Input, Selection};

/// Rings up to this size have their tables and elements written out.
const LISTING_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub cap: usize,
    pub seed: u64,
}

/// A report and, for commands that draw one, a DOT diagram.
#[derive(Clone, Debug)]
pub struct Output {
    pub report: Report,
    pub dot: Option<String>,
}

fn finish(command: &str, input: &Input, start: Instant, certificates: Vec<Certificate>, data: Value, dot: String) -> CliResult<Output> {
    let report = Report {
        command: command.into(),
        inputs: serde_json::to_value(input)?,
        certificates,
        data,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    Ok(Output { report, dot: Some(dot) })
}

fn subring_label(ring: &FiniteRing, s: &Subring) -> String {
    let parts: Vec<String> = s.elements().map(|x| ring.label(x)).collect();
    format!("{{{}}}", parts.join(","))
}

fn elements(s: &Subring) -> Vec<usize> {
    s.elements().collect()
}

fn space_dot(space: &SubringSpace) -> String {
    let labels: Vec<String> = space.members().iter().map(|s| subring_label(space.ring(), s)).collect();
    dot::hasse(&labels, &space.hasse_edges())
}

fn sigma(input: &Input, opts: Options) -> CliResult<SubringSpace> {
    Ok(SubringSpace::enumerate(input.build_ring()?, opts.cap)?)
}

pub fn cmd_ring(input: &Input, opts: Options) -> CliResult<Output> {
    let start = Instant::now();
    let space = sigma(input, opts)?;
    let r = space.ring().clone();
    let spectra = r.spectra(opts.cap)?;
    let predicates = r.predicates(opts.cap)?;
    let idem = r.idempotent_algebra()?;
    let pierce = r.pierce()?;
    let list = |it: &mut dyn Iterator<Item = &patchalg::finring::RingIdeal>| -> Vec<Vec<usize>> { it.map(|i| i.elements().collect()).collect() };
    let mut data = json!({
        "name": input.ring.name(),
        "size": r.size(),
        "characteristic": r.characteristic(),
        "units": r.units().count_ones(..),
        "idempotents": r.idempotents(),
        "primitive_idempotents": idem.atoms(),
        "ideals": spectra.ideals.len(),
        "prime_ideals": list(&mut spectra.prime_ideals()),
        "maximal_ideals": list(&mut spectra.maximal_ideals()),
        "minimal_primes": list(&mut spectra.minimal_primes()),
        "predicates": predicates,
        "subrings": space.members().iter().map(elements).collect::<Vec<_>>(),
        "pierce_stalk_sizes": pierce.stalks.iter().map(|(s, _)| s.size()).collect::<Vec<_>>(),
    });
    if r.size() <= LISTING_LIMIT {
        data["labels"] = json!(r.elements().map(|x| r.label(x)).collect::<Vec<_>>());
        data["add"] = json!(r.add_table());
        data["mul"] = json!(r.mul_table());
    }
    let closure_identity = space.patch_closure(space.clop_algebra().top())? == space.clop_algebra().top();
    let certificates = vec![
        Certificate::new("ring-axioms", "the tables define a commutative unital ring with 1 ≠ 0", true, json!({"size": r.size()})),
        Certificate::new(
            "idempotent-boolean-algebra",
            "Id(R) is a Boolean algebra under e+f−ef and ef",
            true,
            json!({"atoms": idem.atoms()}),
        ),
        Certificate::new(
            "subring-space-patch-closed",
            "Σ(R) is closed in the patch topology",
            closure_identity,
            json!({"subrings": space.len()}),
        ),
    ];
    finish("ring", input, start, certificates, data, space_dot(&space))
}

pub fn cmd_space(input: &Input, selection: &Selection, opts: Options) -> CliResult<Output> {
    let start = Instant::now();
    let sigma = sigma(input, opts)?;
    let x = resolve_selection(&sigma, selection)?;
    let mask = x
        .members()
        .iter()
        .map(|s| sigma.index_of(s).expect("selection resolved inside Σ(R)"))
        .fold(0u64, |acc, i| acc | 1 << i);
    let y = sigma.clop_algebra().element(mask)?;
    let patch = sigma.is_patch_space(y)?;
    let spectral = sigma.is_spectral_subspace(y)?;
    let zariski: Vec<u64> = (0..x.len()).map(|i| x.minimal_zariski_neighborhood(i).map(|e| e.bits())).collect::<patchalg::Result<_>>()?;
    let data = json!({
        "members": x.members().iter().map(elements).collect::<Vec<_>>(),
        "sizes": x.members().iter().map(Subring::len).collect::<Vec<_>>(),
        "hasse_edges": x.hasse_edges(),
        "minimal_zariski_neighborhoods": zariski,
        "mask_in_sigma": mask,
    });
    let certificates = vec![
        Certificate::new("patch-closed", "X equals its patch closure in Σ(R)", patch.closed, json!({"mask": mask})),
        Certificate::new("spectral-subspace", "X with the Zariski topology is a spectral space", spectral, json!({"mask": mask})),
    ];
    finish("space", input, start, certificates, data, space_dot(&x))
}

fn presheaf_certificates(p: &PatchPresheaf) -> CliResult<(Vec<Certificate>, Value)> {
    let alg = p.algebra();
    let orth = p.validate_orthogonal().is_ok();
    let mut recovered = true;
    for e in alg.elements()? {
        recovered &= p.recover_section(e).is_ok();
    }
    let stalks = p.all_stalks()?;
    let distinguished = match p.distinguished()? {
        Distinguished::Yes { e_t } => json!({"distinguished": true, "e_t": e_t}),
        Distinguished::NoLargestIndex { t } => json!({"distinguished": false, "no_largest_index_for": t}),
        Distinguished::NotSeparating { a, b } => json!({"distinguished": false, "not_separated": [a, b]}),
    };
    let data = json!({
        "atoms": alg.atom_count(),
        "sections": p.sections().iter().map(elements).collect::<Vec<_>>(),
        "stalks": stalks.iter().map(elements).collect::<Vec<_>>(),
        "stalk_space": p.stalk_space()?.members().iter().map(elements).collect::<Vec<_>>(),
        "distinguished": distinguished,
    });
    let certificates = vec![
        Certificate::new("presheaf-axioms", "R_0 = R and R_e ∩ R_f = R_(e∨f) for all e, f", true, json!({"sections": p.sections().len()})),
        Certificate::new("orthogonal-validation", "the intersection law on orthogonal pairs agrees with full validation", orth, Value::Null),
        Certificate::new("section-recovery", "R_e is the intersection of the stalks at maximal ideals not containing e", recovered, Value::Null),
    ];
    Ok((certificates, data))
}

pub fn cmd_presheaf(input: &Input, selection: &Selection, opts: Options) -> CliResult<Output> {
    let start = Instant::now();
    let sigma = sigma(input, opts)?;
    let p = resolve_presheaf(input, &sigma, selection)?;
    let (certificates, data) = presheaf_certificates(&p)?;
    finish("presheaf", input, start, certificates, data, space_dot(&p.stalk_space()?))
}

pub fn cmd_algebra(input: &Input, selection: &Selection, opts: Options) -> CliResult<Output> {
    let start = Instant::now();
    let sigma = sigma(input, opts)?;
    let p = resolve_presheaf(input, &sigma, selection)?;
    let a = PatchAlgebra::build_with_cap(&p, opts.cap)?;
    let alg = a.algebra();
    let unique = a.check_unique_forms()?;
    let mut colon_ok = true;
    for e in alg.elements()? {
        colon_ok &= a.colon(e).is_ok();
    }
    let mut kernels = Vec::new();
    for m in alg.maximal_ideals()? {
        kernels.push(a.psi(&m)?.kernel.len());
    }
    let pierce = a.pierce_report()?;
    let structure = match a.structure_report(opts.cap) {
        Ok(s) => Some(s),
        Err(patchalg::Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let structure_cert = structure.as_ref().map(|s| (s.certified(), json!(s.failures)));
    let o = a.oracle();
    let spectra = o.spectra(opts.cap)?;
    let primes: Vec<_> = spectra.prime_ideals().collect();
    let labels: Vec<String> = primes.iter().map(|p| format!("prime of size {}", p.len())).collect();
    let edges = dot::covering_pairs(primes.len(), |i, j| primes[i].is_subset(primes[j]));
    let mut data = json!({
        "size": a.size(),
        "atom_ring_sizes": (0..alg.atom_count() as usize).map(|i| a.atom_ring(i).0.size()).collect::<Vec<_>>(),
        "kernel_sizes": kernels,
        "pierce": pierce,
        "structure": structure,
    });
    if a.size() <= LISTING_LIMIT {
        data["elements"] = json!(a.elements().iter().map(|x| x.display(a.ring())).collect::<Vec<_>>());
    }
    let mut certificates = vec![
        Certificate::new(
            "evaluation-isomorphism",
            "reading off atom coefficients is a ring isomorphism onto the product of the atom sections",
            true,
            json!({"size": a.size()}),
        ),
        Certificate::new("unique-full-orthogonal-form", "every element has exactly one full orthogonal decomposition with distinct coefficients", true, json!({"decompositions": unique})),
        Certificate::new("colon-recovers-sections", "(A :_R e) = R_e for every e", colon_ok, Value::Null),
        Certificate::new("psi-kernel", "each ψ_m is a surjective homomorphism onto the stalk with kernel 𝔪A", true, json!({"kernel_sizes": data["kernel_sizes"]})),
        Certificate::new("pierce-spectrum", "the Pierce spectrum of A matches Y and its stalks are the fibers", pierce.certified(), json!({"failures": pierce.failures})),
    ];
    if let Some((passed, failures)) = structure_cert {
        certificates.push(Certificate::new(
            "structure",
            "Rickart, semihereditary, minimal-prime, clean and Gelfand structure under their hypotheses",
            passed,
            failures,
        ));
    }
    finish("algebra", input, start, certificates, data, dot::hasse(&labels, &edges))
}
