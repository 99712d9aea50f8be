//! Single-graph analysis pipeline: decompose, classify, certify, enumerate
//! symmetries, scan eigenvector supports, and place the graph in a zone.

use std::time::Instant;

use gmeq::automorphism::{
    self, AutomorphismGroup, TwinCase, DEFAULT_GROUP_CAP, GROUP_VERTEX_CAP,
};
use gmeq::equivalence::{self, CertMethod, UniquenessCertificate, Verdict, GENERAL_LP_CAP};
use gmeq::graph::Graph;
use gmeq::spectral::{self, SpectralClassification};
use gmeq::{Result, Tolerances};

use crate::report::{
    q12, AnalysisReport, AutomorphismReport, CertificateReport, ClassificationReport,
    FindingReport, GraphIdentity, Timings, ToleranceReport, TwinPairReport, Zone, SCHEMA_REPORT,
};

/// Knobs for [`analyze`]; `Default` matches the CLI defaults.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub tol: Tolerances,
    /// Enumeration cap on group elements; the group is reported truncated
    /// beyond it.
    pub group_cap: usize,
    /// Confirm support-class findings against the actual group (skipped
    /// automatically when the group is out of reach).
    pub confirm_findings: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tol: Tolerances::default(),
            group_cap: DEFAULT_GROUP_CAP,
            confirm_findings: true,
        }
    }
}

/// Assigns the zone label from the computed facts.
///
/// Precedence: regularity first (it decides non-equivalence outright, even
/// when the spectrum is also degenerate), then spectrum shape, then the
/// sufficient conditions, then the group. `group: None` means enumeration was
/// skipped, which leaves the symmetric-versus-candidate question unresolvable.
pub fn assign_zone(
    c: &SpectralClassification,
    group: Option<&AutomorphismGroup>,
    certificate_computed: bool,
) -> Zone {
    if c.regular.is_some() && c.n > 1 {
        Zone::RegularRed
    } else if !c.simple_spectrum {
        Zone::Nonsimple
    } else if c.k == 0 {
        Zone::Friendly
    } else if c.theorem_sorted {
        Zone::TheoremGreen
    } else {
        match group {
            None => Zone::Unresolved,
            Some(g) if !g.trivial() => Zone::Symmetric,
            Some(_) if certificate_computed => Zone::Zone2Candidate,
            Some(_) => Zone::Unresolved,
        }
    }
}

/// Scalar summary of a library certificate, floats quantized for reports.
pub fn certificate_report(cert: &UniquenessCertificate) -> CertificateReport {
    let witness_max_offdiag = cert.witness.as_ref().map(|w| {
        let n = w.nrows();
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    max = max.max(w[[i, j]]);
                }
            }
        }
        q12(max)
    });
    CertificateReport {
        method: match cert.method {
            CertMethod::FastPath => "fast".into(),
            CertMethod::GeneralLp => "general".into(),
        },
        verdict: match cert.verdict {
            Verdict::Unique => "unique".into(),
            Verdict::NonUnique => "non_unique".into(),
        },
        lp_optimum: q12(cert.lp_optimum),
        marginal: cert.marginal,
        witness_max_offdiag,
    }
}

fn twin_case_label(case: TwinCase) -> &'static str {
    match case {
        TwinCase::AdjacentNoLoops => "adjacent_no_loops",
        TwinCase::NonadjacentNoLoops => "nonadjacent_no_loops",
        TwinCase::AdjacentBothLoops => "adjacent_both_loops",
        TwinCase::NonadjacentBothLoops => "nonadjacent_both_loops",
    }
}

/// Runs the full pipeline on one graph.
///
/// Never fails on *mathematical* grounds — inapplicable stages are recorded
/// as absent with a note. Errors surface only for genuine defects (failed
/// eigensolve, internal LP trouble).
pub fn analyze(g: &Graph, source: &str, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let total_start = Instant::now();
    let tol = &opts.tol;
    let n = g.n();
    let a = g.to_dense();

    let t = Instant::now();
    let dec = spectral::eigendecompose(&a)?;
    let profile = spectral::support_profile(&dec, tol);
    let classification = spectral::classify_decomposed(g, &dec, &profile, tol);
    let decompose_ms = t.elapsed().as_secs_f64() * 1e3;

    // Certificate: eigenbasis LP whenever the spectrum is simple, raw
    // commutation LP for small degenerate graphs, otherwise nothing applies.
    let t = Instant::now();
    let (certificate, certificate_note) = if classification.simple_spectrum {
        let cert = equivalence::certify_uniqueness_fast(&a, &dec, &profile, tol)?;
        (Some(cert), None)
    } else if n <= GENERAL_LP_CAP {
        let cert = equivalence::certify_uniqueness_general(g, tol)?;
        (Some(cert), None)
    } else {
        (
            None,
            Some(format!(
                "spectrum has repeated eigenvalues and n = {n} exceeds the \
                 general-LP cap of {GENERAL_LP_CAP}"
            )),
        )
    };
    let certify_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let group = if n <= GROUP_VERTEX_CAP {
        Some(automorphism::automorphism_group(g, opts.group_cap)?)
    } else {
        None
    };

    let involution = match (&group, classification.simple_spectrum) {
        (Some(grp), _) => Some(automorphism::verify_involution_lemma(grp, &dec, tol)),
        _ => None,
    };

    let twins = if classification.simple_spectrum {
        Some(automorphism::detect_twin_pairs(g, &dec, tol)?)
    } else {
        None
    };

    let proposition1 = match (&group, classification.simple_spectrum) {
        (Some(grp), true) => Some(automorphism::verify_proposition1(&profile, grp)),
        _ => None,
    };

    let findings = if classification.simple_spectrum {
        let confirm = opts.confirm_findings && group.is_some();
        automorphism::conjecture_scan(g, &dec, &profile, tol, confirm)?
    } else {
        Vec::new()
    };
    let group_ms = t.elapsed().as_secs_f64() * 1e3;

    let zone = assign_zone(&classification, group.as_ref(), certificate.is_some());

    let finding_reports: Vec<FindingReport> = findings
        .iter()
        .map(|f| FindingReport {
            support: f.support.clone(),
            vector_count: f.vectors.len(),
            matches: f.matches,
            automorphism_confirmed: f.automorphism_confirmed,
            support_equals_moved: f.support_equals_moved,
            counterexample: f.counterexample,
            marginal: f.marginal,
        })
        .collect();
    let counterexamples = finding_reports.iter().filter(|f| f.counterexample).count();

    let automorphism = AutomorphismReport {
        computed: group.is_some(),
        order: group.as_ref().map(|g| g.order()),
        truncated: group.as_ref().map(|g| g.truncated).unwrap_or(false),
        trivial: group.as_ref().map(|g| g.trivial()),
        involution_applicable: involution.as_ref().map(|r| r.applicable),
        involution_holds: involution.as_ref().map(|r| r.holds),
        twin_pairs: twins
            .as_ref()
            .map(|scan| {
                scan.pairs
                    .iter()
                    .map(|p| TwinPairReport {
                        s: p.s,
                        t: p.t,
                        lambda: p.lambda,
                        case: twin_case_label(p.case).into(),
                    })
                    .collect()
            })
            .unwrap_or_default(),
        twin_inconsistencies: twins.map(|scan| scan.inconsistencies).unwrap_or_default(),
        proposition1_vacuous: proposition1.as_ref().map(|r| r.vacuous),
        proposition1_holds: proposition1.as_ref().map(|r| r.holds),
        proposition1_witness_k: proposition1.as_ref().and_then(|r| r.witness_k),
        findings: finding_reports,
        counterexamples,
    };

    Ok(AnalysisReport {
        schema: SCHEMA_REPORT.into(),
        identity: GraphIdentity::new(source, g),
        classification: ClassificationReport {
            regular_degree: classification.regular,
            simple_spectrum: classification.simple_spectrum,
            friendly: classification.friendly,
            k: classification.k,
            supports_sorted: classification.supports_sorted.clone(),
            theorem_2k1: classification.theorem_2k1,
            theorem_sorted: classification.theorem_sorted,
            marginal: classification.marginal,
            min_gap: q12(dec.min_gap()),
        },
        certificate: certificate.as_ref().map(certificate_report),
        certificate_note,
        automorphism,
        zone,
        tolerances: ToleranceReport::from(tol),
        timings: Timings {
            decompose_ms,
            certify_ms,
            group_ms,
            total_ms: total_start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gmeq::corpus;

    fn report(name: &str) -> AnalysisReport {
        let entry = corpus::corpus(name).unwrap();
        analyze(&entry.graph, name, &AnalysisOptions::default()).unwrap()
    }

    #[test]
    fn corpus_zones_match_the_taxonomy() {
        for (name, zone) in [
            ("frucht", Zone::RegularRed),
            ("regular10", Zone::RegularRed),
            ("fig3", Zone::TheoremGreen),
            ("fig4", Zone::Symmetric),
            ("fig5_left", Zone::Nonsimple),
            ("fig5_right", Zone::Nonsimple),
            ("paw", Zone::Symmetric),
        ] {
            assert_eq!(report(name).zone, zone, "zone of {name}");
        }
    }

    #[test]
    fn fig3_report_is_fully_populated() {
        let r = report("fig3");
        assert!(r.classification.simple_spectrum);
        assert_eq!(r.classification.k, 1);
        assert_eq!(r.classification.supports_sorted, vec![4]);
        let cert = r.certificate.as_ref().unwrap();
        assert_eq!(cert.method, "fast");
        assert_eq!(cert.verdict, "unique");
        assert!(cert.lp_optimum.abs() <= 1e-7);
        assert_eq!(r.automorphism.order, Some(1));
        assert_eq!(r.automorphism.trivial, Some(true));
        assert_eq!(r.automorphism.involution_holds, Some(true));
        assert!(r.automorphism.twin_pairs.is_empty());
        assert_eq!(r.automorphism.counterexamples, 0);
        assert_eq!(r.certificate_note, None);
    }

    #[test]
    fn fig4_finding_is_confirmed_by_the_group() {
        let r = report("fig4");
        assert_eq!(r.automorphism.order, Some(2));
        let confirmed: Vec<_> = r
            .automorphism
            .findings
            .iter()
            .filter(|f| f.matches && f.automorphism_confirmed == Some(true))
            .collect();
        assert_eq!(confirmed.len(), 1);
        assert_eq!(confirmed[0].support, vec![1, 2, 4, 5]);
        assert_eq!(r.automorphism.counterexamples, 0);
    }

    #[test]
    fn nonsimple_graph_gets_general_certificate_and_no_spectral_scans() {
        let r = report("fig5_right");
        assert!(!r.classification.simple_spectrum);
        let cert = r.certificate.as_ref().unwrap();
        assert_eq!(cert.method, "general");
        assert_eq!(cert.verdict, "unique");
        assert!(r.automorphism.findings.is_empty());
        assert!(r.automorphism.twin_pairs.is_empty());
        assert_eq!(r.automorphism.involution_applicable, Some(false));
        assert_eq!(r.automorphism.proposition1_holds, None);
    }

    #[test]
    fn paw_twin_pair_appears_in_the_report() {
        let r = report("paw");
        assert_eq!(r.automorphism.twin_pairs.len(), 1);
        let p = &r.automorphism.twin_pairs[0];
        assert_eq!((p.s, p.t, p.lambda), (0, 1, -1));
        assert_eq!(p.case, "adjacent_no_loops");
        assert!(r.automorphism.twin_inconsistencies.is_empty());
    }

    #[test]
    fn zone_function_is_total_over_flag_combinations() {
        // A 21-vertex simple-spectrum graph failing both conditions has no
        // group available: UNRESOLVED, not a guess.
        let c = SpectralClassification {
            n: 21,
            regular: None,
            simple_spectrum: true,
            friendly: false,
            k: 3,
            supports_sorted: vec![2, 2, 2],
            theorem_2k1: false,
            theorem_sorted: false,
            marginal: false,
            tolerances: Tolerances::default(),
        };
        assert_eq!(assign_zone(&c, None, true), Zone::Unresolved);

        // Regularity wins over a degenerate spectrum.
        let c4 = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let r = analyze(&c4, "c4", &AnalysisOptions::default()).unwrap();
        assert!(!r.classification.simple_spectrum);
        assert_eq!(r.zone, Zone::RegularRed);

        // Single vertex: 0-regular but n = 1, friendly.
        let k1 = Graph::from_edge_list(1, &[]).unwrap();
        let r = analyze(&k1, "k1", &AnalysisOptions::default()).unwrap();
        assert_eq!(r.zone, Zone::Friendly);
    }

    #[test]
    fn reports_round_trip_through_canonical_json() {
        for name in ["fig3", "fig4", "fig5_right", "frucht", "paw"] {
            let mut original = report(name);
            let json = crate::report::to_canonical_json(&original);
            let parsed = AnalysisReport::from_json(&json).unwrap();
            // Timings are stderr-only diagnostics, excluded from the bytes.
            original.timings = Timings::default();
            assert_eq!(parsed, original, "round-trip of {name}");
            assert_eq!(crate::report::to_canonical_json(&parsed), json);
        }
    }

    #[test]
    fn repeated_analysis_is_byte_identical() {
        let entry = corpus::corpus("fig4").unwrap();
        let opts = AnalysisOptions::default();
        let a = analyze(&entry.graph, "fig4", &opts).unwrap();
        let b = analyze(&entry.graph, "fig4", &opts).unwrap();
        assert_eq!(
            crate::report::to_canonical_json(&a),
            crate::report::to_canonical_json(&b)
        );
    }

    #[test]
    fn text_rendering_names_the_zone_and_certificate() {
        let text = report("fig3").to_text();
        assert!(text.contains("THEOREM_GREEN"));
        assert!(text.contains("fast — unique"));
        assert!(text.contains("sorted condition"));
    }
}
