//! Re-derivation of the pinned corpus records.
//!
//! `corpus-verify` recomputes every stored expectation from scratch — flags,
//! group, both certificates where applicable, zone — and reports divergences
//! by name. An empty divergence list for all seven graphs is the build's
//! ground-truth gate.

use gmeq::corpus::CorpusEntry;
use gmeq::equivalence::{self, Verdict, GENERAL_LP_CAP};
use gmeq::Tolerances;

use crate::analyze::{analyze, AnalysisOptions};
use crate::report::Zone;

/// Zone each corpus graph must land in. Derived facts, pinned here so a
/// taxonomy regression is caught by name.
pub fn expected_zone(name: &str) -> Option<Zone> {
    Some(match name {
        "frucht" | "regular10" => Zone::RegularRed,
        "fig3" => Zone::TheoremGreen,
        "fig4" | "paw" => Zone::Symmetric,
        "fig5_left" | "fig5_right" => Zone::Nonsimple,
        _ => return None,
    })
}

/// Corpus graphs whose support-class scan must contain a finding confirmed
/// by an actual automorphism.
fn expects_confirmed_finding(name: &str) -> bool {
    matches!(name, "fig4" | "paw")
}

/// Recomputes everything `entry.expected` pins and returns the divergences,
/// each naming the property that failed. Empty means the entry verifies.
pub fn verify_entry(entry: &CorpusEntry, tol: &Tolerances) -> Vec<String> {
    let mut divergences = Vec::new();
    let expected = &entry.expected;

    let opts = AnalysisOptions {
        tol: *tol,
        ..AnalysisOptions::default()
    };
    let report = match analyze(&entry.graph, entry.name, &opts) {
        Ok(r) => r,
        Err(e) => return vec![format!("analysis failed: {e}")],
    };
    let c = &report.classification;

    if c.regular_degree != expected.regular {
        divergences.push(format!(
            "regularity: expected {:?}, derived {:?}",
            expected.regular, c.regular_degree
        ));
    }
    if c.simple_spectrum != expected.simple_spectrum {
        divergences.push(format!(
            "simple spectrum: expected {}, derived {}",
            expected.simple_spectrum, c.simple_spectrum
        ));
    }
    if c.k != expected.ortho_count {
        divergences.push(format!(
            "orthogonal count: expected {}, derived {}",
            expected.ortho_count, c.k
        ));
    }
    if let Some(supports) = &expected.ortho_supports {
        if &c.supports_sorted != supports {
            divergences.push(format!(
                "support sizes: expected {supports:?}, derived {:?}",
                c.supports_sorted
            ));
        }
    }

    match report.automorphism.trivial {
        Some(trivial) if trivial != expected.trivial_automorphism_group => {
            divergences.push(format!(
                "trivial group: expected {}, derived {}",
                expected.trivial_automorphism_group, trivial
            ));
        }
        None => divergences.push("automorphism group not computed".to_string()),
        _ => {}
    }

    // The pinned uniqueness verdict is the general LP's; re-derive it
    // directly and also require the fast path to agree whenever it applies.
    if entry.graph.n() <= GENERAL_LP_CAP {
        match equivalence::certify_uniqueness_general(&entry.graph, tol) {
            Ok(cert) => {
                let unique = cert.verdict == Verdict::Unique;
                if unique != expected.certificate_unique {
                    divergences.push(format!(
                        "uniqueness: expected {}, general LP derived {}",
                        expected.certificate_unique, unique
                    ));
                }
                if c.simple_spectrum {
                    match report.certificate.as_ref() {
                        Some(fast) if fast.method == "fast" => {
                            let fast_unique = fast.verdict == "unique";
                            if fast_unique != unique {
                                divergences.push(format!(
                                    "certificate methods disagree: fast {}, general {}",
                                    fast.verdict,
                                    if unique { "unique" } else { "non_unique" }
                                ));
                            }
                        }
                        _ => divergences.push("fast certificate missing".to_string()),
                    }
                }
            }
            Err(e) => divergences.push(format!("general certificate failed: {e}")),
        }
    }

    match expected_zone(entry.name) {
        Some(zone) if report.zone != zone => {
            divergences.push(format!("zone: expected {zone}, derived {}", report.zone));
        }
        None => divergences.push("no pinned zone for this name".to_string()),
        _ => {}
    }

    if expects_confirmed_finding(entry.name) {
        let confirmed = report
            .automorphism
            .findings
            .iter()
            .any(|f| f.matches && f.automorphism_confirmed == Some(true));
        if !confirmed {
            divergences.push("no automorphism-confirmed support finding".to_string());
        }
    }
    if report.automorphism.counterexamples > 0 {
        divergences.push(format!(
            "{} unexpected support counterexamples",
            report.automorphism.counterexamples
        ));
    }

    divergences
}
