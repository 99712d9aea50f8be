//! Serializable analysis reports with a canonical byte representation.
//!
//! Two hard requirements shape this module. Reports must be *byte-identical*
//! across repeated runs and across worker counts, and they must *round-trip*
//! through their serialization without loss. Both are solved at construction
//! time rather than at print time: every floating-point field is quantized to
//! 12 significant digits before it is stored, so the shortest-round-trip
//! decimal emitted by the JSON writer is a stable function of the value, and
//! parsing that decimal returns the exact stored bits. Keys come out sorted
//! because `serde_json`'s map type is a `BTreeMap`.
//!
//! Wall-clock timings are the one field that can never be deterministic, so
//! they live on the report struct but are excluded from serialization; the
//! CLI prints them to stderr instead.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gmeq::graph::Graph;
use gmeq::Tolerances;

/// Identifies the report layout; bump on any breaking field change.
pub const SCHEMA_REPORT: &str = "gmeq.report/v1";
pub const SCHEMA_MATCH: &str = "gmeq.match/v1";
pub const SCHEMA_CERTIFY: &str = "gmeq.certify/v1";

/// Quantizes to 12 significant digits, normalizing `-0.0` to `0.0`.
///
/// Applied to every float that enters a report. The result parses back to
/// the same bits, which is what makes serialized reports lossless.
pub fn q12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("quantized float reparses")
}

/// SHA-256 of the canonical edge-list serialization, lowercase hex.
///
/// The canonical form is what [`Graph::to_edge_list_string`] produces, so two
/// graphs hash equal exactly when they are equal as labeled graphs.
pub fn content_hash(g: &Graph) -> String {
    let mut hasher = Sha256::new();
    hasher.update(g.to_edge_list_string().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Placement of a graph in the equivalence landscape.
///
/// The label is a strict function of the classification flags, the
/// automorphism group, and the certificate:
///
/// - `FRIENDLY`: simple spectrum, no eigenvector orthogonal to **1**.
/// - `THEOREM_GREEN`: simple spectrum and the sorted support condition holds,
///   so equivalence is proven without an LP.
/// - `ZONE2_CANDIDATE`: simple spectrum, the sufficient conditions fail, the
///   graph is not regular and has a trivial automorphism group, and a
///   certificate was computed. The certificate verdict decides whether the
///   graph actually inhabits the zone (unique) or not.
/// - `REGULAR_RED`: regular on more than one vertex; the barycenter commutes
///   with A, so the relaxation is never exact.
/// - `SYMMETRIC`: nontrivial automorphism group; any nonidentity automorphism
///   is a second permutation solution of AQ = QA.
/// - `NONSIMPLE`: repeated eigenvalues; the spectral toolkit does not apply,
///   annotated by k and the group where available.
/// - `UNRESOLVED`: the deciding fact (the automorphism group for n > 20, or
///   a certificate) could not be computed, so none of the labels above can be
///   claimed honestly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Zone {
    Friendly,
    TheoremGreen,
    Zone2Candidate,
    RegularRed,
    Symmetric,
    Nonsimple,
    Unresolved,
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Zone::Friendly => "FRIENDLY",
            Zone::TheoremGreen => "THEOREM_GREEN",
            Zone::Zone2Candidate => "ZONE2_CANDIDATE",
            Zone::RegularRed => "REGULAR_RED",
            Zone::Symmetric => "SYMMETRIC",
            Zone::Nonsimple => "NONSIMPLE",
            Zone::Unresolved => "UNRESOLVED",
        };
        f.write_str(s)
    }
}

/// Where the graph came from and what it hashes to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphIdentity {
    /// Corpus name or file path, exactly as given on the command line.
    pub source: String,
    pub n: usize,
    pub edges: usize,
    pub content_sha256: String,
}

impl GraphIdentity {
    pub fn new(source: &str, g: &Graph) -> GraphIdentity {
        GraphIdentity {
            source: source.to_string(),
            n: g.n(),
            edges: g.edge_count(),
            content_sha256: content_hash(g),
        }
    }
}

/// Spectral flags, mirroring the library classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub regular_degree: Option<usize>,
    pub simple_spectrum: bool,
    pub friendly: bool,
    /// Number of eigenvectors orthogonal to **1**.
    pub k: usize,
    /// Their support sizes, ascending.
    pub supports_sorted: Vec<usize>,
    pub theorem_2k1: bool,
    pub theorem_sorted: bool,
    pub marginal: bool,
    /// Smallest eigenvalue gap relative to the spectral span.
    pub min_gap: f64,
}

/// Scalar summary of a uniqueness certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `"fast"` (eigenbasis LP) or `"general"` (raw commutation LP).
    pub method: String,
    /// `"unique"` or `"non_unique"`.
    pub verdict: String,
    /// Maximum off-diagonal mass over the commutant polytope.
    pub lp_optimum: f64,
    pub marginal: bool,
    /// Largest off-diagonal entry of the witness, when one exists.
    pub witness_max_offdiag: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinPairReport {
    pub s: usize,
    pub t: usize,
    pub lambda: i8,
    /// One of `adjacent_no_loops`, `nonadjacent_no_loops`,
    /// `adjacent_both_loops`, `nonadjacent_both_loops`.
    pub case: String,
}

/// One support class from the eigenvector-support scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingReport {
    pub support: Vec<usize>,
    pub vector_count: usize,
    /// Support size is even and at least twice the number of vectors on it.
    pub matches: bool,
    /// Whether some automorphism moves exactly a subset of the support;
    /// `None` when confirmation was skipped.
    pub automorphism_confirmed: Option<bool>,
    pub support_equals_moved: Option<bool>,
    pub counterexample: bool,
    pub marginal: bool,
}

/// Symmetry side of the analysis. `computed: false` (group enumeration is
/// capped at 20 vertices) leaves the dependent fields `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismReport {
    pub computed: bool,
    pub order: Option<usize>,
    pub truncated: bool,
    pub trivial: Option<bool>,
    pub involution_applicable: Option<bool>,
    pub involution_holds: Option<bool>,
    pub twin_pairs: Vec<TwinPairReport>,
    pub twin_inconsistencies: Vec<String>,
    pub proposition1_vacuous: Option<bool>,
    pub proposition1_holds: Option<bool>,
    pub proposition1_witness_k: Option<usize>,
    pub findings: Vec<FindingReport>,
    pub counterexamples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub eig: f64,
    pub orth: f64,
    pub supp: f64,
    pub cert: f64,
}

impl From<&Tolerances> for ToleranceReport {
    fn from(t: &Tolerances) -> ToleranceReport {
        ToleranceReport {
            eig: q12(t.eig),
            orth: q12(t.orth),
            supp: q12(t.supp),
            cert: q12(t.cert),
        }
    }
}

/// Stage timings in milliseconds. Reported on stderr only; deliberately not
/// serialized so repeated runs stay byte-identical.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timings {
    pub decompose_ms: f64,
    pub certify_ms: f64,
    pub group_ms: f64,
    pub total_ms: f64,
}

impl std::fmt::Display for Timings {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "decompose {:.2} ms, certify {:.2} ms, group {:.2} ms, total {:.2} ms",
            self.decompose_ms, self.certify_ms, self.group_ms, self.total_ms
        )
    }
}

/// Everything `classify` knows about one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub identity: GraphIdentity,
    pub classification: ClassificationReport,
    pub certificate: Option<CertificateReport>,
    /// Explanation when no certificate method applies.
    pub certificate_note: Option<String>,
    pub automorphism: AutomorphismReport,
    pub zone: Zone,
    pub tolerances: ToleranceReport,
    #[serde(skip)]
    pub timings: Timings,
}

/// Canonical JSON: sorted keys, quantized floats, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value prints");
    s.push('\n');
    s
}

impl AnalysisReport {
    pub fn from_json(text: &str) -> Result<AnalysisReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable block, one aspect per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id = &self.identity;
        out.push_str(&format!(
            "graph         : {} (n = {}, {} edges)\n",
            id.source, id.n, id.edges
        ));
        out.push_str(&format!("content sha256: {}\n", id.content_sha256));
        out.push_str(&format!("zone          : {}\n", self.zone));

        let c = &self.classification;
        let spectrum = if c.simple_spectrum { "simple" } else { "repeated" };
        let supports = c
            .supports_sorted
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!(
            "spectrum      : {spectrum}, k = {}, supports [{supports}]\n",
            c.k
        ));
        let mut flags = Vec::new();
        if let Some(d) = c.regular_degree {
            flags.push(format!("{d}-regular"));
        }
        if c.friendly {
            flags.push("friendly".into());
        }
        if c.theorem_2k1 {
            flags.push("2k+1 condition".into());
        }
        if c.theorem_sorted {
            flags.push("sorted condition".into());
        }
        if c.marginal {
            flags.push("MARGINAL".into());
        }
        if !flags.is_empty() {
            out.push_str(&format!("flags         : {}\n", flags.join(", ")));
        }

        match (&self.certificate, &self.certificate_note) {
            (Some(cert), _) => out.push_str(&format!(
                "certificate   : {} — {} (LP optimum {}{})\n",
                cert.method,
                cert.verdict,
                cert.lp_optimum,
                if cert.marginal { ", marginal" } else { "" }
            )),
            (None, Some(note)) => out.push_str(&format!("certificate   : none — {note}\n")),
            (None, None) => out.push_str("certificate   : none\n"),
        }

        let a = &self.automorphism;
        if a.computed {
            let order = a.order.unwrap_or(0);
            let trivial = if a.trivial == Some(true) {
                " (trivial)"
            } else {
                ""
            };
            let truncated = if a.truncated { ", truncated" } else { "" };
            out.push_str(&format!("automorphisms : order {order}{trivial}{truncated}\n"));
            match (a.involution_applicable, a.involution_holds) {
                (Some(true), Some(h)) => out.push_str(&format!(
                    "involutions   : {}\n",
                    if h { "all elements are involutions" } else { "VIOLATED" }
                )),
                (Some(false), _) => {
                    out.push_str("involutions   : not applicable (repeated spectrum)\n")
                }
                _ => {}
            }
            if !a.twin_pairs.is_empty() {
                let pairs = a
                    .twin_pairs
                    .iter()
                    .map(|p| format!("({}, {}) λ = {} [{}]", p.s, p.t, p.lambda, p.case))
                    .collect::<Vec<_>>()
                    .join("; ");
                out.push_str(&format!("twin pairs    : {pairs}\n"));
            }
            if let Some(v) = a.proposition1_vacuous {
                let status = if v {
                    "vacuous (trivial group)".to_string()
                } else {
                    format!(
                        "{}, witness k = {}",
                        if a.proposition1_holds == Some(true) { "holds" } else { "VIOLATED" },
                        a.proposition1_witness_k
                            .map(|k| k.to_string())
                            .unwrap_or_else(|| "-".into())
                    )
                };
                out.push_str(&format!("small support : {status}\n"));
            }
            if !a.findings.is_empty() {
                out.push_str(&format!(
                    "findings      : {} support classes, {} matching, {} counterexamples\n",
                    a.findings.len(),
                    a.findings.iter().filter(|f| f.matches).count(),
                    a.counterexamples
                ));
            }
        } else {
            out.push_str("automorphisms : skipped (n > 20)\n");
        }

        let t = &self.tolerances;
        out.push_str(&format!(
            "tolerances    : eig {:e}, orth {:e}, supp {:e}, cert {:e}\n",
            t.eig, t.orth, t.supp, t.cert
        ));
        out
    }
}
