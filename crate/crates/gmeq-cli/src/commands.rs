//! The five CLI operations, as library functions returning exit codes.
//!
//! Exit-code contract, shared by all commands:
//! `0` success / affirmative, `1` internal defect (a fact the build
//! guarantees failed to hold), `2` usage or input error, `3` well-formed
//! negative answer (graphs do not match, certificate is non-unique,
//! semantic check failed).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use gmeq::corpus::{self, CORPUS_NAMES};
use gmeq::equivalence::{self, MatchConfig, GENERAL_LP_CAP};
use gmeq::graph::Graph;
use gmeq::spectral;
use gmeq::Tolerances;

use crate::analyze::{analyze, certificate_report, AnalysisOptions};
use crate::corpus_check::verify_entry;
use crate::report::{
    q12, to_canonical_json, CertificateReport, GraphIdentity, SCHEMA_CERTIFY, SCHEMA_MATCH,
};
use crate::sweep::{records_to_csv, records_to_text, run_scan, ScanParams};
use crate::Failure;

/// Output format selector shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Which uniqueness LP `certify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fast,
    General,
    Both,
}

/// Resolves a command-line graph argument: a pinned corpus name first, a
/// path to an edge-list file otherwise.
pub fn resolve_graph(input: &str) -> Result<Graph, Failure> {
    if CORPUS_NAMES.contains(&input) {
        return Ok(corpus::corpus(input)?.graph);
    }
    let path = Path::new(input);
    if !path.exists() {
        return Err(Failure::usage(format!(
            "{input:?} is neither a corpus name ({}) nor an existing file",
            CORPUS_NAMES.join(", ")
        )));
    }
    Ok(Graph::read_edge_list(path)?)
}

/// Writes `content` to `--out` or stdout.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// `classify`: one graph in, one analysis report out. Exit 0 unless the
/// pipeline itself fails.
pub fn cmd_classify(
    input: &str,
    format: Format,
    out: &Option<PathBuf>,
    tol: &Tolerances,
) -> Result<i32, Failure> {
    let graph = resolve_graph(input)?;
    let opts = AnalysisOptions {
        tol: *tol,
        ..AnalysisOptions::default()
    };
    if graph.n() > gmeq::automorphism::GROUP_VERTEX_CAP {
        eprintln!(
            "notice: n = {} exceeds the automorphism cap of {}; group-dependent checks skipped",
            graph.n(),
            gmeq::automorphism::GROUP_VERTEX_CAP
        );
    }
    let report = analyze(&graph, input, &opts)?;
    let rendered = match format {
        Format::Text => report.to_text(),
        Format::Json => to_canonical_json(&report),
        Format::Csv => {
            return Err(Failure::usage(
                "csv output applies to scan-er only; use --format text or json".into(),
            ))
        }
    };
    emit(out, &rendered)?;
    eprintln!("timings: {}", report.timings);
    Ok(0)
}

/// Serialized result of one matching run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOutput {
    pub schema: String,
    pub a: GraphIdentity,
    pub b: GraphIdentity,
    /// Aligning map: vertex i of A corresponds to `rounded_map[i]` of B.
    pub rounded_map: Vec<usize>,
    /// Edge disagreements under the rounded map; 0 is a recovered isomorphism.
    pub rounded_objective: u64,
    /// Branch-and-bound optimum when the instance was small enough.
    pub exact_objective: Option<u64>,
    pub relaxed_objective: f64,
    pub relaxed_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub certificate: CertificateReport,
    pub equivalent: bool,
    pub notes: Vec<String>,
}

fn match_text(m: &MatchOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "A             : {} (n = {})", m.a.source, m.a.n);
    let _ = writeln!(s, "B             : {} (n = {})", m.b.source, m.b.n);
    let _ = writeln!(
        s,
        "relaxation    : objective {} (gap {}, {} iterations{})",
        m.relaxed_objective,
        m.relaxed_gap,
        m.iterations,
        if m.converged { "" } else { ", NOT converged" }
    );
    let map = m
        .rounded_map
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(s, "rounded map   : [{map}]");
    let _ = writeln!(s, "disagreements : {}", m.rounded_objective);
    if let Some(exact) = m.exact_objective {
        let _ = writeln!(s, "exact optimum : {exact}");
    }
    let _ = writeln!(
        s,
        "certificate   : {} — {} (LP optimum {})",
        m.certificate.method, m.certificate.verdict, m.certificate.lp_optimum
    );
    for note in &m.notes {
        let _ = writeln!(s, "note          : {note}");
    }
    s
}

/// `match`: relax, round, certify. Exit 0 when the rounded permutation
/// aligns the graphs exactly, 3 otherwise, 2 on size mismatch.
pub fn cmd_match(
    a_input: &str,
    b_input: &str,
    format: Format,
    out: &Option<PathBuf>,
    tol: &Tolerances,
) -> Result<i32, Failure> {
    let a = resolve_graph(a_input)?;
    let b = resolve_graph(b_input)?;
    if a.n() != b.n() {
        return Err(Failure::usage(format!(
            "size mismatch: {} has {} vertices, {} has {}",
            a_input,
            a.n(),
            b_input,
            b.n()
        )));
    }
    let config = MatchConfig {
        tolerances: *tol,
        ..MatchConfig::default()
    };
    let started = Instant::now();
    let report = equivalence::relax_and_round(&a, &b, &config)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    let output = MatchOutput {
        schema: SCHEMA_MATCH.into(),
        a: GraphIdentity::new(a_input, &a),
        b: GraphIdentity::new(b_input, &b),
        rounded_map: report.rounded.as_slice().to_vec(),
        rounded_objective: report.rounded_objective,
        exact_objective: report.exact.as_ref().map(|(_, obj)| *obj),
        relaxed_objective: q12(report.relaxed.objective),
        relaxed_gap: q12(report.relaxed.gap),
        iterations: report.relaxed.iterations,
        converged: report.relaxed.converged,
        certificate: certificate_report(&report.certificate),
        equivalent: report.equivalent,
        notes: report.notes.clone(),
    };
    let rendered = match format {
        Format::Text => match_text(&output),
        Format::Json => to_canonical_json(&output),
        Format::Csv => {
            return Err(Failure::usage(
                "csv output applies to scan-er only; use --format text or json".into(),
            ))
        }
    };
    emit(out, &rendered)?;
    eprintln!("timings: match total {elapsed_ms:.2} ms");
    Ok(if output.rounded_objective == 0 { 0 } else { 3 })
}

/// Serialized result of `certify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub schema: String,
    pub identity: GraphIdentity,
    pub fast: Option<CertificateReport>,
    pub general: Option<CertificateReport>,
    /// Populated when both methods ran: verdicts equal and optima within
    /// 1e-6 of each other.
    pub agree: Option<bool>,
    pub notes: Vec<String>,
}

fn certify_text(c: &CertifyOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph         : {} (n = {})", c.identity.source, c.identity.n);
    for (label, cert) in [("fast", &c.fast), ("general", &c.general)] {
        if let Some(cert) = cert {
            let _ = writeln!(
                s,
                "{label:<14}: {} (LP optimum {}{})",
                cert.verdict,
                cert.lp_optimum,
                if cert.marginal { ", marginal" } else { "" }
            );
        }
    }
    if let Some(agree) = c.agree {
        let _ = writeln!(s, "agreement     : {}", if agree { "yes" } else { "NO" });
    }
    for note in &c.notes {
        let _ = writeln!(s, "note          : {note}");
    }
    s
}

/// `certify`: run the requested uniqueness LP(s). Exit 0 on a unique
/// verdict, 3 on non-unique, 2 when the requested method does not apply,
/// 1 if the two methods contradict each other.
pub fn cmd_certify(
    input: &str,
    method: Method,
    format: Format,
    out: &Option<PathBuf>,
    tol: &Tolerances,
) -> Result<i32, Failure> {
    let graph = resolve_graph(input)?;
    let n = graph.n();
    let a = graph.to_dense();
    let started = Instant::now();
    let dec = spectral::eigendecompose(&a)?;
    let profile = spectral::support_profile(&dec, tol);
    let simple = spectral::has_simple_spectrum(&dec, tol);

    let mut notes = Vec::new();
    let want_fast = matches!(method, Method::Fast | Method::Both);
    let want_general = matches!(method, Method::General | Method::Both);

    let fast = if want_fast && simple {
        Some(equivalence::certify_uniqueness_fast(&a, &dec, &profile, tol)?)
    } else if want_fast {
        let explanation = format!(
            "the eigenbasis certificate needs a simple spectrum, but the smallest eigenvalue \
             gap is {:.3e} of the spectral span; use --method general",
            dec.min_gap()
        );
        if method == Method::Fast {
            return Err(Failure::usage(explanation));
        }
        notes.push(format!("fast method skipped: {explanation}"));
        None
    } else {
        None
    };

    let general = if want_general && n <= GENERAL_LP_CAP {
        Some(equivalence::certify_uniqueness_general(&graph, tol)?)
    } else if want_general {
        let explanation = format!(
            "the general LP solves n² = {} variables and is capped at n = {GENERAL_LP_CAP}",
            n * n
        );
        if method == Method::General {
            return Err(Failure::usage(explanation));
        }
        notes.push(format!("general method skipped: {explanation}"));
        None
    } else {
        None
    };

    if fast.is_none() && general.is_none() {
        return Err(Failure::usage(
            "no certificate method applies: spectrum is repeated and the graph exceeds the \
             general-LP cap"
                .into(),
        ));
    }

    let agree = match (&fast, &general) {
        (Some(f), Some(g)) => {
            Some(f.verdict == g.verdict && (f.lp_optimum - g.lp_optimum).abs() <= 1e-6)
        }
        _ => None,
    };
    let output = CertifyOutput {
        schema: SCHEMA_CERTIFY.into(),
        identity: GraphIdentity::new(input, &graph),
        fast: fast.as_ref().map(certificate_report),
        general: general.as_ref().map(certificate_report),
        agree,
        notes,
    };
    let rendered = match format {
        Format::Text => certify_text(&output),
        Format::Json => to_canonical_json(&output),
        Format::Csv => {
            return Err(Failure::usage(
                "csv output applies to scan-er only; use --format text or json".into(),
            ))
        }
    };
    emit(out, &rendered)?;
    eprintln!(
        "timings: certify total {:.2} ms",
        started.elapsed().as_secs_f64() * 1e3
    );

    if agree == Some(false) {
        return Err(Failure::internal(format!(
            "certificate methods disagree on {input}: fast {:?} vs general {:?}",
            output.fast.as_ref().map(|c| &c.verdict),
            output.general.as_ref().map(|c| &c.verdict),
        )));
    }
    let verdict = output
        .general
        .as_ref()
        .or(output.fast.as_ref())
        .map(|c| c.verdict.clone())
        .expect("at least one certificate ran");
    Ok(if verdict == "unique" { 0 } else { 3 })
}

/// `corpus-verify`: re-derive every pinned record. Exit 0 on 7/7, 1 on any
/// divergence (pinned ground truth failing is a defect, not a negative).
pub fn cmd_corpus_verify(
    format: Format,
    out: &Option<PathBuf>,
    tol: &Tolerances,
) -> Result<i32, Failure> {
    let started = Instant::now();
    let entries = corpus::all();
    let mut lines = String::new();
    let mut results = Vec::new();
    let mut passed = 0usize;
    for entry in &entries {
        let divergences = verify_entry(entry, tol);
        let pass = divergences.is_empty();
        if pass {
            passed += 1;
            let _ = writeln!(lines, "{:<12} PASS", entry.name);
        } else {
            let _ = writeln!(lines, "{:<12} FAIL — {}", entry.name, divergences.join("; "));
        }
        results.push(serde_json::json!({
            "name": entry.name,
            "pass": pass,
            "divergences": divergences,
        }));
    }
    let all = passed == entries.len();
    let _ = writeln!(lines, "{passed}/{} PASS", entries.len());

    let rendered = match format {
        Format::Text => lines,
        Format::Json => to_canonical_json(&serde_json::json!({
            "schema": "gmeq.corpus-verify/v1",
            "results": results,
            "passed": passed,
            "total": entries.len(),
            "pass": all,
        })),
        Format::Csv => {
            return Err(Failure::usage(
                "csv output applies to scan-er only; use --format text or json".into(),
            ))
        }
    };
    emit(out, &rendered)?;
    eprintln!(
        "timings: corpus-verify total {:.2} ms",
        started.elapsed().as_secs_f64() * 1e3
    );
    Ok(if all { 0 } else { 1 })
}

/// Parses the `--n` argument of `scan-er`: a single size (`"8"`) or an
/// inclusive range (`"2..4"`).
pub fn parse_n_range(spec: &str) -> Result<(usize, usize), Failure> {
    let parse_bound = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Failure::usage(format!("invalid vertex count {s:?} in --n {spec:?}")))
    };
    let (lo, hi) = match spec.split_once("..") {
        Some((lo, hi)) => (parse_bound(lo)?, parse_bound(hi)?),
        None => {
            let n = parse_bound(spec)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(Failure::usage(format!(
            "--n {spec:?} must be a positive size or inclusive range LO..HI with LO <= HI"
        )));
    }
    Ok((lo, hi))
}

/// `scan-er`: seeded sweep over Erdős–Rényi graphs. Exit 0 when the sweep
/// completes; anomalies are rows and summary counts, never aborts.
#[allow(clippy::too_many_arguments)]
pub fn cmd_scan_er(
    n_spec: &str,
    p: f64,
    count: usize,
    seed: u64,
    workers: usize,
    format: Format,
    out: &Option<PathBuf>,
    tol: &Tolerances,
) -> Result<i32, Failure> {
    let (n_lo, n_hi) = parse_n_range(n_spec)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Failure::usage(format!("--p {p} outside [0, 1]")));
    }
    if count == 0 {
        return Err(Failure::usage("--count must be positive".into()));
    }
    if workers == 0 {
        return Err(Failure::usage("--workers must be positive".into()));
    }

    // Zone-2 hits always get archived: next to --out when given, under
    // ./zone2-hits otherwise.
    let archive_dir = match out {
        Some(path) => Some(path.with_extension("zone2")),
        None => Some(PathBuf::from("zone2-hits")),
    };
    let params = ScanParams {
        n_lo,
        n_hi,
        p,
        count,
        seed,
        workers,
        tol: *tol,
        archive_dir,
    };
    let started = Instant::now();
    let (records, summary) = run_scan(&params)?;
    let rendered = match format {
        Format::Csv => records_to_csv(&records),
        Format::Text => records_to_text(&records),
        Format::Json => {
            return Err(Failure::usage(
                "scan-er emits --format csv (full records) or text (abridged)".into(),
            ))
        }
    };
    emit(out, &rendered)?;
    eprint!("{summary}");
    eprintln!(
        "timings: scan-er total {:.2} ms ({} workers)",
        started.elapsed().as_secs_f64() * 1e3,
        workers
    );
    Ok(0)
}
