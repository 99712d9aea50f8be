//! Seeded Erdős–Rényi sweeps.
//!
//! Each work item is generated and analyzed independently from its own seed
//! (`base_seed + global_index`), so records are a pure function of the
//! parameters: worker count changes wall time, never bytes. Per-graph
//! failures become anomaly rows instead of aborting the sweep, and every
//! certificate-unique `ZONE2_CANDIDATE` graph — a graph the sufficient
//! conditions miss but the LP proves equivalent — is archived as an edge
//! list for later inspection.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use gmeq::graph::Graph;
use gmeq::{Result, Tolerances};

use crate::analyze::{analyze, AnalysisOptions};
use crate::report::{AnalysisReport, Zone};

/// Columns of the sweep CSV, in order. `--help` and `docs/scan-csv.md`
/// document the semantics; tests pin this list against both.
pub const CSV_COLUMNS: [&str; 25] = [
    "index",
    "seed",
    "n",
    "p",
    "simple_spectrum",
    "regular_degree",
    "friendly",
    "k",
    "supports",
    "theorem_2k1",
    "theorem_sorted",
    "zone",
    "certificate_method",
    "certificate_verdict",
    "lp_optimum",
    "group_order",
    "group_truncated",
    "twin_pairs",
    "findings",
    "matching_findings",
    "counterexamples",
    "prop1_holds",
    "involution_holds",
    "anomalies",
    "error",
];

#[derive(Debug, Clone)]
pub struct ScanParams {
    /// Inclusive vertex-count range; `count` graphs are drawn for each n.
    pub n_lo: usize,
    pub n_hi: usize,
    pub p: f64,
    pub count: usize,
    pub seed: u64,
    pub workers: usize,
    pub tol: Tolerances,
    /// Where certificate-unique ZONE2_CANDIDATE graphs are written; `None`
    /// disables archiving.
    pub archive_dir: Option<PathBuf>,
}

/// One row of the sweep CSV. Options mean "stage did not apply".
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub simple_spectrum: bool,
    pub regular_degree: Option<usize>,
    pub friendly: bool,
    pub k: usize,
    pub supports: Vec<usize>,
    pub theorem_2k1: bool,
    pub theorem_sorted: bool,
    pub zone: Zone,
    pub certificate_method: Option<String>,
    pub certificate_verdict: Option<String>,
    pub lp_optimum: Option<f64>,
    pub group_order: Option<usize>,
    pub group_truncated: bool,
    pub twin_pairs: usize,
    pub findings: usize,
    pub matching_findings: usize,
    pub counterexamples: usize,
    pub prop1_holds: Option<bool>,
    pub involution_holds: Option<bool>,
    pub anomalies: Vec<String>,
    pub error: Option<String>,
}

impl SweepRecord {
    fn csv_row(&self) -> [String; 25] {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        let supports = self
            .supports
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("|");
        [
            self.index.to_string(),
            self.seed.to_string(),
            self.n.to_string(),
            self.p.to_string(),
            self.simple_spectrum.to_string(),
            opt(&self.regular_degree),
            self.friendly.to_string(),
            self.k.to_string(),
            supports,
            self.theorem_2k1.to_string(),
            self.theorem_sorted.to_string(),
            self.zone.to_string(),
            opt(&self.certificate_method),
            opt(&self.certificate_verdict),
            opt(&self.lp_optimum),
            opt(&self.group_order),
            self.group_truncated.to_string(),
            self.twin_pairs.to_string(),
            self.findings.to_string(),
            self.matching_findings.to_string(),
            self.counterexamples.to_string(),
            opt(&self.prop1_holds),
            opt(&self.involution_holds),
            self.anomalies.join(";"),
            opt(&self.error),
        ]
    }
}

/// Aggregates reported after a sweep. The four violation counters correspond
/// to facts the library proves or the sweep re-checks; any nonzero value is
/// either a genuine mathematical finding (counterexamples) or a defect.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanSummary {
    pub total: usize,
    pub errors: usize,
    pub by_zone: BTreeMap<String, usize>,
    pub conjecture_counterexamples: usize,
    pub prop1_violations: usize,
    pub involution_violations: usize,
    pub soundness_violations: usize,
    pub twin_inconsistencies: usize,
    pub zone2_unique: usize,
    pub archived: Vec<PathBuf>,
}

impl std::fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "graphs analyzed        : {}", self.total)?;
        let zones = self
            .by_zone
            .iter()
            .map(|(z, c)| format!("{z} {c}"))
            .collect::<Vec<_>>()
            .join(", ");
        writeln!(f, "zones                  : {zones}")?;
        writeln!(f, "support counterexamples: {}", self.conjecture_counterexamples)?;
        writeln!(f, "small-support failures : {}", self.prop1_violations)?;
        writeln!(f, "involution failures    : {}", self.involution_violations)?;
        writeln!(f, "soundness failures     : {}", self.soundness_violations)?;
        writeln!(f, "twin inconsistencies   : {}", self.twin_inconsistencies)?;
        writeln!(f, "zone-2 inhabitants     : {}", self.zone2_unique)?;
        writeln!(f, "per-graph errors       : {}", self.errors)?;
        if !self.archived.is_empty() {
            writeln!(f, "archived               : {} edge lists", self.archived.len())?;
        }
        Ok(())
    }
}

/// Derives a sweep row (and the graph itself when it must be archived) from
/// one analysis.
fn record_from_report(
    index: usize,
    seed: u64,
    p: f64,
    report: &AnalysisReport,
) -> SweepRecord {
    let c = &report.classification;
    let a = &report.automorphism;
    let verdict = report.certificate.as_ref().map(|c| c.verdict.clone());

    let mut anomalies = Vec::new();
    if a.counterexamples > 0 {
        anomalies.push("conjecture_counterexample".to_string());
    }
    if a.proposition1_holds == Some(false) {
        anomalies.push("prop1_violation".to_string());
    }
    if a.involution_holds == Some(false) {
        anomalies.push("involution_violation".to_string());
    }
    if c.theorem_sorted && verdict.as_deref() == Some("non_unique") {
        anomalies.push("soundness_violation".to_string());
    }
    if !a.twin_inconsistencies.is_empty() {
        anomalies.push("twin_inconsistency".to_string());
    }
    if report.zone == Zone::Zone2Candidate && verdict.as_deref() == Some("unique") {
        anomalies.push("zone2_unique".to_string());
    }

    SweepRecord {
        index,
        seed,
        n: report.identity.n,
        p,
        simple_spectrum: c.simple_spectrum,
        regular_degree: c.regular_degree,
        friendly: c.friendly,
        k: c.k,
        supports: c.supports_sorted.clone(),
        theorem_2k1: c.theorem_2k1,
        theorem_sorted: c.theorem_sorted,
        zone: report.zone,
        certificate_method: report.certificate.as_ref().map(|c| c.method.clone()),
        certificate_verdict: verdict,
        lp_optimum: report.certificate.as_ref().map(|c| c.lp_optimum),
        group_order: a.order,
        group_truncated: a.truncated,
        twin_pairs: a.twin_pairs.len(),
        findings: a.findings.len(),
        matching_findings: a.findings.iter().filter(|f| f.matches).count(),
        counterexamples: a.counterexamples,
        prop1_holds: a.proposition1_holds,
        involution_holds: a.involution_holds,
        anomalies,
        error: None,
    }
}

fn error_record(index: usize, seed: u64, n: usize, p: f64, message: String) -> SweepRecord {
    SweepRecord {
        index,
        seed,
        n,
        p,
        simple_spectrum: false,
        regular_degree: None,
        friendly: false,
        k: 0,
        supports: Vec::new(),
        theorem_2k1: false,
        theorem_sorted: false,
        zone: Zone::Unresolved,
        certificate_method: None,
        certificate_verdict: None,
        lp_optimum: None,
        group_order: None,
        group_truncated: false,
        twin_pairs: 0,
        findings: 0,
        matching_findings: 0,
        counterexamples: 0,
        prop1_holds: None,
        involution_holds: None,
        anomalies: vec!["error".to_string()],
        error: Some(message),
    }
}

fn scan_one(
    index: usize,
    n: usize,
    seed: u64,
    p: f64,
    opts: &AnalysisOptions,
) -> (SweepRecord, Option<Graph>) {
    let graph = match Graph::erdos_renyi(n, p, seed) {
        Ok(g) => g,
        Err(e) => return (error_record(index, seed, n, p, e.to_string()), None),
    };
    let source = format!("er:n{n}:seed{seed}");
    match analyze(&graph, &source, opts) {
        Ok(report) => {
            let record = record_from_report(index, seed, p, &report);
            let keep = record.anomalies.iter().any(|a| a == "zone2_unique");
            (record, keep.then_some(graph))
        }
        Err(e) => (error_record(index, seed, n, p, e.to_string()), None),
    }
}

/// Runs the sweep. Records come back in item order regardless of `workers`.
pub fn run_scan(params: &ScanParams) -> Result<(Vec<SweepRecord>, ScanSummary)> {
    let opts = AnalysisOptions {
        tol: params.tol,
        ..AnalysisOptions::default()
    };

    // (global index, n, per-graph seed); the seed schedule depends only on
    // the base seed and the item's position.
    let items: Vec<(usize, usize, u64)> = (params.n_lo..=params.n_hi)
        .flat_map(|n| (0..params.count).map(move |i| (n, i)))
        .enumerate()
        .map(|(index, (n, _))| (index, n, params.seed.wrapping_add(index as u64)))
        .collect();

    let scan = |&(index, n, seed): &(usize, usize, u64)| scan_one(index, n, seed, params.p, &opts);
    let results: Vec<(SweepRecord, Option<Graph>)> = if params.workers == 1 {
        items.iter().map(scan).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.workers)
            .build()
            .map_err(|e| gmeq::Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| items.par_iter().map(scan).collect())
    };

    let mut records = Vec::with_capacity(results.len());
    let mut summary = ScanSummary::default();
    let mut to_archive = Vec::new();
    for (record, graph) in results {
        summary.total += 1;
        *summary.by_zone.entry(record.zone.to_string()).or_insert(0) += 1;
        for anomaly in &record.anomalies {
            match anomaly.as_str() {
                "conjecture_counterexample" => summary.conjecture_counterexamples += 1,
                "prop1_violation" => summary.prop1_violations += 1,
                "involution_violation" => summary.involution_violations += 1,
                "soundness_violation" => summary.soundness_violations += 1,
                "twin_inconsistency" => summary.twin_inconsistencies += 1,
                "zone2_unique" => summary.zone2_unique += 1,
                "error" => summary.errors += 1,
                other => {
                    debug_assert!(false, "unknown anomaly {other}");
                }
            }
        }
        if let Some(g) = graph {
            to_archive.push((record.n, record.seed, g));
        }
        records.push(record);
    }

    if let Some(dir) = &params.archive_dir {
        if !to_archive.is_empty() {
            std::fs::create_dir_all(dir)?;
            for (n, seed, graph) in &to_archive {
                let path = dir.join(format!("n{n}_seed{seed}.edges"));
                graph.write_edge_list(&path)?;
                summary.archived.push(path);
            }
        }
    }

    Ok((records, summary))
}

/// Renders records as CSV with the pinned column set.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_COLUMNS).expect("header writes");
    for record in records {
        writer.write_record(record.csv_row()).expect("row writes");
    }
    let bytes = writer.into_inner().expect("csv buffer");
    String::from_utf8(bytes).expect("csv is utf-8")
}

/// Renders a handful of records as aligned text for terminal use.
pub fn records_to_text(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let verdict = r.certificate_verdict.as_deref().unwrap_or("-");
        let _ = writeln!(
            out,
            "#{:<6} seed {:<12} n {:<3} {} k {:<3} verdict {:<10} zone {}{}",
            r.index,
            r.seed,
            r.n,
            if r.simple_spectrum { "simple  " } else { "repeated" },
            r.k,
            verdict,
            r.zone,
            if r.anomalies.is_empty() {
                String::new()
            } else {
                format!("  [{}]", r.anomalies.join(";"))
            }
        );
    }
    out
}
