use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use gmeq::Tolerances;
use gmeq_cli::commands::{
    cmd_certify, cmd_classify, cmd_corpus_verify, cmd_match, cmd_scan_er, Format, Method,
};

const ZONE_HELP: &str = "\
Zone labels (strict function of the computed flags):
  FRIENDLY         simple spectrum, no eigenvector orthogonal to the all-ones
                   vector; relaxation provably exact
  THEOREM_GREEN    simple spectrum and the sorted support condition holds;
                   relaxation provably exact
  ZONE2_CANDIDATE  simple spectrum, sufficient conditions fail, not regular,
                   trivial automorphism group; the certificate verdict decides
                   whether the relaxation is exact anyway
  REGULAR_RED      regular on more than one vertex; relaxation never exact
  SYMMETRIC        nontrivial automorphism group; relaxation not exact
  NONSIMPLE        repeated eigenvalues; spectral conditions do not apply
  UNRESOLVED       a deciding fact (group for n > 20, or a certificate) was
                   out of reach";

#[derive(Parser)]
#[command(
    name = "gmeq",
    version,
    about = "Decides when the doubly-stochastic relaxation of graph matching is exact",
    long_about = "Decides when the doubly-stochastic relaxation of graph matching is exact.\n\
                  Graph arguments accept a pinned corpus name (frucht, regular10, fig3, fig4,\n\
                  fig5_left, fig5_right, paw) or a path to an edge-list file (`n <N>` header\n\
                  line optional, one `u v` pair per line, `#` comments).\n\n\
                  Exit codes: 0 success/affirmative, 1 internal defect, 2 usage or input\n\
                  error, 3 well-formed negative (not matched / not unique / check failed)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative eigenvalue-gap threshold for calling a spectrum simple.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_eig: f64,

    /// Base threshold for eigenvector orthogonality against the all-ones
    /// vector (scaled by sqrt(n)).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_orth: f64,

    /// Entry threshold for eigenvector support counting.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_supp: f64,

    /// LP-optimum threshold separating unique from non-unique.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_cert: f64,

    /// Output format. `csv` applies to scan-er only.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the primary output to a file instead of stdout. Timings,
    /// notices and sweep summaries go to stderr either way.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Eigenbasis LP over the k eigenvectors orthogonal to the all-ones
    /// vector; needs a simple spectrum.
    Fast,
    /// LP on the raw commutation equations AQ = QA; capped at n = 16.
    General,
    /// Run whichever of the two applies and assert they agree.
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Fast => Method::Fast,
            MethodArg::General => Method::General,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify one graph: spectrum, certificate, symmetries, zone.
    #[command(after_long_help = ZONE_HELP)]
    Classify {
        /// Corpus name or edge-list file.
        input: String,
    },

    /// Match two graphs by relaxation and rounding; exit 0 exactly when the
    /// rounded permutation aligns them edge for edge.
    Match {
        /// Corpus name or edge-list file.
        a: String,
        /// Corpus name or edge-list file; must have the same vertex count.
        b: String,
    },

    /// Certify whether the identity is the only doubly-stochastic matrix
    /// commuting with the graph's adjacency matrix.
    Certify {
        /// Corpus name or edge-list file.
        input: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },

    /// Re-derive the pinned records of all seven corpus graphs.
    CorpusVerify,

    /// Sweep seeded Erdős–Rényi graphs and report one record per graph.
    #[command(after_long_help = include_str!("../docs/scan-csv.md"))]
    ScanEr {
        /// Vertex count, a single size ("8") or inclusive range ("2..4").
        #[arg(long, default_value = "8")]
        n: String,

        /// Edge probability.
        #[arg(long, default_value_t = 0.5)]
        p: f64,

        /// Graphs per vertex count.
        #[arg(long, default_value_t = 1000)]
        count: usize,

        /// Base seed; graph i uses seed + i, so records are reproducible
        /// one at a time.
        #[arg(long, default_value_t = 42)]
        seed: u64,

        /// Worker threads. Changes wall time, never output bytes.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let tol = Tolerances {
        eig: cli.tol_eig,
        orth: cli.tol_orth,
        supp: cli.tol_supp,
        cert: cli.tol_cert,
    };
    for (name, value) in [
        ("--tol-eig", tol.eig),
        ("--tol-orth", tol.orth),
        ("--tol-supp", tol.supp),
        ("--tol-cert", tol.cert),
    ] {
        if !value.is_finite() || value <= 0.0 {
            eprintln!("error: {name} must be positive and finite, got {value}");
            std::process::exit(2);
        }
    }
    let format = Format::from(cli.format);
    let out = cli.out;

    let result = match cli.command {
        Command::Classify { input } => cmd_classify(&input, format, &out, &tol),
        Command::Match { a, b } => cmd_match(&a, &b, format, &out, &tol),
        Command::Certify { input, method } => {
            cmd_certify(&input, method.into(), format, &out, &tol)
        }
        Command::CorpusVerify => cmd_corpus_verify(format, &out, &tol),
        Command::ScanEr {
            n,
            p,
            count,
            seed,
            workers,
        } => cmd_scan_er(&n, p, count, seed, workers, format, &out, &tol),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            std::process::exit(failure.code);
        }
    }
}
