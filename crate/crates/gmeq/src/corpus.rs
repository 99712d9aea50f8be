//! The pinned graph collection used as ground truth by tests and the
//! `corpus-verify` command.
//!
//! Each entry carries the properties the rest of the crate is expected to
//! re-derive: regularity, spectrum simplicity, automorphism-group triviality,
//! the number k of eigenvectors orthogonal to **1**, their support sizes, and
//! the uniqueness verdict for the commutant polytope. Support sizes are only
//! recorded where they are basis-independent: inside a repeated eigenspace the
//! computed basis is a solver artifact, so entries with repeated spectra whose
//! ⊥1 vectors fall in degenerate eigenspaces record `None`.

use crate::graph::Graph;
use crate::{Error, Result};

/// Reference facts for one corpus graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedProperties {
    /// `Some(d)` when the graph is d-regular.
    pub regular: Option<usize>,
    pub simple_spectrum: bool,
    pub trivial_automorphism_group: bool,
    /// Number of eigenvectors orthogonal to **1** under default tolerances.
    pub ortho_count: usize,
    /// Their support sizes, ascending; `None` when basis-dependent.
    pub ortho_supports: Option<Vec<usize>>,
    /// Whether the identity is the unique doubly-stochastic solution of
    /// AQ = QA (general-LP verdict).
    pub certificate_unique: bool,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub graph: Graph,
    pub expected: ExpectedProperties,
}

/// Names in presentation order.
pub const CORPUS_NAMES: [&str; 7] = [
    "frucht",
    "regular10",
    "fig3",
    "fig4",
    "fig5_left",
    "fig5_right",
    "paw",
];

/// Looks up a corpus graph by name.
pub fn corpus(name: &str) -> Result<CorpusEntry> {
    let (n, edges, expected): (usize, &[(usize, usize)], ExpectedProperties) = match name {
        // The smallest cubic graph with trivial automorphism group: regular,
        // simple spectrum, asymmetric — yet the relaxation is never exact for
        // regular graphs (the barycenter commutes with A).
        "frucht" => (
            12,
            &[
                (0, 11),
                (0, 1),
                (0, 2),
                (1, 2),
                (1, 6),
                (6, 7),
                (5, 6),
                (5, 7),
                (7, 9),
                (9, 10),
                (8, 9),
                (8, 10),
                (10, 11),
                (2, 3),
                (3, 4),
                (4, 5),
                (4, 8),
                (3, 11),
            ],
            ExpectedProperties {
                regular: Some(3),
                simple_spectrum: true,
                trivial_automorphism_group: true,
                ortho_count: 11,
                ortho_supports: Some(vec![8, 9, 9, 9, 11, 12, 12, 12, 12, 12, 12]),
                certificate_unique: false,
            },
        ),
        // 4-regular, asymmetric, repeated eigenvalues (two exact zeros). All
        // nine non-Perron eigenvectors are ⊥1 because the graph is connected
        // and regular, but their supports inside the degenerate eigenspace
        // depend on the eigensolver's basis choice.
        "regular10" => (
            10,
            &[
                (0, 3),
                (3, 4),
                (4, 2),
                (2, 8),
                (8, 1),
                (1, 7),
                (7, 9),
                (9, 6),
                (6, 5),
                (5, 0),
                (0, 4),
                (4, 7),
                (7, 6),
                (6, 2),
                (2, 5),
                (5, 1),
                (1, 9),
                (9, 3),
                (3, 8),
                (8, 0),
            ],
            ExpectedProperties {
                regular: Some(4),
                simple_spectrum: false,
                trivial_automorphism_group: true,
                ortho_count: 9,
                ortho_supports: None,
                certificate_unique: false,
            },
        ),
        // Simple spectrum, one ⊥1 eigenvector with support 4 ≥ 3: the
        // sufficient conditions hold and the relaxation is provably exact.
        "fig3" => (
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 1),
                (1, 4),
                (4, 6),
                (6, 3),
                (6, 1),
            ],
            ExpectedProperties {
                regular: None,
                simple_spectrum: true,
                trivial_automorphism_group: true,
                ortho_count: 1,
                ortho_supports: Some(vec![4]),
                certificate_unique: true,
            },
        ),
        // Simple spectrum with two ⊥1 eigenvectors sharing a 4-vertex support
        // (entries ±1/2 at eigenvalues ∓1): the localized-support pattern that
        // accompanies its order-2 automorphism (a double transposition).
        "fig4" => (
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 0),
                (0, 6),
                (6, 7),
                (5, 6),
                (6, 1),
                (3, 6),
            ],
            ExpectedProperties {
                regular: None,
                simple_spectrum: true,
                trivial_automorphism_group: false,
                ortho_count: 2,
                ortho_supports: Some(vec![4, 4]),
                certificate_unique: false,
            },
        ),
        // Repeated eigenvalues (double zero), trivial group. Its single
        // robust ⊥1 eigenvector sits at the simple eigenvalue 1 with support
        // 7. The certificate is still unique: outside theorem scope,
        // equivalence holds anyway.
        "fig5_left" => (
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 1),
                (4, 7),
            ],
            ExpectedProperties {
                regular: None,
                simple_spectrum: false,
                trivial_automorphism_group: true,
                ortho_count: 1,
                ortho_supports: Some(vec![7]),
                certificate_unique: true,
            },
        ),
        // Repeated eigenvalues (double zero), trivial group, and no computed
        // eigenvector orthogonal to 1; also certifies unique.
        "fig5_right" => (
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (1, 7),
                (7, 3),
                (3, 5),
                (5, 6),
                (5, 7),
            ],
            ExpectedProperties {
                regular: None,
                simple_spectrum: false,
                trivial_automorphism_group: true,
                ortho_count: 0,
                ortho_supports: Some(vec![]),
                certificate_unique: true,
            },
        ),
        // Triangle with a pendant: adjacent twins {0,1}, eigenvalue exactly −1
        // with eigenvector (e₀ − e₁)/√2, and the transposition (0 1) is an
        // automorphism.
        "paw" => (
            4,
            &[(0, 1), (0, 2), (1, 2), (2, 3)],
            ExpectedProperties {
                regular: None,
                simple_spectrum: true,
                trivial_automorphism_group: false,
                ortho_count: 1,
                ortho_supports: Some(vec![2]),
                certificate_unique: false,
            },
        ),
        other => return Err(Error::UnknownCorpusName(other.to_string())),
    };
    Ok(CorpusEntry {
        name: CORPUS_NAMES
            .iter()
            .find(|&&n| n == name)
            .expect("name matched above"),
        graph: Graph::from_edge_list(n, edges)?,
        expected,
    })
}

/// All corpus entries in presentation order.
pub fn all() -> Vec<CorpusEntry> {
    CORPUS_NAMES
        .iter()
        .map(|name| corpus(name).expect("pinned corpus entries are valid"))
        .collect()
}
