//! Graphs as symmetric 0/1 adjacency matrices, vertex permutations, the
//! plain-text edge-list format, and seeded Erdős–Rényi generation.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! - A permutation `σ` acts on a graph by `B[i][j] = A[σ(i)][σ(j)]`, i.e.
//!   `B = PAPᵀ` for the matrix `P` with `P[i][σ(i)] = 1`.
//! - Loops are allowed (diagonal entries) and count once toward the degree.
//! - The edge-list file format is line-oriented ASCII: a header `n m`
//!   followed by `m` lines `u v` with 0-based endpoints; the writer emits
//!   edges with `u ≤ v` in lexicographic order, so serialization is canonical.

use crate::{Error, Result};
use ndarray::Array2;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

/// An undirected graph on `n` vertices, possibly with loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Array2<u8>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Endpoints are 0-based;
    /// `(u, v)` and `(v, u)` denote the same edge and repeating either is an
    /// error. `(u, u)` is a loop.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = Array2::zeros((n, n));
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { u, v, n });
            }
            if adj[[u, v]] != 0 {
                return Err(Error::DuplicateEdge { u, v });
            }
            adj[[u, v]] = 1;
            adj[[v, u]] = 1;
        }
        Ok(Graph { adj })
    }

    /// Wraps an existing adjacency matrix, validating squareness, symmetry,
    /// and 0/1 entries.
    pub fn from_adjacency(adj: Array2<u8>) -> Result<Graph> {
        let n = adj.nrows();
        if adj.ncols() != n {
            return Err(Error::InvalidAdjacency(format!(
                "{}x{} is not square",
                adj.nrows(),
                adj.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if adj[[i, j]] > 1 {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry ({i}, {j}) = {} is not 0/1",
                        adj[[i, j]]
                    )));
                }
                if adj[[i, j]] != adj[[j, i]] {
                    return Err(Error::InvalidAdjacency(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(Graph { adj })
    }

    /// Samples G(n, p): each of the n(n−1)/2 possible edges is included
    /// independently with probability `p`. No loops are generated.
    ///
    /// Determinism contract: the generator is ChaCha8 keyed by `seed`, pairs
    /// are visited in lexicographic order `(0,1), (0,2), …`, and each decision
    /// compares the top 53 bits of one `next_u64` draw against
    /// `⌊p · 2⁵³⌋`. The stream is therefore reproducible across platforms and
    /// library versions.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidProbability(p));
        }
        let threshold = (p * (1u64 << 53) as f64) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj = Array2::zeros((n, n));
        for u in 0..n {
            for v in (u + 1)..n {
                if (rng.next_u64() >> 11) < threshold {
                    adj[[u, v]] = 1;
                    adj[[v, u]] = 1;
                }
            }
        }
        Ok(Graph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.nrows()
    }

    pub fn adjacency(&self) -> &Array2<u8> {
        &self.adj
    }

    /// The adjacency matrix as f64, for numerical work.
    pub fn to_dense(&self) -> Array2<f64> {
        self.adj.mapv(|x| x as f64)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[[u, v]] != 0
    }

    /// Number of undirected edges, counting each loop once.
    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Edges with `u ≤ v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u..n {
                if self.adj[[u, v]] != 0 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Row sum of vertex `v`; a loop contributes 1.
    pub fn degree(&self, v: usize) -> usize {
        (0..self.n()).map(|j| self.adj[[v, j]] as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    /// `Some(d)` when every vertex has degree `d`. A single vertex and the
    /// empty graph are 0-regular.
    pub fn is_regular(&self) -> Option<usize> {
        let degs = self.degrees();
        match degs.first() {
            None => Some(0),
            Some(&d) if degs.iter().all(|&x| x == d) => Some(d),
            _ => None,
        }
    }

    /// Relabels the graph: `B[i][j] = A[σ(i)][σ(j)]`, i.e. `B = PAPᵀ` under
    /// the crate's matrix convention `P[i][σ(i)] = 1`.
    pub fn apply_permutation(&self, sigma: &Permutation) -> Result<Graph> {
        let n = self.n();
        if sigma.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: sigma.n(),
            });
        }
        let mut adj = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                adj[[i, j]] = self.adj[[sigma.image(i), sigma.image(j)]];
            }
        }
        Ok(Graph { adj })
    }

    /// Canonical edge-list serialization (`n m` header, then `u v` lines with
    /// `u ≤ v`, lexicographic, LF line endings).
    pub fn to_edge_list_string(&self) -> String {
        let edges = self.edges();
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n(), edges.len());
        for (u, v) in edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses the edge-list format. Rejects malformed headers, non-integer or
    /// out-of-range endpoints, duplicate edges, and line counts that do not
    /// match the header, naming the offending 1-based line.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input; expected header \"n m\"".into(),
        })?;
        let (n, m) = parse_pair(header, 1, "header")?;
        let mut edges = Vec::with_capacity(m);
        let mut seen = 1usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                // Tolerate trailing blank lines only.
                if edges.len() == m {
                    continue;
                }
                return Err(Error::Parse {
                    line: lineno,
                    message: "blank line inside edge list".into(),
                });
            }
            if edges.len() == m {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unexpected extra line; header declared {m} edges"),
                });
            }
            let (u, v) = parse_pair(line, lineno, "edge")?;
            edges.push((u, v));
            seen = lineno;
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: seen,
                message: format!("header declared {m} edges but found {}", edges.len()),
            });
        }
        Graph::from_edge_list(n, &edges).map_err(|e| match e {
            Error::EdgeOutOfRange { u, v, n } => Error::Parse {
                line: 0,
                message: format!("edge ({u}, {v}) out of range for {n} vertices"),
            },
            Error::DuplicateEdge { u, v } => Error::Parse {
                line: 0,
                message: format!("duplicate edge ({u}, {v})"),
            },
            other => other,
        })
    }

    pub fn read_edge_list(path: &Path) -> Result<Graph> {
        let text = std::fs::read_to_string(path)?;
        Graph::parse_edge_list(&text)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }
}

fn parse_pair(line: &str, lineno: usize, what: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next();
    let b = it.next();
    let rest = it.next();
    match (a, b, rest) {
        (Some(a), Some(b), None) => {
            let a = a.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{what}: {a:?} is not a nonnegative integer"),
            })?;
            let b = b.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{what}: {b:?} is not a nonnegative integer"),
            })?;
            Ok((a, b))
        }
        _ => Err(Error::Parse {
            line: lineno,
            message: format!("{what}: expected exactly two integers, got {line:?}"),
        }),
    }
}

/// A permutation σ of {0, …, n−1}, stored as the image vector `map[i] = σ(i)`.
///
/// Its matrix is `P[i][σ(i)] = 1`; this is the convention used for
/// `B = PAPᵀ` everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Validates that `map` is a bijection on {0, …, n−1}.
    pub fn from_map(map: Vec<usize>) -> Result<Permutation> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range for n = {n}"
                )));
            }
            if seen[x] {
                return Err(Error::InvalidPermutation(format!("image {x} repeated")));
            }
            seen[x] = true;
        }
        Ok(Permutation { map })
    }

    /// The transposition (s t) on n points.
    pub fn transposition(n: usize, s: usize, t: usize) -> Result<Permutation> {
        if s >= n || t >= n {
            return Err(Error::InvalidPermutation(format!(
                "transposition ({s} {t}) out of range for n = {n}"
            )));
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(s, t);
        Ok(Permutation { map })
    }

    /// Uniform-ish random permutation by Fisher–Yates over the given RNG;
    /// intended for experiments and tests (modulo bias is negligible and the
    /// result is deterministic for a fixed RNG state).
    pub fn random(n: usize, rng: &mut impl RngCore) -> Permutation {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            map.swap(i, j);
        }
        Permutation { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { map: inv }
    }

    /// Composition (self ∘ inner): applies `inner` first, so
    /// `(self ∘ inner)(i) = self(inner(i))`. Under the graph action this
    /// satisfies `apply(apply(G, a), b) = apply(G, a ∘ b)`.
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation> {
        if self.n() != inner.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                actual: inner.n(),
            });
        }
        Ok(Permutation {
            map: inner.map.iter().map(|&i| self.map[i]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| self.map[x] == i)
    }

    /// Vertices moved by the permutation, ascending.
    pub fn moved(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i != x)
            .map(|(i, _)| i)
            .collect()
    }

    /// The matrix `P` with `P[i][σ(i)] = 1`.
    pub fn matrix(&self) -> Array2<f64> {
        let n = self.n();
        let mut p = Array2::zeros((n, n));
        for (i, &x) in self.map.iter().enumerate() {
            p[[i, x]] = 1.0;
        }
        p
    }
}
