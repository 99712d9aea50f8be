//! When does the doubly-stochastic relaxation of graph matching solve the
//! combinatorial problem exactly?
//!
//! Matching two isomorphic graphs means minimizing `‖AP − PB‖_F²` over
//! permutation matrices. Relaxing the feasible set to the Birkhoff polytope
//! (doubly-stochastic matrices) turns this into a convex program, and after a
//! change of variables the two problems agree exactly when the identity is the
//! only doubly-stochastic solution of `AQ = QA`. This crate decides that
//! question constructively and explores the spectral structure behind it:
//!
//! - [`graph`]: adjacency-matrix graphs, permutations, edge-list I/O, seeded
//!   Erdős–Rényi generation.
//! - [`spectral`]: a cyclic Jacobi eigensolver and the classification flags
//!   (simple spectrum, eigenvectors orthogonal to **1**, support sizes) that
//!   the sufficient conditions are built from.
//! - [`birkhoff`]: doubly-stochastic machinery plus the three solvers used
//!   throughout — Hungarian assignment, a dense-tableau simplex, and
//!   Frank–Wolfe with exact line search.
//! - [`equivalence`]: uniqueness certificates over the commutant polytope
//!   `{Q doubly stochastic : AQ = QA}`, an exact branch-and-bound matcher, and
//!   the relax-and-round pipeline.
//! - [`automorphism`]: group enumeration by backtracking, twin-pair detection,
//!   and the eigenvector-support statistics that connect symmetry to localized
//!   eigenvectors.
//! - [`corpus`]: the small pinned graph collection used as ground truth in
//!   tests and by `corpus-verify`.
//!
//! # Quick start
//!
//! ```
//! use gmeq::{corpus, spectral, equivalence, Tolerances};
//!
//! let entry = corpus::corpus("fig3").unwrap();
//! let tol = Tolerances::default();
//! let a = entry.graph.to_dense();
//! let dec = spectral::eigendecompose(&a).unwrap();
//! let profile = spectral::support_profile(&dec, &tol);
//! let cert = equivalence::certify_uniqueness_fast(&a, &dec, &profile, &tol).unwrap();
//! assert_eq!(cert.verdict, equivalence::Verdict::Unique);
//! ```

pub mod automorphism;
pub mod birkhoff;
pub mod corpus;
pub mod equivalence;
mod error;
pub mod graph;
pub mod spectral;

pub use error::{Error, Result};

/// Numerical thresholds used across classification and certification.
///
/// Defaults follow one rationale: adjacency matrices are integer, so genuine
/// zeros (eigenvalue gaps of repeated roots, entries of exactly-zero
/// eigenvector coordinates, inner products with **1**) land at machine noise
/// around 1e−15, while genuinely nonzero quantities for small graphs stay many
/// orders of magnitude above. The thresholds sit in the gap between those two
/// populations, and anything within a factor of 100 of a threshold is flagged
/// marginal rather than silently classified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative eigenvalue-gap threshold: consecutive eigenvalues closer than
    /// `eig × max(1, λ_max − λ_min)` count as repeated.
    pub eig: f64,
    /// Base threshold for `|uᵢᵀ1|`; the effective cutoff scales with matrix
    /// size as `orth × √n` since `‖1‖ = √n`.
    pub orth: f64,
    /// Entry threshold for ℓ0 support counting of eigenvectors.
    pub supp: f64,
    /// Uniqueness-certificate threshold: an LP optimum at or below this is a
    /// `unique` verdict, above it `non_unique`.
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-8,
            orth: 1e-8,
            supp: 1e-8,
            cert: 1e-7,
        }
    }
}

impl Tolerances {
    /// Effective orthogonality threshold for an n-vertex graph.
    pub fn orth_scaled(&self, n: usize) -> f64 {
        self.orth * (n as f64).sqrt()
    }

    /// True when `value` lies within a factor of 100 of `threshold` on either
    /// side; used to flag classifications that a small tolerance change could
    /// flip.
    pub fn is_marginal(value: f64, threshold: f64) -> bool {
        let v = value.abs();
        v >= threshold / 100.0 && v <= threshold * 100.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_are_positive_and_ordered() {
        let t = Tolerances::default();
        assert!(t.eig > 0.0 && t.orth > 0.0 && t.supp > 0.0 && t.cert > 0.0);
        // The certificate threshold is the loosest: LP optima accumulate more
        // arithmetic than single spectral quantities.
        assert!(t.cert > t.eig);
        assert_eq!(t.orth_scaled(4), 2.0 * t.orth);
    }

    #[test]
    fn marginal_band_is_two_sided() {
        assert!(Tolerances::is_marginal(1e-8, 1e-8));
        assert!(Tolerances::is_marginal(9e-7, 1e-8));
        assert!(Tolerances::is_marginal(2e-10, 1e-8));
        assert!(!Tolerances::is_marginal(1e-5, 1e-8));
        assert!(!Tolerances::is_marginal(1e-12, 1e-8));
    }
}
