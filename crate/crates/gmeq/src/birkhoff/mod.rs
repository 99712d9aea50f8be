//! Doubly-stochastic matrices and the three optimization kernels used by the
//! equivalence machinery: Hungarian assignment (the linear minimization
//! oracle), a dense-tableau simplex solver, and Frank–Wolfe with exact line
//! search for the quadratic matching relaxation.

mod frank_wolfe;
mod hungarian;
mod simplex;

pub use frank_wolfe::{frank_wolfe, matching_gradient, FwOptions, FwOutcome};
pub use hungarian::hungarian;
pub use simplex::{solve_lp, Bounds, LinearProgram, LpOutcome};

use crate::graph::Permutation;
use crate::{Error, Result};
use ndarray::Array2;

/// Entrywise doubly-stochastic check at slack `delta`: entries in
/// [−delta, 1 + delta], every row and column sum within `delta` of 1.
pub fn is_doubly_stochastic(m: &Array2<f64>, delta: f64) -> bool {
    ds_deviation(m) <= delta
}

/// Largest violation of the doubly-stochastic constraints (0 for an exact
/// member of the polytope). Infinite for non-square input.
pub fn ds_deviation(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    if m.ncols() != n {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        let mut col = 0.0;
        for j in 0..n {
            let e = m[[i, j]];
            if !e.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(-e).max(e - 1.0);
            row += e;
            col += m[[j, i]];
        }
        worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
    }
    worst
}

/// A validated member of the Birkhoff polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochasticMatrix {
    q: Array2<f64>,
    delta: f64,
}

impl DoublyStochasticMatrix {
    /// Validates `q` against the doubly-stochastic constraints at slack
    /// `delta` and wraps it.
    pub fn new(q: Array2<f64>, delta: f64) -> Result<DoublyStochasticMatrix> {
        let deviation = ds_deviation(&q);
        if deviation > delta {
            return Err(Error::NotDoublyStochastic { deviation, delta });
        }
        Ok(DoublyStochasticMatrix { q, delta })
    }

    /// The barycenter J = (1/n) 11ᵀ of the Birkhoff polytope. For any
    /// d-regular graph, AJ = JA exactly, which is why regular graphs never
    /// certify unique. The stored slack is the measured deviation: n copies
    /// of 1/n need not sum to exactly 1 in floating point.
    pub fn barycenter(n: usize) -> DoublyStochasticMatrix {
        let q = Array2::from_elem((n, n), 1.0 / n as f64);
        let delta = ds_deviation(&q);
        DoublyStochasticMatrix { q, delta }
    }

    /// Permutation matrices are the vertices of the polytope.
    pub fn from_permutation(p: &Permutation) -> DoublyStochasticMatrix {
        DoublyStochasticMatrix {
            q: p.matrix(),
            delta: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.q
    }

    /// Validation slack this matrix was accepted at.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Nearest-vertex rounding: the permutation maximizing `Σᵢ Q[i][σ(i)]`,
/// computed exactly by Hungarian assignment on −Q.
pub fn round_to_permutation(q: &DoublyStochasticMatrix) -> Permutation {
    let neg = q.matrix().mapv(|x| -x);
    hungarian(&neg).0
}
