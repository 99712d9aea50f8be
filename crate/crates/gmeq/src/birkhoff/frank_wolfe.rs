//! Frank–Wolfe (conditional gradient) minimization of `‖AQ − QB‖_F²` over
//! the Birkhoff polytope.
//!
//! The objective is convex quadratic, the linear minimization oracle is a
//! Hungarian assignment on the gradient, and the step size comes from exact
//! line search, so every iterate stays inside the polytope by construction.
//! When the minimizer is a vertex that the oracle proposes, the line search
//! returns exactly γ = 1 and the method lands on it in finitely many steps;
//! that is the behavior the matching pipeline relies on.

use super::{ds_deviation, hungarian, DoublyStochasticMatrix};
use crate::{Error, Result};
use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwOptions {
    /// Convergence threshold on the Frank–Wolfe gap, scaled by
    /// `max(1, ‖A‖_F · ‖B‖_F)`. The gap upper-bounds the suboptimality
    /// `f(Q) − f*`, so this is a certified stopping rule.
    pub tol: f64,
    /// Hard cap on update steps; exceeding it reports `converged: false`.
    pub max_iter: usize,
}

impl Default for FwOptions {
    fn default() -> Self {
        FwOptions {
            tol: 1e-9,
            max_iter: 50_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwOutcome {
    /// Final iterate, doubly stochastic up to floating-point drift.
    pub q: Array2<f64>,
    /// `‖AQ − QB‖_F²` at the final iterate.
    pub objective: f64,
    /// Frank–Wolfe gap at the final iterate.
    pub gap: f64,
    /// Number of update steps taken.
    pub iterations: usize,
    pub converged: bool,
}

fn frob(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gradient of `Q ↦ ‖AQ − QB‖_F²`: with `R = AQ − QB`, this is
/// `2(AᵀR − RBᵀ)`. The solver inlines the same expression to reuse `R`;
/// this entry point exists so the formula can be checked independently.
pub fn matching_gradient(a: &Array2<f64>, b: &Array2<f64>, q: &Array2<f64>) -> Array2<f64> {
    let r = a.dot(q) - q.dot(b);
    2.0 * (a.t().dot(&r) - r.dot(&b.t()))
}

/// Minimizes `‖AQ − QB‖_F²` over doubly-stochastic `Q` starting from `start`.
///
/// `a` and `b` must be square, equally sized, and finite; symmetry is not
/// required. Matching two isomorphic graphs drives the objective to zero, and
/// rounding the solution recovers the isomorphism whenever the identity is
/// the unique doubly-stochastic matrix commuting with `a`.
pub fn frank_wolfe(
    a: &Array2<f64>,
    b: &Array2<f64>,
    start: &DoublyStochasticMatrix,
    options: &FwOptions,
) -> Result<FwOutcome> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: if a.ncols() != n { a.ncols() } else { b.nrows() },
        });
    }
    if start.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: start.n(),
        });
    }
    if !a.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let scale = 1.0f64.max(frob(a) * frob(b));
    let gap_tol = options.tol * scale;
    let mut q = start.matrix().clone();
    let mut prev_objective = f64::INFINITY;

    for iterations in 0..=options.max_iter {
        let r = a.dot(&q) - q.dot(b);
        let objective: f64 = r.iter().map(|x| x * x).sum();
        if !objective.is_finite() {
            return Err(Error::NonFinite);
        }
        debug_assert!(
            objective <= prev_objective + 1e-9 * scale * scale,
            "objective must not increase: {objective} after {prev_objective}"
        );
        debug_assert!(ds_deviation(&q) <= 1e-9, "iterate left the polytope");
        prev_objective = objective;

        let grad = 2.0 * (a.t().dot(&r) - r.dot(&b.t()));
        let vertex = hungarian(&grad).0.matrix();
        let gap = (&grad * &(&q - &vertex)).sum();

        if gap <= gap_tol || iterations == options.max_iter {
            return Ok(FwOutcome {
                q,
                objective,
                gap,
                iterations,
                converged: gap <= gap_tol,
            });
        }

        let d = &vertex - &q;
        let e = a.dot(&d) - d.dot(b);
        let linear = (&r * &e).sum();
        let quad: f64 = e.iter().map(|x| x * x).sum();
        let gamma = if quad > f64::MIN_POSITIVE {
            (-linear / quad).clamp(0.0, 1.0)
        } else if linear < 0.0 {
            // The objective is exactly linear along this direction; walk to
            // the proposed vertex.
            1.0
        } else {
            // A positive gap promised descent but the quadratic slice is
            // flat and non-decreasing; floating-point has run out.
            return Ok(FwOutcome {
                q,
                objective,
                gap,
                iterations,
                converged: false,
            });
        };
        if gamma == 0.0 {
            return Ok(FwOutcome {
                q,
                objective,
                gap,
                iterations,
                converged: false,
            });
        }
        q = &q + &(gamma * &d);
    }
    unreachable!("loop returns at or before max_iter");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::round_to_permutation;
    use crate::corpus::corpus;
    use crate::graph::Permutation;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn recovers_a_planted_relabeling() {
        let a = corpus("fig3").unwrap().graph;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sigma = Permutation::random(a.n(), &mut rng);
        let b = a.apply_permutation(&sigma).unwrap();

        let start = DoublyStochasticMatrix::barycenter(a.n());
        let out = frank_wolfe(
            &a.to_dense(),
            &b.to_dense(),
            &start,
            &FwOptions::default(),
        )
        .unwrap();
        assert!(out.converged, "gap {} after {}", out.gap, out.iterations);
        assert!(out.objective < 1e-12, "objective {}", out.objective);

        let ds = DoublyStochasticMatrix::new(out.q, 1e-7).unwrap();
        let rounded = round_to_permutation(&ds);
        // The optimal vertex is the matrix of σ⁻¹ (AP = PB with B = PσAPσᵀ).
        assert_eq!(rounded, sigma.inverse());
        assert_eq!(a.apply_permutation(&rounded.inverse()).unwrap(), b);
    }

    #[test]
    fn a_matching_vertex_start_is_already_optimal() {
        let a = corpus("fig3").unwrap().graph.to_dense();
        let start = DoublyStochasticMatrix::from_permutation(&Permutation::identity(7));
        let out = frank_wolfe(&a, &a, &start, &FwOptions::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.objective, 0.0);
    }

    #[test]
    fn barycenter_is_optimal_for_regular_self_matching() {
        // AJ = JA for regular graphs, so the relaxation is solved by the
        // barycenter itself: zero objective without any permutation content.
        let c4 = crate::graph::Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])
            .unwrap()
            .to_dense();
        let start = DoublyStochasticMatrix::barycenter(4);
        let out = frank_wolfe(&c4, &c4, &start, &FwOptions::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert!(out.objective < 1e-28);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let a = crate::graph::Graph::erdos_renyi(5, 0.6, 11).unwrap().to_dense();
        let b = crate::graph::Graph::erdos_renyi(5, 0.6, 12).unwrap().to_dense();
        let p = Permutation::from_map(vec![2, 0, 4, 1, 3]).unwrap().matrix();
        let q = 0.5 * &DoublyStochasticMatrix::barycenter(5).into_inner() + 0.5 * &p;

        let f = |m: &Array2<f64>| {
            let r = a.dot(m) - m.dot(&b);
            r.iter().map(|x| x * x).sum::<f64>()
        };
        let grad = matching_gradient(&a, &b, &q);
        let h = 1e-6;
        for (i, j) in [(0, 0), (1, 3), (4, 2), (2, 2), (3, 1)] {
            let mut plus = q.clone();
            let mut minus = q.clone();
            plus[[i, j]] += h;
            minus[[i, j]] -= h;
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            assert!(
                (fd - grad[[i, j]]).abs() <= 1e-5 * (1.0 + fd.abs()),
                "({i}, {j}): finite difference {fd} vs gradient {}",
                grad[[i, j]]
            );
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let a = corpus("fig3").unwrap().graph;
        let b = a
            .apply_permutation(&Permutation::transposition(7, 0, 3).unwrap())
            .unwrap();
        let start = DoublyStochasticMatrix::barycenter(7);
        let opts = FwOptions {
            max_iter: 0,
            ..FwOptions::default()
        };
        let out = frank_wolfe(&a.to_dense(), &b.to_dense(), &start, &opts).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 0);
        assert!(out.gap > 0.0);
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        let a = Array2::<f64>::zeros((3, 3));
        let b = Array2::<f64>::zeros((4, 4));
        let start = DoublyStochasticMatrix::barycenter(3);
        assert!(matches!(
            frank_wolfe(&a, &b, &start, &FwOptions::default()),
            Err(Error::SizeMismatch { .. })
        ));
        let nan = Array2::from_elem((3, 3), f64::NAN);
        assert!(matches!(
            frank_wolfe(&nan, &a, &start, &FwOptions::default()),
            Err(Error::NonFinite)
        ));
    }
}
