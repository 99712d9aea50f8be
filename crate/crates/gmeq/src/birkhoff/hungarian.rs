//! Hungarian algorithm (shortest augmenting paths with potentials), O(n³).
//!
//! Exact optimality up to floating-point arithmetic on the cost entries; used
//! both as the linear minimization oracle inside Frank–Wolfe and for rounding
//! doubly-stochastic matrices to their nearest permutation vertex.

use crate::graph::Permutation;
use ndarray::Array2;

/// Minimizes `Σᵢ cost[i][σ(i)]` over permutations σ. Returns the optimal
/// assignment and its cost. Deterministic: ties are resolved by scan order.
///
/// Panics on non-square input; costs must be finite.
pub fn hungarian(cost: &Array2<f64>) -> (Permutation, f64) {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "hungarian requires a square cost matrix");
    if n == 0 {
        return (Permutation::identity(0), 0.0);
    }
    debug_assert!(cost.iter().all(|c| c.is_finite()));

    // 1-based arrays; p[j] is the row matched to column j, p[0] the row being
    // inserted. u, v are the dual potentials.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Augment along the recorded path.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut map = vec![0usize; n];
    for j in 1..=n {
        map[p[j] - 1] = j - 1;
    }
    let sigma = Permutation::from_map(map).expect("augmenting paths produce a bijection");
    let total = (0..n).map(|i| cost[[i, sigma.image(i)]]).sum();
    (sigma, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn three_by_three_known_optimum() {
        let cost = arr2(&[[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]]);
        let (sigma, total) = hungarian(&cost);
        assert_eq!(total, 5.0);
        assert_eq!(sigma.as_slice(), &[1, 0, 2]);
    }

    #[test]
    fn identity_cost_prefers_diagonal() {
        // Zero diagonal, positive elsewhere.
        let cost = arr2(&[[0.0, 9.0], [9.0, 0.0]]);
        let (sigma, total) = hungarian(&cost);
        assert!(sigma.is_identity());
        assert_eq!(total, 0.0);
    }

    #[test]
    fn negative_costs_are_fine() {
        let cost = arr2(&[[-1.0, -5.0], [-5.0, -2.0]]);
        let (_, total) = hungarian(&cost);
        assert_eq!(total, -10.0);
    }

    #[test]
    fn empty_and_single() {
        let (sigma, total) = hungarian(&Array2::zeros((0, 0)));
        assert_eq!(sigma.n(), 0);
        assert_eq!(total, 0.0);
        let (sigma, total) = hungarian(&arr2(&[[7.0]]));
        assert!(sigma.is_identity());
        assert_eq!(total, 7.0);
    }

    #[test]
    fn matches_brute_force_on_small_random_costs() {
        use itertools::Itertools;
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = 5;
            let mut cost = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    cost[[i, j]] = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0;
                }
            }
            let (_, got) = hungarian(&cost);
            let best = (0..n)
                .permutations(n)
                .map(|p| (0..n).map(|i| cost[[i, p[i]]]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((got - best).abs() <= 1e-9, "{got} vs {best}");
        }
    }
}
