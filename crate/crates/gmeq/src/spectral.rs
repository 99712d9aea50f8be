//! Symmetric eigendecomposition (cyclic Jacobi) and the spectral flags the
//! equivalence conditions are built from.
//!
//! Everything downstream keys off two objects computed here:
//!
//! - [`SpectralDecomposition`]: ascending eigenvalues, an orthonormal
//!   eigenvector matrix with a deterministic sign convention, and the vector
//!   `v = Uᵀ1` whose zero entries mark eigenvectors orthogonal to **1**.
//! - [`SupportProfile`]: which eigenvectors are ⊥ **1** and how many nonzero
//!   entries each has. The sufficient conditions for relaxation exactness are
//!   pure functions of these support sizes: every such eigenvector having
//!   ≥ 2k+1 nonzeros suffices, and so does the weaker sorted condition
//!   (i-th smallest support ≥ 2i+1).

use crate::{Error, Result, Tolerances};
use ndarray::Array2;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix: `A = U diag(λ) Uᵀ`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column i is the unit eigenvector for `eigenvalues[i]`, sign-fixed so
    /// its largest-magnitude entry (lowest index on ties) is positive.
    pub vectors: Array2<f64>,
    /// `v = Uᵀ1`; `v[i] ≈ 0` means eigenvector i is orthogonal to **1**.
    pub v: Vec<f64>,
    /// Frobenius reconstruction error `‖A − U diag(λ) Uᵀ‖_F`.
    pub residual: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Smallest gap between consecutive (sorted) eigenvalues; infinite for
    /// matrices of size ≤ 1.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// λ_max − λ_min, floored at 1 so the relative gap test is meaningful for
    /// near-zero matrices.
    pub fn spectral_scale(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => (hi - lo).max(1.0),
            _ => 1.0,
        }
    }

    /// ℓ0 support of eigenvector `i` at entry threshold `eps_supp`.
    pub fn support_set(&self, i: usize, eps_supp: f64) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| self.vectors[[j, i]].abs() > eps_supp)
            .collect()
    }
}

/// Cyclic Jacobi eigendecomposition for symmetric matrices.
///
/// Rotations sweep the upper triangle in row order until the off-diagonal
/// Frobenius mass falls below `1e−14 · max(1, ‖A‖_F)`; the rotation sequence
/// is fixed, so results are bit-deterministic for identical input. Fails on
/// non-square, non-finite, or asymmetric input, and reports the residual if
/// the sweep cap is ever hit.
pub fn eigendecompose(a: &Array2<f64>) -> Result<SpectralDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidAdjacency(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    let scale = frobenius(a).max(1.0);
    if max_asym > 1e-12 * scale {
        return Err(Error::NotSymmetric { max_asym });
    }

    let mut d = a.clone();
    let mut u = Array2::eye(n);
    let target = 1e-14 * scale;
    let mut off = off_diagonal_norm(&d);
    let mut converged = off <= target;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut d, &mut u, p, q);
            }
        }
        off = off_diagonal_norm(&d);
        converged = off <= target;
    }
    if !converged {
        return Err(Error::NoConvergence { residual: off });
    }

    // Sort ascending; stable in the original column order on exact ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[[i, i]].partial_cmp(&d[[j, j]]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = u[[row, src]];
        }
    }

    // Deterministic sign: make the largest-magnitude entry of each column
    // positive, breaking magnitude ties toward the lowest row index.
    for col in 0..n {
        let mut best = 0;
        for row in 1..n {
            if vectors[[row, col]].abs() > vectors[[best, col]].abs() {
                best = row;
            }
        }
        if vectors[[best, col]] < 0.0 {
            for row in 0..n {
                vectors[[row, col]] = -vectors[[row, col]];
            }
        }
    }

    let v: Vec<f64> = (0..n)
        .map(|col| (0..n).map(|row| vectors[[row, col]]).sum())
        .collect();

    let residual = {
        let mut udu = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for t in 0..n {
                    s += vectors[[i, t]] * eigenvalues[t] * vectors[[j, t]];
                }
                udu[[i, j]] = s;
            }
        }
        let diff = a - &udu;
        frobenius(&diff)
    };

    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        v,
        residual,
    })
}

/// One Jacobi rotation zeroing d[p][q], accumulating into u.
fn rotate(d: &mut Array2<f64>, u: &mut Array2<f64>, p: usize, q: usize) {
    let apq = d[[p, q]];
    let small = 1e-60 * (d[[p, p]].abs() + d[[q, q]].abs() + 1.0);
    if apq.abs() <= small {
        d[[p, q]] = 0.0;
        d[[q, p]] = 0.0;
        return;
    }
    let theta = (d[[q, q]] - d[[p, p]]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        // Avoid overflow in theta²; the exact formula degenerates to 1/(2θ).
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);
    let n = d.nrows();

    d[[p, p]] -= t * apq;
    d[[q, q]] += t * apq;
    d[[p, q]] = 0.0;
    d[[q, p]] = 0.0;
    for r in 0..n {
        if r != p && r != q {
            let g = d[[r, p]];
            let h = d[[r, q]];
            d[[r, p]] = g - s * (h + tau * g);
            d[[r, q]] = h + s * (g - tau * h);
            d[[p, r]] = d[[r, p]];
            d[[q, r]] = d[[r, q]];
        }
    }
    for r in 0..n {
        let g = u[[r, p]];
        let h = u[[r, q]];
        u[[r, p]] = g - s * (h + tau * g);
        u[[r, q]] = h + s * (g - tau * h);
    }
}

fn off_diagonal_norm(d: &Array2<f64>) -> f64 {
    let n = d.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * d[[i, j]] * d[[i, j]];
        }
    }
    s.sqrt()
}

pub(crate) fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// All eigenvalues distinct at the relative gap threshold `tol.eig`.
pub fn has_simple_spectrum(dec: &SpectralDecomposition, tol: &Tolerances) -> bool {
    dec.min_gap() > tol.eig * dec.spectral_scale()
}

/// Which eigenvectors are orthogonal to **1**, and their support sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    /// Indices i (into the decomposition) with `|vᵢ| ≤ tol.orth · √n`.
    pub ortho_indices: Vec<usize>,
    /// ℓ0 support sizes aligned with `ortho_indices`.
    pub supports: Vec<usize>,
    /// True when any `|vᵢ|` or any eigenvector entry of a ⊥1 eigenvector sits
    /// within a factor of 100 of its threshold, meaning a nearby tolerance
    /// could flip the classification.
    pub marginal: bool,
}

impl SupportProfile {
    /// Number of eigenvectors orthogonal to **1** (the k of the theorems).
    pub fn k(&self) -> usize {
        self.ortho_indices.len()
    }

    /// Support sizes sorted ascending, the order the sorted condition reads.
    pub fn supports_sorted(&self) -> Vec<usize> {
        let mut s = self.supports.clone();
        s.sort_unstable();
        s
    }
}

pub fn support_profile(dec: &SpectralDecomposition, tol: &Tolerances) -> SupportProfile {
    let n = dec.n();
    let eps_orth = tol.orth_scaled(n);
    let mut ortho_indices = Vec::new();
    let mut supports = Vec::new();
    let mut marginal = false;
    for i in 0..n {
        if Tolerances::is_marginal(dec.v[i], eps_orth) {
            marginal = true;
        }
        if dec.v[i].abs() <= eps_orth {
            let mut count = 0;
            for j in 0..n {
                let e = dec.vectors[[j, i]];
                if Tolerances::is_marginal(e, tol.supp) {
                    marginal = true;
                }
                if e.abs() > tol.supp {
                    count += 1;
                }
            }
            ortho_indices.push(i);
            supports.push(count);
        }
    }
    SupportProfile {
        ortho_indices,
        supports,
        marginal,
    }
}

/// Friendly: simple spectrum and no eigenvector orthogonal to **1**. For such
/// graphs the relaxation is exact with no further conditions.
pub fn is_friendly(profile: &SupportProfile, simple: bool) -> bool {
    simple && profile.k() == 0
}

/// Uniform sufficient condition: simple spectrum and every ⊥1 eigenvector has
/// at least 2k+1 nonzero entries, where k is the number of such eigenvectors.
/// Vacuously true at k = 0.
pub fn theorem_2k1_applies(profile: &SupportProfile, simple: bool) -> bool {
    let k = profile.k();
    simple && profile.supports.iter().all(|&s| s >= 2 * k + 1)
}

/// Sorted sufficient condition (weaker hypothesis): simple spectrum and, with
/// supports ascending, the i-th smallest support is at least 2i+1 (1-based).
pub fn theorem_sorted_applies(profile: &SupportProfile, simple: bool) -> bool {
    simple
        && profile
            .supports_sorted()
            .iter()
            .enumerate()
            .all(|(idx, &s)| s >= 2 * (idx + 1) + 1)
}

/// The spectral flags a single graph classifies into.
#[derive(Debug, Clone)]
pub struct SpectralClassification {
    pub n: usize,
    /// `Some(d)` for d-regular graphs.
    pub regular: Option<usize>,
    pub simple_spectrum: bool,
    pub friendly: bool,
    /// Number of eigenvectors orthogonal to **1**.
    pub k: usize,
    /// Their support sizes, ascending.
    pub supports_sorted: Vec<usize>,
    pub theorem_2k1: bool,
    pub theorem_sorted: bool,
    /// Any threshold-adjacent quantity encountered during classification.
    pub marginal: bool,
    /// Thresholds the flags were computed at.
    pub tolerances: Tolerances,
}

/// Classifies a graph from an already-computed decomposition and profile.
pub fn classify_decomposed(
    g: &crate::graph::Graph,
    dec: &SpectralDecomposition,
    profile: &SupportProfile,
    tol: &Tolerances,
) -> SpectralClassification {
    let simple = has_simple_spectrum(dec, tol);
    SpectralClassification {
        n: g.n(),
        regular: g.is_regular(),
        simple_spectrum: simple,
        friendly: is_friendly(profile, simple),
        k: profile.k(),
        supports_sorted: profile.supports_sorted(),
        theorem_2k1: theorem_2k1_applies(profile, simple),
        theorem_sorted: theorem_sorted_applies(profile, simple),
        marginal: profile.marginal,
        tolerances: *tol,
    }
}

/// One-call classification: decompose, profile, classify.
pub fn classify(g: &crate::graph::Graph, tol: &Tolerances) -> Result<SpectralClassification> {
    let dec = eigendecompose(&g.to_dense())?;
    let profile = support_profile(&dec, tol);
    Ok(classify_decomposed(g, &dec, &profile, tol))
}
