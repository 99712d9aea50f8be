//! Dense two-phase simplex with Bland's rule and periodic refactorization.
//!
//! Sized for the certificate programs this crate builds (a few hundred rows
//! and columns), where exact anti-cycling matters more than speed: the
//! commutant constraint system is heavily redundant and its optima sit at
//! degenerate vertices. Bland's rule terminates on such instances where
//! largest-coefficient pivoting can cycle. Long degenerate pivot runs erode a
//! dense tableau badly enough to flip feasibility verdicts, so the tableau is
//! rebuilt from the original data (LU with partial pivoting on the basis
//! matrix) every [`REFRESH_INTERVAL`] pivots, and no optimality, unbounded,
//! or infeasibility verdict is accepted unless it holds on a freshly rebuilt
//! tableau. Redundant rows keep their artificial variable basic at level zero
//! through phase two, where a guard pivot evicts such an artificial before
//! any entering column could move its row.

use crate::{Error, Result};

/// Per-variable domain. `Free` variables are split internally into a
/// difference of two nonnegative columns; bounded ones are shifted or negated
/// so the solver only ever sees `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bounds {
    NonNegative,
    Free,
    LowerBounded(f64),
    UpperBounded(f64),
}

/// `max cᵀx` subject to `eq_lhs · x = eq_rhs` and per-variable bounds.
/// Inequalities are expressed by the caller via explicit slack variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub maximize: Vec<f64>,
    pub eq_lhs: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub bounds: Vec<Bounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const EPS_PIVOT: f64 = 1e-9;
const EPS_REDUCED: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-7;
const VERIFY_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;
/// Pivots between tableau rebuilds. Small enough that drift between rebuilds
/// stays near machine precision even through degenerate stretches.
const REFRESH_INTERVAL: usize = 50;
/// Pivot elements below this are only trusted on a freshly rebuilt tableau.
/// A stale entry of this size is as likely accumulated drift as data, and
/// dividing by drift either destroys feasibility in one step or hands the
/// next refactorization a singular basis; rebuilding first makes true zeros
/// drop back to machine noise, where [`EPS_PIVOT`] rejects them.
const SAFE_PIVOT: f64 = 1e-6;
/// LU pivot magnitude below which the basis matrix counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

enum RunEnd {
    Optimal,
    Unbounded,
}

/// Gauss–Jordan pivot on (r, c), updating the objective row alongside the
/// constraint rows. The objective row stores reduced costs `c_j − z_j` with
/// the negated objective value in its rhs slot.
fn pivot(rows: &mut [Vec<f64>], obj: &mut [f64], basis: &mut [usize], r: usize, c: usize) {
    let w = obj.len();
    let inv = 1.0 / rows[r][c];
    for v in rows[r].iter_mut() {
        *v *= inv;
    }
    rows[r][c] = 1.0;
    for i in 0..rows.len() {
        if i == r {
            continue;
        }
        let f = rows[i][c];
        if f != 0.0 {
            for j in 0..w {
                rows[i][j] -= f * rows[r][j];
            }
            rows[i][c] = 0.0;
        }
    }
    let f = obj[c];
    if f != 0.0 {
        for j in 0..w {
            obj[j] -= f * rows[r][j];
        }
        obj[c] = 0.0;
    }
    basis[r] = c;
}

/// Rebuilds the reduced-cost row for cost vector `costs` (padded with zeros
/// past its length) against the current basis.
fn recompute_obj(rows: &[Vec<f64>], basis: &[usize], costs: &[f64], obj: &mut [f64]) {
    let w = obj.len();
    for (j, o) in obj.iter_mut().enumerate() {
        *o = if j + 1 < w {
            costs.get(j).copied().unwrap_or(0.0)
        } else {
            0.0
        };
    }
    for (i, row) in rows.iter().enumerate() {
        let cb = costs.get(basis[i]).copied().unwrap_or(0.0);
        if cb != 0.0 {
            for j in 0..w {
                obj[j] -= cb * row[j];
            }
        }
    }
}

/// Tableau plus the immutable standard-form data it can be rebuilt from.
struct Simplex<'d> {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Structural column count; columns `ns..ns+m` are artificials.
    ns: usize,
    /// Original constraint matrix (m × ns) after sign normalization.
    a: &'d [Vec<f64>],
    /// Original rhs after sign normalization; all entries ≥ 0.
    b: &'d [f64],
    budget: usize,
    pivots_since_refresh: usize,
}

impl Simplex<'_> {
    /// Rebuilds `rows = B⁻¹·[A | I | b]` exactly from the original data, where
    /// B collects the current basis columns of `[A | I]`. LU with partial
    /// pivoting; errors if the basis matrix is numerically singular (a valid
    /// pivot sequence keeps it invertible, so singularity means the ratio
    /// test was already working from corrupted numbers).
    fn refactor(&mut self) -> Result<()> {
        let m = self.a.len();
        self.pivots_since_refresh = 0;
        if m == 0 {
            return Ok(());
        }
        let w = self.ns + m + 1;
        // Column-major basis matrix.
        let mut lu = vec![vec![0.0f64; m]; m];
        for (t, &col) in self.basis.iter().enumerate() {
            if col < self.ns {
                for i in 0..m {
                    lu[i][t] = self.a[i][col];
                }
            } else {
                lu[col - self.ns][t] = 1.0;
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let pivot_row = (k..m)
                .max_by(|&x, &y| lu[x][k].abs().partial_cmp(&lu[y][k].abs()).unwrap())
                .unwrap();
            if lu[pivot_row][k].abs() < SINGULAR_TOL {
                return Err(Error::Internal(
                    "simplex basis matrix numerically singular during refactorization".into(),
                ));
            }
            lu.swap(k, pivot_row);
            perm.swap(k, pivot_row);
            let inv = 1.0 / lu[k][k];
            for i in k + 1..m {
                let f = lu[i][k] * inv;
                lu[i][k] = f;
                if f != 0.0 {
                    for j in k + 1..m {
                        lu[i][j] -= f * lu[k][j];
                    }
                }
            }
        }
        let mut fresh = vec![vec![0.0f64; w]; m];
        let mut col = vec![0.0f64; m];
        for j in 0..w {
            for i in 0..m {
                col[i] = if j < self.ns {
                    self.a[perm[i]][j]
                } else if j < self.ns + m {
                    if perm[i] == j - self.ns {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.b[perm[i]]
                };
            }
            for k in 0..m {
                let v = col[k];
                if v != 0.0 {
                    for i in k + 1..m {
                        col[i] -= lu[i][k] * v;
                    }
                }
            }
            for k in (0..m).rev() {
                let mut v = col[k];
                for t in k + 1..m {
                    v -= lu[k][t] * col[t];
                }
                col[k] = v / lu[k][k];
            }
            for i in 0..m {
                fresh[i][j] = col[i];
            }
        }
        // A rebuilt rhs that is substantially negative means an earlier
        // leaving-variable choice was made on corrupted numbers; the basis is
        // genuinely infeasible and continuing would be unsound.
        let b_scale = 1.0 + self.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for row in &fresh {
            if row[w - 1] < -FEAS_TOL * b_scale {
                return Err(Error::Internal(format!(
                    "simplex basis lost feasibility between refreshes (rhs {:.3e})",
                    row[w - 1]
                )));
            }
        }
        self.rows = fresh;
        Ok(())
    }

    /// Bland-rule pivoting until no reduced cost among the first `enter_cols`
    /// columns is positive. Entering: smallest such column index. Leaving:
    /// smallest basis index among the minimum-ratio rows. Every verdict is
    /// re-tested on a freshly refactored tableau before being returned. With
    /// `guard_artificials` set (phase two), an entering column that touches a
    /// row whose basic variable is artificial pivots there first, so basic
    /// artificials stay at level zero forever.
    fn run(&mut self, costs: &[f64], enter_cols: usize, guard_artificials: bool) -> Result<RunEnd> {
        let rhs = self.obj.len() - 1;
        self.refactor()?;
        recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
        loop {
            let Some(col) = (0..enter_cols).find(|&j| self.obj[j] > EPS_REDUCED) else {
                if self.pivots_since_refresh == 0 {
                    return Ok(RunEnd::Optimal);
                }
                self.refactor()?;
                recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
                continue;
            };
            if self.budget == 0 {
                return Err(Error::Internal("simplex pivot budget exhausted".into()));
            }
            if guard_artificials {
                let evict = (0..self.rows.len())
                    .filter(|&i| self.basis[i] >= self.ns && self.rows[i][col].abs() > EPS_PIVOT)
                    .max_by(|&x, &y| {
                        self.rows[x][col]
                            .abs()
                            .partial_cmp(&self.rows[y][col].abs())
                            .unwrap()
                    });
                if let Some(i) = evict {
                    if self.pivots_since_refresh > 0 && self.rows[i][col].abs() < SAFE_PIVOT {
                        self.refactor()?;
                        recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
                        continue;
                    }
                    self.budget -= 1;
                    self.pivots_since_refresh += 1;
                    pivot(&mut self.rows, &mut self.obj, &mut self.basis, i, col);
                    continue;
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let t = row[col];
                if t > EPS_PIVOT {
                    let ratio = row[rhs].max(0.0) / t;
                    let better = match leave {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - RATIO_TIE
                                || ((ratio - br).abs() <= RATIO_TIE
                                    && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                if self.pivots_since_refresh == 0 {
                    return Ok(RunEnd::Unbounded);
                }
                self.refactor()?;
                recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
                continue;
            };
            if self.pivots_since_refresh > 0 && self.rows[row][col].abs() < SAFE_PIVOT {
                self.refactor()?;
                recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
                continue;
            }
            self.budget -= 1;
            self.pivots_since_refresh += 1;
            pivot(&mut self.rows, &mut self.obj, &mut self.basis, row, col);
            if self.pivots_since_refresh >= REFRESH_INTERVAL {
                self.refactor()?;
                recompute_obj(&self.rows, &self.basis, costs, &mut self.obj);
            }
        }
    }

    /// Swaps basic artificials for structural columns where possible after
    /// phase one; a row admitting no structural pivot above [`SAFE_PIVOT`] is
    /// (at least numerically) dependent on the others and keeps its
    /// artificial basic at level zero — pivoting on a near-zero entry here
    /// trades a harmless zero-level artificial for catastrophic growth.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.ns {
                continue;
            }
            let best = (0..self.ns)
                .max_by(|&x, &y| self.rows[i][x].abs().partial_cmp(&self.rows[i][y].abs()).unwrap());
            if let Some(j) = best {
                if self.rows[i][j].abs() > SAFE_PIVOT {
                    pivot(&mut self.rows, &mut self.obj, &mut self.basis, i, j);
                }
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let nv = lp.maximize.len();
    if lp.bounds.len() != nv {
        return Err(Error::SizeMismatch {
            expected: nv,
            actual: lp.bounds.len(),
        });
    }
    if lp.eq_lhs.len() != lp.eq_rhs.len() {
        return Err(Error::SizeMismatch {
            expected: lp.eq_lhs.len(),
            actual: lp.eq_rhs.len(),
        });
    }
    for row in &lp.eq_lhs {
        if row.len() != nv {
            return Err(Error::SizeMismatch {
                expected: nv,
                actual: row.len(),
            });
        }
    }
    let bound_value = |b: &Bounds| match *b {
        Bounds::LowerBounded(v) | Bounds::UpperBounded(v) => v,
        _ => 0.0,
    };
    let finite = lp.maximize.iter().all(|v| v.is_finite())
        && lp.eq_rhs.iter().all(|v| v.is_finite())
        && lp.eq_lhs.iter().flatten().all(|v| v.is_finite())
        && lp.bounds.iter().map(bound_value).all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite);
    }

    // Standard form: y ≥ 0, one or two columns per original variable.
    let m = lp.eq_lhs.len();
    let mut first_col = vec![0usize; nv];
    let mut ns = 0usize;
    for (j, b) in lp.bounds.iter().enumerate() {
        first_col[j] = ns;
        ns += if matches!(b, Bounds::Free) { 2 } else { 1 };
    }
    let mut a = vec![vec![0.0f64; ns]; m];
    let mut b = lp.eq_rhs.clone();
    let mut c = vec![0.0f64; ns];
    for (j, bound) in lp.bounds.iter().enumerate() {
        let c0 = first_col[j];
        match *bound {
            Bounds::NonNegative => {
                for i in 0..m {
                    a[i][c0] = lp.eq_lhs[i][j];
                }
                c[c0] = lp.maximize[j];
            }
            Bounds::LowerBounded(l) => {
                for i in 0..m {
                    a[i][c0] = lp.eq_lhs[i][j];
                    b[i] -= lp.eq_lhs[i][j] * l;
                }
                c[c0] = lp.maximize[j];
            }
            Bounds::UpperBounded(u) => {
                for i in 0..m {
                    a[i][c0] = -lp.eq_lhs[i][j];
                    b[i] -= lp.eq_lhs[i][j] * u;
                }
                c[c0] = -lp.maximize[j];
            }
            Bounds::Free => {
                for i in 0..m {
                    a[i][c0] = lp.eq_lhs[i][j];
                    a[i][c0 + 1] = -lp.eq_lhs[i][j];
                }
                c[c0] = lp.maximize[j];
                c[c0 + 1] = -lp.maximize[j];
            }
        }
    }
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for v in a[i].iter_mut() {
                *v = -*v;
            }
        }
    }

    // Phase one over [structural columns | artificial columns | rhs].
    let w = ns + m + 1;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; w];
        row[..ns].copy_from_slice(&a[i]);
        row[ns + i] = 1.0;
        row[w - 1] = b[i];
        rows.push(row);
    }
    let mut simplex = Simplex {
        rows,
        obj: vec![0.0; w],
        basis: (ns..ns + m).collect(),
        ns,
        a: &a,
        b: &b,
        budget: MAX_PIVOTS,
        pivots_since_refresh: 0,
    };
    let mut phase1_costs = vec![0.0; ns + m];
    for v in phase1_costs[ns..].iter_mut() {
        *v = -1.0;
    }
    match simplex.run(&phase1_costs, ns + m, false)? {
        RunEnd::Optimal => {}
        RunEnd::Unbounded => {
            return Err(Error::Internal("phase-one objective unbounded".into()));
        }
    }
    let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if -simplex.obj[w - 1] < -FEAS_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }

    simplex.drive_out_artificials();
    match simplex.run(&c, ns, true)? {
        RunEnd::Optimal => {}
        RunEnd::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    let mut y = vec![0.0f64; ns];
    for (i, row) in simplex.rows.iter().enumerate() {
        if simplex.basis[i] < ns {
            y[simplex.basis[i]] = row[w - 1].max(0.0);
        }
    }
    let mut x = vec![0.0f64; nv];
    for (j, bound) in lp.bounds.iter().enumerate() {
        let c0 = first_col[j];
        x[j] = match *bound {
            Bounds::NonNegative => y[c0],
            Bounds::LowerBounded(l) => l + y[c0],
            Bounds::UpperBounded(u) => u - y[c0],
            Bounds::Free => y[c0] - y[c0 + 1],
        };
    }
    let value: f64 = lp.maximize.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();

    for (i, row) in lp.eq_lhs.iter().enumerate() {
        let mut lhs = 0.0;
        let mut mass = 0.0;
        for (aij, xj) in row.iter().zip(&x) {
            lhs += aij * xj;
            mass += (aij * xj).abs();
        }
        let resid = (lhs - lp.eq_rhs[i]).abs();
        if resid > VERIFY_TOL * (1.0 + mass + lp.eq_rhs[i].abs()) {
            return Err(Error::Internal(format!(
                "simplex solution violates equality row {i} by {resid:.3e}"
            )));
        }
    }
    Ok(LpOutcome::Optimal { x, value })
}
