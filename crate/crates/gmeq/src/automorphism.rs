//! Exact automorphism groups and the structural results that tie symmetry to
//! localized eigenvectors.
//!
//! The uniqueness certificate of [`crate::equivalence`] fails precisely when
//! the graph has doubly-stochastic symmetry, and for simple spectra that
//! symmetry is unusually rigid: every automorphism is an involution, pairs of
//! twin vertices show up as 2-support eigenvectors with entries `±1/√2` at an
//! integer eigenvalue, and a nontrivial group forces k of the ⊥**1**
//! eigenvectors to have support at most 2k. This module computes groups
//! exactly by backtracking ([`automorphism_group`]) and turns each of those
//! statements into a checkable report:
//!
//! - [`verify_involution_lemma`]: simple spectrum ⟹ every automorphism has
//!   order ≤ 2 (eigenvectors are sign-flipped, not mixed).
//! - [`detect_twin_pairs`]: reads twin vertices directly off the
//!   eigendecomposition and cross-checks the adjacency trichotomy
//!   (λ = −1, 0, +1) plus the induced transposition.
//! - [`verify_proposition1`]: the sorted-support witness a nontrivial group
//!   must leave behind.
//! - [`conjecture_scan`]: the converse direction (localized supports ⟹
//!   symmetry) is open; the scanner records evidence and flags
//!   counterexamples instead of asserting.

use crate::graph::{Graph, Permutation};
use crate::spectral::{has_simple_spectrum, SpectralDecomposition, SupportProfile};
use crate::{Error, Result, Tolerances};

/// Hard vertex cap for exact group computation: backtracking is exponential
/// in the worst case and 20 keeps the refusal honest rather than letting a
/// pathological input hang.
pub const GROUP_VERTEX_CAP: usize = 20;

/// Default element cap: enumeration stops (and marks the result truncated)
/// once this many automorphisms are collected.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// Entry / eigenvalue tolerance for twin-pair recognition: `|u_s| − 1/√2`
/// and `λ − round(λ)` must both stay below this.
const TWIN_TOL: f64 = 1e-6;

/// The full automorphism group of a graph, enumerated element by element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismGroup {
    /// Every automorphism found, sorted by image map; the identity is always
    /// present and sorts first.
    pub elements: Vec<Permutation>,
    /// True when enumeration stopped at the element cap, in which case
    /// `elements` is a prefix of the group, not the whole group.
    pub truncated: bool,
}

impl AutomorphismGroup {
    /// Number of elements found (the group order unless `truncated`).
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// True when the identity is the only automorphism.
    pub fn trivial(&self) -> bool {
        self.elements.len() == 1 && !self.truncated
    }
}

/// Computes the automorphism group of `g` by color-refined backtracking.
///
/// Vertices are first colored by iterated neighbor-color refinement (degree
/// and loop status seed the colors); any automorphism preserves these colors,
/// so the search only tries images within a color class, checking adjacency
/// against previously assigned vertices incrementally. The refusal cap is
/// [`GROUP_VERTEX_CAP`] vertices; `cap` bounds the number of elements
/// collected before the search aborts with `truncated = true`.
pub fn automorphism_group(g: &Graph, cap: usize) -> Result<AutomorphismGroup> {
    let n = g.n();
    if n > GROUP_VERTEX_CAP {
        return Err(Error::TooLarge {
            n,
            cap: GROUP_VERTEX_CAP,
        });
    }
    if cap == 0 {
        return Err(Error::Internal(
            "automorphism element cap must be positive".to_string(),
        ));
    }
    let colors = refine_colors(g);
    let adj = g.adjacency();
    let mut elements: Vec<Permutation> = Vec::new();
    let mut map = vec![0usize; n];
    let mut used = vec![false; n];
    let mut truncated = false;

    // Depth-first assignment of an image for each vertex in index order.
    // Returns false once the element cap is hit so the whole search unwinds.
    fn descend(
        adj: &ndarray::Array2<u8>,
        colors: &[usize],
        depth: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        elements: &mut Vec<Permutation>,
        cap: usize,
        truncated: &mut bool,
    ) -> bool {
        let n = colors.len();
        if depth == n {
            let p = Permutation::from_map(map.clone())
                .expect("backtracking only builds bijections");
            elements.push(p);
            if elements.len() >= cap {
                *truncated = true;
                return false;
            }
            return true;
        }
        'candidates: for j in 0..n {
            if used[j] || colors[j] != colors[depth] || adj[[depth, depth]] != adj[[j, j]] {
                continue;
            }
            for s in 0..depth {
                if adj[[depth, s]] != adj[[j, map[s]]] {
                    continue 'candidates;
                }
            }
            map[depth] = j;
            used[j] = true;
            let keep_going = descend(adj, colors, depth + 1, map, used, elements, cap, truncated);
            used[j] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }

    if n == 0 {
        elements.push(Permutation::identity(0));
    } else {
        descend(
            adj,
            &colors,
            0,
            &mut map,
            &mut used,
            &mut elements,
            cap,
            &mut truncated,
        );
    }
    elements.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    debug_assert!(elements.first().is_some_and(|p| p.is_identity()));
    Ok(AutomorphismGroup {
        elements,
        truncated,
    })
}

/// Iterated neighbor-color refinement. Initial color: (loop, degree). Each
/// round recolors every vertex by its current color plus the sorted multiset
/// of neighbor colors, until the number of classes stops growing. Colors are
/// automorphism-invariant, so pruning on them never loses group elements.
fn refine_colors(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let adj = g.adjacency();
    let mut colors: Vec<usize> = Vec::with_capacity(n);
    {
        let mut seen = std::collections::BTreeMap::new();
        for v in 0..n {
            let key = (adj[[v, v]], g.degree(v));
            let next = seen.len();
            colors.push(*seen.entry(key).or_insert(next));
        }
    }
    loop {
        let mut seen = std::collections::BTreeMap::new();
        let mut next_colors = Vec::with_capacity(n);
        for v in 0..n {
            let mut neighbor_colors: Vec<usize> = (0..n)
                .filter(|&u| u != v && adj[[v, u]] != 0)
                .map(|u| colors[u])
                .collect();
            neighbor_colors.sort_unstable();
            let key = (colors[v], neighbor_colors);
            let next = seen.len();
            next_colors.push(*seen.entry(key).or_insert(next));
        }
        let classes_before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        if seen.len() == classes_before {
            return colors;
        }
        colors = next_colors;
    }
}

/// Outcome of checking that every automorphism is an involution.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionReport {
    /// True when the spectrum is simple, the hypothesis under which the
    /// statement is a theorem. When false, `holds` is vacuously true and
    /// `violations` is left empty even if higher-order elements exist.
    pub applicable: bool,
    pub holds: bool,
    /// Group elements of order > 2 (only populated when `applicable`).
    pub violations: Vec<Permutation>,
    /// Smallest eigenvalue gap, for diagnosing a misclassified spectrum when
    /// a violation appears.
    pub min_gap: f64,
}

/// Simple spectrum forces `P² = I` for every automorphism `P`: `P` maps each
/// one-dimensional eigenspace to itself, so it acts by a sign on each
/// eigenvector and squares to the identity. Repeated spectra escape this
/// (eigenvectors can rotate inside a multidimensional eigenspace), so the
/// check is reported not-applicable rather than run vacuously wrong.
pub fn verify_involution_lemma(
    group: &AutomorphismGroup,
    dec: &SpectralDecomposition,
    tol: &Tolerances,
) -> InvolutionReport {
    let applicable = has_simple_spectrum(dec, tol);
    let violations: Vec<Permutation> = if applicable {
        group
            .elements
            .iter()
            .filter(|p| !p.is_involution())
            .cloned()
            .collect()
    } else {
        Vec::new()
    };
    InvolutionReport {
        applicable,
        holds: violations.is_empty(),
        violations,
        min_gap: dec.min_gap(),
    }
}

/// Adjacency pattern of a twin pair, determined by its eigenvalue class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwinCase {
    /// λ = −1: edge between the twins, no loops.
    AdjacentNoLoops,
    /// λ = 0 with `A_ss = A_st = A_tt = 0`.
    NonadjacentNoLoops,
    /// λ = 0 with `A_ss = A_st = A_tt = 1`.
    AdjacentBothLoops,
    /// λ = +1: loops on both twins, no edge between them.
    NonadjacentBothLoops,
}

/// Two vertices whose adjacency columns agree everywhere outside the pair,
/// read off a 2-support eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwinPair {
    pub s: usize,
    pub t: usize,
    /// Integer eigenvalue class of the witnessing eigenvector (−1, 0, +1).
    pub lambda: i8,
    pub case: TwinCase,
    /// Decomposition index of the witnessing eigenvector.
    pub vector_index: usize,
}

/// Result of scanning for twin pairs: verified pairs plus diagnostics for
/// candidates that looked like twins numerically but failed a structural
/// cross-check (kept visible instead of silently dropped, since they signal
/// tolerance marginality or an eigensolver defect).
#[derive(Debug, Clone, PartialEq)]
pub struct TwinScan {
    pub pairs: Vec<TwinPair>,
    pub inconsistencies: Vec<String>,
}

/// Finds twin pairs from 2-support eigenvectors orthogonal to **1**.
///
/// A unit eigenvector supported on exactly `{s, t}` with `uᵀ1 = 0` must be
/// `(e_s − e_t)/√2`, and the eigen-equations at rows s and t collapse to
/// `A_ss − A_st = λ = A_tt − A_st` with integer entries, so λ ∈ {−1, 0, +1}
/// and the adjacency pattern on the pair is pinned by λ. Each candidate is
/// cross-checked four ways (entry values, eigenvalue integrality, adjacency
/// trichotomy, columns equal off the pair, swap is an automorphism); any
/// failure downgrades it to an inconsistency diagnostic.
pub fn detect_twin_pairs(
    g: &Graph,
    dec: &SpectralDecomposition,
    tol: &Tolerances,
) -> Result<TwinScan> {
    let n = g.n();
    if dec.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: dec.n(),
        });
    }
    let adj = g.adjacency();
    let eps_orth = tol.orth_scaled(n);
    let mut pairs = Vec::new();
    let mut inconsistencies = Vec::new();
    for i in 0..n {
        if dec.v[i].abs() > eps_orth {
            continue;
        }
        let support = dec.support_set(i, tol.supp);
        if support.len() != 2 {
            continue;
        }
        let (s, t) = (support[0], support[1]);
        let (us, ut) = (dec.vectors[[s, i]], dec.vectors[[t, i]]);
        let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        if (us.abs() - half_sqrt2).abs() > TWIN_TOL || (ut.abs() - half_sqrt2).abs() > TWIN_TOL {
            inconsistencies.push(format!(
                "vector {i}: support {{{s}, {t}}} but entries ({us:.6}, {ut:.6}) are not ±1/√2",
            ));
            continue;
        }
        if (us + ut).abs() > TWIN_TOL {
            inconsistencies.push(format!(
                "vector {i}: support entries ({us:.6}, {ut:.6}) have equal signs, not e_s − e_t",
            ));
            continue;
        }
        let lambda = dec.eigenvalues[i];
        let rounded = lambda.round();
        if (lambda - rounded).abs() > TWIN_TOL || !(-1.0..=1.0).contains(&rounded) {
            inconsistencies.push(format!(
                "vector {i}: support {{{s}, {t}}} at eigenvalue {lambda:.9}, not an integer in [−1, 1]",
            ));
            continue;
        }
        let lambda_class = rounded as i8;
        let pattern = (adj[[s, s]], adj[[s, t]], adj[[t, t]]);
        let case = match (lambda_class, pattern) {
            (-1, (0, 1, 0)) => TwinCase::AdjacentNoLoops,
            (0, (0, 0, 0)) => TwinCase::NonadjacentNoLoops,
            (0, (1, 1, 1)) => TwinCase::AdjacentBothLoops,
            (1, (1, 0, 1)) => TwinCase::NonadjacentBothLoops,
            _ => {
                inconsistencies.push(format!(
                    "vector {i}: eigenvalue class {lambda_class} contradicts adjacency pattern \
                     (A_ss, A_st, A_tt) = {pattern:?} on {{{s}, {t}}}",
                ));
                continue;
            }
        };
        let mut columns_differ = None;
        for r in 0..n {
            if r != s && r != t && adj[[r, s]] != adj[[r, t]] {
                columns_differ = Some(r);
                break;
            }
        }
        if let Some(r) = columns_differ {
            inconsistencies.push(format!(
                "vector {i}: columns {s} and {t} differ at row {r}, not twins",
            ));
            continue;
        }
        let swap = Permutation::transposition(n, s, t)?;
        if g.apply_permutation(&swap)?.adjacency() != adj {
            inconsistencies.push(format!(
                "vector {i}: transposition ({s} {t}) is not an automorphism despite twin pattern",
            ));
            continue;
        }
        pairs.push(TwinPair {
            s,
            t,
            lambda: lambda_class,
            case,
            vector_index: i,
        });
    }
    Ok(TwinScan {
        pairs,
        inconsistencies,
    })
}

/// Outcome of the sorted-support witness test for a nontrivial group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition1Report {
    /// True when the group is trivial, in which case the implication holds
    /// with nothing to check.
    pub vacuous: bool,
    pub holds: bool,
    /// The smallest k for which the k-th smallest ⊥**1** support is ≤ 2k.
    pub witness_k: Option<usize>,
    /// Decomposition indices of the k witnessing eigenvectors (the k with
    /// smallest supports, ties broken by index).
    pub witness_indices: Vec<usize>,
    /// Witnessing eigenvectors with an odd support size. Every known witness
    /// has even support; an odd one is recorded as a statistic worth eyes,
    /// not a failure, since only the ≤ 2k bound is proven.
    pub odd_support_indices: Vec<usize>,
}

/// A nontrivial automorphism group (under a simple spectrum) forces some
/// k ≥ 1 eigenvectors orthogonal to **1** with support ≤ 2k: the group then
/// contains an involution by the involution lemma, and each of its k ≥ 1
/// swapped pairs contributes an eigenvector supported on the ≤ 2k moved
/// vertices. Checked via the sorted-support test: with supports ascending,
/// `holds ⟺ ∃k: s₍ₖ₎ ≤ 2k`. Trivial groups make the implication vacuous.
pub fn verify_proposition1(
    profile: &SupportProfile,
    group: &AutomorphismGroup,
) -> Proposition1Report {
    if group.trivial() {
        return Proposition1Report {
            vacuous: true,
            holds: true,
            witness_k: None,
            witness_indices: Vec::new(),
            odd_support_indices: Vec::new(),
        };
    }
    let mut by_support: Vec<(usize, usize)> = profile
        .supports
        .iter()
        .copied()
        .zip(profile.ortho_indices.iter().copied())
        .collect();
    by_support.sort_unstable();
    let witness_k = by_support
        .iter()
        .enumerate()
        .map(|(zero_based, &(support, _))| (zero_based + 1, support))
        .find(|&(k, support)| support <= 2 * k)
        .map(|(k, _)| k);
    let (witness_indices, odd_support_indices) = match witness_k {
        Some(k) => {
            let witnesses = &by_support[..k];
            (
                witnesses.iter().map(|&(_, i)| i).collect(),
                witnesses
                    .iter()
                    .filter(|&&(support, _)| support % 2 == 1)
                    .map(|&(_, i)| i)
                    .collect(),
            )
        }
        None => (Vec::new(), Vec::new()),
    };
    Proposition1Report {
        vacuous: false,
        holds: witness_k.is_some(),
        witness_k,
        witness_indices,
        odd_support_indices,
    }
}

/// Evidence for or against "shared localized support ⟹ symmetry", one
/// finding per distinct support set among the ⊥**1** eigenvectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureFinding {
    /// The shared support set S, ascending vertex indices.
    pub support: Vec<usize>,
    /// Decomposition indices of the eigenvectors supported exactly on S.
    pub vectors: Vec<usize>,
    /// True when S is a proper subset of the vertices of even size, at least
    /// |S|/2 vectors share S, and no entry of those vectors sits in the
    /// marginal band around the support threshold.
    pub matches: bool,
    /// Set when confirmation ran: whether the automorphism group is
    /// nontrivial. `matches` with `Some(false)` here is a counterexample.
    pub automorphism_confirmed: Option<bool>,
    /// Statistic, asserted nowhere: does some single non-identity
    /// automorphism move exactly the vertices of S?
    pub support_equals_moved: Option<bool>,
    /// The loud flag: pattern matched but the group is trivial.
    pub counterexample: bool,
    /// Some vector entry fell within a factor of 100 of the support
    /// threshold, so the support set itself is tolerance-fragile.
    pub marginal: bool,
}

/// Groups the ⊥**1** eigenvectors by exact support set and tests each set
/// against the conjectured pattern (|S| even and proper, ≥ |S|/2 vectors).
/// The converse of the proposition is open, so a match asserts nothing by
/// itself; with `confirm` set and n ≤ [`GROUP_VERTEX_CAP`], the group is
/// computed once and every finding records whether symmetry actually exists.
/// Marginal support entries disqualify a match rather than feed the
/// statistics.
///
/// Full-support classes are reported but never matched: they carry no
/// localization information, and any asymmetric graph with ≥ n/2 full-support
/// eigenvectors orthogonal to **1** would otherwise "match" vacuously — the
/// 12-vertex cubic asymmetric graph in the corpus already does, with six such
/// vectors. The pattern worth scanning for is vectors confined to the even
/// vertex set an automorphism would permute.
///
/// Requires a simple spectrum: eigenvector supports inside a repeated
/// eigenspace are basis artifacts and would fabricate findings.
pub fn conjecture_scan(
    g: &Graph,
    dec: &SpectralDecomposition,
    profile: &SupportProfile,
    tol: &Tolerances,
    confirm: bool,
) -> Result<Vec<ConjectureFinding>> {
    if !has_simple_spectrum(dec, tol) {
        return Err(Error::RepeatedSpectrum);
    }
    let group = if confirm && g.n() <= GROUP_VERTEX_CAP {
        Some(automorphism_group(g, DEFAULT_GROUP_CAP)?)
    } else {
        None
    };
    let mut by_set: std::collections::BTreeMap<Vec<usize>, Vec<(usize, bool)>> =
        std::collections::BTreeMap::new();
    for &i in &profile.ortho_indices {
        let support = dec.support_set(i, tol.supp);
        let marginal = (0..dec.n())
            .any(|j| Tolerances::is_marginal(dec.vectors[[j, i]], tol.supp));
        by_set.entry(support).or_default().push((i, marginal));
    }
    let findings = by_set
        .into_iter()
        .map(|(support, members)| {
            let vectors: Vec<usize> = members.iter().map(|&(i, _)| i).collect();
            let marginal = members.iter().any(|&(_, m)| m);
            let matches = support.len() % 2 == 0
                && support.len() < g.n()
                && 2 * vectors.len() >= support.len()
                && !marginal;
            let automorphism_confirmed = group.as_ref().map(|grp| !grp.trivial());
            let support_equals_moved = group.as_ref().map(|grp| {
                grp.elements
                    .iter()
                    .any(|p| !p.is_identity() && p.moved() == support)
            });
            let counterexample = matches && automorphism_confirmed == Some(false);
            ConjectureFinding {
                support,
                vectors,
                matches,
                automorphism_confirmed,
                support_equals_moved,
                counterexample,
                marginal,
            }
        })
        .collect();
    Ok(findings)
}
