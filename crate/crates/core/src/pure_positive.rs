//! Enumeration of pure states with minimal support uncertainty.
//!
//! For completely incompatible bases every pure state has `n_A + n_B >= d + 1`.
//! A state reaching the floor is supported on some `S` in the A-basis and some
//! `T` in the B-basis with `|S| + |T| = d + 1`; it lies in `span{a_i : i ∈ S}`
//! and is orthogonal to `b_j` for every `j ∉ T`. That is `|S| − 1` linear
//! constraints on `|S|` unknowns, so each pattern contributes at most one ray.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incompatibility::{complete_incompatibility, support_counts_pure};
use crate::kd::{kd_table_pure, PureState, TransitionMatrix};
use crate::numerics::{inner, null_space, CMatrix, C64, ZERO};
use crate::subsets::combinations;

/// Largest dimension accepted by the enumeration.
pub const MAX_ENUMERATION_DIM: usize = 6;
const NULL_SPACE_TOL: f64 = 1e-9;

/// Support sets `(S, T)`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SupportPattern {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

impl SupportPattern {
    pub fn sizes(&self) -> (usize, usize) {
        (self.s.len(), self.t.len())
    }
}

/// A pattern whose constraint system has a kernel of dimension > 1. The
/// kernel basis is kept rather than sampled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonGenericPattern {
    pub pattern: SupportPattern,
    pub null_space: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateList {
    pub states: Vec<PureState>,
    pub patterns: Vec<SupportPattern>,
    pub dedup_tol: f64,
    #[serde(default)]
    pub non_generic: Vec<NonGenericPattern>,
}

impl PureStateList {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        self.states.iter().map(PureState::projector).collect()
    }

    /// Index of a listed state within phase-invariant distance `tol` of `psi`.
    pub fn position(&self, psi: &PureState, tol: f64) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.phase_distance(psi) <= tol)
    }

    fn contains_ray(&self, psi: &PureState) -> bool {
        self.states
            .iter()
            .any(|s| 1.0 - inner(s.amplitudes(), psi.amplitudes()).norm() <= self.dedup_tol)
    }
}

/// All pure states with `n_A + n_B = d + 1`, one per support pattern, in
/// lexicographic pattern order (by `|S|`, then `S`, then `T`).
pub fn enumerate_min_uncertainty_states(u: &TransitionMatrix, eps: f64) -> Result<PureStateList> {
    let d = u.dim();
    if d > MAX_ENUMERATION_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: MAX_ENUMERATION_DIM,
        });
    }
    let report = complete_incompatibility(u, eps)?;
    if !report.completely_incompatible {
        return Err(Error::NotCompletelyIncompatible {
            min_abs_minor: report.min_abs_minor,
        });
    }

    let mut list = PureStateList {
        states: Vec::new(),
        patterns: Vec::new(),
        dedup_tol: 1e-8,
        non_generic: Vec::new(),
    };
    for s_size in 1..=d {
        let t_size = d + 1 - s_size;
        for s in combinations(d, s_size) {
            for t in combinations(d, t_size) {
                let pattern = SupportPattern { s: s.clone(), t };
                match solve_pattern(u, &pattern)? {
                    PatternSolution::Unique(amps) => {
                        let Ok(psi) = PureState::normalized(amps) else {
                            continue;
                        };
                        let counts = support_counts_pure(&psi, u, eps)?;
                        if !realizes(&psi, u, &pattern, eps) || counts.n_ab() != d + 1 {
                            continue;
                        }
                        let psi = psi.canonical_phase(eps);
                        if !list.contains_ray(&psi) {
                            list.states.push(psi);
                            list.patterns.push(pattern);
                        }
                    }
                    PatternSolution::Degenerate(basis) => {
                        list.non_generic.push(NonGenericPattern {
                            pattern,
                            null_space: basis,
                        });
                    }
                    PatternSolution::None => {}
                }
            }
        }
    }
    Ok(list)
}

enum PatternSolution {
    None,
    Unique(Vec<C64>),
    Degenerate(Vec<Vec<C64>>),
}

/// Solves `Σ_{i∈S} conj(U_ij) x_i = 0` for `j ∉ T`, returning full-length vectors.
fn solve_pattern(u: &TransitionMatrix, pattern: &SupportPattern) -> Result<PatternSolution> {
    let d = u.dim();
    let excluded: Vec<usize> = (0..d).filter(|j| !pattern.t.contains(j)).collect();
    let embed = |x: &[C64]| {
        let mut full = vec![ZERO; d];
        for (&i, &z) in pattern.s.iter().zip(x) {
            full[i] = z;
        }
        full
    };
    if excluded.is_empty() {
        // no constraints: the kernel is the whole span{a_i : i ∈ S}
        return Ok(match pattern.s.len() {
            1 => PatternSolution::Unique(embed(&[C64::new(1.0, 0.0)])),
            _ => PatternSolution::Degenerate(
                (0..pattern.s.len())
                    .map(|k| {
                        let mut e = vec![ZERO; pattern.s.len()];
                        e[k] = C64::new(1.0, 0.0);
                        embed(&e)
                    })
                    .collect(),
            ),
        });
    }
    let m = u.matrix();
    let constraints = CMatrix::from_fn(excluded.len(), pattern.s.len(), |r, c| {
        m[(pattern.s[c], excluded[r])].conj()
    });
    let ns = null_space(&constraints, NULL_SPACE_TOL)?;
    Ok(match ns.basis.len() {
        0 => PatternSolution::None,
        1 => PatternSolution::Unique(embed(&ns.basis[0])),
        _ => PatternSolution::Degenerate(ns.basis.iter().map(|v| embed(v)).collect()),
    })
}

/// Checks that the realized supports are exactly `(S, T)`.
fn realizes(psi: &PureState, u: &TransitionMatrix, pattern: &SupportPattern, eps: f64) -> bool {
    let a_ok = psi
        .amplitudes()
        .iter()
        .enumerate()
        .all(|(i, z)| (z.norm() > eps) == pattern.s.contains(&i));
    let b_ok = u
        .b_components(psi.amplitudes())
        .iter()
        .enumerate()
        .all(|(j, z)| (z.norm() > eps) == pattern.t.contains(&j));
    a_ok && b_ok
}

/// Keeps the states whose KD table is positive at `tol`.
pub fn filter_kd_positive_pure(
    states: &PureStateList,
    u: &TransitionMatrix,
    tol: f64,
) -> Result<PureStateList> {
    let mut out = PureStateList {
        states: Vec::new(),
        patterns: Vec::new(),
        dedup_tol: states.dedup_tol,
        non_generic: states.non_generic.clone(),
    };
    for (k, psi) in states.states.iter().enumerate() {
        if kd_table_pure(psi, u)?.is_kd_positive(tol) {
            out.states.push(psi.clone());
            if let Some(p) = states.patterns.get(k) {
                out.patterns.push(p.clone());
            }
        }
    }
    Ok(out)
}
