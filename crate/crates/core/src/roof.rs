//! Convex roofs over pure-state decompositions.
//!
//! Every decomposition of a rank-`r` state `ρ = Σ_k μ_k |e_k⟩⟨e_k|` into `n`
//! pure states comes from an `n × r` isometry `V` applied to the eigen-ensemble:
//! `ψ̃_i = Σ_k V_ik √μ_k e_k`. Upper bounds are found by annealing over `V`;
//! lower bounds come from convexity, the complete-incompatibility floor and
//! hull-membership certificates.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{finite_convex_roof, membership_lp, MembershipCertificate, Verdict};
use crate::incompatibility::{complete_incompatibility, support_counts_vector};
use crate::kd::{kd_table, total_nonpositivity_pure, DensityMatrix, PureState, TransitionMatrix};
use crate::numerics::random::{complex_normal, haar_unitary_from_rng, rng_from_seed};
use crate::numerics::{
    hermitian_eig, hermitian_function, inner, qr, vec_norm, CMatrix, EigenDecomposition, C64, ZERO,
};
use crate::pure_positive::{
    enumerate_min_uncertainty_states, filter_kd_positive_pure, MAX_ENUMERATION_DIM,
};
use crate::tol::Tolerances;

const RANK_CUTOFF: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-9;
const DROP_WEIGHT: f64 = 1e-12;
const EXACT_GAP: f64 = 1e-6;

/// Convex decomposition `ρ = Σ λ_i |φ_i⟩⟨φ_i|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.states.first().map_or(0, PureState::dim);
        let mut acc = CMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            acc = &acc + &s.projector().scale_real(*w);
        }
        acc
    }

    pub fn reconstruction_error(&self, rho: &CMatrix) -> f64 {
        (&self.reconstruct() - rho).frobenius_norm()
    }

    /// Weighted average of a pure-state objective.
    pub fn average(&self, objective: &dyn PureObjective) -> f64 {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| w * objective.value(s.amplitudes()))
            .sum()
    }
}

/// Eigenvalues and eigenvectors of `ρ` above the rank cutoff.
#[derive(Debug, Clone)]
struct Ensemble {
    sqrt_mu: Vec<f64>,
    vectors: Vec<Vec<C64>>,
    dim: usize,
}

impl Ensemble {
    fn new(eig: &EigenDecomposition) -> Self {
        let r = eig.rank(RANK_CUTOFF);
        Self {
            sqrt_mu: eig.eigenvalues[..r].iter().map(|m| m.sqrt()).collect(),
            vectors: (0..r).map(|k| eig.vector(k)).collect(),
            dim: eig.dim(),
        }
    }

    fn rank(&self) -> usize {
        self.sqrt_mu.len()
    }

    /// Unnormalized member `ψ̃_i` for row `i` of `V`.
    fn member(&self, v: &CMatrix, i: usize) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (k, e) in self.vectors.iter().enumerate() {
            let c = v[(i, k)] * self.sqrt_mu[k];
            for (o, x) in out.iter_mut().zip(e) {
                *o += c * x;
            }
        }
        out
    }

    fn evaluate(&self, v: &CMatrix, objective: &dyn PureObjective) -> f64 {
        let mut acc = 0.0;
        for i in 0..v.rows() {
            let m = self.member(v, i);
            let w = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if w > DROP_WEIGHT {
                let n = w.sqrt();
                let phi: Vec<C64> = m.iter().map(|z| z / n).collect();
                acc += w * objective.value(&phi);
            }
        }
        acc
    }

    fn decomposition(&self, v: &CMatrix) -> Decomposition {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for i in 0..v.rows() {
            let m = self.member(v, i);
            let w = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if w > DROP_WEIGHT {
                let n = w.sqrt();
                states.push(PureState::from_normalized_unchecked(
                    m.iter().map(|z| z / n).collect(),
                ));
                weights.push(w);
            }
        }
        Decomposition { weights, states }
    }

    /// Row vector `u` such that setting a row of `V` to `u` makes that member
    /// proportional to `χ`, or `None` when `χ` is not in the support of `ρ`.
    fn attractor_row(&self, chi: &[C64]) -> Option<Vec<C64>> {
        let coeffs: Vec<C64> = self.vectors.iter().map(|e| inner(e, chi)).collect();
        let in_support: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (in_support - 1.0).abs() > 1e-8 {
            return None;
        }
        let row: Vec<C64> = coeffs
            .iter()
            .zip(&self.sqrt_mu)
            .map(|(c, s)| c / s)
            .collect();
        let n = vec_norm(&row);
        Some(row.iter().map(|z| z / n).collect())
    }
}

/// Decomposition induced by an `n × r` isometry on the eigen-ensemble of `ρ`.
pub fn decomposition_from_isometry(eig: &EigenDecomposition, v: &CMatrix) -> Result<Decomposition> {
    let ens = Ensemble::new(eig);
    let r = ens.rank();
    if v.cols() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: v.cols(),
        });
    }
    if v.rows() < r {
        return Err(Error::ShapeMismatch(format!(
            "isometry has {} rows for rank {r}",
            v.rows()
        )));
    }
    let deviation = v.isometry_defect();
    if deviation > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    Ok(ens.decomposition(v))
}

/// A real-valued functional of normalized pure states.
pub trait PureObjective: Sync {
    fn name(&self) -> &'static str;
    fn value(&self, psi: &[C64]) -> f64;
}

/// `N(ψ) = Σ_ij |Q_ij(ψ)|`.
#[derive(Debug, Clone)]
pub struct TotalNonpositivity {
    pub u: TransitionMatrix,
}

impl PureObjective for TotalNonpositivity {
    fn name(&self) -> &'static str {
        "total_nonpositivity"
    }

    fn value(&self, psi: &[C64]) -> f64 {
        total_nonpositivity_pure(psi, &self.u)
    }
}

/// `n_A(ψ) + n_B(ψ)` counted at threshold `eps`.
#[derive(Debug, Clone)]
pub struct SupportUncertainty {
    pub u: TransitionMatrix,
    pub eps: f64,
}

impl PureObjective for SupportUncertainty {
    fn name(&self) -> &'static str {
        "support_uncertainty"
    }

    fn value(&self, psi: &[C64]) -> f64 {
        support_counts_vector(psi, &self.u, self.eps).n_ab() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofConfig {
    /// Number of decomposition terms; `None` means `rank²`.
    pub n_terms: Option<usize>,
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
    pub t_start: f64,
    pub t_end: f64,
    pub proposal_scale: f64,
    /// Probability of a sparsification move when attractors are available.
    pub sparsify_probability: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            n_terms: None,
            restarts: 40,
            steps: 2000,
            seed: 0,
            t_start: 1.0,
            t_end: 1e-4,
            proposal_scale: 0.1,
            sparsify_probability: 0.25,
        }
    }
}

impl RoofConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.steps == 0 {
            return Err(Error::InvalidParameter(
                "restarts and steps must be positive".into(),
            ));
        }
        if !(self.t_start > 0.0 && self.t_end > 0.0 && self.t_end <= self.t_start) {
            return Err(Error::InvalidParameter(
                "temperatures must satisfy 0 < t_end <= t_start".into(),
            ));
        }
        if self.proposal_scale.is_nan()
            || self.proposal_scale <= 0.0
            || !(0.0..=1.0).contains(&self.sparsify_probability)
        {
            return Err(Error::InvalidParameter(
                "invalid proposal parameters".into(),
            ));
        }
        Ok(())
    }
}

/// Best decomposition found by the search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Restart that produced the value.
    pub restart: usize,
    /// Objective value of the eigen-ensemble.
    pub eigen_value: f64,
    /// Best value after each restart, in restart order.
    pub restart_values: Vec<f64>,
}

fn eigen_isometry(n: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(n, r, |i, k| if i == k { C64::new(1.0, 0.0) } else { ZERO })
}

fn random_isometry(n: usize, r: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let u = haar_unitary_from_rng(n, rng);
    CMatrix::from_fn(n, r, |i, k| u[(i, k)])
}

fn gaussian_move(v: &CMatrix, sigma: f64, rng: &mut ChaCha8Rng) -> Option<CMatrix> {
    let mut w = v.clone();
    for i in 0..w.rows() {
        for k in 0..w.cols() {
            w[(i, k)] += complex_normal(rng) * sigma;
        }
    }
    qr(&w).ok().map(|(q, _)| q)
}

/// Sets row `i` to `β·u` and rescales the other rows so `V` stays an isometry.
fn sparsify_move(v: &CMatrix, i: usize, u: &[C64], beta: f64) -> Option<CMatrix> {
    let (n, r) = (v.rows(), v.cols());
    if n < 2 {
        return None;
    }
    let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let w = CMatrix::from_fn(n - 1, r, |a, k| v[(others[a], k)]);
    let gram = &w.adjoint() * &w;
    if hermitian_eig(&gram).ok()?.min_eigenvalue() < 1e-10 {
        return None;
    }
    let inv_sqrt = hermitian_function(&gram, |x| 1.0 / x.max(1e-300).sqrt()).ok()?;
    let target =
        &CMatrix::identity(r) - &CMatrix::from_fn(r, r, |k, l| u[k].conj() * u[l] * (beta * beta));
    let sqrt_target = hermitian_function(&target, |x| x.max(0.0).sqrt()).ok()?;
    let w_new = &(&w * &inv_sqrt) * &sqrt_target;
    let mut out = CMatrix::zeros(n, r);
    for k in 0..r {
        out[(i, k)] = u[k] * beta;
    }
    for (a, &row) in others.iter().enumerate() {
        for k in 0..r {
            out[(row, k)] = w_new[(a, k)];
        }
    }
    (out.isometry_defect() <= ISOMETRY_TOL).then_some(out)
}

struct RestartResult {
    value: f64,
    v: CMatrix,
}

fn anneal(
    ens: &Ensemble,
    n: usize,
    objective: &dyn PureObjective,
    attractor_rows: &[Vec<C64>],
    config: &RoofConfig,
    restart: usize,
) -> RestartResult {
    let r = ens.rank();
    let mut rng = rng_from_seed(config.seed.wrapping_add(restart as u64));
    let mut v = if restart == 0 {
        eigen_isometry(n, r)
    } else {
        random_isometry(n, r, &mut rng)
    };
    let mut current = ens.evaluate(&v, objective);
    let mut best = RestartResult {
        value: current,
        v: v.clone(),
    };
    let ratio = config.t_end / config.t_start;
    for step in 0..config.steps {
        let frac = if config.steps > 1 {
            step as f64 / (config.steps - 1) as f64
        } else {
            1.0
        };
        let temp = config.t_start * ratio.powf(frac);
        let sparsify =
            !attractor_rows.is_empty() && rng.random::<f64>() < config.sparsify_probability;
        let proposal = if sparsify {
            let i = rng.random_range(0..n);
            let u = attractor_rows.choose(&mut rng).expect("nonempty");
            let beta = rng.random_range(0.5..=1.0);
            sparsify_move(&v, i, u, beta)
        } else {
            gaussian_move(
                &v,
                config.proposal_scale * (temp / config.t_start).sqrt(),
                &mut rng,
            )
        };
        let Some(candidate) = proposal else { continue };
        let value = ens.evaluate(&candidate, objective);
        let delta = value - current;
        if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
            v = candidate;
            current = value;
            if current < best.value {
                best = RestartResult {
                    value: current,
                    v: v.clone(),
                };
            }
        }
    }
    best
}

/// Upper bound on the convex roof of `objective` at `ρ` by simulated annealing
/// over isometries. Restarts run in parallel; restart `k` uses seed
/// `config.seed + k`, and restart 0 starts from the eigen-ensemble. States in
/// `attractors` that lie in the support of `ρ` are used as targets of
/// sparsification moves.
pub fn roof_upper_bound(
    rho: &DensityMatrix,
    objective: &dyn PureObjective,
    attractors: &[PureState],
    config: &RoofConfig,
) -> Result<UpperBound> {
    config.validate()?;
    let eig = hermitian_eig(rho.matrix())?;
    let ens = Ensemble::new(&eig);
    let r = ens.rank();
    let eigen_value = ens.evaluate(&eigen_isometry(r, r), objective);
    if r == 1 {
        let decomposition = ens.decomposition(&eigen_isometry(1, 1));
        return Ok(UpperBound {
            value: eigen_value,
            decomposition,
            restart: 0,
            eigen_value,
            restart_values: vec![eigen_value],
        });
    }
    let n = config.n_terms.unwrap_or(r * r);
    if n < r {
        return Err(Error::InvalidParameter(format!(
            "n_terms = {n} is below the rank {r}"
        )));
    }
    let attractor_rows: Vec<Vec<C64>> = attractors
        .iter()
        .filter(|a| a.dim() == rho.dim())
        .filter_map(|a| ens.attractor_row(a.amplitudes()))
        .collect();
    let results: Vec<RestartResult> = (0..config.restarts)
        .into_par_iter()
        .map(|k| anneal(&ens, n, objective, &attractor_rows, config, k))
        .collect();
    let mut best_index = 0;
    for (k, res) in results.iter().enumerate() {
        if res.value < results[best_index].value {
            best_index = k;
        }
    }
    let restart_values = results.iter().map(|res| res.value).collect();
    let best = &results[best_index];
    Ok(UpperBound {
        value: best.value,
        decomposition: ens.decomposition(&best.v),
        restart: best_index,
        eigen_value,
        restart_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    SupportUncertainty,
    TotalNonpositivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundKind {
    /// The roof dominates the mixed-state functional.
    Convexity,
    /// A separating functional places `ρ` outside the hull of the minimizers.
    HullMembership,
    /// Every pure state has `n_AB >= d + 1`.
    IncompatibilityFloor,
    /// `n_A, n_B >= 1` for any state.
    Trivial,
    /// Rank one: the only decomposition is `ρ` itself.
    PureState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    /// The roof is strictly greater than `value`.
    pub strict: bool,
    pub kind: LowerBoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBoundSource {
    PureState,
    /// Finite roof over a generator hull containing `ρ`.
    HullRoof,
    Annealing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoofEstimate {
    pub objective: ObjectiveKind,
    pub upper_bound: f64,
    pub decomposition: Decomposition,
    pub upper_source: UpperBoundSource,
    pub lower_bound: LowerBound,
    /// Bounds meet within `1e-6` and the lower bound is not strict.
    pub exact: bool,
    pub membership: Option<MembershipCertificate>,
    /// External assumptions the certificates rely on.
    pub assumptions: Vec<String>,
}

impl RoofEstimate {
    fn new(
        objective: ObjectiveKind,
        upper: (f64, Decomposition, UpperBoundSource),
        lower_bound: LowerBound,
        membership: Option<MembershipCertificate>,
        assumptions: Vec<String>,
    ) -> Self {
        let exact = !lower_bound.strict && (upper.0 - lower_bound.value).abs() <= EXACT_GAP;
        Self {
            objective,
            upper_bound: upper.0,
            decomposition: upper.1,
            upper_source: upper.2,
            lower_bound,
            exact,
            membership,
            assumptions,
        }
    }

    /// Roof value when the bounds meet.
    pub fn value(&self) -> Option<f64> {
        self.exact.then_some(self.upper_bound)
    }
}

fn pure_state_of(rho: &DensityMatrix) -> Result<Option<PureState>> {
    let eig = hermitian_eig(rho.matrix())?;
    Ok((eig.rank(RANK_CUTOFF) == 1).then(|| PureState::from_normalized_unchecked(eig.vector(0))))
}

fn hull_decomposition(weights: &[f64], states: &[PureState]) -> Decomposition {
    let mut out = Decomposition {
        weights: Vec::new(),
        states: Vec::new(),
    };
    for (w, s) in weights.iter().zip(states) {
        if *w > DROP_WEIGHT {
            out.weights.push(*w);
            out.states.push(s.clone());
        }
    }
    out
}

fn check_verdict(cert: &MembershipCertificate, tol: &Tolerances) -> Result<()> {
    if cert.verdict == Verdict::Indeterminate {
        return Err(Error::Indeterminate {
            margin: cert.margin,
            threshold: tol.outside_margin(),
        });
    }
    Ok(())
}

/// Largest eigenvalue of `F` minus the threshold: the most any pure state can
/// exceed the separating inequality.
fn functional_excess(cert: &MembershipCertificate) -> Result<Option<f64>> {
    match (&cert.functional, cert.threshold) {
        (Some(f), Some(c)) => {
            let eig = hermitian_eig(f)?;
            Ok(Some(eig.eigenvalues[0] - c))
        }
        _ => Ok(None),
    }
}

fn default_attractors(u: &TransitionMatrix) -> Vec<PureState> {
    let d = u.dim();
    (0..d)
        .map(|i| PureState::basis(d, i))
        .chain((0..d).map(|j| PureState::from_normalized_unchecked(u.b_vector(j))))
        .collect()
}

/// Bounds on the convex roof of the support uncertainty `n_AB`.
///
/// For completely incompatible `U` with `d <= 6` the minimal-uncertainty states
/// `M` are enumerated. Inside `conv(M)` the roof is exactly `d + 1`. Outside,
/// any decomposition puts weight `p >= margin / (λ_max(F) − c)` on states
/// outside `M`, each of which counts at least `d + 2`, so the roof is at least
/// `d + 1 + p`.
pub fn support_roof_bounds(
    rho: &DensityMatrix,
    u: &TransitionMatrix,
    config: &RoofConfig,
    tol: &Tolerances,
) -> Result<RoofEstimate> {
    let d = u.dim();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    let objective = SupportUncertainty {
        u: u.clone(),
        eps: tol.support_eps,
    };
    let kind = ObjectiveKind::SupportUncertainty;
    if let Some(psi) = pure_state_of(rho)? {
        let value = objective.value(psi.amplitudes());
        let decomposition = Decomposition {
            weights: vec![1.0],
            states: vec![psi],
        };
        let lower = LowerBound {
            value,
            strict: false,
            kind: LowerBoundKind::PureState,
        };
        return Ok(RoofEstimate::new(
            kind,
            (value, decomposition, UpperBoundSource::PureState),
            lower,
            None,
            vec![],
        ));
    }

    let report = complete_incompatibility(u, tol.minor_eps)?;
    let floor = if report.completely_incompatible {
        LowerBound {
            value: (d + 1) as f64,
            strict: false,
            kind: LowerBoundKind::IncompatibilityFloor,
        }
    } else {
        LowerBound {
            value: 2.0,
            strict: false,
            kind: LowerBoundKind::Trivial,
        }
    };
    if !report.completely_incompatible || d > MAX_ENUMERATION_DIM {
        let ub = roof_upper_bound(rho, &objective, &default_attractors(u), config)?;
        return Ok(RoofEstimate::new(
            kind,
            (ub.value, ub.decomposition, UpperBoundSource::Annealing),
            floor,
            None,
            vec![],
        ));
    }

    let list = enumerate_min_uncertainty_states(u, tol.support_eps)?;
    let mut assumptions = Vec::new();
    if !list.non_generic.is_empty() {
        assumptions.push(format!(
            "{} support patterns have a kernel of dimension > 1; their states are not in the generator list",
            list.non_generic.len()
        ));
    }
    let generators: Vec<DensityMatrix> = list.states.iter().map(DensityMatrix::from_pure).collect();
    let cert = membership_lp(rho, &generators, tol.lp_feasibility)?;
    check_verdict(&cert, tol)?;
    if cert.is_inside() {
        let values = vec![(d + 1) as f64; generators.len()];
        let roof = finite_convex_roof(&values, rho, &generators, tol.lp_feasibility)?;
        let decomposition = hull_decomposition(&roof.weights, &list.states);
        return Ok(RoofEstimate::new(
            kind,
            (roof.value, decomposition, UpperBoundSource::HullRoof),
            floor,
            Some(cert),
            assumptions,
        ));
    }

    let mut lower = floor;
    if list.non_generic.is_empty() {
        if let Some(excess) = functional_excess(&cert)? {
            if excess > 0.0 {
                lower = LowerBound {
                    value: (d + 1) as f64 + cert.margin / excess,
                    strict: false,
                    kind: LowerBoundKind::HullMembership,
                };
            }
        }
    }
    let mut attractors = list.states.clone();
    attractors.extend(default_attractors(u));
    let ub = roof_upper_bound(rho, &objective, &attractors, config)?;
    Ok(RoofEstimate::new(
        kind,
        (ub.value, ub.decomposition, UpperBoundSource::Annealing),
        lower,
        Some(cert),
        assumptions,
    ))
}

/// Bounds on the convex roof of the total nonpositivity `N`.
///
/// `positive_pure` is the list of pure KD-positive states; when omitted it is
/// enumerated for completely incompatible `U` at `d <= 6`. The list is assumed
/// complete, and the assumption is recorded in the estimate.
pub fn nonpositivity_roof_bounds(
    rho: &DensityMatrix,
    u: &TransitionMatrix,
    positive_pure: Option<&[PureState]>,
    config: &RoofConfig,
    tol: &Tolerances,
) -> Result<RoofEstimate> {
    let d = u.dim();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    let objective = TotalNonpositivity { u: u.clone() };
    let kind = ObjectiveKind::TotalNonpositivity;
    let n_rho = kd_table(rho, u)?.total_nonpositivity();
    if let Some(psi) = pure_state_of(rho)? {
        let value = objective.value(psi.amplitudes());
        let decomposition = Decomposition {
            weights: vec![1.0],
            states: vec![psi],
        };
        let lower = LowerBound {
            value,
            strict: false,
            kind: LowerBoundKind::PureState,
        };
        return Ok(RoofEstimate::new(
            kind,
            (value, decomposition, UpperBoundSource::PureState),
            lower,
            None,
            vec![],
        ));
    }
    let convexity = LowerBound {
        value: n_rho,
        strict: false,
        kind: LowerBoundKind::Convexity,
    };

    let mut assumptions = Vec::new();
    let positive: Option<Vec<PureState>> = match positive_pure {
        Some(list) => {
            assumptions
                .push("the supplied list of pure KD-positive states is complete".to_string());
            Some(list.to_vec())
        }
        None if d <= MAX_ENUMERATION_DIM
            && complete_incompatibility(u, tol.minor_eps)?.completely_incompatible =>
        {
            let all = enumerate_min_uncertainty_states(u, tol.support_eps)?;
            let pos = filter_kd_positive_pure(&all, u, tol.positivity)?;
            assumptions.push(
                "pure KD-positive states taken from the minimal-uncertainty enumeration, assumed complete".to_string(),
            );
            if !pos.non_generic.is_empty() {
                assumptions.push(format!(
                    "{} support patterns are non-generic",
                    pos.non_generic.len()
                ));
            }
            Some(pos.states)
        }
        None => None,
    };
    let Some(positive) = positive.filter(|p| !p.is_empty()) else {
        let ub = roof_upper_bound(rho, &objective, &default_attractors(u), config)?;
        return Ok(RoofEstimate::new(
            kind,
            (ub.value, ub.decomposition, UpperBoundSource::Annealing),
            convexity,
            None,
            assumptions,
        ));
    };

    let generators: Vec<DensityMatrix> = positive.iter().map(DensityMatrix::from_pure).collect();
    let cert = membership_lp(rho, &generators, tol.lp_feasibility)?;
    check_verdict(&cert, tol)?;
    if cert.is_inside() {
        let values: Vec<f64> = positive
            .iter()
            .map(|s| objective.value(s.amplitudes()))
            .collect();
        let roof = finite_convex_roof(&values, rho, &generators, tol.lp_feasibility)?;
        let decomposition = hull_decomposition(&roof.weights, &positive);
        return Ok(RoofEstimate::new(
            kind,
            (roof.value, decomposition, UpperBoundSource::HullRoof),
            convexity,
            Some(cert),
            assumptions,
        ));
    }
    // outside the closed hull: every optimal decomposition uses a state with N > 1
    let lower = LowerBound {
        value: n_rho.max(1.0),
        strict: true,
        kind: LowerBoundKind::HullMembership,
    };
    let mut attractors = positive.clone();
    attractors.extend(default_attractors(u));
    let ub = roof_upper_bound(rho, &objective, &attractors, config)?;
    Ok(RoofEstimate::new(
        kind,
        (ub.value, ub.decomposition, UpperBoundSource::Annealing),
        lower,
        Some(cert),
        assumptions,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_studies::Spin1Fixture;
    use crate::numerics::random::{random_density, random_simplex};

    fn quick() -> RoofConfig {
        RoofConfig {
            restarts: 4,
            steps: 300,
            ..RoofConfig::default()
        }
    }

    #[test]
    fn identity_isometry_is_the_eigen_ensemble() {
        let mut rng = rng_from_seed(1);
        let rho = random_density(3, 3, &mut rng);
        let eig = hermitian_eig(&rho).unwrap();
        let dec = decomposition_from_isometry(&eig, &eigen_isometry(3, 3)).unwrap();
        for k in 0..3 {
            assert!((dec.weights[k] - eig.eigenvalues[k]).abs() < 1e-14);
        }
        assert!(dec.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn hadamard_mixing_of_the_maximally_mixed_qubit() {
        let eig = hermitian_eig(&CMatrix::identity(2).scale_real(0.5)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_real_rows(&[&[s, s], &[s, -s]]);
        let dec = decomposition_from_isometry(&eig, &h).unwrap();
        assert_eq!(dec.len(), 2);
        for (w, st) in dec.weights.iter().zip(&dec.states) {
            assert!((w - 0.5).abs() < 1e-14);
            assert!((st.amplitudes()[0].norm() - s).abs() < 1e-14);
        }
    }

    #[test]
    fn random_isometry_reconstructs() {
        let mut rng = rng_from_seed(5);
        let rho = random_density(3, 3, &mut rng);
        let eig = hermitian_eig(&rho).unwrap();
        let v = random_isometry(9, 3, &mut rng);
        let dec = decomposition_from_isometry(&eig, &v).unwrap();
        assert!(dec.reconstruction_error(&rho) <= 1e-8);
        assert!((dec.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let bad = CMatrix::from_fn(9, 3, |i, k| if i == k { C64::new(2.0, 0.0) } else { ZERO });
        assert!(matches!(
            decomposition_from_isometry(&eig, &bad),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn sparsify_keeps_isometry_and_targets_state() {
        let fx = Spin1Fixture::new();
        let rho = DensityMatrix::maximally_mixed(3);
        let eig = hermitian_eig(rho.matrix()).unwrap();
        let ens = Ensemble::new(&eig);
        let mut rng = rng_from_seed(2);
        let v = random_isometry(9, 3, &mut rng);
        let chi = fx.psi(1);
        let row = ens.attractor_row(chi.amplitudes()).unwrap();
        let w = sparsify_move(&v, 4, &row, 0.8).unwrap();
        let dec = ens.decomposition(&w);
        assert!(dec.reconstruction_error(rho.matrix()) < 1e-10);
        assert!(dec.states.iter().any(|s| s.phase_distance(&chi) < 1e-10));
    }

    #[test]
    fn rank_one_is_exact() {
        let fx = Spin1Fixture::new();
        let psi = fx.psi(1);
        let rho = DensityMatrix::from_pure(&psi);
        let tol = Tolerances::default();
        let s = support_roof_bounds(&rho, &fx.u, &quick(), &tol).unwrap();
        assert!(s.exact && s.upper_bound == 4.0);
        let n = nonpositivity_roof_bounds(&rho, &fx.u, None, &quick(), &tol).unwrap();
        assert!(n.exact && (n.upper_bound - 17.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_exact_for_both() {
        let fx = Spin1Fixture::new();
        let rho = DensityMatrix::maximally_mixed(3);
        let tol = Tolerances::default();
        let s = support_roof_bounds(&rho, &fx.u, &quick(), &tol).unwrap();
        assert_eq!(s.value(), Some(4.0));
        let n = nonpositivity_roof_bounds(&rho, &fx.u, None, &quick(), &tol).unwrap();
        assert!((n.value().unwrap() - 1.0).abs() < 1e-9);
        assert!(n.decomposition.reconstruction_error(rho.matrix()) < 1e-8);
    }

    #[test]
    fn annealing_is_deterministic_and_below_eigen_value() {
        let fx = Spin1Fixture::new();
        let mut rng = rng_from_seed(9);
        let w = random_simplex(3, &mut rng);
        let rho = DensityMatrix::new(
            &(&fx.psi(1).projector().scale_real(w[0]) + &fx.psi(4).projector().scale_real(w[1]))
                + &fx.phi(2).projector().scale_real(w[2]),
        )
        .unwrap();
        let obj = TotalNonpositivity { u: fx.u.clone() };
        let a = roof_upper_bound(&rho, &obj, &fx.kd_positive_pure_states(), &quick()).unwrap();
        let b = roof_upper_bound(&rho, &obj, &fx.kd_positive_pure_states(), &quick()).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.value <= a.eigen_value);
        assert!(a.decomposition.reconstruction_error(rho.matrix()) <= 1e-8);
        assert!(a.value >= kd_table(&rho, &fx.u).unwrap().total_nonpositivity() - 1e-9);
    }
}
