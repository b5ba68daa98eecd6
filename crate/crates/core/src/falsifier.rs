//! Randomized search for instances that break the initialization inequality
//!
//! ```text
//! ‖W0 − Ŵ*‖² ≤ ‖W0 − W*‖² − (‖W*‖² − <W*, W0>)² / ‖W*‖²     if <W0, W*> > 0
//! ```
//!
//! where `W*` is the closest optimum of the plain least-squares cost and `Ŵ*`
//! the closest optimum of the batch-normalized cost. The standard optimum is
//! unique and comes from the normal equations. The BN cost is invariant under
//! positive scaling, so its optima are open rays `{t d : t > 0}`; we find the
//! directions `d` by descent on the unit sphere and project `W0` onto each ray.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batchnorm::BNParams;
use crate::error::{Error, Result};
use crate::linalg::{check_len, dot, norm, norm_sq, normalize, scale, sub};
use crate::nn::Dataset;
use crate::objective::{
    gram_condition, great_circle_second_difference, least_squares_fit, standard_cost_gradient,
    BnObjective, Weights, MAX_CONDITION,
};

/// Tolerance on `lhs ≤ rhs` used by [`check_inequality`].
pub const HOLDS_TOL: f64 = 1e-12;
/// A [`Violation`] is only recorded when `lhs > rhs + VIOLATION_SLACK`.
pub const VIOLATION_SLACK: f64 = 1e-9;
/// Sphere points closer than this angle (radians) are merged.
pub const DEDUP_ANGLE: f64 = 1e-4;
/// Step (radians) of the tangential second difference used to classify minima.
pub const CURVATURE_STEP: f64 = 1e-4;
/// Resolution of the angular scan that cross-checks two-dimensional instances.
pub const ANGULAR_SCAN_POINTS: usize = 100_000;
/// Attempts made by [`random_instance`] before giving up.
pub const MAX_GENERATION_ATTEMPTS: usize = 100;

const W0_BOX: f64 = 2.0;
const W0_EXCLUDED_RADIUS: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetModel {
    /// `y = Σ_k x_k²`.
    QuadraticOfInputs,
    /// `y = <v, x> + noise_scale · ε` with `v` uniform in `[-2, 2]^p` and
    /// standard normal `ε`.
    LinearPlusNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub p: usize,
    pub n: usize,
    pub input_range: (f64, f64),
    pub target_model: TargetModel,
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            p: 2,
            n: 3,
            input_range: (0.0, 3.0),
            target_model: TargetModel::QuadraticOfInputs,
            noise_scale: 0.0,
            seed: 0,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.n <= self.p {
            return Err(Error::InvalidConfig(format!("need n > p >= 1, got p={} n={}", self.p, self.n)));
        }
        let (lo, hi) = self.input_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("bad input range [{lo}, {hi}]")));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::InvalidConfig("noise_scale must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub trials: usize,
    pub restarts_per_instance: usize,
    /// Initial step of the sphere descent; adapted by backtracking.
    pub step_size: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub master_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            restarts_per_instance: 8,
            step_size: 1e-2,
            max_iters: 10_000,
            grad_tol: 1e-9,
            master_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.restarts_per_instance < 1 {
            return Err(Error::InvalidConfig("restarts_per_instance must be >= 1".into()));
        }
        if !(self.step_size > 0.0) || !(self.grad_tol > 0.0) {
            return Err(Error::InvalidConfig("step_size and grad_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial_index`: `mix64(master_seed ^ mix64(trial_index))`.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix64(master_seed ^ mix64(trial_index))
}

/// Seed of the descent restarts for an instance, kept apart from the stream
/// that generated the instance.
fn restart_seed(instance_seed: u64) -> u64 {
    mix64(instance_seed ^ 0xA5A5_A5A5_5A5A_5A5A)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates both sides of the inequality. Weights are flattened, so matrix
/// weights are compared with the Frobenius (column-wise) norm and inner
/// product.
pub fn check_inequality(w0: &[f64], w_star: &[f64], w_hat_star: &[f64]) -> Result<InequalityCheck> {
    check_len(w0.len(), w_star.len())?;
    check_len(w0.len(), w_hat_star.len())?;
    let star_sq = norm_sq(w_star);
    if star_sq == 0.0 {
        return Err(Error::ZeroOptimum);
    }
    let inner = dot(w0, w_star);
    if !(inner > 0.0) {
        return Err(Error::PreconditionUnmet { inner });
    }
    let lhs = norm_sq(&sub(w0, w_hat_star));
    let gap = star_sq - inner;
    let rhs = norm_sq(&sub(w0, w_star)) - gap * gap / star_sq;
    Ok(InequalityCheck { lhs, rhs, holds: lhs <= rhs + HOLDS_TOL })
}

/// Draws a dataset and an initialization. Inputs are uniform on
/// `input_range^p`; `W0` is uniform on `[-2, 2]^p` outside the ball of radius
/// 0.1. Draws whose Gram matrix or input covariance has condition number above
/// [`MAX_CONDITION`] are redrawn.
pub fn random_instance(spec: &InstanceSpec) -> Result<(Dataset, Weights)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.input_range;
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let inputs: Vec<Vec<f64>> = (0..spec.n)
            .map(|_| (0..spec.p).map(|_| rng.random_range(lo..hi)).collect())
            .collect();
        let targets: Vec<f64> = match spec.target_model {
            TargetModel::QuadraticOfInputs => inputs.iter().map(|x| norm_sq(x)).collect(),
            TargetModel::LinearPlusNoise => {
                let v: Vec<f64> = (0..spec.p).map(|_| rng.random_range(-W0_BOX..W0_BOX)).collect();
                inputs
                    .iter()
                    .map(|x| {
                        let eps: f64 = StandardNormal.sample(&mut rng);
                        dot(&v, x) + spec.noise_scale * eps
                    })
                    .collect()
            }
        };
        let w0 = loop {
            let w: Vec<f64> = (0..spec.p).map(|_| rng.random_range(-W0_BOX..W0_BOX)).collect();
            if norm(&w) > W0_EXCLUDED_RADIUS {
                break w;
            }
        };
        let data = Dataset::new(inputs, targets)?;
        if gram_condition(&data) <= MAX_CONDITION && covariance_condition(&data) <= MAX_CONDITION {
            return Ok((data, Weights(w0)));
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

/// Condition number of the centred inputs' Gram matrix; infinite when some
/// direction `w` gives a constant batch.
fn covariance_condition(data: &Dataset) -> f64 {
    let n = data.len() as f64;
    let p = data.input_dim();
    let mut mean = vec![0.0; p];
    for x in data.inputs() {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / n;
        }
    }
    let centred: Vec<Vec<f64>> = data.inputs().iter().map(|x| sub(x, &mean)).collect();
    let zeros = vec![0.0; centred.len()];
    match Dataset::new(centred, zeros) {
        Ok(c) => gram_condition(&c),
        Err(_) => f64::INFINITY,
    }
}

/// Angle between two unit vectors, accurate for small angles.
fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    2.0 * (norm(&sub(a, b)) / 2.0).min(1.0).asin()
}

/// Orthonormal basis of the tangent space of the unit sphere at `d`.
fn tangent_basis(d: &[f64]) -> Vec<Vec<f64>> {
    let p = d.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(p.saturating_sub(1));
    for k in 0..p {
        let mut v = vec![0.0; p];
        v[k] = 1.0;
        let along = dot(&v, d);
        v = sub(&v, &scale(d, along));
        for b in &basis {
            let c = dot(&v, b);
            v = sub(&v, &scale(b, c));
        }
        if norm(&v) > 1e-8 {
            basis.push(normalize(&v).expect("nonzero"));
        }
        if basis.len() + 1 == p {
            break;
        }
    }
    basis
}

fn is_local_min_on_sphere(obj: &BnObjective, d: &[f64]) -> bool {
    tangent_basis(d).iter().all(|v| {
        great_circle_second_difference(|w| obj.value(w), d, v, CURVATURE_STEP)
            .is_ok_and(|c| c > 0.0)
    })
}

/// Gradient descent on the unit sphere from `start`, renormalizing after every
/// step. The step starts at `config.step_size`, is halved until the cost
/// decreases sufficiently and doubled after each accepted step. Returns the
/// converged point, or `None` if `‖∇‖ ≤ grad_tol` is not reached within
/// `max_iters` iterations.
pub fn sphere_descent(obj: &BnObjective, start: &[f64], config: &SearchConfig) -> Option<Vec<f64>> {
    let mut w = normalize(start)?;
    let mut f = obj.value(&w).ok()?;
    let mut g = obj.gradient(&w).ok()?;
    let mut eta = config.step_size;
    for _ in 0..config.max_iters {
        let gn = g.norm();
        if gn <= config.grad_tol {
            return Some(w);
        }
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let Some(cand) = normalize(&sub(&w, &scale(&g, eta))) else {
                eta *= 0.5;
                continue;
            };
            let (Ok(fc), Ok(gc)) = (obj.value(&cand), obj.gradient(&cand)) else {
                eta *= 0.5;
                continue;
            };
            // Once the required Armijo decrease falls below the rounding error
            // of f, judge the step by the gradient norm instead.
            let noise = 64.0 * f64::EPSILON * f.abs().max(1.0);
            let required = ARMIJO * eta * gn * gn;
            let ok = if required > noise {
                fc <= f - required
            } else {
                fc <= f + noise && gc.norm() < gn
            };
            if ok {
                w = cand;
                f = fc;
                g = gc;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            return None;
        }
        eta *= 2.0;
    }
    (g.norm() <= config.grad_tol).then_some(w)
}

/// Discrete local minima of `θ ↦ Ĉ(cos θ, sin θ)` on an evenly spaced
/// cyclic grid.
pub fn angular_scan_minima(obj: &BnObjective, points: usize) -> Vec<f64> {
    let step = std::f64::consts::TAU / points as f64;
    let values: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 * step;
            obj.value(&[t.cos(), t.sin()]).unwrap_or(f64::INFINITY)
        })
        .collect();
    (0..points)
        .filter(|&i| {
            let prev = values[(i + points - 1) % points];
            let next = values[(i + 1) % points];
            values[i].is_finite() && values[i] <= prev && values[i] < next
        })
        .map(|i| i as f64 * step)
        .collect()
}

fn push_unique(found: &mut Vec<Vec<f64>>, d: Vec<f64>) {
    if found.iter().all(|e| angle_between(e, &d) >= DEDUP_ANGLE) {
        found.push(d);
    }
}

/// Unit directions of the local minima of the BN cost, from
/// `restarts_per_instance` random starts. For `p = 2` an angular scan of
/// [`ANGULAR_SCAN_POINTS`] points is used as a cross-check: any scan minimum
/// not already found is refined by descent from the scan point.
pub fn solve_bn_optima(
    data: &Dataset,
    params: &BNParams,
    config: &SearchConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let obj = BnObjective::new(data, params)?;
    let p = obj.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut converged = Vec::new();
    for _ in 0..config.restarts_per_instance {
        let start: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(d) = sphere_descent(&obj, &start, config) {
            push_unique(&mut converged, d);
        }
    }
    if p == 2 {
        for theta in angular_scan_minima(&obj, ANGULAR_SCAN_POINTS) {
            let start = [theta.cos(), theta.sin()];
            if converged.iter().any(|d| angle_between(d, &start) < 1e-3) {
                continue;
            }
            if let Some(d) = sphere_descent(&obj, &start, config) {
                push_unique(&mut converged, d);
            }
        }
    }
    if converged.is_empty() {
        return Err(Error::NoConvergence { max_iters: config.max_iters });
    }
    let mut minima: Vec<Vec<f64>> =
        converged.into_iter().filter(|d| is_local_min_on_sphere(&obj, d)).collect();
    minima.sort_by(|a, b| lex_cmp(a, b));
    Ok(minima)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Closest attained point to `w0` on the rays `{t d : t > 0}`. Rays with
/// `<w0, d> ≤ 0` have no attained nearest point and are skipped; ties go to
/// the lexicographically smallest direction.
pub fn nearest_optimum(w0: &[f64], directions: &[Vec<f64>]) -> Option<Weights> {
    let mut best: Option<(f64, &Vec<f64>, Vec<f64>)> = None;
    for d in directions {
        let t = dot(w0, d);
        if !(t > 0.0) {
            continue;
        }
        let point = scale(d, t);
        let dist = norm_sq(&sub(w0, &point));
        let better = match &best {
            None => true,
            Some((bd, bdir, _)) => dist < *bd || (dist == *bd && lex_cmp(d, bdir).is_lt()),
        };
        if better {
            best = Some((dist, d, point));
        }
    }
    best.map(|(_, _, p)| Weights(p))
}

/// The BN gradient is homogeneous of degree −1, so a direction converged to
/// `grad_tol` on the unit sphere can miss the tolerance at `t d` for `t < 1`.
/// Re-runs the descent from `d` with tolerance `grad_tol · min(1, t)` and
/// re-projects `w0`; returns `None` unless `‖∇Ĉ(Ŵ*)‖ ≤ grad_tol` holds at the
/// returned point.
fn polish_optimum(data: &Dataset, w0: &[f64], w_hat_star: Weights, config: &SearchConfig) -> Option<Weights> {
    let obj = BnObjective::new(data, &BNParams::unit(1)).ok()?;
    let within = |w: &[f64]| obj.gradient(w).is_ok_and(|g| g.norm() <= config.grad_tol);
    if within(&w_hat_star) {
        return Some(w_hat_star);
    }
    let t = norm(&w_hat_star);
    let d = normalize(&w_hat_star)?;
    let tight = SearchConfig { grad_tol: config.grad_tol * t.min(1.0), ..config.clone() };
    let d = sphere_descent(&obj, &d, &tight)?;
    let polished = nearest_optimum(w0, &[d])?;
    within(&polished).then_some(polished)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    PreconditionUnmet,
    ZeroOptimum,
    IllConditioned,
    DegenerateBatch,
    NoConvergence,
    NoAttainedOptimum,
    GenerationFailed,
}

impl SkipReason {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::PreconditionUnmet { .. } => SkipReason::PreconditionUnmet,
            Error::ZeroOptimum => SkipReason::ZeroOptimum,
            Error::IllConditioned { .. } => SkipReason::IllConditioned,
            Error::NoConvergence { .. } => SkipReason::NoConvergence,
            Error::GenerationFailed { .. } => SkipReason::GenerationFailed,
            _ => SkipReason::DegenerateBatch,
        }
    }
}

/// The weights and inequality sides of one evaluated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub w0: Weights,
    pub w_star: Weights,
    pub w_hat_star: Weights,
    pub lhs: f64,
    pub rhs: f64,
    pub precondition_inner: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LemmaOutcome {
    Violation(Witness),
    Holds(Witness),
    Skipped { reason: SkipReason },
}

/// Computes `W*`, the BN optima and `Ŵ*` for one instance (γ = 1, β = 0) and
/// evaluates the inequality. Solver failures and an unmet precondition are
/// reported as `Skipped`.
pub fn check_lemma_on_instance(data: &Dataset, w0: &[f64], config: &SearchConfig, seed: u64) -> LemmaOutcome {
    let skip = |e: &Error| LemmaOutcome::Skipped { reason: SkipReason::from_error(e) };
    let w_star = match least_squares_fit(data) {
        Ok(w) => w,
        Err(e) => return skip(&e),
    };
    if norm_sq(&w_star) == 0.0 {
        return skip(&Error::ZeroOptimum);
    }
    let inner = dot(w0, &w_star);
    if !(inner > 0.0) {
        return skip(&Error::PreconditionUnmet { inner });
    }
    let directions = match solve_bn_optima(data, &BNParams::unit(1), config, seed) {
        Ok(d) => d,
        Err(e) => return skip(&e),
    };
    let Some(w_hat_star) = nearest_optimum(w0, &directions) else {
        return LemmaOutcome::Skipped { reason: SkipReason::NoAttainedOptimum };
    };
    let Some(w_hat_star) = polish_optimum(data, w0, w_hat_star, config) else {
        return LemmaOutcome::Skipped { reason: SkipReason::NoConvergence };
    };
    let check = match check_inequality(w0, &w_star, &w_hat_star) {
        Ok(c) => c,
        Err(e) => return skip(&e),
    };
    let witness = Witness {
        w0: Weights(w0.to_vec()),
        w_star,
        w_hat_star,
        lhs: check.lhs,
        rhs: check.rhs,
        precondition_inner: inner,
    };
    if witness.lhs > witness.rhs + VIOLATION_SLACK {
        LemmaOutcome::Violation(witness)
    } else {
        LemmaOutcome::Holds(witness)
    }
}

/// A self-contained record of one instance that breaks the inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    /// Generator parameters; absent for fixed instances.
    pub instance: Option<InstanceSpec>,
    pub dataset: Dataset,
    #[serde(rename = "W0")]
    pub w0: Weights,
    #[serde(rename = "W_star")]
    pub w_star: Weights,
    #[serde(rename = "What_star")]
    pub w_hat_star: Weights,
    pub lhs: f64,
    pub rhs: f64,
    pub precondition_inner: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub trials: usize,
    pub violated: usize,
    pub held: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

impl SearchSummary {
    fn from_outcomes(outcomes: Vec<(usize, Option<InstanceSpec>, Option<Dataset>, LemmaOutcome)>) -> Self {
        let mut s = SearchSummary { trials: outcomes.len(), violated: 0, held: 0, skipped: 0, violations: vec![] };
        for (trial, instance, dataset, outcome) in outcomes {
            match outcome {
                LemmaOutcome::Violation(w) => {
                    s.violated += 1;
                    s.violations.push(Violation {
                        trial,
                        instance,
                        dataset: dataset.expect("evaluated instances carry their dataset"),
                        w0: w.w0,
                        w_star: w.w_star,
                        w_hat_star: w.w_hat_star,
                        lhs: w.lhs,
                        rhs: w.rhs,
                        precondition_inner: w.precondition_inner,
                    });
                }
                LemmaOutcome::Holds(_) => s.held += 1,
                LemmaOutcome::Skipped { .. } => s.skipped += 1,
            }
        }
        s
    }
}

/// Result of one trial of [`search`], before aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub instance: InstanceSpec,
    pub dataset: Option<Dataset>,
    pub outcome: LemmaOutcome,
}

/// Runs trial `trial` of a search: the instance seed is
/// `trial_seed(master_seed, trial)`.
pub fn run_trial(config: &SearchConfig, template: &InstanceSpec, trial: usize) -> TrialRecord {
    let instance = InstanceSpec { seed: trial_seed(config.master_seed, trial as u64), ..template.clone() };
    match random_instance(&instance) {
        Ok((data, w0)) => {
            let outcome = check_lemma_on_instance(&data, &w0, config, restart_seed(instance.seed));
            TrialRecord { trial, instance, dataset: Some(data), outcome }
        }
        Err(e) => TrialRecord {
            trial,
            instance,
            dataset: None,
            outcome: LemmaOutcome::Skipped { reason: SkipReason::from_error(&e) },
        },
    }
}

/// Runs `config.trials` independent random trials. Trials run on the current
/// rayon pool; results are keyed by trial index, so the summary does not
/// depend on the number of threads.
pub fn search(config: &SearchConfig, template: &InstanceSpec) -> Result<SearchSummary> {
    config.validate()?;
    template.validate()?;
    let records: Vec<TrialRecord> =
        (0..config.trials).into_par_iter().map(|t| run_trial(config, template, t)).collect();
    Ok(SearchSummary::from_outcomes(
        records
            .into_iter()
            .map(|r| (r.trial, Some(r.instance), r.dataset, r.outcome))
            .collect(),
    ))
}

/// Runs `config.trials` copies of a fixed instance. Every copy uses the same
/// descent seed, so all copies agree.
pub fn search_fixed(config: &SearchConfig, data: &Dataset, w0: &[f64]) -> Result<SearchSummary> {
    config.validate()?;
    let seed = restart_seed(config.master_seed);
    let outcomes = (0..config.trials)
        .into_par_iter()
        
        .map(|t| (t, None, Some(data.clone()), check_lemma_on_instance(data, w0, config, seed)))
        .collect();
    Ok(SearchSummary::from_outcomes(outcomes))
}

/// Gradient norms needed to re-validate a stored [`Violation`]:
/// `‖∇Ĉ(Ŵ*)‖` and `‖∇C(W*)‖`.
pub fn violation_gradient_norms(v: &Violation) -> Result<(f64, f64)> {
    let obj = BnObjective::new(&v.dataset, &BNParams::unit(1))?;
    let bn = obj.gradient(&v.w_hat_star)?.norm();
    let std = standard_cost_gradient(&v.w_star, &v.dataset)?.norm();
    Ok((bn, std))
}
