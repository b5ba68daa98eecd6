//! The three-sample worked example on which batch normalization moves the
//! optimum away from a perfect initialization.
//!
//! Inputs `(1,1), (1,2), (2,3)` with targets `2, 5, 13` (`y = x1² + x2²`),
//! one identity neuron without bias, and BN with `γ = 1`, `β = 0` over the
//! whole dataset as the batch. The least-squares optimum is `W* = (1, 3)` and
//! we initialize at `W0 = W*`. Then the right-hand side of the initialization
//! inequality is zero, which would force `Ŵ* = W0`; but the BN cost has a
//! nonzero gradient at `W0`, and its minima lie on the ray `3 w1 = 5 w2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::batchnorm::BNParams;
use crate::error::Error;
use crate::falsifier::{check_inequality, nearest_optimum};
use crate::linalg::{norm, normalize, sub};
use crate::nn::Dataset;
use crate::objective::{
    great_circle_second_difference, least_squares_fit, standard_cost_gradient, BnObjective, Gradient,
    Weights,
};

/// Gradient norm above which a point is certainly not critical.
pub const TOL_NONCRITICAL: f64 = 1e-3;
/// Gradient norm below which a point counts as critical.
pub const TOL_CRITICAL: f64 = 1e-8;
/// Tolerance on the standard optimum and its gradient.
pub const TOL_STANDARD: f64 = 1e-9;
/// Tolerance on the inequality's right-hand side being zero.
pub const TOL_RHS: f64 = 1e-12;
/// Angular step of the tangential second difference.
pub const SECOND_DIFFERENCE_STEP: f64 = 1e-4;

/// `W0 = W* = (1, 3)`.
pub const EXAMPLE_W0: [f64; 2] = [1.0, 3.0];
/// Any positive multiple of `(5, 3)` minimizes the BN cost.
pub const EXAMPLE_RAY: [f64; 2] = [5.0, 3.0];

pub fn example_dataset() -> Dataset {
    Dataset::new(vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 3.0]], vec![2.0, 5.0, 13.0])
        .expect("fixed example is well formed")
}

fn example_params() -> BNParams {
    BNParams::unit(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    StandardOptimum,
    BnNoncritical,
    RayMinima,
    Inequality,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::StandardOptimum => "standard_optimum",
            Stage::BnNoncritical => "bn_noncritical",
            Stage::RayMinima => "ray_minima",
            Stage::Inequality => "inequality",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("stage {stage} failed: {detail}")]
pub struct StageFailure {
    pub stage: Stage,
    pub detail: String,
}

impl StageFailure {
    fn new(stage: Stage, detail: impl Into<String>) -> Self {
        Self { stage, detail: detail.into() }
    }

    fn from_error(stage: Stage) -> impl Fn(Error) -> Self {
        move |e| Self::new(stage, e.to_string())
    }
}

/// Least-squares fit of `data`, checked to equal `expected` and to zero the
/// standard gradient within [`TOL_STANDARD`]. Returns the fit and its gradient
/// norm.
pub fn verify_standard_optimum(data: &Dataset, expected: &[f64]) -> Result<(Weights, f64), StageFailure> {
    let stage = Stage::StandardOptimum;
    let w = least_squares_fit(data).map_err(StageFailure::from_error(stage))?;
    let g = standard_cost_gradient(&w, data).map_err(StageFailure::from_error(stage))?.norm();
    if g > TOL_STANDARD {
        return Err(StageFailure::new(stage, format!("gradient norm {g:e} at the fit")));
    }
    let dist = norm(&sub(&w, expected));
    if !(dist <= TOL_STANDARD) {
        return Err(StageFailure::new(stage, format!("fit {:?} is {dist:e} away from {expected:?}", w.0)));
    }
    Ok((w, g))
}

/// BN gradient at `w0` (`γ = 1`, `β = 0`); fails unless its norm exceeds
/// [`TOL_NONCRITICAL`].
pub fn verify_bn_noncritical(data: &Dataset, w0: &[f64]) -> Result<Gradient, StageFailure> {
    let stage = Stage::BnNoncritical;
    let obj = BnObjective::new(data, &example_params()).map_err(StageFailure::from_error(stage))?;
    let g = obj.gradient(w0).map_err(StageFailure::from_error(stage))?;
    if !(g.norm() > TOL_NONCRITICAL) {
        return Err(StageFailure::new(stage, format!("BN gradient norm {:e} at W0 vanishes", g.norm())));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayCheck {
    pub direction: Vec<f64>,
    pub grad_norm: f64,
    pub second_difference: f64,
}

/// Checks that the unit vector along `ray` is a strict local minimum of the
/// BN cost on the circle: gradient norm at most [`TOL_CRITICAL`] and positive
/// second difference of `θ ↦ Ĉ(cos θ, sin θ)`.
pub fn verify_ray_minima(data: &Dataset, ray: &[f64]) -> Result<RayCheck, StageFailure> {
    let stage = Stage::RayMinima;
    let obj = BnObjective::new(data, &example_params()).map_err(StageFailure::from_error(stage))?;
    if obj.dim() != 2 {
        return Err(StageFailure::new(stage, "the angular check needs two-dimensional weights"));
    }
    let d = normalize(ray).ok_or_else(|| StageFailure::new(stage, "zero ray"))?;
    let grad_norm = obj.gradient(&d).map_err(StageFailure::from_error(stage))?.norm();
    let tangent = [-d[1], d[0]];
    let second_difference =
        great_circle_second_difference(|w| obj.value(w), &d, &tangent, SECOND_DIFFERENCE_STEP)
            .map_err(StageFailure::from_error(stage))?;
    let check = RayCheck { direction: d, grad_norm, second_difference };
    if !(grad_norm <= TOL_CRITICAL) {
        return Err(StageFailure::new(stage, format!("gradient norm {grad_norm:e} on the ray")));
    }
    if !(second_difference > 0.0) {
        return Err(StageFailure::new(stage, format!("second difference {second_difference:e} is not positive")));
    }
    Ok(check)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImpliedConclusion {
    /// A zero right-hand side forces the closest BN optimum to be `W0`.
    #[serde(rename = "forces_What_star_equals_W0")]
    ForcesWhatStarEqualsW0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LemmaViolated,
    LemmaNotViolated,
}

/// Headline numbers rounded to four decimals, for reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayValues {
    pub standard_optimum: Option<Vec<f64>>,
    #[serde(rename = "bn_gradient_at_W0")]
    pub bn_gradient_at_w0: Option<Vec<f64>>,
    pub critical_direction: Option<Vec<f64>>,
    pub inequality_rhs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    #[serde(rename = "W0")]
    pub w0: Vec<f64>,
    pub standard_optimum: Option<Weights>,
    pub standard_grad_norm_at_optimum: Option<f64>,
    #[serde(rename = "bn_gradient_at_W0")]
    pub bn_gradient_at_w0: Option<Gradient>,
    #[serde(rename = "bn_grad_norm_at_W0")]
    pub bn_grad_norm_at_w0: Option<f64>,
    pub critical_direction: Option<Vec<f64>>,
    pub bn_grad_norm_at_critical: Option<f64>,
    pub tangential_second_difference: Option<f64>,
    /// Nearest point to `W0` on the BN optimum ray.
    #[serde(rename = "What_star")]
    pub w_hat_star: Option<Weights>,
    pub inequality_lhs: Option<f64>,
    pub inequality_rhs: Option<f64>,
    pub implied_conclusion: Option<ImpliedConclusion>,
    pub verdict: Verdict,
    pub failing_stage: Option<Stage>,
    pub failure_detail: Option<String>,
    pub display: DisplayValues,
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn round4_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| round4(x)).collect()
}

impl CounterexampleReport {
    fn empty(w0: &[f64]) -> Self {
        Self {
            w0: w0.to_vec(),
            standard_optimum: None,
            standard_grad_norm_at_optimum: None,
            bn_gradient_at_w0: None,
            bn_grad_norm_at_w0: None,
            critical_direction: None,
            bn_grad_norm_at_critical: None,
            tangential_second_difference: None,
            w_hat_star: None,
            inequality_lhs: None,
            inequality_rhs: None,
            implied_conclusion: None,
            verdict: Verdict::LemmaNotViolated,
            failing_stage: None,
            failure_detail: None,
            display: DisplayValues {
                standard_optimum: None,
                bn_gradient_at_w0: None,
                critical_direction: None,
                inequality_rhs: None,
            },
        }
    }

    fn fail(&mut self, f: StageFailure) {
        if self.failing_stage.is_none() {
            self.failing_stage = Some(f.stage);
            self.failure_detail = Some(f.detail);
        }
    }

    fn fill_display(&mut self) {
        self.display = DisplayValues {
            standard_optimum: self.standard_optimum.as_ref().map(|w| round4_vec(w)),
            bn_gradient_at_w0: self.bn_gradient_at_w0.as_ref().map(|g| round4_vec(g)),
            critical_direction: self.critical_direction.as_ref().map(|d| round4_vec(d)),
            inequality_rhs: self.inequality_rhs.map(round4),
        };
    }
}

/// Runs every stage on `data` with initialization `w0` (which must also be the
/// least-squares optimum) and BN optimum ray `ray`. Later stages still run
/// after a failure; the first failing stage is recorded and the verdict is
/// then `lemma_not_violated`.
pub fn run_verification(data: &Dataset, w0: &[f64], ray: &[f64]) -> CounterexampleReport {
    let mut report = CounterexampleReport::empty(w0);

    match verify_standard_optimum(data, w0) {
        Ok((w, g)) => {
            report.standard_optimum = Some(w);
            report.standard_grad_norm_at_optimum = Some(g);
        }
        Err(f) => {
            // keep whatever fit exists so the report shows what went wrong
            if let Ok(w) = least_squares_fit(data) {
                report.standard_grad_norm_at_optimum = standard_cost_gradient(&w, data).ok().map(|g| g.norm());
                report.standard_optimum = Some(w);
            }
            report.fail(f);
        }
    }

    match verify_bn_noncritical(data, w0) {
        Ok(g) => {
            report.bn_grad_norm_at_w0 = Some(g.norm());
            report.bn_gradient_at_w0 = Some(g);
        }
        Err(f) => {
            if let Ok(g) = BnObjective::new(data, &example_params()).and_then(|o| o.gradient(w0)) {
                report.bn_grad_norm_at_w0 = Some(g.norm());
                report.bn_gradient_at_w0 = Some(g);
            }
            report.fail(f);
        }
    }

    match verify_ray_minima(data, ray) {
        Ok(check) => {
            report.bn_grad_norm_at_critical = Some(check.grad_norm);
            report.tangential_second_difference = Some(check.second_difference);
            report.critical_direction = Some(check.direction);
        }
        Err(f) => {
            report.critical_direction = normalize(ray);
            report.fail(f);
        }
    }

    if let (Some(w_star), Some(d)) = (report.standard_optimum.clone(), report.critical_direction.clone()) {
        let stage = Stage::Inequality;
        match nearest_optimum(w0, &[d]) {
            None => report.fail(StageFailure::new(stage, "W0 has no attained nearest point on the ray")),
            Some(hat) => match check_inequality(w0, &w_star, &hat) {
                Ok(c) => {
                    report.inequality_lhs = Some(c.lhs);
                    report.inequality_rhs = Some(c.rhs);
                    report.w_hat_star = Some(hat);
                    if c.rhs.abs() <= TOL_RHS {
                        report.implied_conclusion = Some(ImpliedConclusion::ForcesWhatStarEqualsW0);
                    } else {
                        report.fail(StageFailure::new(stage, format!("right-hand side {:e} is not zero", c.rhs)));
                    }
                    if c.holds {
                        report.fail(StageFailure::new(stage, "inequality holds at the nearest BN optimum"));
                    }
                }
                Err(e) => report.fail(StageFailure::new(stage, e.to_string())),
            },
        }
    } else {
        report.fail(StageFailure::new(Stage::Inequality, "missing standard optimum or BN direction"));
    }

    let contradiction = matches!(
        (report.inequality_rhs, report.bn_grad_norm_at_w0),
        (Some(rhs), Some(g)) if rhs.abs() <= TOL_RHS && g > TOL_NONCRITICAL
    );
    report.verdict = if contradiction && report.failing_stage.is_none() {
        Verdict::LemmaViolated
    } else {
        Verdict::LemmaNotViolated
    };
    report.fill_display();
    report
}

/// The full check on the worked example.
pub fn run_full_verification() -> CounterexampleReport {
    run_verification(&example_dataset(), &EXAMPLE_W0, &EXAMPLE_RAY)
}

/// The worked example with its targets replaced by the exact linear targets
/// `<(1, 3), x>`. The standard optimum is unchanged but the BN cost is then
/// critical at `W0`, so the contradiction disappears.
pub fn linear_target_variant() -> Dataset {
    let data = example_dataset();
    let targets = data.inputs().iter().map(|x| crate::linalg::dot(&EXAMPLE_W0, x)).collect();
    data.with_targets(targets).expect("same shape")
}

/// Whether the BN cost (`γ = 1`, `β = 0`) is critical at `w`, i.e. its
/// gradient norm is at most [`TOL_CRITICAL`].
pub fn is_critical(data: &Dataset, w: &[f64]) -> crate::error::Result<bool> {
    let g = BnObjective::new(data, &example_params())?.gradient(w)?;
    Ok(g.norm() <= TOL_CRITICAL)
}
