//! Squared-error costs of a single linear neuron (zero bias), with and without
//! batch normalization of its output, their analytic gradients, and a
//! central-difference gradient oracle.
//!
//! For the BN cost the batch is the whole dataset, so `μ` and `σ` are
//! functions of `w`. Writing `c_i = x_i − x̄` for the centred inputs,
//! `u_i = <w, c_i> / σ(w)` and `σ(w)² = wᵀ S w` with `S` the population
//! covariance of the inputs. The cost is invariant under `w ↦ c w` for `c > 0`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::batchnorm::{BNParams, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{check_len, dot, norm};
use crate::nn::Dataset;

/// Largest Gram-matrix condition number accepted by [`least_squares_fit`].
pub const MAX_CONDITION: f64 = 1e8;

/// Relative central-difference step: `h_i = FD_REL_STEP · max(1, |w_i|)`.
pub const FD_REL_STEP: f64 = 1e-6;

/// Weights of a single zero-bias linear neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weights(pub Vec<f64>);

impl Deref for Weights {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Weights {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gradient(pub Vec<f64>);

impl Deref for Gradient {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

fn residuals(w: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    check_len(data.input_dim(), w.len())?;
    Ok(data.inputs().iter().zip(data.targets()).map(|(x, y)| dot(w, x) - y).collect())
}

/// `Σ_i (<w, x_i> − y_i)²`.
pub fn standard_cost(w: &[f64], data: &Dataset) -> Result<f64> {
    Ok(residuals(w, data)?.iter().map(|r| r * r).sum())
}

/// `2 Σ_i r_i x_i`.
pub fn standard_cost_gradient(w: &[f64], data: &Dataset) -> Result<Gradient> {
    let r = residuals(w, data)?;
    let mut g = vec![0.0; w.len()];
    for (x, ri) in data.inputs().iter().zip(&r) {
        for (gk, xk) in g.iter_mut().zip(x) {
            *gk += 2.0 * ri * xk;
        }
    }
    Ok(Gradient(g))
}

fn gram(data: &Dataset) -> DMatrix<f64> {
    let p = data.input_dim();
    let mut a = DMatrix::zeros(p, p);
    for x in data.inputs() {
        let v = DVector::from_column_slice(x);
        a += &v * v.transpose();
    }
    a
}

/// Spectral condition number of `Σ x_i x_iᵀ` (infinite when singular).
pub fn gram_condition(data: &Dataset) -> f64 {
    let eig = gram(data).symmetric_eigen().eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Unique minimizer of [`standard_cost`] from the normal equations
/// `(Σ x xᵀ) w = Σ y x`.
pub fn least_squares_fit(data: &Dataset) -> Result<Weights> {
    let condition = gram_condition(data);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let mut rhs = DVector::zeros(data.input_dim());
    for (x, y) in data.inputs().iter().zip(data.targets()) {
        rhs += DVector::from_column_slice(x) * *y;
    }
    let chol = gram(data).cholesky().ok_or(Error::IllConditioned { condition })?;
    Ok(Weights(chol.solve(&rhs).iter().cloned().collect()))
}

/// [`bn_cost`] and its gradient with the centred inputs precomputed, for
/// repeated evaluation on one dataset.
#[derive(Debug, Clone)]
pub struct BnObjective {
    centred: Vec<Vec<f64>>,
    targets: Vec<f64>,
    gamma: f64,
    beta: f64,
}

impl BnObjective {
    pub fn new(data: &Dataset, params: &BNParams) -> Result<Self> {
        check_len(1, params.width())?;
        let n = data.len() as f64;
        let mut mean = vec![0.0; data.input_dim()];
        for x in data.inputs() {
            for (m, xk) in mean.iter_mut().zip(x) {
                *m += xk;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let centred = data
            .inputs()
            .iter()
            .map(|x| x.iter().zip(&mean).map(|(a, b)| a - b).collect())
            .collect();
        Ok(Self {
            centred,
            targets: data.targets().to_vec(),
            gamma: params.gamma[0],
            beta: params.beta[0],
        })
    }

    pub fn dim(&self) -> usize {
        self.centred[0].len()
    }

    /// `<w, c_i>` for every sample and `σ(w)`.
    fn projections(&self, w: &[f64]) -> Result<(Vec<f64>, f64)> {
        check_len(self.dim(), w.len())?;
        let proj: Vec<f64> = self.centred.iter().map(|c| dot(w, c)).collect();
        let n = proj.len() as f64;
        let sigma = (proj.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        if !(sigma > DEGENERACY_TOL) {
            return Err(Error::DegenerateBatch { row: 0, sigma });
        }
        Ok((proj, sigma))
    }

    pub fn value(&self, w: &[f64]) -> Result<f64> {
        check_len(self.dim(), w.len())?;
        let n = self.centred.len() as f64;
        let sigma = (self.centred.iter().map(|c| dot(w, c).powi(2)).sum::<f64>() / n).sqrt();
        if !(sigma > DEGENERACY_TOL) {
            return Err(Error::DegenerateBatch { row: 0, sigma });
        }
        Ok(self
            .centred
            .iter()
            .zip(&self.targets)
            .map(|(c, y)| (self.gamma * dot(w, c) / sigma + self.beta - y).powi(2))
            .sum())
    }

    /// With `s = S w = (1/N) Σ <w, c_i> c_i` and `u_i = <w, c_i> / σ`:
    /// `∂u_i/∂w = (c_i − u_i s / σ) / σ`.
    pub fn gradient(&self, w: &[f64]) -> Result<Gradient> {
        let (proj, sigma) = self.projections(w)?;
        let n = proj.len() as f64;
        let p = w.len();

        let mut s = vec![0.0; p];
        for (c, v) in self.centred.iter().zip(&proj) {
            for (sk, ck) in s.iter_mut().zip(c) {
                *sk += v * ck / n;
            }
        }

        let mut g = vec![0.0; p];
        for ((c, v), y) in self.centred.iter().zip(&proj).zip(&self.targets) {
            let u = v / sigma;
            let coef = 2.0 * (self.gamma * u + self.beta - y) * self.gamma / sigma;
            for k in 0..p {
                g[k] += coef * (c[k] - u * s[k] / sigma);
            }
        }
        Ok(Gradient(g))
    }
}

/// `Σ_i (γ (<w, x_i> − μ(w)) / σ(w) + β − y_i)²` with the whole dataset as
/// the batch.
pub fn bn_cost(w: &[f64], data: &Dataset, params: &BNParams) -> Result<f64> {
    check_len(data.input_dim(), w.len())?;
    BnObjective::new(data, params)?.value(w)
}

/// Analytic gradient of [`bn_cost`], differentiating through `μ(w)` and `σ(w)`.
pub fn bn_cost_gradient(w: &[f64], data: &Dataset, params: &BNParams) -> Result<Gradient> {
    check_len(data.input_dim(), w.len())?;
    BnObjective::new(data, params)?.gradient(w)
}

/// Central differences `(f(w + h e_i) − f(w − h e_i)) / 2h` with
/// `h_i = rel_step · max(1, |w_i|)`.
pub fn finite_diff_gradient<F>(f: F, w: &[f64], rel_step: f64) -> Result<Gradient>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut g = Vec::with_capacity(w.len());
    let mut probe = w.to_vec();
    for i in 0..w.len() {
        let h = rel_step * w[i].abs().max(1.0);
        probe[i] = w[i] + h;
        let up = f(&probe)?;
        probe[i] = w[i] - h;
        let down = f(&probe)?;
        probe[i] = w[i];
        g.push((up - down) / (2.0 * h));
    }
    Ok(Gradient(g))
}

/// Centred second difference of `t ↦ f(d cos t + v sin t)` at `t = 0`, i.e.
/// the curvature of `f` along the great circle through unit `d` in the unit
/// tangent direction `v`.
pub fn great_circle_second_difference<F>(f: F, d: &[f64], v: &[f64], step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let at = |t: f64| -> Vec<f64> { d.iter().zip(v).map(|(a, b)| a * t.cos() + b * t.sin()).collect() };
    let centre = f(d)?;
    let plus = f(&at(step))?;
    let minus = f(&at(-step))?;
    Ok((plus - 2.0 * centre + minus) / (step * step))
}

/// Outcome of [`gradient_agreement`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientAgreement {
    pub trials: usize,
    pub max_rel_err: f64,
}

/// Compares [`bn_cost_gradient`] with [`finite_diff_gradient`] at `trials`
/// seeded random points with `‖w‖` uniform in `[0.5, 5]` and uniformly random
/// direction. The relative error is `‖g − g_fd‖ / max(‖g‖, 1e-3 / ‖w‖)`; the
/// floor scales like the gradient itself, which is homogeneous of degree −1.
pub fn gradient_agreement(data: &Dataset, params: &BNParams, trials: usize, seed: u64) -> Result<GradientAgreement> {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};

    let obj = BnObjective::new(data, params)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_err = 0.0f64;
    let mut done = 0;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > 100 * trials.max(1) {
            return Err(Error::DegenerateBatch { row: 0, sigma: 0.0 });
        }
        let dir: Vec<f64> = (0..obj.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let Some(dir) = crate::linalg::normalize(&dir) else { continue };
        let radius = rng.random_range(0.5..=5.0);
        let w: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let (Ok(g), Ok(fd)) = (obj.gradient(&w), finite_diff_gradient(|v| obj.value(v), &w, FD_REL_STEP)) else {
            continue;
        };
        let diff: Vec<f64> = g.iter().zip(fd.iter()).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / g.norm().max(1e-3 / radius);
        max_rel_err = max_rel_err.max(rel);
        done += 1;
    }
    Ok(GradientAgreement { trials, max_rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Dataset {
        Dataset::new(vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 3.0]], vec![2.0, 5.0, 13.0])
            .unwrap()
    }

    #[test]
    fn standard_cost_values() {
        let d = example();
        assert_eq!(standard_cost(&[1.0, 3.0], &d).unwrap(), 12.0);
        assert_eq!(standard_cost(&[0.0, 0.0], &d).unwrap(), 198.0);
        let exact = d.with_targets(vec![4.0, 7.0, 11.0]).unwrap();
        assert_eq!(standard_cost(&[1.0, 3.0], &exact).unwrap(), 0.0);
        assert!(standard_cost(&[1.0], &d).is_err());
    }

    #[test]
    fn standard_gradient_values() {
        let d = example();
        assert_eq!(standard_cost_gradient(&[1.0, 3.0], &d).unwrap().0, vec![0.0, 0.0]);
        let g = standard_cost_gradient(&[0.0, 0.0], &d).unwrap();
        let fd = finite_diff_gradient(|w| standard_cost(w, &d), &[0.0, 0.0], FD_REL_STEP).unwrap();
        for (a, b) in g.iter().zip(fd.iter()) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
        }
    }

    #[test]
    fn least_squares_on_example() {
        let w = least_squares_fit(&example()).unwrap();
        assert!((w[0] - 1.0).abs() <= 1e-9 && (w[1] - 3.0).abs() <= 1e-9);
        assert!(standard_cost_gradient(&w, &example()).unwrap().norm() <= 1e-9);
    }

    #[test]
    fn least_squares_rejects_rank_deficiency() {
        let d = Dataset::new(vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![-1.0, -2.0]], vec![1.0, 2.0, 3.0])
            .unwrap();
        assert!(matches!(least_squares_fit(&d), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn bn_cost_values() {
        let d = example();
        let p = BNParams::unit(1);
        let r = 74f64.sqrt();
        let by_hand = (-10.0 / r - 2.0).powi(2) + (-1.0 / r - 5.0).powi(2) + (11.0 / r - 13.0).powi(2);
        let c = bn_cost(&[1.0, 3.0], &d, &p).unwrap();
        assert!((c - by_hand).abs() <= 1e-12);
        assert!((c - 173.565_557_256_458_65).abs() <= 1e-10);
        assert!((bn_cost(&[2.0, 6.0], &d, &p).unwrap() - c).abs() <= 1e-12);
        assert!((bn_cost(&[5.0, 3.0], &d, &p).unwrap() - 173.143_223_445_631_75).abs() <= 1e-10);
    }

    #[test]
    fn bn_cost_at_zero_is_degenerate() {
        let r = bn_cost(&[0.0, 0.0], &example(), &BNParams::unit(1));
        assert!(matches!(r, Err(Error::DegenerateBatch { row: 0, .. })));
        assert!(bn_cost_gradient(&[0.0, 0.0], &example(), &BNParams::unit(1)).is_err());
    }

    #[test]
    fn bn_gradient_at_standard_optimum() {
        // reference values from a 40-digit evaluation of the derivative
        let g = bn_cost_gradient(&[1.0, 3.0], &example(), &BNParams::unit(1)).unwrap();
        assert!((g[0] + 0.339317432008986).abs() <= 1e-12);
        assert!((g[1] - 0.113105810669662).abs() <= 1e-12);
    }

    #[test]
    fn bn_gradient_vanishes_on_ray() {
        let g = bn_cost_gradient(&[5.0, 3.0], &example(), &BNParams::unit(1)).unwrap();
        assert!(g.norm() <= 1e-8);
    }

    #[test]
    fn bn_gradient_with_general_affine() {
        let d = example();
        let p = BNParams::new(vec![1.7], vec![-0.4]).unwrap();
        for w in [[1.0, 3.0], [-0.3, 2.2], [4.0, -1.0]] {
            let g = bn_cost_gradient(&w, &d, &p).unwrap();
            let fd = finite_diff_gradient(|v| bn_cost(v, &d, &p), &w, FD_REL_STEP).unwrap();
            for (a, b) in g.iter().zip(fd.iter()) {
                assert!((a - b).abs() <= 1e-5 * g.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn finite_differences_on_simple_functions() {
        let quad = |w: &[f64]| Ok(3.0 * w[0] * w[0] - 2.0 * w[0] * w[1] + 0.5 * w[1] * w[1] + w[0]);
        let w = [1.3, -0.7];
        let g = finite_diff_gradient(quad, &w, FD_REL_STEP).unwrap();
        let exact = [6.0 * w[0] - 2.0 * w[1] + 1.0, -2.0 * w[0] + w[1]];
        for (a, b) in g.iter().zip(exact) {
            assert!((a - b).abs() <= 1e-7 * b.abs().max(1.0));
        }
        let g = finite_diff_gradient(|_| Ok(4.2), &w, FD_REL_STEP).unwrap();
        assert_eq!(g.0, vec![0.0, 0.0]);
    }

    #[test]
    fn finite_differences_propagate_errors() {
        let r = finite_diff_gradient(|w| bn_cost(w, &example(), &BNParams::unit(1)), &[0.0, 0.0], 1e-20);
        assert!(r.is_err());
    }
}
