//! The batch normalization transform over a layer output matrix.
//!
//! Row `j` of `Z` (one neuron across the `M` batch elements) is centred by its
//! batch mean `μ_j`, divided by its population standard deviation `σ_j`
//! (divisor `M`), then mapped through `γ_j · (·) + β_j`. There is no epsilon
//! inside the square root; rows with `σ_j ≤ DEGENERACY_TOL` are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_len, dot, Matrix};

/// Standard deviations at or below this value are treated as a constant row.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl BatchStats {
    pub fn width(&self) -> usize {
        self.mu.len()
    }

    /// First row whose standard deviation is too small to divide by.
    pub fn check_nondegenerate(&self) -> Result<()> {
        match self.sigma.iter().position(|&s| !(s > DEGENERACY_TOL)) {
            Some(row) => Err(Error::DegenerateBatch { row, sigma: self.sigma[row] }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BNParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BNParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        check_len(gamma.len(), beta.len())?;
        if gamma.is_empty() {
            return Err(Error::InvalidShape("BN parameters need at least one row".into()));
        }
        if !gamma.iter().chain(&beta).all(|v| v.is_finite()) {
            return Err(Error::InvalidShape("BN parameters must be finite".into()));
        }
        Ok(Self { gamma, beta })
    }

    /// `γ = 1`, `β = 0` on every row.
    pub fn unit(width: usize) -> Self {
        Self { gamma: vec![1.0; width], beta: vec![0.0; width] }
    }

    /// `γ = σ`, `β = μ`: the choice under which the transform returns its input.
    pub fn recovering(stats: &BatchStats) -> Self {
        Self { gamma: stats.sigma.clone(), beta: stats.mu.clone() }
    }

    pub fn width(&self) -> usize {
        self.gamma.len()
    }
}

/// Per-row mean and population standard deviation. Two passes: sum, then
/// centred squares.
pub fn batch_stats(z: &Matrix) -> BatchStats {
    let m = z.cols() as f64;
    let mut mu = Vec::with_capacity(z.rows());
    let mut sigma = Vec::with_capacity(z.rows());
    for j in 0..z.rows() {
        let row = z.row(j);
        let mean = row.iter().sum::<f64>() / m;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
        mu.push(mean);
        sigma.push(var.sqrt());
    }
    BatchStats { mu, sigma }
}

pub fn bn_transform(z: &Matrix, params: &BNParams) -> Result<Matrix> {
    check_len(z.rows(), params.width())?;
    let stats = batch_stats(z);
    stats.check_nondegenerate()?;
    let mut out = Matrix::zeros(z.rows(), z.cols());
    for j in 0..z.rows() {
        let (mu, sigma) = (stats.mu[j], stats.sigma[j]);
        let (gamma, beta) = (params.gamma[j], params.beta[j]);
        for m in 0..z.cols() {
            out.set(j, m, gamma * (z.get(j, m) - mu) / sigma + beta);
        }
    }
    Ok(out)
}

/// A single linear neuron followed by BN with precomputed statistics:
/// `γ (<w, x> − μ) / σ + β`.
pub fn bn_network_forward(w: &[f64], x: &[f64], stats: &BatchStats, params: &BNParams) -> Result<f64> {
    check_len(w.len(), x.len())?;
    check_len(1, stats.width())?;
    check_len(1, params.width())?;
    stats.check_nondegenerate()?;
    Ok(params.gamma[0] * (dot(w, x) - stats.mu[0]) / stats.sigma[0] + params.beta[0])
}
