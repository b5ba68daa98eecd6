//! Activation functions, neurons, layers and feed-forward networks.
//!
//! A neuron with weights `w`, bias `b` and activation `g` maps `x` to
//! `g(<w, x> + b)`. A layer stacks `n` neurons of equal input arity `k`, and a
//! network composes layers left to right with `k_{l+1} = n_l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_len, dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Identity,
    Sigmoid,
    Tanh,
    Relu,
}

impl ActivationKind {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Identity => x,
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Relu => x.max(0.0),
        }
    }
}

pub fn activate(kind: ActivationKind, x: f64) -> f64 {
    kind.apply(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    weights: Vec<f64>,
    bias: f64,
    activation: ActivationKind,
}

impl Neuron {
    pub fn new(weights: Vec<f64>, bias: f64, activation: ActivationKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidShape("neuron needs at least one weight".into()));
        }
        if !weights.iter().all(|w| w.is_finite()) || !bias.is_finite() {
            return Err(Error::InvalidShape("neuron parameters must be finite".into()));
        }
        Ok(Self { weights, bias, activation })
    }

    /// Identity activation, zero bias.
    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights, 0.0, ActivationKind::Identity)
    }

    pub fn arity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        check_len(self.arity(), x.len())?;
        Ok(self.activation.apply(dot(&self.weights, x) + self.bias))
    }
}

pub fn neuron_forward(neuron: &Neuron, x: &[f64]) -> Result<f64> {
    neuron.forward(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    neurons: Vec<Neuron>,
}

impl Layer {
    pub fn new(neurons: Vec<Neuron>) -> Result<Self> {
        let Some(first) = neurons.first() else {
            return Err(Error::InvalidShape("layer needs at least one neuron".into()));
        };
        let k = first.arity();
        for n in &neurons {
            check_len(k, n.arity())?;
        }
        Ok(Self { neurons })
    }

    /// Identity activations and zero biases: the layer computes `W x` for the
    /// given weight rows.
    pub fn linear(weight_rows: &[Vec<f64>]) -> Result<Self> {
        let neurons = weight_rows
            .iter()
            .map(|w| Neuron::linear(w.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(neurons)
    }

    pub fn input_dim(&self) -> usize {
        self.neurons[0].arity()
    }

    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.input_dim(), x.len())?;
        self.neurons.iter().map(|n| n.forward(x)).collect()
    }
}

pub fn layer_forward(layer: &Layer, x: &[f64]) -> Result<Vec<f64>> {
    layer.forward(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl Network {
    /// Builds a network, rejecting any break in the dimension chain.
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidShape("network needs at least one layer".into()));
        }
        let mut expected = input_dim;
        for (l, layer) in layers.iter().enumerate() {
            if layer.input_dim() != expected {
                return Err(Error::InvalidShape(format!(
                    "layer {} expects {} inputs but receives {}",
                    l + 1,
                    layer.input_dim(),
                    expected
                )));
            }
            expected = layer.width();
        }
        Ok(Self { input_dim, layers })
    }

    /// One identity neuron with zero bias: `x ↦ <w, x>`.
    pub fn single_linear_neuron(weights: &[f64]) -> Result<Self> {
        let layer = Layer::linear(&[weights.to_vec()])?;
        Self::new(weights.len(), vec![layer])
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forward_to(self.depth(), x)
    }

    /// Output of layer `l` (1-based) for a single input.
    pub fn forward_to(&self, l: usize, x: &[f64]) -> Result<Vec<f64>> {
        if l == 0 || l > self.depth() {
            return Err(Error::Index { index: l, layers: self.depth() });
        }
        check_len(self.input_dim, x.len())?;
        let mut h = x.to_vec();
        for layer in &self.layers[..l] {
            h = layer.forward(&h)?;
        }
        Ok(h)
    }

    /// The `n_l × M` output matrix of layer `l` (1-based) over a batch;
    /// column `m` is the layer output for batch element `m`.
    pub fn batch_output_matrix(&self, l: usize, batch: &Dataset) -> Result<Matrix> {
        if l == 0 || l > self.depth() {
            return Err(Error::Index { index: l, layers: self.depth() });
        }
        check_len(self.input_dim, batch.input_dim())?;
        let n = self.layers[l - 1].width();
        let mut z = Matrix::zeros(n, batch.len());
        for (m, x) in batch.inputs().iter().enumerate() {
            for (j, v) in self.forward_to(l, x)?.into_iter().enumerate() {
                z.set(j, m, v);
            }
        }
        Ok(z)
    }
}

pub fn network_forward(net: &Network, x: &[f64]) -> Result<Vec<f64>> {
    net.forward(x)
}

pub fn batch_output_matrix(net: &Network, l: usize, batch: &Dataset) -> Result<Matrix> {
    net.batch_output_matrix(l, batch)
}

/// Paired inputs and scalar targets. A batch is also a `Dataset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidShape("dataset needs at least one sample".into()));
        }
        check_len(inputs.len(), targets.len())?;
        let p = inputs[0].len();
        if p == 0 {
            return Err(Error::InvalidShape("inputs must have dimension >= 1".into()));
        }
        for x in &inputs {
            check_len(p, x.len())?;
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Self> {
        Self::new(self.inputs.clone(), targets)
    }
}
