//! Layered complex perceptron.
//!
//! Layer `l` maps its input `a^(l-1)` to
//!
//! ```text
//! z_j^(l) = Σ_i w_ji^(l) a_i^(l-1) + b_j^(l),    a_j^(l) = σ_l(z_j^(l))
//! ```
//!
//! The bias is an ordinary weight whose input is fixed at `1 + 0i`, so every
//! backpropagation rule treats it like any other weight. The loss is
//! `L = ½ Σ_k |d_k − o_k|²`.

use crate::activations::ActivationSpec;
use crate::cplx::Complex;
use crate::error::{Error, Result};
use crate::rng::{seeded, uniform_disc};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `weights[j][i]` connects input `i` to unit `j`.
    pub weights: Vec<Vec<Complex>>,
    pub bias: Vec<Complex>,
    pub activation: ActivationSpec,
}

impl Layer {
    pub fn new(weights: Vec<Vec<Complex>>, bias: Vec<Complex>, activation: ActivationSpec) -> Result<Self> {
        let width = weights.first().map_or(0, Vec::len);
        if weights.is_empty() || width == 0 || weights.iter().any(|r| r.len() != width) {
            return Err(Error::Config("weight matrix must be non-empty and rectangular".into()));
        }
        if bias.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: weights.len(), got: bias.len() });
        }
        Ok(Layer { weights, bias, activation })
    }

    pub fn inputs(&self) -> usize {
        self.weights[0].len()
    }

    pub fn outputs(&self) -> usize {
        self.weights.len()
    }

    fn is_finite(&self) -> bool {
        self.weights.iter().flatten().chain(&self.bias).all(|w| w.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_width: usize,
    pub layers: Vec<Layer>,
}

/// Everything the backward passes need from one forward evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace {
    pub input: Vec<Complex>,
    /// Pre-activations per layer.
    pub z: Vec<Vec<Complex>>,
    /// Activations per layer; the last entry is the output.
    pub a: Vec<Vec<Complex>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[Complex] {
        self.a.last().expect("network has at least one layer")
    }

    /// Input seen by layer `l`: the network input for `l = 0`.
    pub fn layer_input(&self, l: usize) -> &[Complex] {
        if l == 0 {
            &self.input
        } else {
            &self.a[l - 1]
        }
    }
}

impl Network {
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let first = layers.first().ok_or_else(|| Error::Config("network needs at least one layer".into()))?;
        let net = Network { input_width: first.inputs(), layers };
        net.validate()?;
        Ok(net)
    }

    /// Seeded network with every weight and bias uniform in `|w| ≤ radius`.
    ///
    /// `activations` holds one entry per layer, or a single entry shared by all.
    pub fn init(widths: &[usize], activations: &[ActivationSpec], radius: f64, seed: u64) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::Config("widths need at least two non-zero entries".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("init radius must be positive, got {radius}")));
        }
        let n_layers = widths.len() - 1;
        if activations.len() != 1 && activations.len() != n_layers {
            return Err(Error::LengthMismatch { expected: n_layers, got: activations.len() });
        }
        let mut rng = seeded(seed);
        let layers = (0..n_layers)
            .map(|l| {
                let act = activations[if activations.len() == 1 { 0 } else { l }];
                let mut weights = Vec::with_capacity(widths[l + 1]);
                let mut bias = Vec::with_capacity(widths[l + 1]);
                for _ in 0..widths[l + 1] {
                    weights.push((0..widths[l]).map(|_| uniform_disc(&mut rng, radius)).collect());
                    bias.push(uniform_disc(&mut rng, radius));
                }
                Layer { weights, bias, activation: act }
            })
            .collect();
        Ok(Network { input_width: widths[0], layers })
    }

    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.input_width).chain(self.layers.iter().map(Layer::outputs)).collect()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, Layer::outputs)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.outputs() * (l.inputs() + 1)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(Layer::is_finite)
    }

    pub fn validate(&self) -> Result<()> {
        let mut width = self.input_width;
        for layer in &self.layers {
            if layer.weights.iter().any(|r| r.len() != width) {
                return Err(Error::LengthMismatch { expected: width, got: layer.inputs() });
            }
            if layer.bias.len() != layer.outputs() {
                return Err(Error::LengthMismatch { expected: layer.outputs(), got: layer.bias.len() });
            }
            if !layer.is_finite() {
                return Err(Error::Config("non-finite weight".into()));
            }
            width = layer.outputs();
        }
        if self.layers.is_empty() {
            return Err(Error::Config("network needs at least one layer".into()));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[Complex]) -> Result<ForwardTrace> {
        if x.len() != self.input_width {
            return Err(Error::LengthMismatch { expected: self.input_width, got: x.len() });
        }
        let mut trace = ForwardTrace { input: x.to_vec(), z: Vec::new(), a: Vec::new() };
        for (l, layer) in self.layers.iter().enumerate() {
            let input = trace.layer_input(l);
            let mut zs = Vec::with_capacity(layer.outputs());
            let mut acts = Vec::with_capacity(layer.outputs());
            for (j, (row, &b)) in layer.weights.iter().zip(&layer.bias).enumerate() {
                let z = row.iter().zip(input).fold(b, |acc, (&w, &a)| acc + w * a);
                acts.push(layer.activation.eval(z).map_err(|e| e.at_unit(l, j))?);
                zs.push(z);
            }
            trace.z.push(zs);
            trace.a.push(acts);
        }
        Ok(trace)
    }

    pub fn predict(&self, x: &[Complex]) -> Result<Vec<Complex>> {
        Ok(self.forward(x)?.output().to_vec())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let net: Network = serde_json::from_str(text)?;
        net.validate()?;
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Network::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `½ Σ_k |d_k − o_k|²`
pub fn loss_of(output: &[Complex], d: &[Complex]) -> Result<f64> {
    if output.len() != d.len() {
        return Err(Error::LengthMismatch { expected: output.len(), got: d.len() });
    }
    Ok(0.5 * output.iter().zip(d).map(|(&o, &t)| (t - o).norm_sqr()).sum::<f64>())
}

pub fn loss(trace: &ForwardTrace, d: &[Complex]) -> Result<f64> {
    loss_of(trace.output(), d)
}
