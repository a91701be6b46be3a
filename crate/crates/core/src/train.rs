//! Complex backpropagation and the online training loop.
//!
//! All four rules minimise the same loss `L = ½ Σ_k |d_k − o_k|²` and return
//! the assembled gradient `∂L/∂w^ℜ + i ∂L/∂w^ℑ` for every weight, so the update
//! is always `w ← w − α·grad`.
//!
//! # Shared skeleton
//!
//! Each neuron carries an error signal `δ_j`. At the output `δ_j = d_j − o_j`.
//! A rule turns `δ_j` into a local signal `g_j` using the activation at `z_j`,
//! and then
//!
//! ```text
//! grad w_ji = −conj(a_i) g_j          grad b_j = −g_j
//! δ_i (previous layer) = Σ_j conj(w_ji) g_j
//! ```
//!
//! # Local signals
//!
//! With `σ = u + iv` and its partials at `z_j`:
//!
//! ```text
//! partial derivatives   g = (u_x + i u_y) δ^ℜ + (v_x + i v_y) δ^ℑ
//! split                 g = u_x δ^ℜ + i v_y δ^ℑ
//! CR simplified         g = conj(σ′) δ,     conj(σ′) = u_x − i v_x
//! complex derivative    g = σ′(conj z) δ
//! ```
//!
//! The general rule holds for any differentiable `σ`. The split rule is the
//! general rule with `u_y = v_x = 0`. The CR rule uses `u_x = v_y` and
//! `u_y = −v_x`. The complex-derivative rule evaluates the derivative at the
//! conjugated pre-activation; this equals `conj(σ′(z))` exactly when
//! `σ(conj z) = conj σ(z)`, which is therefore checked at every trace point.

use crate::activations::{ActivationSpec, Category};
use crate::cplx::Complex;
use crate::error::{Error, Result};
use crate::network::{loss, ForwardTrace, Network};
use crate::rng::seeded;
use crate::tasks::Dataset;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Minimum distance from a singular locus for the complex-derivative rule.
pub const SINGULARITY_EXCLUSION: f64 = 0.05;
/// Largest accepted `|σ(conj z) − conj σ(z)|` for the complex-derivative rule.
pub const CONJUGATION_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ComplexDerivative,
    PartialDerivatives,
    CrSimplified,
    Split,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::ComplexDerivative, Algorithm::PartialDerivatives, Algorithm::CrSimplified, Algorithm::Split];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ComplexDerivative => "complex_derivative",
            Algorithm::PartialDerivatives => "partial_derivatives",
            Algorithm::CrSimplified => "cr_simplified",
            Algorithm::Split => "split",
        }
    }

    /// Static compatibility of this rule with one activation.
    pub fn supports(self, spec: &ActivationSpec) -> Result<()> {
        let reason = match self {
            Algorithm::PartialDerivatives if !spec.differentiable() => Some("activation is not differentiable"),
            Algorithm::Split if spec.category() != Category::SplitRealImaginary => {
                Some("activation is not split real-imaginary")
            }
            Algorithm::Split if !spec.differentiable() => Some("activation is not differentiable"),
            Algorithm::CrSimplified | Algorithm::ComplexDerivative if !spec.holomorphic() => {
                Some("activation is not holomorphic")
            }
            _ => None,
        };
        match reason {
            Some(reason) => Err(Error::AlgorithmMismatch {
                algorithm: self.name().into(),
                id: spec.id().into(),
                reason: reason.into(),
            }),
            None => Ok(()),
        }
    }

    pub fn supports_network(self, net: &Network) -> Result<()> {
        net.layers.iter().try_for_each(|l| self.supports(&l.activation))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        let alias = match key.as_str() {
            "cbp" | "complex" => "complex_derivative",
            "partial" | "partials" => "partial_derivatives",
            "cr" => "cr_simplified",
            other => other,
        };
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm `{s}`")))
    }
}

/// Gradients laid out like the network: `weights[l][j][i]` and `bias[l][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSet {
    pub weights: Vec<Vec<Vec<Complex>>>,
    pub bias: Vec<Vec<Complex>>,
}

impl GradientSet {
    pub fn zeros(net: &Network) -> Self {
        GradientSet {
            weights: net.layers.iter().map(|l| vec![vec![Complex::default(); l.inputs()]; l.outputs()]).collect(),
            bias: net.layers.iter().map(|l| vec![Complex::default(); l.outputs()]).collect(),
        }
    }

    /// Entries in a fixed order: per layer, per unit, the weights then the bias.
    pub fn entries(&self) -> Vec<Complex> {
        let mut out = Vec::new();
        for (rows, bias) in self.weights.iter().zip(&self.bias) {
            for (row, &b) in rows.iter().zip(bias) {
                out.extend_from_slice(row);
                out.push(b);
            }
        }
        out
    }

    /// Largest per-entry modulus of the difference.
    pub fn max_deviation(&self, other: &GradientSet) -> f64 {
        self.entries().iter().zip(other.entries()).map(|(&a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|g| g.abs()).fold(0.0, f64::max)
    }
}

fn singular_guard(spec: &ActivationSpec, z: Complex) -> Result<()> {
    let near = spec
        .singularities()
        .into_iter()
        .map(|s| (s.locus.distance(z), s.locus))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match near {
        Some((d, locus)) if d < SINGULARITY_EXCLUSION => {
            Err(Error::Singularity { id: spec.id().into(), z, locus: locus.to_string() })
        }
        _ => Ok(()),
    }
}

/// `g_j` for one neuron with pre-activation `z` and error signal `delta`.
fn local_signal(algorithm: Algorithm, spec: &ActivationSpec, z: Complex, delta: Complex) -> Result<Complex> {
    algorithm.supports(spec)?;
    match algorithm {
        Algorithm::PartialDerivatives => {
            let j = spec.partials(z)?;
            Ok(Complex::new(j.ux, j.uy) * delta.re + Complex::new(j.vx, j.vy) * delta.im)
        }
        Algorithm::Split => {
            let j = spec.partials(z)?;
            Ok(Complex::new(j.ux * delta.re, j.vy * delta.im))
        }
        Algorithm::CrSimplified => {
            let j = spec.partials(z)?;
            Ok(Complex::new(j.ux, -j.vx) * delta)
        }
        Algorithm::ComplexDerivative => {
            singular_guard(spec, z)?;
            let gap = (spec.eval(z.conj())? - spec.eval(z)?.conj()).abs();
            if !(gap <= CONJUGATION_TOLERANCE) {
                return Err(Error::AssumptionViolation {
                    id: spec.id().into(),
                    z,
                    reason: format!("|σ(conj z) − conj σ(z)| = {gap:e} exceeds {CONJUGATION_TOLERANCE:e}"),
                });
            }
            Ok(spec.complex_derivative(z.conj())? * delta)
        }
    }
}

/// Gradient of `½ Σ|d − o|²` for the sample whose forward pass is `trace`.
pub fn backward(net: &Network, trace: &ForwardTrace, d: &[Complex], algorithm: Algorithm) -> Result<GradientSet> {
    let out = trace.output();
    if d.len() != out.len() {
        return Err(Error::LengthMismatch { expected: out.len(), got: d.len() });
    }
    let mut grads = GradientSet::zeros(net);
    let mut delta: Vec<Complex> = out.iter().zip(d).map(|(&o, &t)| t - o).collect();
    for l in (0..net.layers.len()).rev() {
        let layer = &net.layers[l];
        let input = trace.layer_input(l);
        let mut g = Vec::with_capacity(layer.outputs());
        for (j, &z) in trace.z[l].iter().enumerate() {
            g.push(local_signal(algorithm, &layer.activation, z, delta[j]).map_err(|e| e.at_unit(l, j))?);
        }
        for (j, &gj) in g.iter().enumerate() {
            for (i, &a) in input.iter().enumerate() {
                grads.weights[l][j][i] = -(a.conj() * gj);
            }
            grads.bias[l][j] = -gj;
        }
        if l > 0 {
            delta = (0..layer.inputs())
                .map(|i| layer.weights.iter().zip(&g).map(|(row, &gj)| row[i].conj() * gj).sum())
                .collect();
        }
    }
    Ok(grads)
}

/// Forward pass followed by [`backward`].
pub fn gradient(net: &Network, x: &[Complex], d: &[Complex], algorithm: Algorithm) -> Result<GradientSet> {
    let trace = net.forward(x)?;
    backward(net, &trace, d, algorithm)
}

/// Central differences of the loss in `w^ℜ` and `w^ℑ`, assembled as
/// `∂L/∂w^ℜ + i ∂L/∂w^ℑ` for every weight and bias.
pub fn fd_gradient(net: &Network, x: &[Complex], d: &[Complex], h: f64) -> Result<GradientSet> {
    fn slot(n: &mut Network, l: usize, j: usize, i: Option<usize>) -> &mut Complex {
        match i {
            Some(i) => &mut n.layers[l].weights[j][i],
            None => &mut n.layers[l].bias[j],
        }
    }
    let loss_at = |n: &Network| -> Result<f64> { loss(&n.forward(x)?, d) };
    let mut probe = net.clone();
    let mut partial = |l: usize, j: usize, i: Option<usize>| -> Result<Complex> {
        let original = *slot(&mut probe, l, j, i);
        let mut comp = [0.0; 2];
        for (k, step) in [Complex::new(h, 0.0), Complex::new(0.0, h)].into_iter().enumerate() {
            *slot(&mut probe, l, j, i) = original + step;
            let plus = loss_at(&probe);
            *slot(&mut probe, l, j, i) = original - step;
            let minus = loss_at(&probe);
            *slot(&mut probe, l, j, i) = original;
            comp[k] = (plus? - minus?) / (2.0 * h);
        }
        Ok(Complex::new(comp[0], comp[1]))
    };
    let mut grads = GradientSet::zeros(net);
    for l in 0..net.layers.len() {
        for j in 0..net.layers[l].outputs() {
            for i in 0..net.layers[l].inputs() {
                grads.weights[l][j][i] = partial(l, j, Some(i))?;
            }
            grads.bias[l][j] = partial(l, j, None)?;
        }
    }
    Ok(grads)
}

/// `w ← w − α·grad` for every weight and bias.
pub fn apply_update(net: &mut Network, grads: &GradientSet, alpha: f64) {
    for (l, layer) in net.layers.iter_mut().enumerate() {
        for (j, row) in layer.weights.iter_mut().enumerate() {
            for (i, w) in row.iter_mut().enumerate() {
                *w -= grads.weights[l][j][i] * alpha;
            }
            layer.bias[j] -= grads.bias[l][j] * alpha;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
    pub epochs: usize,
    pub shuffle: bool,
    pub seed: u64,
    pub stop_loss: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            algorithm: Algorithm::PartialDerivatives,
            learning_rate: 0.1,
            epochs: 100,
            shuffle: true,
            seed: 0,
            stop_loss: 0.0,
        }
    }
}

impl TrainConfig {
    /// `α = 0` is accepted as a frozen run; negative or non-finite values are not.
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be finite and ≥ 0, got {}", self.learning_rate)));
        }
        if !(self.stop_loss >= 0.0) {
            return Err(Error::Config(format!("stop_loss must be ≥ 0, got {}", self.stop_loss)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    EpochsExhausted,
    StopLoss,
    NumericFailure { epoch: usize, sample: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: TrainConfig,
    /// `epoch_losses[0]` is the mean loss before training; entry `e` is the
    /// mean loss after epoch `e`.
    pub epoch_losses: Vec<f64>,
    /// Samples whose update was skipped because a trace point hit a kink or singularity.
    pub skipped: usize,
    pub stop: StopReason,
    pub network: Network,
}

impl TrainReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn final_loss(&self) -> f64 {
        *self.epoch_losses.last().expect("at least the initial loss")
    }
}

/// Mean loss over the samples the network can evaluate. Samples that hit a
/// kink or singularity are left out; other errors propagate.
pub fn mean_loss(net: &Network, data: &Dataset) -> Result<f64> {
    let mut total = 0.0;
    let mut n = 0usize;
    for s in &data.samples {
        match net.forward(&s.input) {
            Ok(trace) => {
                total += loss(&trace, &s.target)?;
                n += 1;
            }
            Err(e) if e.is_skippable() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(if n == 0 { f64::NAN } else { total / n as f64 })
}

/// Online training: one update per sample, epochs in order, optionally
/// reshuffled each epoch from `cfg.seed`.
pub fn train(mut net: Network, data: &Dataset, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    cfg.algorithm.supports_network(&net)?;
    if data.input_width() != net.input_width || data.target_width() != net.output_width() {
        return Err(Error::Config(format!(
            "dataset widths {}→{} do not match network {:?}",
            data.input_width(),
            data.target_width(),
            net.widths()
        )));
    }
    let mut rng = seeded(cfg.seed);
    let mut order: Vec<usize> = (0..data.samples.len()).collect();
    let mut skipped = 0;
    let numeric = |e: &Error| matches!(e.root(), Error::Overflow { .. });
    let initial = mean_loss(&net, data);
    let mut losses = vec![initial.as_ref().copied().unwrap_or(f64::NAN)];
    let finish = |net: Network, losses: Vec<f64>, skipped, stop| TrainReport {
        config: cfg.clone(),
        epoch_losses: losses,
        skipped,
        stop,
        network: net,
    };
    match initial {
        Ok(v) if v.is_finite() => {}
        Ok(_) => return Ok(finish(net, losses, skipped, StopReason::NumericFailure { epoch: 0, sample: 0 })),
        Err(e) if numeric(&e) => {
            return Ok(finish(net, losses, skipped, StopReason::NumericFailure { epoch: 0, sample: 0 }))
        }
        Err(e) => return Err(e),
    }
    if losses[0] <= cfg.stop_loss {
        return Ok(finish(net, losses, skipped, StopReason::StopLoss));
    }
    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        for &k in &order {
            let s = &data.samples[k];
            let step = gradient(&net, &s.input, &s.target, cfg.algorithm);
            match step {
                Ok(g) => apply_update(&mut net, &g, cfg.learning_rate),
                Err(e) if e.is_skippable() => {
                    skipped += 1;
                    continue;
                }
                Err(e) if numeric(&e) => {
                    return Ok(finish(net, losses, skipped, StopReason::NumericFailure { epoch, sample: k }))
                }
                Err(e) => return Err(e),
            }
            if !net.is_finite() {
                return Ok(finish(net, losses, skipped, StopReason::NumericFailure { epoch, sample: k }));
            }
        }
        let mean = match mean_loss(&net, data) {
            Ok(v) => v,
            Err(e) if numeric(&e) => f64::NAN,
            Err(e) => return Err(e),
        };
        losses.push(mean);
        if !mean.is_finite() {
            let last = *order.last().unwrap_or(&0);
            return Ok(finish(net, losses, skipped, StopReason::NumericFailure { epoch, sample: last }));
        }
        if mean <= cfg.stop_loss {
            return Ok(finish(net, losses, skipped, StopReason::StopLoss));
        }
    }
    Ok(finish(net, losses, skipped, StopReason::EpochsExhausted))
}
