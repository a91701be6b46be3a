//! Seeded datasets: XOR for one complex neuron, palindrome detection over bit
//! strings, and QAM channel equalisation.
//!
//! XOR packs the two bits into one complex input `x₁ + i x₂` and asks for the
//! same pair back as the target. A sample is classified by thresholding both
//! parts of the output at 0.5 and taking the XOR of the two resulting bits, so
//! the decision boundaries are the two orthogonal lines `Re o = ½` and
//! `Im o = ½`. The real-target variant (`target = x₁ ⊕ x₂`, class from
//! `Re o` alone) is kept for comparison.
//!
//! QAM symbols come from the square grid of odd integers, optionally scaled to
//! unit average power. The received sequence is
//! `r[n] = Σ_k h_k s[n−k] + ν[n]` with zero history before the first symbol and
//! circular Gaussian noise of total variance `σ²`; the input for symbol `n` is
//! the window `[r[n], r[n−1], …]`.

use crate::cplx::Complex;
use crate::error::{Error, Result};
use crate::rng::seeded;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub input: Vec<Complex>,
    pub target: Vec<Complex>,
    /// Class index for classification tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
}

impl Sample {
    pub fn new(input: Vec<Complex>, target: Vec<Complex>) -> Self {
        Sample { input, target, label: None }
    }

    pub fn labelled(input: Vec<Complex>, target: Vec<Complex>, label: u32) -> Self {
        Sample { input, target, label: Some(label) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    /// Generator parameters, echoed for provenance.
    pub params: Value,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(name: &str, samples: Vec<Sample>, params: Value) -> Result<Self> {
        let data = Dataset { name: name.into(), params, samples };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.samples.first().ok_or_else(|| Error::Config("dataset is empty".into()))?;
        for s in &self.samples {
            if s.input.len() != first.input.len() {
                return Err(Error::LengthMismatch { expected: first.input.len(), got: s.input.len() });
            }
            if s.target.len() != first.target.len() {
                return Err(Error::LengthMismatch { expected: first.target.len(), got: s.target.len() });
            }
        }
        Ok(())
    }

    pub fn input_width(&self) -> usize {
        self.samples[0].input.len()
    }

    pub fn target_width(&self) -> usize {
        self.samples[0].target.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let data: Dataset = serde_json::from_str(text)?;
        data.validate()?;
        Ok(data)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Dataset::from_json(&std::fs::read_to_string(path)?)
    }
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// How XOR outputs are read back as classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XorEncoding {
    /// Target `x₁ + i x₂`; class `[Re o > ½] ⊕ [Im o > ½]`.
    TwoBit,
    /// Target `x₁ ⊕ x₂` on the real axis; class `[Re o > ½]`.
    RealTarget,
}

impl XorEncoding {
    pub fn classify(self, o: Complex) -> u32 {
        match self {
            XorEncoding::TwoBit => ((o.re > 0.5) ^ (o.im > 0.5)) as u32,
            XorEncoding::RealTarget => (o.re > 0.5) as u32,
        }
    }
}

impl std::str::FromStr for XorEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-bit" => Ok(XorEncoding::TwoBit),
            "real-target" => Ok(XorEncoding::RealTarget),
            other => Err(Error::Parse(format!("unknown XOR encoding `{other}`"))),
        }
    }
}

/// The four XOR samples in truth-table order `(0,0), (1,0), (0,1), (1,1)`.
pub fn gen_xor_with(encoding: XorEncoding) -> Dataset {
    let samples = [(false, false), (true, false), (false, true), (true, true)]
        .into_iter()
        .map(|(a, b)| {
            let z = Complex::new(bit(a), bit(b));
            let target = match encoding {
                XorEncoding::TwoBit => z,
                XorEncoding::RealTarget => Complex::real(bit(a ^ b)),
            };
            Sample::labelled(vec![z], vec![target], (a ^ b) as u32)
        })
        .collect();
    Dataset::new("xor", samples, json!({ "encoding": encoding })).expect("four samples")
}

pub fn gen_xor() -> Dataset {
    gen_xor_with(XorEncoding::TwoBit)
}

/// Largest bit count enumerated in full; longer strings are subsampled.
pub const SYMMETRY_FULL_BITS: usize = 10;
/// Sample count drawn when the bit count exceeds [`SYMMETRY_FULL_BITS`].
pub const SYMMETRY_SUBSAMPLE: usize = 1024;

/// Palindrome detection over `bits`-long strings. Bit `k` of the string is
/// bit `bits−1−k` of its index, and input `k` is `bit_{2k} + i bit_{2k+1}`.
pub fn gen_symmetry(bits: usize, seed: u64) -> Result<Dataset> {
    if bits % 2 != 0 || !(2..=12).contains(&bits) {
        return Err(Error::Config(format!("symmetry bits must be even and in 2..=12, got {bits}")));
    }
    let total = 1usize << bits;
    let indices: Vec<usize> = if bits <= SYMMETRY_FULL_BITS {
        (0..total).collect()
    } else {
        let mut picked = sample_indices(&mut seeded(seed), total, SYMMETRY_SUBSAMPLE).into_vec();
        picked.sort_unstable();
        picked
    };
    let samples = indices
        .into_iter()
        .map(|v| {
            let b: Vec<bool> = (0..bits).map(|k| (v >> (bits - 1 - k)) & 1 == 1).collect();
            let palindrome = (0..bits / 2).all(|k| b[k] == b[bits - 1 - k]);
            let input = b.chunks(2).map(|p| Complex::new(bit(p[0]), bit(p[1]))).collect();
            Sample::labelled(input, vec![Complex::real(bit(palindrome))], palindrome as u32)
        })
        .collect();
    Dataset::new("symmetry", samples, json!({ "bits": bits, "seed": seed }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QamScale {
    /// Odd-integer grid scaled to unit average power.
    UnitPower,
    /// Odd-integer grid `{±1, ±3, …}` as is.
    Integer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QamParams {
    pub order: usize,
    pub n: usize,
    pub noise_sigma: f64,
    pub channel: Vec<Complex>,
    pub seed: u64,
    pub scale: QamScale,
}

impl QamParams {
    /// The default mild-ISI channel `[1, 0.3+0.2i]` with `σ = 0.05`.
    pub fn isi(order: usize, n: usize, seed: u64) -> Self {
        QamParams {
            order,
            n,
            noise_sigma: 0.05,
            channel: vec![Complex::real(1.0), Complex::new(0.3, 0.2)],
            seed,
            scale: QamScale::UnitPower,
        }
    }
}

/// Constellation points of a square QAM of `order` ∈ {4, 16}.
pub fn qam_constellation(order: usize, scale: QamScale) -> Result<Vec<Complex>> {
    let side = match order {
        4 => 2,
        16 => 4,
        _ => return Err(Error::Config(format!("QAM order must be 4 or 16, got {order}"))),
    };
    let levels: Vec<f64> = (0..side).map(|k| (2 * k) as f64 - (side - 1) as f64).collect();
    // Mean of l² over the odd levels, doubled for the two axes.
    let power = 2.0 * levels.iter().map(|l| l * l).sum::<f64>() / side as f64;
    let k = match scale {
        QamScale::UnitPower => power.sqrt().recip(),
        QamScale::Integer => 1.0,
    };
    Ok(levels.iter().flat_map(|&re| levels.iter().map(move |&im| Complex::new(re * k, im * k))).collect())
}

pub fn gen_qam_with(p: &QamParams) -> Result<Dataset> {
    if p.n == 0 {
        return Err(Error::Config("QAM sample count must be at least 1".into()));
    }
    if !(p.noise_sigma >= 0.0 && p.noise_sigma.is_finite()) {
        return Err(Error::Config(format!("noise sigma must be ≥ 0, got {}", p.noise_sigma)));
    }
    if p.channel.is_empty() {
        return Err(Error::Config("channel needs at least one tap".into()));
    }
    let points = qam_constellation(p.order, p.scale)?;
    let mut rng = seeded(p.seed);
    let symbols: Vec<Complex> = (0..p.n).map(|_| points[rng.random_range(0..points.len())]).collect();
    let noise = Normal::new(0.0, p.noise_sigma / 2f64.sqrt()).expect("σ is finite and non-negative");
    let received: Vec<Complex> = (0..p.n)
        .map(|n| {
            let clean: Complex =
                p.channel.iter().enumerate().filter(|&(k, _)| k <= n).map(|(k, &h)| h * symbols[n - k]).sum();
            if p.noise_sigma > 0.0 {
                clean + Complex::new(noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                clean
            }
        })
        .collect();
    let taps = p.channel.len();
    let samples = (0..p.n)
        .map(|n| {
            let input = (0..taps).map(|k| if k <= n { received[n - k] } else { Complex::default() }).collect();
            Sample::new(input, vec![symbols[n]])
        })
        .collect();
    Dataset::new("qam", samples, serde_json::to_value(p)?)
}

pub fn gen_qam(order: usize, n: usize, noise_sigma: f64, channel: &[Complex], seed: u64) -> Result<Dataset> {
    gen_qam_with(&QamParams { order, n, noise_sigma, channel: channel.to_vec(), seed, scale: QamScale::UnitPower })
}
