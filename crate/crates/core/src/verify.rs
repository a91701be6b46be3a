//! Executable property checks.
//!
//! Each check returns a [`CheckReport`]: pass flag, worst residual, witness
//! points, and how many samples were examined or skipped. Every threshold the
//! checks use lives in [`thresholds`].
//!
//! # Cauchy–Riemann scan
//!
//! At each grid node clear of singularities and kinks the central-difference
//! jet gives `(u_x, u_y, v_x, v_y)`, and the residual is
//! `max(|u_x − v_y|, |u_y + v_x|)`. A holomorphic function has residual at the
//! level of the difference error; a split function such as `tanh x + i tanh y`
//! has `u_x − v_y = sech²x − sech²y`, which is order one off the diagonals.
//!
//! # Liouville probe
//!
//! The probe records `max |σ|` on circles of growing radius. A bounded entire
//! function is constant, so a non-constant spec flagged holomorphic must
//! either grow across the radii or carry a declared singularity inside the
//! largest circle.

use crate::activations::{ActivationSpec, Bound, Category, Kind};
use crate::cplx::{angle_diff, cr_residual, wirtinger_fd, Complex};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::render::Fixture;
use crate::rng::{seeded, uniform_disc};
use crate::train::{fd_gradient, gradient, Algorithm, GradientSet};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// The single table of pass/fail thresholds.
pub mod thresholds {
    /// Largest CR residual accepted as holomorphic.
    pub const CR: f64 = 1e-5;
    /// Smallest CR residual accepted as a violation witness.
    pub const CR_WITNESS: f64 = 1e-3;
    /// Difference step for CR jets.
    pub const CR_FD_STEP: f64 = 1e-6;
    /// Gradient agreement: `|g − fd| ≤ max(GRAD_REL·|fd|, GRAD_ABS)`.
    pub const GRAD_REL: f64 = 1e-4;
    pub const GRAD_ABS: f64 = 1e-7;
    /// Difference step for the loss oracle.
    pub const LOSS_FD_STEP: f64 = 1e-6;
    /// Cross-rule agreement among holomorphic rules.
    pub const EQUIV_HOLOMORPHIC: f64 = 1e-10;
    /// Agreement of the split rule with the general rule.
    pub const EQUIV_SPLIT: f64 = 1e-12;
    /// Exclusion radius around singularities, kinks and cuts.
    pub const EXCLUSION: f64 = 0.05;
    /// Largest symmetry violation accepted.
    pub const SYMMETRY: f64 = 1e-10;
    /// Rotation equivariance is a single complex multiply away from exact.
    pub const ROTATION: f64 = 1e-12;
    /// Relative slack on a declared modulus bound.
    pub const BOUND_SLACK: f64 = 1e-12;
}

/// A rectangular window sampled at `nx × ny` nodes, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { re_min, re_max, im_min, im_max, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// The square `[−h, h]²` at `n × n` nodes.
    pub fn square(h: f64, n: usize) -> Self {
        GridSpec { re_min: -h, re_max: h, im_min: -h, im_max: h, nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::Config(format!("grid window is empty or not finite: {self}")));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config(format!("grid needs at least one node per axis: {self}")));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + k as f64 * (hi - lo) / (n - 1) as f64
        }
    }

    /// Node `(ix, iy)` counted from `re_min` and `im_min`.
    pub fn node(&self, ix: usize, iy: usize) -> Complex {
        Complex::new(Self::axis(self.re_min, self.re_max, self.nx, ix), Self::axis(self.im_min, self.im_max, self.ny, iy))
    }

    /// All nodes, `iy` outer and `ix` inner.
    pub fn nodes(&self) -> impl Iterator<Item = Complex> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| self.node(ix, iy)))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}:{}x{}", self.re_min, self.re_max, self.im_min, self.im_max, self.nx, self.ny)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `remin:remax:immin:immax:NXxNY`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("grid `{s}` is not remin:remax:immin:immax:NXxNY"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 5 {
            return Err(bad());
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (nx, ny) = parts[4].split_once(['x', 'X']).ok_or_else(bad)?;
        let count = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        GridSpec::new(num(parts[0])?, num(parts[1])?, num(parts[2])?, num(parts[3])?, count(nx)?, count(ny)?)
    }
}

/// A location that exhibits the worst or a failing residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Complex>,
    pub residual: f64,
}

impl Witness {
    pub fn at(z: Complex, residual: f64) -> Self {
        Witness { label: "point".into(), z: Some(z), residual }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub subject: String,
    pub pass: bool,
    pub worst: f64,
    pub witnesses: Vec<Witness>,
    pub samples: usize,
    pub skipped: usize,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(id: &str, subject: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            subject: subject.into(),
            pass: true,
            worst: 0.0,
            witnesses: Vec::new(),
            samples: 0,
            skipped: 0,
            notes: Vec::new(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One fixed-width row for the summary table.
    pub fn summary_row(&self) -> String {
        format!(
            "{:<5} {:<22} {:<40} worst={:<11.3e} n={:<6} skipped={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.subject,
            self.worst,
            self.samples,
            self.skipped
        )
    }
}

/// The default scan window `[−2, 2]²` at 41 × 41 nodes.
pub fn default_grid() -> GridSpec {
    GridSpec::square(2.0, 41)
}

/// CR scan of an arbitrary function. `distance` gives the distance to the
/// nearest locus the stencil must not straddle.
pub fn cr_scan_fn(
    subject: &str,
    f: impl Fn(Complex) -> Result<Complex>,
    distance: impl Fn(Complex) -> f64,
    grid: &GridSpec,
    exclusion_radius: f64,
) -> CheckReport {
    let mut report = CheckReport::new("cr_scan", subject);
    let mut worst: Option<(Complex, f64)> = None;
    for z in grid.nodes() {
        if !(distance(z) > exclusion_radius) {
            report.skipped += 1;
            continue;
        }
        let jet = wirtinger_fd(|p| f(p).unwrap_or(Complex::new(f64::NAN, f64::NAN)), z, thresholds::CR_FD_STEP);
        let Ok(jet) = jet else {
            report.skipped += 1;
            continue;
        };
        let (r1, r2) = cr_residual(&jet);
        let r = r1.max(r2);
        report.samples += 1;
        if worst.is_none_or(|(_, w)| r > w) {
            worst = Some((z, r));
        }
    }
    if let Some((z, r)) = worst {
        report.worst = r;
        report.witnesses.push(Witness::at(z, r));
    }
    report.pass = report.samples > 0 && report.worst < thresholds::CR;
    if report.samples == 0 {
        report.notes.push("no grid node cleared the exclusion radius".into());
    }
    report
}

/// Holomorphy test of `spec` over `grid`; passes iff the worst CR residual is
/// below [`thresholds::CR`]. The witness is the node with the largest residual.
pub fn cr_scan(spec: &ActivationSpec, grid: &GridSpec, exclusion_radius: f64) -> Result<CheckReport> {
    if !spec.differentiable() {
        return Err(Error::NonDifferentiable { id: spec.id().into() });
    }
    Ok(cr_scan_fn(&spec.to_string(), |z| spec.eval(z), |z| spec.exclusion_distance(z), grid, exclusion_radius))
}

/// Whether the CR scan agrees with the spec's holomorphic flag: a confirmed
/// scan for flagged specs and a witness above [`thresholds::CR_WITNESS`] for
/// the rest.
pub fn holomorphy_check(spec: &ActivationSpec) -> CheckReport {
    let mut report = CheckReport::new("holomorphy", spec.to_string());
    let scan = match cr_scan(spec, &default_grid(), thresholds::EXCLUSION) {
        Ok(scan) => scan,
        Err(e) => {
            report.notes.push(format!("not applicable: {e}"));
            return report;
        }
    };
    report.worst = scan.worst;
    report.samples = scan.samples;
    report.skipped = scan.skipped;
    report.witnesses = scan.witnesses;
    report.pass = if spec.holomorphic() { scan.pass } else { scan.worst > thresholds::CR_WITNESS };
    report.notes.push(format!("flagged holomorphic: {}", spec.holomorphic()));
    report
}

pub const DEFAULT_RADII: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];
const CIRCLE_POINTS: usize = 360;

/// `max |σ|` on circles of the given radii, checked against the declared
/// bound and against Liouville's constraint for holomorphic specs.
pub fn liouville_probe(spec: &ActivationSpec, radii: &[f64]) -> CheckReport {
    let mut report = CheckReport::new("liouville", spec.to_string());
    let mut maxima = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut best: Option<(Complex, f64)> = None;
        for k in 0..CIRCLE_POINTS {
            let z = Complex::from_polar(r, 2.0 * PI * k as f64 / CIRCLE_POINTS as f64);
            match spec.eval(z) {
                Ok(w) => {
                    report.samples += 1;
                    if best.is_none_or(|(_, m)| w.abs() > m) {
                        best = Some((z, w.abs()));
                    }
                }
                Err(_) => report.skipped += 1,
            }
        }
        let (z, m) = best.unwrap_or((Complex::default(), f64::NAN));
        report.notes.push(format!("r={r}: max|σ|={m:e}"));
        if let Bound::Modulus(b) = spec.bound() {
            if m > b * (1.0 + thresholds::BOUND_SLACK) {
                report.pass = false;
                report.witnesses.push(Witness::at(z, m));
            }
        }
        maxima.push((z, m));
    }
    report.worst = maxima.iter().map(|&(_, m)| m).fold(0.0, f64::max);
    if spec.holomorphic() && !radii.is_empty() {
        let growing = maxima.windows(2).all(|w| w[1].1 > w[0].1);
        let r_max = radii.iter().copied().fold(0.0, f64::max);
        let singular_inside = spec.singularities().iter().any(|s| s.locus.distance(Complex::default()) < r_max);
        if growing {
            report.notes.push("holomorphic: unbounded growth across radii".into());
        } else if singular_inside {
            report.notes.push("holomorphic: declared singularity inside the largest circle".into());
        } else {
            report.pass = false;
            let (z, m) = maxima[maxima.len() - 1];
            report.witnesses.push(Witness::at(z, m));
            report.notes.push("holomorphic spec looks bounded with no declared singularity".into());
        }
    }
    report
}

fn within(g: Complex, fd: Complex) -> bool {
    (g - fd).abs() <= (thresholds::GRAD_REL * fd.abs()).max(thresholds::GRAD_ABS)
}

/// Smallest distance from any pre-activation in the forward pass to an
/// excluded locus of its layer's activation.
pub fn trace_clearance(net: &Network, x: &[Complex]) -> Result<f64> {
    let trace = net.forward(x)?;
    Ok(net
        .layers
        .iter()
        .zip(&trace.z)
        .flat_map(|(layer, zs)| zs.iter().map(|&z| layer.activation.exclusion_distance(z)))
        .fold(f64::INFINITY, f64::min))
}

fn skipped_report(mut report: CheckReport, note: String) -> CheckReport {
    report.skipped = 1;
    report.notes.push(note);
    report
}

/// Analytic gradient of `algorithm` against central differences of the loss.
/// Samples whose forward pass comes within the exclusion radius of a kink or
/// singularity are recorded as skipped rather than compared.
pub fn grad_check(net: &Network, algorithm: Algorithm, x: &[Complex], d: &[Complex], fd_step: f64) -> Result<CheckReport> {
    algorithm.supports_network(net)?;
    let subject = format!("{} {} {:?}", algorithm, net.layers[0].activation, net.widths());
    let report = CheckReport::new("grad_check", subject);
    match trace_clearance(net, x) {
        Ok(c) if c < thresholds::EXCLUSION => {
            return Ok(skipped_report(report, format!("trace within {c:.3e} of an excluded locus")));
        }
        Err(e) if e.is_skippable() => return Ok(skipped_report(report, e.to_string())),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let analytic = match gradient(net, x, d, algorithm) {
        Ok(g) => g,
        Err(e) if e.is_skippable() => return Ok(skipped_report(report, e.to_string())),
        Err(e) => return Err(e),
    };
    let fd = fd_gradient(net, x, d, fd_step)?;
    Ok(compare_gradients(report, &analytic, &fd))
}

fn compare_gradients(mut report: CheckReport, analytic: &GradientSet, fd: &GradientSet) -> CheckReport {
    for (k, (g, f)) in analytic.entries().into_iter().zip(fd.entries()).enumerate() {
        let dev = (g - f).abs();
        report.samples += 1;
        report.worst = report.worst.max(dev);
        if !within(g, f) {
            report.pass = false;
            report.witnesses.push(Witness { label: format!("parameter {k}"), z: Some(g), residual: dev });
        }
    }
    report
}

/// Pairwise agreement of several rules on one sample. Rules that do not
/// apply to the network are listed in the notes and left out.
pub fn equivalence_check(net: &Network, x: &[Complex], d: &[Complex], algorithms: &[Algorithm]) -> Result<CheckReport> {
    let names: Vec<&str> = algorithms.iter().map(|a| a.name()).collect();
    let mut report = CheckReport::new("equivalence", format!("{} {{{}}}", net.layers[0].activation, names.join(",")));
    let mut grads = Vec::new();
    for &alg in algorithms {
        match gradient(net, x, d, alg) {
            Ok(g) => grads.push((alg, g)),
            Err(e) if matches!(e.root(), Error::AlgorithmMismatch { .. } | Error::AssumptionViolation { .. }) => {
                report.notes.push(format!("incompatible: {alg}: {e}"));
            }
            Err(e) if e.is_skippable() => {
                report.skipped += 1;
                report.notes.push(format!("skipped: {alg}: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    let split_only = grads.iter().all(|(a, _)| matches!(a, Algorithm::Split | Algorithm::PartialDerivatives))
        && grads.iter().any(|(a, _)| *a == Algorithm::Split);
    let tol = if split_only { thresholds::EQUIV_SPLIT } else { thresholds::EQUIV_HOLOMORPHIC };
    for i in 0..grads.len() {
        for j in i + 1..grads.len() {
            let dev = grads[i].1.max_deviation(&grads[j].1);
            report.samples += 1;
            report.worst = report.worst.max(dev);
            if dev > tol {
                report.pass = false;
                report.witnesses.push(Witness {
                    label: format!("{} vs {}", grads[i].0, grads[j].0),
                    z: x.first().copied(),
                    residual: dev,
                });
            }
        }
    }
    report.notes.push(format!("tolerance {tol:e}"));
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryProperty {
    /// `Re σ(conj z) = Re σ(z)`: the real part is even in `y`.
    LineRe,
    /// `Im σ(−conj z) = Im σ(z)`: the imaginary part is even in `x`.
    LineIm,
    /// `σ(−z) = −σ(z)`.
    Point,
    /// `σ(e^{iφ} z) = e^{iφ} σ(z)`.
    Rotation,
    /// `arg σ(z) = arg z` wherever `σ(z) ≠ 0`.
    PhasePreserve,
}

impl SymmetryProperty {
    pub const ALL: [SymmetryProperty; 5] = [
        SymmetryProperty::LineRe,
        SymmetryProperty::LineIm,
        SymmetryProperty::Point,
        SymmetryProperty::Rotation,
        SymmetryProperty::PhasePreserve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryProperty::LineRe => "line-re",
            SymmetryProperty::LineIm => "line-im",
            SymmetryProperty::Point => "point",
            SymmetryProperty::Rotation => "rotation",
            SymmetryProperty::PhasePreserve => "phase-preserve",
        }
    }

    pub fn applies_to(self, category: Category) -> bool {
        match self {
            SymmetryProperty::LineRe | SymmetryProperty::LineIm => category == Category::SplitRealImaginary,
            SymmetryProperty::Rotation | SymmetryProperty::PhasePreserve => category == Category::AmplitudePhase,
            SymmetryProperty::Point => true,
        }
    }
}

impl FromStr for SymmetryProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SymmetryProperty::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown symmetry property `{s}`")))
    }
}

/// Radius of the disc symmetry samples are drawn from.
pub const SYMMETRY_RADIUS: f64 = 3.0;

/// Largest violation of `property` over `samples` seeded points.
pub fn symmetry_check(spec: &ActivationSpec, property: SymmetryProperty, samples: usize, seed: u64) -> Result<CheckReport> {
    if !property.applies_to(spec.category()) {
        return Err(Error::Config(format!("{} does not apply to {} ({})", property.name(), spec.id(), spec.category())));
    }
    let mut report = CheckReport::new(&format!("symmetry:{}", property.name()), spec.to_string());
    let mut rng = seeded(seed);
    for _ in 0..samples {
        let z = uniform_disc(&mut rng, SYMMETRY_RADIUS);
        let violation = match property {
            SymmetryProperty::LineRe => spec.eval(z.conj()).and_then(|a| Ok((a.re - spec.eval(z)?.re).abs())),
            SymmetryProperty::LineIm => {
                spec.eval(Complex::new(-z.re, z.im)).and_then(|a| Ok((a.im - spec.eval(z)?.im).abs()))
            }
            SymmetryProperty::Point => spec.eval(-z).and_then(|a| Ok((a + spec.eval(z)?).abs())),
            SymmetryProperty::Rotation => {
                let rot = Complex::cis(rng.random_range(-PI..PI));
                spec.eval(rot * z).and_then(|a| Ok((a - rot * spec.eval(z)?).abs()))
            }
            SymmetryProperty::PhasePreserve => spec.eval(z).map(|w| {
                if w.is_zero() || z.is_zero() {
                    f64::NAN
                } else {
                    angle_diff(w.arg(), z.arg()).abs()
                }
            }),
        };
        match violation {
            Ok(v) if v.is_nan() => report.skipped += 1,
            Ok(v) => {
                report.samples += 1;
                if v > report.worst {
                    report.worst = v;
                    report.witnesses = vec![Witness::at(z, v)];
                }
            }
            Err(_) => report.skipped += 1,
        }
    }
    let tolerance = if property == SymmetryProperty::Rotation { thresholds::ROTATION } else { thresholds::SYMMETRY };
    report.pass = report.worst <= tolerance;
    if report.pass {
        report.witnesses.clear();
    }
    Ok(report)
}

/// True when the amplitude curve `g(r)` never goes negative, so `σ` keeps
/// the phase of its argument. ELU and Swish amplitudes shifted by `b < 0`
/// dip below zero for `r < −b`, where the output points the opposite way.
pub fn amplitude_nonnegative(spec: &ActivationSpec) -> bool {
    spec.category() == Category::AmplitudePhase
        && !matches!(spec.kind(), Kind::CapElu { b, .. } | Kind::CapSwish { b } if b < 0.0)
}

/// Symmetries `spec` has by construction of its category.
pub fn structural_symmetries(spec: &ActivationSpec) -> Vec<SymmetryProperty> {
    match spec.category() {
        Category::SplitRealImaginary => vec![SymmetryProperty::LineRe, SymmetryProperty::LineIm],
        Category::AmplitudePhase => {
            let mut v = vec![SymmetryProperty::Rotation, SymmetryProperty::Point];
            if amplitude_nonnegative(spec) {
                v.push(SymmetryProperty::PhasePreserve);
            }
            v
        }
        _ => vec![],
    }
}

/// Network layout used for gradient checks of `spec`: 2-2-1 for split and
/// amplitude-phase activations, 1-1 for fully-complex ones.
pub fn grad_widths(spec: &ActivationSpec) -> Vec<usize> {
    match spec.category() {
        Category::FullyComplex => vec![1, 1],
        _ => vec![2, 2, 1],
    }
}

/// Rules applicable to `spec` by its flags.
pub fn compatible_algorithms(spec: &ActivationSpec) -> Vec<Algorithm> {
    Algorithm::ALL.into_iter().filter(|a| a.supports(spec).is_ok()).collect()
}

pub const GRAD_INIT_RADIUS: f64 = 1.0;
pub const GRAD_INPUT_RADIUS: f64 = 1.5;
pub const GRAD_TARGET_RADIUS: f64 = 1.0;
const SEED_SEARCH: u64 = 1000;

/// A seeded network and sample whose forward pass stays at least the
/// exclusion radius away from every excluded locus.
#[derive(Clone, Debug, PartialEq)]
pub struct GradFixture {
    pub seed: u64,
    pub net: Network,
    pub x: Vec<Complex>,
    pub d: Vec<Complex>,
}

pub fn grad_fixture(spec: &ActivationSpec, widths: &[usize], first_seed: u64) -> Result<GradFixture> {
    for seed in first_seed..first_seed + SEED_SEARCH {
        let net = Network::init(widths, &[*spec], GRAD_INIT_RADIUS, seed)?;
        let mut rng = seeded(seed ^ 0x9e37_79b9_7f4a_7c15);
        let x: Vec<Complex> = (0..widths[0]).map(|_| uniform_disc(&mut rng, GRAD_INPUT_RADIUS)).collect();
        let d: Vec<Complex> =
            (0..widths[widths.len() - 1]).map(|_| uniform_disc(&mut rng, GRAD_TARGET_RADIUS)).collect();
        if matches!(trace_clearance(&net, &x), Ok(c) if c >= thresholds::EXCLUSION) {
            return Ok(GradFixture { seed, net, x, d });
        }
    }
    Err(Error::Config(format!("no clear gradient fixture for {} within {SEED_SEARCH} seeds", spec.id())))
}

/// One gradient-check cell per (spec, compatible rule). A rule that the
/// fixture trips at run time (the conjugation assumption) is reported as a
/// passing cell with zero samples and an `incompatible` note.
pub fn grad_matrix(specs: &[ActivationSpec], seed: u64) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for spec in specs.iter().filter(|s| s.differentiable()) {
        let fixture = match grad_fixture(spec, &grad_widths(spec), seed) {
            Ok(f) => f,
            Err(e) => {
                let mut r = CheckReport::new("grad_check", spec.to_string());
                r.pass = false;
                r.witnesses.push(Witness { label: "fixture".into(), z: None, residual: f64::NAN });
                r.notes.push(e.to_string());
                out.push(r);
                continue;
            }
        };
        for alg in compatible_algorithms(spec) {
            let report = grad_check(&fixture.net, alg, &fixture.x, &fixture.d, thresholds::LOSS_FD_STEP);
            out.push(match report {
                Ok(mut r) => {
                    r.notes.push(format!("fixture seed {}", fixture.seed));
                    r
                }
                Err(e) => {
                    let mut r = CheckReport::new("grad_check", format!("{alg} {spec} {:?}", grad_widths(spec)));
                    if matches!(e.root(), Error::AssumptionViolation { .. }) {
                        r.notes.push(format!("incompatible: {e}"));
                    } else {
                        r.pass = false;
                        r.witnesses.push(Witness { label: "error".into(), z: None, residual: f64::NAN });
                        r.notes.push(e.to_string());
                    }
                    r
                }
            });
        }
    }
    out
}

/// Equivalence of all applicable rules on `count` seeded fixtures.
pub fn equivalence_suite(spec: &ActivationSpec, widths: &[usize], count: usize, seed: u64) -> Result<CheckReport> {
    let algorithms = compatible_algorithms(spec);
    let mut total = CheckReport::new("equivalence", String::new());
    let mut next = seed;
    for _ in 0..count {
        let f = grad_fixture(spec, widths, next)?;
        next = f.seed + 1;
        let r = equivalence_check(&f.net, &f.x, &f.d, &algorithms)?;
        total.subject = r.subject.clone();
        total.pass &= r.pass;
        total.worst = total.worst.max(r.worst);
        total.samples += r.samples;
        total.skipped += r.skipped;
        total.witnesses.extend(r.witnesses);
        for n in r.notes {
            if !total.notes.contains(&n) {
                total.notes.push(n);
            }
        }
    }
    Ok(total)
}

/// Confirms every spec has a CR scan and a boundedness probe, and every
/// differentiable spec appears in the gradient matrix.
pub fn coverage(specs: &[ActivationSpec], reports: &[CheckReport]) -> CheckReport {
    let mut report = CheckReport::new("coverage", format!("{} specs", specs.len()));
    let has = |id: &str, spec: &ActivationSpec| {
        let name = spec.to_string();
        reports.iter().any(|r| r.id == id && r.subject.split(' ').any(|w| w == name))
    };
    for spec in specs {
        let mut missing = Vec::new();
        if !has("holomorphy", spec) {
            missing.push("cr");
        }
        if !has("liouville", spec) {
            missing.push("bounds");
        }
        if spec.differentiable() && !has("grad_check", spec) {
            missing.push("grad");
        }
        report.samples += 1;
        if !missing.is_empty() {
            report.pass = false;
            report.witnesses.push(Witness { label: format!("{}: {}", spec.id(), missing.join(",")), z: None, residual: 1.0 });
        }
    }
    report.worst = report.witnesses.len() as f64;
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Cr,
    Bounds,
    Grad,
    Equiv,
    Symmetry,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cr" => Suite::Cr,
            "bounds" => Suite::Bounds,
            "grad" => Suite::Grad,
            "equiv" => Suite::Equiv,
            "symmetry" => Suite::Symmetry,
            "all" => Suite::All,
            other => return Err(Error::Parse(format!("unknown suite `{other}`"))),
        })
    }
}

pub const EQUIV_SAMPLES: usize = 20;
pub const SYMMETRY_SAMPLES: usize = 1000;

/// Runs the selected suites over `specs`, in a fixed order. `All` adds the
/// coverage check over everything it ran.
pub fn run_suites(suites: &[Suite], specs: &[ActivationSpec], seed: u64) -> Vec<CheckReport> {
    let chosen: BTreeSet<Suite> = if suites.contains(&Suite::All) {
        [Suite::Cr, Suite::Bounds, Suite::Grad, Suite::Equiv, Suite::Symmetry].into()
    } else {
        suites.iter().copied().collect()
    };
    let mut out = Vec::new();
    for suite in &chosen {
        match suite {
            Suite::Cr => out.extend(specs.iter().map(holomorphy_check)),
            Suite::Bounds => out.extend(specs.iter().map(|s| liouville_probe(s, &DEFAULT_RADII))),
            Suite::Grad => out.extend(grad_matrix(specs, seed)),
            Suite::Equiv => {
                for spec in specs.iter().filter(|s| compatible_algorithms(s).len() >= 2) {
                    let widths = if spec.holomorphic() { vec![2, 2, 1] } else { grad_widths(spec) };
                    out.push(equivalence_suite(spec, &widths, EQUIV_SAMPLES, seed).unwrap_or_else(|e| {
                        let mut r = CheckReport::new("equivalence", spec.to_string());
                        r.pass = false;
                        r.witnesses.push(Witness { label: "error".into(), z: None, residual: f64::NAN });
                        r.notes.push(e.to_string());
                        r
                    }));
                }
            }
            Suite::Symmetry => {
                for spec in specs {
                    for p in structural_symmetries(spec) {
                        out.push(symmetry_check(spec, p, SYMMETRY_SAMPLES, seed).expect("structural property applies"));
                    }
                }
            }
            Suite::All => {}
        }
    }
    if suites.contains(&Suite::All) {
        let cov = coverage(specs, &out);
        out.push(cov);
    }
    out
}

/// CR scan of a builtin fixture, e.g. `conj`, over the default window.
pub fn cr_scan_fixture(fixture: Fixture, grid: &GridSpec) -> CheckReport {
    cr_scan_fn(fixture.name(), |z| fixture.eval(z), |z| fixture.exclusion_distance(z), grid, thresholds::EXCLUSION)
}
