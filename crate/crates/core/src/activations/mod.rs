//! The complex activation catalog.
//!
//! Every entry is a closed-form map `σ: ℂ → ℂ` together with metadata used by
//! the trainers and the verification harness:
//!
//! * **category**: split (`σ(z) = f(x) + i f(y)`), amplitude-phase
//!   (`σ(z) = g(|z|)·z/|z|`) or fully complex (`z` treated as one variable);
//! * **holomorphic**: complex-differentiable away from the declared loci;
//! * **bound** on `|σ|` over the whole plane, when one exists;
//! * **singularities** (poles, lattices of poles, branch cuts) and **kinks**
//!   (curves where `σ` is defined but not differentiable).
//!
//! [`ActivationSpec::partials`] returns analytic partials. They are checked
//! against the finite-difference oracle in the tests below.
//!
//! Amplitude-phase entries return exactly `0` at `z = 0`. This is the
//! continuous limit when `g(0) = 0`. Where the limit does not exist
//! (`cap_softplus`, `cap_elu`, `modrelu` with `b > 0`) the origin is declared a
//! kink.

mod loci;
pub mod real;

pub use loci::Locus;

use crate::cplx::{Complex, WirtingerJet, ONE, ZERO};
use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

/// Distance below which a point counts as sitting on a pole or a kink.
pub const LOCUS_TOLERANCE: f64 = 1e-12;

/// Largest `|Re z|` fed to `exp` by the exponential-based fully complex entries.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    SplitRealImaginary,
    /// Reserved for `f(|z|)·e^{i g(arg z)}` wrappers; no catalog entry uses it.
    SplitPhaseAmplitude,
    AmplitudePhase,
    FullyComplex,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::SplitRealImaginary => "split-real-imaginary",
            Category::SplitPhaseAmplitude => "split-phase-amplitude",
            Category::AmplitudePhase => "amplitude-phase",
            Category::FullyComplex => "fully-complex",
        }
    }
}

impl FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Category::SplitRealImaginary,
            Category::SplitPhaseAmplitude,
            Category::AmplitudePhase,
            Category::FullyComplex,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| Error::Parse(format!("unknown category `{s}`")))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    IsolatedEssential,
    Pole,
    Removable,
    BranchCut,
    CountableLattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularityDescriptor {
    pub kind: SingularityKind,
    pub locus: Locus,
}

impl SingularityDescriptor {
    fn new(kind: SingularityKind, locus: Locus) -> Self {
        SingularityDescriptor { kind, locus }
    }

    /// Points where evaluation itself is impossible (everything but cuts).
    pub fn blocks_evaluation(&self) -> bool {
        self.kind != SingularityKind::BranchCut
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Unbounded,
    /// `|σ(z)| ≤ m` for every `z`.
    Modulus(f64),
}

impl Bound {
    pub fn describe(self) -> String {
        match self {
            Bound::Unbounded => "unbounded".to_string(),
            Bound::Modulus(m) => format!("|sigma(z)| <= {m} on C"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Complex(Complex),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Complex(z) => write!(f, "{z}"),
        }
    }
}

/// Which formula an [`ActivationSpec`] evaluates, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    SplitStep,
    SplitSigmoid,
    SplitPsigmoid { c1: f64, c2: f64 },
    SplitTanh,
    SplitStanh,
    SplitHardTanh,
    SplitCrelu,
    SplitQam { alpha: f64 },
    SplitElu { alpha: f64 },
    SplitMish,
    SplitSoftplus,
    SplitSwish { beta: f64 },
    Aptf,
    Apsf { a: f64, b: f64 },
    Siglog,
    Cardioid,
    Modrelu { b: f64 },
    FcTanh,
    FcSigmoid,
    FcTan,
    FcSin,
    FcArctan,
    FcArcsin,
    FcArccos,
    FcSinh,
    FcArctanh,
    FcArcsinh,
    FcExp,
    FcSwish,
    FcMish,
    Zrelu,
    Z3relu,
    Zprelu { alpha: Complex },
    Z3prelu { a1: Complex, a2: Complex, a3: Complex },
    CapPls { a: f64 },
    CapEs,
    CapArctans,
    CapErfa,
    CapSoftplus { a: f64 },
    CapElu { alpha: f64, b: f64 },
    CapSwish { b: f64 },
}

/// Every catalog identifier, in listing order.
pub const IDS: [&str; 41] = [
    "split_step",
    "split_sigmoid",
    "split_psigmoid",
    "split_tanh",
    "split_stanh",
    "split_hard_tanh",
    "split_crelu",
    "split_qam",
    "split_elu",
    "split_mish",
    "split_softplus",
    "split_swish",
    "aptf",
    "apsf",
    "siglog",
    "cardioid",
    "modrelu",
    "fc_tanh",
    "fc_sigmoid",
    "fc_tan",
    "fc_sin",
    "fc_arctan",
    "fc_arcsin",
    "fc_arccos",
    "fc_sinh",
    "fc_arctanh",
    "fc_arcsinh",
    "fc_exp",
    "fc_swish",
    "fc_mish",
    "zrelu",
    "z3relu",
    "zprelu",
    "z3prelu",
    "cap_pls",
    "cap_es",
    "cap_arctans",
    "cap_erfa",
    "cap_softplus",
    "cap_elu",
    "cap_swish",
];

/// An immutable catalog entry: formula, parameters and metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActivationSpec {
    kind: Kind,
}

/// The full catalog with default parameters.
pub fn catalog() -> Vec<ActivationSpec> {
    IDS.iter().map(|id| ActivationSpec::from_id(id).expect("catalog id")).collect()
}

impl ActivationSpec {
    pub fn new(kind: Kind) -> Result<Self> {
        let spec = ActivationSpec { kind };
        spec.validate()?;
        Ok(spec)
    }

    /// Entry with default parameters.
    pub fn from_id(id: &str) -> Result<Self> {
        let c01 = Complex::real(0.1);
        let kind = match id {
            "split_step" => Kind::SplitStep,
            "split_sigmoid" => Kind::SplitSigmoid,
            "split_psigmoid" => Kind::SplitPsigmoid { c1: 1.0, c2: 2.0 },
            "split_tanh" => Kind::SplitTanh,
            "split_stanh" => Kind::SplitStanh,
            "split_hard_tanh" => Kind::SplitHardTanh,
            "split_crelu" => Kind::SplitCrelu,
            "split_qam" => Kind::SplitQam { alpha: 0.25 },
            "split_elu" => Kind::SplitElu { alpha: 1.0 },
            "split_mish" => Kind::SplitMish,
            "split_softplus" => Kind::SplitSoftplus,
            "split_swish" => Kind::SplitSwish { beta: 1.0 },
            "aptf" => Kind::Aptf,
            "apsf" => Kind::Apsf { a: 1.0, b: 1.0 },
            "siglog" => Kind::Siglog,
            "cardioid" => Kind::Cardioid,
            "modrelu" => Kind::Modrelu { b: -0.7 },
            "fc_tanh" => Kind::FcTanh,
            "fc_sigmoid" => Kind::FcSigmoid,
            "fc_tan" => Kind::FcTan,
            "fc_sin" => Kind::FcSin,
            "fc_arctan" => Kind::FcArctan,
            "fc_arcsin" => Kind::FcArcsin,
            "fc_arccos" => Kind::FcArccos,
            "fc_sinh" => Kind::FcSinh,
            "fc_arctanh" => Kind::FcArctanh,
            "fc_arcsinh" => Kind::FcArcsinh,
            "fc_exp" => Kind::FcExp,
            "fc_swish" => Kind::FcSwish,
            "fc_mish" => Kind::FcMish,
            "zrelu" => Kind::Zrelu,
            "z3relu" => Kind::Z3relu,
            "zprelu" => Kind::Zprelu { alpha: c01 },
            "z3prelu" => Kind::Z3prelu { a1: c01, a2: c01, a3: c01 },
            "cap_pls" => Kind::CapPls { a: 1.0 },
            "cap_es" => Kind::CapEs,
            "cap_arctans" => Kind::CapArctans,
            "cap_erfa" => Kind::CapErfa,
            "cap_softplus" => Kind::CapSoftplus { a: 1.0 },
            "cap_elu" => Kind::CapElu { alpha: 1.0, b: -1.0 },
            "cap_swish" => Kind::CapSwish { b: 1.0 },
            _ => return Err(Error::UnknownActivation(id.to_string())),
        };
        Ok(ActivationSpec { kind })
    }

    /// Entry `id` with the named parameters overridden.
    pub fn with_params(id: &str, overrides: &[(&str, Complex)]) -> Result<Self> {
        let mut spec = ActivationSpec::from_id(id)?;
        for &(name, value) in overrides {
            spec.set_param(name, value)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            Kind::SplitStep => "split_step",
            Kind::SplitSigmoid => "split_sigmoid",
            Kind::SplitPsigmoid { .. } => "split_psigmoid",
            Kind::SplitTanh => "split_tanh",
            Kind::SplitStanh => "split_stanh",
            Kind::SplitHardTanh => "split_hard_tanh",
            Kind::SplitCrelu => "split_crelu",
            Kind::SplitQam { .. } => "split_qam",
            Kind::SplitElu { .. } => "split_elu",
            Kind::SplitMish => "split_mish",
            Kind::SplitSoftplus => "split_softplus",
            Kind::SplitSwish { .. } => "split_swish",
            Kind::Aptf => "aptf",
            Kind::Apsf { .. } => "apsf",
            Kind::Siglog => "siglog",
            Kind::Cardioid => "cardioid",
            Kind::Modrelu { .. } => "modrelu",
            Kind::FcTanh => "fc_tanh",
            Kind::FcSigmoid => "fc_sigmoid",
            Kind::FcTan => "fc_tan",
            Kind::FcSin => "fc_sin",
            Kind::FcArctan => "fc_arctan",
            Kind::FcArcsin => "fc_arcsin",
            Kind::FcArccos => "fc_arccos",
            Kind::FcSinh => "fc_sinh",
            Kind::FcArctanh => "fc_arctanh",
            Kind::FcArcsinh => "fc_arcsinh",
            Kind::FcExp => "fc_exp",
            Kind::FcSwish => "fc_swish",
            Kind::FcMish => "fc_mish",
            Kind::Zrelu => "zrelu",
            Kind::Z3relu => "z3relu",
            Kind::Zprelu { .. } => "zprelu",
            Kind::Z3prelu { .. } => "z3prelu",
            Kind::CapPls { .. } => "cap_pls",
            Kind::CapEs => "cap_es",
            Kind::CapArctans => "cap_arctans",
            Kind::CapErfa => "cap_erfa",
            Kind::CapSoftplus { .. } => "cap_softplus",
            Kind::CapElu { .. } => "cap_elu",
            Kind::CapSwish { .. } => "cap_swish",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, ParamValue)> {
        use ParamValue::{Complex as C, Real as R};
        match self.kind {
            Kind::SplitPsigmoid { c1, c2 } => vec![("c1", R(c1)), ("c2", R(c2))],
            Kind::SplitQam { alpha } | Kind::SplitElu { alpha } => vec![("alpha", R(alpha))],
            Kind::SplitSwish { beta } => vec![("beta", R(beta))],
            Kind::Apsf { a, b } => vec![("a", R(a)), ("b", R(b))],
            Kind::Modrelu { b } | Kind::CapSwish { b } => vec![("b", R(b))],
            Kind::Zprelu { alpha } => vec![("alpha", C(alpha))],
            Kind::Z3prelu { a1, a2, a3 } => vec![("alpha1", C(a1)), ("alpha2", C(a2)), ("alpha3", C(a3))],
            Kind::CapPls { a } | Kind::CapSoftplus { a } => vec![("a", R(a))],
            Kind::CapElu { alpha, b } => vec![("alpha", R(alpha)), ("b", R(b))],
            _ => vec![],
        }
    }

    fn set_param(&mut self, name: &str, value: Complex) -> Result<()> {
        let id = self.id();
        let unknown = || Error::InvalidParameter { id: id.to_string(), message: format!("no parameter `{name}`") };
        let real = || {
            if value.im == 0.0 {
                Ok(value.re)
            } else {
                Err(Error::InvalidParameter { id: id.to_string(), message: format!("`{name}` must be real") })
            }
        };
        match (&mut self.kind, name) {
            (Kind::SplitPsigmoid { c1, .. }, "c1") => *c1 = real()?,
            (Kind::SplitPsigmoid { c2, .. }, "c2") => *c2 = real()?,
            (Kind::SplitQam { alpha } | Kind::SplitElu { alpha } | Kind::CapElu { alpha, .. }, "alpha") => {
                *alpha = real()?
            }
            (Kind::SplitSwish { beta }, "beta") => *beta = real()?,
            (Kind::Apsf { a, .. } | Kind::CapPls { a } | Kind::CapSoftplus { a }, "a") => *a = real()?,
            (Kind::Apsf { b, .. } | Kind::Modrelu { b } | Kind::CapSwish { b } | Kind::CapElu { b, .. }, "b") => {
                *b = real()?
            }
            (Kind::Zprelu { alpha }, "alpha") => *alpha = value,
            (Kind::Z3prelu { a1, .. }, "alpha1") => *a1 = value,
            (Kind::Z3prelu { a2, .. }, "alpha2") => *a2 = value,
            (Kind::Z3prelu { a3, .. }, "alpha3") => *a3 = value,
            _ => return Err(unknown()),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let fail = |message: &str| Err(Error::InvalidParameter { id: self.id().to_string(), message: message.to_string() });
        let finite = self.params().iter().all(|(_, v)| match v {
            ParamValue::Real(r) => r.is_finite(),
            ParamValue::Complex(c) => c.is_finite(),
        });
        if !finite {
            return fail("parameters must be finite");
        }
        match self.kind {
            Kind::SplitPsigmoid { c1, c2 } if c1 == 0.0 || c2 == 0.0 => fail("c1 and c2 must be nonzero"),
            Kind::Apsf { a, b } if a <= 0.0 || b <= 0.0 => fail("a and b must be positive"),
            Kind::CapPls { a } if a <= 0.0 => fail("a must be positive"),
            _ => Ok(()),
        }
    }

    pub fn category(&self) -> Category {
        use Kind::*;
        match self.kind {
            SplitStep | SplitSigmoid | SplitPsigmoid { .. } | SplitTanh | SplitStanh | SplitHardTanh | SplitCrelu
            | SplitQam { .. } | SplitElu { .. } | SplitMish | SplitSoftplus | SplitSwish { .. } => {
                Category::SplitRealImaginary
            }
            Aptf | Apsf { .. } | Siglog | Modrelu { .. } | CapPls { .. } | CapEs | CapArctans | CapErfa
            | CapSoftplus { .. } | CapElu { .. } | CapSwish { .. } => Category::AmplitudePhase,
            _ => Category::FullyComplex,
        }
    }

    pub fn differentiable(&self) -> bool {
        self.kind != Kind::SplitStep
    }

    /// Complex-differentiable at every point off the declared loci.
    pub fn holomorphic(&self) -> bool {
        self.category() == Category::FullyComplex && self.kind != Kind::Cardioid
    }

    pub fn bound(&self) -> Bound {
        use Kind::*;
        match self.kind {
            SplitStep | SplitSigmoid | SplitTanh | SplitHardTanh => Bound::Modulus(SQRT_2),
            SplitPsigmoid { c1, .. } => Bound::Modulus(SQRT_2 * c1.abs()),
            // Real part of the kernel lies in [-0.0716, 1.0181].
            SplitStanh => Bound::Modulus(SQRT_2 * 1.0181),
            Aptf | Siglog | CapEs | CapErfa => Bound::Modulus(1.0),
            Apsf { b, .. } => Bound::Modulus(b),
            CapPls { a } => Bound::Modulus(a),
            CapArctans => Bound::Modulus(FRAC_PI_2),
            _ => Bound::Unbounded,
        }
    }

    pub fn bounded_on(&self) -> String {
        self.bound().describe()
    }

    pub fn singularities(&self) -> Vec<SingularityDescriptor> {
        use SingularityKind::{BranchCut, CountableLattice, Pole};
        let c = Complex::new;
        let lattice = |base: Complex, step: Complex| SingularityDescriptor::new(CountableLattice, Locus::Lattice { base, step });
        let point = |at: Complex| SingularityDescriptor::new(Pole, Locus::Point { at });
        let cut = |origin: Complex, dir: Complex| SingularityDescriptor::new(BranchCut, Locus::ray(origin, dir));
        match self.kind {
            Kind::FcTanh => vec![lattice(c(0.0, FRAC_PI_2), c(0.0, PI))],
            Kind::FcTan => vec![lattice(c(FRAC_PI_2, 0.0), c(PI, 0.0))],
            Kind::FcSigmoid | Kind::FcSwish => vec![lattice(c(0.0, PI), c(0.0, 2.0 * PI))],
            Kind::FcMish => {
                // 1 + e^z = ±i, i.e. z = ln(−1 ± i) + 2πin.
                let re = 0.5 * 2f64.ln();
                vec![lattice(c(re, 0.75 * PI), c(0.0, 2.0 * PI)), lattice(c(re, -0.75 * PI), c(0.0, 2.0 * PI))]
            }
            Kind::FcArctan => vec![point(c(0.0, 1.0)), point(c(0.0, -1.0)), cut(c(0.0, 1.0), c(0.0, 1.0)), cut(c(0.0, -1.0), c(0.0, -1.0))],
            Kind::FcArcsin | Kind::FcArccos => vec![cut(c(1.0, 0.0), c(1.0, 0.0)), cut(c(-1.0, 0.0), c(-1.0, 0.0))],
            Kind::FcArctanh => vec![point(c(1.0, 0.0)), point(c(-1.0, 0.0)), cut(c(1.0, 0.0), c(1.0, 0.0)), cut(c(-1.0, 0.0), c(-1.0, 0.0))],
            Kind::FcArcsinh => vec![cut(c(0.0, 1.0), c(0.0, 1.0)), cut(c(0.0, -1.0), c(0.0, -1.0))],
            _ => vec![],
        }
    }

    /// Curves where `σ` is defined but its partials jump.
    pub fn kinks(&self) -> Vec<Locus> {
        let origin = Locus::Point { at: ZERO };
        let axes = vec![Locus::vertical(0.0), Locus::horizontal(0.0)];
        let circle = |radius: f64| Locus::Circle { center: ZERO, radius };
        let ray = |dir: Complex| Locus::ray(ZERO, dir);
        let (east, north, west, south) = (ONE, Complex::new(0.0, 1.0), -ONE, Complex::new(0.0, -1.0));
        match self.kind {
            Kind::SplitStep | Kind::SplitCrelu => axes,
            Kind::SplitElu { alpha } if alpha != 1.0 => axes,
            Kind::SplitHardTanh => vec![
                Locus::vertical(-1.0),
                Locus::vertical(1.0),
                Locus::horizontal(-1.0),
                Locus::horizontal(1.0),
            ],
            Kind::Modrelu { b } if b < 0.0 => vec![circle(-b)],
            Kind::Modrelu { b } if b > 0.0 => vec![origin],
            Kind::CapPls { a } => vec![circle(a)],
            Kind::CapSoftplus { .. } | Kind::Cardioid => vec![origin],
            Kind::CapElu { alpha, b } => {
                let mut k = Vec::new();
                if b != 0.0 {
                    k.push(origin);
                }
                if b < 0.0 && alpha != 1.0 {
                    k.push(circle(-b));
                }
                k
            }
            Kind::Zrelu | Kind::Zprelu { .. } => vec![ray(east), ray(north)],
            Kind::Z3relu => vec![ray(west), ray(south)],
            Kind::Z3prelu { .. } => vec![ray(east), ray(north), ray(west), ray(south)],
            _ => vec![],
        }
    }

    /// Distance from `z` to the nearest declared singular locus (cuts included).
    pub fn singularity_distance(&self, z: Complex) -> f64 {
        self.singularities().iter().map(|s| s.locus.distance(z)).fold(f64::INFINITY, f64::min)
    }

    pub fn kink_distance(&self, z: Complex) -> f64 {
        self.kinks().iter().map(|k| k.distance(z)).fold(f64::INFINITY, f64::min)
    }

    /// Distance to anything a finite-difference stencil must not straddle.
    pub fn exclusion_distance(&self, z: Complex) -> f64 {
        self.singularity_distance(z).min(self.kink_distance(z))
    }

    fn check_poles(&self, z: Complex) -> Result<()> {
        for s in self.singularities().iter().filter(|s| s.blocks_evaluation()) {
            if s.locus.contains(z, LOCUS_TOLERANCE) {
                return Err(Error::Singularity { id: self.id().into(), z, locus: s.locus.to_string() });
            }
        }
        Ok(())
    }

    fn check_kinks(&self, z: Complex) -> Result<()> {
        for k in self.kinks() {
            if k.contains(z, LOCUS_TOLERANCE) {
                return Err(Error::Kink { id: self.id().into(), z, locus: k.to_string() });
            }
        }
        Ok(())
    }

    fn guard_exp(&self, z: Complex) -> Result<()> {
        if z.re.abs() > EXP_GUARD {
            Err(Error::Overflow { id: self.id().into(), z })
        } else {
            Ok(())
        }
    }

    fn finite(&self, z: Complex, w: Complex) -> Result<Complex> {
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Overflow { id: self.id().into(), z })
        }
    }

    /// `σ(z)`.
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        if !z.is_finite() {
            return Err(Error::Overflow { id: self.id().into(), z });
        }
        self.check_poles(z)?;
        let w = match self.category() {
            Category::SplitRealImaginary => Complex::new(self.split_f(z.re), self.split_f(z.im)),
            Category::AmplitudePhase => {
                let r = z.abs();
                if r == 0.0 {
                    ZERO
                } else {
                    let g = self.amp_g(r);
                    let mut w = z.scale(g / r);
                    // Rounding in z/r can leave |w| one ulp above g once g saturates.
                    while w.abs() > g.abs() {
                        w = w.scale(1.0 - f64::EPSILON);
                    }
                    w
                }
            }
            _ => self.full_value(z)?,
        };
        self.finite(z, w)
    }

    /// Value and the four real partials of `σ = u + iv` at `z`.
    pub fn partials(&self, z: Complex) -> Result<WirtingerJet> {
        if !self.differentiable() {
            return Err(Error::NonDifferentiable { id: self.id().into() });
        }
        self.check_kinks(z)?;
        let value = self.eval(z)?;
        let jet = match self.category() {
            Category::SplitRealImaginary => {
                WirtingerJet::from_partials(value, self.split_df(z.re), 0.0, 0.0, self.split_df(z.im))
            }
            Category::AmplitudePhase => self.amp_jet(z, value),
            _ if self.kind == Kind::Cardioid => cardioid_jet(z, value),
            _ => WirtingerJet::holomorphic(value, self.full_deriv(z)?),
        };
        if jet.is_finite() {
            Ok(jet)
        } else {
            Err(Error::Overflow { id: self.id().into(), z })
        }
    }

    /// `σ′(z)` for holomorphic entries.
    pub fn complex_derivative(&self, z: Complex) -> Result<Complex> {
        if !self.holomorphic() {
            return Err(Error::AlgorithmMismatch {
                algorithm: "complex derivative".into(),
                id: self.id().into(),
                reason: "not holomorphic".into(),
            });
        }
        Ok(self.partials(z)?.dz)
    }

    fn split_f(&self, u: f64) -> f64 {
        match self.kind {
            Kind::SplitStep => {
                if u >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::SplitSigmoid => real::sigmoid(u),
            Kind::SplitPsigmoid { c1, c2 } => real::psigmoid(u, c1, c2),
            Kind::SplitTanh => u.tanh(),
            Kind::SplitStanh => real::stanh(u),
            Kind::SplitHardTanh => real::hard_tanh(u),
            Kind::SplitCrelu => u.max(0.0),
            Kind::SplitQam { alpha } => u + alpha * (PI * u).sin(),
            Kind::SplitElu { alpha } => real::elu(u, alpha),
            Kind::SplitMish => real::mish(u),
            Kind::SplitSoftplus => real::softplus(u),
            Kind::SplitSwish { beta } => real::swish(u, beta),
            _ => unreachable!("not a split entry"),
        }
    }

    fn split_df(&self, u: f64) -> f64 {
        match self.kind {
            Kind::SplitSigmoid => {
                let s = real::sigmoid(u);
                s * (1.0 - s)
            }
            Kind::SplitPsigmoid { c1, c2 } => real::psigmoid_deriv(u, c1, c2),
            Kind::SplitTanh => 1.0 - u.tanh().powi(2),
            Kind::SplitStanh => real::stanh_deriv(u),
            Kind::SplitHardTanh => {
                if u.abs() < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::SplitCrelu => {
                if u > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::SplitQam { alpha } => 1.0 + alpha * PI * (PI * u).cos(),
            Kind::SplitElu { alpha } => real::elu_deriv(u, alpha),
            Kind::SplitMish => real::mish_deriv(u),
            Kind::SplitSoftplus => real::sigmoid(u),
            Kind::SplitSwish { beta } => real::swish_deriv(u, beta),
            _ => unreachable!("not a differentiable split entry"),
        }
    }

    /// Amplitude curve `g(r)` of `σ(z) = g(|z|)·z/|z|`.
    fn amp_g(&self, r: f64) -> f64 {
        match self.kind {
            Kind::Aptf => r.tanh(),
            Kind::Apsf { a, b } => b * r / (a * b + r),
            Kind::Siglog => r / (1.0 + r),
            Kind::Modrelu { b } => (r + b).max(0.0),
            Kind::CapPls { a } => r.min(a),
            Kind::CapEs => -(-r).exp_m1(),
            Kind::CapArctans => r.atan(),
            Kind::CapErfa => real::erf(r),
            Kind::CapSoftplus { a } => real::softplus(r - a),
            Kind::CapElu { alpha, b } => {
                if r < -b {
                    r + b
                } else {
                    alpha * (r + b).exp_m1()
                }
            }
            Kind::CapSwish { b } => r * real::sigmoid(r - b),
            _ => unreachable!("not an amplitude-phase entry"),
        }
    }

    fn amp_dg(&self, r: f64) -> f64 {
        match self.kind {
            Kind::Aptf => 1.0 - r.tanh().powi(2),
            Kind::Apsf { a, b } => a * b * b / (a * b + r).powi(2),
            Kind::Siglog => 1.0 / (1.0 + r).powi(2),
            Kind::Modrelu { b } => {
                if r + b > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::CapPls { a } => {
                if r < a {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::CapEs => (-r).exp(),
            Kind::CapArctans => 1.0 / (1.0 + r * r),
            Kind::CapErfa => 2.0 / PI.sqrt() * (-r * r).exp(),
            Kind::CapSoftplus { a } => real::sigmoid(r - a),
            Kind::CapElu { alpha, b } => {
                if r < -b {
                    1.0
                } else {
                    alpha * (r + b).exp()
                }
            }
            Kind::CapSwish { b } => {
                let s = real::sigmoid(r - b);
                s + r * s * (1.0 - s)
            }
            _ => unreachable!("not an amplitude-phase entry"),
        }
    }

    /// `lim_{r→0} g(r)/r`, the gain at the origin.
    fn amp_h0(&self) -> f64 {
        match self.kind {
            Kind::Aptf | Kind::CapPls { .. } | Kind::CapEs | Kind::CapArctans => 1.0,
            Kind::Apsf { a, .. } => 1.0 / a,
            Kind::Siglog => 1.0,
            Kind::Modrelu { b } => {
                if b < 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Kind::CapErfa => 2.0 / PI.sqrt(),
            Kind::CapSwish { b } => real::sigmoid(-b),
            Kind::CapElu { b, .. } if b == 0.0 => 1.0,
            // The origin is a declared kink for the remaining entries.
            _ => f64::NAN,
        }
    }

    /// Partials of `h(r)·z` with `h = g/r`:
    /// `σ_x = h + h′(r)(x/r)z`, `σ_y = ih + h′(r)(y/r)z`.
    fn amp_jet(&self, z: Complex, value: Complex) -> WirtingerJet {
        let r = z.abs();
        if r == 0.0 {
            let h0 = self.amp_h0();
            return WirtingerJet::from_partials(value, h0, 0.0, 0.0, h0);
        }
        let h = self.amp_g(r) / r;
        let dh = (self.amp_dg(r) - h) / r;
        let sx = Complex::real(h) + z.scale(dh * z.re / r);
        let sy = Complex::new(0.0, h) + z.scale(dh * z.im / r);
        WirtingerJet::from_partials(value, sx.re, sy.re, sx.im, sy.im)
    }

    fn full_value(&self, z: Complex) -> Result<Complex> {
        Ok(match self.kind {
            Kind::Cardioid => {
                let r = z.abs();
                if r == 0.0 {
                    ZERO
                } else {
                    z.scale(0.5 * (1.0 + z.re / r))
                }
            }
            Kind::FcTanh => z.tanh(),
            Kind::FcSigmoid => {
                self.guard_exp(z)?;
                ONE / (ONE + (-z).exp())
            }
            Kind::FcTan => z.tan(),
            Kind::FcSin => z.sin(),
            Kind::FcArctan => z.atan(),
            Kind::FcArcsin => z.asin(),
            Kind::FcArccos => z.acos(),
            Kind::FcSinh => z.sinh(),
            Kind::FcArctanh => z.atanh(),
            Kind::FcArcsinh => z.asinh(),
            Kind::FcExp => {
                self.guard_exp(z)?;
                z.exp()
            }
            Kind::FcSwish => {
                self.guard_exp(z)?;
                z / (ONE + (-z).exp())
            }
            Kind::FcMish => {
                self.guard_exp(z)?;
                z * mish_tanh(z)
            }
            _ => z * self.sector_gain(z),
        })
    }

    fn full_deriv(&self, z: Complex) -> Result<Complex> {
        Ok(match self.kind {
            Kind::FcTanh => {
                let t = z.tanh();
                ONE - t * t
            }
            Kind::FcSigmoid => {
                let s = ONE / (ONE + (-z).exp());
                s * (ONE - s)
            }
            Kind::FcTan => {
                let t = z.tan();
                ONE + t * t
            }
            Kind::FcSin => z.cos(),
            Kind::FcArctan => (ONE + z * z).recip(),
            Kind::FcArcsin => (ONE - z * z).sqrt().recip(),
            Kind::FcArccos => -(ONE - z * z).sqrt().recip(),
            Kind::FcSinh => z.cosh(),
            Kind::FcArctanh => (ONE - z * z).recip(),
            Kind::FcArcsinh => (ONE + z * z).sqrt().recip(),
            Kind::FcExp => z.exp(),
            Kind::FcSwish => {
                let s = ONE / (ONE + (-z).exp());
                s + z * s * (ONE - s)
            }
            Kind::FcMish => {
                // tanh(ln w) = (w²−1)/(w²+1) with w = 1 + e^z.
                let e = z.exp();
                let w = ONE + e;
                let w2p1 = w * w + ONE;
                mish_tanh(z) + z * w.scale(4.0) * e / (w2p1 * w2p1)
            }
            _ => self.sector_gain(z),
        })
    }

    /// Multiplier applied by the quadrant-gated entries, taking `arg z ∈ [0, 2π)`.
    fn sector_gain(&self, z: Complex) -> Complex {
        let (x, y) = (z.re, z.im);
        let first = x >= 0.0 && y >= 0.0;
        match self.kind {
            Kind::Zrelu => {
                if first {
                    ONE
                } else {
                    ZERO
                }
            }
            Kind::Z3relu => {
                if x > 0.0 || y > 0.0 {
                    ONE
                } else {
                    ZERO
                }
            }
            Kind::Zprelu { alpha } => {
                if first {
                    ONE
                } else {
                    alpha
                }
            }
            Kind::Z3prelu { a1, a2, a3 } => {
                if first {
                    ONE
                } else if x < 0.0 && y >= 0.0 {
                    a1
                } else if x <= 0.0 && y < 0.0 {
                    a2
                } else {
                    a3
                }
            }
            _ => unreachable!("not a sector-gated entry"),
        }
    }
}

/// `tanh(ln(1 + e^z))` in the single-valued rational form `(w²−1)/(w²+1)`.
fn mish_tanh(z: Complex) -> Complex {
    let w = ONE + z.exp();
    let w2 = w * w;
    (w2 - ONE) / (w2 + ONE)
}

/// Partials of `½(1 + x/r)·z`. With `c = x/r`:
/// `∂c/∂x = y²/r³`, `∂c/∂y = −xy/r³`.
fn cardioid_jet(z: Complex, value: Complex) -> WirtingerJet {
    let (x, y) = (z.re, z.im);
    let r = z.abs();
    let r3 = r * r * r;
    let c = x / r;
    let sx = (Complex::real(1.0 + c) + z.scale(y * y / r3)).scale(0.5);
    let sy = (Complex::new(0.0, 1.0 + c) - z.scale(x * y / r3)).scale(0.5);
    WirtingerJet::from_partials(value, sx.re, sy.re, sx.im, sy.im)
}

/// Writes `id` or `id(name=value,...)`; parameters use shortest round-trip text.
impl fmt::Display for ActivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())?;
        let params = self.params();
        if !params.is_empty() {
            let body: Vec<String> = params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

/// Parses `id`, `id(name=value,...)` or `id:name=value,...`.
impl FromStr for ActivationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (id, body) = if let Some((id, rest)) = s.split_once('(') {
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{s}`")))?;
            (id, body)
        } else if let Some((id, body)) = s.split_once(':') {
            (id, body)
        } else {
            (s, "")
        };
        let mut overrides = Vec::new();
        for item in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected name=value, got `{item}`")))?;
            overrides.push((name.trim(), value.parse::<Complex>()?));
        }
        ActivationSpec::with_params(id.trim(), &overrides)
    }
}

impl Serialize for ActivationSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ActivationSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One line of the machine-readable catalog listing.
#[derive(Debug, Serialize)]
pub struct CatalogRecord {
    pub id: &'static str,
    pub spec: String,
    pub category: Category,
    pub params: Vec<(String, String)>,
    pub differentiable: bool,
    pub holomorphic: bool,
    pub bounded_on: String,
    pub singularities: Vec<SingularityDescriptor>,
    pub kinks: Vec<Locus>,
}

impl ActivationSpec {
    pub fn record(&self) -> CatalogRecord {
        CatalogRecord {
            id: self.id(),
            spec: self.to_string(),
            category: self.category(),
            params: self.params().iter().map(|(n, v)| (n.to_string(), v.to_string())).collect(),
            differentiable: self.differentiable(),
            holomorphic: self.holomorphic(),
            bounded_on: self.bounded_on(),
            singularities: self.singularities(),
            kinks: self.kinks(),
        }
    }
}

/// Outcome of the Jacobian test at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuitabilityPoint {
    pub z: Complex,
    /// `D = u_x v_y − u_y v_x`
    pub det: f64,
    /// One of the two partial patterns that keep a vanishing `D` harmless.
    pub exempt: bool,
    pub unsuitable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuitabilityReport {
    pub points: Vec<SuitabilityPoint>,
}

impl SuitabilityReport {
    pub fn suitable(&self) -> bool {
        self.points.iter().all(|p| !p.unsuitable)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &SuitabilityPoint> {
        self.points.iter().filter(|p| p.unsuitable)
    }
}

/// Zero tolerance of the Jacobian test.
pub const SUITABILITY_ZERO: f64 = 1e-10;

pub fn suitability_of_jet(z: Complex, jet: &WirtingerJet) -> SuitabilityPoint {
    let zero = |v: f64| v.abs() <= SUITABILITY_ZERO;
    let det = jet.jacobian_det();
    let exempt = (zero(jet.ux) && zero(jet.vx) && !zero(jet.uy) && !zero(jet.vy))
        || (zero(jet.uy) && zero(jet.vy) && !zero(jet.ux) && !zero(jet.vx));
    SuitabilityPoint { z, det, exempt, unsuitable: zero(det) && !exempt }
}

pub fn suitability_report(spec: &ActivationSpec, points: &[Complex]) -> Result<SuitabilityReport> {
    let points = points
        .iter()
        .map(|&z| Ok(suitability_of_jet(z, &spec.partials(z)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuitabilityReport { points })
}

#[cfg(test)]
mod tests;
