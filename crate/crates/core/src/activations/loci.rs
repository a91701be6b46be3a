//! Geometric loci used to describe singularities and kinks.

use crate::cplx::Complex;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Locus {
    Point { at: Complex },
    /// `base + n·step` for every integer `n`.
    Lattice { base: Complex, step: Complex },
    /// Closed half-line `origin + t·dir`, `t ≥ 0`, with `|dir| = 1`.
    Ray { origin: Complex, dir: Complex },
    /// Full line through `point` with unit direction `dir`.
    Line { point: Complex, dir: Complex },
    Circle { center: Complex, radius: f64 },
}

impl Locus {
    pub fn vertical(re: f64) -> Locus {
        Locus::Line { point: Complex::real(re), dir: Complex::new(0.0, 1.0) }
    }

    pub fn horizontal(im: f64) -> Locus {
        Locus::Line { point: Complex::new(0.0, im), dir: Complex::real(1.0) }
    }

    pub fn ray(origin: Complex, dir: Complex) -> Locus {
        Locus::Ray { origin, dir: dir / dir.abs() }
    }

    pub fn distance(&self, z: Complex) -> f64 {
        match *self {
            Locus::Point { at } => (z - at).abs(),
            Locus::Lattice { base, step } => {
                let w = z - base;
                let t = (w * step.conj()).re / step.norm_sqr();
                let n = t.round();
                [n - 1.0, n, n + 1.0]
                    .iter()
                    .map(|&k| (w - step.scale(k)).abs())
                    .fold(f64::INFINITY, f64::min)
            }
            Locus::Ray { origin, dir } => {
                let w = z - origin;
                let t = (w * dir.conj()).re.max(0.0);
                (w - dir.scale(t)).abs()
            }
            Locus::Line { point, dir } => {
                let w = z - point;
                (w * dir.conj()).im.abs()
            }
            Locus::Circle { center, radius } => ((z - center).abs() - radius).abs(),
        }
    }

    pub fn contains(&self, z: Complex, eps: f64) -> bool {
        self.distance(z) <= eps
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Point { at } => write!(f, "z = {at}"),
            Locus::Lattice { base, step } => write!(f, "z = {base} + n*({step}), n in Z"),
            Locus::Ray { origin, dir } => write!(f, "z = {origin} + t*({dir}), t >= 0"),
            Locus::Line { point, dir } => write!(f, "z = {point} + t*({dir}), t in R"),
            Locus::Circle { center, radius } => write!(f, "|z - ({center})| = {radius}"),
        }
    }
}
