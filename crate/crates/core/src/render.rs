//! Domain colouring and surface export.
//!
//! A value `w = f(z)` becomes an HSL colour with full saturation:
//!
//! ```text
//! hue        = (arg w / 2π) mod 1          arg w ∈ (−π, π]
//! lightness  = |w| / (1 + |w|)             0 at a zero, → 1 at a pole
//! ```
//!
//! so zeros are black, large moduli wash out to white, and the phase winds
//! through the colour wheel. The ring shadings scale the lightness by
//! `0.75 + 0.25·frac(log₂|w|)` and, for `abs-arg-rings`, additionally by
//! `0.75 + 0.25·frac(12·hue)`. Points where `f` fails or is not finite are
//! painted pure white.
//!
//! Pixel column `ix` is grid node `ix`; pixel row 0 is the top edge `im_max`.
//! Surface grids are written with rows in ascending `im` instead.

use crate::activations::ActivationSpec;
use crate::cplx::Complex;
use crate::error::{Error, Result};
use crate::verify::GridSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// Builtin test functions that are not catalog activations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// `z`
    Identity,
    /// `z²`
    Square,
    /// `conj z`
    Conj,
    /// `(z⁴ − 1)/z²`, with zeros at the fourth roots of unity and a double pole at 0.
    Z4m1OverZ2,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Identity, Fixture::Square, Fixture::Conj, Fixture::Z4m1OverZ2];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Identity => "z",
            Fixture::Square => "z2",
            Fixture::Conj => "conj",
            Fixture::Z4m1OverZ2 => "z4m1-over-z2",
        }
    }

    pub fn eval(self, z: Complex) -> Result<Complex> {
        match self {
            Fixture::Identity => Ok(z),
            Fixture::Square => Ok(z * z),
            Fixture::Conj => Ok(z.conj()),
            Fixture::Z4m1OverZ2 => {
                if z.is_zero() {
                    return Err(Error::Singularity { id: self.name().into(), z, locus: "point 0".into() });
                }
                let z2 = z * z;
                Ok((z2 * z2 - 1.0) / z2)
            }
        }
    }

    pub fn exclusion_distance(self, z: Complex) -> f64 {
        match self {
            Fixture::Z4m1OverZ2 => z.abs(),
            _ => f64::INFINITY,
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown fixture `{s}`")))
    }
}

/// Anything that can be rendered.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Subject {
    Spec(ActivationSpec),
    Fixture(Fixture),
}

impl Subject {
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        match self {
            Subject::Spec(s) => s.eval(z),
            Subject::Fixture(f) => f.eval(z),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Subject::Spec(s) => s.to_string(),
            Subject::Fixture(f) => f.name().into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shading {
    ArgOnly,
    LogAbsRings,
    AbsArgRings,
}

impl FromStr for Shading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arg-only" => Ok(Shading::ArgOnly),
            "log-abs-rings" => Ok(Shading::LogAbsRings),
            "abs-arg-rings" => Ok(Shading::AbsArgRings),
            other => Err(Error::Parse(format!("unknown shading `{other}`"))),
        }
    }
}

pub const WHITE: [u8; 3] = [255, 255, 255];
/// Sectors per turn in the `abs-arg-rings` phase shading.
pub const ARG_SECTORS: f64 = 12.0;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

fn channel(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// HSL with unit saturation; `hue` and `light` in `[0, 1]`.
pub fn hsl_to_rgb(hue: f64, light: f64) -> [u8; 3] {
    let c = 1.0 - (2.0 * light - 1.0).abs();
    let h = hue * 6.0;
    let x = c * (1.0 - (h.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = light - c / 2.0;
    [channel(r + m), channel(g + m), channel(b + m)]
}

/// Colour of one value under `shading`.
pub fn color(w: Result<Complex>, shading: Shading) -> [u8; 3] {
    let w = match w {
        Ok(w) if w.is_finite() => w,
        _ => return WHITE,
    };
    let r = w.abs();
    if r == 0.0 {
        return [0, 0, 0];
    }
    let hue = (w.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
    let mut light = r / (1.0 + r);
    if matches!(shading, Shading::LogAbsRings | Shading::AbsArgRings) {
        light *= 0.75 + 0.25 * frac(r.log2());
    }
    if shading == Shading::AbsArgRings {
        light *= 0.75 + 0.25 * frac(ARG_SECTORS * hue);
    }
    hsl_to_rgb(hue, light)
}

/// Row-major RGB image, 8 bits per channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl ImageBuffer {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    /// Binary PPM (`P6`) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_ppm())?;
        Ok(())
    }

    /// Lowercase hex SHA-256 of the PPM encoding.
    pub fn sha256(&self) -> String {
        sha256_hex(&self.to_ppm())
    }

    /// Number of 4-connected regions of pixels satisfying `pred`.
    pub fn count_regions(&self, pred: impl Fn([u8; 3]) -> bool) -> usize {
        let mut seen = vec![false; self.pixels.len()];
        let mut regions = 0;
        for start in 0..self.pixels.len() {
            if seen[start] || !pred(self.pixels[start]) {
                continue;
            }
            regions += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(k) = queue.pop_front() {
                let (x, y) = (k % self.width, k / self.width);
                let mut next = Vec::with_capacity(4);
                if x > 0 {
                    next.push(k - 1);
                }
                if x + 1 < self.width {
                    next.push(k + 1);
                }
                if y > 0 {
                    next.push(k - self.width);
                }
                if y + 1 < self.height {
                    next.push(k + self.width);
                }
                for n in next {
                    if !seen[n] && pred(self.pixels[n]) {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        regions
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// All channels at most this value count as near-black.
pub const NEAR_BLACK: u8 = 32;
/// All channels at least this value count as near-white.
pub const NEAR_WHITE: u8 = 250;

pub fn is_near_black(p: [u8; 3]) -> bool {
    p.iter().all(|&c| c <= NEAR_BLACK)
}

pub fn is_near_white(p: [u8; 3]) -> bool {
    p.iter().all(|&c| c >= NEAR_WHITE)
}

pub fn domain_color(f: impl Fn(Complex) -> Result<Complex>, grid: &GridSpec, shading: Shading) -> ImageBuffer {
    let mut pixels = Vec::with_capacity(grid.len());
    for row in 0..grid.ny {
        let iy = grid.ny - 1 - row;
        for ix in 0..grid.nx {
            pixels.push(color(f(grid.node(ix, iy)), shading));
        }
    }
    ImageBuffer { width: grid.nx, height: grid.ny, pixels }
}

pub fn domain_color_subject(subject: &Subject, grid: &GridSpec, shading: Shading) -> ImageBuffer {
    domain_color(|z| subject.eval(z), grid, shading)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Re,
    Im,
    Abs,
    Arg,
}

impl Part {
    pub fn name(self) -> &'static str {
        match self {
            Part::Re => "re",
            Part::Im => "im",
            Part::Abs => "abs",
            Part::Arg => "arg",
        }
    }

    /// The chosen part; failures and the argument of 0 give NaN.
    pub fn of(self, w: Result<Complex>) -> f64 {
        match w {
            Ok(w) => match self {
                Part::Re => w.re,
                Part::Im => w.im,
                Part::Abs => w.abs(),
                Part::Arg => w.arg(),
            },
            Err(_) => f64::NAN,
        }
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Part::Re, Part::Im, Part::Abs, Part::Arg]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown part `{s}`")))
    }
}

/// `values[iy·nx + ix]` holds the part at node `(ix, iy)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub grid: GridSpec,
    pub part: Part,
    pub values: Vec<f64>,
}

impl Surface {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Two comment lines (grid, part) then one line per `iy`, values at 17
    /// significant digits, missing values as `NaN`.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut out = format!(
            "# grid {},{},{},{},{},{}\n# part {}\n",
            g.re_min,
            g.re_max,
            g.im_min,
            g.im_max,
            g.nx,
            g.ny,
            self.part.name()
        );
        for row in self.values.chunks(g.nx) {
            let cells: Vec<String> =
                row.iter().map(|v| if v.is_nan() { "NaN".into() } else { format!("{v:.16e}") }).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("surface csv: {m}"));
        let mut lines = text.lines();
        let grid_line = lines.next().and_then(|l| l.strip_prefix("# grid ")).ok_or_else(|| bad("missing grid line"))?;
        let f: Vec<&str> = grid_line.split(',').collect();
        if f.len() != 6 {
            return Err(bad("grid line needs six fields"));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad("bad grid number"));
        let cnt = |t: &str| t.parse::<usize>().map_err(|_| bad("bad grid count"));
        let grid = GridSpec::new(num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?, cnt(f[4])?, cnt(f[5])?)?;
        let part = lines.next().and_then(|l| l.strip_prefix("# part ")).ok_or_else(|| bad("missing part line"))?;
        let part: Part = part.parse()?;
        let values = lines
            .flat_map(|l| l.split(','))
            .map(|t| t.parse::<f64>().map_err(|_| bad("bad value")))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Surface { grid, part, values })
    }
}

pub fn surface_export(f: impl Fn(Complex) -> Result<Complex>, grid: &GridSpec, part: Part) -> Surface {
    Surface { grid: *grid, part, values: grid.nodes().map(|z| part.of(f(z))).collect() }
}
