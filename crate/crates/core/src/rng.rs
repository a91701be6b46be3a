//! Seeded randomness.
//!
//! All randomness in the crate flows from `ChaCha8Rng::seed_from_u64`, so a
//! seed fixes every weight, shuffle order, dataset and sample point.

use crate::cplx::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the closed disc `|z| ≤ radius`, by rejection from the square.
pub fn uniform_disc(rng: &mut Rng64, radius: f64) -> Complex {
    loop {
        let x = rng.random_range(-radius..=radius);
        let y = rng.random_range(-radius..=radius);
        if x * x + y * y <= radius * radius {
            return Complex::new(x, y);
        }
    }
}

/// `n` points uniform in the disc, drawn from a fresh generator.
pub fn disc_points(seed: u64, n: usize, radius: f64) -> Vec<Complex> {
    let mut rng = seeded(seed);
    (0..n).map(|_| uniform_disc(&mut rng, radius)).collect()
}
