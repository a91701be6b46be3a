//! Real-valued building blocks: the 1-D kernels of the split family and the
//! amplitude curves `g(r)` of the amplitude-phase family.

use std::f64::consts::PI;

/// Logistic function, evaluated without overflow for either sign.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^u)`
pub fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// Error function.
///
/// Below `x = 3` the everywhere-positive series
/// `erf x = (2/√π) e^{−x²} Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1))` is used; it has no
/// cancellation. From 3 upward the result is `1 − erfc x` with `erfc` taken
/// from its continued fraction, which keeps the small gap to 1 accurate.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x == 0.0 {
        return x;
    }
    if x >= 3.0 {
        return 1.0 - erfc_cf(x);
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// `erfc x = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, evaluated
/// bottom-up with a fixed depth that converges to double precision for `x ≥ 3`.
fn erfc_cf(x: f64) -> f64 {
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    (-x * x).exp() / PI.sqrt() / tail
}

/// Scaled tanh: `tanh(u) / (1 − (u−3)e^{−u})`.
pub fn stanh(u: f64) -> f64 {
    if u < -700.0 {
        return 0.0;
    }
    u.tanh() / (1.0 - (u - 3.0) * (-u).exp())
}

pub fn stanh_deriv(u: f64) -> f64 {
    if u < -700.0 {
        return 0.0;
    }
    let t = u.tanh();
    let e = (-u).exp();
    let den = 1.0 - (u - 3.0) * e;
    let dden = (u - 4.0) * e;
    ((1.0 - t * t) * den - t * dden) / (den * den)
}

/// `2c₁/(1+e^{−c₂u}) − c₁`
pub fn psigmoid(u: f64, c1: f64, c2: f64) -> f64 {
    2.0 * c1 * sigmoid(c2 * u) - c1
}

/// `(c₂/(2c₁))(c₁² − f²)`, written in terms of the function value.
pub fn psigmoid_deriv(u: f64, c1: f64, c2: f64) -> f64 {
    let f = psigmoid(u, c1, c2);
    c2 / (2.0 * c1) * (c1 * c1 - f * f)
}

pub fn hard_tanh(u: f64) -> f64 {
    u.clamp(-1.0, 1.0)
}

pub fn elu(u: f64, alpha: f64) -> f64 {
    if u > 0.0 {
        u
    } else {
        alpha * u.exp_m1()
    }
}

pub fn elu_deriv(u: f64, alpha: f64) -> f64 {
    if u > 0.0 {
        1.0
    } else {
        alpha * u.exp()
    }
}

pub fn swish(u: f64, beta: f64) -> f64 {
    u * sigmoid(beta * u)
}

pub fn swish_deriv(u: f64, beta: f64) -> f64 {
    let s = sigmoid(beta * u);
    s + beta * u * s * (1.0 - s)
}

pub fn mish(u: f64) -> f64 {
    u * softplus(u).tanh()
}

/// Closed-form Mish derivative `e^u ω / δ²` with
/// `ω = 4(u+1) + 4e^{2u} + e^{3u} + e^u(4u+6)` and `δ = 2e^u + e^{2u} + 2`.
///
/// Outside `|u| ≤ 30` the exponentials are rebalanced through the chain-rule
/// form `tanh(sp) + u·sech²(sp)·σ(u)`, which agrees to rounding there.
pub fn mish_deriv(u: f64) -> f64 {
    if u.abs() > 30.0 {
        let t = softplus(u).tanh();
        return t + u * (1.0 - t * t) * sigmoid(u);
    }
    let e = u.exp();
    let omega = 4.0 * (u + 1.0) + 4.0 * e * e + e * e * e + e * (4.0 * u + 6.0);
    let delta = 2.0 * e + e * e + 2.0;
    e * omega / (delta * delta)
}
