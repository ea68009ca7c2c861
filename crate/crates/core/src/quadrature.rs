//! Gauss–Chebyshev and Gauss–Legendre rules, in double and in arbitrary precision.

use std::f64::consts::PI;

use rug::Float;

use crate::error::{Error, Result};
use crate::maps::Interval;
use crate::precision::{PrecisionContext, Real};

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Gauss–Chebyshev nodes `cos((2k-1)π/(2n))`, `k = 1..n`, for the probability
/// measure `dx / (π sqrt(1 - x^2))`; all weights are `1/n`.
pub fn gauss_chebyshev(n: usize) -> Rule<f64> {
    let nodes = (1..=n)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    Rule {
        nodes,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Angles `θ_k = (2k-1)π/(2n)` of the Gauss–Chebyshev nodes.
pub fn gauss_chebyshev_angles_mp(n: usize, ctx: &PrecisionContext) -> Vec<Real> {
    let pi = ctx.pi();
    (1..=n)
        .map(|k| Float::with_val(ctx.bits(), &pi * (2 * k - 1) as u64) / (2 * n) as u64)
        .collect()
}

pub fn gauss_chebyshev_mp(n: usize, ctx: &PrecisionContext) -> Rule<Real> {
    let nodes = gauss_chebyshev_angles_mp(n, ctx)
        .into_iter()
        .map(|t| t.cos())
        .collect();
    let w = ctx.real(1) / n as u64;
    Rule {
        nodes,
        weights: vec![w; n],
    }
}

/// Gauss–Legendre rule on `[-1, 1]` (weights sum to 2), nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<Rule<f64>> {
    if n == 0 {
        return Err(Error::domain("Gauss–Legendre rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_f64(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_f64(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Rule { nodes, weights })
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn legendre_mp(n: usize, x: &Real, bits: u32) -> (Real, Real) {
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 1..n {
        let mut p2 = Float::with_val(bits, x * &p1) * (2 * k + 1) as u64;
        p2 -= Float::with_val(bits, &p0 * k as u64);
        p2 /= (k + 1) as u64;
        p0 = std::mem::replace(&mut p1, p2);
    }
    let num = (Float::with_val(bits, x * &p1) - &p0) * n as u64;
    let den = Float::with_val(bits, x * x) - 1u32;
    (p1, num / den)
}

/// Gauss–Legendre rule on `[-1, 1]` at the context precision, nodes ascending.
pub fn gauss_legendre_mp(n: usize, ctx: &PrecisionContext) -> Result<Rule<Real>> {
    if n == 0 {
        return Err(Error::domain("Gauss–Legendre rule needs at least one node"));
    }
    let bits = ctx.bits() + 16;
    let f64_rule = gauss_legendre(n)?;
    let tol = Float::with_val(bits, Float::i_exp(1, -(ctx.bits() as i32) - 4));
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &x0) in f64_rule.nodes.iter().enumerate() {
        if i >= n.div_ceil(2) {
            break;
        }
        let mut x = Float::with_val(bits, x0);
        let mut converged = false;
        for _ in 0..200 {
            let (p, d) = legendre_mp(n, &x, bits);
            let dx = p / d;
            x -= &dx;
            if dx.abs() < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                context: "Gauss–Legendre node refinement".into(),
                iterations: 200,
                residual: f64::NAN,
            });
        }
        let (_, d) = legendre_mp(n, &x, bits);
        let one_minus = Float::with_val(bits, 1u32 - Float::with_val(bits, &x * &x));
        let w = Float::with_val(bits, 2u32) / (one_minus * Float::with_val(bits, &d * &d));
        nodes.push(x);
        weights.push(w);
    }
    let half = nodes.len();
    let mut all_nodes = Vec::with_capacity(n);
    let mut all_weights = Vec::with_capacity(n);
    for k in 0..half {
        all_nodes.push(ctx.real(&nodes[k]));
        all_weights.push(ctx.real(&weights[k]));
    }
    let start = if n % 2 == 1 { half - 1 } else { half };
    for k in (0..start).rev() {
        all_nodes.push(ctx.real(-nodes[k].clone()));
        all_weights.push(ctx.real(&weights[k]));
    }
    if n % 2 == 1 {
        all_nodes[half - 1] = ctx.real(0);
    }
    Ok(Rule {
        nodes: all_nodes,
        weights: all_weights,
    })
}

/// Gauss–Legendre rule mapped onto `J`, weights summing to `|J|`.
pub fn gauss_legendre_on(j: &Interval, n: usize) -> Result<Rule<f64>> {
    let base = gauss_legendre(n)?;
    let (m, h) = (j.midpoint(), 0.5 * j.length());
    Ok(Rule {
        nodes: base.nodes.iter().map(|x| m + h * x).collect(),
        weights: base.weights.iter().map(|w| h * w).collect(),
    })
}

pub fn gauss_legendre_on_mp(j: &Interval, n: usize, ctx: &PrecisionContext) -> Result<Rule<Real>> {
    let base = gauss_legendre_mp(n, ctx)?;
    let m = ctx.real(j.a()) + j.b();
    let m = m / 2u32;
    let h = ctx.real(j.b()) - j.a();
    let h = h / 2u32;
    Ok(Rule {
        nodes: base.nodes.iter().map(|x| Float::with_val(ctx.bits(), x * &h) + &m).collect(),
        weights: base.weights.iter().map(|w| Float::with_val(ctx.bits(), w * &h)).collect(),
    })
}
