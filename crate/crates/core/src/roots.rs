//! Polynomial zeros at working precision and the unit-circle zero equation
//! `Π (ζ - β_j)/(1 - β_j ζ) · ζ^{3n} = -1`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{phi, Sheet};
use crate::poly::Polynomial;
use crate::precision::{abs, Cplx, PrecisionContext, Real};

#[derive(Debug, Clone)]
pub struct Roots {
    pub roots: Vec<Cplx>,
    /// `max_k |p(r_k)| / Σ_j |a_j| |r_k|^j`.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ABERTH_ITERATIONS: usize = 2000;

/// All zeros of `p` with multiplicity, by Aberth–Ehrlich iteration followed
/// by Newton polishing.
pub fn poly_roots(p: &Polynomial, ctx: &PrecisionContext) -> Result<Roots> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::domain("polynomial of degree zero has no roots"));
    }
    if p.leading().is_zero() {
        return Err(Error::domain("leading coefficient vanishes"));
    }
    let bits = ctx.bits();
    // coefficient growth of near-Chebyshev polynomials costs about 2 bits per degree
    let wide = ctx.widened(32 + 4 * d as u32);
    let wp = wide.bits();
    let q = Polynomial::new(p.coeffs().iter().map(|c| wide.cplx(c)).collect()).monic();
    // Fujiwara-type bound for the radius of the starting circle
    let mut radius = 0.0f64;
    for (k, c) in q.coeffs().iter().enumerate().take(d) {
        let a = abs(c).to_f64();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / (d - k) as f64));
        }
    }
    let radius = radius.clamp(1e-3, 1e300);
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let mut z: Vec<Cplx> = (0..d)
        .map(|k| {
            let theta: Float = Float::with_val(wp, &two_pi * k as u64) / d as u64 + 0.4;
            let r = radius * (1.0 + 0.05 * ((k * 7919) % 13) as f64 / 13.0);
            let (s, c) = theta.sin_cos(Float::new(wp));
            Complex::with_val(wp, (c * r, s * r))
        })
        .collect();
    let stop = wide.real(Float::i_exp(1, -(bits as i32 + 8)));
    let backward_stop = wide.real(Float::i_exp(1, -(wp as i32 - 8)));
    let mut iterations = 0;
    let mut converged = vec![false; d];
    while iterations < MAX_ABERTH_ITERATIONS {
        iterations += 1;
        let mut all = true;
        for k in 0..d {
            if converged[k] {
                continue;
            }
            let (pv, dpv) = q.eval_with_derivative(&z[k]);
            if pv.is_zero() {
                converged[k] = true;
                continue;
            }
            let backward = Float::with_val(wp, abs(&pv) / q.abs_eval(&abs(&z[k])));
            if backward <= backward_stop {
                converged[k] = true;
                continue;
            }
            let w = Complex::with_val(wp, &pv / &dpv);
            let mut s = Complex::new(wp);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    s += Complex::with_val(wp, &z[k] - zj).recip();
                }
            }
            let denom = Complex::with_val(wp, 1u32) - Complex::with_val(wp, &w * &s);
            let step = if denom.is_zero() { w } else { w / denom };
            let size = abs(&step);
            let scale = abs(&z[k]).max(&wide.real(1));
            z[k] -= step;
            if size <= Float::with_val(wp, &stop * &scale) {
                converged[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    if converged.iter().any(|c| !c) {
        return Err(Error::Precision(format!(
            "Aberth iteration did not converge within {MAX_ABERTH_ITERATIONS} sweeps"
        )));
    }
    for zk in z.iter_mut() {
        for _ in 0..2 {
            let (pv, dpv) = q.eval_with_derivative(zk);
            if dpv.is_zero() || pv.is_zero() {
                break;
            }
            *zk -= pv / dpv;
        }
    }
    let mut residual = 0.0f64;
    let out: Vec<Cplx> = z.iter().map(|r| ctx.cplx(r)).collect();
    for r in &out {
        let num = abs(&p.eval(r));
        let den = p.abs_eval(&abs(r));
        let rel = if den.is_zero() { 0.0 } else { (num / den).to_f64() };
        residual = residual.max(rel);
    }
    Ok(Roots {
        roots: out,
        residual,
        iterations,
    })
}

/// Roots of the unit-circle equation and their projections `cos θ`.
#[derive(Debug, Clone, Serialize)]
pub struct CircleRoots {
    /// `θ_j ∈ (0, π)`, ascending.
    #[serde(skip)]
    pub thetas: Vec<Real>,
    pub n: usize,
}

impl CircleRoots {
    /// `cos θ_j`, ascending in x.
    pub fn zeros(&self) -> Vec<Real> {
        let mut x: Vec<Real> = self.thetas.iter().map(|t| t.clone().cos()).collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        x
    }

    /// The `4n` points `e^{±iθ_j}` on the unit circle.
    pub fn circle_points(&self) -> Vec<Cplx> {
        let mut out = Vec::with_capacity(2 * self.thetas.len());
        for t in &self.thetas {
            let prec = t.prec();
            let (s, c) = t.clone().sin_cos(Float::new(prec));
            out.push(Complex::with_val(prec, (&c, &s)));
            out.push(Complex::with_val(prec, (c, -s)));
        }
        out
    }
}

/// `Π (ζ - β_j)/(1 - β_j ζ) · ζ^{3n}` at any `ζ`.
pub fn circle_lhs(betas: &[Real], n: usize, zeta: &Cplx) -> Cplx {
    let prec = zeta.prec().0;
    let mut acc = Pow::pow(Complex::with_val(prec, zeta), 3 * n as u32);
    for b in betas {
        let num = Complex::with_val(prec, zeta - b);
        let den = Complex::with_val(prec, 1u32) - Complex::with_val(prec, zeta * b);
        acc *= num / den;
    }
    acc
}

/// Continuous argument of the left side on `ζ = e^{iθ}`:
/// `ψ(θ) = 4nθ + 2 Σ atan(β sin θ / (1 - β cos θ))`, with `ψ'(θ)`.
fn circle_phase(betas: &[Real], n: usize, theta: &Real) -> (Real, Real) {
    let prec = theta.prec();
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    let mut psi = Float::with_val(prec, theta * (4 * n) as u64);
    let mut dpsi = Float::with_val(prec, 3 * n as u64);
    for b in betas {
        let num = Float::with_val(prec, b * &s);
        let den = Float::with_val(prec, 1u32) - Float::with_val(prec, b * &c);
        psi += Float::with_val(prec, num.atan2_ref(&den)) * 2u32;
        let b2 = Float::with_val(prec, b * b);
        let poisson = (Float::with_val(prec, 1u32) - &b2)
            / (Float::with_val(prec, 1u32) - Float::with_val(prec, b * &c) * 2u32 + &b2);
        dpsi += poisson;
    }
    (psi, dpsi)
}

/// Solves the circle equation on `θ ∈ (0, π)` by locating the `2n` crossings
/// of `ψ(θ) = (2k - 1)π` with safeguarded Newton steps.
pub fn circle_roots(betas: &[Real], n: usize, ctx: &PrecisionContext) -> Result<CircleRoots> {
    if betas.len() != n {
        return Err(Error::domain(format!("expected {n} values of β, got {}", betas.len())));
    }
    if betas.iter().any(|b| b.clone().abs() >= 1) {
        return Err(Error::domain("every β must lie in (-1, 1)"));
    }
    let wp = ctx.bits();
    let pi = ctx.pi();
    let tol = ctx.real(Float::i_exp(1, -(wp as i32 - 4)));
    let mut thetas = Vec::with_capacity(2 * n);
    for k in 1..=2 * n {
        let target = Float::with_val(wp, &pi * (2 * k - 1) as u64);
        let mut lo = ctx.real(0);
        let mut hi = pi.clone();
        let mut t = Float::with_val(wp, &target / (4 * n) as u64);
        let mut done = false;
        for _ in 0..wp as usize + 100 {
            let (psi, dpsi) = circle_phase(betas, n, &t);
            let f = Float::with_val(wp, &psi - &target);
            if f.is_zero() {
                done = true;
                break;
            }
            if f.is_sign_negative() {
                lo = t.clone();
            } else {
                hi = t.clone();
            }
            let mut next = Float::with_val(wp, &t - Float::with_val(wp, &f / &dpsi));
            if next <= lo || next >= hi {
                next = Float::with_val(wp, &lo + &hi) / 2u32;
            }
            let step = Float::with_val(wp, &next - &t).abs();
            t = next;
            if step <= tol {
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::Precision(format!("circle root {k} did not converge")));
        }
        thetas.push(t);
    }
    Ok(CircleRoots { thetas, n })
}

/// `δ_n(z) = Π (ζ₁ - β_j)/(1 - ζ₁ β_j) · ζ₁^{3n}` with `ζ₁ = 1/φ(z)`.
pub fn delta_n(z: &Cplx, betas: &[Real], ctx: &PrecisionContext) -> Result<Cplx> {
    let zeta = phi(z, Sheet::One, ctx)?;
    Ok(circle_lhs(betas, betas.len(), &zeta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_z_squared_minus_one() {
        let ctx = PrecisionContext::default();
        let p = Polynomial::from_f64(&[-1.0, 0.0, 1.0], &ctx);
        let r = poly_roots(&p, &ctx).unwrap();
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.real().to_f64()).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![-1.0, 1.0]);
        assert!(r.residual < 1e-70);
    }

    #[test]
    fn circle_roots_without_betas_are_explicit() {
        // β = 0 reduces the equation to ζ^{4n} = -1
        let ctx = PrecisionContext::default();
        let n = 3;
        let betas = vec![ctx.real(0); n];
        let r = circle_roots(&betas, n, &ctx).unwrap();
        for (k, t) in r.thetas.iter().enumerate() {
            let expect = std::f64::consts::PI * (2 * k + 1) as f64 / (4 * n) as f64;
            assert!((t.to_f64() - expect).abs() < 1e-15);
        }
    }
}
