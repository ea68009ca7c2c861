//! Logarithmic, Green and surface potentials of discrete measures, balayage
//! onto `E = [-1, 1]`, and the arcsine measure.
//!
//! Measures carry double-precision nodes and weights; potentials are summed at
//! the context precision.

use num_complex::Complex64;
use rug::Complex;

use crate::error::{Error, Result};
use crate::maps::{green_function_interval, phi, phi_real, Interval, Pole, Sheet};
use crate::measure::{is_infinite, DiscreteMeasure};
use crate::precision::{abs, Cplx, PrecisionContext, Real};
use crate::quadrature::gauss_chebyshev;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PotentialKind {
    Log,
    Green,
    ScalarP,
    Tilde,
    Spherical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialValue {
    pub value: Real,
    pub kind: PotentialKind,
}

impl PotentialValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn node_mp(z: Complex64, ctx: &PrecisionContext) -> Result<Cplx> {
    if is_infinite(z) {
        return Err(Error::domain("potential of an atom at infinity"));
    }
    Ok(ctx.cplx((z.re, z.im)))
}

fn on_unit_interval(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 1.0
}

fn ensure_off_unit(z: &Cplx, what: &str) -> Result<()> {
    if z.imag().is_zero() && z.real().clone().abs() <= 1.0 {
        return Err(Error::domain(format!("{what}: point lies on [-1, 1]")));
    }
    Ok(())
}

/// `U^μ(z) = Σ w_i log 1/|z - t_i|`.
pub fn log_potential(mu: &DiscreteMeasure, z: &Cplx, ctx: &PrecisionContext) -> Result<PotentialValue> {
    let mut acc = ctx.real(0);
    for (t, w) in mu.iter() {
        let d = abs(&Complex::with_val(ctx.bits(), z - node_mp(t, ctx)?));
        if d.is_zero() {
            return Err(Error::Evaluation("log potential evaluated at an atom".into()));
        }
        acc -= d.ln() * w;
    }
    Ok(PotentialValue {
        value: acc,
        kind: PotentialKind::Log,
    })
}

/// `Ũ^μ(z) = Σ w_i log 1/|1 - φ(z) φ(t_i)|`.
pub fn tilde_potential(mu: &DiscreteMeasure, z: &Cplx, ctx: &PrecisionContext) -> Result<PotentialValue> {
    ensure_off_unit(z, "tilde potential")?;
    let pz = phi(z, Sheet::Zero, ctx)?;
    let mut acc = ctx.real(0);
    for (t, w) in mu.iter() {
        if on_unit_interval(t) {
            return Err(Error::domain("tilde potential of a measure charging [-1, 1]"));
        }
        let pt = phi(&node_mp(t, ctx)?, Sheet::Zero, ctx)?;
        let d = abs(&(ctx.one() - Complex::with_val(ctx.bits(), &pz * &pt)));
        if d.is_zero() {
            return Err(Error::Evaluation("φ(z)φ(t) = 1 in the tilde potential".into()));
        }
        acc -= d.ln() * w;
    }
    Ok(PotentialValue {
        value: acc,
        kind: PotentialKind::Tilde,
    })
}

/// Surface potential `P^μ = 2U^μ - Ũ^μ` of a measure on the second sheet over `F`.
pub fn scalar_potential_p(mu: &DiscreteMeasure, z: &Cplx, ctx: &PrecisionContext) -> Result<PotentialValue> {
    let u = log_potential(mu, z, ctx)?.value;
    let ut = tilde_potential(mu, z, ctx)?.value;
    Ok(PotentialValue {
        value: u * 2u32 - ut,
        kind: PotentialKind::ScalarP,
    })
}

/// `P^μ(z)` summed directly from the kernel `log |1 - φ(z)φ(t)| / |z - t|^2`.
pub fn scalar_potential_p_direct(
    mu: &DiscreteMeasure,
    z: &Cplx,
    ctx: &PrecisionContext,
) -> Result<PotentialValue> {
    ensure_off_unit(z, "surface potential")?;
    let pz = phi(z, Sheet::Zero, ctx)?;
    let mut acc = ctx.real(0);
    for (t, w) in mu.iter() {
        if on_unit_interval(t) {
            return Err(Error::domain("surface potential of a measure charging [-1, 1]"));
        }
        let tm = node_mp(t, ctx)?;
        let pt = phi(&tm, Sheet::Zero, ctx)?;
        let num = abs(&(ctx.one() - Complex::with_val(ctx.bits(), &pz * &pt)));
        let den = abs(&Complex::with_val(ctx.bits(), z - &tm)).square();
        if den.is_zero() || num.is_zero() {
            return Err(Error::Evaluation("surface potential kernel is singular here".into()));
        }
        acc += (num / den).ln() * w;
    }
    Ok(PotentialValue {
        value: acc,
        kind: PotentialKind::ScalarP,
    })
}

/// `G^μ_J(z) = Σ w_i g_J(z, t_i)`.
pub fn green_potential(
    j: &Interval,
    mu: &DiscreteMeasure,
    z: &Cplx,
    ctx: &PrecisionContext,
) -> Result<PotentialValue> {
    let mut acc = ctx.real(0);
    for (t, w) in mu.iter() {
        let pole = if is_infinite(t) {
            Pole::Infinity
        } else {
            Pole::Finite(node_mp(t, ctx)?)
        };
        acc += green_function_interval(j, z, &pole, ctx)? * w;
    }
    Ok(PotentialValue {
        value: acc,
        kind: PotentialKind::Green,
    })
}

/// `p(μ; z) = Σ w_i log |H(z, t_i)|` with `H(z, x) = z - x` for `|x| <= 1`,
/// `(z - x)/|x|` for `|x| > 1` and `1` at infinity.
pub fn spherical_potential(mu: &DiscreteMeasure, z: &Cplx, ctx: &PrecisionContext) -> Result<PotentialValue> {
    let mut acc = ctx.real(0);
    for (t, w) in mu.iter() {
        if is_infinite(t) {
            continue;
        }
        let tm = node_mp(t, ctx)?;
        let d = abs(&Complex::with_val(ctx.bits(), z - &tm));
        if d.is_zero() {
            return Err(Error::Evaluation("spherical potential evaluated at an atom".into()));
        }
        let mut term = d.ln();
        let r = abs(&tm);
        if r > 1u32 {
            term -= r.ln();
        }
        acc += term * w;
    }
    Ok(PotentialValue {
        value: acc,
        kind: PotentialKind::Spherical,
    })
}

/// Logarithmic potential at `x ∈ [-1, 1]` of the absolutely continuous measure
/// whose Gauss–Chebyshev discretization is `mu`, from the expansion
/// `log 1/|cos θ - cos ψ| = log 2 + Σ_k (2/k) cos kθ cos kψ`.
pub fn log_potential_on_e(mu: &DiscreteMeasure, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain("log_potential_on_e needs a point of [-1, 1]"));
    }
    let mut angles = Vec::with_capacity(mu.len());
    for (t, w) in mu.iter() {
        if !on_unit_interval(t) {
            return Err(Error::domain("log_potential_on_e needs a measure on [-1, 1]"));
        }
        angles.push((t.re.acos(), w));
    }
    let psi = x.acos();
    let mut acc = std::f64::consts::LN_2 * mu.mass();
    let mut small_run = 0;
    for k in 1..mu.len().max(2) {
        let kf = k as f64;
        let moment: f64 = angles.iter().map(|&(th, w)| w * (kf * th).cos()).sum();
        acc += 2.0 / kf * moment * (kf * psi).cos();
        if moment.abs() < 1e-17 * mu.mass() {
            small_run += 1;
            if small_run == 8 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(acc)
}

/// `-Ũ^μ(z) = Σ w_i log |1 - φ(z) φ(t_i)|`, the function swept by balayage.
pub fn sheet_interaction(mu: &DiscreteMeasure, z: &Cplx, ctx: &PrecisionContext) -> Result<Real> {
    Ok(-tilde_potential(mu, z, ctx)?.value)
}

/// Chebyshev (arcsine) measure of `E`, discretized at the `n` Gauss–Chebyshev nodes.
pub fn arcsine_measure(n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::domain("arcsine measure needs at least one node"));
    }
    let r = gauss_chebyshev(n);
    DiscreteMeasure::from_real(&r.nodes, r.weights)
}

/// Balayage of a measure on `R \ [-1, 1]` onto `E`, discretized at `n`
/// Gauss–Chebyshev nodes. An atom at `t` sweeps to the density
/// `(1/π) sqrt(t^2 - 1) / (|t - x| sqrt(1 - x^2))`.
pub fn balayage_onto_e(mu: &DiscreteMeasure, n: usize) -> Result<DiscreteMeasure> {
    if n < 2 {
        return Err(Error::domain("balayage needs at least two nodes"));
    }
    let mut atoms = Vec::with_capacity(mu.len());
    let mut at_infinity = 0.0;
    for (t, w) in mu.iter() {
        if is_infinite(t) {
            at_infinity += w;
            continue;
        }
        if t.im != 0.0 || t.re.abs() <= 1.0 {
            return Err(Error::domain(format!(
                "balayage onto E needs real atoms outside [-1, 1], got {t}"
            )));
        }
        atoms.push(((t.re * t.re - 1.0).sqrt(), t.re, w));
    }
    let rule = gauss_chebyshev(n);
    let weights = rule
        .nodes
        .iter()
        .map(|&x| {
            let s: f64 = atoms.iter().map(|&(r, t, w)| w * r / (t - x).abs()).sum();
            (s + at_infinity) / n as f64
        })
        .collect();
    DiscreteMeasure::from_real(&rule.nodes, weights)
}

/// Density of `balayage_onto_e(δ_t)` with respect to `dx` at `x ∈ (-1, 1)`.
pub fn balayage_density(t: f64, x: f64) -> f64 {
    (t * t - 1.0).sqrt() / ((t - x).abs() * (1.0 - x * x).sqrt() * std::f64::consts::PI)
}

/// Value of the constant `U^{β(δ_t)} - U^{δ_t}` on `E`.
pub fn balayage_constant(t: f64) -> f64 {
    phi_real(t).abs().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn point_mass_potentials() {
        let c = ctx();
        let z = c.cplx(2);
        let d0 = DiscreteMeasure::dirac(Complex64::new(0.0, 0.0));
        assert!((log_potential(&d0, &z, &c).unwrap().to_f64() + 2f64.ln()).abs() < 1e-15);
        let sym = DiscreteMeasure::from_real(&[-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(log_potential(&sym, &c.cplx(0), &c).unwrap().value.is_zero());
        assert!(log_potential(&d0, &c.cplx(0), &c).is_err());
    }

    #[test]
    fn tilde_and_surface_potential_of_point_mass() {
        let c = ctx();
        let d3 = DiscreteMeasure::dirac(Complex64::new(3.0, 0.0));
        let z = c.cplx(2);
        let expected = (1.0 - (2.0 + 3f64.sqrt()) * (3.0 + 8f64.sqrt())).abs().ln();
        let ut = tilde_potential(&d3, &z, &c).unwrap().to_f64();
        assert!((ut + expected).abs() < 1e-14);
        let p = scalar_potential_p(&d3, &z, &c).unwrap().to_f64();
        assert!((p - expected).abs() < 1e-14);
        assert!(scalar_potential_p(&d3, &c.cplx(3), &c).is_err());
    }

    #[test]
    fn spherical_kernel_cases() {
        let c = ctx();
        let z = c.cplx((0.5, 2.0));
        let zf = Complex64::new(0.5, 2.0);
        let inner = DiscreteMeasure::dirac(Complex64::new(0.25, 0.0));
        let outer = DiscreteMeasure::dirac(Complex64::new(3.0, 0.0));
        let inf = DiscreteMeasure::dirac(crate::measure::INFINITY);
        let p = spherical_potential(&inner, &z, &c).unwrap().to_f64();
        assert!((p - (zf - 0.25).norm().ln()).abs() < 1e-15);
        let p = spherical_potential(&outer, &z, &c).unwrap().to_f64();
        assert!((p - ((zf - 3.0).norm().ln() - 3f64.ln())).abs() < 1e-15);
        assert!(spherical_potential(&inf, &z, &c).unwrap().value.is_zero());
    }

    #[test]
    fn arcsine_single_node() {
        let m = arcsine_measure(1).unwrap();
        assert!(m.nodes()[0].re.abs() < 1e-16);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn balayage_rejects_atoms_on_e() {
        let m = DiscreteMeasure::dirac(Complex64::new(0.5, 0.0));
        assert!(balayage_onto_e(&m, 10).is_err());
    }
}
