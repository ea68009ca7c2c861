//! The Markov pair `f_1 = 1/(z^2 - 1)^{1/2}`,
//! `f_2 = (1/π) ∫_E σ̂(x)/(z - x) dx/√(1 - x^2)` with `σ̂` the Cauchy
//! transform of a measure `σ` on `F`.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{Interval, IntervalUnion};
use crate::precision::{PrecisionContext, Real};
use crate::quadrature::{gauss_chebyshev_angles_mp, gauss_legendre_on_mp};
use crate::series::{f1_germ, LaurentGerm};

/// Density `σ'(t)` of `σ` on one component of `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Density {
    #[default]
    Uniform,
    /// `Σ c_k t^k`, ascending.
    Polynomial { coeffs: Vec<f64> },
}

impl Density {
    pub fn eval_f64(&self, t: f64) -> f64 {
        match self {
            Density::Uniform => 1.0,
            Density::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    fn eval(&self, t: &Real) -> Real {
        let prec = t.prec();
        match self {
            Density::Uniform => Float::with_val(prec, 1u32),
            Density::Polynomial { coeffs } => {
                let mut acc = Float::new(prec);
                for c in coeffs.iter().rev() {
                    acc *= t;
                    acc += c;
                }
                acc
            }
        }
    }

    fn validate(&self, j: &Interval) -> Result<()> {
        if let Density::Polynomial { coeffs } = self {
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config("density coefficients must be finite and nonempty".into()));
            }
            for k in 0..=256 {
                let t = j.a() + j.length() * k as f64 / 256.0;
                if self.eval_f64(t) <= 0.0 {
                    return Err(Error::Config(format!(
                        "density is not positive at t = {t} on [{}, {}]",
                        j.a(),
                        j.b()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPair {
    pub support: IntervalUnion,
    /// One density per component of the support.
    pub densities: Vec<Density>,
}

/// `σ̂` sampled at the Gauss–Chebyshev nodes of `E`.
#[derive(Debug, Clone)]
pub struct SampledTransform {
    pub nodes: Vec<Real>,
    pub values: Vec<Real>,
}

impl MarkovPair {
    pub fn uniform(support: IntervalUnion) -> Self {
        let densities = vec![Density::Uniform; support.components().len()];
        MarkovPair { support, densities }
    }

    pub fn validate(&self) -> Result<()> {
        self.support.ensure_right_of_unit().map_err(|e| Error::Config(e.to_string()))?;
        if self.densities.len() != self.support.components().len() {
            return Err(Error::Config(format!(
                "{} densities given for {} components",
                self.densities.len(),
                self.support.components().len()
            )));
        }
        for (d, j) in self.densities.iter().zip(self.support.components()) {
            d.validate(j)?;
        }
        Ok(())
    }

    /// Gauss–Legendre discretization of `σ` with `per_component` nodes.
    fn sigma_rule(&self, per_component: usize, ctx: &PrecisionContext) -> Result<(Vec<Real>, Vec<Real>)> {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (d, j) in self.densities.iter().zip(self.support.components()) {
            let rule = gauss_legendre_on_mp(j, per_component, ctx)?;
            for (t, w) in rule.nodes.into_iter().zip(rule.weights) {
                weights.push(w * d.eval(&t));
                nodes.push(t);
            }
        }
        Ok((nodes, weights))
    }

    /// `σ̂(x) = ∫ dσ(t)/(x - t)` at the `m` Gauss–Chebyshev nodes of `E`.
    pub fn sample_transform(&self, m: usize, per_component: usize, ctx: &PrecisionContext) -> Result<SampledTransform> {
        self.validate()?;
        let (t, w) = self.sigma_rule(per_component, ctx)?;
        let nodes: Vec<Real> = gauss_chebyshev_angles_mp(m, ctx).into_iter().map(|a| a.cos()).collect();
        let values = nodes
            .iter()
            .map(|x| {
                let mut acc = ctx.real(0);
                for (tk, wk) in t.iter().zip(&w) {
                    acc += Float::with_val(ctx.bits(), wk / Float::with_val(ctx.bits(), x - tk));
                }
                acc
            })
            .collect();
        Ok(SampledTransform { nodes, values })
    }
}

impl SampledTransform {
    /// `s_k = ∫ T_k σ̂ dτ_E`, `k < count` (`T_0 = 2`).
    pub fn chebyshev_moments(&self, count: usize) -> Vec<Real> {
        let prec = self.nodes[0].prec();
        let m = self.nodes.len() as u64;
        let mut s = vec![Float::new(prec); count];
        for (x, h) in self.nodes.iter().zip(&self.values) {
            let two_x = Float::with_val(prec, x * 2u32);
            let mut prev = Float::with_val(prec, 2u32);
            let mut cur = two_x.clone();
            for (k, sk) in s.iter_mut().enumerate() {
                let t = if k == 0 { &prev } else { &cur };
                *sk += Float::with_val(prec, t * h);
                if k >= 1 {
                    let next = Float::with_val(prec, &two_x * &cur) - &prev;
                    prev = std::mem::replace(&mut cur, next);
                }
            }
        }
        s.into_iter().map(|v| v / m).collect()
    }

    /// Power moments `∫ x^k σ̂ dτ_E`, `k < count`.
    pub fn power_moments(&self, count: usize) -> Vec<Real> {
        let prec = self.nodes[0].prec();
        let m = self.nodes.len() as u64;
        let mut out = vec![Float::new(prec); count];
        for (x, h) in self.nodes.iter().zip(&self.values) {
            let mut p = h.clone();
            for o in out.iter_mut() {
                *o += &p;
                p *= x;
            }
        }
        out.into_iter().map(|v| v / m).collect()
    }

    /// Germ of `f_2` at infinity: `Σ m_k z^{-(k+1)}`, `len` terms.
    pub fn f2_germ(&self, len: usize, ctx: &PrecisionContext) -> Result<LaurentGerm> {
        let m = self.power_moments(len);
        LaurentGerm::new(1, m.into_iter().map(|v| ctx.cplx(v)).collect(), ctx)
    }
}

/// Germs of `(f_1, f_2)` to `len` terms from `m` Gauss–Chebyshev nodes.
pub fn markov_germs(
    pair: &MarkovPair,
    len: usize,
    m: usize,
    per_component: usize,
    ctx: &PrecisionContext,
) -> Result<(LaurentGerm, LaurentGerm)> {
    let sampled = pair.sample_transform(m, per_component, ctx)?;
    Ok((f1_germ(len, ctx)?, sampled.f2_germ(len, ctx)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_is_negative_on_e() {
        let ctx = PrecisionContext::new(128).unwrap();
        let pair = MarkovPair::uniform(IntervalUnion::single(Interval::new(2.0, 3.0).unwrap()));
        let s = pair.sample_transform(16, 16, &ctx).unwrap();
        assert!(s.values.iter().all(|v| v.is_sign_negative()));
        // σ̂(x) = log((2-x)/(3-x)) for the uniform density on [2, 3]
        for (x, h) in s.nodes.iter().zip(&s.values) {
            let x = x.to_f64();
            assert!((h.to_f64() - ((2.0 - x) / (3.0 - x)).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_density() {
        let pair = MarkovPair {
            support: IntervalUnion::single(Interval::new(2.0, 3.0).unwrap()),
            densities: vec![Density::Polynomial { coeffs: vec![-2.5, 1.0] }],
        };
        assert!(pair.validate().is_err());
    }
}
