//! Finitely supported positive measures.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weighted point masses with nodes in the extended complex plane.
///
/// Nodes are kept sorted by real part, then imaginary part; a node at infinity
/// is stored as `(+inf, 0)` and sorts last. A node's weight is never negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    nodes: Vec<Option<[f64; 2]>>,
    weights: Vec<f64>,
    mass: f64,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        let nodes = raw
            .nodes
            .into_iter()
            .map(|n| match n {
                Some([re, im]) => Complex64::new(re, im),
                None => INFINITY,
            })
            .collect();
        let m = DiscreteMeasure::new(nodes, raw.weights)?;
        if (m.mass - raw.mass).abs() > 1e-12 * m.mass.max(1.0) {
            return Err(Error::Config(format!(
                "measure mass {} does not match the weight sum {}",
                raw.mass, m.mass
            )));
        }
        Ok(m)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            nodes: m
                .nodes
                .iter()
                .map(|z| (!is_infinite(*z)).then_some([z.re, z.im]))
                .collect(),
            weights: m.weights,
            mass: m.mass,
        }
    }
}

pub const INFINITY: Complex64 = Complex64::new(f64::INFINITY, 0.0);

pub fn is_infinite(z: Complex64) -> bool {
    z.re == f64::INFINITY
}

fn node_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::domain(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        for (z, &w) in nodes.iter().zip(&weights) {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain(format!("invalid weight {w}")));
            }
            let finite = z.re.is_finite() && z.im.is_finite();
            if !finite && !is_infinite(*z) {
                return Err(Error::domain(format!("invalid node {z}")));
            }
        }
        let mut pairs: Vec<(Complex64, f64)> = nodes.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| node_order(&a.0, &b.0));
        let (nodes, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mass = weights.iter().sum();
        Ok(DiscreteMeasure {
            nodes,
            weights,
            mass,
        })
    }

    pub fn from_real(nodes: &[f64], weights: Vec<f64>) -> Result<Self> {
        Self::new(nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect(), weights)
    }

    pub fn dirac(z: Complex64) -> Self {
        Self::new(vec![z], vec![1.0]).expect("a unit point mass is valid")
    }

    /// Equal weights `1/len` at the given points.
    pub fn uniform(nodes: Vec<Complex64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::domain("uniform measure on an empty set"));
        }
        let w = 1.0 / nodes.len() as f64;
        let k = nodes.len();
        Self::new(nodes, vec![w; k])
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn is_real(&self) -> bool {
        self.nodes.iter().all(|z| z.im == 0.0 && z.re.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.nodes.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    /// `Σ c_k μ_k`, with coincident nodes merged.
    pub fn combine(parts: &[(f64, &DiscreteMeasure)]) -> Result<Self> {
        let mut pairs: Vec<(Complex64, f64)> = Vec::new();
        for (c, m) in parts {
            pairs.extend(m.iter().map(|(z, w)| (z, c * w)));
        }
        pairs.sort_by(|a, b| node_order(&a.0, &b.0));
        let mut nodes: Vec<Complex64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (z, w) in pairs {
            if nodes.last() == Some(&z) {
                *weights.last_mut().unwrap() += w;
            } else {
                nodes.push(z);
                weights.push(w);
            }
        }
        Self::new(nodes, weights)
    }

    /// Projection onto the real axis (each atom moved to its real part).
    pub fn real_projection(&self) -> Result<Self> {
        if self.nodes.iter().any(|z| is_infinite(*z)) {
            return Err(Error::domain("cannot project an atom at infinity"));
        }
        Self::new(
            self.nodes.iter().map(|z| Complex64::new(z.re, 0.0)).collect(),
            self.weights.clone(),
        )
    }

    /// `μ((-∞, x])` for a real-supported measure.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.ensure_real()?;
        let k = self.nodes.partition_point(|z| z.re <= x);
        Ok(self.weights[..k].iter().sum())
    }

    /// Cumulative weights at each node (real-supported measures).
    pub fn cumulative(&self) -> Result<Vec<f64>> {
        self.ensure_real()?;
        let mut acc = 0.0;
        Ok(self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect())
    }

    pub fn ensure_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            Err(Error::domain(
                "measure has non-real atoms; project it onto the real axis explicitly",
            ))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_sorted_and_mass_summed() {
        let m = DiscreteMeasure::new(
            vec![Complex64::new(1.0, 0.5), Complex64::new(-1.0, 0.0), Complex64::new(1.0, -0.5)],
            vec![0.25, 0.5, 0.25],
        )
        .unwrap();
        assert_eq!(m.nodes()[0], Complex64::new(-1.0, 0.0));
        assert_eq!(m.nodes()[1], Complex64::new(1.0, -0.5));
        assert_eq!(m.mass(), 1.0);
    }

    #[test]
    fn rejects_negative_weight() {
        assert!(DiscreteMeasure::from_real(&[0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let m = DiscreteMeasure::new(vec![INFINITY, Complex64::new(0.5, 0.0)], vec![0.5, 0.5]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("null"));
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(is_infinite(back.nodes()[1]));
    }

    #[test]
    fn combine_merges_coincident_nodes() {
        let a = DiscreteMeasure::from_real(&[0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let b = DiscreteMeasure::from_real(&[1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let c = DiscreteMeasure::combine(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.weights(), &[0.25, 0.5, 0.25]);
        assert_eq!(c.cdf(1.0).unwrap(), 0.75);
    }

    #[test]
    fn cdf_refuses_complex_support() {
        let m = DiscreteMeasure::dirac(Complex64::new(0.0, 1.0));
        assert!(m.cdf(0.0).is_err());
        assert_eq!(m.real_projection().unwrap().cdf(0.0).unwrap(), 1.0);
    }
}
