//! JSON experiment configuration shared by all CLI subcommands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{Interval, IntervalUnion};
use crate::markov::{Density, MarkovPair};
use crate::precision::PrecisionContext;
use crate::series::{AlgebraicFunctionSpec, Factor};
use crate::verify::CheckSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairConfig {
    /// The Markov pair `f_1 = 1/√(z²-1)`, `f_2` built from `σ` on `support`.
    Markov {
        support: Vec<Interval>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        densities: Option<Vec<Density>>,
    },
    /// `Π (A_j - 1/φ(z))^{α_j}` over one interval (default `E`).
    AlgebraicOneInterval {
        #[serde(default = "Interval::unit")]
        interval: Interval,
        factors: Vec<Factor>,
    },
    /// Products over two disjoint real intervals.
    AlgebraicTwoInterval {
        intervals: [Interval; 2],
        factors: [Vec<Factor>; 2],
    },
}

fn field_error(field: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{field}: {m}")),
        e => Error::Config(format!("{field}: {e}")),
    }
}

/// The pair after validation.
#[derive(Debug, Clone)]
pub enum Pair {
    Markov(MarkovPair),
    Algebraic(AlgebraicFunctionSpec),
}

impl PairConfig {
    pub fn resolve(&self) -> Result<Pair> {
        match self {
            PairConfig::Markov { support, densities } => {
                let support = IntervalUnion::new(support.clone())
                    .map_err(|e| Error::Config(format!("pair.support: {e}")))?;
                let densities = densities
                    .clone()
                    .unwrap_or_else(|| vec![Density::Uniform; support.components().len()]);
                let pair = MarkovPair { support, densities };
                pair.validate().map_err(|e| field_error("pair", e))?;
                Ok(Pair::Markov(pair))
            }
            PairConfig::AlgebraicOneInterval { interval, factors } => {
                Ok(Pair::Algebraic(AlgebraicFunctionSpec::one_interval(*interval, factors.clone())))
            }
            PairConfig::AlgebraicTwoInterval { intervals, factors } => Ok(Pair::Algebraic(AlgebraicFunctionSpec {
                intervals: intervals.to_vec(),
                factors: factors.to_vec(),
            })),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodeConfig {
    /// Grid size of the scalar and vector equilibrium solvers.
    pub equilibrium: usize,
    /// Gauss–Chebyshev nodes for balayage and the arcsine measure.
    pub balayage: usize,
    /// Balayage nodes of the constancy suite.
    pub lemma2: usize,
}

impl Default for NodeConfig {
    fn default() -> Self {
        NodeConfig {
            equilibrium: 400,
            balayage: 400,
            lemma2: 2000,
        }
    }
}

/// Degrees and thresholds of the figure command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigureConfig {
    /// Index of the type I polynomials (degree ≤ n).
    pub type1_n: usize,
    /// Index of the type II polynomial `q_{2n}`.
    pub type2_n: usize,
    /// Segments the type II zeros should gather near; `[-1, 1]` when empty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub type2_target: Vec<Interval>,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            type1_n: 40,
            type2_n: 20,
            type2_target: Vec::new(),
        }
    }
}

/// Recognized tolerance keys and their defaults.
pub const TOLERANCE_DEFAULTS: &[(&str, f64)] = &[
    ("equilibrium_residual", 1e-3),
    ("lemma1_ks", 0.1),
    ("corollary1_ks", 0.08),
    ("mu_lambda_e_ks", 1e-2),
    ("monotone_slack", 0.01),
    ("strong_asymptotics", 0.05),
    ("lemma2_spread", 1e-6),
    ("figure_fraction", 0.9),
    ("figure_imag", 0.05),
    ("figure_type1_distance", 0.1),
    ("figure_near", 0.05),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pair: PairConfig,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    #[serde(default)]
    pub nodes: NodeConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Free-form provenance note carried into the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn default_degrees() -> Vec<usize> {
    vec![8, 16, 32]
}

fn default_bits() -> u32 {
    512
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return Err(Error::Config("degrees: need a nonempty list of positive indices".into()));
        }
        if self.precision_bits < 64 {
            return Err(Error::Config(format!(
                "precision_bits: {} is below the minimum of 64",
                self.precision_bits
            )));
        }
        PrecisionContext::new(self.precision_bits).map_err(|e| Error::Config(format!("precision_bits: {e}")))?;
        if self.nodes.equilibrium < 50 {
            return Err(Error::Config("nodes.equilibrium: need at least 50".into()));
        }
        if self.nodes.balayage < 2 || self.nodes.lemma2 < 2 {
            return Err(Error::Config("nodes.balayage and nodes.lemma2: need at least 2".into()));
        }
        for (k, v) in &self.tolerances {
            if !TOLERANCE_DEFAULTS.iter().any(|(name, _)| name == k) {
                return Err(Error::Config(format!("tolerances.{k}: unknown tolerance")));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Config(format!("tolerances.{k}: must be positive")));
            }
        }
        let pair = self.pair.resolve()?;
        if let Pair::Algebraic(spec) = &pair {
            spec.value_at_infinity(&self.context()?).map_err(|e| field_error("pair", e))?;
        }
        if let Some(f) = &self.figure {
            if f.type1_n == 0 || f.type2_n == 0 {
                return Err(Error::Config("figure: degrees must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn context(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.precision_bits)
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCE_DEFAULTS
                .iter()
                .find(|(name, _)| *name == key)
                .map(|p| p.1)
                .unwrap_or_else(|| panic!("unknown tolerance key {key}"))
        })
    }

    /// Settings of the measure-comparison suites with the KS bound `ks_key`.
    pub fn check_settings(&self, ks_key: &str) -> CheckSettings {
        CheckSettings {
            equilibrium_nodes: self.nodes.equilibrium,
            balayage_nodes: self.nodes.balayage,
            equilibrium_tolerance: self.tolerance("equilibrium_residual"),
            ks_tolerance: self.tolerance(ks_key),
            slack: self.tolerance("monotone_slack"),
        }
    }
}
