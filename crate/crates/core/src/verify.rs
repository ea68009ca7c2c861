//! Zero-distribution checks: empirical measures of zero clouds, the
//! Kolmogorov–Smirnov distance as a proxy for weak-* convergence, the
//! strong-asymptotics formula for `q_{2n}`, and the report-producing suites.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_scalar_equilibrium, solve_vector_equilibrium, type2_limit_measure};
use crate::error::{Error, Result};
use crate::hermite_pade::{
    auxiliary_zeros, hp_type2_germ, hp_type2_markov, real_zeros_mp, split_type2, ZeroCloud,
};
use crate::maps::{phi, phi_real, Interval, Sheet};
use crate::markov::{markov_germs, Density, MarkovPair};
use crate::measure::DiscreteMeasure;
use crate::potentials::{arcsine_measure, balayage_onto_e, log_potential, sheet_interaction};
use crate::poly::Polynomial;
use crate::precision::{abs, PrecisionContext};
use crate::roots::delta_n;

/// Equal weights `1/|points|` at the points of the cloud.
pub fn empirical_measure(cloud: &ZeroCloud) -> Result<DiscreteMeasure> {
    if cloud.is_empty() {
        return Err(Error::domain("empirical measure of an empty zero cloud"));
    }
    DiscreteMeasure::uniform(cloud.points.clone())
}

/// `sup_x |F_1(x) - F_2(x)|` over the merged node set.
pub fn ks_distance(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<f64> {
    mu1.ensure_real()?;
    mu2.ensure_real()?;
    let (c1, c2) = (mu1.cumulative()?, mu2.cumulative()?);
    let (m1, m2) = (mu1.mass(), mu2.mass());
    let (x1, x2) = (mu1.nodes(), mu2.nodes());
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < x1.len() || j < x2.len() {
        let next = match (x1.get(i), x2.get(j)) {
            (Some(a), Some(b)) => a.re.min(b.re),
            (Some(a), None) => a.re,
            (None, Some(b)) => b.re,
            (None, None) => unreachable!(),
        };
        while i < x1.len() && x1[i].re <= next {
            i += 1;
        }
        while j < x2.len() && x2[j].re <= next {
            j += 1;
        }
        let f1 = if i == 0 { 0.0 } else { c1[i - 1] / m1 };
        let f2 = if j == 0 { 0.0 } else { c2[j - 1] / m2 };
        worst = worst.max((f1 - f2).abs());
    }
    Ok(worst.min(1.0))
}

/// Right side of the strong asymptotics of `-(1/n) log |q_{2n}(z)|`:
/// `U^{λ_F}(z) - ∫ log 1/|φ(z) - φ(t)| dλ_F(t) - 2 log |φ(z)| + log 2`.
///
/// Points of `E` are rejected; points of `F` other than atoms of `λ_F` are allowed.
pub fn strong_asymptotics_rhs(lambda_f: &DiscreteMeasure, z: Complex64, ctx: &PrecisionContext) -> Result<f64> {
    lambda_f.ensure_real()?;
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        return Err(Error::domain("strong asymptotics are not defined on E"));
    }
    if lambda_f.nodes().contains(&z) {
        return Err(Error::domain("z coincides with an atom of λ_F"));
    }
    let zm = ctx.from_c64(z);
    let u = log_potential(lambda_f, &zm, ctx)?.value;
    let pz = phi(&zm, Sheet::Zero, ctx)?;
    let mut cross = ctx.real(0);
    for (t, w) in lambda_f.iter() {
        let d = Complex::with_val(ctx.bits(), &pz - phi_real(t.re));
        cross += abs(&d).ln() * w;
    }
    let rhs = u + cross - abs(&pz).ln() * 2u32 + ctx.real(2).ln();
    Ok(rhs.to_f64())
}

/// `-(1/n) log |q(z)|`.
pub fn normalized_log_modulus(q: &Polynomial, n: usize, z: Complex64, ctx: &PrecisionContext) -> f64 {
    let v = abs(&q.eval(&ctx.from_c64(z)));
    -(v.ln() / n as u32).to_f64()
}

/// Least-squares `C` in `err ≈ C/n`.
pub fn fit_inverse_n(points: &[(usize, f64)]) -> f64 {
    let num: f64 = points.iter().map(|&(n, e)| e / n as f64).sum();
    let den: f64 = points.iter().map(|&(n, _)| 1.0 / (n as f64 * n as f64)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Sizes and tolerances of the measure-comparison suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckSettings {
    /// Nodes of the scalar and vector equilibrium solvers.
    pub equilibrium_nodes: usize,
    /// Gauss–Chebyshev nodes carrying balayage and arcsine measures.
    pub balayage_nodes: usize,
    pub equilibrium_tolerance: f64,
    /// Bound on the KS distance at the largest `n`.
    pub ks_tolerance: f64,
    /// Allowed increase of the KS distance along the `n` sequence.
    pub slack: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            equilibrium_nodes: 400,
            balayage_nodes: 400,
            equilibrium_tolerance: 1e-3,
            ks_tolerance: 0.1,
            slack: 0.01,
        }
    }
}

/// The inputs of a suite, echoed into its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub support: Vec<[f64; 2]>,
    pub densities: Vec<Density>,
    pub n_list: Vec<usize>,
    pub precision_bits: u32,
    pub settings: CheckSettings,
}

impl ReportInputs {
    fn new(pair: &MarkovPair, n_list: &[usize], settings: &CheckSettings, ctx: &PrecisionContext) -> Self {
        ReportInputs {
            support: pair.support.components().iter().map(|&j| j.into()).collect(),
            densities: pair.densities.clone(),
            n_list: n_list.to_vec(),
            precision_bits: ctx.bits(),
            settings: settings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub check: String,
    /// KS distance at the largest `n`.
    pub ks_distance: f64,
    pub n_sequence: Vec<(usize, f64)>,
    /// Every step of the sequence rises by at most the slack.
    pub monotone_flag: bool,
    pub passed: bool,
    pub details: BTreeMap<String, f64>,
    pub inputs: ReportInputs,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn sorted_sequence(mut seq: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    seq.sort_by_key(|p| p.0);
    seq
}

fn monotone_within(seq: &[(usize, f64)], slack: f64) -> bool {
    seq.windows(2).all(|w| w[1].1 <= w[0].1 + slack)
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::domain("n_list must be nonempty with positive entries"));
    }
    Ok(())
}

/// Auxiliary zeros `b_{n,j}` against the scalar equilibrium measure `λ_F`.
pub fn check_lemma1(
    pair: &MarkovPair,
    n_list: &[usize],
    settings: &CheckSettings,
    ctx: &PrecisionContext,
) -> Result<ComparisonReport> {
    check_n_list(n_list)?;
    pair.validate()?;
    let f = &pair.support;
    let lambda = solve_scalar_equilibrium(f, settings.equilibrium_nodes, settings.equilibrium_tolerance)?;
    let hull = f.hull();
    let gaps = f.gaps();
    let per_n: Vec<(usize, f64, usize, usize)> = n_list
        .par_iter()
        .map(|&n| {
            let hp = hp_type2_markov(pair, n, ctx)?;
            let split = split_type2(&hp, ctx)?;
            let aux = auxiliary_zeros(&split, &hull, ctx)?;
            let xs: Vec<f64> = aux.zeros.iter().map(|b| b.to_f64()).collect();
            let outside = xs.iter().filter(|&&x| !hull.contains_real(x)).count();
            let per_gap = gaps
                .iter()
                .map(|&(a, b)| xs.iter().filter(|&&x| x > a && x < b).count())
                .max()
                .unwrap_or(0);
            let ks = ks_distance(&empirical_measure(&aux.cloud())?, &lambda.measure)?;
            Ok((n, ks, outside, per_gap))
        })
        .collect::<Result<_>>()?;
    let seq = sorted_sequence(per_n.iter().map(|p| (p.0, p.1)).collect());
    let outside: usize = per_n.iter().map(|p| p.2).sum();
    let per_gap = per_n.iter().map(|p| p.3).max().unwrap_or(0);
    let ks = seq.last().map(|p| p.1).unwrap_or(1.0);
    let monotone = monotone_within(&seq, settings.slack);
    let mut details = BTreeMap::new();
    details.insert("zeros_outside_hull".into(), outside as f64);
    details.insert("max_zeros_per_gap".into(), per_gap as f64);
    details.insert("equilibrium_residual".into(), lambda.residual);
    Ok(ComparisonReport {
        check: "lemma1".into(),
        ks_distance: ks,
        n_sequence: seq,
        monotone_flag: monotone,
        passed: ks <= settings.ks_tolerance && monotone && outside == 0 && per_gap <= 1,
        details,
        inputs: ReportInputs::new(pair, n_list, settings, ctx),
    })
}

/// `(1/(2n)) χ(q_{2n})` against `μ = ¼ β_E(λ_F) + ¾ τ_E`, and for a single
/// interval `F` also against the vector equilibrium measure `λ_E`.
pub fn check_corollary1(
    pair: &MarkovPair,
    n_list: &[usize],
    settings: &CheckSettings,
    ctx: &PrecisionContext,
) -> Result<ComparisonReport> {
    check_n_list(n_list)?;
    pair.validate()?;
    let f = &pair.support;
    let lambda = solve_scalar_equilibrium(f, settings.equilibrium_nodes, settings.equilibrium_tolerance)?;
    let mu = type2_limit_measure(&lambda.measure, settings.balayage_nodes)?;
    let lambda_e = match f.components() {
        [j] => Some(solve_vector_equilibrium(j, settings.equilibrium_nodes, settings.equilibrium_tolerance)?),
        _ => None,
    };
    let per_n: Vec<(usize, f64, Option<f64>, f64)> = n_list
        .par_iter()
        .map(|&n| {
            let hp = hp_type2_markov(pair, n, ctx)?;
            let (x, max_imag) = real_zeros_mp(&hp.q, ctx)?;
            let nodes: Vec<f64> = x.iter().map(|v| v.to_f64()).collect();
            let chi = DiscreteMeasure::from_real(&nodes, vec![1.0 / nodes.len() as f64; nodes.len()])?;
            let ks = ks_distance(&chi, &mu)?;
            let ks_e = lambda_e.as_ref().map(|s| ks_distance(&chi, &s.measure)).transpose()?;
            Ok((n, ks, ks_e, max_imag))
        })
        .collect::<Result<_>>()?;
    let seq = sorted_sequence(per_n.iter().map(|p| (p.0, p.1)).collect());
    let ks = seq.last().map(|p| p.1).unwrap_or(1.0);
    let monotone = monotone_within(&seq, settings.slack);
    let mut details = BTreeMap::new();
    details.insert("mass_of_2mu".into(), 2.0 * mu.mass());
    details.insert(
        "max_imag_part".into(),
        per_n.iter().map(|p| p.3).fold(0.0, f64::max),
    );
    if let Some(s) = &lambda_e {
        details.insert("ks_mu_lambda_e".into(), ks_distance(&mu, &s.measure)?);
        for p in &per_n {
            if let Some(k) = p.2 {
                details.insert(format!("ks_lambda_e_n{}", p.0), k);
            }
        }
    }
    Ok(ComparisonReport {
        check: "corollary1".into(),
        ks_distance: ks,
        n_sequence: seq,
        monotone_flag: monotone,
        passed: ks <= settings.ks_tolerance && monotone,
        details,
        inputs: ReportInputs::new(pair, n_list, settings, ctx),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointAsymptotics {
    pub z: [f64; 2],
    pub rhs: f64,
    /// `(n, |-(1/n) log |q_{2n}(z)| - rhs|)`.
    pub errors: Vec<(usize, f64)>,
    /// Fitted `C` in `error ≈ C/n`.
    pub fitted_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub check: String,
    pub points: Vec<PointAsymptotics>,
    pub tolerance: f64,
    pub passed: bool,
    pub inputs: ReportInputs,
}

impl AsymptoticsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Strong asymptotics of `q_{2n}` at the given points; passes when every
/// error at the largest `n` is at most `tolerance`.
pub fn check_strong_asymptotics(
    pair: &MarkovPair,
    n_list: &[usize],
    points: &[Complex64],
    tolerance: f64,
    settings: &CheckSettings,
    ctx: &PrecisionContext,
) -> Result<AsymptoticsReport> {
    check_n_list(n_list)?;
    pair.validate()?;
    let lambda = solve_scalar_equilibrium(&pair.support, settings.equilibrium_nodes, settings.equilibrium_tolerance)?;
    let rhs: Vec<f64> = points
        .iter()
        .map(|&z| strong_asymptotics_rhs(&lambda.measure, z, ctx))
        .collect::<Result<_>>()?;
    let lhs: Vec<(usize, Vec<f64>)> = n_list
        .par_iter()
        .map(|&n| {
            let hp = hp_type2_markov(pair, n, ctx)?;
            Ok((n, points.iter().map(|&z| normalized_log_modulus(&hp.q, n, z, ctx)).collect()))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(points.len());
    for (k, (&z, &r)) in points.iter().zip(&rhs).enumerate() {
        let errors = sorted_sequence(lhs.iter().map(|(n, v)| (*n, (v[k] - r).abs())).collect());
        out.push(PointAsymptotics {
            z: [z.re, z.im],
            rhs: r,
            fitted_c: fit_inverse_n(&errors),
            errors,
        });
    }
    let passed = out
        .iter()
        .all(|p| p.errors.last().is_some_and(|e| e.1 <= tolerance));
    Ok(AsymptoticsReport {
        check: "strong".into(),
        points: out,
        tolerance,
        passed,
        inputs: ReportInputs::new(pair, n_list, settings, ctx),
    })
}

/// `|δ_n(z)|^{1/n}` from the auxiliary zeros of `q_{2n}`.
pub fn delta_n_root(pair: &MarkovPair, n: usize, z: Complex64, ctx: &PrecisionContext) -> Result<f64> {
    let hp = hp_type2_markov(pair, n, ctx)?;
    let split = split_type2(&hp, ctx)?;
    let aux = auxiliary_zeros(&split, &pair.support.hull(), ctx)?;
    let d = delta_n(&ctx.from_c64(z), &aux.betas(), ctx)?;
    Ok((abs(&d).ln() / n as u32).exp().to_f64())
}

/// Fifty test points off `E ∪ F` for the constancy check: four points near
/// `E`, ten on the vertical segment above 4, 36 on the circle of radius 4.
pub fn lemma2_points() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(50);
    for (a, b) in [(0.3, 0.7), (-0.3, 0.7), (0.3, -0.7), (-0.3, -0.7)] {
        pts.push(Complex64::new(a, b));
    }
    for k in 0..10 {
        pts.push(Complex64::new(4.0, k as f64 / 10.0));
    }
    for k in 0..36 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 36.0 + 0.05;
        pts.push(Complex64::from_polar(4.0, th));
    }
    pts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub check: String,
    /// `max - min` of `v(z; μ) + ½ U^{β_E(μ) + τ_E}(z)` per test measure.
    pub spreads: BTreeMap<String, f64>,
    pub nodes: usize,
    pub points: usize,
    pub tolerance: f64,
    pub precision_bits: u32,
    pub passed: bool,
}

impl ConstancyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Spread of `v(z; μ) + ½ U^{β_E(μ) + τ_E}(z)` over `points`, with
/// `v(z; μ) = Σ w_i log |1 - φ(z) φ(t_i)|`.
pub fn lemma2_spread(mu: &DiscreteMeasure, nodes: usize, points: &[Complex64], ctx: &PrecisionContext) -> Result<f64> {
    let beta = balayage_onto_e(mu, nodes)?;
    let tau = arcsine_measure(nodes)?;
    let swept = DiscreteMeasure::combine(&[(1.0, &beta), (1.0, &tau)])?;
    let vals: Vec<f64> = points
        .par_iter()
        .map(|&z| {
            let zm = ctx.from_c64(z);
            let v = sheet_interaction(mu, &zm, ctx)?;
            let u = log_potential(&swept, &zm, ctx)?.value;
            Ok((v + u / 2u32).to_f64())
        })
        .collect::<Result<_>>()?;
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// The constancy check for `δ_2` and the 50-atom uniform measure on `[2, 3]`.
pub fn check_lemma2(nodes: usize, tolerance: f64, ctx: &PrecisionContext) -> Result<ConstancyReport> {
    let uniform = DiscreteMeasure::from_real(
        &(0..50).map(|k| 2.0 + (k as f64 + 0.5) / 50.0).collect::<Vec<_>>(),
        vec![0.02; 50],
    )?;
    let points = lemma2_points();
    let mut spreads = BTreeMap::new();
    spreads.insert(
        "dirac_2".to_string(),
        lemma2_spread(&DiscreteMeasure::dirac(Complex64::new(2.0, 0.0)), nodes, &points, ctx)?,
    );
    spreads.insert("uniform_2_3".to_string(), lemma2_spread(&uniform, nodes, &points, ctx)?);
    let passed = spreads.values().all(|s| *s <= tolerance);
    Ok(ConstancyReport {
        check: "lemma2".into(),
        spreads,
        nodes,
        points: points.len(),
        tolerance,
        precision_bits: ctx.bits(),
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub n: usize,
    /// `max_{j<n} |c_j| / max |c_j|` of `q_{2n}` from the germ route.
    pub band_ratio: f64,
    /// Largest relative coefficient difference between the two routes.
    pub route_difference: f64,
    pub germ_nullity: usize,
    pub germ_precision_bits: u32,
}

/// The band structure of `q_{2n}` measured on the germ route, which does not
/// impose it, at `bits + 12n + 32` so that the moment system stays resolved.
pub fn band_check(pair: &MarkovPair, n: usize, ctx: &PrecisionContext) -> Result<BandCheck> {
    let wide = ctx.widened(12 * n as u32 + 32);
    let markov = hp_type2_markov(pair, n, ctx)?;
    let (g1, g2) = markov_germs(pair, 3 * n + 2, 8 * n + 64, 2 * n + 32, &wide)?;
    let germ = hp_type2_germ(&g1, &g2, n, &wide)?;
    let mut diff = ctx.real(0);
    let scale = markov.q.max_abs();
    for (a, b) in markov.q.coeffs().iter().zip(germ.q.coeffs()) {
        let d = abs(&Complex::with_val(ctx.bits(), a - b)) / &scale;
        if d > diff {
            diff = d;
        }
    }
    Ok(BandCheck {
        n,
        band_ratio: germ.q_cheb.band_ratio(n),
        route_difference: if markov.q.degree() == germ.q.degree() { diff.to_f64() } else { f64::INFINITY },
        germ_nullity: germ.nullity,
        germ_precision_bits: wide.bits(),
    })
}

/// Fraction of the points within `dist` of the union of real segments.
pub fn fraction_near(points: &[Complex64], segments: &[Interval], dist: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let near = points
        .iter()
        .filter(|&&z| segments.iter().any(|s| s.distance(z) <= dist))
        .count();
    near as f64 / points.len() as f64
}
