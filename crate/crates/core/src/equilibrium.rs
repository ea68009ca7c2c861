//! Discretized equilibrium problems: the scalar problem for measures on the
//! second sheet over `F`, and the vector (Nikishin) problem on `E`.
//!
//! Both are minimizations of a quadratic form `xᵀKx + 2vᵀx` over the
//! probability simplex on a fixed grid.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{green_real_f64, green_regular_part_f64, phi_real, Interval, IntervalUnion};
use crate::measure::DiscreteMeasure;
use crate::potentials::{arcsine_measure, balayage_onto_e};
use crate::quadrature::{gauss_chebyshev, gauss_legendre_on};

/// Self-interaction `log 1/|x - y|` averaged over a cell of width `h`.
fn cell_self_energy(h: f64) -> f64 {
    (1.0 / h).ln() + 1.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub measure: DiscreteMeasure,
    #[serde(rename = "w")]
    pub constant_w: f64,
    pub residual: f64,
    pub energy: f64,
    #[serde(skip)]
    pub energy_trace: Vec<f64>,
    #[serde(skip)]
    pub iterations: usize,
}

impl EquilibriumSolution {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Frank–Wolfe with away steps and exact line search.
    #[default]
    FrankWolfe,
    /// Primal active-set method; each step solves the KKT system on the free set.
    ActiveSet,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: Method,
    pub max_iterations: usize,
    /// Feasible starting weights; uniform when absent.
    pub start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::FrankWolfe,
            max_iterations: 100_000,
            start: None,
        }
    }
}

/// A quadratic program `min xᵀKx + 2vᵀx` over `{x >= 0, Σx = 1}`.
#[derive(Debug, Clone)]
pub struct SimplexQp {
    pub k: DMatrix<f64>,
    pub v: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct QpResult {
    pub x: DVector<f64>,
    /// `Kx + v`, half the gradient.
    pub field: DVector<f64>,
    pub constant: f64,
    pub residual: f64,
    pub energy: f64,
    pub energy_trace: Vec<f64>,
    pub iterations: usize,
}

impl SimplexQp {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        let kx = &self.k * x;
        x.dot(&kx) + 2.0 * self.v.dot(x)
    }

    fn summarize(&self, x: DVector<f64>, trace: Vec<f64>, iterations: usize) -> QpResult {
        let field = &self.k * &x + &self.v;
        let constant = x.dot(&field) / x.sum();
        let peak = x.max();
        let residual = x
            .iter()
            .zip(field.iter())
            .filter(|(&xi, _)| xi > 1e-14 * peak)
            .map(|(_, &f)| (f - constant).abs())
            .fold(0.0, f64::max);
        let energy = self.energy(&x);
        QpResult {
            x,
            field,
            constant,
            residual,
            energy,
            energy_trace: trace,
            iterations,
        }
    }

    fn start(&self, start: Option<&[f64]>) -> Result<DVector<f64>> {
        let n = self.dim();
        match start {
            None => Ok(DVector::from_element(n, 1.0 / n as f64)),
            Some(s) => {
                if s.len() != n || s.iter().any(|&w| !(w >= 0.0)) {
                    return Err(Error::domain("starting weights must be nonnegative, one per node"));
                }
                let total: f64 = s.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::domain("starting weights sum to zero"));
                }
                Ok(DVector::from_iterator(n, s.iter().map(|w| w / total)))
            }
        }
    }

    pub fn solve(&self, tol: f64, opts: &SolverOptions) -> Result<QpResult> {
        let x0 = self.start(opts.start.as_deref())?;
        let out = match opts.method {
            Method::ActiveSet => self.active_set(x0, tol, opts.max_iterations),
            Method::FrankWolfe => self.frank_wolfe(x0, tol, opts.max_iterations),
        };
        if out.residual > tol {
            return Err(Error::Convergence {
                context: format!("simplex QP on {} nodes", self.dim()),
                iterations: out.iterations,
                residual: out.residual,
            });
        }
        Ok(out)
    }

    /// Solves the equality-constrained problem on `free`, returning the
    /// minimizer restricted to those indices.
    fn kkt_on(&self, free: &[usize]) -> Option<DVector<f64>> {
        let m = free.len();
        let mut a = DMatrix::zeros(m + 1, m + 1);
        let mut b = DVector::zeros(m + 1);
        for (r, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                a[(r, c)] = self.k[(i, j)];
            }
            a[(r, m)] = -1.0;
            a[(m, r)] = 1.0;
            b[r] = -self.v[i];
        }
        b[m] = 1.0;
        let sol = a.lu().solve(&b)?;
        Some(sol.rows(0, m).into_owned())
    }

    fn active_set(&self, mut x: DVector<f64>, tol: f64, max_iter: usize) -> QpResult {
        let n = self.dim();
        let mut free: Vec<bool> = x.iter().map(|&w| w > 0.0).collect();
        let mut trace = vec![self.energy(&x)];
        let mut iterations = 0;
        while iterations < max_iter {
            iterations += 1;
            let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
            let Some(target) = self.kkt_on(&idx) else {
                break;
            };
            let mut step = 1.0;
            let mut blocking = None;
            for (r, &i) in idx.iter().enumerate() {
                if target[r] < x[i] {
                    let s = x[i] / (x[i] - target[r]);
                    if s < step {
                        step = s;
                        blocking = Some(i);
                    }
                }
            }
            for (r, &i) in idx.iter().enumerate() {
                x[i] += step * (target[r] - x[i]);
            }
            if let Some(b) = blocking {
                x[b] = 0.0;
                free[b] = false;
            }
            let e = self.energy(&x);
            trace.push(e);
            if blocking.is_some() {
                continue;
            }
            let field = &self.k * &x + &self.v;
            let constant = x.dot(&field);
            let entering = (0..n)
                .filter(|&i| !free[i])
                .map(|i| (i, field[i] - constant))
                .filter(|&(_, d)| d < -tol * 1e-3)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match entering {
                Some((i, _)) => free[i] = true,
                None => break,
            }
        }
        self.summarize(x, trace, iterations)
    }

    fn frank_wolfe(&self, mut x: DVector<f64>, tol: f64, max_iter: usize) -> QpResult {
        let n = self.dim();
        let mut kx = &self.k * &x;
        let mut trace = vec![self.energy(&x)];
        let mut iterations = 0;
        while iterations < max_iter {
            iterations += 1;
            let g = &kx + &self.v;
            let gx = g.dot(&x);
            let (s, gs) = (0..n)
                .map(|i| (i, g[i]))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let (a, ga) = (0..n)
                .filter(|&i| x[i] > 0.0)
                .map(|i| (i, g[i]))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let fw_gap = gx - gs;
            if fw_gap <= 0.1 * tol && ga - gs <= tol {
                break;
            }
            let xkx = x.dot(&kx);
            // direction d = e_s - x (toward) or x - e_a (away); curvature dᵀKd
            let (toward, slope, curv, gmax) = if fw_gap >= ga - gx {
                (true, gs - gx, self.k[(s, s)] - 2.0 * kx[s] + xkx, 1.0)
            } else {
                let xa = x[a];
                let gmax = if xa < 1.0 { xa / (1.0 - xa) } else { f64::INFINITY };
                (false, gx - ga, self.k[(a, a)] - 2.0 * kx[a] + xkx, gmax)
            };
            let gamma = if curv > 0.0 {
                (-slope / curv).clamp(0.0, gmax)
            } else {
                gmax
            };
            if !(gamma > 0.0) || !gamma.is_finite() {
                break;
            }
            if toward {
                x *= 1.0 - gamma;
                x[s] += gamma;
                kx *= 1.0 - gamma;
                kx.axpy(gamma, &self.k.column(s), 1.0);
            } else {
                x *= 1.0 + gamma;
                x[a] -= gamma;
                if x[a] < 1e-300 {
                    x[a] = 0.0;
                }
                kx *= 1.0 + gamma;
                kx.axpy(-gamma, &self.k.column(a), 1.0);
            }
            if iterations % 64 == 0 {
                kx = &self.k * &x;
            }
            trace.push(x.dot(&kx) + 2.0 * self.v.dot(&x));
        }
        self.summarize(x, trace, iterations)
    }
}

/// Nodes and local cell widths used to discretize a measure on `F`.
pub fn scalar_grid(f: &IntervalUnion, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let comps = f.components();
    let total = f.total_length();
    let mut counts: Vec<usize> = comps
        .iter()
        .map(|c| ((n as f64 * c.length() / total).round() as usize).max(2))
        .collect();
    let assigned: usize = counts.iter().sum();
    let last = counts.len() - 1;
    counts[last] = (counts[last] + n).saturating_sub(assigned).max(2);
    let mut nodes = Vec::with_capacity(n);
    let mut widths = Vec::with_capacity(n);
    for (c, &m) in comps.iter().zip(&counts) {
        let r = gauss_legendre_on(c, m)?;
        nodes.extend(r.nodes);
        widths.extend(r.weights);
    }
    Ok((nodes, widths))
}

/// The scalar problem's quadratic program on an explicit grid of `F`:
/// kernel `log|1 - φ(t)φ(s)| - 2 log|t - s|`, field `log φ(t)`.
pub fn scalar_qp(nodes: &[f64], widths: &[f64]) -> SimplexQp {
    let n = nodes.len();
    let phis: Vec<f64> = nodes.iter().map(|&t| phi_real(t)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sheet = (1.0 - phis[i] * phis[j]).abs().ln();
                    if i == j {
                        sheet + 2.0 * cell_self_energy(widths[i])
                    } else {
                        sheet - 2.0 * (nodes[i] - nodes[j]).abs().ln()
                    }
                })
                .collect()
        })
        .collect();
    SimplexQp {
        k: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        v: DVector::from_iterator(n, phis.iter().map(|p| p.ln())),
    }
}

fn validate_f(f: &IntervalUnion) -> Result<()> {
    f.ensure_right_of_unit()
}

fn solution(nodes: &[f64], out: QpResult) -> Result<EquilibriumSolution> {
    let measure = DiscreteMeasure::from_real(nodes, out.x.iter().copied().collect())?;
    Ok(EquilibriumSolution {
        measure,
        constant_w: out.constant,
        residual: out.residual,
        energy: out.energy,
        energy_trace: out.energy_trace,
        iterations: out.iterations,
    })
}

/// Scalar equilibrium measure `λ_F` on `n` Gauss–Legendre nodes over `F`.
pub fn solve_scalar_equilibrium(f: &IntervalUnion, n: usize, tol: f64) -> Result<EquilibriumSolution> {
    solve_scalar_equilibrium_with(f, n, tol, &SolverOptions::default())
}

pub fn solve_scalar_equilibrium_with(
    f: &IntervalUnion,
    n: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<EquilibriumSolution> {
    validate_f(f)?;
    if n < 50 {
        return Err(Error::domain(format!("scalar solver needs at least 50 nodes, got {n}")));
    }
    let (nodes, widths) = scalar_grid(f, n)?;
    let qp = scalar_qp(&nodes, &widths);
    solution(&nodes, qp.solve(tol, opts)?)
}

/// The vector problem's quadratic program on `n` Gauss–Chebyshev nodes of `E`:
/// kernel `3 log 1/|x - y| + g_F(x, y)`.
pub fn vector_qp(f: &Interval, n: usize) -> (Vec<f64>, SimplexQp) {
    let rule = gauss_chebyshev(n);
    let mut nodes = rule.nodes;
    nodes.reverse();
    let widths: Vec<f64> = nodes
        .iter()
        .map(|x| std::f64::consts::PI / n as f64 * (1.0 - x * x).sqrt())
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        4.0 * cell_self_energy(widths[i]) + green_regular_part_f64(f, nodes[i])
                    } else {
                        -3.0 * (nodes[i] - nodes[j]).abs().ln() + green_real_f64(f, nodes[i], nodes[j])
                    }
                })
                .collect()
        })
        .collect();
    let qp = SimplexQp {
        k: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        v: DVector::zeros(n),
    };
    (nodes, qp)
}

/// Vector equilibrium measure `λ_E`: `3U^λ + G^λ_F` constant on `E`.
pub fn solve_vector_equilibrium(f: &Interval, n: usize, tol: f64) -> Result<EquilibriumSolution> {
    solve_vector_equilibrium_with(f, n, tol, &SolverOptions::default())
}

pub fn solve_vector_equilibrium_with(
    f: &Interval,
    n: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<EquilibriumSolution> {
    validate_f(&IntervalUnion::single(*f))?;
    if n < 2 {
        return Err(Error::domain("vector solver needs at least two nodes"));
    }
    let (nodes, qp) = vector_qp(f, n);
    solution(&nodes, qp.solve(tol, opts)?)
}

/// `¼ β_E(λ_F) + ¾ τ_E` on `n` Gauss–Chebyshev nodes.
pub fn type2_limit_measure(lambda_f: &DiscreteMeasure, n: usize) -> Result<DiscreteMeasure> {
    if (lambda_f.mass() - 1.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "λ_F must have unit mass, got {}",
            lambda_f.mass()
        )));
    }
    let beta = balayage_onto_e(lambda_f, n)?;
    let tau = arcsine_measure(n)?;
    DiscreteMeasure::combine(&[(0.25, &beta), (0.75, &tau)])
}
