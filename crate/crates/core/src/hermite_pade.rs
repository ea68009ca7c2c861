//! Type II Hermite–Padé polynomials (Markov-pair route and germ route),
//! type I polynomials of `[1, f, f^2]`, the splitting
//! `q_{2n} = q_{n,1} T_{n+m-1} + q_{n,2} T_{n+m}`, and the auxiliary zeros
//! `b_{n,j}` of `q_{n,1}(t) + q_{n,2}(t)/φ(t)` on the hull of `F`.

use std::fmt;

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, solve, CMatrix};
use crate::maps::{phi_real_mp, Interval};
use crate::markov::MarkovPair;
use crate::poly::{ChebPolynomial, Polynomial};
use crate::precision::{abs, Cplx, PrecisionContext, Real};
use crate::roots::poly_roots;
use crate::series::{f1_germ, LaurentGerm};

/// `2^{-fraction · bits}`, the relative tolerance family used by the checks.
pub fn bits_tolerance(ctx: &PrecisionContext, fraction: f64) -> f64 {
    2f64.powf(-fraction * ctx.bits() as f64)
}

#[derive(Debug, Clone)]
pub struct HPTypeII {
    pub n: usize,
    /// Monic in the monomial basis when `degree == 2n`.
    pub q: Polynomial,
    pub q_cheb: ChebPolynomial,
    pub p1: Polynomial,
    pub p2: Polynomial,
    pub degree: usize,
    pub nullity: usize,
    /// Largest relative coefficient of `z^{-1} … z^{-n}` in `q f_i - p_i`.
    pub germ_residual: [f64; 2],
    pub system_residual: f64,
    /// Gauss–Chebyshev size actually used (Markov route).
    pub quadrature_nodes: Option<usize>,
}

impl HPTypeII {
    pub fn is_degenerate(&self) -> bool {
        self.nullity > 1 || self.degree < 2 * self.n
    }
}

#[derive(Debug, Clone)]
pub struct HPTypeI {
    pub n: usize,
    pub q0: Polynomial,
    pub q1: Polynomial,
    pub q2: Polynomial,
    /// First `k ≥ 1` whose coefficient of `z^{-k}` in `R_n` is not negligible
    /// (a lower bound when every computed coefficient is negligible).
    pub remainder_order: i64,
    pub nullity: usize,
    pub system_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "type1_Q0")]
    Type1Q0,
    #[serde(rename = "type1_Q1")]
    Type1Q1,
    #[serde(rename = "type1_Q2")]
    Type1Q2,
    #[serde(rename = "type2")]
    Type2,
    #[serde(rename = "auxiliary_P_n")]
    AuxiliaryPn,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Type1Q0 => "type1_Q0",
            Family::Type1Q1 => "type1_Q1",
            Family::Type1Q2 => "type1_Q2",
            Family::Type2 => "type2",
            Family::AuxiliaryPn => "auxiliary_P_n",
        };
        f.write_str(s)
    }
}

/// Zeros of one polynomial family at one index, sorted by `(re, im)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCloud {
    pub family: Family,
    pub n: usize,
    pub points: Vec<Complex64>,
}

impl ZeroCloud {
    pub fn new(family: Family, n: usize, points: Vec<Complex64>) -> Self {
        // `+ 0.0` folds negative zeros so the CSV is sign-stable
        let mut points: Vec<Complex64> = points
            .into_iter()
            .map(|z| Complex64::new(z.re + 0.0, z.im + 0.0))
            .collect();
        points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        ZeroCloud { family, n, points }
    }

    pub fn from_mp(family: Family, n: usize, points: &[Cplx]) -> Self {
        ZeroCloud::new(
            family,
            n,
            points
                .iter()
                .map(|z| Complex64::new(z.real().to_f64(), z.imag().to_f64()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,family,n\n");
        for z in &self.points {
            s.push_str(&format!("{:.17e},{:.17e},{},{}\n", z.re, z.im, self.family, self.n));
        }
        s
    }
}

/// Relative size of the coefficients of `z^{-1} … z^{-n}` in `q·g`: each
/// coefficient is measured against `Σ_j |q_j| |g_{k+j}|`.
fn germ_condition_residual(q: &[Cplx], g: &LaurentGerm, n: usize) -> f64 {
    let prec = g.coeffs()[0].prec().0;
    let mut worst = 0.0f64;
    for k in 1..=n as i64 {
        let mut acc = Complex::new(prec);
        let mut scale = Float::new(prec);
        for (j, qj) in q.iter().enumerate() {
            let gk = g.coeff(k + j as i64).unwrap_or_else(|| Complex::new(prec));
            let t = Complex::with_val(prec, qj * &gk);
            scale += abs(&t);
            acc += t;
        }
        if !scale.is_zero() {
            worst = worst.max((abs(&acc) / scale).to_f64());
        }
    }
    worst
}

fn polynomial_part(q: &Polynomial, g: &LaurentGerm, len: usize, ctx: &PrecisionContext) -> Polynomial {
    let prod = g.mul_poly(q.coeffs());
    let mut part = prod.polynomial_part();
    part.resize(len.max(1), ctx.zero());
    Polynomial::new(part)
}

/// Highest index whose coefficient exceeds `2^{-bits/2}` of the largest.
fn numerical_degree(c: &[Cplx], ctx: &PrecisionContext) -> usize {
    let max = c.iter().map(abs).fold(ctx.real(0), |m, x| if x > m { x } else { m });
    let cut = max * bits_tolerance(ctx, 0.5);
    c.iter().rposition(|x| abs(x) > cut).unwrap_or(0)
}

fn finish_type2(
    n: usize,
    mut q: Vec<Cplx>,
    nullity: usize,
    system_residual: f64,
    g1: &LaurentGerm,
    g2: &LaurentGerm,
    quadrature_nodes: Option<usize>,
    ctx: &PrecisionContext,
) -> Result<HPTypeII> {
    let degree = numerical_degree(&q, ctx);
    let lead = q[degree].clone();
    if lead.is_zero() {
        return Err(Error::Degeneracy("type II nullspace vector vanishes".into()));
    }
    for c in q.iter_mut() {
        *c /= &lead;
    }
    let germ_residual = [
        germ_condition_residual(&q, g1, n),
        germ_condition_residual(&q, g2, n),
    ];
    let q = Polynomial::new(q);
    let q_cheb = ChebPolynomial::from_monomial(&q, ctx);
    let p1 = polynomial_part(&q, g1, 2 * n, ctx);
    let p2 = polynomial_part(&q, g2, 2 * n, ctx);
    Ok(HPTypeII {
        n,
        q,
        q_cheb,
        p1,
        p2,
        degree,
        nullity,
        germ_residual,
        system_residual,
        quadrature_nodes,
    })
}

/// Type II polynomials from germs: the `2n × (2n + 1)` homogeneous system
/// killing `z^{-1} … z^{-n}` in `q g_1` and `q g_2`. A nullspace of dimension
/// above one is flagged through `nullity`; the least-index basis vector is used.
pub fn hp_type2_germ(g1: &LaurentGerm, g2: &LaurentGerm, n: usize, ctx: &PrecisionContext) -> Result<HPTypeII> {
    if n == 0 {
        return Err(Error::domain("index n must be positive"));
    }
    for g in [g1, g2] {
        if g.order() < 3 * n as i64 + 1 {
            return Err(Error::domain(format!(
                "germ known to z^-{} is too short for n = {n}",
                g.order() - 1
            )));
        }
    }
    let cols = 2 * n + 1;
    let zero = ctx.zero();
    let a = CMatrix::from_fn(2 * n, cols, |row, j| {
        let (g, k) = if row < n { (g1, row + 1) } else { (g2, row - n + 1) };
        g.coeff((k + j) as i64).unwrap_or_else(|| zero.clone())
    });
    let ns = nullspace(&a, (ctx.bits() * 3) / 4, ctx)?;
    let nullity = ns.basis.len();
    let q = ns.basis.into_iter().next().expect("nonempty basis");
    finish_type2(n, q, nullity, ns.residual, g1, g2, None, ctx)
}

/// Chebyshev coefficients `c_n … c_{2n}` from the orthogonality system
/// `Σ_j c_j ∫ T_i T_j σ̂ dτ_E = 0`, `i < n`, with the `m`-node rule.
fn markov_band(pair: &MarkovPair, n: usize, m: usize, ctx: &PrecisionContext) -> Result<(Vec<Cplx>, usize, f64)> {
    let sampled = pair.sample_transform(m, 2 * n + 32, ctx)?;
    let s = sampled.chebyshev_moments(3 * n);
    let a = CMatrix::from_fn(n, n + 1, |i, jj| {
        let j = n + jj;
        // T_i T_j = T_{i+j} + T_{|i-j|}
        ctx.cplx(Float::with_val(ctx.bits(), &s[i + j] + &s[j - i]))
    });
    let ns = nullspace(&a, (ctx.bits() * 3) / 4, ctx)?;
    let nullity = ns.basis.len();
    let mut c = ns.basis.into_iter().next().expect("nonempty basis");
    let lead = c[n].clone();
    let scale = c.iter().map(abs).fold(ctx.real(0), |m, x| if x > m { x } else { m });
    if abs(&lead) <= scale * bits_tolerance(ctx, 0.5) {
        return Err(Error::Degeneracy(format!("deg q_2n < 2n at n = {n}")));
    }
    // monic: c_{2n} = 2^{-2n}
    let target = ctx.cplx(Float::i_exp(1, -(2 * n as i32)));
    let f = Complex::with_val(ctx.bits(), &target / &lead);
    for x in c.iter_mut() {
        *x *= &f;
    }
    Ok((c, nullity, ns.residual))
}

fn max_rel_diff(a: &[Cplx], b: &[Cplx], ctx: &PrecisionContext) -> f64 {
    let scale = a.iter().map(abs).fold(ctx.real(0), |m, x| if x > m { x } else { m });
    let mut worst = ctx.real(0);
    for (x, y) in a.iter().zip(b) {
        let d = abs(&Complex::with_val(ctx.bits(), x - y));
        if d > worst {
            worst = d;
        }
    }
    (worst / scale).to_f64()
}

/// Type II polynomials of the Markov pair by the Chebyshev-band route.
/// The quadrature size starts at `4n + 32` and doubles until two successive
/// sizes agree to `2^{-0.4 bits}`.
pub fn hp_type2_markov(pair: &MarkovPair, n: usize, ctx: &PrecisionContext) -> Result<HPTypeII> {
    if n == 0 {
        return Err(Error::domain("index n must be positive"));
    }
    pair.validate()?;
    // the high moments are exponentially small and come out of cancelling sums
    let wide = ctx.widened(12 * n as u32 + 32);
    let mut m = 4 * n + 32;
    let (mut band, mut nullity, mut residual) = markov_band(pair, n, m, &wide)?;
    let agree = bits_tolerance(ctx, 0.4);
    let mut accepted = false;
    for _ in 0..4 {
        let (next, k, r) = markov_band(pair, n, 2 * m, &wide)?;
        let diff = max_rel_diff(&band, &next, &wide);
        band = next;
        nullity = k;
        residual = r;
        m *= 2;
        if diff <= agree {
            accepted = true;
            break;
        }
    }
    if !accepted {
        return Err(Error::Precision(format!(
            "Chebyshev moments for n = {n} did not settle up to {m} nodes"
        )));
    }
    if nullity > 1 {
        return Err(Error::Degeneracy(format!("orthogonality system at n = {n} has corank {nullity}")));
    }
    let mut cheb = vec![ctx.zero(); n];
    cheb.extend(band.iter().map(|c| ctx.cplx(c)));
    let q_cheb = ChebPolynomial::new(cheb);
    let q = q_cheb.to_monomial(ctx);
    let len = 3 * n + 2;
    let sampled = pair.sample_transform(m, 2 * n + 32, &wide)?;
    let g1 = f1_germ(len, &wide)?;
    let g2 = sampled.f2_germ(len, &wide)?;
    let mut out = finish_type2(n, q.coeffs().to_vec(), nullity, residual, &g1, &g2, Some(m), ctx)?;
    out.q_cheb = q_cheb;
    let tol = bits_tolerance(ctx, 0.3);
    if out.germ_residual.iter().any(|r| *r > tol) {
        return Err(Error::Precision(format!(
            "germ conditions at n = {n} hold only to {:e}",
            out.germ_residual[0].max(out.germ_residual[1])
        )));
    }
    Ok(out)
}

/// Type I polynomials `(Q_0, Q_1, Q_2)` of degree `≤ n` with
/// `Q_0 + Q_1 f + Q_2 f^2 = O(z^{-(2n+2)})`, from the germ of `f`.
pub fn hp_type1_germ(g: &LaurentGerm, n: usize, ctx: &PrecisionContext) -> Result<HPTypeI> {
    if g.lead() < 0 {
        return Err(Error::domain("type I germ must be bounded at infinity"));
    }
    if g.order() < 3 * n as i64 + 4 {
        return Err(Error::domain(format!(
            "germ known to z^-{} is too short for n = {n}",
            g.order() - 1
        )));
    }
    let g2 = g.mul(g);
    let zero = ctx.zero();
    let rows = 2 * n + 1;
    let cols = 2 * n + 2;
    let a = CMatrix::from_fn(rows, cols, |row, col| {
        let k = (row + 1) as i64;
        if col <= n {
            g.coeff(k + col as i64).unwrap_or_else(|| zero.clone())
        } else {
            g2.coeff(k + (col - n - 1) as i64).unwrap_or_else(|| zero.clone())
        }
    });
    let ns = nullspace(&a, (ctx.bits() * 3) / 4, ctx)?;
    let nullity = ns.basis.len();
    let mut v = ns.basis.into_iter().next().expect("nonempty basis");
    let pivot = v
        .iter()
        .map(abs)
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .expect("nonempty vector");
    let p = v[pivot].clone();
    for x in v.iter_mut() {
        *x /= &p;
    }
    let q1 = Polynomial::new(v[..=n].to_vec());
    let q2 = Polynomial::new(v[n + 1..].to_vec());
    let s = g.mul_poly(q1.coeffs()).add(&g2.mul_poly(q2.coeffs()));
    let mut part = s.polynomial_part();
    part.resize(n + 1, ctx.zero());
    let q0 = Polynomial::new(part.iter().map(|c| -c.clone()).collect());
    // R_n and Q1 f + Q2 f^2 share every coefficient of z^{-k}, k ≥ 1; each is
    // measured against Σ_j |Q1_j||f_{k+j}| + |Q2_j||f²_{k+j}|
    let tol = bits_tolerance(ctx, 0.3);
    let prec = ctx.bits();
    let top = g.order().min(g2.order()) - n as i64;
    let mut remainder_order = top;
    for k in 1..top {
        let mut scale = Float::new(prec);
        for (j, c) in q1.coeffs().iter().enumerate() {
            scale += abs(c) * abs(&g.coeff(k + j as i64).unwrap_or_else(|| zero.clone()));
        }
        for (j, c) in q2.coeffs().iter().enumerate() {
            scale += abs(c) * abs(&g2.coeff(k + j as i64).unwrap_or_else(|| zero.clone()));
        }
        let rk = abs(&s.coeff(k).unwrap_or_else(|| zero.clone()));
        if !scale.is_zero() && (rk / scale).to_f64() > tol {
            remainder_order = k;
            break;
        }
    }
    if remainder_order < 2 * n as i64 + 2 {
        return Err(Error::Precision(format!(
            "type I remainder vanishes only to z^-{} at n = {n}",
            remainder_order - 1
        )));
    }
    Ok(HPTypeI {
        n,
        q0,
        q1,
        q2,
        remainder_order,
        nullity,
        system_residual: ns.residual,
    })
}

/// `q_{2n} = q_{n,1} T_a + q_{n,2} T_{a+1}`, `a = n + m - 1`.
#[derive(Debug, Clone)]
pub struct Split {
    pub n: usize,
    pub m: usize,
    pub a: usize,
    pub q1: ChebPolynomial,
    pub q2: ChebPolynomial,
    /// Largest coefficient misfit of the reconstruction, relative to `max |c_j|`.
    pub reconstruction_residual: f64,
}

impl Split {
    /// `q_{n,1}(t) + q_{n,2}(t)/φ(t)` for real `t > 1`.
    pub fn g(&self, t: &Real) -> Real {
        let phi = phi_real_mp(t);
        self.q1.eval_real(t) + self.q2.eval_real(t) / phi
    }
}

/// Degrees `(deg q1, deg q2)` for index `n`: `(m-1, m-1)` for `n = 2m-1`,
/// `(m-1, m)` for `n = 2m`.
pub fn split_degrees(n: usize) -> (usize, usize, usize) {
    if n % 2 == 1 {
        let m = n.div_ceil(2);
        (m, m - 1, m - 1)
    } else {
        let m = n / 2;
        (m, m - 1, m)
    }
}

pub fn split_type2(hp: &HPTypeII, ctx: &PrecisionContext) -> Result<Split> {
    let n = hp.n;
    let c = hp.q_cheb.coeffs();
    if c.len() != 2 * n + 1 {
        return Err(Error::domain("q_2n must have degree 2n to be split"));
    }
    let band = hp.q_cheb.band_ratio(n);
    if band > bits_tolerance(ctx, 0.25) {
        return Err(Error::Degeneracy(format!("Chebyshev band broken at n = {n}: ratio {band:e}")));
    }
    let (m, d1, d2) = split_degrees(n);
    let a = n + m - 1;
    let unknowns = d1 + d2 + 2;
    debug_assert_eq!(unknowns, n + 1);
    let mut mat = CMatrix::zeros(n + 1, unknowns, ctx);
    let mut add = |col: usize, base: usize, i: usize| {
        for idx in [base + i, base - i] {
            *mat.get_mut(idx - n, col) += 1u32;
        }
    };
    for i in 0..=d1 {
        add(i, a, i);
    }
    for i in 0..=d2 {
        add(d1 + 1 + i, a + 1, i);
    }
    let rhs: Vec<Cplx> = c[n..].to_vec();
    let (x, _) = solve(&mat, &rhs, ctx)?;
    let q1 = ChebPolynomial::new(x[..=d1].to_vec());
    let q2 = ChebPolynomial::new(x[d1 + 1..].to_vec());
    let mut full = vec![ctx.zero(); 2 * n + 1];
    for (i, u) in q1.coeffs().iter().enumerate() {
        full[a + i] += u;
        full[a - i] += u;
    }
    for (i, v) in q2.coeffs().iter().enumerate() {
        full[a + 1 + i] += v;
        full[a + 1 - i] += v;
    }
    let reconstruction_residual = max_rel_diff(c, &full, ctx);
    Ok(Split {
        n,
        m,
        a,
        q1,
        q2,
        reconstruction_residual,
    })
}

/// The zeros `b_{n,j}` of `g_n` on `[c, d]`.
#[derive(Debug, Clone)]
pub struct AuxiliaryZeros {
    pub n: usize,
    pub zeros: Vec<Real>,
    pub grid_points: usize,
}

impl AuxiliaryZeros {
    /// `β_j = 1/φ(b_j)`.
    pub fn betas(&self) -> Vec<Real> {
        self.zeros.iter().map(|b| phi_real_mp(b).recip()).collect()
    }

    pub fn cloud(&self) -> ZeroCloud {
        ZeroCloud::new(
            Family::AuxiliaryPn,
            self.n,
            self.zeros.iter().map(|b| Complex64::new(b.to_f64(), 0.0)).collect(),
        )
    }
}

fn scan_sign_changes(split: &Split, hull: &Interval, points: usize, ctx: &PrecisionContext) -> Vec<Real> {
    let bits = ctx.bits();
    let pi = ctx.pi();
    let mid = ctx.real(hull.a()) + hull.b();
    let mid = mid / 2u32;
    let half = ctx.real(hull.b()) - hull.a();
    let half = half / 2u32;
    let grid: Vec<Real> = (0..points)
        .rev()
        .map(|i| {
            let th = Float::with_val(bits, &pi * i as u64) / (points - 1) as u64;
            Float::with_val(bits, &half * th.cos()) + &mid
        })
        .collect();
    let values: Vec<Real> = grid.iter().map(|t| split.g(t)).collect();
    let width = ctx.real(Float::i_exp(1, -(bits as i32 / 2)));
    let mut out = Vec::new();
    for i in 0..points - 1 {
        let (fa, fb) = (&values[i], &values[i + 1]);
        if fa.is_zero() {
            out.push(grid[i].clone());
            continue;
        }
        if fa.is_sign_negative() == fb.is_sign_negative() || fb.is_zero() {
            continue;
        }
        let (mut lo, mut hi) = (grid[i].clone(), grid[i + 1].clone());
        let lo_negative = fa.is_sign_negative();
        while Float::with_val(bits, &hi - &lo) > width {
            let midp = Float::with_val(bits, &lo + &hi) / 2u32;
            let fm = split.g(&midp);
            if fm.is_zero() {
                lo = midp.clone();
                hi = midp;
                break;
            }
            if fm.is_sign_negative() == lo_negative {
                lo = midp;
            } else {
                hi = midp;
            }
        }
        out.push(Float::with_val(bits, &lo + &hi) / 2u32);
    }
    if values[points - 1].is_zero() {
        out.push(grid[points - 1].clone());
    }
    out
}

/// Sign scan of `g_n` on `64n` Chebyshev-spaced points of `[c, d]`, refined by
/// bisection to `2^{-bits/2}`; retried once on an 8× denser grid.
pub fn auxiliary_zeros(split: &Split, hull: &Interval, ctx: &PrecisionContext) -> Result<AuxiliaryZeros> {
    if hull.a() <= 1.0 {
        return Err(Error::domain("the hull of F must lie to the right of [-1, 1]"));
    }
    let n = split.n;
    let mut points = 64 * n.max(1);
    let mut zeros = scan_sign_changes(split, hull, points, ctx);
    if zeros.len() != n {
        points *= 8;
        zeros = scan_sign_changes(split, hull, points, ctx);
    }
    if zeros.len() != n {
        return Err(Error::Count {
            expected: n,
            points: zeros.iter().map(Float::to_f64).collect(),
        });
    }
    Ok(AuxiliaryZeros {
        n,
        zeros,
        grid_points: points,
    })
}

/// Zeros of `q_{2n}` by polynomial root finding.
pub fn type2_zeros(hp: &HPTypeII, ctx: &PrecisionContext) -> Result<(ZeroCloud, f64)> {
    let r = poly_roots(&hp.q, ctx)?;
    Ok((ZeroCloud::from_mp(Family::Type2, hp.n, &r.roots), r.residual))
}

/// Zeros of `Q_{n,0}`, `Q_{n,1}`, `Q_{n,2}` (empty when a polynomial is constant).
pub fn type1_zeros(hp: &HPTypeI, ctx: &PrecisionContext) -> Result<[ZeroCloud; 3]> {
    let one = |p: &Polynomial, family: Family| -> Result<ZeroCloud> {
        if p.degree() == 0 {
            return Ok(ZeroCloud::new(family, hp.n, Vec::new()));
        }
        let r = poly_roots(p, ctx)?;
        Ok(ZeroCloud::from_mp(family, hp.n, &r.roots))
    };
    Ok([
        one(&hp.q0, Family::Type1Q0)?,
        one(&hp.q1, Family::Type1Q1)?,
        one(&hp.q2, Family::Type1Q2)?,
    ])
}

/// Real parts of real-coefficient polynomial zeros, as MP values, ascending.
pub fn real_zeros_mp(p: &Polynomial, ctx: &PrecisionContext) -> Result<(Vec<Real>, f64)> {
    let r = poly_roots(p, ctx)?;
    let mut x: Vec<Real> = r.roots.iter().map(|z| z.real().clone()).collect();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let max_imag = r
        .roots
        .iter()
        .map(|z| z.imag().to_f64().abs())
        .fold(0.0, f64::max);
    Ok((x, max_imag))
}
