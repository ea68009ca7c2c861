//! Truncated Laurent expansions at infinity, and the germs of the functions
//! whose Hermite–Padé polynomials are computed.

use num_complex::Complex64;
use rug::ops::Pow;
use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{phi_interval, Interval};
use crate::precision::{abs, Cplx, PrecisionContext};

/// `Σ_{k=lead}^{lead+len-1} a_k z^{-k} + O(z^{-(lead+len)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentGerm {
    lead: i64,
    coeffs: Vec<Cplx>,
    prec: u32,
}

fn is_negative_real(c: &Cplx) -> bool {
    c.imag().is_zero() && c.real().is_sign_negative() && !c.real().is_zero()
}

fn integral_value(alpha: &Cplx) -> Option<i64> {
    if alpha.imag().is_zero() && alpha.real().is_integer() {
        alpha.real().to_i32_saturating().map(i64::from)
    } else {
        None
    }
}

/// Principal `c^α`; integer exponents never touch a branch cut.
pub fn principal_pow(c: &Cplx, alpha: &Cplx, bits: u32) -> Result<Cplx> {
    if let Some(k) = integral_value(alpha) {
        let base = Complex::with_val(bits, c);
        return Ok(if k >= 0 {
            base.pow(k as u32)
        } else {
            base.pow(k.unsigned_abs() as u32).recip()
        });
    }
    if c.is_zero() {
        return Err(Error::domain("zero raised to a non-integer power"));
    }
    if is_negative_real(c) {
        return Err(Error::BranchChoice(format!(
            "base {} lies on the cut of the principal power",
            c.real().to_f64()
        )));
    }
    let log = Complex::with_val(bits, c.ln_ref());
    Ok((log * alpha).exp())
}

impl LaurentGerm {
    pub fn new(lead: i64, coeffs: Vec<Cplx>, ctx: &PrecisionContext) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a germ needs at least one coefficient"));
        }
        let coeffs = coeffs.into_iter().map(|c| ctx.cplx(c)).collect();
        Ok(LaurentGerm {
            lead,
            coeffs,
            prec: ctx.bits(),
        })
    }

    pub fn from_fn(lead: i64, len: usize, ctx: &PrecisionContext, f: impl Fn(usize) -> Cplx) -> Result<Self> {
        Self::new(lead, (0..len).map(f).collect(), ctx)
    }

    /// The constant `c`, known to `len` terms.
    pub fn constant(c: Cplx, len: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::from_fn(0, len, ctx, |k| if k == 0 { ctx.cplx(&c) } else { ctx.zero() })
    }

    /// `z^{-k}`, known to `len` terms.
    pub fn monomial(k: i64, len: usize, ctx: &PrecisionContext) -> Result<Self> {
        Self::from_fn(k, len, ctx, |j| if j == 0 { ctx.one() } else { ctx.zero() })
    }

    fn ctx(&self) -> PrecisionContext {
        PrecisionContext::new(self.prec).expect("germ precision came from a valid context")
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// First exponent `k` whose coefficient of `z^{-k}` is unknown.
    pub fn order(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Coefficient of `z^{-k}`; `None` beyond the truncation.
    pub fn coeff(&self, k: i64) -> Option<Cplx> {
        if k >= self.order() {
            None
        } else if k < self.lead {
            Some(Complex::new(self.prec))
        } else {
            Some(self.coeffs[(k - self.lead) as usize].clone())
        }
    }

    fn coeff_or_zero(&self, k: i64) -> Cplx {
        self.coeff(k).unwrap_or_else(|| Complex::new(self.prec))
    }

    pub fn truncated(&self, order: i64) -> LaurentGerm {
        let keep = (order - self.lead).clamp(1, self.len() as i64) as usize;
        LaurentGerm {
            lead: self.lead,
            coeffs: self.coeffs[..keep].to_vec(),
            prec: self.prec,
        }
    }

    /// Drops leading coefficients that are exactly zero.
    pub fn normalized(&self) -> LaurentGerm {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == self.len() {
            return self.clone();
        }
        LaurentGerm {
            lead: self.lead + skip as i64,
            coeffs: self.coeffs[skip..].to_vec(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &LaurentGerm) -> LaurentGerm {
        self.mul_exact(other, self.len().min(other.len()))
    }

    pub fn add(&self, other: &LaurentGerm) -> LaurentGerm {
        let lead = self.lead.min(other.lead);
        let order = self.order().min(other.order());
        let prec = self.prec.max(other.prec);
        let coeffs = (lead..order.max(lead + 1))
            .map(|k| Complex::with_val(prec, self.coeff_or_zero(k) + other.coeff_or_zero(k)))
            .collect();
        LaurentGerm { lead, coeffs, prec }
    }

    pub fn neg(&self) -> LaurentGerm {
        LaurentGerm {
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LaurentGerm) -> LaurentGerm {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Cplx) -> LaurentGerm {
        LaurentGerm {
            lead: self.lead,
            coeffs: self
                .coeffs
                .iter()
                .map(|a| Complex::with_val(self.prec, a * c))
                .collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by `z^m`.
    pub fn shift(&self, m: i64) -> LaurentGerm {
        LaurentGerm {
            lead: self.lead - m,
            coeffs: self.coeffs.clone(),
            prec: self.prec,
        }
    }

    /// Multiplication by the polynomial `Σ p_j z^j` (ascending coefficients).
    pub fn mul_poly(&self, p: &[Cplx]) -> LaurentGerm {
        let deg = p.len().saturating_sub(1) as i64;
        let poly = LaurentGerm {
            lead: -deg,
            coeffs: p.iter().rev().cloned().collect(),
            prec: self.prec,
        };
        poly.mul_exact(self, self.len())
    }

    fn mul_exact(&self, other: &LaurentGerm, len: usize) -> LaurentGerm {
        let prec = self.prec.max(other.prec);
        let coeffs = (0..len)
            .map(|n| {
                let mut acc = Complex::new(prec);
                for i in 0..=n.min(self.len() - 1) {
                    let j = n - i;
                    if j < other.len() {
                        acc += Complex::with_val(prec, &self.coeffs[i] * &other.coeffs[j]);
                    }
                }
                acc
            })
            .collect();
        LaurentGerm {
            lead: self.lead + other.lead,
            coeffs,
            prec,
        }
    }

    /// Coefficients of `z^0, z^1, …` of the polynomial part.
    pub fn polynomial_part(&self) -> Vec<Cplx> {
        if self.lead > 0 {
            return vec![Complex::new(self.prec)];
        }
        (self.lead..=0).rev().map(|k| self.coeff_or_zero(k)).collect()
    }

    /// Partial sum at `z`.
    pub fn eval(&self, z: &Cplx) -> Cplx {
        let x = Complex::with_val(self.prec, z).recip();
        let mut acc = Complex::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= &x;
            acc += c;
        }
        if self.lead >= 0 {
            acc * x.pow(self.lead as u32)
        } else {
            acc * Complex::with_val(self.prec, z).pow(self.lead.unsigned_abs() as u32)
        }
    }

    /// True when every imaginary part is below `tol` relative to the largest coefficient.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self
            .coeffs
            .iter()
            .map(|c| abs(c).to_f64())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.coeffs
            .iter()
            .all(|c| c.imag().clone().abs().to_f64() <= tol * scale)
    }

    /// `g^α` on the branch `c^α (1 + u)^α`, `c` the leading coefficient,
    /// principal `c^α`.
    pub fn pow(&self, alpha: &Cplx) -> Result<LaurentGerm> {
        let g = self.normalized();
        let h0 = &g.coeffs[0];
        if h0.is_zero() {
            return Err(Error::domain("power of a germ whose coefficients all vanish"));
        }
        let lead = if g.lead == 0 {
            0
        } else {
            let k = Complex::with_val(self.prec, alpha * g.lead);
            integral_value(&k).ok_or_else(|| {
                Error::domain("power of a germ with a pole or zero at infinity needs an integral lead exponent")
            })?
        };
        let prec = self.prec;
        let p0 = principal_pow(h0, alpha, prec)?;
        let inv_h0 = Complex::with_val(prec, h0.recip_ref());
        let alpha1 = Complex::with_val(prec, alpha + 1u32);
        let mut p = Vec::with_capacity(g.len());
        p.push(p0);
        for n in 1..g.len() {
            let mut acc = Complex::new(prec);
            for k in 1..=n {
                let factor = Complex::with_val(prec, &alpha1 * k as u64) - n as u64;
                acc += factor * &g.coeffs[k] * &p[n - k];
            }
            p.push(acc * &inv_h0 / n as u64);
        }
        Ok(LaurentGerm {
            lead,
            coeffs: p,
            prec,
        })
    }

    pub fn pow_real(&self, alpha: f64) -> Result<LaurentGerm> {
        self.pow(&Complex::with_val(self.prec, alpha))
    }

    /// Principal `log g` for a germ with a nonzero constant term.
    pub fn ln(&self) -> Result<LaurentGerm> {
        if self.lead != 0 || self.coeffs[0].is_zero() {
            return Err(Error::domain("log of a germ needs a nonzero constant term"));
        }
        let h0 = &self.coeffs[0];
        if is_negative_real(h0) {
            return Err(Error::BranchChoice("constant term on the cut of the logarithm".into()));
        }
        let prec = self.prec;
        let inv_h0 = Complex::with_val(prec, h0.recip_ref());
        let mut l = Vec::with_capacity(self.len());
        l.push(Complex::with_val(prec, h0.ln_ref()));
        for n in 1..self.len() {
            let mut acc = Complex::new(prec);
            for k in 1..n {
                acc += Complex::with_val(prec, &l[k] * &self.coeffs[n - k]) * k as u64;
            }
            let term = Complex::with_val(prec, &self.coeffs[n] - acc / n as u64);
            l.push(term * &inv_h0);
        }
        Ok(LaurentGerm {
            lead: 0,
            coeffs: l,
            prec,
        })
    }

    /// `exp g` for a germ without positive powers of `z`.
    pub fn exp(&self) -> Result<LaurentGerm> {
        if self.lead < 0 {
            return Err(Error::domain("exp of a germ with a pole at infinity"));
        }
        let prec = self.prec;
        let len = self.order() as usize;
        let g: Vec<Cplx> = (0..len as i64).map(|k| self.coeff_or_zero(k)).collect();
        let mut e = Vec::with_capacity(len);
        e.push(Complex::with_val(prec, g[0].exp_ref()));
        for n in 1..len {
            let mut acc = Complex::new(prec);
            for k in 1..=n {
                acc += Complex::with_val(prec, &g[k] * &e[n - k]) * k as u64;
            }
            e.push(acc / n as u64);
        }
        Ok(LaurentGerm {
            lead: 0,
            coeffs: e,
            prec,
        })
    }

    /// `Σ_k b_k u^k` for a germ `u` vanishing at infinity; `b` is truncated
    /// after its last entry.
    pub fn compose(b: &[Cplx], u: &LaurentGerm) -> Result<LaurentGerm> {
        let u = u.normalized();
        if u.lead < 1 || u.coeffs[0].is_zero() {
            return Err(Error::domain("composition needs a germ vanishing at infinity"));
        }
        if b.is_empty() {
            return Err(Error::domain("composition with an empty series"));
        }
        let order = u.order().min(b.len() as i64 * u.lead);
        let prec = u.prec;
        let ctx = u.ctx();
        let mut acc = LaurentGerm::constant(ctx.cplx(&b[0]), order as usize, &ctx)?;
        let mut power = LaurentGerm::constant(ctx.one(), order as usize, &ctx)?;
        for bk in b.iter().skip(1) {
            power = power.mul(&u).truncated(order);
            if power.lead >= order {
                break;
            }
            acc = acc.add(&power.scale(bk)).truncated(order);
        }
        acc.prec = prec;
        Ok(acc.truncated(order))
    }
}

/// `1/φ_J(z)` at infinity to `len` terms (lead exponent 1).
pub fn inverse_phi_germ(j: &Interval, len: usize, ctx: &PrecisionContext) -> Result<LaurentGerm> {
    if len == 0 {
        return Err(Error::domain("germ length must be positive"));
    }
    // y = 1/ζ with ζ = (z - m)/h: y = h Σ m^i z^{-(i+1)}
    let m = ctx.cplx(j.midpoint());
    let h = ctx.cplx(j.length() / 2.0);
    let mut y = Vec::with_capacity(len);
    let mut p = h;
    for _ in 0..len {
        y.push(p.clone());
        p *= &m;
    }
    let y = LaurentGerm::new(1, y, ctx)?;
    // 1/φ(ζ) = Σ c_k ζ^{-(2k-1)}, c_1 = 1/2, c_{k+1} = c_k (2k-1)/(2k+2)
    let mut b = vec![ctx.zero(); len + 1];
    let mut c = ctx.cplx(1) / 2u32;
    let mut k = 1usize;
    while 2 * k - 1 <= len {
        b[2 * k - 1] = c.clone();
        c = c * (2 * k - 1) as u64 / (2 * k + 2) as u64;
        k += 1;
    }
    let out = LaurentGerm::compose(&b, &y)?;
    LaurentGerm::from_fn(1, len, ctx, |k| out.coeff_or_zero(1 + k as i64))
}

/// `1/(z^2 - 1)^{1/2} = Σ binom(2k, k) 4^{-k} z^{-(2k+1)}` to `len` terms.
pub fn f1_germ(len: usize, ctx: &PrecisionContext) -> Result<LaurentGerm> {
    let mut coeffs = vec![ctx.zero(); len];
    let mut c = ctx.cplx(1);
    let mut k = 0usize;
    while 2 * k < len {
        coeffs[2 * k] = c.clone();
        c = c * (2 * k + 1) as u64 / (2 * k + 2) as u64;
        k += 1;
    }
    LaurentGerm::new(1, coeffs, ctx)
}

/// A complex number given in a config either as a real or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl ConfigComplex {
    pub fn value(&self) -> Complex64 {
        match *self {
            ConfigComplex::Real(x) => Complex64::new(x, 0.0),
            ConfigComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// One factor `(A - 1/φ_J(z))^α`, given by `A` or by the branch point
/// `a = (A + 1/A)/2` (in the coordinates of `J`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<ConfigComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_point: Option<ConfigComplex>,
    pub exponent: ConfigComplex,
}

/// `f(z) = Π_g Π_j (A_{g,j} - 1/φ_{J_g}(z))^{α_{g,j}}` over one or two intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicFunctionSpec {
    pub intervals: Vec<Interval>,
    pub factors: Vec<Vec<Factor>>,
}

/// A validated factor with its base resolved.
#[derive(Debug, Clone)]
pub struct ResolvedFactor {
    pub base: Cplx,
    pub exponent: Cplx,
    /// Branch point in the original coordinates.
    pub branch_point: Complex64,
}

impl AlgebraicFunctionSpec {
    pub fn one_interval(j: Interval, factors: Vec<Factor>) -> Self {
        AlgebraicFunctionSpec {
            intervals: vec![j],
            factors: vec![factors],
        }
    }

    pub fn resolve(&self, ctx: &PrecisionContext) -> Result<Vec<Vec<ResolvedFactor>>> {
        let p = self.intervals.len();
        if p == 0 || p > 2 {
            return Err(Error::Config(format!("expected one or two intervals, got {p}")));
        }
        if self.factors.len() != p {
            return Err(Error::Config(format!(
                "{} factor groups for {p} intervals",
                self.factors.len()
            )));
        }
        if p == 2 && self.intervals[0].b() >= self.intervals[1].a() && self.intervals[1].b() >= self.intervals[0].a() {
            return Err(Error::Config("the two intervals overlap".into()));
        }
        let mut out = Vec::with_capacity(p);
        for (g, (j, group)) in self.intervals.iter().zip(&self.factors).enumerate() {
            if group.is_empty() {
                return Err(Error::Config(format!("factor group {g} is empty")));
            }
            let mut resolved: Vec<ResolvedFactor> = Vec::with_capacity(group.len());
            for (i, f) in group.iter().enumerate() {
                let base = match (f.base, f.branch_point) {
                    (Some(a), None) => ctx.cplx((a.value().re, a.value().im)),
                    (None, Some(a)) => {
                        let a = ctx.cplx((a.value().re, a.value().im));
                        phi_interval(j, &a, ctx).map_err(|e| {
                            Error::Config(format!("factor {g}.{i}: branch point on the interval ({e})"))
                        })?
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "factor {g}.{i}: give exactly one of `base` and `branch_point`"
                        )))
                    }
                };
                if abs(&base) <= 1u32 {
                    return Err(Error::Config(format!("factor {g}.{i}: |A| must exceed 1")));
                }
                let unit_a = Complex::with_val(ctx.bits(), base.recip_ref()) + &base;
                let unit_a = crate::precision::to_c64(&(unit_a / 2u32));
                let branch_point = unit_a * (j.length() / 2.0) + j.midpoint();
                for prev in &resolved {
                    if abs(&Complex::with_val(ctx.bits(), &prev.base - &base)) < 1e-12 {
                        return Err(Error::Config(format!("factor {g}.{i}: repeated base point")));
                    }
                }
                let e = f.exponent.value();
                resolved.push(ResolvedFactor {
                    base,
                    exponent: ctx.cplx((e.re, e.im)),
                    branch_point,
                });
            }
            out.push(resolved);
        }
        if p == 1 {
            let mut sum = ctx.zero();
            for f in &out[0] {
                sum += &f.exponent;
            }
            if abs(&sum) > 1e-12 {
                return Err(Error::Config("exponents must sum to zero".into()));
            }
        }
        Ok(out)
    }

    /// `f(∞) = Π A_j^{α_j}` with principal powers.
    pub fn value_at_infinity(&self, ctx: &PrecisionContext) -> Result<Cplx> {
        let mut c = ctx.one();
        for group in self.resolve(ctx)? {
            for f in &group {
                c *= principal_pow(&f.base, &f.exponent, ctx.bits())?;
            }
        }
        Ok(c)
    }

    /// Direct evaluation with principal powers per factor, for points far enough
    /// out that no factor crosses its cut.
    pub fn eval(&self, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
        let mut v = ctx.one();
        for (j, group) in self.intervals.iter().zip(self.resolve(ctx)?) {
            let u = phi_interval(j, z, ctx)?.recip();
            for f in &group {
                let base = Complex::with_val(ctx.bits(), &f.base - &u);
                let ratio = Complex::with_val(ctx.bits(), &base / &f.base);
                let a = principal_pow(&f.base, &f.exponent, ctx.bits())?;
                v *= a * principal_pow(&ratio, &f.exponent, ctx.bits())?;
            }
        }
        Ok(v)
    }
}

/// Germ of an algebraic function spec to `len` terms: `f(∞) · exp(Σ α_j log(1 - u/A_j))`.
pub fn algebraic_germ(spec: &AlgebraicFunctionSpec, len: usize, ctx: &PrecisionContext) -> Result<LaurentGerm> {
    if len == 0 {
        return Err(Error::domain("germ length must be positive"));
    }
    let groups = spec.resolve(ctx)?;
    let mut log_f = LaurentGerm::constant(ctx.zero(), len, ctx)?;
    for (j, group) in spec.intervals.iter().zip(&groups) {
        let u = inverse_phi_germ(j, len, ctx)?;
        // log Π (1 - u/A)^α = -Σ_m (Σ_j α_j A_j^{-m}) u^m / m
        let mut b = vec![ctx.zero(); len];
        let inverses: Vec<Cplx> = group.iter().map(|f| f.base.clone().recip()).collect();
        let mut powers = inverses.clone();
        for (m, bm) in b.iter_mut().enumerate().skip(1) {
            let mut s = ctx.zero();
            for (f, p) in group.iter().zip(&powers) {
                s += Complex::with_val(ctx.bits(), &f.exponent * p);
            }
            *bm = -s / m as u64;
            for (p, inv) in powers.iter_mut().zip(&inverses) {
                *p *= inv;
            }
        }
        log_f = log_f.add(&LaurentGerm::compose(&b, &u)?).truncated(len as i64);
    }
    let c = spec.value_at_infinity(ctx)?;
    Ok(log_f.exp()?.scale(&c).truncated(len as i64))
}
