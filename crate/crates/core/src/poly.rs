//! Polynomials in the monomial basis and in the Chebyshev basis
//! `T_0 = 2`, `T_k = φ^k + φ^{-k}` (leading coefficient `2^k`).

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::precision::{abs, Cplx, PrecisionContext, Real};

/// `Σ a_k z^k`, coefficients ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Cplx>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Cplx>) -> Self {
        let mut p = Polynomial { coeffs };
        while p.coeffs.len() > 1 && p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    pub fn from_f64(coeffs: &[f64], ctx: &PrecisionContext) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| ctx.cplx(c)).collect())
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Index of the last stored coefficient (exact zeros are trimmed).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> &Cplx {
        self.coeffs.last().expect("polynomial has a coefficient")
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    pub fn eval(&self, z: &Cplx) -> Cplx {
        let prec = self.prec();
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// `(p(z), p'(z))` by Horner.
    pub fn eval_with_derivative(&self, z: &Cplx) -> (Cplx, Cplx) {
        let prec = self.prec();
        let mut p = Complex::new(prec);
        let mut dp = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            dp *= z;
            dp += &p;
            p *= z;
            p += c;
        }
        (p, dp)
    }

    /// `Σ |a_k| r^k`, the scale against which `|p(z)|` is measured at `|z| = r`.
    pub fn abs_eval(&self, r: &Real) -> Real {
        let prec = self.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= r;
            acc += abs(c);
        }
        acc
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let prec = self.prec().max(other.prec());
        let mut out = vec![Complex::new(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Complex::with_val(prec, a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: &Cplx) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|a| Complex::with_val(self.prec(), a * c))
                .collect(),
        )
    }

    pub fn monic(&self) -> Polynomial {
        let inv = Complex::with_val(self.prec(), self.leading().recip_ref());
        self.scale(&inv)
    }

    pub fn max_abs(&self) -> Real {
        self.coeffs
            .iter()
            .map(abs)
            .fold(Float::new(self.prec()), |m, x| if x > m { x } else { m })
    }

    /// Imaginary parts below `tol` relative to the largest coefficient.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.max_abs().to_f64().max(f64::MIN_POSITIVE);
        self.coeffs
            .iter()
            .all(|c| c.imag().clone().abs().to_f64() <= tol * scale)
    }

    pub fn to_chebyshev(&self, ctx: &PrecisionContext) -> ChebPolynomial {
        ChebPolynomial::from_monomial(self, ctx)
    }
}

/// Monomial coefficients of `T_0 … T_d`.
fn chebyshev_monomials(d: usize, ctx: &PrecisionContext) -> Vec<Vec<Cplx>> {
    let mut t: Vec<Vec<Cplx>> = vec![vec![ctx.cplx(2)]];
    if d >= 1 {
        t.push(vec![ctx.zero(), ctx.cplx(2)]);
    }
    for k in 2..=d {
        let mut next = vec![ctx.zero(); k + 1];
        for (i, c) in t[k - 1].iter().enumerate() {
            next[i + 1] += Complex::with_val(ctx.bits(), c * 2u32);
        }
        for (i, c) in t[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        t.push(next);
    }
    t
}

/// `Σ c_k T_k` with `T_0 = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebPolynomial {
    coeffs: Vec<Cplx>,
}

impl ChebPolynomial {
    pub fn new(coeffs: Vec<Cplx>) -> Self {
        assert!(!coeffs.is_empty(), "Chebyshev polynomial needs a coefficient");
        ChebPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    /// Clenshaw summation.
    pub fn eval(&self, z: &Cplx) -> Cplx {
        let prec = self.prec();
        let two_z = Complex::with_val(prec, z * 2u32);
        let mut b1 = Complex::new(prec);
        let mut b2 = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            let b0 = Complex::with_val(prec, &two_z * &b1) - &b2 + c;
            b2 = std::mem::replace(&mut b1, b0);
        }
        // Σ c_k T_k = 2 (b_0 - z b_1) in terms of the standard T_k / 2
        let v = b1 - Complex::with_val(prec, z * &b2);
        v * 2u32
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let prec = self.prec();
        let z = Complex::with_val(prec, x);
        self.eval(&z).real().clone()
    }

    pub fn to_monomial(&self, ctx: &PrecisionContext) -> Polynomial {
        let d = self.coeffs.len() - 1;
        let t = chebyshev_monomials(d, ctx);
        let mut out = vec![ctx.zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            for (i, a) in t[k].iter().enumerate() {
                out[i] += Complex::with_val(ctx.bits(), c * a);
            }
        }
        Polynomial::new(out)
    }

    pub fn from_monomial(p: &Polynomial, ctx: &PrecisionContext) -> Self {
        let d = p.degree();
        let t = chebyshev_monomials(d, ctx);
        let mut rem: Vec<Cplx> = p.coeffs().iter().map(|c| ctx.cplx(c)).collect();
        let mut c = vec![ctx.zero(); d + 1];
        for k in (0..=d).rev() {
            let lead = &t[k][k];
            let ck = Complex::with_val(ctx.bits(), &rem[k] / lead);
            for (i, a) in t[k].iter().enumerate() {
                rem[i] -= Complex::with_val(ctx.bits(), &ck * a);
            }
            c[k] = ck;
        }
        ChebPolynomial::new(c)
    }

    pub fn max_abs(&self) -> Real {
        self.coeffs
            .iter()
            .map(abs)
            .fold(Float::new(self.prec()), |m, x| if x > m { x } else { m })
    }

    /// `max_{j < n} |c_j| / max_j |c_j|`: how far the expansion is from
    /// starting at `T_n`.
    pub fn band_ratio(&self, n: usize) -> f64 {
        let max = self.max_abs();
        if max.is_zero() {
            return 0.0;
        }
        let low = self.coeffs[..n.min(self.coeffs.len())]
            .iter()
            .map(abs)
            .fold(Float::new(self.prec()), |m, x| if x > m { x } else { m });
        (low / max).to_f64()
    }

    pub fn to_f64(&self) -> Vec<[f64; 2]> {
        self.coeffs
            .iter()
            .map(|c| [c.real().to_f64(), c.imag().to_f64()])
            .collect()
    }
}

/// Serialized form of a polynomial: coefficient pairs `[re, im]`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientList(pub Vec<[f64; 2]>);

impl From<&Polynomial> for CoefficientList {
    fn from(p: &Polynomial) -> Self {
        CoefficientList(
            p.coeffs()
                .iter()
                .map(|c| [c.real().to_f64(), c.imag().to_f64()])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t3_monomial_form() {
        let ctx = PrecisionContext::default();
        let t3 = ChebPolynomial::new(vec![ctx.zero(), ctx.zero(), ctx.zero(), ctx.one()]);
        let p = t3.to_monomial(&ctx);
        let expect = [0.0, -6.0, 0.0, 8.0];
        for (a, e) in p.coeffs().iter().zip(expect) {
            assert_eq!(a.real().to_f64(), e);
        }
    }

    #[test]
    fn clenshaw_matches_monomial_evaluation() {
        let ctx = PrecisionContext::default();
        let c = ChebPolynomial::new((0..9).map(|k| ctx.cplx((k as f64 - 3.5, 0.25 * k as f64))).collect());
        let z = ctx.cplx((0.3, -1.7));
        let a = c.eval(&z);
        let b = c.to_monomial(&ctx).eval(&z);
        assert!(abs(&Complex::with_val(256, &a - &b)).to_f64() < 1e-65 * abs(&a).to_f64());
    }
}
