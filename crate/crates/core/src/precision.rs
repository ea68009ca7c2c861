//! Working precision for the arbitrary precision parts of the crate.
//!
//! Real and complex values are MPFR/MPC numbers (`rug::Float`, `rug::Complex`).
//! A [`PrecisionContext`] carries the mantissa size and builds values at that size.

use rug::float::Constant;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

pub type Real = Float;
pub type Cplx = Complex;

pub const DEFAULT_MANTISSA_BITS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PrecisionContext {
    mantissa_bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: DEFAULT_MANTISSA_BITS,
        }
    }
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < 53 || mantissa_bits > 1 << 20 {
            return Err(Error::Config(format!(
                "mantissa_bits must lie in [53, 2^20], got {mantissa_bits}"
            )));
        }
        Ok(PrecisionContext { mantissa_bits })
    }

    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// Context with `extra` guard bits on top of this one.
    pub fn widened(&self, extra: u32) -> Self {
        PrecisionContext {
            mantissa_bits: self.mantissa_bits + extra,
        }
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.mantissa_bits, value)
    }

    pub fn cplx<T>(&self, value: T) -> Cplx
    where
        Complex: Assign<T>,
    {
        Complex::with_val(self.mantissa_bits, value)
    }

    pub fn zero(&self) -> Cplx {
        self.cplx(0)
    }

    pub fn one(&self) -> Cplx {
        self.cplx(1)
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.mantissa_bits, Constant::Pi)
    }

    /// 2^-(bits - slack): the relative accuracy budget used by identity checks.
    pub fn epsilon(&self, slack: u32) -> Real {
        let exp = -(self.mantissa_bits as i32 - slack as i32);
        Float::with_val(self.mantissa_bits, Float::i_exp(1, exp))
    }

    pub fn from_c64(&self, z: num_complex::Complex64) -> Cplx {
        self.cplx((z.re, z.im))
    }
}

/// |z| as a real at the precision of `z`.
pub fn abs(z: &Cplx) -> Real {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn to_c64(z: &Cplx) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// Relative distance |a - b| / max(|a|, |b|, tiny).
pub fn rel_diff(a: &Cplx, b: &Cplx) -> Real {
    let prec = a.prec().0.max(b.prec().0);
    let d = Complex::with_val(prec, a - b);
    let scale = abs(a).max(&abs(b));
    if scale.is_zero() {
        return abs(&d);
    }
    abs(&d) / scale
}

/// log10 of a positive real, as f64 (works far below f64's exponent range).
pub fn log10(x: &Real) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let l = Float::with_val(64, x.abs_ref()).log10();
    l.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_256_bits() {
        assert_eq!(PrecisionContext::default().bits(), 256);
        assert_eq!(PrecisionContext::default().pi().prec(), 256);
    }

    #[test]
    fn rejects_tiny_precision() {
        assert!(PrecisionContext::new(16).is_err());
    }

    #[test]
    fn epsilon_matches_power_of_two() {
        let ctx = PrecisionContext::new(128).unwrap();
        let e = ctx.epsilon(8);
        assert_eq!(e, Float::with_val(128, Float::i_exp(1, -120)));
    }

    #[test]
    fn log10_handles_underflowing_values() {
        let ctx = PrecisionContext::default();
        let tiny = ctx.real(Float::i_exp(1, -4000));
        let l = log10(&tiny);
        assert!((l + 4000.0 * 2f64.log10()).abs() < 1e-9);
    }
}
