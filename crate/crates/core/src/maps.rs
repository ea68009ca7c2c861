//! Exact-branch special functions: the inverse Joukowsky map on both sheets,
//! Chebyshev polynomials normalized as `T_k = φ^k + φ^{-k}`, their functions
//! of the second kind, and Green functions of interval complements.
//!
//! The square root `(z^2 - 1)^{1/2}` is always the branch with
//! `(z^2 - 1)^{1/2} / z -> 1` at infinity, realized as
//! `sqrt(z - 1) * sqrt(z + 1)` with principal square roots. That product is
//! analytic off `[-1, 1]`; on the cut the sign of the (signed) zero imaginary
//! part selects the one-sided limit.

use num_complex::Complex64;
use rug::float::Special;
use rug::{Assign, Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{abs, Cplx, PrecisionContext, Real};

/// A closed real interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.a, i.b]
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::domain(format!("interval needs finite a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    /// The reference interval `E = [-1, 1]`.
    pub fn unit() -> Self {
        Interval { a: -1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn is_unit(&self) -> bool {
        self.a == -1.0 && self.b == 1.0
    }

    pub fn contains_real(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn contains(&self, z: &Cplx) -> bool {
        z.imag().is_zero() && *z.real() >= self.a && *z.real() <= self.b
    }

    /// Euclidean distance from `z` to the interval.
    pub fn distance(&self, z: Complex64) -> f64 {
        let x = z.re.clamp(self.a, self.b);
        ((z.re - x).powi(2) + z.im.powi(2)).sqrt()
    }

    /// The affine map carrying the interval onto `[-1, 1]`.
    pub fn to_unit(&self, z: &Cplx) -> Cplx {
        let prec = z.prec().0;
        if self.is_unit() {
            return z.clone();
        }
        let mut w = Complex::with_val(prec, z * 2u32);
        w -= self.a + self.b;
        w / (self.b - self.a)
    }

    pub fn to_unit_f64(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }
}

/// A finite union of disjoint closed intervals, sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalUnion {
    components: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalUnion {
    type Error = Error;

    fn try_from(v: Vec<Interval>) -> Result<Self> {
        IntervalUnion::new(v)
    }
}

impl From<IntervalUnion> for Vec<Interval> {
    fn from(u: IntervalUnion) -> Self {
        u.components
    }
}

impl IntervalUnion {
    pub fn new(mut components: Vec<Interval>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("interval union must have at least one component"));
        }
        components.sort_by(|x, y| x.a.total_cmp(&y.a));
        for pair in components.windows(2) {
            if pair[1].a <= pair[0].b {
                return Err(Error::domain(format!(
                    "components [{}, {}] and [{}, {}] are not disjoint",
                    pair[0].a, pair[0].b, pair[1].a, pair[1].b
                )));
            }
        }
        Ok(IntervalUnion { components })
    }

    pub fn single(i: Interval) -> Self {
        IntervalUnion { components: vec![i] }
    }

    /// Checks the geometric setting of the Nikishin pair: the convex hull lies
    /// strictly to the right of `E = [-1, 1]`.
    pub fn ensure_right_of_unit(&self) -> Result<()> {
        let hull = self.hull();
        if hull.a <= 1.0 {
            return Err(Error::domain(format!(
                "convex hull [{}, {}] must lie to the right of [-1, 1]",
                hull.a, hull.b
            )));
        }
        Ok(())
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn hull(&self) -> Interval {
        Interval {
            a: self.components[0].a,
            b: self.components[self.components.len() - 1].b,
        }
    }

    /// Open gaps between consecutive components.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.components.windows(2).map(|p| (p[0].b, p[1].a)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(Interval::length).sum()
    }

    pub fn contains_real(&self, x: f64) -> bool {
        self.components.iter().any(|c| c.contains_real(x))
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.components
            .iter()
            .map(|c| c.distance(z))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Zero,
    One,
}

impl TryFrom<u8> for Sheet {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Sheet::Zero),
            1 => Ok(Sheet::One),
            _ => Err(Error::domain(format!("sheet index must be 0 or 1, got {v}"))),
        }
    }
}

/// Which one-sided limit to take for points on the cut `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Upper,
    Lower,
}

fn on_unit_cut(z: &Cplx) -> bool {
    z.imag().is_zero() && *z.real() >= -1.0 && *z.real() <= 1.0
}

/// `(z^2 - 1)^{1/2}` on the branch that behaves like `z` at infinity.
pub fn sqrt_branch(z: &Cplx, side: Side, ctx: &PrecisionContext) -> Result<Cplx> {
    let mut z = ctx.cplx(z);
    if on_unit_cut(&z) {
        if *z.real() == 1.0 || *z.real() == -1.0 {
            return Err(Error::BranchPoint(z.real().to_f64()));
        }
        let signed_zero = match side {
            Side::Upper => Special::Zero,
            Side::Lower => Special::NegZero,
        };
        z.mut_imag().assign(signed_zero);
    }
    let zm = Complex::with_val(ctx.bits(), &z - 1u32).sqrt();
    let zp = Complex::with_val(ctx.bits(), &z + 1u32).sqrt();
    Ok(zm * zp)
}

/// The inverse Joukowsky map `φ(z) = z + (z^2 - 1)^{1/2}` on sheet 0, and
/// `1/φ(z)` on sheet 1. Points of `(-1, 1)` take the upper-half-plane limit.
pub fn phi(z: &Cplx, sheet: Sheet, ctx: &PrecisionContext) -> Result<Cplx> {
    phi_on_side(z, sheet, Side::Upper, ctx)
}

pub fn phi_on_side(z: &Cplx, sheet: Sheet, side: Side, ctx: &PrecisionContext) -> Result<Cplx> {
    let w = sqrt_branch(z, side, ctx)?;
    let outer = w + ctx.cplx(z);
    Ok(match sheet {
        Sheet::Zero => outer,
        Sheet::One => outer.recip(),
    })
}

/// `φ_J(z)`: the inverse Joukowsky map of the complement of `J` (sheet 0).
pub fn phi_interval(j: &Interval, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    if j.contains(z) {
        return Err(Error::domain("φ_J evaluated on J"));
    }
    phi(&j.to_unit(&ctx.cplx(z)), Sheet::Zero, ctx)
}

/// Sheet-0 `φ` in double precision, for the f64 measure-level code.
pub fn phi_c64(z: Complex64) -> Complex64 {
    let w = (z - 1.0).sqrt() * (z + 1.0).sqrt();
    z + w
}

/// Sheet-0 `φ` at a real point outside `[-1, 1]`.
pub fn phi_real(x: f64) -> f64 {
    debug_assert!(x.abs() > 1.0);
    let r = (x * x - 1.0).sqrt();
    if x > 0.0 {
        x + r
    } else {
        x - r
    }
}

/// `φ(x)` for real `|x| > 1` at the precision of `x`.
pub fn phi_real_mp(x: &Real) -> Real {
    let prec = x.prec();
    let r = Float::with_val(prec, x * x) - 1u32;
    let r = r.sqrt();
    if x.is_sign_positive() {
        r + x
    } else {
        Float::with_val(prec, x - r)
    }
}

/// Chebyshev polynomial `T_n(z) = φ^n + φ^{-n}` (so `T_0 = 2`, `T_1 = 2z`),
/// evaluated by the three-term recursion.
pub fn chebyshev_t(n: usize, z: &Cplx, ctx: &PrecisionContext) -> Cplx {
    if n == 0 {
        return ctx.cplx(2);
    }
    let two_z = Complex::with_val(ctx.bits(), z * 2u32);
    let mut prev = ctx.cplx(2);
    let mut cur = two_z.clone();
    for _ in 2..=n {
        let next = Complex::with_val(ctx.bits(), &two_z * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

pub fn chebyshev_t_f64(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 2.0;
    }
    let (mut prev, mut cur) = (2.0, 2.0 * x);
    for _ in 2..=n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn ensure_off_unit(z: &Cplx, what: &str) -> Result<()> {
    if on_unit_cut(z) {
        return Err(Error::domain(format!("{what}: z = {} lies on [-1, 1]", z.real().to_f64())));
    }
    Ok(())
}

/// Function of the second kind `H_n(z) = 1 / (φ^n(z) (z^2 - 1)^{1/2})`,
/// `n >= -1`. These satisfy `H_n = 2z H_{n-1} - H_{n-2}`; the value at
/// `n = -1` is the continuation `φ(z) / (z^2 - 1)^{1/2}`.
pub fn second_kind_h(n: i64, z: &Cplx, ctx: &PrecisionContext) -> Result<Cplx> {
    if n < -1 {
        return Err(Error::domain(format!("H_n needs n >= -1, got {n}")));
    }
    ensure_off_unit(z, "H_n")?;
    let w = sqrt_branch(z, Side::Upper, ctx)?;
    let outer = Complex::with_val(ctx.bits(), &w + z);
    let base = if n >= 0 { outer.recip() } else { outer };
    let power = rug::ops::Pow::pow(base, n.unsigned_abs() as u32);
    Ok(power / w)
}

/// `H_0 .. H_{n_max}` from the recursion, run backwards (Miller's
/// algorithm) from a start index where the dominant solution has died out,
/// then normalized by `H_0 = 1 / (z^2 - 1)^{1/2}`. Forward recursion would
/// amplify rounding by `|φ|^{2n}`.
pub fn second_kind_h_recursive(n_max: usize, z: &Cplx, ctx: &PrecisionContext) -> Result<Vec<Cplx>> {
    ensure_off_unit(z, "H_n recursion")?;
    let modulus = abs(&phi(z, Sheet::Zero, ctx)?).to_f64();
    let decay_bits = 2.0 * modulus.log2();
    if !(decay_bits > 1e-9) {
        return Err(Error::Precision("z too close to [-1, 1] for backward recursion".into()));
    }
    let extra = ((ctx.bits() as f64 + 32.0) / decay_bits).ceil() as usize + 8;
    if extra > 1 << 22 {
        return Err(Error::Precision(format!(
            "backward recursion would need {extra} extra terms"
        )));
    }
    let two_z = Complex::with_val(ctx.bits(), z * 2u32);
    let start = n_max + extra;
    let mut above = ctx.zero();
    let mut cur = ctx.one();
    let mut kept = vec![ctx.zero(); n_max + 1];
    for k in (0..=start).rev() {
        if k <= n_max {
            kept[k] = cur.clone();
        }
        if k == 0 {
            break;
        }
        let below = Complex::with_val(ctx.bits(), &two_z * &cur) - &above;
        above = std::mem::replace(&mut cur, below);
    }
    let h0 = sqrt_branch(z, Side::Upper, ctx)?.recip();
    let scale = h0 / &kept[0];
    Ok(kept.into_iter().map(|y| y * &scale).collect())
}

/// Location of the pole of a Green function.
#[derive(Debug, Clone)]
pub enum Pole {
    Finite(Cplx),
    Infinity,
}

/// Closed-form evaluation route for the Green function of `C \ J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreenForm {
    /// `log |1 - φ(z) conj φ(t)| / |φ(z) - φ(t)|`.
    #[default]
    MobiusRatio,
    /// `log |1 - φ(z) φ(t)|^2 / (2 |z - t| |φ(z) φ(t)|)`, real poles only.
    DistanceProduct,
}

/// Green function of the complement of `J` with pole at `t`.
pub fn green_function_interval(j: &Interval, z: &Cplx, t: &Pole, ctx: &PrecisionContext) -> Result<Real> {
    green_function_interval_form(j, z, t, GreenForm::MobiusRatio, ctx)
}

pub fn green_function_interval_form(
    j: &Interval,
    z: &Cplx,
    t: &Pole,
    form: GreenForm,
    ctx: &PrecisionContext,
) -> Result<Real> {
    if j.contains(z) {
        return Err(Error::domain("Green function evaluated on its own interval"));
    }
    let zu = j.to_unit(&ctx.cplx(z));
    let pz = phi(&zu, Sheet::Zero, ctx)?;
    let t = match t {
        Pole::Infinity => return Ok(abs(&pz).ln()),
        Pole::Finite(t) => t,
    };
    if j.contains(t) {
        return Err(Error::domain("Green function pole placed on the interval"));
    }
    let tu = j.to_unit(&ctx.cplx(t));
    if zu == tu {
        return Err(Error::Evaluation("Green function evaluated at its pole".into()));
    }
    let pt = phi(&tu, Sheet::Zero, ctx)?;
    match form {
        GreenForm::MobiusRatio => {
            let num = ctx.one() - Complex::with_val(ctx.bits(), &pz * pt.clone().conj());
            let den = Complex::with_val(ctx.bits(), &pz - &pt);
            Ok((abs(&num) / abs(&den)).ln())
        }
        GreenForm::DistanceProduct => {
            if !tu.imag().is_zero() {
                return Err(Error::domain("distance-product form needs a real pole"));
            }
            let prod = Complex::with_val(ctx.bits(), &pz * &pt);
            let num = abs(&(ctx.one() - &prod)).square();
            let dist = abs(&Complex::with_val(ctx.bits(), &zu - &tu));
            let den = dist * abs(&prod) * 2u32;
            Ok((num / den).ln())
        }
    }
}

/// Green function of `C \ J` for two real points off `J`, in double precision.
pub fn green_real_f64(j: &Interval, x: f64, y: f64) -> f64 {
    let px = phi_real(j.to_unit_f64(x));
    let py = phi_real(j.to_unit_f64(y));
    ((1.0 - px * py).abs() / (px - py).abs()).ln()
}

/// `lim_{y -> x} g_J(x, y) + log|x - y|` for real `x` off `J`.
pub fn green_regular_part_f64(j: &Interval, x: f64) -> f64 {
    let u = j.to_unit_f64(x);
    let p = phi_real(u);
    let dphi = p.abs() / (u * u - 1.0).sqrt() * 2.0 / j.length();
    (1.0 - p * p).abs().ln() - dphi.ln()
}
