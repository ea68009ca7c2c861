use std::f64::consts::PI;

use hplab_core::hermite_pade::{
    auxiliary_zeros, hp_type1_germ, hp_type2_germ, hp_type2_markov, real_zeros_mp, split_degrees,
    split_type2, type1_zeros, type2_zeros, Family, HPTypeII, ZeroCloud,
};
use hplab_core::maps::{Interval, IntervalUnion};
use hplab_core::markov::{markov_germs, MarkovPair};
use hplab_core::poly::{ChebPolynomial, Polynomial};
use hplab_core::precision::{abs, Cplx};
use hplab_core::roots::{circle_lhs, circle_roots, poly_roots};
use hplab_core::series::{algebraic_germ, f1_germ, AlgebraicFunctionSpec, ConfigComplex, Factor, LaurentGerm};
use hplab_core::verify::band_check;
use hplab_core::{Error, PrecisionContext};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::{Complex, Float};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn f23() -> MarkovPair {
    MarkovPair::uniform(IntervalUnion::single(Interval::new(2.0, 3.0).unwrap()))
}

fn two_component() -> MarkovPair {
    MarkovPair::uniform(
        IntervalUnion::new(vec![Interval::new(2.0, 2.5).unwrap(), Interval::new(3.0, 3.5).unwrap()]).unwrap(),
    )
}

fn diff(a: &Cplx, b: &Cplx) -> f64 {
    abs(&Complex::with_val(a.prec().0, a - b)).to_f64()
}

fn factor(base: (f64, f64), exponent: f64) -> Factor {
    Factor {
        base: Some(ConfigComplex::Pair([base.0, base.1])),
        branch_point: None,
        exponent: ConfigComplex::Real(exponent),
    }
}

fn example1_like() -> AlgebraicFunctionSpec {
    AlgebraicFunctionSpec::one_interval(
        Interval::unit(),
        vec![
            factor((1.8, 0.0), -2.0 / 3.0),
            factor((0.4, 1.5), 1.0 / 3.0),
            factor((0.4, -1.5), 1.0 / 3.0),
        ],
    )
}

/// A type II record holding only `q`, enough for the splitting.
fn from_chebyshev(n: usize, c: Vec<Cplx>, ctx: &PrecisionContext) -> HPTypeII {
    let q_cheb = ChebPolynomial::new(c);
    let q = q_cheb.to_monomial(ctx);
    HPTypeII {
        n,
        degree: q.degree(),
        q,
        q_cheb,
        p1: Polynomial::new(vec![ctx.zero()]),
        p2: Polynomial::new(vec![ctx.zero()]),
        nullity: 1,
        germ_residual: [0.0; 2],
        system_residual: 0.0,
        quadrature_nodes: None,
    }
}

#[test]
fn point_mass_pair_at_n_one() {
    // σ = δ_2: f_2 = (f_1(z) - f_1(2))/(z - 2), f_1(2) = 1/√3
    let c = ctx();
    let len = 8;
    let f1 = f1_germ(len, &c).unwrap();
    let s3 = Float::with_val(c.bits(), 3u32).sqrt().recip();
    let shifted = f1.sub(&LaurentGerm::constant(c.cplx(&s3), len, &c).unwrap());
    let inv = LaurentGerm::from_fn(1, len, &c, |k| c.cplx(Float::with_val(c.bits(), Float::i_exp(1, k as i32)))).unwrap();
    let f2 = shifted.mul(&inv);
    let hp = hp_type2_germ(&f1, &f2, 1, &c).unwrap();
    assert_eq!(hp.degree, 2);
    // z^{-1} coefficients: q_0 + q_2/2 = 0 and q_0 b_0 + q_1 b_1 + q_2 b_2 = 0,
    // with b_0 = -s, b_1 = 1 - 2s, b_2 = 2 - 4s
    let q0 = Float::with_val(c.bits(), -0.5);
    let b0 = Float::with_val(c.bits(), -&s3);
    let b1 = Float::with_val(c.bits(), 1u32) - Float::with_val(c.bits(), &s3 * 2u32);
    let b2 = Float::with_val(c.bits(), 2u32) - Float::with_val(c.bits(), &s3 * 4u32);
    let q1 = -(Float::with_val(c.bits(), &q0 * &b0) + b2) / b1;
    let expect = [c.cplx(q0), c.cplx(q1), c.one()];
    for (a, e) in hp.q.coeffs().iter().zip(&expect) {
        assert!(diff(a, e) < 1e-70, "{a} vs {e}");
    }
}

#[test]
fn markov_zeros_real_simple_in_e() {
    let c = ctx();
    let hp = hp_type2_markov(&f23(), 8, &c).unwrap();
    assert_eq!(hp.degree, 16);
    assert_eq!(hp.nullity, 1);
    assert!(diff(hp.q.leading(), &c.one()) < 1e-70);
    let (x, max_imag) = real_zeros_mp(&hp.q, &c).unwrap();
    assert_eq!(x.len(), 16);
    assert!(max_imag < 1e-40);
    assert!(x.first().unwrap().to_f64() > -1.0 && x.last().unwrap().to_f64() < 1.0);
    for w in x.windows(2) {
        assert!(Float::with_val(c.bits(), &w[1] - &w[0]).to_f64() > 1e-3);
    }
    assert!(hp.germ_residual.iter().all(|r| *r < 1e-20));
}

#[test]
fn germ_route_matches_markov_route() {
    let c = ctx();
    let n = 8;
    let markov = hp_type2_markov(&f23(), n, &c).unwrap();
    let (g1, g2) = markov_germs(&f23(), 3 * n + 2, 4 * n + 32, 2 * n + 32, &c).unwrap();
    let germ = hp_type2_germ(&g1, &g2, n, &c).unwrap();
    assert_eq!(germ.degree, 2 * n);
    let scale = markov.q.max_abs().to_f64();
    for (a, b) in markov.q.coeffs().iter().zip(germ.q.coeffs()) {
        assert!(diff(a, b) <= 1e-20 * scale);
    }
    let tol = 2f64.powf(-0.3 * c.bits() as f64);
    assert!(germ.germ_residual.iter().all(|r| *r <= tol), "{:?}", germ.germ_residual);
    // the numerators are the polynomial parts, of degree below 2n
    assert!(germ.p1.degree() < 2 * n && germ.p2.degree() < 2 * n);
}

#[test]
fn chebyshev_band_below_index_n() {
    let c = ctx();
    for n in [4, 8] {
        let b = band_check(&f23(), n, &c).unwrap();
        assert_eq!(b.germ_nullity, 1);
        assert!(b.band_ratio <= 1e-20, "n = {n}: {:e}", b.band_ratio);
        assert!(b.route_difference <= 1e-20);
    }
}

#[test]
fn symmetric_algebraic_germ_gives_real_q() {
    let c = ctx();
    let n = 4;
    let g = algebraic_germ(&example1_like(), 3 * n + 4, &c).unwrap();
    let g2 = g.mul(&g);
    let hp = hp_type2_germ(&g, &g2, n, &c).unwrap();
    assert!(hp.q.is_real(1e-40));
}

#[test]
fn type1_at_n_zero_matches_small_nullspace() {
    // Q0 + Q1 f + Q2 f^2 with z^0 and z^-1 killed: (Q0, Q1, Q2) ∝ (f_0^2, -2 f_0, 1)
    let c = ctx();
    let g = algebraic_germ(&example1_like(), 4, &c).unwrap();
    let hp = hp_type1_germ(&g, 0, &c).unwrap();
    let f0 = g.coeff(0).unwrap();
    let q2 = hp.q2.coeffs()[0].clone();
    let expect = [
        Complex::with_val(c.bits(), &f0 * &f0),
        Complex::with_val(c.bits(), &f0 * -2i32),
    ];
    for (got, e) in [hp.q0.coeffs()[0].clone(), hp.q1.coeffs()[0].clone()].iter().zip(&expect) {
        let scaled = Complex::with_val(c.bits(), e * &q2);
        assert!(diff(got, &scaled) < 1e-60 * abs(&q2).to_f64());
    }
    assert!(hp.remainder_order >= 2);
}

#[test]
fn type1_remainder_order_and_reality() {
    let c = ctx();
    for n in [1, 3, 6, 10] {
        let g = algebraic_germ(&example1_like(), 3 * n + 8, &c).unwrap();
        let hp = hp_type1_germ(&g, n, &c).unwrap();
        assert!(hp.remainder_order >= 2 * n as i64 + 2, "n = {n}: {}", hp.remainder_order);
        for q in [&hp.q0, &hp.q1, &hp.q2] {
            assert!(q.degree() <= n);
            assert!(q.is_real(1e-40));
        }
        let clouds = type1_zeros(&hp, &c).unwrap();
        assert_eq!(clouds[2].len(), hp.q2.degree());
        assert_eq!(clouds[0].family, Family::Type1Q0);
    }
}

#[test]
fn type1_rejects_short_germ() {
    let c = ctx();
    let g = algebraic_germ(&example1_like(), 10, &c).unwrap();
    assert!(matches!(hp_type1_germ(&g, 4, &c), Err(Error::Domain(_))));
}

#[test]
fn split_of_t6_by_hand() {
    // T_6 = q1 T_4 + q2 T_5 with deg ≤ 1 forces q1 = -1, q2 = 2z
    let c = ctx();
    let mut coeffs = vec![c.zero(); 7];
    coeffs[6] = c.one();
    let s = split_type2(&from_chebyshev(3, coeffs, &c), &c).unwrap();
    assert_eq!((s.m, s.a), (2, 4));
    let q1 = s.q1.to_monomial(&c);
    let q2 = s.q2.to_monomial(&c);
    assert!(diff(&q1.coeffs()[0], &c.cplx(-1)) < 1e-70);
    assert!(q1.coeffs().iter().skip(1).all(|x| abs(x).to_f64() < 1e-70));
    assert!(abs(&q2.coeffs()[0]).to_f64() < 1e-70);
    assert!(diff(&q2.coeffs()[1], &c.cplx(2)) < 1e-70);
    assert!(s.reconstruction_residual < 1e-70);
}

#[test]
fn split_of_t4_even_index() {
    // n = 2, m = 1: T_4 = q1 T_2 + q2 T_3 with deg q1 ≤ 0, deg q2 ≤ 1
    let c = ctx();
    let mut coeffs = vec![c.zero(); 5];
    coeffs[4] = c.one();
    let s = split_type2(&from_chebyshev(2, coeffs, &c), &c).unwrap();
    assert_eq!(split_degrees(2), (1, 0, 1));
    let q1 = s.q1.to_monomial(&c);
    let q2 = s.q2.to_monomial(&c);
    assert!(diff(&q1.coeffs()[0], &c.cplx(-1)) < 1e-70);
    assert!(diff(&q2.coeffs()[1], &c.cplx(2)) < 1e-70);
}

#[test]
fn split_rejects_broken_band() {
    let c = ctx();
    let coeffs: Vec<Cplx> = (0..7).map(|_| c.one()).collect();
    assert!(matches!(split_type2(&from_chebyshev(3, coeffs, &c), &c), Err(Error::Degeneracy(_))));
}

#[test]
fn markov_split_degrees_and_reconstruction() {
    let c = ctx();
    for n in [5, 6] {
        let hp = hp_type2_markov(&f23(), n, &c).unwrap();
        let s = split_type2(&hp, &c).unwrap();
        let (m, d1, d2) = split_degrees(n);
        assert_eq!(s.m, m);
        assert!(s.q1.degree() <= d1 && s.q2.degree() <= d2);
        if n % 2 == 1 {
            assert_eq!(d1, m - 1);
            assert_eq!(d2, m - 1);
        }
        assert!(s.reconstruction_residual <= 2f64.powf(-0.3 * c.bits() as f64));
    }
}

#[test]
fn auxiliary_zeros_count_and_location() {
    let c = ctx();
    let hull = Interval::new(2.0, 3.0).unwrap();
    for n in [3, 4, 8, 9] {
        let hp = hp_type2_markov(&f23(), n, &c).unwrap();
        let aux = auxiliary_zeros(&split_type2(&hp, &c).unwrap(), &hull, &c).unwrap();
        assert_eq!(aux.zeros.len(), n);
        let xs: Vec<f64> = aux.zeros.iter().map(|b| b.to_f64()).collect();
        assert!(xs.iter().all(|&x| (2.0..=3.0).contains(&x)));
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(aux.cloud().family, Family::AuxiliaryPn);
    }
}

#[test]
fn auxiliary_zeros_of_two_components() {
    let c = ctx();
    let pair = two_component();
    let hull = pair.support.hull();
    for n in [6, 10] {
        let hp = hp_type2_markov(&pair, n, &c).unwrap();
        let aux = auxiliary_zeros(&split_type2(&hp, &c).unwrap(), &hull, &c).unwrap();
        let xs: Vec<f64> = aux.zeros.iter().map(|b| b.to_f64()).collect();
        assert_eq!(xs.len(), n);
        assert!(xs.iter().filter(|&&x| x > 2.5 && x < 3.0).count() <= 1);
    }
}

#[test]
fn chebyshev_t8_roots() {
    let c = ctx();
    let mut coeffs = vec![c.zero(); 9];
    coeffs[8] = c.one();
    let p = ChebPolynomial::new(coeffs).to_monomial(&c);
    let r = poly_roots(&p, &c).unwrap();
    let mut got: Vec<f64> = r.roots.iter().map(|z| z.real().to_f64()).collect();
    got.sort_by(f64::total_cmp);
    let mut expect: Vec<f64> = (1..=8).map(|k| ((2 * k - 1) as f64 * PI / 16.0).cos()).collect();
    expect.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(r.residual <= 2f64.powf(-0.5 * c.bits() as f64));
}

#[test]
fn poly_roots_rejects_constants() {
    let c = ctx();
    assert!(poly_roots(&Polynomial::from_f64(&[3.0], &c), &c).is_err());
}

#[test]
fn circle_equation_reproduces_type2_zeros() {
    let c = ctx();
    for n in [1, 2, 5, 8, 12, 16] {
        let hp = hp_type2_markov(&f23(), n, &c).unwrap();
        let aux = auxiliary_zeros(&split_type2(&hp, &c).unwrap(), &Interval::new(2.0, 3.0).unwrap(), &c).unwrap();
        let betas = aux.betas();
        let circle = circle_roots(&betas, n, &c).unwrap();
        let z = circle.zeros();
        assert_eq!(z.len(), 2 * n);
        let (x, _) = real_zeros_mp(&hp.q, &c).unwrap();
        for (a, b) in z.iter().zip(&x) {
            assert!(Float::with_val(c.bits(), a - b).abs().to_f64() < 1e-15, "n = {n}");
            assert!(a.to_f64() > -1.0 && a.to_f64() < 1.0);
        }
        let pts = circle.circle_points();
        assert_eq!(pts.len(), 4 * n);
        for p in &pts {
            // ζ = ±1 is excluded and the equation holds
            assert!(diff(p, &c.one()) > 1e-10 && diff(p, &c.cplx(-1)) > 1e-10);
            let lhs = circle_lhs(&betas, n, p);
            assert!(diff(&lhs, &c.cplx(-1)) < 1e-60);
            // closed under conjugation and inversion
            let conj = Complex::with_val(c.bits(), p.conj_ref());
            let inv = Complex::with_val(c.bits(), p.recip_ref());
            assert!(pts.iter().any(|q| diff(q, &conj) < 1e-60));
            assert!(pts.iter().any(|q| diff(q, &inv) < 1e-60));
        }
    }
}

#[test]
fn circle_roots_validate_betas() {
    let c = ctx();
    assert!(circle_roots(&[c.real(1.5)], 1, &c).is_err());
    assert!(circle_roots(&[c.real(0.2)], 2, &c).is_err());
}

#[test]
fn zero_cloud_csv() {
    let c = ctx();
    let hp = hp_type2_markov(&f23(), 4, &c).unwrap();
    let (cloud, residual) = type2_zeros(&hp, &c).unwrap();
    assert!(residual < 1e-60);
    let csv = cloud.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "re,im,family,n");
    assert_eq!(lines.len(), 9);
    assert!(lines[1].ends_with(",type2,4"));
    let again = type2_zeros(&hp_type2_markov(&f23(), 4, &c).unwrap(), &c).unwrap().0;
    assert_eq!(again.to_csv(), csv);
    let unsorted = ZeroCloud::new(Family::Type2, 1, vec![Complex64::new(1.0, -0.0), Complex64::new(-1.0, 2.0)]);
    assert_eq!(unsorted.points[0].re, -1.0);
    assert!(unsorted.points[1].im.is_sign_positive());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chebyshev_roundtrip(coeffs in prop::collection::vec(-10.0f64..10.0, 1..24)) {
        let c = ctx();
        let d = coeffs.len() - 1;
        let cheb = ChebPolynomial::new(coeffs.iter().map(|&x| c.cplx(x)).collect());
        let back = ChebPolynomial::from_monomial(&cheb.to_monomial(&c), &c);
        let tol = 2f64.powi(-(c.bits() as i32 - 2 * d as i32)) * cheb.max_abs().to_f64().max(1.0);
        for (k, x) in cheb.coeffs().iter().enumerate() {
            let y = back.coeffs().get(k).cloned().unwrap_or_else(|| c.zero());
            prop_assert!(diff(x, &y) <= tol);
        }
    }

    #[test]
    fn split_reconstructs_banded_polynomials(n in 1usize..9, seed in prop::collection::vec(0.1f64..2.0, 9)) {
        let c = ctx();
        let mut coeffs = vec![c.zero(); 2 * n + 1];
        for j in n..=2 * n {
            coeffs[j] = c.cplx(seed[j - n] * if j % 2 == 0 { 1.0 } else { -1.0 });
        }
        let s = split_type2(&from_chebyshev(n, coeffs, &c), &c).unwrap();
        prop_assert!(s.reconstruction_residual < 1e-60);
        let (_, d1, d2) = split_degrees(n);
        prop_assert!(s.q1.degree() <= d1 && s.q2.degree() <= d2);
    }
}
