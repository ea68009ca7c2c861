use hplab_core::equilibrium::solve_scalar_equilibrium;
use hplab_core::hermite_pade::{Family, ZeroCloud};
use hplab_core::maps::{Interval, IntervalUnion};
use hplab_core::markov::MarkovPair;
use hplab_core::measure::DiscreteMeasure;
use hplab_core::potentials::arcsine_measure;
use hplab_core::verify::{
    check_corollary1, check_lemma1, check_lemma2, delta_n_root, empirical_measure, fit_inverse_n,
    fraction_near, ks_distance, strong_asymptotics_rhs, CheckSettings, ComparisonReport,
};
use hplab_core::{Error, PrecisionContext};
use num_complex::Complex64;
use proptest::prelude::*;

fn f23() -> MarkovPair {
    MarkovPair::uniform(IntervalUnion::single(Interval::new(2.0, 3.0).unwrap()))
}

fn lambda_f23(nodes: usize) -> DiscreteMeasure {
    solve_scalar_equilibrium(&f23().support, nodes, 1e-6).unwrap().measure
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn empirical_measure_of_four_points() {
    let cloud = ZeroCloud::new(
        Family::Type2,
        2,
        vec![c(0.5, 0.0), c(-0.5, 0.0), c(0.1, 0.0), c(0.9, 0.0)],
    );
    let mu = empirical_measure(&cloud).unwrap();
    assert_eq!(mu.len(), 4);
    assert!(mu.weights().iter().all(|w| *w == 0.25));
    assert!((mu.mass() - 1.0).abs() < 1e-15);
    assert_eq!(mu.nodes(), cloud.points.as_slice());
    let empty = ZeroCloud::new(Family::Type2, 0, vec![]);
    assert!(empirical_measure(&empty).is_err());
}

#[test]
fn ks_elementary_cases() {
    let a = arcsine_measure(50).unwrap();
    assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
    let d0 = DiscreteMeasure::dirac(c(0.0, 0.0));
    let d1 = DiscreteMeasure::dirac(c(1.0, 0.0));
    assert_eq!(ks_distance(&d0, &d1).unwrap(), 1.0);
    let complex = DiscreteMeasure::dirac(c(0.0, 1.0));
    assert!(matches!(ks_distance(&d0, &complex), Err(Error::Domain(_))));
}

#[test]
fn ks_between_arcsine_discretizations() {
    // the CDF of the N-node rule jumps by 1/N at cos((2k-1)π/(2N)); the 2N-node
    // rule interleaves its nodes, so the gap never exceeds 1/(2N)
    for n in [5, 16, 40, 101] {
        let d = ks_distance(&arcsine_measure(n).unwrap(), &arcsine_measure(2 * n).unwrap()).unwrap();
        assert!(d <= 1.0 / (2 * n) as f64 + 1e-14, "n = {n}: {d}");
    }
}

#[test]
fn strong_rhs_at_infinity() {
    let ctx = PrecisionContext::default();
    let lambda = lambda_f23(400);
    let z = 1e6;
    let rhs = strong_asymptotics_rhs(&lambda, c(z, 0.0), &ctx).unwrap();
    assert!((rhs + 2.0 * z.ln()).abs() <= 1e-4, "{}", rhs + 2.0 * z.ln());
}

#[test]
fn strong_rhs_is_harmonic_off_e_and_f() {
    let ctx = PrecisionContext::default();
    let lambda = lambda_f23(400);
    let center = c(1.0, 2.0);
    let v0 = strong_asymptotics_rhs(&lambda, center, &ctx).unwrap();
    let mean: f64 = (0..8)
        .map(|k| {
            let z = center + Complex64::from_polar(1e-2, std::f64::consts::PI * k as f64 / 4.0);
            strong_asymptotics_rhs(&lambda, z, &ctx).unwrap()
        })
        .sum::<f64>()
        / 8.0;
    assert!((mean - v0).abs() <= 1e-6);
}

#[test]
fn strong_rhs_rejects_points_of_e() {
    let ctx = PrecisionContext::default();
    let lambda = lambda_f23(100);
    assert!(strong_asymptotics_rhs(&lambda, c(0.3, 0.0), &ctx).is_err());
    let atom = lambda.nodes()[3];
    assert!(strong_asymptotics_rhs(&lambda, atom, &ctx).is_err());
}

#[test]
fn strong_asymptotics_error_decreases_at_two() {
    let ctx = PrecisionContext::new(512).unwrap();
    let settings = CheckSettings {
        equilibrium_nodes: 1600,
        equilibrium_tolerance: 1e-6,
        ..Default::default()
    };
    let r = hplab_core::verify::check_strong_asymptotics(
        &f23(),
        &[8, 16, 32],
        &[c(2.0, 0.0), c(1.0, 1.0), c(-3.0, 0.0)],
        0.05,
        &settings,
        &ctx,
    )
    .unwrap();
    assert!(r.passed);
    for p in &r.points {
        assert!(p.errors.windows(2).all(|w| w[1].1 < w[0].1), "{:?}", p);
    }
}

#[test]
fn inverse_n_fit() {
    let pts = [(8, 0.5), (16, 0.25), (32, 0.125)];
    assert!((fit_inverse_n(&pts) - 4.0).abs() < 1e-12);
}

#[test]
fn lemma1_on_one_interval() {
    let ctx = PrecisionContext::new(512).unwrap();
    let r = check_lemma1(&f23(), &[8, 16, 32], &CheckSettings::default(), &ctx).unwrap();
    assert!(r.passed, "{}", r.to_json());
    assert!(r.ks_distance <= 0.1);
    assert_eq!(r.details["zeros_outside_hull"], 0.0);
    let back: ComparisonReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn lemma1_on_two_intervals_one_zero_per_gap() {
    let ctx = PrecisionContext::new(512).unwrap();
    let pair = MarkovPair::uniform(
        IntervalUnion::new(vec![Interval::new(2.0, 2.5).unwrap(), Interval::new(3.0, 3.5).unwrap()]).unwrap(),
    );
    let r = check_lemma1(&pair, &[8, 16], &CheckSettings::default(), &ctx).unwrap();
    assert!(r.details["max_zeros_per_gap"] <= 1.0);
    assert_eq!(r.details["zeros_outside_hull"], 0.0);
}

#[test]
fn corollary1_on_one_interval() {
    let ctx = PrecisionContext::new(512).unwrap();
    let settings = CheckSettings {
        ks_tolerance: 0.08,
        ..Default::default()
    };
    let r = check_corollary1(&f23(), &[8, 16, 32], &settings, &ctx).unwrap();
    assert!(r.passed);
    assert!(r.details["ks_mu_lambda_e"] <= 1e-2);
    assert!((r.details["mass_of_2mu"] - 2.0).abs() < 1e-12);
    assert!(r.inputs.precision_bits == 512 && r.inputs.settings.equilibrium_nodes == 400);
}

#[test]
fn delta_n_decays_geometrically() {
    let ctx = PrecisionContext::new(512).unwrap();
    let r: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| delta_n_root(&f23(), n, c(2.0, 0.0), &ctx).unwrap())
        .collect();
    assert!(r.iter().all(|v| *v < 0.9));
    let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.1);
}

#[test]
fn lemma2_suite() {
    let r = check_lemma2(2000, 1e-6, &PrecisionContext::default()).unwrap();
    assert!(r.passed);
    assert_eq!(r.points, 50);
}

#[test]
fn fraction_near_segments() {
    let pts = [c(0.0, 0.01), c(0.0, 1.0), c(2.0, 0.0), c(1.02, 0.0)];
    assert_eq!(fraction_near(&pts, &[Interval::unit()], 0.05), 0.5);
}

fn measure_from(nodes: &[f64]) -> DiscreteMeasure {
    let w = vec![1.0 / nodes.len() as f64; nodes.len()];
    DiscreteMeasure::from_real(nodes, w).unwrap()
}

proptest! {
    #[test]
    fn ks_is_a_metric(
        a in prop::collection::vec(-3.0f64..3.0, 1..20),
        b in prop::collection::vec(-3.0f64..3.0, 1..20),
        d in prop::collection::vec(-3.0f64..3.0, 1..20),
    ) {
        let (ma, mb, md) = (measure_from(&a), measure_from(&b), measure_from(&d));
        let ab = ks_distance(&ma, &mb).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ks_distance(&mb, &ma).unwrap()).abs() < 1e-15);
        prop_assert_eq!(ks_distance(&ma, &ma).unwrap(), 0.0);
        let ad = ks_distance(&ma, &md).unwrap();
        let db = ks_distance(&md, &mb).unwrap();
        prop_assert!(ab <= ad + db + 1e-12);
    }
}
