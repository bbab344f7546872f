use cubic_ist::cubicexp::{SQRT3, ZETA};
use cubic_ist::invscatter::{
    closed_form_soliton, solve_fredholm, solve_reflectionless, solve_sc2zero, uniform_grid, BoundDatum, Fredholm,
    InverseConfig, RaySamples, ReflectionlessSystem, SpectralData,
};
use cubic_ist::quad::QuadratureGrid;
use cubic_ist::C64;
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

fn one_state(kappa: f64, b: C64) -> SpectralData {
    SpectralData::reflectionless(vec![BoundDatum::new(kappa, b)], vec![]).unwrap()
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn smooth_sc1(eps: f64) -> RaySamples {
    let t: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
    let v = t
        .iter()
        .map(|s| C64::new(eps * (1.0 - s / 6.0).powi(3) * (-s).exp(), 0.5 * eps * s * (1.0 - s / 6.0).powi(3)))
        .collect();
    RaySamples::new(t, v).unwrap()
}

#[test]
fn solve_then_apply_on_default_grid() {
    let d = SpectralData::reflectionless(
        vec![BoundDatum::new(1.0, C64::new(1.0, 0.0)), BoundDatum::new(2.5, C64::new(0.0, 1.0))],
        vec![BoundDatum::new(0.7, C64::new(1.0, 1.0))],
    )
    .unwrap();
    let grid = InverseConfig::default().grid(&d).unwrap();
    let fr = Fredholm::new(grid.clone(), 1e12).unwrap();
    for t0 in [0.1, 1.0, 10.0] {
        let (a, ah) = cubic_ist::invscatter::build_a(&d, t0).unwrap();
        assert_eq!((a.len(), ah.len()), (2, 1));
    }
    for r in 0..3 {
        let rhs: Vec<C64> = grid
            .nodes
            .iter()
            .map(|t| {
                let (a, ah) = cubic_ist::invscatter::build_a(&d, *t).unwrap();
                if r < 2 {
                    a[r]
                } else {
                    ah[0]
                }
            })
            .collect();
        let s = solve_fredholm(&grid, &rhs, 1e12).unwrap();
        assert!(sup_diff(&fr.apply(&s.values), &rhs) <= 1e-10);
        assert!(s.condition < 10.0);
    }
}

#[test]
fn reconstruction_self_convergence() {
    let d = one_state(1.0, C64::new(1.0, 0.0));
    let x = uniform_grid(-5.0, 5.0, 0.01).unwrap();
    let q = |n: usize| solve_reflectionless(&d, &x, &InverseConfig { nodes: n, ..Default::default() }).unwrap().q;
    let diff = sup_diff(&q(100), &q(200));
    assert!(diff <= 1e-7, "{diff:e}");
}

#[test]
fn reflectionless_matches_closed_form() {
    let cfg = InverseConfig::default();
    let d = one_state(1.0, C64::new(1.0, 0.0));
    let x = uniform_grid(-5.0, 5.0, 0.0025).unwrap();
    let s = solve_reflectionless(&d, &x, &cfg).unwrap();
    let sol = closed_form_soliton(1.0, C64::new(1.0, 0.0), &cfg).unwrap();
    let cf: Vec<C64> = x.iter().map(|v| sol.q(*v).unwrap()).collect();
    let rel = sup_diff(&s.q, &cf) / sup(&cf);
    assert!(rel <= 1e-6, "{rel:e}");
    // F from the system agrees with the closed form directly
    let fcf: Vec<C64> = x.iter().map(|v| sol.f(*v).unwrap()).collect();
    assert!(sup_diff(&s.f, &fcf) <= 1e-12 * sup(&fcf));
    assert!(s.right_edge_f < cfg.decay_tol);
    assert!(s.m_norm < 1.0);
    assert!(s.max_im_q > 0.0);
}

#[test]
fn translation_of_norming_constant_shifts_potential() {
    let cfg = InverseConfig::default();
    let x = uniform_grid(-5.0, 5.0, 0.01).unwrap();
    let x0 = 0.5;
    let b = C64::new(1.0, 0.0);
    let shifted = b * (I * (ZETA[2] - 1.0) * x0).exp();
    let q0 = solve_reflectionless(&one_state(1.0, b), &x, &cfg).unwrap().q;
    let q1 = solve_reflectionless(&one_state(1.0, shifted), &x, &cfg).unwrap().q;
    // q1(x) = q0(x + x0); x0 is 50 grid steps
    let k = 50;
    let d = sup_diff(&q1[..x.len() - k], &q0[k..]);
    assert!(d <= 1e-8 * sup(&q0), "{d:e}");
}

#[test]
fn closed_form_decay_rate() {
    let sol = closed_form_soliton(1.3, C64::new(0.4, 0.7), &InverseConfig::default()).unwrap();
    let rate = 1.3 * SQRT3 / 2.0;
    assert!((sol.decay_rate() - rate).abs() < 1e-14);
    for (a, b) in [(30.0, 32.0), (-32.0, -30.0)] {
        let ra = sol.q(a).unwrap().norm();
        let rb = sol.q(b).unwrap().norm();
        let measured = (ra / rb).ln().abs() / (b - a);
        assert!((measured - rate).abs() < 1e-6, "{measured} vs {rate}");
    }
}

#[test]
fn large_norming_constant_suppresses_potential() {
    let cfg = InverseConfig::default();
    let mut prev = f64::INFINITY;
    for b in [1e2, 1e4, 1e6] {
        let sol = closed_form_soliton(1.0, C64::new(b, 0.0), &cfg).unwrap();
        let m = (-50..=50).map(|i| sol.q(0.1 * i as f64).unwrap().norm()).fold(0.0, f64::max);
        assert!(m < prev);
        prev = m;
    }
    assert!(prev < 1e-3);
}

#[test]
fn degenerate_reductions() {
    let cfg = InverseConfig::default();
    let x = uniform_grid(-3.0, 3.0, 0.01).unwrap();
    let bound = vec![BoundDatum::new(1.0, C64::new(1.0, 0.0))];
    let hat = vec![BoundDatum::new(0.8, C64::new(0.5, -0.3))];
    let r = solve_reflectionless(&SpectralData::reflectionless(bound.clone(), hat.clone()).unwrap(), &x, &cfg).unwrap();
    let zero = RaySamples::new(vec![0.0, 1.0, 2.0], vec![C64::new(0.0, 0.0); 3]).unwrap();
    let d = SpectralData::new(Some(zero), None, bound, hat).unwrap();
    let s = solve_sc2zero(&d, &x, &cfg).unwrap();
    assert!(sup_diff(&r.q, &s.q) <= 1e-8);
    assert!(sup_diff(&r.f, &s.f) <= 1e-8);

    let empty = SpectralData::default();
    for sol in [solve_reflectionless(&empty, &x, &cfg).unwrap(), solve_sc2zero(&empty, &x, &cfg).unwrap()] {
        assert!(sol.q.iter().chain(&sol.f).all(|v| *v == C64::new(0.0, 0.0)));
    }
}

#[test]
fn weak_reflection_is_linear() {
    let cfg = InverseConfig::default();
    let x = uniform_grid(-1.0, 1.0, 0.05).unwrap();
    let f = |eps: f64| {
        let d = SpectralData::new(Some(smooth_sc1(eps)), None, vec![], vec![]).unwrap();
        solve_sc2zero(&d, &x, &cfg).unwrap().f
    };
    let eps = 1e-3;
    let (f1, f2, f4) = (f(eps), f(2.0 * eps), f(4.0 * eps));
    let n1: Vec<C64> = f2.iter().zip(&f1).map(|(a, b)| a - 2.0 * b).collect();
    let n2: Vec<C64> = f4.iter().zip(&f2).map(|(a, b)| a - 2.0 * b).collect();
    // nonlinear residual is small against the linear part and scales as ε²
    assert!(sup(&n1) <= 1e-2 * sup(&f1), "{} vs {}", sup(&n1), sup(&f1));
    let ratio = sup(&n2) / sup(&n1);
    assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
}

#[test]
fn reflection_with_bound_states_runs() {
    let cfg = InverseConfig { nodes: 120, ..Default::default() };
    let x = uniform_grid(-2.0, 2.0, 0.02).unwrap();
    let d = SpectralData::new(
        Some(smooth_sc1(0.05)),
        None,
        vec![BoundDatum::new(1.0, C64::new(1.0, 0.0))],
        vec![BoundDatum::new(0.6, C64::new(1.0, 0.5))],
    )
    .unwrap();
    let s = solve_sc2zero(&d, &x, &cfg).unwrap();
    assert!(s.q.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    assert!(s.max_system_condition.is_finite() && s.condition < 10.0);
    let refl = solve_reflectionless(&SpectralData { sc1: None, ..d.clone() }, &x, &cfg).unwrap();
    // the reflection correction is small for a small coefficient
    let corr = sup_diff(&s.f, &refl.f) / sup(&refl.f);
    assert!(corr > 0.0 && corr < 0.2, "{corr}");
}

#[test]
fn inputs_are_validated() {
    let cfg = InverseConfig::default();
    let x = uniform_grid(-1.0, 1.0, 0.1).unwrap();
    let d = SpectralData::new(Some(smooth_sc1(0.1)), None, vec![], vec![]).unwrap();
    assert!(solve_reflectionless(&d, &x, &cfg).is_err());
    let two = SpectralData { sc2: Some(smooth_sc1(0.1)), ..Default::default() };
    assert!(solve_sc2zero(&two, &x, &cfg).is_err());
    assert!(solve_reflectionless(&one_state(1.0, C64::new(1.0, 0.0)), &[0.0, 0.1, 0.3, 0.4, 0.5], &cfg).is_err());
    let small = InverseConfig { max_extension: 1.0, ..Default::default() };
    assert!(matches!(
        solve_reflectionless(&one_state(1.0, C64::new(1.0, 0.0)), &x, &small),
        Err(cubic_ist::Error::DomainTooSmall(_))
    ));
    let _ = QuadratureGrid::new(4, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn one_state_system_matches_closed_form(kappa in 0.3f64..3.0, br in -2.0f64..2.0, bi in -2.0f64..2.0, x in -8.0f64..8.0) {
        prop_assume!(br.hypot(bi) > 0.05);
        let b = C64::new(br, bi);
        let cfg = InverseConfig::default();
        let sys = ReflectionlessSystem::new(&one_state(kappa, b), &cfg).unwrap();
        let sol = closed_form_soliton(kappa, b, &cfg).unwrap();
        let (_, f, _) = sys.at(x).unwrap();
        let fc = sol.f(x).unwrap();
        prop_assert!((f - fc).norm() <= 1e-10 * fc.norm());
    }

    #[test]
    fn translation_in_closed_form(kappa in 0.3f64..3.0, x in -5.0f64..5.0, x0 in -2.0f64..2.0) {
        let cfg = InverseConfig::default();
        let b = C64::new(1.0, 0.3);
        let s0 = closed_form_soliton(kappa, b, &cfg).unwrap();
        let s1 = closed_form_soliton(kappa, b * (I * kappa * (ZETA[2] - 1.0) * x0).exp(), &cfg).unwrap();
        let (a, c) = (s1.q(x).unwrap(), s0.q(x + x0).unwrap());
        prop_assert!((a - c).norm() <= 1e-9 * c.norm().max(1e-300));
    }
}
