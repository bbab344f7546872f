use cubic_ist::cubicexp::{SQRT3, ZETA};
use cubic_ist::jost::{Potential, Profile};
use cubic_ist::scatter::{
    f02, find_bound_states, fundamental_determinant, jump_residual, scattering_coefficients, structure_residuals,
    transition_direct, transition_full, transition_row0_at, wronskian_duality_residual, BoundStateConfig,
    BoundaryConfig,
};
use cubic_ist::C64;

fn gaussian() -> Potential {
    Potential::gaussian(0.1, 1.0, 3.0).unwrap()
}

fn samples() -> Vec<C64> {
    // 20 points in the disk |λ| < a/3 = 1, off the origin
    (0..20)
        .map(|j| {
            let r = 0.1 + 0.8 * (j as f64 + 0.5) / 20.0;
            let th = 2.0 * std::f64::consts::PI * (j as f64 * 0.618_033_988_749_894_9).fract();
            C64::from_polar(r, th)
        })
        .collect()
}

#[test]
fn structure_of_transition_matrix() {
    let p = gaussian();
    for l in samples() {
        let r = structure_residuals(&p, l).unwrap();
        assert!(r.det_residual <= 1e-6, "det at {l}: {:e}", r.det_residual);
        assert!(r.j_unitarity <= 1e-6, "J at {l}: {:e}", r.j_unitarity);
        assert!(r.unitarity <= 1e-6, "unitarity at {l}: {:e}", r.unitarity);
        assert!(r.cofactor <= 1e-6, "cofactor at {l}: {:e}", r.cofactor);
    }
}

#[test]
fn rotated_rows_match_direct_decomposition() {
    let p = gaussian();
    for l in [C64::new(0.3, 0.0), C64::new(0.6, 0.0), C64::new(0.2, 0.4)] {
        let a = transition_full(&p, l).unwrap();
        for x in [0.0, 0.7] {
            let b = transition_direct(&p, l, x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((a.t[i][j] - b.t[i][j]).norm() < 1e-6, "λ={l} x={x} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn decomposition_holds_pointwise() {
    use cubic_ist::jost::{solve_u, solve_v};
    let p = gaussian();
    let xs: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
    for l in [C64::new(0.25, 0.0), C64::new(0.8, 0.0)] {
        let t = transition_full(&p, l).unwrap();
        let u0 = solve_u(&p, l, 0, &xs).unwrap();
        let v: Vec<_> = (0..3).map(|k| solve_v(&p, l, k, &xs).unwrap()).collect();
        for (i, f) in u0.iter().enumerate() {
            let s: C64 = (0..3).map(|k| t.t[0][k] * v[k][i].value()).sum();
            assert!((s - f.value()).norm() < 1e-6 * f.value().norm().max(1.0));
        }
    }
}

#[test]
fn free_determinant_and_identity() {
    let z = Potential::zero();
    let l = C64::new(0.7, 0.2);
    let d = fundamental_determinant(&z, l, -0.3).unwrap();
    assert!((d + 3.0 * SQRT3 * l.powu(3)).norm() <= 1e-10 * (3.0 * SQRT3 * l.norm().powi(3)));
    let p = gaussian();
    let dq = fundamental_determinant(&p, l, 0.4).unwrap();
    assert!((dq + 3.0 * SQRT3 * l.powu(3)).norm() <= 1e-8);
}

#[test]
fn wronskian_duality_and_x_independence() {
    let p = gaussian();
    for l in [0.1, 0.35, 0.6, 0.9].map(|r| C64::new(r, 0.0)) {
        for x in [-0.5, 0.0, 0.5] {
            let r = wronskian_duality_residual(&p, l, x).unwrap();
            assert!(r.iter().all(|v| *v <= 1e-6), "{r:?}");
        }
        let t0 = transition_row0_at(&p, l, 0.0).unwrap()[0];
        for x in [-0.5, 0.5] {
            assert!((transition_row0_at(&p, l, x).unwrap()[0] - t0).norm() <= 1e-6);
        }
    }
}

#[test]
fn transmission_tends_to_one() {
    let p = gaussian();
    let dir = C64::new(0.0, -1.0);
    let mut prev = f64::INFINITY;
    for w in [2.0, 4.0, 8.0, 16.0] {
        let sc = scattering_coefficients(&p, dir * w).unwrap();
        let d = (sc.r0 - 1.0).norm();
        assert!(d < prev);
        prev = d;
    }
    assert!(prev < 1e-3);
}

#[test]
fn f02_tends_to_one_in_its_sector() {
    let p = gaussian();
    let dir = C64::from_polar(1.0, 240f64.to_radians());
    let mut prev = f64::INFINITY;
    for r in [2.0, 4.0, 8.0, 16.0] {
        let d = (f02(&p, dir * r, 0.3).unwrap() - 1.0).norm();
        assert!(d < prev);
        prev = d;
    }
}

#[test]
fn jump_relations_small_gaussian() {
    let p = gaussian();
    let scan = find_bound_states(&p, &BoundStateConfig::default()).unwrap();
    assert!(scan.states.is_empty());
    for t in [0.3, 0.5, 1.0, 2.0, 4.0] {
        let j = jump_residual(&p, t, 0.2, &scan.states, None).unwrap();
        assert!(j.ray1.residual <= 1e-4 && j.ray2.residual <= 1e-4, "t={t}: {j:?}");
    }
    let j = jump_residual(&p, 1.0, 0.2, &[], Some(&BoundaryConfig::default())).unwrap();
    println!("boundary system residuals at t=1: {:?}", j.boundary_system);
}

#[test]
fn jump_relations_vanish_for_zero_potential() {
    let j = jump_residual(&Potential::zero(), 1.0, 0.0, &[], Some(&BoundaryConfig::default())).unwrap();
    assert_eq!((j.ray1.residual, j.ray2.residual), (0.0, 0.0));
}

#[test]
fn bound_state_scan_on_strong_wells() {
    for amp in [-6.0, 6.0] {
        let p = Potential::new(Profile::Gaussian { amplitude: amp, width: 1.0 }, 9.0).unwrap();
        let scan = find_bound_states(&p, &BoundStateConfig::default()).unwrap();
        println!("amp {amp}: min |t00| {:?}, states {:#?}", scan.min_abs_t00, scan.states);
    }
    let _ = ZETA;
}
