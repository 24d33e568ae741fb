use std::f64::consts::PI;

use maslov_core::classical::{action_closed, solve_boundary, ClassicalSolution};
use maslov_core::kernels::{kernel, van_vleck_kernel, HessianSource};
use maslov_core::modeproduct::reduced_propagator_planar;
use maslov_core::models::Potential;
use maslov_core::morse::morse_index_along;
use maslov_core::secondvar::spectrum_along;
use maslov_core::{ComplexAmplitude, KernelValue, NumericConfig, Point, SystemModel};

fn regular(k: KernelValue) -> ComplexAmplitude {
    k.amplitude().expect("regular time")
}

#[test]
fn planar_mode_product_matches_magnetic_kernel() {
    let cfg = NumericConfig::default();
    let model = SystemModel::magnetic(1.3, 0.7);
    let (p1, p2) = (Point::new(0.2, -0.4), Point::new(-0.5, 1.1));
    for t in [0.9, 3.0, 6.1, 9.5] {
        let closed = regular(kernel(&model, p1, p2, t, &cfg).unwrap());
        let r = reduced_propagator_planar(1.3, 0.7, 1.0, t, 10_000, cfg.caustic_tol).unwrap();
        let s = action_closed(&model, p1, p2, t, &cfg).unwrap();
        let modes = r.reduced_propagator * ComplexAmplitude::cis(s);
        assert!((modes - closed).norm() <= 1e-6 * closed.norm(), "T = {t}");
    }
}

#[test]
fn forced_van_vleck_from_finite_differences() {
    let cfg = NumericConfig::default();
    let model = SystemModel::forced(0.8, 1.5, -0.6).with_hbar(0.7);
    for t in [0.5, 2.9, 4.4] {
        let closed = kernel(&model, Point::line(0.3), Point::line(-1.2), t, &cfg).unwrap();
        let n = closed.maslov_n();
        let vv = van_vleck_kernel(
            &model,
            Point::line(0.3),
            Point::line(-1.2),
            t,
            n,
            HessianSource::FiniteDifference(1e-3),
            &cfg,
        )
        .unwrap();
        let c = regular(closed);
        assert!((vv - c).norm() <= 1e-6 * c.norm(), "T = {t}");
    }
}

#[test]
fn anharmonic_morse_index_equals_inertia() {
    let cfg = NumericConfig::default();
    for (potential, t) in [
        (Potential::pendulum(1.0, 1.0), 5.0),
        (Potential::quartic(1.0, 1.0, 0.05), 4.0),
        (Potential::harmonic(1.0, 2.0), 3.5),
    ] {
        let model = SystemModel::potential(1.0, potential);
        let sol = solve_boundary(&model, Point::line(0.1), Point::line(-0.2), t, &cfg).unwrap();
        let ClassicalSolution::Unique { path, .. } = sol else {
            panic!("expected a unique path at T = {t}");
        };
        let mu = morse_index_along(&model, &path, &cfg).unwrap().morse_index;
        let inertia = spectrum_along(&model, &path, &cfg).unwrap().n_negative;
        assert_eq!(mu, inertia, "T = {t}");
        assert!(mu >= 1);
    }
}

#[test]
fn harmonic_potential_reproduces_oscillator() {
    let cfg = NumericConfig::default();
    let potential = SystemModel::potential(1.0, Potential::harmonic(1.0, 1.0));
    let osc = SystemModel::oscillator(1.0, 1.0);
    for t in [1.0, 2.0 + PI] {
        let a = regular(kernel(&potential, Point::line(0.4), Point::line(-0.3), t, &cfg).unwrap());
        let b = regular(kernel(&osc, Point::line(0.4), Point::line(-0.3), t, &cfg).unwrap());
        assert!((a - b).norm() <= 1e-5 * b.norm(), "T = {t}: {a} vs {b}");
    }
}
