use std::f64::consts::PI;

use regcauchy::inversion::{
    classify_model, model_measure_mass, negative_squares, spread_points, stieltjes_invert, InversionSchedule,
};
use regcauchy::transforms::HalfPlaneFunction;
use regcauchy::Complex64;

fn admissible() -> Vec<(f64, Complex64)> {
    vec![
        (-1.0, Complex64::new(1.0, 0.0)),
        (0.0, Complex64::from_polar(1.0, PI / 4.0)),
        (0.5, Complex64::new(1.0, 0.0)),
        (2.0, Complex64::i()),
        (3.0, Complex64::new(-1.0, 0.0)),
    ]
}

#[test]
fn counts_never_decrease_when_points_are_added() {
    let fs = [
        HalfPlaneFunction::closed_form("z", |z| z),
        HalfPlaneFunction::closed_form("-1/z", |z| -1.0 / z),
        HalfPlaneFunction::closed_form("z^2", |z| z * z),
        HalfPlaneFunction::closed_form("z^3", |z| z * z * z),
        HalfPlaneFunction::closed_form("-z^3", |z| -z * z * z),
        HalfPlaneFunction::model(2.5, Complex64::new(1.0, 0.3)),
    ];
    for q in &fs {
        let counts: Vec<usize> = (2..=20).map(|n| negative_squares(q, &spread_points(n)).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[1] >= w[0]), "{q:?}: {counts:?}");
    }
}

#[test]
fn model_counts_match_classification() {
    for (alpha, omega) in admissible() {
        let kappa = classify_model(alpha, omega).kappa.expect("admissible");
        let q = HalfPlaneFunction::model(alpha, omega);
        assert_eq!(negative_squares(&q, &spread_points(12)).unwrap(), kappa as usize, "α {alpha}, ω {omega}");
    }
}

#[test]
fn model_masses_match_inversion() {
    let sched = InversionSchedule::default();
    for (alpha, omega) in admissible() {
        let q = HalfPlaneFunction::model(alpha, omega);
        for (a, b) in [(0.5, 2.0), (-2.0, -0.25), (-1.0, 1.0)] {
            let want = model_measure_mass(alpha, omega, a, b).unwrap();
            let got = stieltjes_invert(&q, a, b, &sched).unwrap().real();
            if want.abs() < 1e-12 {
                assert!(got.abs() < 1e-6, "α {alpha}, ({a},{b}): {got}");
            } else {
                assert!((got - want).abs() < 0.02 * want, "α {alpha}, ({a},{b}): {got} vs {want}");
            }
        }
    }
}
