use proptest::prelude::*;
use regcauchy::numerics::{
    extrapolate_limit, geometric_grid, integrate, CorrectionScale, IntegrandSpec, Tail,
};
use regcauchy::Complex64;

const REL_TOL: f64 = 1e-10;

fn f(t: f64) -> f64 {
    (-t * t).exp() * t.cos()
}

fn g(t: f64) -> f64 {
    1.0 / (1.0 + t * t)
}

fn integral(h: impl Fn(f64) -> f64 + Sync) -> f64 {
    let spec = IntegrandSpec::real(h, 0.0, f64::INFINITY).upper_tail(Tail::power(-2.0));
    integrate(&spec, REL_TOL).unwrap().value.re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn integration_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (i_f, i_g) = (integral(f), integral(g));
        let combined = integral(|t| a * f(t) + b * g(t));
        let scale = a.abs() * i_f.abs() + b.abs() * i_g.abs();
        prop_assert!((combined - a * i_f - b * i_g).abs() <= 10.0 * REL_TOL * scale.max(1e-300));
    }

    #[test]
    fn extrapolation_scales_with_samples(re in -5.0f64..5.0, im in -5.0f64..5.0, p in 0.3f64..2.0) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        let samples: Vec<(f64, Complex64)> = geometric_grid(10.0, 2.0, 10)
            .into_iter()
            .map(|y| (y, Complex64::new(1.5, -0.5) + Complex64::new(0.7, 0.2) * y.powf(-p)))
            .collect();
        let scaled: Vec<(f64, Complex64)> = samples.iter().map(|&(y, v)| (y, c * v)).collect();
        let base = extrapolate_limit(&samples).unwrap();
        let s = extrapolate_limit(&scaled).unwrap();
        prop_assert_eq!(base.verdict, s.verdict);
        prop_assert!((s.value - c * base.value).norm() <= 1e-12 * (c * base.value).norm());
    }
}

#[test]
fn known_integrals() {
    let half_gauss = integrate(&IntegrandSpec::real(|t| (-t * t).exp(), 0.0, f64::INFINITY).upper_tail(Tail::power(-4.0)), REL_TOL).unwrap();
    assert!((half_gauss.value.re - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    let tail = integrate(
        &IntegrandSpec::real(|t| t.powf(-1.5), 1.0, f64::INFINITY).upper_tail(Tail::power(-1.5)),
        REL_TOL,
    )
    .unwrap();
    assert!((tail.value.re - 2.0).abs() < 1e-9);
}

#[test]
fn log_corrections_are_recognised() {
    let samples: Vec<(f64, Complex64)> = geometric_grid(10.0, 10.0, 8)
        .into_iter()
        .map(|r: f64| (r, Complex64::new(2.0 + 3.0 / r.ln(), 0.0)))
        .collect();
    let est = extrapolate_limit(&samples).unwrap();
    assert!(est.is_converged());
    assert!((est.value.re - 2.0).abs() < 1e-3, "{:?}", est.value);
    assert_eq!(est.scale, CorrectionScale::LogAbscissa);
}
