use proptest::prelude::*;
use regcauchy::measures::{Density, Interval, Measure};
use regcauchy::numerics::{extrapolate_real, geometric_grid, integrate, ExtrapolationOptions, IntegrandSpec};
use regcauchy::regvar::{rv_index, weighted_stieltjes, RvVerdict};
use regcauchy::transforms::stieltjes;

fn half_line(coeff: f64, exponent: f64) -> Measure {
    Measure::zero()
        .with_piece(Interval::positive(), Density::Power { coeff, exponent })
        .unwrap()
}

#[test]
fn potter_sandwich() {
    let eps = 0.1;
    let grid = geometric_grid(10.0, 10.0, 60);
    let families: [(&str, f64, fn(f64) -> f64); 4] = [
        ("t^0.5", 0.5, |t| t.sqrt()),
        ("t^1.5", 1.5, |t| t.powf(1.5)),
        ("t log t", 1.0, |t| t * t.ln()),
        ("t^2/log t", 2.0, |t| t * t / t.ln()),
    ];
    for (name, alpha, f) in families {
        let up: Vec<f64> = grid.iter().map(|&r| f(r) * r.powf(-alpha + eps)).collect();
        let down: Vec<f64> = grid.iter().map(|&r| f(r) * r.powf(-alpha - eps)).collect();
        let n = grid.len();
        assert!(up[n - 1] > 1e3 * up[0] && up[n / 2..].windows(2).all(|w| w[1] > w[0]), "{name}");
        assert!(down[n - 1] < 1e-3 * down[0] && down[n / 2..].windows(2).all(|w| w[1] < w[0]), "{name}");
    }
}

#[test]
fn primitive_ratio_tends_to_index() {
    // σ = δ₁ + αt^(α−1)dt on (1,∞), so σ([1,t)) = t^α
    for (alpha, gamma) in [(1.5, -0.5), (0.5, 1.0), (2.0, -1.5)] {
        let x: f64 = 1e8;
        let num = 1.0
            + integrate(&IntegrandSpec::real(move |t: f64| alpha * t.powf(gamma + alpha - 1.0), 1.0, x), 1e-12)
                .unwrap()
                .value
                .re;
        let den = integrate(&IntegrandSpec::real(move |t: f64| t.powf(gamma - 1.0 + alpha), 1.0, x), 1e-12)
            .unwrap()
            .value
            .re;
        assert!((num / den - alpha).abs() < 1e-3 * alpha, "α {alpha}, γ {gamma}: {}", num / den);
    }
}

fn atoms_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..10.0, 0.1f64..3.0), 1..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stieltjes_is_monotone_in_the_distribution(base in atoms_strategy(), extra in atoms_strategy(), shift in 0.0f64..1.0) {
        let nu1 = Measure::from_atoms(base.clone()).unwrap();
        // adding atoms and moving mass towards 0 both raise ν([0,t)) pointwise
        let mut bigger: Vec<(f64, f64)> = base.iter().map(|&(p, m)| ((p - shift).max(0.0), m)).collect();
        bigger.extend(extra);
        let nu2 = Measure::from_atoms(bigger).unwrap();
        for x in [0.1, 1.0, 7.0, 100.0] {
            prop_assert!(stieltjes(&nu1, x).unwrap() <= stieltjes(&nu2, x).unwrap() + 1e-12);
        }
    }

    #[test]
    fn rv_verdict_invariant_under_scaling(c in 0.01f64..100.0, alpha in 0.2f64..3.0) {
        let f = move |t: f64| t.powf(alpha) * (2.0 + (1.0 / t).sin());
        let g = move |t: f64| c * f(t);
        let grid = geometric_grid(10.0, 4.0, 10);
        let a = rv_index(&f, &[2.0, 3.0], &grid).unwrap();
        let b = rv_index(&g, &[2.0, 3.0], &grid).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.verdict, RvVerdict::RegularlyVarying);
        prop_assert!((a.index.unwrap() - b.index.unwrap()).abs() < 1e-9);
    }
}

#[test]
fn comparison_of_weighted_transforms() {
    let h = |t: f64| 1.0 / (1.0 + t);
    let leb = half_line(1.0, 0.0);
    let scaled = half_line(3.0, 0.0);
    let grid = geometric_grid(10.0, 10.0, 10);
    for &x in &grid {
        let r = weighted_stieltjes(&scaled, &h, -1.0, x).unwrap() / weighted_stieltjes(&leb, &h, -1.0, x).unwrap();
        assert!((r - 3.0).abs() < 1e-10);
    }
    // ν₁([0,t)) = t + √t against ν₂([0,t)) = t
    let nu1 = leb.clone().with_piece(Interval::positive(), Density::Power { coeff: 0.5, exponent: -0.5 }).unwrap();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, weighted_stieltjes(&nu1, &h, -1.0, x).unwrap() / weighted_stieltjes(&leb, &h, -1.0, x).unwrap()))
        .collect();
    let est = extrapolate_real(&samples, &ExtrapolationOptions::default()).unwrap();
    assert!(est.is_converged());
    assert!((est.real() - 1.0).abs() < 0.02, "{}", est.real());
}
