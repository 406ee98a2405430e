use proptest::prelude::*;
use regcauchy::measures::{Density, Interval, Measure, WeightKind};
use regcauchy::numerics::{extrapolate_real, geometric_grid, ExtrapolationOptions};
use regcauchy::transforms::{
    cauchy_reg, cauchy_tilde, embed, kernel_scale, regularised_kernel, stieltjes, telescoped_kernel, CauchyPair,
    RealPolynomial,
};
use regcauchy::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn finite_measure() -> Measure {
    Measure::from_atoms([(-2.0, 1.0), (0.5, 0.5), (3.0, 2.0)])
        .unwrap()
        .with_piece(Interval::new(1.0, f64::INFINITY), Density::Power { coeff: 1.0, exponent: -1.5 })
        .unwrap()
}

fn power_pair(exponent: f64, excess: f64) -> CauchyPair {
    let mu = Measure::zero()
        .with_piece(Interval::whole_line(), Density::Power { coeff: 1.0, exponent })
        .unwrap();
    let kappa = mu.growth_indices().unwrap().kappa;
    CauchyPair::with_leading_excess(mu, kappa, excess, &RealPolynomial::zero()).unwrap()
}

fn converged_ratio(samples: &[(f64, f64)]) -> f64 {
    let est = extrapolate_real(samples, &ExtrapolationOptions::default()).unwrap();
    assert!(est.is_converged(), "{est:?}");
    est.real()
}

proptest! {
    #[test]
    fn telescoped_kernel_identity(t in -20.0f64..20.0, x in -5.0f64..5.0, y in 0.01f64..5.0, k in 0u32..=4) {
        let z = c(x, y);
        let d = (regularised_kernel(t, z, k) - telescoped_kernel(t, z, k)).norm();
        prop_assert!(d <= 1e-12 * kernel_scale(t, z, k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn nevanlinna_positivity(x in -5.0f64..5.0, y in 0.01f64..10.0, b in 0.0f64..2.0, c0 in -3.0f64..3.0) {
        let mu = finite_measure().with_piece(Interval::negative(), Density::Power { coeff: 0.7, exponent: 0.0 }).unwrap();
        let pair = CauchyPair::with_leading_excess(mu, 0, b, &RealPolynomial::new(vec![c0])).unwrap();
        prop_assert!(cauchy_reg(&pair, c(x, y)).unwrap().im >= -1e-12);
    }
}

#[test]
fn embedding_preserves_the_transform() {
    let pair = power_pair(0.5, 0.3);
    for k in 1..=2 {
        let lifted = embed(&pair, pair.kappa() + k).unwrap();
        for z in [c(0.3, 0.2), c(-2.0, 1.0), c(5.0, 3.0)] {
            let a = cauchy_reg(&pair, z).unwrap();
            let b = cauchy_reg(&lifted, z).unwrap();
            assert!((a - b).norm() <= 1e-8 * a.norm(), "{a} {b}");
        }
    }
}

#[test]
fn tilde_growth_and_mass() {
    let mu = finite_measure();
    let total = mu.total_mass().unwrap();
    let grid = geometric_grid(10.0, 4.0, 8);
    let mut prev = 0.0;
    let mut scaled = Vec::new();
    for &y in &grid {
        let v = cauchy_tilde(&mu, c(0.0, y)).unwrap();
        assert!(v.norm() / y < 0.5 / y.sqrt());
        let m = y * v.im;
        assert!(m > prev && m <= total * (1.0 + 1e-12));
        prev = m;
        scaled.push((y, m));
    }
    assert!((converged_ratio(&scaled) - total).abs() < 1e-3 * total);
}

#[test]
fn imaginary_part_follows_weighted_stieltjes() {
    for exponent in [0.5, 1.5, 2.5] {
        let pair = power_pair(exponent, 0.0);
        let kappa = pair.kappa();
        let tau = pair.measure().weighted_measure(WeightKind::TauKappa, kappa).unwrap();
        let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
        let samples: Vec<(f64, f64)> = geometric_grid(10.0, 4.0, 7)
            .into_iter()
            .map(|y: f64| {
                let im = cauchy_reg(&pair, c(0.0, y)).unwrap().im;
                (y, im / (sign * y.powi(2 * kappa as i32 + 1) * stieltjes(&tau, y * y).unwrap()))
            })
            .collect();
        let r = converged_ratio(&samples);
        assert!((r - 1.0).abs() < 0.02, "exponent {exponent}: {r}");
    }
}

#[test]
fn leading_excess_dominates() {
    let excess = 0.75;
    for exponent in [-0.5, 0.5, 2.0] {
        let pair = power_pair(exponent, excess);
        let kappa = pair.kappa() as i32;
        let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
        let samples: Vec<(f64, f64)> = geometric_grid(10.0, 4.0, 8)
            .into_iter()
            .map(|y: f64| {
                let q = cauchy_reg(&pair, c(0.0, y)).unwrap();
                let want = Complex64::i() * sign * excess * y.powi(2 * kappa + 1);
                (y, (q / want).re)
            })
            .collect();
        let r = converged_ratio(&samples);
        assert!((r - 1.0).abs() < 0.02, "exponent {exponent}: {r}");
    }
}
