use num_complex::Complex64 as C64;
use polya_core::functionals::{coeffs_from_contour, coeffs_from_measure, hankel_logdets, iterated_functional_oracle, Germ};
use polya_core::indexcomb::{enumerate, MultiIndex};
use polya_core::measures::{Measure, Precision};
use proptest::prelude::*;

fn factorial(i: usize) -> f64 {
    (1..=i).map(|j| j as f64).product()
}

#[test]
fn worked_oracle_value() {
    let mu = Measure::discrete(vec![vec![C64::new(0.0, 0.0)], vec![C64::new(1.0, 0.0)]], vec![0.5, 0.5]).unwrap();
    let h2 = hankel_logdets(&coeffs_from_measure(mu.clone()), 2, Precision::Exact).unwrap()[1].value().norm();
    assert_eq!(h2, 0.25);
    assert!((iterated_functional_oracle(&mu, 2).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn measure_coefficients_are_moments() {
    let mu = Measure::product(vec![Measure::arcsine(-1.0, 2.0).unwrap(), Measure::lebesgue_disk(C64::new(0.5, 0.5), 1.0).unwrap()]).unwrap();
    let a = coeffs_from_measure(mu.clone());
    for (j, k) in enumerate(2, 60).iter().enumerate().step_by(6) {
        assert_eq!(a.a(k).unwrap(), mu.moment(k).unwrap(), "index {j}");
    }
}

#[test]
fn contour_recovers_discrete_moments() {
    let atoms = vec![vec![C64::new(0.3, -0.1)], vec![C64::new(-0.6, 0.2)], vec![C64::new(0.0, 0.8)]];
    let weights = vec![0.5, 0.25, 0.25];
    let mu = Measure::discrete(atoms.clone(), weights.clone()).unwrap();
    let contour = coeffs_from_contour(Germ::Cauchy { atoms, weights }, 2.0, 64).unwrap();
    for k in 0..=12 {
        let k = MultiIndex::new(vec![k]);
        assert!((contour.a(&k).unwrap() - mu.moment(&k).unwrap()).norm() < 1e-10);
    }
}

proptest! {
    #[test]
    fn factorial_hankel_equals_iterated_sum(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.05f64..1.0), 1..=4),
        two_d in any::<bool>(),
        i in 1usize..=3,
    ) {
        let atoms: Vec<Vec<C64>> = raw
            .iter()
            .map(|&(a, b, _)| if two_d { vec![C64::new(a, 0.0), C64::new(b, 0.0)] } else { vec![C64::new(a, b)] })
            .collect();
        let weights: Vec<f64> = raw.iter().map(|t| t.2).collect();
        let mu = Measure::discrete(atoms, weights).unwrap();
        let oracle = iterated_functional_oracle(&mu, i).unwrap();
        let h = hankel_logdets(&coeffs_from_measure(mu), i, Precision::Float).unwrap()[i - 1];
        let lhs = factorial(i) * h.value().norm();
        prop_assert!((lhs - oracle).abs() <= 1e-10 * oracle.max(1e-300) || (lhs < 1e-13 && oracle < 1e-13),
            "{} vs {}", lhs, oracle);
    }
}
