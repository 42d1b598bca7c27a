use num_complex::Complex64 as C64;
use polya_core::domains::CompactSet;
use polya_core::indexcomb::{counts, enumerate};
use polya_core::linalg::det_by_expansion;
use polya_core::measures::{
    bernstein_markov_ratio, gram, min_relative_eigenvalue, z_s_gram, z_s_montecarlo, Measure, PairingMode, Precision,
};
use polya_core::vandermonde::{vandermonde_matrix, Basis};
use proptest::prelude::*;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Σ_{tuples} ∏ w · |V|²` over all `m`-tuples of atoms.
fn andreief_brute_force(atoms: &[Vec<C64>], weights: &[f64], m: usize) -> f64 {
    let n = atoms[0].len();
    let idx = enumerate(n, m);
    let basis = Basis::monomial(n);
    let a = atoms.len();
    let mut total = 0.0;
    for t in 0..a.pow(m as u32) {
        let tuple: Vec<usize> = (0..m).map(|q| (t / a.pow(q as u32)) % a).collect();
        let pts: Vec<Vec<C64>> = tuple.iter().map(|&j| atoms[j].clone()).collect();
        let v = det_by_expansion(&vandermonde_matrix(&pts, &idx, &basis));
        total += v.norm_sqr() * tuple.iter().map(|&j| weights[j]).product::<f64>();
    }
    total
}

#[test]
fn andreief_identity_for_discrete_measures() {
    let atoms = vec![vec![r(-0.5)], vec![r(0.25)], vec![C64::new(0.0, 0.75)], vec![r(1.0)]];
    let weights = vec![0.125, 0.5, 0.25, 1.0];
    let mu = Measure::discrete(atoms.clone(), weights.clone()).unwrap();
    let k = CompactSet::finite(atoms.clone()).unwrap();
    for s in 1..=2 {
        let m = counts(1, s).unwrap().m as usize;
        let want = andreief_brute_force(&atoms, &weights, m);
        let got = z_s_gram(&k, &mu, s, Precision::Float).unwrap().value().re;
        assert!((got - want).abs() <= 1e-12 * want, "s = {s}: {got} vs {want}");
    }

    let atoms2 = vec![vec![r(0.0), r(1.0)], vec![r(0.5), r(-0.25)], vec![r(1.0), r(0.5)], vec![r(-1.0), r(0.0)]];
    let mu2 = Measure::discrete(atoms2.clone(), weights.clone()).unwrap();
    let k2 = CompactSet::finite(atoms2.clone()).unwrap();
    let want = andreief_brute_force(&atoms2, &weights, 3);
    for p in [Precision::Float, Precision::Exact] {
        let got = z_s_gram(&k2, &mu2, 1, p).unwrap().value().re;
        assert!((got - want).abs() <= 1e-12 * want);
    }
}

#[test]
fn monte_carlo_agrees_with_gram() {
    let cases = [
        (CompactSet::unit_circle(), Measure::uniform_circle(r(0.0), 1.0).unwrap(), 2),
        (CompactSet::disk(r(0.0), 1.0).unwrap(), Measure::lebesgue_disk(r(0.0), 1.0).unwrap(), 1),
        (CompactSet::interval(0.0, 2.0).unwrap(), Measure::lebesgue_interval(0.0, 2.0).unwrap(), 2),
    ];
    for (k, mu, s) in cases {
        let exact = z_s_gram(&k, &mu, s, Precision::Float).unwrap().value().re;
        let mc = z_s_montecarlo(&k, &mu, s, 20_000, 5).unwrap();
        assert!((mc.estimate - exact).abs() <= 3.0 * mc.std_error, "{} vs {} ± {}", mc.estimate, exact, mc.std_error);
    }
}

#[test]
fn monte_carlo_is_seed_deterministic() {
    let k = CompactSet::interval(-1.0, 1.0).unwrap();
    let mu = Measure::arcsine(-1.0, 1.0).unwrap();
    let a = z_s_montecarlo(&k, &mu, 2, 5000, 9).unwrap();
    let b = z_s_montecarlo(&k, &mu, 2, 5000, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lebesgue_christoffel_function() {
    // Σ_j (2j+1) P_j(1)² = (s+1)² for the normalized Lebesgue measure on [-1, 1].
    let k = CompactSet::interval(-1.0, 1.0).unwrap();
    let mu = Measure::lebesgue_interval(-1.0, 1.0).unwrap();
    let grid = k.grid(1001);
    for s in [1u32, 5, 10] {
        let ratio = bernstein_markov_ratio(&k, &mu, s, &grid).unwrap();
        assert!((ratio - (s + 1) as f64).abs() < 1e-8);
    }
}

proptest! {
    #[test]
    fn discrete_gram_is_psd(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..2.0), 1..6)) {
        let atoms: Vec<Vec<C64>> = raw.iter().map(|&(a, b, _)| vec![C64::new(a, b)]).collect();
        let weights: Vec<f64> = raw.iter().map(|t| t.2).collect();
        let mu = Measure::discrete(atoms, weights).unwrap();
        let g = gram(&mu, &enumerate(1, 4), PairingMode::Hermitian).unwrap();
        prop_assert!(min_relative_eigenvalue(&g.matrix) >= -1e-10);
        if mu.rank_bound().unwrap() < 4 {
            prop_assert!(g.logdet.is_zero());
        }
    }

    #[test]
    fn moment_of_zero_is_mass(t in 0.1f64..10.0) {
        let mu = Measure::product(vec![Measure::arcsine(-1.0, 1.0).unwrap(), Measure::uniform_circle(r(0.0), 2.0).unwrap()])
            .unwrap()
            .with_mass_factor(t)
            .unwrap();
        let m0 = mu.moment(&enumerate(2, 1)[0]).unwrap();
        prop_assert!((m0 - r(t)).norm() < 1e-12 * t);
        prop_assert!((mu.total_mass() - t).abs() < 1e-12 * t);
    }
}
