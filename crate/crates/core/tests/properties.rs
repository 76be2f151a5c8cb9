use proptest::prelude::*;
use shelfsearch::analytic::{self, CostBreakdown};
use shelfsearch::approx;
use shelfsearch::cost_model::{binary_fail_cost, binary_success_cost, sequential_cost, star_cost};
use shelfsearch::montecarlo::{self, Distribution};
use shelfsearch::occupancy;
use shelfsearch::{Model, PrecisionConfig};

fn model() -> impl Strategy<Value = Model> {
    prop::sample::select(Model::ALL.to_vec())
}

/// `(n, m)` with `1 <= m <= n <= n_max`.
fn pile(n_max: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=n_max).prop_flat_map(|n| (Just(n), 1..=n))
}

proptest! {
    #[test]
    fn primitives_increase(j in 1usize..1_000_000) {
        let b0 = binary_success_cost(j).unwrap();
        prop_assert!(b0 < binary_success_cost(j + 1).unwrap());
        prop_assert!(binary_fail_cost(j).unwrap() < binary_fail_cost(j + 1).unwrap());
        prop_assert!(sequential_cost(j).unwrap() < sequential_cost(j + 1).unwrap());
        prop_assert!(binary_fail_cost(j).unwrap() >= b0);
    }

    #[test]
    fn numbered_star_cost_is_twice_b((n, m) in pile(500), numbered in prop::sample::select(vec![Model::M2, Model::M4])) {
        let two_b = 2.0 * binary_success_cost(n).unwrap();
        prop_assert!((star_cost(numbered, n, m).unwrap() - two_b).abs() <= 1e-12 * two_b);
    }

    #[test]
    fn moment_invariants((n, m) in pile(45)) {
        let mom = occupancy::moments(n, m, &PrecisionConfig::default()).unwrap();
        prop_assert!(mom.total_probability_residual().abs() <= 1e-9);
        let inv = 1.0 / mom.expected_len;
        let e = mom.recip_len;
        if m == 1 {
            prop_assert_eq!(e, 1.0);
        } else {
            prop_assert!(inv <= e && e <= 1.0 / m as f64);
            if m < n {
                let nf = n as f64;
                prop_assert!(1.0 / (nf * (nf.ln() - ((n - m) as f64).ln())) <= inv);
                prop_assert!(inv < e && e < 1.0 / m as f64);
            }
        }
        for j in 1..m {
            prop_assert!(mom.tau(j) < j as f64 / (n - j) as f64 * e);
        }
    }

    #[test]
    fn breakdown_invariants((n, m) in pile(45), model in model()) {
        let cfg = PrecisionConfig::default();
        let mom = occupancy::moments(n, m, &cfg).unwrap();
        let c = CostBreakdown::from_moments(model, &mom);
        prop_assert!((c.f_total - (c.f_list + c.f_pile + c.f_cleanup)).abs() <= 1e-12 * c.f_total);
        if model.is_numbered() {
            prop_assert!((c.f_cleanup - c.f_list).abs() <= 1e-12 * c.f_list);
        }
        if m == 1 {
            prop_assert_eq!(c.f_pile, 0.0);
        }
        let star = analytic::f_total_via_star(model, &mom);
        prop_assert!((star - c.f_total).abs() <= 1e-10 * c.f_total);
    }

    #[test]
    fn optimum_is_smallest_argmin(n in 1usize..30, model in model()) {
        let r = analytic::m_opt(n, model, &PrecisionConfig::default()).unwrap();
        let best = r.curve.iter().map(|c| c.f_total).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.f_at_opt, best);
        prop_assert!(r.curve[..r.m_opt - 1].iter().all(|c| c.f_total > best));
        prop_assert_eq!(r.curve.len(), n);
    }

    #[test]
    fn approximation_starts_at_exact(n in 1usize..200) {
        let cfg = PrecisionConfig::default();
        let f1 = analytic::f_total(n, 1, Model::M4, &cfg).unwrap().f_total;
        let two_b = 2.0 * binary_success_cost(n).unwrap();
        prop_assert!((approx::f_tilde(n, 1).unwrap() - two_b).abs() <= 1e-14 * two_b);
        prop_assert!((f1 - two_b).abs() <= 1e-14 * two_b);
    }

    #[test]
    fn approximate_optimum_in_bracket(n in 5usize..20_000) {
        let c = approx::m_opt_approx(n);
        prop_assert!(c.in_bracket());
        let best = c.values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(c.f_at_opt(), best);
        prop_assert!(c.values[..c.m_opt_approx - 1].iter().all(|&v| v > best));
    }

    #[test]
    fn criterion_sign_matches_difference((n, m) in (2usize..3000).prop_flat_map(|n| (Just(n), 1..n))) {
        let d = approx::delta_sign_criterion(n, m).unwrap();
        let diff = approx::f_tilde(n, m).unwrap() - approx::f_tilde(n, m + 1).unwrap();
        prop_assert_eq!(d > 0.0, diff > 0.0, "criterion {} difference {}", d, diff);
    }

    #[test]
    fn approximate_list_cost_is_lower((n, m) in pile(60)) {
        let cfg = PrecisionConfig::default();
        let (fl, _, _) = approx::f_tilde_parts(n, m).unwrap();
        let exact = analytic::f_list(n, m, Model::M4, &cfg).unwrap();
        prop_assert!(fl <= exact * (1.0 + 1e-12));
    }

    #[test]
    fn distributions_are_normalised(n in 2usize..200, s in 0.1f64..3.0, eps in 0.001f64..0.999, r_frac in 0.0f64..1.0) {
        let r = 1 + ((n - 1) as f64 * r_frac) as usize;
        for d in [Distribution::uniform(n).unwrap(), Distribution::zipf(n, s).unwrap(), Distribution::skewed(n, r, eps).unwrap()] {
            let w = d.weights();
            prop_assert_eq!(w.len(), n);
            prop_assert!(w.iter().all(|&x| x > 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulation_is_deterministic((n, m) in pile(12), model in model(), seed in any::<u64>(), trials in 100usize..9000) {
        let u = Distribution::uniform(n).unwrap();
        let a = montecarlo::estimate_all(n, m, model, &u, trials, seed).unwrap();
        let b = montecarlo::estimate_all(n, m, model, &u, trials, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.f.trials, trials);
        prop_assert!(a.f.std_err >= 0.0);
    }
}

#[test]
fn doubling_step_below_two() {
    for r in 0..=40u32 {
        let lo = (1usize << r) - 1;
        let hi = (1usize << (r + 1)) - 1;
        // An empty list costs nothing to search.
        let b = |j: usize| if j == 0 { 0.0 } else { binary_success_cost(j).unwrap() };
        assert!(b(hi) - b(lo) < 2.0, "r={r}");
    }
}
