use approx::assert_relative_eq;
use shelfsearch::occupancy::{self, recip_len_series_all};
use shelfsearch::PrecisionConfig;

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

#[test]
fn chebyshev_bounds() {
    let c = cfg();
    for n in 2..=200 {
        let all = recip_len_series_all(n, &c).unwrap();
        let nf = n as f64;
        for m in 2..=n {
            let e = all[m - 1];
            let prev = 1.0 / occupancy::expected_len(n, m - 1).unwrap();
            if ((m * m) as f64) < 2.0 * nf {
                assert!(e < prev, "n={n} m={m}: {e} >= {prev}");
            }
            let bound = prev + ((m - 1) * (n - m)) as f64 / (2.0 * nf * nf);
            assert!(e <= bound, "n={n} m={m}: {e} > {bound}");
        }
    }
}

#[test]
fn increasing_in_n_towards_reciprocal() {
    let c = cfg();
    for m in 1..=8usize {
        let mut ns: Vec<usize> = (m..m + 40).collect();
        let mut x = (m + 40) as f64;
        while x < 5000.0 {
            ns.push(x as usize);
            x *= 1.3;
        }
        ns.push(5000);
        let values: Vec<f64> = ns.iter().map(|&n| occupancy::recip_len_series(n, m, &c).unwrap()).collect();
        let target = 1.0 / m as f64;
        for (w, n) in values.windows(2).zip(&ns) {
            if m == 1 {
                assert_eq!(w, [1.0, 1.0]);
            } else {
                assert!(w[0] < w[1], "m={m} n={n}: {} >= {}", w[0], w[1]);
            }
        }
        let last = *values.last().unwrap();
        assert!(last <= target);
        // Gap shrinks like m/n.
        assert!(target - last < m as f64 / 5000.0, "m={m}: gap {}", target - last);
    }
}

#[test]
fn repeat_moments_by_recursion() {
    let c = cfg();
    for n in 2..=30 {
        for m in 2..=n {
            for j in 1..m {
                let dp = occupancy::first_passage_dp(n, m, Some(j), 10_000_000).unwrap();
                let series = occupancy::tau_recip_len(n, m, j, &c).unwrap();
                let quad = occupancy::tau_recip_len_quadrature(n, m, j, &c).unwrap();
                assert_relative_eq!(dp.tau_recip.unwrap(), series, max_relative = 1e-9);
                assert_relative_eq!(quad, series, max_relative = 1e-9);
            }
        }
    }
}

#[test]
fn length_moments() {
    let c = cfg();
    for (n, m) in [(1, 1), (2, 2), (5, 3), (20, 10), (35, 35)] {
        let dp = occupancy::first_passage_dp(n, m, None, 10_000_000).unwrap();
        let mom = occupancy::moments(n, m, &c).unwrap();
        assert_relative_eq!(dp.expected_len, mom.expected_len, max_relative = 1e-10);
        // Variance of a sum of independent geometric waiting times.
        let var: f64 = (0..m).map(|j| (j * n) as f64 / ((n - j) * (n - j)) as f64).sum();
        assert_relative_eq!(mom.var_len, var, max_relative = 1e-12, epsilon = 1e-15);
    }
    assert_eq!(occupancy::expected_len(2, 2).unwrap(), 3.0);
    assert_relative_eq!(occupancy::tau_mean(10, 3).unwrap(), 3.0 / 7.0);
}

#[test]
fn moment_examples() {
    let c = cfg();
    for (n, m) in [(20, 10), (35, 13), (5, 5)] {
        let mom = occupancy::moments(n, m, &c).unwrap();
        assert!(mom.total_probability_residual().abs() <= 1e-10);
        let inv = 1.0 / mom.expected_len;
        assert!(inv <= mom.recip_len && mom.recip_len <= 1.0 / m as f64);
        if m < n {
            let nf = n as f64;
            assert!(1.0 / (nf * (nf.ln() - ((n - m) as f64).ln())) <= inv);
        }
        for j in 1..m {
            assert!(mom.tau(j) < j as f64 / (n - j) as f64 * mom.recip_len);
        }
        assert!(mom.est_error() < 1e-9);
    }
}

#[test]
fn closed_form_pair() {
    for n in 2..=50 {
        let nf = n as f64;
        let pair = occupancy::recip_len_pair(n).unwrap();
        assert_relative_eq!(pair, occupancy::recip_len_series(n, 2, &cfg()).unwrap(), max_relative = 1e-12);
        // 1/E[l] < E[1/l] < 1/2.
        assert!(pair < 0.5 && pair > 1.0 / (1.0 + nf / (nf - 1.0)));
    }
}

#[test]
fn stirling_identity() {
    assert!(occupancy::stirling_prob_identity_check(2, 2, 60).unwrap() < 1e-12);
    for n in 1..=6 {
        for m in 1..=n {
            assert!(occupancy::stirling_prob_identity_check(n, m, 400).unwrap() < 1e-12, "n={n} m={m}");
        }
    }
    assert_eq!(occupancy::stirling2(5, 2), 15u32.into());
    assert_eq!(occupancy::stirling2(10, 4), 34105u32.into());
    assert_eq!(occupancy::stirling2(3, 4), 0u32.into());
}

#[test]
fn domain_errors() {
    let c = cfg();
    assert!(occupancy::moments(3, 4, &c).is_err());
    assert!(occupancy::moments(3, 0, &c).is_err());
    assert!(occupancy::tau_recip_len(5, 3, 3, &c).is_err());
    assert!(occupancy::path_count(3, 2, 1).is_err());
    let bad = PrecisionConfig { tol: 0.0, ..c };
    assert!(occupancy::recip_len_series(5, 3, &bad).is_err());
    assert!(occupancy::first_passage_dp(50, 50, None, 10).is_err());
}
