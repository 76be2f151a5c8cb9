use std::io::Write;

use shelfsearch::analytic;
use shelfsearch::montecarlo::{self, chunk_rng, simulate_path, Distribution, DistributionKind, Quantity};
use shelfsearch::occupancy;
use shelfsearch::{Model, PrecisionConfig};

#[test]
fn single_object_pile_is_degenerate() {
    for n in [1, 5, 20] {
        let u = Distribution::uniform(n).unwrap();
        let e = montecarlo::estimate_f(n, 1, Model::M4, &u, 100, 1).unwrap();
        let two_b = 2.0 * shelfsearch::cost_model::binary_success_cost(n).unwrap();
        assert_eq!(e.mean, two_b);
        assert_eq!(e.std_err, 0.0);
        let occ = montecarlo::estimate_occupancy(n, 1, &u, 100, 1).unwrap();
        assert_eq!(occ.recip_len.mean, 1.0);
    }
    let e = montecarlo::estimate_f(20, 1, Model::M4, &Distribution::uniform(20).unwrap(), 100, 1).unwrap();
    assert!((e.mean - 7.22386658784).abs() < 5e-12);
}

#[test]
fn every_path_is_consistent() {
    let mut rng = chunk_rng(3, 12, 7, 0);
    for dist in [
        Distribution::uniform(12).unwrap(),
        Distribution::zipf(12, 1.0).unwrap(),
        Distribution::skewed(12, 4, 0.3).unwrap(),
    ] {
        for model in Model::ALL {
            for m in [1, 2, 7, 12] {
                for _ in 0..2000 {
                    let p = simulate_path(12, m, &dist, model, &mut rng).unwrap();
                    assert!(p.is_consistent(), "{p:?}");
                    assert_eq!(p.tau.iter().sum::<usize>(), p.len - m);
                    assert_eq!(p.t_mark.len(), m);
                }
            }
        }
    }
}

#[test]
fn geometric_repeat_law() {
    // P(tau_j >= k) = (j/n)^k for uniform draws.
    const PATHS: usize = 400_000;
    let (n, m) = (10, 8);
    let u = Distribution::uniform(n).unwrap();
    let mut rng = chunk_rng(17, n, m, 0);
    let mut at_least = vec![[0usize; 5]; m];
    for _ in 0..PATHS {
        let p = simulate_path(n, m, &u, Model::M4, &mut rng).unwrap();
        for (j, &t) in p.tau.iter().enumerate() {
            for k in 1..5 {
                at_least[j + 1][k] += (t >= k) as usize;
            }
        }
    }
    for j in [1, 3, 5, 7] {
        for k in 1..5 {
            let p = (j as f64 / n as f64).powi(k as i32);
            let se = (p * (1.0 - p) / PATHS as f64).sqrt();
            let hat = at_least[j][k] as f64 / PATHS as f64;
            assert!((hat - p).abs() <= 4.0 * se, "j={j} k={k}: {hat} vs {p}");
        }
    }
}

#[test]
fn occupancy_estimates_match_analytic() {
    let cfg = PrecisionConfig::default();
    let u2 = Distribution::uniform(2).unwrap();
    let occ = montecarlo::estimate_occupancy(2, 2, &u2, 1_000_000, 5).unwrap();
    assert!(occ.recip_len.within(2.0 * std::f64::consts::LN_2 - 1.0, 4.0));
    assert!(occ.expected_len.within(3.0, 4.0));

    let u20 = Distribution::uniform(20).unwrap();
    let occ = montecarlo::estimate_occupancy(20, 10, &u20, 1_000_000, 5).unwrap();
    let tau5 = occupancy::tau_recip_len(20, 10, 5, &cfg).unwrap();
    assert!(occ.tau_recip[4].within(tau5, 4.0));
    assert_eq!(occ.tau_recip[4].quantity, Quantity::TauRecip(5));
    let mom = occupancy::moments(20, 10, &cfg).unwrap();
    assert!(occ.recip_len.within(mom.recip_len, 4.0));
}

#[test]
fn cost_estimates_match_analytic() {
    let cfg = PrecisionConfig::default();
    for model in Model::ALL {
        for (n, m) in [(6, 3), (12, 12), (15, 4)] {
            let u = Distribution::uniform(n).unwrap();
            let all = montecarlo::estimate_all(n, m, model, &u, 400_000, 23).unwrap();
            let f = analytic::f_total(n, m, model, &cfg).unwrap().f_total;
            assert!(all.f.within(f, 4.0), "{model} n={n} m={m}: {} vs {f}", all.f.mean);
        }
    }
}

#[test]
fn reproducible_and_seed_sensitive() {
    let u = Distribution::uniform(20).unwrap();
    let a = montecarlo::estimate_f(20, 10, Model::M4, &u, 50_000, 9).unwrap();
    let b = montecarlo::estimate_f(20, 10, Model::M4, &u, 50_000, 9).unwrap();
    let c = montecarlo::estimate_f(20, 10, Model::M4, &u, 50_000, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
    assert_eq!(a.trials, 50_000);
    assert_eq!(a.seed, 9);
    let (lo, hi) = a.interval(2.0);
    assert!(lo < a.mean && a.mean < hi);
}

#[test]
fn worker_count_does_not_matter() {
    let u = Distribution::uniform(15).unwrap();
    let runs: Vec<_> = [1, 2, 3, 7]
        .into_iter()
        .map(|w| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap();
            pool.install(|| montecarlo::estimate_all(15, 6, Model::M3, &u, 100_003, 4).unwrap())
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn empirical_optimum_uniform() {
    let u = Distribution::uniform(20).unwrap();
    let o = montecarlo::empirical_m_opt(20, Model::M4, &u, 1_000_000, 12, None).unwrap();
    assert!(o.m_opt == 10 || o.m_opt == 11, "{}", o.m_opt);
    assert_eq!(o.estimates.len(), 20);
}

#[test]
fn distributions() {
    let z = Distribution::zipf(5, 1.0).unwrap();
    let h: f64 = (1..=5).map(|i| 1.0 / i as f64).sum();
    assert!((z.weights()[1] - 0.5 / h).abs() < 1e-15);
    assert!((z.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let s = Distribution::skewed(5, 2, 0.2).unwrap();
    assert!((s.weights()[1] - 0.8).abs() < 1e-15);
    assert!((s.weights()[0] - 0.05).abs() < 1e-15);
    assert_eq!(s.kind(), &DistributionKind::Skewed { r: 2, eps: 0.2 });
    assert!(Distribution::skewed(5, 0, 0.2).is_err());
    assert!(Distribution::skewed(5, 6, 0.2).is_err());
    assert!(Distribution::skewed(5, 1, 0.0).is_err());
    assert!(Distribution::skewed(5, 1, 1.0).is_err());
    assert!(Distribution::zipf(5, 0.0).is_err());
    assert!(Distribution::custom(vec![1.0, -1.0]).is_err());

    assert_eq!(Distribution::parse("uniform", 4).unwrap(), Distribution::uniform(4).unwrap());
    assert_eq!(Distribution::parse("zipf:s=1.5", 4).unwrap(), Distribution::zipf(4, 1.5).unwrap());
    assert_eq!(Distribution::parse("skewed:r=3,eps=0.1", 4).unwrap(), Distribution::skewed(4, 3, 0.1).unwrap());
    for bad in ["", "zipf:q=1", "skewed:r=3", "skewed:r=x,eps=0.1", "gauss"] {
        assert!(Distribution::parse(bad, 4).is_err(), "{bad:?}");
    }

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "2\n1\n1").unwrap();
    let d = Distribution::parse(&format!("custom:{}", f.path().display()), 3).unwrap();
    assert!((d.weights()[0] - 0.5).abs() < 1e-15);
    assert!(Distribution::from_file(f.path(), 4).is_err());
}

#[test]
fn rejects_bad_runs() {
    let u = Distribution::uniform(5).unwrap();
    assert!(montecarlo::estimate_f(5, 3, Model::M4, &u, 99, 0).is_err());
    assert!(montecarlo::estimate_f(5, 6, Model::M4, &u, 1000, 0).is_err());
    assert!(montecarlo::estimate_f(6, 3, Model::M4, &u, 1000, 0).is_err());
}
