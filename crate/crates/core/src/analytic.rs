//! Exact expected cost per search and its optimizer.
//!
//! For a cleanup at pile size `m` the cost splits as
//!
//! ```text
//! F = F_L + F_P + F_C
//! F_L = E[1/l] sum_{j=0}^{m-1} s_L(j)
//! F_P = sum_{j=1}^{m-1} E[tau_j/l] s_P(j)
//! F_C = C_m E[1/l]
//! ```
//!
//! where `s_L(j)` and `s_P(j)` are the list and pile search costs while the
//! pile holds `j` objects.

use crate::cost_model::{b, b_fail, cleanup, list_cost, pile_cost, Memory, Model, Shelves};
use crate::error::{ensure, Result};
use crate::occupancy::{self, recip_len_pair, OccupancyMoments, PrecisionConfig};
use crate::par::try_map_range;

/// The three cost components and their total for one `(n, m, model)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub n: usize,
    pub m: usize,
    pub model: Model,
    pub f_list: f64,
    pub f_pile: f64,
    pub f_cleanup: f64,
    pub f_total: f64,
    /// Occupancy cross-check disagreements propagated through the costs.
    pub est_error: f64,
}

impl CostBreakdown {
    /// Builds the breakdown from precomputed moments.
    pub fn from_moments(model: Model, mom: &OccupancyMoments) -> Self {
        let (n, m) = (mom.n, mom.m);
        let list_sum: f64 = (0..m).map(|j| list_cost(model, n, j)).sum();
        let cm = cleanup(model, n, m);
        let f_list = mom.recip_len * list_sum;
        let f_cleanup = mom.recip_len * cm;
        let f_pile: f64 = (1..m).map(|j| mom.tau(j) * pile_cost(model, n, j)).sum();
        let tags = &mom.method_tags;
        let est_error = tags.recip_len.est_error * (list_sum + cm)
            + (1..m).map(|j| tags.tau_recip[j - 1].est_error * pile_cost(model, n, j)).sum::<f64>();
        CostBreakdown {
            n,
            m,
            model,
            f_list,
            f_pile,
            f_cleanup,
            f_total: f_list + f_pile + f_cleanup,
            est_error,
        }
    }

    /// Search cost alone, `F_L + F_P`.
    pub fn f_search(&self) -> f64 {
        self.f_list + self.f_pile
    }
}

/// `F_L(m; n)`.
pub fn f_list(n: usize, m: usize, model: Model, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(f_total(n, m, model, cfg)?.f_list)
}

/// `F_P(m; n)`, including the failed list search of the memoryless models.
pub fn f_pile(n: usize, m: usize, model: Model, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(f_total(n, m, model, cfg)?.f_pile)
}

/// `F_C(m; n) = C_m E[1/l]`.
pub fn f_cleanup(n: usize, m: usize, model: Model, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(f_total(n, m, model, cfg)?.f_cleanup)
}

/// Full breakdown with cross-checked occupancy moments.
pub fn f_total(n: usize, m: usize, model: Model, cfg: &PrecisionConfig) -> Result<CostBreakdown> {
    ensure!(m >= 1 && m <= n, "cost needs 1 <= m <= n (m {m}, n {n})");
    let mom = occupancy::moments(n, m, cfg)?;
    Ok(CostBreakdown::from_moments(model, &mom))
}

/// Hand-derived closed forms for `m = 1` and `m = 2`.
pub fn f_small_closed_form(n: usize, m: usize, model: Model) -> Result<f64> {
    ensure!(m == 1 || m == 2, "closed forms exist for m = 1, 2 only, got m = {m}");
    ensure!(n >= 2, "closed forms need n >= 2, got {n}");
    if m == 1 {
        return Ok(match model.shelves {
            Shelves::Unnumbered => b(n) + b_fail(n - 1),
            Shelves::Numbered => 2.0 * b(n),
        });
    }
    let e = recip_len_pair(n)?;
    let bf = b_fail;
    Ok(match (model.memory, model.shelves) {
        (Memory::None, Shelves::Unnumbered) => {
            bf(n - 1) + 1.0 + e * (b(n) + b(n - 1) - bf(n - 1) + bf(n - 2) - 2.0)
        }
        (Memory::None, Shelves::Numbered) => bf(n) + 1.0 + e * (4.0 * b(n) - 2.0 * bf(n) - 2.0),
        (Memory::Complete, Shelves::Unnumbered) => {
            1.0 + e * (b(n) + b(n - 1) + bf(n - 1) + bf(n - 2) - 2.0)
        }
        (Memory::Complete, Shelves::Numbered) => 1.0 + e * (4.0 * b(n) - 2.0),
    })
}

/// `F(m) = m E[1/l] s*(m) + sum_j E[tau_j/l] s_P(j)`, the same total written
/// through the per-object list-plus-cleanup cost.
pub fn f_total_via_star(model: Model, mom: &OccupancyMoments) -> f64 {
    let (n, m) = (mom.n, mom.m);
    let star = ((0..m).map(|j| list_cost(model, n, j)).sum::<f64>() + cleanup(model, n, m)) / m as f64;
    m as f64 * mom.recip_len * star + (1..m).map(|j| mom.tau(j) * pile_cost(model, n, j)).sum::<f64>()
}

/// The cost curve for `m = 1..=n` and its smallest minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    pub n: usize,
    pub model: Model,
    pub m_opt: usize,
    pub f_at_opt: f64,
    /// `curve[m - 1]` is the breakdown at pile size `m`.
    pub curve: Vec<CostBreakdown>,
    /// Another `m` is within the combined error estimate of the minimum.
    pub tie_broken: bool,
}

impl OptimumReport {
    pub fn from_curve(curve: Vec<CostBreakdown>) -> Self {
        let first = curve.first().expect("curve has at least one point");
        let (n, model) = (first.n, first.model);
        let mut best = 0;
        for (i, c) in curve.iter().enumerate() {
            if c.f_total < curve[best].f_total {
                best = i;
            }
        }
        let opt = curve[best];
        let tie_broken = curve.iter().enumerate().any(|(i, c)| {
            let slack = (c.est_error + opt.est_error).max(1e-12 * opt.f_total);
            i != best && (c.f_total - opt.f_total).abs() <= slack
        });
        OptimumReport { n, model, m_opt: best + 1, f_at_opt: opt.f_total, curve, tie_broken }
    }
}

/// Cross-checked moments for every `m = 1..=n`, computed in parallel.
pub fn moments_curve(n: usize, cfg: &PrecisionConfig) -> Result<Vec<OccupancyMoments>> {
    ensure!(n >= 1, "n must be positive");
    try_map_range(1..n + 1, |m| occupancy::moments(n, m, cfg))
}

/// `F(m; n)` for every `m = 1..=n`.
pub fn curve(n: usize, model: Model, cfg: &PrecisionConfig) -> Result<Vec<CostBreakdown>> {
    Ok(moments_curve(n, cfg)?.iter().map(|mom| CostBreakdown::from_moments(model, mom)).collect())
}

/// Scans every `m` (no unimodality assumption) and returns the smallest
/// minimizer.
pub fn m_opt(n: usize, model: Model, cfg: &PrecisionConfig) -> Result<OptimumReport> {
    Ok(OptimumReport::from_curve(curve(n, model, cfg)?))
}

/// Optima for all four models from one shared set of moments.
pub fn m_opt_all_models(n: usize, cfg: &PrecisionConfig) -> Result<[OptimumReport; 4]> {
    let moms = moments_curve(n, cfg)?;
    Ok(Model::ALL.map(|model| {
        OptimumReport::from_curve(moms.iter().map(|mom| CostBreakdown::from_moments(model, mom)).collect())
    }))
}

/// `F(2) < F(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstStepWitness {
    pub n: usize,
    pub model: Model,
    pub f1: f64,
    pub f2: f64,
    pub holds: bool,
}

pub fn verify_first_step(n: usize, model: Model, cfg: &PrecisionConfig) -> Result<FirstStepWitness> {
    ensure!(n >= 2, "first step needs n >= 2, got {n}");
    let f1 = f_total(n, 1, model, cfg)?.f_total;
    let f2 = f_total(n, 2, model, cfg)?.f_total;
    Ok(FirstStepWitness { n, model, f1, f2, holds: f2 < f1 })
}

/// `F(m) < F(1)` over a range where it is guaranteed.
///
/// The guarantee comes from `s_P(m - 1) < s*(m)`. With complete memory this
/// reduces to `1 < m < 4b(n)` (numbered) or is implied by `1 < m < 4b(n - m)`
/// (unnumbered); the memoryless pile search also pays a failed list search, so
/// there the condition is checked directly.
#[derive(Debug, Clone, PartialEq)]
pub struct F1Witness {
    pub n: usize,
    pub model: Model,
    pub f1: f64,
    /// `(m, F(m))` for every `m` in range.
    pub checked: Vec<(usize, f64)>,
    pub holds: bool,
}

/// The simplified range `1 < m < 4b(n)` (numbered) or `1 < m < 4b(n - m)`
/// (unnumbered), irrespective of memory.
pub fn f1_simplified_range(n: usize, model: Model) -> Vec<usize> {
    (2..n + 1)
        .filter(|&m| match model.shelves {
            Shelves::Numbered => (m as f64) < 4.0 * b(n),
            Shelves::Unnumbered => m < n && (m as f64) < 4.0 * b(n - m),
        })
        .collect()
}

/// Pile sizes for which `F(m) < F(1)` is guaranteed under `model`.
pub fn f1_comparison_range(n: usize, model: Model) -> Vec<usize> {
    match model.memory {
        Memory::Complete => f1_simplified_range(n, model),
        Memory::None => (2..n + 1)
            .filter(|&m| {
                let star = ((0..m).map(|j| list_cost(model, n, j)).sum::<f64>() + cleanup(model, n, m)) / m as f64;
                pile_cost(model, n, m - 1) < star
            })
            .collect(),
    }
}

/// `F(m) < F(1)` over an arbitrary set of pile sizes.
pub fn compare_with_f1(n: usize, model: Model, ms: &[usize], cfg: &PrecisionConfig) -> Result<F1Witness> {
    ensure!(n >= 2, "comparison needs n >= 2, got {n}");
    let f1 = f_total(n, 1, model, cfg)?.f_total;
    let mut checked = Vec::new();
    for &m in ms {
        checked.push((m, f_total(n, m, model, cfg)?.f_total));
    }
    let holds = checked.iter().all(|&(_, f)| f < f1);
    Ok(F1Witness { n, model, f1, checked, holds })
}

pub fn verify_f1_comparison(n: usize, model: Model, cfg: &PrecisionConfig) -> Result<F1Witness> {
    compare_with_f1(n, model, &f1_comparison_range(n, model), cfg)
}

/// `m_opt(n) < 4b(n)` for model 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBoundWitness {
    pub n: usize,
    pub m_opt: usize,
    pub bound: f64,
    pub holds: bool,
}

pub fn verify_upper_bound(n: usize, cfg: &PrecisionConfig) -> Result<UpperBoundWitness> {
    ensure!(n >= 1, "n must be positive");
    let m_opt = m_opt(n, Model::M4, cfg)?.m_opt;
    let bound = 4.0 * b(n);
    Ok(UpperBoundWitness { n, m_opt, bound, holds: (m_opt as f64) < bound })
}

/// One numerically observed property that is expected but not proved.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Probe {
    fn new(name: impl Into<String>, failures: Vec<String>, checked: usize) -> Self {
        let holds = failures.is_empty();
        let detail = if holds {
            format!("{checked} cases")
        } else {
            let shown: Vec<_> = failures.iter().take(5).cloned().collect();
            format!("{} of {checked} cases fail, e.g. {}", failures.len(), shown.join("; "))
        };
        Probe { name: name.into(), holds, detail }
    }
}

/// Numerical probes of the expected-but-unproved properties of `F` and the
/// occupancy moments, for `n` in `ns`.
pub fn probe_conjectures(ns: std::ops::RangeInclusive<usize>, cfg: &PrecisionConfig) -> Result<Vec<Probe>> {
    let ns: Vec<usize> = ns.filter(|&n| n >= 1).collect();
    let moms: Vec<Vec<OccupancyMoments>> = ns.iter().map(|&n| moments_curve(n, cfg)).collect::<Result<_>>()?;
    let opts: Vec<[OptimumReport; 4]> = moms
        .iter()
        .map(|ms| {
            Model::ALL
                .map(|model| OptimumReport::from_curve(ms.iter().map(|mom| CostBreakdown::from_moments(model, mom)).collect()))
        })
        .collect();

    let mut probes = Vec::new();

    let mut fails = Vec::new();
    for (n, o) in ns.iter().zip(&opts) {
        let [m1, m2, m3, m4] = [o[0].m_opt, o[1].m_opt, o[2].m_opt, o[3].m_opt];
        if !(m1 <= m2 && m2 <= m4 && m4 <= m3) {
            fails.push(format!("n={n}: {m1},{m2},{m4},{m3}"));
        }
    }
    probes.push(Probe::new("model ordering m_opt(m1) <= m_opt(m2) <= m_opt(m4) <= m_opt(m3)", fails, ns.len()));

    // Memory raises the optimum, numbered shelves lower it.
    let mut fails = Vec::new();
    for (n, o) in ns.iter().zip(&opts) {
        let [m1, m2, m3, m4] = [o[0].m_opt, o[1].m_opt, o[2].m_opt, o[3].m_opt];
        if !(m2 <= m1 && m1 <= m3 && m2 <= m4 && m4 <= m3) {
            fails.push(format!("n={n}: {m1},{m2},{m4},{m3}"));
        }
    }
    probes.push(Probe::new(
        "partial order m_opt(m2) <= m_opt(m1), m_opt(m4) <= m_opt(m3)",
        fails,
        ns.len(),
    ));

    let mut fails = Vec::new();
    let mut count = 0;
    for (n, o) in ns.iter().zip(&opts) {
        if *n > 8 {
            continue;
        }
        count += 1;
        let f_full = o[3].curve[n - 1].f_total;
        let never = (*n as f64 + 1.0) / 2.0;
        let expect_never = *n <= 6;
        if (f_full >= never) != expect_never {
            fails.push(format!("n={n}: F(n;n)={f_full:.6}, (n+1)/2={never}"));
        }
    }
    probes.push(Probe::new("m4 never-cleanup: F(n;n) >= (n+1)/2 iff n <= 6", fails, count));

    for (idx, label) in [(2usize, "m3"), (3, "m4")] {
        let mut fails = Vec::new();
        let mut count = 0;
        for (n, o) in ns.iter().zip(&opts) {
            if *n <= 8 {
                count += 1;
                if o[idx].m_opt != *n {
                    fails.push(format!("n={n}: m_opt={}", o[idx].m_opt));
                }
            }
        }
        probes.push(Probe::new(format!("{label}: m_opt(n) = n for n <= 8"), fails, count));
    }

    // Occupancy moment probes.
    let mut cheb = Vec::new();
    let mut strong = Vec::new();
    let mut m_dec = Vec::new();
    let mut faster = Vec::new();
    let mut ratio = Vec::new();
    let mut tau_shift = Vec::new();
    let (mut c1, mut c2, mut c3) = (0, 0, 0);
    for (n, ms) in ns.iter().zip(&moms) {
        let n = *n;
        for m in 2..=n {
            let cur = &ms[m - 1];
            let prev = &ms[m - 2];
            c1 += 1;
            if cur.recip_len >= 1.0 / prev.expected_len {
                cheb.push(format!("n={n} m={m}"));
            }
            if cur.recip_len > (m as f64 - 1.0) / m as f64 / prev.expected_len {
                strong.push(format!("n={n} m={m}"));
            }
        }
        for m in 1..n {
            let (cur, next) = (&ms[m - 1], &ms[m]);
            c2 += 1;
            let (mf, mf1) = (m as f64, m as f64 + 1.0);
            let lhs = mf * cur.recip_len - mf1 * next.recip_len;
            if lhs <= 0.0 {
                m_dec.push(format!("n={n} m={m}"));
            }
            if lhs > mf / cur.expected_len - mf1 / next.expected_len {
                faster.push(format!("n={n} m={m}"));
            }
            if next.expected_len / cur.expected_len < cur.recip_len / next.recip_len {
                ratio.push(format!("n={n} m={m}"));
            }
        }
        if n >= 4 {
            for m in 2..n {
                for j in 1..m {
                    c3 += 1;
                    if ms[m - 1].tau(j) > ms[m].tau(j + 1) {
                        tau_shift.push(format!("n={n} m={m} j={j}"));
                    }
                }
            }
        }
    }
    probes.push(Probe::new("E_m[1/l] < 1/E_{m-1}[l] for all 1 < m <= n", cheb, c1));
    probes.push(Probe::new("E_m[1/l] <= ((m-1)/m)/E_{m-1}[l]", strong, c1));
    probes.push(Probe::new("m E_m[1/l] strictly decreasing in m", m_dec, c2));
    probes.push(Probe::new(
        "m E_m[1/l] - (m+1) E_{m+1}[1/l] <= m/E_m[l] - (m+1)/E_{m+1}[l]",
        faster,
        c2,
    ));
    probes.push(Probe::new("E_{m+1}[l]/E_m[l] >= E_m[1/l]/E_{m+1}[1/l]", ratio, c2));
    probes.push(Probe::new("E_m[tau_j/l] <= E_{m+1}[tau_{j+1}/l] (n >= 4, m < n)", tau_shift, c3));

    for (idx, model) in Model::ALL.iter().enumerate() {
        let mut fl = Vec::new();
        let mut fp = Vec::new();
        let mut count = 0;
        for (n, o) in ns.iter().zip(&opts) {
            let c = &o[idx].curve;
            for m in 1..*n {
                count += 1;
                if c[m].f_list >= c[m - 1].f_list || c[m].f_cleanup >= c[m - 1].f_cleanup {
                    fl.push(format!("n={n} m={m}"));
                }
                if c[m].f_pile <= c[m - 1].f_pile {
                    fp.push(format!("n={n} m={m}"));
                }
            }
        }
        probes.push(Probe::new(format!("{model}: F_L and F_C strictly decreasing in m"), fl, count));
        probes.push(Probe::new(format!("{model}: F_P strictly increasing in m"), fp, count));
    }

    // Memory models: F_P(m+1) > ((m+1)/m) F_P(m) for m >= 2.
    for idx in [2usize, 3] {
        let mut fails = Vec::new();
        let mut count = 0;
        for (n, o) in ns.iter().zip(&opts) {
            if *n < 4 {
                continue;
            }
            let c = &o[idx].curve;
            for m in 2..n - 1 {
                count += 1;
                if c[m].f_pile <= (m as f64 + 1.0) / m as f64 * c[m - 1].f_pile {
                    fails.push(format!("n={n} m={m}"));
                }
            }
        }
        probes.push(Probe::new(
            format!("{}: F_P(m+1) > ((m+1)/m) F_P(m) (n >= 4)", Model::ALL[idx]),
            fails,
            count,
        ));
    }

    // Unimodality of F for model 4.
    let mut fails = Vec::new();
    for (n, o) in ns.iter().zip(&opts) {
        let c = &o[3].curve;
        let k = o[3].m_opt - 1;
        let down = c[..=k].windows(2).all(|w| w[1].f_total < w[0].f_total);
        let up = c[k..].windows(2).all(|w| w[1].f_total > w[0].f_total);
        if !(down && up) {
            fails.push(format!("n={n}"));
        }
    }
    probes.push(Probe::new("m4: F unimodal in m", fails, ns.len()));

    Ok(probes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn unit_pile() {
        for model in Model::ALL {
            let c = f_total(20, 1, model, &cfg()).unwrap();
            assert_eq!(c.f_pile, 0.0);
            assert_relative_eq!(c.f_list, b(20), max_relative = 1e-14);
        }
        assert_relative_eq!(f_total(20, 1, Model::M4, &cfg()).unwrap().f_total, 7.223_866_587_84, epsilon = 1e-10);
        assert_relative_eq!(f_cleanup(9, 1, Model::M1, &cfg()).unwrap(), b_fail(8), max_relative = 1e-14);
    }

    #[test]
    fn pair_of_two() {
        let e2 = 2.0 * LN_2 - 1.0;
        let expect = 1.0 + e2 * (4.0 * b(2) - 2.0);
        assert_relative_eq!(f_total(2, 2, Model::M4, &cfg()).unwrap().f_total, expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 2.355_806_29, epsilon = 1e-8);
        let e = recip_len_pair(20).unwrap();
        assert_relative_eq!(f_pile(20, 2, Model::M4, &cfg()).unwrap(), 1.0 - 2.0 * e, max_relative = 1e-10);
        assert_relative_eq!(f_list(20, 2, Model::M4, &cfg()).unwrap(), 2.0 * e * b(20), max_relative = 1e-10);
    }

    #[test]
    fn breakdown_identities() {
        for model in Model::ALL {
            for m in 1..=12 {
                let c = f_total(12, m, model, &cfg()).unwrap();
                assert_relative_eq!(c.f_total, c.f_list + c.f_pile + c.f_cleanup, max_relative = 1e-12);
                if model.is_numbered() {
                    assert_relative_eq!(c.f_cleanup, c.f_list, max_relative = 1e-12);
                } else if 12 - m >= 3 {
                    // Termwise b_f(k) > b(k + 1) for k >= 3.
                    assert!(c.f_cleanup > c.f_list);
                }
            }
        }
    }

    #[test]
    fn small_forms_match() {
        for model in Model::ALL {
            for n in 2..25 {
                for m in 1..=2 {
                    assert_relative_eq!(
                        f_small_closed_form(n, m, model).unwrap(),
                        f_total(n, m, model, &cfg()).unwrap().f_total,
                        max_relative = 1e-10
                    );
                }
            }
        }
        assert!(f_small_closed_form(10, 3, Model::M4).is_err());
    }

    #[test]
    fn optimum_small_cases() {
        assert_eq!(m_opt(1, Model::M4, &cfg()).unwrap().m_opt, 1);
        assert_eq!(m_opt(10, Model::M4, &cfg()).unwrap().m_opt, 8);
        let r = m_opt(24, Model::M4, &cfg()).unwrap();
        assert_eq!(r.m_opt, 12);
        assert_eq!(r.curve.len(), 24);
        assert!(!r.tie_broken);
    }

    #[test]
    fn witnesses() {
        for model in Model::ALL {
            assert!(verify_first_step(7, model, &cfg()).unwrap().holds);
            let w = verify_f1_comparison(30, model, &cfg()).unwrap();
            assert!(w.holds && !w.checked.is_empty());
        }
        // The simplified range is too generous without memory.
        let literal = compare_with_f1(30, Model::M2, &f1_simplified_range(30, Model::M2), &cfg()).unwrap();
        assert!(!literal.holds);
        let u = verify_upper_bound(20, &cfg()).unwrap();
        assert!(u.holds);
        assert!(verify_f1_comparison(2, Model::M1, &cfg()).unwrap().checked.is_empty());
    }
}
