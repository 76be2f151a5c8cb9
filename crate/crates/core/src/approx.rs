//! The approximate objective for numbered shelves with complete memory,
//! obtained by replacing `E[1/l]` with `1/E[l]` and `E[tau_j/l]` with
//! `E[tau_j]/E[l]`:
//!
//! ```text
//! F~(m; n) = (2 m b(n) + sum_{j=1}^{m-1} j (j + 1) / (2 (n - j))) / E_m[l]
//! ```

use crate::cost_model::{b, Model};
use crate::error::{ensure, Result};
use crate::par::map_range;

/// `F~(m)` for `m = 1..=n` together with its smallest minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCurve {
    pub n: usize,
    /// `values[m - 1] = F~(m; n)`.
    pub values: Vec<f64>,
    pub m_opt_approx: usize,
    /// `3 b(n) - 3/2`.
    pub bracket_low: f64,
    /// `3 b(n) + 1/2`.
    pub bracket_high: f64,
}

impl ApproxCurve {
    pub fn f_at_opt(&self) -> f64 {
        self.values[self.m_opt_approx - 1]
    }

    pub fn in_bracket(&self) -> bool {
        let m = self.m_opt_approx as f64;
        self.bracket_low <= m && m < self.bracket_high
    }
}

/// Components `(F~_L, F~_P, F~_C)` of the approximation.
pub fn f_tilde_parts(n: usize, m: usize) -> Result<(f64, f64, f64)> {
    ensure!(m >= 1 && m <= n, "approximation needs 1 <= m <= n (m {m}, n {n})");
    let nf = n as f64;
    let e_len: f64 = (0..m).map(|i| nf / (n - i) as f64).sum();
    let pile: f64 = (1..m).map(|j| (j * (j + 1)) as f64 / (2.0 * (n - j) as f64)).sum();
    let list = m as f64 * b(n) / e_len;
    Ok((list, pile / e_len, list))
}

/// `F~(m; n)`.
pub fn f_tilde(n: usize, m: usize) -> Result<f64> {
    let (l, p, c) = f_tilde_parts(n, m)?;
    Ok(l + p + c)
}

/// The approximation is defined for model 4 only.
pub fn f_tilde_for(model: Model, n: usize, m: usize) -> Result<f64> {
    ensure!(model == Model::M4, "the approximate cost is defined for m4 only, got {model}");
    f_tilde(n, m)
}

/// Full scan of `F~(m; n)` for `m = 1..=n`, in `O(n)`.
pub fn m_opt_approx(n: usize) -> ApproxCurve {
    assert!(n >= 1, "n must be positive");
    let nf = n as f64;
    let bn = b(n);
    let mut values = Vec::with_capacity(n);
    let mut e_len = 0.0;
    let mut pile = 0.0;
    for m in 1..=n {
        e_len += nf / (n - m + 1) as f64;
        if m >= 2 {
            let j = m - 1;
            pile += (j * (j + 1)) as f64 / (2.0 * (n - j) as f64);
        }
        values.push((2.0 * m as f64 * bn + pile) / e_len);
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    ApproxCurve {
        n,
        values,
        m_opt_approx: best + 1,
        bracket_low: 3.0 * bn - 1.5,
        bracket_high: 3.0 * bn + 0.5,
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `sum_{j=0}^{m-1} ((m - j)/(n - j)) (4 b(n) - (m + j + 1))`, positive exactly
/// when `F~(m) > F~(m + 1)`.
pub fn delta_sign_criterion(n: usize, m: usize) -> Result<f64> {
    ensure!(m >= 1 && m < n, "criterion needs 1 <= m < n (m {m}, n {n})");
    let four_b = 4.0 * b(n);
    Ok(compensated_sum((0..m).map(|j| {
        (m - j) as f64 / (n - j) as f64 * (four_b - (m + j + 1) as f64)
    })))
}

/// `sum_{j=0}^{a} (a - j)(b - j)/(c - j)`.
pub fn sum_lemma_sign(a: i64, b: i64, c: i64) -> Result<f64> {
    ensure!(a > 1, "sum lemma needs a > 1, got {a}");
    ensure!(c >= a.max(b), "sum lemma needs c >= max(a, b) (a {a}, b {b}, c {c})");
    // The j = a term vanishes and may have c - j = 0.
    Ok(compensated_sum((0..a).map(|j| ((a - j) * (b - j)) as f64 / (c - j) as f64)))
}

/// Outcome of the bracket sweep over `n = 5..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketReport {
    pub n_max: usize,
    pub checked: usize,
    /// `n` where `m~_opt` is outside `{k, k + 1}`, `k = ceil(3b(n) - 3/2)`.
    pub violations: Vec<usize>,
    /// Count and first witness of `m~_opt = k`.
    pub lower_branch: (usize, Option<usize>),
    /// Count and first witness of `m~_opt = k + 1`.
    pub upper_branch: (usize, Option<usize>),
    /// How often `m~_opt > 3b(n) - 1/2`.
    pub above_midpoint: usize,
}

impl BracketReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_bracket(n_max: usize) -> Result<BracketReport> {
    ensure!(n_max >= 5, "bracket sweep needs n_max >= 5, got {n_max}");
    let rows = map_range(5..n_max + 1, |n| {
        let k = (3.0 * b(n) - 1.5).ceil() as usize;
        let opt = m_opt_approx(n).m_opt_approx;
        (n, k, opt, opt as f64 > 3.0 * b(n) - 0.5)
    });
    let mut report = BracketReport {
        n_max,
        checked: rows.len(),
        violations: Vec::new(),
        lower_branch: (0, None),
        upper_branch: (0, None),
        above_midpoint: 0,
    };
    for (n, k, opt, above) in rows {
        let branch = if opt == k {
            &mut report.lower_branch
        } else if opt == k + 1 {
            &mut report.upper_branch
        } else {
            report.violations.push(n);
            continue;
        };
        branch.0 += 1;
        branch.1.get_or_insert(n);
        report.above_midpoint += above as usize;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_pile_is_twice_b() {
        for n in 1..50 {
            assert_relative_eq!(f_tilde(n, 1).unwrap(), 2.0 * b(n), max_relative = 1e-15);
        }
    }

    #[test]
    fn incremental_matches_direct() {
        for n in [1, 7, 20, 100] {
            let c = m_opt_approx(n);
            for m in 1..=n {
                assert_relative_eq!(c.values[m - 1], f_tilde(n, m).unwrap(), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn known_optima() {
        assert_eq!(m_opt_approx(10).m_opt_approx, 8);
        assert_eq!(m_opt_approx(34).m_opt_approx, 13);
        assert_eq!(m_opt_approx(100).m_opt_approx, 17);
        assert!(delta_sign_criterion(20, 10).unwrap() > 0.0);
        assert!(delta_sign_criterion(20, 11).unwrap() < 0.0);
    }

    #[test]
    fn sum_lemma_examples() {
        assert!(sum_lemma_sign(10, 2, 100).unwrap() < 0.0);
        assert!(sum_lemma_sign(10, 4, 500).unwrap() > 0.0);
        assert!(sum_lemma_sign(6, 6, 6).unwrap() > 0.0);
        assert!(sum_lemma_sign(10, 2, 5).is_err());
    }

    #[test]
    fn other_models_rejected() {
        assert!(f_tilde_for(Model::M1, 10, 3).is_err());
        assert!(f_tilde_for(Model::M4, 10, 3).is_ok());
    }
}
