//! Moments of the stopping time `l` and the repeat counters `tau_j` of the
//! uniform occupancy process: draw uniformly from `n` objects until `m`
//! distinct ones have been seen.
//!
//! `E[1/l]` has four independent evaluations (alternating closed form,
//! Stirling series, generating-function quadrature, first-passage recursion)
//! and `E[tau_j/l]` three (double series, single integral, recursion).
//! [`moments`] uses the series and cross-checks against one alternative.

mod closed_form;
mod dp;
mod quadrature;
mod series;
mod stirling;

pub use closed_form::{recip_len_closed_form, recip_len_closed_form_detailed, recip_len_pair, ClosedFormValue};
pub use dp::{first_passage_dp, FirstPassage, DP_RESIDUAL};
pub use quadrature::{
    integrate, recip_len_quadrature, recip_len_quadrature_detailed, tau_recip_len_quadrature,
    tau_recip_len_quadrature_detailed, QuadratureValue,
};
pub use series::{recip_len_series, recip_len_series_all, tau_recip_len, StoppingLaw};
pub use stirling::{path_count, stirling2, stirling_prob_identity_check, tau_given_len};

use crate::error::{ensure, Error, Result};

/// Largest pile size for which the alternating closed form is the
/// cross-check of choice; quadrature takes over above it.
pub const CLOSED_FORM_MAX_M: usize = 30;

/// Numerical controls shared by the occupancy methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    /// Relative tolerance for series truncation and the closed form.
    pub tol: f64,
    /// Cap on the number of series terms.
    pub max_terms: usize,
    /// Relative error target for quadrature.
    pub quad_rel_err: f64,
    /// Starting mantissa bits for the alternating closed form.
    pub working_precision: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            tol: 1e-10,
            max_terms: 1_000_000,
            quad_rel_err: 1e-12,
            working_precision: 256,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.tol > 0.0 && self.tol.is_finite(), "tolerance must be positive, got {}", self.tol);
        ensure!(self.max_terms >= 10, "max_terms must be at least 10, got {}", self.max_terms);
        ensure!(
            self.quad_rel_err > 0.0 && self.quad_rel_err.is_finite(),
            "quadrature target must be positive, got {}",
            self.quad_rel_err
        );
        Ok(())
    }
}

/// `E_m[l] = sum_{j=0}^{m-1} n/(n-j) = n (H_n - H_(n-m))`.
pub fn expected_len(n: usize, m: usize) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "expected length needs 1 <= m <= n (m {m}, n {n})");
    Ok(expected_len_unchecked(n, m))
}

pub(crate) fn expected_len_unchecked(n: usize, m: usize) -> f64 {
    let nf = n as f64;
    (0..m).map(|j| nf / (n - j) as f64).sum()
}

/// `Var(l) = sum_{j=0}^{m-1} j n / (n-j)^2`.
pub fn var_len(n: usize, m: usize) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "variance needs 1 <= m <= n (m {m}, n {n})");
    let nf = n as f64;
    Ok((0..m)
        .map(|j| {
            let d = (n - j) as f64;
            j as f64 * nf / (d * d)
        })
        .sum())
}

/// `E[tau_j] = j / (n - j)`, the same for every pile size `m > j`.
pub fn tau_mean(n: usize, j: usize) -> Result<f64> {
    ensure!(j >= 1 && j < n, "tau mean needs 1 <= j < n (j {j}, n {n})");
    Ok(j as f64 / (n - j) as f64)
}

/// Which evaluation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Series,
    ClosedForm,
    Quadrature,
    FirstPassage,
}

/// Provenance of one reported value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodTag {
    pub method: Method,
    /// Method used for the cross-check, if any.
    pub checked_against: Option<Method>,
    /// Absolute disagreement with the cross-check (or the method's own
    /// error bound when there is none).
    pub est_error: f64,
}

impl MethodTag {
    fn exact() -> Self {
        MethodTag { method: Method::Exact, checked_against: None, est_error: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodTags {
    pub expected_len: MethodTag,
    pub var_len: MethodTag,
    pub recip_len: MethodTag,
    /// One tag per entry of `tau_recip`.
    pub tau_recip: Vec<MethodTag>,
}

/// Moments of the stopping time for one `(n, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMoments {
    pub n: usize,
    pub m: usize,
    pub expected_len: f64,
    pub var_len: f64,
    pub recip_len: f64,
    /// `tau_recip[j - 1] = E[tau_j / l]` for `j = 1..m-1`.
    pub tau_recip: Vec<f64>,
    pub method_tags: MethodTags,
}

impl OccupancyMoments {
    /// `E[tau_j/l]` for `1 <= j <= m - 1`.
    pub fn tau(&self, j: usize) -> f64 {
        self.tau_recip[j - 1]
    }

    /// `m E[1/l] + sum_j E[tau_j/l] - 1`, zero up to rounding.
    pub fn total_probability_residual(&self) -> f64 {
        self.m as f64 * self.recip_len + self.tau_recip.iter().sum::<f64>() - 1.0
    }

    /// Sum of the cross-check disagreements of `E[1/l]` and every `E[tau_j/l]`.
    pub fn est_error(&self) -> f64 {
        self.method_tags.recip_len.est_error
            + self.method_tags.tau_recip.iter().map(|t| t.est_error).sum::<f64>()
    }
}

/// Whether two estimates agree to `tol` relative (with an absolute floor for
/// values that are essentially zero).
fn agree(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Series value for `E[1/l]` cross-checked against the closed form (small
/// `m < n`) or quadrature; quadrature referees a disagreement.
fn checked_recip(n: usize, m: usize, law: &StoppingLaw, cfg: &PrecisionConfig) -> Result<(f64, MethodTag)> {
    let series = law.recip_len();
    if m == 1 {
        return Ok((series, MethodTag::exact()));
    }
    // Cross-check tolerance: the truncation tolerance with headroom for the
    // alternative method's own error.
    let check_tol = 10.0 * cfg.tol;
    let (alt_method, alt) = if m < n && m <= CLOSED_FORM_MAX_M {
        (Method::ClosedForm, recip_len_closed_form(n, m, cfg)?)
    } else {
        (Method::Quadrature, recip_len_quadrature(n, m, cfg)?)
    };
    let mut tag = MethodTag {
        method: Method::Series,
        checked_against: Some(alt_method),
        est_error: (series - alt).abs(),
    };
    if agree(series, alt, check_tol) {
        return Ok((series, tag));
    }
    let referee = recip_len_quadrature(n, m, cfg)?;
    if agree(series, referee, check_tol) {
        tag.checked_against = Some(Method::Quadrature);
        tag.est_error = (series - referee).abs();
        Ok((series, tag))
    } else if alt_method != Method::Quadrature && agree(alt, referee, check_tol) {
        let tag = MethodTag {
            method: alt_method,
            checked_against: Some(Method::Quadrature),
            est_error: (alt - referee).abs(),
        };
        Ok((alt, tag))
    } else {
        Err(Error::Disagreement { quantity: "E[1/l]", first: series, second: referee })
    }
}

fn checked_tau(n: usize, m: usize, j: usize, law: &StoppingLaw, cfg: &PrecisionConfig) -> Result<(f64, MethodTag)> {
    let (series, _) = law.tau_recip_len(j, cfg)?;
    let quad = tau_recip_len_quadrature(n, m, j, cfg)?;
    let tag = MethodTag {
        method: Method::Series,
        checked_against: Some(Method::Quadrature),
        est_error: (series - quad).abs(),
    };
    // Absolute floor: the total-probability identity makes these values
    // meaningful at the scale of E[1/l].
    if (series - quad).abs() <= 10.0 * cfg.tol * series.abs().max(law.recip_len()) {
        Ok((series, tag))
    } else {
        Err(Error::Disagreement { quantity: "E[tau_j/l]", first: series, second: quad })
    }
}

/// All moments for one `(n, m)`, each cross-validated against a second method.
pub fn moments(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<OccupancyMoments> {
    ensure!(m >= 1 && m <= n, "moments need 1 <= m <= n (m {m}, n {n})");
    let law = StoppingLaw::new(n, m, cfg)?;
    let (recip_len, recip_tag) = checked_recip(n, m, &law, cfg)?;
    let mut tau_recip = Vec::with_capacity(m.saturating_sub(1));
    let mut tau_tags = Vec::with_capacity(m.saturating_sub(1));
    for j in 1..m {
        let (v, tag) = checked_tau(n, m, j, &law, cfg)?;
        tau_recip.push(v);
        tau_tags.push(tag);
    }
    Ok(OccupancyMoments {
        n,
        m,
        expected_len: expected_len_unchecked(n, m),
        var_len: var_len(n, m)?,
        recip_len,
        tau_recip,
        method_tags: MethodTags {
            expected_len: MethodTag::exact(),
            var_len: MethodTag::exact(),
            recip_len: recip_tag,
            tau_recip: tau_tags,
        },
    })
}

/// Series-only moments (no cross-check): the fast path for wide sweeps.
pub fn moments_unchecked(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<OccupancyMoments> {
    ensure!(m >= 1 && m <= n, "moments need 1 <= m <= n (m {m}, n {n})");
    let law = StoppingLaw::new(n, m, cfg)?;
    let recip_len = law.recip_len();
    let recip_tag = MethodTag { method: Method::Series, checked_against: None, est_error: law.recip_tail };
    let mut tau_recip = Vec::with_capacity(m.saturating_sub(1));
    let mut tau_tags = Vec::with_capacity(m.saturating_sub(1));
    for j in 1..m {
        let (v, tail) = law.tau_recip_len(j, cfg)?;
        tau_recip.push(v);
        tau_tags.push(MethodTag { method: Method::Series, checked_against: None, est_error: tail });
    }
    Ok(OccupancyMoments {
        n,
        m,
        expected_len: expected_len_unchecked(n, m),
        var_len: var_len(n, m)?,
        recip_len,
        tau_recip,
        method_tags: MethodTags {
            expected_len: MethodTag::exact(),
            var_len: MethodTag::exact(),
            recip_len: recip_tag,
            tau_recip: tau_tags,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn length_moments() {
        for n in 1..10 {
            assert_eq!(expected_len(n, 1).unwrap(), 1.0);
            assert_eq!(var_len(n, 1).unwrap(), 0.0);
        }
        assert_eq!(expected_len(2, 2).unwrap(), 3.0);
        assert_eq!(var_len(2, 2).unwrap(), 2.0);
        let h20: f64 = (1..=20).map(|k| 1.0 / k as f64).sum();
        assert_relative_eq!(expected_len(20, 20).unwrap(), 20.0 * h20, epsilon = 1e-12);
        assert_relative_eq!(expected_len(20, 20).unwrap(), 71.954_79, epsilon = 1e-5);
        let direct: f64 = (0..10).map(|j| 20.0 * j as f64 / ((20 - j) * (20 - j)) as f64).sum();
        assert_relative_eq!(var_len(20, 10).unwrap(), direct, epsilon = 1e-14);
        assert!(expected_len(3, 4).is_err());
    }

    #[test]
    fn tau_means() {
        assert_eq!(tau_mean(2, 1).unwrap(), 1.0);
        assert_eq!(tau_mean(20, 10).unwrap(), 1.0);
        assert_relative_eq!(tau_mean(20, 1).unwrap(), 1.0 / 19.0);
        assert!(tau_mean(5, 5).is_err());
    }

    #[test]
    fn invalid_config_is_rejected() {
        let bad = PrecisionConfig { tol: 0.0, ..Default::default() };
        assert!(moments(5, 3, &bad).is_err());
        let bad = PrecisionConfig { max_terms: 5, ..Default::default() };
        assert!(moments(5, 3, &bad).is_err());
    }

    #[test]
    fn moment_invariants_for_a_mid_pile() {
        let cfg = PrecisionConfig::default();
        let mo = moments(20, 10, &cfg).unwrap();
        assert!(mo.total_probability_residual().abs() < 1e-10);
        assert!(1.0 / mo.expected_len <= mo.recip_len && mo.recip_len <= 0.1);
        for j in 1..10 {
            assert!(mo.tau(j) < j as f64 / (20 - j) as f64 * mo.recip_len);
        }
        let full = moments(5, 5, &cfg).unwrap();
        assert!(full.total_probability_residual().abs() < 1e-10);
    }
}
