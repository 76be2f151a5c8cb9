//! Series evaluation of `E[1/l]` and `E[tau_j / l]`.
//!
//! The law of the stopping time is `P(l = L) = n!/(n-m)! {L-1, m-1} / n^L`.
//! Stirling numbers are carried as `r_k(L) = {L, k} k! / k^L`, which lies in
//! `[0, 1]` and obeys `r_k(L) = r_k(L-1) + ((k-1)/k)^(L-1) r_(k-1)(L-1)`, so
//! no big integers are formed and nothing overflows.
//!
//! The law is log-concave (a sum of independent geometric variables), hence
//! the ratio `P(L+1)/P(L)` never increases once past the mode and
//! `t_L / (1 - ratio)` bounds the tail of any series whose terms are
//! `P(L) / L` or a geometric smoothing of it.

use super::PrecisionConfig;
use crate::error::{ensure, Error, Result};

/// Extra terms taken after the tail bound is first met.
const EXTRA_TERMS: usize = 50;

/// Truncation state for a series with log-concave positive terms.
struct Truncation {
    tol: f64,
    prev: f64,
    satisfied_at: Option<usize>,
}

impl Truncation {
    fn new(tol: f64) -> Self {
        Truncation { tol, prev: 0.0, satisfied_at: None }
    }

    /// Feeds the dominating sequence (`weight`) and the running sum; returns
    /// the certified tail bound once the stopping rule has fired.
    fn step(&mut self, index: usize, weight: f64, term: f64, partial: f64) -> Option<f64> {
        let ratio = if self.prev > 0.0 { weight / self.prev } else { f64::INFINITY };
        self.prev = weight;
        if self.satisfied_at.is_none() && ratio < 1.0 {
            let tail = term / (1.0 - ratio);
            if tail < self.tol * partial || (term == 0.0 && partial > 0.0) {
                self.satisfied_at = Some(index);
            }
        }
        match self.satisfied_at {
            Some(at) if index >= at + EXTRA_TERMS => {
                Some(if ratio < 1.0 { term * ratio / (1.0 - ratio) } else { 0.0 })
            }
            _ => None,
        }
    }
}

/// Truncated law of the stopping time for one `(n, m)`.
#[derive(Debug, Clone)]
pub struct StoppingLaw {
    pub n: usize,
    pub m: usize,
    /// `probs[i] = P(l = m + i)`.
    pub probs: Vec<f64>,
    /// Certified bound on the neglected part of `sum P(L)/L`.
    pub recip_tail: f64,
}

impl StoppingLaw {
    /// Builds the law, truncated by the rule for the `E[1/l]` series.
    pub fn new(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<Self> {
        ensure!(m >= 1 && m <= n, "stopping law needs 1 <= m <= n (m {m}, n {n})");
        cfg.validate()?;
        if m == 1 {
            return Ok(StoppingLaw { n, m, probs: vec![1.0], recip_tail: 0.0 });
        }
        let k_top = m - 1;
        // r[k] = r_k(L) for the current L, starting at L = 0.
        let mut r = vec![0.0f64; m];
        r[0] = 1.0;
        // pow[k] = ((k-1)/k)^L for the current L.
        let mut pow = vec![1.0f64; m];
        let log_prefix = ln_falling(n, m) - ln_factorial(m - 1) - (n as f64).ln();
        let log_ratio = (k_top as f64 / n as f64).ln();

        let mut probs = Vec::new();
        let mut trunc = Truncation::new(cfg.tol);
        let mut partial = 0.0;
        let mut big_l = 0usize;
        loop {
            // Advance r from row big_l to row big_l + 1.
            for k in (1..=k_top).rev() {
                r[k] += pow[k] * r[k - 1];
            }
            r[0] = 0.0;
            for (k, p) in pow.iter_mut().enumerate().skip(1) {
                *p *= (k - 1) as f64 / k as f64;
            }
            big_l += 1;
            // P(l = big_l + 1) uses r_(m-1)(big_l).
            let len = big_l + 1;
            if len < m {
                continue;
            }
            let prob = if r[k_top] > 0.0 {
                (log_prefix + big_l as f64 * log_ratio).exp() * r[k_top]
            } else {
                0.0
            };
            probs.push(prob);
            let term = prob / len as f64;
            partial += term;
            if let Some(tail) = trunc.step(len, prob, term, partial) {
                return Ok(StoppingLaw { n, m, probs, recip_tail: tail });
            }
            if probs.len() >= cfg.max_terms {
                return Err(Error::Convergence {
                    quantity: "E[1/l]",
                    terms: probs.len(),
                    partial,
                });
            }
        }
    }

    pub fn len_at(&self, i: usize) -> usize {
        self.m + i
    }

    /// `sum P(L) / L` over the stored terms.
    pub fn recip_len(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| p / self.len_at(i) as f64)
            .sum()
    }

    /// Total stored probability mass; one minus the truncated tail.
    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `E[tau_j / l]` from the double series `sum_k (j/n)^k sum_l P(l)/(l+k)`,
    /// summed along diagonals `L = l + k`: with
    /// `Q(L) = sum_k (j/n)^k P(L - k)` one has `Q(L) = (j/n)(Q(L-1) + P(L-1))`
    /// and the value is `sum_L Q(L) / L`.
    pub fn tau_recip_len(&self, j: usize, cfg: &PrecisionConfig) -> Result<(f64, f64)> {
        let (n, m) = (self.n, self.m);
        ensure!(j >= 1 && j < m, "tau index must satisfy 1 <= j <= m - 1 (j {j}, m {m})");
        let q_ratio = j as f64 / n as f64;
        let mut q = 0.0f64;
        let mut partial = 0.0f64;
        let mut trunc = Truncation::new(cfg.tol);
        // The series starts at L = m + 1.
        for i in 1.. {
            let prev_prob = self.probs.get(i - 1).copied().unwrap_or(0.0);
            q = q_ratio * (q + prev_prob);
            let len = m + i;
            let term = q / len as f64;
            partial += term;
            if i >= self.probs.len() {
                if let Some(tail) = trunc.step(len, q, term, partial) {
                    // The neglected P mass contributes at most its own size.
                    return Ok((partial, tail + self.recip_tail * j as f64 / (n - j) as f64));
                }
            } else {
                trunc.prev = q;
            }
            if i >= cfg.max_terms {
                return Err(Error::Convergence {
                    quantity: "E[tau_j/l]",
                    terms: i,
                    partial,
                });
            }
        }
        unreachable!()
    }
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `ln(n! / (n-k)!)`.
pub(crate) fn ln_falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln()).sum()
}

/// `E[1/l]` by summing the stopping-time law.
pub fn recip_len_series(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(StoppingLaw::new(n, m, cfg)?.recip_len())
}

/// `E[tau_j / l]` from the reordered double series.
pub fn tau_recip_len(n: usize, m: usize, j: usize, cfg: &PrecisionConfig) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "needs 1 <= m <= n (m {m}, n {n})");
    ensure!(j >= 1 && j < m, "tau index must satisfy 1 <= j <= m - 1 (j {j}, m {m})");
    let law = StoppingLaw::new(n, m, cfg)?;
    Ok(law.tau_recip_len(j, cfg)?.0)
}

/// `E_m[1/l]` for every `m = 1..=n` from one pass over the Stirling rows.
/// Entry `m - 1` holds the value for pile size `m`.
pub fn recip_len_series_all(n: usize, cfg: &PrecisionConfig) -> Result<Vec<f64>> {
    ensure!(n >= 1, "needs n >= 1");
    cfg.validate()?;
    let mut out = vec![0.0f64; n];
    out[0] = 1.0;
    if n == 1 {
        return Ok(out);
    }
    let mut r = vec![0.0f64; n];
    r[0] = 1.0;
    let mut pow = vec![1.0f64; n];
    // Per pile size m >= 2 (index m - 1).
    let log_prefix: Vec<f64> = (1..=n)
        .map(|m| ln_falling(n, m) - ln_factorial(m - 1) - (n as f64).ln())
        .collect();
    let log_ratio: Vec<f64> = (1..=n).map(|m| ((m - 1) as f64 / n as f64).ln()).collect();
    let mut truncs: Vec<Truncation> = (0..n).map(|_| Truncation::new(cfg.tol)).collect();
    let mut done = vec![false; n];
    done[0] = true;
    let mut remaining = n - 1;
    let mut big_l = 0usize;
    while remaining > 0 {
        for k in (1..n).rev() {
            r[k] += pow[k] * r[k - 1];
        }
        r[0] = 0.0;
        for (k, p) in pow.iter_mut().enumerate().skip(1) {
            *p *= (k - 1) as f64 / k as f64;
        }
        big_l += 1;
        let len = big_l + 1;
        for m in 2..=n.min(len) {
            if done[m - 1] {
                continue;
            }
            let rk = r[m - 1];
            let prob = if rk > 0.0 {
                (log_prefix[m - 1] + big_l as f64 * log_ratio[m - 1]).exp() * rk
            } else {
                0.0
            };
            let term = prob / len as f64;
            out[m - 1] += term;
            if truncs[m - 1].step(len, prob, term, out[m - 1]).is_some() {
                done[m - 1] = true;
                remaining -= 1;
            }
        }
        if big_l >= cfg.max_terms {
            let m = done.iter().position(|d| !d).unwrap_or(n - 1) + 1;
            return Err(Error::Convergence {
                quantity: "E[1/l]",
                terms: big_l,
                partial: out[m - 1],
            });
        }
    }
    Ok(out)
}
