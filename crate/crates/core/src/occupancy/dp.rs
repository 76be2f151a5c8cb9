//! Forward first-passage recursion over the number of distinct objects drawn.
//!
//! State `i` (distinct objects seen so far) moves to `i + 1` with probability
//! `(n - i)/n` and stays with probability `i/n`. Absorption happens on the
//! step out of state `m - 1`. A companion vector carries
//! `E[tau_J * 1(state = i)]`, which grows by `p(J) J/n` on every self-loop at
//! `J`.

use crate::error::{ensure, Error, Result};

/// Unabsorbed probability mass at which the recursion stops.
pub const DP_RESIDUAL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct FirstPassage {
    /// `E[1/l]`.
    pub recip_len: f64,
    /// `E[tau_J / l]` when a marked index `J` was requested.
    pub tau_recip: Option<f64>,
    /// `E[l]` accumulated alongside, a sanity check for the recursion.
    pub expected_len: f64,
    pub steps: usize,
    pub residual_mass: f64,
}

/// Runs the recursion until the unabsorbed mass is below [`DP_RESIDUAL`] or
/// `l_cap` steps have been taken.
pub fn first_passage_dp(n: usize, m: usize, j_mark: Option<usize>, l_cap: usize) -> Result<FirstPassage> {
    ensure!(m >= 1 && m <= n, "first passage needs 1 <= m <= n (m {m}, n {n})");
    if let Some(j) = j_mark {
        ensure!(j >= 1 && j < m, "marked index must satisfy 1 <= j <= m - 1 (j {j}, m {m})");
    }
    let nf = n as f64;
    let stay: Vec<f64> = (0..m).map(|i| i as f64 / nf).collect();
    let advance: Vec<f64> = (0..m).map(|i| (n - i) as f64 / nf).collect();

    let mut p = vec![0.0f64; m];
    p[0] = 1.0;
    let mut u = vec![0.0f64; m];
    let mut next_p = vec![0.0f64; m];
    let mut next_u = vec![0.0f64; m];

    let mut recip_len = 0.0;
    let mut tau_recip = 0.0;
    let mut expected_len = 0.0;
    let mut residual = 1.0;
    let mut steps = 0;
    while residual >= DP_RESIDUAL {
        if steps >= l_cap {
            return Err(Error::Residual { mass: residual, steps });
        }
        steps += 1;
        let len = steps as f64;
        let absorbed = p[m - 1] * advance[m - 1];
        recip_len += absorbed / len;
        expected_len += absorbed * len;
        if j_mark.is_some() {
            tau_recip += u[m - 1] * advance[m - 1] / len;
        }

        next_p[0] = p[0] * stay[0];
        for i in 1..m {
            next_p[i] = p[i] * stay[i] + p[i - 1] * advance[i - 1];
        }
        if let Some(j) = j_mark {
            next_u[0] = u[0] * stay[0];
            for i in 1..m {
                next_u[i] = u[i] * stay[i] + u[i - 1] * advance[i - 1];
            }
            next_u[j] += p[j] * stay[j];
            std::mem::swap(&mut u, &mut next_u);
        }
        std::mem::swap(&mut p, &mut next_p);
        residual = p.iter().sum();
    }
    Ok(FirstPassage {
        recip_len,
        tau_recip: j_mark.map(|_| tau_recip),
        expected_len,
        steps,
        residual_mass: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn pair_pile() {
        let fp = first_passage_dp(2, 2, Some(1), 10_000).unwrap();
        assert_relative_eq!(fp.recip_len, 2.0 * LN_2 - 1.0, epsilon = 1e-12);
        assert_relative_eq!(fp.tau_recip.unwrap(), 3.0 - 4.0 * LN_2, epsilon = 1e-12);
        assert_relative_eq!(fp.expected_len, 3.0, epsilon = 1e-10);
    }

    #[test]
    fn unit_pile_absorbs_in_one_step() {
        for n in 1..20 {
            let fp = first_passage_dp(n, 1, None, 10).unwrap();
            assert_eq!(fp.recip_len, 1.0);
            assert_eq!(fp.steps, 1);
            assert_eq!(fp.residual_mass, 0.0);
        }
    }

    #[test]
    fn step_cap_reports_mass() {
        match first_passage_dp(50, 50, None, 30) {
            Err(Error::Residual { mass, steps }) => {
                assert_eq!(steps, 30);
                assert!(mass > 0.9);
            }
            other => panic!("expected residual failure, got {other:?}"),
        }
    }
}
