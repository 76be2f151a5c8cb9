//! The finite alternating formula for `E_m[1/l]`,
//!
//! ```text
//! E_m[1/l] = (m/n) C(n, m) (-1)^(m+1)
//!          + m C(n, m) sum_{j=1}^{m-1} (-1)^(m-j) C(m-1, j) log(1 - j/n) / j
//! ```
//!
//! The leading term is the `j = 0` member of the partial-fraction sum,
//! `(m/n) C(n, m) = C(n-1, m-1)`. The terms are large and alternate, so
//! roughly `log2(m C(n, m) C(m-1, m/2))` bits cancel. Evaluation runs in
//! binary floating point with `working_precision` mantissa bits, doubling the
//! precision until the rounding-error estimate drops below the tolerance.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;

use super::stirling::binomial;
use super::PrecisionConfig;
use crate::error::{ensure, Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_BITS: usize = 1 << 15;

fn big(x: &BigUint, p: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::parse(&x.to_str_radix(10), Radix::Dec, p, RM, cc)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// log2 of |x|, or -inf for zero.
fn log2_abs(x: &BigFloat) -> f64 {
    match x.exponent() {
        Some(e) => e as f64,
        None => f64::NEG_INFINITY,
    }
}

struct Evaluation {
    value: BigFloat,
    /// log2 of the largest term magnitude.
    max_term_log2: f64,
}

fn evaluate(n: usize, m: usize, p: usize, cc: &mut Consts) -> Evaluation {
    let lead = big(&binomial(n - 1, m - 1), p, cc);
    let mut max_term_log2 = log2_abs(&lead);
    let mut sum = if (m + 1).is_multiple_of(2) { lead } else { lead.neg() };

    let prefactor = big(&(BigUint::from(m) * binomial(n, m)), p, cc);
    let nf = BigFloat::from_u64(n as u64, p);
    for j in 1..m {
        let frac = BigFloat::from_u64((n - j) as u64, p).div(&nf, p, RM);
        let log = frac.ln(p, RM, cc);
        let coeff = big(&binomial(m - 1, j), p, cc).div(&BigFloat::from_u64(j as u64, p), p, RM);
        let mut term = prefactor.mul(&coeff, p, RM).mul(&log, p, RM);
        if (m - j) % 2 == 1 {
            term.set_sign(match term.sign() {
                Some(Sign::Pos) => Sign::Neg,
                _ => Sign::Pos,
            });
        }
        max_term_log2 = max_term_log2.max(log2_abs(&term));
        sum = sum.add(&term, p, RM);
    }
    Evaluation { value: sum, max_term_log2 }
}

/// Result of the closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    /// Estimated relative rounding error of `value`.
    pub rel_error: f64,
    /// Mantissa bits that were needed.
    pub bits: usize,
}

/// `E_m[1/l]` from the alternating closed form, for `1 <= m <= n - 1`.
pub fn recip_len_closed_form(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(recip_len_closed_form_detailed(n, m, cfg)?.value)
}

pub fn recip_len_closed_form_detailed(
    n: usize,
    m: usize,
    cfg: &PrecisionConfig,
) -> Result<ClosedFormValue> {
    ensure!(m >= 1 && m < n, "closed form needs 1 <= m <= n - 1 (m {m}, n {n})");
    cfg.validate()?;
    if m == 1 {
        return Ok(ClosedFormValue { value: 1.0, rel_error: 0.0, bits: 0 });
    }
    let mut cc = Consts::new().map_err(|e| Error::Domain(format!("arbitrary precision setup: {e:?}")))?;
    let mut bits = cfg.working_precision.max(64);
    loop {
        let eval = evaluate(n, m, bits, &mut cc);
        let value = to_f64(&eval.value);
        // Each of the ~m + 2 terms carries a few ulps of rounding at its own
        // magnitude; compare against the magnitude of the result.
        let abs_error = (m as f64 + 2.0) * 8.0 * (eval.max_term_log2 - bits as f64).exp2();
        let rel_error = abs_error / value.abs();
        if value.is_finite() && value > 0.0 && rel_error <= cfg.tol {
            return Ok(ClosedFormValue { value, rel_error, bits });
        }
        if bits >= MAX_BITS {
            return Err(Error::PrecisionLoss { estimated: rel_error, bits, tol: cfg.tol });
        }
        bits *= 2;
    }
}

/// `E_2[1/l] = n(n-1)(log(1/(1-1/n)) - 1/n)`, in double precision.
pub fn recip_len_pair(n: usize) -> Result<f64> {
    ensure!(n >= 2, "pile size 2 needs n >= 2, got {n}");
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * (-(-1.0 / nf).ln_1p() - 1.0 / nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn unit_pile_is_one() {
        for n in 2..20 {
            assert_eq!(recip_len_closed_form(n, 1, &PrecisionConfig::default()).unwrap(), 1.0);
        }
    }

    #[test]
    fn pair_formula() {
        assert_relative_eq!(recip_len_pair(2).unwrap(), 2.0 * LN_2 - 1.0, epsilon = 1e-15);
        let cfg = PrecisionConfig::default();
        for n in 3..40 {
            assert_relative_eq!(
                recip_len_closed_form(n, 2, &cfg).unwrap(),
                recip_len_pair(n).unwrap(),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn precision_is_raised_when_cancellation_is_deep() {
        let cfg = PrecisionConfig { working_precision: 64, ..Default::default() };
        let v = recip_len_closed_form_detailed(60, 59, &cfg).unwrap();
        assert!(v.bits > 64, "needed {} bits", v.bits);
        assert!(v.value > 0.0 && v.value < 1.0 / 59.0);
    }

    #[test]
    fn rejects_full_pile() {
        assert!(recip_len_closed_form(10, 10, &PrecisionConfig::default()).is_err());
    }
}
