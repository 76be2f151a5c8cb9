//! Exact combinatorics of occupancy paths.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{ensure, Result};

/// Rows `0..=l_max` of the Stirling triangle, truncated to columns `0..=k_max`.
pub(crate) fn stirling_rows(l_max: usize, k_max: usize) -> Vec<Vec<BigUint>> {
    let mut rows = Vec::with_capacity(l_max + 1);
    let mut row = vec![BigUint::zero(); k_max + 1];
    row[0] = BigUint::one();
    rows.push(row.clone());
    for _ in 1..=l_max {
        let mut next = vec![BigUint::zero(); k_max + 1];
        for k in 1..=k_max {
            next[k] = &row[k] * BigUint::from(k) + &row[k - 1];
        }
        rows.push(next.clone());
        row = next;
    }
    rows
}

/// Stirling number of the second kind `{l over m}`: the number of partitions
/// of an `l`-set into `m` nonempty blocks. Zero outside the triangle.
pub fn stirling2(l: usize, m: usize) -> BigUint {
    if m > l {
        return BigUint::zero();
    }
    stirling_rows(l, m).pop().map(|mut row| row.swap_remove(m)).unwrap_or_default()
}

pub(crate) fn falling_factorial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i))
}

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of paths of length `l` whose pile first reaches size `m` at the
/// last draw: `m! C(n, m) {l-1 over m-1}`.
pub fn path_count(n: usize, m: usize, l: usize) -> Result<BigUint> {
    ensure!(m >= 1 && m <= n, "path count needs 1 <= m <= n (m {m}, n {n})");
    ensure!(l >= m, "a path stopping at pile size {m} has length >= {m}, got {l}");
    Ok(falling_factorial(n, m) * stirling2(l - 1, m - 1))
}

/// `num / den` rounded to `f64`, for operands far outside the `f64` range.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = |x: &BigUint| x.bits().saturating_sub(64);
    let (sn, sd) = (shift(num), shift(den));
    let top_n = (num >> sn).to_f64().unwrap_or(f64::INFINITY);
    let top_d = (den >> sd).to_f64().unwrap_or(f64::INFINITY);
    let exp = sn as i64 - sd as i64;
    top_n / top_d * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Relative residual of the truncated identity
/// `sum_{l=m..l_max} {l-1 over m-1} / n^l = (n-m)! / n!`, evaluated in exact
/// integer arithmetic.
pub fn stirling_prob_identity_check(n: usize, m: usize, l_max: usize) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "identity check needs 1 <= m <= n (m {m}, n {n})");
    if l_max < m {
        return Ok(1.0);
    }
    let rows = stirling_rows(l_max - 1, m - 1);
    let nb = BigUint::from(n);
    // sum_l {l-1, m-1} n^(l_max - l), a common denominator of n^l_max.
    let mut partial = BigUint::zero();
    for row in rows.iter().take(l_max).skip(m - 1) {
        partial = partial * &nb + &row[m - 1];
    }
    let scaled_target = nb.pow(l_max as u32);
    let lhs = partial * falling_factorial(n, m);
    let diff = if lhs > scaled_target {
        &lhs - &scaled_target
    } else {
        &scaled_target - &lhs
    };
    Ok(ratio_to_f64(&diff, &scaled_target))
}

/// `E[tau_j | l]`: expected number of repeat draws while the pile holds `j`
/// objects, among paths of length `l` stopping at pile size `m`.
pub fn tau_given_len(n: usize, m: usize, j: usize, l: usize) -> Result<f64> {
    ensure!(m >= 1 && m <= n, "needs 1 <= m <= n (m {m}, n {n})");
    ensure!(j >= 1 && j < m, "repeat counter index must satisfy 1 <= j <= m - 1 (j {j}, m {m})");
    ensure!(l >= m, "path length {l} is shorter than the pile size {m}");
    let rows = stirling_rows(l - 1, m - 1);
    let jb = BigUint::from(j);
    let mut power = BigUint::one();
    let mut num = BigUint::zero();
    for k in 1..=(l - m) {
        power *= &jb;
        num += &power * &rows[l - k - 1][m - 1];
    }
    Ok(ratio_to_f64(&num, &rows[l - 1][m - 1]))
}
