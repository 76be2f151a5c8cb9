//! Globally adaptive 7/15-point Gauss–Kronrod quadrature and the integral
//! representations of `E[1/l]` and `E[tau_j/l]`.
//!
//! Substituting `x = u/n` in the generating-function integral gives
//!
//! ```text
//! E_m[1/l] = int_0^1 u^(m-1) prod_{i=1}^{m-1} (1 - i/n) / (1 - i u/n) du
//! ```
//!
//! whose integrand stays in `[0, 1]`; the prefactor `n!/((n-m)! n^m)` is
//! absorbed into the product. The repeat-count moment picks up one more
//! geometric factor: `E_m[tau_j/l]` integrates the same kernel times
//! `(j u/n) / (1 - j u/n)`.

#![allow(clippy::excessive_precision)]

use std::collections::BinaryHeap;

use super::PrecisionConfig;
use crate::error::{ensure, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Integrates `f` over `[a, b]` until the summed Kronrod–Gauss error is below
/// `rel_err * |I|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_err: f64) -> Result<QuadratureValue> {
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);
    while error > rel_err * value.abs() {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { achieved: error, target: rel_err * value.abs() });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Guard against drift in the running sums.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let intervals = heap.len();
    let value = heap.iter().map(|s| s.value).sum();
    Ok(QuadratureValue { value, error, intervals })
}

/// `u^(m-1) prod_{i=1}^{m-1} (1 - i/n)/(1 - i u/n)`.
fn kernel(n: usize, m: usize, u: f64) -> f64 {
    let nf = n as f64;
    let mut acc = 1.0;
    for i in 1..m {
        let c = i as f64 / nf;
        acc *= u * (1.0 - c) / (1.0 - c * u);
    }
    acc
}

pub fn recip_len_quadrature_detailed(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<QuadratureValue> {
    ensure!(m >= 1 && m <= n, "quadrature needs 1 <= m <= n (m {m}, n {n})");
    cfg.validate()?;
    integrate(|u| kernel(n, m, u), 0.0, 1.0, cfg.quad_rel_err)
}

/// `E_m[1/l]` by adaptive quadrature of the generating-function integral.
pub fn recip_len_quadrature(n: usize, m: usize, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(recip_len_quadrature_detailed(n, m, cfg)?.value)
}

pub fn tau_recip_len_quadrature_detailed(
    n: usize,
    m: usize,
    j: usize,
    cfg: &PrecisionConfig,
) -> Result<QuadratureValue> {
    ensure!(m >= 1 && m <= n, "quadrature needs 1 <= m <= n (m {m}, n {n})");
    ensure!(j >= 1 && j < m, "tau index must satisfy 1 <= j <= m - 1 (j {j}, m {m})");
    cfg.validate()?;
    let c = j as f64 / n as f64;
    integrate(
        |u| kernel(n, m, u) * (c * u) / (1.0 - c * u),
        0.0,
        1.0,
        cfg.quad_rel_err,
    )
}

/// `E_m[tau_j/l]` from its single-integral form.
pub fn tau_recip_len_quadrature(n: usize, m: usize, j: usize, cfg: &PrecisionConfig) -> Result<f64> {
    Ok(tau_recip_len_quadrature_detailed(n, m, j, cfg)?.value)
}
