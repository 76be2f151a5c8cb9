//! Seeded simulation of the search-with-cleanup process.
//!
//! Trials are cut into fixed chunks of [`CHUNK`] paths. Chunk `c` of a run
//! draws from ChaCha8 stream `c` of a key derived from `(seed, n, m)`, and
//! chunk statistics are merged in chunk order, so every report is
//! bit-identical no matter how many worker threads execute the chunks.
//!
//! Costs charged are the averaged ones: a list search while the pile holds
//! `j` objects costs `s_L(j)`, a pile search `s_P(j)`, a cleanup `C_m`. Under
//! the uniform distribution the sample mean of `(S + C)/l` is therefore an
//! unbiased estimator of `F(m; n)`.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost_model::{cleanup, list_cost, pile_cost, Model};
use crate::error::{ensure, Error, Result};
use crate::par::map_range;

/// Paths per deterministic work unit.
pub const CHUNK: usize = 4096;
/// Smallest accepted trial count.
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    Uniform,
    /// `mu(X_i) ~ i^-s`.
    Zipf { s: f64 },
    /// `mu(X_r) = 1 - eps`, the rest share `eps` evenly; `r` is 1-based.
    Skewed { r: usize, eps: f64 },
    Custom,
}

/// Usage probabilities over the `n` objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    kind: DistributionKind,
    weights: Vec<f64>,
    cdf: Vec<f64>,
}

impl Distribution {
    fn from_weights(kind: DistributionKind, raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Distribution("no objects".into()));
        }
        if let Some(i) = raw.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Distribution(format!(
                "weight {} of object {} is not strictly positive",
                raw[i],
                i + 1
            )));
        }
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cdf.push(acc);
        }
        // Guard the top bucket against rounding.
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(Distribution { kind, weights, cdf })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(DistributionKind::Uniform, vec![1.0; n])
    }

    pub fn zipf(n: usize, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Distribution(format!("zipf exponent must be positive, got {s}")));
        }
        let raw = (1..=n).map(|i| (i as f64).powf(-s)).collect();
        Self::from_weights(DistributionKind::Zipf { s }, raw)
    }

    /// Requires `0 < eps < 1` so that every object keeps positive weight.
    pub fn skewed(n: usize, r: usize, eps: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Distribution("skewed distribution needs n >= 2".into()));
        }
        if !(1..=n).contains(&r) {
            return Err(Error::Distribution(format!("favoured object r = {r} outside 1..={n}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Distribution(format!("eps must satisfy 0 < eps < 1, got {eps}")));
        }
        let rest = eps / (n - 1) as f64;
        let raw = (1..=n).map(|i| if i == r { 1.0 - eps } else { rest }).collect();
        Self::from_weights(DistributionKind::Skewed { r, eps }, raw)
    }

    /// Arbitrary positive weights, normalized.
    pub fn custom(weights: Vec<f64>) -> Result<Self> {
        Self::from_weights(DistributionKind::Custom, weights)
    }

    /// One positive weight per line, exactly `n` lines (blank lines ignored).
    pub fn from_file(path: &Path, n: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Distribution(format!("cannot read {}: {e}", path.display())))?;
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let w: f64 = line
                .parse()
                .map_err(|_| Error::Distribution(format!("line {}: not a number: {line:?}", lineno + 1)))?;
            weights.push(w);
        }
        if weights.len() != n {
            return Err(Error::Distribution(format!(
                "{} holds {} weights, expected {n}",
                path.display(),
                weights.len()
            )));
        }
        Self::custom(weights)
    }

    /// Parses `uniform`, `zipf:s=<x>`, `skewed:r=<i>,eps=<x>` or
    /// `custom:<path>`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let (head, args) = match text.split_once(':') {
            Some((h, a)) => (h.trim(), a.trim()),
            None => (text.trim(), ""),
        };
        let bad = |msg: &str| Error::Distribution(format!("{msg} in {text:?}"));
        let params = || -> Result<Vec<(&str, &str)>> {
            args.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| bad("expected key=value")))
                .collect()
        };
        match head {
            "uniform" if args.is_empty() => Self::uniform(n),
            "zipf" => {
                let mut s = 1.0;
                for (k, v) in params()? {
                    match k {
                        "s" => s = v.parse().map_err(|_| bad("bad exponent"))?,
                        _ => return Err(bad(&format!("unknown zipf parameter {k:?}"))),
                    }
                }
                Self::zipf(n, s)
            }
            "skewed" => {
                let (mut r, mut eps) = (None, None);
                for (k, v) in params()? {
                    match k {
                        "r" => r = Some(v.parse().map_err(|_| bad("bad index r"))?),
                        "eps" => eps = Some(v.parse().map_err(|_| bad("bad eps"))?),
                        _ => return Err(bad(&format!("unknown skewed parameter {k:?}"))),
                    }
                }
                Self::skewed(n, r.ok_or_else(|| bad("missing r"))?, eps.ok_or_else(|| bad("missing eps"))?)
            }
            "custom" if !args.is_empty() => Self::from_file(Path::new(args), n),
            _ => Err(bad("unrecognized distribution")),
        }
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Draws a 0-based object index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.kind {
            DistributionKind::Uniform => rng.random_range(0..self.weights.len()),
            _ => {
                let u: f64 = rng.random();
                self.cdf.partition_point(|&c| c <= u).min(self.weights.len() - 1)
            }
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DistributionKind::Uniform => write!(f, "uniform"),
            DistributionKind::Zipf { s } => write!(f, "zipf:s={s}"),
            DistributionKind::Skewed { r, eps } => write!(f, "skewed:r={r},eps={eps}"),
            DistributionKind::Custom => write!(f, "custom({} objects)", self.weights.len()),
        }
    }
}

/// One simulated path from an empty pile to a cleanup.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Number of searches `l`.
    pub len: usize,
    pub search_list_cost: f64,
    pub search_pile_cost: f64,
    pub cleanup_cost: f64,
    /// `tau[j - 1]`: searches that found their object on a pile of size `j`.
    pub tau: Vec<usize>,
    /// `t_mark[k - 1]`: the search at which the pile reached size `k`.
    pub t_mark: Vec<usize>,
}

impl PathRecord {
    pub fn total_cost(&self) -> f64 {
        self.search_list_cost + self.search_pile_cost + self.cleanup_cost
    }

    /// `(S + C)/l`.
    pub fn cost_per_search(&self) -> f64 {
        self.total_cost() / self.len as f64
    }

    /// `sum tau = l - m`, marks strictly increasing from 1 to `l`.
    pub fn is_consistent(&self) -> bool {
        let m = self.t_mark.len();
        self.tau.len() + 1 == m
            && self.tau.iter().sum::<usize>() + m == self.len
            && self.t_mark.first() == Some(&1)
            && self.t_mark.last() == Some(&self.len)
            && self.t_mark.windows(2).all(|w| w[0] < w[1])
    }
}

/// Reusable per-worker state: pile membership stamped by path number so the
/// buffer is never cleared.
struct Simulator<'a> {
    m: usize,
    dist: &'a Distribution,
    list_costs: Vec<f64>,
    pile_costs: Vec<f64>,
    cleanup: f64,
    stamp: Vec<u64>,
    path_id: u64,
}

impl<'a> Simulator<'a> {
    fn new(n: usize, m: usize, model: Model, dist: &'a Distribution) -> Self {
        Simulator {
            m,
            dist,
            list_costs: (0..m).map(|j| list_cost(model, n, j)).collect(),
            pile_costs: (0..m).map(|j| if j == 0 { 0.0 } else { pile_cost(model, n, j) }).collect(),
            cleanup: cleanup(model, n, m),
            stamp: vec![0; n],
            path_id: 0,
        }
    }

    /// Runs one path, calling `on_repeat(j)` for every search that hits a pile
    /// of size `j`. Returns `(len, list cost, pile cost)`.
    fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, mut on_repeat: impl FnMut(usize, usize)) -> (usize, f64, f64) {
        self.path_id += 1;
        let id = self.path_id;
        let (mut pile, mut len) = (0usize, 0usize);
        let (mut list_cost, mut pile_cost) = (0.0, 0.0);
        while pile < self.m {
            len += 1;
            let x = self.dist.sample(rng);
            if self.stamp[x] == id {
                pile_cost += self.pile_costs[pile];
                on_repeat(pile, len);
            } else {
                list_cost += self.list_costs[pile];
                self.stamp[x] = id;
                pile += 1;
                on_repeat(0, len);
            }
        }
        (len, list_cost, pile_cost)
    }

    fn record<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PathRecord {
        let mut tau = vec![0usize; self.m - 1];
        let mut t_mark = Vec::with_capacity(self.m);
        let (len, list, pile) = self.run(rng, |j, t| {
            if j == 0 {
                t_mark.push(t);
            } else {
                tau[j - 1] += 1;
            }
        });
        PathRecord {
            len,
            search_list_cost: list,
            search_pile_cost: pile,
            cleanup_cost: self.cleanup,
            tau,
            t_mark,
        }
    }
}

/// Simulates one path with the caller's generator.
pub fn simulate_path<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    dist: &Distribution,
    model: Model,
    rng: &mut R,
) -> Result<PathRecord> {
    ensure!(m >= 1 && m <= n, "simulation needs 1 <= m <= n (m {m}, n {n})");
    ensure!(dist.n() == n, "distribution has {} objects, expected {n}", dist.n());
    Ok(Simulator::new(n, m, model, dist).record(rng))
}

/// Generator for chunk `chunk` of a run keyed by `(seed, n, m)`.
pub fn chunk_rng(seed: u64, n: usize, m: usize, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(n as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(m as u64).to_le_bytes());
    key[24..].copy_from_slice(b"shelfsim");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Streaming mean and centred second moment, merged pairwise.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / total as f64;
        self.m2 += other.m2 + d * d * (self.count as f64 * other.count as f64 / total as f64);
        self.count = total;
    }

    fn std_err(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `(S + C)/l`, whose mean is `F`.
    F,
    RecipLen,
    /// `tau_j / l`.
    TauRecip(usize),
    ExpectedLen,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::F => write!(f, "F"),
            Quantity::RecipLen => write!(f, "E[1/l]"),
            Quantity::TauRecip(j) => write!(f, "E[tau_{j}/l]"),
            Quantity::ExpectedLen => write!(f, "E[l]"),
        }
    }
}

/// Sample mean and standard error of one quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub quantity: Quantity,
    pub mean: f64,
    /// `sample_std / sqrt(trials)`.
    pub std_err: f64,
    pub trials: usize,
    pub seed: u64,
}

impl EstimateReport {
    fn new(quantity: Quantity, m: &Moments, seed: u64) -> Self {
        EstimateReport { quantity, mean: m.mean, std_err: m.std_err(), trials: m.count as usize, seed }
    }

    /// `|mean - value| <= k std_err`.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }

    /// Normal-approximation confidence interval `mean -/+ z std_err`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.std_err, self.mean + z * self.std_err)
    }
}

/// Every estimate a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEstimates {
    pub f: EstimateReport,
    pub recip_len: EstimateReport,
    /// `tau_recip[j - 1]` estimates `E[tau_j/l]`.
    pub tau_recip: Vec<EstimateReport>,
    pub expected_len: EstimateReport,
}

#[derive(Debug, Clone)]
struct ChunkStats {
    f: Moments,
    recip: Moments,
    tau: Vec<Moments>,
    len: Moments,
}

impl ChunkStats {
    fn new(m: usize, with_tau: bool) -> Self {
        let t = if with_tau { m - 1 } else { 0 };
        ChunkStats { f: Moments::default(), recip: Moments::default(), tau: vec![Moments::default(); t], len: Moments::default() }
    }

    fn merge(&mut self, other: &ChunkStats) {
        self.f.merge(&other.f);
        self.recip.merge(&other.recip);
        self.len.merge(&other.len);
        for (a, b) in self.tau.iter_mut().zip(&other.tau) {
            a.merge(b);
        }
    }
}

fn run_chunks(
    n: usize,
    m: usize,
    model: Model,
    dist: &Distribution,
    trials: usize,
    seed: u64,
    with_tau: bool,
) -> Result<RunEstimates> {
    ensure!(m >= 1 && m <= n, "simulation needs 1 <= m <= n (m {m}, n {n})");
    ensure!(dist.n() == n, "distribution has {} objects, expected {n}", dist.n());
    ensure!(trials >= MIN_TRIALS, "need at least {MIN_TRIALS} trials, got {trials}");
    let chunks = trials.div_ceil(CHUNK);
    let parts = map_range(0..chunks, |c| {
        let size = CHUNK.min(trials - c * CHUNK);
        let mut rng = chunk_rng(seed, n, m, c as u64);
        let mut sim = Simulator::new(n, m, model, dist);
        let mut stats = ChunkStats::new(m, with_tau);
        let mut tau = vec![0u32; m];
        for _ in 0..size {
            tau.iter_mut().for_each(|t| *t = 0);
            let (len, list, pile) = sim.run(&mut rng, |j, _| tau[j] += 1);
            let l = len as f64;
            stats.f.push((list + pile + sim.cleanup) / l);
            stats.recip.push(1.0 / l);
            stats.len.push(l);
            for (j, acc) in stats.tau.iter_mut().enumerate() {
                acc.push(tau[j + 1] as f64 / l);
            }
        }
        stats
    });
    let mut total = ChunkStats::new(m, with_tau);
    for p in &parts {
        total.merge(p);
    }
    Ok(RunEstimates {
        f: EstimateReport::new(Quantity::F, &total.f, seed),
        recip_len: EstimateReport::new(Quantity::RecipLen, &total.recip, seed),
        tau_recip: total
            .tau
            .iter()
            .enumerate()
            .map(|(j, t)| EstimateReport::new(Quantity::TauRecip(j + 1), t, seed))
            .collect(),
        expected_len: EstimateReport::new(Quantity::ExpectedLen, &total.len, seed),
    })
}

/// Estimates `F(m; n)` as the mean of `(S + C)/l` over `trials` paths.
pub fn estimate_f(
    n: usize,
    m: usize,
    model: Model,
    dist: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<EstimateReport> {
    Ok(run_chunks(n, m, model, dist, trials, seed, false)?.f)
}

/// Estimates `E[1/l]`, every `E[tau_j/l]` and `E[l]` (and `F` under model 4).
pub fn estimate_occupancy(n: usize, m: usize, dist: &Distribution, trials: usize, seed: u64) -> Result<RunEstimates> {
    run_chunks(n, m, Model::M4, dist, trials, seed, true)
}

/// Everything at once for a given model.
pub fn estimate_all(
    n: usize,
    m: usize,
    model: Model,
    dist: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<RunEstimates> {
    run_chunks(n, m, model, dist, trials, seed, true)
}

/// Minimizer of the simulated cost curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOptimum {
    pub m_opt: usize,
    /// `estimates[m - 1]` for `m = 1..=m_max`.
    pub estimates: Vec<EstimateReport>,
    /// Another `m` has a mean within one combined standard error of the
    /// minimum.
    pub tie: bool,
}

/// Scans `m = 1..=m_max` (default `n`) with `trials_per_m` paths each.
pub fn empirical_m_opt(
    n: usize,
    model: Model,
    dist: &Distribution,
    trials_per_m: usize,
    seed: u64,
    m_max: Option<usize>,
) -> Result<EmpiricalOptimum> {
    ensure!(n >= 2, "empirical optimum needs n >= 2, got {n}");
    let m_max = m_max.unwrap_or(n).clamp(1, n);
    let estimates = (1..=m_max)
        .map(|m| estimate_f(n, m, model, dist, trials_per_m, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, e) in estimates.iter().enumerate() {
        if e.mean < estimates[best].mean {
            best = i;
        }
    }
    let b = estimates[best];
    let tie = estimates
        .iter()
        .enumerate()
        .any(|(i, e)| i != best && (e.mean - b.mean).abs() <= (e.std_err.powi(2) + b.std_err.powi(2)).sqrt());
    Ok(EmpiricalOptimum { m_opt: best + 1, estimates, tie })
}
