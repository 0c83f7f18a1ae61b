//! Sampling on the standard simplex and the Monte Carlo driver shared by the
//! stochastic oracles.
//!
//! The simplex is `{(s_0, …, s_n) : s_i ≥ 0, Σ s_i = 1}` with the measure
//! `d^n s` of total volume `1/n!`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::exec::{chunk_ranges, Exec};

/// Samples per independently seeded stream.
pub const MC_CHUNK: u64 = 4096;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Whether `reference` lies within `k` standard errors of the estimate.
    pub fn covers(&self, reference: f64, k: f64) -> bool {
        (self.estimate - reference).abs() <= k * self.stderr
    }
}

/// Welford accumulator, mergeable with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * (self.count as f64) * (other.count as f64) / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// ChaCha8 stream `stream` of the generator seeded by `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point on the simplex (`out.len()` coordinates) from the spacings
/// of sorted uniforms. `work` is scratch space.
pub fn sample_uniform_simplex<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64], work: &mut Vec<f64>) {
    let n = out.len() - 1;
    work.clear();
    work.extend((0..n).map(|_| rng.random::<f64>()));
    work.sort_by(|a, b| a.total_cmp(b));
    let mut prev = 0.0;
    for (o, &u) in out.iter_mut().zip(work.iter()) {
        *o = u - prev;
        prev = u;
    }
    out[n] = 1.0 - prev;
}

/// Dirichlet sampler built from normalised Gamma variates.
#[derive(Debug, Clone)]
pub struct DirichletSampler {
    gammas: Vec<Gamma<f64>>,
    alphas: Vec<f64>,
    log_norm: f64,
}

impl DirichletSampler {
    pub fn new(alphas: &[f64]) -> Result<Self> {
        if alphas.len() < 2 || alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::OutOfRange(
                "Dirichlet needs at least two positive parameters".into(),
            ));
        }
        let gammas = alphas
            .iter()
            .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::OutOfRange(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let sum: f64 = alphas.iter().sum();
        let log_norm = statrs::function::gamma::ln_gamma(sum)
            - alphas
                .iter()
                .map(|&a| statrs::function::gamma::ln_gamma(a))
                .sum::<f64>();
        Ok(Self {
            gammas,
            alphas: alphas.to_vec(),
            log_norm,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut total = 0.0;
        for (o, g) in out.iter_mut().zip(&self.gammas) {
            *o = g.sample(rng).max(f64::MIN_POSITIVE);
            total += *o;
        }
        for o in out.iter_mut() {
            *o /= total;
        }
    }

    /// Log density with respect to `d^n s` on the simplex.
    pub fn log_pdf(&self, s: &[f64]) -> f64 {
        self.log_norm
            + s.iter()
                .zip(&self.alphas)
                .map(|(&x, &a)| (a - 1.0) * x.ln())
                .sum::<f64>()
    }
}

/// Runs `samples` draws of `draw` split over fixed, independently seeded
/// chunks and merges the `K` running statistics in chunk order.
pub(crate) fn run_chunked<const K: usize, S, I, F>(
    exec: Exec,
    samples: u64,
    seed: u64,
    init: I,
    draw: F,
) -> [RunningStats; K]
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> [f64; K] + Sync + Send,
{
    let ranges = chunk_ranges(samples, MC_CHUNK);
    let partials = exec.map_chunks(ranges.len(), |c| {
        let (start, end) = ranges[c];
        let mut rng = seeded_rng(seed, c as u64);
        let mut state = init();
        let mut stats = [RunningStats::default(); K];
        for _ in start..end {
            let values = draw(&mut state, &mut rng);
            for (s, v) in stats.iter_mut().zip(values) {
                s.push(v);
            }
        }
        stats
    });
    let mut total = [RunningStats::default(); K];
    for p in &partials {
        for (t, s) in total.iter_mut().zip(p) {
            t.merge(s);
        }
    }
    total
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
