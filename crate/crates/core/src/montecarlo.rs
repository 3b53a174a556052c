//! Stochastic simulation of individual Sisyphus walkers with seeded,
//! stream-parallel reproducibility.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::WalkerRng;
use crate::series::{CheckpointRule, Method, Sample, SeriesMeta, SurvivalSeries};
use crate::trajectory::TrapTrajectory;
use crate::types::JumpProbability;

/// Default ceiling on `n_walkers * t_max` before a run is refused.
pub const DEFAULT_TICK_BUDGET: u128 = 100_000_000_000_000; // 1e14

/// Fate of a single simulated walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkerFate {
    /// Absorbed at this tick (the first `t` with `x(t) >= x_T(t)`).
    Absorbed(u64),
    /// Still alive at `t_max` (censored: counted as surviving for all
    /// recorded ticks, with no claim about its later fate).
    Survived,
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub q: JumpProbability,
    pub traj: TrapTrajectory,
    pub t_max: u64,
    pub n_walkers: u64,
    pub seed: u64,
    pub n_streams: u32,
    pub checkpoints: CheckpointRule,
    /// Work ceiling on `n_walkers * t_max`.
    pub tick_budget: u128,
}

impl McConfig {
    pub fn new(
        q: JumpProbability,
        traj: TrapTrajectory,
        t_max: u64,
        n_walkers: u64,
        seed: u64,
    ) -> Self {
        Self {
            q,
            traj,
            t_max,
            n_walkers,
            seed,
            n_streams: 8,
            checkpoints: CheckpointRule::log_default(),
            tick_budget: DEFAULT_TICK_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::InvalidConfig("t_max must be >= 1".into()));
        }
        if self.n_walkers < 1 {
            return Err(Error::InvalidConfig("n_walkers must be >= 1".into()));
        }
        if self.n_streams < 1 {
            return Err(Error::InvalidConfig("n_streams must be >= 1".into()));
        }
        self.checkpoints.validate(self.t_max)?;
        if let Some(h) = self.traj.horizon() {
            if h < self.t_max {
                return Err(Error::InvalidConfig(format!(
                    "trajectory is defined up to tick {h} but t_max is {}",
                    self.t_max
                )));
            }
        }
        let work = self.n_walkers as u128 * self.t_max as u128;
        if work > self.tick_budget {
            return Err(Error::BudgetExceeded(format!(
                "n_walkers * t_max = {work} exceeds the budget of {}; split the run into \
                 seeded batches with smaller t_max (checkpoints are directly comparable \
                 across batches) or raise tick_budget explicitly",
                self.tick_budget
            )));
        }
        Ok(())
    }
}

/// Naive per-tick walker: advance with probability q, restart at the origin
/// otherwise; absorbed at the first tick `t` with `x(t) >= x_T(t)`.
///
/// The walker starts at the origin, where it is alive by construction
/// (`x_T(t) >= 1 > 0`).
pub fn simulate_walker(
    q: JumpProbability,
    traj: &TrapTrajectory,
    t_max: u64,
    rng: &mut WalkerRng,
) -> Result<WalkerFate> {
    let qv = q.get();
    let mut x: u64 = 0;
    for t in 1..=t_max {
        if rng.bernoulli(qv) {
            x += 1;
            if x >= traj.position(t)? {
                return Ok(WalkerFate::Absorbed(t));
            }
        } else {
            x = 0;
        }
    }
    Ok(WalkerFate::Survived)
}

/// Run-length walker, statistically identical to [`simulate_walker`].
///
/// A Sisyphus trajectory is a sequence of rightward runs separated by
/// resets; run lengths are geometric with `P(R >= r) = q^r`, so each run
/// needs a single uniform draw (`R = floor(ln u / ln q)`). Absorption within
/// a run starting at the origin at tick `t0` happens at the least `j >= 1`
/// with `j >= x_T(t0 + j)`, found by a monotone fixed-point jump.
pub fn fast_run_sampler(
    q: JumpProbability,
    traj: &TrapTrajectory,
    t_max: u64,
    rng: &mut WalkerRng,
) -> Result<WalkerFate> {
    let ln_q = q.get().ln();
    let mut t0: u64 = 0; // tick at which the walker sits at the origin
    loop {
        let run = ((rng.uniform_open().ln() / ln_q).floor() as u64).min(t_max - t0);

        // Least j with j >= x_T(t0 + j), or None within the horizon.
        let mut j: u64 = 1;
        let absorb_at = loop {
            if t0 + j > t_max {
                break None;
            }
            let x = traj.position(t0 + j)?;
            if j >= x {
                break Some(j);
            }
            // every j' in [j, x) also fails since x_T is non-decreasing
            j = x;
        };

        if let Some(j) = absorb_at {
            if j <= run {
                return Ok(WalkerFate::Absorbed(t0 + j));
            }
        }
        // Run ends unabsorbed; the reset consumes one further tick.
        if t0 + run + 1 > t_max {
            return Ok(WalkerFate::Survived);
        }
        t0 += run + 1;
    }
}

/// Absorption counts per checkpoint bucket, plus the censored remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionHistogram {
    /// Upper edge of each bucket: bucket `i` counts absorption ticks in
    /// `(ticks[i-1], ticks[i]]` (the first bucket starts above 0).
    pub bucket_ticks: Vec<u64>,
    pub counts: Vec<u64>,
    /// Walkers still alive at `t_max`.
    pub censored: u64,
}

/// Result of a Monte Carlo survival run.
#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub series: SurvivalSeries,
    pub histogram: AbsorptionHistogram,
}

/// Empirical survival with binomial standard errors.
///
/// Deterministic for fixed `(seed, n_streams)` regardless of execution order
/// or worker count: walkers are partitioned into `n_streams` contiguous
/// blocks, each walker draws from its own `(seed, stream, walker)` stream,
/// and per-stream integer tallies are merged in fixed stream order.
///
/// Uses the run-length sampler internally (equal in distribution to the
/// naive stepper, validated by the KS suite).
pub fn survival_mc(cfg: &McConfig) -> Result<McResult> {
    survival_mc_with(cfg, Method::McSisyphus, fast_run_sampler)
}

/// Shared driver for Sisyphus and ordinary-walk Monte Carlo.
pub(crate) fn survival_mc_with<F>(
    cfg: &McConfig,
    method: Method,
    walker: F,
) -> Result<McResult>
where
    F: Fn(JumpProbability, &TrapTrajectory, u64, &mut WalkerRng) -> Result<WalkerFate> + Sync,
{
    cfg.validate()?;
    let grid = cfg.checkpoints.ticks(cfg.t_max);
    // Buckets are indexed by checkpoint; grid[0] = 0 can hold no absorption
    // (x_T >= 1), so counting starts at grid[1].
    let n_buckets = grid.len();

    let per_stream = cfg.n_walkers / cfg.n_streams as u64;
    let remainder = cfg.n_walkers % cfg.n_streams as u64;

    let tallies: Vec<Result<(Vec<u64>, u64)>> = (0..cfg.n_streams)
        .into_par_iter()
        .map(|stream| {
            let count = per_stream + if (stream as u64) < remainder { 1 } else { 0 };
            let mut buckets = vec![0u64; n_buckets];
            let mut censored = 0u64;
            for walker_id in 0..count {
                let mut rng = WalkerRng::for_walker(cfg.seed, stream, walker_id);
                match walker(cfg.q, &cfg.traj, cfg.t_max, &mut rng)? {
                    WalkerFate::Absorbed(t) => {
                        let idx = grid.partition_point(|&cp| cp < t);
                        buckets[idx] += 1;
                    }
                    WalkerFate::Survived => censored += 1,
                }
            }
            Ok((buckets, censored))
        })
        .collect();

    let mut buckets = vec![0u64; n_buckets];
    let mut censored = 0u64;
    for t in tallies {
        let (b, c) = t?;
        for (acc, v) in buckets.iter_mut().zip(b) {
            *acc += v;
        }
        censored += c;
    }

    let n = cfg.n_walkers;
    let nf = n as f64;
    let mut samples = Vec::with_capacity(n_buckets);
    let mut absorbed_so_far = 0u64;
    for (i, &t) in grid.iter().enumerate() {
        absorbed_so_far += buckets[i];
        let alive = n - absorbed_so_far;
        let s = alive as f64 / nf;
        let stderr = (s * (1.0 - s) / nf).sqrt();
        samples.push(Sample {
            t,
            s,
            stderr: Some(stderr),
        });
    }

    let mut meta = SeriesMeta::new(method, cfg.q.get(), cfg.traj.id());
    meta.seed = Some(cfg.seed);
    meta.n_streams = Some(cfg.n_streams);
    meta.n_walkers = Some(n);

    Ok(McResult {
        series: SurvivalSeries::new(samples, meta)?,
        histogram: AbsorptionHistogram {
            bucket_ticks: grid,
            counts: buckets,
            censored,
        },
    })
}
