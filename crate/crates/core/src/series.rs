//! Survival series, occupancy snapshots, and checkpoint grids.

use crate::error::{Error, Result};
use crate::stats::compensated_sum;

/// Which engine produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Recurrence,
    McSisyphus,
    McOrdinary,
    Synthetic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Recurrence => "recurrence",
            Method::McSisyphus => "mc-sisyphus",
            Method::McOrdinary => "mc-ordinary",
            Method::Synthetic => "synthetic",
        }
    }
}

/// One recorded checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: u64,
    pub s: f64,
    /// Binomial standard error for Monte Carlo series, `None` for exact ones.
    pub stderr: Option<f64>,
}

/// Provenance carried with every series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub method: Method,
    pub q: f64,
    pub trajectory: String,
    pub seed: Option<u64>,
    pub n_streams: Option<u32>,
    pub n_walkers: Option<u64>,
    /// Set when propagation stopped before `t_max` (survival underflow).
    pub stopped_at: Option<u64>,
}

impl SeriesMeta {
    pub fn new(method: Method, q: f64, trajectory: String) -> Self {
        Self {
            method,
            q,
            trajectory,
            seed: None,
            n_streams: None,
            n_walkers: None,
            stopped_at: None,
        }
    }
}

/// Ordered survival samples `(t, s)` with provenance.
///
/// Invariants enforced at construction: the first sample is `(0, 1)`, ticks
/// strictly increase, values lie in [0, 1] and never increase.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries {
    samples: Vec<Sample>,
    meta: SeriesMeta,
}

impl SurvivalSeries {
    pub fn new(samples: Vec<Sample>, meta: SeriesMeta) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidSeries("series is empty".into()))?;
        if first.t != 0 || first.s != 1.0 {
            return Err(Error::InvalidSeries(format!(
                "series must start with s(0) = 1, got s({}) = {}",
                first.t, first.s
            )));
        }
        for w in samples.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::InvalidSeries(format!(
                    "ticks must strictly increase: {} then {}",
                    w[0].t, w[1].t
                )));
            }
            if w[1].s > w[0].s {
                return Err(Error::InvalidSeries(format!(
                    "survival must be non-increasing: s({}) = {} < s({}) = {}",
                    w[0].t, w[0].s, w[1].t, w[1].s
                )));
            }
        }
        if samples.iter().any(|p| !(0.0..=1.0).contains(&p.s)) {
            return Err(Error::InvalidSeries(
                "survival values must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { samples, meta })
    }

    /// Synthetic series from a closed form, for fitting tests and fixtures.
    /// A `(0, 1)` head sample is prepended; `f` is sampled at the given
    /// ticks, which must be >= 1 and produce a valid series.
    pub fn synthetic<F: Fn(f64) -> f64>(ticks: &[u64], f: F) -> Result<Self> {
        let mut samples = vec![Sample {
            t: 0,
            s: 1.0,
            stderr: None,
        }];
        for &t in ticks {
            samples.push(Sample {
                t,
                s: f(t as f64),
                stderr: None,
            });
        }
        Self::new(
            samples,
            SeriesMeta::new(Method::Synthetic, f64::NAN, "synthetic".into()),
        )
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("series is never empty")
    }

    /// Survival at an exact recorded tick, if present.
    pub fn at(&self, t: u64) -> Option<f64> {
        self.samples
            .binary_search_by_key(&t, |p| p.t)
            .ok()
            .map(|i| self.samples[i].s)
    }

    /// Log-log interpolated survival at arbitrary `t` within the recorded
    /// range. Errors outside the range or where interpolation would touch a
    /// zero survival value.
    pub fn interpolate_log(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("interpolation needs t >= 1, got {t}")));
        }
        let lo = self.samples[0].t as f64;
        let hi = self.last().t as f64;
        if t < lo.max(1.0) || t > hi {
            return Err(Error::Domain(format!(
                "t = {t} outside recorded range [{lo}, {hi}]"
            )));
        }
        let idx = self.samples.partition_point(|p| (p.t as f64) < t);
        if idx < self.samples.len() && (self.samples[idx].t as f64) == t {
            let s = self.samples[idx].s;
            if s <= 0.0 {
                return Err(Error::Domain(format!("survival is zero at t = {t}")));
            }
            return Ok(s.ln());
        }
        let a = &self.samples[idx - 1];
        let b = &self.samples[idx];
        if a.s <= 0.0 || b.s <= 0.0 || a.t == 0 {
            return Err(Error::Domain(format!(
                "cannot log-interpolate near t = {t} (zero survival or t = 0 bracket)"
            )));
        }
        let w = (t.ln() - (a.t as f64).ln()) / ((b.t as f64).ln() - (a.t as f64).ln());
        Ok(a.s.ln() * (1.0 - w) + b.s.ln() * w)
    }
}

/// Exact probability mass over the surviving lattice sites `0..x_T(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyState {
    pub t: u64,
    /// Entry `k` is the probability mass at site `k`, for `0 <= k < x_T(t)`.
    pub mass: Vec<f64>,
    pub absorbed_cumulative: f64,
}

impl OccupancyState {
    /// Surviving probability, `sum_k N_k(t)`.
    pub fn survival(&self) -> f64 {
        compensated_sum(&self.mass)
    }

    /// Absolute mass-conservation defect `|sum(mass) + absorbed - 1|`.
    pub fn conservation_defect(&self) -> f64 {
        (self.survival() + self.absorbed_cumulative - 1.0).abs()
    }

    /// Accumulation tolerance for the conservation defect: 1e-12 per 1e6
    /// propagation steps, floored at 1e-14 for short runs.
    pub fn conservation_tolerance(t: u64) -> f64 {
        1e-14 + 1e-12 * (t as f64 / 1e6)
    }
}

/// Which ticks an engine records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckpointRule {
    /// Every tick. Only allowed up to `t_max = 1e5`; beyond that full
    /// per-tick storage is refused in favor of log spacing.
    Every,
    /// Log-spaced ticks with the given ratio (> 1), always including 0, 1 and
    /// `t_max`. Early ticks are dense because spacing never drops below 1.
    LogSpaced { ratio: f64 },
}

impl CheckpointRule {
    pub const DEFAULT_RATIO: f64 = 1.05;
    pub const EVERY_TICK_CAP: u64 = 100_000;

    pub fn log_default() -> Self {
        CheckpointRule::LogSpaced {
            ratio: Self::DEFAULT_RATIO,
        }
    }

    pub fn validate(&self, t_max: u64) -> Result<()> {
        match self {
            CheckpointRule::Every => {
                if t_max > Self::EVERY_TICK_CAP {
                    Err(Error::InvalidConfig(format!(
                        "per-tick storage is limited to t_max <= {}; use log-spaced checkpoints",
                        Self::EVERY_TICK_CAP
                    )))
                } else {
                    Ok(())
                }
            }
            CheckpointRule::LogSpaced { ratio } => {
                if ratio.is_finite() && *ratio > 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "log-spaced checkpoint ratio must be > 1, got {ratio}"
                    )))
                }
            }
        }
    }

    /// The sorted checkpoint grid over `[0, t_max]`.
    pub fn ticks(&self, t_max: u64) -> Vec<u64> {
        match self {
            CheckpointRule::Every => (0..=t_max).collect(),
            CheckpointRule::LogSpaced { ratio } => {
                let mut out = vec![0u64];
                let mut t = 1u64;
                while t < t_max {
                    out.push(t);
                    let next = ((t as f64) * ratio).floor() as u64;
                    t = next.max(t + 1);
                }
                if t_max >= 1 {
                    out.push(t_max);
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_invariants_enforced() {
        let meta = SeriesMeta::new(Method::Synthetic, 0.5, "test".into());
        let mk = |pts: &[(u64, f64)]| {
            SurvivalSeries::new(
                pts.iter()
                    .map(|&(t, s)| Sample { t, s, stderr: None })
                    .collect(),
                meta.clone(),
            )
        };
        assert!(mk(&[(0, 1.0), (1, 0.5), (2, 0.25)]).is_ok());
        assert!(mk(&[(1, 1.0), (2, 0.5)]).is_err()); // missing t = 0
        assert!(mk(&[(0, 0.9)]).is_err()); // s(0) != 1
        assert!(mk(&[(0, 1.0), (1, 0.5), (1, 0.4)]).is_err()); // tie tick
        assert!(mk(&[(0, 1.0), (1, 0.5), (2, 0.6)]).is_err()); // increase
    }

    #[test]
    fn checkpoint_grids() {
        let all = CheckpointRule::Every.ticks(4);
        assert_eq!(all, vec![0, 1, 2, 3, 4]);

        let log = CheckpointRule::log_default().ticks(1000);
        assert_eq!(log[0], 0);
        assert_eq!(log[1], 1);
        assert_eq!(*log.last().unwrap(), 1000);
        for w in log.windows(2) {
            assert!(w[1] > w[0]);
        }
        // early grid is dense (ratio 1.05 < (t+1)/t until t = 20)
        assert!(log.contains(&7));

        assert!(CheckpointRule::Every.validate(100_001).is_err());
        assert!(CheckpointRule::LogSpaced { ratio: 1.0 }.validate(10).is_err());
    }

    #[test]
    fn log_interpolation() {
        let ticks: Vec<u64> = vec![1, 2, 4, 8, 16, 32];
        let series = SurvivalSeries::synthetic(&ticks, |t| t.powf(-0.5)).unwrap();
        // exact checkpoint
        assert!((series.interpolate_log(4.0).unwrap() - (-0.5 * 4f64.ln())).abs() < 1e-12);
        // between checkpoints, a pure power law interpolates exactly in
        // log-log space
        assert!((series.interpolate_log(11.0).unwrap() - (-0.5 * 11f64.ln())).abs() < 1e-12);
        assert!(series.interpolate_log(64.0).is_err());
    }
}
