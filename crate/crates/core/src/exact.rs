//! Deterministic survival computation: exact occupancy propagation of the
//! master equation, the survival recurrence evaluator, and exact static-trap
//! decay rates.

use crate::error::{Error, Result};
use crate::series::{
    CheckpointRule, Method, OccupancyState, Sample, SeriesMeta, SurvivalSeries,
};
use crate::stats::{compensated_sum, KahanSum};
use crate::trajectory::TrapTrajectory;
use crate::types::JumpProbability;

/// Propagation stops once survival drops below this floor.
pub const SURVIVAL_FLOOR: f64 = 1e-300;

/// Largest occupancy vector the exact engine will allocate.
const MAX_STATE_SITES: u64 = 1 << 26;

/// Configuration for a deterministic survival run.
#[derive(Debug, Clone)]
pub struct PropagationConfig {
    pub q: JumpProbability,
    pub traj: TrapTrajectory,
    pub t_max: u64,
    pub checkpoints: CheckpointRule,
}

impl PropagationConfig {
    pub fn new(
        q: JumpProbability,
        traj: TrapTrajectory,
        t_max: u64,
        checkpoints: CheckpointRule,
    ) -> Result<Self> {
        let cfg = Self {
            q,
            traj,
            t_max,
            checkpoints,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::InvalidConfig("t_max must be >= 1".into()));
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
        if let TrapTrajectory::Table { positions } = &self.traj {
            // Tabulated positions are the one variant whose monotonicity is
            // not structural; scan what the run will use.
            let mut prev = 0u64;
            for (t, &p) in positions.iter().take(self.t_max as usize + 1).enumerate() {
                if p == 0 {
                    return Err(Error::InvalidTrajectory(format!(
                        "table position 0 at tick {t}"
                    )));
                }
                if p < prev {
                    return Err(Error::InvalidTrajectory(format!(
                        "table position decreases at tick {t}"
                    )));
                }
                prev = p;
            }
        }
        let final_x = self.traj.position(self.t_max)?;
        if final_x > MAX_STATE_SITES {
            return Err(Error::InvalidConfig(format!(
                "trap reaches position {final_x} at t_max; occupancy state would exceed \
                 {MAX_STATE_SITES} sites"
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Exact occupancy propagation
// ---------------------------------------------------------------------------

/// One exact step of the master equation implied by the jump rule.
///
/// Restart flux: `N'_0 = (1-q) S(t)`. Shift flux: `N'_k = q N_{k-1}` for
/// `1 <= k < x_T(t+1)`. The frontier mass is absorbed only when the trap did
/// not advance this tick (a walker is absorbed at tick t+1 iff its position
/// reaches the trap's position at t+1); a receding trap outruns the single
/// lattice step, so `d = 0` on advance ticks.
///
/// Returns the new state and the probability mass absorbed this tick.
pub fn propagate_step(
    state: &OccupancyState,
    q: JumpProbability,
    traj: &TrapTrajectory,
) -> Result<(OccupancyState, f64)> {
    let x_cur = state.mass.len() as u64;
    let x_next = traj.position(state.t + 1)?;
    if x_next < x_cur {
        return Err(Error::InvalidTrajectory(format!(
            "trap position decreases from {x_cur} to {x_next} at tick {}",
            state.t + 1
        )));
    }
    let survival = state.survival();
    let qv = q.get();
    let d = if x_next == x_cur {
        qv * state.mass[x_cur as usize - 1]
    } else {
        0.0
    };
    let mut mass = vec![0.0; x_next as usize];
    mass[0] = q.complement() * survival;
    let keep = (x_next as usize - 1).min(x_cur as usize);
    for k in 1..=keep {
        mass[k] = qv * state.mass[k - 1];
    }
    Ok((
        OccupancyState {
            t: state.t + 1,
            mass,
            absorbed_cumulative: state.absorbed_cumulative + d,
        },
        d,
    ))
}

/// In-place stepping engine behind [`survival_exact`]. Exposed so callers can
/// inspect occupancy snapshots and absorbed mass tick by tick.
pub struct ExactPropagator {
    q: JumpProbability,
    traj: TrapTrajectory,
    t: u64,
    state: Vec<f64>,
    absorbed: KahanSum,
    survival: f64,
}

impl ExactPropagator {
    pub fn new(q: JumpProbability, traj: TrapTrajectory) -> Result<Self> {
        let x0 = traj.position(0)?;
        if x0 == 0 {
            return Err(Error::InvalidTrajectory(
                "trap position must be >= 1 at t = 0".into(),
            ));
        }
        if x0 > MAX_STATE_SITES {
            return Err(Error::InvalidConfig(format!(
                "initial occupancy state of {x0} sites exceeds {MAX_STATE_SITES}"
            )));
        }
        let mut state = vec![0.0; x0 as usize];
        state[0] = 1.0;
        Ok(Self {
            q,
            traj,
            t: 0,
            state,
            absorbed: KahanSum::new(),
            survival: 1.0,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Current surviving probability.
    ///
    /// Computed from the occupancy vector, whose entries are built purely
    /// multiplicatively; this keeps relative accuracy all the way into deep
    /// tails, where `1 - absorbed` would bottom out at an absolute noise
    /// floor. While no mass has been absorbed the total is pinned at exactly
    /// 1 (the transfer matrix is column-stochastic away from the frontier).
    pub fn survival(&self) -> f64 {
        self.survival
    }

    pub fn absorbed_cumulative(&self) -> f64 {
        self.absorbed.total()
    }

    pub fn snapshot(&self) -> OccupancyState {
        OccupancyState {
            t: self.t,
            mass: self.state.clone(),
            absorbed_cumulative: self.absorbed.total(),
        }
    }

    /// Advance one tick; returns the mass absorbed on this tick.
    pub fn step(&mut self) -> Result<f64> {
        let x_cur = self.state.len() as u64;
        let x_next = self.traj.position(self.t + 1)?;
        if x_next < x_cur {
            return Err(Error::InvalidTrajectory(format!(
                "trap position decreases from {x_cur} to {x_next} at tick {}",
                self.t + 1
            )));
        }
        let qv = self.q.get();
        let d = if x_next == x_cur {
            qv * self.state[x_cur as usize - 1]
        } else {
            0.0
        };
        self.state.resize(x_next as usize, 0.0);
        for k in (1..x_next as usize).rev() {
            self.state[k] = qv * self.state[k - 1];
        }
        self.state[0] = self.q.complement() * self.survival;
        self.absorbed.add(d);
        self.t += 1;
        self.survival = if self.absorbed.total() == 0.0 {
            1.0
        } else {
            compensated_sum(&self.state)
        };
        Ok(d)
    }
}

/// Exact survival probability at the configured checkpoints.
pub fn survival_exact(cfg: &PropagationConfig) -> Result<SurvivalSeries> {
    cfg.validate()?;
    let mut engine = ExactPropagator::new(cfg.q, cfg.traj.clone())?;
    let grid = cfg.checkpoints.ticks(cfg.t_max);
    let mut samples = Vec::with_capacity(grid.len());
    let mut meta = SeriesMeta::new(Method::Exact, cfg.q.get(), cfg.traj.id());

    let mut next_cp = 0usize;
    if grid[next_cp] == 0 {
        samples.push(Sample {
            t: 0,
            s: 1.0,
            stderr: None,
        });
        next_cp += 1;
    }
    for t in 1..=cfg.t_max {
        engine.step()?;
        let s = engine.survival();
        if s < SURVIVAL_FLOOR {
            meta.stopped_at = Some(t);
            break;
        }
        if next_cp < grid.len() && grid[next_cp] == t {
            samples.push(Sample {
                t,
                s,
                stderr: None,
            });
            next_cp += 1;
        }
    }
    SurvivalSeries::new(samples, meta)
}

// ---------------------------------------------------------------------------
// Survival recurrence evaluator
// ---------------------------------------------------------------------------

/// Evaluates the survival recurrence
/// `S(t) = S(t-1) - q^{x_T(t)} (1-q) S(t - x_T(t) - 1)`
/// seeded with `S = 1` on the unreachable segment and
/// `S(t*) = 1 - q^{x_T(t*)}` at the first tick `t*` with `t >= x_T(t)`.
///
/// For static traps the output equals [`survival_exact`] to better than 1e-12
/// relative; for moving traps the recurrence is an approximation whose
/// deviation from the propagation oracle is itself an observable.
///
/// Static traps are evaluated through the algebraically equivalent form
/// `S(t) = (1-q) * sum_{k=1..X} q^{k-1} S(t-k)` (the recurrence with the
/// non-physical factor `(lambda - q)` of its characteristic polynomial
/// removed). The literal form is numerically unstable whenever survival
/// decays faster than `q^t` -- rounding noise excites the spurious root and
/// overtakes the signal -- while the rearranged form has only positive
/// coefficients and no cancellation. Moving traps decay slower than `q^t`,
/// so the literal evaluation is stable exactly where it is meaningful.
pub fn survival_recurrence(cfg: &PropagationConfig) -> Result<SurvivalSeries> {
    cfg.validate()?;
    let x_first = cfg.traj.position(0)?;
    let x_last = cfg.traj.position(cfg.t_max)?;
    if x_first == x_last {
        recurrence_static(cfg, x_first)
    } else {
        recurrence_moving(cfg)
    }
}

fn recurrence_static(cfg: &PropagationConfig, x_trap: u64) -> Result<SurvivalSeries> {
    let q = cfg.q.get();
    let x = x_trap as usize;
    let qpow: Vec<f64> = (0..x).map(|k| q.powi(k as i32)).collect();
    let restart = cfg.q.complement();

    let mut ring = vec![1.0; x];
    let grid = cfg.checkpoints.ticks(cfg.t_max);
    let mut samples = Vec::with_capacity(grid.len());
    let mut meta = SeriesMeta::new(Method::Recurrence, q, cfg.traj.id());
    let mut next_cp = 0usize;
    let mut record = |t: u64, s: f64, next_cp: &mut usize| {
        if *next_cp < grid.len() && grid[*next_cp] == t {
            samples.push(Sample {
                t,
                s,
                stderr: None,
            });
            *next_cp += 1;
        }
    };

    for t in 0..=cfg.t_max {
        let s = if t < x_trap {
            1.0
        } else {
            let mut acc = 0.0;
            for k in 1..=x {
                acc += qpow[k - 1] * ring[(t as usize - k) % x];
            }
            restart * acc
        };
        if s < SURVIVAL_FLOOR {
            meta.stopped_at = Some(t);
            break;
        }
        if x > 0 {
            ring[t as usize % x] = s;
        }
        record(t, s, &mut next_cp);
    }
    SurvivalSeries::new(samples, meta)
}

fn recurrence_moving(cfg: &PropagationConfig) -> Result<SurvivalSeries> {
    let q = cfg.q.get();
    let x_last = cfg.traj.position(cfg.t_max)?;
    let window = x_last as usize + 2;
    let mut ring = vec![1.0; window];

    let grid = cfg.checkpoints.ticks(cfg.t_max);
    let mut samples = Vec::with_capacity(grid.len());
    let mut meta = SeriesMeta::new(Method::Recurrence, q, cfg.traj.id());
    let mut next_cp = 0usize;

    let mut t_star: Option<u64> = None;
    let mut absorbed = KahanSum::new();

    for t in 0..=cfg.t_max {
        let x = cfg.traj.position(t)?;
        let s = match t_star {
            None => {
                if t >= x {
                    t_star = Some(t);
                    absorbed.add(q.powi(x as i32));
                    absorbed.one_minus()
                } else {
                    1.0
                }
            }
            Some(ts) => {
                // Lookback index t - x_T(t) - 1; anything before t* sits on
                // the S = 1 initial segment.
                let lag = x + 1;
                let back = if t >= lag {
                    let tau = t - lag;
                    if tau < ts {
                        1.0
                    } else {
                        ring[(tau % window as u64) as usize]
                    }
                } else {
                    1.0
                };
                absorbed.add(q.powi(x as i32) * cfg.q.complement() * back);
                absorbed.one_minus()
            }
        };
        if s < SURVIVAL_FLOOR {
            meta.stopped_at = Some(t);
            break;
        }
        ring[(t % window as u64) as usize] = s;
        if next_cp < grid.len() && grid[next_cp] == t {
            samples.push(Sample {
                t,
                s,
                stderr: None,
            });
            next_cp += 1;
        }
    }
    SurvivalSeries::new(samples, meta)
}

// ---------------------------------------------------------------------------
// Exact static-trap decay rate
// ---------------------------------------------------------------------------

/// Exact asymptotic decay rate (per tick, nats) of the survival probability
/// with a static trap at `x_trap`.
///
/// The survival recurrence's characteristic polynomial
/// `lambda^{X+1} - lambda^X + q^X (1-q)` always carries `lambda = q` as a
/// spurious factor (the transfer matrix has only X eigenvalues); its deflated
/// quotient `lambda^X - (1-q)(lambda^{X-1} + q lambda^{X-2} + ... + q^{X-1})`
/// has exactly one positive real root, the Perron root, which sets the decay.
/// Taking the largest root of the undeflated polynomial instead would return
/// `-ln q` whenever `q` exceeds the Perron root and disagree with the
/// propagated survival.
pub fn static_decay_rate(q: JumpProbability, x_trap: u64) -> Result<f64> {
    if x_trap == 0 {
        return Err(Error::Domain("trap position must be >= 1".into()));
    }
    if x_trap > 1_000_000 {
        return Err(Error::Domain(format!(
            "trap position {x_trap} too large for the rate solver"
        )));
    }
    let qv = q.get();
    let x = x_trap as usize;

    // p(lambda), Horner form.
    let poly = |lam: f64| -> f64 {
        let mut acc = 0.0;
        let mut qk = 1.0;
        for _ in 0..x {
            acc = acc * lam + qk;
            qk *= qv;
        }
        lam.powi(x as i32) - q.complement() * acc
    };

    // The Perron root is the only positive real root: p < 0 on (0, root),
    // p > 0 on (root, 1].
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if poly(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let eps = 1.0 - lambda;

    if eps < 1e-4 {
        // Slow-decay regime: 1 - lambda from bisection carries only absolute
        // accuracy. Refine via the fixed point eps (1-eps)^X = (1-q) q^X,
        // which converges here and is evaluated with full relative accuracy.
        let c = q.complement() * qv.powi(x as i32);
        if c <= 0.0 {
            return Ok(0.0); // q^X underflowed; the rate is below resolution
        }
        let mut e = c;
        for _ in 0..64 {
            let next = c / ((x as f64) * (-e).ln_1p()).exp();
            if (next - e).abs() <= 1e-16 * e {
                e = next;
                break;
            }
            e = next;
        }
        Ok(-(-e).ln_1p())
    } else {
        Ok(-lambda.ln())
    }
}
