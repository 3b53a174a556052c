//! Trap trajectories: integer-valued, non-decreasing trap positions on the
//! lattice. The trap never approaches the walkers.

use crate::error::{Error, Result};
use crate::types::PowerLawDesign;

/// How the continuous law `a ln t + b` is mapped onto lattice positions.
///
/// The map is applied pointwise and clamped below at 1. `Nearest` is the
/// default: it is the only rule whose realized absorption strength matches
/// the continuous law on average (floor keeps the trap systematically closer
/// and inflates the measured decay, ceil does the reverse). The rules are all
/// selectable so that the rounding sensitivity can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    Floor,
    #[default]
    Nearest,
    Ceil,
}

impl Rounding {
    /// Values within `SNAP` of an integer are treated as that integer before
    /// flooring or ceiling, so exact lattice crossings (e.g. a*ln 16 + 1 = 5
    /// for a = 1/ln 2) land where exact arithmetic would put them.
    const SNAP: f64 = 1e-9;

    fn apply(self, y: f64) -> f64 {
        match self {
            Rounding::Nearest => y.round(),
            Rounding::Floor | Rounding::Ceil => {
                let r = y.round();
                let snapped = if (y - r).abs() <= Self::SNAP { r } else { y };
                if self == Rounding::Floor {
                    snapped.floor()
                } else {
                    snapped.ceil()
                }
            }
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Rounding::Floor => "floor",
            Rounding::Nearest => "nearest",
            Rounding::Ceil => "ceil",
        }
    }
}

impl std::str::FromStr for Rounding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(Rounding::Floor),
            "nearest" => Ok(Rounding::Nearest),
            "ceil" => Ok(Rounding::Ceil),
            other => Err(Error::InvalidConfig(format!(
                "unknown rounding rule '{other}' (expected floor|nearest|ceil)"
            ))),
        }
    }
}

/// Position of the absorbing trap as a function of the tick count.
#[derive(Debug, Clone, PartialEq)]
pub enum TrapTrajectory {
    /// Fixed trap at `x0 >= 1`.
    Static { x0: u64 },
    /// `x0 + floor(v t)` with rational `v = num/den` lattice steps per tick.
    ConstantVelocity { x0: u64, num: u64, den: u64 },
    /// Lattice realization of `a ln t + b`:
    /// `position(t) = max(1, rounding(a ln t + b))` for `t >= 1`, and
    /// `position(0) = position(1)`. Monotone because `a > 0`.
    Logarithmic { a: f64, b: f64, rounding: Rounding },
    /// Tabulated positions, entry `t` for tick `t`. Queries beyond the last
    /// entry are an error, never an extrapolation.
    Table { positions: Vec<u64> },
}

impl TrapTrajectory {
    pub fn static_trap(x0: u64) -> Result<Self> {
        if x0 == 0 {
            return Err(Error::InvalidTrajectory(
                "static trap position must be >= 1".into(),
            ));
        }
        Ok(TrapTrajectory::Static { x0 })
    }

    pub fn constant_velocity(x0: u64, num: u64, den: u64) -> Result<Self> {
        if x0 == 0 {
            return Err(Error::InvalidTrajectory(
                "initial trap position must be >= 1".into(),
            ));
        }
        if den == 0 {
            return Err(Error::InvalidTrajectory(
                "velocity denominator must be >= 1".into(),
            ));
        }
        Ok(TrapTrajectory::ConstantVelocity { x0, num, den })
    }

    pub fn logarithmic(a: f64, b: f64, rounding: Rounding) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidTrajectory(format!(
                "logarithmic slope a must be positive and finite, got {a}"
            )));
        }
        if !b.is_finite() {
            return Err(Error::InvalidTrajectory(format!(
                "logarithmic offset b must be finite, got {b}"
            )));
        }
        Ok(TrapTrajectory::Logarithmic { a, b, rounding })
    }

    /// Lattice trajectory realizing a power-law design.
    pub fn from_design(design: &PowerLawDesign, rounding: Rounding) -> Self {
        TrapTrajectory::Logarithmic {
            a: design.a(),
            b: design.b(),
            rounding,
        }
    }

    pub fn table(positions: Vec<u64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidTrajectory(
                "tabulated trajectory must not be empty".into(),
            ));
        }
        Ok(TrapTrajectory::Table { positions })
    }

    /// Trap position at tick `t`.
    ///
    /// Errors only for the `Table` variant queried beyond its last entry.
    pub fn position(&self, t: u64) -> Result<u64> {
        match self {
            TrapTrajectory::Static { x0 } => Ok(*x0),
            TrapTrajectory::ConstantVelocity { x0, num, den } => num
                .checked_mul(t)
                .map(|nt| x0 + nt / den)
                .ok_or_else(|| Error::TrajectoryUndefined {
                    tick: t,
                    reason: "constant-velocity position overflows u64".into(),
                }),
            TrapTrajectory::Logarithmic { a, b, rounding } => {
                let tt = t.max(1); // position(0) := position(1), avoids ln 0
                let y = a * (tt as f64).ln() + b;
                Ok(rounding.apply(y).max(1.0) as u64)
            }
            TrapTrajectory::Table { positions } => positions.get(t as usize).copied().ok_or_else(
                || Error::TrajectoryUndefined {
                    tick: t,
                    reason: format!("table has {} entries", positions.len()),
                },
            ),
        }
    }

    /// Last tick the trajectory is defined for (`None` = unbounded).
    pub fn horizon(&self) -> Option<u64> {
        match self {
            TrapTrajectory::Table { positions } => Some(positions.len() as u64 - 1),
            _ => None,
        }
    }

    /// Whether the lattice clamp `max(1, .)` is active at the first tick,
    /// i.e. the rounded `a ln 1 + b = b` falls below 1.
    pub fn clamped_at_start(&self) -> bool {
        match self {
            TrapTrajectory::Logarithmic { b, rounding, .. } => rounding.apply(*b) < 1.0,
            _ => false,
        }
    }

    /// Confirm positivity and monotonicity of `position(t)` over
    /// `[0, t_max]`. Returns the first violating tick otherwise.
    pub fn validate(&self, t_max: u64) -> Result<TrajectoryReport> {
        if t_max < 1 {
            return Err(Error::InvalidConfig("t_max must be >= 1".into()));
        }
        let mut prev = match self.position(0) {
            Ok(p) => p,
            Err(e) => return Err(e),
        };
        if prev == 0 {
            return Ok(TrajectoryReport::Violation {
                tick: 0,
                kind: ViolationKind::NonPositive,
            });
        }
        for t in 1..=t_max {
            let p = self.position(t)?;
            if p == 0 {
                return Ok(TrajectoryReport::Violation {
                    tick: t,
                    kind: ViolationKind::NonPositive,
                });
            }
            if p < prev {
                return Ok(TrajectoryReport::Violation {
                    tick: t,
                    kind: ViolationKind::Decrease,
                });
            }
            prev = p;
        }
        Ok(TrajectoryReport::Ok)
    }

    /// Canonical one-line identifier used in CSV columns and manifests.
    pub fn id(&self) -> String {
        match self {
            TrapTrajectory::Static { x0 } => format!("static:{x0}"),
            TrapTrajectory::ConstantVelocity { x0, num, den } => format!("cv:{x0}:{num}/{den}"),
            TrapTrajectory::Logarithmic { a, b, rounding } => {
                format!("log:a={a}:b={b}:{}", rounding.as_str())
            }
            TrapTrajectory::Table { positions } => {
                let first = positions.first().unwrap();
                let last = positions.last().unwrap();
                format!("table:len={}:first={first}:last={last}", positions.len())
            }
        }
    }
}

/// Outcome of [`TrapTrajectory::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryReport {
    Ok,
    Violation { tick: u64, kind: ViolationKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Position left the lattice half-line (reached 0).
    NonPositive,
    /// Position decreased (the trap approached the walkers).
    Decrease,
}
