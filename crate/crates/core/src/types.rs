//! Shared domain types: the jump probability, the power-law trajectory
//! design, and fit outputs.

use crate::error::{Error, Result};

/// Probability `q` of a rightward step in the Sisyphus jump rule; the
/// complementary `1 - q` is the restart probability. Strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpProbability(f64);

impl JumpProbability {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidJumpProbability(q))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Restart probability `1 - q`.
    #[inline]
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl std::fmt::Display for JumpProbability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The tuple (q, beta, a, b) linking a target survival exponent to a
/// logarithmically receding trap, `x_T(t) = a ln t + b`.
///
/// Invariants are maintained by construction:
/// `a = 1 / ln(1/q)` and `beta = (1 - q) q^b` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawDesign {
    q: JumpProbability,
    beta: f64,
    a: f64,
    b: f64,
}

impl PowerLawDesign {
    /// Design a trajectory for a target exponent: `a = 1/ln(1/q)`,
    /// `b = ln(beta/(1-q)) / ln(q)`.
    ///
    /// Any `beta > 0` is accepted; targets above `1 - q` give a negative
    /// offset `b` (the lattice trajectory is then clamped at position 1 for
    /// early ticks -- see [`PowerLawDesign::clamped_at_start`]).
    pub fn for_exponent(q: JumpProbability, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!(
                "target exponent must be positive and finite, got {beta}"
            )));
        }
        let a = 1.0 / (1.0 / q.get()).ln();
        let b = (beta / q.complement()).ln() / q.get().ln();
        Ok(Self { q, beta, a, b })
    }

    /// Design from a given offset `b`: the predicted exponent is
    /// `(1 - q) q^b`.
    pub fn for_offset(q: JumpProbability, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::Domain(format!("offset b must be finite, got {b}")));
        }
        let a = 1.0 / (1.0 / q.get()).ln();
        let beta = q.complement() * q.get().powf(b);
        Ok(Self { q, beta, a, b })
    }

    pub fn q(&self) -> JumpProbability {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Slope of the logarithmic trajectory, `1 / ln(1/q)`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Offset of the logarithmic trajectory.
    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Which decay family a fit was performed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    /// `s(t) = amplitude * t^(-exponent)`; fit of ln s against ln t.
    PowerLaw,
    /// `s(t) = amplitude * exp(-rate t)`; fit of ln s against t.
    Exponential,
}

impl FitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitKind::PowerLaw => "power_law",
            FitKind::Exponential => "exponential",
        }
    }
}

/// Result of a least-squares decay fit over a tick window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Power-law exponent or exponential rate (per tick, nats), both defined
    /// so that positive values mean decay.
    pub exponent_or_rate: f64,
    /// `exp(intercept)` of the log-space fit.
    pub amplitude: f64,
    /// Tick window the fit was computed over.
    pub window: (u64, u64),
    /// RMS of the log-space fit residuals.
    pub residual: f64,
    /// Standard error of the fitted slope, derived from the residuals. This
    /// is the fit's reported uncertainty band.
    pub slope_stderr: f64,
    /// Number of checkpoints used.
    pub n_points: usize,
    pub kind: FitKind,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_probability_domain() {
        assert!(JumpProbability::new(0.5).is_ok());
        assert!(JumpProbability::new(1e-12).is_ok());
        for bad in [0.0, 1.0, 1.5, -0.1, f64::NAN, f64::INFINITY] {
            assert!(JumpProbability::new(bad).is_err(), "q={bad} accepted");
        }
    }

    #[test]
    fn design_examples() {
        let q = JumpProbability::new(0.5).unwrap();
        let d = PowerLawDesign::for_exponent(q, 0.25).unwrap();
        assert!((d.a() - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(d.b(), 1.0); // ln(0.5)/ln(0.5)

        // beta = 1 - q sits on the b = 0 boundary.
        let d0 = PowerLawDesign::for_exponent(q, 0.5).unwrap();
        assert_eq!(d0.b(), 0.0);

        let q8 = JumpProbability::new(0.8).unwrap();
        let d8 = PowerLawDesign::for_exponent(q8, 0.1).unwrap();
        assert!((d8.a() - 4.481420117724549).abs() < 1e-12);
        assert!((d8.b() - 3.1062837195053903).abs() < 1e-12);
    }

    #[test]
    fn design_beta_above_boundary_gives_negative_offset() {
        let q = JumpProbability::new(0.5).unwrap();
        let d = PowerLawDesign::for_exponent(q, 0.6).unwrap();
        assert!(d.b() < 0.0, "b = {}", d.b());
    }

    #[test]
    fn offset_and_exponent_roundtrip() {
        let grid_q = [0.1, 0.25, 0.5, 0.75, 0.9];
        let grid_beta = [1e-3, 0.05, 0.25, 0.5, 0.9];
        for &q in &grid_q {
            let q = JumpProbability::new(q).unwrap();
            for &beta in &grid_beta {
                let d = PowerLawDesign::for_exponent(q, beta).unwrap();
                let back = PowerLawDesign::for_offset(q, d.b()).unwrap();
                assert!(
                    (back.beta() - beta).abs() / beta <= 1e-12,
                    "roundtrip q={} beta={} -> b={} -> {}",
                    q,
                    beta,
                    d.b(),
                    back.beta()
                );
            }
        }
    }
}
