//! Closed-form predictions: the large-distance decay rate, the logarithmic
//! trajectory designer, the universal survival exponent, trap velocity, and
//! the power-law balance residual.

use crate::error::{Error, Result};
use crate::types::{JumpProbability, PowerLawDesign};

/// Large-distance closed form for the static-trap decay rate,
/// `-ln(1 - q^{x_T} (1 - q))`.
///
/// Asymptotic in the trap distance; the exact rate is
/// [`crate::exact::static_decay_rate`], which this approaches from below as
/// `q^{x_T}` vanishes.
pub fn decay_rate_large_trap(q: JumpProbability, x_trap: u64) -> Result<f64> {
    if x_trap == 0 {
        return Err(Error::Domain("trap position must be >= 1".into()));
    }
    let c = q.get().powi(x_trap.min(i32::MAX as u64) as i32) * q.complement();
    Ok(-(-c).ln_1p())
}

/// Design the logarithmic trap trajectory whose survival tail has the target
/// exponent: `a = 1/ln(1/q)`, `b = ln(beta/(1-q))/ln(q)`.
pub fn design_log_trajectory(q: JumpProbability, beta: f64) -> Result<PowerLawDesign> {
    PowerLawDesign::for_exponent(q, beta)
}

/// Predicted survival exponent for a trap receding as
/// `x_T = ln(t)/ln(1/q) + b`: `beta = (1-q) q^b`. Contains no dependence on
/// the trajectory slope.
pub fn predicted_exponent(q: JumpProbability, b: f64) -> f64 {
    q.complement() * q.get().powf(b)
}

/// Instantaneous trap velocity of a logarithmic design, `a / t` lattice
/// sites per tick. Vanishes as `t` grows.
pub fn trap_velocity(design: &PowerLawDesign, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("trap velocity is defined for t >= 1".into()));
    }
    Ok(design.a() / t as f64)
}

/// Residual of the power-law balance equation at tick `t`, evaluated with the
/// continuous trajectory `x_T(t) = a ln t + b`:
///
/// `1 - (1 - 1/t)^(-beta) + q^{x_T(t)} (1-q) (1 - (x_T(t)+1)/t)^(-beta)`
///
/// For a correctly designed `(a, b)` the residual scales as `O(t^-2)` (up to
/// a logarithmic factor); mis-designed trajectories leave an `O(t^-1)` or
/// slower term. The lattice discretization is deliberately not applied here,
/// so the check is independent of rounding choices.
pub fn balance_residual(q: JumpProbability, a: f64, b: f64, beta: f64, t: u64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && beta.is_finite()) {
        return Err(Error::Domain("a, b, beta must be finite".into()));
    }
    let tf = t as f64;
    let x_t = a * tf.ln() + b;
    if tf <= x_t + 1.0 {
        return Err(Error::Domain(format!(
            "balance residual needs t > x_T(t) + 1 (t = {t}, x_T = {x_t:.3})"
        )));
    }
    let qv = q.get();
    let term_walk = (1.0 - 1.0 / tf).powf(-beta);
    let term_absorb = qv.powf(x_t) * q.complement() * (1.0 - (x_t + 1.0) / tf).powf(-beta);
    Ok(1.0 - term_walk + term_absorb)
}

/// Balance residual for a consistent design tuple.
pub fn balance_residual_design(design: &PowerLawDesign, t: u64) -> Result<f64> {
    balance_residual(design.q(), design.a(), design.b(), design.beta(), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> JumpProbability {
        JumpProbability::new(v).unwrap()
    }

    #[test]
    fn large_trap_rate_values() {
        // q = 0.5, x_T = 10
        let g = decay_rate_large_trap(q(0.5), 10).unwrap();
        assert!((g - 4.884004981089e-4).abs() < 1e-15, "g={g:e}");

        // q = 0.5, x_T = 1: -ln(0.75), visibly different from the exact ln 2.
        let g = decay_rate_large_trap(q(0.5), 1).unwrap();
        assert!((g - 0.2876820724517809).abs() < 1e-15);

        // q -> small at fixed x_T >= 2: rate vanishes.
        let g = decay_rate_large_trap(q(1e-6), 2).unwrap();
        assert!(g > 0.0 && g < 1e-11);
    }

    #[test]
    fn designer_examples() {
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        assert!((d.a() - 1.4426950408889634).abs() < 1e-15);
        assert_eq!(d.b(), 1.0);

        let d = design_log_trajectory(q(0.5), 0.5).unwrap();
        assert_eq!(d.b(), 0.0);

        let d = design_log_trajectory(q(0.8), 0.1).unwrap();
        assert!((d.a() - 4.481420117724549).abs() < 1e-12);
        assert!((d.b() - 3.1062837195053903).abs() < 1e-12);
        assert!((predicted_exponent(q(0.8), d.b()) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn predicted_exponent_values() {
        assert!((predicted_exponent(q(0.5), 1.0) - 0.25).abs() < 1e-15);
        // b = 0 gives 1 - q for any q.
        assert!((predicted_exponent(q(0.37), 0.0) - 0.63).abs() < 1e-15);
    }

    #[test]
    fn velocity_scales_as_inverse_t() {
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        let v1 = trap_velocity(&d, 1).unwrap();
        assert!((v1 - 1.4426950408889634).abs() < 1e-12);
        let v2 = trap_velocity(&d, 1000).unwrap();
        let v3 = trap_velocity(&d, 2000).unwrap();
        assert!((v3 / v2 - 0.5).abs() < 1e-15);
        assert!(trap_velocity(&d, 0).is_err());
    }

    #[test]
    fn residual_frozen_values() {
        // Independent high-precision evaluation of the balance equation for
        // the q = 0.5, beta = 0.25 design.
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        let r3 = balance_residual_design(&d, 1_000).unwrap();
        let r4 = balance_residual_design(&d, 10_000).unwrap();
        assert!((r3 - 5.971378896884e-7).abs() / 5.971378896884e-7 < 1e-10);
        assert!((r4 - 8.001342979832e-9).abs() / 8.001342979832e-9 < 1e-10);
        // About two orders of magnitude drop per decade.
        let ratio = r3 / r4;
        assert!((50.0..120.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn residual_perturbed_offset_decays_slower() {
        // b + 1 with beta unadjusted leaves an O(1/t) term:
        // residual * t -> beta (q - 1) = -0.125.
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        for &t in &[1_000u64, 10_000, 100_000] {
            let r = balance_residual(d.q(), d.a(), d.b() + 1.0, d.beta(), t).unwrap();
            assert!(
                (r * t as f64 + 0.125).abs() < 0.5e-2,
                "t={t} r*t={}",
                r * t as f64
            );
        }
    }

    #[test]
    fn residual_degenerate_beta_zero() {
        // beta = 0 reduces the residual to the pure absorption term.
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        let t = 100u64;
        let r = balance_residual(d.q(), d.a(), d.b(), 0.0, t).unwrap();
        let x_t = d.a() * (t as f64).ln() + d.b();
        assert_eq!(r, 0.5f64.powf(x_t) * 0.5);
    }

    #[test]
    fn residual_rejects_small_t() {
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        assert!(balance_residual_design(&d, 2).is_err());
    }

    #[test]
    fn residual_scaling_discriminates_designs() {
        let d = design_log_trajectory(q(0.5), 0.25).unwrap();
        // Correct design: residual * t^2 stays bounded over [1e3, 1e6].
        let grid = [1_000u64, 3_163, 10_000, 31_629, 100_000, 316_288, 1_000_000];
        let scaled: Vec<f64> = grid
            .iter()
            .map(|&t| balance_residual_design(&d, t).unwrap().abs() * (t as f64).powi(2))
            .collect();
        assert!(scaled.iter().all(|&v| v < 2.0), "{scaled:?}");

        // +-20% slope perturbation: residual * t^2 grows by orders of
        // magnitude across the same range.
        for fac in [1.2, 0.8] {
            let first = balance_residual(d.q(), d.a() * fac, d.b(), d.beta(), 1_000)
                .unwrap()
                .abs()
                * 1e6;
            let last = balance_residual(d.q(), d.a() * fac, d.b(), d.beta(), 1_000_000)
                .unwrap()
                .abs()
                * 1e12;
            assert!(
                last / first > 100.0,
                "a*{fac}: growth {first} -> {last} too small"
            );
        }
    }

    #[test]
    fn exponent_has_no_slope_dependence() {
        // The predicted exponent is a function of (q, b) only; perturbing the
        // design slope leaves it untouched by construction.
        let b = 1.7;
        let e1 = predicted_exponent(q(0.6), b);
        let d = PowerLawDesign::for_offset(q(0.6), b).unwrap();
        assert_eq!(e1, d.beta());
    }
}
