//! Extraction of decay laws from survival series: power-law exponents,
//! exponential rates, and local log-slopes.

use crate::error::{Error, Result};
use crate::series::SurvivalSeries;
use crate::types::{FitKind, FitResult};

/// Minimum number of checkpoints a fit window must contain.
const MIN_POINTS: usize = 8;

/// Near-exact series still get a tiny weight floor so inverse-variance
/// weighting stays finite when a Monte Carlo checkpoint reports zero error.
const SIGMA_LOG_FLOOR: f64 = 1e-9;

/// Least-squares fit of `ln s` against `ln t` over the window:
/// exponent = -slope, amplitude = exp(intercept).
///
/// Checkpoints of Monte Carlo series are weighted by their inverse log-space
/// variance (`stderr / s`); exact series are weighted equally. A zero
/// survival value inside the window rejects it, reporting the first zero
/// tick.
pub fn fit_power_law(series: &SurvivalSeries, window: (u64, u64)) -> Result<FitResult> {
    fit(series, window, FitKind::PowerLaw)
}

/// Least-squares fit of `ln s` against `t` over the window: rate = -slope.
pub fn fit_exponential(series: &SurvivalSeries, window: (u64, u64)) -> Result<FitResult> {
    fit(series, window, FitKind::Exponential)
}

fn fit(series: &SurvivalSeries, window: (u64, u64), kind: FitKind) -> Result<FitResult> {
    let (t_lo, t_hi) = window;
    if t_lo >= t_hi {
        return Err(Error::FitWindow(format!(
            "window must satisfy t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if kind == FitKind::PowerLaw && t_lo == 0 {
        return Err(Error::FitWindow(
            "power-law fits need t_lo >= 1 (ln t undefined at 0)".into(),
        ));
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for p in series.samples() {
        if p.t < t_lo || p.t > t_hi {
            continue;
        }
        if p.s <= 0.0 {
            return Err(Error::FitWindow(format!(
                "survival is zero at tick {} inside the window",
                p.t
            )));
        }
        let x = match kind {
            FitKind::PowerLaw => (p.t as f64).ln(),
            FitKind::Exponential => p.t as f64,
        };
        let w = match p.stderr {
            Some(se) => {
                let sigma_log = (se / p.s).max(SIGMA_LOG_FLOOR);
                1.0 / (sigma_log * sigma_log)
            }
            None => 1.0,
        };
        xs.push(x);
        ys.push(p.s.ln());
        ws.push(w);
    }
    let n = xs.len();
    if n < MIN_POINTS {
        return Err(Error::FitWindow(format!(
            "window [{t_lo}, {t_hi}] holds {n} checkpoints, need at least {MIN_POINTS}"
        )));
    }

    let wsum: f64 = ws.iter().sum();
    let mx: f64 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let my: f64 = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += ws[i] * dx * dx;
        sxy += ws[i] * dx * (ys[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::FitWindow("window has no abscissa spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    // Unweighted RMS of log-space residuals, plus the residual-based
    // standard error of the slope (the fit's uncertainty band).
    let mut ss_res = 0.0;
    for i in 0..n {
        let r = ys[i] - (slope * xs[i] + intercept);
        ss_res += r * r;
    }
    let residual = (ss_res / n as f64).sqrt();
    let slope_stderr = if n > 2 {
        (ss_res / (n as f64 - 2.0) / sxx * wsum / n as f64).sqrt()
    } else {
        0.0
    };

    Ok(FitResult {
        exponent_or_rate: -slope,
        amplitude: intercept.exp(),
        window,
        residual,
        slope_stderr,
        n_points: n,
        kind,
    })
}

/// Doubling estimator of the local power-law exponent,
/// `-[ln S(2t) - ln S(t)] / ln 2`, with log-log interpolation between
/// checkpoints. Errors when `[t, 2t]` is not covered by the series.
pub fn local_log_slope(series: &SurvivalSeries, t: f64) -> Result<f64> {
    let ls1 = series.interpolate_log(t)?;
    let ls2 = series.interpolate_log(2.0 * t)?;
    Ok(-(ls2 - ls1) / std::f64::consts::LN_2)
}

/// Mean local log-slope over a log-spaced grid of `n` points spanning
/// `[t_lo, t_hi]`. Window averaging defends the estimate against the
/// log-periodic oscillation the lattice trap superposes on the tail.
pub fn mean_local_slope(series: &SurvivalSeries, t_lo: f64, t_hi: f64, n: usize) -> Result<f64> {
    if !(t_lo >= 1.0 && t_hi > t_lo && n >= 2) {
        return Err(Error::Domain(format!(
            "need 1 <= t_lo < t_hi and n >= 2, got [{t_lo}, {t_hi}], n = {n}"
        )));
    }
    let mut acc = 0.0;
    for i in 0..n {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (n - 1) as f64);
        acc += local_log_slope(series, t)?;
    }
    Ok(acc / n as f64)
}
