//! Small numerical helpers shared by the engines and the test suites:
//! compensated accumulation and a two-sample Kolmogorov-Smirnov test.

/// Neumaier-compensated running sum.
///
/// The pair `(sum, c)` carries the accumulated value to roughly
/// `n * eps^2` absolute accuracy, far below what a bare f64 holds. Consumers
/// that subtract the total from 1 should use [`KahanSum::one_minus`], which
/// keeps the compensation term instead of rounding it away.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Accumulated total rounded to a single f64.
    pub fn total(&self) -> f64 {
        self.sum + self.c
    }

    /// `1 - total`, evaluated without discarding the compensation term.
    ///
    /// `1 - sum` is exact for `sum` in [0.5, 2] (Sterbenz), so the result
    /// retains relative accuracy even when the total is within an ulp of 1.
    pub fn one_minus(&self) -> f64 {
        (1.0 - self.sum) - self.c
    }
}

/// Compensated sum of a slice of f64 values.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Two-sample Kolmogorov-Smirnov test on integer-valued observations
/// (absorption ticks). Censored observations may be encoded as a shared
/// sentinel tick larger than any real one; the statistic is then the sup
/// distance over the uncensored range, which is the correct comparison for
/// fixed-horizon data.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// Sup distance between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic p-value (Kolmogorov distribution). Conservative for
    /// discrete data.
    pub p_value: f64,
}

pub fn two_sample_ks(a: &[u64], b: &[u64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs data");
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_unstable();
    xb.sort_unstable();
    let (na, nb) = (xa.len() as f64, xb.len() as f64);

    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        let fa = i as f64 / na;
        let fb = j as f64 / nb;
        d = d.max((fa - fb).abs());
    }

    let n_eff = (na * nb / (na + nb)).sqrt();
    let lambda = n_eff * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
    }
}

/// Survival function of the Kolmogorov distribution,
/// `P(sqrt(n) D > lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        if term < 1e-18 {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
