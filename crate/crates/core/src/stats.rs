//! Empirical distributions, Kolmogorov–Smirnov statistics and the centring
//! transforms that turn passage times into Tracy–Widom-scale variables.
//!
//! Thresholds use the asymptotic KS critical values, which are accurate for
//! the sample sizes used here (n >= 4000).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted sample with cached moments.
#[derive(Clone, Debug, PartialEq)]
pub struct EcdfSummary {
    sorted: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl EcdfSummary {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(Error::Parameter("sample contains NaN".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (mean, variance) = mean_variance(&sorted);
        Ok(Self { sorted, mean, variance })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for a single point).
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Right-continuous ECDF: fraction of the sample `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.n() as f64
    }

    /// Smallest sample point whose ECDF value reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.n();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }
}

/// Sample mean and unbiased variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Sample mean and its standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let (m, v) = mean_variance(xs);
    (m, (v / xs.len() as f64).sqrt())
}

/// Outcome of a Kolmogorov–Smirnov comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n1: usize,
    /// `None` for a one-sample test (reference size infinite).
    pub n2: Option<usize>,
    pub alpha: f64,
    pub threshold: f64,
    pub reject: bool,
}

impl KsResult {
    fn new(statistic: f64, n1: usize, n2: Option<usize>, alpha: f64) -> Self {
        let c = ks_critical_coefficient(alpha);
        let threshold = match n2 {
            Some(n2) => c * ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt(),
            None => c / (n1 as f64).sqrt(),
        };
        Self { statistic, n1, n2, alpha, threshold, reject: statistic > threshold }
    }
}

/// Asymptotic critical coefficient `c(α) = sqrt(-ln(α/2) / 2)`;
/// `c(0.05) = 1.358`, `c(0.01) = 1.628`.
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// One-sample KS statistic of `sample` against a continuous `cdf`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    let e = EcdfSummary::new(sample)?;
    let n = e.n() as f64;
    let d = e
        .sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i as f64 + 1.0) / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult::new(d, e.n(), None, alpha))
}

/// Two-sample KS statistic by a merge scan over the sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    check_alpha(alpha)?;
    let ea = EcdfSummary::new(a)?;
    let eb = EcdfSummary::new(b)?;
    Ok(KsResult::new(ks_two_sample_sorted(ea.sorted(), eb.sorted()), ea.n(), Some(eb.n()), alpha))
}

/// `sup_x |F_a(x) - F_b(x)|` for already sorted samples.
pub fn ks_two_sample_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("sigma must be positive, got {sigma}")))
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::Parameter("N and k must be at least 1".into()));
    }
    Ok(())
}

/// `(L^l - μ(N+k-1) - 2σ√(Nk)) / (σ k^{-1/6} N^{1/2})`; converges to `F_GUE`.
pub fn center_scale_last_passage(value: f64, n: usize, k: usize, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok((value - mu * (nf + kf - 1.0) - 2.0 * sigma * (nf * kf).sqrt()) / (sigma * kf.powf(-1.0 / 6.0) * nf.sqrt()))
}

/// `(L^f - μ(N+k-1) + 2σ√(Nk)) / (σ k^{-1/6} N^{1/2})`; converges to
/// `1 - F_GUE(-s)`, so its negation converges to `F_GUE`.
pub fn center_scale_first_passage(value: f64, n: usize, k: usize, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok((value - mu * (nf + kf - 1.0) + 2.0 * sigma * (nf * kf).sqrt()) / (sigma * kf.powf(-1.0 / 6.0) * nf.sqrt()))
}

/// `(L(N,k)/√N - 2√k) k^{1/6}` for standardised weights.
pub fn center_scale_theorem_form(value: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok((value / nf.sqrt() - 2.0 * kf.sqrt()) * kf.powf(1.0 / 6.0))
}

/// `(-R(N,k)/√N - 2√k) k^{1/6}` for standardised weights.
pub fn center_scale_theorem_form_inf(value: f64, n: usize, k: usize) -> Result<f64> {
    center_scale_theorem_form(-value, n, k)
}
