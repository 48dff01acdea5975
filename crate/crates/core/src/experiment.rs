//! Configured Monte Carlo experiments: deterministic parallel execution,
//! versioned JSON reports and CSV side-files.
//!
//! Every random quantity comes from a stream derived from the config seed and
//! the sample index, and results are collected in index order, so the worker
//! count changes wall-clock time only.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::paths::{brownian_ensemble, g_inf, g_sup, gamma_k};
use crate::percolation::{sample_passage_value, PassageKind};
use crate::rmt::{sample_gue_tridiagonal, scale_edge, EigenSample};
use crate::rng::RngStream;
use crate::skorohod::{build_exit_law, records_to_csv, simulate_embedding, MAX_DT};
use crate::stats::{
    center_scale_first_passage, center_scale_last_passage, center_scale_theorem_form, center_scale_theorem_form_inf,
    ks_one_sample, ks_two_sample, mean_stderr, mean_variance, KsResult,
};
use crate::timeconstants::{extrapolate, shape_curve, shape_points_to_csv, thin_rectangle_constant};
use crate::tracy_widom::{default_table, TWTable};
use crate::weights::WeightDistribution;

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Sample counts are divided by this in quick mode.
pub const QUICK_FACTOR: usize = 10;
pub const DEFAULT_M_STEPS: usize = 512;
pub const REPORT_FILE: &str = "report.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CltTheoremForm,
    CltCorollary,
    GueEdge,
    GammaTransform,
    TimeConstant,
    TwTable,
    SkorohodCheck,
}

fn default_workers() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.05
}

/// One experiment, as read from a TOML file.
///
/// `workers` and `output` affect where and how fast the run happens, not its
/// numbers; they are reported under `runtime` rather than in the config echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_workers", skip_serializing)]
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<WeightDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_schedule: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_schedule: Vec<usize>,
    #[serde(default)]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_steps: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub quick: bool,
}

impl ExperimentConfig {
    /// A config with only the required fields set.
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            seed,
            workers: default_workers(),
            distribution: None,
            n: None,
            k: None,
            k_schedule: Vec::new(),
            n_schedule: Vec::new(),
            samples: 0,
            m_steps: None,
            alpha: default_alpha(),
            dt: None,
            output: None,
            quick: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Sample count after the quick-mode reduction.
    pub fn effective_samples(&self) -> usize {
        if self.quick && self.samples > 0 {
            (self.samples / QUICK_FACTOR).max(1)
        } else {
            self.samples
        }
    }

    /// `k` values to run: the schedule if given, else the single `k`.
    pub fn ks(&self) -> Vec<usize> {
        if self.k_schedule.is_empty() {
            self.k.into_iter().collect()
        } else {
            self.k_schedule.clone()
        }
    }

    /// `log k / log N`, the thin-rectangle exponent of this run.
    pub fn regime_exponent(&self) -> Option<f64> {
        match (self.n, self.k) {
            (Some(n), Some(k)) if n > 1 => Some((k as f64).ln() / (n as f64).ln()),
            _ => None,
        }
    }

    fn require_distribution(&self) -> Result<&WeightDistribution> {
        self.distribution.as_ref().ok_or_else(|| Error::Config(format!("{:?} needs a distribution", self.kind)))
    }

    fn require_n_k(&self) -> Result<(usize, usize)> {
        match (self.n, self.k) {
            (Some(n), Some(k)) => Ok((n, k)),
            _ => Err(Error::Config(format!("{:?} needs n and k", self.kind))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        let positive = self.n.iter().chain(&self.k).chain(&self.k_schedule).chain(&self.n_schedule).chain(&self.m_steps);
        if positive.into_iter().any(|&v| v == 0) {
            return Err(Error::Config("n, k, schedules and m_steps must be at least 1".into()));
        }
        match self.kind {
            ExperimentKind::CltTheoremForm | ExperimentKind::CltCorollary => {
                self.require_n_k()?;
                let d = self.require_distribution()?;
                if !(d.variance() > 0.0) {
                    return Err(Error::Config("weight distribution must have positive variance".into()));
                }
            }
            ExperimentKind::GueEdge | ExperimentKind::GammaTransform => {
                if self.ks().is_empty() {
                    return Err(Error::Config(format!("{:?} needs k or k_schedule", self.kind)));
                }
            }
            ExperimentKind::TimeConstant => {
                self.require_distribution()?;
                if self.n_schedule.len() == 1 {
                    return Err(Error::Config("n_schedule needs at least two entries".into()));
                }
                if self.n_schedule.is_empty() && self.require_n_k().is_err() {
                    return Err(Error::Config("time_constant needs n_schedule or n and k".into()));
                }
            }
            ExperimentKind::TwTable => {}
            ExperimentKind::SkorohodCheck => {
                self.require_distribution()?;
                if let Some(dt) = self.dt {
                    if !(dt > 0.0 && dt <= MAX_DT) {
                        return Err(Error::Config(format!("dt {dt} outside (0, {MAX_DT}]")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    /// No samples were requested.
    Trivial,
    /// The run aborted; `error` says why.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub name: String,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleSummary {
    pub fn new(name: &str, xs: &[f64]) -> Self {
        let (mean, variance) = mean_variance(xs);
        let (_, stderr) = mean_stderr(xs);
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        SampleSummary { name: name.to_string(), n: xs.len(), mean, variance, stderr, min, max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedKs {
    pub name: String,
    #[serde(flatten)]
    pub result: KsResult,
}

/// Run-dependent facts kept out of the reproducible part of the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub status: ReportStatus,
    /// False for quick-mode runs, whose sample sizes are below acceptance scale.
    pub acceptance_grade: bool,
    pub regime_exponent: Option<f64>,
    pub summaries: Vec<SampleSummary>,
    pub ks: Vec<NamedKs>,
    pub values: BTreeMap<String, f64>,
    pub files: Vec<String>,
    pub error: Option<String>,
    pub runtime: Runtime,
}

impl ExperimentReport {
    fn empty(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            format_version: REPORT_FORMAT_VERSION,
            library_version: LIBRARY_VERSION.to_string(),
            config: config.clone(),
            status: ReportStatus::Ok,
            acceptance_grade: !config.quick,
            regime_exponent: config.regime_exponent(),
            summaries: Vec::new(),
            ks: Vec::new(),
            values: BTreeMap::new(),
            files: Vec::new(),
            error: None,
            runtime: Runtime { workers: config.workers, wall_clock_seconds: 0.0, output: config.output.clone() },
        }
    }

    /// Report for a run that aborted with `err`.
    pub fn failed(config: &ExperimentConfig, err: &Error) -> Self {
        let mut r = Self::empty(config);
        r.status = ReportStatus::Invalid;
        r.acceptance_grade = false;
        r.error = Some(err.to_string());
        r
    }

    pub fn ks_named(&self, name: &str) -> Option<&KsResult> {
        self.ks.iter().find(|k| k.name == name).map(|k| &k.result)
    }

    pub fn summary(&self, name: &str) -> Option<&SampleSummary> {
        self.summaries.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes to JSON")
    }

    /// JSON with the `runtime` block cleared; equal across reruns of a config.
    pub fn reproducible_json(&self) -> String {
        let mut r = self.clone();
        r.runtime = Runtime::default();
        r.to_json()
    }

    /// Parses a report, refusing format versions this library does not know.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(REPORT_FORMAT_VERSION) => Ok(serde_json::from_value(value)?),
            Some(v) => Err(Error::Config(format!("unsupported report format version {v}"))),
            None => Err(Error::Config("report has no format_version".into())),
        }
    }

    /// Writes `report.json` and the side-files into `dir`.
    pub fn write(&self, dir: &Path, side_files: &[(String, String)]) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, contents) in side_files {
            fs::write(dir.join(name), contents)?;
        }
        fs::write(dir.join(REPORT_FILE), self.to_json() + "\n")?;
        Ok(())
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Parameter("workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Parameter(e.to_string()))
}

/// Runs `job(0..samples)` on the current rayon pool, in index order.
fn ordered_map<T, F>(samples: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..samples).into_par_iter().map(job).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Job { index, source: Box::new(e) }))
        .collect()
}

/// `job(i)` for `i` in `0..samples` on `workers` threads; results come back in
/// index order. The error of the lowest failing index is returned.
pub fn parallel_map<T, F>(samples: usize, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    thread_pool(workers)?.install(|| ordered_map(samples, job))
}

/// Runs `f` with every rayon-parallel library call inside it limited to
/// `workers` threads.
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    thread_pool(workers)?.install(f)
}

/// `F_GUE` from the table, extended by 0 and 1 outside its range.
pub fn tw_cdf(table: &TWTable) -> impl Fn(f64) -> f64 + '_ {
    move |s| {
        if s < table.s_min() {
            0.0
        } else if s > table.s_max() {
            1.0
        } else {
            table.cdf_at(s).unwrap_or(f64::NAN)
        }
    }
}

fn values_csv(xs: &[f64]) -> String {
    let mut out = String::from("value\n");
    for x in xs {
        out.push_str(&format!("{x}\n"));
    }
    out
}

/// Accumulates report contents during a run.
struct Run<'a> {
    config: &'a ExperimentConfig,
    root: RngStream,
    samples: usize,
    report: ExperimentReport,
    side_files: Vec<(String, String)>,
}

impl<'a> Run<'a> {
    fn stream(&self, label: &str) -> RngStream {
        self.root.labelled(label)
    }

    fn sample(&mut self, name: &str, xs: &[f64]) {
        self.report.summaries.push(SampleSummary::new(name, xs));
        self.file(&format!("{name}.csv"), values_csv(xs));
    }

    fn file(&mut self, name: &str, contents: String) {
        self.report.files.push(name.to_string());
        self.side_files.push((name.to_string(), contents));
    }

    fn ks_two(&mut self, name: &str, a: &[f64], b: &[f64]) -> Result<()> {
        let result = ks_two_sample(a, b, self.config.alpha)?;
        self.report.ks.push(NamedKs { name: name.to_string(), result });
        Ok(())
    }

    fn ks_one(&mut self, name: &str, a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<()> {
        let result = ks_one_sample(a, cdf, self.config.alpha)?;
        self.report.ks.push(NamedKs { name: name.to_string(), result });
        Ok(())
    }

    fn value(&mut self, name: &str, v: f64) {
        self.report.values.insert(name.to_string(), v);
    }

    fn gue_extremes(&self, k: usize) -> Result<Vec<EigenSample>> {
        let stream = self.stream(&format!("gue-k{k}"));
        ordered_map(self.samples, |i| Ok(sample_gue_tridiagonal(k, &mut stream.fork(i as u64))?.extreme_eigenvalues()))
    }

    fn passage_samples(&self, label: &str, kind: PassageKind, transform: impl Fn(f64) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
        let (n, k) = self.config.require_n_k()?;
        let dist = *self.config.require_distribution()?;
        let stream = self.stream(label);
        ordered_map(self.samples, |i| transform(sample_passage_value(&dist, &mut stream.fork(i as u64), n, k, kind)?))
    }

    fn clt_theorem_form(&mut self) -> Result<()> {
        let (n, k) = self.config.require_n_k()?;
        let dist = self.config.require_distribution()?;
        let (mu, sigma) = (dist.mean(), dist.variance().sqrt());
        // every partition sums exactly N weights, so standardizing the weights
        // maps the passage value v to (v - μN)/σ
        let nf = n as f64;
        let sup = self.passage_samples("theorem-sup", PassageKind::L, |v| center_scale_theorem_form((v - mu * nf) / sigma, n, k))?;
        let inf = self.passage_samples("theorem-inf", PassageKind::R, |v| center_scale_theorem_form_inf((v - mu * nf) / sigma, n, k))?;
        let edge: Vec<f64> = self.gue_extremes(k)?.iter().map(|e| scale_edge(e.lambda_max, k)).collect();
        let table = default_table()?;
        self.ks_two("theorem_sup_vs_gue_edge", &sup, &edge)?;
        self.ks_two("theorem_inf_vs_gue_edge", &inf, &edge)?;
        self.ks_one("theorem_sup_vs_tracy_widom", &sup, tw_cdf(table))?;
        self.ks_one("theorem_inf_vs_tracy_widom", &inf, tw_cdf(table))?;
        self.sample("theorem_sup", &sup);
        self.sample("theorem_inf", &inf);
        self.sample("gue_edge", &edge);
        Ok(())
    }

    fn clt_corollary(&mut self) -> Result<()> {
        let (n, k) = self.config.require_n_k()?;
        let dist = self.config.require_distribution()?;
        let (mu, sigma) = (dist.mean(), dist.variance().sqrt());
        let last = self.passage_samples("last-passage", PassageKind::LLast, |v| center_scale_last_passage(v, n, k, mu, sigma))?;
        // the first-passage statistic converges to minus a Tracy–Widom variable
        let first = self.passage_samples("first-passage", PassageKind::LFirst, |v| {
            center_scale_first_passage(v, n, k, mu, sigma).map(|s| -s)
        })?;
        let edge: Vec<f64> = self.gue_extremes(k)?.iter().map(|e| scale_edge(e.lambda_max, k)).collect();
        let table = default_table()?;
        self.ks_two("last_passage_vs_gue_edge", &last, &edge)?;
        self.ks_two("first_passage_reflected_vs_gue_edge", &first, &edge)?;
        self.ks_one("last_passage_vs_tracy_widom", &last, tw_cdf(table))?;
        self.ks_one("first_passage_reflected_vs_tracy_widom", &first, tw_cdf(table))?;
        self.sample("last_passage", &last);
        self.sample("first_passage_reflected", &first);
        self.sample("gue_edge", &edge);
        Ok(())
    }

    fn gue_edge(&mut self) -> Result<()> {
        let table = default_table()?;
        for k in self.config.ks() {
            let extremes = self.gue_extremes(k)?;
            let edge: Vec<f64> = extremes.iter().map(|e| scale_edge(e.lambda_max, k)).collect();
            self.ks_one(&format!("edge_k{k}_vs_tracy_widom"), &edge, tw_cdf(table))?;
            if k == 1 {
                let raw: Vec<f64> = extremes.iter().map(|e| e.lambda_max).collect();
                let normal = Normal::new(0.0, 1.0).expect("standard normal");
                self.ks_one("lambda_k1_vs_standard_normal", &raw, |x| normal.cdf(x))?;
            }
            self.sample(&format!("edge_k{k}"), &edge);
        }
        Ok(())
    }

    fn gamma_transform(&mut self) -> Result<()> {
        let m = self.config.m_steps.unwrap_or(DEFAULT_M_STEPS);
        for k in self.config.ks() {
            let stream = self.stream(&format!("brownian-k{k}"));
            let rows: Vec<[f64; 4]> = ordered_map(self.samples, |i| {
                let ens = brownian_ensemble(&mut stream.fork(i as u64), k, m)?;
                let (top, bottom) = if k >= 2 {
                    let g = gamma_k(&ens)?;
                    (g.path(k - 1).end(), g.path(0).end())
                } else {
                    (ens.path(0).end(), ens.path(0).end())
                };
                Ok([g_sup(&ens), g_inf(&ens), top, bottom])
            })?;
            let column = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
            let (sup, inf, top, bottom) = (column(0), column(1), column(2), column(3));
            let extremes = self.gue_extremes(k)?;
            let lmax: Vec<f64> = extremes.iter().map(|e| e.lambda_max).collect();
            let lmin: Vec<f64> = extremes.iter().map(|e| e.lambda_min).collect();
            self.ks_two(&format!("gsup_k{k}_vs_lambda_max"), &sup, &lmax)?;
            self.ks_two(&format!("ginf_k{k}_vs_lambda_min"), &inf, &lmin)?;
            self.ks_two(&format!("gamma_top_k{k}_vs_lambda_max"), &top, &lmax)?;
            self.ks_two(&format!("gamma_bottom_k{k}_vs_lambda_min"), &bottom, &lmin)?;
            self.sample(&format!("gsup_k{k}"), &sup);
            self.sample(&format!("ginf_k{k}"), &inf);
            self.sample(&format!("lambda_max_k{k}"), &lmax);
        }
        Ok(())
    }

    fn time_constant(&mut self) -> Result<()> {
        let dist = *self.config.require_distribution()?;
        if !self.config.n_schedule.is_empty() {
            let points = shape_curve(&dist, 1.0, 1.0, &self.config.n_schedule, self.samples, &self.stream("shape"))?;
            let fit = extrapolate(&points)?;
            self.value("extrapolated_limit", fit.limit);
            self.value("extrapolation_amplitude", fit.amplitude);
            if let Some(p) = points[0].predicted {
                self.value("predicted_limit", p);
            }
            for p in &points {
                self.value(&format!("mean_ratio_n{}", p.n), p.mean_ratio);
            }
            self.file("shape_points.csv", shape_points_to_csv(&points));
        }
        if let (Some(n), Some(k)) = (self.config.n, self.config.k) {
            let p = thin_rectangle_constant(&dist, n, k, self.samples, &self.stream("thin"))?;
            self.value("thin_rectangle_mean", p.mean_ratio);
            self.value("thin_rectangle_stderr", p.stderr);
            if let Some(v) = p.predicted {
                self.value("thin_rectangle_predicted", v);
            }
            self.file("thin_rectangle.csv", shape_points_to_csv(&[p]));
        }
        Ok(())
    }

    fn tw_table(&mut self) -> Result<()> {
        let table = default_table()?;
        self.value("mean", table.mean()?);
        self.value("variance", table.variance()?);
        self.value("mass", table.mass()?);
        self.file("tw_table.csv", table.to_csv());
        Ok(())
    }

    fn skorohod_check(&mut self) -> Result<()> {
        let law = build_exit_law(self.config.require_distribution()?)?;
        let dt = self.config.dt.unwrap_or(MAX_DT);
        let stream = self.stream("skorohod");
        let records = ordered_map(self.samples, |i| simulate_embedding(&law, &mut stream.fork(i as u64), dt))?;
        let taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
        let squares: Vec<f64> = taus.iter().map(|t| t * t).collect();
        self.report.summaries.push(SampleSummary::new("tau", &taus));
        self.report.summaries.push(SampleSummary::new("tau_squared", &squares));
        self.value("second_moment", law.second_moment());
        self.value("fourth_moment_bound", 4.0 * law.fourth_moment());
        for &(x, _) in law.atoms() {
            let freq = records.iter().filter(|r| r.b_tau == x).count() as f64 / records.len() as f64;
            self.value(&format!("exit_frequency[{x}]"), freq);
        }
        self.file("skorohod_records.csv", records_to_csv(&records));
        Ok(())
    }

    fn execute(&mut self) -> Result<()> {
        let sampled = self.config.kind != ExperimentKind::TwTable;
        if sampled && self.samples == 0 {
            self.report.status = ReportStatus::Trivial;
            return Ok(());
        }
        match self.config.kind {
            ExperimentKind::CltTheoremForm => self.clt_theorem_form(),
            ExperimentKind::CltCorollary => self.clt_corollary(),
            ExperimentKind::GueEdge => self.gue_edge(),
            ExperimentKind::GammaTransform => self.gamma_transform(),
            ExperimentKind::TimeConstant => self.time_constant(),
            ExperimentKind::TwTable => self.tw_table(),
            ExperimentKind::SkorohodCheck => self.skorohod_check(),
        }
    }
}

/// Report plus the CSV side-files it references.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub side_files: Vec<(String, String)>,
}

/// Runs the experiment without touching the filesystem.
pub fn execute_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let start = Instant::now();
    let mut run = Run {
        config,
        root: RngStream::new(config.seed, 0),
        samples: config.effective_samples(),
        report: ExperimentReport::empty(config),
        side_files: Vec::new(),
    };
    thread_pool(config.workers)?.install(|| run.execute())?;
    run.report.runtime.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(ExperimentOutcome { report: run.report, side_files: run.side_files })
}

/// Runs the experiment and, when `config.output` is set, persists the report
/// and side-files there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let outcome = execute_experiment(config)?;
    if let Some(dir) = &config.output {
        outcome.report.write(dir, &outcome.side_files)?;
    }
    Ok(outcome.report)
}
