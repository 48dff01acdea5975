use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statrs::distribution::{ContinuousCDF, Normal};

use thinlpp::experiment::{parallel_map, run_experiment, tw_cdf, with_workers, ExperimentConfig, ExperimentReport};
use thinlpp::paths::{brownian_ensemble, g_inf, g_sup, gamma_k};
use thinlpp::percolation::{passage, PassageKind, WeightMatrix};
use thinlpp::rmt::{sample_gue_tridiagonal, scale_edge};
use thinlpp::skorohod::{build_exit_law, records_to_csv, sample_embeddings, MAX_DT};
use thinlpp::stats::{ks_one_sample, ks_two_sample, mean_stderr};
use thinlpp::timeconstants::{extrapolate, shape_curve, shape_points_to_csv, thin_rectangle_constant};
use thinlpp::tracy_widom::default_table;
use thinlpp::{Error, Result, RngStream, WeightDistribution};

#[derive(Parser)]
#[command(name = "thinlpp", version, about = "Passage percolation, GUE edge and Tracy-Widom experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Root seed; every sample derives its own stream from it.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    L,
    R,
    LLast,
    LFirst,
}

impl From<KindArg> for PassageKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::L => PassageKind::L,
            KindArg::R => PassageKind::R,
            KindArg::LLast => PassageKind::LLast,
            KindArg::LFirst => PassageKind::LFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Reference {
    TracyWidom,
    Normal,
}

#[derive(Subcommand)]
enum Command {
    /// Sample weight lattices and evaluate passage functionals.
    SampleLpp {
        /// Weight law, e.g. `exponential(rate=1)` or `rademacher`.
        #[arg(long)]
        dist: WeightDistribution,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "l,r,l-last,l-first")]
        kinds: Vec<KindArg>,
        /// Also write the first lattice as CSV.
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample extreme eigenvalues of k x k GUE matrices.
    SampleGue {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the sup/inf partition functionals and the ordered transform to Brownian ensembles.
    Gamma {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 512)]
        m: usize,
        #[arg(long)]
        samples: usize,
        /// Also write the first ensemble and its transform as CSV files with this prefix.
        #[arg(long)]
        ensemble: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate q and F_GUE on [-10, 8].
    TwTable {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Kolmogorov-Smirnov test of a CSV sample against another sample or a reference law.
    Ks {
        #[arg(long)]
        sample: PathBuf,
        #[arg(long, conflicts_with = "reference")]
        against: Option<PathBuf>,
        #[arg(long)]
        reference: Option<Reference>,
        /// Column to read (default: the last one).
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Run an experiment described by a TOML config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Divide sample counts by 10; the report is flagged as below acceptance scale.
        #[arg(long)]
        quick: bool,
    },
    /// Monte Carlo shape constants and their n^(-1/3) extrapolation.
    TimeConstant {
        #[arg(long)]
        dist: WeightDistribution,
        #[arg(long, value_delimiter = ',')]
        n_schedule: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        y: f64,
        #[arg(long, default_value_t = 50)]
        replicates: usize,
        /// Also estimate the thin-rectangle constant at this N (needs --thin-k).
        #[arg(long, requires = "thin_k")]
        thin_n: Option<usize>,
        #[arg(long, requires = "thin_n")]
        thin_k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate the exit-interval Skorohod embedding.
    Skorohod {
        #[arg(long)]
        dist: WeightDistribution,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = MAX_DT)]
        dt: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines.next().ok_or(Error::EmptySample)?.split(',').map(str::trim).collect();
    let idx = match column {
        Some(name) => header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Parameter(format!("no column {name:?} in {}", path.display())))?,
        None => header.len() - 1,
    };
    lines
        .enumerate()
        .map(|(row, line)| {
            let field = line.split(',').nth(idx).map(str::trim).unwrap_or("");
            field.parse().map_err(|_| Error::Parameter(format!("{}: row {}: {field:?} is not a number", path.display(), row + 1)))
        })
        .collect()
}

fn sample_lpp(
    dist: &WeightDistribution,
    n: usize,
    k: usize,
    samples: usize,
    kinds: &[KindArg],
    lattice: Option<&Path>,
    common: &Common,
) -> Result<()> {
    let root = RngStream::new(common.seed, 0);
    if let Some(path) = lattice {
        fs::write(path, WeightMatrix::sample(dist, &mut root.fork(0), n, k)?.to_csv())?;
    }
    let kinds: Vec<PassageKind> = kinds.iter().map(|&k| k.into()).collect();
    let rows = parallel_map(samples, common.workers, |i| {
        let w = WeightMatrix::sample(dist, &mut root.fork(i as u64), n, k)?;
        Ok(kinds.iter().map(|&kind| passage(&w, kind, false).value).collect::<Vec<f64>>())
    })?;
    let names: Vec<&str> = kinds
        .iter()
        .map(|k| match k {
            PassageKind::L => "L",
            PassageKind::R => "R",
            PassageKind::LLast => "L_last",
            PassageKind::LFirst => "L_first",
        })
        .collect();
    let mut out = format!("index,{}\n", names.join(","));
    for (i, row) in rows.into_iter().enumerate() {
        out.push_str(&format!("{i},{}\n", join(row)));
    }
    emit(common.output.as_deref(), &out)
}

fn sample_gue(k: usize, samples: usize, common: &Common) -> Result<()> {
    let root = RngStream::new(common.seed, 0);
    let rows = parallel_map(samples, common.workers, |i| {
        Ok(sample_gue_tridiagonal(k, &mut root.fork(i as u64))?.extreme_eigenvalues())
    })?;
    let mut out = String::from("index,lambda_max,lambda_min,scaled_edge\n");
    for (i, e) in rows.iter().enumerate() {
        out.push_str(&format!("{i},{},{},{}\n", e.lambda_max, e.lambda_min, scale_edge(e.lambda_max, k)));
    }
    emit(common.output.as_deref(), &out)
}

fn gamma(k: usize, m: usize, samples: usize, ensemble: Option<&Path>, common: &Common) -> Result<()> {
    let root = RngStream::new(common.seed, 0);
    if let Some(prefix) = ensemble {
        let ens = brownian_ensemble(&mut root.fork(0), k, m)?;
        fs::write(prefix.with_extension("paths.csv"), ens.to_csv())?;
        if k >= 2 {
            fs::write(prefix.with_extension("gamma.csv"), gamma_k(&ens)?.to_csv())?;
        }
    }
    let rows = parallel_map(samples, common.workers, |i| {
        let ens = brownian_ensemble(&mut root.fork(i as u64), k, m)?;
        let (top, bottom) = if k >= 2 {
            let g = gamma_k(&ens)?;
            (g.path(k - 1).end(), g.path(0).end())
        } else {
            (ens.path(0).end(), ens.path(0).end())
        };
        Ok([g_sup(&ens), g_inf(&ens), top, bottom])
    })?;
    let mut out = String::from("index,g_sup,g_inf,gamma_top,gamma_bottom\n");
    for (i, r) in rows.into_iter().enumerate() {
        out.push_str(&format!("{i},{}\n", join(r)));
    }
    emit(common.output.as_deref(), &out)
}

fn ks(sample: &Path, against: Option<&Path>, reference: Option<Reference>, column: Option<&str>, alpha: f64) -> Result<()> {
    let a = read_column(sample, column)?;
    let result = match (against, reference) {
        (Some(path), _) => ks_two_sample(&a, &read_column(path, column)?, alpha)?,
        (None, Some(Reference::TracyWidom)) => ks_one_sample(&a, tw_cdf(default_table()?), alpha)?,
        (None, Some(Reference::Normal)) => ks_one_sample(&a, standard_normal_cdf, alpha)?,
        (None, None) => return Err(Error::Parameter("give --against or --reference".into())),
    };
    emit(None, &(serde_json::to_string_pretty(&result)? + "\n"))
}

fn standard_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

fn experiment(
    config: &Path,
    seed: Option<u64>,
    workers: Option<usize>,
    samples: Option<usize>,
    output: Option<PathBuf>,
    quick: bool,
) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if output.is_some() {
        cfg.output = output;
    }
    cfg.quick |= quick;
    match run_experiment(&cfg) {
        Ok(report) => emit(None, &(report.to_json() + "\n")),
        Err(err) => {
            if let (Some(dir), false) = (&cfg.output, matches!(err, Error::Config(_))) {
                ExperimentReport::failed(&cfg, &err).write(dir, &[])?;
            }
            Err(err)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn time_constant(
    dist: &WeightDistribution,
    n_schedule: &[usize],
    x: f64,
    y: f64,
    replicates: usize,
    thin: Option<(usize, usize)>,
    common: &Common,
) -> Result<()> {
    let root = RngStream::new(common.seed, 0);
    let points = with_workers(common.workers, || {
        let mut points = Vec::new();
        if !n_schedule.is_empty() {
            points = shape_curve(dist, x, y, n_schedule, replicates, &root.labelled("shape"))?;
            if points.len() >= 2 {
                let fit = extrapolate(&points)?;
                eprintln!("extrapolated limit {} (amplitude {})", fit.limit, fit.amplitude);
            }
        }
        if let Some((n, k)) = thin {
            points.push(thin_rectangle_constant(dist, n, k, replicates, &root.labelled("thin"))?);
        }
        Ok(points)
    })?;
    emit(common.output.as_deref(), &shape_points_to_csv(&points))
}

fn skorohod(dist: &WeightDistribution, samples: usize, dt: f64, common: &Common) -> Result<()> {
    let law = build_exit_law(dist)?;
    let root = RngStream::new(common.seed, 0);
    let records = with_workers(common.workers, || sample_embeddings(&law, &root, samples, dt))?;
    let taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
    let (m1, se1) = mean_stderr(&taus);
    let (m2, se2) = mean_stderr(&taus.iter().map(|t| t * t).collect::<Vec<_>>());
    eprintln!(
        "E tau = {m1} ± {se1} (E X^2 = {}), E tau^2 = {m2} ± {se2} (bound 4 E X^4 = {})",
        law.second_moment(),
        4.0 * law.fourth_moment()
    );
    emit(common.output.as_deref(), &records_to_csv(&records))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SampleLpp { dist, n, k, samples, kinds, lattice, common } => {
            sample_lpp(&dist, n, k, samples, &kinds, lattice.as_deref(), &common)
        }
        Command::SampleGue { k, samples, common } => sample_gue(k, samples, &common),
        Command::Gamma { k, m, samples, ensemble, common } => gamma(k, m, samples, ensemble.as_deref(), &common),
        Command::TwTable { output } => emit(output.as_deref(), &default_table()?.to_csv()),
        Command::Ks { sample, against, reference, column, alpha } => {
            ks(&sample, against.as_deref(), reference, column.as_deref(), alpha)
        }
        Command::Experiment { config, seed, workers, samples, output, quick } => {
            experiment(&config, seed, workers, samples, output, quick)
        }
        Command::TimeConstant { dist, n_schedule, x, y, replicates, thin_n, thin_k, common } => {
            time_constant(&dist, &n_schedule, x, y, replicates, thin_n.zip(thin_k), &common)
        }
        Command::Skorohod { dist, samples, dt, common } => skorohod(&dist, samples, dt, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
