//! Law-of-large-numbers constants of last passage percolation: the square
//! shape functions for exponential and geometric weights and the `2σ`
//! constant of thin rectangles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::{sample_passage_value, PassageKind};
use crate::rng::RngStream;
use crate::stats::mean_stderr;
use crate::weights::WeightDistribution;

pub const MIN_REPLICATES: usize = 30;

/// Monte Carlo estimate of a normalized passage time.
///
/// For shape points `mean_ratio` averages `L^l(⌊xn⌋, ⌊yn⌋) / n`; for thin
/// rectangles (`x = 1`, `y = k / N`, `n = N`) it averages `(L^l - μN) / √(Nk)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapePoint {
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub replicates: usize,
    pub mean_ratio: f64,
    pub stderr: f64,
    pub predicted: Option<f64>,
}

fn check_positive(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("shape direction ({x}, {y}) must be positive")))
    }
}

/// `(√x + √y)^2`, the shape function for rate-1 exponential weights.
pub fn predicted_constant_exponential(x: f64, y: f64) -> Result<f64> {
    check_positive(x, y)?;
    let r = x.sqrt() + y.sqrt();
    Ok(r * r)
}

/// `(q(x + y) + 2√(qxy)) / (1 - q)` for geometric weights on `{0, 1, ...}`.
pub fn predicted_constant_geometric(x: f64, y: f64, q: f64) -> Result<f64> {
    check_positive(x, y)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("geometric parameter {q} outside (0, 1)")));
    }
    Ok((q * (x + y) + 2.0 * (q * x * y).sqrt()) / (1.0 - q))
}

/// The predicted square shape constant for `dist`, when one is known.
pub fn predicted_constant(dist: &WeightDistribution, x: f64, y: f64) -> Result<Option<f64>> {
    use crate::weights::Law;
    match *dist.law() {
        Law::Exponential { rate } => Ok(Some(predicted_constant_exponential(x, y)? / rate)),
        Law::Geometric { q } => predicted_constant_geometric(x, y, q).map(Some),
        _ => Ok(None),
    }
}

fn replicate_values(
    dist: &WeightDistribution,
    stream: &RngStream,
    n_cols: usize,
    n_rows: usize,
    replicates: usize,
) -> Result<Vec<f64>> {
    if replicates < MIN_REPLICATES {
        return Err(Error::Parameter(format!("need at least {MIN_REPLICATES} replicates, got {replicates}")));
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|i| sample_passage_value(dist, &mut stream.fork(i), n_cols, n_rows, PassageKind::LLast))
        .collect()
}

/// `L^l(⌊xn⌋, ⌊yn⌋) / n` averaged over independent lattices.
pub fn shape_point(
    dist: &WeightDistribution,
    x: f64,
    y: f64,
    n: usize,
    replicates: usize,
    stream: &RngStream,
) -> Result<ShapePoint> {
    check_positive(x, y)?;
    let (cols, rows) = ((x * n as f64).floor() as usize, (y * n as f64).floor() as usize);
    let ratios: Vec<f64> =
        replicate_values(dist, stream, cols, rows, replicates)?.into_iter().map(|v| v / n as f64).collect();
    let (mean_ratio, stderr) = mean_stderr(&ratios);
    Ok(ShapePoint { x, y, n, replicates, mean_ratio, stderr, predicted: predicted_constant(dist, x, y)? })
}

/// Shape points along a schedule of `n`, each from its own labelled stream.
pub fn shape_curve(
    dist: &WeightDistribution,
    x: f64,
    y: f64,
    ns: &[usize],
    replicates: usize,
    stream: &RngStream,
) -> Result<Vec<ShapePoint>> {
    ns.iter().map(|&n| shape_point(dist, x, y, n, replicates, &stream.labelled(&format!("n={n}")))).collect()
}

/// Least-squares fit `mean_ratio ≈ limit + amplitude · n^{-1/3}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    pub amplitude: f64,
}

pub fn extrapolate(points: &[ShapePoint]) -> Result<Extrapolation> {
    if points.len() < 2 {
        return Err(Error::Parameter("extrapolation needs at least two shape points".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).powf(-1.0 / 3.0)).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = points.iter().map(|p| p.mean_ratio).sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("extrapolation needs distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.mean_ratio - my)).sum();
    let amplitude = sxy / sxx;
    Ok(Extrapolation { limit: my - amplitude * mx, amplitude })
}

/// `(L^l(N, k) - μN) / √(Nk)` averaged over replicates; tends to `2σ` when
/// `k` grows slower than `N`. Requires `k <= N^{1/3}`.
pub fn thin_rectangle_constant(
    dist: &WeightDistribution,
    n: usize,
    k: usize,
    replicates: usize,
    stream: &RngStream,
) -> Result<ShapePoint> {
    if k == 0 || (k as f64) > (n as f64).cbrt() + 1e-9 {
        return Err(Error::Precondition(format!("thin rectangle needs 1 <= k <= N^(1/3), got N={n}, k={k}")));
    }
    let mu = dist.mean();
    let norm = ((n * k) as f64).sqrt();
    let stats: Vec<f64> = replicate_values(dist, stream, n, k, replicates)?
        .into_iter()
        .map(|v| (v - mu * n as f64) / norm)
        .collect();
    let (mean_ratio, stderr) = mean_stderr(&stats);
    Ok(ShapePoint {
        x: 1.0,
        y: k as f64 / n as f64,
        n,
        replicates,
        mean_ratio,
        stderr,
        predicted: Some(2.0 * dist.variance().sqrt()),
    })
}

/// CSV with header `x,y,n,mean_ratio,stderr,predicted`.
pub fn shape_points_to_csv(points: &[ShapePoint]) -> String {
    let mut out = String::from("x,y,n,mean_ratio,stderr,predicted\n");
    for p in points {
        let pred = p.predicted.map_or(String::new(), |v| v.to_string());
        out.push_str(&format!("{},{},{},{},{},{}\n", p.x, p.y, p.n, p.mean_ratio, p.stderr, pred));
    }
    out
}
