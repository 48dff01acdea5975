//! Skorohod embedding of mean-zero discrete laws by randomized exit intervals.
//!
//! Pick an interval `(u, v)` around the origin with probability proportional
//! to `(v - u) μ(u) μ(v)`, then run Brownian motion until it leaves the
//! interval. The exit value has law `μ` and `E τ = E X^2`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::weights::{Law, WeightDistribution};

/// Largest admissible Euler step.
pub const MAX_DT: f64 = 1e-4;

/// Exponent beyond which the bridge-crossing probability is treated as zero.
const BRIDGE_CUTOFF: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitInterval {
    pub lower: f64,
    pub upper: f64,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct ExitIntervalLaw {
    atoms: Vec<(f64, f64)>,
    intervals: Vec<ExitInterval>,
    stop_probability: f64,
    // index `intervals.len()` means "stop at zero"
    chooser: WeightedIndex<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingRecord {
    /// `None` when the draw selected the atom at zero.
    pub interval: Option<(f64, f64)>,
    pub tau: f64,
    pub b_tau: f64,
}

impl ExitIntervalLaw {
    /// Builds the embedding for a finite law given as `(value, probability)` atoms.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("target law has no atoms".into()));
        }
        if atoms.iter().any(|&(x, p)| !x.is_finite() || !(p > 0.0 && p <= 1.0)) {
            return Err(Error::Parameter("atoms need finite values and probabilities in (0, 1]".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("atom probabilities sum to {total}")));
        }
        let mut merged: Vec<(f64, f64)> = atoms.to_vec();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        merged.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        let mean: f64 = merged.iter().map(|&(x, p)| x * p).sum();
        let scale: f64 = merged.iter().map(|&(x, p)| x.abs() * p).sum::<f64>().max(1.0);
        if mean.abs() > 1e-12 * scale {
            return Err(Error::Precondition(format!("target law has mean {mean}, not 0")));
        }
        let negative: Vec<_> = merged.iter().copied().filter(|a| a.0 < 0.0).collect();
        let positive: Vec<_> = merged.iter().copied().filter(|a| a.0 > 0.0).collect();
        let stop_probability = merged.iter().filter(|a| a.0 == 0.0).map(|a| a.1).sum();
        let c: f64 = positive.iter().map(|&(v, p)| v * p).sum();
        let mut intervals = Vec::with_capacity(negative.len() * positive.len());
        for &(u, a) in &negative {
            for &(v, b) in &positive {
                intervals.push(ExitInterval { lower: u, upper: v, weight: (v - u) * a * b / c });
            }
        }
        let mut weights: Vec<f64> = intervals.iter().map(|w| w.weight).collect();
        weights.push(stop_probability);
        let chooser = WeightedIndex::new(&weights).map_err(|e| Error::Parameter(e.to_string()))?;
        let law = ExitIntervalLaw { atoms: merged, intervals, stop_probability, chooser };
        law.verify_marginals()?;
        Ok(law)
    }

    /// The embedding of a weight distribution with finitely many atoms.
    pub fn from_distribution(target: &WeightDistribution) -> Result<Self> {
        match *target.law() {
            Law::Rademacher => Self::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]),
            Law::TwoPoint { x1, p1, x2 } => Self::from_atoms(&[(x1, p1), (x2, 1.0 - p1)]),
            _ => Err(Error::Unsupported(format!(
                "exit-interval embedding needs a law with finitely many atoms, got {}",
                target.descriptor()
            ))),
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn intervals(&self) -> &[ExitInterval] {
        &self.intervals
    }

    pub fn stop_probability(&self) -> f64 {
        self.stop_probability
    }

    /// Law of the exit value implied by the interval weights and the
    /// gambler's-ruin probabilities `P(hit v before u) = -u / (v - u)`.
    pub fn exit_distribution(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|&(x, _)| {
                let p = if x == 0.0 {
                    self.stop_probability
                } else {
                    self.intervals
                        .iter()
                        .map(|w| {
                            let up = -w.lower / (w.upper - w.lower);
                            if w.upper == x {
                                w.weight * up
                            } else if w.lower == x {
                                w.weight * (1.0 - up)
                            } else {
                                0.0
                            }
                        })
                        .sum()
                };
                (x, p)
            })
            .collect()
    }

    fn verify_marginals(&self) -> Result<()> {
        for ((x, p), (_, q)) in self.atoms.iter().zip(self.exit_distribution()) {
            if (p - q).abs() > 1e-12 {
                return Err(Error::Numerical(format!("exit law gives {q} at atom {x}, target {p}")));
            }
        }
        Ok(())
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| x * x * p).sum()
    }

    pub fn fourth_moment(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| x.powi(4) * p).sum()
    }
}

pub fn build_exit_law(target: &WeightDistribution) -> Result<ExitIntervalLaw> {
    ExitIntervalLaw::from_distribution(target)
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt <= MAX_DT {
        Ok(())
    } else {
        Err(Error::Parameter(format!("time step {dt} must lie in (0, {MAX_DT}]")))
    }
}

/// Brownian exit time and position from `(lower, upper)`, started at 0.
///
/// Euler steps of size `dt`; a crossing inside a step is detected with the
/// Brownian-bridge probability `exp(-2 (a - b0)(a - b1) / dt)`.
fn exit_interval(lower: f64, upper: f64, stream: &mut RngStream, dt: f64) -> (f64, f64) {
    let sd = dt.sqrt();
    let (mut t, mut b) = (0.0, 0.0);
    loop {
        let z: f64 = stream.sample(StandardNormal);
        let next = b + sd * z;
        if next >= upper {
            return (t + dt * (upper - b) / (next - b), upper);
        }
        if next <= lower {
            return (t + dt * (lower - b) / (next - b), lower);
        }
        for barrier in [upper, lower] {
            let e = 2.0 * (barrier - b) * (barrier - next) / dt;
            if e < BRIDGE_CUTOFF && stream.random::<f64>() < (-e).exp() {
                return (t + 0.5 * dt, barrier);
            }
        }
        t += dt;
        b = next;
    }
}

/// One embedding draw: choose an interval, then run Brownian motion to its exit.
pub fn simulate_embedding(law: &ExitIntervalLaw, stream: &mut RngStream, dt: f64) -> Result<StoppingRecord> {
    check_dt(dt)?;
    let pick = law.chooser.sample(stream);
    if pick == law.intervals.len() {
        return Ok(StoppingRecord { interval: None, tau: 0.0, b_tau: 0.0 });
    }
    let w = &law.intervals[pick];
    let (tau, b_tau) = exit_interval(w.lower, w.upper, stream, dt);
    Ok(StoppingRecord { interval: Some((w.lower, w.upper)), tau, b_tau })
}

/// `n` independent draws; draw `i` uses `stream.fork(i)`.
pub fn sample_embeddings(law: &ExitIntervalLaw, stream: &RngStream, n: usize, dt: f64) -> Result<Vec<StoppingRecord>> {
    check_dt(dt)?;
    (0..n as u64).into_par_iter().map(|i| simulate_embedding(law, &mut stream.fork(i), dt)).collect()
}

/// Partial sums `B_{τ_1 + ... + τ_m}` for `m = 1..=n`.
pub fn embedded_walk(law: &ExitIntervalLaw, stream: &mut RngStream, n: usize, dt: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("walk length must be at least 1".into()));
    }
    let mut sum = 0.0;
    (0..n)
        .map(|_| {
            sum += simulate_embedding(law, stream, dt)?.b_tau;
            Ok(sum)
        })
        .collect()
}

/// CSV with header `tau,b_tau`.
pub fn records_to_csv(records: &[StoppingRecord]) -> String {
    let mut out = String::from("tau,b_tau\n");
    for r in records {
        out.push_str(&format!("{},{}\n", r.tau, r.b_tau));
    }
    out
}
