//! Weight laws for the lattice.
//!
//! Every law carries closed-form moments up to order four; the lattice
//! theorems need a finite fourth moment and the centring transforms need the
//! mean and standard deviation.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Parameters of a weight law, as written in config files
/// (`{ type = "exponential", rate = 1.0 }`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Law {
    Gaussian { mean: f64, stddev: f64 },
    Exponential { rate: f64 },
    /// Support {0, 1, 2, ...} with `P(X = n) = (1 - q) q^n`.
    Geometric { q: f64 },
    Rademacher,
    UniformInterval { a: f64, b: f64 },
    /// `x1` with probability `p1`, otherwise `x2`.
    TwoPoint { x1: f64, p1: f64, x2: f64 },
}

/// A validated iid weight law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Law", into = "Law")]
pub struct WeightDistribution {
    law: Law,
    // cached for the geometric inversion sampler
    log_q: f64,
}

impl TryFrom<Law> for WeightDistribution {
    type Error = Error;

    fn try_from(law: Law) -> Result<Self> {
        WeightDistribution::new(law)
    }
}

impl From<WeightDistribution> for Law {
    fn from(d: WeightDistribution) -> Law {
        d.law
    }
}

/// Parses the [`WeightDistribution::descriptor`] format, e.g.
/// `exponential(rate=1)` or `rademacher`.
impl std::str::FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let args = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parameter(format!("unbalanced parentheses in {text:?}")))?;
                (name.trim(), args)
            }
            None => (text, ""),
        };
        let mut table = format!("type = {name:?}\n");
        for pair in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                pair.split_once('=').ok_or_else(|| Error::Parameter(format!("expected key=value, got {pair:?}")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| Error::Parameter(format!("{value:?} is not a number")))?;
            table.push_str(&format!("{} = {value:?}\n", key.trim()));
        }
        let law: Law = toml::from_str(&table).map_err(|e| Error::Parameter(format!("{text:?}: {}", e.message())))?;
        WeightDistribution::new(law)
    }
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(what.to_string()))
    }
}

impl WeightDistribution {
    pub fn new(law: Law) -> Result<Self> {
        let mut log_q = 0.0;
        match law {
            Law::Gaussian { mean, stddev } => {
                check(mean.is_finite(), "gaussian mean must be finite")?;
                check(stddev.is_finite() && stddev > 0.0, "gaussian stddev must be positive")?;
            }
            Law::Exponential { rate } => {
                check(rate.is_finite() && rate > 0.0, "exponential rate must be positive")?;
            }
            Law::Geometric { q } => {
                check(q > 0.0 && q < 1.0, "geometric q must lie in (0, 1)")?;
                log_q = q.ln();
            }
            Law::Rademacher => {}
            Law::UniformInterval { a, b } => {
                check(a.is_finite() && b.is_finite() && a < b, "uniform interval needs a < b")?;
            }
            Law::TwoPoint { x1, p1, x2 } => {
                check(x1.is_finite() && x2.is_finite(), "two-point atoms must be finite")?;
                check(p1 > 0.0 && p1 < 1.0, "two-point p1 must lie in (0, 1)")?;
                check(x1 != x2, "two-point atoms must differ")?;
            }
        }
        Ok(Self { law, log_q })
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        Self::new(Law::Gaussian { mean, stddev })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Law::Exponential { rate })
    }

    pub fn geometric(q: f64) -> Result<Self> {
        Self::new(Law::Geometric { q })
    }

    pub fn rademacher() -> Self {
        Self { law: Law::Rademacher, log_q: 0.0 }
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Law::UniformInterval { a, b })
    }

    pub fn two_point(x1: f64, p1: f64, x2: f64) -> Result<Self> {
        Self::new(Law::TwoPoint { x1, p1, x2 })
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// Short human-readable descriptor, e.g. `exponential(rate=1)`.
    pub fn descriptor(&self) -> String {
        match self.law {
            Law::Gaussian { mean, stddev } => format!("gaussian(mean={mean},stddev={stddev})"),
            Law::Exponential { rate } => format!("exponential(rate={rate})"),
            Law::Geometric { q } => format!("geometric(q={q})"),
            Law::Rademacher => "rademacher".to_string(),
            Law::UniformInterval { a, b } => format!("uniform_interval(a={a},b={b})"),
            Law::TwoPoint { x1, p1, x2 } => format!("two_point(x1={x1},p1={p1},x2={x2})"),
        }
    }

    /// `E X^p` for `p` in `1..=4`.
    pub fn raw_moment(&self, p: u32) -> f64 {
        assert!((1..=4).contains(&p), "raw moments are tabulated up to order 4");
        match self.law {
            Law::Gaussian { mean: m, stddev: s } => {
                let s2 = s * s;
                match p {
                    1 => m,
                    2 => m * m + s2,
                    3 => m * m * m + 3.0 * m * s2,
                    _ => m.powi(4) + 6.0 * m * m * s2 + 3.0 * s2 * s2,
                }
            }
            Law::Exponential { rate } => (1..=p).product::<u32>() as f64 / rate.powi(p as i32),
            Law::Geometric { q } => {
                // factorial moments E[X(X-1)...(X-j+1)] = j! r^j, r = q/(1-q),
                // combined with Stirling numbers of the second kind
                let r = q / (1.0 - q);
                let f = [r, 2.0 * r * r, 6.0 * r.powi(3), 24.0 * r.powi(4)];
                match p {
                    1 => f[0],
                    2 => f[1] + f[0],
                    3 => f[2] + 3.0 * f[1] + f[0],
                    _ => f[3] + 6.0 * f[2] + 7.0 * f[1] + f[0],
                }
            }
            Law::Rademacher => {
                if p.is_multiple_of(2) {
                    1.0
                } else {
                    0.0
                }
            }
            Law::UniformInterval { a, b } => {
                let e = p as i32 + 1;
                (b.powi(e) - a.powi(e)) / (e as f64 * (b - a))
            }
            Law::TwoPoint { x1, p1, x2 } => p1 * x1.powi(p as i32) + (1.0 - p1) * x2.powi(p as i32),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.law {
            Law::Gaussian { mean, .. } => mean,
            Law::Exponential { rate } => 1.0 / rate,
            Law::Geometric { q } => q / (1.0 - q),
            Law::Rademacher => 0.0,
            Law::UniformInterval { a, b } => 0.5 * (a + b),
            Law::TwoPoint { x1, p1, x2 } => p1 * x1 + (1.0 - p1) * x2,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.law {
            Law::Gaussian { stddev, .. } => stddev * stddev,
            Law::Exponential { rate } => 1.0 / (rate * rate),
            Law::Geometric { q } => q / ((1.0 - q) * (1.0 - q)),
            Law::Rademacher => 1.0,
            Law::UniformInterval { a, b } => (b - a) * (b - a) / 12.0,
            Law::TwoPoint { x1, p1, x2 } => p1 * (1.0 - p1) * (x1 - x2) * (x1 - x2),
        }
    }

    /// `E (X - EX)^4`.
    pub fn fourth_central_moment(&self) -> f64 {
        match self.law {
            Law::Gaussian { stddev, .. } => 3.0 * stddev.powi(4),
            Law::Exponential { rate } => 9.0 / rate.powi(4),
            Law::Rademacher => 1.0,
            Law::UniformInterval { a, b } => (b - a).powi(4) / 80.0,
            Law::TwoPoint { x1, p1, x2 } => {
                let d = x1 - x2;
                let p2 = 1.0 - p1;
                p1 * p2 * (p1.powi(3) + p2.powi(3)) * d.powi(4)
            }
            Law::Geometric { .. } => {
                let m = self.mean();
                self.raw_moment(4) - 4.0 * m * self.raw_moment(3) + 6.0 * m * m * self.raw_moment(2)
                    - 3.0 * m.powi(4)
            }
        }
    }

    /// `(mu, sigma)` such that `(X - mu) / sigma` has mean 0 and variance 1.
    pub fn standardize(&self) -> (f64, f64) {
        (self.mean(), self.variance().sqrt())
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match self.law {
            Law::Gaussian { mean, stddev } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + stddev * z
            }
            Law::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            Law::Geometric { .. } => (rng.open01().ln() / self.log_q).floor(),
            Law::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Law::UniformInterval { a, b } => a + (b - a) * rng.open01(),
            Law::TwoPoint { x1, p1, x2 } => {
                if rng.open01() < p1 {
                    x1
                } else {
                    x2
                }
            }
        }
    }

    /// Overwrite `buf` with iid draws.
    pub fn fill(&self, rng: &mut RngStream, buf: &mut [f64]) {
        for x in buf.iter_mut() {
            *x = self.draw(rng);
        }
    }
}

/// `n` iid draws from `dist` on `stream`.
pub fn sample(dist: &WeightDistribution, stream: &mut RngStream, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("sample size must be at least 1".into()));
    }
    Ok((0..n).map(|_| dist.draw(stream)).collect())
}
