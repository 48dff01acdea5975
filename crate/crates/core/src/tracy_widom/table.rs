//! Tabulated `q`, `F_GUE` and the density on a uniform grid.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::airy::{airy, airy_square_moment_tail, airy_square_tail};

/// Six-point Gauss–Legendre rule on `[0, 1]`.
const GAUSS6: [(f64, f64); 6] = [
    (0.033_765_242_898_423_986, 0.085_662_246_189_585_17),
    (0.169_395_306_766_867_74, 0.180_380_786_524_069_3),
    (0.380_690_406_958_401_56, 0.233_956_967_286_345_52),
    (0.619_309_593_041_598_4, 0.233_956_967_286_345_52),
    (0.830_604_693_233_132_3, 0.180_380_786_524_069_3),
    (0.966_234_757_101_576, 0.085_662_246_189_585_17),
];

#[derive(Clone, Debug)]
pub struct TWTable {
    grid: Vec<f64>,
    step: f64,
    seed_point: f64,
    q: Vec<f64>,
    q_prime: Vec<f64>,
    // filled by `f_gue_from_q`
    cdf: Vec<f64>,
    inner: Vec<f64>,
    square_tail: Vec<f64>,
    density: Vec<f64>,
}

impl TWTable {
    pub(crate) fn from_solution(grid: Vec<f64>, step: f64, seed_point: f64, q: Vec<f64>, q_prime: Vec<f64>) -> Self {
        TWTable { grid, step, seed_point, q, q_prime, cdf: Vec::new(), inner: Vec::new(), square_tail: Vec::new(), density: Vec::new() }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn s_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn s_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn seed_point(&self) -> f64 {
        self.seed_point
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn q_prime(&self) -> &[f64] {
        &self.q_prime
    }

    /// `F_GUE` at the grid nodes; empty until [`f_gue_from_q`] has run.
    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    /// `∫_s^∞ (x - s) q(x)^2 dx` at the grid nodes.
    pub fn inner_integral(&self) -> &[f64] {
        &self.inner
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn has_distribution(&self) -> bool {
        !self.cdf.is_empty()
    }

    fn require_distribution(&self) -> Result<()> {
        if self.has_distribution() {
            Ok(())
        } else {
            Err(Error::Precondition("table has no distribution column yet".into()))
        }
    }

    /// Locates the grid cell holding `s`.
    fn cell(&self, s: f64) -> Result<(usize, f64)> {
        if !(s >= self.s_min() && s <= self.s_max()) {
            return Err(Error::Domain(format!("{s} outside table range [{}, {}]", self.s_min(), self.s_max())));
        }
        let last = self.grid.len() - 2;
        let i = (((s - self.s_min()) / self.step).floor() as usize).min(last);
        Ok((i, (s - self.grid[i]) / self.step))
    }

    /// `F_GUE(s)`: cubic Hermite interpolation of `-ln F` (whose slope is
    /// `-∫_s^∞ q^2`), exponentiated. Monotone and accurate in both tails.
    pub fn cdf_at(&self, s: f64) -> Result<f64> {
        self.require_distribution()?;
        let (i, t) = self.cell(s)?;
        let h = self.step;
        let (f0, f1) = (self.inner[i], self.inner[i + 1]);
        let (d0, d1) = (-self.square_tail[i] * h, -self.square_tail[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * d1;
        Ok((-v.max(0.0)).exp())
    }

    /// Inverse of [`TWTable::cdf_at`] by bisection to `1e-8`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.require_distribution()?;
        let (lo_p, hi_p) = (self.cdf[0], self.cdf[self.cdf.len() - 1]);
        if !(p > 0.0 && p < 1.0) || p < lo_p || p > hi_p {
            return Err(Error::Domain(format!("probability {p} outside the tabulated range")));
        }
        let (mut lo, mut hi) = (self.s_min(), self.s_max());
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if self.cdf_at(mid)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `∫ g(s) F'(s) ds` over the grid by composite Simpson (trapezoid on a leftover cell).
    fn integrate_density(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.grid.len() - 1;
        let f = |i: usize| g(self.grid[i]) * self.density[i];
        let even = n - n % 2;
        let mut sum = 0.0;
        for i in (0..even).step_by(2) {
            sum += f(i) + 4.0 * f(i + 1) + f(i + 2);
        }
        let mut total = sum * self.step / 3.0;
        if even < n {
            total += 0.5 * self.step * (f(n - 1) + f(n));
        }
        total
    }

    /// Total mass of the tabulated density.
    pub fn mass(&self) -> Result<f64> {
        self.require_distribution()?;
        Ok(self.integrate_density(|_| 1.0))
    }

    pub fn mean(&self) -> Result<f64> {
        self.require_distribution()?;
        Ok(self.integrate_density(|s| s))
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok(self.integrate_density(|s| (s - m) * (s - m)))
    }

    /// Checks the structural invariants of a completed table.
    pub fn check_invariants(&self) -> Result<()> {
        self.require_distribution()?;
        if let Some(i) = self.q.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::Numerical(format!("q not positive at s = {}", self.grid[i])));
        }
        for i in 1..self.grid.len() {
            if !(self.inner[i] < self.inner[i - 1]) || self.cdf[i] < self.cdf[i - 1] {
                return Err(Error::Numerical(format!("distribution not increasing at s = {}", self.grid[i])));
            }
        }
        Ok(())
    }

    /// CSV with header `s,q,F`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,q,F\n");
        for (i, s) in self.grid.iter().enumerate() {
            let f = self.cdf.get(i).copied().unwrap_or(f64::NAN);
            let _ = writeln!(out, "{s:.3},{:.12e},{f:.12e}", self.q[i]);
        }
        out
    }
}

fn quintic_hermite(t: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    a[0] * h0 + h * a[1] * h1 + h * h * a[2] * h2 + b[0] * h3 + h * b[1] * h4 + h * h * b[2] * h5
}

/// Fills the distribution columns: `F(s) = exp(-∫_s^∞ (x - s) q(x)^2 dx)`.
///
/// Above the seed point `q` is the Airy function and both tail integrals are
/// closed-form. Below it each grid cell is integrated exactly against the
/// quintic Hermite interpolant of `q` built from `q`, `q'` and `q'' = 2q^3 + xq`.
pub fn f_gue_from_q(mut table: TWTable) -> Result<TWTable> {
    let n = table.grid.len();
    if n < 2 || table.q.len() != n || table.q_prime.len() != n {
        return Err(Error::Precondition("table has no q column".into()));
    }
    let h = table.step;
    // u(s) = ∫_s^∞ q^2 and I(s) = ∫_s^∞ (x - s) q^2
    let mut u = vec![0.0; n];
    let mut inner = vec![0.0; n];
    let seed = table.grid.iter().position(|&s| s >= table.seed_point - 1e-9 * h).unwrap_or(n - 1);
    for i in seed..n {
        let a = airy(table.grid[i])?;
        u[i] = airy_square_tail(&a);
        inner[i] = airy_square_moment_tail(&a);
    }
    let jet = |i: usize| {
        let (x, q) = (table.grid[i], table.q[i]);
        [q, table.q_prime[i], 2.0 * q * q * q + x * q]
    };
    for i in (0..seed).rev() {
        let (a, b) = (jet(i), jet(i + 1));
        let (mut m0, mut m1) = (0.0, 0.0);
        for (t, w) in GAUSS6 {
            let q = quintic_hermite(t, h, a, b);
            m0 += w * q * q;
            m1 += w * t * q * q;
        }
        m0 *= h;
        m1 *= h * h;
        u[i] = u[i + 1] + m0;
        inner[i] = inner[i + 1] + h * u[i + 1] + m1;
    }
    table.cdf = inner.iter().map(|v| (-v).exp()).collect();
    table.density = table.cdf.iter().zip(&u).map(|(f, u)| f * u).collect();
    table.inner = inner;
    table.square_tail = u;
    table.check_invariants()?;
    Ok(table)
}
