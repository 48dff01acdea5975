//! Discretised paths on `[0, 1]` and the path-space operations built on them.
//!
//! A [`DiscretePath`] stores its values at the uniform grid `t_m = m / M`
//! and stands for the piecewise-linear interpolant. For such paths the
//! partition functionals attain their optimum at grid points, so the grid
//! dynamic programmes below are exact, not approximations.

use std::fmt::Write as _;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscretePath {
    values: Vec<f64>,
}

impl DiscretePath {
    /// `values[m]` is the value at `m / M`; `values[0]` must be 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Dimension("a path needs at least one step".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::Parameter(format!("path must start at 0, got {}", values[0])));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("path values must be finite".into()));
        }
        Ok(Self { values })
    }

    /// Samples `f` at the `M + 1` grid points.
    pub fn from_fn(m_steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=m_steps).map(|m| f(m as f64 / m_steps as f64)).collect())
    }

    pub fn zero(m_steps: usize) -> Self {
        Self { values: vec![0.0; m_steps + 1] }
    }

    pub fn m_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `t = 1`.
    pub fn end(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn negated(&self) -> Self {
        Self { values: self.values.iter().map(|v| -v).collect() }
    }

    /// Piecewise-linear evaluation at arbitrary `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let m = self.m_steps() as f64;
        let x = (t.clamp(0.0, 1.0) * m).min(m);
        let i = (x.floor() as usize).min(self.m_steps() - 1);
        let frac = x - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// `t,value` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let m = self.m_steps() as f64;
        let mut out = String::from("t,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:?},{v:?}", i as f64 / m);
        }
        out
    }
}

/// `k >= 1` paths on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    paths: Vec<DiscretePath>,
}

impl PathEnsemble {
    pub fn new(paths: Vec<DiscretePath>) -> Result<Self> {
        let Some(first) = paths.first() else {
            return Err(Error::Dimension("an ensemble needs at least one path".into()));
        };
        let m = first.m_steps();
        if paths.iter().any(|p| p.m_steps() != m) {
            return Err(Error::Dimension("paths in an ensemble must share a grid".into()));
        }
        Ok(Self { paths })
    }

    pub fn k(&self) -> usize {
        self.paths.len()
    }

    pub fn m_steps(&self) -> usize {
        self.paths[0].m_steps()
    }

    pub fn paths(&self) -> &[DiscretePath] {
        &self.paths
    }

    pub fn path(&self, j: usize) -> &DiscretePath {
        &self.paths[j]
    }

    pub fn into_paths(self) -> Vec<DiscretePath> {
        self.paths
    }

    pub fn negated(&self) -> Self {
        Self { paths: self.paths.iter().map(DiscretePath::negated).collect() }
    }

    /// Coordinates in reverse order, `(f_k, ..., f_1)`.
    pub fn reversed(&self) -> Self {
        Self { paths: self.paths.iter().rev().cloned().collect() }
    }

    /// `t,f1,...,fk` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let m = self.m_steps();
        let mut out = String::from("t");
        for j in 1..=self.k() {
            let _ = write!(out, ",f{j}");
        }
        out.push('\n');
        for i in 0..=m {
            let _ = write!(out, "{:?}", i as f64 / m as f64);
            for p in &self.paths {
                let _ = write!(out, ",{:?}", p.values[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// Standard Brownian motion on `[0, 1]` sampled at `M` uniform steps.
pub fn brownian_path(stream: &mut RngStream, m_steps: usize) -> Result<DiscretePath> {
    if m_steps == 0 {
        return Err(Error::Parameter("brownian path needs M >= 1".into()));
    }
    let scale = 1.0 / (m_steps as f64).sqrt();
    let mut values = Vec::with_capacity(m_steps + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for _ in 0..m_steps {
        let g: f64 = StandardNormal.sample(stream);
        acc += g * scale;
        values.push(acc);
    }
    Ok(DiscretePath { values })
}

/// `k` independent Brownian motions drawn in order from one stream.
pub fn brownian_ensemble(stream: &mut RngStream, k: usize, m_steps: usize) -> Result<PathEnsemble> {
    let paths = (0..k).map(|_| brownian_path(stream, m_steps)).collect::<Result<Vec<_>>>()?;
    PathEnsemble::new(paths)
}

fn chain(ensemble: &PathEnsemble, maximize: bool) -> f64 {
    // h_j(m) = f_j(m) + opt_{r <= m} (h_{j-1}(r) - f_j(r)), h_1 = f_1
    let mut h = ensemble.paths[0].values.clone();
    for f in &ensemble.paths[1..] {
        let mut run = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
        for (hv, &fv) in h.iter_mut().zip(&f.values) {
            let d = *hv - fv;
            run = if maximize { run.max(d) } else { run.min(d) };
            *hv = fv + run;
        }
    }
    h[h.len() - 1]
}

/// `sup_{0=t_0<=...<=t_k=1} sum_j (f_j(t_j) - f_j(t_{j-1}))`.
pub fn g_sup(ensemble: &PathEnsemble) -> f64 {
    chain(ensemble, true)
}

/// `inf_{0=t_0<=...<=t_k=1} sum_j (f_j(t_j) - f_j(t_{j-1}))`.
pub fn g_inf(ensemble: &PathEnsemble) -> f64 {
    chain(ensemble, false)
}

fn check_grid(f: &DiscretePath, g: &DiscretePath) -> Result<()> {
    if f.values.len() != g.values.len() {
        return Err(Error::Dimension(format!("grids differ: M={} vs M={}", f.m_steps(), g.m_steps())));
    }
    Ok(())
}

fn convolve(f: &DiscretePath, g: &DiscretePath, maximize: bool) -> Result<DiscretePath> {
    check_grid(f, g)?;
    let mut run = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&fv, &gv)| {
            let d = fv - gv;
            run = if maximize { run.max(d) } else { run.min(d) };
            gv + run
        })
        .collect();
    Ok(DiscretePath { values })
}

/// `(f ⊗ g)(t) = inf_{0<=s<=t} [f(s) + g(t) - g(s)]`.
pub fn otimes(f: &DiscretePath, g: &DiscretePath) -> Result<DiscretePath> {
    convolve(f, g, false)
}

/// `(f ⊙ g)(t) = sup_{0<=s<=t} [f(s) + g(t) - g(s)]`.
pub fn odot(f: &DiscretePath, g: &DiscretePath) -> Result<DiscretePath> {
    convolve(f, g, true)
}

/// The O'Connell–Yor transform `Γ_k`.
///
/// `Γ_k(f_1..f_k) = (f_1 ⊗ ... ⊗ f_k, Γ_{k-1}(f_2 ⊙ f_1, f_3 ⊙ (f_1 ⊗ f_2), ...,
/// f_k ⊙ (f_1 ⊗ ... ⊗ f_{k-1})))`, with `⊗` chains associated left to right
/// and `Γ_1` the identity. Costs `O(k^2 M)`.
pub fn gamma_k(ensemble: &PathEnsemble) -> Result<PathEnsemble> {
    if ensemble.k() < 2 {
        return Err(Error::Arity(format!("Γ_k needs k >= 2, got {}", ensemble.k())));
    }
    let mut out = Vec::with_capacity(ensemble.k());
    let mut current: Vec<DiscretePath> = ensemble.paths.clone();
    while current.len() > 1 {
        let mut prefix = current[0].clone();
        let mut next = Vec::with_capacity(current.len() - 1);
        for f in &current[1..] {
            next.push(odot(f, &prefix)?);
            prefix = otimes(&prefix, f)?;
        }
        out.push(prefix);
        current = next;
    }
    out.extend(current);
    PathEnsemble::new(out)
}

/// `sum_j sup_t |a_j(t) - b_j(t)|` over the grid.
pub fn sup_norm_distance(a: &PathEnsemble, b: &PathEnsemble) -> Result<f64> {
    if a.k() != b.k() || a.m_steps() != b.m_steps() {
        return Err(Error::Dimension(format!(
            "ensemble shapes differ: {}x{} vs {}x{}",
            a.k(),
            a.m_steps(),
            b.k(),
            b.m_steps()
        )));
    }
    Ok(a.paths
        .iter()
        .zip(&b.paths)
        .map(|(p, q)| p.values.iter().zip(&q.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(m: usize, slope: f64) -> DiscretePath {
        DiscretePath::from_fn(m, |t| slope * t).unwrap()
    }

    fn ens(paths: Vec<DiscretePath>) -> PathEnsemble {
        PathEnsemble::new(paths).unwrap()
    }

    #[test]
    fn rejects_bad_paths() {
        assert!(DiscretePath::new(vec![0.0]).is_err());
        assert!(DiscretePath::new(vec![1.0, 2.0]).is_err());
        assert!(DiscretePath::new(vec![0.0, f64::NAN]).is_err());
        assert!(PathEnsemble::new(vec![]).is_err());
        assert!(PathEnsemble::new(vec![lin(4, 1.0), lin(5, 1.0)]).is_err());
        assert!(otimes(&lin(4, 1.0), &lin(5, 1.0)).is_err());
        assert!(brownian_path(&mut RngStream::new(0, 0), 0).is_err());
    }

    #[test]
    fn g_examples() {
        let f1 = lin(4, 1.0);
        let zero = DiscretePath::zero(4);
        assert_eq!(g_sup(&ens(vec![f1.clone()])), 1.0);
        assert_eq!(g_inf(&ens(vec![f1.clone()])), 1.0);
        assert_eq!(g_sup(&ens(vec![f1.clone(), zero.clone()])), 1.0);
        assert_eq!(g_sup(&ens(vec![zero.clone(), f1.clone()])), 1.0);
        assert_eq!(g_inf(&ens(vec![f1, zero])), 0.0);
    }

    #[test]
    fn convolution_examples() {
        let f = lin(8, 1.0);
        let zero = DiscretePath::zero(8);
        assert!(otimes(&f, &zero).unwrap().values().iter().all(|&v| v == 0.0));
        assert_eq!(odot(&f, &zero).unwrap(), f);
        assert_eq!(otimes(&f, &f).unwrap(), f);
        let g = DiscretePath::new(vec![0.0, 0.5, -0.25, 1.0, 0.75]).unwrap();
        let z = DiscretePath::zero(4);
        // f = 0: g(t) - max_{s<=t} g(s), and the Pitman-type reflection g(t) - min g
        assert_eq!(otimes(&z, &g).unwrap().values(), &[0.0, 0.0, -0.75, 0.0, -0.25]);
        assert_eq!(odot(&z, &g).unwrap().values(), &[0.0, 0.5, 0.0, 1.25, 1.0]);
    }

    #[test]
    fn gamma_two_linear_example() {
        let out = gamma_k(&ens(vec![lin(4, 1.0), DiscretePath::zero(4)])).unwrap();
        assert!(out.path(0).values().iter().all(|&v| v == 0.0));
        assert_eq!(out.path(1), &lin(4, 1.0));
    }

    #[test]
    fn gamma_needs_two_coordinates() {
        assert!(matches!(gamma_k(&ens(vec![lin(4, 1.0)])), Err(Error::Arity(_))));
    }

    #[test]
    fn sup_norm_examples() {
        let a = ens(vec![lin(4, 1.0), lin(4, -2.0)]);
        assert_eq!(sup_norm_distance(&a, &a).unwrap(), 0.0);
        let mut v = a.path(1).values().to_vec();
        v[2] += 0.75;
        let b = ens(vec![lin(4, 1.0), DiscretePath::new(v).unwrap()]);
        assert_eq!(sup_norm_distance(&a, &b).unwrap(), 0.75);
        assert!(sup_norm_distance(&a, &ens(vec![lin(4, 1.0)])).is_err());
    }

    #[test]
    fn eval_interpolates() {
        let p = DiscretePath::new(vec![0.0, 1.0, -1.0]).unwrap();
        assert_eq!(p.eval(0.25), 0.5);
        assert_eq!(p.eval(0.75), 0.0);
        assert_eq!(p.eval(1.0), -1.0);
    }

    #[test]
    fn brownian_single_step_variance() {
        let mut s = RngStream::new(1, 1);
        let n = 100_000;
        let ends: Vec<f64> = (0..n).map(|_| brownian_path(&mut s, 1).unwrap().end()).collect();
        let var = ends.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = ens(vec![lin(2, 1.0), lin(2, 2.0)]).to_csv();
        assert_eq!(csv, "t,f1,f2\n0.0,0.0,0.0\n0.5,0.5,1.0\n1.0,1.0,2.0\n");
        assert_eq!(lin(1, 3.0).to_csv(), "t,value\n0.0,0.0\n1.0,3.0\n");
    }
}
