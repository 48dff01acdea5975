//! Directed passage functionals on an `N x k` lattice of weights.
//!
//! Two families are computed, and kept apart on purpose:
//!
//! * the *theorem form* `L(N,k)` / `R(N,k)`: sup/inf over partitions
//!   `0 = i_0 <= ... <= i_k = N` of `sum_j sum_{i_{j-1} < i <= i_j} X_i^j`.
//!   Segments are disjoint and a level may be skipped entirely.
//! * the *path form* `L^l(N,k)` / `L^f(N,k)`: max/min over up/right lattice
//!   paths from `(1,1)` to `(N,k)`, i.e. partitions `1 = i_0 <= ... <= i_k = N`
//!   with closed segments `[i_{j-1}, i_j]` that share their endpoints.
//!
//! All dynamic programmes run level by level over a single rolling buffer of
//! length `N`, so rows can be streamed from a sampler without materialising the
//! lattice. Every DP value equals the running-sum evaluation (levels in order,
//! columns ascending) of some admissible partition, bit for bit, because
//! rounded addition is monotone; the brute-force oracle evaluates in the same
//! order, which makes DP/oracle comparisons exact even for float weights.

use std::fmt::Write as _;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::weights::WeightDistribution;

/// Where a sampled lattice came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub distribution: WeightDistribution,
    pub seed: u64,
    pub stream_id: u64,
}

/// Realised weights `X_i^j`, `i` the column ("time", `1..=N`) and `j` the
/// level (`1..=k`). Stored level-major: level `j` occupies one contiguous row.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    n_cols: usize,
    n_rows: usize,
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

impl WeightMatrix {
    /// `values` is level-major: `values[j * n_cols + i]` is `X_{i+1}^{j+1}`.
    pub fn new(n_cols: usize, n_rows: usize, values: Vec<f64>) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::Dimension("weight matrix needs at least one column and one level".into()));
        }
        if values.len() != n_cols * n_rows {
            return Err(Error::Dimension(format!(
                "expected {} weights for a {n_cols}x{n_rows} lattice, got {}",
                n_cols * n_rows,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::Parameter(format!("non-finite weight at index {pos}")));
        }
        Ok(Self { n_cols, n_rows, values, provenance: None })
    }

    /// One inner vector per level, each of length `N`.
    pub fn from_levels(levels: &[Vec<f64>]) -> Result<Self> {
        let n_cols = levels.first().map_or(0, Vec::len);
        if levels.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("levels have unequal lengths".into()));
        }
        Self::new(n_cols, levels.len(), levels.concat())
    }

    /// Fill an `n_cols x n_rows` lattice level by level from `stream`.
    pub fn sample(dist: &WeightDistribution, stream: &mut RngStream, n_cols: usize, n_rows: usize) -> Result<Self> {
        let provenance = Provenance { distribution: *dist, seed: stream.seed(), stream_id: stream.stream_id() };
        let mut values = vec![0.0; n_cols * n_rows];
        dist.fill(stream, &mut values);
        let mut w = Self::new(n_cols, n_rows, values)?;
        w.provenance = Some(provenance);
        Ok(w)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// `X_{i+1}^{j+1}` (zero-based indices).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n_cols + i]
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_cols..(j + 1) * self.n_cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn negated(&self) -> Self {
        Self {
            n_cols: self.n_cols,
            n_rows: self.n_rows,
            values: self.values.iter().map(|x| -x).collect(),
            provenance: None,
        }
    }

    /// Swap the roles of columns and levels.
    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n_cols {
            values.extend((0..self.n_rows).map(|j| self.get(i, j)));
        }
        Self { n_cols: self.n_rows, n_rows: self.n_cols, values, provenance: None }
    }

    /// CSV fixture: `#`-prefixed metadata lines, then one line per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# thinlpp weight matrix v1\n");
        let _ = writeln!(out, "# n_cols={}", self.n_cols);
        let _ = writeln!(out, "# n_rows={}", self.n_rows);
        if let Some(p) = &self.provenance {
            let _ = writeln!(out, "# distribution={}", serde_json::to_string(&p.distribution).unwrap_or_default());
            let _ = writeln!(out, "# seed={}", p.seed);
            let _ = writeln!(out, "# stream_id={}", p.stream_id);
        }
        for j in 0..self.n_rows {
            let line: Vec<String> = self.level(j).iter().map(|x| format!("{x:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut n_cols = None;
        let mut n_rows = None;
        let mut dist = None;
        let mut seed = None;
        let mut stream_id = None;
        let mut values = Vec::new();
        let bad = |what: &str| Error::Parameter(format!("malformed weight matrix CSV: {what}"));
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix('#') {
                let Some((key, val)) = meta.trim().split_once('=') else { continue };
                match key {
                    "n_cols" => n_cols = Some(val.parse::<usize>().map_err(|_| bad("n_cols"))?),
                    "n_rows" => n_rows = Some(val.parse::<usize>().map_err(|_| bad("n_rows"))?),
                    "distribution" => dist = Some(serde_json::from_str::<WeightDistribution>(val)?),
                    "seed" => seed = Some(val.parse::<u64>().map_err(|_| bad("seed"))?),
                    "stream_id" => stream_id = Some(val.parse::<u64>().map_err(|_| bad("stream_id"))?),
                    _ => {}
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            for field in line.split(',') {
                values.push(field.trim().parse::<f64>().map_err(|_| bad("value"))?);
            }
        }
        let mut w = Self::new(n_cols.ok_or_else(|| bad("missing n_cols"))?, n_rows.ok_or_else(|| bad("missing n_rows"))?, values)?;
        if let (Some(distribution), Some(seed), Some(stream_id)) = (dist, seed, stream_id) {
            w.provenance = Some(Provenance { distribution, seed, stream_id });
        }
        Ok(w)
    }

    /// Flat little-endian binary fixture.
    ///
    /// Layout: `b"WMAT"`, `u32` version (1), `u64` N, `u64` k, `u32` byte length
    /// of the provenance JSON (0 if absent), the JSON, then `N*k` `f64` values
    /// level-major.
    pub fn to_bytes(&self) -> Vec<u8> {
        let prov = self.provenance.as_ref().map(|p| serde_json::to_vec(p).unwrap_or_default()).unwrap_or_default();
        let mut out = Vec::with_capacity(28 + prov.len() + 8 * self.values.len());
        out.extend_from_slice(b"WMAT");
        out.extend_from_slice(&1u32.to_le_bytes());
        out.extend_from_slice(&(self.n_cols as u64).to_le_bytes());
        out.extend_from_slice(&(self.n_rows as u64).to_le_bytes());
        out.extend_from_slice(&(prov.len() as u32).to_le_bytes());
        out.extend_from_slice(&prov);
        for x in &self.values {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |what: &str| Error::Parameter(format!("malformed weight matrix binary: {what}"));
        let take = |at: usize, len: usize| bytes.get(at..at + len).ok_or_else(|| bad("truncated"));
        if take(0, 4)? != b"WMAT" {
            return Err(bad("magic"));
        }
        let version = u32::from_le_bytes(take(4, 4)?.try_into().unwrap());
        if version != 1 {
            return Err(bad("unknown version"));
        }
        let n_cols = u64::from_le_bytes(take(8, 8)?.try_into().unwrap()) as usize;
        let n_rows = u64::from_le_bytes(take(16, 8)?.try_into().unwrap()) as usize;
        let plen = u32::from_le_bytes(take(24, 4)?.try_into().unwrap()) as usize;
        let provenance = if plen > 0 { Some(serde_json::from_slice::<Provenance>(take(28, plen)?)?) } else { None };
        let start = 28 + plen;
        let count = n_cols.checked_mul(n_rows).ok_or_else(|| bad("size overflow"))?;
        let body = take(start, count * 8)?;
        let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let mut w = Self::new(n_cols, n_rows, values)?;
        w.provenance = provenance;
        Ok(w)
    }
}

/// Which passage functional a result belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PassageKind {
    /// Theorem-form supremum `L(N,k)`.
    L,
    /// Theorem-form infimum `R(N,k)`.
    R,
    /// Last passage time `L^l(N,k)`.
    LLast,
    /// First passage time `L^f(N,k)`.
    LFirst,
}

impl PassageKind {
    pub const ALL: [PassageKind; 4] = [PassageKind::L, PassageKind::R, PassageKind::LLast, PassageKind::LFirst];

    pub fn is_path_form(self) -> bool {
        matches!(self, PassageKind::LLast | PassageKind::LFirst)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PassageResult {
    pub value: f64,
    pub kind: PassageKind,
    /// Full index sequence `i_0, ..., i_k` (1-based columns; `i_0 = 0` for the
    /// theorem form, `i_0 = 1` for the path form), when recovered.
    pub partition: Option<Vec<usize>>,
}

/// Direction of optimisation.
pub trait Extremum {
    const WORST: f64;
    fn pick(a: f64, b: f64) -> f64;
    /// `a` is at least as good as `b`.
    fn at_least(a: f64, b: f64) -> bool;
}

pub struct Max;
pub struct Min;

impl Extremum for Max {
    const WORST: f64 = f64::NEG_INFINITY;
    #[inline]
    fn pick(a: f64, b: f64) -> f64 {
        if b > a {
            b
        } else {
            a
        }
    }
    #[inline]
    fn at_least(a: f64, b: f64) -> bool {
        a >= b
    }
}

impl Extremum for Min {
    const WORST: f64 = f64::INFINITY;
    #[inline]
    fn pick(a: f64, b: f64) -> f64 {
        if b < a {
            b
        } else {
            a
        }
    }
    #[inline]
    fn at_least(a: f64, b: f64) -> bool {
        a <= b
    }
}

/// Streaming DP for the theorem form: `T_j(m) = opt(T_{j-1}(m), T_j(m-1) + X_m^j)`.
pub struct TheoremDp<E: Extremum> {
    buf: Vec<f64>,
    rows: usize,
    _e: PhantomData<E>,
}

impl<E: Extremum> TheoremDp<E> {
    pub fn new(n_cols: usize) -> Self {
        let mut buf = vec![E::WORST; n_cols + 1];
        buf[0] = 0.0;
        Self { buf, rows: 0, _e: PhantomData }
    }

    #[inline]
    pub fn push_level(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len() + 1, self.buf.len());
        let mut prev = self.buf[0];
        for (t, &x) in self.buf[1..].iter_mut().zip(row) {
            let v = E::pick(*t, prev + x);
            *t = v;
            prev = v;
        }
        self.rows += 1;
    }

    pub fn levels(&self) -> usize {
        self.rows
    }

    pub fn value(&self) -> f64 {
        self.buf[self.buf.len() - 1]
    }
}

/// Streaming DP for the path form: `G_j(i) = X_i^j + opt(G_j(i-1), G_{j-1}(i))`.
pub struct PathDp<E: Extremum> {
    buf: Vec<f64>,
    rows: usize,
    _e: PhantomData<E>,
}

impl<E: Extremum> PathDp<E> {
    pub fn new(n_cols: usize) -> Self {
        // virtual level 0 lets the path enter at column 1 only
        let mut buf = vec![E::WORST; n_cols];
        buf[0] = 0.0;
        Self { buf, rows: 0, _e: PhantomData }
    }

    #[inline]
    pub fn push_level(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.buf.len());
        let mut left = E::WORST;
        for (g, &x) in self.buf.iter_mut().zip(row) {
            let v = E::pick(left, *g) + x;
            *g = v;
            left = v;
        }
        self.rows += 1;
    }

    pub fn levels(&self) -> usize {
        self.rows
    }

    pub fn value(&self) -> f64 {
        self.buf[self.buf.len() - 1]
    }
}

fn theorem_dp<E: Extremum>(w: &WeightMatrix) -> f64 {
    let mut dp = TheoremDp::<E>::new(w.n_cols);
    for j in 0..w.n_rows {
        dp.push_level(w.level(j));
    }
    dp.value()
}

fn path_dp<E: Extremum>(w: &WeightMatrix) -> f64 {
    let mut dp = PathDp::<E>::new(w.n_cols);
    for j in 0..w.n_rows {
        dp.push_level(w.level(j));
    }
    dp.value()
}

/// Running-sum objective of the theorem form on `0 = i_0 <= ... <= i_k = N`.
pub fn theorem_objective(w: &WeightMatrix, partition: &[usize]) -> f64 {
    let mut acc = 0.0;
    for j in 0..w.n_rows {
        for i in partition[j]..partition[j + 1] {
            acc += w.get(i, j);
        }
    }
    acc
}

/// Running-sum objective of the path form on `1 = i_0 <= ... <= i_k = N`.
pub fn path_objective(w: &WeightMatrix, partition: &[usize]) -> f64 {
    let mut acc = 0.0;
    for j in 0..w.n_rows {
        for i in partition[j] - 1..partition[j + 1] {
            acc += w.get(i, j);
        }
    }
    acc
}

/// Lexicographically smallest optimal theorem-form partition.
///
/// A suffix table is filled backwards and walked forwards, stopping each level
/// as early as optimality allows. Uses `O(Nk)` memory.
fn theorem_partition<E: Extremum>(w: &WeightMatrix) -> Vec<usize> {
    let (n, k) = (w.n_cols, w.n_rows);
    let idx = |j: usize, m: usize| j * (n + 1) + m;
    // s[j][m]: best value of levels j.. given level j starts after column m
    let mut s = vec![E::WORST; (k + 1) * (n + 1)];
    s[idx(k, n)] = 0.0;
    for j in (0..k).rev() {
        s[idx(j, n)] = s[idx(j + 1, n)];
        for m in (0..n).rev() {
            s[idx(j, m)] = E::pick(s[idx(j + 1, m)], w.get(m, j) + s[idx(j, m + 1)]);
        }
    }
    let mut part = vec![0];
    let (mut j, mut m) = (0, 0);
    while j < k {
        if m == n || E::at_least(s[idx(j + 1, m)], w.get(m, j) + s[idx(j, m + 1)]) {
            part.push(m);
            j += 1;
        } else {
            m += 1;
        }
    }
    part
}

/// Lexicographically smallest optimal path-form partition (earliest up-steps).
fn path_partition<E: Extremum>(w: &WeightMatrix) -> Vec<usize> {
    let (n, k) = (w.n_cols, w.n_rows);
    let idx = |j: usize, m: usize| j * n + m;
    // s[j][m]: best value from site (m, j) inclusive to (N-1, k-1)
    let mut s = vec![E::WORST; k * n];
    for j in (0..k).rev() {
        for m in (0..n).rev() {
            let right = if m + 1 < n { s[idx(j, m + 1)] } else { E::WORST };
            let up = if j + 1 < k { s[idx(j + 1, m)] } else { E::WORST };
            let tail = if j + 1 == k && m + 1 == n { 0.0 } else { E::pick(right, up) };
            s[idx(j, m)] = w.get(m, j) + tail;
        }
    }
    let mut part = vec![1];
    let (mut j, mut m) = (0, 0);
    while j + 1 < k {
        let go_up = m + 1 == n || E::at_least(s[idx(j + 1, m)], s[idx(j, m + 1)]);
        if go_up {
            part.push(m + 1);
            j += 1;
        } else {
            m += 1;
        }
    }
    part.push(n);
    part
}

fn finish(w: &WeightMatrix, kind: PassageKind, value: f64, partition: Option<Vec<usize>>) -> PassageResult {
    // with a recovered partition the reported value is its own objective, so the
    // two can never disagree
    let value = match &partition {
        Some(p) if kind.is_path_form() => path_objective(w, p),
        Some(p) => theorem_objective(w, p),
        None => value,
    };
    PassageResult { value, kind, partition }
}

/// `L(N,k)`: sup over `0 = i_0 <= ... <= i_k = N` of disjoint level segments.
pub fn last_passage_theorem_form(w: &WeightMatrix) -> PassageResult {
    passage(w, PassageKind::L, false)
}

/// `R(N,k)`: the infimum counterpart of [`last_passage_theorem_form`].
pub fn first_passage_theorem_form(w: &WeightMatrix) -> PassageResult {
    passage(w, PassageKind::R, false)
}

/// `L^l(N,k)`: maximum weight of an up/right path from `(1,1)` to `(N,k)`.
pub fn last_passage_path_form(w: &WeightMatrix) -> PassageResult {
    passage(w, PassageKind::LLast, false)
}

/// `L^f(N,k)`: minimum weight of an up/right path from `(1,1)` to `(N,k)`.
pub fn first_passage_path_form(w: &WeightMatrix) -> PassageResult {
    passage(w, PassageKind::LFirst, false)
}

/// Any passage functional, optionally recovering the lexicographically
/// smallest optimal partition (`O(Nk)` extra memory).
pub fn passage(w: &WeightMatrix, kind: PassageKind, recover: bool) -> PassageResult {
    match kind {
        PassageKind::L => {
            let p = recover.then(|| theorem_partition::<Max>(w));
            finish(w, kind, theorem_dp::<Max>(w), p)
        }
        PassageKind::R => {
            let p = recover.then(|| theorem_partition::<Min>(w));
            finish(w, kind, theorem_dp::<Min>(w), p)
        }
        PassageKind::LLast => {
            let p = recover.then(|| path_partition::<Max>(w));
            finish(w, kind, path_dp::<Max>(w), p)
        }
        PassageKind::LFirst => {
            let p = recover.then(|| path_partition::<Min>(w));
            finish(w, kind, path_dp::<Min>(w), p)
        }
    }
}

/// Passage value of a freshly sampled `n_cols x n_rows` lattice, generated
/// level by level without storing it. Consumes `stream` exactly like
/// [`WeightMatrix::sample`], so both routes give the same value.
pub fn sample_passage_value(
    dist: &WeightDistribution,
    stream: &mut RngStream,
    n_cols: usize,
    n_rows: usize,
    kind: PassageKind,
) -> Result<f64> {
    if n_cols == 0 || n_rows == 0 {
        return Err(Error::Dimension(format!("empty lattice {n_cols} x {n_rows}")));
    }
    fn run<D>(dist: &WeightDistribution, stream: &mut RngStream, n_cols: usize, n_rows: usize, mut dp: D) -> f64
    where
        D: FnMut(&[f64]) -> f64,
    {
        let mut row = vec![0.0; n_cols];
        let mut value = 0.0;
        for _ in 0..n_rows {
            dist.fill(stream, &mut row);
            value = dp(&row);
        }
        value
    }
    let value = match kind {
        PassageKind::L => {
            let mut dp = TheoremDp::<Max>::new(n_cols);
            run(dist, stream, n_cols, n_rows, |r| {
                dp.push_level(r);
                dp.value()
            })
        }
        PassageKind::R => {
            let mut dp = TheoremDp::<Min>::new(n_cols);
            run(dist, stream, n_cols, n_rows, |r| {
                dp.push_level(r);
                dp.value()
            })
        }
        PassageKind::LLast => {
            let mut dp = PathDp::<Max>::new(n_cols);
            run(dist, stream, n_cols, n_rows, |r| {
                dp.push_level(r);
                dp.value()
            })
        }
        PassageKind::LFirst => {
            let mut dp = PathDp::<Min>::new(n_cols);
            run(dist, stream, n_cols, n_rows, |r| {
                dp.push_level(r);
                dp.value()
            })
        }
    };
    Ok(value)
}

pub const ORACLE_MAX_COLS: usize = 10;
pub const ORACLE_MAX_ROWS: usize = 5;

/// Calls `f` with every nondecreasing sequence of `len` integers in `lo..=hi`,
/// in lexicographic order.
pub fn for_each_nondecreasing(len: usize, lo: usize, hi: usize, mut f: impl FnMut(&[usize])) {
    fn rec(buf: &mut Vec<usize>, len: usize, lo: usize, hi: usize, f: &mut dyn FnMut(&[usize])) {
        if buf.len() == len {
            f(buf);
            return;
        }
        let start = buf.last().copied().unwrap_or(lo);
        for v in start..=hi {
            buf.push(v);
            rec(buf, len, lo, hi, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(len);
    rec(&mut buf, len, lo, hi, &mut f);
}

/// Exhaustive enumeration of every partition (equivalently every up/right
/// path). Limited to `N <= 10`, `k <= 5`.
pub fn brute_force_oracle(w: &WeightMatrix, kind: PassageKind) -> Result<PassageResult> {
    if w.n_cols > ORACLE_MAX_COLS || w.n_rows > ORACLE_MAX_ROWS {
        return Err(Error::OracleScope(format!(
            "{}x{} exceeds the enumeration bound {ORACLE_MAX_COLS}x{ORACLE_MAX_ROWS}",
            w.n_cols, w.n_rows
        )));
    }
    let (n, k) = (w.n_cols, w.n_rows);
    let maximize = matches!(kind, PassageKind::L | PassageKind::LLast);
    let lo = if kind.is_path_form() { 1 } else { 0 };
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_nondecreasing(k - 1, lo, n, |inner| {
        let mut part = Vec::with_capacity(k + 1);
        part.push(lo);
        part.extend_from_slice(inner);
        part.push(n);
        let v = if kind.is_path_form() { path_objective(w, &part) } else { theorem_objective(w, &part) };
        let improves = match &best {
            None => true,
            Some((b, _)) => (maximize && v > *b) || (!maximize && v < *b),
        };
        if improves {
            best = Some((v, part));
        }
    });
    let (value, part) = best.expect("at least one partition exists");
    Ok(PassageResult { value, kind, partition: Some(part) })
}

/// Extremes of `sum_{j=1}^{k-1} X_{i_j}^{j+1}` over `1 <= i_1 <= ... <= i_{k-1} <= N`:
/// the selections bracketing `L^l - L`. Returns `(min, max)`; both are 0 when `k = 1`.
pub fn selection_extremes(w: &WeightMatrix) -> (f64, f64) {
    fn run<E: Extremum>(w: &WeightMatrix) -> f64 {
        if w.n_rows == 1 {
            return 0.0;
        }
        // b[m]: best selection for levels 2..=j+1 with i_j <= m
        let mut b = vec![0.0; w.n_cols];
        for j in 1..w.n_rows {
            let mut run = E::WORST;
            for (m, slot) in b.iter_mut().enumerate() {
                run = E::pick(run, *slot + w.get(m, j));
                *slot = run;
            }
        }
        b[w.n_cols - 1]
    }
    (run::<Min>(w), run::<Max>(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2x2() -> WeightMatrix {
        // X_1^1=1, X_2^1=2, X_1^2=3, X_2^2=4
        WeightMatrix::from_levels(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()
    }

    #[test]
    fn two_by_two_examples() {
        let w = grid2x2();
        assert_eq!(last_passage_theorem_form(&w).value, 7.0);
        assert_eq!(first_passage_theorem_form(&w).value, 3.0);
        assert_eq!(last_passage_path_form(&w).value, 8.0);
        assert_eq!(first_passage_path_form(&w).value, 7.0);
        assert_eq!(brute_force_oracle(&w, PassageKind::L).unwrap().value, 7.0);
        assert_eq!(brute_force_oracle(&w, PassageKind::LLast).unwrap().value, 8.0);
    }

    #[test]
    fn two_by_two_partitions() {
        let w = grid2x2();
        assert_eq!(passage(&w, PassageKind::L, true).partition, Some(vec![0, 0, 2]));
        assert_eq!(passage(&w, PassageKind::R, true).partition, Some(vec![0, 2, 2]));
        assert_eq!(passage(&w, PassageKind::LLast, true).partition, Some(vec![1, 1, 2]));
        assert_eq!(passage(&w, PassageKind::LFirst, true).partition, Some(vec![1, 2, 2]));
    }

    #[test]
    fn single_level_and_degenerate_grids() {
        let w = WeightMatrix::from_levels(&[vec![1.5, -2.0, 4.0]]).unwrap();
        for kind in PassageKind::ALL {
            assert_eq!(passage(&w, kind, false).value, 3.5);
        }
        let one = WeightMatrix::from_levels(&[vec![2.25]]).unwrap();
        assert_eq!(last_passage_path_form(&one).value, 2.25);
        let zeros = WeightMatrix::new(5, 3, vec![0.0; 15]).unwrap();
        for kind in PassageKind::ALL {
            assert_eq!(passage(&zeros, kind, false).value, 0.0);
        }
    }

    #[test]
    fn constant_weights_path_length() {
        let w = WeightMatrix::new(7, 4, vec![1.5; 28]).unwrap();
        assert_eq!(first_passage_path_form(&w).value, 1.5 * (7 + 4 - 1) as f64);
        assert_eq!(last_passage_path_form(&w).value, 1.5 * 10.0);
    }

    #[test]
    fn duality_under_negation() {
        let mut s = RngStream::new(2, 2);
        let d = WeightDistribution::gaussian(0.3, 1.0).unwrap();
        for _ in 0..50 {
            let w = WeightMatrix::sample(&d, &mut s, 9, 4).unwrap();
            let neg = w.negated();
            assert_eq!(first_passage_theorem_form(&w).value, -last_passage_theorem_form(&neg).value);
            assert_eq!(first_passage_path_form(&w).value, -last_passage_path_form(&neg).value);
        }
    }

    #[test]
    fn oracle_scope_limit() {
        let w = WeightMatrix::new(11, 2, vec![0.0; 22]).unwrap();
        assert!(matches!(brute_force_oracle(&w, PassageKind::L), Err(Error::OracleScope(_))));
        let w = WeightMatrix::new(3, 6, vec![0.0; 18]).unwrap();
        assert!(matches!(brute_force_oracle(&w, PassageKind::LLast), Err(Error::OracleScope(_))));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(WeightMatrix::new(0, 3, vec![]).is_err());
        assert!(WeightMatrix::new(2, 2, vec![0.0; 3]).is_err());
        assert!(WeightMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(WeightMatrix::from_levels(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn transpose_swaps_indices() {
        let w = WeightMatrix::from_levels(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = w.transpose();
        assert_eq!((t.n_cols(), t.n_rows()), (2, 3));
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(w.get(i, j), t.get(j, i));
            }
        }
    }

    #[test]
    fn csv_and_binary_fixtures() {
        let d = WeightDistribution::exponential(1.0).unwrap();
        let w = WeightMatrix::sample(&d, &mut RngStream::new(8, 3), 6, 3).unwrap();
        let back = WeightMatrix::from_csv(&w.to_csv()).unwrap();
        assert_eq!(back, w);
        let back = WeightMatrix::from_bytes(&w.to_bytes()).unwrap();
        assert_eq!(back, w);
        let mut bytes = w.to_bytes();
        bytes[4] = 9;
        assert!(WeightMatrix::from_bytes(&bytes).is_err());
        assert!(WeightMatrix::from_bytes(&w.to_bytes()[..40]).is_err());
    }

    #[test]
    fn streaming_dp_matches_matrix_dp() {
        let d = WeightDistribution::geometric(0.5).unwrap();
        let w = WeightMatrix::sample(&d, &mut RngStream::new(4, 4), 50, 7).unwrap();
        let mut s = RngStream::new(4, 4);
        let mut row = vec![0.0; 50];
        let mut th = TheoremDp::<Max>::new(50);
        let mut pa = PathDp::<Min>::new(50);
        for _ in 0..7 {
            d.fill(&mut s, &mut row);
            th.push_level(&row);
            pa.push_level(&row);
        }
        assert_eq!(th.value(), last_passage_theorem_form(&w).value);
        assert_eq!(pa.value(), first_passage_path_form(&w).value);
        assert_eq!(th.levels(), 7);
    }

    #[test]
    fn selection_extremes_match_enumeration() {
        let d = WeightDistribution::gaussian(0.0, 1.0).unwrap();
        let mut s = RngStream::new(5, 0);
        for (n, k) in [(1, 1), (4, 1), (5, 2), (6, 4), (3, 5)] {
            let w = WeightMatrix::sample(&d, &mut s, n, k).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            if k == 1 {
                lo = 0.0;
                hi = 0.0;
            }
            for_each_nondecreasing(k - 1, 1, n, |sel| {
                if sel.is_empty() {
                    return;
                }
                let v: f64 = sel.iter().enumerate().map(|(j, &i)| w.get(i - 1, j + 1)).sum();
                lo = lo.min(v);
                hi = hi.max(v);
            });
            let (dlo, dhi) = selection_extremes(&w);
            assert!((dlo - lo).abs() < 1e-12 && (dhi - hi).abs() < 1e-12, "{n}x{k}");
        }
    }

    #[test]
    fn streamed_sampling_matches_materialized() {
        let dist = WeightDistribution::exponential(1.0).unwrap();
        for kind in PassageKind::ALL {
            let w = WeightMatrix::sample(&dist, &mut RngStream::new(3, 1), 37, 5).unwrap();
            let streamed = sample_passage_value(&dist, &mut RngStream::new(3, 1), 37, 5, kind).unwrap();
            assert_eq!(streamed, passage(&w, kind, false).value);
        }
    }
}
