//! Leftward integration of `q'' = 2q^3 + xq` from an Airy seed.

use crate::error::{Error, Result};

use super::airy::airy;
use super::table::TWTable;

/// Blow-up threshold: the bounded solution never comes near it on `[-10, 8]`.
pub const BLOW_UP: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Spacing of the output grid.
    pub grid_step: f64,
    /// Largest grid node; nodes above the seed point carry the Airy values.
    pub grid_max: f64,
    /// Local relative tolerance of the adaptive integrator.
    pub tolerance: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { grid_step: 0.005, grid_max: 8.0, tolerance: 1e-14 }
    }
}

type State = [f64; 2];

fn rhs(x: f64, y: &State) -> State {
    [y[1], 2.0 * y[0] * y[0] * y[0] + x * y[0]]
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order update and the error estimate.
fn dp_step(x: f64, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for c in 0..2 {
                ys[c] += h * A[s][j] * kj[c];
            }
        }
        k[s] = rhs(x + C[s] * h, &ys);
    }
    // the seventh stage is evaluated at the fifth-order solution
    let mut next = *y;
    let mut err = [0.0; 2];
    for (s, ks) in k.iter().enumerate() {
        for c in 0..2 {
            if s < 6 {
                next[c] += h * A[6][s] * ks[c];
            }
            err[c] += h * ERR[s] * ks[c];
        }
    }
    (next, err)
}

/// Adaptive integration of the state from `x0` to `x1`, landing on `x1` exactly.
fn integrate(x0: f64, x1: f64, y: State, h_guess: &mut f64, tol: f64) -> Result<State> {
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut y = y;
    let mut h = h_guess.abs().min((x1 - x0).abs()) * dir;
    loop {
        let remaining = x1 - x;
        if remaining.abs() <= 1e-15 * (1.0 + x1.abs()) {
            return Ok(y);
        }
        let last = h.abs() >= remaining.abs();
        let step = if last { remaining } else { h };
        let (next, err) = dp_step(x, &y, step);
        let mut ratio: f64 = 0.0;
        for c in 0..2 {
            let scale = tol * y[c].abs().max(next[c].abs()).max(1e-300);
            ratio = ratio.max(err[c].abs() / scale);
        }
        if !ratio.is_finite() {
            return Err(Error::Numerical(format!("non-finite state near x = {x}")));
        }
        if ratio <= 1.0 {
            x = if last { x1 } else { x + step };
            y = next;
            if y[0].abs() > BLOW_UP {
                return Err(Error::Numerical(format!("solution blew up near x = {x}: q = {}", y[0])));
            }
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = step * factor;
        if h.abs() < 1e-13 {
            return Err(Error::Numerical(format!("step size underflow near x = {x}")));
        }
        if ratio <= 1.0 && !last {
            *h_guess = h.abs();
        }
    }
}

fn grid_index(x: f64, origin: f64, step: f64) -> Option<usize> {
    let r = (x - origin) / step;
    let i = r.round();
    ((r - i).abs() < 1e-9 && i >= 0.0).then_some(i as usize)
}

/// Integrates the Hastings–McLeod solution leftward from `x_start` to `x_end`.
///
/// The returned table has `q` and `q'` on the grid `x_end + i·grid_step` up to
/// `grid_max`; call [`super::f_gue_from_q`] to fill in the distribution.
pub fn hastings_mcleod(x_start: f64, x_end: f64, control: &StepControl) -> Result<TWTable> {
    let StepControl { grid_step, grid_max, tolerance } = *control;
    if !(x_start >= 6.0) {
        return Err(Error::Precondition(format!("seed point {x_start} must be at least 6")));
    }
    if !(x_end <= -10.0) {
        return Err(Error::Precondition(format!("end point {x_end} must be at most -10")));
    }
    if !(grid_step > 0.0) || !(tolerance > 0.0) || !(grid_max >= x_start) {
        return Err(Error::Parameter(format!(
            "invalid step control: step {grid_step}, tolerance {tolerance}, grid max {grid_max}"
        )));
    }
    let top = grid_index(grid_max, x_end, grid_step)
        .ok_or_else(|| Error::Parameter(format!("grid max {grid_max} is not on the grid from {x_end}")))?;
    let seed = grid_index(x_start, x_end, grid_step)
        .ok_or_else(|| Error::Parameter(format!("seed point {x_start} is not on the grid from {x_end}")))?;
    let node = |i: usize| x_end + i as f64 * grid_step;
    let grid: Vec<f64> = (0..=top).map(node).collect();
    let mut q = vec![0.0; top + 1];
    let mut qp = vec![0.0; top + 1];
    for i in seed..=top {
        let a = airy(grid[i])?;
        q[i] = a.ai;
        qp[i] = a.ai_prime;
    }
    let mut y = [q[seed], qp[seed]];
    let mut h = grid_step / 4.0;
    for i in (0..seed).rev() {
        y = integrate(grid[i + 1], grid[i], y, &mut h, tolerance)?;
        q[i] = y[0];
        qp[i] = y[1];
    }
    Ok(TWTable::from_solution(grid, grid_step, x_start, q, qp))
}
