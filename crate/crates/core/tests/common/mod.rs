//! Test oracles shared by several integration targets.
#![allow(dead_code)]

use thinlpp::tracy_widom::airy;

/// Gauss–Legendre nodes and weights on `[a, b]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w));
    }
    out
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c];
        det *= pivot;
        let (upper, lower) = m.split_at_mut(c + 1);
        let pivot_row = &upper[c];
        for row in lower {
            let f = row[c] / pivot;
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// `det(I - K_Airy)` on `L^2(s, ∞)` by Nyström discretization.
pub fn fredholm_f_gue(s: f64) -> f64 {
    let nodes = gauss_legendre(80, s, s + 16.0);
    let vals: Vec<_> = nodes.iter().map(|&(x, _)| airy(x).unwrap()).collect();
    let n = nodes.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&vals[i], &vals[j]);
            let k = if i == j {
                a.ai_prime * a.ai_prime - a.x * a.ai * a.ai
            } else {
                (a.ai * b.ai_prime - a.ai_prime * b.ai) / (a.x - b.x)
            };
            let w = (nodes[i].1 * nodes[j].1).sqrt();
            m[i][j] = f64::from(i == j) - w * k;
        }
    }
    determinant(m)
}

/// `E s` and `Var s` of `F_GUE` from the Fredholm determinant, via
/// `E s = b - ∫ F` and `E s^2 = b^2 - 2 ∫ s F` on `[a, b] = [-10, 8]`.
pub fn fredholm_moments() -> (f64, f64) {
    let (a, b) = (-10.0, 8.0);
    let (mut i0, mut i1) = (0.0, 0.0);
    for (x, w) in gauss_legendre(120, a, b) {
        let f = fredholm_f_gue(x);
        i0 += w * f;
        i1 += w * x * f;
    }
    let mean = b - i0;
    (mean, b * b - 2.0 * i1 - mean * mean)
}

/// Largest `|q'' - 2q^3 - xq|` over the table interior, with a fourth-order
/// central second difference.
pub fn painleve_residual(x: &[f64], q: &[f64], h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 2..x.len() - 2 {
        let d2 = (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1] - q[i + 2]) / (12.0 * h * h);
        worst = worst.max((d2 - 2.0 * q[i].powi(3) - x[i] * q[i]).abs());
    }
    worst
}
