//! The Airy function `Ai` and its derivative on `[-30, 30]`.
//!
//! Four regimes, each used where it keeps full double precision:
//!
//! * `x < -7`: the oscillatory asymptotic expansion (modulus/phase form);
//! * `-7 <= x <= 2.5`: the Maclaurin series with exact term recurrences;
//! * `2.5 < x <= 8`: `Ai(x) = √(x/3) K_{1/3}(ζ) / π` with `K_ν` from Steed's
//!   continued fraction;
//! * `x > 8`: the exponentially decaying asymptotic expansion, truncated at
//!   its smallest term.
//!
//! The Maclaurin series alone cancels catastrophically for large `|x|` (on the
//! right `Ai` is exponentially smaller than the series terms), and the
//! asymptotic expansions are too coarse below `|x| ≈ 7`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_239_26;
/// `-Ai'(0) = 3^{-1/3} / Γ(1/3)`.
pub const AIP0: f64 = 0.258_819_403_792_806_798_41;

pub const DOMAIN: f64 = 30.0;

const SERIES_LEFT: f64 = -7.0;
const SERIES_RIGHT: f64 = 2.5;
const BESSEL_RIGHT: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValue {
    pub x: f64,
    pub ai: f64,
    pub ai_prime: f64,
}

/// `Ai(x)` and `Ai'(x)` for `|x| <= 30`.
pub fn airy(x: f64) -> Result<AiryValue> {
    if !(x.abs() <= DOMAIN) {
        return Err(Error::Domain(format!("airy argument {x} outside [-{DOMAIN}, {DOMAIN}]")));
    }
    let (ai, ai_prime) = if x < SERIES_LEFT {
        oscillatory(-x)
    } else if x <= SERIES_RIGHT {
        maclaurin(x)
    } else if x <= BESSEL_RIGHT {
        via_bessel_k(x)
    } else {
        decaying(x)
    };
    Ok(AiryValue { x, ai, ai_prime })
}

fn maclaurin(x: f64) -> (f64, f64) {
    // Ai = c1 f - c2 g with
    // f = sum 3^k (1/3)_k x^{3k} / (3k)!,  g = sum 3^k (2/3)_k x^{3k+1} / (3k+1)!
    let x3 = x * x * x;
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let (mut tfp, mut tgp) = (0.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tfp = if k == 1 { x * x / 2.0 } else { tfp * x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0)) };
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let small = f64::EPSILON * 1e-2;
        if tf.abs() <= small * f.abs() && tg.abs() <= small * g.abs().max(1e-300)
            && tfp.abs() <= small * fp.abs().max(1e-300) && tgp.abs() <= small * gp.abs()
        {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Coefficients `u_k` and `v_k` of the Airy asymptotic expansions.
fn uv_coefficients(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sums `sum_k sign_k c_k / ζ^k` over the selected `k`, stopping at the smallest term.
fn asymptotic_sum(c: &[f64], zeta: f64, parity: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut sign = 1.0;
    for k in (parity..c.len()).step_by(2) {
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() > prev {
            break;
        }
        sum += sign * term;
        prev = term.abs();
        if term.abs() < f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
        if alternate {
            sign = -sign;
        }
    }
    sum
}

fn decaying(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = uv_coefficients(60);
    // Ai ~ e^{-ζ} / (2√π x^{1/4}) sum (-1)^k u_k ζ^{-k}
    let alt = |c: &[f64]| {
        let mut sum = 0.0f64;
        let mut prev = f64::INFINITY;
        for (k, ck) in c.iter().enumerate() {
            let term = ck / zeta.powi(k as i32);
            if term.abs() > prev || term.abs() < f64::EPSILON * 1e-3 * sum.abs() {
                break;
            }
            sum += if k % 2 == 0 { term } else { -term };
            prev = term.abs();
        }
        sum
    };
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.sqrt().sqrt();
    (e / q * alt(&u), -e * q * alt(&v))
}

fn oscillatory(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (u, v) = uv_coefficients(60);
    let p = asymptotic_sum(&u, zeta, 0, true);
    let q = asymptotic_sum(&u, zeta, 1, true);
    let r = asymptotic_sum(&v, zeta, 0, true);
    let s = asymptotic_sum(&v, zeta, 1, true);
    let phase = zeta - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    let quarter = z.sqrt().sqrt();
    let ai = (cs * p + sn * q) / (PI.sqrt() * quarter);
    let aip = quarter / PI.sqrt() * (sn * r - cs * s);
    (ai, aip)
}

/// `(K_μ(x), K_{μ+1}(x))` for `|μ| <= 1/2`, `x >= 2`, by Steed's method (CF2).
fn bessel_k_pair(mu: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let kmu1 = kmu * (mu + x + 0.5 - h) / x;
    (kmu, kmu1)
}

fn via_bessel_k(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    // μ = -1/3 gives K_{-1/3} = K_{1/3} and K_{2/3}
    let (k13, k23) = bessel_k_pair(-1.0 / 3.0, zeta);
    let ai = (x / 3.0).sqrt() * k13 / PI;
    let aip = -x / (PI * 3f64.sqrt()) * k23;
    (ai, aip)
}

/// `∫_x^∞ Ai(t)^2 dt = Ai'(x)^2 - x Ai(x)^2`.
pub fn airy_square_tail(v: &AiryValue) -> f64 {
    v.ai_prime * v.ai_prime - v.x * v.ai * v.ai
}

/// `∫_x^∞ (t - x) Ai(t)^2 dt = (2x^2 Ai^2 - 2x Ai'^2 - Ai Ai') / 3`.
pub fn airy_square_moment_tail(v: &AiryValue) -> f64 {
    let (x, a, ap) = (v.x, v.ai, v.ai_prime);
    (2.0 * x * x * a * a - 2.0 * x * ap * ap - a * ap) / 3.0
}
