#![allow(dead_code)]

use sbp_core::quadrature::gauss_legendre;
use std::f64::consts::PI;

/// `∫_lo^hi f` by `n`-point Gauss–Legendre on each of `panels` equal panels.
pub fn gl_panels(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let w = (hi - lo) / panels as f64;
    (0..panels)
        .map(|k| {
            let (a, b) = (lo + k as f64 * w, lo + (k + 1) as f64 * w);
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            rule.iter().map(|(x, wt)| wt * f(m + h * x)).sum::<f64>() * h
        })
        .sum()
}

/// Breakpoints in `[0, 1]` refined geometrically toward 0 and toward `t0`.
fn graded_breaks(t0: f64) -> Vec<f64> {
    let mut b = vec![0.0, 1.0];
    for k in 1..=40 {
        let d = 2f64.powi(-k);
        b.push(d);
        if t0 > 0.0 && t0 < 1.0 {
            b.push(t0);
            for x in [t0 - d, t0 + d] {
                if x > 0.0 && x < 1.0 {
                    b.push(x);
                }
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `½∫_{−1}^{1} k(|x−y|) dμ` for `|x| = r`, `|y| = s`, by brute-force angular
/// quadrature. With `μ = 1 − 2t²` the distance is `√((r−s)² + 4rst²)`, which
/// removes the endpoint square root; panels are graded toward
/// `t ≈ |r−s|/(2√(rs))` where the integrand varies fastest.
pub fn sphere_avg_oracle(k: &dyn Fn(f64) -> f64, r: f64, s: f64) -> f64 {
    let delta = r - s;
    let rs = r * s;
    let f = |t: f64| {
        let d = (delta * delta + 4.0 * rs * t * t).sqrt();
        2.0 * t * k(d)
    };
    let t0 = if rs > 0.0 { delta.abs() / (2.0 * rs.sqrt()) } else { 2.0 };
    let b = graded_breaks(t0);
    b.windows(2).map(|w| gl_panels(&f, w[0], w[1], 1, 24)).sum()
}

/// `φ(r) = ∫ k(|x−y|) f(|y|) dy` by 2D brute force over `(s, μ)`.
pub fn potential_oracle(k: &dyn Fn(f64) -> f64, f: &dyn Fn(f64) -> f64, r: f64, s_max: f64) -> f64 {
    let g = |s: f64| 4.0 * PI * s * s * f(s) * sphere_avg_oracle(k, r, s);
    if r <= 0.0 {
        gl_panels(&g, 0.0, s_max, 64, 20)
    } else if r < s_max {
        gl_panels(&g, 0.0, r, 32, 20) + gl_panels(&g, r, s_max, 64, 20)
    } else {
        gl_panels(&g, 0.0, s_max, 64, 20)
    }
}

pub fn bp(a: f64) -> impl Fn(f64) -> f64 {
    move |d: f64| if d == 0.0 { 1.0 / a } else { -(-d / a).exp_m1() / d }
}

pub fn yukawa(a: f64) -> impl Fn(f64) -> f64 {
    move |d: f64| (-d / a).exp() / d
}

pub fn coulomb(d: f64) -> f64 {
    1.0 / d
}

pub fn expo(a: f64) -> impl Fn(f64) -> f64 {
    move |d: f64| (-d / a).exp()
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// One line per acceptance criterion.
/// Written straight to the stderr handle so the line survives output capture.
pub fn report(id: u32, passed: bool, detail: &str) {
    let line = format!("criterion {id}: {} {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::Write::write_all(&mut std::io::stderr(), line.as_bytes());
}
