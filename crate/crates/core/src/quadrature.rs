//! Uniform-grid quadrature helpers: Gregory end corrections and a DST-I built
//! on a complex FFT.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// Number of nodes touched by an end correction.
pub const GREGORY_POINTS: usize = 5;

/// Corrections `δ_j` added to the trapezoid weights at the `m + 1` nodes
/// nearest an interval end so that the rule integrates polynomials of degree
/// `<= m` exactly there. Solves the Euler–Maclaurin moment conditions
/// `Σ δ_j j^d = B_{d+1}/(d+1)` (odd `d`) and `0` (even `d`).
pub fn gregory_deltas(m: usize) -> Vec<f64> {
    if m == 0 {
        return vec![0.0];
    }
    let n = m + 1;
    let mut mat = vec![vec![0.0; n + 1]; n];
    for d in 0..n {
        for j in 0..n {
            mat[d][j] = (j as f64).powi(d as i32);
        }
        mat[d][n] = if d % 2 == 1 { bernoulli(d + 1) / (d + 1) as f64 } else { 0.0 };
    }
    solve_dense(mat)
}

fn bernoulli(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => -0.5,
        2 => 1.0 / 6.0,
        4 => -1.0 / 30.0,
        6 => 1.0 / 42.0,
        8 => -1.0 / 30.0,
        10 => 5.0 / 66.0,
        k if k % 2 == 1 => 0.0,
        _ => panic!("Bernoulli number B_{k} not tabulated"),
    }
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)` matrix.
pub(crate) fn solve_dense(mut mat: Vec<Vec<f64>>) -> Vec<f64> {
    let n = mat.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .unwrap();
        mat.swap(col, piv);
        for row in col + 1..n {
            let f = mat[row][col] / mat[col][col];
            for k in col..=n {
                mat[row][k] -= f * mat[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = mat[row][n];
        for k in row + 1..n {
            acc -= mat[row][k] * x[k];
        }
        x[row] = acc / mat[row][row];
    }
    x
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
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
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Type-I discrete sine transform `X_k = Σ_{i=1}^{n} x_i sin(π k i / (n+1))`.
/// It is its own inverse up to the factor `2/(n+1)`.
#[derive(Clone)]
pub struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Dst1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dst1").field("n", &self.n).finish()
    }
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (n + 1));
        Self { n, fft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Raw transform (unnormalized).
    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let m = 2 * (self.n + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (i, &v) in x.iter().enumerate() {
            buf[i + 1] = Complex64::new(v, 0.0);
            buf[m - i - 1] = Complex64::new(-v, 0.0);
        }
        self.fft.process(&mut buf);
        (1..=self.n).map(|k| -0.5 * buf[k].im).collect()
    }
}
