//! Potentials `φ = k * u²` for radial densities, and the norms of `∇φ`, `Δφ`
//! that enter the Nehari and Pohozaev identities.
//!
//! A radial convolution is the double sum `φ(r_i) = 4π Σ_j k̄(r_i, s_j) f_j s_j² h`
//! where `k̄` is the sphere-averaged kernel. The Coulomb and Yukawa averages
//! have a derivative jump at `s = r_i`, so each row splits the `s`-integral
//! there and adds Gregory end corrections on both sides of the split. The
//! left piece is even in `s`, so its stencil reflects through the origin
//! using the analytic continuation of the inner branch of the average.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::kernel::{KernelParams, SphereKernel};
use crate::quadrature::{gauss_legendre, gregory_deltas};

/// Order of the end corrections applied on both sides of the kink.
const KINK_ORDER: usize = 8;
use crate::radial::{RadialFunction, RadialGrid};

/// Dense matrix `P` with `φ = P·f` for densities `f` sampled on the grid.
#[derive(Debug, Clone)]
pub struct Convolution {
    grid: Arc<RadialGrid>,
    kernel: SphereKernel,
    matrix: Vec<f64>,
}

impl Convolution {
    pub fn new(grid: Arc<RadialGrid>, kernel: SphereKernel) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let r = grid.nodes();
        let w = grid.weights();
        let full = gregory_deltas(KINK_ORDER);
        let mut matrix = vec![0.0; n * n];
        matrix.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let ri = r[i];
            for j in 0..n {
                row[j] = 4.0 * PI * w[j] * kernel.avg(ri, r[j]);
            }
            // 1-based node numbers from here on; node 0 is the origin.
            let k = i as i64 + 1;
            if k + 2 * (KINK_ORDER as i64 + 1) > n as i64 {
                return;
            }
            for (m, &d) in full.iter().enumerate() {
                let node = k - m as i64;
                if node != 0 {
                    let j = node.unsigned_abs() as usize - 1;
                    row[j] += 4.0 * PI * h * d * r[j] * r[j] * kernel.avg_inner(ri, r[j]);
                }
            }
            for (m, &d) in full.iter().enumerate() {
                let j = (k + m as i64 - 1) as usize;
                row[j] += 4.0 * PI * h * d * r[j] * r[j] * kernel.avg(ri, r[j]);
            }
        });
        Self { grid, kernel, matrix }
    }

    pub fn kernel(&self) -> SphereKernel {
        self.kernel
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn apply(&self, density: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        assert_eq!(density.len(), n);
        self.matrix
            .par_chunks(n)
            .map(|row| row.iter().zip(density).map(|(p, f)| p * f).sum())
            .collect()
    }

    /// The operator whose quadratic form `4π Σ w_i f_i (P f)_i` is unchanged
    /// but which is self-adjoint in the weighted inner product, so that its
    /// output is the exact derivative of the quadratic form.
    pub fn symmetrized(&self) -> Self {
        let n = self.grid.len();
        let w = self.grid.weights();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let b = 0.5 * (w[i] * self.matrix[i * n + j] + w[j] * self.matrix[j * n + i]);
                matrix[i * n + j] = b / w[i];
            }
        }
        Self { grid: self.grid.clone(), kernel: self.kernel, matrix }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialResult {
    pub phi: RadialFunction,
    pub grad_phi_l2: f64,
    pub lap_phi_l2: f64,
    /// `∫ φ u²`
    pub interaction: f64,
}

impl PotentialResult {
    /// `‖∇φ‖² + a²‖Δφ‖² − 4π∫φu²`
    pub fn nehari2_residual(&self, a: f64) -> f64 {
        self.grad_phi_l2.powi(2) + a * a * self.lap_phi_l2.powi(2) - 4.0 * PI * self.interaction
    }
}

fn density(u: &RadialFunction) -> Vec<f64> {
    u.values().iter().map(|v| v * v).collect()
}

/// `φ_u = K * u²` with `K(r) = (1 − e^{−r/a})/r`; `Δφ = −(1/a²)·(Yukawa * u²)`.
pub fn bp_potential(u: &RadialFunction, kp: KernelParams) -> Result<PotentialResult> {
    u.check_admissible()?;
    let a = kp.a();
    let grid = u.grid().clone();
    let rho = density(u);
    let phi = Convolution::new(grid.clone(), SphereKernel::BoppPodolsky { a }).apply(&rho);
    let yuk = Convolution::new(grid.clone(), SphereKernel::Yukawa { a }).apply(&rho);
    let lap: Vec<f64> = yuk.iter().map(|y| -y / (a * a)).collect();
    let lap_phi_l2 = (grid.inner_l2(&lap, &lap) + yukawa_tail_sq(&grid, *yuk.last().unwrap(), a)).sqrt();
    finish(grid, phi, &rho, lap_phi_l2)
}

/// Coulomb potential `φ = (1/|x|) * u²`, i.e. `−Δφ = 4πu²`.
pub fn coulomb_potential(u: &RadialFunction) -> Result<PotentialResult> {
    u.check_admissible()?;
    let grid = u.grid().clone();
    let rho = density(u);
    let phi = Convolution::new(grid.clone(), SphereKernel::Coulomb).apply(&rho);
    let lap_phi_l2 = 4.0 * PI * grid.inner_l2(&rho, &rho).sqrt();
    finish(grid, phi, &rho, lap_phi_l2)
}

fn finish(grid: Arc<RadialGrid>, phi: Vec<f64>, rho: &[f64], lap_phi_l2: f64) -> Result<PotentialResult> {
    let grad_phi_l2 = grad_sq_with_tail(&grid, &phi).sqrt();
    let interaction = grid.inner_l2(&phi, rho);
    let phi = RadialFunction::new(grid, phi)?;
    Ok(PotentialResult { phi, grad_phi_l2, lap_phi_l2, interaction })
}

/// `4π ∫_{r_max}^∞ (Y(r))² r² dr` for `Y(r) = Y(r_max)·r_max·e^{−(r−r_max)/a}/r`,
/// scaled by `1/a⁴` as it appears in `‖Δφ‖²`.
pub(crate) fn yukawa_tail_sq(grid: &RadialGrid, y_last: f64, a: f64) -> f64 {
    let amp = grid.r_max() * y_last;
    4.0 * PI * amp * amp * a / (2.0 * a.powi(4))
}

/// Sine coefficients of `rφ − W r/r_max` with `W = r_max·φ(r_max)`, plus `W`.
fn potential_coeffs(grid: &RadialGrid, phi: &[f64]) -> (Vec<f64>, f64) {
    let n = grid.len();
    let r_max = grid.r_max();
    let big_w = r_max * phi[n - 1];
    let shifted: Vec<f64> =
        phi.iter().map(|p| p - big_w / r_max).collect();
    (grid.sine_coeffs(&shifted), big_w)
}

/// `‖∇φ‖²` including the far field, where `φ ≈ W/r` beyond `r_max`.
///
/// With `w = rφ` and `w̃ = w − W r/r_max`, `∫_0^{r_max} φ'² r² dr = ∫ w̃'² dr`
/// and the tail contributes `W²/r_max`.
pub fn grad_sq_with_tail(grid: &RadialGrid, phi: &[f64]) -> f64 {
    let (c, big_w) = potential_coeffs(grid, phi);
    grid.grad_sq_from_coeffs(&c) + 4.0 * PI * big_w * big_w / grid.r_max()
}

/// `‖Δφ‖²` on `[0, r_max]` from the sine series of `w̃`.
pub fn lap_sq_spectral(grid: &RadialGrid, phi: &[f64]) -> f64 {
    let (c, _) = potential_coeffs(grid, phi);
    2.0 * PI * grid.r_max() * grid.eigenvalues().iter().zip(&c).map(|(l, c)| l * l * c * c).sum::<f64>()
}

/// `E(φ) = (1/8π)(‖∇φ‖² + a²‖Δφ‖²) − ∫φu²`, whose unique minimizer is
/// `φ_u = K * u²` (the solution of `−Δφ + a²Δ²φ = 4πu²`), with
/// `E(φ_u) = −½∫φ_u u²`.
pub fn potential_energy(phi: &RadialFunction, u: &RadialFunction, kp: KernelParams) -> Result<f64> {
    phi.same_grid(u)?;
    let grid = phi.grid();
    let a = kp.a();
    let rho = density(u);
    let quad = grad_sq_with_tail(grid, phi.values()) + a * a * lap_sq_spectral(grid, phi.values());
    Ok(quad / (8.0 * PI) - grid.inner_l2(phi.values(), &rho))
}

/// `∫∇φ·∇ξ + a²∫Δφ Δξ − 4π∫u²ξ` for a test function `ξ` vanishing near `r_max`.
pub fn weak_form_residual(
    phi: &RadialFunction,
    u: &RadialFunction,
    xi: &RadialFunction,
    kp: KernelParams,
) -> Result<f64> {
    phi.same_grid(u)?;
    phi.same_grid(xi)?;
    xi.check_admissible()?;
    let grid = phi.grid();
    let a = kp.a();
    let (cp, _) = potential_coeffs(grid, phi.values());
    let cx = xi.sine_coeffs();
    let grad = grid.grad_inner_from_coeffs(&cp, &cx);
    let lap = 2.0
        * PI
        * grid.r_max()
        * grid.eigenvalues().iter().zip(&cp).zip(&cx).map(|((l, p), x)| l * l * p * x).sum::<f64>();
    let rho = density(u);
    Ok(grad + a * a * lap - 4.0 * PI * grid.inner_l2(&rho, xi.values()))
}

/// `(k * u²)(r)` at an arbitrary radius, by Gauss–Legendre panels split at the
/// kernel's kink, with `u` taken from its sine interpolant.
pub fn potential_at(u: &RadialFunction, kernel: SphereKernel, r: f64) -> Result<f64> {
    let grid = u.grid();
    let r_max = grid.r_max();
    if !(r.is_finite() && (0.0..=r_max).contains(&r)) {
        return domain(format!("radius {r} outside [0, {r_max}]"));
    }
    let coeffs = u.sine_coeffs();
    let width = kernel.length().map_or(0.25, |a| a.min(0.25));
    let gl = gauss_legendre(16);
    let mut breaks = vec![0.0];
    if r > 0.0 && r < r_max {
        breaks.push(r);
    }
    breaks.push(r_max);
    let mut total = 0.0;
    for seg in breaks.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
        let step = (hi - lo) / panels as f64;
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * step;
            for &(x, w) in &gl {
                let s = c + 0.5 * step * x;
                let us = grid.interpolate(&coeffs, s);
                let k = if r == 0.0 { kernel.point(s) } else { kernel.avg(r, s) };
                total += 0.5 * step * w * k * us * us * s * s;
            }
        }
    }
    Ok(4.0 * PI * total)
}
