//! The `a → 0` limit: Bopp–Podolsky potentials and solutions against their
//! Schrödinger–Poisson (Coulomb) counterparts.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result, SbpError};
use crate::functional::{Coupling, Model, Params};
use crate::kernel::SphereKernel;
use crate::potential::{grad_sq_with_tail, yukawa_tail_sq, Convolution};
use crate::radial::{h1_distance, norm_h1, norm_lp, RadialFunction, RadialGrid};
use crate::solver::{solve_model, SolverConfig};

/// The kernel's boundary layer `e^{−r/a}` needs `a` to span this many grid cells.
pub const MIN_CELLS_PER_A: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    FixedSource,
    FullSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub mode: LimitMode,
    pub a_values: Vec<f64>,
    /// `‖∇(φ^a − φ⁰)‖₂`
    pub d12_gaps: Vec<f64>,
    /// `‖aΔφ^a‖₂`
    pub alap_norms: Vec<f64>,
    /// `‖u^a − u⁰‖_{H¹}`; empty for a fixed source.
    pub h1_gaps: Vec<f64>,
    pub grad_phi_norms: Vec<f64>,
    /// `‖∇φ⁰‖₂`
    pub grad_phi0: f64,
    /// `‖4πf‖_{6/5}` for the source `f` driving `φ⁰`.
    pub source_scale: f64,
    /// `‖u⁰‖_{H¹}`, full-solution mode only.
    pub u0_h1: Option<f64>,
    /// `φ^a <= φ⁰` at every node, for every `a` (same source; always true for full solutions).
    pub dominated: bool,
    /// False if any solve in the sweep did not converge.
    pub complete: bool,
}

impl LimitReport {
    /// `d12_gaps` relative to `‖∇φ⁰‖₂`.
    pub fn relative_d12(&self) -> Vec<f64> {
        self.d12_gaps.iter().map(|g| relative(*g, self.grad_phi0)).collect()
    }

    /// `alap_norms` relative to the source scale.
    pub fn relative_alap(&self) -> Vec<f64> {
        self.alap_norms.iter().map(|g| relative(*g, self.source_scale)).collect()
    }

    pub fn relative_h1(&self) -> Vec<f64> {
        let scale = self.u0_h1.unwrap_or(0.0);
        self.h1_gaps.iter().map(|g| relative(*g, scale)).collect()
    }
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn check_sweep(a_values: &[f64], grid: &RadialGrid) -> Result<()> {
    if a_values.is_empty() {
        return domain("a sweep needs at least one value");
    }
    if a_values.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return domain("a values must be positive");
    }
    if !strictly_decreasing(a_values) {
        return domain("a values must be strictly decreasing");
    }
    let smallest = *a_values.last().unwrap();
    let needed = MIN_CELLS_PER_A * grid.spacing();
    if smallest < needed {
        return Err(SbpError::Resolution(format!(
            "a = {smallest} is below {MIN_CELLS_PER_A} grid spacings ({needed})"
        )));
    }
    Ok(())
}

fn lap_norm(grid: &Arc<RadialGrid>, density: &[f64], a: f64) -> f64 {
    let y = Convolution::new(grid.clone(), SphereKernel::Yukawa { a }).apply(density);
    let lap: Vec<f64> = y.iter().map(|v| v / (a * a)).collect();
    (grid.inner_l2(&lap, &lap) + yukawa_tail_sq(grid, *y.last().unwrap(), a)).sqrt()
}

fn grad_gap(grid: &RadialGrid, phi: &[f64], phi0: &[f64]) -> f64 {
    let diff: Vec<f64> = phi.iter().zip(phi0).map(|(x, y)| x - y).collect();
    grad_sq_with_tail(grid, &diff).max(0.0).sqrt()
}

fn dominated_by(phi: &[f64], phi0: &[f64]) -> bool {
    let scale = phi0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    phi.iter().zip(phi0).all(|(x, y)| *x <= y + 1e-12 * scale)
}

fn source_scale(f: &RadialFunction) -> Result<f64> {
    Ok(4.0 * PI * norm_lp(f, 1.2)?)
}

/// Potentials of a fixed nonnegative source `f` (playing `u²`) for each `a`,
/// compared with the Coulomb potential of `f`.
pub fn potential_limit(f: &RadialFunction, a_values: &[f64]) -> Result<LimitReport> {
    f.check_admissible()?;
    let grid = f.grid().clone();
    check_sweep(a_values, &grid)?;
    let scale = f.max_abs();
    if f.values().iter().any(|v| *v < -1e-14 * scale) {
        return domain("the source must be nonnegative");
    }
    let rho = f.values();
    let phi0 = Convolution::new(grid.clone(), SphereKernel::Coulomb).apply(rho);
    let grad_phi0 = grad_sq_with_tail(&grid, &phi0).sqrt();
    let mut report = LimitReport {
        mode: LimitMode::FixedSource,
        a_values: a_values.to_vec(),
        d12_gaps: Vec::new(),
        alap_norms: Vec::new(),
        h1_gaps: Vec::new(),
        grad_phi_norms: Vec::new(),
        grad_phi0,
        source_scale: source_scale(f)?,
        u0_h1: None,
        dominated: true,
        complete: true,
    };
    for &a in a_values {
        let phi = Convolution::new(grid.clone(), SphereKernel::BoppPodolsky { a }).apply(rho);
        report.d12_gaps.push(grad_gap(&grid, &phi, &phi0));
        report.alap_norms.push(a * lap_norm(&grid, rho, a));
        report.grad_phi_norms.push(grad_sq_with_tail(&grid, &phi).sqrt());
        report.dominated &= dominated_by(&phi, &phi0);
    }
    Ok(report)
}

/// Solutions for each `a`, warm-started along the sweep, compared with the
/// Schrödinger–Poisson solution at the same `(ω, q, p)`. The `a` in
/// `prm_base` is ignored.
pub fn solution_limit(prm_base: &Params, a_values: &[f64], cfg: &SolverConfig) -> Result<LimitReport> {
    let grid = cfg.grid.build()?;
    check_sweep(a_values, &grid)?;
    prm_base.validate_for_solver()?;
    let reference = Model::new(grid.clone(), *prm_base, Coupling::Coulomb)?;
    let sp = solve_model(&reference, None, cfg)?;
    let u0 = sp.u;
    let phi0 = sp.phi.values().to_vec();
    let rho0: Vec<f64> = u0.values().iter().map(|v| v * v).collect();
    let omega = prm_base.omega;
    let mut report = LimitReport {
        mode: LimitMode::FullSolution,
        a_values: a_values.to_vec(),
        d12_gaps: Vec::new(),
        alap_norms: Vec::new(),
        h1_gaps: Vec::new(),
        grad_phi_norms: Vec::new(),
        grad_phi0: grad_sq_with_tail(&grid, &phi0).sqrt(),
        source_scale: source_scale(&RadialFunction::new(grid.clone(), rho0)?)?,
        u0_h1: Some(norm_h1(&u0, omega)?),
        dominated: true,
        complete: sp.converged,
    };
    let mut warm = u0.clone();
    for &a in a_values {
        let prm = Params { a, ..*prm_base };
        let model = Model::bopp_podolsky(grid.clone(), prm)?;
        let sol = solve_model(&model, Some(&warm), cfg)?;
        report.complete &= sol.converged;
        report.h1_gaps.push(h1_distance(&sol.u, &u0, omega)?);
        report.d12_gaps.push(grad_gap(&grid, sol.phi.values(), &phi0));
        report.alap_norms.push(a * sol.diagnostics.lap_phi_l2);
        report.grad_phi_norms.push(sol.diagnostics.grad_phi_l2);
        warm = sol.u;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source_gives_zero_gaps() {
        let g = RadialGrid::uniform(128, 10.0).unwrap();
        let f = RadialFunction::zeros(g);
        let rep = potential_limit(&f, &[1.0, 0.5]).unwrap();
        assert!(rep.d12_gaps.iter().chain(&rep.alap_norms).all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_bad_sweeps() {
        let g = RadialGrid::uniform(128, 10.0).unwrap();
        let f = RadialFunction::from_fn(g, |r| (-r * r).exp());
        assert!(potential_limit(&f, &[]).is_err());
        assert!(potential_limit(&f, &[0.5, 1.0]).is_err());
        assert!(matches!(potential_limit(&f, &[1.0, 0.1]), Err(SbpError::Resolution(_))));
    }
}
