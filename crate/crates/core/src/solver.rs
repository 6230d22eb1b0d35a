//! Positive radial critical points of `J_q`.
//!
//! For `p ∈ (4, 6)` the fibering map of every ray has a single positive
//! critical point, so `J_q` restricted to the Nehari manifold is minimized by
//! Sobolev-gradient descent followed by re-projection onto the manifold. For
//! `p <= 4` the projection may not exist; there the potential is frozen,
//! the local equation `−Δu + (ω + q²φ)u = |u|^{p−2}u` is solved by the same
//! descent (its projection always exists), and `φ` is updated self-consistently.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{domain, Result, SbpError};
use crate::functional::{Coupling, Diagnostics, Model, Params};
use crate::radial::{RadialFunction, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NehariDescent,
    Scf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Backtrack {
    /// Sufficient-decrease constant in `J(u⁺) <= J(u) − c·τ‖g‖²`.
    pub armijo: f64,
    pub shrink: f64,
    pub grow: f64,
    pub max_step: f64,
    pub max_halvings: usize,
}

impl Default for Backtrack {
    fn default() -> Self {
        Self { armijo: 1e-4, shrink: 0.5, grow: 1.5, max_step: 1.0, max_halvings: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedProfile {
    /// `e^{−r²/(2w²)}`, scaled onto the Nehari manifold.
    Gaussian { width: f64 },
}

impl Default for SeedProfile {
    fn default() -> Self {
        SeedProfile::Gaussian { width: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub r_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 512, r_max: 30.0 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<RadialGrid>> {
        RadialGrid::uniform(self.n, self.r_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub step: f64,
    pub backtrack: Backtrack,
    /// Initial SCF mixing weight `θ` in `u ← (1−θ)u + θ·û`.
    pub damping: f64,
    pub seed_profile: SeedProfile,
    pub grid: GridSpec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::NehariDescent,
            max_iter: 2000,
            grad_tol: 1e-8,
            step: 0.5,
            backtrack: Backtrack::default(),
            damping: 1.0,
            seed_profile: SeedProfile::default(),
            grid: GridSpec::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return domain(format!("grad_tol must be > 0, got {}", self.grad_tol));
        }
        if self.max_iter < 1 {
            return domain("max_iter must be >= 1");
        }
        if !(self.step > 0.0) {
            return domain(format!("step must be > 0, got {}", self.step));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return domain(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        let b = &self.backtrack;
        if !(b.armijo > 0.0 && b.armijo < 1.0 && b.shrink > 0.0 && b.shrink < 1.0 && b.grow >= 1.0) {
            return domain("backtracking parameters out of range");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub j: f64,
    /// `‖g‖/‖u‖` in the H¹ norm.
    pub grad_ratio: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: RadialFunction,
    pub phi: RadialFunction,
    pub params: Params,
    pub coupling: Coupling,
    pub method: Method,
    pub diagnostics: Diagnostics,
    pub iterations: usize,
    pub converged: bool,
    pub grad_ratio: f64,
    pub trace: Vec<TraceEntry>,
}

struct Descent {
    u: RadialFunction,
    iterations: usize,
    grad_ratio: f64,
    trace: Vec<TraceEntry>,
}

/// Relative energy change treated as round-off when the Armijo test is undecidable.
const ENERGY_NOISE: f64 = 1e-13;

/// Nehari-projected Sobolev gradient descent from `start` (projected first).
fn descend(model: &Model, start: &RadialFunction, cfg: &SolverConfig, tol: f64, max_iter: usize) -> Result<Descent> {
    let bt = cfg.backtrack;
    let grid = model.grid().clone();
    let mut u = model.nehari_project(start)?;
    let (mut g, mut t) = model.gradient_coeffs(&u)?;
    let mut c = u.sine_coeffs();
    let mut j = model.energy_from(&t);
    let mut gn2 = model.h1_inner(&g, &g);
    let mut ratio = (gn2 / model.h1_inner(&c, &c)).sqrt();
    let mut tau = cfg.step;
    let mut trace = vec![TraceEntry { j, grad_ratio: ratio, step: 0.0 }];
    let mut iterations = 0;
    while iterations < max_iter && ratio > tol {
        let mut accepted = None;
        for _ in 0..=bt.max_halvings {
            let trial_c: Vec<f64> = c.iter().zip(&g).map(|(c, g)| c - tau * g).collect();
            let values: Vec<f64> = grid.from_sine_coeffs(&trial_c).into_iter().map(f64::abs).collect();
            let trial = RadialFunction::new(grid.clone(), values)?;
            let trial = model.nehari_project(&trial)?;
            let (g2, t2) = model.gradient_coeffs(&trial)?;
            let j2 = model.energy_from(&t2);
            let gn2_new = model.h1_inner(&g2, &g2);
            let armijo = j2 <= j - bt.armijo * tau * gn2;
            let noise = (j2 - j).abs() <= ENERGY_NOISE * j.abs() && gn2_new < gn2;
            if armijo || noise {
                accepted = Some((trial, g2, t2, j2, gn2_new));
                break;
            }
            tau *= bt.shrink;
        }
        let Some((trial, g2, t2, j2, gn2_new)) = accepted else {
            break;
        };
        u = trial;
        c = u.sine_coeffs();
        g = g2;
        t = t2;
        j = j2;
        gn2 = gn2_new;
        ratio = (gn2 / model.h1_inner(&c, &c)).sqrt();
        iterations += 1;
        trace.push(TraceEntry { j, grad_ratio: ratio, step: tau });
        tau = (tau * bt.grow).min(bt.max_step);
    }
    let _ = t;
    Ok(Descent { u, iterations, grad_ratio: ratio, trace })
}

fn seed(grid: &Arc<RadialGrid>, cfg: &SolverConfig) -> RadialFunction {
    match cfg.seed_profile {
        SeedProfile::Gaussian { width } => {
            RadialFunction::from_fn(grid.clone(), |r| (-r * r / (2.0 * width * width)).exp())
        }
    }
}

/// Relative Nehari tolerance required of a converged solution.
pub const NEHARI_TOL: f64 = 1e-6;

fn finish(model: &Model, method: Method, d: Descent, tol: f64) -> Result<Solution> {
    let diagnostics = model.diagnostics(&d.u)?;
    let phi = model.full_potential(&d.u)?.phi;
    let h1_sq = diagnostics.h1_norm.powi(2);
    let converged = d.grad_ratio <= tol && diagnostics.nehari_residual.abs() <= NEHARI_TOL * h1_sq;
    Ok(Solution {
        u: d.u,
        phi,
        params: *model.params(),
        coupling: model.coupling(),
        method,
        diagnostics,
        iterations: d.iterations,
        converged,
        grad_ratio: d.grad_ratio,
        trace: d.trace,
    })
}

/// Scale `u` by `t*` so that it lies on the Nehari manifold of `J_q`.
pub fn nehari_project(u: &RadialFunction, prm: &Params) -> Result<RadialFunction> {
    Model::bopp_podolsky(u.grid().clone(), *prm)?.nehari_project(u)
}

/// Ground state of `J_q`: Nehari descent for `p ∈ (4, 6)`, SCF otherwise or
/// when projection fails.
pub fn solve_ground_state(prm: &Params, cfg: &SolverConfig) -> Result<Solution> {
    prm.validate_for_solver()?;
    cfg.validate()?;
    let model = Model::bopp_podolsky(cfg.grid.build()?, *prm)?;
    solve_model(&model, None, cfg)
}

pub fn solve_scf(prm: &Params, cfg: &SolverConfig) -> Result<Solution> {
    prm.validate_for_solver()?;
    cfg.validate()?;
    let model = Model::bopp_podolsky(cfg.grid.build()?, *prm)?;
    scf(&model, None, cfg)
}

/// Solve with a prebuilt model (either coupling), optionally warm-started.
pub fn solve_model(model: &Model, initial: Option<&RadialFunction>, cfg: &SolverConfig) -> Result<Solution> {
    model.params().validate_for_solver()?;
    cfg.validate()?;
    let use_descent = cfg.method == Method::NehariDescent && model.params().p > 4.0;
    if !use_descent {
        return scf(model, initial, cfg);
    }
    let start = initial.cloned().unwrap_or_else(|| seed(model.grid(), cfg));
    match descend(model, &start, cfg, cfg.grad_tol, cfg.max_iter) {
        Ok(d) => finish(model, Method::NehariDescent, d, cfg.grad_tol),
        Err(SbpError::Projection(_)) => scf(model, initial, cfg),
        Err(e) => Err(e),
    }
}

/// Smallest mixing weight before SCF gives up.
const MIN_DAMPING: f64 = 1e-3;

fn scf(model: &Model, initial: Option<&RadialFunction>, cfg: &SolverConfig) -> Result<Solution> {
    let grid = model.grid().clone();
    let start = initial.cloned().unwrap_or_else(|| seed(&grid, cfg));
    let mut u = model.frozen(model.potential(&start)).nehari_project(&start)?;
    let mut theta = cfg.damping;
    let mut prev = f64::INFINITY;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut ratio;
    loop {
        let (g, t) = model.gradient_coeffs(&u)?;
        let c = u.sine_coeffs();
        ratio = (model.h1_inner(&g, &g) / model.h1_inner(&c, &c)).sqrt();
        trace.push(TraceEntry { j: model.energy_from(&t), grad_ratio: ratio, step: theta });
        if ratio <= cfg.grad_tol || iterations >= cfg.max_iter {
            break;
        }
        if ratio > prev {
            theta *= 0.5;
            if theta < MIN_DAMPING {
                break;
            }
        }
        prev = ratio;
        let local = model.frozen(model.potential(&u));
        let inner_tol = (0.1 * ratio).max(0.1 * cfg.grad_tol);
        let d = descend(&local, &u, cfg, inner_tol, cfg.max_iter)?;
        let mixed: Vec<f64> = u.values().iter().zip(d.u.values()).map(|(a, b)| (1.0 - theta) * a + theta * b).collect();
        u = RadialFunction::new(grid.clone(), mixed)?;
        iterations += 1;
    }
    finish(model, Method::Scf, Descent { u, iterations, grad_ratio: ratio, trace }, cfg.grad_tol)
}
