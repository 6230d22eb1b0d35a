//! The reduced functional
//! `J_q(u) = ½‖∇u‖² + (ω/2)‖u‖² + (q²/4)∫φ_u u² − (1/p)‖u‖_p^p`,
//! its Sobolev gradient, and the identities its critical points satisfy.
//!
//! Every term is evaluated with the same grid weights and the same
//! (symmetrized) convolution, so the discrete gradient is the exact derivative
//! of the discrete functional and `J'(u)[u] = ⟨g, u⟩` holds to round-off.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result, SbpError};
use crate::kernel::{KernelParams, SphereKernel};
use crate::potential::{bp_potential, coulomb_potential, Convolution, PotentialResult};
use crate::radial::{grad_sq, lp_pow, RadialFunction, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub omega: f64,
    pub q: f64,
    pub p: f64,
}

impl Params {
    pub fn new(a: f64, omega: f64, q: f64, p: f64) -> Result<Self> {
        let prm = Self { a, omega, q, p };
        prm.validate()?;
        Ok(prm)
    }

    /// Checks shared by every entry point: `a > 0`, `ω > 0`, `q >= 0`, `p > 1`.
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return domain(format!("a must be > 0, got {}", self.a));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return domain(format!("omega must be > 0, got {}", self.omega));
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return domain(format!("q must be >= 0, got {}", self.q));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return domain(format!("p must be > 1, got {}", self.p));
        }
        Ok(())
    }

    pub fn validate_for_solver(&self) -> Result<()> {
        self.validate()?;
        if !(self.p > 2.0 && self.p < 6.0) {
            return domain(format!("p out of (2,6): {}", self.p));
        }
        Ok(())
    }

    pub fn kernel_params(&self) -> KernelParams {
        KernelParams::new(self.a).expect("validated a")
    }
}

/// Which potential couples to `u`: the Bopp–Podolsky kernel or, for the
/// `a → 0` reference problem, the Coulomb kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    BoppPodolsky,
    Coulomb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub j_value: f64,
    pub nehari_residual: f64,
    pub nehari2_residual: f64,
    pub pohozaev_residual: f64,
    pub pohozaev_alt_residual: f64,
    pub h1_norm: f64,
    pub l2_norm: f64,
    pub lp_norm: f64,
    pub grad_l2: f64,
    pub interaction: f64,
    pub grad_phi_l2: f64,
    pub lap_phi_l2: f64,
}

/// The scalar pieces of `J_q` at one `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terms {
    pub grad_sq: f64,
    pub mass: f64,
    /// `∫ φ_u u²`
    pub interaction: f64,
    /// `‖u‖_p^p`
    pub lp: f64,
}

impl Terms {
    pub fn h1_sq(&self, omega: f64) -> f64 {
        self.grad_sq + omega * self.mass
    }
}

#[derive(Debug, Clone)]
enum Source {
    /// `φ = P u²`, giving the quartic interaction `(q²/4)∫φ_u u²`.
    SelfConsistent(Convolution),
    /// A fixed potential, giving the quadratic term `(q²/2)∫φ u²`.
    Frozen(Vec<f64>),
}

/// `J_q` on a fixed grid, with the convolution operator built once.
#[derive(Debug, Clone)]
pub struct Model {
    grid: Arc<RadialGrid>,
    params: Params,
    coupling: Coupling,
    source: Source,
}

impl Model {
    pub fn new(grid: Arc<RadialGrid>, params: Params, coupling: Coupling) -> Result<Self> {
        params.validate()?;
        let kernel = match coupling {
            Coupling::BoppPodolsky => SphereKernel::BoppPodolsky { a: params.a },
            Coupling::Coulomb => SphereKernel::Coulomb,
        };
        let conv = Convolution::new(grid.clone(), kernel).symmetrized();
        Ok(Self { grid, params, coupling, source: Source::SelfConsistent(conv) })
    }

    /// The local functional `½‖∇u‖² + ½∫(ω + q²φ)u² − (1/p)‖u‖_p^p` with `φ` held fixed.
    pub fn frozen(&self, phi: Vec<f64>) -> Self {
        assert_eq!(phi.len(), self.grid.len());
        Self { grid: self.grid.clone(), params: self.params, coupling: self.coupling, source: Source::Frozen(phi) }
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self.source, Source::Frozen(_))
    }

    pub fn bopp_podolsky(grid: Arc<RadialGrid>, params: Params) -> Result<Self> {
        Self::new(grid, params, Coupling::BoppPodolsky)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    fn check(&self, u: &RadialFunction) -> Result<()> {
        if !(Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid) {
            return Err(SbpError::GridMismatch);
        }
        u.check_admissible()
    }

    /// `φ̃ = P u²` with the symmetrized operator (or the frozen potential).
    pub fn potential(&self, u: &RadialFunction) -> Vec<f64> {
        match &self.source {
            Source::SelfConsistent(conv) => {
                let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
                conv.apply(&rho)
            }
            Source::Frozen(phi) => phi.clone(),
        }
    }

    /// Coefficient of `q²∫φu²` in the energy.
    fn interaction_weight(&self) -> f64 {
        match self.source {
            Source::SelfConsistent(_) => 0.25,
            Source::Frozen(_) => 0.5,
        }
    }

    pub fn terms(&self, u: &RadialFunction) -> Result<Terms> {
        self.check(u)?;
        Ok(self.terms_with(u, &self.potential(u)))
    }

    fn terms_with(&self, u: &RadialFunction, phi: &[f64]) -> Terms {
        let g = &self.grid;
        let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
        Terms {
            grad_sq: grad_sq(u),
            mass: g.inner_l2(u.values(), u.values()),
            interaction: g.inner_l2(phi, &rho),
            lp: lp_pow(u, self.params.p),
        }
    }

    pub fn energy_from(&self, t: &Terms) -> f64 {
        let Params { omega, q, p, .. } = self.params;
        0.5 * t.grad_sq + 0.5 * omega * t.mass + self.interaction_weight() * q * q * t.interaction - t.lp / p
    }

    /// `t* > 0` with `t*u` on the Nehari manifold of this functional.
    pub fn nehari_scale(&self, t: &Terms) -> Result<f64> {
        let Params { omega, q, p, .. } = self.params;
        let b = q * q * t.interaction;
        match self.source {
            Source::SelfConsistent(_) => fibering_root(t.h1_sq(omega), b, t.lp, p),
            Source::Frozen(_) => fibering_root(t.h1_sq(omega) + b, 0.0, t.lp, p),
        }
    }

    pub fn nehari_project(&self, u: &RadialFunction) -> Result<RadialFunction> {
        let t = self.terms(u)?;
        let s = self.nehari_scale(&t)?;
        Ok(u.scaled(s))
    }

    pub fn energy(&self, u: &RadialFunction) -> Result<f64> {
        Ok(self.energy_from(&self.terms(u)?))
    }

    pub fn nehari_from(&self, t: &Terms) -> f64 {
        let Params { omega, q, .. } = self.params;
        t.grad_sq + omega * t.mass + q * q * t.interaction - t.lp
    }

    /// Sine coefficients of the H¹ Riesz representative of `J'_q(u)`, plus the terms at `u`.
    pub fn gradient_coeffs(&self, u: &RadialFunction) -> Result<(Vec<f64>, Terms)> {
        self.check(u)?;
        let phi = self.potential(u);
        let terms = self.terms_with(u, &phi);
        let Params { omega, q, p, .. } = self.params;
        let g = &self.grid;
        let n = g.len();
        let z: Vec<f64> = (0..n - 1)
            .map(|i| {
                let v = u.values()[i];
                let f = omega * v + q * q * phi[i] * v - v.abs().powf(p - 2.0) * v;
                g.weights()[i] * f / g.nodes()[i]
            })
            .collect();
        let tz = g.dst(&z);
        let half = 0.5 * g.r_max();
        let c = u.sine_coeffs();
        let coeffs = g
            .eigenvalues()
            .iter()
            .zip(&c)
            .zip(&tz)
            .map(|((l, c), t)| (half * l * c + t) / (half * (l + omega)))
            .collect();
        Ok((coeffs, terms))
    }

    pub fn gradient(&self, u: &RadialFunction) -> Result<RadialFunction> {
        let (c, _) = self.gradient_coeffs(u)?;
        Ok(RadialFunction::from_raw(self.grid.clone(), self.grid.from_sine_coeffs(&c)))
    }

    /// `⟨f, g⟩ = ∫∇f·∇g + ω∫fg` in sine coefficients.
    pub fn h1_inner(&self, cf: &[f64], cg: &[f64]) -> f64 {
        let omega = self.params.omega;
        2.0 * PI
            * self.grid.r_max()
            * self.grid.eigenvalues().iter().zip(cf).zip(cg).map(|((l, a), b)| (l + omega) * a * b).sum::<f64>()
    }

    /// The full potential of `u` for this coupling (unsymmetrized sums, with
    /// `‖∇φ‖` and `‖Δφ‖`).
    pub fn full_potential(&self, u: &RadialFunction) -> Result<PotentialResult> {
        match self.coupling {
            Coupling::BoppPodolsky => bp_potential(u, self.params.kernel_params()),
            Coupling::Coulomb => coulomb_potential(u),
        }
    }

    /// `∬ e^{−|x−y|/a} u²(x)u²(y)`.
    pub fn exp_interaction(&self, u: &RadialFunction) -> f64 {
        double_integral(u, SphereKernel::Exponential { a: self.params.a })
    }

    pub fn diagnostics(&self, u: &RadialFunction) -> Result<Diagnostics> {
        let t = self.terms(u)?;
        let pot = self.full_potential(u)?;
        let Params { a, omega, q, p } = self.params;
        let q2 = q * q;
        let common = -0.5 * t.grad_sq - 1.5 * omega * t.mass + 3.0 / p * t.lp;
        let (a_eff, alt_exp) = match self.coupling {
            Coupling::BoppPodolsky => (a, q2 / (4.0 * a) * self.exp_interaction(u)),
            Coupling::Coulomb => (0.0, 0.0),
        };
        let poho = common + q2 / (16.0 * PI) * pot.grad_phi_l2.powi(2)
            - q2 * a_eff * a_eff / (16.0 * PI) * pot.lap_phi_l2.powi(2)
            - 1.5 * q2 * t.interaction;
        let poho_alt = common - 1.25 * q2 * t.interaction - alt_exp;
        Ok(Diagnostics {
            j_value: self.energy_from(&t),
            nehari_residual: self.nehari_from(&t),
            nehari2_residual: pot.nehari2_residual(a_eff),
            pohozaev_residual: poho,
            pohozaev_alt_residual: poho_alt,
            h1_norm: t.h1_sq(omega).sqrt(),
            l2_norm: t.mass.sqrt(),
            lp_norm: t.lp.powf(1.0 / p),
            grad_l2: t.grad_sq.sqrt(),
            interaction: t.interaction,
            grad_phi_l2: pot.grad_phi_l2,
            lap_phi_l2: pot.lap_phi_l2,
        })
    }
}

/// The positive root `t` of `A + B t² = C t^{p−2}`, i.e. the critical point of
/// the fibering map `t ↦ At²/2 + Bt⁴/4 − Ct^p/p`. When two roots exist
/// (`p < 4`) the smaller one, the local maximum of the fibering map, is returned.
pub fn fibering_root(a: f64, b: f64, c: f64, p: f64) -> Result<f64> {
    if !(a > 0.0 && c > 0.0 && b >= 0.0) {
        return Err(SbpError::Projection(format!("need A > 0, C > 0, B >= 0 (A={a}, B={b}, C={c})")));
    }
    if b == 0.0 {
        return Ok((a / c).powf(1.0 / (p - 2.0)));
    }
    // ψ(t) = C t^{p−4} − B − A t^{−2}; t* solves ψ = 0.
    let psi = |t: f64| c * t.powf(p - 4.0) - b - a / (t * t);
    let (mut lo, mut hi);
    if p > 4.0 {
        // ψ increases from −∞ to +∞
        lo = (a / c).powf(1.0 / (p - 2.0)).min(1.0);
        while psi(lo) > 0.0 {
            lo *= 0.5;
        }
        hi = lo;
        while psi(hi) < 0.0 {
            hi *= 2.0;
        }
    } else if p == 4.0 {
        if c <= b {
            return Err(SbpError::Projection(format!("p = 4 with C <= B ({c} <= {b})")));
        }
        return Ok((a / (c - b)).sqrt());
    } else {
        // ψ rises from −∞ to a maximum at t_m, then falls to −B
        let t_m = (2.0 * a / ((4.0 - p) * c)).powf(1.0 / (p - 2.0));
        if psi(t_m) <= 0.0 {
            return Err(SbpError::Projection(format!(
                "no positive root: fibering map has no critical point (p = {p})"
            )));
        }
        hi = t_m;
        lo = t_m;
        while psi(lo) > 0.0 {
            lo *= 0.5;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `∬ k(|x−y|) f(x) f(y)` with `f = u²`, via the radially reduced kernel.
pub fn double_integral(u: &RadialFunction, kernel: SphereKernel) -> f64 {
    let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    let conv = Convolution::new(u.grid().clone(), kernel);
    u.grid().inner_l2(&conv.apply(&rho), &rho)
}

fn model_for(u: &RadialFunction, prm: &Params) -> Result<Model> {
    Model::bopp_podolsky(u.grid().clone(), *prm)
}

pub fn j_q(u: &RadialFunction, prm: &Params) -> Result<f64> {
    model_for(u, prm)?.energy(u)
}

pub fn grad_j_q(u: &RadialFunction, prm: &Params) -> Result<RadialFunction> {
    model_for(u, prm)?.gradient(u)
}

/// `J'_q(u)[u] = ‖∇u‖² + ω‖u‖² + q²∫φ_u u² − ‖u‖_p^p`.
pub fn nehari_residual(u: &RadialFunction, prm: &Params) -> Result<f64> {
    let m = model_for(u, prm)?;
    Ok(m.nehari_from(&m.terms(u)?))
}

pub fn pohozaev_residual(u: &RadialFunction, prm: &Params) -> Result<f64> {
    Ok(model_for(u, prm)?.diagnostics(u)?.pohozaev_residual)
}

pub fn pohozaev_alt_residual(u: &RadialFunction, prm: &Params) -> Result<f64> {
    Ok(model_for(u, prm)?.diagnostics(u)?.pohozaev_alt_residual)
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, cubic in between, `|χ'| <= 3/2`.
pub fn cutoff(s: f64) -> f64 {
    let t = (s - 1.0).clamp(0.0, 1.0);
    1.0 - 3.0 * t * t + 2.0 * t * t * t
}

/// `J_{q,T}(u)`: the interaction term multiplied by `χ(‖u‖²/T²)`.
pub fn j_q_truncated(u: &RadialFunction, prm: &Params, t_bound: f64) -> Result<f64> {
    if !(t_bound.is_finite() && t_bound > 0.0) {
        return domain(format!("truncation level T must be > 0, got {t_bound}"));
    }
    let m = model_for(u, prm)?;
    let t = m.terms(u)?;
    let Params { omega, q, p, .. } = *prm;
    let k = cutoff(t.h1_sq(omega) / (t_bound * t_bound));
    Ok(0.5 * t.grad_sq + 0.5 * omega * t.mass + 0.25 * q * q * k * t.interaction - t.lp / p)
}

/// `J_{q,λ}(u)`, with the `L^p` term weighted by `λ ∈ [1/2, 1]`.
pub fn j_q_lambda(u: &RadialFunction, prm: &Params, lambda: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&lambda) {
        return domain(format!("lambda must lie in [1/2, 1], got {lambda}"));
    }
    let m = model_for(u, prm)?;
    let t = m.terms(u)?;
    let Params { omega, q, p, .. } = *prm;
    Ok(0.5 * t.grad_sq + 0.5 * omega * t.mass + 0.25 * q * q * t.interaction - lambda * t.lp / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `u_τ = τ² u(τ·)`, for `p ∈ (3, 6)`
    HighP,
    /// `u_τ = τ^{p/(p−2)} u(τ·)`, for `p ∈ (2, 3]`
    LowP,
}

impl Regime {
    pub fn for_p(p: f64) -> Self {
        if p > 3.0 {
            Regime::HighP
        } else {
            Regime::LowP
        }
    }

    pub fn exponent(&self, p: f64) -> f64 {
        match self {
            Regime::HighP => 2.0,
            Regime::LowP => p / (p - 2.0),
        }
    }
}

/// `J_q(u_τ)` along the mountain-pass curve `u_τ = τ^s u(τ·)`.
///
/// The rescaled profile is never resampled. Each term obeys an exact scaling
/// law: `‖∇u_τ‖² = τ^{2s−1}‖∇u‖²`, `‖u_τ‖² = τ^{2s−3}‖u‖²`,
/// `‖u_τ‖_p^p = τ^{ps−3}‖u‖_p^p`, and the interaction with length `a` equals
/// `τ^{4s−5}` times the interaction of `u` with length `τa`.
pub fn mp_curve_value(u: &RadialFunction, prm: &Params, tau: f64, regime: Regime) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return domain(format!("tau must be > 0, got {tau}"));
    }
    u.check_admissible()?;
    if tau < 1.0 {
        // u(τ·) on [0, r_max] needs u on [0, r_max/τ]; require u to have decayed by τ·r_max.
        let cut = tau * u.grid().r_max();
        let tail = u
            .grid()
            .nodes()
            .iter()
            .zip(u.values())
            .filter(|(r, _)| **r >= cut)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if tail > crate::radial::ADMISSIBILITY_TOL * u.max_abs() {
            return Err(SbpError::Truncation(format!(
                "tau = {tau}: |u| = {tail:.3e} beyond r = {cut:.3}"
            )));
        }
    }
    let Params { a, omega, q, p } = *prm;
    let s = regime.exponent(p);
    let scaled = Params { a: tau * a, ..*prm };
    let t = Model::bopp_podolsky(u.grid().clone(), scaled)?.terms(u)?;
    let grad = tau.powf(2.0 * s - 1.0) * t.grad_sq;
    let mass = tau.powf(2.0 * s - 3.0) * t.mass;
    let inter = tau.powf(4.0 * s - 5.0) * t.interaction;
    let lp = tau.powf(p * s - 3.0) * t.lp;
    Ok(0.5 * grad + 0.5 * omega * mass + 0.25 * q * q * inter - lp / p)
}
