//! Numerical probes of the identities and sign conditions behind the
//! existence and nonexistence results. Each probe evaluates both sides of an
//! (in)equality on a sampled function; passing is evidence, not proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::functional::{j_q, j_q_truncated, mp_curve_value, Model, Params, Regime};
use crate::kernel::{KernelParams, SphereKernel};
use crate::potential::{yukawa_tail_sq, Convolution};
use crate::radial::{grad_sq, norm_h1, RadialFunction, RadialGrid};

/// `floor = FLOOR_FACTOR · scale` guards 0-vs-0 comparisons.
pub const FLOOR_FACTOR: f64 = 1e-14;
pub const IDENTITY_TOL: f64 = 1e-6;
/// Inequality probes are exact term by term; only round-off is tolerated.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub passed: bool,
    pub tolerance: f64,
    /// The search behind the probe ran out of budget without a verdict.
    #[serde(default)]
    pub inconclusive: bool,
}

impl ProbeReport {
    fn judge(name: String, lhs: f64, rhs: f64, residual: f64, tolerance: f64, scale: f64) -> Self {
        let bound = tolerance * lhs.abs().max(rhs.abs()).max(FLOOR_FACTOR * scale);
        let passed = residual.is_finite() && residual.abs() <= bound;
        Self { name, lhs, rhs, residual, passed, tolerance, inconclusive: false }
    }

    /// `lhs = rhs`.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        Self::judge(name.into(), lhs, rhs, lhs - rhs, tolerance, scale)
    }

    /// `lhs <= rhs`; the residual is the violation.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        Self::judge(name.into(), lhs, rhs, (lhs - rhs).max(0.0), tolerance, scale)
    }

    /// `lhs < rhs` with no slack.
    pub fn strictly_below(name: impl Into<String>, lhs: f64, rhs: f64, scale: f64) -> Self {
        let mut r = Self::at_most(name, lhs, rhs, 0.0, scale);
        r.passed = lhs < rhs;
        r
    }
}

pub fn all_passed(reports: &[ProbeReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// The three convolutions a probe needs, built once per `(grid, a)`.
struct Kernels {
    a: f64,
    bp: Convolution,
    yukawa: Convolution,
    exp: Convolution,
}

struct Sample {
    grad_sq: f64,
    mass: f64,
    interaction: f64,
    /// `∫ (Y∗u²)²` with `Y = e^{−d/a}/d`, far field included.
    yukawa_sq: f64,
    /// `∬ e^{−|x−y|/a} u²u²`
    exp_interaction: f64,
}

impl Sample {
    fn lap_phi_sq(&self, a: f64) -> f64 {
        self.yukawa_sq / a.powi(4)
    }
}

impl Kernels {
    fn new(grid: &Arc<RadialGrid>, a: f64) -> Self {
        Self {
            a,
            bp: Convolution::new(grid.clone(), SphereKernel::BoppPodolsky { a }),
            yukawa: Convolution::new(grid.clone(), SphereKernel::Yukawa { a }),
            exp: Convolution::new(grid.clone(), SphereKernel::Exponential { a }),
        }
    }

    fn sample(&self, u: &RadialFunction) -> Sample {
        let g = u.grid();
        let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
        let y = self.yukawa.apply(&rho);
        let tail = yukawa_tail_sq(g, *y.last().unwrap(), self.a) * self.a.powi(4);
        Sample {
            grad_sq: grad_sq(u),
            mass: g.inner_l2(u.values(), u.values()),
            interaction: g.inner_l2(&self.bp.apply(&rho), &rho),
            yukawa_sq: g.inner_l2(&y, &y) + tail,
            exp_interaction: g.inner_l2(&self.exp.apply(&rho), &rho),
        }
    }
}

fn nonzero(u: &RadialFunction) -> Result<()> {
    u.check_admissible()?;
    if u.is_zero() {
        return domain("probe needs u != 0");
    }
    Ok(())
}

fn fourier_with(u: &RadialFunction, k: &Kernels, name: String) -> ProbeReport {
    let s = k.sample(u);
    let rhs = 2.0 * PI * k.a * s.exp_interaction;
    ProbeReport::equality(name, s.yukawa_sq, rhs, IDENTITY_TOL, rhs.abs())
}

/// `∫(Y∗u²)² = 2πa ∬ e^{−|x−y|/a} u²u²`, both sides by independent quadrature.
pub fn check_fourier_identity(u: &RadialFunction, kp: KernelParams) -> Result<ProbeReport> {
    u.check_admissible()?;
    let k = Kernels::new(u.grid(), kp.a());
    Ok(fourier_with(u, &k, format!("fourier_identity[a={}]", kp.a())))
}

/// The interaction parts of the two Pohozaev forms agree: through `‖∇φ‖, ‖Δφ‖`
/// on one side and through `∬e^{−d/a}u²u²` on the other.
pub fn check_pohozaev_forms(u: &RadialFunction, prm: &Params) -> Result<ProbeReport> {
    u.check_admissible()?;
    let m = Model::bopp_podolsky(u.grid().clone(), *prm)?;
    let d = m.diagnostics(u)?;
    let Params { a, q, .. } = *prm;
    let q2 = q * q;
    let lhs = q2 / (16.0 * PI) * (d.grad_phi_l2.powi(2) - a * a * d.lap_phi_l2.powi(2)) - 1.5 * q2 * d.interaction;
    let rhs = -1.25 * q2 * d.interaction - q2 / (4.0 * a) * m.exp_interaction(u);
    Ok(ProbeReport::equality(format!("pohozaev_forms[a={a},q={q}]"), lhs, rhs, IDENTITY_TOL, q2 * d.interaction))
}

fn high_p_with(u: &RadialFunction, prm: &Params, k: &Kernels, name: String) -> ProbeReport {
    let s = k.sample(u);
    let Params { a, omega, q, p } = *prm;
    let q2 = q * q;
    let value = (3.0 / p - 0.5) * s.grad_sq + (3.0 / p - 1.5) * omega * s.mass
        - q2 * a * a / (8.0 * PI) * s.lap_phi_sq(a)
        + (3.0 / p - 1.25) * q2 * s.interaction;
    let bound = -omega * s.mass;
    let scale = s.grad_sq + omega * s.mass + q2 * s.interaction;
    ProbeReport::at_most(name, value, bound, SIGN_TOL, scale)
}

/// For `p >= 6` the Pohozaev combination is `<= −ω‖u‖₂² < 0` for every `u`,
/// so no solution exists.
pub fn probe_nonexistence_high_p(u: &RadialFunction, prm: &Params) -> Result<ProbeReport> {
    prm.validate()?;
    if prm.p < 6.0 {
        return domain(format!("high-p probe needs p >= 6, got {}", prm.p));
    }
    nonzero(u)?;
    let k = Kernels::new(u.grid(), prm.a);
    Ok(high_p_with(u, prm, &k, format!("nonexistence_high_p[p={},q={},a={}]", prm.p, prm.q, prm.a)))
}

fn low_p_with(u: &RadialFunction, prm: &Params, k: &Kernels, name: String) -> ProbeReport {
    let s = k.sample(u);
    let Params { a, omega, q, p } = *prm;
    let q2 = q * q;
    // ∬[(1−e^{−d/a})/(d/a)]u²u² = a·I and ∬e^{−d/a}u²u² = E
    let value = (1.0 - p / 6.0) * s.grad_sq
        + (1.0 - p / 2.0) * omega * s.mass
        + (1.0 - 5.0 * p / 12.0) * q2 * s.interaction
        - p / 12.0 * q2 / a * s.exp_interaction;
    let lower = 2.0 / 3.0 * s.grad_sq + q2 / (6.0 * a) * (a * s.interaction - s.exp_interaction);
    let scale = s.grad_sq + omega * s.mass + q2 * s.interaction;
    let mut r = ProbeReport::at_most(name, lower, value, SIGN_TOL, scale);
    r.passed &= lower > 0.0;
    r
}

/// For `p <= 2` the Nehari identity plus `p/3` times the Pohozaev identity is
/// bounded below by a positive quantity, so no solution exists. The report has
/// `lhs` = that lower bound, `rhs` = the combination.
pub fn probe_nonexistence_low_p(u: &RadialFunction, prm: &Params) -> Result<ProbeReport> {
    prm.validate()?;
    if !(prm.p > 1.0 && prm.p <= 2.0) {
        return domain(format!("low-p probe needs 1 < p <= 2, got {}", prm.p));
    }
    nonzero(u)?;
    let k = Kernels::new(u.grid(), prm.a);
    Ok(low_p_with(u, prm, &k, format!("nonexistence_low_p[p={},q={},a={}]", prm.p, prm.q, prm.a)))
}

/// [`probe_nonexistence_high_p`] over many profiles, sharing the convolutions.
pub fn probe_nonexistence_high_p_batch(profiles: &[RadialFunction], prm: &Params) -> Result<Vec<ProbeReport>> {
    let Some(first) = profiles.first() else {
        return Ok(Vec::new());
    };
    prm.validate()?;
    if prm.p < 6.0 {
        return domain(format!("high-p probe needs p >= 6, got {}", prm.p));
    }
    profiles.iter().try_for_each(nonzero)?;
    let k = Kernels::new(first.grid(), prm.a);
    Ok(high_p_batch(profiles, prm, &k))
}

fn high_p_batch(profiles: &[RadialFunction], prm: &Params, k: &Kernels) -> Vec<ProbeReport> {
    let Params { a, q, p, .. } = *prm;
    profiles
        .par_iter()
        .enumerate()
        .map(|(i, u)| high_p_with(u, prm, k, format!("nonexistence_high_p[p={p},q={q},a={a},#{i}]")))
        .collect()
}

/// [`probe_nonexistence_low_p`] over many profiles, sharing the convolutions.
pub fn probe_nonexistence_low_p_batch(profiles: &[RadialFunction], prm: &Params) -> Result<Vec<ProbeReport>> {
    let Some(first) = profiles.first() else {
        return Ok(Vec::new());
    };
    prm.validate()?;
    if !(prm.p > 1.0 && prm.p <= 2.0) {
        return domain(format!("low-p probe needs 1 < p <= 2, got {}", prm.p));
    }
    profiles.iter().try_for_each(nonzero)?;
    let k = Kernels::new(first.grid(), prm.a);
    Ok(low_p_batch(profiles, prm, &k))
}

fn low_p_batch(profiles: &[RadialFunction], prm: &Params, k: &Kernels) -> Vec<ProbeReport> {
    let Params { a, q, p, .. } = *prm;
    profiles
        .par_iter()
        .enumerate()
        .map(|(i, u)| low_p_with(u, prm, k, format!("nonexistence_low_p[p={p},q={q},a={a},#{i}]")))
        .collect()
}

/// `(1 − e^{−t})/t − e^{−t}`
pub fn kernel_bracket(t: f64) -> f64 {
    -(-t).exp_m1() / t - (-t).exp()
}

/// Nonnegativity of [`kernel_bracket`] at `samples` equispaced points of `(0, 50]`.
pub fn check_kernel_bracket(samples: usize) -> ProbeReport {
    let n = samples.max(1);
    let min = (1..=n).map(|k| kernel_bracket(50.0 * k as f64 / n as f64)).fold(f64::INFINITY, f64::min);
    ProbeReport::at_most(format!("kernel_bracket[{n}]"), 0.0, min, 0.0, 1.0)
}

/// H¹ radius of the sphere on which `J_q > 0` is checked.
pub const MP_RADIUS: f64 = 1e-2;
pub const MP_SPHERE_SAMPLES: usize = 20;
pub const MP_TAU_MAX: f64 = 1e3;
pub const MP_TAU_STEPS: usize = 100;

/// The mountain-pass geometry: `J_q(0) = 0`, `J_q > 0` on a small sphere, and a
/// point of negative energy along the scaling curve of a Gaussian.
pub fn check_mp_geometry(prm: &Params, grid: &Arc<RadialGrid>, seed: u64) -> Result<Vec<ProbeReport>> {
    prm.validate_for_solver()?;
    let tag = format!("p={},q={}", prm.p, prm.q);
    let model = Model::bopp_podolsky(grid.clone(), *prm)?;
    let zero = model.energy(&RadialFunction::zeros(grid.clone()))?;
    let part_i = ProbeReport::equality(format!("mp_origin[{tag}]"), zero, 0.0, 0.0, 1.0);

    let sphere: Vec<f64> = random_profiles(grid, seed, MP_SPHERE_SAMPLES)
        .into_iter()
        .map(|u| {
            let n = norm_h1(&u, prm.omega)?;
            model.energy(&u.scaled(MP_RADIUS / n))
        })
        .collect::<Result<_>>()?;
    let min_sphere = sphere.iter().copied().fold(f64::INFINITY, f64::min);
    let part_ii = ProbeReport::strictly_below(format!("mp_sphere[{tag}]"), 0.0, min_sphere, MP_RADIUS * MP_RADIUS);

    let u = RadialFunction::from_fn(grid.clone(), |r| (-r * r / 2.0).exp());
    let regime = Regime::for_p(prm.p);
    let mut best = f64::INFINITY;
    for k in 0..=MP_TAU_STEPS {
        let tau = MP_TAU_MAX.powf(k as f64 / MP_TAU_STEPS as f64);
        let v = mp_curve_value(&u, prm, tau, regime)?;
        best = best.min(v);
        if v < 0.0 {
            break;
        }
    }
    let mut part_iii = ProbeReport::strictly_below(format!("mp_negative_point[{tag}]"), best, 0.0, 1.0);
    part_iii.inconclusive = !part_iii.passed;
    Ok(vec![part_i, part_ii, part_iii])
}

/// `J_{q,T} <= J_q` for all profiles, with equality when `‖u‖² <= T²`.
pub fn check_truncation(profiles: &[RadialFunction], prm: &Params, t_bound: f64) -> Result<ProbeReport> {
    let mut worst = 0.0_f64;
    let mut scale = 0.0_f64;
    for u in profiles {
        let jt = j_q_truncated(u, prm, t_bound)?;
        let j = j_q(u, prm)?;
        let inside = norm_h1(u, prm.omega)?.powi(2) <= t_bound * t_bound;
        let violation = if inside { (jt - j).abs() } else { (jt - j).max(0.0) };
        worst = worst.max(violation);
        scale = scale.max(j.abs());
    }
    Ok(ProbeReport::at_most(format!("truncation[T={t_bound}]"), worst, 0.0, SIGN_TOL, scale))
}

/// Seeded sums of one to four symmetrized Gaussian bumps
/// `A(e^{−(r−c)²/σ²} + e^{−(r+c)²/σ²})/2` with signed amplitudes; draws that
/// are not H¹-admissible on `grid` are discarded.
pub fn random_profiles(grid: &Arc<RadialGrid>, seed: u64, count: usize) -> Vec<RadialFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=4))
            .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(0.0..=4.0), rng.gen_range(0.5..=2.0)))
            .collect();
        let u = RadialFunction::from_fn(grid.clone(), |r| {
            bumps
                .iter()
                .map(|(amp, c, s)| {
                    let (lo, hi) = ((r - c) / s, (r + c) / s);
                    0.5 * amp * ((-lo * lo).exp() + (-hi * hi).exp())
                })
                .sum()
        });
        if !u.is_zero() && u.is_h1_admissible() {
            out.push(u);
        }
    }
    out
}

/// Sizes of the full suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub identity_profiles: usize,
    pub sign_profiles: usize,
    pub bracket_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0, identity_profiles: 5, sign_profiles: 50, bracket_samples: 10_000 }
    }
}

const FOURIER_A: [f64; 3] = [0.5, 1.0, 2.0];
const HIGH_P: [f64; 2] = [6.0, 8.0];
const LOW_P: [f64; 2] = [1.5, 2.0];
const SWEEP_QA: [f64; 3] = [0.1, 1.0, 10.0];
const MP_CASES: [(f64, f64); 3] = [(4.0, 1.0), (5.0, 1.0), (2.5, 1e-3)];

/// Every probe: the Fourier identity and Pohozaev cross-check, both
/// nonexistence probes and the bracket, mountain-pass geometry and truncation.
pub fn suite(grid: &Arc<RadialGrid>, cfg: &SuiteConfig) -> Result<Vec<ProbeReport>> {
    let ident = random_profiles(grid, cfg.seed, cfg.identity_profiles);
    let signs = random_profiles(grid, cfg.seed.wrapping_add(1), cfg.sign_profiles);
    let mut reports = Vec::new();

    let kernels: Vec<Kernels> = [FOURIER_A.as_slice(), SWEEP_QA.as_slice()]
        .concat()
        .into_iter()
        .fold(Vec::<f64>::new(), |mut v, a| {
            if !v.contains(&a) {
                v.push(a);
            }
            v
        })
        .into_par_iter()
        .map(|a| Kernels::new(grid, a))
        .collect();
    let by_a = |a: f64| kernels.iter().find(|k| k.a == a).expect("kernel built");

    for &a in &FOURIER_A {
        let k = by_a(a);
        let batch: Vec<ProbeReport> = ident
            .par_iter()
            .enumerate()
            .map(|(i, u)| fourier_with(u, k, format!("fourier_identity[a={a},#{i}]")))
            .collect();
        reports.extend(batch);
        let prm = Params::new(a, 1.0, 1.0, 4.0)?;
        let batch: Vec<ProbeReport> = ident
            .par_iter()
            .map(|u| check_pohozaev_forms(u, &prm))
            .collect::<Result<_>>()?;
        reports.extend(batch);
    }

    for &p in &HIGH_P {
        for &q in &SWEEP_QA {
            for &a in &SWEEP_QA {
                reports.extend(high_p_batch(&signs, &Params::new(a, 1.0, q, p)?, by_a(a)));
            }
        }
    }
    for &p in &LOW_P {
        reports.extend(low_p_batch(&signs, &Params::new(1.0, 1.0, 1.0, p)?, by_a(1.0)));
    }
    reports.push(check_kernel_bracket(cfg.bracket_samples));

    for &(p, q) in &MP_CASES {
        reports.extend(check_mp_geometry(&Params::new(1.0, 1.0, q, p)?, grid, cfg.seed)?);
    }

    let prm = Params::new(1.0, 1.0, 1.0, 4.0)?;
    let mut norms: Vec<f64> = signs.iter().map(|u| norm_h1(u, prm.omega)).collect::<Result<_>>()?;
    norms.sort_by(f64::total_cmp);
    reports.push(check_truncation(&signs, &prm, norms[norms.len() / 2])?);
    Ok(reports)
}
