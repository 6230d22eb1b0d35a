//! Radial functions on a uniform grid over `(0, r_max]`.
//!
//! Nodes are `r_i = i·h`, `i = 1..=N`, `h = r_max/N`. Integrals against the
//! `r²` measure use the trapezoid rule with a five-point Gregory correction at
//! `r_max`; no correction is needed at the origin because `f(r) r²` extends to
//! an even function for every smooth radial `f`.
//!
//! Derivatives of admissible functions are taken spectrally: `v = r·u` is odd
//! about the origin and vanishes at `r_max`, so it is expanded in
//! `sin(kπr/r_max)`. In that basis `-v''` is diagonal with eigenvalues
//! `λ_k = (kπ/r_max)²`, which makes the H¹ Riesz map a diagonal scaling.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{domain, Result, SbpError};
use crate::quadrature::{gregory_deltas, Dst1, GREGORY_POINTS};

pub const MIN_NODES: usize = 64;
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    h: f64,
    eigenvalues: Vec<f64>,
    dst: Dst1,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.nodes.len() == other.nodes.len() && self.r_max == other.r_max
    }
}

impl RadialGrid {
    pub fn uniform(n: usize, r_max: f64) -> Result<Arc<Self>> {
        if n < MIN_NODES {
            return Err(SbpError::Resolution(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return domain(format!("r_max must be finite and > 0, got {r_max}"));
        }
        let h = r_max / n as f64;
        let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
        let deltas = gregory_deltas(GREGORY_POINTS - 1);
        let mut weights: Vec<f64> = nodes.iter().map(|&r| h * r * r).collect();
        weights[n - 1] *= 0.5;
        for (j, d) in deltas.iter().enumerate() {
            weights[n - 1 - j] += h * d * nodes[n - 1 - j].powi(2);
        }
        let eigenvalues = (1..n).map(|k| (k as f64 * PI / r_max).powi(2)).collect();
        Ok(Arc::new(Self { nodes, weights, r_max, h, eigenvalues, dst: Dst1::new(n - 1) }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for `∫_0^{r_max} f(r) r² dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// `λ_k = (kπ/r_max)²`, `k = 1..N-1`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Sine coefficients `c_k` of `v = r·u` (the value at `r_max` is taken as 0).
    pub fn sine_coeffs(&self, values: &[f64]) -> Vec<f64> {
        let n = self.len();
        let v: Vec<f64> = values[..n - 1].iter().zip(&self.nodes).map(|(u, r)| u * r).collect();
        let scale = 2.0 / n as f64;
        self.dst.transform(&v).into_iter().map(|c| c * scale).collect()
    }

    /// Inverse of [`sine_coeffs`](Self::sine_coeffs); the node at `r_max` gets 0.
    pub fn from_sine_coeffs(&self, coeffs: &[f64]) -> Vec<f64> {
        let v = self.dst.transform(coeffs);
        let mut out: Vec<f64> = v.iter().zip(&self.nodes).map(|(v, r)| v / r).collect();
        out.push(0.0);
        out
    }

    /// Raw DST of an arbitrary length-(N-1) vector.
    pub(crate) fn dst(&self, x: &[f64]) -> Vec<f64> {
        self.dst.transform(x)
    }

    /// `4π Σ w_i f_i g_i`.
    pub fn inner_l2(&self, f: &[f64], g: &[f64]) -> f64 {
        4.0 * PI * self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum::<f64>()
    }

    /// `‖∇u‖²` from sine coefficients: `4π (r_max/2) Σ λ_k c_k²`.
    pub fn grad_sq_from_coeffs(&self, c: &[f64]) -> f64 {
        2.0 * PI * self.r_max * self.eigenvalues.iter().zip(c).map(|(l, c)| l * c * c).sum::<f64>()
    }

    /// `∫∇f·∇g` from sine coefficients.
    pub fn grad_inner_from_coeffs(&self, cf: &[f64], cg: &[f64]) -> f64 {
        2.0 * PI
            * self.r_max
            * self.eigenvalues.iter().zip(cf).zip(cg).map(|((l, a), b)| l * a * b).sum::<f64>()
    }

    /// Evaluate the sine interpolant of `u` at an arbitrary radius in `[0, r_max]`.
    pub fn interpolate(&self, coeffs: &[f64], r: f64) -> f64 {
        let base = PI / self.r_max;
        if r == 0.0 {
            return coeffs.iter().enumerate().map(|(k, c)| c * (k + 1) as f64 * base).sum();
        }
        coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * base * r).sin()).sum::<f64>() / r
    }
}

/// Values of a radial function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("expected {} values, got {}", grid.len(), values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SbpError::Numeric(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_h1_admissible(&self) -> bool {
        let last = self.values.last().copied().unwrap_or(0.0).abs();
        last <= ADMISSIBILITY_TOL * self.max_abs()
    }

    pub fn check_admissible(&self) -> Result<()> {
        if self.is_h1_admissible() {
            Ok(())
        } else {
            Err(SbpError::Admissibility(format!(
                "|u(r_max)| = {:.3e} exceeds {ADMISSIBILITY_TOL:.0e} x max|u| = {:.3e}",
                self.values.last().unwrap().abs(),
                self.max_abs()
            )))
        }
    }

    pub fn same_grid(&self, other: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(SbpError::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c·other`
    pub fn axpy(&self, c: f64, other: &RadialFunction) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn sine_coeffs(&self) -> Vec<f64> {
        self.grid.sine_coeffs(&self.values)
    }

    /// Spectral interpolation of an admissible function at any `r` in `[0, r_max]`.
    pub fn eval(&self, r: f64) -> f64 {
        self.grid.interpolate(&self.sine_coeffs(), r)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{r},{v}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("r,value") => {}
            other => return domain(format!("bad CSV header {other:?}")),
        }
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (r, v) = line
                .split_once(',')
                .ok_or_else(|| SbpError::Domain(format!("line {}: expected two columns", i + 2)))?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| SbpError::Domain(format!("line {}: {e}", i + 2)))
            };
            rs.push(parse(r)?);
            vs.push(parse(v)?);
        }
        let r_max = *rs.last().ok_or_else(|| SbpError::Domain("empty CSV".into()))?;
        let grid = RadialGrid::uniform(rs.len(), r_max)?;
        for (a, b) in rs.iter().zip(grid.nodes()) {
            if (a - b).abs() > 1e-12 * r_max {
                return domain("CSV radii do not form a uniform grid");
            }
        }
        RadialFunction::new(grid, vs)
    }
}

#[derive(Serialize, Deserialize)]
struct RadialFunctionRepr {
    n: usize,
    r_max: f64,
    values: Vec<f64>,
}

impl Serialize for RadialFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RadialFunctionRepr { n: self.grid.len(), r_max: self.grid.r_max(), values: self.values.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RadialFunctionRepr::deserialize(d)?;
        let grid = RadialGrid::uniform(repr.n, repr.r_max).map_err(serde::de::Error::custom)?;
        RadialFunction::new(grid, repr.values).map_err(serde::de::Error::custom)
    }
}

/// `∫_{ℝ³} f(|x|) dx ≈ 4π Σ w_i f(r_i)`.
pub fn integrate(f: &RadialFunction) -> f64 {
    4.0 * PI * f.grid.weights().iter().zip(&f.values).map(|(w, v)| w * v).sum::<f64>()
}

/// `‖∇u‖²` with the spectral radial derivative.
pub fn grad_sq(u: &RadialFunction) -> f64 {
    u.grid.grad_sq_from_coeffs(&u.sine_coeffs())
}

/// `‖u‖ = (‖∇u‖² + ω‖u‖²)^{1/2}`.
pub fn norm_h1(u: &RadialFunction, omega: f64) -> Result<f64> {
    u.check_admissible()?;
    if !(omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    let mass = u.grid.inner_l2(&u.values, &u.values);
    Ok((grad_sq(u) + omega * mass).sqrt())
}

/// `‖u − v‖` in H¹. Only `u` and `v` need to be admissible: their difference
/// is small everywhere, so its relative size at `r_max` is meaningless.
pub fn h1_distance(u: &RadialFunction, v: &RadialFunction, omega: f64) -> Result<f64> {
    u.check_admissible()?;
    v.check_admissible()?;
    u.same_grid(v)?;
    if !(omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    let d = u.axpy(-1.0, v);
    Ok((grad_sq(&d) + omega * d.grid.inner_l2(&d.values, &d.values)).sqrt())
}

/// `‖u‖_p = (4π Σ w_i |u_i|^p)^{1/p}`.
pub fn norm_lp(u: &RadialFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return domain(format!("L^p norm needs p >= 1, got {p}"));
    }
    Ok(lp_pow(u, p).powf(1.0 / p))
}

/// `‖u‖_p^p`.
pub fn lp_pow(u: &RadialFunction, p: f64) -> f64 {
    4.0 * PI * u.grid.weights().iter().zip(&u.values).map(|(w, v)| w * v.abs().powf(p)).sum::<f64>()
}

const LAPLACIAN_STENCIL: usize = 7;

/// `Δu = u'' + (2/r)u' = (r·u)''/r` by sixth-order finite differences on
/// `v = r·u`, with odd reflection of `v` at the origin and one-sided
/// stencils near `r_max`. Unlike the spectral derivative this accepts
/// functions that do not vanish at `r_max`.
pub fn radial_laplacian(u: &RadialFunction) -> Result<RadialFunction> {
    let grid = &u.grid;
    let n = grid.len();
    if n < MIN_NODES {
        return Err(SbpError::Resolution(format!("need at least {MIN_NODES} nodes, got {n}")));
    }
    let h = grid.spacing();
    // v at index j (0 = origin, j = node j), reflected for j < 0
    let v_at = |j: i64| -> f64 {
        if j == 0 {
            0.0
        } else if j > 0 {
            let k = (j - 1) as usize;
            u.values[k] * grid.nodes()[k]
        } else {
            let k = (-j - 1) as usize;
            -u.values[k] * grid.nodes()[k]
        }
    };
    let half = (LAPLACIAN_STENCIL / 2) as i64;
    let central = fd_weights(&(-half..=half).map(|o| o as f64).collect::<Vec<_>>(), 2);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n as i64 {
        let second = if i + half <= n as i64 {
            (-half..=half).zip(&central).map(|(o, c)| c * v_at(i + o)).sum::<f64>()
        } else {
            // one-sided window ending at node n
            let width = LAPLACIAN_STENCIL as i64 + 1;
            let start = n as i64 - width + 1;
            let offsets: Vec<f64> = (start..=n as i64).map(|j| (j - i) as f64).collect();
            let w = fd_weights(&offsets, 2);
            (start..=n as i64).zip(&w).map(|(j, c)| c * v_at(j)).sum::<f64>()
        };
        out.push(second / (h * h) / (i as f64 * h));
    }
    RadialFunction::new(grid.clone(), out)
}

/// Finite-difference weights for derivative `deriv` at offset 0 using the
/// given (unit-spacing) offsets.
fn fd_weights(offsets: &[f64], deriv: usize) -> Vec<f64> {
    let n = offsets.len();
    let mut mat = vec![vec![0.0; n + 1]; n];
    let mut fact = 1.0;
    for k in 1..=deriv {
        fact *= k as f64;
    }
    for (row, line) in mat.iter_mut().enumerate() {
        for (j, &o) in offsets.iter().enumerate() {
            line[j] = o.powi(row as i32);
        }
        line[n] = if row == deriv { fact } else { 0.0 };
    }
    crate::quadrature::solve_dense(mat)
}
