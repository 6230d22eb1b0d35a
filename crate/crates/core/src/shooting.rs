//! Shooting oracle for the local problem `−Δu + ωu = u^{p−1}` (the `q = 0`
//! case), independent of the variational machinery.
//!
//! `u'' = −(2/r)u' + ωu − u^{p−1}` is integrated by RK4 from a Taylor start
//! at small `r`, and `u(0)` is bisected: too large and `u` crosses zero, too
//! small and `u` turns back up while still positive. Once `u` has decayed
//! below `10⁻⁵ u(0)` the nonlinearity is negligible and the profile is
//! continued by the exact linear decay `C e^{−√ω r}/r`.

use crate::error::{domain, Result, SbpError};
use crate::radial::{RadialFunction, RadialGrid};
use std::sync::Arc;

const SUBSTEPS: usize = 16;
const MATCH_LEVEL: f64 = 1e-5;
/// Integration never stops before this many decay lengths `1/√ω`.
const CAP_DECAY_LENGTHS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Fate {
    Crossed,
    Turned,
    Neither,
}

struct Shot {
    fate: Fate,
    values: Vec<f64>,
}

fn rhs(r: f64, u: f64, v: f64, omega: f64, p: f64) -> (f64, f64) {
    (v, -2.0 / r * v + omega * u - u.abs().powf(p - 2.0) * u)
}

/// Integrate from `u(0) = u0` until `u` crosses zero, turns upward, or passes
/// `r_cap`, recording `u` at the first `nodes` grid nodes.
fn shoot(u0: f64, omega: f64, p: f64, grid: &RadialGrid, nodes: usize) -> Shot {
    let h = grid.spacing() / SUBSTEPS as f64;
    let r_cap = (grid.r_max()).max(CAP_DECAY_LENGTHS / omega.sqrt());
    let g = |u: f64| omega * u - u.powf(p - 1.0);
    let c2 = g(u0) / 6.0;
    let dg = omega - (p - 1.0) * u0.powf(p - 2.0);
    let c4 = dg * c2 / 20.0;
    let mut r = h;
    let mut u = u0 + c2 * r * r + c4 * r.powi(4);
    let mut v = 2.0 * c2 * r + 4.0 * c4 * r.powi(3);
    let mut values = Vec::with_capacity(nodes);
    let mut step = 1;
    while r < r_cap {
        let (k1u, k1v) = rhs(r, u, v, omega, p);
        let (k2u, k2v) = rhs(r + h / 2.0, u + h / 2.0 * k1u, v + h / 2.0 * k1v, omega, p);
        let (k3u, k3v) = rhs(r + h / 2.0, u + h / 2.0 * k2u, v + h / 2.0 * k2v, omega, p);
        let (k4u, k4v) = rhs(r + h, u + h * k3u, v + h * k3v, omega, p);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        step += 1;
        r = step as f64 * h;
        if u < 0.0 {
            return Shot { fate: Fate::Crossed, values };
        }
        if v > 0.0 {
            return Shot { fate: Fate::Turned, values };
        }
        if step % SUBSTEPS == 0 && values.len() < nodes {
            values.push(u);
        }
    }
    Shot { fate: Fate::Neither, values }
}

/// The positive radial ground state of `−Δu + ωu = u^{p−1}` sampled on `grid`.
pub fn shooting_local(omega: f64, p: f64, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    if !(omega.is_finite() && omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    if !(p > 2.0 && p < 6.0) {
        return domain(format!("p out of (2,6): {p}"));
    }
    let equilibrium = omega.powf(1.0 / (p - 2.0));
    let mut lo = equilibrium * (1.0 + 1e-6);
    if shoot(lo, omega, p, grid, 0).fate != Fate::Turned {
        return Err(SbpError::Oracle(format!("lower bracket u0 = {lo} does not turn")));
    }
    let mut hi = 2.0 * equilibrium;
    let mut tries = 0;
    while shoot(hi, omega, p, grid, 0).fate != Fate::Crossed {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(SbpError::Oracle("no upper bracket: u never crosses zero".into()));
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid, omega, p, grid, 0).fate {
            Fate::Crossed => hi = mid,
            Fate::Turned => lo = mid,
            Fate::Neither => {
                lo = mid;
                break;
            }
        }
    }
    let shot = shoot(lo, omega, p, grid, grid.len());
    let nodes = grid.nodes();
    let values = match shot.values.iter().position(|&u| u <= MATCH_LEVEL * lo) {
        Some(m) => {
            let (r_m, u_m) = (nodes[m], shot.values[m]);
            let k = omega.sqrt();
            nodes
                .iter()
                .enumerate()
                .map(|(i, &r)| if i <= m { shot.values[i] } else { u_m * r_m / r * (-k * (r - r_m)).exp() })
                .collect()
        }
        None if shot.values.len() == grid.len() => shot.values,
        None => return Err(SbpError::Oracle("profile never decays to the matching level".into())),
    };
    RadialFunction::new(grid.clone(), values)
}
