use sbp_core::kernel::{KernelParams, SphereKernel};
use sbp_core::potential::*;
use sbp_core::radial::{RadialFunction, RadialGrid};
use std::f64::consts::PI;

fn gaussian(n: usize, r_max: f64) -> RadialFunction {
    RadialFunction::from_fn(RadialGrid::uniform(n, r_max).unwrap(), |r| (-r * r / 2.0).exp())
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n).map(|i| f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(lo) + inner + f(hi)) * h / 3.0
}

#[test]
fn zero_density_gives_zero_potential() {
    let z = RadialFunction::zeros(RadialGrid::uniform(128, 10.0).unwrap());
    let res = bp_potential(&z, KernelParams::new(1.0).unwrap()).unwrap();
    assert!(res.phi.is_zero());
    assert_eq!((res.grad_phi_l2, res.lap_phi_l2, res.interaction), (0.0, 0.0, 0.0));
    assert_eq!(coulomb_potential(&z).unwrap().interaction, 0.0);
}

#[test]
fn potential_at_origin_matches_radial_quadrature() {
    let u = gaussian(512, 12.0);
    let kp = KernelParams::new(1.0).unwrap();
    let bp = bp_potential(&u, kp).unwrap();
    let oracle = 4.0 * PI * simpson(|s| -(-s).exp_m1() * s * (-s * s).exp(), 0.0, 12.0, 4000);
    let at0 = potential_at(&u, SphereKernel::BoppPodolsky { a: 1.0 }, 0.0).unwrap();
    assert!((at0 / oracle - 1.0).abs() < 1e-6, "{at0} vs {oracle}");
    let r1 = u.grid().nodes()[0];
    let near = potential_at(&u, SphereKernel::BoppPodolsky { a: 1.0 }, r1).unwrap();
    assert!((bp.phi.values()[0] / near - 1.0).abs() < 1e-8);

    let sp = coulomb_potential(&u).unwrap();
    let c0 = potential_at(&u, SphereKernel::Coulomb, 0.0).unwrap();
    assert!((c0 / (2.0 * PI) - 1.0).abs() < 1e-8);
    assert!(sp.phi.values().windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn properties_of_the_bp_potential() {
    let u = gaussian(1024, 24.0);
    let kp = KernelParams::new(1.0).unwrap();
    let res = bp_potential(&u, kp).unwrap();
    let sp = coulomb_potential(&u).unwrap();
    assert!(res.phi.values().iter().all(|v| *v >= 0.0));
    assert!(res.phi.values().iter().zip(sp.phi.values()).all(|(b, c)| *b <= *c + 1e-12));
    assert!(res.interaction > 0.0);
    assert!(res.nehari2_residual(1.0).abs() <= 1e-6 * 4.0 * PI * res.interaction);
    let mass = PI.powf(1.5);
    assert!((20.0 * res.phi.eval(20.0) / mass - 1.0).abs() < 1e-2);
    let e = potential_energy(&res.phi, &u, kp).unwrap();
    assert!((e + 0.5 * res.interaction).abs() < 1e-6 * res.interaction);
}

#[test]
fn rejects_inadmissible_input() {
    let g = RadialGrid::uniform(128, 10.0).unwrap();
    let flat = RadialFunction::from_fn(g, |_| 1.0);
    assert!(bp_potential(&flat, KernelParams::new(1.0).unwrap()).is_err());
}
