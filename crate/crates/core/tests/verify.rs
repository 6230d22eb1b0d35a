use sbp_core::functional::Params;
use sbp_core::kernel::KernelParams;
use sbp_core::radial::{RadialFunction, RadialGrid};
use sbp_core::verify::*;

fn gaussian() -> RadialFunction {
    RadialFunction::from_fn(RadialGrid::uniform(512, 15.0).unwrap(), |r| (-r * r / 2.0).exp())
}

#[test]
fn fourier_identity() {
    let u = gaussian();
    for a in [0.5, 1.0, 2.0] {
        let rep = check_fourier_identity(&u, KernelParams::new(a).unwrap()).unwrap();
        assert!(rep.passed && rep.residual <= 1e-6 * rep.rhs.abs(), "{rep:?}");
    }
    let zero = RadialFunction::zeros(u.grid().clone());
    let rep = check_fourier_identity(&zero, KernelParams::new(1.0).unwrap()).unwrap();
    assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
    assert!(rep.passed);
}

#[test]
fn high_p_nonexistence() {
    let u = gaussian();
    let rep = probe_nonexistence_high_p(&u, &Params::new(1.0, 1.0, 1.0, 6.0).unwrap()).unwrap();
    assert!(rep.passed && rep.lhs < 0.0);
    let local = probe_nonexistence_high_p(&u, &Params::new(1.0, 1.0, 0.0, 6.0).unwrap()).unwrap();
    assert!((local.lhs - local.rhs).abs() < 1e-12 * local.rhs.abs());
    let profiles = random_profiles(u.grid(), 4, 20);
    let batch = probe_nonexistence_high_p_batch(&profiles, &Params::new(1.0, 1.0, 1.0, 8.0).unwrap()).unwrap();
    assert!(all_passed(&batch));
    assert!(probe_nonexistence_high_p(&u, &Params::new(1.0, 1.0, 1.0, 5.0).unwrap()).is_err());
    let zero = RadialFunction::zeros(u.grid().clone());
    assert!(probe_nonexistence_high_p(&zero, &Params::new(1.0, 1.0, 1.0, 6.0).unwrap()).is_err());
}

#[test]
fn low_p_nonexistence() {
    assert!((kernel_bracket(1.0) - 0.2642411177).abs() < 1e-9);
    assert!(check_kernel_bracket(1000).passed);
    let u = gaussian();
    let rep = probe_nonexistence_low_p(&u, &Params::new(1.0, 1.0, 1.0, 2.0).unwrap()).unwrap();
    assert!(rep.passed && rep.lhs > 0.0);
    let profiles = random_profiles(u.grid(), 5, 20);
    let batch = probe_nonexistence_low_p_batch(&profiles, &Params::new(1.0, 1.0, 1.0, 1.5).unwrap()).unwrap();
    assert!(all_passed(&batch));
}

#[test]
fn mountain_pass_geometry() {
    let grid = RadialGrid::uniform(512, 15.0).unwrap();
    for (q, p) in [(1.0, 4.0), (1e-3, 2.5)] {
        let reps = check_mp_geometry(&Params::new(1.0, 1.0, q, p).unwrap(), &grid, 0).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(all_passed(&reps), "{reps:?}");
    }
    let reps = check_mp_geometry(&Params::new(1.0, 1.0, 1e3, 2.5).unwrap(), &grid, 0).unwrap();
    assert!(reps[0].passed && reps[1].passed);
    assert!(reps[2].inconclusive && !reps[2].passed);
}

#[test]
fn probes_are_reproducible() {
    let grid = RadialGrid::uniform(256, 15.0).unwrap();
    let cfg = SuiteConfig { identity_profiles: 2, sign_profiles: 5, bracket_samples: 100, ..SuiteConfig::default() };
    let a = serde_json::to_string(&suite(&grid, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&suite(&grid, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
