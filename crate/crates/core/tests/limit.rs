use sbp_core::error::SbpError;
use sbp_core::functional::Params;
use sbp_core::limit::*;
use sbp_core::radial::{RadialFunction, RadialGrid};
use sbp_core::solver::{GridSpec, SolverConfig};

#[test]
fn fixed_source_sweep_converges() {
    let grid = RadialGrid::uniform(1024, 10.0).unwrap();
    let f = RadialFunction::from_fn(grid, |r| (-r * r).exp());
    let rep = potential_limit(&f, &[0.5, 0.2, 0.1, 0.05]).unwrap();
    assert_eq!(rep.mode, LimitMode::FixedSource);
    assert!(strictly_decreasing(&rep.d12_gaps));
    assert!(strictly_decreasing(&rep.alap_norms));
    assert!(rep.dominated);
    assert!(rep.h1_gaps.is_empty());
    let ratios: Vec<f64> = rep.grad_phi_norms.iter().map(|g| g / rep.source_scale).collect();
    assert!(ratios.iter().all(|r| *r < 1.0));
    assert!(*rep.relative_d12().last().unwrap() < 1e-2);
}

#[test]
fn single_value_sweep() {
    let prm = Params::new(1.0, 1.0, 1.0, 5.0).unwrap();
    let cfg = SolverConfig { grid: GridSpec { n: 512, r_max: 12.0 }, ..SolverConfig::default() };
    let rep = solution_limit(&prm, &[0.2], &cfg).unwrap();
    assert_eq!(rep.mode, LimitMode::FullSolution);
    assert!(rep.complete);
    assert_eq!((rep.h1_gaps.len(), rep.d12_gaps.len(), rep.alap_norms.len()), (1, 1, 1));
    assert!(rep.relative_h1()[0] > 0.0 && rep.relative_h1()[0] < 1e-1);
}

#[test]
fn sweep_must_resolve_the_smallest_a() {
    let grid = RadialGrid::uniform(256, 10.0).unwrap();
    let f = RadialFunction::from_fn(grid, |r| (-r * r).exp());
    assert!(matches!(potential_limit(&f, &[0.5, 0.15]), Err(SbpError::Resolution(_))));
    assert!(potential_limit(&f, &[0.5, 0.5]).is_err());
}
