use sbp_cli::config::{parse_config, RunConfig};
use sbp_cli::export::{to_csv, PROBE_COLUMNS, SOLUTION_COLUMNS, SWEEP_COLUMNS};
use sbp_cli::record::Payload;
use sbp_cli::{run, RunRecord, RUN_RECORD_SCHEMA};

fn config(text: &str) -> RunConfig {
    parse_config(text).unwrap()
}

fn header(csv: &str) -> Vec<String> {
    csv.lines().next().unwrap().split(',').map(String::from).collect()
}

fn assert_valid(record: &RunRecord) {
    let schema: serde_json::Value = serde_json::from_str(RUN_RECORD_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance = serde_json::to_value(record).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn solve_record() {
    let rec = run(&config("command = \"solve\"\nr_max = 12\n")).unwrap();
    assert!(rec.ok);
    assert_valid(&rec);
    let Payload::Solution(sol) = &rec.results else { panic!("expected a solution") };
    assert!(sol.converged);
    let csv = to_csv(&rec.results).unwrap();
    assert_eq!(header(&csv), SOLUTION_COLUMNS);
    assert_eq!(csv.lines().count(), 513);
}

#[test]
fn budget_exhaustion_is_not_ok() {
    let rec = run(&config("command = \"solve\"\nr_max = 12\nmax_iter = 1\n")).unwrap();
    assert!(!rec.ok);
    assert_valid(&rec);
}

#[test]
fn single_value_sweep() {
    let rec = run(&config("command = \"sweep-a\"\nr_max = 12\na_values = [0.2]\n")).unwrap();
    assert_valid(&rec);
    let Payload::LimitReport(rep) = &rec.results else { panic!("expected a limit report") };
    assert_eq!((rep.a_values.len(), rep.d12_gaps.len(), rep.h1_gaps.len()), (1, 1, 1));
    let csv = to_csv(&rec.results).unwrap();
    assert_eq!(header(&csv), SWEEP_COLUMNS);
}

#[test]
fn fixed_source_sweep_leaves_h1_blank() {
    let rec = run(&config("command = \"sweep-a\"\nsweep_mode = \"fixed_source\"\nr_max = 10\na_values = [0.5, 0.2]\n")).unwrap();
    assert!(rec.ok);
    let csv = to_csv(&rec.results).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn probe_accepts_p_beyond_the_solver_range() {
    let rec = run(&config("command = \"probe\"\nprobe = \"nonexistence_high_p\"\np = 7\nr_max = 15\nrandom_profiles = 3\n")).unwrap();
    assert!(rec.ok);
    assert_valid(&rec);
    let Payload::Probes(ps) = &rec.results else { panic!("expected probes") };
    assert_eq!(ps.len(), 4);
    assert_eq!(header(&to_csv(&rec.results).unwrap()), PROBE_COLUMNS);
}

#[test]
fn probe_range_errors_carry_context() {
    let err = run(&config("command = \"probe\"\nprobe = \"nonexistence_low_p\"\np = 3\n")).unwrap_err();
    assert!(err.to_string().starts_with("probe failed"), "{err}");
}

#[test]
fn verify_on_defaults_passes() {
    let rec = run(&config("command = \"verify\"\n")).unwrap();
    assert!(rec.ok);
    assert_valid(&rec);
}

#[test]
fn results_are_reproducible() {
    let cfg = config("command = \"probe\"\nprobe = \"mp_geometry\"\np = 4\nseed = 3\nr_max = 15\n");
    let a = serde_json::to_string(&run(&cfg).unwrap().results).unwrap();
    let b = serde_json::to_string(&run(&cfg).unwrap().results).unwrap();
    assert_eq!(a, b);
}

#[test]
fn grid_study_reports_every_scalar() {
    let rec = run(&config("command = \"grid-study\"\nstudy = \"solve\"\nr_max = 12\nn = 256\n")).unwrap();
    assert!(rec.ok);
    assert_valid(&rec);
    let Payload::GridStudy(g) = &rec.results else { panic!("expected a grid study") };
    assert_eq!((g.n_coarse, g.n_fine), (256, 512));
    let j = g.rows.iter().find(|r| r.name == "j_value").unwrap();
    assert!(j.error_estimate < 1e-4 * j.fine.abs());
    assert!((j.extrapolated - j.fine).abs() <= j.error_estimate * (1.0 + 1e-12));
}
