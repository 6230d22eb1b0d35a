use sbp_cli::config::*;
use sbp_core::solver::Method;

#[test]
fn minimal_solve_gets_defaults() {
    let cfg = parse_config("command = \"solve\"\na = 1\nomega = 1\nq = 1\np = 5\n").unwrap();
    assert_eq!(cfg.command, Command::Solve);
    assert_eq!((cfg.n, cfg.r_max, cfg.method), (512, 30.0, Method::NehariDescent));
    assert_eq!(cfg.seed, 0);
    let json = parse_config(r#"{"command": "solve", "a": 1, "omega": 1, "q": 1, "p": 5}"#).unwrap();
    assert_eq!(json, cfg);
}

#[test]
fn p_is_checked_per_command() {
    let err = parse_config("command = \"solve\"\np = 7\n").unwrap_err();
    assert!(err.to_string().contains("p out of (2,6)"), "{err}");
    assert!(matches!(err, ConfigError::Key { ref key, .. } if key == "p"));
    let probe = parse_config("command = \"probe\"\nprobe = \"nonexistence_high_p\"\np = 7\n").unwrap();
    assert_eq!(probe.p, 7.0);
    let study = parse_config("command = \"grid-study\"\nstudy = \"solve\"\np = 7\n").unwrap_err();
    assert!(study.to_string().contains("p out of (2,6)"));
}

#[test]
fn duplicate_keys_are_named() {
    let toml = parse_config("command = \"solve\"\np = 5\np = 4\n").unwrap_err();
    assert_eq!(toml, ConfigError::Duplicate("p".into()));
    let json = parse_config(r#"{"command": "solve", "q": 1, "q": 2}"#).unwrap_err();
    assert_eq!(json, ConfigError::Duplicate("q".into()));
}

#[test]
fn unknown_keys_and_bad_types_are_rejected() {
    let err = parse_config("command = \"solve\"\nomgea = 1\n").unwrap_err();
    assert!(err.to_string().contains("omgea"), "{err}");
    let err = parse_config("command = \"solve\"\nn = \"many\"\n").unwrap_err();
    assert!(matches!(err, ConfigError::Key { ref key, .. } if key == "n"), "{err}");
    assert!(parse_config("p = 5\n").is_err());
    assert!(parse_config("command = \"solve\"\nn = 16\n").is_err());
    assert!(parse_config("command = \"sweep-a\"\na_values = [0.1, 0.2]\n").is_err());
    assert!(parse_config("command = \"probe\"\n").is_err());
}

#[test]
fn round_trip() {
    let text = "command = \"grid-study\"\nstudy = \"sweep-a\"\na_values = [0.3, 0.1]\nsweep_mode = \"fixed_source\"\n\
                grad_tol = 1.5e-9\nr_max = 12.5\nseed = 7\noutput = \"out/run.json\"\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    let json = serde_json::to_string(&cfg).unwrap();
    assert_eq!(parse_config(&json).unwrap(), cfg);
}
