use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use sbp_cli::config::{from_table, parse_table, Command};
use sbp_cli::{persist, run, summary};

#[derive(Parser)]
#[command(name = "sbp", version, about = "Radial Schrödinger–Bopp–Podolsky solver and identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a ground state.
    Solve(Overrides),
    /// Follow solutions or potentials as a → 0.
    SweepA(Overrides),
    /// Run every identity and sign probe.
    Verify(Overrides),
    /// Run one named probe.
    Probe(Overrides),
    /// Repeat a command at N and 2N.
    GridStudy(Overrides),
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// nehari_descent or scf
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "rmax")]
    r_max: Option<f64>,
    /// Gradient tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Path of the JSON record; a CSV file is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    a_values: Option<Vec<f64>>,
    #[arg(long)]
    probe: Option<String>,
    /// Command repeated by grid-study.
    #[arg(long, value_enum)]
    study: Option<Command>,
    /// Any other configuration key, as key=value with a TOML value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn table(command: Command, o: Overrides) -> Result<Map<String, Value>, String> {
    let mut t = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_table(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Map::new(),
    };
    t.insert("command".into(), Value::from(command.name()));
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            t.insert(k.into(), v);
        }
    };
    put("a", o.a.map(Value::from));
    put("omega", o.omega.map(Value::from));
    put("q", o.q.map(Value::from));
    put("p", o.p.map(Value::from));
    put("method", o.method.map(Value::from));
    put("n", o.n.map(Value::from));
    put("r_max", o.r_max.map(Value::from));
    put("grad_tol", o.tol.map(Value::from));
    put("max_iter", o.max_iter.map(Value::from));
    put("seed", o.seed.map(Value::from));
    put("output", o.out.map(|p| Value::from(p.to_string_lossy().into_owned())));
    put("a_values", o.a_values.map(Value::from));
    put("probe", o.probe.map(Value::from));
    put("study", o.study.map(|s| Value::from(s.name())));
    for kv in o.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        let parsed = parse_table(&format!("v = {v}")).or_else(|_| parse_table(&format!("v = \"{v}\"")));
        let value = parsed.map_err(|e| format!("--set {k}: {e}"))?.remove("v").expect("parsed key");
        t.insert(k.trim().to_string(), value);
    }
    Ok(t)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, overrides) = match cli.command {
        Cmd::Solve(o) => (Command::Solve, o),
        Cmd::SweepA(o) => (Command::SweepA, o),
        Cmd::Verify(o) => (Command::Verify, o),
        Cmd::Probe(o) => (Command::Probe, o),
        Cmd::GridStudy(o) => (Command::GridStudy, o),
    };
    let cfg = match table(command, overrides).and_then(|t| from_table(t).map_err(|e| e.to_string())) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let record = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", summary::render(&record));
    match persist(&record) {
        Ok(w) => {
            for p in w.json.iter().chain(&w.csv) {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if record.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
