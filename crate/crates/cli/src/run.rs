use chrono::{SecondsFormat, Utc};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use sbp_core::kernel::KernelParams;
use sbp_core::limit::{potential_limit, solution_limit};
use sbp_core::radial::{RadialFunction, RadialGrid};
use sbp_core::solver::solve_ground_state;
use sbp_core::verify::{self, ProbeReport};
use sbp_core::SbpError;

use crate::config::{Command, ConfigError, ProbeKind, RunConfig, SweepMode};
use crate::export::to_csv;
use crate::record::{GridStudy, Payload, RunRecord, StudyRow, SCHEMA_ID};

/// Directory that receives a copy of every run record.
pub const RUN_STORE_ENV: &str = "SBP_RUN_STORE";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{command} failed: {source}")]
    Compute { command: &'static str, source: SbpError },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot encode results: {0}")]
    Encode(String),
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Execute one configured command.
pub fn run(cfg: &RunConfig) -> Result<RunRecord, RunError> {
    cfg.validate()?;
    let started_at = now();
    let results = compute(cfg, cfg.command)?;
    Ok(RunRecord {
        schema: SCHEMA_ID.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        started_at,
        finished_at: now(),
        ok: results.ok(),
        results,
    })
}

fn compute(cfg: &RunConfig, command: Command) -> Result<Payload, RunError> {
    let fail = |source| RunError::Compute { command: command.name(), source };
    match command {
        Command::Solve => {
            let sol = solve_ground_state(&cfg.params(), &cfg.solver()).map_err(fail)?;
            Ok(Payload::Solution(Box::new(sol)))
        }
        Command::SweepA => sweep(cfg).map(Payload::LimitReport).map_err(fail),
        Command::Verify => {
            let grid = RadialGrid::uniform(cfg.n, cfg.r_max).map_err(fail)?;
            verify::suite(&grid, &cfg.suite()).map(Payload::Probes).map_err(fail)
        }
        Command::Probe => probe(cfg).map(Payload::Probes).map_err(fail),
        Command::GridStudy => grid_study(cfg).map(Payload::GridStudy),
    }
}

fn sweep(cfg: &RunConfig) -> sbp_core::Result<sbp_core::limit::LimitReport> {
    match cfg.sweep_mode {
        SweepMode::Solution => solution_limit(&cfg.params(), &cfg.a_values, &cfg.solver()),
        SweepMode::FixedSource => {
            let grid = RadialGrid::uniform(cfg.n, cfg.r_max)?;
            potential_limit(&RadialFunction::from_fn(grid, |r| (-r * r).exp()), &cfg.a_values)
        }
    }
}

fn probe(cfg: &RunConfig) -> sbp_core::Result<Vec<ProbeReport>> {
    let grid = RadialGrid::uniform(cfg.n, cfg.r_max)?;
    let prm = cfg.params();
    prm.validate()?;
    let mut profiles = vec![RadialFunction::from_fn(grid.clone(), |r| (-r * r / 2.0).exp())];
    profiles.extend(verify::random_profiles(&grid, cfg.seed, cfg.random_profiles));
    let kind = cfg.probe.expect("validated probe name");
    match kind {
        ProbeKind::FourierIdentity => {
            let kp = KernelParams::new(prm.a)?;
            profiles.iter().map(|u| verify::check_fourier_identity(u, kp)).collect()
        }
        ProbeKind::PohozaevForms => profiles.iter().map(|u| verify::check_pohozaev_forms(u, &prm)).collect(),
        ProbeKind::NonexistenceHighP => verify::probe_nonexistence_high_p_batch(&profiles, &prm),
        ProbeKind::NonexistenceLowP => verify::probe_nonexistence_low_p_batch(&profiles, &prm),
        ProbeKind::KernelBracket => Ok(vec![verify::check_kernel_bracket(cfg.bracket_samples)]),
        ProbeKind::MpGeometry => verify::check_mp_geometry(&prm, &grid, cfg.seed),
        ProbeKind::Truncation => Ok(vec![verify::check_truncation(&profiles, &prm, cfg.t_bound)?]),
    }
}

/// The studied command at `N` and `2N`, with a Richardson estimate for every
/// scalar both runs report.
fn grid_study(cfg: &RunConfig) -> Result<GridStudy, RunError> {
    let study = cfg.effective_command();
    let coarse = compute(cfg, study)?;
    let fine_cfg = RunConfig { n: 2 * cfg.n, ..cfg.clone() };
    let fine = compute(&fine_cfg, study)?;
    let factor = 2f64.powf(cfg.richardson_order) - 1.0;
    let fine_scalars = fine.scalars();
    let rows = coarse
        .scalars()
        .into_iter()
        .filter_map(|(name, c)| {
            let f = fine_scalars.iter().find(|(n, _)| *n == name)?.1;
            let delta = f - c;
            Some(StudyRow { name, coarse: c, fine: f, delta, error_estimate: delta.abs() / factor, extrapolated: f + delta / factor })
        })
        .collect();
    Ok(GridStudy {
        study,
        n_coarse: cfg.n,
        n_fine: fine_cfg.n,
        order: cfg.richardson_order,
        coarse_ok: coarse.ok(),
        fine_ok: fine.ok(),
        rows,
    })
}

/// Where a record went.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Written {
    pub json: Vec<PathBuf>,
    pub csv: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

fn encode(record: &RunRecord) -> Result<(String, String), RunError> {
    let json = serde_json::to_string_pretty(record).map_err(|e| RunError::Encode(e.to_string()))?;
    let csv = to_csv(&record.results).map_err(|e| RunError::Encode(e.to_string()))?;
    Ok((json, csv))
}

fn write_pair(json_path: &Path, json: &str, csv: &str, written: &mut Written) -> Result<(), RunError> {
    if let Some(dir) = json_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(json_path, json).map_err(io_err(json_path))?;
    let csv_path = json_path.with_extension("csv");
    fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;
    written.json.push(json_path.to_path_buf());
    written.csv.push(csv_path);
    Ok(())
}

/// Append a record to the run store under a fresh name; existing files are never touched.
fn append_to_store(store: &Path, record: &RunRecord, json: &str, csv: &str, written: &mut Written) -> Result<(), RunError> {
    fs::create_dir_all(store).map_err(io_err(store))?;
    let stamp: String = record.started_at.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    for k in 0.. {
        let path = store.join(format!("{stamp}-{}-{k}.json", record.config.command.name()));
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                f.write_all(json.as_bytes()).map_err(io_err(&path))?;
                let csv_path = path.with_extension("csv");
                fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;
                written.json.push(path);
                written.csv.push(csv_path);
                return Ok(());
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(io_err(&path)(e)),
        }
    }
    unreachable!()
}

/// Write the record to the configured output path and to the run store named
/// by `SBP_RUN_STORE`, each with a CSV side file.
pub fn persist(record: &RunRecord) -> Result<Written, RunError> {
    let (json, csv) = encode(record)?;
    let mut written = Written::default();
    if let Some(path) = &record.config.output {
        write_pair(path, &json, &csv, &mut written)?;
    }
    if let Some(store) = std::env::var_os(RUN_STORE_ENV).filter(|s| !s.is_empty()) {
        append_to_store(Path::new(&store), record, &json, &csv, &mut written)?;
    }
    Ok(written)
}
