//! Plot-ready CSV side files. The column sets are fixed: solutions
//! `r,u,phi`; sweeps `a,d12_gap,alap_norm,h1_gap`; probes
//! `name,lhs,rhs,residual,passed`.

use serde::Serialize;

use crate::record::Payload;

#[derive(Serialize)]
struct SolutionRow {
    r: f64,
    u: f64,
    phi: f64,
}

#[derive(Serialize)]
struct SweepRow {
    a: f64,
    d12_gap: f64,
    alap_norm: f64,
    h1_gap: Option<f64>,
}

#[derive(Serialize)]
struct ProbeRow<'a> {
    name: &'a str,
    lhs: f64,
    rhs: f64,
    residual: f64,
    passed: bool,
}

pub const SOLUTION_COLUMNS: [&str; 3] = ["r", "u", "phi"];
pub const SWEEP_COLUMNS: [&str; 4] = ["a", "d12_gap", "alap_norm", "h1_gap"];
pub const PROBE_COLUMNS: [&str; 5] = ["name", "lhs", "rhs", "residual", "passed"];

fn write_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_csv(payload: &Payload) -> csv::Result<String> {
    match payload {
        Payload::Solution(s) => {
            let r = s.u.grid().nodes();
            write_rows(
                r.iter()
                    .zip(s.u.values())
                    .zip(s.phi.values())
                    .map(|((&r, &u), &phi)| SolutionRow { r, u, phi }),
            )
        }
        Payload::LimitReport(rep) => write_rows(rep.a_values.iter().enumerate().map(|(i, &a)| SweepRow {
            a,
            d12_gap: rep.d12_gaps[i],
            alap_norm: rep.alap_norms[i],
            h1_gap: rep.h1_gaps.get(i).copied(),
        })),
        Payload::Probes(ps) => write_rows(ps.iter().map(|p| ProbeRow {
            name: &p.name,
            lhs: p.lhs,
            rhs: p.rhs,
            residual: p.residual,
            passed: p.passed,
        })),
        Payload::GridStudy(g) => write_rows(&g.rows),
    }
}
