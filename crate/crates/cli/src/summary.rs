use std::fmt::Write;

use crate::record::{Payload, RunRecord};

/// Plain-text report of a record for the terminal.
pub fn render(record: &RunRecord) -> String {
    let mut out = String::new();
    let status = if record.ok { "ok" } else { "NOT OK" };
    let _ = writeln!(out, "{} [{}]", record.config.command.name(), status);
    match &record.results {
        Payload::Solution(s) => {
            let d = &s.diagnostics;
            let _ = writeln!(
                out,
                "method {:?}, {} iterations, converged {}, |J'|/|u| = {:.3e}",
                s.method, s.iterations, s.converged, s.grad_ratio
            );
            for (k, v) in [
                ("J", d.j_value),
                ("nehari", d.nehari_residual),
                ("nehari2", d.nehari2_residual),
                ("pohozaev", d.pohozaev_residual),
                ("pohozaev_alt", d.pohozaev_alt_residual),
                ("|u|_H1", d.h1_norm),
                ("u(0)", s.u.values()[0]),
            ] {
                let _ = writeln!(out, "  {k:<14}{v:>16.8e}");
            }
        }
        Payload::LimitReport(r) => {
            let _ = writeln!(out, "{:>10} {:>14} {:>14} {:>14}", "a", "d12_gap", "alap_norm", "h1_gap");
            for (i, a) in r.a_values.iter().enumerate() {
                let h1 = r.h1_gaps.get(i).map_or("-".to_string(), |g| format!("{g:.6e}"));
                let _ = writeln!(out, "{a:>10} {:>14.6e} {:>14.6e} {h1:>14}", r.d12_gaps[i], r.alap_norms[i]);
            }
        }
        Payload::Probes(ps) => {
            let width = ps.iter().map(|p| p.name.len()).max().unwrap_or(4).max(4);
            let _ = writeln!(out, "{:<width$} {:>14} {:>14} {:>12} result", "name", "lhs", "rhs", "residual");
            for p in ps {
                let verdict = match (p.passed, p.inconclusive) {
                    (true, _) => "pass",
                    (false, true) => "inconclusive",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(out, "{:<width$} {:>14.6e} {:>14.6e} {:>12.3e} {verdict}", p.name, p.lhs, p.rhs, p.residual);
            }
            let passed = ps.iter().filter(|p| p.passed).count();
            let _ = writeln!(out, "{passed}/{} passed", ps.len());
        }
        Payload::GridStudy(g) => {
            let _ = writeln!(out, "{} at N = {} and N = {} (order {})", g.study.name(), g.n_coarse, g.n_fine, g.order);
            let width = g.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
            let _ = writeln!(out, "{:<width$} {:>16} {:>16} {:>12}", "quantity", "N", "2N", "err_est");
            for r in &g.rows {
                let _ = writeln!(out, "{:<width$} {:>16.9e} {:>16.9e} {:>12.3e}", r.name, r.coarse, r.fine, r.error_estimate);
            }
        }
    }
    out
}
