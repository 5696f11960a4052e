use std::path::Path;

use sqg_core::galerkin::io::{snapshot_fields, write_checkpoints, write_diagnostics_csv};
use sqg_core::galerkin::{run, Outcome, Trajectory};
use sqg_core::interior::{gradient_evolution_monitor, holder_evolution_monitor, MonitorSeries};
use sqg_core::BoundKind;

use crate::config::RunConfig;
use crate::rows::{ReportFile, Row, FORMAT_VERSION};
use crate::CliError;

/// Largest Hölder exponent the monitor will use when `epsilon / sup` is big.
const ALPHA_CAP: f64 = 0.9;

pub struct SolveResult {
    pub rows: Vec<Row>,
    pub outcome: Outcome,
}

pub fn solve(cfg: &RunConfig, out: &Path) -> Result<SolveResult, CliError> {
    let domain = cfg.domain.build(cfg.solver.n)?;
    let theta0 = cfg.initial.sample(&domain, cfg.seed)?;
    let traj = run(domain, &theta0, cfg.solver.clone())?;

    write_diagnostics_csv(&out.join("diagnostics.csv"), &traj.rows)?;
    let ext = match cfg.output.checkpoint_format {
        sqg_core::galerkin::io::CheckpointFormat::Binary => "bin",
        sqg_core::galerkin::io::CheckpointFormat::Csv => "csv",
    };
    if !traj.snapshots.is_empty() {
        write_checkpoints(&out.join(format!("checkpoints.{ext}")), &domain, &snapshot_fields(&traj)?, cfg.output.checkpoint_format)?;
    }

    let mut rows = run_checks(cfg, &traj);
    let mut series = Vec::new();
    if !traj.snapshots.is_empty() {
        let m = &cfg.monitors;
        let sup0 = traj.rows.first().map_or(0.0, |r| r.linf);
        if m.holder {
            let alpha = if sup0 > 0.0 { (m.holder_epsilon / sup0).min(ALPHA_CAP) } else { 0.5 };
            let h = holder_evolution_monitor(&traj, alpha, m.ell)?;
            rows.push(monitor_row("monitor.holder", &h).detail("alpha", alpha).detail("ell", m.ell));
            series.push(("holder", h));
        }
        if m.gradient {
            let g = gradient_evolution_monitor(&traj)?;
            rows.push(monitor_row("monitor.gradient", &g));
            series.push(("gradient", g));
        }
    }
    write_series(&out.join("monitors.csv"), &series)?;
    ReportFile { format: FORMAT_VERSION, command: "solve".into(), suite: None, seed: cfg.seed, rows: rows.clone() }
        .write(out, "solve")?;
    Ok(SolveResult { rows, outcome: traj.outcome })
}

fn run_checks(cfg: &RunConfig, traj: &Trajectory) -> Vec<Row> {
    let m = &cfg.monitors;
    let n = traj.rows.len();
    let sweep = format!("{n} checkpoints, t in [0, {}]", traj.rows.last().map_or(0.0, |r| r.t));
    let sup0 = traj.rows.first().map_or(0.0, |r| r.linf);
    let sup = traj.rows.iter().map(|r| r.linf).fold(0.0, f64::max);
    let excess = if sup0 > 0.0 { sup / sup0 - 1.0 } else { sup };
    let decay = traj.rows.windows(2).map(|w| w[1].l2 - w[0].l2).fold(f64::NEG_INFINITY, f64::max);
    vec![
        Row::check(
            "solve.outcome",
            BoundKind::Upper,
            traj.steps as f64,
            traj.outcome == Outcome::Completed,
            format!("{:?}", traj.outcome),
            traj.steps,
        ),
        Row::check("solve.max_principle", BoundKind::Upper, excess, excess <= m.sup_slack, sweep.clone(), n)
            .detail("sup0", sup0)
            .detail("slack", m.sup_slack),
        Row::check("solve.l2_decay", BoundKind::Upper, decay.max(0.0), decay <= 0.0, sweep.clone(), n)
            .detail("largest_increment", decay),
        Row::check(
            "solve.contamination",
            BoundKind::Upper,
            traj.max_contamination,
            traj.max_contamination <= m.contamination,
            sweep.clone(),
            traj.steps,
        )
        .detail("tolerance", m.contamination),
        Row::check(
            "solve.energy_law",
            BoundKind::Upper,
            traj.energy_law_ratio,
            traj.energy_law_ratio <= m.energy_law,
            sweep,
            traj.steps,
        )
        .detail("tolerance", m.energy_law),
    ]
}

fn monitor_row(id: &str, s: &MonitorSeries) -> Row {
    let mut r = Row::check(
        id,
        BoundKind::Upper,
        s.gamma,
        s.is_finite() && s.gamma.is_finite(),
        format!("{} snapshots, t in [0, {}]", s.times.len(), s.times.last().copied().unwrap_or(0.0)),
        s.times.len(),
    )
    .detail("max", s.max())
    .detail("reference", s.reference)
    .detail("theta0_sup", s.theta0_sup)
    .detail("nonincreasing", f64::from(u8::from(s.nonincreasing)));
    if let Some(e) = s.epsilon {
        r = r.detail("epsilon", e);
    }
    r
}

/// Tidy monitor series: one `(monitor, t, value, weighted)` row per snapshot.
fn write_series(path: &Path, series: &[(&str, MonitorSeries)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["monitor", "t", "value", "weighted"]).map_err(err)?;
    for (name, s) in series {
        for (i, (t, v)) in s.times.iter().zip(&s.values).enumerate() {
            let weighted = s.weighted.as_ref().map(|wv| wv[i].to_string()).unwrap_or_default();
            w.write_record([name.to_string(), t.to_string(), v.to_string(), weighted]).map_err(err)?;
        }
    }
    w.flush()?;
    Ok(())
}
