//! The data-emitting commands: trace, sweep and figure presets.

use hyperbat_core::energetics::{
    asymptotic_optimal_energy, asymptotic_optimal_time, ergotropy_record, excitation_fraction,
    optimal_energy, optimal_time, CouplingLimit,
};
use hyperbat_core::oracle::{
    finite_width_pulse_run, run_delta_trace, DeltaTraceOptions, FinitePulseOptions, OracleReport,
};
use hyperbat_core::params::BatteryParams;

use crate::config::{Mode, PulseKind, RunConfig};
use crate::output::{emit, write_file, Table};
use crate::CliError;

/// Drive strengths of the charging-trace figure preset.
pub const FIG2A_OMEGAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Time-series of normalized energy, ergotropy, discriminant and
/// excitation fraction; oracle columns appended on request.
pub fn trace_table(config: &RunConfig) -> Result<Table, CliError> {
    let p = config.params.battery()?;
    let grid = config.effective_grid();
    grid.validate()?;
    // The grid is dimensionless gamma t; raw time when gamma = 0.
    let unit = if p.gamma > 0.0 { p.gamma } else { 1.0 };
    let gts = grid.values();
    let times: Vec<f64> = gts.iter().map(|gt| gt / unit).collect();
    let scale = p.omega_b * p.enhancement_factor();
    let norm = |v: f64| if scale > 0.0 { v / scale } else { 0.0 };

    let mut columns = vec![
        "t_gamma",
        "e_norm",
        "ergotropy_norm",
        "discriminant",
        "excitation_fraction",
    ];
    let oracle_reports: Option<Vec<OracleReport>> = if config.oracle.enabled() {
        columns.extend_from_slice(&[
            "oracle_e_norm",
            "oracle_ergotropy_norm",
            "oracle_discriminant",
            "oracle_excitation_fraction",
            "oracle_truncation_weight",
        ]);
        let reports = match config.pulse.kind {
            PulseKind::Delta => run_delta_trace(
                &p,
                &times,
                &DeltaTraceOptions {
                    n_max: config.n_max,
                    rel_tol: config.tol,
                    ..Default::default()
                },
            )
            .map_err(numerical)?,
            PulseKind::FiniteWidth => {
                let pulse = config.pulse.spec()?;
                if !pulse.delta_limit_ok(p.omega_b) {
                    eprintln!(
                        "warning: omega_b * tau exceeds 0.1; the delta-pulse analytics do not apply"
                    );
                }
                finite_width_pulse_run(
                    &p,
                    &pulse,
                    &times,
                    &FinitePulseOptions {
                        n_max_a: config.n_max,
                        n_max_b: config.n_max,
                        rel_tol: Some(config.tol),
                    },
                )
                .map_err(numerical)?
            }
        };
        Some(reports)
    } else {
        None
    };

    let mut table = Table::new(&columns);
    for (i, (&gt, &t)) in gts.iter().zip(&times).enumerate() {
        let rec = ergotropy_record(&p, t).map_err(usage)?;
        let mut row = vec![
            gt,
            norm(rec.energy),
            norm(rec.ergotropy),
            rec.discriminant,
            rec.excitation_fraction,
        ];
        if let Some(reports) = &oracle_reports {
            let rep = &reports[i];
            row.extend_from_slice(&[
                norm(rep.energy.energy),
                norm(rep.energy.ergotropy),
                rep.energy.discriminant,
                rep.energy.excitation_fraction,
                rep.truncation_weight,
            ]);
        }
        table.push(row);
    }
    Ok(table)
}

/// Optimal charging time against the coupling ratio, with both
/// asymptotes for overlay.
pub fn sweep_te_table(config: &RunConfig) -> Result<Table, CliError> {
    let base = config.params;
    let grid = config.effective_grid();
    grid.validate()?;
    let mut table =
        Table::new(&["g_over_gamma", "t_e_gamma", "t_e_weak_gamma", "t_e_strong_gamma"]);
    for ratio in grid.values() {
        if ratio <= 0.0 {
            return Err(usage("coupling sweep requires positive g/gamma"));
        }
        let p = BatteryParams::new(base.omega_b, ratio * base.gamma, base.gamma, base.omega_drive)
            .map_err(usage)?;
        let t_e = optimal_time(&p).map_err(numerical)?;
        let weak = asymptotic_optimal_time(&p, CouplingLimit::Weak).map_err(numerical)?;
        let strong = asymptotic_optimal_time(&p, CouplingLimit::Strong).map_err(numerical)?;
        table.push(vec![ratio, t_e * base.gamma, weak * base.gamma, strong * base.gamma]);
    }
    Ok(table)
}

/// Optimal stored energy (normalized by omega_b sinh^2) against the
/// coupling ratio, with asymptotes.
pub fn sweep_emax_table(config: &RunConfig) -> Result<Table, CliError> {
    let base = config.params;
    let grid = config.effective_grid();
    grid.validate()?;
    let mut table =
        Table::new(&["g_over_gamma", "e_max_norm", "e_max_weak_norm", "e_max_strong_norm"]);
    for ratio in grid.values() {
        if ratio <= 0.0 {
            return Err(usage("coupling sweep requires positive g/gamma"));
        }
        let p = BatteryParams::new(base.omega_b, ratio * base.gamma, base.gamma, base.omega_drive)
            .map_err(usage)?;
        let scale = p.omega_b * p.enhancement_factor();
        if scale == 0.0 {
            return Err(usage("energy sweep requires a nonzero drive"));
        }
        let opt = optimal_energy(&p).map_err(numerical)?;
        let weak = asymptotic_optimal_energy(&p, CouplingLimit::Weak).map_err(numerical)?;
        let strong = asymptotic_optimal_energy(&p, CouplingLimit::Strong).map_err(numerical)?;
        table.push(vec![ratio, opt.e_max / scale, weak / scale, strong / scale]);
    }
    Ok(table)
}

/// Data behind the charging-trace panel: normalized stored energy, the
/// ergotropy for the preset drive strengths, and the weak/strong-drive
/// limit curves.
pub fn fig2a_table(config: &RunConfig) -> Result<Table, CliError> {
    let base = config.params;
    // The panel fixes g = 2 gamma.
    let gamma = base.gamma;
    let p_ref = BatteryParams::new(base.omega_b, 2.0 * gamma, gamma, 1.0).map_err(usage)?;
    let grid = config.effective_grid();
    grid.validate()?;
    let mut columns: Vec<String> =
        vec!["t_gamma".into(), "e_norm".into()];
    for omega in FIG2A_OMEGAS {
        columns.push(format!("ergotropy_norm_omega_{omega}"));
    }
    columns.push("weak_drive_limit_norm".into());
    columns.push("strong_drive_limit_norm".into());
    let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new(&col_refs);

    for gt in grid.values() {
        let t = gt / gamma;
        let frac = excitation_fraction(&p_ref, t).map_err(usage)?;
        let mut row = vec![gt, frac];
        for omega in FIG2A_OMEGAS {
            let p = BatteryParams::new(base.omega_b, 2.0 * gamma, gamma, omega).map_err(usage)?;
            let rec = ergotropy_record(&p, t).map_err(usage)?;
            row.push(rec.ergotropy / (p.omega_b * p.enhancement_factor()));
        }
        row.push(frac * frac);
        row.push(frac);
        table.push(row);
    }
    Ok(table)
}

fn gnuplot_script(mode: Mode, data_file: &str, table: &Table) -> String {
    let mut s = String::new();
    s.push_str("# gnuplot script; renders the emitted data file only\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside\n");
    match mode {
        Mode::Fig2a => {
            s.push_str("set xlabel 'gamma t'\n");
            s.push_str("set ylabel 'energy / (omega_b sinh^2 Omega)'\n");
        }
        Mode::Fig2b => {
            s.push_str("set logscale xy\n");
            s.push_str("set xlabel 'g / gamma'\n");
            s.push_str("set ylabel 'gamma t_E'\n");
        }
        Mode::Fig2c => {
            s.push_str("set logscale xy\n");
            s.push_str("set xlabel 'g / gamma'\n");
            s.push_str("set ylabel 'E(t_E) / (omega_b sinh^2 Omega)'\n");
        }
        _ => {}
    }
    s.push_str("plot \\\n");
    let n = table.columns.len();
    for (k, name) in table.columns.iter().enumerate().skip(1) {
        let dashed = name.contains("weak") || name.contains("strong");
        let style = if dashed { "with lines dashtype 2" } else { "with lines" };
        let sep = if k + 1 < n { ", \\\n" } else { "\n" };
        s.push_str(&format!("  '{data_file}' using 1:{} {style} title '{name}'{sep}", k + 1));
    }
    s
}

/// The figure command: write the panel data plus a plot script that
/// references only the emitted file.
pub fn run_figure(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let table = match config.mode {
        Mode::Fig2a => fig2a_table(config)?,
        Mode::Fig2b => sweep_te_table(config)?,
        Mode::Fig2c => sweep_emax_table(config)?,
        other => return Err(usage(format!("not a figure mode: {}", other.name()))),
    };
    let mut cfg = config.clone();
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| std::path::PathBuf::from(format!("{}.csv", cfg.mode.name())));
    cfg.out = Some(out.clone());
    emit(&cfg, &table)?;
    let data_name = out
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| out.display().to_string());
    let script = gnuplot_script(cfg.mode, &data_name, &table);
    let script_path = out.with_extension("gnuplot");
    write_file(&script_path, &script)?;
    Ok(())
}

/// The trace command.
pub fn run_trace(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let table = trace_table(config)?;
    emit(config, &table)
}

/// The sweep command (either quantity).
pub fn run_sweep(config: &RunConfig) -> Result<(), CliError> {
    config.validate()?;
    let table = match config.mode {
        Mode::SweepTE => sweep_te_table(config)?,
        Mode::SweepEmax => sweep_emax_table(config)?,
        other => return Err(usage(format!("not a sweep mode: {}", other.name()))),
    };
    emit(config, &table)
}
