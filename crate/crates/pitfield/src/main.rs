//! Command-line entry point: configuration ingestion, run orchestration,
//! and result emission.

use std::path::PathBuf;

use pitfield::config::{self, Mode, RunConfig};
use pitfield::diagnostics::{self, StudySetup};
use pitfield::error::{Error, Result};
use pitfield::fields;
use pitfield::grid::{Grid2D, PitMask};
use pitfield::io::{self, fmt_f64};
use pitfield::kernel::make_tophat_kernel;
use pitfield::stepper::{self, Scheme, StepConfig};

fn main() {
    if let Err(e) = real_main() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn real_main() -> Result<()> {
    let matches = match config::build_cli().try_get_matches_from(std::env::args()) {
        Ok(m) => m,
        Err(e) if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Error::config(e.to_string())),
    };
    let cfg = config::resolve_matches(&matches)?;
    match cfg.mode {
        Mode::Simulate => with_out_dir(&cfg, run_simulate),
        Mode::Study => with_out_dir(&cfg, run_study),
        Mode::Consistency => run_consistency(&cfg),
        Mode::CflReport => run_cfl_report(&cfg),
    }
}

/// Create the output directory, echo the resolved config into it, run `body`,
/// and leave an `error.log` behind if the run fails. The config echo happens
/// first, so even a failed run leaves an inspectable directory.
fn with_out_dir(cfg: &RunConfig, body: fn(&RunConfig, &PathBuf) -> Result<()>) -> Result<()> {
    let mut dir = PathBuf::from(&cfg.out_dir);
    if dir.is_relative() {
        if let Some(root) = std::env::var_os("PITFIELD_OUT_ROOT") {
            dir = PathBuf::from(root).join(dir);
        }
    }
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
    let result = body(cfg, &dir);
    if let Err(e) = &result {
        let _ = io::write_error_log(&dir, &e.to_string());
    }
    result
}

fn steps_for(t_final: f64, dt: f64) -> Result<u64> {
    let n = (t_final / dt).round();
    if !n.is_finite() || n < 0.0 || n > 1e12 {
        return Err(Error::config(format!(
            "time.t_final / time.dt = {n} is not a usable step count"
        )));
    }
    Ok(n as u64)
}

fn run_simulate(cfg: &RunConfig, dir: &PathBuf) -> Result<()> {
    let h = cfg.grid_h.expect("validated: simulate requires grid.h");
    let grid = Grid2D::build(cfg.grid_lx, cfg.grid_ly, h, cfg.origin)?;
    let pit = match cfg.pit_radius {
        Some(r) => PitMask::build(&grid, cfg.pit_center, r)?,
        None => PitMask::none(&grid),
    };
    let n_steps = steps_for(cfg.t_final, cfg.dt)?;
    let bound = stepper::cfl_dt(&cfg.material, h, cfg.scheme, cfg.nonlocal_m)?;
    if cfg.dt > bound.dt_max {
        // config validation only lets this through with the override set
        eprintln!(
            "WARNING: time.dt = {} exceeds the {} CFL bound dt_max = {}; \
             proceeding because time.allow_unstable_dt is set",
            fmt_f64(cfg.dt),
            cfg.scheme,
            fmt_f64(bound.dt_max)
        );
    }
    let kernel = match cfg.scheme {
        Scheme::Nonlocal => Some(make_tophat_kernel(cfg.nonlocal_m as f64 * h, 2)?),
        Scheme::Local => None,
    };
    let step_cfg = StepConfig {
        scheme: cfg.scheme,
        dt: cfg.dt,
        n_steps,
        snapshot_every: cfg.snapshot_every,
        pit: Some(pit.clone()),
        kernel,
    };
    let initial = fields::pit_initial_state(&grid, &pit);
    let mut snapshots = 0u64;
    let (final_state, records) = stepper::run(&step_cfg, initial, &cfg.material, &grid, |state| {
        io::write_field_csv(&dir.join(io::snapshot_name("phi", state.step_index)), &state.phi)?;
        io::write_field_csv(&dir.join(io::snapshot_name("c", state.step_index)), &state.c)?;
        snapshots += 1;
        Ok(())
    })?;
    io::write_diagnostics_csv(&dir.join("diagnostics.csv"), &records)?;
    let last = records.last().expect("run always produces at least one record");
    println!(
        "{} scheme finished: {} steps to t = {}",
        cfg.scheme,
        final_state.step_index,
        fmt_f64(final_state.t)
    );
    println!(
        "energy = {}  mass_c = {}  phi in [{}, {}]  c in [{}, {}]",
        fmt_f64(last.energy),
        fmt_f64(last.mass_c),
        fmt_f64(last.min_phi),
        fmt_f64(last.max_phi),
        fmt_f64(last.min_c),
        fmt_f64(last.max_c)
    );
    println!("wrote {snapshots} snapshot pairs and diagnostics.csv to {}", dir.display());
    Ok(())
}

fn run_study(cfg: &RunConfig, dir: &PathBuf) -> Result<()> {
    let setup = StudySetup {
        lx: cfg.grid_lx,
        ly: cfg.grid_ly,
        origin: cfg.origin,
        pit_center: cfg.pit_center,
        pit_radius: cfg.pit_radius,
        h_list: cfg.study_h_list.clone(),
        m: cfg.study_m,
        t_final: cfg.study_t_final,
        dt: cfg.dt,
        allow_unstable_dt: cfg.allow_unstable_dt,
    };
    let report = diagnostics::convergence_study(&setup, &cfg.material, |row| {
        eprintln!(
            "study row done: h = {}, delta = {}, rel_l2 = {} %  ({:.1} s)",
            row.h, row.delta, row.rel_l2_error_percent, row.wall_time_s
        );
    })?;
    io::write_report_csv(&dir.join("report.csv"), &report)?;
    for row in &report.rows {
        println!(
            "h = {}  delta = {}  rel_l2_error = {} %",
            fmt_f64(row.h),
            fmt_f64(row.delta),
            fmt_f64(row.rel_l2_error_percent)
        );
    }
    match report.fitted_slope {
        Some(s) => println!("fitted_slope = {}", fmt_f64(s)),
        None => println!("fitted_slope = none (needs at least two rows)"),
    }
    println!("wrote report.csv to {}", dir.display());
    Ok(())
}

fn run_consistency(cfg: &RunConfig) -> Result<()> {
    let field = fields::analytic_field(&cfg.consistency_field, cfg.grid_lx, cfg.grid_ly)
        .expect("validated: known analytic field");
    let report = diagnostics::operator_consistency_rate(
        field.u,
        field.minus_laplacian,
        cfg.grid_lx,
        cfg.grid_ly,
        &cfg.consistency_deltas,
        cfg.consistency_m,
    )?;
    println!("field = {}, m = {}", field.name, cfg.consistency_m);
    for row in &report.rows {
        println!(
            "delta = {}  h = {}  max_interior_error = {}",
            fmt_f64(row.delta),
            fmt_f64(row.h),
            fmt_f64(row.max_error)
        );
    }
    match report.fitted_rate {
        Some(r) => println!("fitted_rate = {}", fmt_f64(r)),
        None => println!("fitted_rate = undefined (exact zeros or a single delta)"),
    }
    Ok(())
}

fn run_cfl_report(cfg: &RunConfig) -> Result<()> {
    let h = cfg.grid_h.expect("validated: cfl-report requires grid.h");
    let local = stepper::cfl_dt(&cfg.material, h, Scheme::Local, 1)?;
    let nonlocal = stepper::cfl_dt(&cfg.material, h, Scheme::Nonlocal, cfg.nonlocal_m)?;
    println!("h = {}", fmt_f64(h));
    println!("D_phi = {}", fmt_f64(local.d_phi));
    println!("D_c = {}", fmt_f64(local.d_c));
    println!("D_lin = {}", fmt_f64(local.d_lin));
    println!("dt_max(local) = {}", fmt_f64(local.dt_max));
    println!(
        "dt_max(nonlocal, m={}) = {}",
        cfg.nonlocal_m,
        fmt_f64(nonlocal.dt_max)
    );
    println!("alpha(m) table (nonlocal dt_max = alpha * h^2 / D_lin):");
    for m in 1..=8u32 {
        let alpha = stepper::alpha_m(m);
        println!(
            "  m={m}  alpha={}  dt_max={}",
            fmt_f64(alpha),
            fmt_f64(alpha * h * h / local.d_lin)
        );
    }
    Ok(())
}
