//! Discrete free energy, mass, error norms, the operator-consistency rate
//! harness, and the local-vs-nonlocal convergence study driver.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid2D, NeighborTable, PitMask};
use crate::kernel::make_tophat_kernel;
use crate::material::MaterialParams;
use crate::operators::apply_nonlocal;
use crate::stepper::{self, Scheme, StepConfig};

/// One row of the diagnostics time series (the `diagnostics.csv` schema).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub energy: f64,
    pub mass_c: f64,
    pub min_phi: f64,
    pub max_phi: f64,
    pub min_c: f64,
    pub max_c: f64,
}

/// Pair seminorm `S(u) = Σ_nodes Σ_neighbors K·[u(x) − u(y)]²·h⁴`.
///
/// Ordered pairs — every unordered pair is counted twice — mirroring the
/// continuum double integral whose ¼ prefactor the energy keeps verbatim.
fn pair_seminorm(u: &Field, table: &NeighborTable) -> f64 {
    let (nx, ny) = (u.nx, u.ny);
    let vals = &u.values[..];
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let u0 = vals[j * nx + i];
            for &(di, dj) in &table.offsets {
                let ii = i as i64 + di;
                let jj = j as i64 + dj;
                if ii >= 0 && ii < nx as i64 && jj >= 0 && jj < ny as i64 {
                    let d = u0 - vals[jj as usize * nx + ii as usize];
                    acc += d * d;
                }
            }
        }
    }
    // K·h⁴ = pair_weight·h²
    acc * table.pair_weight * table.h * table.h
}

/// Nonlocal discrete free energy
/// `F = Σ f(φ,c)·h² + (α_φ/4)·S(φ) + (α_c/4)·S(c)`.
///
/// The table may be omitted only when both seminorm coefficients vanish.
/// Zero exactly at the uniform equilibria, positive otherwise.
pub fn discrete_energy(
    phi: &Field,
    c: &Field,
    params: &MaterialParams,
    grid: &Grid2D,
    table: Option<&NeighborTable>,
) -> f64 {
    let h2 = grid.cell_area();
    let mut bulk = 0.0;
    for (&p, &cc) in phi.values.iter().zip(&c.values) {
        bulk += params.f_density(p, cc);
    }
    let mut energy = bulk * h2;
    if params.alpha_phi != 0.0 || params.alpha_c != 0.0 {
        let t = table.expect("discrete_energy needs a neighbor table when alpha_phi or alpha_c is nonzero");
        if params.alpha_phi != 0.0 {
            energy += params.alpha_phi / 4.0 * pair_seminorm(phi, t);
        }
        if params.alpha_c != 0.0 {
            energy += params.alpha_c / 4.0 * pair_seminorm(c, t);
        }
    }
    energy
}

/// Local counterpart of [`discrete_energy`]:
/// `Σ f·h² + (α_φ/2)·Σ|∇ₕφ|²·h² (+ the same for c)`, with forward-difference
/// gradients over interior edges. Used for the energy column of local-scheme
/// diagnostics, where no horizon seminorm exists.
pub fn local_discrete_energy(
    phi: &Field,
    c: &Field,
    params: &MaterialParams,
    grid: &Grid2D,
) -> f64 {
    let h2 = grid.cell_area();
    let mut bulk = 0.0;
    for (&p, &cc) in phi.values.iter().zip(&c.values) {
        bulk += params.f_density(p, cc);
    }
    // Σ |∇ₕu|² h² with one-sided differences = plain sum of squared
    // neighbor differences (the h² of the quadrature cancels the 1/h² of
    // the difference quotient).
    let grad2 = |u: &Field| -> f64 {
        let (nx, ny) = (u.nx, u.ny);
        let mut acc = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let u0 = u.values[j * nx + i];
                if i + 1 < nx {
                    let d = u.values[j * nx + i + 1] - u0;
                    acc += d * d;
                }
                if j + 1 < ny {
                    let d = u.values[(j + 1) * nx + i] - u0;
                    acc += d * d;
                }
            }
        }
        acc
    };
    let mut energy = bulk * h2;
    if params.alpha_phi != 0.0 {
        energy += params.alpha_phi / 2.0 * grad2(phi);
    }
    if params.alpha_c != 0.0 {
        energy += params.alpha_c / 2.0 * grad2(c);
    }
    energy
}

/// Total concentration mass `Σ c·h²` (one-point node quadrature).
pub fn total_mass(c: &Field, grid: &Grid2D) -> f64 {
    let sum: f64 = c.values.iter().sum();
    sum * grid.cell_area()
}

/// Relative L² difference in percent: `100·‖a − b‖₂ / ‖a‖₂` over all nodes.
///
/// ```
/// use pitfield::grid::{Grid2D, Field};
/// use pitfield::diagnostics::relative_l2_error;
/// let g = Grid2D::build(4.0, 4.0, 1.0, (0.0, 0.0)).unwrap();
/// let a = Field::constant(&g, 1.0);
/// let b = Field::constant(&g, 0.99);
/// assert!((relative_l2_error(&a, &b).unwrap() - 1.0).abs() < 1e-12);
/// ```
pub fn relative_l2_error(a: &Field, b: &Field) -> Result<f64> {
    assert_eq!(
        (a.nx, a.ny),
        (b.nx, b.ny),
        "relative_l2_error on fields from different grids"
    );
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in a.values.iter().zip(&b.values) {
        num += (x - y) * (x - y);
        den += x * x;
    }
    if den == 0.0 {
        return Err(Error::config(
            "relative L2 error undefined: reference field is identically zero".to_string(),
        ));
    }
    Ok(100.0 * (num / den).sqrt())
}

/// Least-squares slope of `log y` vs `log x`. `None` when fewer than two
/// points remain or any value is non-positive (log undefined).
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys.iter()).any(|&v| v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// One horizon's worth of consistency measurement.
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyRow {
    pub delta: f64,
    pub h: f64,
    /// Interior max-norm of `𝓛_h u − (−Δu)`.
    pub max_error: f64,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    /// Fitted log-log rate of error vs δ; absent when errors hit exact zero
    /// (e.g. linear fields) or only one δ was given.
    pub fitted_rate: Option<f64>,
}

/// Measure how fast the discrete horizon operator approaches `−Δ` as δ → 0
/// at fixed horizon ratio `m` (so `h = δ/m` refines alongside).
///
/// The comparison runs in the max norm over nodes strictly farther than δ
/// from the boundary, where the neighborhood is untruncated; the boundary
/// layer is a separate O(1) effect and is deliberately excluded.
pub fn operator_consistency_rate(
    u: impl Fn(f64, f64) -> f64,
    minus_laplacian: impl Fn(f64, f64) -> f64,
    lx: f64,
    ly: f64,
    deltas: &[f64],
    fixed_m: u32,
) -> Result<ConsistencyReport> {
    if deltas.is_empty() {
        return Err(Error::config("consistency test needs at least one delta".to_string()));
    }
    if fixed_m < 1 {
        return Err(Error::config("consistency test needs m >= 1".to_string()));
    }
    let mut rows = Vec::new();
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(Error::config(format!("deltas must be positive, got {delta}")));
        }
        let h = delta / fixed_m as f64;
        let grid = Grid2D::build(lx, ly, h, (0.0, 0.0))?;
        let kernel = make_tophat_kernel(delta, 2)?;
        let table = NeighborTable::build(&grid, &kernel)?;
        let sampled = Field::from_fn(&grid, &u);
        let lu = apply_nonlocal(&sampled, &table);
        let mut max_error = 0.0_f64;
        let mut interior_seen = false;
        for j in 0..grid.ny {
            let y = grid.y(j);
            if !(y - grid.origin.1 > delta && grid.origin.1 + ly - y > delta) {
                continue;
            }
            for i in 0..grid.nx {
                let x = grid.x(i);
                if !(x - grid.origin.0 > delta && grid.origin.0 + lx - x > delta) {
                    continue;
                }
                interior_seen = true;
                max_error = max_error.max((lu.at(i, j) - minus_laplacian(x, y)).abs());
            }
        }
        if !interior_seen {
            return Err(Error::config(format!(
                "no interior nodes more than delta = {delta} away from the boundary"
            )));
        }
        rows.push(ConsistencyRow { delta, h, max_error });
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.max_error).collect();
    let fitted_rate = fit_loglog_slope(&ds, &es);
    Ok(ConsistencyReport { rows, fitted_rate })
}

/// One matched local/nonlocal pair of the convergence study.
#[derive(Debug, Clone, Copy)]
pub struct StudyRow {
    pub h: f64,
    pub delta: f64,
    pub m: u32,
    pub rel_l2_error_percent: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Sorted by delta descending.
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of log error vs log δ; absent for single-row
    /// studies.
    pub fitted_slope: Option<f64>,
}

/// Geometry and protocol of a convergence study.
#[derive(Debug, Clone)]
pub struct StudySetup {
    pub lx: f64,
    pub ly: f64,
    pub origin: (f64, f64),
    pub pit_center: (f64, f64),
    /// `None` disables the pit (not the benchmark protocol, but allowed).
    pub pit_radius: Option<f64>,
    pub h_list: Vec<f64>,
    /// Horizon ratio; each row runs the nonlocal scheme at δ = m·h.
    pub m: u32,
    pub t_final: f64,
    pub dt: f64,
    pub allow_unstable_dt: bool,
}

/// Run the local and nonlocal schemes side by side from the pit initial
/// condition for each `h`, and report the relative L² difference of φ at
/// `t_final` as a function of δ = m·h.
///
/// `progress` fires after each completed row (hook for CLI status output).
pub fn convergence_study(
    setup: &StudySetup,
    params: &MaterialParams,
    mut progress: impl FnMut(&StudyRow),
) -> Result<ConvergenceReport> {
    if setup.h_list.is_empty() {
        return Err(Error::config("study.h_list must contain at least one h".to_string()));
    }
    if setup.m < 1 {
        return Err(Error::config("study horizon ratio m must be >= 1".to_string()));
    }
    if !(setup.dt > 0.0) || !(setup.t_final >= 0.0) {
        return Err(Error::config(format!(
            "study needs dt > 0 and t_final >= 0, got dt = {}, t_final = {}",
            setup.dt, setup.t_final
        )));
    }
    let n_steps = (setup.t_final / setup.dt).round() as u64;
    let mut rows = Vec::new();
    for &h in &setup.h_list {
        let start = Instant::now();
        let grid = Grid2D::build(setup.lx, setup.ly, h, setup.origin)?;
        let delta = setup.m as f64 * h;
        // refuse silently unstable protocols up front
        for scheme in [Scheme::Local, Scheme::Nonlocal] {
            let bound = stepper::cfl_dt(params, h, scheme, setup.m)?;
            if setup.dt > bound.dt_max && !setup.allow_unstable_dt {
                return Err(Error::config(format!(
                    "study dt = {} exceeds the {scheme} CFL bound {} at h = {h}; \
                     set allow_unstable_dt to override",
                    setup.dt, bound.dt_max
                )));
            }
        }
        let pit = match setup.pit_radius {
            Some(r) => PitMask::build(&grid, setup.pit_center, r)?,
            None => PitMask::none(&grid),
        };
        let initial = crate::fields::pit_initial_state(&grid, &pit);
        let kernel = make_tophat_kernel(delta, 2)?;

        let local_cfg = StepConfig {
            scheme: Scheme::Local,
            dt: setup.dt,
            n_steps,
            snapshot_every: n_steps.max(1),
            pit: Some(pit.clone()),
            kernel: None,
        };
        let (local_final, _) =
            stepper::run(&local_cfg, initial.clone(), params, &grid, |_| Ok(()))?;

        let nonlocal_cfg = StepConfig {
            scheme: Scheme::Nonlocal,
            dt: setup.dt,
            n_steps,
            snapshot_every: n_steps.max(1),
            pit: Some(pit.clone()),
            kernel: Some(kernel),
        };
        let (nonlocal_final, _) =
            stepper::run(&nonlocal_cfg, initial, params, &grid, |_| Ok(()))?;

        let err = relative_l2_error(&local_final.phi, &nonlocal_final.phi)?;
        let row = StudyRow {
            h,
            delta,
            m: setup.m,
            rel_l2_error_percent: err,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        progress(&row);
        rows.push(row);
    }
    rows.sort_by(|a, b| b.delta.partial_cmp(&a.delta).unwrap());
    let ds: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let es: Vec<f64> = rows.iter().map(|r| r.rel_l2_error_percent).collect();
    let fitted_slope = fit_loglog_slope(&ds, &es);
    Ok(ConvergenceReport { rows, fitted_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PitMask;

    fn grid51() -> Grid2D {
        Grid2D::build(50.0, 50.0, 1.0, (0.0, 0.0)).unwrap()
    }

    #[test]
    fn uniform_energy_is_bulk_times_area_sum() {
        // Constant fields have no pair energy; the bulk term is one-point
        // node quadrature, i.e. f · h² · (number of nodes).
        let g = grid51();
        let p = MaterialParams::default();
        let k = make_tophat_kernel(3.0, 2).unwrap();
        let t = NeighborTable::build(&g, &k).unwrap();
        let phi = Field::constant(&g, 0.5);
        let c = Field::constant(&g, 0.5);
        let e = discrete_energy(&phi, &c, &p, &g, Some(&t));
        let expect = 2601.0 * p.f_density(0.5, 0.5);
        assert!((e - expect).abs() <= 1e-12 * expect, "{e} vs {expect}");
        // Dilute equilibrium: exactly zero. Solid equilibrium: f(1,1) carries
        // the rounding residue of 1 - (1 - c_L) - c_L (~6e-32 per node, see
        // material::f_density), so the grid total is ~1.6e-28, not bitwise 0.
        let phi = Field::constant(&g, 0.0);
        let c = Field::constant(&g, p.c_l);
        assert_eq!(discrete_energy(&phi, &c, &p, &g, Some(&t)), 0.0);
        assert_eq!(local_discrete_energy(&phi, &c, &p, &g), 0.0);
        let phi = Field::constant(&g, 1.0);
        let c = Field::constant(&g, 1.0);
        assert!(discrete_energy(&phi, &c, &p, &g, Some(&t)) < 1e-27);
        assert!(local_discrete_energy(&phi, &c, &p, &g) < 1e-27);
    }

    #[test]
    fn spike_pair_energy() {
        // Interior unit spike with δ = h: 4 unordered pairs, double-counted,
        // so S = 8·K·h⁴ and the seminorm term is (α_φ/4)·S.
        let g = grid51();
        let mut p = MaterialParams::default();
        p.a = 0.0; // isolate the pair term
        p.omega = 0.0;
        let k = make_tophat_kernel(1.0, 2).unwrap();
        let t = NeighborTable::build(&g, &k).unwrap();
        let mut phi = Field::zeros(&g);
        phi.set(20, 20, 1.0);
        let c = Field::zeros(&g);
        let e = discrete_energy(&phi, &c, &p, &g, Some(&t));
        let expect = p.alpha_phi / 4.0 * 8.0 * k.c_delta;
        assert!((e - expect).abs() <= 1e-15, "{e} vs {expect}");
    }

    #[test]
    fn mass_examples() {
        let g = grid51();
        assert_eq!(total_mass(&Field::constant(&g, 1.0), &g), 2601.0);
        assert_eq!(total_mass(&Field::zeros(&g), &g), 0.0);
        let pit = PitMask::build(&g, (25.0, 25.0), 2.0).unwrap();
        let state = crate::fields::pit_initial_state(&g, &pit);
        assert_eq!(total_mass(&state.c, &g), 2588.0); // 2601 − 13 pit nodes
    }

    #[test]
    fn rel_l2_error_cases() {
        let g = grid51();
        let a = Field::constant(&g, 1.0);
        assert_eq!(relative_l2_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.set(10, 10, 0.0);
        let n = g.n_nodes() as f64;
        let got = relative_l2_error(&a, &b).unwrap();
        assert!((got - 100.0 / n.sqrt()).abs() < 1e-12);
        assert!(relative_l2_error(&Field::zeros(&g), &a).is_err());
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [4.0_f64, 2.0, 1.0, 0.5];
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(1.35)).collect();
        let s = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((s - 1.35).abs() < 1e-12);
        assert_eq!(fit_loglog_slope(&xs[..1], &ys[..1]), None);
        assert_eq!(fit_loglog_slope(&[1.0, 2.0], &[0.0, 1.0]), None);
    }

    #[test]
    fn linear_fields_have_zero_consistency_error() {
        let report = operator_consistency_rate(
            |x, y| 0.3 * x + 0.7 * y + 1.0,
            |_, _| 0.0,
            50.0,
            50.0,
            &[4.0, 2.0],
            2,
        )
        .unwrap();
        // The operator annihilates affine fields up to rounding in the pairwise
        // cancellation, so the errors are not exact zeros -- just far below any
        // meaningful scale. The fitted rate may or may not exist depending on
        // whether the noise floor happens to be zero; don't assert on it.
        for row in &report.rows {
            assert!(row.max_error <= 1e-12, "delta {}: {}", row.delta, row.max_error);
        }
    }

    #[test]
    fn oversized_delta_is_rejected() {
        let err = operator_consistency_rate(
            |x, _| x,
            |_, _| 0.0,
            50.0,
            50.0,
            &[25.0],
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("interior"));
    }
}
