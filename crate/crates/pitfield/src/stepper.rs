//! Explicit forward-Euler time integration of the coupled (φ, c) system,
//! in local (five-point) and nonlocal (horizon-sum) variants.
//!
//! Both updates are simultaneous (Jacobi-style): the right-hand sides read
//! only step-`n` values, the pit clamp is applied last, and a blow-up check
//! runs on every produced state. The concentration update is in conservative
//! (operator-of-potential) form, so total mass Σc·h² is preserved to
//! round-off by the nonlocal scheme and by the mirror-ghost local scheme.

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid2D, NeighborTable, PitMask};
use crate::kernel::KernelSpec;
use crate::material::MaterialParams;
use crate::operators::{apply_local_laplacian, apply_nonlocal};

/// Spatial discretization choice for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Five-point Laplacian with mirror-ghost Neumann boundaries.
    Local,
    /// Horizon-sum nonlocal operator with truncated neighborhoods.
    Nonlocal,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Local => "local",
            Scheme::Nonlocal => "nonlocal",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "local" => Ok(Scheme::Local),
            "nonlocal" => Ok(Scheme::Nonlocal),
            other => Err(Error::config(format!(
                "scheme must be \"local\" or \"nonlocal\", got \"{other}\""
            ))),
        }
    }
}

/// Simulation state at one time level.
#[derive(Debug, Clone)]
pub struct State {
    pub phi: Field,
    pub c: Field,
    pub t: f64,
    pub step_index: u64,
}

impl State {
    pub fn new(phi: Field, c: Field) -> State {
        State { phi, c, t: 0.0, step_index: 0 }
    }

    pub fn uniform(grid: &Grid2D, phi: f64, c: f64) -> State {
        State::new(Field::constant(grid, phi), Field::constant(grid, c))
    }
}

/// Linearized diffusivities and the resulting explicit step bound.
#[derive(Debug, Clone, Copy)]
pub struct CflBound {
    /// `D_φ = L·α_φ`.
    pub d_phi: f64,
    /// `D_c = 2A·M` (slope of ∂f/∂c in c times the mobility).
    pub d_c: f64,
    /// `max(D_φ, D_c)`.
    pub d_lin: f64,
    pub dt_max: f64,
}

/// Harmonic number `H_m = Σ_{j=1}^m 1/j`.
pub fn harmonic(m: u32) -> f64 {
    (1..=m).map(|j| 1.0 / j as f64).sum()
}

/// Nonlocal CFL relaxation factor `α(m) = m²/(4·H_m)`.
///
/// `α(1) = 1/4` recovers the classical five-point bound; the factor grows
/// roughly like `m²/ln m`, reflecting that the nonlocal operator's spectral
/// radius scales with `K·h²·(neighbor count)` rather than `1/h²`.
///
/// ```
/// use pitfield::stepper::alpha_m;
/// assert_eq!(alpha_m(1), 0.25);
/// assert!((alpha_m(2) - 2.0 / 3.0).abs() < 1e-15);
/// assert!((alpha_m(3) - 27.0 / 22.0).abs() < 1e-15);
/// ```
pub fn alpha_m(m: u32) -> f64 {
    let mf = m as f64;
    mf * mf / (4.0 * harmonic(m))
}

/// Largest admissible explicit step for the given scheme and spacing.
pub fn cfl_dt(params: &MaterialParams, h: f64, scheme: Scheme, m: u32) -> Result<CflBound> {
    let d_phi = params.l_mob * params.alpha_phi;
    let d_c = 2.0 * params.a * params.m_mob;
    let d_lin = d_phi.max(d_c);
    if !(d_lin > 0.0) {
        return Err(Error::config(format!(
            "CFL bound requires a positive linearized diffusivity, got D_lin = {d_lin}"
        )));
    }
    let dt_max = match scheme {
        Scheme::Local => h * h / (4.0 * d_lin),
        Scheme::Nonlocal => {
            if m < 1 {
                return Err(Error::config(
                    "nonlocal CFL needs a horizon ratio m >= 1".to_string(),
                ));
            }
            alpha_m(m) * h * h / d_lin
        }
    };
    Ok(CflBound { d_phi, d_c, d_lin, dt_max })
}

fn check_blowup(phi: &Field, c: &Field, step_index: u64) -> Result<()> {
    // Fields are O(1) in healthy runs; ten times out of range is unambiguous
    // divergence, and non-finite values are always fatal.
    for (name, f) in [("phi", phi), ("c", c)] {
        for &v in &f.values {
            if !v.is_finite() || v.abs() > 10.0 {
                return Err(Error::BlowUp {
                    step: step_index,
                    reason: format!("field {name} reached {v}"),
                });
            }
        }
    }
    Ok(())
}

/// One forward-Euler step of the local scheme:
/// `φ ← φ − Δt·L·(∂_φf − α_φ·Δφ)`, `c ← c + Δt·M·Δ(∂_cf)`, then pit clamp.
pub fn step_local(
    state: &State,
    params: &MaterialParams,
    grid: &Grid2D,
    dt: f64,
    pit: &PitMask,
) -> Result<State> {
    let lap_phi = apply_local_laplacian(&state.phi, grid);
    let mut mu = Field::zeros(grid);
    for ((m, &p), &c) in mu.values.iter_mut().zip(&state.phi.values).zip(&state.c.values) {
        *m = params.df_dc(p, c);
    }
    let lap_mu = apply_local_laplacian(&mu, grid);

    let mut phi_new = state.phi.clone();
    for ((p, &lp), &c) in phi_new.values.iter_mut().zip(&lap_phi.values).zip(&state.c.values) {
        *p -= dt * params.l_mob * (params.df_dphi(*p, c) - params.alpha_phi * lp);
    }
    let mut c_new = state.c.clone();
    for (c, &lm) in c_new.values.iter_mut().zip(&lap_mu.values) {
        *c += dt * params.m_mob * lm;
    }

    pit.apply_clamp(&mut phi_new, 0.0);
    pit.apply_clamp(&mut c_new, 0.0);
    let step_index = state.step_index + 1;
    check_blowup(&phi_new, &c_new, step_index)?;
    Ok(State {
        phi: phi_new,
        c: c_new,
        t: step_index as f64 * dt,
        step_index,
    })
}

/// One forward-Euler step of the nonlocal scheme:
/// `φ ← φ − Δt·L·(∂_φf + α_φ·𝓛φ)`, `c ← c − Δt·M·𝓛(∂_cf)`, then pit clamp.
///
/// The signs differ from [`step_local`] because the horizon operator plays
/// the role of `−Δ`.
pub fn step_nonlocal(
    state: &State,
    params: &MaterialParams,
    grid: &Grid2D,
    table: &NeighborTable,
    dt: f64,
    pit: &PitMask,
) -> Result<State> {
    let lphi = apply_nonlocal(&state.phi, table);
    let mut mu = Field::zeros(grid);
    for ((m, &p), &c) in mu.values.iter_mut().zip(&state.phi.values).zip(&state.c.values) {
        *m = params.df_dc(p, c);
    }
    let lmu = apply_nonlocal(&mu, table);

    let mut phi_new = state.phi.clone();
    for ((p, &lp), &c) in phi_new.values.iter_mut().zip(&lphi.values).zip(&state.c.values) {
        *p -= dt * params.l_mob * (params.df_dphi(*p, c) + params.alpha_phi * lp);
    }
    let mut c_new = state.c.clone();
    for (c, &lm) in c_new.values.iter_mut().zip(&lmu.values) {
        *c -= dt * params.m_mob * lm;
    }

    pit.apply_clamp(&mut phi_new, 0.0);
    pit.apply_clamp(&mut c_new, 0.0);
    let step_index = state.step_index + 1;
    check_blowup(&phi_new, &c_new, step_index)?;
    Ok(State {
        phi: phi_new,
        c: c_new,
        t: step_index as f64 * dt,
        step_index,
    })
}

/// Full time-integration configuration for [`run`].
#[derive(Debug, Clone)]
pub struct StepConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub n_steps: u64,
    /// Diagnostics/snapshot cadence in steps; 0 means "every 10% of the run".
    pub snapshot_every: u64,
    pub pit: Option<PitMask>,
    /// Required for [`Scheme::Nonlocal`], ignored for local runs.
    pub kernel: Option<KernelSpec>,
}

impl StepConfig {
    fn cadence(&self) -> u64 {
        if self.snapshot_every > 0 {
            self.snapshot_every
        } else {
            (self.n_steps / 10).max(1)
        }
    }
}

/// Advance `n_steps` from `initial`, recording diagnostics and invoking
/// `observer` (snapshot hook) at the cadence, at step 0, and at the final
/// step. On blow-up the last healthy state is handed to the observer before
/// the error propagates, so the failure leaves inspectable output behind.
pub fn run(
    config: &StepConfig,
    initial: State,
    params: &MaterialParams,
    grid: &Grid2D,
    mut observer: impl FnMut(&State) -> Result<()>,
) -> Result<(State, Vec<DiagnosticsRecord>)> {
    let table = match config.scheme {
        Scheme::Local => None,
        Scheme::Nonlocal => {
            let kernel = config.kernel.as_ref().ok_or_else(|| {
                Error::config("nonlocal runs need a kernel (horizon delta)".to_string())
            })?;
            Some(NeighborTable::build(grid, kernel)?)
        }
    };
    let no_pit;
    let pit = match &config.pit {
        Some(p) => p,
        None => {
            no_pit = PitMask::none(grid);
            &no_pit
        }
    };
    let cadence = config.cadence();

    let mut records = Vec::new();
    let mut record = |state: &State, observer: &mut dyn FnMut(&State) -> Result<()>| -> Result<()> {
        records_push(&mut records, state, params, grid, table.as_ref());
        observer(state)
    };

    let mut state = initial;
    record(&state, &mut observer)?;
    for k in 1..=config.n_steps {
        let next = match config.scheme {
            Scheme::Local => step_local(&state, params, grid, config.dt, pit),
            Scheme::Nonlocal => {
                step_nonlocal(&state, params, grid, table.as_ref().unwrap(), config.dt, pit)
            }
        };
        match next {
            Ok(s) => state = s,
            Err(e) => {
                // Flush the last healthy state so the output directory holds
                // something inspectable, then report the blow-up itself.
                let _ = observer(&state);
                return Err(e);
            }
        }
        if k % cadence == 0 || k == config.n_steps {
            record(&state, &mut observer)?;
        }
    }
    Ok((state, records))
}

fn records_push(
    records: &mut Vec<DiagnosticsRecord>,
    state: &State,
    params: &MaterialParams,
    grid: &Grid2D,
    table: Option<&NeighborTable>,
) {
    let energy = match table {
        Some(t) => diagnostics::discrete_energy(&state.phi, &state.c, params, grid, Some(t)),
        None => diagnostics::local_discrete_energy(&state.phi, &state.c, params, grid),
    };
    records.push(DiagnosticsRecord {
        step: state.step_index,
        t: state.t,
        energy,
        mass_c: diagnostics::total_mass(&state.c, grid),
        min_phi: state.phi.min(),
        max_phi: state.phi.max(),
        min_c: state.c.min(),
        max_c: state.c.max(),
    });
}
