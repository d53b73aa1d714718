//! Run configuration: a flat dotted-key format shared by config files and
//! command-line flags.
//!
//! One registry lists every key with its default; a config file (`key =
//! value` lines), dotted long flags (`--grid.h 0.5`), repeatable `--set
//! key=value` pairs, and a handful of per-mode short aliases (`--h`, `--m`,
//! `--dt`, ...) all feed the same table. Precedence is defaults < file <
//! command line; setting one key twice on the command line is an error
//! rather than a silent override. Unknown keys are hard errors — typos never
//! pass silently. The fully resolved config is echoed to
//! `{out}/config.resolved` in a canonical form that parses back to the
//! identical configuration.

use std::collections::BTreeMap;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::material::MaterialParams;
use crate::stepper::{self, Scheme};

/// One configuration key: name, default (None = no default, possibly
/// required by some modes), and help text.
pub struct KeySpec {
    pub key: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

/// Every key the tool understands, in canonical (echo) order.
pub const REGISTRY: &[KeySpec] = &[
    KeySpec { key: "mode", default: Some("simulate"), help: "simulate | study | consistency | cfl-report" },
    KeySpec { key: "grid.lx", default: Some("50"), help: "domain extent along x" },
    KeySpec { key: "grid.ly", default: Some("50"), help: "domain extent along y" },
    KeySpec { key: "grid.h", default: None, help: "grid spacing (required for simulate and cfl-report)" },
    KeySpec { key: "grid.origin_x", default: Some("0"), help: "x coordinate of the first node" },
    KeySpec { key: "grid.origin_y", default: Some("0"), help: "y coordinate of the first node" },
    KeySpec { key: "pit.center_x", default: Some("25"), help: "pit center x" },
    KeySpec { key: "pit.center_y", default: Some("25"), help: "pit center y" },
    KeySpec { key: "pit.radius", default: Some("2"), help: "pit radius, or \"none\" to disable the pit" },
    KeySpec { key: "material.a", default: Some("25.7211"), help: "free-energy curvature A" },
    KeySpec { key: "material.omega", default: Some("1"), help: "double-well height" },
    KeySpec { key: "material.c_l", default: Some("0.0357"), help: "dilute equilibrium concentration" },
    KeySpec { key: "material.l", default: Some("0.23529"), help: "phase-field mobility L" },
    KeySpec { key: "material.m", default: Some("1.945"), help: "concentration mobility M" },
    KeySpec { key: "material.alpha_phi", default: Some("7.2115e-7"), help: "interface coefficient" },
    KeySpec { key: "material.alpha_c", default: Some("0"), help: "concentration regularization (must be 0; the term is not implemented)" },
    KeySpec { key: "scheme", default: Some("nonlocal"), help: "local | nonlocal" },
    KeySpec { key: "nonlocal.m", default: Some("3"), help: "horizon ratio delta/h for simulate and cfl-report" },
    KeySpec { key: "time.dt", default: Some("1e-4"), help: "time step" },
    KeySpec { key: "time.t_final", default: Some("15"), help: "end time for simulate" },
    KeySpec { key: "time.allow_unstable_dt", default: Some("false"), help: "run even when dt exceeds the CFL bound" },
    KeySpec { key: "output.dir", default: Some("out"), help: "output directory" },
    KeySpec { key: "output.snapshot_every", default: Some("0"), help: "snapshot cadence in steps; 0 = every 10% of the run" },
    KeySpec { key: "seed", default: Some("0"), help: "seed for randomized initial data helpers" },
    KeySpec { key: "study.h_list", default: Some("2,1,0.5"), help: "comma-separated spacings for the convergence study" },
    KeySpec { key: "study.m", default: Some("3"), help: "horizon ratio for the study (delta = m*h per row)" },
    KeySpec { key: "study.t_final", default: Some("1.5"), help: "end time for the study" },
    KeySpec { key: "consistency.field", default: Some("sinsin"), help: "analytic field: sinsin | quadratic | linear" },
    KeySpec { key: "consistency.deltas", default: Some("4,2,1"), help: "comma-separated horizons for the consistency test" },
    KeySpec { key: "consistency.m", default: Some("4"), help: "horizon ratio for the consistency test (h = delta/m)" },
];

fn key_spec(key: &str) -> Option<&'static KeySpec> {
    REGISTRY.iter().find(|s| s.key == key)
}

/// What the tool should do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Study,
    Consistency,
    CflReport,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Simulate => "simulate",
            Mode::Study => "study",
            Mode::Consistency => "consistency",
            Mode::CflReport => "cfl-report",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "study" => Ok(Mode::Study),
            "consistency" => Ok(Mode::Consistency),
            "cfl-report" => Ok(Mode::CflReport),
            other => Err(Error::config(format!(
                "mode must be simulate, study, consistency or cfl-report, got \"{other}\""
            ))),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub grid_lx: f64,
    pub grid_ly: f64,
    /// No default: simulate and cfl-report refuse to guess a resolution.
    pub grid_h: Option<f64>,
    pub origin: (f64, f64),
    pub pit_center: (f64, f64),
    /// `None` means the pit is disabled.
    pub pit_radius: Option<f64>,
    pub material: MaterialParams,
    pub scheme: Scheme,
    pub nonlocal_m: u32,
    pub dt: f64,
    pub t_final: f64,
    pub allow_unstable_dt: bool,
    pub out_dir: String,
    pub snapshot_every: u64,
    pub seed: u64,
    pub study_h_list: Vec<f64>,
    pub study_m: u32,
    pub study_t_final: f64,
    pub consistency_field: String,
    pub consistency_deltas: Vec<f64>,
    pub consistency_m: u32,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::config(format!("key {key}: expected a number, got \"{v}\"")))
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::config(format!("key {key}: value must be finite, got \"{v}\"")))
            }
        })
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>()
        .map_err(|_| Error::config(format!("key {key}: expected a nonnegative integer, got \"{v}\"")))
}

fn parse_u32(key: &str, v: &str) -> Result<u32> {
    v.parse::<u32>()
        .map_err(|_| Error::config(format!("key {key}: expected a nonnegative integer, got \"{v}\"")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(format!("key {key}: expected true or false, got \"{v}\""))),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::config(format!("key {key}: empty entry in list \"{v}\"")));
        }
        out.push(parse_f64(key, part)?);
    }
    Ok(out)
}

impl RunConfig {
    /// Resolve a full key/value table (defaults already merged in) into a
    /// typed, validated configuration.
    fn from_table(table: &BTreeMap<&str, String>) -> Result<RunConfig> {
        let get = |key: &str| -> Option<&String> { table.get(key) };
        let req = |key: &'static str| -> Result<&String> {
            get(key).ok_or_else(|| {
                let help = key_spec(key).map(|s| s.help).unwrap_or("");
                Error::config(format!("missing required key {key} ({help})"))
            })
        };

        let mode: Mode = req("mode")?.parse()?;
        let grid_lx = parse_f64("grid.lx", req("grid.lx")?)?;
        let grid_ly = parse_f64("grid.ly", req("grid.ly")?)?;
        let grid_h = match get("grid.h") {
            Some(v) => Some(parse_f64("grid.h", v)?),
            None => None,
        };
        let origin = (
            parse_f64("grid.origin_x", req("grid.origin_x")?)?,
            parse_f64("grid.origin_y", req("grid.origin_y")?)?,
        );
        let pit_center = (
            parse_f64("pit.center_x", req("pit.center_x")?)?,
            parse_f64("pit.center_y", req("pit.center_y")?)?,
        );
        let pit_radius = match req("pit.radius")?.as_str() {
            "none" => None,
            v => {
                let r = parse_f64("pit.radius", v)?;
                if r < 0.0 {
                    return Err(Error::config(format!(
                        "key pit.radius: must be nonnegative or \"none\", got {r}"
                    )));
                }
                Some(r)
            }
        };
        let material = MaterialParams {
            a: parse_f64("material.a", req("material.a")?)?,
            omega: parse_f64("material.omega", req("material.omega")?)?,
            c_l: parse_f64("material.c_l", req("material.c_l")?)?,
            l_mob: parse_f64("material.l", req("material.l")?)?,
            m_mob: parse_f64("material.m", req("material.m")?)?,
            alpha_phi: parse_f64("material.alpha_phi", req("material.alpha_phi")?)?,
            alpha_c: parse_f64("material.alpha_c", req("material.alpha_c")?)?,
        };
        if material.alpha_c != 0.0 {
            return Err(Error::config(format!(
                "key material.alpha_c: the concentration regularization term is not \
                 implemented; only 0 is accepted, got {}",
                material.alpha_c
            )));
        }
        let scheme: Scheme = req("scheme")?.parse()?;
        let nonlocal_m = parse_u32("nonlocal.m", req("nonlocal.m")?)?;
        let dt = parse_f64("time.dt", req("time.dt")?)?;
        let t_final = parse_f64("time.t_final", req("time.t_final")?)?;
        let allow_unstable_dt =
            parse_bool("time.allow_unstable_dt", req("time.allow_unstable_dt")?)?;
        let out_dir = req("output.dir")?.clone();
        let snapshot_every = parse_u64("output.snapshot_every", req("output.snapshot_every")?)?;
        let seed = parse_u64("seed", req("seed")?)?;
        let study_h_list = parse_list("study.h_list", req("study.h_list")?)?;
        let study_m = parse_u32("study.m", req("study.m")?)?;
        let study_t_final = parse_f64("study.t_final", req("study.t_final")?)?;
        let consistency_field = req("consistency.field")?.clone();
        let consistency_deltas = parse_list("consistency.deltas", req("consistency.deltas")?)?;
        let consistency_m = parse_u32("consistency.m", req("consistency.m")?)?;

        let cfg = RunConfig {
            mode,
            grid_lx,
            grid_ly,
            grid_h,
            origin,
            pit_center,
            pit_radius,
            material,
            scheme,
            nonlocal_m,
            dt,
            t_final,
            allow_unstable_dt,
            out_dir,
            snapshot_every,
            seed,
            study_h_list,
            study_m,
            study_t_final,
            consistency_field,
            consistency_deltas,
            consistency_m,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.grid_lx > 0.0) || !(self.grid_ly > 0.0) {
            return Err(Error::config(format!(
                "keys grid.lx/grid.ly: extents must be positive, got {} x {}",
                self.grid_lx, self.grid_ly
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config(format!("key time.dt: must be positive, got {}", self.dt)));
        }
        if self.t_final < 0.0 || self.study_t_final < 0.0 {
            return Err(Error::config("end times must be nonnegative".to_string()));
        }
        if self.nonlocal_m < 1 {
            return Err(Error::config("key nonlocal.m: horizon ratio must be >= 1".to_string()));
        }
        if self.study_m < 1 {
            return Err(Error::config("key study.m: horizon ratio must be >= 1".to_string()));
        }
        if self.consistency_m < 1 {
            return Err(Error::config("key consistency.m: horizon ratio must be >= 1".to_string()));
        }
        if crate::fields::analytic_field(&self.consistency_field, 1.0, 1.0).is_none() {
            return Err(Error::config(format!(
                "key consistency.field: unknown analytic field \"{}\" (expected sinsin, quadratic or linear)",
                self.consistency_field
            )));
        }
        if self.study_h_list.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::config("key study.h_list: spacings must be positive".to_string()));
        }
        if self.consistency_deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::config(
                "key consistency.deltas: horizons must be positive".to_string(),
            ));
        }

        // modes that integrate in time on a concrete grid need grid.h, a
        // valid grid, and an admissible step
        match self.mode {
            Mode::Simulate | Mode::CflReport => {
                let h = self.grid_h.ok_or_else(|| {
                    Error::config(format!(
                        "missing required key grid.h (grid spacing) for mode {}",
                        self.mode
                    ))
                })?;
                // surfaces the divisibility / positivity errors early
                crate::grid::Grid2D::build(self.grid_lx, self.grid_ly, h, self.origin)?;
                if self.mode == Mode::Simulate {
                    let bound = stepper::cfl_dt(&self.material, h, self.scheme, self.nonlocal_m)?;
                    if self.dt > bound.dt_max && !self.allow_unstable_dt {
                        return Err(Error::config(format!(
                            "time.dt = {} exceeds the {} CFL bound: D_phi = {}, D_c = {}, \
                             D_lin = {}, dt_max = {}. Reduce time.dt or set \
                             time.allow_unstable_dt = true (--allow-unstable-dt) to proceed anyway.",
                            fmt_f64(self.dt),
                            self.scheme,
                            fmt_f64(bound.d_phi),
                            fmt_f64(bound.d_c),
                            fmt_f64(bound.d_lin),
                            fmt_f64(bound.dt_max),
                        )));
                    }
                }
            }
            Mode::Study | Mode::Consistency => {}
        }
        Ok(())
    }

    /// Canonical key/value pairs in registry order. Keys without a value
    /// (unset `grid.h`) are omitted.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let num = fmt_f64;
        out.push(("mode", self.mode.to_string()));
        out.push(("grid.lx", num(self.grid_lx)));
        out.push(("grid.ly", num(self.grid_ly)));
        if let Some(h) = self.grid_h {
            out.push(("grid.h", num(h)));
        }
        out.push(("grid.origin_x", num(self.origin.0)));
        out.push(("grid.origin_y", num(self.origin.1)));
        out.push(("pit.center_x", num(self.pit_center.0)));
        out.push(("pit.center_y", num(self.pit_center.1)));
        out.push((
            "pit.radius",
            match self.pit_radius {
                Some(r) => num(r),
                None => "none".to_string(),
            },
        ));
        out.push(("material.a", num(self.material.a)));
        out.push(("material.omega", num(self.material.omega)));
        out.push(("material.c_l", num(self.material.c_l)));
        out.push(("material.l", num(self.material.l_mob)));
        out.push(("material.m", num(self.material.m_mob)));
        out.push(("material.alpha_phi", num(self.material.alpha_phi)));
        out.push(("material.alpha_c", num(self.material.alpha_c)));
        out.push(("scheme", self.scheme.to_string()));
        out.push(("nonlocal.m", self.nonlocal_m.to_string()));
        out.push(("time.dt", num(self.dt)));
        out.push(("time.t_final", num(self.t_final)));
        out.push(("time.allow_unstable_dt", self.allow_unstable_dt.to_string()));
        out.push(("output.dir", self.out_dir.clone()));
        out.push(("output.snapshot_every", self.snapshot_every.to_string()));
        out.push(("seed", self.seed.to_string()));
        out.push((
            "study.h_list",
            self.study_h_list.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","),
        ));
        out.push(("study.m", self.study_m.to_string()));
        out.push(("study.t_final", num(self.study_t_final)));
        out.push(("consistency.field", self.consistency_field.clone()));
        out.push((
            "consistency.deltas",
            self.consistency_deltas.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","),
        ));
        out.push(("consistency.m", self.consistency_m.to_string()));
        out
    }

    /// The text written to `{out}/config.resolved`; parsing it back yields
    /// an identical configuration.
    pub fn resolved_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }
}

/// Parse `key = value` text (comments with `#`, blank lines allowed) into
/// ordered pairs. Duplicate keys are rejected — a config file with two
/// values for one key is almost certainly an editing accident.
pub fn parse_config_text(text: &str, source: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::config(format!(
                "{source}:{}: expected \"key = value\", got \"{line}\"",
                lineno + 1
            )));
        };
        let key = k.trim().to_string();
        let value = v.trim().to_string();
        if key.is_empty() {
            return Err(Error::config(format!("{source}:{}: empty key", lineno + 1)));
        }
        if pairs.iter().any(|(existing, _)| *existing == key) {
            return Err(Error::config(format!(
                "{source}:{}: duplicate key {key}",
                lineno + 1
            )));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

/// Resolve an ordered list of `(key, value)` overrides against the defaults.
pub fn resolve_pairs(pairs: &[(String, String)]) -> Result<RunConfig> {
    let mut table: BTreeMap<&str, String> = BTreeMap::new();
    for spec in REGISTRY {
        if let Some(d) = spec.default {
            table.insert(spec.key, d.to_string());
        }
    }
    for (k, v) in pairs {
        let spec = key_spec(k).ok_or_else(|| {
            Error::config(format!("unknown configuration key \"{k}\""))
        })?;
        table.insert(spec.key, v.clone());
    }
    RunConfig::from_table(&table)
}

/// Convenience: parse a config file and resolve it with no overrides.
pub fn load_config_file(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let pairs = parse_config_text(&text, &path.display().to_string())?;
    resolve_pairs(&pairs)
}

/// Build the command-line interface. Every registry key is a dotted long
/// flag; the aliases are ergonomic shorthands whose meaning follows the
/// selected mode (`--m` is the horizon ratio of whichever mode runs).
pub fn build_cli() -> Command {
    let mut cmd = Command::new("pitfield")
        .about(
            "Nonlocal phase-field simulation of pitting corrosion \
             (horizon-based operators with a local finite-difference twin)",
        )
        .disable_version_flag(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("config file with key = value lines"),
        )
        .arg(
            Arg::new("set")
                .long("set")
                .value_name("KEY=VALUE")
                .action(ArgAction::Append)
                .help("set any configuration key (repeatable)"),
        )
        .arg(
            Arg::new("allow-unstable-dt")
                .long("allow-unstable-dt")
                .action(ArgAction::SetTrue)
                .help("shorthand for time.allow_unstable_dt = true"),
        );
    for spec in REGISTRY {
        cmd = cmd.arg(
            Arg::new(spec.key)
                .long(spec.key)
                .value_name("VALUE")
                .help(spec.help),
        );
    }
    for (alias, help) in [
        ("h", "alias for grid.h"),
        ("m", "alias for the active mode's horizon ratio"),
        ("dt", "alias for time.dt"),
        ("t-final", "alias for time.t_final (study mode: study.t_final)"),
        ("h-list", "alias for study.h_list"),
        ("deltas", "alias for consistency.deltas"),
        ("field", "alias for consistency.field"),
        ("out", "alias for output.dir"),
    ] {
        cmd = cmd.arg(Arg::new(alias).long(alias).value_name("VALUE").help(help));
    }
    cmd
}

/// Merge file + command line into a resolved config.
pub fn resolve_matches(matches: &ArgMatches) -> Result<RunConfig> {
    let file_pairs = match matches.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::config(format!("cannot read config file {path}: {e}"))
            })?;
            parse_config_text(&text, path)?
        }
        None => Vec::new(),
    };
    // unknown keys in the file must fail even before merging
    for (k, _) in &file_pairs {
        if key_spec(k).is_none() {
            return Err(Error::config(format!("unknown configuration key \"{k}\"")));
        }
    }

    // mode decides what the short aliases mean; command line wins over file
    let mode_str = matches
        .get_one::<String>("mode")
        .cloned()
        .or_else(|| file_pairs.iter().find(|(k, _)| k == "mode").map(|(_, v)| v.clone()))
        .unwrap_or_else(|| "simulate".to_string());
    let mode: Mode = mode_str.parse()?;

    let mut cli_pairs: Vec<(String, String)> = Vec::new();
    let mut push_cli = |key: &str, value: String| -> Result<()> {
        if cli_pairs.iter().any(|(k, _)| k == key) {
            return Err(Error::config(format!(
                "key {key} is set more than once on the command line"
            )));
        }
        cli_pairs.push((key.to_string(), value));
        Ok(())
    };
    for spec in REGISTRY {
        if let Some(v) = matches.get_one::<String>(spec.key) {
            push_cli(spec.key, v.clone())?;
        }
    }
    let alias_target = |alias: &str| -> &'static str {
        match (alias, mode) {
            ("h", _) => "grid.h",
            ("m", Mode::Study) => "study.m",
            ("m", Mode::Consistency) => "consistency.m",
            ("m", _) => "nonlocal.m",
            ("dt", _) => "time.dt",
            ("t-final", Mode::Study) => "study.t_final",
            ("t-final", _) => "time.t_final",
            ("h-list", _) => "study.h_list",
            ("deltas", _) => "consistency.deltas",
            ("field", _) => "consistency.field",
            ("out", _) => "output.dir",
            _ => unreachable!("unmapped alias {alias}"),
        }
    };
    for alias in ["h", "m", "dt", "t-final", "h-list", "deltas", "field", "out"] {
        if let Some(v) = matches.get_one::<String>(alias) {
            push_cli(alias_target(alias), v.clone())?;
        }
    }
    if let Some(vals) = matches.get_many::<String>("set") {
        for kv in vals {
            let Some((k, v)) = kv.split_once('=') else {
                return Err(Error::config(format!(
                    "--set expects KEY=VALUE, got \"{kv}\""
                )));
            };
            let key = k.trim();
            if key_spec(key).is_none() {
                return Err(Error::config(format!("unknown configuration key \"{key}\"")));
            }
            push_cli(key, v.trim().to_string())?;
        }
    }
    if matches.get_flag("allow-unstable-dt") {
        push_cli("time.allow_unstable_dt", "true".to_string())?;
    }

    let mut pairs = file_pairs;
    // command line overrides the file: replace rather than duplicate
    for (k, v) in cli_pairs {
        if let Some(slot) = pairs.iter_mut().find(|(pk, _)| *pk == k) {
            slot.1 = v;
        } else {
            pairs.push((k, v));
        }
    }
    resolve_pairs(&pairs)
}
