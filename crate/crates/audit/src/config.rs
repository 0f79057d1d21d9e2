//! Scenario configuration files.
//!
//! A configuration is a flat UTF-8 document of `key = value` lines grouped in
//! the sections `[background]`, `[surface]`, `[flow]` and `[audit]`. Several
//! scenarios may share one file, each introduced by a `[scenario NAME]`
//! header; sections that precede every header form a scenario named
//! `default`. Lines starting with `#` or `;` are comments.
//!
//! ```text
//! [scenario torus-monotonicity]
//! [background]
//! k = 0
//! m = 0.5
//! [surface]
//! resolution = 64
//! radius = 3
//! amplitude = 0.1
//! profile = sin
//! modes = 1 0
//! [flow]
//! t_end = 3
//! [audit]
//! checks = flow_completed, area_growth, q_monotone, q_limit
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use kottler_core::base_surface::Resolution;
use kottler_core::kottler::{horizon_radius, mass_from_radius};
use kottler_core::{FlowControls, FlowMethod};

use crate::checks::CheckKind;

pub const DEFAULT_RESOLUTION: usize = 64;

/// A configuration error, with the offending line when one is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    fn general(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundSpec {
    pub curvature_sign: i32,
    pub genus: u32,
    pub mass: f64,
    pub horizon_radius: f64,
    /// Whether the horizon radius was given, in which case the mass is derived.
    pub radius_given: bool,
    pub surface_gravity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSpec {
    pub resolution: Resolution,
    pub radius: f64,
    pub amplitude: f64,
    pub profile: Profile,
    /// Wave numbers; the sphere uses only the first (polar) one.
    pub modes: [u32; 2],
}

impl SurfaceSpec {
    pub fn is_slice(&self) -> bool {
        self.amplitude == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditSpec {
    pub checks: Vec<CheckKind>,
    pub tolerances: BTreeMap<CheckKind, f64>,
    /// Start of the window used by the asymptotic rate fits.
    pub fit_t_min: f64,
    pub residual_points: usize,
    pub ch_radii: Vec<f64>,
    pub detector_eps: f64,
    pub seed: u64,
    pub trace_file: String,
    pub report_file: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub background: BackgroundSpec,
    pub surface: SurfaceSpec,
    pub flow: FlowControls,
    pub audit: AuditSpec,
}

impl ScenarioConfig {
    /// Derived background quantities, one line each.
    pub fn validation_log(&self) -> Vec<String> {
        let b = &self.background;
        let (given, derived) = if b.radius_given {
            (format!("rho_m = {}", b.horizon_radius), format!("m = {}", b.mass))
        } else {
            (format!("m = {}", b.mass), format!("rho_m = {}", b.horizon_radius))
        };
        vec![
            format!("scenario {}: k = {}, genus = {}, {given}", self.name, b.curvature_sign, b.genus),
            format!("derived {derived}, kappa = {}", b.surface_gravity),
        ]
    }

    pub fn tolerance(&self, check: CheckKind) -> f64 {
        self.audit
            .tolerances
            .get(&check)
            .copied()
            .unwrap_or_else(|| check.default_tolerance(self.surface.is_slice()))
    }
}

#[derive(Debug, Default)]
struct RawScenario {
    name: String,
    header_line: usize,
    sections: HashMap<String, HashMap<String, (String, usize)>>,
}

const SECTIONS: [&str; 4] = ["background", "surface", "flow", "audit"];

fn tokenize(text: &str) -> Result<Vec<RawScenario>, ConfigError> {
    let mut scenarios: Vec<RawScenario> = Vec::new();
    let mut section: Option<String> = None;
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, format!("malformed section header '{line}'")))?
                .trim();
            if let Some(name) = header.strip_prefix("scenario") {
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(ConfigError::at(line_no, "scenario header needs a single-word name"));
                }
                if scenarios.iter().any(|s| s.name == name) {
                    return Err(ConfigError::at(line_no, format!("duplicate scenario '{name}'")));
                }
                scenarios.push(RawScenario { name: name.to_string(), header_line: line_no, ..Default::default() });
                section = None;
            } else if SECTIONS.contains(&header) {
                if scenarios.is_empty() {
                    scenarios.push(RawScenario { name: "default".into(), header_line: line_no, ..Default::default() });
                }
                let current = scenarios.last_mut().expect("a scenario exists");
                if current.sections.contains_key(header) {
                    return Err(ConfigError::at(line_no, format!("duplicate section [{header}]")));
                }
                current.sections.insert(header.to_string(), HashMap::new());
                section = Some(header.to_string());
            } else {
                return Err(ConfigError::at(line_no, format!("unknown section [{header}]")));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = &section else {
            return Err(ConfigError::at(line_no, format!("key '{key}' outside of a section")));
        };
        let entries = scenarios
            .last_mut()
            .and_then(|s| s.sections.get_mut(section))
            .expect("section was opened");
        if entries.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
            return Err(ConfigError::at(line_no, format!("duplicate key '{key}' in [{section}]")));
        }
    }
    if scenarios.is_empty() {
        return Err(ConfigError::general("configuration defines no scenario"));
    }
    Ok(scenarios)
}

/// Typed access to one section; remembers which keys were consumed.
struct Section<'a> {
    name: &'static str,
    entries: Option<&'a HashMap<String, (String, usize)>>,
    fallback_line: usize,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<(&'a str, usize)> {
        self.entries.and_then(|e| e.get(key)).map(|(v, l)| (v.as_str(), *l))
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map_or(self.fallback_line, |(_, l)| l)
    }

    fn reject_unknown(&self, allowed: &[&str], prefixes: &[&str]) -> Result<(), ConfigError> {
        let Some(entries) = self.entries else { return Ok(()) };
        let mut unknown: Vec<_> = entries
            .iter()
            .filter(|(k, _)| !allowed.contains(&k.as_str()) && !prefixes.iter().any(|p| k.starts_with(p)))
            .map(|(k, (_, l))| (*l, k))
            .collect();
        unknown.sort();
        match unknown.first() {
            Some((line, key)) => Err(ConfigError::at(*line, format!("unknown key '{key}' in [{}]", self.name))),
            None => Ok(()),
        }
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((value, line)) => value
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::at(line, format!("invalid value '{value}' for '{key}'"))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.parse::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(ConfigError::at(self.line(key), format!("'{key}' must be finite"))),
            other => Ok(other),
        }
    }
}

fn section<'a>(raw: &'a RawScenario, name: &'static str) -> Section<'a> {
    Section { name, entries: raw.sections.get(name), fallback_line: raw.header_line }
}

fn parse_background(s: &Section) -> Result<BackgroundSpec, ConfigError> {
    s.reject_unknown(&["k", "genus", "m", "rho_m"], &[])?;
    let k = s
        .parse::<i32>("k")?
        .ok_or_else(|| ConfigError::at(s.fallback_line, "[background] needs 'k'"))?;
    let genus = match (s.parse::<u32>("genus")?, k) {
        (Some(g), _) => g,
        (None, 1) => 0,
        (None, 0) => 1,
        (None, -1) => 2,
        (None, other) => return Err(ConfigError::at(s.line("k"), format!("k must be -1, 0 or 1, got {other}"))),
    };
    let compatible = matches!((k, genus), (1, 0) | (0, 1)) || (k == -1 && genus >= 2);
    if !compatible {
        return Err(ConfigError::at(s.line("genus"), format!("genus {genus} is incompatible with k = {k}")));
    }
    let (mass, radius, radius_given) = match (s.float("m")?, s.float("rho_m")?) {
        (Some(m), None) => {
            let r = horizon_radius(k, m).map_err(|e| ConfigError::at(s.line("m"), e.to_string()))?;
            (m, r, false)
        }
        (None, Some(r)) => {
            let m = mass_from_radius(k, r).map_err(|e| ConfigError::at(s.line("rho_m"), e.to_string()))?;
            let critical = kottler_core::kottler::critical_mass(k);
            if m <= critical {
                return Err(ConfigError::at(
                    s.line("rho_m"),
                    format!("rho_m = {r} gives mass {m}, at or below the critical mass {critical}"),
                ));
            }
            (m, r, true)
        }
        _ => return Err(ConfigError::at(s.fallback_line, "exactly one of 'm' and 'rho_m' must be given")),
    };
    Ok(BackgroundSpec {
        curvature_sign: k,
        genus,
        mass,
        horizon_radius: radius,
        radius_given,
        surface_gravity: kottler_core::kottler::surface_gravity_from_radius(k, radius),
    })
}

fn parse_surface(s: &Section, background: &BackgroundSpec) -> Result<SurfaceSpec, ConfigError> {
    s.reject_unknown(&["resolution", "radius", "amplitude", "profile", "modes"], &[])?;
    let resolution = match s.get("resolution") {
        Some(("point", _)) => Resolution::Point,
        Some(_) => Resolution::Nodes(s.parse::<usize>("resolution")?.expect("present")),
        None if background.curvature_sign == -1 => Resolution::Point,
        None => Resolution::Nodes(DEFAULT_RESOLUTION),
    };
    if background.curvature_sign == -1 && resolution != Resolution::Point {
        return Err(ConfigError::at(s.line("resolution"), "hyperbolic bases support only 'resolution = point'"));
    }
    if let Resolution::Nodes(n) = resolution {
        if n < kottler_core::base_surface::MIN_RESOLUTION {
            return Err(ConfigError::at(
                s.line("resolution"),
                format!("resolution must be at least {}", kottler_core::base_surface::MIN_RESOLUTION),
            ));
        }
    }
    let radius = s
        .float("radius")?
        .ok_or_else(|| ConfigError::at(s.fallback_line, "[surface] needs 'radius'"))?;
    if !(radius > background.horizon_radius) {
        return Err(ConfigError::at(
            s.line("radius"),
            format!("radius {radius} must exceed rho_m = {}", background.horizon_radius),
        ));
    }
    let amplitude = s.float("amplitude")?.unwrap_or(0.0);
    if amplitude < 0.0 {
        return Err(ConfigError::at(s.line("amplitude"), "amplitude must be nonnegative"));
    }
    if amplitude >= radius - background.horizon_radius {
        return Err(ConfigError::at(
            s.line("amplitude"),
            format!(
                "invariant amplitude < radius - rho_m violated: {amplitude} >= {}",
                radius - background.horizon_radius
            ),
        ));
    }
    if amplitude > 0.0 && resolution == Resolution::Point {
        return Err(ConfigError::at(s.line("amplitude"), "a perturbed surface needs a resolved grid"));
    }
    let profile = match s.get("profile") {
        None | Some(("cos", _)) => Profile::Cos,
        Some(("sin", _)) => Profile::Sin,
        Some((other, line)) => return Err(ConfigError::at(line, format!("profile must be sin or cos, got '{other}'"))),
    };
    if profile == Profile::Sin && background.curvature_sign == 1 && amplitude > 0.0 {
        return Err(ConfigError::at(s.line("profile"), "sphere perturbations must be even in the colatitude (profile = cos)"));
    }
    let modes = match s.get("modes") {
        None => [1, 0],
        Some((value, line)) => {
            let parsed: Result<Vec<u32>, _> = value.split_whitespace().map(str::parse).collect();
            match parsed.as_deref() {
                Ok([a]) => [*a, 0],
                Ok([a, b]) => [*a, *b],
                _ => return Err(ConfigError::at(line, format!("modes must be one or two integers, got '{value}'"))),
            }
        }
    };
    Ok(SurfaceSpec { resolution, radius, amplitude, profile, modes })
}

fn parse_flow(s: &Section) -> Result<FlowControls, ConfigError> {
    s.reject_unknown(
        &["t_end", "sample_interval", "cfl", "max_dt", "h_floor", "align_floor", "method", "snapshots"],
        &[],
    )?;
    let d = FlowControls::default();
    let positive = |key: &str, default: f64| -> Result<f64, ConfigError> {
        let v = s.float(key)?.unwrap_or(default);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(ConfigError::at(s.line(key), format!("invariant {key} > 0 violated: {v}")))
        }
    };
    let method = match s.get("method") {
        None | Some(("auto", _)) => FlowMethod::Auto,
        Some(("ode", _)) => FlowMethod::Ode,
        Some(("pde", _)) => FlowMethod::Pde,
        Some((other, line)) => {
            return Err(ConfigError::at(line, format!("method must be auto, ode or pde, got '{other}'")))
        }
    };
    Ok(FlowControls {
        t_end: positive("t_end", d.t_end)?,
        sample_interval: positive("sample_interval", d.sample_interval)?,
        cfl: positive("cfl", d.cfl)?,
        max_dt: positive("max_dt", d.max_dt)?,
        h_floor: s.float("h_floor")?.unwrap_or(d.h_floor),
        align_floor: s.float("align_floor")?.unwrap_or(d.align_floor),
        method,
        snapshots: s.parse::<bool>("snapshots")?.unwrap_or(d.snapshots),
    })
}

fn parse_audit(
    s: &Section,
    name: &str,
    background: &BackgroundSpec,
    surface: &SurfaceSpec,
    flow: &FlowControls,
) -> Result<AuditSpec, ConfigError> {
    s.reject_unknown(
        &["checks", "fit_t_min", "residual_points", "ch_radii", "detector_eps", "seed", "trace", "report"],
        &["tolerance."],
    )?;
    let checks = match s.get("checks") {
        None => CheckKind::default_set(background.curvature_sign, surface.is_slice()),
        Some((value, line)) => {
            let mut checks = Vec::new();
            for token in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let check = CheckKind::from_name(token)
                    .ok_or_else(|| ConfigError::at(line, format!("unknown check '{token}'")))?;
                if checks.contains(&check) {
                    return Err(ConfigError::at(line, format!("check '{token}' listed twice")));
                }
                if let Err(reason) = check.applicable(background.curvature_sign, surface.is_slice()) {
                    return Err(ConfigError::at(line, format!("check '{token}' {reason}")));
                }
                checks.push(check);
            }
            checks
        }
    };
    let mut tolerances = BTreeMap::new();
    if let Some(entries) = s.entries {
        for (key, (value, line)) in entries {
            if let Some(check_name) = key.strip_prefix("tolerance.") {
                let check = CheckKind::from_name(check_name)
                    .ok_or_else(|| ConfigError::at(*line, format!("unknown check '{check_name}'")))?;
                let tol: f64 = value
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| ConfigError::at(*line, format!("invalid tolerance '{value}'")))?;
                tolerances.insert(check, tol);
            }
        }
    }
    let fit_t_min = s.float("fit_t_min")?.unwrap_or(1.0);
    let fits = checks.iter().any(|c| matches!(c, CheckKind::AlignmentRate | CheckKind::MeanCurvatureProfile));
    if (fits || s.get("fit_t_min").is_some()) && !(0.0..flow.t_end).contains(&fit_t_min) {
        return Err(ConfigError::at(s.line("fit_t_min"), "fit_t_min must lie in [0, t_end)"));
    }
    let ch_radii = match s.get("ch_radii") {
        None => vec![10.0, 20.0, 40.0, 80.0],
        Some((value, line)) => {
            let radii: Vec<f64> = value
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| ConfigError::at(line, format!("invalid radius list '{value}'")))?;
            if radii.len() < 4 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= background.horizon_radius {
                return Err(ConfigError::at(
                    line,
                    "ch_radii needs at least four increasing radii outside the horizon",
                ));
            }
            radii
        }
    };
    Ok(AuditSpec {
        checks,
        tolerances,
        fit_t_min,
        residual_points: s.parse("residual_points")?.unwrap_or(100),
        ch_radii,
        detector_eps: s.float("detector_eps")?.unwrap_or(1e-3),
        seed: s.parse("seed")?.unwrap_or(0),
        trace_file: s.get("trace").map_or_else(|| format!("{name}.csv"), |(v, _)| v.to_string()),
        report_file: s.get("report").map_or_else(|| format!("{name}.json"), |(v, _)| v.to_string()),
    })
}

fn build(raw: &RawScenario) -> Result<ScenarioConfig, ConfigError> {
    let bg_section = section(raw, "background");
    if bg_section.entries.is_none() {
        return Err(ConfigError::at(raw.header_line, format!("scenario '{}' has no [background]", raw.name)));
    }
    let background = parse_background(&bg_section)?;
    let surface_section = section(raw, "surface");
    if surface_section.entries.is_none() {
        return Err(ConfigError::at(raw.header_line, format!("scenario '{}' has no [surface]", raw.name)));
    }
    let surface = parse_surface(&surface_section, &background)?;
    let flow = parse_flow(&section(raw, "flow"))?;
    if flow.method == FlowMethod::Ode && !surface.is_slice() {
        return Err(ConfigError::at(section(raw, "flow").line("method"), "the ode method needs a slice"));
    }
    let audit = parse_audit(&section(raw, "audit"), &raw.name, &background, &surface, &flow)?;
    Ok(ScenarioConfig { name: raw.name.clone(), background, surface, flow, audit })
}

/// Parses every scenario of a configuration document.
pub fn parse_configs(text: &str) -> Result<Vec<ScenarioConfig>, ConfigError> {
    tokenize(text)?.iter().map(build).collect()
}

/// Parses a document holding exactly one scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut all = parse_configs(text)?;
    if all.len() != 1 {
        return Err(ConfigError::general(format!("expected one scenario, found {}", all.len())));
    }
    Ok(all.remove(0))
}
