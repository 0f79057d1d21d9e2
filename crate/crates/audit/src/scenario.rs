//! Scenario execution: builds the background and initial surface, runs the
//! flow, and evaluates the selected checks.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use kottler_core::base_surface::{make_base, Grid};
use kottler_core::flow::{asymptotic_rate_fit, run_flow, DecayModel, FlowTrace, TraceColumn};
use kottler_core::functionals::{
    areal_minkowski_deficit, asymptotic_limit_targets, hk_gap, horizon_area_lower_bound_gap, minkowski_deficit,
    reverse_penrose_deficit, surface_gravity_bound_deficit,
};
use kottler_core::kottler::{
    ch_mass_extrapolated, exterior_sample_points, mass_upper_bound, radius_bounds, static_residual,
    surface_gravity_from_radius, PerturbedPotential,
};
use kottler_core::{Error, GraphSurface, HorizonData, KottlerBackground};

use crate::checks::{Check, CheckKind, Relation};
use crate::config::{Profile, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Multiplies every check tolerance.
    pub tolerance_scale: f64,
    /// When false, checks that need the flow are skipped.
    pub with_flow: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tolerance_scale: 1.0, with_flow: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub method: String,
    pub steps: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub scenario: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSummary>,
    pub checks: Vec<Check>,
}

impl AuditResult {
    pub fn new(scenario: impl Into<String>, checks: Vec<Check>, abort: Option<String>) -> Self {
        let passed = abort.is_none() && checks.iter().all(|c| c.passed);
        AuditResult { scenario: scenario.into(), passed, abort, flow: None, checks }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 when every check passes, 1 on a failed check, 3 on a numerical abort.
    pub fn exit_code(&self) -> i32 {
        if self.abort.is_some() || self.checks.iter().any(|c| c.error.is_some()) {
            3
        } else if self.passed {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub trace: Option<FlowTrace>,
    pub audit: AuditResult,
}

pub fn build_background(config: &ScenarioConfig) -> Result<Arc<KottlerBackground>, Error> {
    let b = &config.background;
    let base = make_base(b.curvature_sign, b.genus, config.surface.resolution)?;
    let background = if b.radius_given {
        KottlerBackground::from_horizon_radius(base, b.horizon_radius)?
    } else {
        KottlerBackground::from_mass(base, b.mass)?
    };
    Ok(background.into_shared())
}

pub fn initial_surface(config: &ScenarioConfig, background: Arc<KottlerBackground>) -> Result<GraphSurface, Error> {
    let s = config.surface;
    if s.is_slice() {
        return GraphSurface::slice(background, s.radius);
    }
    let wave = move |phase: f64| match s.profile {
        Profile::Sin => phase.sin(),
        Profile::Cos => phase.cos(),
    };
    match *background.base().grid() {
        Grid::Torus { side, .. } => GraphSurface::from_fn(background, move |x, y| {
            s.radius + s.amplitude * wave(2.0 * PI * (s.modes[0] as f64 * x + s.modes[1] as f64 * y) / side)
        }),
        _ => GraphSurface::from_fn(background, move |theta, _| s.radius + s.amplitude * wave(s.modes[0] as f64 * theta)),
    }
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    scale: f64,
    background: &'a KottlerBackground,
    horizons: [HorizonData; 1],
    surfaces: Vec<GraphSurface>,
    trace: Option<&'a FlowTrace>,
}

impl Context<'_> {
    fn tol(&self, kind: CheckKind) -> f64 {
        self.config.tolerance(kind) * self.scale
    }

    fn max_over_surfaces(&self, f: impl Fn(&GraphSurface) -> kottler_core::Result<f64>) -> kottler_core::Result<f64> {
        self.surfaces.iter().try_fold(f64::NEG_INFINITY, |acc, s| Ok(acc.max(f(s)?)))
    }

    fn evaluate(&self, kind: CheckKind) -> Check {
        let tol = self.tol(kind);
        let result = if kind.needs_flow() {
            match self.trace {
                Some(trace) => self.flow_check(kind, trace, tol),
                None => Err(Error::InvalidParameter("no flow trace".into())),
            }
        } else {
            self.static_check(kind, tol)
        };
        result.unwrap_or_else(|e| Check::failed(kind, e.to_string(), tol))
    }

    fn flow_check(&self, kind: CheckKind, trace: &FlowTrace, tol: f64) -> kottler_core::Result<Check> {
        let rows = &trace.rows;
        let first = rows.first().ok_or(Error::NonFinite("empty trace"))?;
        let last = rows.last().expect("nonempty");
        let pairs = || rows.windows(2).map(|w| (w[0], w[1]));
        let base = self.background.base();
        let (q_target, _) = asymptotic_limit_targets(base);
        Ok(match kind {
            CheckKind::FlowCompleted => {
                let mut check = Check::new(kind, last.t, Relation::AtLeast, self.config.flow.t_end, tol);
                if let Some(abort) = &trace.abort {
                    check.passed = false;
                    check.error = Some(abort.to_string());
                }
                check
            }
            CheckKind::AreaGrowth => {
                let worst = rows
                    .iter()
                    .map(|r| (r.area / (r.t.exp() * first.area) - 1.0).abs())
                    .fold(0.0, f64::max);
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::QMonotone => {
                let rise = pairs().map(|(a, b)| b.q - a.q).fold(f64::NEG_INFINITY, f64::max);
                let rise = if rise.is_finite() { rise } else { 0.0 };
                Check::new(kind, rise, Relation::AtMost, 0.0, tol * first.q.abs().max(1.0))
            }
            CheckKind::QLimit => Check::within(kind, last.q - q_target, 0.0, first.q - q_target, tol),
            CheckKind::QConstant => {
                let worst = rows.iter().map(|r| (r.q - q_target).abs()).fold(0.0, f64::max);
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::HawkingMonotone => {
                let drop = pairs().map(|(a, b)| b.hawking_mass - a.hawking_mass).fold(f64::INFINITY, f64::min);
                let drop = if drop.is_finite() { drop } else { 0.0 };
                Check::new(kind, drop, Relation::AtLeast, 0.0, tol)
            }
            CheckKind::HawkingEqualsMass => {
                let expected = self.background.mass() * (base.area() / (4.0 * PI)).powf(1.5);
                let worst = rows.iter().map(|r| (r.hawking_mass - expected).abs()).fold(0.0, f64::max);
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::AlignmentRate => {
                let fit = asymptotic_rate_fit(
                    trace,
                    TraceColumn::AlignmentDeviation,
                    DecayModel::Exponential,
                    self.config.audit.fit_t_min,
                )?;
                Check::new(kind, fit.rate, Relation::Near, -1.0, tol)
            }
            CheckKind::MeanCurvatureProfile => {
                let t_min = self.config.audit.fit_t_min;
                let column = TraceColumn::MeanCurvatureDeviation;
                let with_t = asymptotic_rate_fit(trace, column, DecayModel::TimeExponential, t_min)?;
                let pure = asymptotic_rate_fit(trace, column, DecayModel::Exponential, t_min)?;
                Check::new(kind, with_t.residual, Relation::Below, pure.residual, tol)
            }
            CheckKind::TracelessDecay => {
                if !(first.int_a0sq > 0.0) {
                    return Err(Error::InvalidParameter("initial traceless energy vanishes".into()));
                }
                Check::new(kind, last.int_a0sq / first.int_a0sq, Relation::AtMost, 0.0, tol)
            }
            _ => unreachable!("static check routed to flow evaluation"),
        })
    }

    fn static_check(&self, kind: CheckKind, tol: f64) -> kottler_core::Result<Check> {
        let bg = self.background;
        let horizons = &self.horizons;
        Ok(match kind {
            CheckKind::MinkowskiRigidity => {
                let worst = self.max_over_surfaces(|s| Ok(minkowski_deficit(s, horizons)?.abs()))?;
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::HkRigidity => {
                let worst = self.max_over_surfaces(|s| Ok(hk_gap(s, horizons)?.abs()))?;
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::MinkowskiInequality => {
                let low = -self.max_over_surfaces(|s| Ok(-minkowski_deficit(s, horizons)?))?;
                Check::new(kind, low, Relation::AtLeast, 0.0, tol)
            }
            CheckKind::HkInequality => {
                let low = -self.max_over_surfaces(|s| Ok(-hk_gap(s, horizons)?))?;
                Check::new(kind, low, Relation::AtLeast, 0.0, tol)
            }
            CheckKind::ArealMinkowskiInequality => {
                let low = -self.max_over_surfaces(|s| Ok(-areal_minkowski_deficit(s, horizons)?))?;
                Check::new(kind, low, Relation::AtLeast, 0.0, tol)
            }
            CheckKind::SurfaceGravityBound => {
                let deficit = surface_gravity_bound_deficit(&horizons[0], bg.base());
                Check::new(kind, deficit, Relation::Near, 0.0, tol)
            }
            CheckKind::MassUpperBound => {
                let bound = mass_upper_bound(bg.base().area(), horizons);
                Check::new(kind, bound, Relation::Near, bg.mass(), tol)
            }
            CheckKind::ReversePenrose => Check::new(kind, reverse_penrose_deficit(bg)?, Relation::Near, 0.0, tol),
            CheckKind::HorizonAreaBound => {
                Check::new(kind, horizon_area_lower_bound_gap(&horizons[0]), Relation::AtLeast, 0.0, tol)
            }
            CheckKind::AreaWindow => {
                let (lo, hi) = radius_bounds(bg.surface_gravity())?;
                Check::within(kind, horizons[0].area, 4.0 * PI * lo * lo, 4.0 * PI * hi * hi, tol)
            }
            CheckKind::WindowRoundTrip => {
                let kappa = bg.surface_gravity();
                let (lo, hi) = radius_bounds(kappa)?;
                let worst = [lo, hi]
                    .iter()
                    .map(|&r| (surface_gravity_from_radius(1, r) - kappa).abs())
                    .fold(0.0, f64::max);
                Check::new(kind, worst, Relation::AtMost, 0.0, tol)
            }
            CheckKind::WindowDegenerate => {
                let (lo, hi) = radius_bounds(bg.surface_gravity())?;
                Check::new(kind, hi - lo, Relation::AtMost, 0.0, tol)
            }
            CheckKind::ChMass => {
                let m = bg.mass();
                let extrapolated = ch_mass_extrapolated(bg, &self.config.audit.ch_radii)?;
                Check::new(kind, extrapolated, Relation::Near, m, tol * m.abs().max(1.0))
            }
            CheckKind::StaticResidual => {
                let points = exterior_sample_points(bg, self.config.audit.residual_points, self.config.audit.seed);
                let r = static_residual(bg, bg, &points)?;
                Check::new(kind, r.hessian.max(r.laplacian), Relation::AtMost, 0.0, tol)
            }
            CheckKind::StaticDetector => {
                let points = exterior_sample_points(bg, self.config.audit.residual_points, self.config.audit.seed);
                let wrong = PerturbedPotential { inner: bg, eps: self.config.audit.detector_eps };
                let r = static_residual(bg, &wrong, &points)?;
                Check::new(kind, r.hessian.max(r.laplacian), Relation::Above, 1e-4, tol)
            }
            _ => unreachable!("flow check routed to static evaluation"),
        })
    }
}

/// Runs one scenario. Errors are reserved for setups that cannot be built;
/// flow aborts end up in the audit as a failure record.
pub fn run_scenario(config: &ScenarioConfig, options: RunOptions) -> Result<ScenarioOutcome, Error> {
    let background = build_background(config)?;
    let initial = initial_surface(config, background.clone())?;
    let wants_flow = options.with_flow && config.audit.checks.iter().any(|c| c.needs_flow());
    let trace = if wants_flow { Some(run_flow(initial.clone(), &config.flow)?) } else { None };

    let mut surfaces = vec![initial];
    if let Some(t) = trace.as_ref().filter(|t| t.completed()) {
        surfaces.push(GraphSurface::new(background.clone(), t.final_radius.clone())?);
    }
    let context = Context {
        config,
        scale: options.tolerance_scale,
        background: &background,
        horizons: [background.horizon()],
        surfaces,
        trace: trace.as_ref(),
    };
    let checks = config
        .audit
        .checks
        .iter()
        .filter(|c| options.with_flow || !c.needs_flow())
        .map(|&c| context.evaluate(c))
        .collect();
    let abort = trace.as_ref().and_then(|t| t.abort.as_ref()).map(|e| e.to_string());
    let mut audit = AuditResult::new(&config.name, checks, abort);
    audit.flow = trace.as_ref().map(|t| FlowSummary {
        method: format!("{:?}", t.method).to_lowercase(),
        steps: t.steps,
        samples: t.rows.len(),
    });
    Ok(ScenarioOutcome { trace, audit })
}
