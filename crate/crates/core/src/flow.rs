//! Inverse mean curvature flow of radial graphs.
//!
//! In graphical form the flow reads `d_t r = W / H` (see [`crate::graph`]).
//! Slices move by `d_t rho = rho / 2` and are advanced in closed form; other
//! graphs use Heun's method (explicit RK2) under the step restriction
//!
//! ```text
//! dt <= cfl * min_nodes (h rho)^2 H^2 (V / W)^2
//! ```
//!
//! where `h` is the grid spacing.

use crate::base_surface::compensated_sum;
use crate::error::{Error, Result};
use crate::functionals;
use crate::graph::GraphSurface;
use crate::kottler::HorizonData;

/// Smallest deviation a rate fit accepts as signal.
pub const FIT_NOISE_FLOOR: f64 = 1e-12;

/// Minimum number of samples a rate fit needs.
pub const FIT_MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone)]
pub struct FlowState {
    pub time: f64,
    pub surface: GraphSurface,
    pub step_count: u64,
}

impl FlowState {
    pub fn new(surface: GraphSurface) -> Self {
        FlowState { time: 0.0, surface, step_count: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMethod {
    /// Closed-form slice flow for constant graphs, RK2 otherwise.
    Auto,
    Ode,
    Pde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowControls {
    pub t_end: f64,
    pub sample_interval: f64,
    pub cfl: f64,
    pub h_floor: f64,
    /// Minimum radial alignment required of the initial surface.
    pub align_floor: f64,
    /// Upper bound on the RK2 step, independent of the stability bound.
    pub max_dt: f64,
    pub method: FlowMethod,
    /// Keep the radius field at every sample.
    pub snapshots: bool,
}

impl Default for FlowControls {
    fn default() -> Self {
        FlowControls {
            t_end: 1.0,
            sample_interval: 0.1,
            cfl: 0.2,
            h_floor: 1e-6,
            align_floor: 0.1,
            max_dt: 1e-3,
            method: FlowMethod::Auto,
            snapshots: false,
        }
    }
}

/// Slice flow `rho(t + dt) = rho(t) e^(dt/2)`.
pub fn step_slice_ode(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !state.surface.is_slice() {
        return Err(Error::NotASlice);
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be nonnegative, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let rho = state.surface.radius()[0] * (0.5 * dt).exp();
    Ok(FlowState {
        time: state.time + dt,
        surface: GraphSurface::slice(state.surface.background().clone(), rho)?,
        step_count: state.step_count + 1,
    })
}

/// Largest stable RK2 step for `surface`; infinite on the point grid.
pub fn cfl_bound(surface: &GraphSurface, cfl: f64) -> f64 {
    let Some(h) = surface.background().base().grid().spacing() else {
        return f64::INFINITY;
    };
    surface
        .nodes()
        .iter()
        .map(|n| {
            let scale = h * n.radius * n.mean_curvature * n.alignment;
            cfl * scale * scale
        })
        .fold(f64::INFINITY, f64::min)
}

fn radial_speed(surface: &GraphSurface, h_floor: f64) -> Result<Vec<f64>> {
    let min_h = surface.min_mean_curvature();
    if !(min_h > h_floor) {
        return Err(Error::MeanCurvatureFloor { value: min_h, floor: h_floor });
    }
    Ok(surface.nodes().iter().map(|n| n.normal_factor / n.mean_curvature).collect())
}

/// One Heun step of `d_t r = W / H`.
pub fn step_graph_pde(state: &FlowState, dt: f64, controls: &FlowControls) -> Result<FlowState> {
    let bound = cfl_bound(&state.surface, controls.cfl);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, bound });
    }
    let background = state.surface.background();
    let r0 = state.surface.radius();
    let k1 = radial_speed(&state.surface, controls.h_floor)?;
    let stage: Vec<f64> = r0.iter().zip(&k1).map(|(r, v)| r + dt * v).collect();
    let stage = GraphSurface::new(background.clone(), stage)?;
    let k2 = radial_speed(&stage, controls.h_floor)?;
    let next: Vec<f64> = r0
        .iter()
        .zip(k1.iter().zip(&k2))
        .map(|(r, (a, b))| r + 0.5 * dt * (a + b))
        .collect();
    Ok(FlowState {
        time: state.time + dt,
        surface: GraphSurface::new(background.clone(), next)?,
        step_count: state.step_count + 1,
    })
}

/// One sample of a flow trace. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub area: f64,
    pub int_vh: f64,
    pub int_omega_v: f64,
    pub q: f64,
    pub p: f64,
    pub hawking_mass: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub min_align: f64,
    pub int_a0sq: f64,
}

impl TraceRow {
    pub const COLUMNS: [&'static str; 11] = [
        "t",
        "area",
        "int_VH",
        "int_OmegaV",
        "Q",
        "P",
        "hawking_mass",
        "min_H",
        "max_H",
        "min_align",
        "int_A0sq",
    ];

    pub fn evaluate(t: f64, surface: &GraphSurface, horizons: &[HorizonData]) -> Result<Self> {
        let row = TraceRow {
            t,
            area: surface.area(),
            int_vh: functionals::total_mean_curvature(surface),
            int_omega_v: functionals::bulk_integral(surface)?,
            q: functionals::compute_q(surface, horizons)?,
            p: functionals::compute_p(surface, horizons)?,
            hawking_mass: functionals::hawking_mass(surface, surface.background().base().genus()),
            min_h: surface.min_mean_curvature(),
            max_h: surface.max_mean_curvature(),
            min_align: surface.min_alignment(),
            int_a0sq: functionals::traceless_energy(surface),
        };
        if !row.values().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("trace functional"));
        }
        Ok(row)
    }

    pub fn values(&self) -> [f64; 11] {
        [
            self.t,
            self.area,
            self.int_vh,
            self.int_omega_v,
            self.q,
            self.p,
            self.hawking_mass,
            self.min_h,
            self.max_h,
            self.min_align,
            self.int_a0sq,
        ]
    }

    pub fn from_values(v: [f64; 11]) -> Self {
        TraceRow {
            t: v[0],
            area: v[1],
            int_vh: v[2],
            int_omega_v: v[3],
            q: v[4],
            p: v[5],
            hawking_mass: v[6],
            min_h: v[7],
            max_h: v[8],
            min_align: v[9],
            int_a0sq: v[10],
        }
    }
}

/// Time series of a flow run. `abort` holds the error that stopped the run
/// early, in which case the rows form a partial trace.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub rows: Vec<TraceRow>,
    pub abort: Option<Error>,
    pub method: FlowMethod,
    pub steps: u64,
    pub final_radius: Vec<f64>,
    pub snapshots: Vec<(f64, Vec<f64>)>,
}

impl FlowTrace {
    pub fn empty(method: FlowMethod) -> Self {
        FlowTrace { rows: Vec::new(), abort: None, method, steps: 0, final_radius: Vec::new(), snapshots: Vec::new() }
    }

    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }

    pub fn column(&self, column: TraceColumn) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, column.value(r))).collect()
    }
}

fn sample_times(t_end: f64, interval: f64) -> Vec<f64> {
    let count = (t_end / interval * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (1..=count).map(|i| i as f64 * interval).collect();
    match times.last() {
        Some(&last) if (t_end - last).abs() <= 1e-9 * t_end => {
            *times.last_mut().expect("nonempty") = t_end;
        }
        _ => times.push(t_end),
    }
    times
}

fn advance_pde(mut state: FlowState, target: f64, controls: &FlowControls) -> Result<FlowState> {
    while state.time < target {
        let remaining = target - state.time;
        let limit = cfl_bound(&state.surface, controls.cfl).min(controls.max_dt);
        if !(limit > 0.0) {
            return Err(Error::CflViolation { dt: remaining, bound: limit });
        }
        let last = remaining <= limit * (1.0 + 1e-12);
        let dt = if last { remaining } else { limit };
        state = step_graph_pde(&state, dt, controls)?;
        if last {
            state.time = target;
        }
    }
    Ok(state)
}

/// Runs the flow from `initial` to `controls.t_end`, sampling every
/// `controls.sample_interval`. Step failures end the run with a partial,
/// flagged trace; invalid input is an error.
pub fn run_flow(initial: GraphSurface, controls: &FlowControls) -> Result<FlowTrace> {
    if !(controls.t_end > 0.0 && controls.t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {}", controls.t_end)));
    }
    if !(controls.sample_interval > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample interval must be positive, got {}",
            controls.sample_interval
        )));
    }
    if !(controls.cfl > 0.0 && controls.max_dt > 0.0) {
        return Err(Error::InvalidParameter("cfl and max_dt must be positive".into()));
    }
    if !initial.star_shaped_check(controls.align_floor) {
        return Err(Error::NotStarShaped { value: initial.min_alignment(), floor: controls.align_floor });
    }
    let method = match controls.method {
        FlowMethod::Auto if initial.is_slice() => FlowMethod::Ode,
        FlowMethod::Auto => FlowMethod::Pde,
        FlowMethod::Ode if !initial.is_slice() => return Err(Error::NotASlice),
        m => m,
    };
    let horizons = [initial.background().horizon()];
    let mut trace = FlowTrace::empty(method);
    let start = FlowState::new(initial);
    match TraceRow::evaluate(0.0, &start.surface, &horizons) {
        Ok(row) => trace.rows.push(row),
        Err(e) => {
            trace.abort = Some(e);
            trace.final_radius = start.surface.radius().to_vec();
            return Ok(trace);
        }
    }
    if controls.snapshots {
        trace.snapshots.push((0.0, start.surface.radius().to_vec()));
    }

    let mut state = start.clone();
    for target in sample_times(controls.t_end, controls.sample_interval) {
        let advanced = match method {
            FlowMethod::Ode => step_slice_ode(&start, target).map(|mut s| {
                s.step_count = state.step_count + 1;
                s
            }),
            _ => advance_pde(state.clone(), target, controls),
        };
        let next = match advanced {
            Ok(s) => s,
            Err(e) => {
                trace.abort = Some(e);
                break;
            }
        };
        state = next;
        match TraceRow::evaluate(target, &state.surface, &horizons) {
            Ok(row) => trace.rows.push(row),
            Err(e) => {
                trace.abort = Some(e);
                break;
            }
        }
        if controls.snapshots {
            trace.snapshots.push((target, state.surface.radius().to_vec()));
        }
    }
    trace.steps = state.step_count;
    trace.final_radius = state.surface.radius().to_vec();
    Ok(trace)
}

/// A trace column or a deviation derived from trace columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceColumn {
    Area,
    IntVH,
    IntOmegaV,
    Q,
    P,
    HawkingMass,
    MinH,
    MaxH,
    MinAlign,
    IntA0Sq,
    /// `max |<V d_rho, nu> - 1| = 1 - min_align`.
    AlignmentDeviation,
    /// `max |H - 2|`.
    MeanCurvatureDeviation,
}

impl TraceColumn {
    pub fn value(self, row: &TraceRow) -> f64 {
        match self {
            TraceColumn::Area => row.area,
            TraceColumn::IntVH => row.int_vh,
            TraceColumn::IntOmegaV => row.int_omega_v,
            TraceColumn::Q => row.q,
            TraceColumn::P => row.p,
            TraceColumn::HawkingMass => row.hawking_mass,
            TraceColumn::MinH => row.min_h,
            TraceColumn::MaxH => row.max_h,
            TraceColumn::MinAlign => row.min_align,
            TraceColumn::IntA0Sq => row.int_a0sq,
            TraceColumn::AlignmentDeviation => 1.0 - row.min_align,
            TraceColumn::MeanCurvatureDeviation => (row.max_h - 2.0).abs().max((row.min_h - 2.0).abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `A e^(lambda t)`.
    Exponential,
    /// `A t e^(lambda t)`.
    TimeExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub amplitude: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares fit of `log |column|` against `model` over samples with
/// `t >= t_min`.
pub fn asymptotic_rate_fit(trace: &FlowTrace, column: TraceColumn, model: DecayModel, t_min: f64) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = trace
        .column(column)
        .into_iter()
        .filter(|&(t, _)| t >= t_min && (model == DecayModel::Exponential || t > 0.0))
        .collect();
    if points.len() < FIT_MIN_SAMPLES {
        return Err(Error::Fit(format!(
            "{} samples in the fit window, need at least {FIT_MIN_SAMPLES}",
            points.len()
        )));
    }
    if let Some(&(t, y)) = points.iter().find(|&&(_, y)| !(y.abs() > FIT_NOISE_FLOOR)) {
        return Err(Error::Fit(format!("deviation {y:e} at t = {t} is below the noise floor {FIT_NOISE_FLOOR:e}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|&(t, y)| match model {
            DecayModel::Exponential => y.abs().ln(),
            DecayModel::TimeExponential => (y.abs() / t).ln(),
        })
        .collect();
    let n = xs.len() as f64;
    let mean_x = compensated_sum(xs.iter().copied()) / n;
    let mean_y = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|x| (x - mean_x) * (x - mean_x)));
    let sxy = compensated_sum(xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)));
    if !(sxx > 0.0) {
        return Err(Error::Fit("fit window has a single time".into()));
    }
    let rate = sxy / sxx;
    let intercept = mean_y - rate * mean_x;
    let sse = compensated_sum(xs.iter().zip(&ys).map(|(x, y)| {
        let e = y - (intercept + rate * x);
        e * e
    }));
    Ok(RateFit { rate, amplitude: intercept.exp(), residual: (sse / n).sqrt(), samples: points.len() })
}
