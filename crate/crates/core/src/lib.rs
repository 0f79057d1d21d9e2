//! Kottler static black holes, inverse mean curvature flow of radial graphs,
//! and the Minkowski-type inequalities and mass bounds evaluated along it.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod base_surface;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod graph;
pub mod kottler;

pub use base_surface::{make_base, make_torus, BaseSurface, Grid, Resolution};
pub use error::{Error, Result};
pub use flow::{
    asymptotic_rate_fit, run_flow, step_graph_pde, step_slice_ode, DecayModel, FlowControls, FlowMethod, FlowState,
    FlowTrace, RateFit, TraceColumn, TraceRow,
};
pub use functionals::FunctionalReport;
pub use graph::{GraphSurface, NodeGeometry};
pub use kottler::{HorizonData, KottlerBackground};
