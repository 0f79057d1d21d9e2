//! Closed constant-curvature cross-sections and their quadrature.
//!
//! A [`BaseSurface`] is the surface at infinity of a Kottler background: a
//! round sphere (curvature +1), a flat torus (curvature 0) or a closed
//! hyperbolic surface of genus at least two (curvature -1). Its area is fixed
//! by Gauss-Bonnet, `k * area = 2 pi chi`, except for the torus, whose area is
//! a free parameter (unit area by default).
//!
//! Three discretizations are supported:
//!
//! * [`Grid::Sphere`]: axisymmetric functions of colatitude on `n` nodes
//!   spanning `[0, pi]` including both poles, integrated by composite Simpson
//!   with the `sin` weight.
//! * [`Grid::Torus`]: an `n x n` periodic grid on `[0, L)^2`, integrated by the
//!   periodic trapezoid rule.
//! * [`Grid::Point`]: a single representative node for constant fields.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest node count accepted for the sphere and torus grids.
pub const MIN_RESOLUTION: usize = 8;

/// Requested discretization when building a base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Sphere: nodes along the colatitude. Torus: nodes per side.
    Nodes(usize),
    /// A single representative point, enough for constant graphs.
    Point,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Sphere { nodes: usize },
    Torus { side_nodes: usize, side: f64 },
    Point,
}

impl Grid {
    pub fn len(&self) -> usize {
        match *self {
            Grid::Sphere { nodes } => nodes,
            Grid::Torus { side_nodes, .. } => side_nodes * side_nodes,
            Grid::Point => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Grid::Sphere { .. } => "sphere",
            Grid::Torus { .. } => "torus",
            Grid::Point => "point",
        }
    }

    /// Coordinate spacing of the finite-difference stencil, `None` for the point grid.
    pub fn spacing(&self) -> Option<f64> {
        match *self {
            Grid::Sphere { nodes } => Some(PI / (nodes - 1) as f64),
            Grid::Torus { side_nodes, side } => Some(side / side_nodes as f64),
            Grid::Point => None,
        }
    }
}

/// The closed oriented surface at infinity together with its discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSurface {
    curvature_sign: i32,
    genus: u32,
    area: f64,
    euler_char: i32,
    grid: Grid,
    weights: Vec<f64>,
}

/// Builds a base surface. The torus gets unit area; use [`make_torus`] to
/// choose another area.
pub fn make_base(curvature_sign: i32, genus: u32, resolution: Resolution) -> Result<BaseSurface> {
    match curvature_sign {
        1 if genus == 0 => build(1, 0, 4.0 * PI, resolution),
        0 if genus == 1 => make_torus(resolution, 1.0),
        -1 if genus >= 2 => build(-1, genus, 4.0 * PI * (genus as f64 - 1.0), resolution),
        _ => Err(Error::IncompatibleTopology { curvature: curvature_sign, genus }),
    }
}

/// Flat torus `[0, L)^2` with `L^2 = area`.
pub fn make_torus(resolution: Resolution, area: f64) -> Result<BaseSurface> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::InvalidParameter(format!("torus area must be positive, got {area}")));
    }
    build(0, 1, area, resolution)
}

fn build(curvature_sign: i32, genus: u32, area: f64, resolution: Resolution) -> Result<BaseSurface> {
    let grid = match (curvature_sign, resolution) {
        (_, Resolution::Point) => Grid::Point,
        (_, Resolution::Nodes(n)) if n < MIN_RESOLUTION => return Err(Error::ResolutionTooSmall(n)),
        (1, Resolution::Nodes(n)) => Grid::Sphere { nodes: n },
        (0, Resolution::Nodes(n)) => Grid::Torus { side_nodes: n, side: area.sqrt() },
        (k, Resolution::Nodes(_)) => {
            return Err(Error::IncompatibleGrid { grid: "resolved", curvature: k });
        }
    };
    let weights = match grid {
        Grid::Sphere { nodes } => sphere_weights(nodes),
        Grid::Torus { side_nodes, .. } => vec![area / (side_nodes * side_nodes) as f64; side_nodes * side_nodes],
        Grid::Point => vec![area],
    };
    Ok(BaseSurface {
        curvature_sign,
        genus,
        area,
        euler_char: 2 - 2 * genus as i32,
        grid,
        weights,
    })
}

/// Composite Simpson weights for `2 pi * int_0^pi f(theta) sin(theta) dtheta`,
/// with a closing three-eighths panel when the interval count is odd. The
/// weights are rescaled so that they sum to `4 pi`.
fn sphere_weights(nodes: usize) -> Vec<f64> {
    let intervals = nodes - 1;
    let h = PI / intervals as f64;
    let mut rule = vec![0.0; nodes];
    let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    for start in (0..simpson_end).step_by(2) {
        rule[start] += h / 3.0;
        rule[start + 1] += 4.0 * h / 3.0;
        rule[start + 2] += h / 3.0;
    }
    if simpson_end != intervals {
        let s = simpson_end;
        rule[s] += 3.0 * h / 8.0;
        rule[s + 1] += 9.0 * h / 8.0;
        rule[s + 2] += 9.0 * h / 8.0;
        rule[s + 3] += 3.0 * h / 8.0;
    }
    let mut weights: Vec<f64> = rule
        .iter()
        .enumerate()
        .map(|(i, w)| 2.0 * PI * w * (i as f64 * h).sin())
        .collect();
    let scale = 4.0 * PI / compensated_sum(weights.iter().copied());
    for w in &mut weights {
        *w *= scale;
    }
    weights
}

/// Neumaier-compensated summation.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

impl BaseSurface {
    pub fn curvature_sign(&self) -> i32 {
        self.curvature_sign
    }

    /// `k` as a float, convenient in formulas.
    pub fn k(&self) -> f64 {
        self.curvature_sign as f64
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Total area `w2`.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn euler_char(&self) -> i32 {
        self.euler_char
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Gauss-Bonnet defect `k * w2 - 2 pi chi`.
    pub fn gauss_bonnet_defect(&self) -> f64 {
        // Both sides are 4 pi times an integer up to power-of-two scalings, so
        // the difference is exactly zero in floating point.
        self.k() * self.area - 2.0 * PI * self.euler_char as f64
    }

    /// Colatitude of node `i` on the sphere grid.
    pub fn colatitude(&self, i: usize) -> Option<f64> {
        match self.grid {
            Grid::Sphere { nodes } => Some(PI * i as f64 / (nodes - 1) as f64),
            _ => None,
        }
    }

    /// Coordinates `(x, y)` of node `index` on the torus grid (`index = i + n j`).
    pub fn torus_point(&self, index: usize) -> Option<(f64, f64)> {
        match self.grid {
            Grid::Torus { side_nodes, side } => {
                let h = side / side_nodes as f64;
                Some(((index % side_nodes) as f64 * h, (index / side_nodes) as f64 * h))
            }
            _ => None,
        }
    }

    /// Samples `f` at every node. Sphere nodes receive the colatitude as
    /// first argument, torus nodes `(x, y)`, the point node `(0, 0)`.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| match self.grid {
                Grid::Sphere { .. } => f(self.colatitude(i).unwrap_or(0.0), 0.0),
                Grid::Torus { .. } => {
                    let (x, y) = self.torus_point(i).unwrap_or((0.0, 0.0));
                    f(x, y)
                }
                Grid::Point => f(0.0, 0.0),
            })
            .collect()
    }

    /// `int_base field dsigma`.
    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        if field.len() != self.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: field.len() });
        }
        Ok(match self.grid {
            Grid::Torus { .. } => self.weights[0] * compensated_sum(field.iter().copied()),
            _ => compensated_sum(field.iter().zip(&self.weights).map(|(f, w)| f * w)),
        })
    }
}
