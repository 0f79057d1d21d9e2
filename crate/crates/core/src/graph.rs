//! Star-shaped radial graphs `rho = r(theta)` in a Kottler background.
//!
//! Geometry is evaluated in an orthonormal frame of the base metric. With
//! `p = Dr`, `S = D^2 r` (covariant Hessian on the base), `P = |p|^2`,
//! `U = V^2` and `W^2 = U + P / r^2`:
//!
//! ```text
//! gamma_ab = p_a p_b / U + r^2 delta_ab
//! gamma^ab = (delta_ab - p_a p_b / (r^2 W^2)) / r^2
//! h_ab     = (U r delta_ab + p_a p_b (U' / 2U + 2 / r) - S_ab) / W
//! nu       = (U d_rho - r^-2 p^a d_a) / W
//! ```
//!
//! `W` is the length of `d(rho - r)`, so the unit radial field `V d_rho`
//! satisfies `<V d_rho, nu> = V / W`, and a normal velocity `1 / H`
//! moves the graph radially at speed `W / H`.
//!
//! Derivatives of `r` come from second-order centered differences:
//! periodic on the torus; on the sphere the reduction is axisymmetric with
//! reflective poles, where `cot(theta) r'` is replaced by its limit `r''`.

use std::sync::Arc;

use crate::base_surface::Grid;
use crate::error::{Error, Result};
use crate::kottler::KottlerBackground;

/// Cached pointwise geometry of a graph at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeometry {
    pub radius: f64,
    pub potential: f64,
    /// `|Dr|^2` measured in the base metric.
    pub gradient_sq: f64,
    /// Induced area element relative to the base area element, `r^2 W / V`.
    pub area_element: f64,
    /// Induced metric `(xx, xy, yy)` in the base orthonormal frame.
    pub metric: [f64; 3],
    /// Second fundamental form `(xx, xy, yy)` in the same frame.
    pub second_form: [f64; 3],
    pub mean_curvature: f64,
    /// `|A|^2`.
    pub norm_a_sq: f64,
    /// `|A|^2 - H^2 / 2`.
    pub traceless_sq: f64,
    /// `<V d_rho, nu>`.
    pub alignment: f64,
    /// `W`, the radial speed produced by a unit normal speed.
    pub normal_factor: f64,
}

/// Pointwise geometry from the radius, its base gradient `p` and covariant
/// Hessian `s = (xx, xy, yy)`, both in an orthonormal base frame.
pub fn node_geometry(background: &KottlerBackground, radius: f64, p: [f64; 2], s: [f64; 3]) -> NodeGeometry {
    let r = radius;
    let u = background.lapse_squared(r);
    let u1 = background.lapse_squared_d1(r);
    let v = u.sqrt();
    let grad_sq = p[0] * p[0] + p[1] * p[1];
    let w_sq = u + grad_sq / (r * r);
    let w = w_sq.sqrt();

    let metric = [p[0] * p[0] / u + r * r, p[0] * p[1] / u, p[1] * p[1] / u + r * r];
    let inv_scale = 1.0 / (r * r * r * r * w_sq);
    let inverse = [
        (1.0 - p[0] * p[0] * inv_scale * r * r) / (r * r),
        -p[0] * p[1] * inv_scale,
        (1.0 - p[1] * p[1] * inv_scale * r * r) / (r * r),
    ];
    let bend = u1 / (2.0 * u) + 2.0 / r;
    let second_form = [
        (u * r + p[0] * p[0] * bend - s[0]) / w,
        (p[0] * p[1] * bend - s[1]) / w,
        (u * r + p[1] * p[1] * bend - s[2]) / w,
    ];

    let mean_curvature = inverse[0] * second_form[0] + 2.0 * inverse[1] * second_form[1] + inverse[2] * second_form[2];
    // Shape operator L = gamma^-1 h; |A|^2 = tr(L^2).
    let l00 = inverse[0] * second_form[0] + inverse[1] * second_form[1];
    let l01 = inverse[0] * second_form[1] + inverse[1] * second_form[2];
    let l10 = inverse[1] * second_form[0] + inverse[2] * second_form[1];
    let l11 = inverse[1] * second_form[1] + inverse[2] * second_form[2];
    let norm_a_sq = l00 * l00 + 2.0 * l01 * l10 + l11 * l11;
    // (l00 - l11)^2 / 2 + 2 l01 l10 is |A|^2 - H^2/2 without cancellation.
    let traceless_sq = 0.5 * (l00 - l11) * (l00 - l11) + 2.0 * l01 * l10;

    NodeGeometry {
        radius: r,
        potential: v,
        gradient_sq: grad_sq,
        area_element: r * r * w / v,
        metric,
        second_form,
        mean_curvature,
        norm_a_sq,
        traceless_sq,
        alignment: v / w,
        normal_factor: w,
    }
}

/// Base gradient and covariant Hessian at every node by centered differences.
pub fn base_derivatives(grid: &Grid, radius: &[f64]) -> Vec<([f64; 2], [f64; 3])> {
    match *grid {
        Grid::Point => vec![([0.0; 2], [0.0; 3]); radius.len()],
        Grid::Sphere { nodes } => {
            let h = std::f64::consts::PI / (nodes - 1) as f64;
            let last = nodes - 1;
            (0..nodes)
                .map(|i| {
                    if i == 0 || i == last {
                        let inner = if i == 0 { radius[1] } else { radius[last - 1] };
                        let second = 2.0 * (inner - radius[i]) / (h * h);
                        ([0.0, 0.0], [second, 0.0, second])
                    } else {
                        let first = (radius[i + 1] - radius[i - 1]) / (2.0 * h);
                        let second = (radius[i + 1] - 2.0 * radius[i] + radius[i - 1]) / (h * h);
                        let theta = i as f64 * h;
                        ([first, 0.0], [second, 0.0, first * theta.cos() / theta.sin()])
                    }
                })
                .collect()
        }
        Grid::Torus { side_nodes: n, side } => {
            let h = side / n as f64;
            let at = |i: usize, j: usize| radius[(i % n) + n * (j % n)];
            (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx % n + n, idx / n + n);
                    let c = at(i, j);
                    let (e, w, nn, s) = (at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1));
                    let rx = (e - w) / (2.0 * h);
                    let ry = (nn - s) / (2.0 * h);
                    let rxx = (e - 2.0 * c + w) / (h * h);
                    let ryy = (nn - 2.0 * c + s) / (h * h);
                    let rxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
                    ([rx, ry], [rxx, rxy, ryy])
                })
                .collect()
        }
    }
}

/// Fills the per-node geometry cache for a radius field.
pub fn compute_geometry(background: &KottlerBackground, radius: &[f64]) -> Result<Vec<NodeGeometry>> {
    let base = background.base();
    if radius.len() != base.len() {
        return Err(Error::ShapeMismatch { expected: base.len(), got: radius.len() });
    }
    let horizon = background.horizon_radius();
    for &r in radius {
        if !r.is_finite() {
            return Err(Error::NonFinite("radius field"));
        }
        if r <= horizon {
            return Err(Error::BelowHorizon { rho: r, horizon });
        }
    }
    let derivatives = base_derivatives(base.grid(), radius);
    radius
        .iter()
        .zip(derivatives)
        .map(|(&r, (p, s))| {
            if !(p.iter().chain(s.iter()).all(|x| x.is_finite())) {
                return Err(Error::NonFinite("finite-difference derivative"));
            }
            let node = node_geometry(background, r, p, s);
            if !(node.mean_curvature.is_finite() && node.area_element.is_finite()) {
                return Err(Error::NonFinite("node geometry"));
            }
            Ok(node)
        })
        .collect()
}

/// A radial graph over the base of its background, with cached geometry.
#[derive(Debug, Clone)]
pub struct GraphSurface {
    background: Arc<KottlerBackground>,
    radius: Vec<f64>,
    nodes: Vec<NodeGeometry>,
}

impl GraphSurface {
    pub fn new(background: Arc<KottlerBackground>, radius: Vec<f64>) -> Result<Self> {
        let nodes = compute_geometry(&background, &radius)?;
        Ok(GraphSurface { background, radius, nodes })
    }

    /// The slice `rho = const`.
    pub fn slice(background: Arc<KottlerBackground>, rho: f64) -> Result<Self> {
        let radius = vec![rho; background.base().len()];
        Self::new(background, radius)
    }

    /// Samples `f` on the base grid (see [`crate::BaseSurface::sample`]).
    pub fn from_fn(background: Arc<KottlerBackground>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let radius = background.base().sample(f);
        Self::new(background, radius)
    }

    pub fn background(&self) -> &Arc<KottlerBackground> {
        &self.background
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn nodes(&self) -> &[NodeGeometry] {
        &self.nodes
    }

    /// True when every node carries the same radius.
    pub fn is_slice(&self) -> bool {
        self.radius.iter().all(|&r| r == self.radius[0])
    }

    /// `int_base f(node) dA`, i.e. the surface integral of a nodal quantity.
    pub fn surface_integral(&self, f: impl Fn(&NodeGeometry) -> f64) -> f64 {
        let field: Vec<f64> = self.nodes.iter().map(|n| f(n) * n.area_element).collect();
        self.background.base().integrate(&field).expect("node count matches grid")
    }

    pub fn area(&self) -> f64 {
        self.surface_integral(|_| 1.0)
    }

    pub fn min_mean_curvature(&self) -> f64 {
        self.nodes.iter().map(|n| n.mean_curvature).fold(f64::INFINITY, f64::min)
    }

    pub fn max_mean_curvature(&self) -> f64 {
        self.nodes.iter().map(|n| n.mean_curvature).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn radial_alignment(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.alignment).collect()
    }

    pub fn min_alignment(&self) -> f64 {
        self.nodes.iter().map(|n| n.alignment).fold(f64::INFINITY, f64::min)
    }

    /// `min <V d_rho, nu> >= floor`.
    pub fn star_shaped_check(&self, floor: f64) -> bool {
        self.min_alignment() >= floor
    }
}
