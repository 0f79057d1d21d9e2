//! Residuals of the static vacuum equations
//! `Hess V = V Ric + 3 V g` and `Lap V = 3 V`.
//!
//! The metric is written in the chart `(rho, a, b)` with base metric
//! `da^2 + s(a)^2 db^2`, where `s = sin`, `1` or `sinh` according to the
//! curvature sign. Metric components, their first and second derivatives,
//! the Christoffel symbols and their derivatives are all closed form, so a
//! nonzero residual points at a transcription error, not at discretization.

use super::KottlerBackground;
use crate::error::{Error, Result};

/// A potential depending on the radial coordinate only.
pub trait RadialPotential {
    fn value(&self, rho: f64) -> f64;
    fn d1(&self, rho: f64) -> f64;
    fn d2(&self, rho: f64) -> f64;
}

impl RadialPotential for KottlerBackground {
    fn value(&self, rho: f64) -> f64 {
        self.lapse_squared(rho).sqrt()
    }

    fn d1(&self, rho: f64) -> f64 {
        self.lapse_squared_d1(rho) / (2.0 * self.value(rho))
    }

    fn d2(&self, rho: f64) -> f64 {
        let v = self.value(rho);
        let u1 = self.lapse_squared_d1(rho);
        self.lapse_squared_d2(rho) / (2.0 * v) - u1 * u1 / (4.0 * v * v * v)
    }
}

/// `V (1 + eps / rho)`: a deliberately wrong potential used to check that
/// the residual detects departures from the static equations.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedPotential<'a, P: RadialPotential> {
    pub inner: &'a P,
    pub eps: f64,
}

impl<P: RadialPotential> RadialPotential for PerturbedPotential<'_, P> {
    fn value(&self, rho: f64) -> f64 {
        self.inner.value(rho) * (1.0 + self.eps / rho)
    }

    fn d1(&self, rho: f64) -> f64 {
        let (v, v1) = (self.inner.value(rho), self.inner.d1(rho));
        v1 * (1.0 + self.eps / rho) - v * self.eps / (rho * rho)
    }

    fn d2(&self, rho: f64) -> f64 {
        let (v, v1, v2) = (self.inner.value(rho), self.inner.d1(rho), self.inner.d2(rho));
        let e = self.eps;
        v2 * (1.0 + e / rho) - 2.0 * v1 * e / (rho * rho) + 2.0 * v * e / (rho * rho * rho)
    }
}

/// Value and derivatives of a diagonal metric at one point:
/// `dg[i][c] = d_c g_ii` and `ddg[i][c][d] = d_c d_d g_ii`.
struct DiagonalJet {
    g: [f64; 3],
    dg: [[f64; 3]; 3],
    ddg: [[[f64; 3]; 3]; 3],
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

impl DiagonalJet {
    fn kottler(background: &KottlerBackground, rho: f64, a: f64) -> Self {
        let u = background.lapse_squared(rho);
        let u1 = background.lapse_squared_d1(rho);
        let u2 = background.lapse_squared_d2(rho);
        let (s, s1, s2) = match background.base().curvature_sign() {
            1 => (a.sin(), a.cos(), -a.sin()),
            0 => (1.0, 0.0, 0.0),
            _ => (a.sinh(), a.cosh(), a.sinh()),
        };
        let mut jet = DiagonalJet { g: [1.0 / u, rho * rho, rho * rho * s * s], dg: [[0.0; 3]; 3], ddg: [[[0.0; 3]; 3]; 3] };
        jet.dg[0][0] = -u1 / (u * u);
        jet.dg[1][0] = 2.0 * rho;
        jet.dg[2][0] = 2.0 * rho * s * s;
        jet.dg[2][1] = 2.0 * rho * rho * s * s1;

        jet.ddg[0][0][0] = -u2 / (u * u) + 2.0 * u1 * u1 / (u * u * u);
        jet.ddg[1][0][0] = 2.0;
        jet.ddg[2][0][0] = 2.0 * s * s;
        jet.ddg[2][0][1] = 4.0 * rho * s * s1;
        jet.ddg[2][1][0] = 4.0 * rho * s * s1;
        jet.ddg[2][1][1] = 2.0 * rho * rho * (s1 * s1 + s * s2);
        jet
    }

    /// `Gamma^k_ij`.
    fn christoffel(&self, k: usize, i: usize, j: usize) -> f64 {
        0.5 / self.g[k] * (delta(k, j) * self.dg[k][i] + delta(k, i) * self.dg[k][j] - delta(i, j) * self.dg[i][k])
    }

    /// `d_l Gamma^k_ij`.
    fn christoffel_d(&self, k: usize, i: usize, j: usize, l: usize) -> f64 {
        let bracket = delta(k, j) * self.dg[k][i] + delta(k, i) * self.dg[k][j] - delta(i, j) * self.dg[i][k];
        let bracket_d =
            delta(k, j) * self.ddg[k][i][l] + delta(k, i) * self.ddg[k][j][l] - delta(i, j) * self.ddg[i][k][l];
        -0.5 * self.dg[k][l] / (self.g[k] * self.g[k]) * bracket + 0.5 / self.g[k] * bracket_d
    }

    fn ricci(&self) -> [[f64; 3]; 3] {
        let mut ric = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut r = 0.0;
                for k in 0..3 {
                    r += self.christoffel_d(k, i, j, k) - self.christoffel_d(k, i, k, j);
                    for l in 0..3 {
                        r += self.christoffel(k, k, l) * self.christoffel(l, i, j)
                            - self.christoffel(k, j, l) * self.christoffel(l, i, k);
                    }
                }
                ric[i][j] = r;
            }
        }
        ric
    }
}

/// Element `index` of the van der Corput sequence in the given prime base.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut value = 0.0;
    let mut scale = 1.0 / base as f64;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale /= base as f64;
    }
    value
}

/// `count` quasi-random exterior points `(rho, a)` with `rho` in
/// `[1.1, 10] rho_m` and `a` in `[0.1, pi - 0.1]`, drawn from the Halton
/// sequence in bases 2 and 3 starting at `offset + 1`.
pub fn exterior_sample_points(background: &KottlerBackground, count: usize, offset: u64) -> Vec<(f64, f64)> {
    let rho_m = background.horizon_radius();
    (1..=count as u64)
        .map(|i| {
            let (u, v) = (halton(offset + i, 2), halton(offset + i, 3));
            (rho_m * (1.1 + 8.9 * u), 0.1 + (std::f64::consts::PI - 0.2) * v)
        })
        .collect()
}

/// Maximum residuals over a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticResidual {
    /// `max |Hess V - V Ric - 3 V g|_g`.
    pub hessian: f64,
    /// `max |Lap V - 3 V|`.
    pub laplacian: f64,
}

/// Evaluates both static-equation residuals for `potential` on the metric of
/// `background` at the points `(rho, a)`; `a` is the first base chart
/// coordinate (colatitude on the sphere) and must avoid chart singularities.
pub fn static_residual<P: RadialPotential>(
    background: &KottlerBackground,
    potential: &P,
    points: &[(f64, f64)],
) -> Result<StaticResidual> {
    let mut out = StaticResidual { hessian: 0.0, laplacian: 0.0 };
    for &(rho, a) in points {
        if !(rho > background.horizon_radius()) {
            return Err(Error::BelowHorizon { rho, horizon: background.horizon_radius() });
        }
        let jet = DiagonalJet::kottler(background, rho, a);
        let ric = jet.ricci();
        let v = potential.value(rho);
        let dv = [potential.d1(rho), 0.0, 0.0];
        let ddv = potential.d2(rho);

        let mut norm_sq = 0.0;
        let mut laplacian = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut hess = if i == 0 && j == 0 { ddv } else { 0.0 };
                for (k, dvk) in dv.iter().enumerate() {
                    hess -= jet.christoffel(k, i, j) * dvk;
                }
                if i == j {
                    laplacian += hess / jet.g[i];
                }
                let t = hess - v * ric[i][j] - 3.0 * v * delta(i, j) * jet.g[i];
                norm_sq += t * t / (jet.g[i] * jet.g[j]);
            }
        }
        let lap_res = (laplacian - 3.0 * v).abs();
        if !(norm_sq.is_finite() && lap_res.is_finite()) {
            return Err(Error::NonFinite("static residual"));
        }
        out.hessian = out.hessian.max(norm_sq.sqrt());
        out.laplacian = out.laplacian.max(lap_res);
    }
    Ok(out)
}
