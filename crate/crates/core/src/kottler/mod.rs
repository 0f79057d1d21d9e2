//! Kottler backgrounds `g = dr^2 / U(r) + r^2 g_base`, `V = sqrt(U)`, with
//! `U(r) = k + r^2 - 2m / r` and cosmological constant fixed at -3.
//!
//! Everything here is closed form: the horizon is the largest positive root
//! of `r^3 + k r - 2m`, derivatives of `U` and `V` are hand-coded, and the
//! horizon data (area, Euler characteristic, surface gravity) follow from
//! the horizon radius.

mod ch_mass;
mod static_equations;

pub use ch_mass::{ch_mass_extrapolated, ch_mass_integral, richardson_extrapolate, KOTTLER_TAIL_ORDERS};
pub use static_equations::{exterior_sample_points, halton, static_residual, PerturbedPotential, RadialPotential, StaticResidual};

use std::f64::consts::PI;
use std::sync::Arc;

use crate::base_surface::BaseSurface;
use crate::error::{Error, Result};

/// Lowest admissible mass for which a nondegenerate horizon exists.
pub fn critical_mass(curvature_sign: i32) -> f64 {
    if curvature_sign == -1 {
        -1.0 / (3.0 * 3f64.sqrt())
    } else {
        0.0
    }
}

fn check_sign(curvature_sign: i32) -> Result<f64> {
    match curvature_sign {
        -1..=1 => Ok(curvature_sign as f64),
        other => Err(Error::InvalidParameter(format!("curvature sign must be -1, 0 or 1, got {other}"))),
    }
}

/// Largest positive root of `r^3 + k r - 2m`.
///
/// Safeguarded Newton iteration: the seed is `max((2m)^(1/3), 1)` and any
/// step leaving the current bracket is replaced by bisection, which keeps
/// the iteration robust close to the double root at `m = m_crit`, `k = -1`.
pub fn horizon_radius(curvature_sign: i32, mass: f64) -> Result<f64> {
    let k = check_sign(curvature_sign)?;
    let critical = critical_mass(curvature_sign);
    if !mass.is_finite() || mass <= critical {
        return Err(Error::SubcriticalMass { curvature: curvature_sign, mass, critical });
    }
    let cubic = |r: f64| r * r * r + k * r - 2.0 * mass;
    let slope = |r: f64| 3.0 * r * r + k;

    // Left end: p < 0 there and p is increasing to its right.
    let mut lo = if curvature_sign == -1 { 1.0 / 3f64.sqrt() } else { 0.0 };
    let mut hi = (2.0 * mass).abs().cbrt().max(1.0);
    while cubic(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut x = (2.0 * mass).abs().cbrt().max(1.0).clamp(lo, hi);
    for _ in 0..200 {
        let p = cubic(x);
        if p == 0.0 {
            return Ok(x);
        }
        if p < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = slope(x);
        let newton = if d > 0.0 { x - p / d } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// `m = (k r + r^3) / 2` for a horizon at radius `r`.
pub fn mass_from_radius(curvature_sign: i32, radius: f64) -> Result<f64> {
    let k = check_sign(curvature_sign)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon radius must be positive, got {radius}")));
    }
    if 3.0 * radius * radius + k <= 0.0 {
        return Err(Error::DegenerateHorizon { curvature: curvature_sign, radius });
    }
    Ok(0.5 * (k * radius + radius * radius * radius))
}

/// `kappa = (3 r + k / r) / 2`.
pub fn surface_gravity_from_radius(curvature_sign: i32, radius: f64) -> f64 {
    0.5 * (3.0 * radius + curvature_sign as f64 / radius)
}

/// The two ADS-Schwarzschild horizon radii with surface gravity `kappa`,
/// `r = (kappa -/+ sqrt(kappa^2 - 3)) / 3`.
pub fn radius_bounds(kappa: f64) -> Result<(f64, f64)> {
    if !(kappa >= 3f64.sqrt()) {
        return Err(Error::SubcriticalSurfaceGravity(kappa));
    }
    let disc = (kappa * kappa - 3.0).max(0.0).sqrt();
    Ok(((kappa - disc) / 3.0, (kappa + disc) / 3.0))
}

/// Optimal Heintze-Karcher coefficient `c = |dM| / (3 |dM| + 2 pi chi)`.
pub fn hk_constant(area: f64, euler_char: i32) -> Result<f64> {
    let denominator = 3.0 * area + 2.0 * PI * euler_char as f64;
    if !(denominator > 0.0) {
        return Err(Error::NonPositiveHkDenominator(denominator));
    }
    Ok(area / denominator)
}

/// Data of one horizon component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonData {
    pub area: f64,
    pub euler_char: i32,
    pub surface_gravity: f64,
    pub hk_constant: f64,
}

impl HorizonData {
    pub fn new(area: f64, euler_char: i32, surface_gravity: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon area must be positive, got {area}")));
        }
        if !(surface_gravity > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "surface gravity must be positive, got {surface_gravity}"
            )));
        }
        Ok(HorizonData {
            area,
            euler_char,
            surface_gravity,
            hk_constant: hk_constant(area, euler_char)?,
        })
    }

    /// `2 pi chi / (3 |dM| + 2 pi chi)`, the weight of this horizon in the
    /// monotone quantity and the Minkowski deficit.
    pub fn topological_weight(&self) -> f64 {
        let two_pi_chi = 2.0 * PI * self.euler_char as f64;
        two_pi_chi / (3.0 * self.area + two_pi_chi)
    }

    /// `(1 - 2c) kappa |dM|`.
    pub fn mass_term(&self) -> f64 {
        (1.0 - 2.0 * self.hk_constant) * self.surface_gravity * self.area
    }
}

/// `(1 / w2) sum_j (1 - 2 c_j) kappa_j |d_j M|`, an upper bound for the mass
/// of a static system, attained by Kottler.
pub fn mass_upper_bound(base_area: f64, horizons: &[HorizonData]) -> f64 {
    horizons.iter().map(HorizonData::mass_term).sum::<f64>() / base_area
}

/// A Kottler background over a given base.
#[derive(Debug, Clone, PartialEq)]
pub struct KottlerBackground {
    base: BaseSurface,
    mass: f64,
    horizon_radius: f64,
}

impl KottlerBackground {
    pub fn from_mass(base: BaseSurface, mass: f64) -> Result<Self> {
        let horizon_radius = horizon_radius(base.curvature_sign(), mass)?;
        Ok(KottlerBackground { base, mass, horizon_radius })
    }

    pub fn from_horizon_radius(base: BaseSurface, radius: f64) -> Result<Self> {
        let mass = mass_from_radius(base.curvature_sign(), radius)?;
        let critical = critical_mass(base.curvature_sign());
        if mass <= critical {
            return Err(Error::SubcriticalMass { curvature: base.curvature_sign(), mass, critical });
        }
        Ok(KottlerBackground { base, mass, horizon_radius: radius })
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn base(&self) -> &BaseSurface {
        &self.base
    }

    pub fn k(&self) -> f64 {
        self.base.k()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn horizon_radius(&self) -> f64 {
        self.horizon_radius
    }

    /// `U = V^2 = k + r^2 - 2m / r`.
    pub fn lapse_squared(&self, rho: f64) -> f64 {
        self.k() + rho * rho - 2.0 * self.mass / rho
    }

    pub fn lapse_squared_d1(&self, rho: f64) -> f64 {
        2.0 * rho + 2.0 * self.mass / (rho * rho)
    }

    pub fn lapse_squared_d2(&self, rho: f64) -> f64 {
        2.0 - 4.0 * self.mass / (rho * rho * rho)
    }

    /// Static potential `V`.
    pub fn potential(&self, rho: f64) -> f64 {
        self.lapse_squared(rho).max(0.0).sqrt()
    }

    /// `|dV|_g = V V' = U' / 2`, smooth up to the horizon.
    pub fn potential_gradient_norm(&self, rho: f64) -> f64 {
        0.5 * self.lapse_squared_d1(rho)
    }

    pub fn surface_gravity(&self) -> f64 {
        surface_gravity_from_radius(self.base.curvature_sign(), self.horizon_radius)
    }

    pub fn horizon(&self) -> HorizonData {
        let area = self.base.area() * self.horizon_radius * self.horizon_radius;
        // The Kottler horizon is a copy of the base, so it shares its topology.
        HorizonData::new(area, self.base.euler_char(), self.surface_gravity())
            .expect("Kottler horizons are nondegenerate")
    }
}
