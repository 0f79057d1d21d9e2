//! Monotone quantities, Minkowski-type deficits and mass bounds evaluated on
//! graphs and horizons.
//!
//! Conventions: `w2` is the base area, `A_j`, `chi_j`, `kappa_j`, `c_j` the
//! area, Euler characteristic, surface gravity and Heintze-Karcher constant
//! of horizon `j`, and every surface integral is taken against the induced
//! area element of the graph.

use std::f64::consts::PI;

use crate::base_surface::BaseSurface;
use crate::error::{Error, Result};
use crate::graph::GraphSurface;
use crate::kottler::{HorizonData, KottlerBackground};

fn weighted_horizon_sum(horizons: &[HorizonData]) -> f64 {
    horizons.iter().map(|h| h.topological_weight() * h.surface_gravity * h.area).sum()
}

fn hk_horizon_sum(horizons: &[HorizonData]) -> f64 {
    horizons.iter().map(|h| h.hk_constant * h.surface_gravity * h.area).sum()
}

fn mass_term_sum(horizons: &[HorizonData]) -> f64 {
    horizons.iter().map(HorizonData::mass_term).sum()
}

fn checked_area(surface: &GraphSurface) -> Result<f64> {
    let area = surface.area();
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::InvalidParameter(format!("surface area must be positive, got {area}")));
    }
    Ok(area)
}

/// `int_Omega V dOmega = int_base (r^3 - rho_m^3) / 3 dsigma`.
pub fn bulk_integral(surface: &GraphSurface) -> Result<f64> {
    let background = surface.background();
    let horizon = background.horizon_radius();
    let rm3 = horizon * horizon * horizon;
    let field: Vec<f64> = surface.radius().iter().map(|&r| (r * r * r - rm3) / 3.0).collect();
    background.base().integrate(&field)
}

/// `int_Sigma V H dsigma`.
pub fn total_mean_curvature(surface: &GraphSurface) -> f64 {
    surface.surface_integral(|n| n.potential * n.mean_curvature)
}

/// `int_Sigma |A_0|^2 dsigma`.
pub fn traceless_energy(surface: &GraphSurface) -> f64 {
    surface.surface_integral(|n| n.traceless_sq)
}

/// `Q = |Sigma|^(-1/2) (int VH - 6 int_Omega V + 4 sum_j 2 pi chi_j kappa_j A_j / (3 A_j + 2 pi chi_j))`.
pub fn compute_q(surface: &GraphSurface, horizons: &[HorizonData]) -> Result<f64> {
    let area = checked_area(surface)?;
    let inner = total_mean_curvature(surface) - 6.0 * bulk_integral(surface)? + 4.0 * weighted_horizon_sum(horizons);
    Ok(inner / area.sqrt())
}

/// `P = |Sigma|^(-1/2) (int VH - 2 w2^(-1/2) |Sigma|^(3/2) + 4 sum_j (1 - 2 c_j) kappa_j A_j)`.
pub fn compute_p(surface: &GraphSurface, horizons: &[HorizonData]) -> Result<f64> {
    let area = checked_area(surface)?;
    let w2 = surface.background().base().area();
    let inner = total_mean_curvature(surface) - 2.0 * area.powf(1.5) / w2.sqrt() + 4.0 * mass_term_sum(horizons);
    Ok(inner / area.sqrt())
}

/// `sqrt(|Sigma| / 16 pi) (1 - genus - (1 / 16 pi) int (H^2 - 4))`.
pub fn hawking_mass(surface: &GraphSurface, genus: u32) -> f64 {
    let willmore = surface.surface_integral(|n| n.mean_curvature * n.mean_curvature - 4.0);
    hawking_mass_value(surface.area(), willmore, genus)
}

/// The Hawking mass from the area and `int (H^2 - 4)`.
pub fn hawking_mass_value(area: f64, willmore: f64, genus: u32) -> f64 {
    (area / (16.0 * PI)).sqrt() * (1.0 - genus as f64 - willmore / (16.0 * PI))
}

/// `int V / H - (3/2) int_Omega V - sum_j c_j kappa_j A_j`.
pub fn hk_gap(surface: &GraphSurface, horizons: &[HorizonData]) -> Result<f64> {
    let min_h = surface.min_mean_curvature();
    if !(min_h > 0.0) {
        return Err(Error::MeanCurvatureFloor { value: min_h, floor: 0.0 });
    }
    let lhs = surface.surface_integral(|n| n.potential / n.mean_curvature);
    Ok(lhs - 1.5 * bulk_integral(surface)? - hk_horizon_sum(horizons))
}

/// Left side minus right side of the Minkowski inequality
/// `(1/2w2) int VH - (3/w2) int_Omega V + (2/w2) sum_j 2 pi chi_j kappa_j A_j / (3 A_j + 2 pi chi_j) >= k (|Sigma|/w2)^(1/2)`.
pub fn minkowski_deficit(surface: &GraphSurface, horizons: &[HorizonData]) -> Result<f64> {
    let base = surface.background().base();
    let w2 = base.area();
    let area = checked_area(surface)?;
    let lhs = total_mean_curvature(surface) / (2.0 * w2) - 3.0 * bulk_integral(surface)? / w2
        + 2.0 * weighted_horizon_sum(horizons) / w2;
    Ok(lhs - base.k() * (area / w2).sqrt())
}

/// Left side minus right side of the areal Minkowski inequality
/// `(1/4w2) int VH >= (k a^(1/2) + a^(3/2)) / 2 - (1/w2) sum_j (1 - 2 c_j) kappa_j A_j`, `a = |Sigma| / w2`.
pub fn areal_minkowski_deficit(surface: &GraphSurface, horizons: &[HorizonData]) -> Result<f64> {
    let base = surface.background().base();
    let w2 = base.area();
    let a = checked_area(surface)? / w2;
    let rhs = 0.5 * (base.k() * a.sqrt() + a.powf(1.5)) - mass_term_sum(horizons) / w2;
    Ok(total_mean_curvature(surface) / (4.0 * w2) - rhs)
}

/// `2 pi chi kappa - (k/2) (3 w2 sqrt(A/w2) + 2 pi chi / sqrt(A/w2))`.
pub fn surface_gravity_bound_deficit(horizon: &HorizonData, base: &BaseSurface) -> f64 {
    let w2 = base.area();
    let two_pi_chi = 2.0 * PI * horizon.euler_char as f64;
    let s = (horizon.area / w2).sqrt();
    two_pi_chi * horizon.surface_gravity - 0.5 * base.k() * (3.0 * w2 * s + two_pi_chi / s)
}

/// `(a^(3/2) - a^(1/2)) / 2 - m` with `a = |dM| / w2`, for hyperbolic backgrounds with `m >= 0`.
pub fn reverse_penrose_deficit(background: &KottlerBackground) -> Result<f64> {
    if background.base().curvature_sign() != -1 {
        return Err(Error::InvalidParameter("reverse Penrose bound needs a hyperbolic base".into()));
    }
    if background.mass() < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "reverse Penrose bound needs m >= 0, got {}",
            background.mass()
        )));
    }
    let a = background.horizon().area / background.base().area();
    Ok(0.5 * (a.powf(1.5) - a.sqrt()) - background.mass())
}

/// `m - (k a^(1/2) + a^(3/2)) / 2` with `a = area / w2`.
pub fn penrose_conjecture_deficit(background: &KottlerBackground, area: f64) -> f64 {
    let a = area / background.base().area();
    background.mass() - 0.5 * (background.k() * a.sqrt() + a.powf(1.5))
}

/// `|dM| - 4 pi (g(dM) - 1)`, nonnegative for hyperbolic static systems.
pub fn horizon_area_lower_bound_gap(horizon: &HorizonData) -> f64 {
    let genus = (2 - horizon.euler_char) as f64 / 2.0;
    horizon.area - 4.0 * PI * (genus - 1.0)
}

/// Large-time limits `(Q, P)`, both `2 k sqrt(w2)` in three dimensions.
pub fn asymptotic_limit_targets(base: &BaseSurface) -> (f64, f64) {
    let target = 2.0 * base.k() * base.area().sqrt();
    (target, target)
}

/// Tolerances for the sign checks of a [`FunctionalReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportTolerances {
    pub hk_gap: f64,
    pub minkowski: f64,
    pub areal_minkowski: f64,
}

impl Default for ReportTolerances {
    fn default() -> Self {
        ReportTolerances { hk_gap: 1e-8, minkowski: 1e-8, areal_minkowski: 1e-8 }
    }
}

/// Every functional of a surface together with the sign checks of the
/// three inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalReport {
    pub area: f64,
    pub total_mean_curvature: f64,
    pub bulk_integral: f64,
    pub horizon_term: f64,
    pub q: f64,
    pub p: f64,
    pub hawking_mass: f64,
    pub hk_gap: f64,
    pub minkowski_deficit: f64,
    pub areal_minkowski_deficit: f64,
    pub hk_pass: bool,
    pub minkowski_pass: bool,
    pub areal_minkowski_pass: bool,
}

impl FunctionalReport {
    pub fn evaluate(surface: &GraphSurface, horizons: &[HorizonData], tol: ReportTolerances) -> Result<Self> {
        let genus = surface.background().base().genus();
        let hk = hk_gap(surface, horizons)?;
        let mink = minkowski_deficit(surface, horizons)?;
        let areal = areal_minkowski_deficit(surface, horizons)?;
        Ok(FunctionalReport {
            area: surface.area(),
            total_mean_curvature: total_mean_curvature(surface),
            bulk_integral: bulk_integral(surface)?,
            horizon_term: weighted_horizon_sum(horizons),
            q: compute_q(surface, horizons)?,
            p: compute_p(surface, horizons)?,
            hawking_mass: hawking_mass(surface, genus),
            hk_gap: hk,
            minkowski_deficit: mink,
            areal_minkowski_deficit: areal,
            hk_pass: hk >= -tol.hk_gap,
            minkowski_pass: mink >= -tol.minkowski,
            areal_minkowski_pass: areal >= -tol.areal_minkowski,
        })
    }

    pub fn passed(&self) -> bool {
        self.hk_pass && self.minkowski_pass && self.areal_minkowski_pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_surface::{make_base, make_torus, Resolution};
    use crate::kottler::mass_upper_bound;
    use proptest::prelude::*;
    use std::sync::Arc;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn shared(k: i32, genus: u32, mass: f64, resolution: Resolution) -> Arc<KottlerBackground> {
        KottlerBackground::from_mass(make_base(k, genus, resolution).unwrap(), mass).unwrap().into_shared()
    }

    fn slice_backgrounds() -> Vec<Arc<KottlerBackground>> {
        vec![
            shared(1, 0, 1.0, Resolution::Point),
            shared(1, 0, 2.0 / (3.0 * SQRT3), Resolution::Point),
            shared(0, 1, 0.5, Resolution::Point),
            shared(-1, 2, 0.0, Resolution::Point),
            shared(-1, 2, 1.0, Resolution::Point),
            shared(1, 0, 1.0, Resolution::Nodes(33)),
            shared(0, 1, 1.0, Resolution::Nodes(16)),
        ]
    }

    #[test]
    fn slice_identities() {
        for bg in slice_backgrounds() {
            let horizons = [bg.horizon()];
            let k = bg.k();
            let w2 = bg.base().area();
            for scale in [1.2, 2.0, 10.0] {
                let rho = scale * bg.horizon_radius();
                let s = GraphSurface::slice(bg.clone(), rho).unwrap();
                let tag = format!("k={k} m={} rho={rho}", bg.mass());
                assert!(minkowski_deficit(&s, &horizons).unwrap().abs() <= 1e-10, "{tag}");
                assert!(hk_gap(&s, &horizons).unwrap().abs() <= 1e-10 * rho.powi(3).max(1.0), "{tag}");
                assert!(areal_minkowski_deficit(&s, &horizons).unwrap().abs() <= 1e-10 * rho.powi(3).max(1.0), "{tag}");
                assert!((compute_q(&s, &horizons).unwrap() - 2.0 * k * w2.sqrt()).abs() <= 1e-10, "{tag}");
                assert!((compute_p(&s, &horizons).unwrap() - 2.0 * k * w2.sqrt()).abs() <= 1e-10, "{tag}");
            }
        }
    }

    #[test]
    fn slice_integrals_closed_form() {
        for bg in slice_backgrounds() {
            let (w2, k, m, rm) = (bg.base().area(), bg.k(), bg.mass(), bg.horizon_radius());
            let rho = 1.7 * rm;
            let s = GraphSurface::slice(bg.clone(), rho).unwrap();
            let vh = 2.0 * w2 * (k * rho + rho.powi(3) - 2.0 * m);
            assert!((total_mean_curvature(&s) - vh).abs() <= 1e-12 * vh.abs().max(1.0));
            let bulk = w2 * (rho.powi(3) - rm.powi(3)) / 3.0;
            assert!((bulk_integral(&s).unwrap() - bulk).abs() <= 1e-12 * bulk.max(1.0));
            let inv = s.surface_integral(|n| n.potential / n.mean_curvature);
            assert!((inv - w2 * rho.powi(3) / 2.0).abs() <= 1e-12 * rho.powi(3) * w2);
        }
    }

    #[test]
    fn q_examples() {
        for rm in [1.0 / SQRT3, 1.0, 2.0] {
            let bg = KottlerBackground::from_horizon_radius(make_base(1, 0, Resolution::Point).unwrap(), rm)
                .unwrap()
                .into_shared();
            let s = GraphSurface::slice(bg.clone(), rm * (1.0 + 1e-9)).unwrap();
            let q = compute_q(&s, &[bg.horizon()]).unwrap();
            assert!((q - 4.0 * PI.sqrt()).abs() < 1e-10, "rho_m {rm}: {q}");
        }
        let torus = shared(0, 1, 0.5, Resolution::Point);
        for rho in [1.01, 3.0, 40.0] {
            let s = GraphSurface::slice(torus.clone(), rho).unwrap();
            assert!(compute_q(&s, &[torus.horizon()]).unwrap().abs() < 1e-10);
        }
        let hyp = shared(-1, 2, 0.0, Resolution::Point);
        let s = GraphSurface::slice(hyp.clone(), 2.0).unwrap();
        assert!((compute_q(&s, &[hyp.horizon()]).unwrap() + 2.0 * (4.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn p_examples() {
        for bg in slice_backgrounds() {
            let target = asymptotic_limit_targets(bg.base()).1;
            for rho in [3.0, 30.0, 300.0].map(|s| s * bg.horizon_radius()) {
                let s = GraphSurface::slice(bg.clone(), rho).unwrap();
                assert!((compute_p(&s, &[bg.horizon()]).unwrap() - target).abs() < 1e-9);
            }
        }
        let torus = shared(0, 1, 0.5, Resolution::Point);
        let s = GraphSurface::slice(torus.clone(), 1.0 + 1e-9).unwrap();
        assert!(compute_p(&s, &[torus.horizon()]).unwrap() >= -1e-12);
    }

    #[test]
    fn hawking_mass_examples() {
        let bg = shared(1, 0, 1.0, Resolution::Nodes(33));
        for rho in [2.0, 4.0, 8.0] {
            let s = GraphSurface::slice(bg.clone(), rho).unwrap();
            assert!((hawking_mass(&s, 0) - 1.0).abs() <= 1e-10, "rho {rho}");
        }
        // H = 2 on area 4 pi leaves only the topological term.
        assert_eq!(hawking_mass_value(4.0 * PI, 0.0, 0), 0.5);
    }

    #[test]
    fn geodesic_spheres_of_the_massless_model_have_zero_hawking_mass() {
        // Radius rho, k = 1, m = 0: H^2 - 4 = 4 / rho^2, so int (H^2 - 4) = 16 pi.
        for rho in [0.3, 1.0, 2.5] {
            assert_eq!(hawking_mass_value(4.0 * PI * rho * rho, 16.0 * PI, 0), 0.0);
        }
    }

    #[test]
    fn hawking_mass_of_slices_scales_with_base_area() {
        // On a slice the topological and curvature terms cancel when w2 = 4 pi |1 - g|,
        // leaving m (w2 / 4 pi)^(3/2).
        for (k, g, m) in [(0, 1, 0.5), (-1, 2, 1.0), (-1, 3, 3.0)] {
            let bg = shared(k, g, m, Resolution::Point);
            let expected = m * (bg.base().area() / (4.0 * PI)).powf(1.5);
            for factor in [1.2, 2.0, 10.0] {
                let s = GraphSurface::slice(bg.clone(), factor * bg.horizon_radius()).unwrap();
                assert!((hawking_mass(&s, g) - expected).abs() <= 1e-10 * expected.max(1.0));
            }
        }
        let bg = KottlerBackground::from_mass(make_torus(Resolution::Point, 4.0 * PI).unwrap(), 0.5)
            .unwrap()
            .into_shared();
        let s = GraphSurface::slice(bg, 3.0).unwrap();
        assert!((hawking_mass(&s, 1) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn upper_bound_and_hawking_mass_agree_on_kottler() {
        for (k, g, m) in [(1, 0, 1.0), (1, 0, 0.3), (-1, 2, 0.4)] {
            let bg = shared(k, g, m, Resolution::Point);
            let near = GraphSurface::slice(bg.clone(), bg.horizon_radius() * (1.0 + 1e-9)).unwrap();
            let bound = mass_upper_bound(bg.base().area(), &[bg.horizon()]);
            if k == 1 {
                assert!((hawking_mass(&near, 0) - bound).abs() < 1e-10);
            }
            assert!((bound - m).abs() < 1e-12);
        }
    }

    #[test]
    fn hk_gap_is_positive_off_slices() {
        let bg = shared(0, 1, 0.5, Resolution::Nodes(32));
        let s = GraphSurface::from_fn(bg.clone(), |x, y| 3.0 + 0.1 * (2.0 * PI * x).sin() + 0.05 * (2.0 * PI * y).cos())
            .unwrap();
        assert!(hk_gap(&s, &[bg.horizon()]).unwrap() > 1e-6);
        assert!(minkowski_deficit(&s, &[bg.horizon()]).unwrap() > 1e-6);
        let sphere = shared(1, 0, 1.0, Resolution::Nodes(65));
        let s = GraphSurface::from_fn(sphere.clone(), |t, _| 2.0 + 0.2 * t.cos()).unwrap();
        assert!(minkowski_deficit(&s, &[sphere.horizon()]).unwrap() > 1e-6);
    }

    #[test]
    fn horizon_slice_hk_gap_limit() {
        let bg = shared(1, 0, 1.0, Resolution::Point);
        let gaps: Vec<f64> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|e| hk_gap(&GraphSurface::slice(bg.clone(), 1.0 + e).unwrap(), &[bg.horizon()]).unwrap().abs())
            .collect();
        assert!(gaps.iter().all(|g| *g < 1e-12), "{gaps:?}");
    }

    #[test]
    fn hk_gap_requires_mean_convexity() {
        let bg = shared(1, 0, 1.0, Resolution::Nodes(17));
        let s = GraphSurface::from_fn(bg.clone(), |t, _| 1.05 + 3.0 * t.sin().powi(8)).unwrap();
        assert!(s.min_mean_curvature() <= 0.0);
        assert!(matches!(hk_gap(&s, &[bg.horizon()]), Err(Error::MeanCurvatureFloor { .. })));
    }

    #[test]
    fn bulk_integral_matches_midpoint_volume_quadrature() {
        let bg = shared(0, 1, 0.5, Resolution::Nodes(16));
        let r = |x: f64, y: f64| 3.0 + 0.4 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos();
        let s = GraphSurface::from_fn(bg.clone(), r).unwrap();
        let rm = bg.horizon_radius();
        // V sqrt(det g) on (rho, x, y) with det g = rho^4 / U, integrated in rho
        // by the midpoint rule and one Richardson step.
        let column = |top: f64, cells: usize| {
            let d = (top - rm) / cells as f64;
            (0..cells)
                .map(|i| {
                    let rho = rm + (i as f64 + 0.5) * d;
                    let u = bg.lapse_squared(rho);
                    u.sqrt() * (rho.powi(4) / u).sqrt() * d
                })
                .sum::<f64>()
        };
        let cell_area = bg.base().area() / bg.base().len() as f64;
        let oracle: f64 = s
            .radius()
            .iter()
            .map(|&top| (4.0 * column(top, 4000) - column(top, 2000)) / 3.0 * cell_area)
            .sum();
        assert!((bulk_integral(&s).unwrap() - oracle).abs() <= 1e-8, "{} vs {oracle}", bulk_integral(&s).unwrap());
        let horizon = GraphSurface::slice(bg.clone(), rm * (1.0 + 1e-15)).unwrap();
        assert!(bulk_integral(&horizon).unwrap().abs() < 1e-13);
    }

    #[test]
    fn surface_gravity_bound_examples() {
        for m in [0.01, 0.3, 1.0, 10.0, 2.0 / (3.0 * SQRT3)] {
            let bg = shared(1, 0, m, Resolution::Point);
            assert!(surface_gravity_bound_deficit(&bg.horizon(), bg.base()).abs() <= 1e-12 * (1.0 + m));
        }
        let torus = shared(0, 1, 0.5, Resolution::Point);
        assert_eq!(surface_gravity_bound_deficit(&torus.horizon(), torus.base()), 0.0);
        let hyp = shared(-1, 2, 0.0, Resolution::Point);
        assert!(surface_gravity_bound_deficit(&hyp.horizon(), hyp.base()).abs() <= 1e-12);
    }

    #[test]
    fn reverse_penrose_examples() {
        let hyp0 = shared(-1, 2, 0.0, Resolution::Point);
        assert!(reverse_penrose_deficit(&hyp0).unwrap().abs() < 1e-14);
        let hyp3 = KottlerBackground::from_horizon_radius(make_base(-1, 2, Resolution::Point).unwrap(), 2.0).unwrap();
        assert_eq!(hyp3.mass(), 3.0);
        assert!(reverse_penrose_deficit(&hyp3).unwrap().abs() < 1e-12);
        for m in [0.0, 1.0, 3.0] {
            let bg = shared(-1, 2, m, Resolution::Point);
            assert!(horizon_area_lower_bound_gap(&bg.horizon()) >= 0.0);
        }
        assert!(reverse_penrose_deficit(&shared(1, 0, 1.0, Resolution::Point)).is_err());
        assert!(reverse_penrose_deficit(&shared(-1, 2, -0.1, Resolution::Point)).is_err());
    }

    #[test]
    fn penrose_conjecture_examples() {
        for (k, g, m) in [(1, 0, 1.0), (0, 1, 0.5), (-1, 3, 0.2), (1, 0, 7.0)] {
            let bg = shared(k, g, m, Resolution::Point);
            let d = penrose_conjecture_deficit(&bg, bg.horizon().area);
            assert!(d.abs() <= 1e-12 * m.max(1.0), "k={k}: {d}");
        }
    }

    #[test]
    fn limit_targets() {
        assert!((asymptotic_limit_targets(&make_base(1, 0, Resolution::Point).unwrap()).0 - 4.0 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(asymptotic_limit_targets(&make_base(0, 1, Resolution::Point).unwrap()), (0.0, 0.0));
        let (q, p) = asymptotic_limit_targets(&make_base(-1, 2, Resolution::Point).unwrap());
        assert!((q + 4.0 * PI.sqrt()).abs() < 1e-14 && q == p);
    }

    #[test]
    fn report_flags() {
        let bg = shared(1, 0, 1.0, Resolution::Nodes(33));
        let s = GraphSurface::slice(bg.clone(), 2.0).unwrap();
        let report = FunctionalReport::evaluate(&s, &[bg.horizon()], ReportTolerances::default()).unwrap();
        assert!(report.passed());
        assert!((report.hawking_mass - 1.0).abs() < 1e-10);
        assert!((report.area - 16.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn p_dominates_q_under_area_volume_relation() {
        let bg = shared(0, 1, 0.5, Resolution::Nodes(16));
        let horizons = [bg.horizon()];
        for amp in [0.0, 0.05, 0.2, 0.4] {
            for rho in [1.5, 3.0] {
                let s = GraphSurface::from_fn(bg.clone(), |x, _| rho + amp * (2.0 * PI * x).cos()).unwrap();
                let w2 = bg.base().area();
                let relation = w2.sqrt().recip() * s.area().powf(1.5) - 2.0 * hk_horizon_sum(&horizons)
                    <= 3.0 * bulk_integral(&s).unwrap();
                if relation {
                    assert!(compute_p(&s, &horizons).unwrap() >= compute_q(&s, &horizons).unwrap() - 1e-12);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn hk_gap_nonnegative_on_sphere_graphs(
            scale in 1.3f64..5.0,
            modes in proptest::collection::vec((1usize..5, -0.04f64..0.04), 1..4),
        ) {
            // The O(a h^2) truncation error must stay below the O(a^2) gap
            // for small amplitudes a, hence the fine colatitude grid.
            let bg = shared(1, 0, 1.0, Resolution::Nodes(2049));
            let s = GraphSurface::from_fn(bg.clone(), |t, _| {
                scale * (1.0 + modes.iter().map(|&(l, a)| a * (l as f64 * t).cos()).sum::<f64>())
            });
            let s = s.unwrap();
            prop_assume!(s.min_mean_curvature() > 0.0);
            let gap = hk_gap(&s, &[bg.horizon()]).unwrap();
            prop_assert!(gap >= -1e-8, "gap {}", gap);
        }

        #[test]
        fn hk_gap_nonnegative_on_torus_graphs(
            base_radius in 1.2f64..4.0,
            modes in proptest::collection::vec((0i32..3, 0i32..3, -0.05f64..0.05, 0.0f64..6.3), 1..3),
        ) {
            let bg = shared(0, 1, 0.5, Resolution::Nodes(24));
            let s = GraphSurface::from_fn(bg.clone(), |x, y| {
                base_radius + modes.iter().map(|&(i, j, a, ph)| a * (2.0 * PI * (i as f64 * x + j as f64 * y) + ph).sin()).sum::<f64>()
            });
            let s = s.unwrap();
            prop_assume!(s.min_mean_curvature() > 0.0);
            let gap = hk_gap(&s, &[bg.horizon()]).unwrap();
            prop_assert!(gap >= -1e-8, "gap {}", gap);
        }
    }
}
