use std::f64::consts::PI;
use std::sync::Arc;

use kottler_core::functionals::{compute_q, hawking_mass, hk_gap, minkowski_deficit, FunctionalReport};
use kottler_core::{make_base, run_flow, FlowControls, FlowMethod, GraphSurface, KottlerBackground, Resolution};
use proptest::prelude::*;

fn background(k: i32, genus: u32, mass: f64, resolution: Resolution) -> Arc<KottlerBackground> {
    KottlerBackground::from_mass(make_base(k, genus, resolution).unwrap(), mass).unwrap().into_shared()
}

#[test]
fn slices_stay_rigid_along_the_flow() {
    for (k, g, m) in [(1, 0, 1.0), (0, 1, 0.5), (-1, 2, 1.0)] {
        let bg = background(k, g, m, Resolution::Point);
        let controls = FlowControls { t_end: 3.0, sample_interval: 0.5, snapshots: true, ..Default::default() };
        let trace = run_flow(GraphSurface::slice(bg.clone(), 1.5 * bg.horizon_radius()).unwrap(), &controls).unwrap();
        let horizons = [bg.horizon()];
        for (t, radius) in &trace.snapshots {
            let s = GraphSurface::new(bg.clone(), radius.clone()).unwrap();
            assert!(s.is_slice());
            assert!((radius[0] / (1.5 * bg.horizon_radius()) - (t / 2.0).exp()).abs() < 1e-13);
            let report = FunctionalReport::evaluate(&s, &horizons, Default::default()).unwrap();
            assert!(report.passed());
            assert!(report.hk_gap.abs() < 1e-10 && report.minkowski_deficit.abs() < 1e-10);
        }
    }
}

#[test]
fn perturbed_sphere_satisfies_the_inequalities_along_the_flow() {
    let bg = background(1, 0, 1.0, Resolution::Nodes(65));
    let initial = GraphSurface::from_fn(bg.clone(), |t, _| 2.5 + 0.3 * (2.0 * t).cos()).unwrap();
    let controls = FlowControls { t_end: 2.0, sample_interval: 0.5, snapshots: true, ..Default::default() };
    let trace = run_flow(initial, &controls).unwrap();
    assert!(trace.completed());
    let horizons = [bg.horizon()];
    let mut last_q = f64::INFINITY;
    for (_, radius) in &trace.snapshots {
        let s = GraphSurface::new(bg.clone(), radius.clone()).unwrap();
        assert!(hk_gap(&s, &horizons).unwrap() > 0.0);
        assert!(minkowski_deficit(&s, &horizons).unwrap() > 0.0);
        let q = compute_q(&s, &horizons).unwrap();
        assert!(q <= last_q + 1e-6);
        last_q = q;
    }
}

#[test]
fn ode_and_pde_agree_on_a_resolved_slice() {
    let bg = background(1, 0, 1.0, Resolution::Nodes(17));
    let controls = FlowControls { t_end: 1.0, sample_interval: 0.25, ..Default::default() };
    let ode = run_flow(GraphSurface::slice(bg.clone(), 3.0).unwrap(), &controls).unwrap();
    let pde = run_flow(
        GraphSurface::slice(bg, 3.0).unwrap(),
        &FlowControls { method: FlowMethod::Pde, ..controls },
    )
    .unwrap();
    for (a, b) in ode.rows.iter().zip(&pde.rows) {
        assert!((a.area / b.area - 1.0).abs() < 1e-6);
        assert!((a.hawking_mass - b.hawking_mass).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn slice_flow_multiplies_area_by_e_to_the_t(mass in 0.05f64..5.0, factor in 1.01f64..20.0, t_end in 0.1f64..5.0) {
        let bg = background(1, 0, mass, Resolution::Point);
        let controls = FlowControls { t_end, sample_interval: t_end / 3.0, ..Default::default() };
        let trace = run_flow(GraphSurface::slice(bg.clone(), factor * bg.horizon_radius()).unwrap(), &controls).unwrap();
        let a0 = trace.rows[0].area;
        for row in &trace.rows {
            prop_assert!((row.area / (a0 * row.t.exp()) - 1.0).abs() <= 1e-10);
            prop_assert!((row.hawking_mass - mass).abs() <= 1e-10 * mass.max(1.0) * factor);
        }
    }

    #[test]
    fn hawking_mass_of_spherical_slices_is_the_mass(mass in 0.01f64..10.0, factor in 1.01f64..50.0) {
        let bg = background(1, 0, mass, Resolution::Point);
        let s = GraphSurface::slice(bg.clone(), factor * bg.horizon_radius()).unwrap();
        prop_assert!((hawking_mass(&s, 0) - mass).abs() <= 1e-9 * mass.max(1.0));
        prop_assert!((s.area() - 4.0 * PI * s.radius()[0].powi(2)).abs() <= 1e-12 * s.area());
    }
}
