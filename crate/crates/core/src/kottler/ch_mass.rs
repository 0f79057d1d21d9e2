//! Chruściel-Herzlich mass as a boundary integral over `{rho = const}`.
//!
//! The reference metric is `gbar = drho^2 / F + rho^2 g_base` with
//! `F = k + rho^2`, the reference potential is `f = sqrt(F)`, and for a
//! Kottler background the difference `q = g - gbar` has the single
//! component `q_rr = 1 / U - 1 / F = 2m / (rho U F)`. The integrand
//!
//! ```text
//! f (div q - d tr q)(nu) + tr q df(nu) - q(grad f, nu)
//! ```
//!
//! is assembled term by term from the reference Christoffel symbols.

use super::KottlerBackground;
use crate::error::{Error, Result};

/// Exponents of the large-radius tail `m(rho) - m` on Kottler backgrounds.
pub const KOTTLER_TAIL_ORDERS: [f64; 3] = [3.0, 5.0, 6.0];

/// The mass integral evaluated at `rho_eval`.
pub fn ch_mass_integral(background: &KottlerBackground, reference_k: i32, rho_eval: f64) -> Result<f64> {
    if reference_k != background.base().curvature_sign() {
        return Err(Error::InvalidParameter(format!(
            "reference curvature {reference_k} differs from the background's {}",
            background.base().curvature_sign()
        )));
    }
    let minimum = 5.0 * background.horizon_radius();
    if !(rho_eval >= minimum) {
        return Err(Error::Preasymptotic { rho: rho_eval, minimum });
    }
    let rho = rho_eval;
    let k = background.k();
    let f_sq = k + rho * rho;
    let f = f_sq.sqrt();
    let u = background.lapse_squared(rho);
    let u1 = background.lapse_squared_d1(rho);

    // q = 1/U - 1/F = (2m / rho) / (U F), written without the subtraction.
    let mass_term = 2.0 * background.mass() / rho;
    let uf = u * f_sq;
    let q = mass_term / uf;
    let q1 = -mass_term / (rho * uf) - mass_term * (u1 * f_sq + 2.0 * rho * u) / (uf * uf);

    // Reference metric pieces: gbar^rr = F, unit normal nu = sqrt(F) d_rho.
    let g_inv_rr = f_sq;
    let nu_r = f;
    let gamma_r_rr = -rho / f_sq;
    // gbar^ab Gamma^r_ab = (g_base^ab / rho^2) (-rho F g_base_ab) = -2F / rho.
    let trace_gamma_r_tangential = -2.0 * f_sq / rho;

    let div_q_r = g_inv_rr * (q1 - 2.0 * gamma_r_rr * q) - trace_gamma_r_tangential * q;
    let trace_q = g_inv_rr * q;
    let d_trace_q_r = f_sq * q1 + 2.0 * rho * q;
    let df_r = rho / f;
    let grad_f_r = g_inv_rr * df_r;

    let integrand = f * (div_q_r - d_trace_q_r) * nu_r + trace_q * df_r * nu_r - q * grad_f_r * nu_r;
    // Reference area element on the slice is rho^2 dsigma.
    let base = background.base();
    let field = vec![integrand * rho * rho; base.len()];
    let total = base.integrate(&field)?;
    let value = total / (4.0 * base.area());
    if !value.is_finite() {
        return Err(Error::NonFinite("mass integrand"));
    }
    Ok(value)
}

/// Richardson extrapolation of samples `(rho_i, value_i)` whose error
/// behaves like `sum_j c_j rho^(-orders[j])`. Uses at most
/// `samples.len() - 1` orders.
pub fn richardson_extrapolate(samples: &[(f64, f64)], orders: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples to extrapolate".into()));
    }
    let mut radii: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut column: Vec<f64> = samples.iter().map(|s| s.1).collect();
    for &p in orders.iter().take(samples.len() - 1) {
        let next: Vec<f64> = column
            .windows(2)
            .zip(radii.windows(2))
            .map(|(v, r)| {
                let (w0, w1) = (r[0].powf(p), r[1].powf(p));
                (w1 * v[1] - w0 * v[0]) / (w1 - w0)
            })
            .collect();
        radii.remove(0);
        column = next;
    }
    Ok(*column.last().expect("non-empty column"))
}

/// Mass integral at each radius followed by Richardson extrapolation with
/// the Kottler tail exponents.
pub fn ch_mass_extrapolated(background: &KottlerBackground, radii: &[f64]) -> Result<f64> {
    let samples = radii
        .iter()
        .map(|&r| Ok((r, ch_mass_integral(background, background.base().curvature_sign(), r)?)))
        .collect::<Result<Vec<_>>>()?;
    richardson_extrapolate(&samples, &KOTTLER_TAIL_ORDERS)
}
