//! WebAssembly bindings behind `www/index.html`. Every entry point takes and
//! returns plain numbers so the page needs no generated glue beyond
//! `wasm-bindgen --target web`.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use lhsphere::decay::{decay_rate, DecayRequest};
use lhsphere::figures::closed_grid;
use lhsphere::mie::coefficient;
use lhsphere::rays::{trace_fan, Vec2};
use lhsphere::{AtomSite, Medium, Orientation, Polarization, SphereSystem, Transition};

fn sphere(eps_re: f64, eps_im: f64, mu_re: f64, mu_im: f64) -> lhsphere::Result<Medium> {
    Medium::new(Complex64::new(eps_re, eps_im), Complex64::new(mu_re, mu_im))
}

/// `|q_n|` (TM) or `|p_n|` (TE) on `steps` points of `[ka_min, ka_max]`;
/// NaN where the coefficient cannot be evaluated.
pub fn coefficient_curve(
    interior: Medium,
    polarization: Polarization,
    n: u32,
    ka_min: f64,
    ka_max: f64,
    steps: usize,
) -> lhsphere::Result<Vec<f64>> {
    Ok(closed_grid(ka_min, ka_max, steps)?
        .into_iter()
        .map(|x| {
            SphereSystem::new(interior, Medium::vacuum(), x)
                .and_then(|s| coefficient(polarization, n, &s))
                .map_or(f64::NAN, |c| c.value.norm())
        })
        .collect())
}

pub fn rate_curve(
    interior: Medium,
    site: AtomSite,
    ka_min: f64,
    ka_max: f64,
    steps: usize,
) -> lhsphere::Result<Vec<f64>> {
    Ok(closed_grid(ka_min, ka_max, steps)?
        .into_iter()
        .map(|x| {
            SphereSystem::new(interior, Medium::vacuum(), x)
                .and_then(|sys| decay_rate(&DecayRequest::new(sys, site)))
                .map_or(f64::NAN, |r| r.ratio)
        })
        .collect())
}

/// Rays flattened as `[len, x0, y0, x1, y1, .., len, ..]`.
pub fn fan_polylines(interior: Medium, source_x: f64, fan: u32, bounces: u32) -> lhsphere::Result<Vec<f64>> {
    let paths = trace_fan(Vec2::new(source_x, 0.0), &interior, &Medium::vacuum(), fan, bounces)?;
    let mut flat = Vec::new();
    for p in paths {
        flat.push(p.points.len() as f64);
        flat.extend(p.points.iter().flat_map(|v| [v.x, v.y]));
    }
    Ok(flat)
}

fn js(e: lhsphere::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn mie_curve(
    eps_re: f64,
    eps_im: f64,
    mu_re: f64,
    mu_im: f64,
    te: bool,
    n: u32,
    ka_min: f64,
    ka_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    let pol = if te { Polarization::Te } else { Polarization::Tm };
    sphere(eps_re, eps_im, mu_re, mu_im)
        .and_then(|m| coefficient_curve(m, pol, n, ka_min, ka_max, steps))
        .map_err(js)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn decay_curve(
    eps_re: f64,
    eps_im: f64,
    mu_re: f64,
    mu_im: f64,
    magnetic: bool,
    tangential: bool,
    rho: f64,
    ka_min: f64,
    ka_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    let transition = if magnetic { Transition::M1 } else { Transition::E1 };
    let orientation = if tangential {
        Orientation::Tangential
    } else {
        Orientation::Radial
    };
    let site = AtomSite::new(rho, transition, orientation).map_err(js)?;
    sphere(eps_re, eps_im, mu_re, mu_im)
        .and_then(|m| rate_curve(m, site, ka_min, ka_max, steps))
        .map_err(js)
}

#[wasm_bindgen]
pub fn ray_fan(eps: f64, mu: f64, source_x: f64, fan: u32, bounces: u32) -> Result<Vec<f64>, JsError> {
    Medium::real(eps, mu)
        .and_then(|m| fan_polylines(m, source_x, fan, bounces))
        .map_err(js)
}
