//! Parameter presets for the published figures: ray fans for the RH and LH
//! spheres, the `|p_8|` curves, and the E1/M1 rate sweeps.
//!
//! Resonances of the LH sphere are far narrower than any practical uniform
//! grid, so the sweep presets merge root-polished resonance centres into the
//! grid and mark them.

use crate::error::{Error, Result};
use crate::medium::{Medium, Transition};
use crate::mie::Polarization;
use crate::rays::Vec2;
use crate::resonance::{scan_modes, ModeKind, ScanSpec};

pub const KA_MIN: f64 = 0.05;
pub const KA_MAX: f64 = 10.0;
pub const KA_STEPS: usize = 4000;
pub const SURFACE_RHO: f64 = 1.001;
pub const FAN_SOURCE: Vec2 = Vec2::new(1.5, 0.0);
pub const FAN_COUNT: u32 = 61;
pub const FAN_BOUNCES: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }
}

pub fn rh_sphere() -> Medium {
    Medium::real(4.0, 1.05).expect("valid preset medium")
}

pub fn lh_sphere() -> Medium {
    Medium::real(-4.0, -1.05).expect("valid preset medium")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPreset {
    pub interior: Medium,
    pub exterior: Medium,
    pub source: Vec2,
    pub fan_count: u32,
    pub max_bounces: u32,
}

pub fn ray_preset(preset: Preset) -> Option<RayPreset> {
    let interior = match preset {
        Preset::Fig2 => rh_sphere(),
        Preset::Fig3 => lh_sphere(),
        _ => return None,
    };
    Some(RayPreset {
        interior,
        exterior: Medium::vacuum(),
        source: FAN_SOURCE,
        fan_count: FAN_COUNT,
        max_bounces: FAN_BOUNCES,
    })
}

/// A sweep abscissa, possibly the real part of a polished resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub center: Option<(Polarization, u32)>,
}

/// `steps` points evenly spaced over `(min, max]`.
pub fn open_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min < max) || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs min < max and steps >= 1, got ({min}, {max}] x {steps}"
        )));
    }
    Ok((1..=steps)
        .map(|i| min + (max - min) * i as f64 / steps as f64)
        .collect())
}

/// `steps >= 2` points evenly spaced over `[min, max]`, endpoints exact.
pub fn closed_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min < max) || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs min < max and steps >= 2, got [{min}, {max}] x {steps}"
        )));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|i| {
            if i == last {
                max
            } else {
                min + (max - min) * i as f64 / last as f64
            }
        })
        .collect())
}

/// Real parts of polished resonances of the requested orders in `[x_min, x_max]`.
pub fn resonance_centers(
    interior: &Medium,
    exterior: &Medium,
    x_min: f64,
    x_max: f64,
    polarizations: &[Polarization],
    orders: std::ops::RangeInclusive<u32>,
    surface_only: bool,
) -> Result<Vec<GridPoint>> {
    let mut spec = ScanSpec::new(*interior, *exterior, x_min, x_max);
    spec.polarizations = polarizations.to_vec();
    spec.orders = orders;
    spec.grid_points = ((x_max - x_min) * 400.0).ceil().max(200.0) as usize;
    let report = scan_modes(&spec)?;
    Ok(report
        .modes
        .iter()
        .filter(|m| !surface_only || m.kind == ModeKind::Surface)
        .map(|m| GridPoint {
            x: m.z_root.re,
            center: Some((m.polarization, m.order)),
        })
        .collect())
}

/// Uniform points plus centres, sorted by `x`; a centre replaces a grid
/// point at the identical abscissa.
pub fn merge_centers(grid: &[f64], centers: &[GridPoint]) -> Vec<GridPoint> {
    let mut out: Vec<GridPoint> = grid.iter().map(|&x| GridPoint { x, center: None }).collect();
    for c in centers {
        match out.iter_mut().find(|p| p.x == c.x) {
            Some(p) => p.center = c.center,
            None => out.push(*c),
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MieCurvePreset {
    pub label: &'static str,
    pub interior: Medium,
    pub exterior: Medium,
    pub polarization: Polarization,
    pub order: u32,
    pub points: Vec<GridPoint>,
}

/// `|p_8|` of the RH and LH spheres over the preset ka range.
pub fn fig4_curves() -> Result<Vec<MieCurvePreset>> {
    let grid = open_grid(KA_MIN, KA_MAX, KA_STEPS)?;
    [("RH", rh_sphere()), ("LH", lh_sphere())]
        .into_iter()
        .map(|(label, interior)| {
            let centers = resonance_centers(
                &interior,
                &Medium::vacuum(),
                KA_MIN,
                KA_MAX,
                &[Polarization::Te],
                8..=8,
                false,
            )?;
            Ok(MieCurvePreset {
                label,
                interior,
                exterior: Medium::vacuum(),
                polarization: Polarization::Te,
                order: 8,
                points: merge_centers(&grid, &centers),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSweepPreset {
    pub transition: Transition,
    pub interior: Medium,
    pub exterior: Medium,
    pub rho: f64,
    pub points: Vec<GridPoint>,
}

/// E1 (fig5) or M1 (fig6) rates of the LH sphere at `ρ = 1.001` versus ka,
/// with every surface-mode centre in range merged in.
pub fn rate_sweep(preset: Preset) -> Result<RateSweepPreset> {
    let transition = match preset {
        Preset::Fig5 => Transition::E1,
        Preset::Fig6 => Transition::M1,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a rate sweep preset",
                preset.name()
            )))
        }
    };
    let interior = lh_sphere();
    let exterior = Medium::vacuum();
    let grid = open_grid(KA_MIN, KA_MAX, KA_STEPS)?;
    let (orders, _) = crate::resonance::default_orders(&interior, &exterior);
    let centers = resonance_centers(
        &interior,
        &exterior,
        KA_MIN,
        KA_MAX,
        &[Polarization::Tm, Polarization::Te],
        orders,
        true,
    )?;
    Ok(RateSweepPreset {
        transition,
        interior,
        exterior,
        rho: SURFACE_RHO,
        points: merge_centers(&grid, &centers),
    })
}
