//! Sphere resonances: small-sphere surface-mode asymptotics, the
//! whispering-gallery estimate, the signed quality factor, and an exact
//! complex root finder for the coefficient denominators.
//!
//! Roots are sought in the complex size parameter `x` at fixed materials;
//! with `exp(-iωt)` fields a right-handed sphere has `Im x < 0` at resonance
//! while left-handed surface modes have `Im x > 0`. The quality factor is
//! `Q = -β Re(x) / (2 Im(x))` with `β = +1` (RH) or `-1` (LH), which is
//! positive in both cases.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::{classify_handedness, Handedness, Medium, SphereSystem};
use crate::mie::{coefficient, denominator_at, Polarization};
use crate::specfun::{cdiv, log_double_factorial};

/// Highest order a scan will visit, whatever `n_max` says.
pub const ORDER_CAP: u32 = 200;

const MAX_ITERATIONS: u32 = 100;
const RESIDUAL_TOL: f64 = 1e-10;

/// Small-sphere estimate of a surface mode: `Re z` and `ln Q⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceEstimate {
    pub polarization: Polarization,
    pub order: u32,
    pub re_z: f64,
    pub inv_q_log: f64,
}

impl ResonanceEstimate {
    pub fn q_factor(&self) -> f64 {
        (-self.inv_q_log).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    /// Left-handed interior with `1 <= n < n_max`: the small-sphere surface
    /// mode family.
    Surface,
    /// Everything else, including whispering-gallery modes.
    Volume,
}

impl ModeKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModeKind::Surface => "surface",
            ModeKind::Volume => "volume",
        }
    }
}

/// Surface modes need a left-handed interior and an order below `n_max`.
pub fn classify_mode(pol: Polarization, n: u32, interior: &Medium, exterior: &Medium) -> ModeKind {
    if !interior.handedness().is_left_handed() {
        return ModeKind::Volume;
    }
    match n_max(pol, interior, exterior) {
        Ok(limit) if (n as f64) < limit => ModeKind::Surface,
        Err(Error::DivergentMaxOrder(_)) => ModeKind::Surface,
        _ => ModeKind::Volume,
    }
}

/// A polished root of a coefficient denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceMode {
    pub polarization: Polarization,
    pub order: u32,
    pub z_root: Complex64,
    /// `None` only for mixed-handedness spheres, where β is undefined.
    pub q_factor: Option<f64>,
    /// `|den(z_root)|` relative to the local denominator scale.
    pub residual: f64,
    pub handedness: Handedness,
    pub kind: ModeKind,
    pub iterations: u32,
}

impl ResonanceMode {
    pub fn handedness_beta(&self) -> Option<i8> {
        self.handedness.beta()
    }
}

/// TE quantities are the TM ones of the ε⇔μ dual pair.
fn tm_frame(pol: Polarization, interior: &Medium, exterior: &Medium) -> (Medium, Medium) {
    match pol {
        Polarization::Tm => (*interior, *exterior),
        Polarization::Te => (interior.swapped(), exterior.swapped()),
    }
}

/// Size parameter at which `n` vacuum wavelengths fit the interior perimeter,
/// `x = n / √(ε1 μ1)`. Only meaningful for `n >> 1`.
pub fn whispering_gallery_estimate(n: u32, interior: &Medium) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be >= 1".into()));
    }
    let product = interior.epsilon() * interior.mu();
    if product.re <= 0.0 {
        return Err(Error::Domain(format!(
            "whispering-gallery estimate needs Re(eps1 mu1) > 0, got {product}"
        )));
    }
    Ok(n as f64 / product.sqrt().re)
}

/// Largest angular order supporting a surface mode: `-ε2/(ε1+ε2)` for TM,
/// `-μ2/(μ1+μ2)` for TE. Modes exist for integer `1 <= n < n_max`.
pub fn n_max(pol: Polarization, interior: &Medium, exterior: &Medium) -> Result<f64> {
    let (inner, outer) = tm_frame(pol, interior, exterior);
    let (e1, e2) = (inner.epsilon(), outer.epsilon());
    let sum = e1 + e2;
    if sum.norm() <= 1e-14 * (e1.norm() + e2.norm()) {
        return Err(Error::DivergentMaxOrder(format!(
            "{} boundary constants cancel ({e1} + {e2} = 0)",
            pol.label()
        )));
    }
    Ok((-e2 / sum).re)
}

/// Small-sphere position of the order-`n` surface mode, or `None` when the
/// order admits no such mode (`n >= n_max` or a non-positive radicand).
pub fn asymptotic_z(pol: Polarization, n: u32, interior: &Medium, exterior: &Medium) -> Option<ResonanceEstimate> {
    if n == 0 {
        return None;
    }
    match n_max(pol, interior, exterior) {
        Ok(limit) if (n as f64) >= limit => return None,
        Ok(_) | Err(Error::DivergentMaxOrder(_)) => {}
        Err(_) => return None,
    }
    let (inner, outer) = tm_frame(pol, interior, exterior);
    let (e1, e2, m1, m2) = (inner.epsilon(), outer.epsilon(), inner.mu(), outer.mu());
    let nf = n as f64;
    let numerator = e2 + nf * (e1 + e2);
    let denominator = e1 * e2 * (m1 / (2.0 * nf + 3.0) + m2 / (2.0 * nf - 1.0));
    if numerator.re <= 0.0 || denominator == Complex64::new(0.0, 0.0) {
        return None;
    }
    let radicand = numerator / denominator;
    if radicand.re <= 0.0 {
        return None;
    }
    let re_z = radicand.sqrt().re;
    let inv_q_log = asymptotic_inv_q(pol, n, interior, exterior, re_z).ok()?;
    Some(ResonanceEstimate {
        polarization: pol,
        order: n,
        re_z,
        inv_q_log,
    })
}

/// `ln Q⁻¹` of the small-sphere surface mode, evaluated in log domain:
/// `Q⁻¹ = |w2 / (w1/(2n+3) + w2/(2n-1)) · (√(ε2 μ2) z)^(2n-1) / ((2n-1)!!)²|`
/// with `w = μ` for TM and `w = ε` for TE.
pub fn asymptotic_inv_q(pol: Polarization, n: u32, interior: &Medium, exterior: &Medium, re_z: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("order must be >= 1".into()));
    }
    if !(re_z > 0.0 && re_z.is_finite()) {
        return Err(Error::Domain(format!("re_z must be positive, got {re_z}")));
    }
    let (inner, outer) = tm_frame(pol, interior, exterior);
    let (w1, w2) = (inner.mu(), outer.mu());
    let nf = n as f64;
    let weight = w1 / (2.0 * nf + 3.0) + w2 / (2.0 * nf - 1.0);
    if weight.norm() == 0.0 {
        return Err(Error::Domain("Q prefactor diverges (vanishing weight sum)".into()));
    }
    let host_index = (outer.epsilon() * outer.mu()).sqrt().norm();
    let log = (w2 / weight).norm().ln() + (2.0 * nf - 1.0) * (host_index * re_z).ln()
        - 2.0 * log_double_factorial(2 * n - 1)?;
    if !log.is_finite() {
        return Err(Error::Domain("Q prefactor vanishes".into()));
    }
    Ok(log)
}

/// `Q = -β Re z / (2 Im z)`; a non-positive result is reported, not hidden.
pub fn quality_factor(z_root: Complex64, handedness: &Handedness) -> Result<f64> {
    let beta = handedness
        .beta()
        .ok_or_else(|| Error::Domain("quality factor sign is undefined for mixed-handedness media".into()))?;
    if !(z_root.re > 0.0) || z_root.im == 0.0 {
        return Err(Error::Domain(format!(
            "quality factor needs Re z > 0 and Im z != 0, got {z_root}"
        )));
    }
    let q = -(beta as f64) * z_root.re / (2.0 * z_root.im);
    if q <= 0.0 {
        return Err(Error::QualitySign { q, beta });
    }
    Ok(q)
}

/// Newton iteration (central-difference derivative) on the denominator in
/// the complex size-parameter plane, falling back to Muller's method when
/// Newton stagnates.
pub fn find_root(
    pol: Polarization,
    n: u32,
    interior: &Medium,
    exterior: &Medium,
    seed: Complex64,
) -> Result<ResonanceMode> {
    let (z, residual, iterations) = polish(pol, n, interior, exterior, seed)?;
    let handedness = classify_handedness(interior);
    let q_factor = match handedness.beta() {
        Some(_) => Some(quality_factor(z, &handedness)?),
        None => None,
    };
    Ok(ResonanceMode {
        polarization: pol,
        order: n,
        z_root: z,
        q_factor,
        residual,
        handedness,
        kind: classify_mode(pol, n, interior, exterior),
        iterations,
    })
}

fn polish(
    pol: Polarization,
    n: u32,
    interior: &Medium,
    exterior: &Medium,
    seed: Complex64,
) -> Result<(Complex64, f64, u32)> {
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite seed {seed}")));
    }
    let f = |x: Complex64| denominator_at(pol, n, interior, exterior, x);

    let mut z = seed;
    let mut fz = f(z)?;
    let mut scale = fz.norm();
    let mut best = (z, fz);
    let mut stalled = 0;
    let mut iterations = 0;
    let mut use_muller = false;

    while iterations < MAX_ITERATIONS && !use_muller {
        iterations += 1;
        let h = 1e-6 * z.norm().max(1.0);
        let slope = (f(z + h)? - f(z - h)?) / (2.0 * h);
        scale = scale.max(slope.norm() * z.norm());
        if slope.norm() == 0.0 || !slope.is_finite() {
            use_muller = true;
            break;
        }
        let mut step = -cdiv(fz, slope);
        let mut next = z + step;
        let mut f_next = f(next)?;
        // Damp only while far from the root; near it |f| is at the noise floor.
        let mut damping = 0;
        while fz.norm() > 1e-6 * scale && f_next.norm() > fz.norm() && damping < 12 {
            step *= 0.5;
            next = z + step;
            f_next = f(next)?;
            damping += 1;
        }
        if f_next.norm() < best.1.norm() {
            best = (next, f_next);
            stalled = 0;
        } else {
            stalled += 1;
        }
        z = next;
        fz = f_next;

        let residual_ok = fz.norm() <= RESIDUAL_TOL * scale;
        let settled = step.norm() <= 1e-12 * z.norm() && step.im.abs() <= 1e-6 * z.im.abs().max(f64::MIN_POSITIVE);
        if residual_ok && settled {
            break;
        }
        if stalled >= 4 && !residual_ok {
            use_muller = true;
        }
        if stalled >= 6 {
            break;
        }
    }

    if use_muller {
        let (z_m, f_m, it) = muller(&f, best.0, MAX_ITERATIONS - iterations.min(MAX_ITERATIONS))?;
        iterations += it;
        if f_m.norm() < best.1.norm() {
            best = (z_m, f_m);
        }
    }

    let (z, fz) = if fz.norm() <= best.1.norm() { (z, fz) } else { best };
    let residual = fz.norm() / scale;
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::RootNotConverged { best: z, residual });
    }
    Ok((z, residual, iterations))
}

fn muller<F>(f: &F, start: Complex64, budget: u32) -> Result<(Complex64, Complex64, u32)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = 1e-3 * start.norm().max(1e-3);
    let (mut x0, mut x1, mut x2) = (start - h, start + h, start);
    let (mut f0, mut f1, mut f2) = (f(x0)?, f(x1)?, f(x2)?);
    let mut it = 0;
    while it < budget.max(1) {
        it += 1;
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = cdiv(f1 - f0, h1);
        let d2 = cdiv(f2 - f1, h2);
        let a = cdiv(d2 - d1, h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * f2 * a).sqrt();
        let denom = if (b + disc).norm() > (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        if denom.norm() == 0.0 {
            break;
        }
        let dx = -2.0 * cdiv(f2, denom);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 += dx;
        f2 = f(x2)?;
        if dx.norm() <= 1e-15 * x2.norm() {
            break;
        }
    }
    Ok((x2, f2, it))
}

/// Net number of denominator zeros inside a circle, from the winding of its
/// phase. Samples are refined until successive phase jumps stay below π/4.
pub fn winding_number(
    pol: Polarization,
    n: u32,
    interior: &Medium,
    exterior: &Medium,
    center: Complex64,
    radius: f64,
) -> Result<i32> {
    let point = |t: f64| center + Complex64::from_polar(radius, t);
    let phase = |t: f64| -> Result<f64> { Ok(denominator_at(pol, n, interior, exterior, point(t))?.arg()) };
    let wrap = |d: f64| {
        let tau = std::f64::consts::TAU;
        d - tau * (d / tau).round()
    };
    let samples = 16usize;
    let mut total = 0.0;
    for k in 0..samples {
        let (mut t0, t1) = (
            std::f64::consts::TAU * k as f64 / samples as f64,
            std::f64::consts::TAU * (k + 1) as f64 / samples as f64,
        );
        let mut a0 = phase(t0)?;
        // Walk the arc with an adaptively shrinking step.
        let mut dt = t1 - t0;
        while t0 < t1 {
            let te = (t0 + dt).min(t1);
            let a1 = phase(te)?;
            let jump = wrap(a1 - a0);
            if jump.abs() > std::f64::consts::FRAC_PI_4 && dt > 1e-9 {
                dt *= 0.5;
                continue;
            }
            total += jump;
            t0 = te;
            a0 = a1;
            dt = (dt * 2.0).min(t1 - t0).max(1e-9);
        }
    }
    Ok((total / std::f64::consts::TAU).round() as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanDiagnostic {
    /// The requested orders were clamped at [`ORDER_CAP`].
    CapReached { requested: u32 },
    /// A polished root had the wrong sign of `Im z` for the sphere's handedness.
    SignViolation {
        polarization: Polarization,
        order: u32,
        z_root: Complex64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub modes: Vec<ResonanceMode>,
    pub diagnostics: Vec<ScanDiagnostic>,
}

/// Parameters of a mode scan over real size parameter.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub interior: Medium,
    pub exterior: Medium,
    pub x_min: f64,
    pub x_max: f64,
    pub orders: RangeInclusive<u32>,
    pub polarizations: Vec<Polarization>,
    pub grid_points: usize,
}

impl ScanSpec {
    pub fn new(interior: Medium, exterior: Medium, x_min: f64, x_max: f64) -> Self {
        Self {
            interior,
            exterior,
            x_min,
            x_max,
            orders: default_orders(&interior, &exterior).0,
            polarizations: vec![Polarization::Tm, Polarization::Te],
            grid_points: 2000,
        }
    }
}

/// Orders worth scanning: up to `n_max + 5` for either polarization (at least
/// 5), clamped at [`ORDER_CAP`] with a diagnostic when `n_max` diverges.
pub fn default_orders(interior: &Medium, exterior: &Medium) -> (RangeInclusive<u32>, Option<ScanDiagnostic>) {
    let mut upper: f64 = 0.0;
    let mut diverges = false;
    for pol in [Polarization::Tm, Polarization::Te] {
        match n_max(pol, interior, exterior) {
            Ok(v) => upper = upper.max(v),
            Err(_) => diverges = true,
        }
    }
    let wanted = upper.ceil() + 5.0;
    if diverges || wanted > ORDER_CAP as f64 {
        let requested = if diverges { u32::MAX } else { wanted as u32 };
        (1..=ORDER_CAP, Some(ScanDiagnostic::CapReached { requested }))
    } else {
        (1..=(wanted as u32).max(5), None)
    }
}

/// Every resonance of the requested orders whose real part lies in the scan
/// window, seeded from the surface-mode asymptotics and from local maxima of
/// `|coefficient|` on a uniform real grid, then polished by [`find_root`].
pub fn scan_modes(spec: &ScanSpec) -> Result<ScanReport> {
    if !(spec.x_min > 0.0 && spec.x_max > spec.x_min && spec.x_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scan window must satisfy 0 < x_min < x_max, got [{}, {}]",
            spec.x_min, spec.x_max
        )));
    }
    if spec.grid_points < 3 {
        return Err(Error::InvalidParameter("scan grid needs at least 3 points".into()));
    }
    let mut diagnostics = Vec::new();
    let (lo, mut hi) = (*spec.orders.start(), *spec.orders.end());
    if hi > ORDER_CAP {
        diagnostics.push(ScanDiagnostic::CapReached { requested: hi });
        hi = ORDER_CAP;
    }
    let mut modes = Vec::new();
    let mut pols = spec.polarizations.clone();
    pols.sort();
    pols.dedup();
    for &pol in &pols {
        for n in lo.max(1)..=hi {
            let (found, diag) = scan_order(spec, pol, n);
            modes.extend(found);
            diagnostics.extend(diag);
        }
    }
    sort_modes(&mut modes);
    Ok(ScanReport { modes, diagnostics })
}

/// Modes of a single `(polarization, order)` pair; see [`scan_modes`].
pub fn scan_order(spec: &ScanSpec, pol: Polarization, n: u32) -> (Vec<ResonanceMode>, Vec<ScanDiagnostic>) {
    let mut seeds = Vec::new();
    if let Some(est) = asymptotic_z(pol, n, &spec.interior, &spec.exterior) {
        if est.re_z >= spec.x_min && est.re_z <= spec.x_max {
            seeds.push(Complex64::new(est.re_z, 0.0));
        }
    }
    let step = (spec.x_max - spec.x_min) / (spec.grid_points - 1) as f64;
    let magnitude: Vec<Option<f64>> = (0..spec.grid_points)
        .map(|i| {
            let x = spec.x_min + step * i as f64;
            SphereSystem::new(spec.interior, spec.exterior, x)
                .and_then(|sys| coefficient(pol, n, &sys))
                .ok()
                .map(|c| c.value.norm())
                .filter(|v| v.is_finite())
        })
        .collect();
    for i in 1..spec.grid_points - 1 {
        if let (Some(a), Some(b), Some(c)) = (magnitude[i - 1], magnitude[i], magnitude[i + 1]) {
            if b > a && b >= c {
                seeds.push(Complex64::new(spec.x_min + step * i as f64, 0.0));
            }
        }
    }

    let mut found: Vec<ResonanceMode> = Vec::new();
    let mut diagnostics = Vec::new();
    for seed in seeds {
        match find_root(pol, n, &spec.interior, &spec.exterior, seed) {
            Ok(mode) => {
                let z = mode.z_root;
                if z.re < spec.x_min || z.re > spec.x_max {
                    continue;
                }
                if found.iter().all(|m| (m.z_root - z).norm() > 1e-7 * z.norm()) {
                    found.push(mode);
                }
            }
            Err(Error::QualitySign { .. }) => {
                if let Ok((z, _, _)) = polish(pol, n, &spec.interior, &spec.exterior, seed) {
                    let diag = ScanDiagnostic::SignViolation {
                        polarization: pol,
                        order: n,
                        z_root: z,
                    };
                    if z.re >= spec.x_min && z.re <= spec.x_max && !diagnostics.contains(&diag) {
                        diagnostics.push(diag);
                    }
                }
            }
            Err(_) => {}
        }
    }
    sort_modes(&mut found);
    (found, diagnostics)
}

fn sort_modes(modes: &mut [ResonanceMode]) {
    modes.sort_by(|a, b| {
        (a.polarization, a.order)
            .cmp(&(b.polarization, b.order))
            .then(a.z_root.re.total_cmp(&b.z_root.re))
    });
}
