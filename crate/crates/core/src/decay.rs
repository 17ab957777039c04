//! Spontaneous-decay rates of an emitter outside the sphere, normalized to the
//! rate in the unbounded host medium.
//!
//! With `z = z2 ρ` (`ρ = r/a >= 1`) and `ψ'` the Riccati derivative,
//!
//! ```text
//! E1 radial      3/2 Σ n(n+1)(2n+1) |j_n - q_n h_n|² / |z|²
//! E1 tangential  3/2 Σ (n+½) [ |j_n - p_n h_n|² + |ψ'_j - q_n ψ'_h|² / |z|² ]
//! ```
//!
//! and the M1 rates are the same with `p_n` and `q_n` interchanged.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::{AtomSite, Orientation, SphereSystem, Transition};
use crate::mie::{CoefficientTable, Polarization};
use crate::resonance::n_max;
use crate::specfun::{log_double_factorial, SphericalBesselSeq};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ORDER_CAP: u32 = 500;
pub const MAX_REL_TOL: f64 = 1e-3;

const SMALL_RUN: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRequest {
    pub sys: SphereSystem,
    pub site: AtomSite,
    pub rel_tol: f64,
    pub n_cap: u32,
}

impl DecayRequest {
    pub fn new(sys: SphereSystem, site: AtomSite) -> Self {
        Self {
            sys,
            site,
            rel_tol: DEFAULT_REL_TOL,
            n_cap: DEFAULT_ORDER_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= MAX_REL_TOL) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must lie in (0, {MAX_REL_TOL:e}], got {}",
                self.rel_tol
            )));
        }
        if self.n_cap == 0 {
            return Err(Error::InvalidParameter("n_cap must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayWarning {
    /// A medium has absorption; the ratio then includes non-radiative losses
    /// into the sphere and the host normalization is only nominal.
    LossyMedia,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub ratio: f64,
    /// Highest multipole order included.
    pub n_used: u32,
    /// Estimated magnitude of the omitted terms, in units of the ratio.
    pub tail_bound: f64,
    /// Coefficients that were evaluated at a near-zero denominator.
    pub resonant_terms: Vec<(Polarization, u32)>,
    pub warnings: Vec<DecayWarning>,
}

/// Rate for the transition and orientation carried by `req.site`.
pub fn decay_rate(req: &DecayRequest) -> Result<DecayResult> {
    req.validate()?;
    sum_series(req, req.site.transition, req.site.orientation)
}

pub fn rate_e1_radial(sys: &SphereSystem, rho: f64) -> Result<DecayResult> {
    single(sys, rho, Transition::E1, Orientation::Radial)
}

pub fn rate_e1_tangential(sys: &SphereSystem, rho: f64) -> Result<DecayResult> {
    single(sys, rho, Transition::E1, Orientation::Tangential)
}

pub fn rate_m1_radial(sys: &SphereSystem, rho: f64) -> Result<DecayResult> {
    single(sys, rho, Transition::M1, Orientation::Radial)
}

pub fn rate_m1_tangential(sys: &SphereSystem, rho: f64) -> Result<DecayResult> {
    single(sys, rho, Transition::M1, Orientation::Tangential)
}

/// `(radial + 2 tangential) / 3`.
pub fn orientation_averaged(req: &DecayRequest) -> Result<DecayResult> {
    req.validate()?;
    let radial = sum_series(req, req.site.transition, Orientation::Radial)?;
    let tangential = sum_series(req, req.site.transition, Orientation::Tangential)?;
    let mut resonant_terms = radial.resonant_terms;
    for t in tangential.resonant_terms {
        if !resonant_terms.contains(&t) {
            resonant_terms.push(t);
        }
    }
    resonant_terms.sort();
    Ok(DecayResult {
        ratio: (radial.ratio + 2.0 * tangential.ratio) / 3.0,
        n_used: radial.n_used.max(tangential.n_used),
        tail_bound: (radial.tail_bound + 2.0 * tangential.tail_bound) / 3.0,
        resonant_terms,
        warnings: radial.warnings,
    })
}

fn single(sys: &SphereSystem, rho: f64, transition: Transition, orientation: Orientation) -> Result<DecayResult> {
    let site = AtomSite::new(rho, transition, orientation)?;
    decay_rate(&DecayRequest::new(*sys, site))
}

/// Orders summed unconditionally: `ceil(|z|) + 20`, raised to `n_max + 5`
/// for a left-handed interior so every surface mode is included.
pub fn minimum_order(sys: &SphereSystem, rho: f64, n_cap: u32) -> u32 {
    let z = sys.wave_arguments().z2 * rho;
    let mut n0 = z.norm().ceil() + 20.0;
    if sys.interior.handedness().is_left_handed() {
        let mut surface = 0.0f64;
        for pol in [Polarization::Tm, Polarization::Te] {
            match n_max(pol, &sys.interior, &sys.exterior) {
                Ok(v) => surface = surface.max(v),
                Err(_) => surface = f64::INFINITY,
            }
        }
        n0 = n0.max(surface.ceil() + 5.0);
    }
    if n0.is_finite() {
        (n0 as u32).clamp(1, n_cap)
    } else {
        n_cap
    }
}

/// Highest order at which `j_n` of both sphere arguments stays comfortably
/// inside the floating-point range. Above it `|q_n|, |p_n| ~ |j_n|²` are
/// far below any summation tolerance and are taken as zero.
fn coefficient_order(sys: &SphereSystem, nmax: u32) -> u32 {
    let args = sys.wave_arguments();
    let log_floor = -600.0;
    let mut limit = nmax;
    for w in [args.z1, args.z2] {
        let start = (w.norm().ceil() as u32).max(1);
        for n in start..=limit {
            let log_j =
                n as f64 * w.norm().ln() + w.im.abs() - log_double_factorial(2 * n + 1).unwrap_or(f64::INFINITY);
            if log_j < log_floor {
                limit = n - 1;
                break;
            }
        }
    }
    limit.max(1)
}

struct Expansion {
    table: CoefficientTable,
    outer: SphericalBesselSeq,
    z: Complex64,
}

impl Expansion {
    fn new(sys: &SphereSystem, rho: f64, nmax: u32) -> Result<Self> {
        let z = sys.wave_arguments().z2 * rho;
        Ok(Self {
            table: CoefficientTable::new(sys, coefficient_order(sys, nmax))?,
            outer: SphericalBesselSeq::with_hankel(nmax, z)?,
            z,
        })
    }

    fn reflection(&self, pol: Polarization, n: u32) -> Complex64 {
        if n > self.table.max_order() {
            return Complex64::new(0.0, 0.0);
        }
        self.table.get(pol, n).value
    }

    /// Order-`n` term before the overall factor 3/2.
    fn term(&self, transition: Transition, orientation: Orientation, n: u32) -> f64 {
        let (q, p) = match transition {
            Transition::E1 => (
                self.reflection(Polarization::Tm, n),
                self.reflection(Polarization::Te, n),
            ),
            Transition::M1 => (
                self.reflection(Polarization::Te, n),
                self.reflection(Polarization::Tm, n),
            ),
        };
        let nf = n as f64;
        let (j, h) = (self.outer.j(n), self.outer.h(n));
        let z2 = self.z.norm_sqr();
        match orientation {
            Orientation::Radial => nf * (nf + 1.0) * (2.0 * nf + 1.0) * (j - q * h).norm_sqr() / z2,
            Orientation::Tangential => {
                let d = self.outer.riccati_j(n) - q * self.outer.riccati_h(n);
                (nf + 0.5) * ((j - p * h).norm_sqr() + d.norm_sqr() / z2)
            }
        }
    }

    fn flagged(&self, transition: Transition, orientation: Orientation, n: u32) -> Vec<(Polarization, u32)> {
        let radial_pol = match transition {
            Transition::E1 => Polarization::Tm,
            Transition::M1 => Polarization::Te,
        };
        let pols: &[Polarization] = match orientation {
            Orientation::Radial => &[radial_pol],
            Orientation::Tangential => &[Polarization::Tm, Polarization::Te],
        };
        if n > self.table.max_order() {
            return Vec::new();
        }
        pols.iter()
            .filter(|&&pol| self.table.get(pol, n).resonant)
            .map(|&pol| (pol, n))
            .collect()
    }
}

/// Geometric estimate of the omitted tail from the decay of the last terms.
fn tail_estimate(terms: &[f64]) -> f64 {
    let k = terms.len();
    let last = terms[k - 1];
    if last == 0.0 {
        return 0.0;
    }
    let ratio = terms[k.saturating_sub(4)..]
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 1.0 })
        .fold(0.0f64, f64::max);
    if ratio < 0.9 {
        last * ratio / (1.0 - ratio)
    } else {
        last * 10.0 / (1.0 - ratio.min(0.999))
    }
}

fn sum_series(req: &DecayRequest, transition: Transition, orientation: Orientation) -> Result<DecayResult> {
    let rho = req.site.rho();
    let n0 = minimum_order(&req.sys, rho, req.n_cap);
    let mut available = (n0 + 4 * SMALL_RUN).min(req.n_cap);
    loop {
        let exp = Expansion::new(&req.sys, rho, available)?;
        let mut terms = Vec::with_capacity(available as usize);
        let mut sum = 0.0;
        let mut run = 0;
        let mut tail = f64::INFINITY;
        for n in 1..=available {
            let t = exp.term(transition, orientation, n);
            if !t.is_finite() {
                return Err(Error::SeriesNotConverged {
                    partial_sum: 1.5 * sum,
                    tail_estimate: f64::INFINITY,
                    n_used: n,
                });
            }
            terms.push(t);
            sum += t;
            if n <= n0 {
                continue;
            }
            run = if t < req.rel_tol * sum { run + 1 } else { 0 };
            if run >= SMALL_RUN {
                tail = tail_estimate(&terms);
                if tail <= req.rel_tol * sum {
                    let resonant_terms = (1..=n).flat_map(|k| exp.flagged(transition, orientation, k)).collect();
                    let warnings = if req.sys.is_lossless() {
                        Vec::new()
                    } else {
                        vec![DecayWarning::LossyMedia]
                    };
                    return Ok(DecayResult {
                        ratio: 1.5 * sum,
                        n_used: n,
                        tail_bound: 1.5 * tail,
                        resonant_terms,
                        warnings,
                    });
                }
            }
        }
        if available >= req.n_cap {
            if tail.is_infinite() {
                tail = tail_estimate(&terms);
            }
            return Err(Error::SeriesNotConverged {
                partial_sum: 1.5 * sum,
                tail_estimate: 1.5 * tail,
                n_used: available,
            });
        }
        available = (2 * available).min(req.n_cap);
    }
}
