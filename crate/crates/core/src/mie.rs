//! Reflection coefficients of TM (`q_n`) and TE (`p_n`) spherical waves.
//!
//! `q_n` is evaluated exactly as the ratio
//!
//! ```text
//!        ε1 ψ'(z2) j(z1) - ε2 ψ'(z1) j(z2)
//! q_n = -----------------------------------,   ψ(z) = z j_n(z), ζ(z) = z h_n(z)
//!        ε1 ζ'(z2) j(z1) - ε2 ψ'(z1) h(z2)
//! ```
//!
//! with no re-normalization, so it holds for any sign of ε and μ. `p_n` is the
//! same expression with ε and μ interchanged in both media. Both are invariant
//! under `z1 -> -z1`, so the branch of `√(ε1 μ1)` does not matter.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::{Medium, SphereSystem, WaveArguments};
use crate::specfun::{cdiv, SphericalBesselSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    Tm,
    Te,
}

impl Polarization {
    pub fn label(&self) -> &'static str {
        match self {
            Polarization::Tm => "TM",
            Polarization::Te => "TE",
        }
    }
}

/// A reflection coefficient together with its conditioning diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieCoefficient {
    pub polarization: Polarization,
    pub order: u32,
    pub value: Complex64,
    pub numerator: Complex64,
    pub denominator: Complex64,
    /// Set when `|den| < 1e3 · ε_mach · |num|`, i.e. the value is dominated by
    /// a near-zero denominator.
    pub resonant: bool,
}

impl MieCoefficient {
    pub fn denominator_abs(&self) -> f64 {
        self.denominator.norm()
    }
}

pub fn q_tm(n: u32, sys: &SphereSystem) -> Result<MieCoefficient> {
    coefficient(Polarization::Tm, n, sys)
}

pub fn p_te(n: u32, sys: &SphereSystem) -> Result<MieCoefficient> {
    coefficient(Polarization::Te, n, sys)
}

pub fn coefficient(pol: Polarization, n: u32, sys: &SphereSystem) -> Result<MieCoefficient> {
    let args = sys.wave_arguments();
    coefficient_with_arguments(pol, n, &sys.interior, &sys.exterior, args.z1, args.z2)
}

/// Coefficient for explicitly supplied wave arguments, e.g. to force the
/// opposite branch of `z1`.
pub fn coefficient_with_arguments(
    pol: Polarization,
    n: u32,
    interior: &Medium,
    exterior: &Medium,
    z1: Complex64,
    z2: Complex64,
) -> Result<MieCoefficient> {
    check_order(n)?;
    let inner = SphericalBesselSeq::bessel_j(n, z1)?;
    let outer = SphericalBesselSeq::with_hankel(n, z2)?;
    let (e1, e2) = boundary_weights(pol, interior, exterior);
    Ok(assemble(pol, n, e1, e2, &inner, &outer))
}

/// Denominator of the coefficient at real size parameter; zero at resonance.
pub fn denominator(pol: Polarization, n: u32, sys: &SphereSystem) -> Result<Complex64> {
    Ok(coefficient(pol, n, sys)?.denominator)
}

/// Denominator continued to complex size parameter `x`.
pub fn denominator_at(
    pol: Polarization,
    n: u32,
    interior: &Medium,
    exterior: &Medium,
    x: Complex64,
) -> Result<Complex64> {
    check_order(n)?;
    let args = WaveArguments::at(interior, exterior, x);
    let inner = SphericalBesselSeq::bessel_j(n, args.z1)?;
    let outer = SphericalBesselSeq::with_hankel(n, args.z2)?;
    let (e1, e2) = boundary_weights(pol, interior, exterior);
    Ok(e1 * outer.riccati_h(n) * inner.j(n) - e2 * inner.riccati_j(n) * outer.h(n))
}

/// `q_n` and `p_n` for `n = 1..=nmax`, sharing one set of Bessel sequences.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    tm: Vec<MieCoefficient>,
    te: Vec<MieCoefficient>,
}

impl CoefficientTable {
    pub fn new(sys: &SphereSystem, nmax: u32) -> Result<Self> {
        check_order(nmax)?;
        let args = sys.wave_arguments();
        let inner = SphericalBesselSeq::bessel_j(nmax, args.z1)?;
        let outer = SphericalBesselSeq::with_hankel(nmax, args.z2)?;
        let build = |pol| {
            let (e1, e2) = boundary_weights(pol, &sys.interior, &sys.exterior);
            (1..=nmax)
                .map(|n| assemble(pol, n, e1, e2, &inner, &outer))
                .collect::<Vec<_>>()
        };
        Ok(Self {
            tm: build(Polarization::Tm),
            te: build(Polarization::Te),
        })
    }

    pub fn max_order(&self) -> u32 {
        self.tm.len() as u32
    }

    pub fn get(&self, pol: Polarization, n: u32) -> &MieCoefficient {
        match pol {
            Polarization::Tm => &self.tm[n as usize - 1],
            Polarization::Te => &self.te[n as usize - 1],
        }
    }

    pub fn q(&self, n: u32) -> Complex64 {
        self.tm[n as usize - 1].value
    }

    pub fn p(&self, n: u32) -> Complex64 {
        self.te[n as usize - 1].value
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("multipole order must be >= 1".into()));
    }
    Ok(())
}

/// Material constants entering the boundary conditions: ε for TM, μ for TE.
fn boundary_weights(pol: Polarization, interior: &Medium, exterior: &Medium) -> (Complex64, Complex64) {
    match pol {
        Polarization::Tm => (interior.epsilon(), exterior.epsilon()),
        Polarization::Te => (interior.mu(), exterior.mu()),
    }
}

fn assemble(
    pol: Polarization,
    n: u32,
    e1: Complex64,
    e2: Complex64,
    inner: &SphericalBesselSeq,
    outer: &SphericalBesselSeq,
) -> MieCoefficient {
    let j1 = inner.j(n);
    let dpsi1 = inner.riccati_j(n);
    let numerator = e1 * outer.riccati_j(n) * j1 - e2 * dpsi1 * outer.j(n);
    let denominator = e1 * outer.riccati_h(n) * j1 - e2 * dpsi1 * outer.h(n);
    let resonant = denominator.norm() < 1e3 * f64::EPSILON * numerator.norm();
    MieCoefficient {
        polarization: pol,
        order: n,
        value: cdiv(numerator, denominator),
        numerator,
        denominator,
        resonant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(e1: f64, m1: f64, x: f64) -> SphereSystem {
        SphereSystem::new(Medium::real(e1, m1).unwrap(), Medium::vacuum(), x).unwrap()
    }

    #[test]
    fn trivial_sphere_reflects_nothing() {
        for x in [0.1, 1.0, 7.5] {
            let s = sys(1.0, 1.0, x);
            for n in 1..=6 {
                assert_eq!(q_tm(n, &s).unwrap().value, Complex64::new(0.0, 0.0));
                assert_eq!(p_te(n, &s).unwrap().value, Complex64::new(0.0, 0.0));
            }
        }
        let d = denominator(Polarization::Tm, 1, &sys(1.0, 1.0, 1.0)).unwrap();
        assert!(d.norm() > 0.1);
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(q_tm(0, &sys(4.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn te_is_tm_of_dual_system() {
        let s = SphereSystem::new(
            Medium::new(Complex64::new(-4.0, 0.2), Complex64::new(-1.05, 0.01)).unwrap(),
            Medium::real(1.5, 1.2).unwrap(),
            1.7,
        )
        .unwrap();
        for n in 1..=10 {
            assert_eq!(p_te(n, &s).unwrap().value, q_tm(n, &s.swapped()).unwrap().value);
        }
    }

    #[test]
    fn table_matches_single_order_calls() {
        let s = sys(-4.0, -1.05, 1.3);
        let table = CoefficientTable::new(&s, 12).unwrap();
        for n in 1..=12 {
            let q = q_tm(n, &s).unwrap().value;
            let p = p_te(n, &s).unwrap().value;
            assert!((table.q(n) - q).norm() <= 1e-12 * q.norm().max(1e-300));
            assert!((table.p(n) - p).norm() <= 1e-12 * p.norm().max(1e-300));
        }
    }

    #[test]
    fn rh_denominator_has_no_real_zero() {
        // Lossless RH resonances sit below the real axis: |p| stays on the
        // unit circle and never blows up along real x.
        let mut smallest = f64::INFINITY;
        for i in 1..=2000 {
            let x = 0.005 * i as f64;
            let c = p_te(8, &sys(4.0, 1.05, x)).unwrap();
            assert!(!c.resonant);
            assert!(c.value.norm() <= 1.0 + 1e-12);
            smallest = smallest.min(c.denominator_abs() / c.numerator.norm().max(1e-300));
        }
        assert!(smallest >= 1.0 - 1e-9, "{smallest}");
    }

    #[test]
    fn rh_p8_is_small_below_ka_2_5() {
        let peak = |e1: f64, m1: f64| {
            (1..=4000)
                .map(|i| 0.0025 * i as f64)
                .map(|x| p_te(8, &sys(e1, m1, x)).unwrap().value.norm())
                .fold(0.0, f64::max)
        };
        let rh_small = (1..=1000)
            .map(|i| 0.0025 * i as f64)
            .map(|x| p_te(8, &sys(4.0, 1.05, x)).unwrap().value.norm())
            .fold(0.0, f64::max);
        assert!(rh_small < 0.1, "{rh_small}");
        assert!(peak(4.0, 1.05) > 0.5);
    }
}
