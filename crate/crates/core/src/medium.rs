//! Material and geometry types shared by every solver.
//!
//! Lengths are measured in units of the sphere radius and frequency enters
//! only through the size parameter `x = ka = 2πa/λ_vac`. Fields are assumed
//! to evolve as `exp(-iωt)`, so outgoing waves are `h_n^(1)` and passive
//! right-handed resonances sit below the real axis.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative permittivity and permeability of a homogeneous region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    epsilon: Complex64,
    mu: Complex64,
}

impl Medium {
    pub fn new(epsilon: Complex64, mu: Complex64) -> Result<Self> {
        let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        if !finite(epsilon) || !finite(mu) {
            return Err(Error::InvalidMedium(format!(
                "non-finite constants eps = {epsilon}, mu = {mu}"
            )));
        }
        if epsilon * mu == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidMedium("eps * mu must be non-zero".into()));
        }
        Ok(Self { epsilon, mu })
    }

    /// Medium with purely real constants.
    pub fn real(epsilon: f64, mu: f64) -> Result<Self> {
        Self::new(Complex64::new(epsilon, 0.0), Complex64::new(mu, 0.0))
    }

    pub fn vacuum() -> Self {
        Self {
            epsilon: Complex64::new(1.0, 0.0),
            mu: Complex64::new(1.0, 0.0),
        }
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    /// The dual medium with ε and μ interchanged.
    pub fn swapped(&self) -> Self {
        Self {
            epsilon: self.mu,
            mu: self.epsilon,
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.epsilon.im == 0.0 && self.mu.im == 0.0
    }

    pub fn handedness(&self) -> Handedness {
        classify_handedness(self)
    }
}

/// Sphere (region 1) embedded in a host (region 2) at size parameter `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSystem {
    pub interior: Medium,
    pub exterior: Medium,
    size_parameter: f64,
}

impl SphereSystem {
    pub fn new(interior: Medium, exterior: Medium, size_parameter: f64) -> Result<Self> {
        if !(size_parameter > 0.0 && size_parameter.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "size parameter must be positive and finite, got {size_parameter}"
            )));
        }
        Ok(Self {
            interior,
            exterior,
            size_parameter,
        })
    }

    pub fn size_parameter(&self) -> f64 {
        self.size_parameter
    }

    /// Same media at a different size parameter.
    pub fn with_size_parameter(&self, size_parameter: f64) -> Result<Self> {
        Self::new(self.interior, self.exterior, size_parameter)
    }

    /// ε⇔μ interchange in both regions.
    pub fn swapped(&self) -> Self {
        Self {
            interior: self.interior.swapped(),
            exterior: self.exterior.swapped(),
            size_parameter: self.size_parameter,
        }
    }

    pub fn wave_arguments(&self) -> WaveArguments {
        WaveArguments::at(&self.interior, &self.exterior, Complex64::new(self.size_parameter, 0.0))
    }

    pub fn is_lossless(&self) -> bool {
        self.interior.is_lossless() && self.exterior.is_lossless()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HandednessClass {
    RightHanded,
    LeftHanded,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Handedness {
    pub class: HandednessClass,
}

impl Handedness {
    /// `+1` for right-handed, `-1` for left-handed, `None` for mixed media.
    pub fn beta(&self) -> Option<i8> {
        match self.class {
            HandednessClass::RightHanded => Some(1),
            HandednessClass::LeftHanded => Some(-1),
            HandednessClass::Mixed => None,
        }
    }

    pub fn is_left_handed(&self) -> bool {
        self.class == HandednessClass::LeftHanded
    }
}

/// Sign classification from the real parts of ε and μ.
pub fn classify_handedness(medium: &Medium) -> Handedness {
    let (e, m) = (medium.epsilon.re, medium.mu.re);
    let class = if e < 0.0 && m < 0.0 {
        HandednessClass::LeftHanded
    } else if e > 0.0 && m > 0.0 {
        HandednessClass::RightHanded
    } else {
        HandednessClass::Mixed
    };
    Handedness { class }
}

/// `√(εμ)·x` with the principal root of the product (never `√ε·√μ`).
pub fn wave_argument(medium: &Medium, x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "size parameter must be positive and finite, got {x}"
        )));
    }
    let product = medium.epsilon * medium.mu;
    if product == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("eps * mu = 0".into()));
    }
    Ok(product.sqrt() * x)
}

/// Interior and exterior wave arguments `z1 = k1 a`, `z2 = k2 a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveArguments {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl WaveArguments {
    /// Arguments at a possibly complex size parameter (used by the root finder).
    pub fn at(interior: &Medium, exterior: &Medium, x: Complex64) -> Self {
        Self {
            z1: (interior.epsilon * interior.mu).sqrt() * x,
            z2: (exterior.epsilon * exterior.mu).sqrt() * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    E1,
    M1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Radial,
    Tangential,
}

/// Position of the emitter, `rho = r / a`, and the kind of dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSite {
    rho: f64,
    pub transition: Transition,
    pub orientation: Orientation,
}

impl AtomSite {
    pub fn new(rho: f64, transition: Transition, orientation: Orientation) -> Result<Self> {
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rho = r/a must be finite and >= 1, got {rho}"
            )));
        }
        Ok(Self {
            rho,
            transition,
            orientation,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}
