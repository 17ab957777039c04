//! Spontaneous decay of E1 and M1 emitters near a sphere whose permittivity
//! and permeability may take either sign, including left-handed spheres that
//! support high-Q surface resonances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod error;
pub mod figures;
pub mod medium;
pub mod mie;
pub mod rays;
pub mod resonance;
pub mod specfun;

pub use error::{Error, Result};
pub use medium::{
    classify_handedness, wave_argument, AtomSite, Handedness, HandednessClass, Medium, Orientation, SphereSystem,
    Transition, WaveArguments,
};
pub use mie::{p_te, q_tm, CoefficientTable, MieCoefficient, Polarization};
