//! Minimal graphs in conformal product manifolds (Ω, ℘) × ℝ built from
//! ℘-harmonic maps between annuli, with curvature estimates and bound checks.

pub mod annulusgrid;
pub mod bounds;
pub mod config;
pub mod curvature;
pub mod error;
pub mod harmonicmap;
pub mod metricspace;
pub mod minimalsurface;
mod quad;
pub mod radialfamily;

pub use error::{Error, Result};
