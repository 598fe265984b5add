use num_complex::Complex64;
use serde::Serialize;

use super::{HarmonicMapCandidate, MODULE};
use crate::bounds::phi_flat;
use crate::error::{Error, Result};
use crate::metricspace::MetricField;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuSchwarzReport {
    /// max μ(z)/|z| over the grid.
    pub max_ratio: f64,
    pub witness: (usize, usize),
    /// Slope of log|Hopf| against log|z| over the innermost tenth of radii.
    pub hopf_zero_order: f64,
    /// |f_z̄| at the origin (or its innermost-row estimate).
    pub fzb_origin: f64,
    /// f_z̄(0) = 0 and a Hopf zero of order at least two.
    pub hypotheses_hold: bool,
    /// Claim verified: hypotheses hold and max_ratio ≤ 1 + tol.
    pub pass: bool,
}

/// Checks μ(z) ≤ |z| on a disk-like grid.
pub fn mu_schwarz_check(cand: &HarmonicMapCandidate, tol: f64) -> Result<MuSchwarzReport> {
    let g = cand.domain();
    let mut max_ratio = 0.0f64;
    let mut witness = (0, 0);
    for i in 0..g.n_u {
        let r = g.radius(i);
        for j in 0..g.n_theta {
            let d = cand.derivatives(i, j);
            let a = d.fz.norm();
            let ratio = if a == 0.0 { f64::INFINITY } else { (d.fzb.norm() / a).sqrt() / r };
            if ratio > max_ratio || (ratio.is_nan() && !max_ratio.is_nan()) {
                max_ratio = ratio;
                witness = (i, j);
            }
        }
    }

    let rows = (g.n_u / 10).max(2);
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..rows {
        let mut mean = 0.0;
        for j in 0..g.n_theta {
            mean += cand.hopf_differential(i, j)?.norm();
        }
        mean /= g.n_theta as f64;
        if mean > 0.0 {
            let (x, y) = (g.radius(i).ln(), mean.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1.0;
        }
    }
    let hopf_zero_order = if n >= 2.0 { (n * sxy - sx * sy) / (n * sxx - sx * sx) } else { f64::INFINITY };

    let fzb_origin = match &cand.f.analytic {
        Some(map) => map.wirtinger(Complex64::new(0.0, 0.0)).1.norm(),
        None => {
            let s: Complex64 = (0..g.n_theta).map(|j| cand.derivatives(0, j).fzb).sum();
            (s / g.n_theta as f64).norm()
        }
    };
    let hypotheses_hold = fzb_origin <= 1e-8 && hopf_zero_order >= 1.75;
    let pass = hypotheses_hold && max_ratio <= 1.0 + tol;
    Ok(MuSchwarzReport { max_ratio, witness, hopf_zero_order, fzb_origin, hypotheses_hold, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    /// max over nodes of d_℘(f(z), origin_image) − R·φ₀(|z|).
    pub max_excess: f64,
    pub witness: (usize, usize),
    pub pass: bool,
}

/// Flat Schwarz-lemma comparison d_℘(f(z), f(0)) ≤ R·φ₀(|z|) for a map of
/// the unit disk into the geodesic disk of radius `radius` about
/// `origin_image`.
pub fn schwarz_distance_check(
    cand: &HarmonicMapCandidate,
    origin_image: Complex64,
    radius: f64,
    tol: f64,
) -> Result<DistanceReport> {
    if !(radius > 0.0) {
        return Err(Error::arg(MODULE, format!("geodesic radius must be positive, got {radius}")));
    }
    let g = cand.domain();
    if g.r_out > 1.0 {
        return Err(Error::arg(MODULE, format!("domain {g} is not inside the unit disk")));
    }
    let radial = match &cand.metric {
        MetricField::Radial(r) => r,
        MetricField::Sampled(_) => {
            return Err(Error::unsupported(MODULE, "geodesic distance needs a radial metric"));
        }
    };
    if !radial.is_euclidean() && origin_image.norm() != 0.0 {
        return Err(Error::unsupported(MODULE, "geodesic distance of a curved radial metric is only available from 0"));
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut witness = (0, 0);
    for i in 0..g.n_u {
        let phi = phi_flat(g.radius(i).min(1.0))?;
        for j in 0..g.n_theta {
            let w = cand.f.at(i, j);
            let d = if radial.is_euclidean() {
                radial.scale * (w - origin_image).norm()
            } else {
                radial.geodesic_distance(w.norm())?
            };
            let ex = d - radius * phi;
            if ex > max_excess {
                max_excess = ex;
                witness = (i, j);
            }
        }
    }
    Ok(DistanceReport { max_excess, witness, pass: max_excess <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulusgrid::{ComplexField, HarmonicPoly, PolarGrid};
    use std::sync::Arc;

    fn disk_map(map: HarmonicPoly) -> HarmonicMapCandidate {
        let g = PolarGrid::disk(1e-3, 64, 32).unwrap();
        let f = ComplexField::from_analytic(g, Arc::new(map)).unwrap();
        HarmonicMapCandidate::new(f, MetricField::euclidean()).unwrap()
    }

    #[test]
    fn cubic_perturbation_passes() {
        let r = mu_schwarz_check(&disk_map(HarmonicPoly::perturbed_identity(0.2, 3)), 1e-6).unwrap();
        assert!((r.max_ratio - 0.6f64.sqrt()).abs() < 1e-12, "{}", r.max_ratio);
        assert!((r.hopf_zero_order - 2.0).abs() < 1e-6);
        assert!(r.pass);
    }

    #[test]
    fn quadratic_perturbation_is_flagged() {
        let r = mu_schwarz_check(&disk_map(HarmonicPoly::perturbed_identity(0.3, 2)), 1e-6).unwrap();
        assert!((r.hopf_zero_order - 1.0).abs() < 1e-6);
        assert!(!r.hypotheses_hold && !r.pass);
        assert!(r.max_ratio > 1.0);
    }

    #[test]
    fn identity_distance() {
        let r = schwarz_distance_check(&disk_map(HarmonicPoly::identity()), Complex64::new(0.0, 0.0), 1.0, 1e-12)
            .unwrap();
        assert!(r.pass && r.max_excess <= 1e-15);
    }
}
