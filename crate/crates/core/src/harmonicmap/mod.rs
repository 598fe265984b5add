//! ℘-harmonic map diagnostics and a discrete Dirichlet-energy minimizer.

mod minimize;
mod schwarz;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::annulusgrid::{laplacian_of, ComplexField, Precompose, PolarGrid, Wirtinger};
use crate::error::{Error, Result};
use crate::metricspace::MetricField;
use crate::radialfamily::RadialProfile;

pub use minimize::{minimize_energy, MinimizeOutcome, MinimizerOptions, SweepOrder};
pub use schwarz::{mu_schwarz_check, schwarz_distance_check, DistanceReport, MuSchwarzReport};

const MODULE: &str = "harmonicmap";

/// A map from a grid annulus into a target annulus carrying the metric ℘.
#[derive(Debug, Clone)]
pub struct HarmonicMapCandidate {
    pub f: ComplexField,
    pub metric: MetricField,
    /// (ρ_in, ρ_out) of the target annulus, when the map is meant to be onto one.
    pub target: Option<(f64, f64)>,
    /// Radial profile the map was sampled from, if any.
    pub profile: Option<Arc<RadialProfile>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub energy: f64,
    /// ∬℘²(f)(|f_z|² − |f_z̄|²), the ℘-area swept with multiplicity.
    pub area_lower_bound: f64,
    /// 2∬℘²(f)|f_z̄|², so that energy = area_lower_bound + excess.
    pub antiholomorphic_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfFit {
    pub c: f64,
    /// max |z²Hopf − c|/|c| over the fitted nodes; infinite when c is
    /// indistinguishable from zero but the samples scatter.
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilatation {
    pub m: f64,
    pub mu: f64,
    pub jacobian: f64,
    pub d_plus: f64,
    pub d_minus: f64,
}

/// Per-node Bochner defects; `None` where a log density meets a zero.
#[derive(Debug, Clone)]
pub struct BochnerField {
    pub grid: PolarGrid,
    pub plus: Vec<Option<f64>>,
    pub minus: Vec<Option<f64>>,
}

impl BochnerField {
    /// Sup-norms of both defects over interior nodes at least `collar` rows
    /// from the boundary, and the number of skipped nodes.
    pub fn sup_norms(&self, collar: usize) -> (f64, f64, usize) {
        let (mut a, mut b, mut skipped) = (0.0f64, 0.0f64, 0);
        for i in collar.max(1)..self.grid.n_u.saturating_sub(collar.max(1)) {
            for j in 0..self.grid.n_theta {
                let k = self.grid.idx(i, j);
                match (self.plus[k], self.minus[k]) {
                    (Some(p), Some(m)) => {
                        a = a.max(p.abs());
                        b = b.max(m.abs());
                    }
                    _ => skipped += 1,
                }
            }
        }
        (a, b, skipped)
    }
}

impl HarmonicMapCandidate {
    /// Wraps a sampled map; every sample must lie where ℘ is defined.
    pub fn new(f: ComplexField, metric: MetricField) -> Result<Self> {
        for k in 0..f.grid.len() {
            if let Err(e) = metric.value(f.samples[k]) {
                let (i, j) = f.grid.node(k);
                return Err(Error::domain(MODULE, format!("f leaves the metric domain at node ({i}, {j}): {e}")));
            }
        }
        Ok(HarmonicMapCandidate { f, metric, target: None, profile: None })
    }

    /// Declares the target annulus, checking that f maps into it within `tol`.
    pub fn with_target(mut self, rho_in: f64, rho_out: f64, tol: f64) -> Result<Self> {
        if !(rho_in >= 0.0 && rho_out > rho_in) {
            return Err(Error::arg(MODULE, format!("bad target annulus ({rho_in}, {rho_out})")));
        }
        for (k, w) in self.f.samples.iter().enumerate() {
            let r = w.norm();
            if r < rho_in - tol || r > rho_out + tol {
                let (i, j) = self.f.grid.node(k);
                return Err(Error::domain(
                    MODULE,
                    format!("|f| = {r} at node ({i}, {j}) outside the target annulus [{rho_in}, {rho_out}]"),
                ));
            }
        }
        self.target = Some((rho_in, rho_out));
        Ok(self)
    }

    pub fn domain(&self) -> &PolarGrid {
        &self.f.grid
    }

    pub fn derivatives(&self, i: usize, j: usize) -> Wirtinger {
        self.f.wirtinger(i, j)
    }

    fn rho_at(&self, i: usize, j: usize) -> Result<f64> {
        self.metric.value(self.f.at(i, j)).map_err(|e| {
            Error::domain(MODULE, format!("f leaves the metric domain at node ({i}, {j}): {e}"))
        })
    }

    /// Pre-composition with the rotation z ↦ e^{iα}z. Needs a closed form,
    /// since rotating grid samples would require interpolation.
    pub fn rotated(&self, alpha: f64) -> Result<Self> {
        let inner = self
            .f
            .analytic
            .clone()
            .ok_or_else(|| Error::unsupported(MODULE, "rotation needs a closed-form map"))?;
        let map = Arc::new(Precompose { inner, factor: Complex64::from_polar(1.0, alpha) });
        let f = ComplexField::from_analytic(self.f.grid.clone(), map)?;
        Ok(HarmonicMapCandidate { f, metric: self.metric.clone(), target: self.target, profile: self.profile.clone() })
    }

    /// ∬℘²(f)(|f_z|² + |f_z̄|²) dx dy: trapezoid in u, periodic sum in θ.
    pub fn dirichlet_energy(&self) -> Result<EnergyReport> {
        let g = &self.f.grid;
        let (mut hol, mut anti) = (0.0, 0.0);
        for i in 0..g.n_u {
            let wu = if i == 0 || i + 1 == g.n_u { 0.5 } else { 1.0 };
            let r2 = g.radius(i).powi(2);
            let (mut sh, mut sa) = (0.0, 0.0);
            for j in 0..g.n_theta {
                let rho = self.rho_at(i, j)?;
                let d = self.derivatives(i, j);
                let w = rho * rho * r2;
                sh += w * d.fz.norm_sqr();
                sa += w * d.fzb.norm_sqr();
            }
            hol += wu * sh;
            anti += wu * sa;
        }
        let cell = g.du() * g.dtheta();
        let (hol, anti) = (hol * cell, anti * cell);
        Ok(EnergyReport { energy: hol + anti, area_lower_bound: hol - anti, antiholomorphic_excess: 2.0 * anti })
    }

    /// f_zz̄ + (log℘²)_w(f)·f_z·f_z̄ at an interior node.
    pub fn harmonic_residual(&self, i: usize, j: usize) -> Result<Complex64> {
        if !self.f.grid.is_interior(i) {
            return Err(Error::InsufficientStencil { module: MODULE, i, j });
        }
        let d = self.derivatives(i, j);
        let mixed = self.f.mixed(i, j)?;
        if self.metric.is_euclidean() {
            return Ok(mixed);
        }
        let dl = self.metric.dlog_rho_sq_dw(self.f.at(i, j))?;
        Ok(mixed + dl * d.fz * d.fzb)
    }

    /// Sup-norm of the harmonic residual over nodes at least `collar` rows
    /// inside the boundary.
    pub fn residual_sup(&self, collar: usize) -> Result<f64> {
        let g = &self.f.grid;
        let mut worst = 0.0f64;
        for i in collar.max(1)..g.n_u.saturating_sub(collar.max(1)) {
            for j in 0..g.n_theta {
                worst = worst.max(self.harmonic_residual(i, j)?.norm());
            }
        }
        Ok(worst)
    }

    /// ℘²(f)·f_z·conj(f_z̄).
    pub fn hopf_differential(&self, i: usize, j: usize) -> Result<Complex64> {
        let rho = self.rho_at(i, j)?;
        let d = self.derivatives(i, j);
        Ok(d.fz * d.fzb.conj() * (rho * rho))
    }

    /// Area-weighted mean of z²·Hopf over nodes at least `collar` rows inside
    /// the boundary (at least one), with its maximal relative deviation.
    pub fn hopf_fit_c(&self, collar: usize) -> Result<HopfFit> {
        let g = &self.f.grid;
        let collar = collar.max(1);
        if 2 * collar >= g.n_u {
            return Err(Error::arg(MODULE, format!("collar {collar} leaves no rows on a {} grid", g)));
        }
        let mut vals = Vec::new();
        let (mut sum, mut wsum) = (Complex64::new(0.0, 0.0), 0.0);
        for i in collar..g.n_u - collar {
            let w = g.radius(i).powi(2);
            for j in 0..g.n_theta {
                let z = g.z(i, j);
                let v = z * z * self.hopf_differential(i, j)?;
                sum += v * w;
                wsum += w;
                vals.push(v);
            }
        }
        let c = (sum / wsum).re;
        let spread = vals.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
        const FLOOR: f64 = 1e-10;
        if c.abs() < FLOOR {
            let deviation = if spread < FLOOR { 0.0 } else { f64::INFINITY };
            return Ok(HopfFit { c: 0.0, deviation });
        }
        Ok(HopfFit { c, deviation: spread / c.abs() })
    }

    /// m, μ, J and |∂f|, |∂̄f| at a node.
    pub fn dilatation(&self, i: usize, j: usize) -> Result<Dilatation> {
        let rho = self.rho_at(i, j)?;
        let d = self.derivatives(i, j);
        let (a, b) = (d.fz.norm(), d.fzb.norm());
        if a == 0.0 {
            return Err(Error::singular(MODULE, format!("f_z = 0 at node ({i}, {j}); |f_zbar| = {b}")));
        }
        let m = b / a;
        Ok(Dilatation {
            m,
            mu: m.sqrt(),
            jacobian: rho * rho * (a * a - b * b),
            d_plus: rho * a,
            d_minus: rho * b,
        })
    }

    /// Number of interior nodes where J < −tol.
    pub fn orientation_violations(&self, tol: f64) -> Result<usize> {
        let g = &self.f.grid;
        let mut n = 0;
        for i in 1..g.n_u - 1 {
            for j in 0..g.n_theta {
                if self.dilatation(i, j).map(|d| d.jacobian < -tol).unwrap_or(false) {
                    n += 1;
                }
            }
        }
        Ok(n)
    }

    /// Δlog|∂f|² + 2K_℘J and Δlog|∂̄f|² − 2K_℘J on every interior node.
    pub fn bochner_field(&self) -> Result<BochnerField> {
        let g = &self.f.grid;
        let n = g.len();
        let (mut lp, mut lm) = (vec![f64::NAN; n], vec![f64::NAN; n]);
        let mut kj = vec![0.0; n];
        for k in 0..n {
            let (i, j) = g.node(k);
            let w = self.f.samples[k];
            let rho = self.rho_at(i, j)?;
            let d = self.derivatives(i, j);
            let (a, b) = (d.fz.norm_sqr(), d.fzb.norm_sqr());
            let r2 = rho * rho;
            if a > 0.0 {
                lp[k] = (r2 * a).ln();
            }
            if b > 0.0 {
                lm[k] = (r2 * b).ln();
            }
            if g.is_interior(i) && !self.metric.is_euclidean() {
                kj[k] = self.metric.gauss_curvature(w)? * r2 * (a - b);
            }
        }
        let mut plus = vec![None; n];
        let mut minus = vec![None; n];
        for k in 0..n {
            let (i, j) = g.node(k);
            if !g.is_interior(i) {
                continue;
            }
            let p = laplacian_of(g, &lp, i, j)?;
            let m = laplacian_of(g, &lm, i, j)?;
            if p.is_finite() {
                plus[k] = Some(p + 2.0 * kj[k]);
            }
            if m.is_finite() {
                minus[k] = Some(m - 2.0 * kj[k]);
            }
        }
        Ok(BochnerField { grid: g.clone(), plus, minus })
    }

    /// Bochner defects at one interior node.
    pub fn bochner_defect(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        if !self.f.grid.is_interior(i) {
            return Err(Error::InsufficientStencil { module: MODULE, i, j });
        }
        let field = self.bochner_field()?;
        let k = self.f.grid.idx(i, j);
        match (field.plus[k], field.minus[k]) {
            (Some(p), Some(m)) => Ok((p, m)),
            _ => Err(Error::singular(MODULE, format!("|∂f| or |∂̄f| vanishes in the stencil of ({i}, {j})"))),
        }
    }
}
