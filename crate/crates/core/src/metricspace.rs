//! Conformal metrics ℘ on planar domains.
//!
//! Radial metrics are stored as ρ(t), t = |w|, with analytic first and second
//! derivatives; their curvature uses the radial Laplacian of log ρ. Sampled
//! metrics live on a [`PolarGrid`] and are read through a bicubic
//! (Catmull-Rom) interpolant.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::annulusgrid::PolarGrid;
use crate::error::{Error, Result};
use crate::quad;

const MODULE: &str = "metricspace";

/// Relative step used by the finite-difference curvature when none is given.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Natural cubic spline through `(t, rho)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    t: Vec<f64>,
    rho: Vec<f64>,
    m: Vec<f64>,
}

impl RadialTable {
    pub fn new(t: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if t.len() != rho.len() {
            return Err(Error::arg(MODULE, "table columns differ in length"));
        }
        if t.len() < 2 {
            return Err(Error::arg(MODULE, "table needs at least two rows"));
        }
        for k in 0..t.len() {
            if !t[k].is_finite() || !rho[k].is_finite() {
                return Err(Error::arg(MODULE, format!("non-finite value in table row {}", k + 1)));
            }
            if t[k] < 0.0 {
                return Err(Error::arg(MODULE, format!("negative radius {} in table row {}", t[k], k + 1)));
            }
            if rho[k] <= 0.0 {
                return Err(Error::domain(MODULE, format!("rho = {} <= 0 at t = {}", rho[k], t[k])));
            }
            if k > 0 && t[k] <= t[k - 1] {
                return Err(Error::arg(MODULE, format!("radii not strictly increasing at row {}", k + 1)));
            }
        }
        let m = natural_spline_moments(&t, &rho);
        Ok(RadialTable { t, rho, m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// Value and first two derivatives, NaN outside the tabulated range.
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return (f64::NAN, f64::NAN, f64::NAN);
        }
        let n = self.t.len();
        let k = match self.t.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.t[k + 1] - self.t[k];
        let a = (self.t[k + 1] - x) / h;
        let b = (x - self.t[k]) / h;
        let (y0, y1, m0, m1) = (self.rho[k], self.rho[k + 1], self.m[k], self.m[k + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }
}

fn natural_spline_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior moments.
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i - 1] = 2.0 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for i in 1..k {
        let lower = x[i + 1] - x[i];
        let w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialKind {
    Euclidean,
    /// ρ = 2/(1+t²)
    Sphere,
    /// ρ = 2/(1−t²), t < 1
    Hyperbolic,
    /// ρ = t^k, t > 0
    Power(f64),
    /// ρ = 2/(1+a t²)
    Cigar(f64),
    Table(Arc<RadialTable>),
}

/// A radial conformal factor ℘(w) = scale·ρ(|w|).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMetric {
    pub kind: RadialKind,
    pub scale: f64,
}

impl RadialMetric {
    pub fn new(kind: RadialKind) -> Self {
        RadialMetric { kind, scale: 1.0 }
    }

    pub fn euclidean() -> Self {
        Self::new(RadialKind::Euclidean)
    }

    pub fn sphere() -> Self {
        Self::new(RadialKind::Sphere)
    }

    pub fn hyperbolic() -> Self {
        Self::new(RadialKind::Hyperbolic)
    }

    pub fn power(k: f64) -> Self {
        Self::new(RadialKind::Power(k))
    }

    pub fn cigar(a: f64) -> Self {
        Self::new(RadialKind::Cigar(a))
    }

    pub fn table(table: RadialTable) -> Self {
        Self::new(RadialKind::Table(Arc::new(table)))
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, RadialKind::Euclidean)
    }

    /// Short label, the same string [`parse_metric_spec`] accepts.
    pub fn name(&self) -> String {
        let base = match &self.kind {
            RadialKind::Euclidean => "euclidean".to_string(),
            RadialKind::Sphere => "sphere".to_string(),
            RadialKind::Hyperbolic => "hyperbolic".to_string(),
            RadialKind::Power(k) => format!("power:{k}"),
            RadialKind::Cigar(a) => format!("cigar:{a}"),
            RadialKind::Table(_) => "table".to_string(),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{base}*{}", self.scale)
        }
    }

    /// Open interval of radii on which ρ is defined and positive.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            RadialKind::Euclidean | RadialKind::Sphere => (0.0, f64::INFINITY),
            RadialKind::Hyperbolic => (0.0, 1.0),
            RadialKind::Power(k) => {
                if *k == 0.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::MIN_POSITIVE, f64::INFINITY)
                }
            }
            RadialKind::Cigar(a) => {
                if *a < 0.0 {
                    (0.0, 1.0 / (-a).sqrt())
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            RadialKind::Table(tab) => tab.range(),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.support();
        let lo_ok = if lo == 0.0 { t >= 0.0 } else { t >= lo };
        let hi_ok = match &self.kind {
            RadialKind::Table(_) => t <= hi,
            _ => t < hi,
        };
        t.is_finite() && lo_ok && hi_ok
    }

    /// ρ, ρ′, ρ″ at t. Values are NaN outside the support.
    pub fn jet(&self, t: f64) -> (f64, f64, f64) {
        if !self.contains(t) {
            return (f64::NAN, f64::NAN, f64::NAN);
        }
        let (r, d, dd) = match &self.kind {
            RadialKind::Euclidean => (1.0, 0.0, 0.0),
            RadialKind::Sphere => cigar_jet(1.0, t),
            RadialKind::Cigar(a) => cigar_jet(*a, t),
            RadialKind::Hyperbolic => {
                let q = 1.0 - t * t;
                (2.0 / q, 4.0 * t / (q * q), (4.0 + 12.0 * t * t) / (q * q * q))
            }
            RadialKind::Power(k) => {
                if *k == 0.0 {
                    (1.0, 0.0, 0.0)
                } else {
                    let v = t.powf(*k);
                    (v, k * v / t, k * (k - 1.0) * v / (t * t))
                }
            }
            RadialKind::Table(tab) => tab.eval(t),
        };
        (self.scale * r, self.scale * d, self.scale * dd)
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.jet(t).0
    }

    /// ρ at t, or a domain error if t is outside the support or ρ ≤ 0.
    pub fn rho_checked(&self, t: f64) -> Result<f64> {
        let r = self.rho(t);
        if r.is_finite() && r > 0.0 {
            Ok(r)
        } else {
            Err(Error::domain(MODULE, format!("rho({t}) = {r} for metric {}", self.name())))
        }
    }

    /// (log ρ)′ and (log ρ)″.
    pub fn log_derivatives(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            // Closed forms avoid cancellation near t = 0.
            RadialKind::Sphere => {
                let q = 1.0 + t * t;
                (-2.0 * t / q, -2.0 * (1.0 - t * t) / (q * q))
            }
            RadialKind::Cigar(a) => {
                let q = 1.0 + a * t * t;
                (-2.0 * a * t / q, -2.0 * a * (1.0 - a * t * t) / (q * q))
            }
            RadialKind::Hyperbolic => {
                let q = 1.0 - t * t;
                (2.0 * t / q, 2.0 * (1.0 + t * t) / (q * q))
            }
            RadialKind::Power(k) => (k / t, -k / (t * t)),
            _ => {
                let (r, d, dd) = self.jet(t);
                (d / r, dd / r - (d / r) * (d / r))
            }
        }
    }

    /// Analytic Gaussian curvature −Δlog ρ/ρ² at radius t.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        let r = self.rho_checked(t)?;
        let (l1, l2) = self.log_derivatives(t);
        let lap = if t == 0.0 {
            if l1 != 0.0 {
                return Err(Error::domain(MODULE, format!("log rho not smooth at the origin for {}", self.name())));
            }
            2.0 * l2
        } else {
            l2 + l1 / t
        };
        let k = -lap / (r * r);
        if k.is_finite() {
            Ok(k)
        } else {
            Err(Error::domain(MODULE, format!("curvature undefined at t = {t} for {}", self.name())))
        }
    }

    /// Curvature from the centred stencil on log ρ in u = log t, with step h
    /// in u; at t = 0 the step is h in t.
    pub fn curvature_fd(&self, t: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::arg(MODULE, "finite-difference step must be positive"));
        }
        let r = self.rho_checked(t)?;
        let lr = |x: f64| -> Result<f64> { Ok(self.rho_checked(x)?.ln()) };
        let lap = if t == 0.0 {
            // Δ = 2 d²/dt² at the centre of a radial function.
            let (a, b) = (lr(h)?, lr(0.0)?);
            2.0 * 2.0 * (a - b) / (h * h)
        } else {
            let (a, b, c) = (lr(t * h.exp())?, lr(t)?, lr(t * (-h).exp())?);
            (a - 2.0 * b + c) / (h * h * t * t)
        };
        Ok(-lap / (r * r))
    }

    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::arg(MODULE, format!("scale factor must be positive, got {r}")));
        }
        Ok(RadialMetric { kind: self.kind.clone(), scale: self.scale * r })
    }

    /// ℘-distance from the origin along a radius, ∫₀ᵗ ρ.
    pub fn geodesic_distance(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::arg(MODULE, format!("radius must be non-negative, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if let RadialKind::Power(k) = self.kind {
            if k <= -1.0 {
                return Err(Error::numeric(MODULE, format!("integral of t^{k} diverges at the origin")));
            }
        }
        let (lo, _) = self.support();
        if lo > 0.0 && !matches!(self.kind, RadialKind::Power(_)) {
            return Err(Error::domain(MODULE, format!("metric undefined below t = {lo}")));
        }
        if !self.contains(t) {
            return Err(Error::domain(MODULE, format!("t = {t} outside the support of {}", self.name())));
        }
        quad::integrate(|y| self.rho(y), 0.0, t, 1e-13, MODULE)
    }

    /// 2π∫ρ²t dt over r_in ≤ t ≤ r_out.
    pub fn area(&self, r_in: f64, r_out: f64) -> Result<f64> {
        check_annulus(r_in, r_out)?;
        if !self.contains(r_in) || !self.contains(r_out) {
            return Err(Error::domain(MODULE, format!("annulus ({r_in}, {r_out}) leaves the support of {}", self.name())));
        }
        let v = quad::integrate(|t| self.rho(t).powi(2) * t, r_in, r_out, 1e-13, MODULE)?;
        Ok(2.0 * PI * v)
    }
}

fn cigar_jet(a: f64, t: f64) -> (f64, f64, f64) {
    let q = 1.0 + a * t * t;
    (2.0 / q, -4.0 * a * t / (q * q), (12.0 * a * a * t * t - 4.0 * a) / (q * q * q))
}

fn check_annulus(r_in: f64, r_out: f64) -> Result<()> {
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::arg(MODULE, format!("annulus needs 0 < r_in < r_out, got ({r_in}, {r_out})")));
    }
    Ok(())
}

/// Grid-sampled conformal factor.
#[derive(Debug, Clone)]
pub struct SampledMetric {
    pub grid: PolarGrid,
    pub values: Vec<f64>,
}

impl SampledMetric {
    pub fn new(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::arg(MODULE, format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::domain(MODULE, format!("sample {k} is {} (must be positive)", values[k])));
        }
        Ok(SampledMetric { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.z_at(k))).collect();
        Self::new(grid, values)
    }

    fn inside(&self, w: Complex64) -> bool {
        let t = w.norm();
        t >= self.grid.r_in * (1.0 - 1e-12) && t <= self.grid.r_out * (1.0 + 1e-12)
    }

    fn sample(&self, i: isize, j: isize) -> f64 {
        let n_u = self.grid.n_u as isize;
        let jj = j.rem_euclid(self.grid.n_theta as isize) as usize;
        let at = |i: usize| self.values[self.grid.idx(i, jj)];
        if i < 0 {
            2.0 * at(0) - at(1)
        } else if i >= n_u {
            2.0 * at((n_u - 1) as usize) - at((n_u - 2) as usize)
        } else {
            at(i as usize)
        }
    }

    /// Interpolated value with its (u, θ) partial derivatives.
    pub fn interpolate(&self, w: Complex64) -> Result<(f64, f64, f64)> {
        if !self.inside(w) {
            return Err(Error::domain(MODULE, format!("point {w} outside the sampled annulus")));
        }
        let g = &self.grid;
        let x = ((w.norm().ln() - g.u(0)) / g.du()).clamp(0.0, (g.n_u - 1) as f64);
        let th = w.arg().rem_euclid(2.0 * PI);
        let y = th / g.dtheta();
        let i0 = (x.floor() as isize).min(g.n_u as isize - 2);
        let j0 = y.floor() as isize;
        let fx = x - i0 as f64;
        let fy = y - j0 as f64;
        let (wx, dwx) = catmull_rom_weights(fx);
        let (wy, dwy) = catmull_rom_weights(fy);
        let (mut v, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let s = self.sample(i0 - 1 + a as isize, j0 - 1 + b as isize);
                v += wx[a] * wy[b] * s;
                vx += dwx[a] * wy[b] * s;
                vy += wx[a] * dwy[b] * s;
            }
        }
        Ok((v, vx / g.du(), vy / g.dtheta()))
    }
}

fn catmull_rom_weights(t: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let w = [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ];
    let d = [
        0.5 * (-3.0 * t2 + 4.0 * t - 1.0),
        0.5 * (9.0 * t2 - 10.0 * t),
        0.5 * (-9.0 * t2 + 8.0 * t + 1.0),
        0.5 * (3.0 * t2 - 2.0 * t),
    ];
    (w, d)
}

/// A conformal metric on a planar domain.
#[derive(Debug, Clone)]
pub enum MetricField {
    Radial(RadialMetric),
    Sampled(Arc<SampledMetric>),
}

impl From<RadialMetric> for MetricField {
    fn from(m: RadialMetric) -> Self {
        MetricField::Radial(m)
    }
}

impl MetricField {
    pub fn euclidean() -> Self {
        MetricField::Radial(RadialMetric::euclidean())
    }

    pub fn sampled(m: SampledMetric) -> Self {
        MetricField::Sampled(Arc::new(m))
    }

    pub fn as_radial(&self) -> Option<&RadialMetric> {
        match self {
            MetricField::Radial(r) => Some(r),
            MetricField::Sampled(_) => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.as_radial().is_some_and(|r| r.is_euclidean())
    }

    pub fn name(&self) -> String {
        match self {
            MetricField::Radial(r) => r.name(),
            MetricField::Sampled(_) => "sampled".to_string(),
        }
    }

    /// ℘(w), or a domain error if w lies outside the metric's domain.
    pub fn value(&self, w: Complex64) -> Result<f64> {
        match self {
            MetricField::Radial(r) => r.rho_checked(w.norm()),
            MetricField::Sampled(s) => {
                let v = s.interpolate(w)?.0;
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(Error::domain(MODULE, format!("interpolated metric {v} <= 0 at {w}")))
                }
            }
        }
    }

    /// ∇(℘²) packed as ∂ₓ + i∂ᵧ.
    pub fn grad_rho_sq(&self, w: Complex64) -> Result<Complex64> {
        match self {
            MetricField::Radial(r) => {
                let t = w.norm();
                let (v, d, _) = r.jet(t);
                if !(v > 0.0) {
                    return Err(Error::domain(MODULE, format!("metric undefined at {w}")));
                }
                if t == 0.0 || d == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(w * (2.0 * v * d / t))
            }
            MetricField::Sampled(s) => {
                let (v, vu, vth) = s.interpolate(w)?;
                // (F_u + iF_θ)/conj(w) is the Cartesian gradient of F.
                let g = Complex64::new(vu, vth) / w.conj();
                Ok(g * (2.0 * v))
            }
        }
    }

    /// (log ℘²)_w = ∂_w log ℘².
    pub fn dlog_rho_sq_dw(&self, w: Complex64) -> Result<Complex64> {
        let v = self.value(w)?;
        let g = self.grad_rho_sq(w)?;
        // ∂_w F = conj(∇F)/2 for real F.
        Ok(g.conj() / (2.0 * v * v))
    }

    /// Gaussian curvature, analytic for radial metrics and by finite
    /// differences (default step) for sampled ones.
    pub fn gauss_curvature(&self, w: Complex64) -> Result<f64> {
        match self {
            MetricField::Radial(r) => r.curvature(w.norm()),
            MetricField::Sampled(_) => self.gauss_curvature_fd(w, None),
        }
    }

    /// −Δlog℘/℘² by the Cartesian five-point stencil. The step defaults to
    /// `DEFAULT_FD_STEP` times max(|w|, 1).
    pub fn gauss_curvature_fd(&self, w: Complex64, h: Option<f64>) -> Result<f64> {
        let h = h.unwrap_or(DEFAULT_FD_STEP * w.norm().max(1.0));
        if !(h > 0.0) {
            return Err(Error::arg(MODULE, "finite-difference step must be positive"));
        }
        let pts = [
            w,
            w + Complex64::new(h, 0.0),
            w - Complex64::new(h, 0.0),
            w + Complex64::new(0.0, h),
            w - Complex64::new(0.0, h),
        ];
        let mut l = [0.0; 5];
        for (k, p) in pts.iter().enumerate() {
            l[k] = match self.value(*p) {
                Ok(v) => v.ln(),
                Err(e) => {
                    if let MetricField::Sampled(s) = self {
                        let (i, j) = s.grid.nearest_node(w);
                        return Err(Error::InsufficientStencil { module: MODULE, i, j });
                    }
                    return Err(e);
                }
            };
        }
        let lap = (l[1] + l[2] + l[3] + l[4] - 4.0 * l[0]) / (h * h);
        let v = l[0].exp();
        Ok(-lap / (v * v))
    }

    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::arg(MODULE, format!("scale factor must be positive, got {r}")));
        }
        Ok(match self {
            MetricField::Radial(m) => MetricField::Radial(m.scaled(r)?),
            MetricField::Sampled(s) => MetricField::Sampled(Arc::new(SampledMetric {
                grid: s.grid.clone(),
                values: s.values.iter().map(|v| v * r).collect(),
            })),
        })
    }

    /// ∬℘² dA over the annulus r_in < |w| < r_out.
    pub fn area(&self, r_in: f64, r_out: f64) -> Result<f64> {
        match self {
            MetricField::Radial(m) => m.area(r_in, r_out),
            MetricField::Sampled(s) => {
                check_annulus(r_in, r_out)?;
                let n = 4 * s.grid.n_theta;
                let ring = |t: f64| -> f64 {
                    let mut acc = 0.0;
                    for k in 0..n {
                        let th = 2.0 * PI * k as f64 / n as f64;
                        match self.value(Complex64::from_polar(t, th)) {
                            Ok(v) => acc += v * v,
                            Err(_) => return f64::NAN,
                        }
                    }
                    acc * 2.0 * PI / n as f64 * t
                };
                if !s.inside(Complex64::new(r_in, 0.0)) || !s.inside(Complex64::new(r_out, 0.0)) {
                    return Err(Error::domain(MODULE, "annulus leaves the sampled grid"));
                }
                quad::integrate(ring, r_in, r_out, 1e-10, MODULE)
            }
        }
    }

    /// κ² = sup|K_℘| over a polar sample of the annulus, with the check
    /// 2Rκ < π for the geodesic radius R of the outer circle (radial only).
    pub fn curvature_hypothesis(&self, r_in: f64, r_out: f64, samples: usize) -> Result<CurvatureHypothesis> {
        check_annulus(r_in, r_out)?;
        let n = samples.max(2);
        let mut kappa_sq: f64 = 0.0;
        for a in 0..n {
            let t = r_in * (r_out / r_in).powf(a as f64 / (n - 1) as f64);
            for b in 0..n {
                let th = 2.0 * PI * b as f64 / n as f64;
                let k = self.gauss_curvature(Complex64::from_polar(t, th))?;
                kappa_sq = kappa_sq.max(k.abs());
            }
        }
        let radius = match self {
            MetricField::Radial(m) => m.geodesic_distance(r_out).ok(),
            MetricField::Sampled(_) => None,
        };
        let satisfied = radius.map(|r| 2.0 * r * kappa_sq.sqrt() < PI);
        Ok(CurvatureHypothesis { kappa_sq, geodesic_radius: radius, satisfied })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureHypothesis {
    pub kappa_sq: f64,
    pub geodesic_radius: Option<f64>,
    /// `None` when the geodesic radius is unavailable (sampled metrics).
    pub satisfied: Option<bool>,
}

/// Parses `euclidean`, `sphere`, `hyperbolic`, `power:<k>` or `cigar:<a>`.
pub fn parse_metric_spec(spec: &str) -> Result<RadialMetric> {
    let s = spec.trim();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (s, None),
    };
    let num = |a: Option<&str>| -> Result<f64> {
        let a = a.ok_or_else(|| Error::arg(MODULE, format!("metric '{head}' needs a parameter")))?;
        let v: f64 = a.parse().map_err(|_| Error::arg(MODULE, format!("bad metric parameter '{a}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::arg(MODULE, format!("metric parameter must be finite, got '{a}'")))
        }
    };
    let no_arg = |m: RadialMetric| -> Result<RadialMetric> {
        match arg {
            None => Ok(m),
            Some(_) => Err(Error::arg(MODULE, format!("metric '{head}' takes no parameter"))),
        }
    };
    match head {
        "euclidean" => no_arg(RadialMetric::euclidean()),
        "sphere" => no_arg(RadialMetric::sphere()),
        "hyperbolic" => no_arg(RadialMetric::hyperbolic()),
        "power" => Ok(RadialMetric::power(num(arg)?)),
        "cigar" => Ok(RadialMetric::cigar(num(arg)?)),
        _ => Err(Error::arg(MODULE, format!("unknown metric '{s}'"))),
    }
}

/// Reads a two-column `t,rho` table. A header line is optional; `#` starts
/// a comment line.
pub fn parse_radial_table(text: &str) -> Result<RadialTable> {
    let mut t = Vec::new();
    let mut rho = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::parse(n + 1, format!("expected 2 columns, found {}", cols.len())));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::parse(n + 1, "non-finite value"));
                }
                t.push(a);
                rho.push(b);
            }
            _ if t.is_empty() && rho.is_empty() && cols[0].parse::<f64>().is_err() => continue,
            _ => return Err(Error::parse(n + 1, format!("cannot parse '{line}'"))),
        }
    }
    RadialTable::new(t, rho).map_err(|e| match e {
        Error::Argument { msg, .. } | Error::Domain { msg, .. } => Error::parse(0, msg),
        other => other,
    })
}
