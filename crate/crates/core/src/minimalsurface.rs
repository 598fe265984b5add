//! Minimal graphs and conformal minimal immersions in (Ω, ℘) × ℝ.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::annulusgrid::{d_theta, d_u, divergence, gradient, ComplexField, HarmonicPoly, PolarGrid};
use crate::error::{Error, Result};
use crate::harmonicmap::HarmonicMapCandidate;
use crate::metricspace::{MetricField, RadialMetric};
use crate::radialfamily::{admissibility, radial_map, solve_profile, RadialProfile};

const MODULE: &str = "minimalsurface";

/// Threshold below which h_z or f_z̄ count as zero in the normal.
const ZERO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImmersionKind {
    /// h = h₀ + 2√(−c)·log|z|
    Catenoidal,
    /// h = h₀ + 2√c·θ on the chart θ ∈ (−π, π]
    Helicoidal,
    /// c = 0, h ≡ h₀
    Flat,
}

/// h(z) = d/2 + h₀ + (d/log R²)·log|z| on A(1/R, R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightFunction {
    pub r: f64,
    pub d: f64,
    pub h0: f64,
}

pub fn height_function(r: f64, d: f64, h0: f64) -> Result<HeightFunction> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::arg(MODULE, format!("height function needs R > 1, got {r}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::arg(MODULE, format!("height function needs d > 0, got {d}")));
    }
    Ok(HeightFunction { r, d, h0 })
}

impl HeightFunction {
    pub fn at(&self, modulus: f64) -> f64 {
        self.d / 2.0 + self.h0 + self.d / (self.r * self.r).ln() * modulus.ln()
    }
}

/// A conformal minimal immersion χ = (f, h).
#[derive(Debug, Clone)]
pub struct ConformalImmersion {
    pub f: HarmonicMapCandidate,
    pub kind: ImmersionKind,
    pub c: f64,
    pub h0: f64,
    /// Sampled heights, on the θ-chart for helicoidal kind.
    pub height: Vec<f64>,
}

/// Angle in (−π, π].
fn chart_angle(z: Complex64) -> f64 {
    let a = z.arg();
    if a == -PI {
        PI
    } else {
        a
    }
}

impl ConformalImmersion {
    /// Pairs a horizontal map whose Hopf differential is c/z² with the
    /// matching height.
    pub fn new(f: HarmonicMapCandidate, c: f64, h0: f64) -> Result<Self> {
        if !c.is_finite() || !h0.is_finite() {
            return Err(Error::arg(MODULE, "c and h0 must be finite"));
        }
        let kind = if c < 0.0 {
            ImmersionKind::Catenoidal
        } else if c > 0.0 {
            ImmersionKind::Helicoidal
        } else {
            ImmersionKind::Flat
        };
        let a = 2.0 * c.abs().sqrt();
        let g = f.domain().clone();
        let height = (0..g.len())
            .map(|k| {
                let z = g.z_at(k);
                match kind {
                    ImmersionKind::Catenoidal => h0 + a * z.norm().ln(),
                    ImmersionKind::Helicoidal => h0 + a * chart_angle(z),
                    ImmersionKind::Flat => h0,
                }
            })
            .collect();
        Ok(ConformalImmersion { f, kind, c, h0, height })
    }

    /// The rotationally symmetric immersion of a radial profile.
    pub fn from_profile(profile: Arc<RadialProfile>, grid: PolarGrid, h0: f64) -> Result<Self> {
        let c = profile.c;
        let f = radial_map(profile, grid)?;
        Self::new(f, c, h0)
    }

    pub fn grid(&self) -> &PolarGrid {
        self.f.domain()
    }

    pub fn profile(&self) -> Option<&Arc<RadialProfile>> {
        self.f.profile.as_ref()
    }

    /// 2√|c|
    pub fn rate(&self) -> f64 {
        2.0 * self.c.abs().sqrt()
    }

    /// Closed-form h_z at z.
    pub fn h_z(&self, z: Complex64) -> Complex64 {
        let a = self.rate();
        match self.kind {
            ImmersionKind::Catenoidal => a / (2.0 * z),
            ImmersionKind::Helicoidal => Complex64::new(0.0, -a) / (2.0 * z),
            ImmersionKind::Flat => Complex64::new(0.0, 0.0),
        }
    }

    /// h_z from the sampled heights, unwrapping the chart seam.
    pub fn h_z_fd(&self, i: usize, j: usize) -> Complex64 {
        let g = self.grid();
        let (hu, _) = d_u(g, &self.height, i, j);
        let ht = if self.kind == ImmersionKind::Helicoidal {
            let period = 2.0 * PI * self.rate();
            let base = self.height[g.idx(i, j)];
            let unwrap = |v: f64| v - period * ((v - base) / period).round();
            let mut acc = 0.0;
            for (k, w) in g.angular_order.first().iter().enumerate() {
                let s = (k + 1) as isize;
                let p = unwrap(self.height[g.idx(i, g.wrap(j as isize + s))]);
                let m = unwrap(self.height[g.idx(i, g.wrap(j as isize - s))]);
                acc += (p - m) * w;
            }
            acc / g.dtheta()
        } else {
            d_theta(g, &self.height, i, j)
        };
        Complex64::new(hu, -ht) / (2.0 * g.z(i, j))
    }

    /// (f_z, f_z̄, h_z, ℘(f)) at a node; closed forms when the map has them.
    pub fn jets(&self, i: usize, j: usize) -> Result<(Complex64, Complex64, Complex64, f64)> {
        let d = self.f.derivatives(i, j);
        let z = self.grid().z(i, j);
        let hz = if self.f.f.analytic.is_some() { self.h_z(z) } else { self.h_z_fd(i, j) };
        let rho = self.f.metric.value(self.f.f.at(i, j))?;
        Ok((d.fz, d.fzb, hz, rho))
    }

    /// (|χ_x|² − |χ_y|², ⟨χ_x, χ_y⟩) in the product metric ℘²|dw|² + dt².
    pub fn conformality_defect(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        let (fz, fzb, hz, rho) = self.jets(i, j)?;
        let fx = fz + fzb;
        let fy = Complex64::i() * (fz - fzb);
        let (hx, hy) = (2.0 * hz.re, -2.0 * hz.im);
        let r2 = rho * rho;
        let e = r2 * fx.norm_sqr() + hx * hx;
        let g = r2 * fy.norm_sqr() + hy * hy;
        let cross = r2 * (fx * fy.conj()).re + hx * hy;
        Ok((e - g, cross))
    }

    /// Unit normal, with a flag when the vertical limit was taken.
    pub fn unit_normal(&self, i: usize, j: usize) -> Result<NormalSample> {
        let (_, fzb, hz, rho) = self.jets(i, j)?;
        if hz.norm() <= ZERO {
            let n = if fzb.norm() <= ZERO { [0.0, 0.0, -1.0] } else { [0.0, 0.0, 1.0] };
            return Ok(NormalSample { n, vertical_limit: true });
        }
        let big_f = -(fzb * rho) / hz.conj();
        Ok(NormalSample { n: normal_from_f(big_f, rho), vertical_limit: false })
    }

    /// Classifies the tangent plane by the second dilatation μ.
    pub fn tangent_plane(&self, i: usize, j: usize, tol: f64) -> Result<TangentPlane> {
        let d = self.f.derivatives(i, j);
        let a = d.fz.norm();
        let mu = if a == 0.0 { f64::INFINITY } else { (d.fzb.norm() / a).sqrt() };
        Ok(classify_plane(mu, tol))
    }

    /// The conjugate surface: the radial profile re-solved with −c on the
    /// same domain, with height 2√|c|·θ or 2√|c|·log|z|.
    pub fn conjugate_surface(&self) -> Result<ConformalImmersion> {
        let p = self
            .profile()
            .ok_or_else(|| Error::unsupported(MODULE, "conjugation needs a radial profile"))?;
        let metric = p.metric.clone();
        let g = self.grid().clone();
        let q = solve_profile(&metric, -p.c, p.s_lo, p.s_hi)?;
        ConformalImmersion::from_profile(Arc::new(q), g, self.h0)
    }

    /// Writes `u,theta,x,y,height,K,Nx,Ny,Nz`; `curvature` is indexed like
    /// the grid.
    pub fn write_csv<W: Write>(&self, out: W, curvature: &[f64]) -> Result<()> {
        let g = self.grid();
        if curvature.len() != g.len() {
            return Err(Error::arg(MODULE, format!("expected {} curvature values, got {}", g.len(), curvature.len())));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "theta", "x", "y", "height", "K", "Nx", "Ny", "Nz"])?;
        for k in 0..g.len() {
            let (i, j) = g.node(k);
            let p = self.f.f.samples[k];
            let n = self.unit_normal(i, j)?.n;
            w.write_record(
                [g.u(i), g.theta(j), p.re, p.im, self.height[k], curvature[k], n[0], n[1], n[2]].map(|v| v.to_string()),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// ASCII OBJ mesh; each vertex is followed by a `# K` comment line.
    /// The helicoidal chart seam is left open.
    pub fn write_obj<W: Write>(&self, mut out: W, curvature: &[f64]) -> Result<()> {
        let g = self.grid();
        if curvature.len() != g.len() {
            return Err(Error::arg(MODULE, format!("expected {} curvature values, got {}", g.len(), curvature.len())));
        }
        writeln!(out, "# minimal surface, {g}")?;
        for k in 0..g.len() {
            let p = self.f.f.samples[k];
            writeln!(out, "v {} {} {}", p.re, p.im, self.height[k])?;
            writeln!(out, "# K {}", curvature[k])?;
        }
        for i in 0..g.n_u - 1 {
            for j in 0..g.n_theta {
                let jn = (j + 1) % g.n_theta;
                let seam = chart_angle(g.z(0, jn)) < chart_angle(g.z(0, j));
                if self.kind == ImmersionKind::Helicoidal && seam {
                    continue;
                }
                let a = g.idx(i, j) + 1;
                let b = g.idx(i + 1, j) + 1;
                let c = g.idx(i + 1, jn) + 1;
                let d = g.idx(i, jn) + 1;
                writeln!(out, "f {a} {b} {c}")?;
                writeln!(out, "f {a} {c} {d}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalSample {
    pub n: [f64; 3],
    pub vertical_limit: bool,
}

/// N = (2ReF/℘, 2ImF/℘, |F|² − 1)/(1 + |F|²).
pub fn normal_from_f(f: Complex64, rho: f64) -> [f64; 3] {
    let m = f.norm_sqr();
    let s = 1.0 + m;
    [2.0 * f.re / (rho * s), 2.0 * f.im / (rho * s), (m - 1.0) / s]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TangentPlane {
    Horizontal,
    Vertical,
    Tilted,
}

pub fn classify_plane(mu: f64, tol: f64) -> TangentPlane {
    if mu.abs() <= tol {
        TangentPlane::Horizontal
    } else if (mu.abs() - 1.0).abs() <= tol {
        TangentPlane::Vertical
    } else {
        TangentPlane::Tilted
    }
}

/// The Euclidean catenoid between heights v1 and v1 + d, conformally
/// parametrised by A(1/R, R), R = e^{d/2}, with the equator at |z| = 1.
pub fn catenoid_piece(v1: f64, d: f64, n_u: usize, n_theta: usize) -> Result<ConformalImmersion> {
    if !(d > 0.0 && d.is_finite() && v1.is_finite()) {
        return Err(Error::arg(MODULE, format!("catenoid piece needs d > 0 and finite v1, got v1 = {v1}, d = {d}")));
    }
    let vm = v1 + d / 2.0;
    let grid = PolarGrid::symmetric((d / 2.0).exp(), n_u, n_theta)?;
    let map = HarmonicPoly::nitsche(vm.exp() / 2.0, (-vm).exp() / 2.0);
    let f = ComplexField::from_analytic(grid, Arc::new(map))?;
    let f = HarmonicMapCandidate::new(f, MetricField::euclidean())?;
    ConformalImmersion::new(f, -0.25, vm)
}

/// Closed-form data of a graph built from a radial profile.
#[derive(Debug, Clone)]
pub struct RadialGraph {
    pub profile: Arc<RadialProfile>,
    pub offset: f64,
}

/// A height function ω over a target annulus grid.
#[derive(Debug, Clone)]
pub struct MinimalGraph {
    pub grid: PolarGrid,
    pub omega: Vec<f64>,
    pub metric: MetricField,
    /// Sign applied to the radial closed form; −ω has orientation −1
    /// relative to ω.
    pub orientation: f64,
    pub radial: Option<RadialGraph>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxReport {
    /// sup |N + orientation·2√(−c)/w̄| over all nodes.
    pub flux_defect: f64,
    /// sup |div N| over interior nodes at least two rows from the boundary.
    pub divergence_sup: f64,
    pub analytic: bool,
}

impl MinimalGraph {
    pub fn new(grid: PolarGrid, omega: Vec<f64>, metric: MetricField) -> Result<Self> {
        if omega.len() != grid.len() {
            return Err(Error::arg(MODULE, format!("expected {} heights, got {}", grid.len(), omega.len())));
        }
        if let Some(k) = omega.iter().position(|v| !v.is_finite()) {
            let (i, j) = grid.node(k);
            return Err(Error::arg(MODULE, format!("non-finite height at node ({i}, {j})")));
        }
        Ok(MinimalGraph { grid, omega, metric, orientation: 1.0, radial: None, note: None })
    }

    pub fn from_fn(grid: PolarGrid, metric: MetricField, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        let omega = (0..grid.len()).map(|k| f(grid.z_at(k))).collect();
        Self::new(grid, omega, metric)
    }

    /// The graph of −ω.
    pub fn reflected(&self) -> Self {
        let mut g = self.clone();
        g.omega.iter_mut().for_each(|v| *v = -*v);
        g.orientation = -self.orientation;
        if let Some(r) = g.radial.as_mut() {
            r.offset = -r.offset;
        }
        g
    }

    /// Drops the closed form, forcing finite differences.
    pub fn without_analytic(&self) -> Self {
        MinimalGraph { radial: None, ..self.clone() }
    }

    fn radial_slope(&self, r: &RadialGraph, t: f64) -> Result<f64> {
        let p = &r.profile;
        let g = admissibility(&p.metric, p.c, t);
        if !(g > 0.0) {
            return Err(Error::domain(MODULE, format!("graph gradient undefined at |w| = {t} (4c + t²ρ² = {g})")));
        }
        Ok(-self.orientation * 2.0 * (-p.c).sqrt() * p.metric.rho(t) / g.sqrt())
    }

    /// ω at an arbitrary point, from the closed form.
    pub fn omega_at(&self, w: Complex64) -> Result<f64> {
        let r = self.radial.as_ref().ok_or_else(|| Error::unsupported(MODULE, "no closed form for this graph"))?;
        let p = &r.profile;
        Ok(r.offset - self.orientation * 2.0 * (-p.c).sqrt() * p.log_s(w.norm())?)
    }

    /// ∇ω packed as ∂ₓω + i∂ᵧω.
    pub fn gradient_at(&self, i: usize, j: usize) -> Result<Complex64> {
        match &self.radial {
            Some(r) if r.profile.c != 0.0 => {
                let w = self.grid.z(i, j);
                let t = w.norm();
                Ok(w * (self.radial_slope(r, t)? / t))
            }
            Some(_) => Ok(Complex64::new(0.0, 0.0)),
            None => Ok(gradient(&self.grid, &self.omega, i, j).0),
        }
    }

    /// ∇ω/√(1 + |∇ω|²/℘²) at a node.
    pub fn flux_field(&self, i: usize, j: usize) -> Result<Complex64> {
        let gw = self.gradient_at(i, j)?;
        let rho = self.metric.value(self.grid.z(i, j))?;
        Ok(gw / (1.0 + gw.norm_sqr() / (rho * rho)).sqrt())
    }

    fn flux_samples(&self) -> Result<Vec<Complex64>> {
        (0..self.grid.len())
            .map(|k| {
                let (i, j) = self.grid.node(k);
                self.flux_field(i, j)
            })
            .collect()
    }

    /// div(∇ω/√(1 + |∇ω|²/℘²)) at an interior node, by stencils.
    pub fn minimal_residual(&self, i: usize, j: usize) -> Result<f64> {
        if !self.grid.is_interior(i) {
            return Err(Error::InsufficientStencil { module: MODULE, i, j });
        }
        let g = &self.grid;
        let mut local = vec![Complex64::new(0.0, 0.0); g.len()];
        let reach = g.angular_order.first().len() as isize;
        for ii in [i - 1, i, i + 1] {
            for s in -reach..=reach {
                let jj = g.wrap(j as isize + s);
                local[g.idx(ii, jj)] = self.flux_field(ii, jj)?;
            }
        }
        divergence(g, &local, i, j)
    }

    /// Sup-norm of the minimal-surface residual over rows collar..n_u−collar.
    pub fn residual_sup(&self, collar: usize) -> Result<f64> {
        let flux = self.flux_samples()?;
        let g = &self.grid;
        let mut worst = 0.0f64;
        for i in collar.max(1)..g.n_u.saturating_sub(collar.max(1)) {
            for j in 0..g.n_theta {
                worst = worst.max(divergence(g, &flux, i, j)?.abs());
            }
        }
        Ok(worst)
    }

    /// Compares the flux with −orientation·2√(−c)/w̄.
    pub fn flux_identity_check(&self, c: f64) -> Result<FluxReport> {
        if c > 0.0 {
            return Err(Error::arg(MODULE, format!("flux identity needs c <= 0, got {c}")));
        }
        let flux = self.flux_samples()?;
        let g = &self.grid;
        let a = -2.0 * (-c).sqrt() * self.orientation;
        let mut defect = 0.0f64;
        for (k, n) in flux.iter().enumerate() {
            defect = defect.max((n - a / g.z_at(k).conj()).norm());
        }
        let mut div = 0.0f64;
        for i in 2..g.n_u.saturating_sub(2) {
            for j in 0..g.n_theta {
                div = div.max(divergence(g, &flux, i, j)?.abs());
            }
        }
        Ok(FluxReport { flux_defect: defect, divergence_sup: div, analytic: self.radial.is_some() })
    }

    /// ∬℘√(℘² + |∇ω|²) dx dy, Simpson in u for odd n_u, else trapezoid.
    pub fn area(&self) -> Result<f64> {
        let g = &self.grid;
        let n = g.n_u;
        let mut total = 0.0;
        for i in 0..n {
            let wu = if n % 2 == 1 {
                if i == 0 || i + 1 == n {
                    1.0 / 3.0
                } else if i % 2 == 1 {
                    4.0 / 3.0
                } else {
                    2.0 / 3.0
                }
            } else if i == 0 || i + 1 == n {
                0.5
            } else {
                1.0
            };
            let r2 = g.radius(i).powi(2);
            let mut row = 0.0;
            for j in 0..g.n_theta {
                let rho = self.metric.value(g.z(i, j))?;
                let gw = self.gradient_at(i, j)?;
                row += rho * (rho * rho + gw.norm_sqr()).sqrt() * r2;
            }
            total += wu * row;
        }
        Ok(total * g.du() * g.dtheta())
    }
}

/// The graph ω(w) = C − 2√(−c)·log f⁻¹(|w|) over the target annulus of a
/// catenoidal radial profile, sampled on an n_u × n_θ grid.
pub fn build_graph_radial(profile: Arc<RadialProfile>, offset: f64, n_u: usize, n_theta: usize) -> Result<MinimalGraph> {
    let c = profile.c;
    if c > 0.0 {
        return Err(Error::unsupported(
            MODULE,
            "helicoidal height is multivalued over an annulus; use a helicoidal ConformalImmersion",
        ));
    }
    let (t_lo, t_hi) = profile.t_range()?;
    let grid = PolarGrid::new(t_lo, t_hi, n_u, n_theta)?;
    let metric = MetricField::Radial(profile.metric.clone());
    let a = 2.0 * (-c).sqrt();
    let mut omega = vec![0.0; grid.len()];
    for i in 0..n_u {
        let v = if c == 0.0 { offset } else { offset - a * profile.log_s(grid.radius(i))? };
        for j in 0..n_theta {
            omega[grid.idx(i, j)] = v;
        }
    }
    let mut graph = MinimalGraph::new(grid, omega, metric)?;
    graph.radial = Some(RadialGraph { profile, offset });
    if c == 0.0 {
        graph.note = Some("c = 0: the graph is a horizontal plane".to_string());
    }
    Ok(graph)
}

/// Convenience: the Euclidean catenoid graph with neck radius 2√(−c).
pub fn euclidean_catenoid_graph(c: f64, s_lo: f64, s_hi: f64, n_u: usize, n_theta: usize) -> Result<MinimalGraph> {
    let p = solve_profile(&RadialMetric::euclidean(), c, s_lo, s_hi)?;
    build_graph_radial(Arc::new(p), 0.0, n_u, n_theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_function_endpoints() {
        let h = height_function(std::f64::consts::E, 2.0, 0.0).unwrap();
        assert!((h.at(std::f64::consts::E) - 2.0).abs() < 1e-15);
        assert!((h.at(1.0) - 1.0).abs() < 1e-15);
        let h = height_function(2.0, 1.0, 0.3).unwrap();
        assert!((h.at(0.5) - 0.3).abs() < 1e-15);
        assert!(height_function(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normal_examples() {
        assert_eq!(normal_from_f(Complex64::new(0.0, 0.0), 1.0), [0.0, 0.0, -1.0]);
        assert_eq!(normal_from_f(Complex64::new(1.0, 0.0), 1.0), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn catenoid_piece_is_conformal() {
        let s = catenoid_piece(0.5, 2.0, 33, 32).unwrap();
        for i in [1, 16, 31] {
            let (a, b) = s.conformality_defect(i, 5).unwrap();
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
        let eq = 16;
        assert!((s.grid().radius(eq) - 1.0).abs() < 1e-14);
        assert!((s.height[s.grid().idx(eq, 0)] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn catenoid_graph_value() {
        let g = euclidean_catenoid_graph(-0.25, 1.0, 3.0, 17, 16).unwrap();
        let w = Complex64::new(1.25, 0.0);
        assert!((g.omega_at(w).unwrap() + 1.25f64.acosh()).abs() < 1e-10);
        assert!((g.omega_at(w).unwrap() - 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn helicoidal_graph_is_rejected() {
        let p = solve_profile(&RadialMetric::euclidean(), 0.25, 0.5, 2.0).unwrap();
        assert!(matches!(build_graph_radial(Arc::new(p), 0.0, 9, 8), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn constant_graph_has_zero_residual() {
        let g = PolarGrid::new(0.5, 1.0, 9, 8).unwrap();
        let m = MinimalGraph::from_fn(g, MetricField::euclidean(), |_| 0.7).unwrap();
        assert_eq!(m.minimal_residual(3, 2).unwrap(), 0.0);
        assert_eq!(m.residual_sup(1).unwrap(), 0.0);
    }

    #[test]
    fn tangent_planes() {
        assert_eq!(classify_plane(0.0, 1e-6), TangentPlane::Horizontal);
        assert_eq!(classify_plane(1.0, 1e-6), TangentPlane::Vertical);
        assert_eq!(classify_plane(0.5, 1e-6), TangentPlane::Tilted);
    }
}
