//! Gaussian curvature of conformal minimal immersions, by the conformal
//! factor, by the dilatation decomposition and by radial closed forms.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::annulusgrid::PolarGrid;
use crate::error::{Error, Result};
use crate::metricspace::RadialMetric;
use crate::minimalsurface::ConformalImmersion;
use crate::radialfamily::admissibility;

const MODULE: &str = "curvature";

/// Terms of the split 𝒦 = (−2A + Xμ²(1 − μ⁴))/(2λμ²(1 + μ²)²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureDecomposition {
    /// ℘²(f)(|f_z| + |f_z̄|)²
    pub lambda: f64,
    /// (μ + 1/μ)²|η|²/4 with |η| = 2℘√(|f_z||f_z̄|)
    pub lambda_alt: f64,
    pub m: f64,
    pub mu: f64,
    /// |∇m|²
    pub a: f64,
    /// 2K_℘J
    pub x: f64,
    /// 4|∇μ|²
    pub b: f64,
    pub k: f64,
    /// −A/(λμ²(1 + μ²)²) + K_℘J(1 − μ⁴)/(λ(1 + μ²)²)
    pub k_split: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KalReport {
    pub k_abs: f64,
    pub bound: f64,
    pub margin: f64,
}

fn lambda_at(imm: &ConformalImmersion, i: usize, j: usize) -> Result<f64> {
    let d = imm.f.derivatives(i, j);
    let rho = imm.f.metric.value(imm.f.f.at(i, j))?;
    Ok(rho * rho * (d.fz.norm() + d.fzb.norm()).powi(2))
}

/// Δv at (i, j) with v evaluated only on the stencil.
fn laplacian_local(g: &PolarGrid, i: usize, j: usize, v: impl Fn(usize, usize) -> Result<f64>) -> Result<f64> {
    if !g.is_interior(i) {
        return Err(Error::InsufficientStencil { module: MODULE, i, j });
    }
    let c = v(i, j)?;
    let h = g.du();
    let uu = (v(i + 1, j)? - 2.0 * c + v(i - 1, j)?) / (h * h);
    let mut tt = c * g.angular_order.centre();
    for (k, w) in g.angular_order.second().iter().enumerate() {
        let s = (k + 1) as isize;
        tt += w * (v(i, g.wrap(j as isize + s))? + v(i, g.wrap(j as isize - s))?);
    }
    let ht = g.dtheta();
    Ok((uu + tt / (ht * ht)) * (-2.0 * g.u(i)).exp())
}

/// ∇v = 2∂_z̄v of a real node function, by the grid stencils.
fn gradient_local(g: &PolarGrid, i: usize, j: usize, v: impl Fn(usize, usize) -> Result<f64>) -> Result<Complex64> {
    if !g.is_interior(i) {
        return Err(Error::InsufficientStencil { module: MODULE, i, j });
    }
    let vu = (v(i + 1, j)? - v(i - 1, j)?) / (2.0 * g.du());
    let mut vt = 0.0;
    for (k, w) in g.angular_order.first().iter().enumerate() {
        let s = (k + 1) as isize;
        vt += w * (v(i, g.wrap(j as isize + s))? - v(i, g.wrap(j as isize - s))?);
    }
    vt /= g.dtheta();
    Ok(Complex64::new(vu, vt) / g.z(i, j).conj())
}

/// −Δlogλ/(2λ) at an interior node.
pub fn surface_curvature_numeric(imm: &ConformalImmersion, i: usize, j: usize) -> Result<f64> {
    let g = imm.grid();
    let lam = lambda_at(imm, i, j)?;
    let lap = laplacian_local(g, i, j, |a, b| {
        let l = lambda_at(imm, a, b)?;
        if l > 0.0 {
            Ok(l.ln())
        } else {
            Err(Error::singular(MODULE, format!("conformal factor vanishes at node ({a}, {b})")))
        }
    })?;
    Ok(-lap / (2.0 * lam))
}

/// Numeric curvature on every node; NaN on the boundary rows and where the
/// conformal factor vanishes in the stencil.
pub fn numeric_curvature_field(imm: &ConformalImmersion) -> Result<Vec<f64>> {
    let g = imm.grid();
    let mut log_lambda = vec![f64::NAN; g.len()];
    let mut lambda = vec![0.0; g.len()];
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        let l = lambda_at(imm, i, j)?;
        lambda[k] = l;
        if l > 0.0 {
            log_lambda[k] = l.ln();
        }
    }
    let mut out = vec![f64::NAN; g.len()];
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        if g.is_interior(i) {
            let lap = laplacian_local(g, i, j, |a, b| Ok(log_lambda[g.idx(a, b)]))?;
            out[k] = -lap / (2.0 * lambda[k]);
        }
    }
    Ok(out)
}

fn abs_dzb(v: Complex64, v_z: Complex64, v_zb: Complex64) -> Complex64 {
    // ∂_z̄|v| = (v_z̄ v̄ + v·conj(v_z))/(2|v|)
    (v_zb * v.conj() + v * v_z.conj()) / (2.0 * v.norm())
}

/// ∇m with m = |f_z̄|/|f_z|, from second derivatives when available.
fn grad_m(imm: &ConformalImmersion, i: usize, j: usize) -> Result<Complex64> {
    let g = imm.grid();
    let z = g.z(i, j);
    if let Some([fzz, fzzb, fzbzb]) = imm.f.f.analytic.as_ref().and_then(|m| m.second(z)) {
        let d = imm.f.derivatives(i, j);
        let (a, b) = (d.fz.norm(), d.fzb.norm());
        let da = abs_dzb(d.fz, fzz, fzzb);
        let db = abs_dzb(d.fzb, fzzb, fzbzb);
        let dm = db / a - da * (b / (a * a));
        return Ok(2.0 * dm);
    }
    gradient_local(g, i, j, |a, b| {
        let d = imm.f.derivatives(a, b);
        Ok(d.fzb.norm() / d.fz.norm())
    })
}

/// All terms of the dilatation split at a node with 0 < μ < 1.
pub fn curvature_decomposition(imm: &ConformalImmersion, i: usize, j: usize) -> Result<CurvatureDecomposition> {
    let d = imm.f.derivatives(i, j);
    let w = imm.f.f.at(i, j);
    let rho = imm.f.metric.value(w)?;
    let (fa, fb) = (d.fz.norm(), d.fzb.norm());
    if fa == 0.0 {
        return Err(Error::singular(MODULE, format!("f_z = 0 at node ({i}, {j})")));
    }
    let m = fb / fa;
    let mu = m.sqrt();
    if m <= 1e-14 || (mu - 1.0).abs() <= 1e-14 {
        return Err(Error::singular(MODULE, format!("decomposition undefined at node ({i}, {j}): mu = {mu}")));
    }
    let r2 = rho * rho;
    let lambda = r2 * (fa + fb).powi(2);
    let eta = 2.0 * rho * (fa * fb).sqrt();
    let lambda_alt = (mu + 1.0 / mu).powi(2) * eta * eta / 4.0;
    let gm = grad_m(imm, i, j)?;
    let a = gm.norm_sqr();
    let gmu = gm / (2.0 * mu);
    let b = 4.0 * gmu.norm_sqr();
    let kp = if imm.f.metric.is_euclidean() { 0.0 } else { imm.f.metric.gauss_curvature(w)? };
    let jac = r2 * (fa * fa - fb * fb);
    let x = 2.0 * kp * jac;
    let mu2 = mu * mu;
    let s2 = (1.0 + mu2).powi(2);
    let k = (-2.0 * a + x * mu2 * (1.0 - mu2 * mu2)) / (2.0 * lambda * mu2 * s2);
    let k_split = -a / (lambda * mu2 * s2) + kp * jac * (1.0 - mu2 * mu2) / (lambda * s2);
    Ok(CurvatureDecomposition { lambda, lambda_alt, m, mu, a, x, b, k, k_split })
}

/// Closed-form curvature of the rotationally symmetric surface of a radial
/// profile with Hopf constant c, at target radius t.
pub fn curvature_radial_closed_form(metric: &RadialMetric, c: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !metric.contains(t) {
        return Err(Error::domain(MODULE, format!("t = {t} outside the support of {}", metric.name())));
    }
    let g = admissibility(metric, c, t);
    if g < 0.0 {
        return Err(Error::domain(MODULE, format!("4c + t²ρ² = {g} < 0 at t = {t}")));
    }
    let (r, d, _) = metric.jet(t);
    let kp = metric.curvature(t)?;
    let q = r + t * d;
    if c < 0.0 {
        let tr2 = t * t * r * r;
        Ok(4.0 * c * q * q / (tr2 * tr2 * r * r) + kp * (1.0 + 4.0 * c / tr2))
    } else if c > 0.0 {
        let den = 4.0 * c * r + t * t * r * r * r;
        Ok(-4.0 * c * q * q / (den * den) + kp * t * t * r * r / g)
    } else {
        Ok(kp)
    }
}

/// 𝒦 = −|ω′|²/((|c|/|z|²)(1 + |ω|)⁴) for ℘ ≡ 1 and ω = q² analytic.
pub fn curvature_euclidean_analytic(omega: Complex64, domega: Complex64, c: f64, z: Complex64) -> Result<f64> {
    let w = omega.norm();
    if w >= 1.0 {
        return Err(Error::domain(MODULE, format!("|omega| = {w} >= 1: vertical tangent plane")));
    }
    if c == 0.0 || z.norm() == 0.0 {
        return Err(Error::arg(MODULE, "need c != 0 and z != 0"));
    }
    Ok(-domega.norm_sqr() / ((c.abs() / z.norm_sqr()) * (1.0 + w).powi(4)))
}

/// |𝒦| ≤ max{|B/λ|, |−B/λ + K_℘|}.
pub fn kal_bound_check(imm: &ConformalImmersion, i: usize, j: usize) -> Result<KalReport> {
    match curvature_decomposition(imm, i, j) {
        Ok(d) => {
            let w = imm.f.f.at(i, j);
            let kp = if imm.f.metric.is_euclidean() { 0.0 } else { imm.f.metric.gauss_curvature(w)? };
            let q = d.b / d.lambda;
            let bound = q.abs().max((kp - q).abs());
            Ok(KalReport { k_abs: d.k.abs(), bound, margin: bound - d.k.abs() })
        }
        Err(Error::Singular { .. }) if imm.f.derivatives(i, j).fzb.norm() == 0.0 => {
            let k = surface_curvature_numeric(imm, i, j)?.abs();
            Ok(KalReport { k_abs: k, bound: 0.0, margin: -k })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureRow {
    pub u: f64,
    pub theta: f64,
    pub k_numeric: f64,
    pub k_decomp: f64,
    pub k_closed: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// One row per node; unavailable routes are NaN.
pub fn curvature_table(imm: &ConformalImmersion) -> Result<Vec<CurvatureRow>> {
    let g = imm.grid();
    let numeric = numeric_curvature_field(imm)?;
    let profile = imm.profile();
    let mut rows = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let (i, j) = g.node(k);
        let d = imm.f.derivatives(i, j);
        let k_decomp = curvature_decomposition(imm, i, j).map(|d| d.k).unwrap_or(f64::NAN);
        let k_closed = match profile {
            Some(p) => curvature_radial_closed_form(&p.metric, p.c, imm.f.f.at(i, j).norm()).unwrap_or(f64::NAN),
            None => f64::NAN,
        };
        rows.push(CurvatureRow {
            u: g.u(i),
            theta: g.theta(j),
            k_numeric: numeric[k],
            k_decomp,
            k_closed,
            lambda: lambda_at(imm, i, j)?,
            mu: (d.fzb.norm() / d.fz.norm()).sqrt(),
        });
    }
    Ok(rows)
}

/// Best available curvature per node: closed form, then decomposition,
/// then numeric.
pub fn best_curvature(rows: &[CurvatureRow]) -> Vec<f64> {
    rows.iter()
        .map(|r| {
            [r.k_closed, r.k_decomp, r.k_numeric].into_iter().find(|v| v.is_finite()).unwrap_or(f64::NAN)
        })
        .collect()
}

/// Writes `u,theta,K_numeric,K_decomp,K_closed,lambda,mu`.
pub fn write_curvature_csv<W: Write>(out: W, rows: &[CurvatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "theta", "K_numeric", "K_decomp", "K_closed", "lambda", "mu"])?;
    for r in rows {
        w.write_record([r.u, r.theta, r.k_numeric, r.k_decomp, r.k_closed, r.lambda, r.mu].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimalsurface::catenoid_piece;

    #[test]
    fn closed_form_examples() {
        let e = RadialMetric::euclidean();
        assert!((curvature_radial_closed_form(&e, -0.25, 1.25).unwrap() + 0.4096).abs() < 1e-14);
        assert!((curvature_radial_closed_form(&e, 0.25, 1.0).unwrap() + 0.25).abs() < 1e-14);
        assert!((curvature_radial_closed_form(&e, 0.25, 0.0).unwrap() + 1.0).abs() < 1e-14);
        assert!(curvature_radial_closed_form(&e, -0.25, 0.9).is_err());
        let s = RadialMetric::sphere();
        assert!((curvature_radial_closed_form(&s, 0.0, 0.4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_analytic_examples() {
        let c = -0.25;
        let at = |z: Complex64| {
            let w = 1.0 / (z * z);
            let dw = -2.0 / (z * z * z);
            curvature_euclidean_analytic(w, dw, c, z)
        };
        assert!(at(Complex64::new(1.0, 0.0)).is_err());
        assert!((at(Complex64::new(2.0, 0.0)).unwrap() + 0.4096).abs() < 1e-14);
        assert_eq!(curvature_euclidean_analytic(Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0), c, Complex64::new(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn catenoid_decomposition_at_s2() {
        // catenoid_piece(v1, d) with e^{vm} = 1 is f = (z + 1/z̄)/2.
        let imm = catenoid_piece(-1.0, 2.0, 129, 16).unwrap();
        let g = imm.grid();
        let i = (0..g.n_u).min_by(|&a, &b| (g.radius(a) - 2.0).abs().total_cmp(&(g.radius(b) - 2.0).abs())).unwrap();
        let s = g.radius(i);
        let d = curvature_decomposition(&imm, i, 0).unwrap();
        let p = 0.5 * (s + 1.0 / s);
        assert!((d.k + 1.0 / p.powi(4)).abs() < 1e-12);
        assert!((d.k - d.k_split).abs() < 1e-12);
        assert!((d.lambda - d.lambda_alt).abs() < 1e-12);
        assert!((d.a - d.mu * d.mu * d.b).abs() < 1e-12);
        let n = surface_curvature_numeric(&imm, i, 0).unwrap();
        assert!((n - d.k).abs() < 1e-3);
        let kal = kal_bound_check(&imm, i, 0).unwrap();
        assert!((kal.bound - 16.0 / (s * s + 1.0).powi(2)).abs() < 1e-12);
    }
}
