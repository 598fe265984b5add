//! Log-polar grids over annuli and discrete Wirtinger calculus.
//!
//! Nodes sit at z = e^{u+iθ} with u uniform in [log r_in, log r_out] and θ
//! uniform and periodic. Storage is node-major: index `i * n_theta + j`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MODULE: &str = "annulusgrid";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularOrder {
    Two,
    Four,
    Six,
}

impl AngularOrder {
    pub fn from_order(n: usize) -> Result<Self> {
        match n {
            2 => Ok(AngularOrder::Two),
            4 => Ok(AngularOrder::Four),
            6 => Ok(AngularOrder::Six),
            _ => Err(Error::arg(MODULE, format!("angular order must be 2, 4 or 6, got {n}"))),
        }
    }

    pub fn first(self) -> &'static [f64] {
        match self {
            AngularOrder::Two => &[0.5],
            AngularOrder::Four => &[2.0 / 3.0, -1.0 / 12.0],
            AngularOrder::Six => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
        }
    }

    /// Off-centre weights; the centre weight is minus twice their sum.
    pub fn second(self) -> &'static [f64] {
        match self {
            AngularOrder::Two => &[1.0],
            AngularOrder::Four => &[4.0 / 3.0, -1.0 / 12.0],
            AngularOrder::Six => &[3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
        }
    }

    pub fn centre(self) -> f64 {
        match self {
            AngularOrder::Two => -2.0,
            AngularOrder::Four => -5.0 / 2.0,
            AngularOrder::Six => -49.0 / 18.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub r_in: f64,
    pub r_out: f64,
    pub n_u: usize,
    pub n_theta: usize,
    pub angular_order: AngularOrder,
}

impl PolarGrid {
    pub fn new(r_in: f64, r_out: f64, n_u: usize, n_theta: usize) -> Result<Self> {
        if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
            return Err(Error::arg(MODULE, format!("need 0 < r_in < r_out, got ({r_in}, {r_out})")));
        }
        if n_u < 8 || n_theta < 8 {
            return Err(Error::arg(MODULE, format!("need n_u >= 8 and n_theta >= 8, got {n_u} x {n_theta}")));
        }
        Ok(PolarGrid { r_in, r_out, n_u, n_theta, angular_order: AngularOrder::Two })
    }

    /// Annulus standing in for the unit disk; the hole of radius `eps` is not
    /// part of the domain and nothing is evaluated inside it.
    pub fn disk(eps: f64, n_u: usize, n_theta: usize) -> Result<Self> {
        Self::new(eps, 1.0, n_u, n_theta)
    }

    /// The annulus A(1/R, R).
    pub fn symmetric(r: f64, n_u: usize, n_theta: usize) -> Result<Self> {
        if !(r > 1.0) {
            return Err(Error::arg(MODULE, format!("symmetric annulus needs R > 1, got {r}")));
        }
        Self::new(1.0 / r, r, n_u, n_theta)
    }

    pub fn with_order(mut self, order: AngularOrder) -> Self {
        self.angular_order = order;
        self
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn du(&self) -> f64 {
        (self.r_out.ln() - self.r_in.ln()) / (self.n_u - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        if i + 1 == self.n_u {
            self.r_out.ln()
        } else {
            self.r_in.ln() + i as f64 * self.du()
        }
    }

    pub fn radius(&self, i: usize) -> f64 {
        match i {
            0 => self.r_in,
            _ if i + 1 == self.n_u => self.r_out,
            _ => self.u(i).exp(),
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(i), self.theta(j))
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn node(&self, k: usize) -> (usize, usize) {
        (k / self.n_theta, k % self.n_theta)
    }

    pub fn z_at(&self, k: usize) -> Complex64 {
        let (i, j) = self.node(k);
        self.z(i, j)
    }

    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.n_theta as isize) as usize
    }

    pub fn is_interior(&self, i: usize) -> bool {
        i > 0 && i + 1 < self.n_u
    }

    pub fn nearest_node(&self, w: Complex64) -> (usize, usize) {
        let x = ((w.norm().ln() - self.u(0)) / self.du()).round();
        let i = x.clamp(0.0, (self.n_u - 1) as f64) as usize;
        let j = self.wrap((w.arg() / self.dtheta()).round() as isize);
        (i, j)
    }

    /// Conformal modulus log(r_out/r_in).
    pub fn modulus(&self) -> f64 {
        (self.r_out / self.r_in).ln()
    }

    /// Same annulus at a different resolution.
    pub fn resized(&self, n_u: usize, n_theta: usize) -> Result<Self> {
        Ok(Self::new(self.r_in, self.r_out, n_u, n_theta)?.with_order(self.angular_order))
    }
}

impl fmt::Display for PolarGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({}, {}) on {}x{}", self.r_in, self.r_out, self.n_u, self.n_theta)
    }
}

/// Values a stencil can act on.
pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// ∂_u at node (i, j). Boundary rows use the one-sided second-order stencil
/// and set the returned flag.
pub fn d_u<T: Sample>(g: &PolarGrid, v: &[T], i: usize, j: usize) -> (T, bool) {
    let h = g.du();
    let at = |i: usize| v[g.idx(i, j)];
    if i == 0 {
        (((at(1) - at(0)) * 3.0 - (at(2) - at(1))) * (0.5 / h), true)
    } else if i + 1 == g.n_u {
        (((at(i) - at(i - 1)) * 3.0 - (at(i - 1) - at(i - 2))) * (0.5 / h), true)
    } else {
        ((at(i + 1) - at(i - 1)) * (0.5 / h), false)
    }
}

/// ∂_uu at an interior node.
pub fn d_uu<T: Sample>(g: &PolarGrid, v: &[T], i: usize, j: usize) -> Result<T> {
    if !g.is_interior(i) {
        return Err(Error::InsufficientStencil { module: MODULE, i, j });
    }
    let h = g.du();
    let at = |i: usize| v[g.idx(i, j)];
    Ok((at(i + 1) - at(i) * 2.0 + at(i - 1)) * (1.0 / (h * h)))
}

/// Periodic ∂_θ.
pub fn d_theta<T: Sample>(g: &PolarGrid, v: &[T], i: usize, j: usize) -> T {
    let mut acc = T::zero();
    for (k, w) in g.angular_order.first().iter().enumerate() {
        let s = (k + 1) as isize;
        let p = v[g.idx(i, g.wrap(j as isize + s))];
        let m = v[g.idx(i, g.wrap(j as isize - s))];
        acc = acc + (p - m) * *w;
    }
    acc * (1.0 / g.dtheta())
}

/// Periodic ∂_θθ.
pub fn d_thth<T: Sample>(g: &PolarGrid, v: &[T], i: usize, j: usize) -> T {
    let mut acc = v[g.idx(i, j)] * g.angular_order.centre();
    for (k, w) in g.angular_order.second().iter().enumerate() {
        let s = (k + 1) as isize;
        let p = v[g.idx(i, g.wrap(j as isize + s))];
        let m = v[g.idx(i, g.wrap(j as isize - s))];
        acc = acc + (p + m) * *w;
    }
    let h = g.dtheta();
    acc * (1.0 / (h * h))
}

/// Δ = e^{−2u}(∂_uu + ∂_θθ) at an interior node.
pub fn laplacian_of<T: Sample>(g: &PolarGrid, v: &[T], i: usize, j: usize) -> Result<T> {
    let uu = d_uu(g, v, i, j)?;
    let tt = d_thth(g, v, i, j);
    Ok((uu + tt) * (-2.0 * g.u(i)).exp())
}

/// Finite-difference (f_z, f_z̄) with the reduced-order flag.
pub fn wirtinger_of(g: &PolarGrid, v: &[Complex64], i: usize, j: usize) -> (Complex64, Complex64, bool) {
    let (fu, reduced) = d_u(g, v, i, j);
    let ft = d_theta(g, v, i, j);
    let z = g.z(i, j);
    let iu = Complex64::new(0.0, 1.0);
    let fz = (fu - iu * ft) / (z * 2.0);
    let fzb = (fu + iu * ft) / (z.conj() * 2.0);
    (fz, fzb, reduced)
}

/// Divergence of a vector field packed as V_x + iV_y, via div V = 2Re ∂_z V.
pub fn divergence(g: &PolarGrid, v: &[Complex64], i: usize, j: usize) -> Result<f64> {
    if !g.is_interior(i) {
        return Err(Error::InsufficientStencil { module: MODULE, i, j });
    }
    let (vz, _, _) = wirtinger_of(g, v, i, j);
    Ok(2.0 * vz.re)
}

/// Cartesian gradient ∂ₓF + i∂ᵧF = 2∂_z̄F of a real field.
pub fn gradient(g: &PolarGrid, v: &[f64], i: usize, j: usize) -> (Complex64, bool) {
    let (fu, reduced) = d_u(g, v, i, j);
    let ft = d_theta(g, v, i, j);
    (Complex64::new(fu, ft) / g.z(i, j).conj(), reduced)
}

/// A complex map with closed-form derivatives.
pub trait AnalyticMap: Send + Sync {
    fn value(&self, z: Complex64) -> Complex64;

    /// (f_z, f_z̄)
    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64);

    /// (f_zz, f_zz̄, f_z̄z̄) when available.
    fn second(&self, _z: Complex64) -> Option<[Complex64; 3]> {
        None
    }

    fn label(&self) -> String {
        "analytic".to_string()
    }
}

impl fmt::Debug for dyn AnalyticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticMap({})", self.label())
    }
}

/// f(z) = Σ aₖzᵏ + Σ bₖz̄ᵏ with integer exponents. Covers the identity,
/// the Nitsche maps az + b/z̄ and the test maps z + βz̄ⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPoly {
    pub hol: Vec<(Complex64, i32)>,
    pub antihol: Vec<(Complex64, i32)>,
}

impl HarmonicPoly {
    pub fn identity() -> Self {
        HarmonicPoly { hol: vec![(Complex64::new(1.0, 0.0), 1)], antihol: vec![] }
    }

    /// az + b/z̄
    pub fn nitsche(a: f64, b: f64) -> Self {
        HarmonicPoly {
            hol: vec![(Complex64::new(a, 0.0), 1)],
            antihol: vec![(Complex64::new(b, 0.0), -1)],
        }
    }

    /// z + βz̄ⁿ
    pub fn perturbed_identity(beta: f64, n: i32) -> Self {
        HarmonicPoly {
            hol: vec![(Complex64::new(1.0, 0.0), 1)],
            antihol: vec![(Complex64::new(beta, 0.0), n)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        HarmonicPoly { hol: vec![(c, 0)], antihol: vec![] }
    }
}

fn ipow(z: Complex64, k: i32) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.powi(k)
    }
}

impl AnalyticMap for HarmonicPoly {
    fn value(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let a: Complex64 = self.hol.iter().map(|(c, k)| c * ipow(z, *k)).sum();
        let b: Complex64 = self.antihol.iter().map(|(c, k)| c * ipow(zb, *k)).sum();
        a + b
    }

    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64) {
        let zb = z.conj();
        let fz = self.hol.iter().filter(|(_, k)| *k != 0).map(|(c, k)| c * (*k as f64) * ipow(z, k - 1)).sum();
        let fzb = self.antihol.iter().filter(|(_, k)| *k != 0).map(|(c, k)| c * (*k as f64) * ipow(zb, k - 1)).sum();
        (fz, fzb)
    }

    fn second(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let zb = z.conj();
        let f2 = |terms: &[(Complex64, i32)], x: Complex64| -> Complex64 {
            terms
                .iter()
                .filter(|(_, k)| *k != 0 && *k != 1)
                .map(|(c, k)| c * ((k * (k - 1)) as f64) * ipow(x, k - 2))
                .sum()
        };
        Some([f2(&self.hol, z), Complex64::new(0.0, 0.0), f2(&self.antihol, zb)])
    }

    fn label(&self) -> String {
        "harmonic polynomial".to_string()
    }
}

/// Disk automorphism (z − a)/(1 − āz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
}

impl AnalyticMap for Mobius {
    fn value(&self, z: Complex64) -> Complex64 {
        (z - self.a) / (Complex64::new(1.0, 0.0) - self.a.conj() * z)
    }

    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64) {
        let d = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        ((1.0 - self.a.norm_sqr()) / (d * d), Complex64::new(0.0, 0.0))
    }

    fn second(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let d = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        let zero = Complex64::new(0.0, 0.0);
        Some([self.a.conj() * (2.0 * (1.0 - self.a.norm_sqr())) / (d * d * d), zero, zero])
    }

    fn label(&self) -> String {
        format!("mobius({})", self.a)
    }
}

/// g(z) = f(λz) for a complex factor λ (rotation and dilation).
#[derive(Clone)]
pub struct Precompose {
    pub inner: Arc<dyn AnalyticMap>,
    pub factor: Complex64,
}

impl AnalyticMap for Precompose {
    fn value(&self, z: Complex64) -> Complex64 {
        self.inner.value(self.factor * z)
    }

    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64) {
        let (a, b) = self.inner.wirtinger(self.factor * z);
        (a * self.factor, b * self.factor.conj())
    }

    fn second(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let l = self.factor;
        self.inner.second(l * z).map(|[a, b, c]| [a * l * l, b * l.norm_sqr(), c * l.conj() * l.conj()])
    }

    fn label(&self) -> String {
        format!("{} o ({}z)", self.inner.label(), self.factor)
    }
}

/// Closures as an analytic map (value, f_z, f_z̄).
pub struct Closure<V, D>
where
    V: Fn(Complex64) -> Complex64 + Send + Sync,
    D: Fn(Complex64) -> (Complex64, Complex64) + Send + Sync,
{
    pub value: V,
    pub deriv: D,
}

impl<V, D> AnalyticMap for Closure<V, D>
where
    V: Fn(Complex64) -> Complex64 + Send + Sync,
    D: Fn(Complex64) -> (Complex64, Complex64) + Send + Sync,
{
    fn value(&self, z: Complex64) -> Complex64 {
        (self.value)(z)
    }

    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.deriv)(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger {
    pub fz: Complex64,
    pub fzb: Complex64,
    /// True when a one-sided boundary stencil was used.
    pub reduced_order: bool,
}

/// Grid samples of a complex map, optionally with the map's closed form.
#[derive(Clone)]
pub struct ComplexField {
    pub grid: PolarGrid,
    pub samples: Vec<Complex64>,
    pub analytic: Option<Arc<dyn AnalyticMap>>,
}

impl fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexField")
            .field("grid", &self.grid)
            .field("analytic", &self.analytic.as_ref().map(|a| a.label()))
            .finish_non_exhaustive()
    }
}

impl ComplexField {
    pub fn new(grid: PolarGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::arg(MODULE, format!("expected {} samples, got {}", grid.len(), samples.len())));
        }
        if let Some(k) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            let (i, j) = grid.node(k);
            return Err(Error::arg(MODULE, format!("non-finite sample at node ({i}, {j})")));
        }
        Ok(ComplexField { grid, samples, analytic: None })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let samples = (0..grid.len()).map(|k| f(grid.z_at(k))).collect();
        Self::new(grid, samples)
    }

    pub fn from_analytic(grid: PolarGrid, map: Arc<dyn AnalyticMap>) -> Result<Self> {
        let mut field = Self::from_fn(grid, |z| map.value(z))?;
        field.analytic = Some(map);
        Ok(field)
    }

    /// The same samples with the closed form dropped, forcing stencils.
    pub fn without_analytic(&self) -> Self {
        ComplexField { grid: self.grid.clone(), samples: self.samples.clone(), analytic: None }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.samples[self.grid.idx(i, j)]
    }

    pub fn wirtinger(&self, i: usize, j: usize) -> Wirtinger {
        match &self.analytic {
            Some(map) => {
                let (fz, fzb) = map.wirtinger(self.grid.z(i, j));
                Wirtinger { fz, fzb, reduced_order: false }
            }
            None => self.wirtinger_fd(i, j),
        }
    }

    pub fn wirtinger_fd(&self, i: usize, j: usize) -> Wirtinger {
        let (fz, fzb, reduced_order) = wirtinger_of(&self.grid, &self.samples, i, j);
        Wirtinger { fz, fzb, reduced_order }
    }

    /// Componentwise Laplacian at an interior node.
    pub fn laplacian(&self, i: usize, j: usize) -> Result<Complex64> {
        laplacian_of(&self.grid, &self.samples, i, j)
    }

    /// f_zz̄, analytic when the closed form provides it, else Δf/4.
    pub fn mixed(&self, i: usize, j: usize) -> Result<Complex64> {
        if let Some(s) = self.analytic.as_ref().and_then(|m| m.second(self.grid.z(i, j))) {
            return Ok(s[1]);
        }
        Ok(self.laplacian(i, j)? / 4.0)
    }

    /// Writes the `u,theta,re,im` dump, one row per node in storage order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "theta", "re", "im"])?;
        for k in 0..self.grid.len() {
            let (i, j) = self.grid.node(k);
            let s = self.samples[k];
            w.write_record([
                self.grid.u(i).to_string(),
                self.grid.theta(j).to_string(),
                s.re.to_string(),
                s.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dump written by [`write_csv`](Self::write_csv), recovering the
    /// grid from the node coordinates.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = rdr.headers()?.clone();
        let want = ["u", "theta", "re", "im"];
        if header.len() != 4 || header.iter().zip(want).any(|(a, b)| a.trim() != b) {
            return Err(Error::parse(1, "header must be u,theta,re,im"));
        }
        let mut rows: Vec<[f64; 4]> = Vec::new();
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(n + 2, e.to_string()))?;
            if rec.len() != 4 {
                return Err(Error::parse(n + 2, format!("expected 4 columns, found {}", rec.len())));
            }
            let mut row = [0.0f64; 4];
            for (c, field) in rec.iter().enumerate() {
                row[c] = field.trim().parse().map_err(|_| Error::parse(n + 2, format!("bad number '{field}'")))?;
                if !row[c].is_finite() {
                    return Err(Error::parse(n + 2, "non-finite value"));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::parse(2, "no data rows"));
        }
        let u0 = rows[0][0];
        let n_theta = rows.iter().take_while(|r| r[0] == u0).count();
        if n_theta == 0 || rows.len() % n_theta != 0 {
            return Err(Error::parse(2, "rows do not form a rectangular grid"));
        }
        let n_u = rows.len() / n_theta;
        if n_u < 2 {
            return Err(Error::parse(2, "grid needs at least two radial rows"));
        }
        let u_last = rows[rows.len() - 1][0];
        let grid = PolarGrid::new(u0.exp(), u_last.exp(), n_u, n_theta)
            .map_err(|e| Error::parse(2, e.to_string()))?;
        let tol = 1e-9 * (1.0 + u0.abs().max(u_last.abs()));
        for (k, r) in rows.iter().enumerate() {
            let (i, j) = grid.node(k);
            if (r[0] - grid.u(i)).abs() > tol || (r[1] - grid.theta(j)).abs() > 1e-9 {
                return Err(Error::parse(k + 2, format!("node ({}, {}) off the inferred grid", r[0], r[1])));
            }
        }
        let samples = rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
        Self::new(grid, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn grid_validation() {
        assert!(PolarGrid::new(0.5, 1.0, 7, 16).is_err());
        assert!(PolarGrid::new(1.0, 0.5, 16, 16).is_err());
        let g = PolarGrid::new(0.5, 1.0, 9, 16).unwrap();
        assert_eq!(g.radius(0), 0.5);
        assert_eq!(g.radius(8), 1.0);
        assert!((g.du() - 2f64.ln() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn wirtinger_analytic_examples() {
        let id = HarmonicPoly::identity();
        assert_eq!(id.wirtinger(c(0.3, 0.2)), (c(1.0, 0.0), c(0.0, 0.0)));
        let conj_sq = HarmonicPoly { hol: vec![], antihol: vec![(c(1.0, 0.0), 2)] };
        let (a, b) = conj_sq.wirtinger(c(1.0, 1.0));
        assert_eq!(a, c(0.0, 0.0));
        assert!((b - c(2.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_fd_catenoid() {
        let e = std::f64::consts::E;
        let g = PolarGrid::new(1.0, e * e, 129, 128).unwrap();
        let f = ComplexField::from_fn(g.clone(), |z| (z + 1.0 / z.conj()) / 2.0).unwrap();
        let i = 64; // |z| = e
        for j in [0, 17, 100] {
            let w = f.wirtinger_fd(i, j);
            let th = g.theta(j);
            let want_b = -Complex64::from_polar(1.0, 2.0 * th) * (-2.0f64).exp() / 2.0;
            assert!((w.fz - c(0.5, 0.0)).norm() < 1e-3);
            assert!((w.fzb - want_b).norm() < 1e-3);
            assert!(!w.reduced_order);
        }
        assert!(f.wirtinger_fd(0, 0).reduced_order);
    }

    #[test]
    fn laplacian_examples() {
        let g = PolarGrid::new(0.5, 2.0, 65, 64).unwrap();
        let lg = ComplexField::from_fn(g.clone(), |z| c(z.norm().ln(), 0.0)).unwrap();
        let sq = ComplexField::from_fn(g.clone(), |z| c(z.norm_sqr(), 0.0)).unwrap();
        let cube = ComplexField::from_fn(g.clone(), |z| c((z * z * z).re, 0.0)).unwrap();
        assert!(lg.laplacian(10, 3).unwrap().norm() < 1e-10);
        assert!((sq.laplacian(10, 3).unwrap().re - 4.0).abs() < 1e-3);
        assert!(cube.laplacian(30, 7).unwrap().norm() < 1e-1);
        assert!(matches!(sq.laplacian(0, 3), Err(Error::InsufficientStencil { .. })));
    }

    #[test]
    fn divergence_examples() {
        let g = PolarGrid::new(0.5, 1.0, 65, 64).unwrap();
        let one = vec![c(1.0, 0.0); g.len()];
        assert!(divergence(&g, &one, 5, 5).unwrap().abs() < 1e-12);
        let grad: Vec<Complex64> = (0..g.len()).map(|k| g.z_at(k) * 2.0).collect();
        assert!((divergence(&g, &grad, 20, 9).unwrap() - 4.0).abs() < 1e-2);
        let flux: Vec<Complex64> = (0..g.len()).map(|k| 1.0 / g.z_at(k).conj()).collect();
        assert!(divergence(&g, &flux, 20, 9).unwrap().abs() < 1e-2);
    }

    #[test]
    fn angular_orders_are_consistent() {
        for order in [AngularOrder::Two, AngularOrder::Four, AngularOrder::Six] {
            let g = PolarGrid::new(0.5, 1.0, 9, 32).unwrap().with_order(order);
            let v: Vec<f64> = (0..g.len()).map(|k| g.theta(g.node(k).1).sin()).collect();
            let d = d_theta(&g, &v, 3, 5);
            let dd = d_thth(&g, &v, 3, 5);
            let th = g.theta(5);
            assert!((d - th.cos()).abs() < 2e-2, "{order:?}");
            assert!((dd + th.sin()).abs() < 2e-2, "{order:?}");
            let sum: f64 = order.second().iter().sum::<f64>() * 2.0 + order.centre();
            assert!(sum.abs() < 1e-14);
        }
        assert!(AngularOrder::from_order(3).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = PolarGrid::new(0.5, 1.0, 9, 8).unwrap();
        let f = ComplexField::from_fn(g.clone(), |z| z * z).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = ComplexField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.grid.n_u, 9);
        assert_eq!(back.grid.n_theta, 8);
        assert!((back.grid.r_in - 0.5).abs() < 1e-12);
        for (a, b) in f.samples.iter().zip(&back.samples) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(ComplexField::read_csv("a,b,c,d\n".as_bytes()).is_err());
        assert!(ComplexField::read_csv("u,theta,re,im\n".as_bytes()).is_err());
        assert!(ComplexField::read_csv("u,theta,re,im\n0,0,x,1\n".as_bytes()).is_err());
    }

    #[test]
    fn precompose_chain_rule() {
        let inner: Arc<dyn AnalyticMap> = Arc::new(HarmonicPoly::nitsche(0.8, 0.2));
        let l = Complex64::from_polar(1.3, 0.4);
        let p = Precompose { inner: inner.clone(), factor: l };
        let z = c(0.6, -0.3);
        let h = 1e-6;
        let num_x = (p.value(z + h) - p.value(z - h)) / (2.0 * h);
        let num_y = (p.value(z + c(0.0, h)) - p.value(z - c(0.0, h))) / (2.0 * h);
        let (fz, fzb) = p.wirtinger(z);
        assert!(((num_x - c(0.0, 1.0) * num_y) / 2.0 - fz).norm() < 1e-8);
        assert!(((num_x + c(0.0, 1.0) * num_y) / 2.0 - fzb).norm() < 1e-8);
    }
}
