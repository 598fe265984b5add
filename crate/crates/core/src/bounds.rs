//! Quantitative bounds with computable constants, and sweeps checking them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::annulusgrid::{AnalyticMap, Closure, ComplexField, HarmonicPoly, Mobius, PolarGrid};
use crate::curvature::{curvature_decomposition, surface_curvature_numeric};
use crate::error::{Error, Result};
use crate::harmonicmap::HarmonicMapCandidate;
use crate::metricspace::{MetricField, RadialMetric};
use crate::minimalsurface::{build_graph_radial, catenoid_piece, ConformalImmersion};
use crate::radialfamily::{forward_modulus, radial_map, solve_profile};

const MODULE: &str = "bounds";

/// Constants of the flat (κ = 0) case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatConstants {
    /// φ₀′(0)
    pub phi0_slope_origin: f64,
    /// φ₀′(1)
    pub phi0_slope_one: f64,
    /// Heinz constant C₀
    pub heinz_c0: f64,
    /// c̃₀ = ½φ₀′(1)
    pub c_tilde_0: f64,
    /// C*₀
    pub c_star_0: f64,
}

pub const FLAT: FlatConstants = FlatConstants {
    phi0_slope_origin: 4.0 / PI,
    phi0_slope_one: 2.0 / PI,
    heinz_c0: 4.0 / PI,
    c_tilde_0: 1.0 / PI,
    c_star_0: 8.0 / PI,
};

/// φ₀(r) = (4/π)arctan r on [0, 1].
pub fn phi_flat(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::arg(MODULE, format!("phi_flat needs r in [0, 1], got {r}")));
    }
    Ok(4.0 / PI * r.atan())
}

/// c = −d²/(4 Mod(Σ)²).
pub fn c_from_geometry(d: f64, mod_sigma: f64) -> Result<f64> {
    if !(d > 0.0 && mod_sigma > 0.0 && d.is_finite() && mod_sigma.is_finite()) {
        return Err(Error::arg(MODULE, format!("need d > 0 and Mod > 0, got d = {d}, Mod = {mod_sigma}")));
    }
    Ok(-d * d / (4.0 * mod_sigma * mod_sigma))
}

mod nonfinite {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("expected a number, inf, -inf or nan, got {other:?}"))),
            },
        }
    }
}

/// One evaluated inequality lhs ≤ rhs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(with = "nonfinite")]
    pub lhs: f64,
    #[serde(with = "nonfinite")]
    pub rhs: f64,
    /// rhs − lhs
    #[serde(with = "nonfinite")]
    pub margin: f64,
    pub witness: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, witness: impl Into<String>) -> Self {
        BoundReport { name: name.to_string(), lhs, rhs, margin: rhs - lhs, witness: witness.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

/// Parses a JSON array of reports.
pub fn parse_reports(text: &str) -> Result<Vec<BoundReport>> {
    Ok(serde_json::from_str(text)?)
}

pub fn reports_to_json(reports: &[BoundReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

/// Analytic maps of A(1/R, R) into the unit disk used by the Schwarz-Pick
/// checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchwarzPickFamily {
    /// z²/R²
    ZSquared,
    /// 1/(R²z²)
    InverseZSquared,
    /// (z/R)·B_a(1/(Rz)) with B_a(x) = (x − a)/(1 − āx)
    Blaschke(Complex64),
}

impl SchwarzPickFamily {
    pub fn name(&self) -> String {
        match self {
            SchwarzPickFamily::ZSquared => "z^2/R^2".to_string(),
            SchwarzPickFamily::InverseZSquared => "1/(R^2 z^2)".to_string(),
            SchwarzPickFamily::Blaschke(a) => format!("(z/R)B_a(1/(Rz)), a = {a}"),
        }
    }

    /// (ω, ω′) at z.
    pub fn eval(&self, r: f64, z: Complex64) -> (Complex64, Complex64) {
        match *self {
            SchwarzPickFamily::ZSquared => (z * z / (r * r), 2.0 * z / (r * r)),
            SchwarzPickFamily::InverseZSquared => (1.0 / (r * r * z * z), -2.0 / (r * r * z * z * z)),
            SchwarzPickFamily::Blaschke(a) => {
                let x = 1.0 / (r * z);
                let one = Complex64::new(1.0, 0.0);
                let den = one - a.conj() * x;
                let b = (x - a) / den;
                let db = (1.0 - a.norm_sqr()) / (den * den);
                let dx = -1.0 / (r * z * z);
                (z / r * b, b / r + z / r * db * dx)
            }
        }
    }
}

/// |ω′(z)| ≤ π(1 − |ω|²)sec(π log|z|/(2 log R))/(4|z| log R).
pub fn annulus_schwarz_pick(omega: Complex64, domega: Complex64, r: f64, z: Complex64) -> Result<BoundReport> {
    if !(r > 1.0) {
        return Err(Error::arg(MODULE, format!("annulus A(1/R, R) needs R > 1, got {r}")));
    }
    let s = z.norm();
    if !(s >= 1.0 / r && s <= r) {
        return Err(Error::arg(MODULE, format!("|z| = {s} outside A(1/{r}, {r})")));
    }
    if omega.norm() >= 1.0 {
        return Err(Error::arg(MODULE, format!("|omega(z)| = {} >= 1", omega.norm())));
    }
    let lr = r.ln();
    let cos = (PI * s.ln() / (2.0 * lr)).cos();
    let rhs = if cos <= 0.0 || s == r || s == 1.0 / r {
        f64::INFINITY
    } else {
        PI * (1.0 - omega.norm_sqr()) / (cos * 4.0 * s * lr)
    };
    Ok(BoundReport::new("schwarz_pick", domega.norm(), rhs, format!("z = {z}")).with("R", r))
}

/// |𝒦| at the equator |z| = 1 against π²/d, for a doubly connected graph
/// parametrised by A(1/R, R).
pub fn equator_bound_report(imm: &ConformalImmersion, d: f64) -> Result<BoundReport> {
    if !(d > 0.0) {
        return Err(Error::arg(MODULE, format!("slab height must be positive, got {d}")));
    }
    let g = imm.grid();
    let du = g.du();
    let mut lhs = 0.0f64;
    let mut witness = String::from("no equator node");
    let mut found = false;
    for i in 1..g.n_u - 1 {
        if g.u(i).abs() > 0.5 * du + 1e-12 {
            continue;
        }
        for j in 0..g.n_theta {
            let k = match curvature_decomposition(imm, i, j) {
                Ok(dec) => dec.k,
                Err(_) => surface_curvature_numeric(imm, i, j)?,
            };
            found = true;
            if k.abs() > lhs || witness == "no equator node" {
                lhs = k.abs();
                witness = format!("node ({i}, {j}), |z| = {}", g.radius(i));
            }
        }
    }
    if !found {
        return Err(Error::arg(MODULE, format!("grid {g} has no interior equator row")));
    }
    let mut graph_regime = 1.0;
    for i in 1..g.n_u - 1 {
        for j in 0..g.n_theta {
            let dv = imm.f.derivatives(i, j);
            if dv.fzb.norm() >= dv.fz.norm() {
                graph_regime = 0.0;
            }
        }
    }
    Ok(BoundReport::new("equator", lhs, PI * PI / (d * d), witness).with("d", d).with("graph_regime", graph_regime))
}

/// |𝒦(O)| ≤ 4C*₀/(R²c̃₀²) = 32π/R² (flat case, conservative).
pub fn finn_osserman_flat_report(r: f64, k_center: f64) -> Result<BoundReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::arg(MODULE, format!("disk radius must be positive, got {r}")));
    }
    let rhs = 4.0 * FLAT.c_star_0 / (r * r * FLAT.c_tilde_0 * FLAT.c_tilde_0);
    Ok(BoundReport::new("finn_osserman_flat", k_center.abs(), rhs, format!("R = {r}")).with("R", r))
}

/// min |∂f| over the grid against c̃₀ = 1/π, for a harmonic diffeomorphism
/// of the unit disk onto itself. The report's lhs is the floor and its rhs
/// the observed minimum; each hypothesis is recorded as a 0/1 param.
pub fn heinz_margin(cand: &HarmonicMapCandidate) -> Result<BoundReport> {
    let g = cand.domain();
    if g.r_out > 1.0 + 1e-12 {
        return Err(Error::arg(MODULE, format!("domain {g} is not inside the unit disk")));
    }
    let flat = cand.metric.as_radial().map(|m| m.is_euclidean() && m.scale == 1.0).unwrap_or(false);
    let mut min = f64::INFINITY;
    let mut witness = (0, 0);
    let mut sense = true;
    for i in 0..g.n_u {
        for j in 0..g.n_theta {
            let d = cand.derivatives(i, j);
            if d.fz.norm() <= d.fzb.norm() {
                sense = false;
            }
            if d.fz.norm() < min {
                min = d.fz.norm();
                witness = (i, j);
            }
        }
    }
    let origin = match &cand.f.analytic {
        Some(m) => m.value(Complex64::new(0.0, 0.0)).norm(),
        None => {
            let s: Complex64 = (0..g.n_theta).map(|j| cand.f.at(0, j)).sum();
            (s / g.n_theta as f64).norm()
        }
    };
    let onto = (0..g.n_theta).all(|j| (cand.f.at(g.n_u - 1, j).norm() - 1.0).abs() < 1e-6);
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    Ok(BoundReport::new("heinz", FLAT.c_tilde_0, min, format!("node {witness:?}"))
        .with("flat", flag(flat))
        .with("sense_preserving", flag(sense))
        .with("onto", flag(onto))
        .with("fixes_origin", flag(origin < 1e-8)))
}

/// Reports of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub reports: Vec<BoundReport>,
}

impl SuiteReport {
    pub fn worst(&self) -> Option<&BoundReport> {
        self.reports.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.reports.iter().all(|r| r.passes(tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub n_u: usize,
    pub n_theta: usize,
}

impl SweepGrid {
    fn odd_u(self) -> usize {
        self.n_u | 1
    }
}

/// v₁ lattice of the equator sweep.
pub fn equator_lattice() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for a in 0..9 {
        for b in 0..9 {
            out.push((0.25 * a as f64, 0.5 + 0.5 * b as f64));
        }
    }
    out
}

/// Equator bound on 81 catenoid graph pieces, with the conformality
/// defects and the c = −d²/(4Mod²) identity on each piece.
pub fn equator_sweep(grid: SweepGrid) -> Result<SuiteReport> {
    let reports: Result<Vec<Vec<BoundReport>>> = equator_lattice()
        .par_iter()
        .map(|&(v1, d)| {
            let imm = catenoid_piece(v1, d, grid.odd_u(), grid.n_theta)?;
            let vm = v1 + d / 2.0;
            let eq = equator_bound_report(&imm, d)?.with("v1", v1).with("expected_lhs", 1.0 / vm.cosh().powi(4));
            let modulus = imm.grid().modulus();
            let cg = c_from_geometry(d, modulus)?;
            let ccc = BoundReport::new("c_from_geometry", (cg - imm.c).abs(), 1e-8, format!("v1 = {v1}, d = {d}"))
                .with("c_geometry", cg)
                .with("c_stored", imm.c);
            let g = imm.grid();
            let mut worst = 0.0f64;
            for i in 1..g.n_u - 1 {
                for j in 0..g.n_theta {
                    let (a, b) = imm.conformality_defect(i, j)?;
                    worst = worst.max(a.abs()).max(b.abs());
                }
            }
            let conf = BoundReport::new("conformality", worst, 1e-8, format!("v1 = {v1}, d = {d}"));
            Ok(vec![eq, ccc, conf])
        })
        .collect();
    Ok(SuiteReport { suite: "equator".to_string(), reports: reports?.into_iter().flatten().collect() })
}

/// Deterministic sample points of A(1/R, R): 25 radii × 40 angles.
pub fn annulus_samples(r: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(1000);
    let lr = r.ln();
    for a in 0..25 {
        let u = -lr + 2.0 * lr * (a as f64 + 0.5) / 25.0;
        for b in 0..40 {
            let th = 2.0 * PI * (b as f64 + 0.25) / 40.0;
            out.push(Complex64::from_polar(u.exp(), th));
        }
    }
    out
}

/// Schwarz-Pick on A(1/2, 2) for the three families at 10³ points each,
/// plus the sharpness ratio next to the outer circle.
pub fn schwarzpick_sweep() -> Result<SuiteReport> {
    let r = 2.0;
    let families = [
        SchwarzPickFamily::ZSquared,
        SchwarzPickFamily::InverseZSquared,
        SchwarzPickFamily::Blaschke(Complex64::new(0.3, 0.2)),
        SchwarzPickFamily::Blaschke(Complex64::new(-0.5, 0.0)),
    ];
    let mut reports = Vec::new();
    for fam in families {
        let mut worst: Option<BoundReport> = None;
        for z in annulus_samples(r) {
            let (w, dw) = fam.eval(r, z);
            let rep = annulus_schwarz_pick(w, dw, r, z)?;
            if worst.as_ref().is_none_or(|b| rep.margin < b.margin) {
                worst = Some(rep);
            }
        }
        if let Some(mut w) = worst {
            w.witness = format!("{}; {}", fam.name(), w.witness);
            reports.push(w.with("samples", 1000.0));
        }
    }
    let z1 = Complex64::new(1.0, 0.0);
    let (w, dw) = SchwarzPickFamily::ZSquared.eval(r, z1);
    let mut at_one = annulus_schwarz_pick(w, dw, r, z1)?;
    at_one.name = "schwarz_pick_at_1".to_string();
    reports.push(at_one);
    let z = Complex64::new(r - 1e-3, 0.0);
    let (w, dw) = SchwarzPickFamily::ZSquared.eval(r, z);
    let edge = annulus_schwarz_pick(w, dw, r, z)?;
    let ratio = edge.lhs / edge.rhs;
    reports.push(BoundReport::new("schwarz_pick_sharpness", 0.99, ratio, format!("|z| = {}", z.norm())).with("ratio", ratio));
    Ok(SuiteReport { suite: "schwarzpick".to_string(), reports })
}

/// Heinz floor for the identity, Möbius automorphisms and a radial
/// stretch of the disk, and the slope of φ₀ at 0.
pub fn heinz_sweep(grid: SweepGrid) -> Result<SuiteReport> {
    let g = PolarGrid::disk(1e-3, grid.n_u, grid.n_theta)?;
    let stretch = Closure {
        value: |z: Complex64| z * (1.0 + 0.1 * z.norm_sqr()) / 1.1,
        deriv: |z: Complex64| (Complex64::new((1.0 + 0.2 * z.norm_sqr()) / 1.1, 0.0), 0.1 * z * z / 1.1),
    };
    let maps: Vec<(&str, Arc<dyn AnalyticMap>)> = vec![
        ("identity", Arc::new(HarmonicPoly::identity())),
        ("mobius a = 0.3", Arc::new(Mobius { a: Complex64::new(0.3, 0.0) })),
        ("mobius a = 0.2 + 0.4i", Arc::new(Mobius { a: Complex64::new(0.2, 0.4) })),
        ("z(1 + 0.1|z|^2)/1.1", Arc::new(stretch)),
    ];
    let mut reports = Vec::new();
    for (name, map) in maps {
        let f = ComplexField::from_analytic(g.clone(), map)?;
        let cand = HarmonicMapCandidate::new(f, MetricField::euclidean())?;
        let mut rep = heinz_margin(&cand)?;
        rep.witness = format!("{name}; {}", rep.witness);
        reports.push(rep);
    }
    let h = 1e-5;
    let slope = (phi_flat(h)? + phi_flat(h)?) / (2.0 * h);
    reports.push(
        BoundReport::new("phi0_slope_origin", (slope - FLAT.phi0_slope_origin).abs(), 1e-10, "central difference, h = 1e-5")
            .with("slope", slope),
    );
    Ok(SuiteReport { suite: "heinz".to_string(), reports })
}

/// Profile whose target annulus is [t_lo, t_hi].
fn profile_over(metric: &RadialMetric, c: f64, t_lo: f64, t_hi: f64) -> Result<crate::radialfamily::RadialProfile> {
    let s_lo = forward_modulus(metric, c, t_lo)?;
    let s_hi = forward_modulus(metric, c, t_hi)?;
    solve_profile(metric, c, s_lo, s_hi)
}

/// Cases of the flux suite: (metric, c).
pub fn flux_cases() -> Vec<(RadialMetric, f64)> {
    let mut v = Vec::new();
    for c in [-0.25, -0.09, -0.05] {
        v.push((RadialMetric::euclidean(), c));
    }
    for c in [-0.09, -0.05] {
        v.push((RadialMetric::sphere(), c));
    }
    v
}

/// Observed order of an error sequence on grids with steps h and h/2.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Flux identity N = 2√(−c)/w̄ on the reflected radial graphs (analytic
/// path) and the decay of div N on the finite-difference path.
pub fn flux_sweep(grid: SweepGrid) -> Result<SuiteReport> {
    let reports: Result<Vec<Vec<BoundReport>>> = flux_cases()
        .par_iter()
        .map(|(metric, c)| {
            let p = Arc::new(profile_over(metric, *c, 1.1, 2.0)?);
            let graph = build_graph_radial(p.clone(), 0.0, grid.n_u, grid.n_theta)?.reflected();
            let tag = format!("{} c = {c}", metric.name());
            let exact = graph.flux_identity_check(*c)?;
            let analytic = BoundReport::new("flux_identity", exact.flux_defect, 1e-8, tag.clone()).with("c", *c);
            let coarse = build_graph_radial(p.clone(), 0.0, grid.n_u, grid.n_theta)?.reflected().without_analytic();
            let fine = build_graph_radial(p, 0.0, 2 * grid.n_u - 1, 2 * grid.n_theta)?.reflected().without_analytic();
            let (e0, e1) = (coarse.flux_identity_check(*c)?.divergence_sup, fine.flux_identity_check(*c)?.divergence_sup);
            let order = observed_order(e0, e1);
            let div = if e1 < 1e-11 {
                BoundReport::new("flux_divergence_order", 0.0, 0.0, format!("{tag}; roundoff level"))
            } else {
                BoundReport::new("flux_divergence_order", 1.5, order, tag)
            }
            .with("div_coarse", e0)
            .with("div_fine", e1);
            Ok(vec![analytic, div])
        })
        .collect();
    Ok(SuiteReport { suite: "flux".to_string(), reports: reports?.into_iter().flatten().collect() })
}

/// Bochner defects on harmonic families at two resolutions; each report
/// requires an observed order of at least 1.5, or roundoff-level defects.
pub fn bochner_sweep(grid: SweepGrid) -> Result<SuiteReport> {
    type Builder = Box<dyn Fn(usize, usize) -> Result<HarmonicMapCandidate> + Send + Sync>;
    let cases: Vec<(String, Builder)> = vec![
        (
            "z + 0.2 zbar^3".to_string(),
            Box::new(|n, n_theta| {
                let g = PolarGrid::new(0.3, 1.0, n, n_theta)?;
                let f = ComplexField::from_analytic(g, Arc::new(HarmonicPoly::perturbed_identity(0.2, 3)))?;
                HarmonicMapCandidate::new(f, MetricField::euclidean())
            }),
        ),
        (
            "catenoid map".to_string(),
            Box::new(|n, n_theta| {
                let g = PolarGrid::new(1.2, 2.5, n, n_theta)?;
                let f = ComplexField::from_analytic(g, Arc::new(HarmonicPoly::nitsche(0.5, 0.5)))?;
                HarmonicMapCandidate::new(f, MetricField::euclidean())
            }),
        ),
        (
            "sphere radial c = -0.09".to_string(),
            Box::new(|n, n_theta| {
                let p = Arc::new(profile_over(&RadialMetric::sphere(), -0.09, 1.1, 2.0)?);
                let g = PolarGrid::new(p.s_lo, p.s_hi, n, n_theta)?;
                radial_map(p, g)
            }),
        ),
    ];
    let reports: Result<Vec<BoundReport>> = cases
        .par_iter()
        .map(|(name, build)| {
            let a = build(grid.n_u, grid.n_theta)?.bochner_field()?.sup_norms(1);
            let b = build(2 * grid.n_u - 1, 2 * grid.n_theta)?.bochner_field()?.sup_norms(1);
            let (e0, e1) = (a.0.max(a.1), b.0.max(b.1));
            let rep = if e1 < 1e-9 {
                BoundReport::new("bochner_order", 0.0, 0.0, format!("{name}; roundoff level"))
            } else {
                BoundReport::new("bochner_order", 1.5, observed_order(e0, e1), name.clone())
            };
            Ok(rep.with("defect_coarse", e0).with("defect_fine", e1).with("skipped", (a.2 + b.2) as f64))
        })
        .collect();
    Ok(SuiteReport { suite: "bochner".to_string(), reports: reports? })
}

pub const SUITES: [&str; 5] = ["equator", "schwarzpick", "heinz", "flux", "bochner"];

/// Runs a named suite, or all of them for "all".
pub fn run_suite(name: &str, grid: SweepGrid) -> Result<Vec<SuiteReport>> {
    match name {
        "equator" => Ok(vec![equator_sweep(grid)?]),
        "schwarzpick" => Ok(vec![schwarzpick_sweep()?]),
        "heinz" => Ok(vec![heinz_sweep(grid)?]),
        "flux" => Ok(vec![flux_sweep(grid)?]),
        "bochner" => Ok(vec![bochner_sweep(grid)?]),
        "all" => SUITES.iter().map(|s| run_suite(s, grid).map(|mut v| v.remove(0))).collect(),
        other => Err(Error::arg(MODULE, format!("unknown suite {other:?}; expected one of {SUITES:?} or all"))),
    }
}
