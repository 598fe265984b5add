//! Nonlinear SOR on the discrete ℘-Dirichlet energy
//! E = ½ Σ_edges w_e ℘²(mid_e)|ΔF|², boundary nodes sliding on their circles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{HarmonicMapCandidate, MODULE};
use crate::annulusgrid::{ComplexField, PolarGrid};
use crate::error::{Error, Result};
use crate::metricspace::MetricField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    /// Checkerboard colouring; each half-sweep runs in parallel and the
    /// result does not depend on the worker count. Needs even n_theta.
    RedBlack,
    /// Plain Gauss-Seidel in storage order, single-threaded.
    Lexicographic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerOptions {
    pub max_sweeps: usize,
    /// Relative energy decrease per sweep below which the run may stop.
    pub tol_energy: f64,
    /// Sup-norm of node updates below which the run may stop.
    pub tol_grad: f64,
    /// Over-relaxation factor; `None` uses 2/(1 + sin(π/(n_u − 1))).
    pub damping: Option<f64>,
    /// Initial rotation of the angular coordinate.
    pub seed_rotation: f64,
    pub order: SweepOrder,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        MinimizerOptions {
            max_sweeps: 100_000,
            tol_energy: 1e-10,
            tol_grad: 1e-6,
            damping: None,
            seed_rotation: 0.0,
            order: SweepOrder::RedBlack,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub candidate: HarmonicMapCandidate,
    pub converged: bool,
    pub sweeps: usize,
    /// Discrete energy after initialisation and after every sweep.
    pub energy_trace: Vec<f64>,
    pub max_update: f64,
    /// Grid cells with non-positive orientation.
    pub fold_cells: usize,
}

impl MinimizeOutcome {
    pub fn fold_warning(&self) -> Option<String> {
        (self.fold_cells > 0).then(|| format!("{} grid cells fold over (Jacobian sign flip)", self.fold_cells))
    }
}

struct Problem<'a> {
    grid: &'a PolarGrid,
    metric: &'a MetricField,
    flat: Option<f64>,
    w_u: f64,
    w_theta: f64,
    radii: (f64, f64),
    omega: f64,
}

struct Local {
    energy: f64,
    grad: Complex64,
    hess: f64,
}

impl Problem<'_> {
    /// (℘², ∇℘²) at a point.
    fn metric_at(&self, m: Complex64) -> Option<(f64, Complex64)> {
        if let Some(s2) = self.flat {
            return Some((s2, Complex64::new(0.0, 0.0)));
        }
        let v = self.metric.value(m).ok()?;
        let g = self.metric.grad_rho_sq(m).ok()?;
        Some((v * v, g))
    }

    fn neighbours(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let g = self.grid;
        let wt = if i == 0 || i + 1 == g.n_u { 0.5 * self.w_theta } else { self.w_theta };
        let down = (i > 0).then(|| (g.idx(i - 1, j), self.w_u));
        let up = (i + 1 < g.n_u).then(|| (g.idx(i + 1, j), self.w_u));
        let left = Some((g.idx(i, g.wrap(j as isize - 1)), wt));
        let right = Some((g.idx(i, g.wrap(j as isize + 1)), wt));
        [down, up, left, right].into_iter().flatten()
    }

    /// Energy of the edges at node (i, j) with the node moved to `x`, with
    /// gradient and diagonal Hessian in x.
    fn local(&self, f: &[Complex64], i: usize, j: usize, x: Complex64) -> Option<Local> {
        let mut out = Local { energy: 0.0, grad: Complex64::new(0.0, 0.0), hess: 0.0 };
        for (k, w) in self.neighbours(i, j) {
            let d = x - f[k];
            let (r2, gr2) = self.metric_at(0.5 * (x + f[k]))?;
            out.energy += 0.5 * w * r2 * d.norm_sqr();
            out.grad += w * (d * r2 + gr2 * (0.25 * d.norm_sqr()));
            out.hess += w * r2;
        }
        Some(out)
    }

    /// The improved position of node (i, j) and the size of the move.
    fn relax(&self, f: &[Complex64], i: usize, j: usize) -> (Complex64, f64) {
        let x = f[self.grid.idx(i, j)];
        let Some(l0) = self.local(f, i, j, x) else {
            return (x, 0.0);
        };
        if l0.hess <= 0.0 {
            return (x, 0.0);
        }
        let boundary = if i == 0 {
            Some(self.radii.0)
        } else if i + 1 == self.grid.n_u {
            Some(self.radii.1)
        } else {
            None
        };
        let mut scale = 1.0;
        for _ in 0..30 {
            let y = match boundary {
                None => x - l0.grad * (scale * self.omega / l0.hess),
                Some(r) => {
                    let de = (l0.grad * (Complex64::i() * x).conj()).re;
                    let dphi = -scale * self.omega * de / (l0.hess * r * r);
                    Complex64::from_polar(r, x.arg() + dphi)
                }
            };
            if y == x {
                return (x, 0.0);
            }
            if let Some(l1) = self.local(f, i, j, y) {
                if l1.energy <= l0.energy {
                    return (y, (y - x).norm());
                }
            }
            scale *= 0.5;
        }
        (x, 0.0)
    }

    fn energy(&self, f: &[Complex64]) -> Result<f64> {
        let g = self.grid;
        let mut e = 0.0;
        for i in 0..g.n_u {
            let wt = if i == 0 || i + 1 == g.n_u { 0.5 * self.w_theta } else { self.w_theta };
            for j in 0..g.n_theta {
                let a = f[g.idx(i, j)];
                let mut edge = |b: Complex64, w: f64| -> Result<()> {
                    let (r2, _) = self
                        .metric_at(0.5 * (a + b))
                        .ok_or_else(|| Error::domain(MODULE, format!("map leaves the metric domain near node ({i}, {j})")))?;
                    e += 0.5 * w * r2 * (a - b).norm_sqr();
                    Ok(())
                };
                if i + 1 < g.n_u {
                    edge(f[g.idx(i + 1, j)], self.w_u)?;
                }
                edge(f[g.idx(i, g.wrap(j as isize + 1))], wt)?;
            }
        }
        Ok(e)
    }
}

/// Cells (i, j)-(i+1, j)-(i, j+1) with non-positive signed area.
pub(crate) fn count_folds(grid: &PolarGrid, f: &[Complex64]) -> usize {
    let mut n = 0;
    for i in 0..grid.n_u - 1 {
        for j in 0..grid.n_theta {
            let a = f[grid.idx(i, j)];
            let du = f[grid.idx(i + 1, j)] - a;
            let dt = f[grid.idx(i, grid.wrap(j as isize + 1))] - a;
            if (du.conj() * dt).im <= 0.0 {
                n += 1;
            }
        }
    }
    n
}

/// Minimises the discrete ℘-Dirichlet energy over grid maps sending the
/// inner circle of `domain` to |w| = target.0 and the outer to |w| = target.1.
pub fn minimize_energy(
    domain: &PolarGrid,
    target: (f64, f64),
    metric: &MetricField,
    opts: &MinimizerOptions,
) -> Result<MinimizeOutcome> {
    let (t_in, t_out) = target;
    if !(t_in > 0.0 && t_out > t_in && t_out.is_finite()) {
        return Err(Error::arg(MODULE, format!("need 0 < target inner < target outer radius, got ({t_in}, {t_out})")));
    }
    if !(opts.tol_energy >= 0.0 && opts.tol_grad >= 0.0) {
        return Err(Error::arg(MODULE, "tolerances must be non-negative"));
    }
    let g = domain;
    let omega = opts.damping.unwrap_or(2.0 / (1.0 + (PI / (g.n_u - 1) as f64).sin()));
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::arg(MODULE, format!("damping must lie in (0, 2), got {omega}")));
    }
    if opts.order == SweepOrder::RedBlack && g.n_theta % 2 != 0 {
        return Err(Error::arg(MODULE, format!("red-black sweeps need an even n_theta, got {}", g.n_theta)));
    }
    for t in [t_in, t_out] {
        metric
            .value(Complex64::new(t, 0.0))
            .map_err(|e| Error::domain(MODULE, format!("target circle |w| = {t} leaves the metric domain: {e}")))?;
    }

    let (du, dt) = (g.du(), g.dtheta());
    let gamma_u = (0.5 * du).powi(2) / (0.5 * du).sinh().powi(2);
    let gamma_t = (0.5 * dt).powi(2) / (0.5 * dt).sin().powi(2);
    let flat = match metric {
        MetricField::Radial(r) if r.is_euclidean() => Some(r.scale * r.scale),
        _ => None,
    };
    let prob = Problem {
        grid: g,
        metric,
        flat,
        w_u: dt / du * gamma_u,
        w_theta: du / dt * gamma_t,
        radii: (t_in, t_out),
        omega,
    };

    let (lu_in, lu_out) = (t_in.ln(), t_out.ln());
    let span = g.u(g.n_u - 1) - g.u(0);
    let mut f: Vec<Complex64> = (0..g.len())
        .map(|k| {
            let (i, j) = g.node(k);
            let s = (g.u(i) - g.u(0)) / span;
            Complex64::from_polar((lu_in + s * (lu_out - lu_in)).exp(), g.theta(j) + opts.seed_rotation)
        })
        .collect();

    let colours: [Vec<(usize, usize)>; 2] = {
        let mut c = [Vec::new(), Vec::new()];
        for i in 0..g.n_u {
            for j in 0..g.n_theta {
                c[(i + j) % 2].push((i, j));
            }
        }
        c
    };

    let mut trace = vec![prob.energy(&f)?];
    let mut converged = false;
    let mut sweeps = 0;
    let mut max_update = f64::INFINITY;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut worst = 0.0f64;
        match opts.order {
            SweepOrder::RedBlack => {
                for nodes in &colours {
                    let moves: Vec<(Complex64, f64)> = nodes.par_iter().map(|&(i, j)| prob.relax(&f, i, j)).collect();
                    for (&(i, j), (y, d)) in nodes.iter().zip(moves) {
                        f[g.idx(i, j)] = y;
                        worst = worst.max(d);
                    }
                }
            }
            SweepOrder::Lexicographic => {
                for i in 0..g.n_u {
                    for j in 0..g.n_theta {
                        let (y, d) = prob.relax(&f, i, j);
                        f[g.idx(i, j)] = y;
                        worst = worst.max(d);
                    }
                }
            }
        }
        let e = prob.energy(&f)?;
        let prev = *trace.last().unwrap_or(&e);
        trace.push(e);
        max_update = worst;
        let rel = (prev - e) / e.abs().max(f64::MIN_POSITIVE);
        if rel < opts.tol_energy && worst < opts.tol_grad {
            converged = true;
            break;
        }
    }

    let fold_cells = count_folds(g, &f);
    let field = ComplexField::new(g.clone(), f)?;
    let mut candidate = HarmonicMapCandidate::new(field, metric.clone())?;
    candidate.target = Some(target);
    Ok(MinimizeOutcome { candidate, converged, sweeps, energy_trace: trace, max_update, fold_cells })
}
