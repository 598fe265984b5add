//! Radial ℘-harmonic maps f(se^{iθ}) = p(s)e^{iθ} and their Hopf constants.
//!
//! The profile is defined implicitly by
//! log s = ∫₁ᵖ ρ(y)/√(4c + y²ρ²(y)) dy,
//! normalised so that p(1) = 1.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::annulusgrid::{AnalyticMap, ComplexField, PolarGrid};
use crate::error::{Error, Result};
use crate::harmonicmap::HarmonicMapCandidate;
use crate::metricspace::{MetricField, RadialMetric};
use crate::quad;

const MODULE: &str = "radialfamily";

/// Width of the square-root substitution window at an integration endpoint.
const SQRT_WINDOW: f64 = 1e-3;
const QUAD_TOL: f64 = 1e-13;
const ODE_ATOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// c < 0
    Catenoidal,
    /// c > 0
    Helicoidal,
    /// c = 0
    Conformal,
}

impl Direction {
    pub fn of(c: f64) -> Self {
        if c < 0.0 {
            Direction::Catenoidal
        } else if c > 0.0 {
            Direction::Helicoidal
        } else {
            Direction::Conformal
        }
    }
}

/// g(y) = 4c + y²ρ²(y).
pub fn admissibility(metric: &RadialMetric, c: f64, y: f64) -> f64 {
    let r = metric.rho(y);
    4.0 * c + y * y * r * r
}

fn g_tol(c: f64) -> f64 {
    1e-12 * (1.0 + 4.0 * c.abs())
}

/// g(a + ε) evaluated without cancellation for small ε, given g(a).
fn g_near(metric: &RadialMetric, c: f64, a: f64, g_a: f64, eps: f64) -> f64 {
    if eps.abs() < 1e-6 {
        let (r, d, dd) = metric.jet(a);
        let q = a * r;
        let q1 = r + a * d;
        let q2 = 2.0 * d + a * dd;
        let dq = q1 * eps + 0.5 * q2 * eps * eps;
        g_a + dq * (2.0 * q + dq)
    } else {
        admissibility(metric, c, a + eps)
    }
}

/// Smallest value of g on [lo, hi] and where it is attained.
fn min_admissibility(metric: &RadialMetric, c: f64, lo: f64, hi: f64) -> (f64, f64) {
    let n = 512;
    let mut best = (lo, admissibility(metric, c, lo));
    for k in 1..=n {
        let y = lo + (hi - lo) * k as f64 / n as f64;
        let v = admissibility(metric, c, y);
        if v < best.1 || v.is_nan() {
            best = (y, v);
        }
    }
    if best.1.is_nan() {
        return best;
    }
    // Golden-section polish around the best sample.
    let h = (hi - lo) / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - gr * (b - a);
        let x2 = a + gr * (b - a);
        if admissibility(metric, c, x1) < admissibility(metric, c, x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let y = 0.5 * (a + b);
    let v = admissibility(metric, c, y);
    if v < best.1 {
        (y, v)
    } else {
        best
    }
}

/// ∫ₐᵇ ρ/√(4c + y²ρ²) dy, with a square-root substitution next to each
/// endpoint so that simple zeros of the radicand stay integrable.
pub fn log_modulus_integral(metric: &RadialMetric, c: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::arg(MODULE, format!("radii must be positive and finite, got {a} and {b}")));
    }
    if !c.is_finite() {
        return Err(Error::arg(MODULE, "Hopf constant must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    if !metric.contains(lo) || !metric.contains(hi) {
        return Err(Error::domain(MODULE, format!("[{lo}, {hi}] leaves the support of {}", metric.name())));
    }
    let tol = g_tol(c);
    let (ym, gm) = min_admissibility(metric, c, lo, hi);
    if gm.is_nan() || gm < -tol {
        return Err(Error::Admissibility { y: ym, value: gm });
    }
    let interior = ym > lo + 1e-9 * hi && ym < hi * (1.0 - 1e-9);
    if interior && gm <= tol {
        return Err(Error::Admissibility { y: ym, value: gm });
    }
    let clamp = |g: f64| if g.abs() <= tol { 0.0 } else { g };
    let g_lo = clamp(admissibility(metric, c, lo));
    let g_hi = clamp(admissibility(metric, c, hi));
    let w = SQRT_WINDOW.min(0.5 * (hi - lo));

    // y = lo + v², dy = 2v dv
    let left = quad::integrate(
        |v| {
            let e = v * v;
            let g = g_near(metric, c, lo, g_lo, e).max(0.0);
            2.0 * v * metric.rho(lo + e) / g.sqrt()
        },
        0.0,
        w.sqrt(),
        QUAD_TOL,
        MODULE,
    )?;
    // y = hi − v²
    let right = quad::integrate(
        |v| {
            let e = v * v;
            let g = g_near(metric, c, hi, g_hi, -e).max(0.0);
            2.0 * v * metric.rho(hi - e) / g.sqrt()
        },
        0.0,
        w.sqrt(),
        QUAD_TOL,
        MODULE,
    )?;
    let mid = if hi - lo > 2.0 * w {
        quad::integrate(
            |y| metric.rho(y) / admissibility(metric, c, y).max(0.0).sqrt(),
            lo + w,
            hi - w,
            QUAD_TOL,
            MODULE,
        )?
    } else {
        0.0
    };
    Ok(sign * (left + mid + right))
}

/// Domain radius s reached at target radius t: s = exp∫₁ᵗ ρ/√(4c + y²ρ²).
pub fn forward_modulus(metric: &RadialMetric, c: f64, t: f64) -> Result<f64> {
    Ok(log_modulus_integral(metric, c, 1.0, t)?.exp())
}

/// One Dormand-Prince 5(4) step of y′ = f(x); returns (y5, error estimate,
/// f at the new point). The right-hand side does not depend on y, so the
/// second stage drops out and the last two stages coincide.
fn dopri_step(f: &impl Fn(f64) -> f64, x: f64, y: f64, h: f64, k1: f64) -> (f64, f64, f64) {
    let k3 = f(x + 3.0 * h / 10.0);
    let k4 = f(x + 4.0 * h / 5.0);
    let k5 = f(x + 8.0 * h / 9.0);
    let k6 = f(x + h);
    let y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    let y4 = y + h
        * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5
            + (187.0 / 2100.0 + 1.0 / 40.0) * k6);
    (y5, (y5 - y4).abs(), k6)
}

/// Marches σ(t) = ∫₁ᵗ ρ/√g from t = 1 in direction `dir` until σ passes
/// `target`, returning knots (t, σ).
fn march(metric: &RadialMetric, c: f64, dir: f64, target: f64) -> Result<Vec<(f64, f64)>> {
    let tol = g_tol(c);
    let g1 = admissibility(metric, c, 1.0);
    let g1 = if g1.abs() <= tol { 0.0 } else { g1 };
    let (r1, d1, _) = metric.jet(1.0);
    let dg1 = 2.0 * r1 * r1 + 2.0 * r1 * d1;
    if g1 == 0.0 && dir * dg1 <= 0.0 {
        return Err(Error::TurningPoint { t: 1.0 });
    }
    let t_of = |v: f64| 1.0 + dir * v * v;
    // dσ/dv with t = 1 + dir·v².
    let rhs = |v: f64| -> f64 {
        if v == 0.0 {
            return if g1 == 0.0 { dir * 2.0 * r1 / (dir * dg1).sqrt() } else { 0.0 };
        }
        let t = t_of(v);
        if !metric.contains(t) || t <= 0.0 {
            return f64::NAN;
        }
        let g = g_near(metric, c, 1.0, g1, t - 1.0);
        if !(g > 0.0) {
            return f64::NAN;
        }
        dir * 2.0 * v * metric.rho(t) / g.sqrt()
    };
    let mut knots = vec![(1.0, 0.0)];
    let (mut v, mut y) = (0.0f64, 0.0f64);
    let mut h = 1e-2;
    let mut k1 = rhs(0.0);
    let mut last_fail: Option<f64> = None;
    for _ in 0..1_000_000 {
        if dir * y >= dir * target {
            return Ok(knots);
        }
        let (y5, err, k7) = dopri_step(&rhs, v, y, h, k1);
        let scale = ODE_ATOL + 1e-12 * y.abs();
        if !(y5.is_finite() && err.is_finite()) {
            last_fail = Some(v + h);
            h *= 0.25;
        } else if err <= scale {
            v += h;
            y = y5;
            k1 = k7;
            knots.push((t_of(v), y));
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 4.0) };
            h *= grow;
            if let Some(f) = last_fail {
                h = h.min(0.5 * (f - v));
            }
        } else {
            h *= (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-13 * (1.0 + v) {
            return finish_at_obstruction(metric, c, dir, v, last_fail.unwrap_or(v + 1e-6), target, knots);
        }
    }
    Err(Error::numeric(MODULE, "profile integration exceeded the step budget"))
}

/// The march stalled in front of a zero of g or the end of the metric's
/// support. Locates it and either closes the profile there or reports why
/// the requested range is unreachable.
fn finish_at_obstruction(
    metric: &RadialMetric,
    c: f64,
    dir: f64,
    v_ok: f64,
    v_bad: f64,
    target: f64,
    mut knots: Vec<(f64, f64)>,
) -> Result<Vec<(f64, f64)>> {
    let t_of = |v: f64| 1.0 + dir * v * v;
    let good = |t: f64| metric.contains(t) && t > 0.0 && admissibility(metric, c, t) > 0.0;
    let (mut a, mut b) = (v_ok, v_bad.max(v_ok));
    let mut grow = 1e-9;
    while good(t_of(b)) {
        b = v_ok + grow;
        grow *= 2.0;
        if grow > 1e3 {
            return Err(Error::numeric(MODULE, "could not bracket the end of the profile"));
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if good(t_of(m)) {
            a = m;
        } else {
            b = m;
        }
    }
    let t_star = t_of(a);
    let end = t_of(b);
    if !metric.contains(end) || end <= 0.0 {
        return Err(Error::domain(MODULE, format!("profile leaves the support of {} near t = {t_star}", metric.name())));
    }
    let sigma = log_modulus_integral(metric, c, 1.0, t_star)?;
    if dir * sigma >= dir * target - 1e-12 {
        knots.push((t_star, sigma));
        Ok(knots)
    } else {
        Err(Error::TurningPoint { t: t_star })
    }
}

/// A radial harmonic profile p on [s_lo, s_hi].
#[derive(Debug)]
pub struct RadialProfile {
    pub c: f64,
    pub metric: RadialMetric,
    pub s_lo: f64,
    pub s_hi: f64,
    pub direction: Direction,
    /// (t, log s) knots from the ODE march, increasing in both.
    knots: Vec<(f64, f64)>,
    cache: Mutex<HashMap<u64, f64>>,
}

impl Clone for RadialProfile {
    fn clone(&self) -> Self {
        RadialProfile {
            c: self.c,
            metric: self.metric.clone(),
            s_lo: self.s_lo,
            s_hi: self.s_hi,
            direction: self.direction,
            knots: self.knots.clone(),
            cache: Mutex::new(self.cache.lock().map(|m| m.clone()).unwrap_or_default()),
        }
    }
}

/// Integrates the profile over [s_lo, s_hi] (extended to include s = 1).
pub fn solve_profile(metric: &RadialMetric, c: f64, s_lo: f64, s_hi: f64) -> Result<RadialProfile> {
    if !(s_lo > 0.0 && s_hi > s_lo && s_hi.is_finite()) {
        return Err(Error::arg(MODULE, format!("need 0 < s_lo < s_hi, got ({s_lo}, {s_hi})")));
    }
    if !c.is_finite() {
        return Err(Error::arg(MODULE, "Hopf constant must be finite"));
    }
    if !metric.contains(1.0) {
        return Err(Error::domain(MODULE, format!("metric {} undefined at the normalisation radius 1", metric.name())));
    }
    let g1 = admissibility(metric, c, 1.0);
    if g1 < -g_tol(c) {
        return Err(Error::Admissibility { y: 1.0, value: g1 });
    }
    let (sig_lo, sig_hi) = (s_lo.ln(), s_hi.ln());
    let mut knots = Vec::new();
    if c == 0.0 {
        for s in [s_lo.min(1.0), s_hi.max(1.0)] {
            if !metric.contains(s) {
                return Err(Error::domain(MODULE, format!("conformal profile leaves the support at t = {s}")));
            }
        }
        knots.push((s_lo.min(1.0), sig_lo.min(0.0)));
        knots.push((s_hi.max(1.0), sig_hi.max(0.0)));
    } else {
        if sig_lo < 0.0 {
            let mut k = march(metric, c, -1.0, sig_lo)?;
            k.reverse();
            knots.extend(k);
        }
        if sig_hi > 0.0 {
            let k = march(metric, c, 1.0, sig_hi)?;
            if knots.last().is_some_and(|l| l.0 == 1.0) {
                knots.extend(k.into_iter().skip(1));
            } else {
                knots.extend(k);
            }
        }
        if knots.is_empty() {
            knots.push((1.0, 0.0));
        }
        knots.dedup_by(|a, b| a.0 == b.0);
    }
    Ok(RadialProfile {
        c,
        metric: metric.clone(),
        s_lo,
        s_hi,
        direction: Direction::of(c),
        knots,
        cache: Mutex::new(HashMap::new()),
    })
}

impl RadialProfile {
    fn check_s(&self, s: f64) -> Result<()> {
        let slack = 1e-12 * self.s_hi;
        if !(s >= self.s_lo - slack && s <= self.s_hi + slack) {
            return Err(Error::domain(MODULE, format!("s = {s} outside the profile range [{}, {}]", self.s_lo, self.s_hi)));
        }
        Ok(())
    }

    /// log s as a function of the target radius t.
    pub fn log_s(&self, t: f64) -> Result<f64> {
        if self.c == 0.0 {
            return Ok(t.ln());
        }
        log_modulus_integral(&self.metric, self.c, 1.0, t)
    }

    /// p(s).
    pub fn p(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        if self.c == 0.0 || s == 1.0 {
            return Ok(s);
        }
        let key = s.to_bits();
        if let Some(v) = self.cache.lock().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(v);
        }
        let v = self.invert(s.ln())?;
        if let Ok(mut m) = self.cache.lock() {
            m.insert(key, v);
        }
        Ok(v)
    }

    fn invert(&self, sigma: f64) -> Result<f64> {
        let n = self.knots.len();
        let k = self.knots.partition_point(|kn| kn.1 < sigma).clamp(1, n - 1);
        let (mut lo, mut hi) = (k - 1, k);
        let gval = |t: f64| -> Result<f64> { Ok(self.log_s(t)? - sigma) };
        let mut g_lo = gval(self.knots[lo].0)?;
        let mut g_hi = gval(self.knots[hi].0)?;
        while g_lo > 0.0 && lo > 0 {
            lo -= 1;
            g_lo = gval(self.knots[lo].0)?;
        }
        while g_hi < 0.0 && hi + 1 < n {
            hi += 1;
            g_hi = gval(self.knots[hi].0)?;
        }
        let (mut a, mut b) = (self.knots[lo].0, self.knots[hi].0);
        if g_lo == 0.0 {
            return Ok(a);
        }
        if g_hi == 0.0 {
            return Ok(b);
        }
        if g_lo > 0.0 || g_hi < 0.0 {
            // Rounding at the very end of the range.
            if g_lo.abs() < 1e-11 {
                return Ok(a);
            }
            if g_hi.abs() < 1e-11 {
                return Ok(b);
            }
            return Err(Error::domain(MODULE, format!("log s = {sigma} outside the integrated profile")));
        }
        let frac = -g_lo / (g_hi - g_lo);
        let mut t = a + frac * (b - a);
        for _ in 0..100 {
            let gt = gval(t)?;
            if gt == 0.0 {
                return Ok(t);
            }
            if gt < 0.0 {
                a = t;
            } else {
                b = t;
            }
            let g = admissibility(&self.metric, self.c, t).max(0.0);
            let slope = self.metric.rho(t) / g.sqrt();
            let mut next = t - gt / slope;
            if !(next > a && next < b) || !next.is_finite() {
                next = 0.5 * (a + b);
            }
            let done = (next - t).abs() <= 1e-15 * t.max(1.0) || (b - a) <= 1e-15 * t.max(1.0);
            t = next;
            if done {
                return Ok(t);
            }
        }
        Ok(t)
    }

    /// (p, p′, p″) at s.
    pub fn jet(&self, s: f64) -> Result<(f64, f64, f64)> {
        let p = self.p(s)?;
        if self.c == 0.0 {
            return Ok((p, 1.0, 0.0));
        }
        let (r, d, _) = self.metric.jet(p);
        let g = admissibility(&self.metric, self.c, p).max(0.0);
        let dp = g.sqrt() / (s * r);
        let dg = 2.0 * p * r * r + 2.0 * p * p * r * d;
        let d2p = dg / (2.0 * s * s * r * r) - dp / s - dp * dp * d / r;
        Ok((p, dp, d2p))
    }

    pub fn dp(&self, s: f64) -> Result<f64> {
        Ok(self.jet(s)?.1)
    }

    /// ρ²(p)((sp′)² − p²)/4, which equals c on an exact profile.
    pub fn hopf_check(&self, s: f64) -> Result<f64> {
        let (p, dp, _) = self.jet(s)?;
        let r = self.metric.rho(p);
        Ok(r * r * ((s * dp).powi(2) - p * p) / 4.0)
    }

    /// p² − (sp′)² + 4c/ρ(p)², zero on an exact profile.
    pub fn identity_defect(&self, s: f64) -> Result<f64> {
        let (p, dp, _) = self.jet(s)?;
        let r = self.metric.rho(p);
        Ok(p * p - (s * dp).powi(2) + 4.0 * self.c / (r * r))
    }

    /// Residual of p″ + p′/s − p/s² + (ρ′/ρ)(p′² − p²/s²).
    pub fn ode_residual(&self, s: f64) -> Result<f64> {
        let (p, dp, d2p) = self.jet(s)?;
        let (r, d, _) = self.metric.jet(p);
        Ok(d2p + dp / s - p / (s * s) + d / r * (dp * dp - p * p / (s * s)))
    }

    /// m = |sp′ − p|/(sp′ + p).
    pub fn dilatation(&self, s: f64) -> Result<f64> {
        let (p, dp, _) = self.jet(s)?;
        Ok((s * dp - p).abs() / (s * dp + p))
    }

    /// Target radii covered by [s_lo, s_hi].
    pub fn t_range(&self) -> Result<(f64, f64)> {
        Ok((self.p(self.s_lo)?, self.p(self.s_hi)?))
    }

    /// Writes `s,p,dp_ds,hopf_c_check` on `n` log-spaced radii.
    pub fn write_csv<W: Write>(&self, out: W, n: usize) -> Result<()> {
        let n = n.max(2);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "p", "dp_ds", "hopf_c_check"])?;
        let (a, b) = (self.s_lo.ln(), self.s_hi.ln());
        for k in 0..n {
            let s = if k + 1 == n { self.s_hi } else { (a + (b - a) * k as f64 / (n - 1) as f64).exp() };
            let s = if k == 0 { self.s_lo } else { s };
            let (p, dp, _) = self.jet(s)?;
            w.write_record([s.to_string(), p.to_string(), dp.to_string(), self.hopf_check(s)?.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The closed-form map z ↦ p(|z|)e^{i arg z}.
#[derive(Debug, Clone)]
pub struct RadialMap {
    pub profile: Arc<RadialProfile>,
}

impl RadialMap {
    fn parts(&self, z: Complex64) -> Option<(f64, Complex64, f64, f64, f64)> {
        let s = z.norm();
        let (p, dp, d2p) = self.profile.jet(s).ok()?;
        Some((s, z / s, p, dp, d2p))
    }
}

impl AnalyticMap for RadialMap {
    fn value(&self, z: Complex64) -> Complex64 {
        match self.parts(z) {
            Some((_, e, p, _, _)) => e * p,
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    fn wirtinger(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.parts(z) {
            Some((s, e, p, dp, _)) => {
                let a = 0.5 * (dp + p / s);
                let b = 0.5 * (dp - p / s);
                (Complex64::new(a, 0.0), e * e * b)
            }
            None => (Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0)),
        }
    }

    fn second(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let (s, e, p, dp, d2p) = self.parts(z)?;
        let b = 0.5 * (dp - p / s);
        let da = 0.5 * (d2p + dp / s - p / (s * s));
        let db = 0.5 * (d2p - dp / s + p / (s * s));
        Some([e.conj() * (0.5 * da), e * (0.5 * da), e * e * e * (0.5 * db - b / s)])
    }

    fn label(&self) -> String {
        format!("radial profile c = {} on {}", self.profile.c, self.profile.metric.name())
    }
}

/// Samples the radial map on `grid` with closed-form derivatives attached.
pub fn radial_map(profile: Arc<RadialProfile>, grid: PolarGrid) -> Result<HarmonicMapCandidate> {
    profile.check_s(grid.r_in)?;
    profile.check_s(grid.r_out)?;
    let map = Arc::new(RadialMap { profile: profile.clone() });
    // Warm the profile cache one radius at a time.
    for i in 0..grid.n_u {
        profile.p(grid.radius(i))?;
    }
    let f = ComplexField::from_analytic(grid, map)?;
    let t = profile.t_range()?;
    let mut cand = HarmonicMapCandidate::new(f, MetricField::Radial(profile.metric.clone()))?;
    cand.target = Some(t);
    cand.profile = Some(profile);
    Ok(cand)
}

/// Finds c with exp∫₁ᴿ ρ/√(4c + y²ρ²) dy = r by bisection over the
/// admissible range, on which r is increasing in c.
pub fn solve_c(metric: &RadialMetric, r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0 && big_r > 0.0 && big_r < 1.0) {
        return Err(Error::arg(MODULE, format!("need 0 < r, R < 1, got r = {r}, R = {big_r}")));
    }
    if !metric.contains(big_r) || !metric.contains(1.0) {
        return Err(Error::domain(MODULE, format!("[{big_r}, 1] leaves the support of {}", metric.name())));
    }
    if r == big_r {
        return Ok(0.0);
    }
    let target = r.ln();
    let (_, qmin) = min_admissibility(metric, 0.0, big_r, 1.0);
    let c_min = -qmin / 4.0;
    let f = |c: f64| -> Option<f64> { log_modulus_integral(metric, c, 1.0, big_r).ok().map(|v| v - target) };
    let r_lo = f(c_min).map(|v| (v + target).exp()).unwrap_or(0.0);
    if r <= r_lo {
        return Err(Error::NoSolution { r, lo: r_lo, hi: 1.0 });
    }
    let mut c_hi = c_min.abs().max(1.0);
    loop {
        match f(c_hi) {
            Some(v) if v >= 0.0 => break,
            _ => {
                c_hi *= 2.0;
                if c_hi > 1e15 {
                    return Err(Error::NoSolution { r, lo: r_lo, hi: 1.0 });
                }
            }
        }
    }
    let mut c_lo = c_min;
    for _ in 0..200 {
        let m = 0.5 * (c_lo + c_hi);
        if m <= c_lo || m >= c_hi {
            break;
        }
        match f(m) {
            Some(v) if v == 0.0 => return Ok(m),
            Some(v) if v > 0.0 => c_hi = m,
            _ => c_lo = m,
        }
    }
    Ok(0.5 * (c_lo + c_hi))
}
