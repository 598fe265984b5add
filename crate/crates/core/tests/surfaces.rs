use std::sync::Arc;

use minigraph::annulusgrid::PolarGrid;
use minigraph::bounds::{annulus_samples, annulus_schwarz_pick, c_from_geometry, phi_flat, SchwarzPickFamily};
use minigraph::curvature::{best_curvature, curvature_decomposition, curvature_table, kal_bound_check};
use minigraph::metricspace::RadialMetric;
use minigraph::minimalsurface::{build_graph_radial, ConformalImmersion};
use minigraph::radialfamily::solve_profile;
use num_complex::Complex64;
use proptest::prelude::*;

fn immersion(m: &RadialMetric, c: f64, n: usize) -> ConformalImmersion {
    let p = Arc::new(solve_profile(m, c, 1.0, 1.5).unwrap());
    ConformalImmersion::from_profile(p, PolarGrid::new(1.0, 1.5, n + 1, n).unwrap(), 0.0).unwrap()
}

fn catenoidal() -> impl Strategy<Value = (RadialMetric, f64)> {
    prop_oneof![
        (-0.2f64..-0.01).prop_map(|c| (RadialMetric::euclidean(), c)),
        (-0.1f64..-0.01).prop_map(|c| (RadialMetric::sphere(), c)),
    ]
}

fn any_sign() -> impl Strategy<Value = (RadialMetric, f64)> {
    prop_oneof![catenoidal(), (0.01f64..0.3).prop_map(|c| (RadialMetric::sphere(), c))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn immersion_is_conformal((m, c) in any_sign()) {
        let imm = immersion(&m, c, 16);
        for k in (0..imm.grid().len()).step_by(7) {
            let (i, j) = imm.grid().node(k);
            let (d, x) = imm.conformality_defect(i, j).unwrap();
            prop_assert!(d.abs() < 1e-8 && x.abs() < 1e-8, "({d}, {x})");
        }
    }

    #[test]
    fn normal_height_matches_dilatation((m, c) in any_sign()) {
        let imm = immersion(&m, c, 16);
        for k in (0..imm.grid().len()).step_by(5) {
            let (i, j) = imm.grid().node(k);
            let n = imm.unit_normal(i, j).unwrap().n;
            let mu = imm.f.dilatation(i, j).unwrap().mu;
            let want = (mu * mu - 1.0) / (mu * mu + 1.0);
            prop_assert!((n[2] - want).abs() < 1e-10, "{} vs {want}", n[2]);
            let rho = m.rho(imm.f.f.at(i, j).norm());
            let len = rho * rho * (n[0] * n[0] + n[1] * n[1]) + n[2] * n[2];
            prop_assert!((len - 1.0).abs() < 1e-12, "|N|² = {len}");
        }
    }

    #[test]
    fn decomposition_is_consistent((m, c) in any_sign()) {
        let imm = immersion(&m, c, 16);
        for k in (0..imm.grid().len()).step_by(3) {
            let (i, j) = imm.grid().node(k);
            if !imm.grid().is_interior(i) {
                continue;
            }
            let d = curvature_decomposition(&imm, i, j).unwrap();
            let scale = d.a.abs().max(d.b.abs()).max(1e-12);
            prop_assert!((d.a - d.mu.powi(2) * d.b).abs() <= 1e-8 * scale, "A = {}, mu²B = {}", d.a, d.mu.powi(2) * d.b);
            let kal = kal_bound_check(&imm, i, j).unwrap();
            prop_assert!(kal.margin >= -1e-8, "margin {}", kal.margin);
        }
    }

    #[test]
    fn nonpositive_metric_curvature_gives_nonpositive_surface_curvature(
        c in prop_oneof![-0.2f64..-0.01, 0.01f64..0.3],
        flat_power in any::<bool>(),
    ) {
        let m = if flat_power { RadialMetric::power(-1.0) } else { RadialMetric::euclidean() };
        let imm = immersion(&m, c, 16);
        let k = best_curvature(&curvature_table(&imm).unwrap());
        for v in k.into_iter().filter(|v| v.is_finite()) {
            prop_assert!(v <= 1e-8, "K = {v}");
        }
    }

    #[test]
    fn flux_identity_holds((m, c) in catenoidal()) {
        let p = Arc::new(solve_profile(&m, c, 1.0, 1.5).unwrap());
        let graph = build_graph_radial(p, 0.0, 17, 16).unwrap().reflected();
        let rep = graph.flux_identity_check(c).unwrap();
        prop_assert!(rep.flux_defect < 1e-8, "{rep:?}");
    }

    #[test]
    fn graph_matches_log_modulus((m, c) in catenoidal(), offset in -2.0f64..2.0, s in 1.0f64..1.5, th in 0.0f64..6.3) {
        let p = Arc::new(solve_profile(&m, c, 1.0, 1.5).unwrap());
        let graph = build_graph_radial(p.clone(), offset, 17, 16).unwrap();
        let w = Complex64::from_polar(p.p(s).unwrap(), th);
        let want = 2.0 * (-c).sqrt() * (1.0 / s).ln() + offset;
        prop_assert!((graph.omega_at(w).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn phi_flat_is_increasing_and_above_identity(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi_flat(lo).unwrap() <= phi_flat(hi).unwrap());
        prop_assert!(phi_flat(a).unwrap() >= a);
    }

    #[test]
    fn geometry_constant_is_scale_free(d in 0.1f64..5.0, m in 0.1f64..5.0, k in 0.1f64..10.0) {
        let c0 = c_from_geometry(d, m).unwrap();
        let c1 = c_from_geometry(k * d, k * m).unwrap();
        prop_assert!((c0 - c1).abs() <= 1e-12 * c0.abs());
        prop_assert!(c0 < 0.0);
    }

    #[test]
    fn blaschke_family_obeys_schwarz_pick(re in -0.8f64..0.8, im in -0.5f64..0.5, r in 1.5f64..4.0) {
        prop_assume!(re * re + im * im < 0.81);
        let fam = SchwarzPickFamily::Blaschke(Complex64::new(re, im));
        for z in annulus_samples(r).into_iter().step_by(13) {
            let (w, dw) = fam.eval(r, z);
            let rep = annulus_schwarz_pick(w, dw, r, z).unwrap();
            prop_assert!(rep.margin >= -1e-12, "{rep:?}");
        }
    }
}

#[test]
fn graph_residual_is_second_order() {
    for (m, c) in [(RadialMetric::euclidean(), -0.09), (RadialMetric::sphere(), -0.05)] {
        let p = Arc::new(solve_profile(&m, c, 1.2, 2.0).unwrap());
        let sup = |n: usize| build_graph_radial(p.clone(), 0.0, n + 1, n).unwrap().without_analytic().residual_sup(2).unwrap();
        let (e1, e2) = (sup(32), sup(64));
        let order = (e1 / e2).log2();
        assert!((1.7..2.3).contains(&order), "{}: order {order} ({e1}, {e2})", m.name());
    }
}
