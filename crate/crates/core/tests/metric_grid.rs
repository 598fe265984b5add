use minigraph::annulusgrid::{d_theta, d_u, laplacian_of, wirtinger_of, ComplexField, PolarGrid};
use minigraph::metricspace::RadialMetric;
use num_complex::Complex64;
use proptest::prelude::*;

fn metrics() -> impl Strategy<Value = RadialMetric> {
    prop_oneof![
        Just(RadialMetric::sphere()),
        Just(RadialMetric::hyperbolic()),
        (0.2f64..2.0).prop_map(RadialMetric::cigar),
        (-1.5f64..1.5).prop_map(RadialMetric::power),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_fd_is_second_order(m in metrics(), t in 0.15f64..0.85) {
        let exact = m.curvature(t).unwrap();
        let e1 = (m.curvature_fd(t, 2e-2).unwrap() - exact).abs();
        let e2 = (m.curvature_fd(t, 1e-2).unwrap() - exact).abs();
        if e1 > 1e-7 {
            let ratio = e1 / e2;
            prop_assert!((3.5..4.5).contains(&ratio), "ratio {ratio} for {}", m.name());
        }
    }

    #[test]
    fn scaling_composes(m in metrics(), a in 0.5f64..2.0, b in 0.5f64..2.0, t in 0.2f64..0.8) {
        let ab = m.scaled(a).unwrap().scaled(b).unwrap();
        let direct = m.scaled(a * b).unwrap();
        prop_assert!((ab.rho(t) - direct.rho(t)).abs() <= 1e-12 * direct.rho(t).max(1.0));
        let k = m.scaled(a).unwrap().curvature(t).unwrap() * a * a;
        let k0 = m.curvature(t).unwrap();
        prop_assert!((k - k0).abs() <= 1e-9 * k0.abs().max(1.0));
    }

    #[test]
    fn model_curvatures_are_constant(t in 0.05f64..0.95) {
        prop_assert!((RadialMetric::sphere().curvature(t).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((RadialMetric::hyperbolic().curvature(t).unwrap() + 1.0).abs() < 1e-12);
        prop_assert_eq!(RadialMetric::euclidean().curvature(t).unwrap(), 0.0);
    }

    #[test]
    fn theta_stencil_is_periodic(n in 3usize..9, k in 1i32..4, shift in 0usize..64) {
        let g = PolarGrid::new(0.5, 2.0, 9, 8 * n).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|q| {
            let (i, j) = g.node(q);
            g.radius(i) * (k as f64 * g.theta(j)).sin()
        }).collect();
        let j = shift % g.n_theta;
        let jw = (j + g.n_theta) % g.n_theta;
        prop_assert_eq!(d_theta(&g, &f, 4, j), d_theta(&g, &f, 4, jw));
        let wrapped = g.wrap(j as isize - g.n_theta as isize);
        prop_assert_eq!(wrapped, j);
    }
}

fn err_at(n: usize, op: &str) -> f64 {
    let n_u = 8 * n + 1;
    let g = PolarGrid::new(0.5, 2.0, n_u, 8 * n).unwrap();
    let (i, j) = ((n_u - 1) / 2 + n, n);
    let z = g.z(i, j);
    let f = |z: Complex64| (z * z * z).re + z.norm_sqr().powi(2);
    let v: Vec<f64> = (0..g.len()).map(|q| f(g.z_at(q))).collect();
    match op {
        "u" => {
            let exact = 3.0 * (z * z * z).re + 4.0 * z.norm_sqr().powi(2);
            (d_u(&g, &v, i, j).0 - exact).abs()
        }
        "theta" => {
            let exact = -3.0 * z.norm().powi(3) * (3.0 * z.arg()).sin();
            (d_theta(&g, &v, i, j) - exact).abs()
        }
        _ => {
            let exact = 16.0 * z.norm_sqr();
            (laplacian_of(&g, &v, i, j).unwrap() - exact).abs()
        }
    }
}

#[test]
fn stencils_refine_at_second_order() {
    for op in ["u", "theta", "lap"] {
        let ratio = err_at(2, op) / err_at(4, op);
        assert!((3.5..=4.5).contains(&ratio), "{op}: ratio {ratio}");
    }
}

#[test]
fn wirtinger_chain_matches_laplacian() {
    // f = z|z|², f_zz̄ = 2z
    let mut errs = Vec::new();
    for n in [2usize, 4] {
        let n_u = 8 * n + 1;
        let g = PolarGrid::new(0.5, 2.0, n_u, 8 * n).unwrap();
        let field = ComplexField::from_fn(g.clone(), |z| z * z.norm_sqr()).unwrap();
        let fz: Vec<Complex64> = (0..g.len()).map(|q| {
            let (i, j) = g.node(q);
            wirtinger_of(&g, &field.samples, i, j).0
        }).collect();
        let (i, j) = ((n_u - 1) / 2, n);
        let chained = wirtinger_of(&g, &fz, i, j).1;
        let direct = field.mixed(i, j).unwrap();
        let exact = 2.0 * g.z(i, j);
        assert!((chained - direct).norm() < 0.05 * exact.norm());
        errs.push((chained - exact).norm());
    }
    let ratio = errs[0] / errs[1];
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}
