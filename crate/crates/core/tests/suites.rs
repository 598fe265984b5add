use std::time::Instant;

use minigraph::bounds::{run_suite, SweepGrid, SUITES};

#[test]
fn every_suite_passes_at_64() {
    let grid = SweepGrid { n_u: 64, n_theta: 64 };
    for name in SUITES {
        let t = Instant::now();
        let suite = run_suite(name, grid).unwrap().remove(0);
        for r in &suite.reports {
            if !r.passes(1e-9) {
                eprintln!("{name}: {r:?}");
            }
        }
        eprintln!("{name}: {} reports, worst {:?}, {:?}", suite.reports.len(), suite.worst().map(|r| (&r.name, r.margin)), t.elapsed());
        assert!(suite.passes(1e-9), "{name}");
    }
}

