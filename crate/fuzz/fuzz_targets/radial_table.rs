#![no_main]

use libfuzzer_sys::fuzz_target;
use minigraph::metricspace::{parse_radial_table, RadialMetric};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_radial_table(s) {
        let (lo, hi) = table.range();
        let m = RadialMetric::table(table);
        let _ = m.rho(0.5 * (lo + hi));
        let _ = m.curvature(0.5 * (lo + hi));
    }
});
