#![no_main]

use libfuzzer_sys::fuzz_target;
use minigraph::metricspace::parse_metric_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_metric_spec(s) {
        let back = parse_metric_spec(&m.name()).expect("name must parse");
        assert_eq!(back.name(), m.name());
        let _ = m.curvature(0.5);
    }
});
