#![no_main]

use libfuzzer_sys::fuzz_target;
use minigraph::config::KeyValueConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = KeyValueConfig::parse(s) {
        let keys: Vec<String> = c.keys().map(str::to_string).collect();
        for k in &keys {
            assert!(c.raw(k).is_some());
            let _ = c.get::<f64>(k);
            let _ = c.get_pair::<usize>(k);
        }
    }
});
