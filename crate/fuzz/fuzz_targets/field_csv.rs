#![no_main]

use libfuzzer_sys::fuzz_target;
use minigraph::annulusgrid::ComplexField;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = ComplexField::read_csv(data) {
        let mut buf = Vec::new();
        f.write_csv(&mut buf).expect("write");
        let back = ComplexField::read_csv(buf.as_slice()).expect("reread");
        assert_eq!(back.samples, f.samples);
    }
});
