#![no_main]

use libfuzzer_sys::fuzz_target;
use netspectra::ModelSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ModelSpec::from_json(text) else { return };
    assert_eq!(ModelSpec::from_json(&spec.to_json()).unwrap(), spec);
    if let Ok(model) = spec.build() {
        assert!(model.mean_degree() > 0.0);
    }
});
