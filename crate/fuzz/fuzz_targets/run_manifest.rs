#![no_main]

use libfuzzer_sys::fuzz_target;
use netspectra::RunManifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(manifest) = RunManifest::from_json(text) {
        assert_eq!(RunManifest::from_json(&manifest.to_json()).unwrap(), manifest);
        assert!(!manifest.file_name().contains('/'));
    }
});
