#![no_main]

use libfuzzer_sys::fuzz_target;
use netspectra::EdgeList;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = EdgeList::parse(text) {
        // canonical form must survive a second trip
        let canonical = list.to_text();
        assert_eq!(EdgeList::parse(&canonical).unwrap(), list);
    }
});
