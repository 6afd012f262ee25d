#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::geometry::Cube;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(q) = serde_json::from_str::<Cube>(text) {
            let _ = serde_json::to_string(&q);
        }
    }
});
