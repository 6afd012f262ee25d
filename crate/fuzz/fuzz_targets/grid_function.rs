#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::geometry::GridFunction;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(f) = serde_json::from_str::<GridFunction>(text) {
            let _ = serde_json::to_string(&f);
        }
    }
});
