#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::exponent::ExponentField;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = serde_json::from_str::<ExponentField>(text) {
            let _ = serde_json::to_string(&p);
        }
    }
});
