#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::harness::Scenario;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = serde_json::from_str::<Scenario>(text) {
            let _ = serde_json::to_string(&s);
        }
    }
});
