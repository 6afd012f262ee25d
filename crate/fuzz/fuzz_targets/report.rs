#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::report::InequalityReport;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = serde_json::from_str::<InequalityReport>(text) {
            let _ = serde_json::to_string(&r);
        }
    }
});
