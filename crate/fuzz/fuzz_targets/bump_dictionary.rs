#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::maximal::BumpDictionary;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(d) = serde_json::from_str::<BumpDictionary>(text) {
            let _ = d.certify();
            let _ = serde_json::to_string(&d);
        }
    }
});
