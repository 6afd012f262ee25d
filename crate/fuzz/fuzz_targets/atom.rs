#![no_main]

use libfuzzer_sys::fuzz_target;
use varexp::atoms::Atom;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(a) = serde_json::from_str::<Atom>(text) {
            let _ = serde_json::to_string(&a);
        }
    }
});
