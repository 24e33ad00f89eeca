#![no_main]

use hilbfock::frobenius::FrobeniusAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = FrobeniusAlgebra::from_json(text);
    }
});
