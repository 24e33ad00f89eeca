#![no_main]

use hilbfock::ring::parse_table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_table(data);
});
