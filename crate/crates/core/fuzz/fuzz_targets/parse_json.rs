#![no_main]

use libfuzzer_sys::fuzz_target;
use nlq_core::cli::export::parse_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_json(text) {
        doc.scenario_id().expect("validated scenario");
        doc.trajectories().expect("validated trajectories");
    }
});
