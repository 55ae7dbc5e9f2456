#![no_main]

use libfuzzer_sys::fuzz_target;
use nlq_core::cli::export::{parse_csv, to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(arms) = parse_csv(text) else {
        return;
    };
    // arms on a shared grid must survive a full-precision round trip
    let grid = arms.first().map(|a| a.trajectory.times().to_vec());
    if arms.iter().all(|a| Some(a.trajectory.times().to_vec()) == grid) {
        let again = parse_csv(&to_csv(&arms, 17)).expect("re-encoded csv parses");
        assert_eq!(again.len(), arms.len());
    }
});
