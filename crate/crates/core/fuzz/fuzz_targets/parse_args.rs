#![no_main]

use libfuzzer_sys::fuzz_target;
use nlq_core::cli::parse_args;

// NUL-separated argv, program name prepended.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let argv = std::iter::once("nlq").chain(text.split('\0'));
    if let Ok(nlq_core::cli::Command::Run(cfg)) = parse_args(argv) {
        assert!(cfg.config.validate().is_ok());
        assert!((6..=17).contains(&cfg.precision));
    }
});
