#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 8192 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let _ = dirac2d::cli::VerificationConfig::parse(src);
});
