#![no_main]

use libfuzzer_sys::fuzz_target;

use dirac2d::jets::C;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1024 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(expr) = dirac2d::expr::parse(src) else {
        return;
    };
    // parsing succeeded: evaluation must not panic either
    let _ = expr.eval_const();
    let _ = expr.eval_jet((C::new(0.3, 0.0), C::new(-0.2, 0.0)), 2);
});
