#![no_main]

use attoscatter::UnitsContext;
use libfuzzer_sys::fuzz_target;

// Anything that parses must either build or fail with an error, never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = attoscatter::cli::parse_config_str(text) else {
        return;
    };
    if let Ok(model) = cfg.build_model(&UnitsContext::default()) {
        let _ = cfg.build_state(&model);
    }
});
