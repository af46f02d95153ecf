#![no_main]

use aerosym::sim::{run_scenario, ScenarioFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = ScenarioFile::from_json(text) else {
        return;
    };
    let Ok(mut scenario) = file.compile(None) else {
        return;
    };
    // keep runs short
    scenario.duration = scenario.duration.min(20.0 * scenario.dt);
    let _ = run_scenario(&scenario);
});
