#![no_main]

use aerosym::aero::{equivalency_defect, ModelCard};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(card) = ModelCard::from_json_slice(data) else {
        return;
    };
    let Ok(model) = card.to_model() else { return };
    // a valid model survives a round trip through its card
    let again = ModelCard::from_json_slice(
        ModelCard::from_model(&model, None)
            .to_json_pretty()
            .as_bytes(),
    )
    .expect("re-parse")
    .to_model()
    .expect("re-validate");
    assert_eq!(again, model);
    let grid: Vec<f64> = (1..90).map(|d| f64::from(d).to_radians()).collect();
    let _ = equivalency_defect(&model, &grid);
});
