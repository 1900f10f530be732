#![no_main]

use libfuzzer_sys::fuzz_target;
use sram_pad::array::SegmentPlan;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(plan) = text.parse::<SegmentPlan>() {
        // anything accepted must print back to an equal plan
        let again: SegmentPlan = plan.to_string().parse().expect("printed plan reparses");
        assert_eq!(again, plan);
    }
});
