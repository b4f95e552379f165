#![no_main]

use atlcheck::cgm::ExplicitCgm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = ExplicitCgm::parse(text) {
        let again = ExplicitCgm::parse(&m.to_text()).expect("written model loads");
        assert_eq!(again.to_text(), m.to_text());
    }
});
