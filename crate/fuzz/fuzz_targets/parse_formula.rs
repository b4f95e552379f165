#![no_main]

use atlcheck::formula::parse;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse(text) {
        // Printing must give text that parses back to the same formula.
        let again = parse(&f.to_string()).expect("display output parses");
        assert_eq!(again, f);
    }
});
