#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = hdsteer::expdata::CoincidenceTable::from_csv(text, None) {
            let again = hdsteer::expdata::CoincidenceTable::from_csv(&table.to_csv(), Some(table.dim())).unwrap();
            assert_eq!(again.to_csv(), table.to_csv());
        }
    }
});
