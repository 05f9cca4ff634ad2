#![no_main]

use libfuzzer_sys::fuzz_target;

// Anything the reader accepts must survive one emit/parse cycle exactly.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(table) = gevtail::parse_csv_table(text) else { return };
    let emitted = table.to_csv();
    let again = gevtail::parse_csv_table(&emitted).expect("own output must parse");
    assert_eq!(again.to_csv(), emitted);
    let _ = table.to_json_string();
});
