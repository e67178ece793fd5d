#![no_main]

use libfuzzer_sys::fuzz_target;

use jigsaw::io::{box_to_json, parse_box_json, ReadMode};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for mode in [ReadMode::Strict, ReadMode::Lenient] {
        if let Ok(loaded) = parse_box_json(text, mode) {
            let again = box_to_json(&loaded.pieces, &loaded.system);
            let reparsed =
                parse_box_json(&again, ReadMode::Strict).expect("serialized box re-parses");
            assert_eq!(reparsed.pieces, loaded.pieces);
            assert_eq!(reparsed.system, loaded.system);
            // canonical keys never warn on the second pass
            assert!(reparsed.warnings.is_empty());
        }
    }
});
