#![no_main]

use libfuzzer_sys::fuzz_target;

use jigsaw::io::{parse_puzzle_json, puzzle_to_json, ReadMode};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for mode in [ReadMode::Strict, ReadMode::Lenient] {
        if let Ok(loaded) = parse_puzzle_json(text, mode) {
            // anything that parses must survive a write/read round trip
            let again = puzzle_to_json(&loaded.carving, &loaded.system, loaded.seed);
            let reparsed = parse_puzzle_json(&again, ReadMode::Strict)
                .expect("serialized puzzle re-parses");
            assert_eq!(reparsed.carving, loaded.carving);
            assert_eq!(reparsed.system, loaded.system);
            assert_eq!(reparsed.seed, loaded.seed);
        }
    }
});
