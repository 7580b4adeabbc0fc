#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    dipolatt_cli::fuzzing::config_json(data);
});
