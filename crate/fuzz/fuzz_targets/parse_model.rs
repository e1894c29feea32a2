#![no_main]

use junctionc::model::ModelFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = ModelFile::parse(text) else {
        return;
    };
    if let Ok(model) = file.resolve() {
        // anything accepted must survive a round trip unchanged
        let again = model.to_file().to_json().parse::<junctionc::model::Model>();
        assert_eq!(again.as_ref(), Ok(&model));
    }
});
