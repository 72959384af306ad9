#![no_main]

use libfuzzer_sys::fuzz_target;
use onel1::io::{decode_pgm, encode_pgm};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_pgm(data) {
        assert_eq!(img.pixels.len(), img.height * img.width);
        let again = decode_pgm(&encode_pgm(&img)).unwrap();
        assert_eq!((again.height, again.width), (img.height, img.width));
    }
});
