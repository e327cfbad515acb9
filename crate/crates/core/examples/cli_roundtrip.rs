//! Drives the CLI in-process: search, then pipe the records through verify.
//!
//! ```text
//! cargo run -p sdioph --example cli_roundtrip
//! ```

use std::io::Cursor;

fn main() {
    let mut found = Vec::new();
    let mut err = Vec::new();
    let code = sdioph::cli::run(
        ["sdioph", "search", "--primes", "2,3,5,7,11,13", "--max", "60", "--size", "4"],
        &mut Cursor::new(Vec::new()),
        &mut found,
        &mut err,
    );
    println!("search exit {code}, {} records", found.iter().filter(|&&b| b == b'\n').count());

    let mut verified = Vec::new();
    let code = sdioph::cli::run(["sdioph", "verify"], &mut Cursor::new(found), &mut verified, &mut err);
    let text = String::from_utf8_lossy(&verified);
    for line in text.lines().take(3) {
        println!("{line}");
    }
    let ok = text.lines().filter(|l| l.contains("\"verified\":true")).count();
    println!("verify exit {code}, {ok} of {} records verified", text.lines().count());
}
