//! Lists the S-smooth integers up to a limit and factors a few values over S.
//!
//! ```text
//! cargo run -p sdioph --example smooth_numbers -- 2,3,5 100
//! ```

use sdioph::smooth::{enumerate_smooth, factor_over, s_free_part, PrimeSet};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let set: PrimeSet = args.first().map_or("2,3,5", String::as_str).parse().expect("prime list");
    let limit: u64 = args.get(1).map_or(Ok(100), |s| s.parse()).expect("limit");

    let smooth = enumerate_smooth(&set, limit);
    println!("{} {}-smooth integers up to {limit}:", smooth.len(), set);
    println!("{smooth:?}");

    for n in [40u64, 97, 360, 1001] {
        let (exps, cofactor) = factor_over(&n, &set).unwrap();
        let free = s_free_part(&n, &set).unwrap();
        println!("{n}: exponents {:?}, cofactor {cofactor}, S-free part {free}", exps.as_slice());
    }
}
