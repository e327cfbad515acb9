//! Scans 2^x - p^y = +-1 for small odd primes and the two-prime equation
//! 2^a6 p^b6 = 2^a5 p^b5 + 2^a2 p^b2.
//!
//! ```text
//! cargo run -p sdioph --example catalan_scan -- 50 40
//! ```

use std::collections::BTreeSet;

use sdioph::smooth::is_prime_u64;
use sdioph::sunit_system::{catalan_scan, equation4_scan_partitioned};

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).map(|s| s.parse().expect("integer")).collect();
    let p_max = args.first().copied().unwrap_or(50) as u64;
    let max_exp = args.get(1).copied().unwrap_or(40);

    for p in (3..=p_max).filter(|&p| is_prime_u64(p)) {
        for s in catalan_scan(p, max_exp).expect("odd prime") {
            let sign = if s.sign > 0 { '+' } else { '-' };
            println!("2^{} - {p}^{} = {sign}1", s.x, s.y);
        }
    }

    let sols = equation4_scan_partitioned(3, 12, 4).expect("odd prime");
    println!("p = 3, exponents <= 12: {} solutions of the two-prime equation", sols.len());
    let reduced: BTreeSet<_> = sols.iter().filter_map(|s| s.as_catalan(3)).collect();
    for s in reduced {
        println!("  reduces to 2^{} - 3^{} = {}", s.x, s.y, s.sign);
    }
}
