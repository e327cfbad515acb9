//! Finds every S-Diophantine m-tuple up to N and checks it against the brute-force oracle.
//!
//! ```text
//! cargo run -p sdioph --example tuple_search -- 2,3,5,7,13 20 4
//! ```

use sdioph::tuple_search::{brute_force_tuples, build_edges, find_tuples, SearchConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let set = args.first().map_or("2,3", String::as_str).parse().expect("prime list");
    let n: u64 = args.get(1).map_or(Ok(100), |s| s.parse()).expect("N");
    let m: usize = args.get(2).map_or(Ok(3), |s| s.parse()).expect("m");

    let cfg = SearchConfig::new(set, n, m).expect("config").with_partitions(4).expect("partitions");
    let graph = build_edges(&cfg.prime_set, n);
    println!("S = {}, N = {n}: {} compatible pairs", cfg.prime_set, graph.edges().len());

    let tuples = find_tuples(&cfg).expect("search");
    for t in &tuples {
        println!("{t}");
    }
    let oracle = brute_force_tuples(&cfg).expect("oracle");
    println!("{} tuples of size {m}; oracle agrees: {}", tuples.len(), oracle == tuples);
}
