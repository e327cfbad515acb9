//! Builds the sextuple of a quadruple, checks the S-unit system and classifies
//! the vanishing subsums of the six-term equation.
//!
//! ```text
//! cargo run -p sdioph --example sextuple_analysis -- 1,2,3,4 2,3,5,7,13
//! ```

use sdioph::smooth::PrimeSet;
use sdioph::sunit_system::{
    check_product_identities, check_system, find_vanishing_subsums, positivity_witness, recover_quadruple,
    sextuple_of, solution_vector,
};
use sdioph::tuple_search::Tuple;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let elements: Vec<u64> = args
        .first()
        .map_or("1,2,3,4", String::as_str)
        .split(',')
        .map(|x| x.parse().expect("integer"))
        .collect();
    let set: PrimeSet = args.get(1).map_or("2,3,5,7,13", String::as_str).parse().expect("prime list");

    let quad = Tuple::new(elements).expect("increasing quadruple");
    let sext = sextuple_of(&quad, &set).expect("quadruple");
    println!("quadruple {quad}, S = {set}");
    println!("sextuple  {:?}", sext.s);
    if let Some(certs) = &sext.certificates {
        let certs: Vec<_> = certs.iter().map(|c| c.as_slice().to_vec()).collect();
        println!("exponents {certs:?}");
    } else {
        println!("not every entry is S-smooth");
    }
    println!("system holds: {}", check_system(&sext));
    println!("abcd from the sextuple: {:?}", check_product_identities(&sext).map(|n| n.to_string()));

    let v = solution_vector(&sext).expect("first equation");
    let terms: Vec<String> = v.signed_terms().iter().map(|t| t.to_string()).collect();
    println!("signed terms {terms:?}");
    let report = find_vanishing_subsums(&v);
    println!("vanishing subsets {:?} -> {}", report.vanishing_subsets, report.classification.as_str());

    println!("recovered: {:?}", recover_quadruple(&sext).map(|t| t.to_string()));
    match positivity_witness(&sext) {
        Ok(w) => println!("positivity witness {w}"),
        Err(e) => println!("no positivity witness: {e}"),
    }
}
