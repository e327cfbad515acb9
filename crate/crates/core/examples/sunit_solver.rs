//! Solves a1 x1 + ... + an xn = 1 over the S-units of bounded height, then a
//! homogeneous equation up to scaling.
//!
//! ```text
//! cargo run -p sdioph --example sunit_solver -- 2,3 1 1,1
//! ```

use sdioph::smooth::PrimeSet;
use sdioph::sunit_solver::{
    parse_coefficient, solution_counts, solve_affine, solve_homogeneous_projective, HeightBound, SolveOptions,
    UnitEquation,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let set: PrimeSet = args.first().map_or("2,3", String::as_str).parse().expect("prime list");
    let h = HeightBound(args.get(1).map_or(Ok(1), |s| s.parse()).expect("height"));
    let coeffs = args
        .get(2)
        .map_or("1,1", String::as_str)
        .split(',')
        .map(|c| parse_coefficient(c).expect("nonzero rational"))
        .collect();

    let eq = UnitEquation::new(coeffs, set.clone()).expect("equation");
    let sols = solve_affine(&eq, h).expect("within budget");
    for s in &sols {
        let terms: Vec<String> = s.x.iter().map(|u| u.to_rational(&set).to_string()).collect();
        println!("x = ({}){}", terms.join(", "), if s.degenerate { "  degenerate" } else { "" });
    }
    let c = solution_counts(&sols);
    println!("total {}, nondegenerate {}, up to sign {}", c.total, c.nondegenerate, c.nondegenerate_unsigned);

    let classes = solve_homogeneous_projective(&[1, -1, -1], &set, h, SolveOptions::default()).expect("within budget");
    println!("y1 - y2 - y3 = 0: {} classes", classes.len());
    for c in classes.iter().filter(|c| !c.degenerate).take(10) {
        let rep: Vec<String> = c.representative.iter().map(|v| v.to_string()).collect();
        println!("  ({})", rep.join(", "));
    }
}
