//! Prints the solution-count bounds for ranks 1..=R and the fitted exponent pair.
//!
//! ```text
//! cargo run -p sdioph --example bounds_report -- 5
//! ```

use sdioph::bounds::BoundCalculator;

fn main() {
    let r_max: u32 = std::env::args().nth(1).map_or(Ok(5), |s| s.parse()).expect("rank");
    let calc = BoundCalculator::with_digit_budget(200);

    println!("{:>3} {:>12} {:>12} {:>12} {:>12} {:>12}", "r", "ln A2", "ln A3", "ln A5", "ln T", "ln T'");
    for r in 1..=r_max {
        let rep = calc.report(r).expect("bounds");
        println!(
            "{r:>3} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            rep.a2.log_e,
            rep.a3_recursive.log_e,
            rep.a5_recursive.log_e,
            rep.theorem_general.log_e,
            rep.theorem_special.log_e
        );
    }
    println!("A2(1) = {}", calc.a2(1).unwrap().exact.unwrap());

    let fit = calc.fitted_corollary_constants(r_max.max(2)).expect("fit");
    println!(
        "fitted exp({} + {} r), printed exp({} + {} r), slope gap {:.1}",
        fit.c0, fit.c1, fit.printed.0, fit.printed.1, fit.slope_gap
    );
    let remark = calc.remark_direct_bound(1).expect("remark");
    println!("direct bound at r=1: ln {:.4} vs printed {}", remark.value.log_e, remark.printed_exponent);
}
