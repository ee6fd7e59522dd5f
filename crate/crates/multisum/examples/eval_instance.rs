//! Evaluate one instance under a few identities, printing the brute-force
//! left side, every right-side strategy, and the aggregate statistics.
//!
//!     cargo run --release --example eval_instance

use multisum::campaign::eval_single;
use multisum::exact::{rational_from_str, GaussianRational};
use multisum::instance::{IdentityLabel, ProblemInstance};

fn gr(re: &str, im: &str) -> GaussianRational {
    GaussianRational::new(
        rational_from_str(re).unwrap(),
        rational_from_str(im).unwrap(),
    )
}

fn main() {
    // Two coordinates with caps (3, 2), inner arguments (1, 0), complex
    // weights, a secondary weight vector for the bilinear identities, and
    // a restricted-sum target of 3.
    let inst = ProblemInstance::new(
        vec![3, 2],
        vec![1, 0],
        vec![gr("1/2", "1"), gr("-2", "1/3")],
    )
    .with_y(vec![gr("1", "-1"), gr("3/4", "0")])
    .with_n(3);

    for label in [
        IdentityLabel::R1,
        IdentityLabel::R4,
        IdentityLabel::R5,
        IdentityLabel::R7,
    ] {
        let eval = eval_single(&inst, label).expect("instance is structurally valid");
        println!("== {label} ==");
        println!("  lhs (oracle) = {}", eval.lhs);
        for outcome in &eval.outcomes {
            match (&outcome.value, outcome.degenerate) {
                (Some(v), _) => println!(
                    "  {:<12} = {v}   {}",
                    outcome.strategy.to_string(),
                    if outcome.matched == Some(true) {
                        "match"
                    } else {
                        "MISMATCH"
                    }
                ),
                (None, true) => println!(
                    "  {:<12} = (degenerate denominator)",
                    outcome.strategy.to_string()
                ),
                (None, false) => println!("  {:<12} = error", outcome.strategy.to_string()),
            }
        }
    }

    let eval = eval_single(&inst, IdentityLabel::R1).unwrap();
    println!("== aggregates ==");
    for (name, value) in &eval.aggregates {
        println!("  {name:<9} = {value}");
    }
}
