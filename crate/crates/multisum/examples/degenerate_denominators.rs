//! What happens when the printed closed forms divide by zero: the
//! falling-factorial denominators vanish whenever A0 - C0 is smaller than
//! the weight degree, yet both identity sides stay finite. The literal
//! strategy reports the degeneracy; the total strategies keep working.
//!
//!     cargo run --release --example degenerate_denominators

use multisum::closed_form::{rhs_by_moments, rhs_literal};
use multisum::exact::GaussianRational;
use multisum::instance::{IdentityLabel, ProblemInstance};
use multisum::oracle::brute_force_lhs;
use multisum::EvalError;

fn main() {
    // a = (3), c = (2) gives A0 - C0 = 1: fine for the linear identity,
    // degenerate for everything quadratic and cubic.
    let inst = ProblemInstance::new(vec![3], vec![2], vec![GaussianRational::from_int(1)])
        .with_y(vec![GaussianRational::from_int(2)])
        .with_n(2);

    for label in IdentityLabel::RESTRICTED {
        let oracle = brute_force_lhs(label, &inst).unwrap();
        let total = rhs_by_moments(label, &inst).unwrap();
        assert_eq!(total, oracle);
        match rhs_literal(label, &inst) {
            Ok(value) => {
                assert_eq!(value, oracle);
                println!("{label}: literal = total = {value}");
            }
            Err(EvalError::DegenerateDenominator { difference, degree }) => {
                println!(
                    "{label}: literal undefined (falling factorial of {difference} with \
                     {degree} factors is zero); total strategy still gives {total}"
                );
            }
            Err(other) => panic!("unexpected error: {other}"),
        }
    }

    // A zero-instance (some c_i > a_i) is different: every strategy
    // returns 0 outright, no error.
    let zero =
        ProblemInstance::new(vec![2], vec![3], vec![GaussianRational::from_int(1)]).with_n(1);
    assert!(rhs_literal(IdentityLabel::R7, &zero).unwrap().is_zero());
    println!("zero-instance: every side is 0, no denominator is ever touched");
}
