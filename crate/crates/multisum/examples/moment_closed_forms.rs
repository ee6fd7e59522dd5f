//! The twelve moment closed forms against their brute-force sums: the
//! index-monomial moments are the building blocks every identity right
//! side decomposes into.
//!
//!     cargo run --release --example moment_closed_forms

use multisum::closed_form::{moment_restricted, moment_unrestricted};
use multisum::exact::{rational_to_string, GaussianRational};
use multisum::instance::{Domain, MomentLabel, ProblemInstance};
use multisum::oracle::brute_force_moment;

fn main() {
    let ones = vec![GaussianRational::one(); 3];
    let box_inst = ProblemInstance::new(vec![4, 3, 2], vec![1, 0, 2], ones);
    let restricted = box_inst.clone().with_n(5);

    let labels = [
        MomentLabel::Single { p: 0, power: 1 },
        MomentLabel::Single { p: 0, power: 2 },
        MomentLabel::Single { p: 0, power: 3 },
        MomentLabel::Pair { p: 0, q: 1 },
        MomentLabel::PairSquared { p: 0, q: 1 },
        MomentLabel::Triple { p: 0, q: 1, r: 2 },
    ];

    println!("a = {:?}, c = {:?}, n = 5", box_inst.a, box_inst.c);
    println!("{:<14} {:>14} {:>14}", "moment", "restricted", "box");
    for label in labels {
        let r_closed = moment_restricted(&label, &restricted).unwrap().value;
        let r_brute = brute_force_moment(&label, &restricted, Domain::Restricted).unwrap();
        assert_eq!(r_closed, r_brute);

        let u_closed = moment_unrestricted(&label, &box_inst).unwrap().value;
        let u_brute = brute_force_moment(&label, &box_inst, Domain::Unrestricted).unwrap();
        assert_eq!(u_closed, u_brute);

        println!(
            "{:<14} {:>14} {:>14}",
            label.to_string(),
            rational_to_string(&r_closed),
            rational_to_string(&u_closed)
        );
    }

    // The mixed moments are symmetric in their indices.
    let pq = moment_restricted(&MomentLabel::Pair { p: 0, q: 2 }, &restricted).unwrap();
    let qp = moment_restricted(&MomentLabel::Pair { p: 2, q: 0 }, &restricted).unwrap();
    assert_eq!(pq.value, qp.value);
    println!("k[0]k[2] = k[2]k[0] = {}", rational_to_string(&pq.value));
}
