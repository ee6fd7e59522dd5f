//! Tour of the residue kernel: binomial coefficients as residues, the
//! truncated geometric-series family, derivative residues at movable
//! poles, and the inner sums evaluated at the pole w = 1.
//!
//!     cargo run --release --example residue_toolkit

use multisum::exact::{rational_from_str, rational_to_string};
use multisum::residue::{
    binomial_via_residue, derivative_residue, direct_power_series, geometric_family,
    inner_sum_closed_form, inner_sum_direct, inner_sum_via_residue, resquad_family_check,
    RationalPolynomial,
};

fn main() {
    // C(n, k) is the coefficient of w^{-1} in (1 + w)^n / w^{k+1}.
    println!("binomials as residues:");
    for (n, k) in [(4u64, 2i64), (6, 0), (5, 7), (3, -1)] {
        println!("  C({n},{k}) = {}", binomial_via_residue(n, k));
    }

    // The closed forms of sum k^s w^k, expanded by series inversion,
    // reproduce the naive power series coefficient by coefficient.
    println!("geometric family at order 8:");
    for s in 0..=3u8 {
        let closed = geometric_family(s, 8);
        assert_eq!(closed, direct_power_series(s, 8));
        let coeffs: Vec<String> = closed.coeffs().iter().map(rational_to_string).collect();
        println!("  k^{s}: {}", coeffs.join(", "));
    }

    // The residue of f(w)/(w - p)^k is the (k-1)-th derivative of f at p
    // over (k-1)!.
    let f = RationalPolynomial::one_plus_w_pow(2).shift_up(1); // (1+w)^2 w
    let pole = rational_from_str("1").unwrap();
    println!(
        "residue of (1+w)^2 w/(w-1)^2 = {}",
        rational_to_string(&derivative_residue(&f, &pole, 2))
    );

    // The product-rule expansions of the residue factors agree with the
    // derivative route at every pole and order.
    let pole = rational_from_str("-1/2").unwrap();
    for order in 2..=4u32 {
        let (derivative_route, expansion) = resquad_family_check(5, 2, &pole, order);
        assert_eq!(derivative_route, expansion);
        println!(
            "  residue factor a=5 c=2 order {order} at -1/2: {}",
            rational_to_string(&expansion)
        );
    }

    // Each per-coordinate inner sum of the box identities is a residue at
    // w = 1, and matches both direct summation and its closed form.
    println!("inner sums for a = 4, c = 1:");
    for s in 0..=3u8 {
        let via = inner_sum_via_residue(4, 1, s);
        assert_eq!(via, inner_sum_direct(4, 1, s));
        assert_eq!(via, inner_sum_closed_form(4, 1, s));
        println!("  sum C(3, k-1) k^{s} = {}", rational_to_string(&via));
    }
}
