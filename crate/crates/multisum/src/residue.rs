//! The proof toolkit as an independently testable computer-algebra kernel:
//! binomial coefficients as residues, truncated formal-series identities
//! for `sum k^s w^k`, derivative-based residues at movable poles, and the
//! quadratic/cubic residue factor formulas.
//!
//! Everything here is univariate and exact. Series arithmetic errors out
//! rather than silently truncating principal parts.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::closed_form::Mutation;
use crate::exact::{binomial_int, pow2, Rational};

/// Dense univariate polynomial over the rationals, canonical form with no
/// trailing zero coefficients. The zero polynomial has an empty
/// coefficient list and no degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_coeffs(vec![Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn monomial(coeff: Rational, power: usize) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = coeff;
        Self { coeffs }
    }

    /// `(1 + w)^n`.
    pub fn one_plus_w_pow(n: u64) -> Self {
        let coeffs = (0..=n)
            .map(|i| Rational::from_integer(binomial_int(n, i as i64)))
            .collect();
        Self { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiply by `w^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Formal derivative by the power rule on exact coefficients.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }
}

/// Formal power series truncated at order `T`: coefficients of
/// `w^0 .. w^T`, with everything beyond treated as `O(w^{T+1})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn from_polynomial(poly: &RationalPolynomial, order: usize) -> Self {
        let mut s = Self::zero(order);
        for (i, c) in poly.coeffs().iter().enumerate().take(order + 1) {
            s.coeffs[i] = c.clone();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs order >= 0");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] + &other.coeffs[i])
            .collect();
        Self { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiply by `w^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); self.coeffs.len()];
        let kept = self.coeffs.len() - k.min(self.coeffs.len());
        coeffs[k.min(self.coeffs.len())..].clone_from_slice(&self.coeffs[..kept]);
        Self { coeffs }
    }

    /// Multiplicative inverse, which exists iff the constant term is
    /// nonzero.
    ///
    /// # Panics
    /// Panics on a zero constant term: the inverse would have a principal
    /// part, which this type cannot represent.
    pub fn inverse(&self) -> Self {
        let c0 = &self.coeffs[0];
        assert!(
            !c0.is_zero(),
            "TruncatedSeries: cannot invert a series with zero constant term"
        );
        let inv_c0 = Rational::one() / c0;
        let mut coeffs = vec![Rational::zero(); self.coeffs.len()];
        coeffs[0] = inv_c0.clone();
        for i in 1..self.coeffs.len() {
            let mut acc = Rational::zero();
            for j in 1..=i {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += &self.coeffs[j] * &coeffs[i - j];
            }
            coeffs[i] = -(acc * &inv_c0);
        }
        Self { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// A Laurent expansion around zero with an explicitly represented finite
/// principal part: coefficients of `w^min_exp ..`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    min_exp: i64,
    coeffs: Vec<Rational>,
}

impl LaurentSeries {
    pub fn new(min_exp: i64, coeffs: Vec<Rational>) -> Self {
        Self { min_exp, coeffs }
    }

    /// `poly / w^power` (a polynomial for `power <= 0`).
    pub fn polynomial_over_w_power(poly: &RationalPolynomial, power: i64) -> Self {
        Self::new(-power, poly.coeffs().to_vec())
    }

    pub fn coeff(&self, exponent: i64) -> Rational {
        let idx = exponent - self.min_exp;
        if idx < 0 {
            return Rational::zero();
        }
        self.coeffs
            .get(idx as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// The coefficient of `w^{-1}`.
pub fn residue_at_zero(series: &LaurentSeries) -> Rational {
    series.coeff(-1)
}

/// C(n, k) extracted as the residue of `(1 + w)^n / w^{k+1}`.
///
/// Agrees with the direct multiplicative binomial for every integer `k`,
/// including out-of-range ones.
pub fn binomial_via_residue(n: u64, k: i64) -> BigInt {
    let poly = RationalPolynomial::one_plus_w_pow(n);
    let laurent = LaurentSeries::polynomial_over_w_power(&poly, k + 1);
    let r = residue_at_zero(&laurent);
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// Numerator coefficients of the `sum k^s w^k` closed forms: the member
/// for `k^s` is `sum_j coeff_j * w^j / (1-w)^{j+1}` over these lists
/// (index 0 is the constant-series term).
fn geometric_numerators(s: u8) -> Vec<i64> {
    match s {
        0 => vec![1],
        1 => vec![0, 1],
        2 => vec![0, 1, 2],
        3 => vec![0, 1, 6, 6],
        _ => panic!("geometric_family supports s in 0..=3, got {s}"),
    }
}

/// The closed form of `sum_k k^s w^k` expanded to order `T` by series
/// inversion of the `(1-w)^j` denominators. Must match the direct series
/// coefficientwise.
pub fn geometric_family(s: u8, order: usize) -> TruncatedSeries {
    geometric_family_with(s, order, None)
}

pub fn geometric_family_with(s: u8, order: usize, mutation: Option<&Mutation>) -> TruncatedSeries {
    assert!(order >= 1, "geometric_family needs order >= 1");
    let mut numerators = geometric_numerators(s);
    if let Some(Mutation::GeometricCoefficient { s: target }) = mutation {
        if *target == s {
            *numerators.last_mut().expect("numerator list is nonempty") += 1;
        }
    }
    let one_minus_w = RationalPolynomial::from_coeffs(vec![Rational::one(), -Rational::one()]);
    let inv = TruncatedSeries::from_polynomial(&one_minus_w, order).inverse();
    let mut acc = TruncatedSeries::zero(order);
    for (j, &num) in numerators.iter().enumerate() {
        if num == 0 {
            continue;
        }
        let term = inv
            .pow(j as u32 + 1)
            .shift_up(j)
            .scale(&Rational::from_integer(BigInt::from(num)));
        acc = acc.add(&term);
    }
    acc
}

/// The direct series `sum_{k<=T} k^s w^k`, used as the comparison target.
pub fn direct_power_series(s: u8, order: usize) -> TruncatedSeries {
    let coeffs = (0..=order as u64)
        .map(|k| Rational::from_integer(BigInt::from(k).pow(s as u32)))
        .collect();
    TruncatedSeries::from_coeffs(coeffs)
}

fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k as u64 {
        acc *= i;
    }
    acc
}

/// The residue of `f(w) / (w - pole)^order` for a polynomial `f`:
/// the (order-1)-th derivative of `f` at the pole over (order-1)!.
pub fn derivative_residue(f: &RationalPolynomial, pole: &Rational, order: u32) -> Rational {
    assert!(order >= 1, "pole order must be at least 1");
    let mut d = f.clone();
    for _ in 1..order {
        d = d.derivative();
    }
    d.eval(pole) / Rational::from_integer(factorial(order - 1))
}

/// Exact integer power of a rational with a possibly negative exponent.
fn rational_pow(base: &Rational, exp: i64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        assert!(!acc.is_zero(), "negative power of zero");
        Rational::one() / acc
    } else {
        acc
    }
}

/// Residue factors of `(1 + w)^{a-c} w^c` at a movable pole: evaluates
/// both the derivative route and the printed product-rule expansion and
/// returns the pair, which must be equal.
///
/// `order` selects the pole order: 2 (first derivative), 3 (second, with
/// the series numerator 2), or 4 (third, numerator 6). Zero-coefficient
/// terms of the expansion are skipped before any power is formed, which is
/// also what keeps negative exponents out of range.
pub fn resquad_family_check(a: u64, c: u64, pole: &Rational, order: u32) -> (Rational, Rational) {
    assert!(c <= a, "resquad factors need c <= a");
    assert!(!pole.is_zero(), "resquad factors need a nonzero pole");
    let alpha = a - c;
    let f = RationalPolynomial::one_plus_w_pow(alpha).shift_up(c as usize);

    let multiplier = match order {
        2 => 1i64,
        3 => 2,
        4 => 6,
        _ => panic!("resquad_family_check supports orders 2..=4, got {order}"),
    };
    let lhs =
        derivative_residue(&f, pole, order) * Rational::from_integer(BigInt::from(multiplier));

    let ai = BigInt::from(alpha);
    let gi = BigInt::from(c);
    // (coefficient, exponent of 1+w relative to alpha, exponent of w relative to c)
    let terms: Vec<(BigInt, i64, i64)> = match order {
        2 => vec![(ai.clone(), -1, 0), (gi.clone(), 0, -1)],
        3 => vec![
            (&ai * (&ai - 1), -2, 0),
            (2 * &ai * &gi, -1, -1),
            (&gi * (&gi - 1), 0, -2),
        ],
        4 => vec![
            (&ai * (&ai - 1) * (&ai - 2), -3, 0),
            (3 * &ai * (&ai - 1) * &gi, -2, -1),
            (3 * &ai * &gi * (&gi - 1), -1, -2),
            (&gi * (&gi - 1) * (&gi - 2), 0, -3),
        ],
        _ => unreachable!(),
    };
    let one_plus = Rational::one() + pole;
    let mut rhs = Rational::zero();
    for (coeff, d_alpha, d_gamma) in terms {
        if coeff.is_zero() {
            continue;
        }
        let e1 = alpha as i64 + d_alpha;
        let e2 = c as i64 + d_gamma;
        rhs += Rational::from_integer(coeff) * rational_pow(&one_plus, e1) * rational_pow(pole, e2);
    }
    (lhs, rhs)
}

/// `sum_k C(a-c, k-c) k^s` by the residue-at-one route: the pole pieces of
/// the `k^s` series applied to `(1 + w)^{a-c} w^c`. Returns 0 when
/// `c > a`.
pub fn inner_sum_via_residue(a: u64, c: u64, s: u8) -> Rational {
    if c > a {
        return Rational::zero();
    }
    let f = RationalPolynomial::one_plus_w_pow(a - c).shift_up(c as usize);
    let one = Rational::one();
    let pieces: &[(i64, u32)] = match s {
        0 => &[(1, 1)],
        1 => &[(1, 2)],
        2 => &[(1, 2), (2, 3)],
        3 => &[(1, 2), (6, 3), (6, 4)],
        _ => panic!("inner_sum_via_residue supports s in 0..=3, got {s}"),
    };
    let mut acc = Rational::zero();
    for &(mult, order) in pieces {
        acc += derivative_residue(&f, &one, order) * Rational::from_integer(BigInt::from(mult));
    }
    acc
}

/// The same inner sum by direct summation.
pub fn inner_sum_direct(a: u64, c: u64, s: u8) -> Rational {
    if c > a {
        return Rational::zero();
    }
    let mut acc = BigInt::zero();
    for k in 0..=a {
        let b = binomial_int(a - c, k as i64 - c as i64);
        acc += b * BigInt::from(k).pow(s as u32);
    }
    Rational::from_integer(acc)
}

/// The per-coordinate closed forms: `2^{a-c}`, `2^{a-c-1}(a+c)`,
/// `2^{a-c-2}[(a+c)^2 + a-c]`, `2^{a-c-3}(a+c)[(a+c)^2 + 3(a-c)]`.
pub fn inner_sum_closed_form(a: u64, c: u64, s: u8) -> Rational {
    if c > a {
        return Rational::zero();
    }
    let sum = BigInt::from(a) + BigInt::from(c);
    let diff = BigInt::from(a) - BigInt::from(c);
    let bracket = match s {
        0 => BigInt::one(),
        1 => sum,
        2 => &sum * &sum + &diff,
        3 => &sum * (&sum * &sum + 3 * &diff),
        _ => panic!("inner_sum_closed_form supports s in 0..=3, got {s}"),
    };
    pow2(a as i64 - c as i64 - s as i64) * bracket
}

/// One suite of the residue self-test.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`selftest`]: one result per property suite.
#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub order: usize,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

/// Run every residue-engine property suite at the given truncation order.
/// The optional mutation corrupts one geometric closed-form coefficient so
/// the harness can prove it is able to fail.
pub fn selftest(order: usize, mutation: Option<&Mutation>) -> SelftestReport {
    assert!(order >= 8, "selftest needs order >= 8");
    let mut suites = Vec::new();

    let mut binom_failures = 0u32;
    for n in 0..=20u64 {
        for k in -2..=(n as i64 + 2) {
            if binomial_via_residue(n, k) != binomial_int(n, k) {
                binom_failures += 1;
            }
        }
    }
    suites.push(SuiteResult {
        name: "binomial-as-residue",
        passed: binom_failures == 0,
        detail: format!("n <= 20, k in -2..=n+2, {binom_failures} mismatches"),
    });

    let mut geom_failures = 0u32;
    for s in 0..=3u8 {
        let closed = geometric_family_with(s, order, mutation);
        if closed != direct_power_series(s, order) {
            geom_failures += 1;
        }
    }
    suites.push(SuiteResult {
        name: "geometric-series-family",
        passed: geom_failures == 0,
        detail: format!("s in 0..=3 at T = {order}, {geom_failures} mismatching members"),
    });

    let poles = [
        Rational::from_integer(BigInt::one()),
        Rational::from_integer(BigInt::from(2)),
        Rational::new(BigInt::from(-1), BigInt::from(2)),
        Rational::new(BigInt::from(3), BigInt::from(5)),
    ];
    let mut resquad_failures = 0u32;
    let mut resquad_cases = 0u32;
    for a in 0..=8u64 {
        for c in 0..=a {
            for pole in &poles {
                for ord in 2..=4u32 {
                    resquad_cases += 1;
                    let (lhs, rhs) = resquad_family_check(a, c, pole, ord);
                    if lhs != rhs {
                        resquad_failures += 1;
                    }
                }
            }
        }
    }
    suites.push(SuiteResult {
        name: "residue-factor-expansions",
        passed: resquad_failures == 0,
        detail: format!("{resquad_cases} cases, {resquad_failures} unequal pairs"),
    });

    let mut inner_failures = 0u32;
    let mut inner_cases = 0u32;
    for a in 0..=10u64 {
        for c in 0..=a {
            for s in 0..=3u8 {
                inner_cases += 1;
                let via = inner_sum_via_residue(a, c, s);
                if via != inner_sum_direct(a, c, s) || via != inner_sum_closed_form(a, c, s) {
                    inner_failures += 1;
                }
            }
        }
    }
    suites.push(SuiteResult {
        name: "inner-sums-at-one",
        passed: inner_failures == 0,
        detail: format!("{inner_cases} cases, {inner_failures} mismatches"),
    });

    let mut inversion_failures = 0u32;
    for seed in 0..20u64 {
        let u = seeded_series(seed, order);
        let product = u.mul(&u.inverse());
        if product != TruncatedSeries::one(order) {
            inversion_failures += 1;
        }
    }
    suites.push(SuiteResult {
        name: "series-inversion",
        passed: inversion_failures == 0,
        detail: format!("20 seeded series at T = {order}, {inversion_failures} failures"),
    });

    SelftestReport { order, suites }
}

/// Deterministic series with a nonzero constant term, for the inversion
/// suite.
fn seeded_series(seed: u64, order: usize) -> TruncatedSeries {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<Rational> = (0..=order)
        .map(|_| {
            Rational::new(
                BigInt::from(rng.gen_range(-6i64..=6)),
                BigInt::from(rng.gen_range(1i64..=5)),
            )
        })
        .collect();
    if coeffs[0].is_zero() {
        coeffs[0] = Rational::one();
    }
    TruncatedSeries::from_coeffs(coeffs)
}
