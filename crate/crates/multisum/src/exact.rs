//! Exact scalar arithmetic: arbitrary-precision integers, rationals and
//! Gaussian rationals, plus the binomial-coefficient conventions every
//! other module relies on.
//!
//! All values are immutable and all operations are pure, so they can be
//! shared freely across worker threads.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator, so equality is structural.
pub type Rational = BigRational;

/// Binomial coefficient C(t, k) for a nonnegative upper argument.
///
/// Returns 0 when `k < 0` or `k > t`. The upper argument must be
/// nonnegative; callers are expected to short-circuit zero-coefficient
/// terms before asking for a binomial, so a negative `t` here is a bug.
///
/// # Panics
/// Panics when `t < 0`.
pub fn binomial(t: &BigInt, k: &BigInt) -> BigInt {
    assert!(
        !t.is_negative(),
        "binomial: negative upper argument {t} (callers must short-circuit zero terms)"
    );
    if k.is_negative() || k > t {
        return BigInt::zero();
    }
    let complement = t - k;
    let reps = k
        .min(&complement)
        .to_u64()
        .expect("binomial: argument out of practical range");
    let mut acc = BigInt::one();
    // res * (t - i) is divisible by (i + 1) at every step, so this stays exact.
    for i in 0..reps {
        acc = acc * (t - i) / (i + 1);
    }
    acc
}

/// Convenience form of [`binomial`] for machine-sized arguments.
pub fn binomial_int(t: u64, k: i64) -> BigInt {
    binomial(&BigInt::from(t), &BigInt::from(k))
}

/// Falling factorial t(t-1)...(t-s+1); the empty product for `s = 0`.
pub fn falling_factorial(t: &BigInt, s: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..s {
        acc *= t - j;
    }
    acc
}

/// 2^e as an exact rational, for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Render a rational as `p/q`, or just `p` when the denominator is 1.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p/q` (or a bare integer `p`) into a reduced rational.
pub fn rational_from_str(s: &str) -> Result<Rational, String> {
    Rational::from_str(s.trim()).map_err(|e| format!("invalid rational {s:?}: {e}"))
}

/// A complex number with rational real and imaginary parts.
///
/// This is the universal value type for weights and identity sides: it is
/// closed under field operations and conjugation, and equality is exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n.clone()))
    }

    pub fn from_rational(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate: the real part is preserved, the imaginary part negated.
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = re^2 + im^2, a nonnegative rational.
    pub fn abs_squared(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Real part of z * w, computed without the imaginary half.
    pub fn mul_re(&self, other: &Self) -> Rational {
        &self.re * &other.re - &self.im * &other.im
    }

    /// z^e for small nonnegative exponents.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics when `self` is zero.
    pub fn inverse(&self) -> Self {
        let norm = self.abs_squared();
        assert!(!norm.is_zero(), "GaussianRational: inverse of zero");
        Self::new(&self.re / &norm, -&self.im / &norm)
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    /// Multiply by an integer scalar.
    pub fn scale_int(&self, n: &BigInt) -> Self {
        Self::new(&self.re * n, &self.im * n)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, other: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &other.re, &self.im + &other.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, other: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &other.re, &self.im - &other.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, other: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, other: Self) -> GaussianRational {
        &self + &other
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, other: Self) -> GaussianRational {
        &self - &other
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, other: Self) -> GaussianRational {
        &self * &other
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, other: &GaussianRational) {
        self.re += &other.re;
        self.im += &other.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, other: &GaussianRational) {
        self.re -= &other.re;
        self.im -= &other.im;
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rational_to_string(&self.re))
        } else if self.im.is_negative() {
            write!(
                f,
                "{} - {}i",
                rational_to_string(&self.re),
                rational_to_string(&-self.im.clone())
            )
        } else {
            write!(
                f,
                "{} + {}i",
                rational_to_string(&self.re),
                rational_to_string(&self.im)
            )
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    re: String,
    im: String,
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GaussianRepr {
            re: rational_to_string(&self.re),
            im: rational_to_string(&self.im),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GaussianRepr::deserialize(deserializer)?;
        let re = rational_from_str(&repr.re).map_err(serde::de::Error::custom)?;
        let im = rational_from_str(&repr.im).map_err(serde::de::Error::custom)?;
        Ok(GaussianRational::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(big(n), big(d))
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(&big(5), &big(2)), big(10));
        assert_eq!(binomial(&big(3), &big(-1)), big(0));
        assert_eq!(binomial(&big(0), &big(0)), big(1));
        assert_eq!(binomial(&big(4), &big(5)), big(0));
        assert_eq!(binomial(&big(20), &big(10)), big(184_756));
    }

    #[test]
    #[should_panic(expected = "negative upper argument")]
    fn binomial_rejects_negative_top() {
        binomial(&big(-1), &big(0));
    }

    #[test]
    fn pascal_and_trinomial_revision() {
        for t in 0i64..=30 {
            for k in 0..=t {
                if t > 0 {
                    let lhs = binomial(&big(t), &big(k));
                    let rhs = binomial(&big(t - 1), &big(k - 1)) + binomial(&big(t - 1), &big(k));
                    assert_eq!(lhs, rhs, "Pascal failed at ({t},{k})");
                }
                for c in 0..=k {
                    let lhs = binomial(&big(t), &big(k)) * binomial(&big(k), &big(c));
                    let rhs = binomial(&big(t - c), &big(k - c)) * binomial(&big(t), &big(c));
                    assert_eq!(lhs, rhs, "trinomial revision failed at ({t},{k},{c})");
                }
            }
        }
    }

    #[test]
    fn absorption_identity() {
        for t in 1i64..=30 {
            for k in 1..=t {
                let lhs = big(k) * binomial(&big(t), &big(k));
                let rhs = big(t) * binomial(&big(t - 1), &big(k - 1));
                assert_eq!(lhs, rhs, "absorption failed at ({t},{k})");
            }
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(&big(5), 2), big(20));
        assert_eq!(falling_factorial(&big(1), 3), big(0));
        assert_eq!(falling_factorial(&big(0), 0), big(1));
        assert_eq!(falling_factorial(&big(-2), 2), big(6));
    }

    #[test]
    fn pow2_negative_exponents() {
        assert_eq!(pow2(3), rat(8, 1));
        assert_eq!(pow2(0), rat(1, 1));
        assert_eq!(pow2(-2), rat(1, 4));
    }

    #[test]
    fn conj_examples() {
        let z = GaussianRational::new(rat(3, 2), rat(1, 3));
        assert_eq!(z.conj(), GaussianRational::new(rat(3, 2), rat(-1, 3)));
        let real = GaussianRational::from_int(5);
        assert_eq!(real.conj(), real);
        let z = GaussianRational::new(rat(0, 1), rat(2, 1));
        assert_eq!(z.conj(), GaussianRational::new(rat(0, 1), rat(-2, 1)));
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn abs_squared_examples() {
        let z = GaussianRational::new(rat(1, 1), rat(1, 1));
        assert_eq!(z.abs_squared(), rat(2, 1));
        let z = GaussianRational::from_rational(rat(3, 2));
        assert_eq!(z.abs_squared(), rat(9, 4));
        assert_eq!(GaussianRational::zero().abs_squared(), rat(0, 1));
    }

    #[test]
    fn abs_squared_matches_conjugate_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let z = GaussianRational::new(
                rat(rng.gen_range(-20..=20), rng.gen_range(1..=9)),
                rat(rng.gen_range(-20..=20), rng.gen_range(1..=9)),
            );
            let prod = &z * &z.conj();
            assert!(prod.im.is_zero());
            assert!(!prod.re.is_negative());
            assert_eq!(prod.re, z.abs_squared());
        }
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_to_string(&rat(3, 2)), "3/2");
        assert_eq!(rational_to_string(&rat(5, 1)), "5");
        assert_eq!(rational_to_string(&rat(-4, 6)), "-2/3");
        assert_eq!(rational_from_str("3/2").unwrap(), rat(3, 2));
        assert_eq!(rational_from_str("-7").unwrap(), rat(-7, 1));
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }

    #[test]
    fn gaussian_serde_round_trip() {
        let z = GaussianRational::new(rat(-1, 2), rat(2, 3));
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(json, r#"{"re":"-1/2","im":"2/3"}"#);
        let back: GaussianRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_gaussian() -> impl Strategy<Value = GaussianRational> {
        (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_gaussian(), b in arb_gaussian(), c in arb_gaussian()) {
            let assoc_l = &(&a * &b) * &c;
            let assoc_r = &a * &(&b * &c);
            prop_assert_eq!(assoc_l, assoc_r);

            let distr_l = &a * &(&b + &c);
            let distr_r = &(&a * &b) + &(&a * &c);
            prop_assert_eq!(distr_l, distr_r);

            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse(), GaussianRational::one());
            }
        }

        #[test]
        fn pow_matches_repeated_product(z in arb_gaussian()) {
            prop_assert_eq!(z.pow(0), GaussianRational::one());
            prop_assert_eq!(z.pow(2), &z * &z);
            prop_assert_eq!(z.pow(3), &(&z * &z) * &z);
        }
    }
}
