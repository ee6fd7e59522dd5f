//! Problem instances, their aggregate statistics, the closed catalog of
//! identity and moment labels, and seeded random instance generation.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::exact::{GaussianRational, Rational};

/// One concrete instantiation of an identity: coordinate caps `a`, inner
/// binomial arguments `c`, weights `x` (and optionally `y`), plus the
/// restricted-sum target `n` when present.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    pub a: Vec<u64>,
    pub c: Vec<u64>,
    pub x: Vec<GaussianRational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<Vec<GaussianRational>>,
}

/// Structural problems that make an instance unusable.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("m must be at least 1")]
    EmptyInstance,
    #[error("field `{field}` has length {len}, expected m = {m}")]
    LengthMismatch {
        field: &'static str,
        len: usize,
        m: usize,
    },
}

/// Outcome of structural validation. A zero-instance (some `c_i > a_i`) is
/// flagged, not rejected: every summand vanishes, so both identity sides
/// are zero and the evaluators must agree on that.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub zero_instance: bool,
}

impl ProblemInstance {
    pub fn new(a: Vec<u64>, c: Vec<u64>, x: Vec<GaussianRational>) -> Self {
        Self {
            m: a.len(),
            n: None,
            a,
            c,
            x,
            y: None,
        }
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_y(mut self, y: Vec<GaussianRational>) -> Self {
        self.y = Some(y);
        self
    }

    pub fn without_n(mut self) -> Self {
        self.n = None;
        self
    }

    pub fn sum_a(&self) -> u64 {
        self.a.iter().sum()
    }

    pub fn sum_c(&self) -> u64 {
        self.c.iter().sum()
    }

    /// True when some `c_i > a_i`, which forces every summand to zero.
    pub fn is_zero_instance(&self) -> bool {
        self.a.iter().zip(&self.c).any(|(a, c)| c > a)
    }

    pub fn validate(&self) -> Result<ValidationReport, ValidationError> {
        if self.m == 0 {
            return Err(ValidationError::EmptyInstance);
        }
        for (field, len) in [
            ("a", self.a.len()),
            ("c", self.c.len()),
            ("x", self.x.len()),
        ] {
            if len != self.m {
                return Err(ValidationError::LengthMismatch {
                    field,
                    len,
                    m: self.m,
                });
            }
        }
        if let Some(y) = &self.y {
            if y.len() != self.m {
                return Err(ValidationError::LengthMismatch {
                    field: "y",
                    len: y.len(),
                    m: self.m,
                });
            }
        }
        Ok(ValidationReport {
            zero_instance: self.is_zero_instance(),
        })
    }

    pub fn aggregates(&self) -> Aggregates {
        Aggregates::compute(self)
    }
}

/// The derived sums over an instance: `A_{p,q} = sum x_i^p a_i^q`, the `C`
/// family with `c_i` in place of `a_i`, the starred (`y`-weighted) variants
/// `A*_{p,q} = sum x_i^p y_i^q a_i`, the absolute variants
/// `sum |x_i|^2 a_i`, and `S_{p,q} = sum x_i a_i^p c_i^q`.
///
/// Tables cover exponents 0..=3, which is everything the cubic identities
/// consume. `A_p` abbreviates `A_{p,1}` and `A*_p` abbreviates `A*_{0,p}`.
#[derive(Clone, Debug)]
pub struct Aggregates {
    a_pq: Vec<Vec<GaussianRational>>,
    c_pq: Vec<Vec<GaussianRational>>,
    a_star_pq: Option<Vec<Vec<GaussianRational>>>,
    c_star_pq: Option<Vec<Vec<GaussianRational>>>,
    a_abs: Rational,
    c_abs: Rational,
    s_pq: Vec<Vec<GaussianRational>>,
}

pub const AGGREGATE_MAX_EXPONENT: u32 = 3;

impl Aggregates {
    pub fn compute(inst: &ProblemInstance) -> Self {
        let top = AGGREGATE_MAX_EXPONENT as usize;
        let x_pows: Vec<Vec<GaussianRational>> = inst
            .x
            .iter()
            .map(|x| (0..=top as u32).map(|p| x.pow(p)).collect())
            .collect();
        let y_pows: Option<Vec<Vec<GaussianRational>>> = inst.y.as_ref().map(|ys| {
            ys.iter()
                .map(|y| (0..=top as u32).map(|p| y.pow(p)).collect())
                .collect()
        });
        let int_pows = |vals: &[u64]| -> Vec<Vec<BigInt>> {
            vals.iter()
                .map(|&v| (0..=top as u32).map(|q| BigInt::from(v).pow(q)).collect())
                .collect()
        };
        let a_pows = int_pows(&inst.a);
        let c_pows = int_pows(&inst.c);

        let table = |weight: &dyn Fn(usize, usize) -> GaussianRational,
                     data: &[Vec<BigInt>]|
         -> Vec<Vec<GaussianRational>> {
            (0..=top)
                .map(|p| {
                    (0..=top)
                        .map(|q| {
                            let mut acc = GaussianRational::zero();
                            for (i, row) in data.iter().enumerate() {
                                acc += &weight(i, p).scale_int(&row[q]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        };

        let x_weight = |i: usize, p: usize| x_pows[i][p].clone();
        let a_pq = table(&x_weight, &a_pows);
        let c_pq = table(&x_weight, &c_pows);

        let (a_star_pq, c_star_pq) = match &y_pows {
            Some(yp) => {
                let star = |data: &[Vec<BigInt>]| -> Vec<Vec<GaussianRational>> {
                    (0..=top)
                        .map(|p| {
                            (0..=top)
                                .map(|q| {
                                    let mut acc = GaussianRational::zero();
                                    for (i, row) in data.iter().enumerate() {
                                        let w = &x_pows[i][p] * &yp[i][q];
                                        acc += &w.scale_int(&row[1]);
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect()
                };
                (Some(star(&a_pows)), Some(star(&c_pows)))
            }
            None => (None, None),
        };

        let abs_sum = |data: &[Vec<BigInt>]| -> Rational {
            let mut acc = Rational::zero();
            for (x, row) in inst.x.iter().zip(data) {
                acc += x.abs_squared() * &row[1];
            }
            acc
        };
        let a_abs = abs_sum(&a_pows);
        let c_abs = abs_sum(&c_pows);

        let s_pq = (0..=top)
            .map(|p| {
                (0..=top)
                    .map(|q| {
                        let mut acc = GaussianRational::zero();
                        for i in 0..inst.m {
                            acc += &inst.x[i].scale_int(&(&a_pows[i][p] * &c_pows[i][q]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        Self {
            a_pq,
            c_pq,
            a_star_pq,
            c_star_pq,
            a_abs,
            c_abs,
            s_pq,
        }
    }

    /// `A_{p,q} = sum x_i^p a_i^q`.
    pub fn a_pq(&self, p: u32, q: u32) -> &GaussianRational {
        &self.a_pq[p as usize][q as usize]
    }

    /// `A_p = A_{p,1}`.
    pub fn a_p(&self, p: u32) -> &GaussianRational {
        self.a_pq(p, 1)
    }

    /// `C_{p,q} = sum x_i^p c_i^q`.
    pub fn c_pq(&self, p: u32, q: u32) -> &GaussianRational {
        &self.c_pq[p as usize][q as usize]
    }

    /// `C_p = C_{p,1}`.
    pub fn c_p(&self, p: u32) -> &GaussianRational {
        self.c_pq(p, 1)
    }

    /// `A*_{p,q} = sum x_i^p y_i^q a_i`; absent when the instance has no `y`.
    pub fn a_star_pq(&self, p: u32, q: u32) -> Option<&GaussianRational> {
        self.a_star_pq.as_ref().map(|t| &t[p as usize][q as usize])
    }

    /// `A*_p = A*_{0,p} = sum y_i^p a_i`.
    pub fn a_star_p(&self, p: u32) -> Option<&GaussianRational> {
        self.a_star_pq(0, p)
    }

    pub fn c_star_pq(&self, p: u32, q: u32) -> Option<&GaussianRational> {
        self.c_star_pq.as_ref().map(|t| &t[p as usize][q as usize])
    }

    pub fn c_star_p(&self, p: u32) -> Option<&GaussianRational> {
        self.c_star_pq(0, p)
    }

    /// `sum |x_i|^2 a_i`; always real.
    pub fn a_abs(&self) -> &Rational {
        &self.a_abs
    }

    /// `sum |x_i|^2 c_i`; always real.
    pub fn c_abs(&self) -> &Rational {
        &self.c_abs
    }

    /// `S_{p,q} = sum x_i a_i^p c_i^q`.
    pub fn s_pq(&self, p: u32, q: u32) -> &GaussianRational {
        &self.s_pq[p as usize][q as usize]
    }

    /// `A_0 = sum a_i` as an integer.
    pub fn a0(&self) -> BigInt {
        let v = self.a_pq(0, 1);
        debug_assert!(v.is_real() && v.re.denom().is_one());
        v.re.numer().clone()
    }

    /// `C_0 = sum c_i` as an integer.
    pub fn c0(&self) -> BigInt {
        let v = self.c_pq(0, 1);
        debug_assert!(v.is_real() && v.re.denom().is_one());
        v.re.numer().clone()
    }
}

/// The closed catalog of the sixteen identities. `R` labels sum over
/// capped compositions of `n`; `U` labels sum over the whole box.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum IdentityLabel {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    U1,
    U2,
    U3,
    U4,
    U5,
    U6,
    U7,
    U8,
}

/// The weight attached to each summand, shared between an `R` label and
/// its `U` counterpart.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum WeightForm {
    /// 1
    One,
    /// sum x_i k_i
    Sum,
    /// (sum x_i k_i)^2
    SumSquared,
    /// |sum x_i k_i|^2
    SumAbsSquared,
    /// (sum x_i k_i)(sum y_i k_i)
    Bilinear,
    /// sum x_i k_i^2
    SquareSum,
    /// (sum x_i k_i)^3
    SumCubed,
    /// sum x_i k_i^3
    CubeSum,
}

impl IdentityLabel {
    pub const ALL: [IdentityLabel; 16] = [
        IdentityLabel::R1,
        IdentityLabel::R2,
        IdentityLabel::R3,
        IdentityLabel::R4,
        IdentityLabel::R5,
        IdentityLabel::R6,
        IdentityLabel::R7,
        IdentityLabel::R8,
        IdentityLabel::U1,
        IdentityLabel::U2,
        IdentityLabel::U3,
        IdentityLabel::U4,
        IdentityLabel::U5,
        IdentityLabel::U6,
        IdentityLabel::U7,
        IdentityLabel::U8,
    ];

    pub const RESTRICTED: [IdentityLabel; 8] = [
        IdentityLabel::R1,
        IdentityLabel::R2,
        IdentityLabel::R3,
        IdentityLabel::R4,
        IdentityLabel::R5,
        IdentityLabel::R6,
        IdentityLabel::R7,
        IdentityLabel::R8,
    ];

    pub const UNRESTRICTED: [IdentityLabel; 8] = [
        IdentityLabel::U1,
        IdentityLabel::U2,
        IdentityLabel::U3,
        IdentityLabel::U4,
        IdentityLabel::U5,
        IdentityLabel::U6,
        IdentityLabel::U7,
        IdentityLabel::U8,
    ];

    pub fn is_restricted(self) -> bool {
        (self as usize) < 8
    }

    /// 1-based position within its family (R3 and U3 are both 3).
    pub fn family_index(self) -> usize {
        (self as usize) % 8 + 1
    }

    pub fn from_family(index: usize, restricted: bool) -> IdentityLabel {
        assert!(
            (1..=8).contains(&index),
            "identity family index out of range"
        );
        let offset = if restricted { 0 } else { 8 };
        IdentityLabel::ALL[offset + index - 1]
    }

    /// The restricted label with the same weight form.
    pub fn restricted_counterpart(self) -> IdentityLabel {
        IdentityLabel::from_family(self.family_index(), true)
    }

    /// The unrestricted label with the same weight form.
    pub fn unrestricted_counterpart(self) -> IdentityLabel {
        IdentityLabel::from_family(self.family_index(), false)
    }

    pub fn weight_form(self) -> WeightForm {
        match self.family_index() {
            1 => WeightForm::One,
            2 => WeightForm::Sum,
            3 => WeightForm::SumSquared,
            4 => WeightForm::SumAbsSquared,
            5 => WeightForm::Bilinear,
            6 => WeightForm::SquareSum,
            7 => WeightForm::SumCubed,
            8 => WeightForm::CubeSum,
            _ => unreachable!(),
        }
    }

    /// Polynomial degree of the weight in the summation indices.
    pub fn degree(self) -> u32 {
        match self.weight_form() {
            WeightForm::One => 0,
            WeightForm::Sum => 1,
            WeightForm::SumSquared
            | WeightForm::SumAbsSquared
            | WeightForm::Bilinear
            | WeightForm::SquareSum => 2,
            WeightForm::SumCubed | WeightForm::CubeSum => 3,
        }
    }

    pub fn requires_y(self) -> bool {
        matches!(self.weight_form(), WeightForm::Bilinear)
    }
}

impl fmt::Display for IdentityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = self.family_index();
        let prefix = if self.is_restricted() { 'R' } else { 'U' };
        write!(f, "{prefix}{family}")
    }
}

impl FromStr for IdentityLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || format!("unknown identity label {s:?} (expected R1..R8 or U1..U8)");
        let mut chars = s.chars();
        let prefix = chars.next().ok_or_else(err)?;
        let restricted = match prefix.to_ascii_uppercase() {
            'R' => true,
            'U' => false,
            _ => return Err(err()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| err())?;
        if !(1..=8).contains(&index) {
            return Err(err());
        }
        Ok(IdentityLabel::from_family(index, restricted))
    }
}

impl Serialize for IdentityLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IdentityLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Summation domains: capped compositions of `n`, or the full box.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Domain {
    Restricted,
    Unrestricted,
}

/// Monomial moments of the summation indices: the building blocks every
/// identity right side decomposes into. Indices are 0-based and must be
/// mutually distinct.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MomentLabel {
    /// k_p^power with power in 1..=3.
    Single { p: usize, power: u8 },
    /// k_p k_q.
    Pair { p: usize, q: usize },
    /// k_p k_q^2.
    PairSquared { p: usize, q: usize },
    /// k_p k_q k_r.
    Triple { p: usize, q: usize, r: usize },
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MomentLabelError {
    #[error("moment index {index} out of range for m = {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("moment indices must be mutually distinct")]
    DuplicateIndex,
    #[error("moment power {power} not supported (expected 1..=3)")]
    UnsupportedPower { power: u8 },
}

impl MomentLabel {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            MomentLabel::Single { p, .. } => vec![p],
            MomentLabel::Pair { p, q } | MomentLabel::PairSquared { p, q } => vec![p, q],
            MomentLabel::Triple { p, q, r } => vec![p, q, r],
        }
    }

    /// Exponent of each index in the monomial, paired with the index.
    pub fn exponents(&self) -> Vec<(usize, u8)> {
        match *self {
            MomentLabel::Single { p, power } => vec![(p, power)],
            MomentLabel::Pair { p, q } => vec![(p, 1), (q, 1)],
            MomentLabel::PairSquared { p, q } => vec![(p, 1), (q, 2)],
            MomentLabel::Triple { p, q, r } => vec![(p, 1), (q, 1), (r, 1)],
        }
    }

    pub fn check(&self, m: usize) -> Result<(), MomentLabelError> {
        if let MomentLabel::Single { power, .. } = self {
            if !(1..=3).contains(power) {
                return Err(MomentLabelError::UnsupportedPower { power: *power });
            }
        }
        let indices = self.indices();
        for &index in &indices {
            if index >= m {
                return Err(MomentLabelError::IndexOutOfRange { index, m });
            }
        }
        for (i, &a) in indices.iter().enumerate() {
            if indices[i + 1..].contains(&a) {
                return Err(MomentLabelError::DuplicateIndex);
            }
        }
        Ok(())
    }
}

impl fmt::Display for MomentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MomentLabel::Single { p, power } => write!(f, "k[{p}]^{power}"),
            MomentLabel::Pair { p, q } => write!(f, "k[{p}]k[{q}]"),
            MomentLabel::PairSquared { p, q } => write!(f, "k[{p}]k[{q}]^2"),
            MomentLabel::Triple { p, q, r } => write!(f, "k[{p}]k[{q}]k[{r}]"),
        }
    }
}

/// Which scalar field the random weights live in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Rational,
    Gaussian,
}

impl FromStr for WeightKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" => Ok(WeightKind::Rational),
            "gaussian" => Ok(WeightKind::Gaussian),
            other => Err(format!(
                "unknown weight kind {other:?} (expected rational|gaussian)"
            )),
        }
    }
}

/// Bounds for seeded instance generation.
#[derive(Clone, Copy, Debug)]
pub struct GenBounds {
    pub m_max: usize,
    pub a_max: u64,
    pub weight_kind: WeightKind,
}

impl Default for GenBounds {
    fn default() -> Self {
        Self {
            m_max: 3,
            a_max: 4,
            weight_kind: WeightKind::Gaussian,
        }
    }
}

/// Mix a campaign seed with an index to derive an independent child seed
/// (splitmix64 finalizer over the xored pair).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn random_weight(rng: &mut ChaCha8Rng, kind: WeightKind) -> GaussianRational {
    let part = |rng: &mut ChaCha8Rng| {
        let numer = rng.gen_range(-4i64..=4);
        let denom = rng.gen_range(1i64..=4);
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    };
    let re = part(rng);
    let im = match kind {
        WeightKind::Rational => Rational::zero(),
        WeightKind::Gaussian => part(rng),
    };
    GaussianRational::new(re, im)
}

/// Generate a random weight vector of length `m` (numerators in [-4, 4],
/// denominators in [1, 4] per component).
pub fn random_weights(seed: u64, m: usize, kind: WeightKind) -> Vec<GaussianRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| random_weight(&mut rng, kind)).collect()
}

/// Deterministic seeded instance generation.
///
/// Draw order is fixed: m, then a_1..a_m, then c_1..c_m, then n, then the
/// x components, then the y components. Each a_i is uniform in
/// [0, a_max]; each c_i is uniform in [0, a_i] except with probability 1/8
/// it is a_i + 1, exercising the zero-instance branch; n is uniform in
/// [0, sum(a) + 1] so the empty restricted sum is reachable. Weight
/// components have numerators in [-4, 4] and denominators in [1, 4].
pub fn random_instance(seed: u64, bounds: &GenBounds) -> ProblemInstance {
    assert!(bounds.m_max >= 1, "m_max must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=bounds.m_max);
    let a: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=bounds.a_max)).collect();
    let c: Vec<u64> = a
        .iter()
        .map(|&ai| {
            if rng.gen_range(0..8u32) == 0 {
                ai + 1
            } else {
                rng.gen_range(0..=ai)
            }
        })
        .collect();
    let n = rng.gen_range(0..=a.iter().sum::<u64>() + 1);
    let x: Vec<GaussianRational> = (0..m)
        .map(|_| random_weight(&mut rng, bounds.weight_kind))
        .collect();
    let y: Vec<GaussianRational> = (0..m)
        .map(|_| random_weight(&mut rng, bounds.weight_kind))
        .collect();
    ProblemInstance {
        m,
        n: Some(n),
        a,
        c,
        x,
        y: Some(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational_from_str;

    fn gr(re: &str, im: &str) -> GaussianRational {
        GaussianRational::new(
            rational_from_str(re).unwrap(),
            rational_from_str(im).unwrap(),
        )
    }

    #[test]
    fn aggregate_examples() {
        // m = 2, x = (1, i), a = (2, 3)
        let inst = ProblemInstance::new(vec![2, 3], vec![0, 0], vec![gr("1", "0"), gr("0", "1")]);
        let agg = inst.aggregates();
        assert_eq!(agg.a_p(1), &gr("2", "3"));
        assert_eq!(agg.a_abs(), &rational_from_str("5").unwrap());

        // m = 1, x = (2), a = (3), c = (1): S_{1,1} = 2 * 3 * 1
        let inst = ProblemInstance::new(vec![3], vec![1], vec![gr("2", "0")]);
        let agg = inst.aggregates();
        assert_eq!(agg.s_pq(1, 1), &gr("6", "0"));
        assert_eq!(agg.a0(), BigInt::from(3));
        assert_eq!(agg.c0(), BigInt::from(1));
    }

    #[test]
    fn starred_reductions() {
        let inst = random_instance(7, &GenBounds::default());
        let x = inst.x.clone();

        // y = x collapses the starred sums onto the plain ones.
        let same = inst.clone().with_y(x.clone());
        let agg = same.aggregates();
        assert_eq!(agg.a_star_p(1).unwrap(), agg.a_p(1));
        assert_eq!(agg.c_star_p(1).unwrap(), agg.c_p(1));
        assert_eq!(agg.a_star_pq(1, 1).unwrap(), agg.a_p(2));
        assert_eq!(agg.c_star_pq(1, 1).unwrap(), agg.c_p(2));

        // y = conj(x) turns them into the absolute variants.
        let conj = inst.clone().with_y(x.iter().map(|w| w.conj()).collect());
        let agg = conj.aggregates();
        let star = agg.a_star_pq(1, 1).unwrap();
        assert!(star.is_real());
        assert_eq!(&star.re, agg.a_abs());
        let prod = agg.a_p(1) * agg.a_star_p(1).unwrap();
        assert!(prod.is_real());
        assert_eq!(prod.re, agg.a_p(1).abs_squared());
    }

    #[test]
    fn aggregates_permutation_invariant() {
        for seed in 0..40 {
            let inst = random_instance(seed, &GenBounds::default());
            let m = inst.m;
            // rotate every per-coordinate list by one
            let rot = |v: &[u64]| -> Vec<u64> { (0..m).map(|i| v[(i + 1) % m]).collect() };
            let rot_w = |v: &[GaussianRational]| -> Vec<GaussianRational> {
                (0..m).map(|i| v[(i + 1) % m].clone()).collect()
            };
            let permuted = ProblemInstance {
                m,
                n: inst.n,
                a: rot(&inst.a),
                c: rot(&inst.c),
                x: rot_w(&inst.x),
                y: inst.y.as_ref().map(|y| rot_w(y)),
            };
            let lhs = inst.aggregates();
            let rhs = permuted.aggregates();
            for p in 0..=3 {
                for q in 0..=3 {
                    assert_eq!(lhs.a_pq(p, q), rhs.a_pq(p, q));
                    assert_eq!(lhs.c_pq(p, q), rhs.c_pq(p, q));
                    assert_eq!(lhs.s_pq(p, q), rhs.s_pq(p, q));
                }
            }
            assert_eq!(lhs.a_abs(), rhs.a_abs());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let bounds = GenBounds::default();
        assert_eq!(random_instance(42, &bounds), random_instance(42, &bounds));
        assert_ne!(random_instance(42, &bounds), random_instance(43, &bounds));
    }

    #[test]
    fn generation_respects_bounds() {
        let bounds = GenBounds {
            m_max: 1,
            a_max: 5,
            weight_kind: WeightKind::Rational,
        };
        for seed in 0..1000 {
            let inst = random_instance(seed, &bounds);
            assert_eq!(inst.m, 1);
            assert!(inst.a.iter().all(|&a| a <= 5));
            for (a, c) in inst.a.iter().zip(&inst.c) {
                assert!(*c <= a + 1);
            }
            assert!(inst.n.unwrap() <= inst.sum_a() + 1);
            assert!(inst.x.iter().all(|w| w.is_real()));
            assert!(inst.validate().is_ok());
        }
    }

    #[test]
    fn zero_instances_are_generated() {
        let bounds = GenBounds::default();
        let zero_count = (0..400)
            .filter(|&seed| random_instance(seed, &bounds).is_zero_instance())
            .count();
        assert!(zero_count > 10, "zero-instance branch never exercised");
    }

    #[test]
    fn validation_examples() {
        let zero = ProblemInstance::new(vec![2], vec![3], vec![gr("1", "0")]);
        let report = zero.validate().unwrap();
        assert!(report.zero_instance);

        let bad = ProblemInstance {
            m: 2,
            n: None,
            a: vec![1],
            c: vec![0, 0],
            x: vec![gr("1", "0"), gr("1", "0")],
            y: None,
        };
        assert_eq!(
            bad.validate(),
            Err(ValidationError::LengthMismatch {
                field: "a",
                len: 1,
                m: 2
            })
        );

        let empty = ProblemInstance::new(vec![], vec![], vec![]);
        assert_eq!(empty.validate(), Err(ValidationError::EmptyInstance));
    }

    #[test]
    fn label_round_trip() {
        for label in IdentityLabel::ALL {
            let s = label.to_string();
            assert_eq!(s.parse::<IdentityLabel>().unwrap(), label);
        }
        assert_eq!("r4".parse::<IdentityLabel>().unwrap(), IdentityLabel::R4);
        assert!("R9".parse::<IdentityLabel>().is_err());
        assert!("X1".parse::<IdentityLabel>().is_err());
        assert_eq!(
            IdentityLabel::R3.unrestricted_counterpart(),
            IdentityLabel::U3
        );
        assert_eq!(
            IdentityLabel::U5.restricted_counterpart(),
            IdentityLabel::R5
        );
        assert!(IdentityLabel::R5.requires_y() && IdentityLabel::U5.requires_y());
        assert_eq!(IdentityLabel::R7.degree(), 3);
    }

    #[test]
    fn moment_label_checks() {
        assert!(MomentLabel::Single { p: 0, power: 2 }.check(1).is_ok());
        assert!(matches!(
            MomentLabel::Single { p: 1, power: 1 }.check(1),
            Err(MomentLabelError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            MomentLabel::Pair { p: 1, q: 1 }.check(3),
            Err(MomentLabelError::DuplicateIndex)
        ));
        assert!(matches!(
            MomentLabel::Single { p: 0, power: 4 }.check(1),
            Err(MomentLabelError::UnsupportedPower { .. })
        ));
        assert!(MomentLabel::Triple { p: 0, q: 1, r: 2 }.check(3).is_ok());
    }

    #[test]
    fn instance_serde_round_trip() {
        let inst = random_instance(11, &GenBounds::default());
        let json = serde_json::to_string(&inst).unwrap();
        let back: ProblemInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);

        let plain = ProblemInstance::new(
            vec![2, 1],
            vec![1, 0],
            vec![gr("1", "0"), gr("1/2", "-2/3")],
        );
        let json = serde_json::to_string(&plain).unwrap();
        assert!(!json.contains("\"n\""));
        assert!(!json.contains("\"y\""));
        let back: ProblemInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plain);
    }

    #[test]
    fn mixed_seeds_differ() {
        let s = 0xfeed_beef;
        assert_ne!(mix_seed(s, 0), mix_seed(s, 1));
        assert_eq!(mix_seed(s, 7), mix_seed(s, 7));
    }
}
