//! Right-side evaluators: the sixteen literal closed forms, the twelve
//! moment closed forms in degeneracy-safe absorption form, and the
//! moment-decomposition strategy that rebuilds any identity right side
//! from elementary moments.
//!
//! The printed fractions of the restricted identities are undefined when
//! `A0 - C0` is smaller than the weight degree even though both identity
//! sides stay finite. The absorption/moment route is therefore the
//! authoritative total evaluator; the literal route reports
//! [`EvalError::DegenerateDenominator`] instead of dividing by zero.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::EvalError;
use crate::exact::{binomial, falling_factorial, pow2, GaussianRational, Rational};
use crate::instance::{
    Aggregates, Domain, IdentityLabel, MomentLabel, ProblemInstance, WeightForm,
};

/// Available right-side evaluation strategies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RhsStrategy {
    /// The printed formulas; partial on degenerate restricted instances.
    Literal,
    /// Moment decomposition over absorption-form moments; total.
    MomentDecomposition,
    /// The per-coordinate total evaluator for the unrestricted labels.
    Unrestricted,
}

impl fmt::Display for RhsStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RhsStrategy::Literal => "literal",
            RhsStrategy::MomentDecomposition => "moment",
            RhsStrategy::Unrestricted => "unrestricted",
        };
        write!(f, "{name}")
    }
}

impl FromStr for RhsStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(RhsStrategy::Literal),
            "moment" | "moments" | "absorption" => Ok(RhsStrategy::MomentDecomposition),
            "unrestricted" => Ok(RhsStrategy::Unrestricted),
            other => Err(format!(
                "unknown strategy {other:?} (expected literal|moment|unrestricted)"
            )),
        }
    }
}

impl serde::Serialize for RhsStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for RhsStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The six moment monomial shapes, used to address mutation targets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MomentShape {
    Single1,
    Single2,
    Single3,
    Pair,
    PairSquared,
    Triple,
}

impl MomentShape {
    fn of(label: &MomentLabel) -> MomentShape {
        match label {
            MomentLabel::Single { power: 1, .. } => MomentShape::Single1,
            MomentLabel::Single { power: 2, .. } => MomentShape::Single2,
            MomentLabel::Single { .. } => MomentShape::Single3,
            MomentLabel::Pair { .. } => MomentShape::Pair,
            MomentLabel::PairSquared { .. } => MomentShape::PairSquared,
            MomentLabel::Triple { .. } => MomentShape::Triple,
        }
    }

    fn id(self) -> &'static str {
        match self {
            MomentShape::Single1 => "m1",
            MomentShape::Single2 => "m2",
            MomentShape::Single3 => "m3",
            MomentShape::Pair => "m11",
            MomentShape::PairSquared => "m12",
            MomentShape::Triple => "m111",
        }
    }

    fn layer_count(self) -> u8 {
        match self {
            MomentShape::Single1 => 2,
            MomentShape::Single2 | MomentShape::Pair => 3,
            _ => 4,
        }
    }
}

/// A deliberate single-coefficient corruption of one closed form, used to
/// prove the verifier can fail. Disabled unless explicitly requested.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mutation {
    /// +1 on one absorption-layer coefficient of a restricted moment shape.
    RestrictedLayer { shape: MomentShape, layer: u8 },
    /// +1 on the unrestricted per-coordinate bracket for k^power.
    UnrestrictedInner { power: u8 },
    /// +1 on the literal bracket of one identity.
    LiteralBracket { label: IdentityLabel },
    /// +1 on the deepest closed-form numerator coefficient of the
    /// geometric series family member for k^s.
    GeometricCoefficient { s: u8 },
}

impl Mutation {
    /// Every recognized mutation id.
    pub fn catalog() -> Vec<Mutation> {
        let mut all = Vec::new();
        for shape in [
            MomentShape::Single1,
            MomentShape::Single2,
            MomentShape::Single3,
            MomentShape::Pair,
            MomentShape::PairSquared,
            MomentShape::Triple,
        ] {
            for layer in 0..shape.layer_count() {
                all.push(Mutation::RestrictedLayer { shape, layer });
            }
        }
        for power in 1..=3 {
            all.push(Mutation::UnrestrictedInner { power });
        }
        for label in IdentityLabel::ALL {
            all.push(Mutation::LiteralBracket { label });
        }
        for s in 0..=3 {
            all.push(Mutation::GeometricCoefficient { s });
        }
        all
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::RestrictedLayer { shape, layer } => write!(f, "{}.j{layer}", shape.id()),
            Mutation::UnrestrictedInner { power } => write!(f, "n{power}"),
            Mutation::LiteralBracket { label } => {
                write!(f, "lit.{}", label.to_string().to_ascii_lowercase())
            }
            Mutation::GeometricCoefficient { s } => write!(f, "geom.s{s}"),
        }
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        for candidate in Mutation::catalog() {
            if candidate.to_string() == s {
                return Ok(candidate);
            }
        }
        Err(format!(
            "unknown mutation id {s:?}; known ids: {}",
            Mutation::catalog()
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    }
}

/// Evaluation context: carries the optional mutation plus caches that are
/// only sound while the instance shape they were built from stays fixed.
#[derive(Default)]
pub struct EvalContext {
    mutation: Option<Mutation>,
    /// Moment values keyed by (label, n); valid per (a, c).
    moments: HashMap<(MomentLabel, Option<u64>), Rational>,
    /// Valid per (a, c, x, y).
    aggregates: Option<Aggregates>,
    /// Valid per (a, c).
    binom_prod: Option<BigInt>,
}

impl EvalContext {
    pub fn new(mutation: Option<Mutation>) -> Self {
        Self {
            mutation,
            ..Self::default()
        }
    }

    pub fn mutation(&self) -> Option<&Mutation> {
        self.mutation.as_ref()
    }

    /// Drop everything cached; call when moving to a different (a, c).
    pub fn clear_for_base(&mut self) {
        self.moments.clear();
        self.aggregates = None;
        self.binom_prod = None;
    }

    /// Drop the weight-dependent cache; call when swapping (x, y) while
    /// keeping (a, c).
    pub fn clear_for_weights(&mut self) {
        self.aggregates = None;
    }

    fn aggregates_for(&mut self, inst: &ProblemInstance) -> &Aggregates {
        self.aggregates.get_or_insert_with(|| inst.aggregates())
    }

    fn binom_prod_for(&mut self, inst: &ProblemInstance) -> &BigInt {
        self.binom_prod.get_or_insert_with(|| binom_prod(inst))
    }
}

/// The closed-form value of one moment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentResult {
    pub label: MomentLabel,
    pub value: Rational,
}

/// `prod C(a_i, c_i)`.
fn binom_prod(inst: &ProblemInstance) -> BigInt {
    let mut acc = BigInt::one();
    for (&a, &c) in inst.a.iter().zip(&inst.c) {
        acc *= binomial(&BigInt::from(a), &BigInt::from(c));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Absorption-layer coefficients for one restricted moment, indexed by the
/// layer j so that layer j multiplies `C(A0-C0-j, n-C0-j)`. With
/// `alpha_i = a_i - c_i` and `gamma_i = c_i` for the involved indices:
///
/// - k_p:        [g, a]
/// - k_p^2:      [g^2, a(2g+1), a(a-1)]
/// - k_p^3:      [g^3, a(3g^2+3g+1), 3a(a-1)(g+1), a(a-1)(a-2)]
/// - k_p k_q:    [gg', ag'+a'g, aa']
/// - k_p k_q^2:  [g g'^2, a g'^2 + a' g (2g'+1), a'(g(a'-1)+2ag'+a), a a'(a'-1)]
/// - k_p k_q k_r: elementary-symmetric mixes of the three (alpha, gamma) pairs
///
/// Every layer whose binomial would need a negative top has a vanishing
/// coefficient, which is exactly why these forms stay total on instances
/// where the printed fractions break down.
fn absorption_layers(label: &MomentLabel, inst: &ProblemInstance) -> Vec<BigInt> {
    let alpha = |i: usize| BigInt::from(inst.a[i]) - BigInt::from(inst.c[i]);
    let gamma = |i: usize| BigInt::from(inst.c[i]);
    match *label {
        MomentLabel::Single { p, power: 1 } => {
            vec![gamma(p), alpha(p)]
        }
        MomentLabel::Single { p, power: 2 } => {
            let a = alpha(p);
            let g = gamma(p);
            vec![&g * &g, &a * (2 * &g + 1), &a * (&a - 1)]
        }
        MomentLabel::Single { p, power: 3 } => {
            let a = alpha(p);
            let g = gamma(p);
            vec![
                (&g * &g) * &g,
                &a * (3 * &g * &g + 3 * &g + 1),
                3 * &a * (&a - 1) * (&g + 1),
                &a * (&a - 1) * (&a - 2),
            ]
        }
        MomentLabel::Single { power, .. } => {
            unreachable!("unsupported moment power {power}; MomentLabel::check must run first")
        }
        MomentLabel::Pair { p, q } => {
            let (ap, gp) = (alpha(p), gamma(p));
            let (aq, gq) = (alpha(q), gamma(q));
            vec![&gp * &gq, &ap * &gq + &aq * &gp, &ap * &aq]
        }
        MomentLabel::PairSquared { p, q } => {
            let (ap, gp) = (alpha(p), gamma(p));
            let (aq, gq) = (alpha(q), gamma(q));
            vec![
                &gp * &gq * &gq,
                &ap * &gq * &gq + &aq * &gp * (2 * &gq + 1),
                &aq * (&gp * (&aq - 1) + 2 * &ap * &gq + &ap),
                &ap * &aq * (&aq - 1),
            ]
        }
        MomentLabel::Triple { p, q, r } => {
            let (ap, gp) = (alpha(p), gamma(p));
            let (aq, gq) = (alpha(q), gamma(q));
            let (ar, gr) = (alpha(r), gamma(r));
            vec![
                &gp * &gq * &gr,
                &ap * &gq * &gr + &gp * &aq * &gr + &gp * &gq * &ar,
                &ap * &aq * &gr + &ap * &gq * &ar + &gp * &aq * &ar,
                &ap * &aq * &ar,
            ]
        }
    }
}

/// [`absorption_layers`] with the configured mutation applied; the flag
/// reports whether a layer was actually perturbed.
pub(crate) fn absorption_layers_mutated(
    label: &MomentLabel,
    inst: &ProblemInstance,
    mutation: Option<&Mutation>,
) -> (Vec<BigInt>, bool) {
    let mut layers = absorption_layers(label, inst);
    match mutation {
        Some(Mutation::RestrictedLayer { shape, layer }) if *shape == MomentShape::of(label) => {
            layers[*layer as usize] += 1;
            (layers, true)
        }
        _ => (layers, false),
    }
}

/// Restricted moment closed form, evaluated as a linear combination of
/// shifted leading binomials so it is total even where the printed ratio
/// forms are undefined. Zero-coefficient layers are skipped before any
/// binomial is requested.
pub fn moment_restricted(
    label: &MomentLabel,
    inst: &ProblemInstance,
) -> Result<MomentResult, EvalError> {
    moment_restricted_with(label, inst, &mut EvalContext::new(None))
}

pub fn moment_restricted_with(
    label: &MomentLabel,
    inst: &ProblemInstance,
    ctx: &mut EvalContext,
) -> Result<MomentResult, EvalError> {
    inst.validate()?;
    label.check(inst.m)?;
    let n = inst.n.ok_or(EvalError::MissingN)?;
    let key = (*label, Some(n));
    if let Some(value) = ctx.moments.get(&key) {
        return Ok(MomentResult {
            label: *label,
            value: value.clone(),
        });
    }
    let value = if inst.is_zero_instance() {
        Rational::zero()
    } else {
        let d = BigInt::from(inst.sum_a()) - BigInt::from(inst.sum_c());
        let e = BigInt::from(n) - BigInt::from(inst.sum_c());
        let (layers, mutated) = absorption_layers_mutated(label, inst, ctx.mutation.as_ref());
        let mut acc = BigInt::zero();
        for (j, coeff) in layers.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let top = &d - j;
            if top.is_negative() {
                debug_assert!(mutated, "nonzero absorption layer above a negative top");
                continue;
            }
            acc += coeff * binomial(&top, &(&e - j));
        }
        Rational::from_integer(acc * ctx.binom_prod_for(inst))
    };
    ctx.moments.insert(key, value.clone());
    Ok(MomentResult {
        label: *label,
        value,
    })
}

/// Per-coordinate bracket of the unrestricted inner sums: coordinate `i`
/// carrying `k_i^s` contributes `2^(a-c-s) * bracket_s(a, c) * C(a, c)`.
fn inner_bracket(s: u8, a: u64, c: u64) -> BigInt {
    let sum = BigInt::from(a) + BigInt::from(c);
    let diff = BigInt::from(a) - BigInt::from(c);
    match s {
        0 => BigInt::one(),
        1 => sum,
        2 => &sum * &sum + diff,
        3 => &sum * (&sum * &sum + 3 * diff),
        _ => unreachable!("unsupported inner power {s}"),
    }
}

/// Unrestricted moment closed form: a product of per-coordinate factors,
/// each individually well-defined (negative powers of two stay exact
/// rationals). Any n on the instance is ignored; the box domain does not
/// use it.
pub fn moment_unrestricted(
    label: &MomentLabel,
    inst: &ProblemInstance,
) -> Result<MomentResult, EvalError> {
    moment_unrestricted_with(label, inst, &mut EvalContext::new(None))
}

pub fn moment_unrestricted_with(
    label: &MomentLabel,
    inst: &ProblemInstance,
    ctx: &mut EvalContext,
) -> Result<MomentResult, EvalError> {
    inst.validate()?;
    label.check(inst.m)?;
    let key = (*label, None);
    if let Some(value) = ctx.moments.get(&key) {
        return Ok(MomentResult {
            label: *label,
            value: value.clone(),
        });
    }
    let value = if inst.is_zero_instance() {
        Rational::zero()
    } else {
        let mut powers = vec![0u8; inst.m];
        for (p, e) in label.exponents() {
            powers[p] = e;
        }
        let mut bracket_product = ctx.binom_prod_for(inst).clone();
        let mut exponent: i64 = 0;
        for ((&s, &a), &c) in powers.iter().zip(&inst.a).zip(&inst.c) {
            let mut bracket = inner_bracket(s, a, c);
            if let Some(Mutation::UnrestrictedInner { power }) = ctx.mutation {
                if power == s {
                    bracket += 1;
                }
            }
            bracket_product *= bracket;
            exponent += a as i64 - c as i64 - s as i64;
        }
        pow2(exponent) * bracket_product
    };
    ctx.moments.insert(key, value.clone());
    Ok(MomentResult {
        label: *label,
        value,
    })
}

fn require_y(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<&[GaussianRational], EvalError> {
    inst.y.as_deref().ok_or(EvalError::MissingY { label })
}

fn check_label_domain(label: IdentityLabel, inst: &ProblemInstance) -> Result<(), EvalError> {
    match (label.is_restricted(), inst.n) {
        (true, None) => Err(EvalError::MissingN),
        (false, Some(n)) => Err(EvalError::UnexpectedN { n }),
        _ => Ok(()),
    }
}

fn gr_int(v: &BigInt) -> GaussianRational {
    GaussianRational::from_bigint(v)
}

/// Aggregate building blocks of a restricted literal numerator, ordered to
/// pair with [`literal_time_coefficients`]. Families 2..=8 only; the
/// weight-1 identity has no bracket.
pub(crate) fn literal_numerator_parts(
    label: IdentityLabel,
    agg: &Aggregates,
) -> Vec<GaussianRational> {
    let two = GaussianRational::from_int(2);
    let three = GaussianRational::from_int(3);
    match label.family_index() {
        2 => vec![agg.a_p(1).clone(), agg.c_p(1).clone()],
        3 => {
            let a1 = agg.a_p(1);
            let c1 = agg.c_p(1);
            vec![
                a1 * a1,
                &(agg.a_p(2) - agg.c_p(2)) + &(&two * &(a1 * c1)),
                c1 * c1,
            ]
        }
        4 => {
            let a1 = agg.a_p(1);
            let c1 = agg.c_p(1);
            let cross = &(a1 * &c1.conj()) + &(&a1.conj() * c1);
            let abs_diff =
                GaussianRational::from_rational(agg.a_abs().clone() - agg.c_abs().clone());
            vec![
                GaussianRational::from_rational(a1.abs_squared()),
                &abs_diff + &cross,
                GaussianRational::from_rational(c1.abs_squared()),
            ]
        }
        5 => {
            let a1 = agg.a_p(1);
            let c1 = agg.c_p(1);
            let a1s = agg.a_star_p(1).expect("y checked by the caller").clone();
            let c1s = agg.c_star_p(1).expect("y checked by the caller").clone();
            let star_diff = agg.a_star_pq(1, 1).expect("y checked by the caller")
                - agg.c_star_pq(1, 1).expect("y checked by the caller");
            vec![
                a1 * &a1s,
                &star_diff + &(&(a1 * &c1s) + &(&a1s * c1)),
                c1 * &c1s,
            ]
        }
        6 => vec![
            agg.a_pq(1, 2).clone(),
            &(agg.a_p(1) - agg.c_p(1)) + &(&two * agg.s_pq(1, 1)),
            agg.c_pq(1, 2).clone(),
        ],
        7 => {
            let a1 = agg.a_p(1);
            let c1 = agg.c_p(1);
            let mix = &(agg.a_p(2) - agg.c_p(2)) + &(a1 * c1);
            vec![
                &(a1 * a1) * a1,
                &(agg.c_p(3) - agg.a_p(3)) + &(&three * &(a1 * &mix)),
                &(c1 * c1) * c1,
                &(agg.a_p(3) - agg.c_p(3)) + &(&three * &(c1 * &mix)),
            ]
        }
        8 => vec![
            agg.a_pq(1, 3).clone(),
            &(agg.c_p(1) - agg.a_p(1))
                + &(&three * &(&(agg.s_pq(2, 1) + agg.a_pq(1, 2)) - agg.s_pq(1, 1))),
            agg.c_pq(1, 3).clone(),
            &(agg.a_p(1) - agg.c_p(1))
                + &(&three * &(&(agg.s_pq(1, 2) - agg.c_pq(1, 2)) + agg.s_pq(1, 1))),
        ],
        _ => panic!("literal_numerator_parts: family 1 has no bracket"),
    }
}

/// Integer coefficients pairing with [`literal_numerator_parts`], as
/// polynomials in `t = n - C0` and `u = A0 - n`:
/// degree 1 -> `[t, u]`; degree 2 -> `[t(t-1), tu, u(u-1)]`;
/// degree 3 -> `[t(t-1)(t-2), t(t-1)u, u(u-1)(u-2), u(u-1)t]`.
pub(crate) fn literal_time_coefficients(degree: u32, t: &BigInt, u: &BigInt) -> Vec<BigInt> {
    match degree {
        1 => vec![t.clone(), u.clone()],
        2 => vec![t * (t - 1), t * u, u * (u - 1)],
        3 => vec![
            t * (t - 1) * (t - 2),
            t * (t - 1) * u,
            u * (u - 1) * (u - 2),
            u * (u - 1) * t,
        ],
        _ => panic!("literal_time_coefficients supports degrees 1..=3, got {degree}"),
    }
}

/// Decompose an identity weight into (coefficient, moment) terms over
/// mutually unequal indices. Empty for the weight-1 identities.
pub(crate) fn weight_terms(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<Vec<(GaussianRational, MomentLabel)>, EvalError> {
    let m = inst.m;
    let mut terms = Vec::new();
    match label.weight_form() {
        WeightForm::One => {}
        WeightForm::Sum => {
            for p in 0..m {
                terms.push((inst.x[p].clone(), MomentLabel::Single { p, power: 1 }));
            }
        }
        WeightForm::SumSquared | WeightForm::SumAbsSquared | WeightForm::Bilinear => {
            // All three are bilinear forms (sum x k)(sum z k), with z = x,
            // conj(x), or y.
            let z: Vec<GaussianRational> = match label.weight_form() {
                WeightForm::SumSquared => inst.x.clone(),
                WeightForm::SumAbsSquared => inst.x.iter().map(|w| w.conj()).collect(),
                WeightForm::Bilinear => require_y(label, inst)?.to_vec(),
                _ => unreachable!(),
            };
            for (p, (x, zp)) in inst.x.iter().zip(&z).enumerate() {
                terms.push((x * zp, MomentLabel::Single { p, power: 2 }));
            }
            for (p, x) in inst.x.iter().enumerate() {
                for (q, zq) in z.iter().enumerate() {
                    if p != q {
                        terms.push((x * zq, MomentLabel::Pair { p, q }));
                    }
                }
            }
        }
        WeightForm::SquareSum => {
            for p in 0..m {
                terms.push((inst.x[p].clone(), MomentLabel::Single { p, power: 2 }));
            }
        }
        WeightForm::SumCubed => {
            let three = GaussianRational::from_int(3);
            for p in 0..m {
                terms.push((inst.x[p].pow(3), MomentLabel::Single { p, power: 3 }));
            }
            for p in 0..m {
                for q in 0..m {
                    if p != q {
                        let coeff = &(&inst.x[p] * &inst.x[q].pow(2)) * &three;
                        terms.push((coeff, MomentLabel::PairSquared { p, q }));
                    }
                }
            }
            for p in 0..m {
                for q in 0..m {
                    for r in 0..m {
                        if p != q && q != r && p != r {
                            let coeff = &(&inst.x[p] * &inst.x[q]) * &inst.x[r];
                            terms.push((coeff, MomentLabel::Triple { p, q, r }));
                        }
                    }
                }
            }
        }
        WeightForm::CubeSum => {
            for p in 0..m {
                terms.push((inst.x[p].clone(), MomentLabel::Single { p, power: 3 }));
            }
        }
    }
    Ok(terms)
}

/// The printed closed form of one identity, exactly as displayed.
///
/// Restricted labels divide by a falling factorial of `A0 - C0` and fail
/// with [`EvalError::DegenerateDenominator`] when it vanishes on a nonzero
/// instance. Unrestricted labels carry a power of two instead, which stays
/// exact as a rational even with a negative exponent, so they are total.
/// Zero-instances return 0 before any fraction is touched.
pub fn rhs_literal(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    rhs_literal_with(label, inst, &mut EvalContext::new(None))
}

pub fn rhs_literal_with(
    label: IdentityLabel,
    inst: &ProblemInstance,
    ctx: &mut EvalContext,
) -> Result<GaussianRational, EvalError> {
    inst.validate()?;
    check_label_domain(label, inst)?;
    if label.requires_y() {
        require_y(label, inst)?;
    }
    if inst.is_zero_instance() {
        return Ok(GaussianRational::zero());
    }
    let product = ctx.binom_prod_for(inst).clone();
    let d = BigInt::from(inst.sum_a()) - BigInt::from(inst.sum_c());
    let degree = label.degree();

    if label.is_restricted() {
        let n = inst.n.expect("checked by check_label_domain");
        let t = BigInt::from(n) - BigInt::from(inst.sum_c());
        let u = &d - &t;
        let lead = binomial(&d, &t);
        let denom = falling_factorial(&d, degree);
        if degree > 0 && denom.is_zero() {
            return Err(EvalError::DegenerateDenominator {
                difference: d,
                degree,
            });
        }
        let numerator = if label.family_index() == 1 {
            GaussianRational::one()
        } else {
            let parts = literal_numerator_parts(label, ctx.aggregates_for(inst));
            let coeffs = literal_time_coefficients(degree, &t, &u);
            let mut acc = GaussianRational::zero();
            for (part, coeff) in parts.iter().zip(&coeffs) {
                acc += &part.scale_int(coeff);
            }
            acc
        };
        let scale = Rational::new(&lead * &product, denom);
        let mut value = numerator.scale(&scale);
        if ctx.mutation == Some(Mutation::LiteralBracket { label }) {
            value += &gr_int(&(lead * product));
        }
        Ok(value)
    } else {
        let agg = ctx.aggregates_for(inst).clone();
        let two = GaussianRational::from_int(2);
        let three = GaussianRational::from_int(3);
        let bracket = match label.family_index() {
            1 => GaussianRational::one(),
            2 => agg.a_p(1) + agg.c_p(1),
            3 => {
                let s = agg.a_p(1) + agg.c_p(1);
                &(agg.a_p(2) - agg.c_p(2)) + &(&s * &s)
            }
            4 => {
                let s = agg.a_p(1) + agg.c_p(1);
                let abs_diff =
                    GaussianRational::from_rational(agg.a_abs().clone() - agg.c_abs().clone());
                &abs_diff + &GaussianRational::from_rational(s.abs_squared())
            }
            5 => {
                let s = agg.a_p(1) + agg.c_p(1);
                let s_star = agg.a_star_p(1).expect("y checked above")
                    + agg.c_star_p(1).expect("y checked above");
                let star_diff = agg.a_star_pq(1, 1).expect("y checked above")
                    - agg.c_star_pq(1, 1).expect("y checked above");
                &star_diff + &(&s * &s_star)
            }
            6 => {
                let linear = agg.a_p(1) - agg.c_p(1);
                let squares = agg.a_pq(1, 2) + agg.c_pq(1, 2);
                &(&linear + &squares) + &(&two * agg.s_pq(1, 1))
            }
            7 => {
                let s = agg.a_p(1) + agg.c_p(1);
                let inner = &(&s * &s) + &(&three * &(agg.a_p(2) - agg.c_p(2)));
                &s * &inner
            }
            8 => {
                let cubes = agg.a_pq(1, 3) + agg.c_pq(1, 3);
                let inner = &(&(agg.a_pq(1, 2) - agg.c_pq(1, 2)) + agg.s_pq(1, 2)) + agg.s_pq(2, 1);
                &cubes + &(&three * &inner)
            }
            _ => unreachable!(),
        };
        let d_i64 = d.to_i64().expect("A0 - C0 out of practical range");
        let scale = pow2(d_i64 - degree as i64) * product;
        let mut value = bracket.scale(&scale);
        if ctx.mutation == Some(Mutation::LiteralBracket { label }) {
            value += &GaussianRational::from_rational(scale);
        }
        Ok(value)
    }
}

/// Total evaluator for the unrestricted labels: the printed power-of-two
/// form whenever its exponent is nonnegative, the per-coordinate moment
/// route otherwise.
pub fn rhs_unrestricted(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    rhs_unrestricted_with(label, inst, &mut EvalContext::new(None))
}

pub fn rhs_unrestricted_with(
    label: IdentityLabel,
    inst: &ProblemInstance,
    ctx: &mut EvalContext,
) -> Result<GaussianRational, EvalError> {
    assert!(
        !label.is_restricted(),
        "rhs_unrestricted expects a U label, got {label}"
    );
    inst.validate()?;
    if inst.is_zero_instance() {
        return Ok(GaussianRational::zero());
    }
    let d = BigInt::from(inst.sum_a()) - BigInt::from(inst.sum_c());
    if d >= BigInt::from(label.degree()) {
        rhs_literal_with(label, inst, ctx)
    } else {
        rhs_by_moments_with(label, inst, ctx)
    }
}

/// The weight-one sum: the leading binomial (restricted) or the power of
/// two (unrestricted), times the binomial product.
fn unit_value(inst: &ProblemInstance, domain: Domain, ctx: &mut EvalContext) -> Rational {
    if inst.is_zero_instance() {
        return Rational::zero();
    }
    let d = BigInt::from(inst.sum_a()) - BigInt::from(inst.sum_c());
    let product = ctx.binom_prod_for(inst).clone();
    match domain {
        Domain::Restricted => {
            let n = inst.n.expect("restricted unit_value requires n");
            let e = BigInt::from(n) - BigInt::from(inst.sum_c());
            Rational::from_integer(binomial(&d, &e) * product)
        }
        Domain::Unrestricted => pow2(d.to_i64().expect("A0 - C0 out of practical range")) * product,
    }
}

/// Rebuild an identity right side from elementary moments: the weight is
/// expanded into monomials over mutually unequal indices and each monomial
/// is looked up in the absorption-form (restricted) or per-coordinate
/// (unrestricted) moment closed forms. Total on every instance, including
/// the degenerate ones.
pub fn rhs_by_moments(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    rhs_by_moments_with(label, inst, &mut EvalContext::new(None))
}

pub fn rhs_by_moments_with(
    label: IdentityLabel,
    inst: &ProblemInstance,
    ctx: &mut EvalContext,
) -> Result<GaussianRational, EvalError> {
    inst.validate()?;
    check_label_domain(label, inst)?;
    if inst.is_zero_instance() {
        return Ok(GaussianRational::zero());
    }
    let domain = if label.is_restricted() {
        Domain::Restricted
    } else {
        Domain::Unrestricted
    };
    let mut acc = GaussianRational::zero();
    if matches!(label.weight_form(), WeightForm::One) {
        acc = GaussianRational::from_rational(unit_value(inst, domain, ctx));
    } else {
        for (coeff, moment_label) in weight_terms(label, inst)? {
            let value = match domain {
                Domain::Restricted => moment_restricted_with(&moment_label, inst, ctx)?.value,
                Domain::Unrestricted => moment_unrestricted_with(&moment_label, inst, ctx)?.value,
            };
            acc += &coeff.scale(&value);
        }
    }
    Ok(acc)
}

/// Evaluate the absolute-square labels by splitting the weight into real
/// and imaginary parts and running the squared-sum decomposition twice.
/// Must agree with the direct R4/U4 forms everywhere.
pub fn rhs_abs_squared(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    assert!(
        matches!(label.weight_form(), WeightForm::SumAbsSquared),
        "rhs_abs_squared expects R4 or U4, got {label}"
    );
    let squared_label = IdentityLabel::from_family(3, label.is_restricted());
    let part =
        |extract: &dyn Fn(&GaussianRational) -> Rational| -> Result<GaussianRational, EvalError> {
            let shadow = ProblemInstance {
                m: inst.m,
                n: inst.n,
                a: inst.a.clone(),
                c: inst.c.clone(),
                x: inst
                    .x
                    .iter()
                    .map(|w| GaussianRational::from_rational(extract(w)))
                    .collect(),
                y: None,
            };
            rhs_by_moments(squared_label, &shadow)
        };
    let re_part = part(&|w| w.re.clone())?;
    let im_part = part(&|w| w.im.clone())?;
    Ok(&re_part + &im_part)
}
