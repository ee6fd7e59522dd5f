//! Batched right-side evaluation for sweeps: for a fixed (a, c) shape and
//! weight vector, every restricted closed form is a short linear
//! combination of the shifted leading binomials `C(A0-C0-j, n-C0-j)`, so
//! the n-independent parts are assembled once and each n costs only a few
//! integer scalings. Values are identical to the reference evaluators in
//! `closed_form`; the unit tests hold the two paths together.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::closed_form::{
    absorption_layers_mutated, literal_numerator_parts, literal_time_coefficients, weight_terms,
    Mutation,
};
use crate::error::EvalError;
use crate::exact::{binomial, falling_factorial, GaussianRational, Rational};
use crate::instance::{IdentityLabel, ProblemInstance};

enum LiteralState {
    Degenerate(EvalError),
    Ready {
        degree: u32,
        parts: Vec<GaussianRational>,
        denom: BigInt,
    },
}

/// Per-(shape, weights) assembly of the restricted closed forms.
pub(crate) struct RestrictedBatch {
    zero: bool,
    d: BigInt,
    c0: BigInt,
    product: BigInt,
    mutation: Option<Mutation>,
    literal: Vec<Option<LiteralState>>,
    combos: Vec<Option<[GaussianRational; 4]>>,
}

impl RestrictedBatch {
    /// `inst` is the box-shaped instance (weights set, `n` irrelevant);
    /// `labels` are the restricted labels that will be queried.
    pub fn new(
        inst: &ProblemInstance,
        labels: &[IdentityLabel],
        mutation: Option<Mutation>,
    ) -> Result<Self, EvalError> {
        inst.validate()?;
        let zero = inst.is_zero_instance();
        let d = BigInt::from(inst.sum_a()) - BigInt::from(inst.sum_c());
        let c0 = BigInt::from(inst.sum_c());
        let mut batch = Self {
            zero,
            d,
            c0,
            product: BigInt::one(),
            mutation,
            literal: (0..8).map(|_| None).collect(),
            combos: (0..8).map(|_| None).collect(),
        };
        if zero {
            return Ok(batch);
        }
        for (&a, &c) in inst.a.iter().zip(&inst.c) {
            batch.product *= binomial(&BigInt::from(a), &BigInt::from(c));
        }
        let agg = inst.aggregates();
        for &label in labels {
            assert!(label.is_restricted(), "RestrictedBatch expects R labels");
            if label.requires_y() && inst.y.is_none() {
                return Err(EvalError::MissingY { label });
            }
            let slot = label.family_index() - 1;

            let degree = label.degree();
            let denom = falling_factorial(&batch.d, degree);
            batch.literal[slot] = Some(if degree > 0 && denom.is_zero() {
                LiteralState::Degenerate(EvalError::DegenerateDenominator {
                    difference: batch.d.clone(),
                    degree,
                })
            } else {
                LiteralState::Ready {
                    degree,
                    parts: if label.family_index() == 1 {
                        Vec::new()
                    } else {
                        literal_numerator_parts(label, &agg)
                    },
                    denom,
                }
            });

            let mut combo: [GaussianRational; 4] =
                std::array::from_fn(|_| GaussianRational::zero());
            if label.family_index() == 1 {
                combo[0] = GaussianRational::one();
            } else {
                for (coeff, moment_label) in weight_terms(label, inst)? {
                    let (layers, _) =
                        absorption_layers_mutated(&moment_label, inst, mutation.as_ref());
                    for (j, layer) in layers.iter().enumerate() {
                        if !layer.is_zero() {
                            combo[j] += &coeff.scale_int(layer);
                        }
                    }
                }
            }
            batch.combos[slot] = Some(combo);
        }
        Ok(batch)
    }

    /// The shifted leading binomials `C(A0-C0-j, n-C0-j)` for j = 0..=3,
    /// zero where the top would be negative. Depends only on the (a, c)
    /// shape and `n`, so callers can share it across weight vectors.
    pub fn leads(&self, n: u64) -> [BigInt; 4] {
        std::array::from_fn(|j| {
            let top = &self.d - j as u64;
            if top.is_negative() {
                BigInt::zero()
            } else {
                binomial(&top, &(BigInt::from(n) - &self.c0 - j as u64))
            }
        })
    }

    /// The printed closed form at one `n`; identical to
    /// [`crate::closed_form::rhs_literal`].
    pub fn literal(
        &self,
        label: IdentityLabel,
        n: u64,
        leads: &[BigInt; 4],
    ) -> Result<GaussianRational, EvalError> {
        if self.zero {
            return Ok(GaussianRational::zero());
        }
        let state = self.literal[label.family_index() - 1]
            .as_ref()
            .expect("label was not registered with this batch");
        match state {
            LiteralState::Degenerate(e) => Err(e.clone()),
            LiteralState::Ready {
                degree,
                parts,
                denom,
            } => {
                let numerator = if parts.is_empty() {
                    GaussianRational::one()
                } else {
                    let t = BigInt::from(n) - &self.c0;
                    let u = &self.d - &t;
                    let coeffs = literal_time_coefficients(*degree, &t, &u);
                    let mut acc = GaussianRational::zero();
                    for (part, coeff) in parts.iter().zip(&coeffs) {
                        if !coeff.is_zero() {
                            acc += &part.scale_int(coeff);
                        }
                    }
                    acc
                };
                let lead_product = &leads[0] * &self.product;
                let mut value =
                    numerator.scale(&Rational::new(lead_product.clone(), denom.clone()));
                if self.mutation == Some(Mutation::LiteralBracket { label }) {
                    value += &GaussianRational::from_bigint(&lead_product);
                }
                Ok(value)
            }
        }
    }

    /// The moment-decomposition value at one `n`; identical to
    /// [`crate::closed_form::rhs_by_moments`].
    pub fn moments(
        &self,
        label: IdentityLabel,
        leads: &[BigInt; 4],
    ) -> Result<GaussianRational, EvalError> {
        if self.zero {
            return Ok(GaussianRational::zero());
        }
        let combo = self.combos[label.family_index() - 1]
            .as_ref()
            .expect("label was not registered with this batch");
        let mut acc = GaussianRational::zero();
        for (w, lead) in combo.iter().zip(leads) {
            if !lead.is_zero() && !w.is_zero() {
                acc += &w.scale_int(lead);
            }
        }
        Ok(acc.scale_int(&self.product))
    }
}

/// Convenience wrapper used by tests: evaluate through the batch path the
/// way the campaign does.
#[cfg(test)]
fn batch_pair(
    inst: &ProblemInstance,
    label: IdentityLabel,
    n: u64,
    mutation: Option<Mutation>,
) -> (
    Result<GaussianRational, EvalError>,
    Result<GaussianRational, EvalError>,
) {
    let batch = RestrictedBatch::new(&inst.clone().without_n(), &[label], mutation).unwrap();
    let leads = batch.leads(n);
    (
        batch.literal(label, n, &leads),
        batch.moments(label, &leads),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{rhs_by_moments_with, rhs_literal_with, EvalContext};
    use crate::instance::{random_instance, GenBounds};

    #[test]
    fn batch_matches_reference_evaluators() {
        let mutations: Vec<Option<Mutation>> = std::iter::once(None)
            .chain(Mutation::catalog().into_iter().map(Some))
            .collect();
        for seed in 0..8u64 {
            let inst = random_instance(seed, &GenBounds::default());
            for mutation in &mutations {
                for label in IdentityLabel::RESTRICTED {
                    for n in 0..=inst.sum_a() + 1 {
                        let shaped = inst.clone().with_n(n);
                        let mut ctx = EvalContext::new(*mutation);
                        let (lit, mom) = batch_pair(&shaped, label, n, *mutation);
                        let ref_lit = rhs_literal_with(label, &shaped, &mut ctx);
                        match (lit, ref_lit) {
                            (Ok(a), Ok(b)) => assert_eq!(a, b, "literal seed={seed} {label} n={n}"),
                            (Err(a), Err(b)) => assert_eq!(a, b),
                            (a, b) => panic!("literal divergence: {a:?} vs {b:?}"),
                        }
                        let ref_mom = rhs_by_moments_with(label, &shaped, &mut ctx).unwrap();
                        assert_eq!(mom.unwrap(), ref_mom, "moments seed={seed} {label} n={n}");
                    }
                }
            }
        }
    }
}
