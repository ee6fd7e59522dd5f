//! Ground-truth evaluation of every left side by direct enumeration:
//! capped compositions of `n` for the restricted sums, and the full box
//! `0 <= k_i <= a_i` for the unrestricted ones.
//!
//! Nothing here knows about closed forms; this module must stay a
//! structurally independent check on them.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::EvalError;
use crate::exact::{GaussianRational, Rational};
use crate::instance::{Domain, IdentityLabel, MomentLabel, ProblemInstance, WeightForm};

/// Iterator over all tuples `k` with `sum k_i = n` and `0 <= k_i <= caps[i]`,
/// in ascending lexicographic order.
///
/// Prefixes are pruned: a partial assignment is never extended when the
/// remaining target exceeds the remaining caps' sum, so enumeration stays
/// proportional to the number of tuples actually yielded.
pub struct CompositionCursor {
    caps: Vec<u64>,
    /// suffix[i] = caps[i] + ... + caps[m-1]; suffix[m] = 0.
    suffix: Vec<u64>,
    target: u64,
    current: Vec<u64>,
    started: bool,
    done: bool,
}

impl CompositionCursor {
    pub fn new(n: u64, caps: &[u64]) -> Self {
        let m = caps.len();
        let mut suffix = vec![0u64; m + 1];
        for i in (0..m).rev() {
            suffix[i] = suffix[i + 1] + caps[i];
        }
        Self {
            caps: caps.to_vec(),
            suffix,
            target: n,
            current: vec![0; m],
            started: false,
            done: false,
        }
    }

    /// Fill positions `from..` with the lexicographically smallest tail
    /// summing to `rem`. Requires `rem <= suffix[from]`.
    fn fill_min(&mut self, from: usize, mut rem: u64) {
        for i in from..self.current.len() {
            let forced = rem.saturating_sub(self.suffix[i + 1]);
            self.current[i] = forced;
            rem -= forced;
        }
        debug_assert_eq!(rem, 0);
    }
}

impl Iterator for CompositionCursor {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let m = self.current.len();
        if !self.started {
            self.started = true;
            if self.target > self.suffix[0] {
                self.done = true;
                return None;
            }
            if m == 0 {
                self.done = true;
                return Some(Vec::new());
            }
            self.fill_min(0, self.target);
            return Some(self.current.clone());
        }
        if m == 0 {
            self.done = true;
            return None;
        }
        // Advance: find the rightmost position that can absorb one unit
        // from its tail, then minimize the tail again.
        let mut tail: u64 = self.current[m - 1];
        for i in (0..m.saturating_sub(1)).rev() {
            if self.current[i] < self.caps[i] && tail >= 1 {
                self.current[i] += 1;
                self.fill_min(i + 1, tail - 1);
                return Some(self.current.clone());
            }
            tail += self.current[i];
        }
        self.done = true;
        None
    }
}

/// Iterator over the full box `0 <= k_i <= caps[i]`, ascending
/// lexicographically; yields exactly `prod (caps[i] + 1)` tuples.
pub struct BoxCursor {
    caps: Vec<u64>,
    current: Vec<u64>,
    started: bool,
    done: bool,
}

impl BoxCursor {
    pub fn new(caps: &[u64]) -> Self {
        Self {
            caps: caps.to_vec(),
            current: vec![0; caps.len()],
            started: false,
            done: false,
        }
    }
}

impl Iterator for BoxCursor {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        for i in (0..self.current.len()).rev() {
            if self.current[i] < self.caps[i] {
                self.current[i] += 1;
                for slot in &mut self.current[i + 1..] {
                    *slot = 0;
                }
                return Some(self.current.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Convenience wrapper matching the summation domain of the restricted sums.
pub fn enumerate_compositions(n: u64, caps: &[u64]) -> CompositionCursor {
    CompositionCursor::new(n, caps)
}

/// Pascal-triangle memo of binomial values up to a fixed top argument.
pub struct PascalTable {
    rows: Vec<Vec<BigInt>>,
}

impl PascalTable {
    pub fn new(max_top: u64) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_top as usize + 1);
        for t in 0..=max_top as usize {
            let mut row = vec![BigInt::one(); t + 1];
            for k in 1..t {
                row[k] = &rows[t - 1][k - 1] + &rows[t - 1][k];
            }
            rows.push(row);
        }
        Self { rows }
    }

    /// C(t, k) with the usual out-of-range zero convention. `t` must be
    /// within the table.
    pub fn get(&self, t: u64, k: u64) -> BigInt {
        if k > t {
            BigInt::zero()
        } else {
            self.rows[t as usize][k as usize].clone()
        }
    }

    fn get_ref(&self, t: u64, k: u64) -> Option<&BigInt> {
        if k > t {
            None
        } else {
            Some(&self.rows[t as usize][k as usize])
        }
    }
}

/// One summation-domain tuple together with its binomial product
/// `prod C(a_i, k_i) C(k_i, c_i)` and its coordinate sum.
#[derive(Clone, Debug)]
pub struct BoxTuple {
    pub k: Vec<u64>,
    pub product: BigInt,
    pub total: u64,
}

/// All box tuples with a nonzero binomial product, lexicographically.
/// Zero-product tuples (any `k_i < c_i`) contribute nothing to any sum and
/// are dropped here.
pub fn box_tuples(a: &[u64], c: &[u64]) -> Vec<BoxTuple> {
    let max_top = a.iter().copied().max().unwrap_or(0);
    let pascal = PascalTable::new(max_top);
    let mut out = Vec::new();
    for k in BoxCursor::new(a) {
        let mut product = BigInt::one();
        let mut nonzero = true;
        for ((&ai, &ki), &ci) in a.iter().zip(&k).zip(c) {
            match (pascal.get_ref(ai, ki), pascal.get_ref(ki, ci)) {
                (Some(outer), Some(inner)) => {
                    product *= outer;
                    product *= inner;
                }
                _ => {
                    nonzero = false;
                    break;
                }
            }
        }
        if nonzero {
            let total = k.iter().sum();
            out.push(BoxTuple { k, product, total });
        }
    }
    out
}

/// Evaluate the label's weight form at one tuple.
pub fn evaluate_weight(
    label: IdentityLabel,
    k: &[u64],
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    assert_eq!(k.len(), inst.m, "tuple length must match m");
    let linear = |weights: &[GaussianRational]| -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (w, &ki) in weights.iter().zip(k) {
            acc += &w.scale_int(&BigInt::from(ki));
        }
        acc
    };
    let power_sum = |e: u32| -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (w, &ki) in inst.x.iter().zip(k) {
            acc += &w.scale_int(&BigInt::from(ki).pow(e));
        }
        acc
    };

    Ok(match label.weight_form() {
        WeightForm::One => GaussianRational::one(),
        WeightForm::Sum => linear(&inst.x),
        WeightForm::SumSquared => {
            let s = linear(&inst.x);
            &s * &s
        }
        WeightForm::SumAbsSquared => GaussianRational::from_rational(linear(&inst.x).abs_squared()),
        WeightForm::Bilinear => {
            let y = inst.y.as_ref().ok_or(EvalError::MissingY { label })?;
            &linear(&inst.x) * &linear(y)
        }
        WeightForm::SquareSum => power_sum(2),
        WeightForm::SumCubed => {
            let s = linear(&inst.x);
            &(&s * &s) * &s
        }
        WeightForm::CubeSum => power_sum(3),
    })
}

fn check_domain(label_restricted: bool, inst: &ProblemInstance) -> Result<Option<u64>, EvalError> {
    match (label_restricted, inst.n) {
        (true, Some(n)) => Ok(Some(n)),
        (true, None) => Err(EvalError::MissingN),
        (false, None) => Ok(None),
        (false, Some(n)) => Err(EvalError::UnexpectedN { n }),
    }
}

/// The ground truth: sum the binomial product times the label's weight over
/// the label's summation domain, exactly.
pub fn brute_force_lhs(
    label: IdentityLabel,
    inst: &ProblemInstance,
) -> Result<GaussianRational, EvalError> {
    inst.validate()?;
    if label.requires_y() && inst.y.is_none() {
        return Err(EvalError::MissingY { label });
    }
    let n = check_domain(label.is_restricted(), inst)?;
    let mut acc = GaussianRational::zero();
    match n {
        Some(n) => {
            let max_top = inst.a.iter().copied().max().unwrap_or(0);
            let pascal = PascalTable::new(max_top);
            for k in CompositionCursor::new(n, &inst.a) {
                let mut product = BigInt::one();
                for ((&ai, &ki), &ci) in inst.a.iter().zip(&k).zip(&inst.c) {
                    product *= pascal.get(ai, ki);
                    product *= pascal.get(ki, ci);
                }
                if product.is_zero() {
                    continue;
                }
                acc += &evaluate_weight(label, &k, inst)?.scale_int(&product);
            }
        }
        None => {
            for tuple in box_tuples(&inst.a, &inst.c) {
                acc += &evaluate_weight(label, &tuple.k, inst)?.scale_int(&tuple.product);
            }
        }
    }
    Ok(acc)
}

/// Brute-force moment sum: the binomial product times the monomial
/// `prod k_p^e` over the requested domain.
pub fn brute_force_moment(
    label: &MomentLabel,
    inst: &ProblemInstance,
    domain: Domain,
) -> Result<Rational, EvalError> {
    inst.validate()?;
    label.check(inst.m)?;
    let n = check_domain(matches!(domain, Domain::Restricted), inst)?;
    let exponents = label.exponents();
    let monomial = |k: &[u64]| -> BigInt {
        let mut v = BigInt::one();
        for &(p, e) in &exponents {
            v *= BigInt::from(k[p]).pow(e as u32);
        }
        v
    };
    let mut acc = BigInt::zero();
    match n {
        Some(n) => {
            let max_top = inst.a.iter().copied().max().unwrap_or(0);
            let pascal = PascalTable::new(max_top);
            for k in CompositionCursor::new(n, &inst.a) {
                let mut product = BigInt::one();
                for ((&ai, &ki), &ci) in inst.a.iter().zip(&k).zip(&inst.c) {
                    product *= pascal.get(ai, ki);
                    product *= pascal.get(ki, ci);
                }
                acc += product * monomial(&k);
            }
        }
        None => {
            for tuple in box_tuples(&inst.a, &inst.c) {
                acc += &tuple.product * monomial(&tuple.k);
            }
        }
    }
    Ok(Rational::from_integer(acc))
}

/// Per-coordinate tables `x_i * k^e` for `k` up to the coordinate cap, so a
/// sweep over many tuples does no repeated weight multiplication.
///
/// When every scaled entry fits comfortably in machine integers the tables
/// carry numerators scaled by the common weight denominator and the sweep
/// runs entirely in i128; otherwise it falls back to exact
/// Gaussian-rational arithmetic. Both paths produce identical values.
pub struct WeightTables {
    x: Vec<GaussianRational>,
    y: Option<Vec<GaussianRational>>,
    caps: Vec<u64>,
    scaled: Option<ScaledTables>,
}

struct ExactTables {
    xk: Vec<Vec<GaussianRational>>,
    xk2: Vec<Vec<GaussianRational>>,
    xk3: Vec<Vec<GaussianRational>>,
    yk: Option<Vec<Vec<GaussianRational>>>,
}

struct ScaledTables {
    /// (re, im) numerators of `lx * x_i * k^e`.
    xk: Vec<Vec<(i128, i128)>>,
    xk2: Vec<Vec<(i128, i128)>>,
    xk3: Vec<Vec<(i128, i128)>>,
    yk: Vec<Vec<(i128, i128)>>,
    lx: i128,
    ly: i128,
    /// Upper bound on any |t| accumulated over one tuple.
    magnitude: i128,
}

fn common_denominator(weights: &[GaussianRational]) -> Option<i128> {
    let mut lcm = BigInt::one();
    for w in weights {
        lcm = num_integer::lcm(lcm, w.re.denom().clone());
        lcm = num_integer::lcm(lcm, w.im.denom().clone());
    }
    lcm.try_into().ok()
}

fn scaled_table(
    weights: &[GaussianRational],
    caps: &[u64],
    scale: i128,
    e: u32,
) -> Option<Vec<Vec<(i128, i128)>>> {
    let scale = BigInt::from(scale);
    weights
        .iter()
        .zip(caps)
        .map(|(w, &cap)| {
            (0..=cap)
                .map(|k| {
                    let factor = BigInt::from(k).pow(e) * &scale;
                    let re: i128 = (w.re.numer() * &factor / w.re.denom()).try_into().ok()?;
                    let im: i128 = (w.im.numer() * &factor / w.im.denom()).try_into().ok()?;
                    Some((re, im))
                })
                .collect()
        })
        .collect()
}

fn table_magnitude(table: &[Vec<(i128, i128)>]) -> i128 {
    table
        .iter()
        .map(|row| {
            row.iter()
                .map(|(re, im)| re.abs().max(im.abs()))
                .max()
                .unwrap_or(0)
        })
        .sum()
}

impl WeightTables {
    pub fn build(inst: &ProblemInstance) -> Self {
        let scaled = inst.y.as_ref().and_then(|y| {
            let lx = common_denominator(&inst.x)?;
            let ly = common_denominator(y)?;
            let xk = scaled_table(&inst.x, &inst.a, lx, 1)?;
            let xk2 = scaled_table(&inst.x, &inst.a, lx, 2)?;
            let xk3 = scaled_table(&inst.x, &inst.a, lx, 3)?;
            let yk = scaled_table(y, &inst.a, ly, 1)?;
            let magnitude = table_magnitude(&xk)
                .max(table_magnitude(&xk2))
                .max(table_magnitude(&xk3))
                .max(table_magnitude(&yk))
                .max(1);
            Some(ScaledTables {
                xk,
                xk2,
                xk3,
                yk,
                lx,
                ly,
                magnitude,
            })
        });
        Self {
            x: inst.x.clone(),
            y: inst.y.clone(),
            caps: inst.a.clone(),
            scaled,
        }
    }

    fn exact_tables(&self) -> ExactTables {
        let table = |weights: &[GaussianRational], e: u32| -> Vec<Vec<GaussianRational>> {
            weights
                .iter()
                .zip(&self.caps)
                .map(|(w, &cap)| {
                    (0..=cap)
                        .map(|k| w.scale_int(&BigInt::from(k).pow(e)))
                        .collect()
                })
                .collect()
        };
        ExactTables {
            xk: table(&self.x, 1),
            xk2: table(&self.x, 2),
            xk3: table(&self.x, 3),
            yk: self.y.as_ref().map(|y| table(y, 1)),
        }
    }
}

/// All eight weight-form sums accumulated in one pass over the box tuples,
/// split by coordinate sum. Row `n` holds the restricted left sides at that
/// `n`; summing all rows gives the unrestricted left sides. Slots follow
/// the family order 1..=8.
pub fn sweep_all_weights(
    tuples: &[BoxTuple],
    tables: &WeightTables,
    num_rows: usize,
) -> Vec<[GaussianRational; 8]> {
    if let Some(scaled) = &tables.scaled {
        if let Some(rows) = sweep_scaled(tuples, scaled, num_rows) {
            return rows;
        }
    }
    sweep_exact(tuples, &tables.exact_tables(), num_rows)
}

/// Integer fast path: per-tuple sums in i128, per-row accumulators in
/// i128 pairs, one exact division by the slot denominator at the end.
/// Returns None when the precomputed magnitude bounds do not guarantee
/// overflow-free arithmetic.
fn sweep_scaled(
    tuples: &[BoxTuple],
    tables: &ScaledTables,
    num_rows: usize,
) -> Option<Vec<[GaussianRational; 8]>> {
    let products = tuples
        .iter()
        .map(|t| i128::try_from(&t.product).ok())
        .collect::<Option<Vec<i128>>>()?;
    let max_b = products.iter().copied().max().unwrap_or(1).max(1);
    // Worst term: |t|^3 * B, summed over all tuples in a row.
    let t = tables.magnitude;
    let tuple_count = tuples.len().max(1) as i128;
    let headroom = i128::MAX / 16;
    let term = t
        .checked_mul(t)?
        .checked_mul(t)?
        .checked_mul(max_b)?
        .checked_mul(tuple_count)?;
    if term > headroom {
        return None;
    }

    let mut rows: Vec<[(i128, i128); 8]> = vec![[(0, 0); 8]; num_rows];
    for (tuple, &b) in tuples.iter().zip(&products) {
        let mut t1 = (0i128, 0i128);
        let mut t1y = (0i128, 0i128);
        let mut t2 = (0i128, 0i128);
        let mut t3 = (0i128, 0i128);
        for (i, &ki) in tuple.k.iter().enumerate() {
            let ki = ki as usize;
            let add = |acc: &mut (i128, i128), v: (i128, i128)| {
                acc.0 += v.0;
                acc.1 += v.1;
            };
            add(&mut t1, tables.xk[i][ki]);
            add(&mut t1y, tables.yk[i][ki]);
            add(&mut t2, tables.xk2[i][ki]);
            add(&mut t3, tables.xk3[i][ki]);
        }
        let sq = (t1.0 * t1.0 - t1.1 * t1.1, 2 * t1.0 * t1.1);
        let cube = (sq.0 * t1.0 - sq.1 * t1.1, sq.0 * t1.1 + sq.1 * t1.0);
        let bilinear = (t1.0 * t1y.0 - t1.1 * t1y.1, t1.0 * t1y.1 + t1.1 * t1y.0);
        let abs2 = t1.0 * t1.0 + t1.1 * t1.1;
        let row = &mut rows[tuple.total as usize];
        let slots = [(1, 0), t1, sq, (abs2, 0), bilinear, t2, cube, t3];
        for (acc, term) in row.iter_mut().zip(slots) {
            acc.0 += term.0 * b;
            acc.1 += term.1 * b;
        }
    }

    let lx = tables.lx;
    let ly = tables.ly;
    let denoms: [i128; 8] = [1, lx, lx * lx, lx * lx, lx * ly, lx, lx * lx * lx, lx];
    Some(
        rows.into_iter()
            .map(|row| {
                std::array::from_fn(|slot| {
                    let (re, im) = row[slot];
                    let denom = BigInt::from(denoms[slot]);
                    GaussianRational::new(
                        Rational::new(BigInt::from(re), denom.clone()),
                        Rational::new(BigInt::from(im), denom),
                    )
                })
            })
            .collect(),
    )
}

fn sweep_exact(
    tuples: &[BoxTuple],
    tables: &ExactTables,
    num_rows: usize,
) -> Vec<[GaussianRational; 8]> {
    let yk = tables
        .yk
        .as_ref()
        .expect("sweep_all_weights requires the y weight tables");
    let mut rows: Vec<[GaussianRational; 8]> = (0..num_rows)
        .map(|_| std::array::from_fn(|_| GaussianRational::zero()))
        .collect();
    for tuple in tuples {
        let mut t1 = GaussianRational::zero();
        let mut t1y = GaussianRational::zero();
        let mut t2 = GaussianRational::zero();
        let mut t3 = GaussianRational::zero();
        for (i, &ki) in tuple.k.iter().enumerate() {
            let ki = ki as usize;
            t1 += &tables.xk[i][ki];
            t1y += &yk[i][ki];
            t2 += &tables.xk2[i][ki];
            t3 += &tables.xk3[i][ki];
        }
        let sq = &t1 * &t1;
        let row = &mut rows[tuple.total as usize];
        let b = &tuple.product;
        row[0] += &GaussianRational::from_bigint(b);
        row[1] += &t1.scale_int(b);
        row[2] += &sq.scale_int(b);
        row[3] += &GaussianRational::from_rational(t1.abs_squared() * b);
        row[4] += &(&t1 * &t1y).scale_int(b);
        row[5] += &t2.scale_int(b);
        row[6] += &(&sq * &t1).scale_int(b);
        row[7] += &t3.scale_int(b);
    }
    rows
}

/// Sum the per-`n` rows of [`sweep_all_weights`] into the box totals.
pub fn sum_rows(rows: &[[GaussianRational; 8]]) -> [GaussianRational; 8] {
    let mut totals: [GaussianRational; 8] = std::array::from_fn(|_| GaussianRational::zero());
    for row in rows {
        for (slot, value) in totals.iter_mut().zip(row) {
            *slot += value;
        }
    }
    totals
}

/// Brute-force moment sums for one monomial, split by coordinate sum as in
/// [`sweep_all_weights`].
pub fn sweep_moment(
    tuples: &[BoxTuple],
    exponents: &[(usize, u8)],
    num_rows: usize,
) -> Vec<BigInt> {
    let mut rows = vec![BigInt::zero(); num_rows];
    for tuple in tuples {
        let mut monomial = BigInt::one();
        for &(p, e) in exponents {
            monomial *= BigInt::from(tuple.k[p]).pow(e as u32);
        }
        rows[tuple.total as usize] += &tuple.product * monomial;
    }
    rows
}
