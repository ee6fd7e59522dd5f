//! Verification campaigns: exhaustive grids of (a, c) shapes crossed with
//! seeded random weight vectors, evaluated oracle-vs-closed-form with a
//! worker pool, streaming line-delimited records merged in deterministic
//! grid order.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::mpsc;
use std::time::Instant;

use serde::Serialize;

use crate::batch::RestrictedBatch;
use crate::closed_form::{
    rhs_by_moments_with, rhs_literal_with, rhs_unrestricted_with, EvalContext, Mutation,
    RhsStrategy,
};
use crate::error::EvalError;
use crate::exact::GaussianRational;
use crate::instance::{mix_seed, random_weights, IdentityLabel, ProblemInstance, WeightKind};
use crate::oracle::{box_tuples, brute_force_lhs, sum_rows, sweep_all_weights, WeightTables};

/// Everything a verification campaign needs. The grid enumerates all `a`
/// vectors with entries `<= a_max` for each `m <= m_max`, all `c` with
/// `c_i <= a_i + 1`, all `n` in `[0, sum a + 1]` for restricted labels,
/// crossed with `random_count` seeded weight vectors per grid point.
#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub identities: Vec<IdentityLabel>,
    pub m_max: usize,
    pub a_max: u64,
    pub weight_kind: WeightKind,
    pub seed: u64,
    pub random_count: usize,
    pub strategies: Vec<RhsStrategy>,
    pub jobs: usize,
    pub mutation: Option<Mutation>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            identities: IdentityLabel::ALL.to_vec(),
            m_max: 2,
            a_max: 3,
            weight_kind: WeightKind::Gaussian,
            seed: 0,
            random_count: 5,
            strategies: vec![
                RhsStrategy::Literal,
                RhsStrategy::MomentDecomposition,
                RhsStrategy::Unrestricted,
            ],
            jobs: 1,
            mutation: None,
        }
    }
}

#[derive(thiserror::Error, Debug)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of one strategy on one (identity, instance) pair.
#[derive(Clone, Debug, Serialize)]
pub struct StrategyOutcome {
    pub strategy: RhsStrategy,
    pub value: Option<GaussianRational>,
    /// None when the strategy was not defined on this instance.
    pub matched: Option<bool>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One line of the report stream.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub identity: IdentityLabel,
    pub instance: ProblemInstance,
    pub lhs: GaussianRational,
    pub rhs: Vec<StrategyOutcome>,
    pub elapsed_us: u64,
}

/// Aggregate counts over a campaign. The process exit status contract is
/// [`CampaignSummary::is_success`]: no mismatches and no structural
/// errors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CampaignSummary {
    pub records: u64,
    pub evaluations: u64,
    pub passes: u64,
    pub mismatches: u64,
    pub degenerate: u64,
    /// Degenerate literal evaluations whose moment-strategy sibling still
    /// matched the oracle.
    pub degenerate_total_ok: u64,
    pub structural_errors: u64,
}

impl CampaignSummary {
    pub fn is_success(&self) -> bool {
        self.mismatches == 0 && self.structural_errors == 0
    }

    fn absorb(&mut self, other: &CampaignSummary) {
        self.records += other.records;
        self.evaluations += other.evaluations;
        self.passes += other.passes;
        self.mismatches += other.mismatches;
        self.degenerate += other.degenerate;
        self.degenerate_total_ok += other.degenerate_total_ok;
        self.structural_errors += other.structural_errors;
    }
}

/// One (a, c) shape of the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint {
    pub a: Vec<u64>,
    pub c: Vec<u64>,
}

/// Enumerate the grid shapes in deterministic order: m ascending, `a`
/// lexicographic, `c` lexicographic with `c_i <= a_i + 1`.
pub fn enumerate_base_points(m_max: usize, a_max: u64) -> Vec<BasePoint> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        let a_caps = vec![a_max; m];
        for a in crate::oracle::BoxCursor::new(&a_caps) {
            let c_caps: Vec<u64> = a.iter().map(|&ai| ai + 1).collect();
            for c in crate::oracle::BoxCursor::new(&c_caps) {
                out.push(BasePoint { a: a.clone(), c });
            }
        }
    }
    out
}

fn validate_config(cfg: &CampaignConfig) -> Result<(), CampaignError> {
    if cfg.identities.is_empty() {
        return Err(CampaignError::Config("identity set is empty".into()));
    }
    if cfg.strategies.is_empty() {
        return Err(CampaignError::Config("strategy set is empty".into()));
    }
    if cfg.m_max < 1 {
        return Err(CampaignError::Config("m_max must be at least 1".into()));
    }
    if cfg.random_count < 1 {
        return Err(CampaignError::Config(
            "random_count must be at least 1".into(),
        ));
    }
    if cfg.jobs < 1 {
        return Err(CampaignError::Config("jobs must be at least 1".into()));
    }
    Ok(())
}

struct UnitOutput {
    lines: Option<Vec<String>>,
    summary: CampaignSummary,
}

fn normalized_labels(cfg: &CampaignConfig) -> (Vec<IdentityLabel>, Vec<IdentityLabel>) {
    let mut labels = cfg.identities.clone();
    labels.sort();
    labels.dedup();
    let restricted = labels
        .iter()
        .copied()
        .filter(|l| l.is_restricted())
        .collect();
    let unrestricted = labels
        .iter()
        .copied()
        .filter(|l| !l.is_restricted())
        .collect();
    (restricted, unrestricted)
}

fn outcome_for(
    strategy: RhsStrategy,
    result: Result<GaussianRational, EvalError>,
    lhs: &GaussianRational,
    summary: &mut CampaignSummary,
) -> StrategyOutcome {
    summary.evaluations += 1;
    match result {
        Ok(value) => {
            let matched = &value == lhs;
            if matched {
                summary.passes += 1;
            } else {
                summary.mismatches += 1;
            }
            StrategyOutcome {
                strategy,
                value: Some(value),
                matched: Some(matched),
                degenerate: false,
                error: None,
            }
        }
        Err(e) if e.is_degenerate() => {
            summary.degenerate += 1;
            StrategyOutcome {
                strategy,
                value: None,
                matched: None,
                degenerate: true,
                error: None,
            }
        }
        Err(e) => {
            summary.structural_errors += 1;
            StrategyOutcome {
                strategy,
                value: None,
                matched: None,
                degenerate: false,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Count a degenerate literal as benign when the total strategy in the
/// same record matched the oracle.
fn settle_degenerates(outcomes: &[StrategyOutcome], summary: &mut CampaignSummary) {
    let any_degenerate = outcomes.iter().any(|o| o.degenerate);
    if !any_degenerate {
        return;
    }
    let total_ok = outcomes
        .iter()
        .any(|o| o.strategy != RhsStrategy::Literal && o.matched == Some(true));
    if total_ok {
        summary.degenerate_total_ok += outcomes.iter().filter(|o| o.degenerate).count() as u64;
    }
}

fn process_base(
    cfg: &CampaignConfig,
    base_index: usize,
    base: &BasePoint,
    restricted: &[IdentityLabel],
    unrestricted: &[IdentityLabel],
    emit: bool,
) -> UnitOutput {
    let m = base.a.len();
    let sum_a: u64 = base.a.iter().sum();
    let rows_len = sum_a as usize + 2;
    let tuples = box_tuples(&base.a, &base.c);
    let mut ctx = EvalContext::new(cfg.mutation);
    let mut summary = CampaignSummary::default();
    let mut lines = if emit { Some(Vec::new()) } else { None };
    let mut records: Vec<VerificationRecord> = Vec::new();
    // The shifted leading binomials depend only on the shape; built once.
    let mut leads_by_n: Option<Vec<[num_bigint::BigInt; 4]>> = None;

    let use_literal = cfg.strategies.contains(&RhsStrategy::Literal);
    let use_moment = cfg.strategies.contains(&RhsStrategy::MomentDecomposition);
    let use_unrestricted = cfg.strategies.contains(&RhsStrategy::Unrestricted);

    for weight_idx in 0..cfg.random_count {
        let started = Instant::now();
        let pair_seed = mix_seed(
            cfg.seed,
            (base_index * cfg.random_count + weight_idx) as u64,
        );
        let x = random_weights(pair_seed, m, cfg.weight_kind);
        let y = random_weights(mix_seed(pair_seed, 1), m, cfg.weight_kind);
        let box_inst = ProblemInstance {
            m,
            n: None,
            a: base.a.clone(),
            c: base.c.clone(),
            x,
            y: Some(y),
        };
        ctx.clear_for_weights();
        let tables = WeightTables::build(&box_inst);
        let rows = sweep_all_weights(&tuples, &tables, rows_len);
        records.clear();

        if !restricted.is_empty() {
            let batch = RestrictedBatch::new(&box_inst, restricted, cfg.mutation)
                .expect("campaign instances are structurally valid");
            let leads = leads_by_n
                .get_or_insert_with(|| (0..rows_len as u64).map(|n| batch.leads(n)).collect());
            for n in 0..rows_len as u64 {
                for &label in restricted {
                    let lhs = &rows[n as usize][label.family_index() - 1];
                    let mut outcomes = Vec::new();
                    if use_literal {
                        let r = batch.literal(label, n, &leads[n as usize]);
                        outcomes.push(outcome_for(RhsStrategy::Literal, r, lhs, &mut summary));
                    }
                    if use_moment {
                        let r = batch.moments(label, &leads[n as usize]);
                        outcomes.push(outcome_for(
                            RhsStrategy::MomentDecomposition,
                            r,
                            lhs,
                            &mut summary,
                        ));
                    }
                    settle_degenerates(&outcomes, &mut summary);
                    summary.records += 1;
                    if emit {
                        records.push(VerificationRecord {
                            identity: label,
                            instance: box_inst.clone().with_n(n),
                            lhs: lhs.clone(),
                            rhs: outcomes,
                            elapsed_us: 0,
                        });
                    }
                }
            }
        }

        if !unrestricted.is_empty() {
            let totals = sum_rows(&rows);
            for &label in unrestricted {
                let lhs = &totals[label.family_index() - 1];
                let mut outcomes = Vec::new();
                if use_literal {
                    let r = rhs_literal_with(label, &box_inst, &mut ctx);
                    outcomes.push(outcome_for(RhsStrategy::Literal, r, lhs, &mut summary));
                }
                if use_moment {
                    let r = rhs_by_moments_with(label, &box_inst, &mut ctx);
                    outcomes.push(outcome_for(
                        RhsStrategy::MomentDecomposition,
                        r,
                        lhs,
                        &mut summary,
                    ));
                }
                if use_unrestricted {
                    let r = rhs_unrestricted_with(label, &box_inst, &mut ctx);
                    outcomes.push(outcome_for(RhsStrategy::Unrestricted, r, lhs, &mut summary));
                }
                settle_degenerates(&outcomes, &mut summary);
                summary.records += 1;
                if emit {
                    records.push(VerificationRecord {
                        identity: label,
                        instance: box_inst.clone(),
                        lhs: lhs.clone(),
                        rhs: outcomes,
                        elapsed_us: 0,
                    });
                }
            }
        }

        if let Some(lines) = lines.as_mut() {
            let elapsed = started.elapsed().as_micros() as u64;
            let share = elapsed / (records.len().max(1) as u64);
            for record in records.iter_mut() {
                record.elapsed_us = share;
            }
            for record in records.iter() {
                lines.push(serde_json::to_string(record).expect("record serialization"));
            }
        }
    }

    UnitOutput { lines, summary }
}

/// Run a campaign. Records go to `out` (when given) as one JSON document
/// per line in deterministic grid order, followed by a summary line; the
/// summary is also returned. Grid points are distributed over
/// `cfg.jobs` workers and merged back in order regardless of completion
/// order.
pub fn run_campaign(
    cfg: &CampaignConfig,
    mut out: Option<&mut dyn Write>,
) -> Result<CampaignSummary, CampaignError> {
    validate_config(cfg)?;
    let bases = enumerate_base_points(cfg.m_max, cfg.a_max);
    let (restricted, unrestricted) = normalized_labels(cfg);
    let emit = out.is_some();
    let jobs = cfg.jobs.min(bases.len().max(1));
    let started = Instant::now();

    let mut summary = CampaignSummary::default();
    let mut write_error: Option<std::io::Error> = None;
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<(usize, UnitOutput)>(jobs * 4);
        for worker in 0..jobs {
            let tx = tx.clone();
            let bases = &bases;
            let restricted = &restricted;
            let unrestricted = &unrestricted;
            scope.spawn(move || {
                for index in (worker..bases.len()).step_by(jobs) {
                    let unit =
                        process_base(cfg, index, &bases[index], restricted, unrestricted, emit);
                    if tx.send((index, unit)).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);

        let mut pending: BTreeMap<usize, UnitOutput> = BTreeMap::new();
        let mut next = 0usize;
        for (index, unit) in rx {
            pending.insert(index, unit);
            while let Some(unit) = pending.remove(&next) {
                summary.absorb(&unit.summary);
                if let (Some(out), Some(lines)) = (out.as_mut(), unit.lines) {
                    if write_error.is_none() {
                        for line in lines {
                            if let Err(e) = writeln!(out, "{line}") {
                                write_error = Some(e);
                                break;
                            }
                        }
                    }
                }
                next += 1;
            }
        }
        debug_assert!(pending.is_empty());
    });
    if let Some(e) = write_error {
        return Err(CampaignError::Io(e));
    }

    if let Some(out) = out.as_mut() {
        #[derive(Serialize)]
        struct SummaryLine<'a> {
            summary: &'a CampaignSummary,
            elapsed_ms: u128,
        }
        let line = serde_json::to_string(&SummaryLine {
            summary: &summary,
            elapsed_ms: started.elapsed().as_millis(),
        })
        .expect("summary serialization");
        writeln!(out, "{line}").map_err(CampaignError::Io)?;
    }
    Ok(summary)
}

/// Aggregate values of an instance rendered for inspection, in the order
/// the identities consume them.
pub fn aggregate_listing(inst: &ProblemInstance) -> Vec<(String, String)> {
    let agg = inst.aggregates();
    let mut rows: Vec<(String, String)> = Vec::new();
    for p in 0..=3u32 {
        rows.push((format!("A_{p}"), agg.a_p(p).to_string()));
    }
    rows.push(("A_{1,2}".into(), agg.a_pq(1, 2).to_string()));
    rows.push(("A_{1,3}".into(), agg.a_pq(1, 3).to_string()));
    for p in 0..=3u32 {
        rows.push((format!("C_{p}"), agg.c_p(p).to_string()));
    }
    rows.push(("C_{1,2}".into(), agg.c_pq(1, 2).to_string()));
    rows.push(("C_{1,3}".into(), agg.c_pq(1, 3).to_string()));
    if inst.y.is_some() {
        rows.push(("A*_1".into(), agg.a_star_p(1).unwrap().to_string()));
        rows.push(("A*_{1,1}".into(), agg.a_star_pq(1, 1).unwrap().to_string()));
        rows.push(("C*_1".into(), agg.c_star_p(1).unwrap().to_string()));
        rows.push(("C*_{1,1}".into(), agg.c_star_pq(1, 1).unwrap().to_string()));
    }
    rows.push((
        "A_abs".into(),
        crate::exact::rational_to_string(agg.a_abs()),
    ));
    rows.push((
        "C_abs".into(),
        crate::exact::rational_to_string(agg.c_abs()),
    ));
    rows.push(("S_{1,1}".into(), agg.s_pq(1, 1).to_string()));
    rows.push(("S_{1,2}".into(), agg.s_pq(1, 2).to_string()));
    rows.push(("S_{2,1}".into(), agg.s_pq(2, 1).to_string()));
    rows
}

/// Full evaluation of a single (instance, identity) pair: the brute-force
/// left side, every applicable strategy, and the aggregate statistics.
#[derive(Clone, Debug)]
pub struct SingleEvaluation {
    pub label: IdentityLabel,
    pub lhs: GaussianRational,
    pub outcomes: Vec<StrategyOutcome>,
    pub zero_instance: bool,
    pub aggregates: Vec<(String, String)>,
}

impl SingleEvaluation {
    pub fn all_matched(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.matched == Some(true) || o.degenerate)
    }
}

/// Evaluate one instance under one identity with every applicable
/// strategy. Structural problems surface as errors; a degenerate literal
/// form is reported in the outcomes rather than failing the call.
pub fn eval_single(
    inst: &ProblemInstance,
    label: IdentityLabel,
) -> Result<SingleEvaluation, EvalError> {
    let report = inst.validate()?;
    let lhs = brute_force_lhs(label, inst)?;
    let mut summary = CampaignSummary::default();
    let mut outcomes = Vec::new();
    let mut ctx = EvalContext::new(None);
    outcomes.push(outcome_for(
        RhsStrategy::Literal,
        rhs_literal_with(label, inst, &mut ctx),
        &lhs,
        &mut summary,
    ));
    outcomes.push(outcome_for(
        RhsStrategy::MomentDecomposition,
        rhs_by_moments_with(label, inst, &mut ctx),
        &lhs,
        &mut summary,
    ));
    if !label.is_restricted() {
        outcomes.push(outcome_for(
            RhsStrategy::Unrestricted,
            rhs_unrestricted_with(label, inst, &mut ctx),
            &lhs,
            &mut summary,
        ));
    }
    Ok(SingleEvaluation {
        label,
        lhs,
        outcomes,
        zero_instance: report.zero_instance,
        aggregates: aggregate_listing(inst),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            m_max: 2,
            a_max: 2,
            random_count: 2,
            seed: 0xA5A5,
            ..CampaignConfig::default()
        }
    }

    fn normalize_report(report: &str) -> Vec<Value> {
        report
            .lines()
            .map(|line| {
                let mut v: Value = serde_json::from_str(line).expect("line parses as JSON");
                if let Some(obj) = v.as_object_mut() {
                    obj.remove("elapsed_us");
                    obj.remove("elapsed_ms");
                }
                v
            })
            .collect()
    }

    #[test]
    fn base_point_count() {
        // m = 1: sum_{a<=2}(a+2) = 9; m = 2: 81.
        assert_eq!(enumerate_base_points(2, 2).len(), 9 + 81);
    }

    #[test]
    fn clean_campaign_passes_and_is_deterministic() {
        let cfg = small_config();
        let mut report_a = Vec::new();
        let summary_a = run_campaign(&cfg, Some(&mut report_a)).unwrap();
        assert!(summary_a.is_success(), "{summary_a:?}");
        assert!(summary_a.mismatches == 0 && summary_a.records > 0);
        assert!(
            summary_a.degenerate > 0,
            "grid must include degenerate literals"
        );
        assert_eq!(summary_a.degenerate, summary_a.degenerate_total_ok);

        let mut report_b = Vec::new();
        let summary_b = run_campaign(&cfg, Some(&mut report_b)).unwrap();
        assert_eq!(summary_a, summary_b);
        let a = String::from_utf8(report_a).unwrap();
        let b = String::from_utf8(report_b).unwrap();
        assert_eq!(normalize_report(&a), normalize_report(&b));
    }

    #[test]
    fn worker_count_does_not_change_the_report() {
        let cfg = small_config();
        let mut single = Vec::new();
        run_campaign(&cfg, Some(&mut single)).unwrap();
        let parallel_cfg = CampaignConfig { jobs: 3, ..cfg };
        let mut parallel = Vec::new();
        run_campaign(&parallel_cfg, Some(&mut parallel)).unwrap();
        assert_eq!(
            normalize_report(&String::from_utf8(single).unwrap()),
            normalize_report(&String::from_utf8(parallel).unwrap())
        );
    }

    #[test]
    fn records_parse_line_by_line() {
        let cfg = CampaignConfig {
            m_max: 1,
            a_max: 1,
            random_count: 1,
            ..CampaignConfig::default()
        };
        let mut report = Vec::new();
        let summary = run_campaign(&cfg, Some(&mut report)).unwrap();
        let text = String::from_utf8(report).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len() as u64, summary.records + 1);
        for line in &lines[..lines.len() - 1] {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v.get("identity").is_some());
            assert!(v.get("lhs").is_some());
        }
        let last: Value = serde_json::from_str(lines.last().unwrap()).unwrap();
        assert!(last.get("summary").is_some());
    }

    #[test]
    fn mutation_produces_mismatches() {
        let cfg = CampaignConfig {
            mutation: Some(Mutation::RestrictedLayer {
                shape: crate::closed_form::MomentShape::Single1,
                layer: 0,
            }),
            ..small_config()
        };
        let summary = run_campaign(&cfg, None).unwrap();
        assert!(summary.mismatches > 0);
        assert!(!summary.is_success());
    }

    #[test]
    fn config_validation() {
        let cfg = CampaignConfig {
            identities: vec![],
            ..CampaignConfig::default()
        };
        assert!(matches!(
            run_campaign(&cfg, None),
            Err(CampaignError::Config(_))
        ));
        let cfg = CampaignConfig {
            random_count: 0,
            ..CampaignConfig::default()
        };
        assert!(run_campaign(&cfg, None).is_err());
    }

    #[test]
    fn eval_single_reports_all_strategies() {
        use crate::exact::rational_from_str;
        let inst = ProblemInstance::new(
            vec![2, 1],
            vec![1, 0],
            vec![
                GaussianRational::from_int(1),
                GaussianRational::from_rational(rational_from_str("1").unwrap()),
            ],
        )
        .with_n(2);
        let eval = eval_single(&inst, IdentityLabel::R1).unwrap();
        assert_eq!(eval.lhs, GaussianRational::from_int(4));
        assert!(eval.all_matched());
        assert!(!eval.zero_instance);
        assert!(eval.aggregates.iter().any(|(name, _)| name == "A_0"));

        let zero = ProblemInstance::new(vec![2], vec![3], vec![GaussianRational::from_int(1)]);
        let eval = eval_single(&zero, IdentityLabel::U1).unwrap();
        assert!(eval.zero_instance);
        assert!(eval.lhs.is_zero());
        assert!(eval.all_matched());
    }
}
