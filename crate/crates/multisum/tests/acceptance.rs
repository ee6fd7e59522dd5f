//! Acceptance suite: one test per acceptance criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them). Everything
//! is exact rational equality; there are no tolerances anywhere.

use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use once_cell::sync::Lazy;

use multisum::campaign::{
    enumerate_base_points, run_campaign, BasePoint, CampaignConfig, CampaignSummary,
};
use multisum::closed_form::{
    moment_restricted, moment_unrestricted, rhs_by_moments, rhs_literal, rhs_unrestricted,
    Mutation, RhsStrategy,
};
use multisum::exact::{binomial_int, GaussianRational, Rational};
use multisum::instance::{
    random_instance, GenBounds, IdentityLabel, MomentLabel, ProblemInstance, WeightKind,
};
use multisum::oracle::{box_tuples, brute_force_lhs, brute_force_moment, sweep_moment};
use multisum::EvalError;

const GRID_M_MAX: usize = 3;
const GRID_A_MAX: u64 = 4;
const GRID_WEIGHT_VECTORS: usize = 25;
const GRID_SEED: u64 = 0x5eed_cafe;

fn jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn criterion(name: &str, run: impl FnOnce() -> Result<String, String>) {
    match run() {
        Ok(detail) => println!("ACCEPTANCE {name}: PASS ({detail})"),
        Err(msg) => {
            println!("ACCEPTANCE {name}: FAIL ({msg})");
            panic!("acceptance criterion {name} failed: {msg}");
        }
    }
}

/// The shared exhaustive-grid campaign: every label, every strategy, the
/// full m <= 3, a_i <= 4, c_i <= a_i + 1 grid, all n, 25 seeded
/// Gaussian-rational weight vectors per grid point.
static GRID_RUN: Lazy<CampaignSummary> = Lazy::new(|| {
    let cfg = CampaignConfig {
        identities: IdentityLabel::ALL.to_vec(),
        m_max: GRID_M_MAX,
        a_max: GRID_A_MAX,
        weight_kind: WeightKind::Gaussian,
        seed: GRID_SEED,
        random_count: GRID_WEIGHT_VECTORS,
        strategies: vec![
            RhsStrategy::Literal,
            RhsStrategy::MomentDecomposition,
            RhsStrategy::Unrestricted,
        ],
        jobs: jobs(),
        mutation: None,
    };
    run_campaign(&cfg, None).expect("grid campaign must run")
});

/// How many literal evaluations on the grid are expected to be degenerate:
/// restricted labels whose weight degree exceeds A0 - C0 on non-zero
/// instances, for every n and weight vector.
fn expected_degenerate_literals() -> u64 {
    let mut count = 0u64;
    for base in enumerate_base_points(GRID_M_MAX, GRID_A_MAX) {
        if base.a.iter().zip(&base.c).any(|(a, c)| c > a) {
            continue;
        }
        let sum_a: u64 = base.a.iter().sum();
        let sum_c: u64 = base.c.iter().sum();
        let d = sum_a - sum_c;
        let degenerate_labels = IdentityLabel::RESTRICTED
            .iter()
            .filter(|l| l.degree() >= 1 && d < l.degree() as u64)
            .count() as u64;
        count += degenerate_labels * (sum_a + 2) * GRID_WEIGHT_VECTORS as u64;
    }
    count
}

#[test]
fn exhaustive_identity_suite() {
    criterion("exhaustive-identity-suite", || {
        let summary = &*GRID_RUN;
        if summary.mismatches != 0 {
            return Err(format!(
                "{} mismatches against the oracle",
                summary.mismatches
            ));
        }
        if summary.structural_errors != 0 {
            return Err(format!("{} structural errors", summary.structural_errors));
        }
        // 16 labels x 3 strategies minus the R labels' missing
        // "unrestricted" slot, on every record.
        if summary.records == 0 || summary.evaluations <= summary.records {
            return Err("grid produced no evaluations".into());
        }
        Ok(format!(
            "{} records, {} evaluations, exact equality throughout",
            summary.records, summary.evaluations
        ))
    });
}

#[test]
fn literal_form_suite() {
    criterion("literal-form-suite", || {
        let summary = &*GRID_RUN;
        if summary.mismatches != 0 {
            return Err(format!("{} literal mismatches", summary.mismatches));
        }
        let expected = expected_degenerate_literals();
        if summary.degenerate != expected {
            return Err(format!(
                "degenerate literal count {} does not match the {} instances where the \
                 falling-factorial denominator vanishes",
                summary.degenerate, expected
            ));
        }
        if summary.degenerate_total_ok != summary.degenerate {
            return Err(format!(
                "{} degenerate literals lacked a matching total strategy",
                summary.degenerate - summary.degenerate_total_ok
            ));
        }
        Ok(format!(
            "literal form exact on every nondegenerate instance; all {} degenerate \
             denominators raised and covered by the total strategy",
            summary.degenerate
        ))
    });
}

fn moment_labels_for(m: usize) -> Vec<MomentLabel> {
    let mut labels = Vec::new();
    for p in 0..m {
        for power in 1..=3u8 {
            labels.push(MomentLabel::Single { p, power });
        }
    }
    for p in 0..m {
        for q in 0..m {
            if p != q {
                labels.push(MomentLabel::Pair { p, q });
                labels.push(MomentLabel::PairSquared { p, q });
            }
        }
    }
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                if p != q && q != r && p != r {
                    labels.push(MomentLabel::Triple { p, q, r });
                }
            }
        }
    }
    labels
}

#[test]
fn moment_suite() {
    criterion("moment-suite", || {
        let bases = enumerate_base_points(GRID_M_MAX, GRID_A_MAX);
        let failures = Mutex::new(Vec::<String>::new());
        let checks = Mutex::new(0u64);
        let workers = jobs();
        std::thread::scope(|scope| {
            for worker in 0..workers {
                let bases = &bases;
                let failures = &failures;
                let checks = &checks;
                scope.spawn(move || {
                    let mut local_checks = 0u64;
                    for (index, base) in bases.iter().enumerate() {
                        if index % workers != worker {
                            continue;
                        }
                        let m = base.a.len();
                        let sum_a: u64 = base.a.iter().sum();
                        let rows_len = sum_a as usize + 2;
                        let tuples = box_tuples(&base.a, &base.c);
                        let ones = vec![GaussianRational::one(); m];
                        let box_inst =
                            ProblemInstance::new(base.a.clone(), base.c.clone(), ones);
                        for label in moment_labels_for(m) {
                            let rows = sweep_moment(&tuples, &label.exponents(), rows_len);
                            for n in 0..rows_len as u64 {
                                let inst = box_inst.clone().with_n(n);
                                let closed = moment_restricted(&label, &inst).unwrap().value;
                                let brute = Rational::from_integer(rows[n as usize].clone());
                                local_checks += 1;
                                if closed != brute {
                                    failures.lock().unwrap().push(format!(
                                        "restricted {label} at a={:?} c={:?} n={n}: {closed} != {brute}",
                                        base.a, base.c
                                    ));
                                }
                            }
                            let total: BigInt = rows.iter().sum();
                            let closed = moment_unrestricted(&label, &box_inst).unwrap().value;
                            local_checks += 1;
                            if closed != Rational::from_integer(total.clone()) {
                                failures.lock().unwrap().push(format!(
                                    "unrestricted {label} at a={:?} c={:?}: {closed} != {total}",
                                    base.a, base.c
                                ));
                            }
                        }
                        // permutation symmetry of the mixed moments
                        if m >= 2 {
                            let n_mid = sum_a / 2;
                            let inst = box_inst.clone().with_n(n_mid);
                            for p in 0..m {
                                for q in (p + 1)..m {
                                    let pq = MomentLabel::Pair { p, q };
                                    let qp = MomentLabel::Pair { p: q, q: p };
                                    local_checks += 1;
                                    if moment_restricted(&pq, &inst).unwrap().value
                                        != moment_restricted(&qp, &inst).unwrap().value
                                    {
                                        failures
                                            .lock()
                                            .unwrap()
                                            .push(format!("pair symmetry broken at {pq}"));
                                    }
                                }
                            }
                        }
                        if m >= 3 {
                            let n_mid = sum_a / 2;
                            let inst = box_inst.clone().with_n(n_mid);
                            let reference_r =
                                moment_restricted(&MomentLabel::Triple { p: 0, q: 1, r: 2 }, &inst)
                                    .unwrap()
                                    .value;
                            let reference_u = moment_unrestricted(
                                &MomentLabel::Triple { p: 0, q: 1, r: 2 },
                                &box_inst,
                            )
                            .unwrap()
                            .value;
                            for (p, q, r) in
                                [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
                            {
                                let label = MomentLabel::Triple { p, q, r };
                                local_checks += 2;
                                if moment_restricted(&label, &inst).unwrap().value != reference_r
                                    || moment_unrestricted(&label, &box_inst).unwrap().value
                                        != reference_u
                                {
                                    failures
                                        .lock()
                                        .unwrap()
                                        .push(format!("triple symmetry broken at {label}"));
                                }
                            }
                        }
                        // spot-check the batched enumeration against the
                        // one-shot brute force on a sample of shapes
                        if index % 97 == 0 {
                            let label = MomentLabel::Single {
                                p: m - 1,
                                power: 2,
                            };
                            let inst = box_inst.clone().with_n(sum_a / 2 + 1);
                            let direct = brute_force_moment(
                                &label,
                                &inst,
                                multisum::instance::Domain::Restricted,
                            )
                            .unwrap();
                            local_checks += 1;
                            if moment_restricted(&label, &inst).unwrap().value != direct {
                                failures
                                    .lock()
                                    .unwrap()
                                    .push("spot brute-force check failed".into());
                            }
                        }
                    }
                    *checks.lock().unwrap() += local_checks;
                });
            }
        });
        let failures = failures.into_inner().unwrap();
        if let Some(first) = failures.first() {
            return Err(format!("{} failures, first: {first}", failures.len()));
        }
        Ok(format!(
            "all 12 moment closed forms equal their brute-force sums ({} checks, \
             permutation symmetry included)",
            checks.into_inner().unwrap()
        ))
    });
}

#[test]
fn cross_identity_consistency() {
    criterion("cross-identity-consistency", || {
        let bounds = GenBounds {
            m_max: 3,
            a_max: 4,
            weight_kind: WeightKind::Gaussian,
        };

        // R3 = R5 with y = x and R4 = R5 with y = conj(x).
        let mut square_cases = 0u64;
        let mut conj_cases = 0u64;
        for seed in 0..120u64 {
            let inst = random_instance(seed, &bounds);
            let with_x = inst.clone().with_y(inst.x.clone());
            let r5 = rhs_by_moments(IdentityLabel::R5, &with_x).unwrap();
            let r3 = rhs_by_moments(IdentityLabel::R3, &inst).unwrap();
            if r5 != r3 {
                return Err(format!("R5 with y = x diverged from R3 at seed {seed}"));
            }
            if r5 != brute_force_lhs(IdentityLabel::R5, &with_x).unwrap() {
                return Err(format!("R5 oracle mismatch at seed {seed}"));
            }
            square_cases += 1;

            let with_conj = inst
                .clone()
                .with_y(inst.x.iter().map(|w| w.conj()).collect());
            let r5c = rhs_by_moments(IdentityLabel::R5, &with_conj).unwrap();
            let r4 = rhs_by_moments(IdentityLabel::R4, &inst).unwrap();
            if r5c != r4 {
                return Err(format!(
                    "R5 with y = conj(x) diverged from R4 at seed {seed}"
                ));
            }
            conj_cases += 1;

            // Unrestricted counterparts of the square reduction.
            let u_inst = inst.clone().without_n();
            let u_with_x = with_x.clone().without_n();
            if rhs_by_moments(IdentityLabel::U5, &u_with_x).unwrap()
                != rhs_by_moments(IdentityLabel::U3, &u_inst).unwrap()
            {
                return Err(format!("U5 with y = x diverged from U3 at seed {seed}"));
            }
        }

        // sum over n of the restricted closed forms equals the
        // unrestricted closed form, family by family.
        let mut sum_cases = 0u64;
        for seed in 0..140u64 {
            let inst = random_instance(seed * 31 + 7, &bounds);
            let box_inst = inst.clone().without_n();
            for family in 1..=8 {
                let r_label = IdentityLabel::from_family(family, true);
                let u_label = IdentityLabel::from_family(family, false);
                let mut total = GaussianRational::zero();
                for n in 0..=inst.sum_a() {
                    total += &rhs_by_moments(r_label, &inst.clone().with_n(n)).unwrap();
                }
                let unrestricted = rhs_unrestricted(u_label, &box_inst).unwrap();
                if total != unrestricted {
                    return Err(format!(
                        "sum over n of {r_label} differs from {u_label} at seed {seed}"
                    ));
                }
            }
            sum_cases += 1;
        }

        let all_c_zero = check_all_c_zero_reduction()?;
        let two_param = check_two_parameter_reduction()?;

        if square_cases < 100 || conj_cases < 100 || sum_cases < 100 {
            return Err("fewer than 100 instances per consistency family".into());
        }
        Ok(format!(
            "y=x and y=conj(x) reductions x{square_cases}, n-sums x{sum_cases}, \
             c=0 reduction x{all_c_zero}, two-parameter reduction x{two_param}"
        ))
    });
}

/// With every c_i = 0 the C aggregates vanish and the closed forms of the
/// weight-1, linear and absolute-square identities lose their C terms;
/// verified by evaluating the reduced expressions independently.
fn check_all_c_zero_reduction() -> Result<u64, String> {
    let bounds = GenBounds {
        m_max: 3,
        a_max: 4,
        weight_kind: WeightKind::Gaussian,
    };
    let mut cases = 0u64;
    let mut seed = 0u64;
    while cases < 110 {
        seed += 1;
        if seed > 4000 {
            return Err("could not assemble enough c = 0 instances".into());
        }
        let mut inst = random_instance(seed, &bounds);
        inst.c.iter_mut().for_each(|c| *c = 0);
        let sum_a = inst.sum_a();
        if sum_a < 2 {
            continue;
        }
        let n = inst.n.unwrap().min(sum_a);
        inst.n = Some(n);

        let agg = inst.aggregates();
        for p in 0..=3 {
            for q in 1..=3 {
                if !agg.c_pq(p, q).is_zero() {
                    return Err("a C aggregate failed to vanish with all c = 0".into());
                }
            }
        }
        if !agg.c_abs().is_zero() {
            return Err("C_abs failed to vanish".into());
        }

        let lead = binomial_int(sum_a, n as i64);
        let nn = BigInt::from(n);
        let a0 = BigInt::from(sum_a);

        // reduced weight-1 form: C(A0, n)
        let reduced_r1 = GaussianRational::from_bigint(&lead);
        if rhs_literal(IdentityLabel::R1, &inst).unwrap() != reduced_r1 {
            return Err(format!("c=0 reduction of R1 failed at seed {seed}"));
        }

        // reduced linear form: C(A0, n) * n * A1 / A0
        let reduced_r2 = agg.a_p(1).scale(&Rational::new(&lead * &nn, a0.clone()));
        if rhs_literal(IdentityLabel::R2, &inst).unwrap() != reduced_r2 {
            return Err(format!("c=0 reduction of R2 failed at seed {seed}"));
        }

        // reduced absolute-square form:
        // C(A0, n) * n * [(n-1)|A1|^2 + (A0-n) A_abs] / (A0 (A0-1))
        let inner = agg.a_p(1).abs_squared() * (&nn - 1) + agg.a_abs() * (&a0 - &nn);
        let reduced_r4 = Rational::new(&lead * &nn, &a0 * (&a0 - 1)) * inner;
        if rhs_literal(IdentityLabel::R4, &inst).unwrap()
            != GaussianRational::from_rational(reduced_r4)
        {
            return Err(format!("c=0 reduction of R4 failed at seed {seed}"));
        }
        if rhs_literal(IdentityLabel::R1, &inst).unwrap()
            != brute_force_lhs(IdentityLabel::R1, &inst).unwrap()
        {
            return Err(format!("c=0 oracle mismatch at seed {seed}"));
        }
        cases += 1;
    }
    Ok(cases)
}

/// With weights (1, 0, ..., 0) the linear, squared and cubed identities
/// collapse onto the single-index moments, so they depend on the instance
/// only through (a_1, c_1, A0, C0, n). Checked two ways: against the
/// moment closed forms, and on paired instances that share those data but
/// split the padding coordinate differently.
fn check_two_parameter_reduction() -> Result<u64, String> {
    let mut cases = 0u64;
    let mut rng_seed = 0u64;
    while cases < 110 {
        rng_seed += 1;
        if rng_seed > 4000 {
            return Err("could not assemble enough two-parameter pairs".into());
        }
        let probe = random_instance(
            rng_seed,
            &GenBounds {
                m_max: 2,
                a_max: 4,
                weight_kind: WeightKind::Rational,
            },
        );
        if probe.m != 2 {
            continue;
        }
        let (a1, c1, a2, c2) = (probe.a[0], probe.c[0], probe.a[1], probe.c[1]);
        if c1 > a1 || c2 > a2 || a2 == 0 {
            continue;
        }
        let n = probe.n.unwrap();

        let one = GaussianRational::one();
        let zero = GaussianRational::zero();
        let pair =
            ProblemInstance::new(vec![a1, a2], vec![c1, c2], vec![one.clone(), zero.clone()])
                .with_n(n);

        // (a) collapse onto the single-index moments
        for (family, power) in [(2usize, 1u8), (3, 2), (7, 3)] {
            let label = IdentityLabel::from_family(family, true);
            let value = rhs_by_moments(label, &pair).unwrap();
            let moment = moment_restricted(&MomentLabel::Single { p: 0, power }, &pair)
                .unwrap()
                .value;
            if value != GaussianRational::from_rational(moment) {
                return Err(format!(
                    "{label} with x = (1, 0) did not collapse to the k^{power} moment \
                     (a=({a1},{a2}) c=({c1},{c2}) n={n})"
                ));
            }
        }

        // (b) paired instances: split the padding coordinate, preserving
        // (a_1, c_1, A0, C0, n); values match after removing the padding
        // binomial products.
        let split = a2.div_ceil(2);
        let t = c2.min(split);
        let triple = ProblemInstance::new(
            vec![a1, split, a2 - split],
            vec![c1, t, c2 - t],
            vec![one.clone(), zero.clone(), zero.clone()],
        )
        .with_n(n);
        let pair_pad = binomial_int(a2, c2 as i64);
        let triple_pad = binomial_int(split, t as i64) * binomial_int(a2 - split, (c2 - t) as i64);
        if pair_pad.is_zero() || triple_pad.is_zero() {
            continue;
        }
        for family in [2usize, 3, 7] {
            let label = IdentityLabel::from_family(family, true);
            let v_pair = rhs_by_moments(label, &pair).unwrap();
            let v_triple = rhs_by_moments(label, &triple).unwrap();
            if v_pair.scale_int(&triple_pad) != v_triple.scale_int(&pair_pad) {
                return Err(format!(
                    "two-parameter invariance broken for {label} at \
                     a=({a1},{a2}) c=({c1},{c2}) n={n}"
                ));
            }
        }
        cases += 1;
    }
    Ok(cases)
}

#[test]
fn residue_selftest_suite() {
    criterion("residue-selftest", || {
        let started = Instant::now();
        let report = multisum::residue::selftest(32, None);
        let elapsed = started.elapsed();
        for suite in &report.suites {
            if !suite.passed {
                return Err(format!("suite {} failed: {}", suite.name, suite.detail));
            }
        }
        if elapsed.as_secs() >= 10 {
            return Err(format!("selftest took {elapsed:?}, budget is 10 s"));
        }
        Ok(format!(
            "{} suites exact in {elapsed:?}",
            report.suites.len()
        ))
    });
}

#[test]
fn falsifiability() {
    criterion("falsifiability", || {
        let mut detected = 0usize;
        for mutation in Mutation::catalog() {
            let caught = match mutation {
                Mutation::GeometricCoefficient { .. } => {
                    !multisum::residue::selftest(8, Some(&mutation)).all_passed()
                }
                _ => {
                    let cfg = CampaignConfig {
                        identities: IdentityLabel::ALL.to_vec(),
                        m_max: 3,
                        a_max: 2,
                        weight_kind: WeightKind::Gaussian,
                        seed: 7,
                        random_count: 1,
                        strategies: vec![
                            RhsStrategy::Literal,
                            RhsStrategy::MomentDecomposition,
                            RhsStrategy::Unrestricted,
                        ],
                        jobs: jobs(),
                        mutation: Some(mutation),
                    };
                    let summary = run_campaign(&cfg, None).map_err(|e| e.to_string())?;
                    summary.mismatches >= 1 && !summary.is_success()
                }
            };
            if !caught {
                return Err(format!("mutation {mutation} went undetected"));
            }
            detected += 1;
        }
        Ok(format!(
            "every one of the {detected} single-coefficient corruptions produced \
             mismatches and a failing exit status"
        ))
    });
}

#[test]
fn determinism() {
    criterion("determinism", || {
        let cfg = CampaignConfig {
            identities: IdentityLabel::ALL.to_vec(),
            m_max: 2,
            a_max: 2,
            weight_kind: WeightKind::Gaussian,
            seed: 0xD00D,
            random_count: 3,
            strategies: vec![
                RhsStrategy::Literal,
                RhsStrategy::MomentDecomposition,
                RhsStrategy::Unrestricted,
            ],
            jobs: jobs(),
            mutation: None,
        };
        let run = |jobs: usize| -> Result<(CampaignSummary, Vec<String>), String> {
            let cfg = CampaignConfig {
                jobs,
                ..cfg.clone()
            };
            let mut buffer = Vec::new();
            let summary = run_campaign(&cfg, Some(&mut buffer)).map_err(|e| e.to_string())?;
            let text = String::from_utf8(buffer).map_err(|e| e.to_string())?;
            let normalized = text
                .lines()
                .map(|line| {
                    let mut v: serde_json::Value = serde_json::from_str(line)
                        .map_err(|e| format!("unparseable record line: {e}"))?;
                    if let Some(obj) = v.as_object_mut() {
                        obj.remove("elapsed_us");
                        obj.remove("elapsed_ms");
                    }
                    Ok(v.to_string())
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok((summary, normalized))
        };
        let (summary_a, report_a) = run(1)?;
        let (summary_b, report_b) = run(jobs())?;
        if summary_a != summary_b {
            return Err("summaries differ between identical runs".into());
        }
        if report_a != report_b {
            return Err("record streams differ modulo timing fields".into());
        }
        let (_, report_c) = run(jobs())?;
        if report_b != report_c {
            return Err("repeated run is not reproducible".into());
        }
        Ok(format!(
            "byte-identical reports modulo timing fields across {} records and \
             different worker counts",
            report_a.len() - 1
        ))
    });
}

/// The frozen worked examples, re-checked here so the acceptance
/// binary also guards the documented expected values end to end.
#[test]
fn frozen_examples_hold() {
    criterion("frozen-examples", || {
        let one = GaussianRational::one;
        let r1 = ProblemInstance::new(vec![2, 1], vec![1, 0], vec![one(), one()]).with_n(2);
        if brute_force_lhs(IdentityLabel::R1, &r1).unwrap() != GaussianRational::from_int(4)
            || rhs_literal(IdentityLabel::R1, &r1).unwrap() != GaussianRational::from_int(4)
        {
            return Err("R1 frozen example failed".into());
        }
        let u1 = ProblemInstance::new(vec![2], vec![1], vec![one()]);
        if rhs_unrestricted(IdentityLabel::U1, &u1).unwrap() != GaussianRational::from_int(4) {
            return Err("U1 frozen example failed".into());
        }
        let zero_inst = ProblemInstance::new(vec![2], vec![3], vec![one()]).with_n(1);
        if !brute_force_lhs(IdentityLabel::R1, &zero_inst)
            .unwrap()
            .is_zero()
        {
            return Err("zero-instance example failed".into());
        }
        let thin = ProblemInstance::new(vec![3], vec![2], vec![one()]).with_n(2);
        match rhs_literal(IdentityLabel::R3, &thin) {
            Err(EvalError::DegenerateDenominator { degree: 2, .. }) => {}
            other => return Err(format!("expected a degenerate denominator, got {other:?}")),
        }
        let label = IdentityLabel::from_str("R7")?;
        let r7 = ProblemInstance::new(vec![3], vec![0], vec![one()]).with_n(2);
        if rhs_by_moments(label, &r7).unwrap() != GaussianRational::from_int(24) {
            return Err("R7 frozen example failed".into());
        }
        Ok("documented frozen values intact".into())
    });
}

#[test]
fn base_point_enumeration_is_exhaustive() {
    criterion("grid-enumeration", || {
        // Independent count: sum over m of prod over coordinates of
        // (a_max + 1) choices for a and (a_i + 2) for c.
        let bases = enumerate_base_points(GRID_M_MAX, GRID_A_MAX);
        let mut expected = 0u64;
        for m in 1..=GRID_M_MAX as u32 {
            // sum over a vectors of prod (a_i + 2) = (sum_{a<=A}(a+2))^m
            let per_coord: u64 = (0..=GRID_A_MAX).map(|a| a + 2).sum();
            expected += per_coord.pow(m);
        }
        if bases.len() as u64 != expected {
            return Err(format!(
                "grid has {} shapes, expected {expected}",
                bases.len()
            ));
        }
        let mut sorted: Vec<&BasePoint> = bases.iter().collect();
        sorted.dedup_by(|a, b| a == b);
        if sorted.len() != bases.len() {
            return Err("grid contains duplicate shapes".into());
        }
        Ok(format!("{} distinct (a, c) shapes", bases.len()))
    });
}
