//! Run a verification campaign over an exhaustive grid of shapes crossed
//! with seeded random weight vectors, then prove the harness can fail by
//! corrupting one closed-form coefficient.
//!
//!     cargo run --release --example exhaustive_sweep

use multisum::campaign::{run_campaign, CampaignConfig};
use multisum::closed_form::Mutation;

fn main() {
    let cfg = CampaignConfig {
        m_max: 2,
        a_max: 3,
        random_count: 10,
        seed: 2024,
        jobs: std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
        ..CampaignConfig::default()
    };

    let summary = run_campaign(&cfg, None).expect("config is valid");
    println!(
        "clean run: {} records, {} evaluations, {} mismatches, {} degenerate literals",
        summary.records, summary.evaluations, summary.mismatches, summary.degenerate
    );
    assert!(summary.is_success());

    // The same grid with a corrupted absorption-layer coefficient must
    // report mismatches; a verifier that cannot fail verifies nothing.
    let corrupted = CampaignConfig {
        mutation: Some("m2.j1".parse::<Mutation>().unwrap()),
        ..cfg
    };
    let summary = run_campaign(&corrupted, None).expect("config is valid");
    println!(
        "with --mutate m2.j1: {} mismatches out of {} evaluations",
        summary.mismatches, summary.evaluations
    );
    assert!(!summary.is_success());
}
