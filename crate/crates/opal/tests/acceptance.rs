//! The acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Every test runs the same named check the `report all`
//! command uses, so the command line and this suite cannot drift apart.
//!
//! Tolerances: none of these checks carry numeric tolerances; every
//! comparison is exact integer or byte equality, and the randomized
//! round-trip check is pinned to a fixed seed.

use opal::report::{Report, Status};

fn gate(criterion: &str, r: Report) {
    let verdict = if r.status == Status::Pass { "PASS" } else { "FAIL" };
    println!("acceptance [{criterion}]: {verdict} ({} ms)", r.wall_time_ms);
    assert_eq!(
        r.status,
        Status::Pass,
        "{criterion} failed; witnesses: {}",
        serde_json::to_string_pretty(&r.witnesses).unwrap_or_default()
    );
}

#[test]
fn criterion_01_worked_composition_is_byte_exact() {
    gate("worked composition", opal::report::check_worked_composition());
}

#[test]
fn criterion_02_idempotent_systems_verify() {
    gate("idempotent systems", opal::report::check_idempotent_systems());
}

#[test]
fn criterion_03_hom_count_identity_holds() {
    gate("hom-count identity", opal::report::check_hom_count_identity());
}

#[test]
fn criterion_04_roundtrips_are_unimodular() {
    gate("equivalence round-trips", opal::report::check_doldkan_roundtrips());
}

#[test]
fn criterion_05_admissible_counts_match() {
    gate("admissible counts", opal::report::check_admissible_counts());
}

#[test]
fn criterion_06_presentations_from_fixtures_certify() {
    gate("presentation fixtures", opal::report::check_presentation_fixtures());
}

#[test]
fn criterion_07_reduction_ranks_and_invariant_factors() {
    gate("reduction ranks", opal::report::check_reduction_ranks());
}

#[test]
fn criterion_08_monoid_group_comparison() {
    gate("monoid vs group comparison", opal::report::check_mon_gr_comparison());
}

#[test]
fn criterion_09_two_path_truncation_agrees() {
    gate("two-path truncation", opal::report::check_two_path_truncation());
}

#[test]
fn criterion_10_quadratic_forms_certify() {
    gate("quadratic forms", opal::report::check_quadratic_forms());
}
