//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them). The exhaustive criteria compare the
//! brute-force oracle against the fast decision procedures on fully finite
//! towers; the symbolic criteria run the seeded randomized property suite on
//! a transfinite tower that no enumeration can reach.

use normtower_core::basegroup::GroupSpec;
use normtower_core::oracle::{run_oracle_suite, OracleMode, OracleOptions};
use normtower_core::ordinal::{parse_ordinal, random_ordinal, Classification, Ordinal};
use normtower_core::report::build_report;
use normtower_core::suite::{run_suite, SuiteOptions};
use normtower_core::tower::{Interval, TowerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn ord(s: &str) -> Ordinal {
    parse_ordinal(s).unwrap()
}

fn c(n: u64) -> GroupSpec {
    GroupSpec::CyclicFinite(n)
}

/// base C(2), alpha = 3, G_1 = G_2 = C(2); |K| = 128.
fn config_a() -> TowerConfig {
    TowerConfig::uniform(ord("3"), c(2), c(2)).unwrap()
}

/// base C(2), alpha = 3, G_1 = C(3), G_2 = C(2); |K| = 1152.
fn config_b() -> TowerConfig {
    TowerConfig::new(
        ord("3"),
        c(2),
        vec![
            Interval {
                lo: ord("1"),
                hi: ord("2"),
                group: c(3),
            },
            Interval {
                lo: ord("2"),
                hi: ord("3"),
                group: c(2),
            },
        ],
    )
    .unwrap()
}

/// base C(2), alpha = 4, all G = C(2); |K| = 32768.
fn config_c() -> TowerConfig {
    TowerConfig::uniform(ord("4"), c(2), c(2)).unwrap()
}

/// base Z, alpha = w + 1, all G = C(2).
fn config_d() -> TowerConfig {
    TowerConfig::uniform(ord("w + 1"), GroupSpec::Integers, c(2)).unwrap()
}

fn criterion(name: &str, budget: Duration, f: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) => {
            if elapsed > budget {
                println!("acceptance {name}: FAIL — exceeded {budget:?} (took {elapsed:?})");
                panic!("{name} exceeded its runtime budget: {elapsed:?} > {budget:?}");
            }
            println!("acceptance {name}: PASS — {detail} ({elapsed:.2?})");
        }
        Err(why) => {
            println!("acceptance {name}: FAIL — {why}");
            panic!("{name} failed: {why}");
        }
    }
}

#[test]
fn criterion_1_exhaustive_oracle_config_a() {
    criterion(
        "criterion 1 (exhaustive oracle, config A)",
        Duration::from_secs(10),
        || {
            let report = run_oracle_suite(
                &config_a(),
                &OracleOptions {
                    mode: OracleMode::Exhaustive,
                    ..OracleOptions::default()
                },
            )
            .map_err(|e| e.to_string())?;
            if report.k_order != 128 {
                return Err(format!("|K| = {}, expected 128", report.k_order));
            }
            let b1 = &report.per_beta[0];
            let b2 = &report.per_beta[1];
            // N_K(H_1) must equal the fast H_2 set exactly, with 64 elements
            if !b1.normalizer_match || b1.normalizer_size != Some(64) {
                return Err(format!(
                    "N_K(H_1): match={} size={:?} (expected exact match, 64): {:?}",
                    b1.normalizer_match, b1.normalizer_size, b1.mismatch_examples
                ));
            }
            if !b2.normalizer_match || b2.normalizer_size != Some(128) {
                return Err(format!(
                    "N_K(H_2): match={} size={:?} (expected exact match, 128)",
                    b2.normalizer_match, b2.normalizer_size
                ));
            }
            for b in [b1, b2] {
                if !b.quotient_iso || b.quotient_cosets != 2 {
                    return Err(format!(
                        "quotient at beta={} not C(2): cosets={} iso={}",
                        b.beta, b.quotient_cosets, b.quotient_iso
                    ));
                }
                if b.h_size != b.h_size_expected {
                    return Err(format!(
                        "|H_{}| = {} but closed form gives {}",
                        b.beta, b.h_size, b.h_size_expected
                    ));
                }
            }
            if !report.mul_check.failures.is_empty() {
                return Err(format!(
                    "mul cross-check failed: {:?}",
                    report.mul_check.failures
                ));
            }
            Ok(format!(
                "N(H_1) = H_2 (64 of 128), N(H_2) = K, quotients C(2); mul check {} pairs",
                report.mul_check.pairs
            ))
        },
    );
}

#[test]
fn criterion_2_exhaustive_oracle_config_b() {
    criterion(
        "criterion 2 (exhaustive oracle, config B)",
        Duration::from_secs(60),
        || {
            let report = run_oracle_suite(
                &config_b(),
                &OracleOptions {
                    mode: OracleMode::Exhaustive,
                    ..OracleOptions::default()
                },
            )
            .map_err(|e| e.to_string())?;
            if report.k_order != 1152 {
                return Err(format!("|K| = {}, expected 1152", report.k_order));
            }
            let b1 = &report.per_beta[0];
            let b2 = &report.per_beta[1];
            if !b1.normalizer_match || b1.normalizer_size != Some(576) {
                return Err(format!(
                    "N_K(H_1): match={} size={:?} (expected exact match, 576): {:?}",
                    b1.normalizer_match, b1.normalizer_size, b1.mismatch_examples
                ));
            }
            if !b2.normalizer_match || b2.normalizer_size != Some(1152) {
                return Err(format!(
                    "N_K(H_2): match={} size={:?} (expected exact match, 1152)",
                    b2.normalizer_match, b2.normalizer_size
                ));
            }
            if !b1.quotient_iso || b1.quotient_cosets != 3 {
                return Err(format!(
                    "H_2/H_1 not C(3): cosets={} iso={}",
                    b1.quotient_cosets, b1.quotient_iso
                ));
            }
            if !b2.quotient_iso || b2.quotient_cosets != 2 {
                return Err(format!(
                    "H_3/H_2 not C(2): cosets={} iso={}",
                    b2.quotient_cosets, b2.quotient_iso
                ));
            }
            for b in [b1, b2] {
                if b.h_size != b.h_size_expected {
                    return Err(format!(
                        "|H_{}| = {} but closed form gives {}",
                        b.beta, b.h_size, b.h_size_expected
                    ));
                }
            }
            if !report.mul_check.failures.is_empty() {
                return Err(format!(
                    "mul cross-check failed: {:?}",
                    report.mul_check.failures
                ));
            }
            Ok("N(H_1) = H_2 (576 of 1152), N(H_2) = K, quotients C(3) then C(2)".to_string())
        },
    );
}

#[test]
fn criterion_3_sampled_oracle_config_c() {
    criterion(
        "criterion 3 (sampled oracle, config C)",
        Duration::from_secs(120),
        || {
            let report = run_oracle_suite(
                &config_c(),
                &OracleOptions {
                    mode: OracleMode::Sampled {
                        seed: 42,
                        iterations: 10_000,
                    },
                    ..OracleOptions::default()
                },
            )
            .map_err(|e| e.to_string())?;
            if report.k_order != 32768 {
                return Err(format!("|K| = {}, expected 32768", report.k_order));
            }
            if report.per_beta.len() != 3 {
                return Err(format!(
                    "expected betas 1..=3, got {}",
                    report.per_beta.len()
                ));
            }
            let mut witnesses = 0;
            for b in &report.per_beta {
                if !b.normalizer_match {
                    return Err(format!(
                        "sampled conjugation/witness checks failed at beta={}: {:?}",
                        b.beta, b.mismatch_examples
                    ));
                }
                if b.sampled_pairs != Some(10_000) {
                    return Err(format!("beta={}: expected 10^4 sampled pairs", b.beta));
                }
                if b.h_size != b.h_size_expected {
                    return Err(format!(
                        "|H_{}| = {} but closed form gives {}",
                        b.beta, b.h_size, b.h_size_expected
                    ));
                }
                witnesses += b.witnesses_verified.unwrap_or(0);
            }
            if witnesses == 0 {
                return Err("no non-normalizing elements were sampled".to_string());
            }
            Ok(format!(
                "3 x 10^4 sampled conjugation checks clean, {witnesses} witness records verified"
            ))
        },
    );
}

#[test]
fn criterion_4_symbolic_transfinite_suite_config_d() {
    criterion(
        "criterion 4 (symbolic suite, config D)",
        Duration::from_secs(60),
        || {
            let cfg = config_d();
            let opts = SuiteOptions {
                seed: 42,
                iterations: 10_000,
                ..SuiteOptions::default()
            };
            let summary = run_suite(&cfg, &opts).map_err(|e| e.to_string())?;
            if !summary.is_clean() {
                let examples: Vec<_> = summary
                    .properties
                    .iter()
                    .flat_map(|p| p.failures.iter().cloned())
                    .take(3)
                    .collect();
                return Err(format!(
                    "{} failures out of {} properties x 10^4 iterations: {examples:?}",
                    summary.failure_count(),
                    summary.properties.len()
                ));
            }
            // seed reproducibility on a shorter run
            let small = SuiteOptions {
                iterations: 1000,
                ..opts.clone()
            };
            let s1 = run_suite(&cfg, &small).map_err(|e| e.to_string())?;
            let s2 = run_suite(&cfg, &small).map_err(|e| e.to_string())?;
            if s1 != s2 {
                return Err("identical seeds produced different summaries".to_string());
            }
            Ok(format!(
                "{} properties x 10^4 iterations clean at alpha = w + 1; seed-reproducible",
                summary.properties.len()
            ))
        },
    );
}

#[test]
fn criterion_5_strict_growth_reports() {
    criterion(
        "criterion 5 (strict growth, configs A/B/D)",
        Duration::from_secs(30),
        || {
            let mut details = Vec::new();
            for (name, cfg) in [("A", config_a()), ("B", config_b()), ("D", config_d())] {
                let report = build_report(&cfg, 3).map_err(|e| e.to_string())?;
                if !report.length_is_alpha {
                    let bad: Vec<_> = report
                        .rows
                        .iter()
                        .filter(|r| !r.strict)
                        .map(|r| r.beta.clone())
                        .collect();
                    return Err(format!("config {name}: growth not strict at {bad:?}"));
                }
                for row in &report.rows {
                    if !(row.in_next && row.outside_current && row.quotient_roundtrip) {
                        return Err(format!(
                            "config {name}, beta={}: witness checks {} {} {}",
                            row.beta, row.in_next, row.outside_current, row.quotient_roundtrip
                        ));
                    }
                }
                details.push(format!("{name}: {} probes strict", report.rows.len()));
            }
            Ok(details.join("; "))
        },
    );
}

#[test]
fn criterion_6_ordinal_suite() {
    criterion(
        "criterion 6 (ordinal suite)",
        Duration::from_secs(5),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut limit_cases = 0u64;
            for i in 0..10_000u64 {
                let a = random_ordinal(&mut rng, 2);
                let b = random_ordinal(&mut rng, 2);
                let c = random_ordinal(&mut rng, 2);
                // trichotomy
                let flags = u8::from(a < b) + u8::from(a == b) + u8::from(a > b);
                if flags != 1 {
                    return Err(format!("trichotomy broken at iteration {i}: {a} vs {b}"));
                }
                // transitivity along the sorted triple
                let mut v = [a.clone(), b.clone(), c.clone()];
                v.sort();
                if !(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]) {
                    return Err(format!("transitivity broken at iteration {i}"));
                }
                // associativity of addition
                if a.add(&b).add(&c) != a.add(&b.add(&c)) {
                    return Err(format!(
                        "add not associative at iteration {i}: ({a}) + ({b}) + ({c})"
                    ));
                }
                // classify/successor coherence
                if a.succ().classify() != Classification::Successor(a.clone()) {
                    return Err(format!("succ/classify incoherent at iteration {i}: {a}"));
                }
                // fundamental sequence monotonicity on limit samples
                if a.is_limit() {
                    limit_cases += 1;
                    let n = i % 63;
                    let lo = a.fundamental_sequence(n).map_err(|e| e.to_string())?;
                    let hi = a.fundamental_sequence(n + 1).map_err(|e| e.to_string())?;
                    if !(lo < hi && hi < a) {
                        return Err(format!(
                            "fundamental sequence not monotone at iteration {i}: {a}[{n}]"
                        ));
                    }
                }
            }
            if limit_cases < 1000 {
                return Err(format!("only {limit_cases} limit ordinals sampled"));
            }
            Ok(format!(
                "10^4 random CNF triples clean ({limit_cases} limit cases)"
            ))
        },
    );
}
