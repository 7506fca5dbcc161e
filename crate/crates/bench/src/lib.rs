//! Shared tower configurations for the benchmarks.

use normtower_core::basegroup::GroupSpec;
use normtower_core::ordinal::parse_ordinal;
use normtower_core::tower::TowerConfig;

/// base C(2), alpha = 3, G_1 = G_2 = C(2); |K| = 128.
pub fn finite_config() -> TowerConfig {
    TowerConfig::uniform(
        parse_ordinal("3").unwrap(),
        GroupSpec::CyclicFinite(2),
        GroupSpec::CyclicFinite(2),
    )
    .unwrap()
}

/// base Z, alpha = w + 1, all G = C(2).
pub fn transfinite_config() -> TowerConfig {
    TowerConfig::uniform(
        parse_ordinal("w + 1").unwrap(),
        GroupSpec::Integers,
        GroupSpec::CyclicFinite(2),
    )
    .unwrap()
}
