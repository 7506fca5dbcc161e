//! Symbolic engine for transfinitely iterated wreath-product towers.
//!
//! The crate constructs the groups `K_beta` obtained by iterating the wreath
//! product `K_{beta+1} = K_beta wr G_beta` along an ordinal index set,
//! together with the subgroup chain `H_beta` whose successive normalizers
//! climb the tower one level at a time. It provides:
//!
//! * [`ordinal`] — Cantor-normal-form arithmetic below epsilon-zero,
//! * [`basegroup`] — the concrete groups usable as the base `K_1` and as the
//!   acting groups `G_beta`,
//! * [`tower`] — sparse recursive elements of `K` and the wreath arithmetic,
//! * [`normtheory`] — membership in `H_beta`, the normalizer decision with
//!   constructive counterexamples, and the quotient maps onto `G_beta`,
//! * [`oracle`] — exhaustive brute-force verification on fully finite towers,
//! * [`suite`] — seeded randomized property suites for the symbolic side,
//! * [`report`] — strict-growth reports along a probe set of levels.

pub mod basegroup;
pub mod error;
pub mod normtheory;
pub mod oracle;
pub mod ordinal;
pub mod report;
mod scan;
pub mod suite;
pub mod tower;

pub use basegroup::{BaseElement, GroupSpec};
pub use error::{Error, Result};
pub use normtheory::{MembershipTrace, WitnessRecord};
pub use ordinal::{Classification, Ordinal};
pub use tower::{TowerConfig, TowerElement};
