//! Strict-growth reports: for a probe set of level indices the report
//! exhibits one element of `H_{beta+1}` outside `H_beta` per probe, so the
//! chain grows strictly at every probed step and the group-level length of
//! the chain is exactly `alpha`.

use crate::basegroup::first_non_identity;
use crate::error::Result;
use crate::normtheory::{member_h_bool, quotient, quotient_section};
use crate::ordinal::{Classification, Ordinal};
use crate::tower::{TowerConfig, TowerElement};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub beta: Ordinal,
    pub group: String,
    /// `quotient_section(beta, g0)` for the first non-identity `g0` of `G_beta`.
    pub witness: String,
    /// Witness lies in `H_{beta+1}`.
    pub in_next: bool,
    /// Witness lies outside `H_beta`.
    pub outside_current: bool,
    /// The quotient map sends the witness back to `g0`.
    pub quotient_roundtrip: bool,
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub alpha: Ordinal,
    pub probes: usize,
    pub rows: Vec<ReportRow>,
    /// Every probed step grew strictly.
    pub length_is_alpha: bool,
}

/// Probe indices in `[1, alpha)`, ascending: every predecessor on the way
/// down from `alpha`, descending through `per_limit` fundamental-sequence
/// entries at each limit. For finite `alpha` this is all of `1..alpha`; for
/// `alpha = w + 1` with `per_limit = 3` it is `{1, 2, 3, w}`.
pub fn probe_set(cfg: &TowerConfig, per_limit: u64) -> Vec<Ordinal> {
    let mut out = Vec::new();
    let mut cur = cfg.alpha().clone();
    loop {
        match cur.classify() {
            Classification::Zero => break,
            Classification::Successor(p) => cur = p,
            Classification::Limit => {
                for n in 1..per_limit {
                    let probe = cur.fundamental_sequence(n).expect("limit ordinal");
                    if !probe.is_zero() && !out.contains(&probe) {
                        out.push(probe);
                    }
                }
                cur = cur.fundamental_sequence(per_limit).expect("limit ordinal");
            }
        }
        if cur.is_zero() {
            break;
        }
        if !out.contains(&cur) {
            out.push(cur.clone());
        }
    }
    out.sort();
    out
}

/// Builds the strict-growth report over [`probe_set`].
pub fn build_report(cfg: &TowerConfig, per_limit: u64) -> Result<TowerReport> {
    let probes = probe_set(cfg, per_limit);
    let mut rows = Vec::with_capacity(probes.len());
    for beta in &probes {
        let spec = cfg.group_at(beta)?;
        let g0 = first_non_identity(spec);
        let witness: TowerElement = quotient_section(cfg, beta, &g0)?;
        let in_next = member_h_bool(cfg, &beta.succ(), &witness)?;
        let outside_current = !member_h_bool(cfg, beta, &witness)?;
        let quotient_roundtrip = quotient(cfg, beta, &witness)? == g0;
        rows.push(ReportRow {
            beta: beta.clone(),
            group: spec.to_string(),
            witness: cfg.format_element(&witness),
            in_next,
            outside_current,
            quotient_roundtrip,
            strict: in_next && outside_current && quotient_roundtrip,
        });
    }
    let length_is_alpha = rows.iter().all(|r| r.strict);
    Ok(TowerReport {
        alpha: cfg.alpha().clone(),
        probes: rows.len(),
        rows,
        length_is_alpha,
    })
}
