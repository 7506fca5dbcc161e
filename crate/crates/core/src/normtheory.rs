//! Decision procedures for the subgroup chain `H_beta` inside the tower
//! group `K`:
//!
//! * membership in `H_beta = K_beta^{G_beta} (+) sum of L_gamma, beta < gamma < alpha`,
//!   decided by structural recursion with an auditable trace,
//! * the normalizer decision `x in N_K(H_beta) <=> x in H_{beta+1}`, with a
//!   constructive counterexample when it fails: an `l in H_beta` whose
//!   conjugate under `x` leaves `H_beta`,
//! * the union property at limit indices, and
//! * the quotient map `H_{beta+1} -> G_beta` with its section.
//!
//! Here `L_gamma` is the subgroup of `K_gamma^{G_gamma}` of functions that
//! vanish at the identity point. The membership recursion rests on the
//! decomposition `H_beta ∩ K_{delta+1} = (H_beta ∩ K_delta) (+) L_delta` for
//! `delta > beta`: off-identity support is always absorbed by `L_delta`, so
//! only the identity-point child needs inspection. That makes the decision
//! linear in the nesting depth.

use crate::basegroup::{first_non_identity, g_identity, BaseElement};
use crate::error::{Error, Result};
use crate::ordinal::{Classification, Ordinal};
use crate::tower::{TowerConfig, TowerElement};
use serde::Serialize;
use std::collections::BTreeMap;

/// One rule application in the membership recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceRule {
    /// The element's level is at most `beta`, so it lies in `K_beta`.
    AtOrBelowBeta,
    /// Identity `g` part above `beta`; descend to the identity-point child.
    StripIdentityWrapper,
    /// Non-identity `g` part at a node index `>= beta`: not a member.
    GPartNontrivial,
    /// Identity `g` part at node index exactly `beta`: inside `K_beta^{G_beta}`.
    CoreInKbetaPower,
}

impl std::fmt::Display for TraceRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TraceRule::AtOrBelowBeta => "at-or-below-beta",
            TraceRule::StripIdentityWrapper => "strip-identity-wrapper",
            TraceRule::GPartNontrivial => "g-part-nontrivial",
            TraceRule::CoreInKbetaPower => "core-in-k-beta-power",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Level of the element the rule fired on.
    pub level: Ordinal,
    pub rule: TraceRule,
}

/// Replayable record of one membership decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipTrace {
    pub steps: Vec<TraceStep>,
    pub verdict: bool,
}

/// Constructive certificate that `x` does not normalize `H_beta`:
/// `l` lies in `H_beta` but `x l x^-1` does not. All three verdicts are
/// recomputed through the membership procedure, independently of how the
/// witness was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRecord {
    pub beta: Ordinal,
    pub x: TowerElement,
    pub l: TowerElement,
    pub conjugate: TowerElement,
    /// `x` is not in `H_{beta+1}`.
    pub x_outside_next: bool,
    /// `l` is in `H_beta`.
    pub l_in_h: bool,
    /// `x l x^-1` is not in `H_beta`.
    pub conjugate_outside_h: bool,
}

impl WitnessRecord {
    pub fn is_valid(&self) -> bool {
        self.x_outside_next && self.l_in_h && self.conjugate_outside_h
    }
}

fn check_beta(cfg: &TowerConfig, beta: &Ordinal, top_inclusive: bool) -> Result<()> {
    let ok = *beta >= Ordinal::one()
        && if top_inclusive {
            beta <= cfg.alpha()
        } else {
            beta < cfg.alpha()
        };
    if ok {
        Ok(())
    } else {
        Err(Error::Range(format!(
            "beta {beta} exceeds alpha {} (or is below 1)",
            cfg.alpha()
        )))
    }
}

/// Membership in `K_beta`: by canonicality this is just a level comparison.
pub fn member_k(cfg: &TowerConfig, beta: &Ordinal, x: &TowerElement) -> Result<bool> {
    check_beta(cfg, beta, true)?;
    Ok(x.level() <= *beta)
}

/// Membership in `L_gamma`: the identity, or a node at index exactly `gamma`
/// with identity `g` part and no support at the identity key.
pub fn member_l(cfg: &TowerConfig, gamma: &Ordinal, x: &TowerElement) -> Result<bool> {
    check_beta(cfg, gamma, false)?;
    if x.is_identity() {
        return Ok(true);
    }
    Ok(match x.as_node() {
        Some(n) => {
            n.delta == *gamma && n.g.is_identity() && !n.f.keys().any(BaseElement::is_identity)
        }
        None => false,
    })
}

/// Membership in `H_beta`, with the trace of rule applications.
pub fn member_h(
    cfg: &TowerConfig,
    beta: &Ordinal,
    x: &TowerElement,
) -> Result<(bool, MembershipTrace)> {
    check_beta(cfg, beta, true)?;
    let mut steps = Vec::new();
    let mut cur = x.clone();
    let verdict = loop {
        if cur.level() <= *beta {
            steps.push(TraceStep {
                level: cur.level(),
                rule: TraceRule::AtOrBelowBeta,
            });
            break true;
        }
        // level > beta, so cur is a node with delta >= beta
        let n = cur.as_node().expect("level above 1 forces a node").clone();
        let level = n.delta.succ();
        if !n.g.is_identity() {
            steps.push(TraceStep {
                level,
                rule: TraceRule::GPartNontrivial,
            });
            break false;
        }
        if n.delta == *beta {
            steps.push(TraceStep {
                level,
                rule: TraceRule::CoreInKbetaPower,
            });
            break true;
        }
        // delta > beta: off-identity support is the L_delta component
        steps.push(TraceStep {
            level,
            rule: TraceRule::StripIdentityWrapper,
        });
        let spec = cfg.group_at(&n.delta)?;
        cur = match n.f.get(&g_identity(spec)) {
            Some(child) => child.clone(),
            None => cfg.identity(),
        };
    };
    Ok((verdict, MembershipTrace { steps, verdict }))
}

/// Convenience wrapper discarding the trace.
pub fn member_h_bool(cfg: &TowerConfig, beta: &Ordinal, x: &TowerElement) -> Result<bool> {
    Ok(member_h(cfg, beta, x)?.0)
}

/// Replays a trace against an element and checks every rule application,
/// returning whether the replay reproduces the recorded verdict.
pub fn verify_trace(
    cfg: &TowerConfig,
    beta: &Ordinal,
    x: &TowerElement,
    trace: &MembershipTrace,
) -> bool {
    let mut cur = x.clone();
    let mut steps = trace.steps.iter().peekable();
    loop {
        let Some(step) = steps.next() else {
            return false;
        };
        if step.level != cur.level() {
            return false;
        }
        match step.rule {
            TraceRule::AtOrBelowBeta => {
                return cur.level() <= *beta && trace.verdict && steps.peek().is_none();
            }
            TraceRule::GPartNontrivial => {
                let Some(n) = cur.as_node() else { return false };
                return n.delta >= *beta
                    && !n.g.is_identity()
                    && !trace.verdict
                    && steps.peek().is_none();
            }
            TraceRule::CoreInKbetaPower => {
                let Some(n) = cur.as_node() else { return false };
                return n.delta == *beta
                    && n.g.is_identity()
                    && trace.verdict
                    && steps.peek().is_none();
            }
            TraceRule::StripIdentityWrapper => {
                let Some(n) = cur.as_node() else { return false };
                if n.delta <= *beta || !n.g.is_identity() {
                    return false;
                }
                let Ok(spec) = cfg.group_at(&n.delta) else {
                    return false;
                };
                cur = match n.f.get(&g_identity(spec)) {
                    Some(child) => child.clone(),
                    None => cfg.identity(),
                };
            }
        }
    }
}

/// The normalizer decision for `H_beta`: membership in `H_{beta+1}`.
pub fn is_normalizing(cfg: &TowerConfig, beta: &Ordinal, x: &TowerElement) -> Result<bool> {
    check_beta(cfg, beta, false)?;
    member_h_bool(cfg, &beta.succ(), x)
}

/// A deterministic element of `K_delta` outside `H_beta`, for
/// `beta < delta <= alpha`: the node `(beta, {}, g0)` with `g0` the first
/// non-identity element of `G_beta`. Its level `beta + 1` is the least
/// successor level inside `(beta, delta]`.
pub fn sample_outside_h(
    cfg: &TowerConfig,
    beta: &Ordinal,
    delta: &Ordinal,
) -> Result<TowerElement> {
    check_beta(cfg, beta, false)?;
    if !(beta < delta && delta <= cfg.alpha()) {
        return Err(Error::Range(format!(
            "need beta < delta <= alpha, got beta {beta}, delta {delta}, alpha {}",
            cfg.alpha()
        )));
    }
    let spec = cfg.group_at(beta)?;
    Ok(TowerElement::raw_node(
        beta.clone(),
        BTreeMap::new(),
        first_non_identity(spec),
    ))
}

/// Builds the [`WitnessRecord`] for a non-normalizing `x`.
///
/// The failing layer is the outermost node `(f, g)` with non-identity `g`,
/// reached through identity-`g` wrappers; its index `delta` is at least
/// `beta + 1`. With `k` outside `H_beta` at level `beta + 1`, the witness is
/// `l = (delta, {g^-1 -> f(1)^-1 k f(1)}, 1)`, a member of `L_delta <= H_beta`
/// whose conjugate under the failing layer collapses onto `k` at the identity
/// point. Conjugation through identity-`g` wrappers acts pointwise, so the
/// single-layer argument survives the descent.
pub fn witness_non_normalizing(
    cfg: &TowerConfig,
    beta: &Ordinal,
    x: &TowerElement,
) -> Result<WitnessRecord> {
    if is_normalizing(cfg, beta, x)? {
        return Err(Error::Precondition(format!(
            "{} normalizes H_{beta}; no witness exists",
            crate::tower::format_element(x)
        )));
    }
    // Locate the failing layer.
    let mut cur = x.clone();
    let (delta, f, g) = loop {
        let n = cur
            .as_node()
            .expect("non-member of H_{beta+1} must contain a non-identity g part")
            .clone();
        if !n.g.is_identity() {
            break (n.delta, n.f, n.g);
        }
        let spec = cfg.group_at(&n.delta)?;
        cur = match n.f.get(&g_identity(spec)) {
            Some(child) => child.clone(),
            None => cfg.identity(),
        };
    };
    debug_assert!(delta >= beta.succ());

    let spec = cfg.group_at(&delta)?;
    let k = sample_outside_h(cfg, beta, &delta)?;
    let f_at_id = f
        .get(&g_identity(spec))
        .cloned()
        .unwrap_or_else(|| cfg.identity());
    let value = cfg.mul(&cfg.mul(&cfg.inv(&f_at_id)?, &k)?, &f_at_id)?;
    let key = crate::basegroup::g_inv(spec, &g)?;
    let mut lf = BTreeMap::new();
    lf.insert(key, value);
    let l = TowerElement::raw_node(delta, lf, g_identity(spec));

    let conjugate = cfg.conjugate(x, &l)?;
    Ok(WitnessRecord {
        beta: beta.clone(),
        x: x.clone(),
        l: l.clone(),
        conjugate: conjugate.clone(),
        x_outside_next: !member_h_bool(cfg, &beta.succ(), x)?,
        l_in_h: member_h_bool(cfg, beta, &l)?,
        conjugate_outside_h: !member_h_bool(cfg, beta, &conjugate)?,
    })
}

/// For a limit `beta` and `x in H_beta`, a `gamma < beta` with
/// `x in H_gamma`: the level of the core of `x` once identity-`g` wrappers at
/// indices `>= beta` are stripped.
pub fn core_level(cfg: &TowerConfig, beta: &Ordinal, x: &TowerElement) -> Result<Ordinal> {
    check_beta(cfg, beta, true)?;
    if beta.classify() != Classification::Limit {
        return Err(Error::Precondition(format!(
            "core_level needs a limit ordinal, got {beta}"
        )));
    }
    if !member_h_bool(cfg, beta, x)? {
        return Err(Error::Precondition(format!(
            "{} is not in H_{beta}",
            crate::tower::format_element(x)
        )));
    }
    let mut cur = x.clone();
    loop {
        match cur.as_node() {
            Some(n) if n.delta >= *beta => {
                debug_assert!(n.g.is_identity(), "membership rules out g parts here");
                let spec = cfg.group_at(&n.delta)?;
                cur = match n.f.get(&g_identity(spec)) {
                    Some(child) => child.clone(),
                    None => cfg.identity(),
                };
            }
            _ => return Ok(cur.level()),
        }
    }
}

/// The coset map `H_{beta+1} -> G_beta`: strip identity-`g` wrappers above
/// level `beta + 1` (membership guarantees they are wrappers), then read off
/// the `g` part of the core node at index `beta`, or the identity when the
/// core sits inside `K_beta`.
pub fn quotient(cfg: &TowerConfig, beta: &Ordinal, x: &TowerElement) -> Result<BaseElement> {
    check_beta(cfg, beta, false)?;
    if !member_h_bool(cfg, &beta.succ(), x)? {
        return Err(Error::Precondition(format!(
            "{} is not in H_{}",
            crate::tower::format_element(x),
            beta.succ()
        )));
    }
    let spec_beta = cfg.group_at(beta)?;
    let mut cur = x.clone();
    loop {
        match cur.as_node() {
            Some(n) if n.delta > *beta => {
                debug_assert!(n.g.is_identity());
                let spec = cfg.group_at(&n.delta)?;
                cur = match n.f.get(&g_identity(spec)) {
                    Some(child) => child.clone(),
                    None => cfg.identity(),
                };
            }
            Some(n) if n.delta == *beta => return Ok(n.g.clone()),
            _ => return Ok(g_identity(spec_beta)),
        }
    }
}

/// Section of [`quotient`]: `g -> (beta, {}, g)`, which lies in `H_{beta+1}`
/// and maps back onto `g`.
pub fn quotient_section(
    cfg: &TowerConfig,
    beta: &Ordinal,
    g: &BaseElement,
) -> Result<TowerElement> {
    check_beta(cfg, beta, false)?;
    let spec = cfg.group_at(beta)?;
    if !crate::basegroup::conforms(spec, g) {
        return Err(Error::Conformance(format!(
            "section argument {g:?} does not belong to {spec}"
        )));
    }
    if g.is_identity() {
        return Ok(cfg.identity());
    }
    Ok(TowerElement::raw_node(
        beta.clone(),
        BTreeMap::new(),
        g.clone(),
    ))
}
