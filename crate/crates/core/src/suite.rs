//! Seeded randomized property suites for the symbolic tower.
//!
//! These drive the transfinite configurations that no finite enumeration can
//! reach: group axioms of the sparse arithmetic, the embedding homomorphism,
//! monotonicity of the `H_beta` chain, normalizer soundness and constructive
//! completeness, the union property at limit indices, and the quotient
//! homomorphism with its kernel and section. Members of `H_beta` are sampled
//! constructively from the direct-sum shape (a `K_beta^{G_beta}` part times
//! `L_gamma` parts), so membership runs against elements it did not build.
//!
//! Every failure is reported as a replayable line carrying the seed, the
//! iteration, and the element literals involved.

use crate::basegroup::{g_mul, sample_element};
use crate::error::Result;
use crate::normtheory::{
    core_level, is_normalizing, member_h, member_h_bool, member_l, quotient, quotient_section,
    verify_trace, witness_non_normalizing,
};
use crate::ordinal::{Classification, Ordinal};
use crate::report::probe_set;
use crate::tower::{TowerConfig, TowerElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub iterations: u64,
    pub depth: u32,
    pub support: u32,
    pub magnitude: u64,
    pub probe_per_limit: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 42,
            iterations: 1000,
            depth: 3,
            support: 2,
            magnitude: 6,
            probe_per_limit: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub runs: u64,
    pub failure_count: u64,
    /// First few replayable counterexamples.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub iterations: u64,
    pub properties: Vec<PropertyOutcome>,
}

impl SuiteSummary {
    pub fn failure_count(&self) -> u64 {
        self.properties.iter().map(|p| p.failure_count).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.failure_count() == 0
    }
}

struct Ctx<'a> {
    cfg: &'a TowerConfig,
    rng: ChaCha8Rng,
    opts: &'a SuiteOptions,
    /// Probe indices in `[1, alpha)`.
    probes: Vec<Ordinal>,
    iter: u64,
}

impl<'a> Ctx<'a> {
    fn rand_elem(&mut self) -> TowerElement {
        self.cfg.random_element(
            &mut self.rng,
            self.opts.depth,
            self.opts.support,
            self.opts.magnitude,
        )
    }

    fn rand_probe(&mut self) -> Ordinal {
        let i = self.rng.gen_range(0..self.probes.len());
        self.probes[i].clone()
    }

    /// Constructive member of `H_beta`: a node `(beta, f, 1)` in
    /// `K_beta^{G_beta}` multiplied by `L_gamma` parts at probed `gamma > beta`.
    /// For `beta = alpha` the whole group qualifies.
    fn rand_h_member(&mut self, beta: &Ordinal) -> Result<TowerElement> {
        if beta == self.cfg.alpha() {
            return Ok(self.rand_elem());
        }
        let spec = self.cfg.group_at(beta)?.clone();
        let mut f = BTreeMap::new();
        for _ in 0..self.rng.gen_range(0..=self.opts.support) {
            let key = sample_element(&spec, &mut self.rng, self.opts.magnitude);
            let val = self.cfg.random_element_at_most(
                &mut self.rng,
                beta,
                self.opts.depth,
                self.opts.support,
                self.opts.magnitude,
            );
            if !val.is_identity() {
                f.insert(key, val);
            }
        }
        let mut out = self.cfg.canonicalize(&TowerElement::raw_node(
            beta.clone(),
            f,
            crate::basegroup::g_identity(&spec),
        ))?;
        let l_levels: Vec<Ordinal> = self.probes.iter().filter(|p| *p > beta).cloned().collect();
        for gamma in l_levels {
            if !self.rng.gen_bool(0.5) {
                continue;
            }
            let gspec = self.cfg.group_at(&gamma)?.clone();
            let mut lf = BTreeMap::new();
            for _ in 0..self.rng.gen_range(1..=self.opts.support) {
                let key = sample_element(&gspec, &mut self.rng, self.opts.magnitude);
                if key.is_identity() {
                    continue;
                }
                let val = self.cfg.random_element_at_most(
                    &mut self.rng,
                    &gamma,
                    self.opts.depth,
                    self.opts.support,
                    self.opts.magnitude,
                );
                if !val.is_identity() {
                    lf.insert(key, val);
                }
            }
            let l_part = self.cfg.canonicalize(&TowerElement::raw_node(
                gamma.clone(),
                lf,
                crate::basegroup::g_identity(&gspec),
            ))?;
            out = self.cfg.mul(&out, &l_part)?;
        }
        Ok(out)
    }

    /// Constructive member of `H_{beta+1}`: a section image times an
    /// `H_beta` member, together with the group element it projects to.
    fn rand_h_succ_member(
        &mut self,
        beta: &Ordinal,
    ) -> Result<(TowerElement, crate::basegroup::BaseElement)> {
        let spec = self.cfg.group_at(beta)?.clone();
        let g = sample_element(&spec, &mut self.rng, self.opts.magnitude);
        let sec = quotient_section(self.cfg, beta, &g)?;
        let h = self.rand_h_member(beta)?;
        Ok((self.cfg.mul(&sec, &h)?, g))
    }

    fn fmt(&self, x: &TowerElement) -> String {
        self.cfg.format_element(x)
    }
}

type Property = (
    &'static str,
    fn(&mut Ctx) -> Result<std::result::Result<(), String>>,
);

fn all_properties() -> Vec<Property> {
    vec![
        ("mul_associative", |ctx| {
            let (x, y, z) = (ctx.rand_elem(), ctx.rand_elem(), ctx.rand_elem());
            let a = ctx.cfg.mul(&ctx.cfg.mul(&x, &y)?, &z)?;
            let b = ctx.cfg.mul(&x, &ctx.cfg.mul(&y, &z)?)?;
            Ok(if a == b {
                Ok(())
            } else {
                Err(format!(
                    "x={} y={} z={}",
                    ctx.fmt(&x),
                    ctx.fmt(&y),
                    ctx.fmt(&z)
                ))
            })
        }),
        ("identity_two_sided", |ctx| {
            let x = ctx.rand_elem();
            let id = ctx.cfg.identity();
            let ok = ctx.cfg.mul(&x, &id)? == x && ctx.cfg.mul(&id, &x)? == x;
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("x={}", ctx.fmt(&x)))
            })
        }),
        ("inverse_two_sided", |ctx| {
            let x = ctx.rand_elem();
            let xi = ctx.cfg.inv(&x)?;
            let ok = ctx.cfg.mul(&x, &xi)?.is_identity() && ctx.cfg.mul(&xi, &x)?.is_identity();
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("x={}", ctx.fmt(&x)))
            })
        }),
        ("level_bookkeeping", |ctx| {
            let (x, y) = (ctx.rand_elem(), ctx.rand_elem());
            let p = ctx.cfg.mul(&x, &y)?;
            let ok = p.level() <= x.level().max(y.level()) && ctx.cfg.inv(&x)?.level() == x.level();
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("x={} y={}", ctx.fmt(&x), ctx.fmt(&y)))
            })
        }),
        ("text_roundtrip", |ctx| {
            let x = ctx.rand_elem();
            let back = ctx.cfg.parse_element(&ctx.fmt(&x))?;
            Ok(if back == x {
                Ok(())
            } else {
                Err(format!("x={}", ctx.fmt(&x)))
            })
        }),
        ("embedding_homomorphism", |ctx| {
            let (a, b) = (ctx.rand_elem(), ctx.rand_elem());
            // a successor target at or above both levels, capped at alpha
            let mut target = a.level().max(b.level());
            for _ in 0..2 {
                if target < *ctx.cfg.alpha() {
                    target = target.succ();
                }
            }
            let la = ctx.cfg.lift(&a, &target)?;
            let lb = ctx.cfg.lift(&b, &target)?;
            let lifted_product = ctx.cfg.canonicalize(&ctx.cfg.mul(&la, &lb)?)?;
            let ok = lifted_product == ctx.cfg.mul(&a, &b)? && ctx.cfg.canonicalize(&la)? == a;
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("a={} b={}", ctx.fmt(&a), ctx.fmt(&b)))
            })
        }),
        ("membership_trace_replay", |ctx| {
            let x = ctx.rand_elem();
            let beta = ctx.rand_probe();
            let (v, trace) = member_h(ctx.cfg, &beta, &x)?;
            let ok = v == trace.verdict && verify_trace(ctx.cfg, &beta, &x, &trace);
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("beta={beta} x={}", ctx.fmt(&x)))
            })
        }),
        ("h_chain_monotone", |ctx| {
            let x = ctx.rand_elem();
            let mut prev = false;
            for beta in ctx.probes.clone() {
                let m = member_h_bool(ctx.cfg, &beta, &x)?;
                if prev && !m {
                    return Ok(Err(format!("drop at beta={beta} x={}", ctx.fmt(&x))));
                }
                prev = m;
            }
            let top = member_h_bool(ctx.cfg, &ctx.cfg.alpha().clone(), &x)?;
            Ok(if top {
                Ok(())
            } else {
                Err(format!("H_alpha missed x={}", ctx.fmt(&x)))
            })
        }),
        ("h_member_construction", |ctx| {
            let beta = ctx.rand_probe();
            let h = ctx.rand_h_member(&beta)?;
            Ok(if member_h_bool(ctx.cfg, &beta, &h)? {
                Ok(())
            } else {
                Err(format!("beta={beta} h={}", ctx.fmt(&h)))
            })
        }),
        ("normalizer_sound", |ctx| {
            let beta = ctx.rand_probe();
            let (x, _) = ctx.rand_h_succ_member(&beta)?;
            let h = ctx.rand_h_member(&beta)?;
            if !is_normalizing(ctx.cfg, &beta, &x)? {
                return Ok(Err(format!(
                    "member of H_{} not normalizing: x={}",
                    beta.succ(),
                    ctx.fmt(&x)
                )));
            }
            let conj = ctx.cfg.conjugate(&x, &h)?;
            Ok(if member_h_bool(ctx.cfg, &beta, &conj)? {
                Ok(())
            } else {
                Err(format!("beta={beta} x={} h={}", ctx.fmt(&x), ctx.fmt(&h)))
            })
        }),
        ("normalizer_witness_complete", |ctx| {
            let beta = ctx.rand_probe();
            let x = ctx.rand_elem();
            if is_normalizing(ctx.cfg, &beta, &x)? {
                return Ok(Ok(()));
            }
            let w = witness_non_normalizing(ctx.cfg, &beta, &x)?;
            let l_index = match w.l.level().classify() {
                Classification::Successor(p) => p,
                _ => return Ok(Err(format!("witness l at level 1: {}", ctx.fmt(&w.l)))),
            };
            let ok = w.is_valid() && member_l(ctx.cfg, &l_index, &w.l)?;
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("beta={beta} x={} l={}", ctx.fmt(&x), ctx.fmt(&w.l)))
            })
        }),
        ("limit_union", |ctx| {
            let Some(lambda) = ctx
                .probes
                .clone()
                .into_iter()
                .chain(std::iter::once(ctx.cfg.alpha().clone()))
                .find(|p| p.is_limit())
            else {
                return Ok(Ok(()));
            };
            // downward: members of H_lambda live in some H_gamma below
            let x = ctx.rand_h_member(&lambda)?;
            let gamma = core_level(ctx.cfg, &lambda, &x)?;
            if !(gamma < lambda && member_h_bool(ctx.cfg, &gamma, &x)?) {
                return Ok(Err(format!("core_level={gamma} x={}", ctx.fmt(&x))));
            }
            // upward: members below the limit are members at the limit
            let below: Vec<Ordinal> = ctx
                .probes
                .iter()
                .filter(|p| **p < lambda)
                .cloned()
                .collect();
            if let Some(b) = below.first() {
                let y = ctx.rand_h_member(b)?;
                if !member_h_bool(ctx.cfg, &lambda, &y)? {
                    return Ok(Err(format!(
                        "H_{b} member missing from H_{lambda}: {}",
                        ctx.fmt(&y)
                    )));
                }
            }
            Ok(Ok(()))
        }),
        ("quotient_homomorphism", |ctx| {
            let beta = ctx.rand_probe();
            let spec = ctx.cfg.group_at(&beta)?.clone();
            let (x, gx) = ctx.rand_h_succ_member(&beta)?;
            let (y, gy) = ctx.rand_h_succ_member(&beta)?;
            let qx = quotient(ctx.cfg, &beta, &x)?;
            let qxy = quotient(ctx.cfg, &beta, &ctx.cfg.mul(&x, &y)?)?;
            let ok = qx == gx && qxy == g_mul(&spec, &gx, &gy)?;
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("beta={beta} x={} y={}", ctx.fmt(&x), ctx.fmt(&y)))
            })
        }),
        ("quotient_kernel_exact", |ctx| {
            let beta = ctx.rand_probe();
            let (x, gx) = ctx.rand_h_succ_member(&beta)?;
            let in_h = member_h_bool(ctx.cfg, &beta, &x)?;
            let q_trivial = quotient(ctx.cfg, &beta, &x)?.is_identity();
            // rand_h_succ_member projects onto gx, so all three must agree
            let ok = q_trivial == in_h && q_trivial == gx.is_identity();
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("beta={beta} x={}", ctx.fmt(&x)))
            })
        }),
        ("quotient_section_strict", |ctx| {
            let beta = ctx.rand_probe();
            let spec = ctx.cfg.group_at(&beta)?.clone();
            let g = sample_element(&spec, &mut ctx.rng, ctx.opts.magnitude);
            let s = quotient_section(ctx.cfg, &beta, &g)?;
            let ok = quotient(ctx.cfg, &beta, &s)? == g
                && member_h_bool(ctx.cfg, &beta.succ(), &s)?
                && (g.is_identity() || !member_h_bool(ctx.cfg, &beta, &s)?);
            Ok(if ok {
                Ok(())
            } else {
                Err(format!("beta={beta} g={g:?}"))
            })
        }),
        ("normality_in_successor", |ctx| {
            let beta = ctx.rand_probe();
            let (x, _) = ctx.rand_h_succ_member(&beta)?;
            let h = ctx.rand_h_member(&beta)?;
            let conj = ctx.cfg.conjugate(&x, &h)?;
            Ok(if member_h_bool(ctx.cfg, &beta, &conj)? {
                Ok(())
            } else {
                Err(format!("beta={beta} x={} h={}", ctx.fmt(&x), ctx.fmt(&h)))
            })
        }),
    ]
}

/// Runs every property `opts.iterations` times with a ChaCha stream seeded
/// from `opts.seed`; identical inputs produce identical summaries.
pub fn run_suite(cfg: &TowerConfig, opts: &SuiteOptions) -> Result<SuiteSummary> {
    run_suite_with(cfg, opts, &all_properties())
}

fn run_suite_with(
    cfg: &TowerConfig,
    opts: &SuiteOptions,
    properties: &[Property],
) -> Result<SuiteSummary> {
    let mut ctx = Ctx {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        opts,
        probes: probe_set(cfg, opts.probe_per_limit),
        iter: 0,
    };
    let mut outcomes: Vec<PropertyOutcome> = properties
        .iter()
        .map(|(name, _)| PropertyOutcome {
            name,
            runs: 0,
            failure_count: 0,
            failures: Vec::new(),
        })
        .collect();
    for iter in 0..opts.iterations {
        ctx.iter = iter;
        for ((name, prop), outcome) in properties.iter().zip(outcomes.iter_mut()) {
            outcome.runs += 1;
            if let Some(detail) = prop(&mut ctx)?.err() {
                outcome.failure_count += 1;
                if outcome.failures.len() < 5 {
                    outcome
                        .failures
                        .push(format!("{name}: seed={} iter={iter}: {detail}", opts.seed));
                }
            }
        }
    }
    Ok(SuiteSummary {
        seed: opts.seed,
        iterations: opts.iterations,
        properties: outcomes,
    })
}
