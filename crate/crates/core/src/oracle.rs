//! Brute-force verification on fully finite towers.
//!
//! Everything here works on a second, independent representation: elements
//! are dense pairs (total function vectors over the acting group, plus a
//! group index) with composition computed directly from the wreath law, and
//! the `H_beta` sets are built by unfolding their direct-sum definition level
//! by level. Nothing is shared with the sparse canonical arithmetic or the
//! membership recursion, which is what makes the comparison meaningful:
//! the fast procedures are checked against exhaustive set computations.

use crate::basegroup::{enumerate_group, g_inv, g_mul, BaseElement, GroupSpec};
use crate::error::{Error, Result};
use crate::normtheory;
use crate::ordinal::Ordinal;
use crate::tower::{format_element, TowerConfig, TowerElement};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

pub const DEFAULT_CAP: u128 = 100_000;

/// Exhaustive size limit for the all-pairs multiplication cross-check.
const MUL_CHECK_EXHAUSTIVE_LIMIT: usize = 2000;

/// Cost limit (outer elements times subgroup size) below which the
/// conjugation double loop runs exhaustively in auto mode.
const EXHAUSTIVE_COST_LIMIT: u128 = 3_000_000;

// --- finite group tables --------------------------------------------------

struct SmallGroup {
    elems: Vec<BaseElement>,
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

impl SmallGroup {
    fn build(spec: &GroupSpec) -> Result<SmallGroup> {
        let elems = enumerate_group(spec)?;
        let order = elems.len();
        let index: HashMap<&BaseElement, u16> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i as u16))
            .collect();
        let mut mul = vec![0u16; order * order];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                mul[i * order + j] = index[&g_mul(spec, a, b)?];
            }
        }
        let mut inv = vec![0u16; order];
        for (i, a) in elems.iter().enumerate() {
            inv[i] = index[&g_inv(spec, a)?];
        }
        Ok(SmallGroup {
            elems,
            order,
            mul,
            inv,
        })
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.order + b as usize]
    }

    fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }
}

// --- dense elements ---------------------------------------------------------

/// Dense element of `K_m`: base-group index at level 1, otherwise a total
/// function vector over `G_{m-1}` together with the acting-group index.
/// Unlike the sparse form, no canonicalization ever happens here.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Dense {
    Base(u16),
    Pair { g: u16, f: Vec<Dense> },
}

struct DenseLevels {
    base: SmallGroup,
    /// `acting[i]` is the table of `G_{i+1}`.
    acting: Vec<SmallGroup>,
    /// `levels[m-1]` lists every element of `K_m`, identity first.
    levels: Vec<Vec<Dense>>,
    index: Vec<HashMap<Dense, u32>>,
}

impl DenseLevels {
    /// Composition in `K_m` straight from the wreath law:
    /// `(f1, g1)(f2, g2) = (t -> f1(t) f2(g1^-1 t), g1 g2)`.
    fn mul(&self, m: usize, a: &Dense, b: &Dense) -> Dense {
        match (a, b) {
            (Dense::Base(i), Dense::Base(j)) => Dense::Base(self.base.mul(*i, *j)),
            (Dense::Pair { g: g1, f: f1 }, Dense::Pair { g: g2, f: f2 }) => {
                let grp = &self.acting[m - 2];
                let g1i = grp.inv(*g1);
                let f = (0..grp.order as u16)
                    .map(|t| self.mul(m - 1, &f1[t as usize], &f2[grp.mul(g1i, t) as usize]))
                    .collect();
                Dense::Pair {
                    g: grp.mul(*g1, *g2),
                    f,
                }
            }
            _ => unreachable!("dense elements of one level share their shape"),
        }
    }

    /// `(f, g)^-1 = (t -> f(g t)^-1, g^-1)`.
    fn inv(&self, m: usize, a: &Dense) -> Dense {
        match a {
            Dense::Base(i) => Dense::Base(self.base.inv(*i)),
            Dense::Pair { g, f } => {
                let grp = &self.acting[m - 2];
                let fi = (0..grp.order as u16)
                    .map(|t| self.inv(m - 1, &f[grp.mul(*g, t) as usize]))
                    .collect();
                Dense::Pair {
                    g: grp.inv(*g),
                    f: fi,
                }
            }
        }
    }

    fn top(&self) -> usize {
        self.levels.len()
    }

    fn idx(&self, m: usize, d: &Dense) -> u32 {
        self.index[m - 1][d]
    }

    /// Membership bits of `H_beta` over `K_top`, by unfolding the direct-sum
    /// definition: `H_beta ∩ K_beta = K_beta`, and for `m > beta` an element
    /// `(f, g)` of `K_m` lies in `H_beta` exactly when `g` is trivial and the
    /// identity-point value does, the off-identity values being the
    /// `L_{m-1}` component.
    fn h_bits(&self, beta: usize) -> Vec<bool> {
        let mut bits = vec![true; self.levels[beta - 1].len()];
        for m in beta + 1..=self.top() {
            bits = self.levels[m - 1]
                .iter()
                .map(|e| match e {
                    Dense::Pair { g, f } => *g == 0 && bits[self.idx(m - 1, &f[0]) as usize],
                    Dense::Base(_) => unreachable!("levels above 1 hold pairs"),
                })
                .collect();
        }
        bits
    }

    /// Embed an element of `K_m` into `K_n` by stacking identity wrappers.
    fn embed(&self, m: usize, n: usize, x: &Dense) -> Dense {
        let mut cur = x.clone();
        for lvl in m..n {
            let grp = &self.acting[lvl - 1];
            let id_below = self.levels[lvl - 1][0].clone();
            let mut f = vec![id_below; grp.order];
            f[0] = cur;
            cur = Dense::Pair { g: 0, f };
        }
        cur
    }

    fn to_sparse(&self, cfg: &TowerConfig, m: usize, d: &Dense) -> TowerElement {
        match d {
            Dense::Base(i) => TowerElement::Base(self.base.elems[*i as usize].clone()),
            Dense::Pair { g, f } => {
                let grp = &self.acting[m - 2];
                let mut map = BTreeMap::new();
                for (t, child) in f.iter().enumerate() {
                    let sparse = self.to_sparse(cfg, m - 1, child);
                    if !sparse.is_identity() {
                        map.insert(grp.elems[t].clone(), sparse);
                    }
                }
                let delta = Ordinal::from_nat((m - 1) as u64);
                cfg.canonicalize(&TowerElement::raw_node(
                    delta,
                    map,
                    grp.elems[*g as usize].clone(),
                ))
                .expect("dense conversion yields well-formed elements")
            }
        }
    }
}

// --- the table -------------------------------------------------------------

/// Exhaustive enumeration of a finite tower: every element of `K` in a
/// deterministic order (identity first), its canonical sparse form, and the
/// `H_beta` membership bit-vector for every `1 <= beta <= alpha`.
pub struct FiniteTowerTable {
    pub cfg: TowerConfig,
    pub elements: Vec<TowerElement>,
    pub index: HashMap<TowerElement, usize>,
    /// `h_membership[beta - 1]` is the bit-vector of `H_beta`.
    pub h_membership: Vec<Vec<bool>>,
    dense: DenseLevels,
    alpha: usize,
}

/// Predicted `|K_alpha|` from the iterated formula
/// `|K wr G| = |K|^|G| * |G|`, or an error when any group is infinite.
pub fn predicted_order(cfg: &TowerConfig) -> Result<u128> {
    let alpha = cfg.alpha().to_nat().ok_or_else(|| {
        Error::Config(format!("oracle needs a finite alpha, got {}", cfg.alpha()))
    })?;
    let mut size = cfg
        .base()
        .order()
        .ok_or_else(|| Error::InfiniteGroup("oracle needs a finite base group".into()))?;
    for m in 1..alpha {
        let g = cfg.group_at(&Ordinal::from_nat(m))?;
        let go = g.order().ok_or_else(|| {
            Error::InfiniteGroup(format!("oracle needs finite acting groups, {g} is not"))
        })?;
        let mut power = 1u128;
        for _ in 0..go {
            power = power
                .checked_mul(size)
                .ok_or(Error::Overflow("tower size prediction"))?;
            if power > 1 << 100 {
                return Err(Error::Overflow("tower size prediction"));
            }
        }
        size = power
            .checked_mul(go)
            .ok_or(Error::Overflow("tower size prediction"))?;
    }
    Ok(size)
}

/// Build the full table; refuses towers whose predicted size exceeds `cap`.
pub fn enumerate_tower(cfg: &TowerConfig, cap: u128) -> Result<FiniteTowerTable> {
    let predicted = predicted_order(cfg)?;
    if predicted > cap {
        return Err(Error::CapExceeded { predicted, cap });
    }
    let alpha = cfg.alpha().to_nat().unwrap() as usize;

    let base = SmallGroup::build(cfg.base())?;
    let acting = (1..alpha)
        .map(|m| SmallGroup::build(cfg.group_at(&Ordinal::from_nat(m as u64))?))
        .collect::<Result<Vec<_>>>()?;

    let mut levels: Vec<Vec<Dense>> = Vec::with_capacity(alpha);
    levels.push((0..base.order as u16).map(Dense::Base).collect());
    for m in 2..=alpha {
        let grp = &acting[m - 2];
        let below = &levels[m - 2];
        let slots = grp.order;
        let mut out = Vec::new();
        // odometer over the function vector, last slot fastest (lexicographic)
        let mut digits = vec![0usize; slots];
        loop {
            let f: Vec<Dense> = digits.iter().map(|&i| below[i].clone()).collect();
            for g in 0..grp.order as u16 {
                out.push(Dense::Pair { g, f: f.clone() });
            }
            let mut pos = slots;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < below.len() {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
        levels.push(out);
    }

    let index = levels
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(i, e)| (e.clone(), i as u32))
                .collect::<HashMap<_, _>>()
        })
        .collect::<Vec<_>>();
    let dense = DenseLevels {
        base,
        acting,
        levels,
        index,
    };

    debug_assert_eq!(dense.levels[alpha - 1].len() as u128, predicted);

    let elements: Vec<TowerElement> = dense.levels[alpha - 1]
        .iter()
        .map(|d| dense.to_sparse(cfg, alpha, d))
        .collect();
    let index: HashMap<TowerElement, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    if index.len() != elements.len() {
        return Err(Error::Config(
            "enumeration produced duplicate canonical elements".into(),
        ));
    }

    let h_membership = (1..=alpha).map(|beta| dense.h_bits(beta)).collect();

    Ok(FiniteTowerTable {
        cfg: cfg.clone(),
        elements,
        index,
        h_membership,
        dense,
        alpha,
    })
}

impl FiniteTowerTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn alpha_nat(&self) -> u64 {
        self.alpha as u64
    }

    /// Membership bits of `H_beta`, `1 <= beta <= alpha`.
    pub fn h_set(&self, beta: u64) -> Result<&[bool]> {
        beta.checked_sub(1)
            .and_then(|i| self.h_membership.get(i as usize))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                Error::Range(format!("beta {beta} outside [1, {}]", self.alpha))
            })
    }

    /// Closed-form size of `H_beta`:
    /// `|K_beta^{G_beta}| * prod over beta < gamma < alpha of |K_gamma|^(|G_gamma| - 1)`.
    pub fn h_size_expected(&self, beta: u64) -> u128 {
        assert!(beta >= 1 && beta <= self.alpha as u64, "beta {beta} outside [1, {}]", self.alpha);
        let beta = beta as usize;
        if beta == self.alpha {
            return self.len() as u128;
        }
        let k_beta = self.dense.levels[beta - 1].len() as u128;
        let g_beta = self.dense.acting[beta - 1].order as u32;
        let mut size = k_beta.pow(g_beta);
        for gamma in beta + 1..self.alpha {
            let k_gamma = self.dense.levels[gamma - 1].len() as u128;
            let g_gamma = self.dense.acting[gamma - 1].order as u32;
            size *= k_gamma.pow(g_gamma - 1);
        }
        size
    }

    /// Index of the product `elements[i] * elements[j]`, computed densely.
    pub fn compose_index(&self, i: usize, j: usize) -> usize {
        let m = self.alpha;
        let p = self.dense.mul(
            m,
            &self.dense.levels[m - 1][i],
            &self.dense.levels[m - 1][j],
        );
        self.dense.idx(m, &p) as usize
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let m = self.alpha;
        let v = self.dense.inv(m, &self.dense.levels[m - 1][i]);
        self.dense.idx(m, &v) as usize
    }

    /// The normalizer of `H_beta` by definition: all `x` with
    /// `x h x^-1 in H_beta` for every member `h`. With `generators_only` the
    /// inner loop shrinks to a factor-wise generating set of `H_beta`
    /// (the embedded `K_beta^{G_beta}` plus every `L_gamma`), which generates
    /// the subgroup, so conjugation stability on it implies stability on all
    /// of `H_beta` for finite groups.
    pub fn brute_normalizer(&self, beta: u64, generators_only: bool) -> Result<Vec<bool>> {
        let bits = self.h_set(beta)?;
        let inner: Vec<usize> = if generators_only {
            self.generating_set(beta)?
        } else {
            (0..self.len()).filter(|&i| bits[i]).collect()
        };
        let m = self.alpha;
        let mut out = vec![false; self.len()];
        for (i, x) in self.dense.levels[m - 1].iter().enumerate() {
            let xi = self.dense.inv(m, x);
            let ok = inner.iter().all(|&h| {
                let xh = self.dense.mul(m, x, &self.dense.levels[m - 1][h]);
                let conj = self.dense.mul(m, &xh, &xi);
                bits[self.dense.idx(m, &conj) as usize]
            });
            out[i] = ok;
        }
        Ok(out)
    }

    /// Factor-wise generating set of `H_beta` (element indices in `K`).
    fn generating_set(&self, beta: u64) -> Result<Vec<usize>> {
        let beta = beta as usize;
        if beta == self.alpha {
            return Ok((0..self.len()).collect());
        }
        let n = self.alpha;
        let mut out = Vec::new();
        let mut seen = vec![false; self.len()];
        let mut push = |d: Dense, dense: &DenseLevels, out: &mut Vec<usize>| {
            let i = dense.idx(n, &d) as usize;
            if !std::mem::replace(&mut seen[i], true) {
                out.push(i);
            }
        };
        // all of K_beta^{G_beta}: pairs at level beta + 1 with trivial g part
        for e in &self.dense.levels[beta] {
            if let Dense::Pair { g: 0, .. } = e {
                push(self.dense.embed(beta + 1, n, e), &self.dense, &mut out);
            }
        }
        // each L_gamma, beta < gamma < alpha: trivial g part and identity at
        // the identity point
        for gamma in beta + 1..n {
            let id_below = &self.dense.levels[gamma - 1][0];
            for e in &self.dense.levels[gamma] {
                if let Dense::Pair { g: 0, f } = e {
                    if &f[0] == id_below {
                        push(self.dense.embed(gamma + 1, n, e), &self.dense, &mut out);
                    }
                }
            }
        }
        Ok(out)
    }
}

// --- quotient isomorphism ----------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsoOutcome {
    /// Mapping from coset index to the element of `G_beta` it represents.
    Isomorphic(Vec<String>),
    OrderMismatch {
        cosets: usize,
        group: usize,
    },
    SearchFailed,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientIso {
    pub beta: u64,
    pub cosets: usize,
    pub outcome: IsoOutcome,
}

impl QuotientIso {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self.outcome, IsoOutcome::Isomorphic(_))
    }
}

/// Builds the multiplication table of `H_{beta+1} / H_beta` by partitioning
/// the enumerated members into cosets, then searches for an isomorphism onto
/// `G_beta` by backtracking over images with element-order pruning.
pub fn quotient_table_iso(table: &FiniteTowerTable, beta: u64) -> Result<QuotientIso> {
    if beta == 0 || beta >= table.alpha_nat() {
        return Err(Error::Range(format!(
            "beta {beta} outside [1, {})",
            table.alpha_nat()
        )));
    }
    let hb = table.h_set(beta)?.to_vec();
    let hb1 = table.h_set(beta + 1)?.to_vec();
    let members: Vec<usize> = (0..table.len()).filter(|&i| hb1[i]).collect();
    let h_members: Vec<usize> = (0..table.len()).filter(|&i| hb[i]).collect();

    // Left-coset partition: expanding each unassigned representative costs
    // |H_beta|, so the whole partition costs |H_{beta+1}| compositions.
    let mut coset_of: HashMap<usize, usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    for &x in &members {
        if coset_of.contains_key(&x) {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &h in &h_members {
            coset_of.insert(table.compose_index(x, h), c);
        }
    }
    let n = reps.len();
    let coset_table: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| coset_of[&table.compose_index(reps[a], reps[b])])
                .collect()
        })
        .collect();

    let spec = table.cfg.group_at(&Ordinal::from_nat(beta))?;
    let group = SmallGroup::build(spec)?;
    let group_table: Vec<Vec<usize>> = (0..group.order)
        .map(|a| {
            (0..group.order)
                .map(|b| group.mul(a as u16, b as u16) as usize)
                .collect()
        })
        .collect();

    if n != group.order {
        return Ok(QuotientIso {
            beta,
            cosets: n,
            outcome: IsoOutcome::OrderMismatch {
                cosets: n,
                group: group.order,
            },
        });
    }
    let outcome = match find_isomorphism(&coset_table, &group_table) {
        Some(map) => IsoOutcome::Isomorphic(
            map.iter()
                .map(|&gi| crate::basegroup::format_base_value(&group.elems[gi]))
                .collect(),
        ),
        None => IsoOutcome::SearchFailed,
    };
    Ok(QuotientIso {
        beta,
        cosets: n,
        outcome,
    })
}

fn element_orders(t: &[Vec<usize>]) -> Vec<usize> {
    let n = t.len();
    (0..n)
        .map(|i| {
            let mut cur = i;
            let mut k = 1;
            while cur != 0 {
                cur = t[cur][i];
                k += 1;
            }
            k
        })
        .collect()
}

/// Backtracking isomorphism search between two multiplication tables whose
/// identity sits at index 0. Forced assignments are propagated from already
/// mapped products, which collapses the search space for the small groups
/// handled here.
pub(crate) fn find_isomorphism(t1: &[Vec<usize>], t2: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = t1.len();
    if n != t2.len() {
        return None;
    }
    let ord1 = element_orders(t1);
    let ord2 = element_orders(t2);
    {
        let mut a = ord1.clone();
        let mut b = ord2.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return None;
        }
    }

    const UNSET: usize = usize::MAX;
    fn propagate(
        t1: &[Vec<usize>],
        t2: &[Vec<usize>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        loop {
            let mut changed = false;
            for a in 0..t1.len() {
                if map[a] == UNSET {
                    continue;
                }
                for b in 0..t1.len() {
                    if map[b] == UNSET {
                        continue;
                    }
                    let p = t1[a][b];
                    let q = t2[map[a]][map[b]];
                    if map[p] == UNSET {
                        if used[q] {
                            return false;
                        }
                        map[p] = q;
                        used[q] = true;
                        changed = true;
                    } else if map[p] != q {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(
        t1: &[Vec<usize>],
        t2: &[Vec<usize>],
        ord1: &[usize],
        ord2: &[usize],
        map: Vec<usize>,
        used: Vec<bool>,
    ) -> Option<Vec<usize>> {
        let Some(a) = map.iter().position(|&v| v == UNSET) else {
            return Some(map);
        };
        for v in 0..t2.len() {
            if used[v] || ord1[a] != ord2[v] {
                continue;
            }
            let mut m = map.clone();
            let mut u = used.clone();
            m[a] = v;
            u[v] = true;
            if propagate(t1, t2, &mut m, &mut u) {
                if let Some(done) = search(t1, t2, ord1, ord2, m, u) {
                    return Some(done);
                }
            }
        }
        None
    }

    let mut map = vec![UNSET; n];
    let mut used = vec![false; n];
    map[0] = 0;
    used[0] = true;
    search(t1, t2, &ord1, &ord2, map, used)
}

// --- the suite ---------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub cap: u128,
    pub mode: OracleMode,
    pub generators_only: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Pick exhaustive or sampled from the predicted double-loop cost.
    Auto,
    Exhaustive,
    Sampled {
        seed: u64,
        iterations: u64,
    },
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_CAP,
            mode: OracleMode::Auto,
            generators_only: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub beta: u64,
    pub h_size: u64,
    pub h_size_expected: u64,
    /// Size of the brute-force normalizer set (exhaustive mode only).
    pub normalizer_size: Option<u64>,
    /// Exhaustive: brute-force set equals the fast membership set.
    /// Sampled: no sampled conjugation or witness check failed.
    pub normalizer_match: bool,
    pub mismatch_examples: Vec<String>,
    pub quotient_cosets: u64,
    pub quotient_iso: bool,
    pub iso_images: Option<Vec<String>>,
    /// Conjugation pairs checked (sampled mode).
    pub sampled_pairs: Option<u64>,
    /// Witness records built and verified (sampled mode).
    pub witnesses_verified: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MulCheck {
    pub exhaustive: bool,
    pub pairs: u64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub alpha: u64,
    pub k_order: u64,
    pub mode: String,
    pub generators_only: bool,
    pub per_beta: Vec<BetaReport>,
    pub mul_check: MulCheck,
    /// Wall-clock stage timings; excluded from serialization so that reports
    /// are byte-for-byte reproducible.
    #[serde(skip)]
    pub timings_ms: Vec<(String, u128)>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.per_beta
            .iter()
            .all(|b| b.normalizer_match && b.quotient_iso && b.h_size == b.h_size_expected)
            && self.mul_check.failures.is_empty()
    }
}

/// Runs the whole oracle: enumeration, per-beta normalizer comparison against
/// the fast membership procedure, quotient isomorphism onto `G_beta`, and the
/// multiplication/inversion cross-check between the dense and sparse
/// arithmetic.
pub fn run_oracle_suite(cfg: &TowerConfig, opts: &OracleOptions) -> Result<OracleReport> {
    let mut timings = Vec::new();
    let start = Instant::now();
    let table = enumerate_tower(cfg, opts.cap)?;
    timings.push(("enumerate".to_string(), start.elapsed().as_millis()));

    let alpha = table.alpha_nat();
    let max_h = (1..alpha)
        .map(|b| table.h_set(b).unwrap().iter().filter(|&&x| x).count() as u128)
        .max()
        .unwrap_or(0);
    let sampled = match &opts.mode {
        OracleMode::Exhaustive => None,
        OracleMode::Sampled { seed, iterations } => Some((*seed, *iterations)),
        OracleMode::Auto => {
            if table.len() as u128 * max_h <= EXHAUSTIVE_COST_LIMIT {
                None
            } else {
                Some((42, 10_000))
            }
        }
    };

    let mut per_beta = Vec::new();
    for beta in 1..alpha {
        let start = Instant::now();
        let bits = table.h_set(beta)?.to_vec();
        let h_size = bits.iter().filter(|&&x| x).count() as u64;
        let h_size_expected = table.h_size_expected(beta) as u64;

        let (normalizer_size, normalizer_match, mismatch_examples, sampled_pairs, witnesses) =
            match sampled {
                None => {
                    let brute = table.brute_normalizer(beta, opts.generators_only)?;
                    let mut mismatches = Vec::new();
                    let succ = Ordinal::from_nat(beta + 1);
                    for (i, x) in table.elements.iter().enumerate() {
                        let fast = normtheory::member_h_bool(cfg, &succ, x)?;
                        if fast != brute[i] {
                            if mismatches.len() < 5 {
                                mismatches.push(format!(
                                    "{} brute={} member_H={fast}",
                                    format_element(x),
                                    brute[i]
                                ));
                            } else {
                                mismatches.push("...".to_string());
                                break;
                            }
                        }
                    }
                    // exhaustively confirm the witness generator on every
                    // non-normalizing element
                    let mut witness_count = 0u64;
                    let beta_ord = Ordinal::from_nat(beta);
                    for (i, x) in table.elements.iter().enumerate() {
                        if !brute[i] {
                            let w = normtheory::witness_non_normalizing(cfg, &beta_ord, x)?;
                            if !w.is_valid() {
                                mismatches.push(format!(
                                    "witness for {} failed verification",
                                    format_element(x)
                                ));
                            }
                            witness_count += 1;
                        }
                    }
                    let size = brute.iter().filter(|&&x| x).count() as u64;
                    (
                        Some(size),
                        mismatches.is_empty(),
                        mismatches,
                        None,
                        Some(witness_count),
                    )
                }
                Some((seed, iterations)) => {
                    let (ok, examples, pairs, wits) =
                        sampled_checks(&table, beta, seed, iterations)?;
                    (None, ok, examples, Some(pairs), Some(wits))
                }
            };

        let iso = quotient_table_iso(&table, beta)?;
        let iso_images = match &iso.outcome {
            IsoOutcome::Isomorphic(images) => Some(images.clone()),
            _ => None,
        };
        per_beta.push(BetaReport {
            beta,
            h_size,
            h_size_expected,
            normalizer_size,
            normalizer_match,
            mismatch_examples,
            quotient_cosets: iso.cosets as u64,
            quotient_iso: iso.is_isomorphic(),
            iso_images,
            sampled_pairs,
            witnesses_verified: witnesses,
        });
        timings.push((format!("beta {beta}"), start.elapsed().as_millis()));
    }

    let start = Instant::now();
    let mul_check = mul_cross_check(&table, sampled.map(|(seed, _)| seed))?;
    timings.push(("mul cross-check".to_string(), start.elapsed().as_millis()));

    Ok(OracleReport {
        alpha,
        k_order: table.len() as u64,
        mode: match sampled {
            None => "exhaustive".to_string(),
            Some((seed, iterations)) => format!("sampled(seed={seed}, iterations={iterations})"),
        },
        generators_only: opts.generators_only,
        per_beta,
        mul_check,
        timings_ms: timings,
    })
}

/// Sampled-mode conjugation checks: random `(x, h)` pairs must conjugate
/// `H_beta` into itself whenever the fast procedure declares `x`
/// normalizing, and every sampled non-normalizing `x` must yield a verified
/// witness record.
fn sampled_checks(
    table: &FiniteTowerTable,
    beta: u64,
    seed: u64,
    iterations: u64,
) -> Result<(bool, Vec<String>, u64, u64)> {
    let bits = table.h_set(beta)?;
    let members: Vec<usize> = (0..table.len()).filter(|&i| bits[i]).collect();
    let beta_ord = Ordinal::from_nat(beta);
    let succ = beta_ord.succ();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ beta);
    let mut failures = Vec::new();
    let mut witnesses = 0u64;
    for _ in 0..iterations {
        let xi = rng.gen_range(0..table.len());
        let hi = members[rng.gen_range(0..members.len())];
        let x = &table.elements[xi];
        if normtheory::member_h_bool(&table.cfg, &succ, x)? {
            let xinv = table.inverse_index(xi);
            let conj = table.compose_index(table.compose_index(xi, hi), xinv);
            if !bits[conj] {
                failures.push(format!(
                    "normalizing {} moved {} outside H_{beta}",
                    format_element(x),
                    format_element(&table.elements[hi])
                ));
            }
        } else {
            let w = normtheory::witness_non_normalizing(&table.cfg, &beta_ord, x)?;
            if !w.is_valid() {
                failures.push(format!(
                    "witness for {} failed verification",
                    format_element(x)
                ));
            }
            witnesses += 1;
        }
        if failures.len() >= 5 {
            break;
        }
    }
    Ok((failures.is_empty(), failures, iterations, witnesses))
}

/// Dense and sparse arithmetic must agree: exhaustively on all pairs for
/// small towers, on seeded random pairs otherwise.
fn mul_cross_check(table: &FiniteTowerTable, seed: Option<u64>) -> Result<MulCheck> {
    let n = table.len();
    let cfg = &table.cfg;
    let mut failures = Vec::new();
    let check_pair = |i: usize, j: usize, failures: &mut Vec<String>| -> Result<()> {
        let expected = table.compose_index(i, j);
        let sparse = cfg.mul(&table.elements[i], &table.elements[j])?;
        if sparse != table.elements[expected] {
            failures.push(format!(
                "{} * {} disagrees",
                format_element(&table.elements[i]),
                format_element(&table.elements[j])
            ));
        }
        Ok(())
    };
    let exhaustive = n <= MUL_CHECK_EXHAUSTIVE_LIMIT;
    let pairs;
    if exhaustive {
        for i in 0..n {
            for j in 0..n {
                check_pair(i, j, &mut failures)?;
                if failures.len() >= 5 {
                    break;
                }
            }
        }
        pairs = (n * n) as u64;
        for i in 0..n {
            let inv = cfg.inv(&table.elements[i])?;
            if inv != table.elements[table.inverse_index(i)] {
                failures.push(format!(
                    "inv {} disagrees",
                    format_element(&table.elements[i])
                ));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(42));
        pairs = 2000;
        for _ in 0..pairs {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            check_pair(i, j, &mut failures)?;
            let inv = cfg.inv(&table.elements[i])?;
            if inv != table.elements[table.inverse_index(i)] {
                failures.push(format!(
                    "inv {} disagrees",
                    format_element(&table.elements[i])
                ));
            }
            if failures.len() >= 5 {
                break;
            }
        }
    }
    Ok(MulCheck {
        exhaustive,
        pairs,
        failures,
    })
}
