//! Elements of the iterated wreath-product tower and their arithmetic.
//!
//! A [`TowerElement`] is a sparse recursive value: either a base-group
//! element (level 1) or a node `(delta, f, g)` representing `(f, g)` in
//! `K_{delta+1} = K_delta^{G_delta} x| G_delta`, where `f` is a finitely
//! supported map from `G_delta` into elements of level at most `delta`.
//!
//! Canonical form: `f` never stores identity values, and a node whose `g`
//! part is the identity and whose support lies inside the identity key is
//! stripped to the child it embeds. An element of `K_lambda` for limit
//! `lambda` therefore has no `lambda` tag; it lives at its minimal successor
//! level, which makes structural equality coincide with group equality.

use crate::basegroup::{
    self, conforms, format_base_value, g_identity, g_inv, g_mul, parse_base_value, BaseElement,
    GroupSpec,
};
use crate::error::{Error, Result};
use crate::ordinal::{Classification, Ordinal};
use crate::scan::Cursor;
use std::collections::BTreeMap;
use std::fmt;

/// The tower shape: the height `alpha`, the base group `K_1`, and the
/// assignment of an acting group to every level index in `[1, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerConfig {
    alpha: Ordinal,
    base: GroupSpec,
    assignment: Vec<Interval>,
}

/// Half-open ordinal interval `[lo, hi)` mapped to one acting group.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Ordinal,
    pub hi: Ordinal,
    pub group: GroupSpec,
}

/// Sparse element of the tower; see the module docs for the canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TowerElement {
    Base(BaseElement),
    Node(Box<NodeData>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeData {
    pub delta: Ordinal,
    pub f: BTreeMap<BaseElement, TowerElement>,
    pub g: BaseElement,
}

impl TowerElement {
    pub fn base(v: BaseElement) -> Self {
        TowerElement::Base(v)
    }

    /// Raw node constructor; the result may be non-canonical.
    pub fn raw_node(
        delta: Ordinal,
        f: BTreeMap<BaseElement, TowerElement>,
        g: BaseElement,
    ) -> Self {
        TowerElement::Node(Box::new(NodeData { delta, f, g }))
    }

    /// Minimal `beta` with the element in `K_beta`: 1 for base values,
    /// `delta + 1` for nodes.
    pub fn level(&self) -> Ordinal {
        match self {
            TowerElement::Base(_) => Ordinal::one(),
            TowerElement::Node(n) => n.delta.succ(),
        }
    }

    /// Identity test for canonical elements.
    pub fn is_identity(&self) -> bool {
        matches!(self, TowerElement::Base(v) if v.is_identity())
    }

    pub fn as_node(&self) -> Option<&NodeData> {
        match self {
            TowerElement::Base(_) => None,
            TowerElement::Node(n) => Some(n),
        }
    }
}

impl TowerConfig {
    pub fn new(alpha: Ordinal, base: GroupSpec, assignment: Vec<Interval>) -> Result<Self> {
        if alpha <= Ordinal::one() {
            return Err(Error::Config(format!("alpha must exceed 1, got {alpha}")));
        }
        base.validate()?;
        if assignment.is_empty() {
            return Err(Error::Config("assignment must cover [1, alpha)".into()));
        }
        let mut expected_lo = Ordinal::one();
        for iv in &assignment {
            iv.group.validate()?;
            if iv.lo != expected_lo {
                return Err(Error::Config(format!(
                    "assignment interval [{}, {}) does not start at {} (intervals must tile [1, alpha) in order)",
                    iv.lo, iv.hi, expected_lo
                )));
            }
            if iv.lo >= iv.hi {
                return Err(Error::Config(format!(
                    "assignment interval [{}, {}) is empty",
                    iv.lo, iv.hi
                )));
            }
            expected_lo = iv.hi.clone();
        }
        if expected_lo != alpha {
            return Err(Error::Config(format!(
                "assignment ends at {expected_lo} but alpha is {alpha}"
            )));
        }
        Ok(TowerConfig {
            alpha,
            base,
            assignment,
        })
    }

    /// One acting group for every level: the assignment `[1, alpha) -> g`.
    pub fn uniform(alpha: Ordinal, base: GroupSpec, g: GroupSpec) -> Result<Self> {
        let hi = alpha.clone();
        TowerConfig::new(
            alpha,
            base,
            vec![Interval {
                lo: Ordinal::one(),
                hi,
                group: g,
            }],
        )
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }

    pub fn base(&self) -> &GroupSpec {
        &self.base
    }

    pub fn assignment(&self) -> &[Interval] {
        &self.assignment
    }

    /// The acting group `G_delta`, for `1 <= delta < alpha`.
    pub fn group_at(&self, delta: &Ordinal) -> Result<&GroupSpec> {
        self.assignment
            .iter()
            .find(|iv| iv.lo <= *delta && *delta < iv.hi)
            .map(|iv| &iv.group)
            .ok_or_else(|| {
                Error::Range(format!(
                    "level index {delta} is outside [1, {})",
                    self.alpha
                ))
            })
    }

    pub fn identity(&self) -> TowerElement {
        TowerElement::Base(g_identity(&self.base))
    }

    /// Node constructor that applies the canonical strip rule, assuming the
    /// children in `f` are canonical and non-identity.
    pub(crate) fn node(
        &self,
        delta: Ordinal,
        f: BTreeMap<BaseElement, TowerElement>,
        g: BaseElement,
    ) -> TowerElement {
        if g.is_identity() {
            if f.is_empty() {
                return self.identity();
            }
            if f.len() == 1 {
                let (k, v) = f.iter().next().unwrap();
                if k.is_identity() {
                    return v.clone();
                }
            }
        }
        TowerElement::raw_node(delta, f, g)
    }

    /// View `x` as a pair `(f, g)` at node index `delta`, embedding lower
    /// elements at the identity point.
    fn pair_at(
        &self,
        x: &TowerElement,
        delta: &Ordinal,
        gid: &BaseElement,
    ) -> (BTreeMap<BaseElement, TowerElement>, BaseElement) {
        if let TowerElement::Node(n) = x {
            if n.delta == *delta {
                return (n.f.clone(), n.g.clone());
            }
        }
        let mut f = BTreeMap::new();
        if !x.is_identity() {
            f.insert(gid.clone(), x.clone());
        }
        (f, gid.clone())
    }

    /// Wreath-product multiplication: at a common node index `delta`,
    /// `(f1, g1)(f2, g2) = (t -> f1(t) * f2(g1^-1 t), g1 g2)`, with the
    /// lower operand embedded at the identity point first. The result is
    /// canonical when the operands are.
    pub fn mul(&self, x: &TowerElement, y: &TowerElement) -> Result<TowerElement> {
        if let (TowerElement::Base(a), TowerElement::Base(b)) = (x, y) {
            return Ok(TowerElement::Base(g_mul(&self.base, a, b)?));
        }
        let delta = match (x.as_node(), y.as_node()) {
            (Some(a), Some(b)) => {
                if a.delta >= b.delta {
                    a.delta.clone()
                } else {
                    b.delta.clone()
                }
            }
            (Some(a), None) => a.delta.clone(),
            (None, Some(b)) => b.delta.clone(),
            (None, None) => unreachable!("base-base handled above"),
        };
        let spec = self.group_at(&delta)?;
        let gid = g_identity(spec);
        let (mut f, g1) = self.pair_at(x, &delta, &gid);
        let (f2, g2) = self.pair_at(y, &delta, &gid);
        for (k2, v2) in f2 {
            let t = g_mul(spec, &g1, &k2)?;
            match f.entry(t) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let prod = self.mul(e.get(), &v2)?;
                    if prod.is_identity() {
                        e.remove();
                    } else {
                        *e.get_mut() = prod;
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v2);
                }
            }
        }
        let g = g_mul(spec, &g1, &g2)?;
        Ok(self.node(delta, f, g))
    }

    /// Inverse `(f, g)^-1 = (t -> f(g t)^-1, g^-1)`.
    pub fn inv(&self, x: &TowerElement) -> Result<TowerElement> {
        match x {
            TowerElement::Base(a) => Ok(TowerElement::Base(g_inv(&self.base, a)?)),
            TowerElement::Node(n) => {
                let spec = self.group_at(&n.delta)?;
                let ginv = g_inv(spec, &n.g)?;
                let mut f = BTreeMap::new();
                for (k, v) in &n.f {
                    let t = g_mul(spec, &ginv, k)?;
                    f.insert(t, self.inv(v)?);
                }
                Ok(self.node(n.delta.clone(), f, ginv))
            }
        }
    }

    /// `x y x^-1`.
    pub fn conjugate(&self, x: &TowerElement, y: &TowerElement) -> Result<TowerElement> {
        let xy = self.mul(x, y)?;
        self.mul(&xy, &self.inv(x)?)
    }

    /// Rewrites a structurally well-formed element into canonical form:
    /// identity children are dropped and trivial wrappers stripped,
    /// recursively. Idempotent.
    pub fn canonicalize(&self, x: &TowerElement) -> Result<TowerElement> {
        match x {
            TowerElement::Base(v) => Ok(TowerElement::Base(v.clone())),
            TowerElement::Node(n) => {
                let mut f = BTreeMap::new();
                for (k, v) in &n.f {
                    let cv = self.canonicalize(v)?;
                    if !cv.is_identity() {
                        f.insert(k.clone(), cv);
                    }
                }
                Ok(self.node(n.delta.clone(), f, n.g.clone()))
            }
        }
    }

    /// The representation of `x` viewed in `K_target`: a single wrapper node
    /// supported at the identity point. The output is deliberately
    /// non-canonical (canonicalizing it returns `x`); `target` must be 1 or a
    /// successor at or above the level of `x`.
    pub fn lift(&self, x: &TowerElement, target: &Ordinal) -> Result<TowerElement> {
        let lvl = x.level();
        match target.cmp(&lvl) {
            std::cmp::Ordering::Less => Err(Error::Precondition(format!(
                "lift target {target} is below the element level {lvl}"
            ))),
            std::cmp::Ordering::Equal => Ok(x.clone()),
            std::cmp::Ordering::Greater => {
                let Classification::Successor(delta) = target.classify() else {
                    return Err(Error::Precondition(format!(
                        "lift target {target} must be 1 or a successor ordinal"
                    )));
                };
                let spec = self.group_at(&delta)?;
                let gid = g_identity(spec);
                let mut f = BTreeMap::new();
                f.insert(gid.clone(), x.clone());
                Ok(TowerElement::raw_node(delta, f, gid))
            }
        }
    }

    /// Full well-formedness check: spec conformance of every key and `g`
    /// part, child levels at most `delta`, node indices inside `[1, alpha)`,
    /// and canonical form.
    pub fn validate_element(&self, x: &TowerElement) -> Result<()> {
        match x {
            TowerElement::Base(v) => {
                if conforms(&self.base, v) {
                    Ok(())
                } else {
                    Err(Error::Conformance(format!(
                        "base value {v:?} does not belong to {}",
                        self.base
                    )))
                }
            }
            TowerElement::Node(n) => {
                let spec = self.group_at(&n.delta)?;
                if !conforms(spec, &n.g) {
                    return Err(Error::Conformance(format!(
                        "g part {:?} does not belong to {spec}",
                        n.g
                    )));
                }
                if n.g.is_identity() && n.f.keys().all(BaseElement::is_identity) {
                    return Err(Error::Conformance(
                        "non-canonical wrapper node (identity g, support inside the identity key)"
                            .into(),
                    ));
                }
                for (k, v) in &n.f {
                    if !conforms(spec, k) {
                        return Err(Error::Conformance(format!(
                            "support key {k:?} does not belong to {spec}"
                        )));
                    }
                    if v.is_identity() {
                        return Err(Error::Conformance(
                            "support contains an identity child".into(),
                        ));
                    }
                    if v.level() > n.delta {
                        return Err(Error::Conformance(format!(
                            "child at level {} exceeds the node index {}",
                            v.level(),
                            n.delta
                        )));
                    }
                    self.validate_element(v)?;
                }
                Ok(())
            }
        }
    }

    /// Candidate node indices `delta` with `delta + 1 <= bound`, collected by
    /// descending from `bound` through predecessors and fundamental-sequence
    /// entries.
    fn candidate_deltas<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        bound: &Ordinal,
    ) -> Vec<Ordinal> {
        let mut out = Vec::new();
        let mut cur = bound.clone();
        while out.len() < 8 {
            match cur.classify() {
                Classification::Zero => break,
                Classification::Successor(p) => {
                    cur = p;
                }
                Classification::Limit => {
                    let n = rng.gen_range(1..=4);
                    cur = cur.fundamental_sequence(n).expect("limit ordinal");
                }
            }
            if cur.is_zero() {
                break;
            }
            out.push(cur.clone());
        }
        out
    }

    /// Canonical pseudo-random element with nesting depth at most
    /// `depth`, per-node support at most `support`, and integer magnitudes at
    /// most `magnitude`. Node indices are drawn from successor levels
    /// reachable from `alpha` by fundamental sequences.
    pub fn random_element<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        depth: u32,
        support: u32,
        magnitude: u64,
    ) -> TowerElement {
        let bound = self.alpha.clone();
        self.random_at_most(rng, &bound, depth, support, magnitude)
    }

    /// As [`random_element`](Self::random_element), but every produced
    /// element has level at most `bound`.
    pub fn random_element_at_most<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        bound: &Ordinal,
        depth: u32,
        support: u32,
        magnitude: u64,
    ) -> TowerElement {
        self.random_at_most(rng, bound, depth, support, magnitude)
    }

    fn random_at_most<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        bound: &Ordinal,
        depth: u32,
        support: u32,
        magnitude: u64,
    ) -> TowerElement {
        let base_only = depth <= 1 || *bound <= Ordinal::one() || rng.gen_bool(0.25);
        if !base_only {
            let cands = self.candidate_deltas(rng, bound);
            if !cands.is_empty() {
                let delta = cands[rng.gen_range(0..cands.len())].clone();
                let spec = self.group_at(&delta).expect("candidate inside [1, alpha)");
                let g = basegroup::sample_element(spec, rng, magnitude);
                let mut f = BTreeMap::new();
                let slots = rng.gen_range(0..=support);
                for _ in 0..slots {
                    let key = basegroup::sample_element(spec, rng, magnitude);
                    let val = self.random_at_most(rng, &delta, depth - 1, support, magnitude);
                    if !val.is_identity() {
                        f.insert(key, val);
                    }
                }
                return self.node(delta, f, g);
            }
        }
        TowerElement::Base(basegroup::sample_element(&self.base, rng, magnitude))
    }

    // --- text forms -----------------------------------------------------

    /// Parse an element literal; see the module grammar. The result is
    /// canonicalized and validated against the configuration.
    pub fn parse_element(&self, text: &str) -> Result<TowerElement> {
        let mut cur = Cursor::new(text);
        let raw = self.parse_elem(&mut cur)?;
        cur.expect_end()?;
        let elem = self.canonicalize(&raw)?;
        self.validate_element(&elem)?;
        Ok(elem)
    }

    fn parse_elem(&self, cur: &mut Cursor) -> Result<TowerElement> {
        match cur.peek() {
            Some(b'b') => {
                cur.bump();
                cur.expect(b'(')?;
                let v = parse_base_value(&self.base, cur)?;
                cur.expect(b')')?;
                Ok(TowerElement::Base(v))
            }
            Some(b'{') => {
                cur.bump();
                if !cur.eat_str("d=") {
                    return Err(cur.error("expected 'd='"));
                }
                let delta = crate::ordinal::parse_ord(cur)?;
                cur.expect(b';')?;
                let spec = self.group_at(&delta).map_err(|_| {
                    Error::Range(format!(
                        "node index {delta} puts the element at level {} beyond alpha = {}",
                        delta.succ(),
                        self.alpha
                    ))
                })?;
                if !cur.eat_str("g=") {
                    return Err(cur.error("expected 'g='"));
                }
                let g = parse_base_value(spec, cur)?;
                cur.expect(b';')?;
                if !cur.eat_str("f=") {
                    return Err(cur.error("expected 'f='"));
                }
                cur.expect(b'{')?;
                let mut f = BTreeMap::new();
                if cur.peek() != Some(b'}') {
                    loop {
                        let key = parse_base_value(spec, cur)?;
                        cur.expect(b':')?;
                        let val = self.parse_elem(cur)?;
                        if val.level() > delta {
                            return Err(Error::Conformance(format!(
                                "child at level {} exceeds the node index {delta}",
                                val.level()
                            )));
                        }
                        f.insert(key, val);
                        if !cur.eat(b',') {
                            break;
                        }
                    }
                }
                cur.expect(b'}')?;
                cur.expect(b'}')?;
                Ok(TowerElement::raw_node(delta, f, g))
            }
            _ => Err(cur.error("expected an element ('b(...)' or '{d=...}')")),
        }
    }

    /// Canonical text form, inverse to [`parse_element`](Self::parse_element).
    pub fn format_element(&self, x: &TowerElement) -> String {
        format_element(x)
    }
}

/// Render an element literal; formatting needs no configuration because
/// values carry their own shape.
pub fn format_element(x: &TowerElement) -> String {
    let mut out = String::new();
    write_element(&mut out, x);
    out
}

fn write_element(out: &mut String, x: &TowerElement) {
    use std::fmt::Write;
    match x {
        TowerElement::Base(v) => {
            out.push_str("b(");
            out.push_str(&format_base_value(v));
            out.push(')');
        }
        TowerElement::Node(n) => {
            write!(out, "{{d={}; g={}; f={{", n.delta, format_base_value(&n.g)).unwrap();
            for (i, (k, v)) in n.f.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format_base_value(k));
                out.push_str(": ");
                write_element(out, v);
            }
            out.push_str("}}");
        }
    }
}

// Debug output shows element literals, which keeps test failures readable.
impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_element(self))
    }
}

// --- config files -------------------------------------------------------

#[derive(serde::Deserialize)]
struct RawConfig {
    alpha: String,
    base: String,
    assignment: Vec<RawInterval>,
}

#[derive(serde::Deserialize)]
struct RawInterval {
    lo: String,
    hi: String,
    group: String,
}

impl TowerConfig {
    /// Load a configuration from its JSON form:
    /// `{"alpha": "w + 1", "base": "Z", "assignment": [{"lo": "1", "hi": "w + 1", "group": "C(2)"}]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| Error::Syntax(format!("config is not well-formed JSON: {e}")))?;
        let alpha = crate::ordinal::parse_ordinal(&raw.alpha)?;
        let base = basegroup::parse_group_spec(&raw.base)?;
        let assignment = raw
            .assignment
            .into_iter()
            .map(|iv| {
                Ok(Interval {
                    lo: crate::ordinal::parse_ordinal(&iv.lo)?,
                    hi: crate::ordinal::parse_ordinal(&iv.hi)?,
                    group: basegroup::parse_group_spec(&iv.group)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TowerConfig::new(alpha, base, assignment)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha.to_string(),
            "base": self.base.to_string(),
            "assignment": self.assignment.iter().map(|iv| serde_json::json!({
                "lo": iv.lo.to_string(),
                "hi": iv.hi.to_string(),
                "group": iv.group.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}
