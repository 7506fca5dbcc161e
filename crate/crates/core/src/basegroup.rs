//! Concrete countable discrete groups usable as the base `K_1` and as acting
//! groups `G_beta`: the integers, finite cyclic groups, small symmetric
//! groups, and finite direct products of these.
//!
//! Elements carry plain value semantics. The element order implemented by
//! `Ord` doubles as the deterministic enumeration order: residues ascending,
//! permutations lexicographic by image word, tuples lexicographic, and
//! integers by magnitude then sign (`0, 1, -1, 2, -2, ...`), so that the
//! identity always comes first.

use crate::error::{Error, Result};
use crate::scan::Cursor;
use std::cmp::Ordering;
use std::fmt;

/// Description of one of the supported groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Integers,
    CyclicFinite(u64),
    Symmetric(u32),
    DirectProduct(Vec<GroupSpec>),
}

/// An element of some [`GroupSpec`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BaseElement {
    Int(i64),
    Cyclic(u64),
    Perm(Vec<u8>),
    Tuple(Vec<BaseElement>),
}

/// Degree cap for symmetric groups; keeps exhaustive enumeration tiny.
pub const MAX_SYMMETRIC_DEGREE: u32 = 6;

impl GroupSpec {
    /// Validates the structural bounds. Every spec passing this check is a
    /// non-trivial group, which the tower construction requires of each
    /// acting group.
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Integers => Ok(()),
            GroupSpec::CyclicFinite(n) => {
                if *n >= 2 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("C({n}) needs order >= 2")))
                }
            }
            GroupSpec::Symmetric(d) => {
                if (3..=MAX_SYMMETRIC_DEGREE).contains(d) {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "S({d}) needs degree in 3..={MAX_SYMMETRIC_DEGREE}"
                    )))
                }
            }
            GroupSpec::DirectProduct(fs) => {
                if fs.len() < 2 {
                    return Err(Error::Config(
                        "direct product needs at least 2 factors".into(),
                    ));
                }
                fs.iter().try_for_each(GroupSpec::validate)
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GroupSpec::Integers => false,
            GroupSpec::CyclicFinite(_) | GroupSpec::Symmetric(_) => true,
            GroupSpec::DirectProduct(fs) => fs.iter().all(GroupSpec::is_finite),
        }
    }

    /// Group order, or `None` for infinite groups.
    pub fn order(&self) -> Option<u128> {
        match self {
            GroupSpec::Integers => None,
            GroupSpec::CyclicFinite(n) => Some(*n as u128),
            GroupSpec::Symmetric(d) => Some((1..=*d as u128).product()),
            GroupSpec::DirectProduct(fs) => {
                fs.iter().try_fold(1u128, |acc, f| Some(acc * f.order()?))
            }
        }
    }
}

/// Neutral element of the group.
pub fn g_identity(spec: &GroupSpec) -> BaseElement {
    match spec {
        GroupSpec::Integers => BaseElement::Int(0),
        GroupSpec::CyclicFinite(_) => BaseElement::Cyclic(0),
        GroupSpec::Symmetric(d) => BaseElement::Perm((0..*d as u8).collect()),
        GroupSpec::DirectProduct(fs) => BaseElement::Tuple(fs.iter().map(g_identity).collect()),
    }
}

fn mismatch(spec: &GroupSpec, v: &BaseElement) -> Error {
    Error::Conformance(format!("element {v:?} does not belong to {spec}"))
}

/// Group law. Permutations compose as functions: `(a*b)(x) = a(b(x))`.
pub fn g_mul(spec: &GroupSpec, a: &BaseElement, b: &BaseElement) -> Result<BaseElement> {
    match (spec, a, b) {
        (GroupSpec::Integers, BaseElement::Int(x), BaseElement::Int(y)) => x
            .checked_add(*y)
            .map(BaseElement::Int)
            .ok_or(Error::Overflow("integer base group")),
        (GroupSpec::CyclicFinite(n), BaseElement::Cyclic(x), BaseElement::Cyclic(y)) => {
            Ok(BaseElement::Cyclic((x + y) % n))
        }
        (GroupSpec::Symmetric(d), BaseElement::Perm(p), BaseElement::Perm(q))
            if p.len() == *d as usize && q.len() == *d as usize =>
        {
            Ok(BaseElement::Perm(
                q.iter().map(|&i| p[i as usize]).collect(),
            ))
        }
        (GroupSpec::DirectProduct(fs), BaseElement::Tuple(xs), BaseElement::Tuple(ys))
            if fs.len() == xs.len() && fs.len() == ys.len() =>
        {
            let parts = fs
                .iter()
                .zip(xs.iter().zip(ys))
                .map(|(f, (x, y))| g_mul(f, x, y))
                .collect::<Result<Vec<_>>>()?;
            Ok(BaseElement::Tuple(parts))
        }
        _ => Err(mismatch(spec, a)),
    }
}

pub fn g_inv(spec: &GroupSpec, a: &BaseElement) -> Result<BaseElement> {
    match (spec, a) {
        (GroupSpec::Integers, BaseElement::Int(x)) => x
            .checked_neg()
            .map(BaseElement::Int)
            .ok_or(Error::Overflow("integer base group")),
        (GroupSpec::CyclicFinite(n), BaseElement::Cyclic(x)) => {
            Ok(BaseElement::Cyclic(if *x == 0 { 0 } else { n - x }))
        }
        (GroupSpec::Symmetric(d), BaseElement::Perm(p)) if p.len() == *d as usize => {
            let mut inv = vec![0u8; p.len()];
            for (i, &pi) in p.iter().enumerate() {
                inv[pi as usize] = i as u8;
            }
            Ok(BaseElement::Perm(inv))
        }
        (GroupSpec::DirectProduct(fs), BaseElement::Tuple(xs)) if fs.len() == xs.len() => {
            let parts = fs
                .iter()
                .zip(xs)
                .map(|(f, x)| g_inv(f, x))
                .collect::<Result<Vec<_>>>()?;
            Ok(BaseElement::Tuple(parts))
        }
        _ => Err(mismatch(spec, a)),
    }
}

/// Whether `v` is a well-formed element of `spec`.
pub fn conforms(spec: &GroupSpec, v: &BaseElement) -> bool {
    match (spec, v) {
        (GroupSpec::Integers, BaseElement::Int(_)) => true,
        (GroupSpec::CyclicFinite(n), BaseElement::Cyclic(x)) => x < n,
        (GroupSpec::Symmetric(d), BaseElement::Perm(p)) => {
            p.len() == *d as usize && {
                let mut seen = vec![false; p.len()];
                p.iter().all(|&i| {
                    (i as usize) < p.len() && !std::mem::replace(&mut seen[i as usize], true)
                })
            }
        }
        (GroupSpec::DirectProduct(fs), BaseElement::Tuple(xs)) => {
            fs.len() == xs.len() && fs.iter().zip(xs).all(|(f, x)| conforms(f, x))
        }
        _ => false,
    }
}

/// Every element of a finite group exactly once, identity first, in the
/// deterministic order described at module level.
pub fn enumerate_group(spec: &GroupSpec) -> Result<Vec<BaseElement>> {
    match spec {
        GroupSpec::Integers => Err(Error::InfiniteGroup("cannot enumerate Z".into())),
        GroupSpec::CyclicFinite(n) => Ok((0..*n).map(BaseElement::Cyclic).collect()),
        GroupSpec::Symmetric(d) => {
            let mut out = Vec::new();
            let mut avail: Vec<u8> = (0..*d as u8).collect();
            let mut cur = Vec::new();
            perms_lex(&mut avail, &mut cur, &mut out);
            Ok(out)
        }
        GroupSpec::DirectProduct(fs) => {
            let factors = fs.iter().map(enumerate_group).collect::<Result<Vec<_>>>()?;
            let mut out = vec![Vec::new()];
            for f in &factors {
                let mut next = Vec::with_capacity(out.len() * f.len());
                for prefix in &out {
                    for v in f {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        next.push(t);
                    }
                }
                out = next;
            }
            Ok(out.into_iter().map(BaseElement::Tuple).collect())
        }
    }
}

fn perms_lex(avail: &mut Vec<u8>, cur: &mut Vec<u8>, out: &mut Vec<BaseElement>) {
    if avail.is_empty() {
        out.push(BaseElement::Perm(cur.clone()));
        return;
    }
    for i in 0..avail.len() {
        let v = avail.remove(i);
        cur.push(v);
        perms_lex(avail, cur, out);
        cur.pop();
        avail.insert(i, v);
    }
}

/// Pseudo-random element; for the integers the magnitude is at most
/// `size_bound`. Deterministic given the rng state.
pub fn sample_element<R: rand::Rng + ?Sized>(
    spec: &GroupSpec,
    rng: &mut R,
    size_bound: u64,
) -> BaseElement {
    match spec {
        GroupSpec::Integers => {
            let b = size_bound.max(1) as i64;
            BaseElement::Int(rng.gen_range(-b..=b))
        }
        GroupSpec::CyclicFinite(n) => BaseElement::Cyclic(rng.gen_range(0..*n)),
        GroupSpec::Symmetric(d) => {
            let mut p: Vec<u8> = (0..*d as u8).collect();
            for i in (1..p.len()).rev() {
                p.swap(i, rng.gen_range(0..=i));
            }
            BaseElement::Perm(p)
        }
        GroupSpec::DirectProduct(fs) => BaseElement::Tuple(
            fs.iter()
                .map(|f| sample_element(f, rng, size_bound))
                .collect(),
        ),
    }
}

/// The first non-identity element in enumeration order. For products this is
/// the identity tuple with the last coordinate bumped, matching the
/// lexicographic enumeration.
pub fn first_non_identity(spec: &GroupSpec) -> BaseElement {
    match spec {
        GroupSpec::Integers => BaseElement::Int(1),
        GroupSpec::CyclicFinite(_) => BaseElement::Cyclic(1),
        GroupSpec::Symmetric(d) => {
            let mut p: Vec<u8> = (0..*d as u8).collect();
            let n = p.len();
            p.swap(n - 2, n - 1);
            BaseElement::Perm(p)
        }
        GroupSpec::DirectProduct(fs) => {
            let mut parts: Vec<BaseElement> = fs.iter().map(g_identity).collect();
            let last = fs.len() - 1;
            parts[last] = first_non_identity(&fs[last]);
            BaseElement::Tuple(parts)
        }
    }
}

impl BaseElement {
    pub fn is_identity(&self) -> bool {
        match self {
            BaseElement::Int(x) => *x == 0,
            BaseElement::Cyclic(x) => *x == 0,
            BaseElement::Perm(p) => p.iter().enumerate().all(|(i, &v)| i as u8 == v),
            BaseElement::Tuple(xs) => xs.iter().all(BaseElement::is_identity),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            BaseElement::Int(_) => 0,
            BaseElement::Cyclic(_) => 1,
            BaseElement::Perm(_) => 2,
            BaseElement::Tuple(_) => 3,
        }
    }
}

impl Ord for BaseElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BaseElement::Int(a), BaseElement::Int(b)) => {
                (a.unsigned_abs(), *a < 0).cmp(&(b.unsigned_abs(), *b < 0))
            }
            (BaseElement::Cyclic(a), BaseElement::Cyclic(b)) => a.cmp(b),
            (BaseElement::Perm(a), BaseElement::Perm(b)) => a.cmp(b),
            (BaseElement::Tuple(a), BaseElement::Tuple(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for BaseElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// --- text forms ---------------------------------------------------------

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Integers => write!(f, "Z"),
            GroupSpec::CyclicFinite(n) => write!(f, "C({n})"),
            GroupSpec::Symmetric(d) => write!(f, "S({d})"),
            GroupSpec::DirectProduct(fs) => {
                write!(f, "P(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parse a group literal: `Z`, `C(n)`, `S(n)`, or `P(spec, spec, ...)`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let mut cur = Cursor::new(text);
    let g = parse_spec(&mut cur)?;
    cur.expect_end()?;
    g.validate()?;
    Ok(g)
}

fn parse_spec(cur: &mut Cursor) -> Result<GroupSpec> {
    match cur.peek() {
        Some(b'Z') => {
            cur.bump();
            Ok(GroupSpec::Integers)
        }
        Some(b'C') => {
            cur.bump();
            cur.expect(b'(')?;
            let n = cur.parse_u64()?;
            cur.expect(b')')?;
            Ok(GroupSpec::CyclicFinite(n))
        }
        Some(b'S') => {
            cur.bump();
            cur.expect(b'(')?;
            let n = cur.parse_u64()?;
            cur.expect(b')')?;
            Ok(GroupSpec::Symmetric(n as u32))
        }
        Some(b'P') => {
            cur.bump();
            cur.expect(b'(')?;
            let mut fs = vec![parse_spec(cur)?];
            while cur.eat(b',') {
                fs.push(parse_spec(cur)?);
            }
            cur.expect(b')')?;
            Ok(GroupSpec::DirectProduct(fs))
        }
        _ => Err(cur.error("expected a group literal (Z, C(n), S(n), P(...))")),
    }
}

/// Render an element value: integers and residues as decimals, permutations
/// as image words `[1,0,2]`, tuples as `(a, b)`.
pub fn format_base_value(v: &BaseElement) -> String {
    let mut s = String::new();
    write_base_value(&mut s, v);
    s
}

fn write_base_value(out: &mut String, v: &BaseElement) {
    use std::fmt::Write;
    match v {
        BaseElement::Int(x) => write!(out, "{x}").unwrap(),
        BaseElement::Cyclic(x) => write!(out, "{x}").unwrap(),
        BaseElement::Perm(p) => {
            out.push('[');
            for (i, v) in p.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push(']');
        }
        BaseElement::Tuple(xs) => {
            out.push('(');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_base_value(out, x);
            }
            out.push(')');
        }
    }
}

/// Parse an element value in the shape dictated by `spec`. Cyclic residues
/// are reduced modulo the order rather than rejected.
pub(crate) fn parse_base_value(spec: &GroupSpec, cur: &mut Cursor) -> Result<BaseElement> {
    match spec {
        GroupSpec::Integers => Ok(BaseElement::Int(cur.parse_i64()?)),
        GroupSpec::CyclicFinite(n) => Ok(BaseElement::Cyclic(cur.parse_u64()? % n)),
        GroupSpec::Symmetric(d) => {
            cur.expect(b'[')?;
            let mut p = Vec::new();
            if cur.peek() != Some(b']') {
                loop {
                    p.push(cur.parse_u64()? as u8);
                    if !cur.eat(b',') {
                        break;
                    }
                }
            }
            cur.expect(b']')?;
            let v = BaseElement::Perm(p);
            if conforms(spec, &v) {
                Ok(v)
            } else {
                Err(cur.error(&format!("not a permutation of degree {d}")))
            }
        }
        GroupSpec::DirectProduct(fs) => {
            cur.expect(b'(')?;
            let mut xs = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    cur.expect(b',')?;
                }
                xs.push(parse_base_value(f, cur)?);
            }
            cur.expect(b')')?;
            Ok(BaseElement::Tuple(xs))
        }
    }
}

impl fmt::Debug for BaseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_base_value(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(n: u64) -> GroupSpec {
        GroupSpec::CyclicFinite(n)
    }

    #[test]
    fn identities() {
        assert_eq!(g_identity(&GroupSpec::Integers), BaseElement::Int(0));
        assert_eq!(g_identity(&c(3)), BaseElement::Cyclic(0));
        assert_eq!(
            g_identity(&GroupSpec::Symmetric(3)),
            BaseElement::Perm(vec![0, 1, 2])
        );
        assert!(g_identity(&GroupSpec::DirectProduct(vec![c(2), c(3)])).is_identity());
    }

    #[test]
    fn mul_examples() {
        let z = GroupSpec::Integers;
        assert_eq!(
            g_mul(&z, &BaseElement::Int(2), &BaseElement::Int(3)).unwrap(),
            BaseElement::Int(5)
        );
        assert_eq!(
            g_mul(&c(2), &BaseElement::Cyclic(1), &BaseElement::Cyclic(1)).unwrap(),
            BaseElement::Cyclic(0)
        );
        // (01) * (12) = (012) as functions, applying the right factor first
        let s3 = GroupSpec::Symmetric(3);
        let t01 = BaseElement::Perm(vec![1, 0, 2]);
        let t12 = BaseElement::Perm(vec![0, 2, 1]);
        let r = g_mul(&s3, &t01, &t12).unwrap();
        assert_eq!(r, BaseElement::Perm(vec![1, 2, 0]));
        assert_eq!(g_inv(&s3, &r).unwrap(), BaseElement::Perm(vec![2, 0, 1]));
    }

    #[test]
    fn spec_mismatch_rejected() {
        assert!(g_mul(&c(2), &BaseElement::Int(1), &BaseElement::Cyclic(1)).is_err());
        assert!(g_inv(&GroupSpec::Symmetric(3), &BaseElement::Perm(vec![0, 1])).is_err());
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate_group(&c(2)).unwrap(),
            vec![BaseElement::Cyclic(0), BaseElement::Cyclic(1)]
        );
        let s3 = enumerate_group(&GroupSpec::Symmetric(3)).unwrap();
        assert_eq!(s3.len(), 6);
        assert!(s3[0].is_identity());
        let p = enumerate_group(&GroupSpec::DirectProduct(vec![c(2), c(3)])).unwrap();
        assert_eq!(p.len(), 6);
        assert!(p[0].is_identity());
        // lexicographic: (0,0), (0,1), (0,2), (1,0), ...
        assert_eq!(
            p[3],
            BaseElement::Tuple(vec![BaseElement::Cyclic(1), BaseElement::Cyclic(0)])
        );
        assert!(enumerate_group(&GroupSpec::Integers).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free() {
        for spec in [
            c(5),
            GroupSpec::Symmetric(4),
            GroupSpec::DirectProduct(vec![c(2), GroupSpec::Symmetric(3)]),
        ] {
            let all = enumerate_group(&spec).unwrap();
            assert_eq!(all.len() as u128, spec.order().unwrap());
            assert!(
                all.windows(2).all(|w| w[0] < w[1]),
                "order broken for {spec}"
            );
            assert!(all.iter().all(|v| conforms(&spec, v)));
        }
    }

    #[test]
    fn first_non_identity_is_second_in_enumeration() {
        for spec in [
            c(2),
            c(7),
            GroupSpec::Symmetric(3),
            GroupSpec::DirectProduct(vec![c(2), c(3)]),
        ] {
            let all = enumerate_group(&spec).unwrap();
            assert_eq!(first_non_identity(&spec), all[1]);
        }
        assert_eq!(
            first_non_identity(&GroupSpec::Integers),
            BaseElement::Int(1)
        );
    }

    #[test]
    fn sampling_is_reproducible_and_bounded() {
        use rand::SeedableRng;
        let spec = GroupSpec::DirectProduct(vec![GroupSpec::Integers, c(7)]);
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let a = sample_element(&spec, &mut r1, 5);
            let b = sample_element(&spec, &mut r2, 5);
            assert_eq!(a, b);
            assert!(conforms(&spec, &a));
            if let BaseElement::Tuple(xs) = &a {
                if let BaseElement::Int(v) = xs[0] {
                    assert!(v.abs() <= 5);
                }
            }
        }
    }

    #[test]
    fn group_literals_roundtrip() {
        for s in ["Z", "C(4)", "S(3)", "P(C(2), Z)", "P(P(C(2), C(2)), S(3))"] {
            let g = parse_group_spec(s).unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!(parse_group_spec("C(1)").is_err());
        assert!(parse_group_spec("S(2)").is_err());
        assert!(parse_group_spec("S(9)").is_err());
        assert!(parse_group_spec("P(Z)").is_err());
        assert!(parse_group_spec("Q(3)").is_err());
    }

    #[test]
    fn integer_order_is_magnitude_then_sign() {
        let mut v = vec![
            BaseElement::Int(-2),
            BaseElement::Int(1),
            BaseElement::Int(0),
            BaseElement::Int(2),
            BaseElement::Int(-1),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                BaseElement::Int(0),
                BaseElement::Int(1),
                BaseElement::Int(-1),
                BaseElement::Int(2),
                BaseElement::Int(-2),
            ]
        );
    }

    fn arb_spec() -> impl Strategy<Value = GroupSpec> {
        prop_oneof![
            Just(GroupSpec::Integers),
            (2u64..8).prop_map(GroupSpec::CyclicFinite),
            (3u32..5).prop_map(GroupSpec::Symmetric),
            ((2u64..5), (3u32..5)).prop_map(|(n, d)| GroupSpec::DirectProduct(vec![
                GroupSpec::CyclicFinite(n),
                GroupSpec::Symmetric(d),
            ])),
        ]
    }

    proptest! {
        #[test]
        fn group_axioms(spec in arb_spec(), seed in 0u64..1000) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = sample_element(&spec, &mut rng, 20);
            let b = sample_element(&spec, &mut rng, 20);
            let c = sample_element(&spec, &mut rng, 20);
            let e = g_identity(&spec);
            let ab_c = g_mul(&spec, &g_mul(&spec, &a, &b).unwrap(), &c).unwrap();
            let a_bc = g_mul(&spec, &a, &g_mul(&spec, &b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(g_mul(&spec, &a, &e).unwrap(), a.clone());
            prop_assert_eq!(g_mul(&spec, &e, &a).unwrap(), a.clone());
            let ai = g_inv(&spec, &a).unwrap();
            prop_assert_eq!(g_mul(&spec, &a, &ai).unwrap(), e.clone());
            prop_assert_eq!(g_mul(&spec, &ai, &a).unwrap(), e);
        }
    }
}
