//! Cantor-normal-form arithmetic for ordinals below epsilon-zero.
//!
//! An ordinal is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents (themselves ordinals of the same shape) and positive
//! integer coefficients; the empty sum is zero. Canonicality makes structural
//! equality coincide with ordinal equality, and the derived lexicographic
//! order on the term list coincide with the ordinal order.

use crate::error::{Error, Result};
use crate::scan::Cursor;
use std::fmt;

/// Ordinal below epsilon-zero in Cantor normal form.
///
/// The derived `Ord` implements the ordinal order: term lists are compared
/// lexicographically, exponent before coefficient, and a proper prefix is
/// smaller. Natural numbers are the single-term ordinals with exponent zero.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

/// Case split of an ordinal into zero, successor (with predecessor), or limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::from_nat(1)
    }

    pub fn omega() -> Self {
        Ordinal {
            terms: vec![(Ordinal::one(), 1)],
        }
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(Ordinal::zero(), n)],
            }
        }
    }

    /// The single-term ordinal `w^exp * coeff`; zero when `coeff` is zero.
    pub fn from_term(exp: Ordinal, coeff: u64) -> Self {
        if coeff == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(exp, coeff)],
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The natural number this ordinal denotes, if it is finite.
    pub fn to_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    /// Checks the CNF invariants: exponents strictly decreasing, coefficients
    /// positive, recursively canonical exponents.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(e, c)| *c >= 1 && e.is_canonical())
            && self.terms.windows(2).all(|w| w[0].0 > w[1].0)
    }

    pub fn classify(&self) -> Classification {
        match self.terms.last() {
            None => Classification::Zero,
            Some((e, c)) if e.is_zero() => {
                let mut pred = self.clone();
                if *c > 1 {
                    pred.terms.last_mut().unwrap().1 -= 1;
                } else {
                    pred.terms.pop();
                }
                Classification::Successor(pred)
            }
            Some(_) => Classification::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.classify(), Classification::Limit)
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Ordinal addition. Terms of `self` below the leading exponent of `rhs`
    /// are absorbed; a matching exponent merges coefficients.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some((lead_exp, lead_coeff)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = self
            .terms
            .iter()
            .filter(|(e, _)| e > lead_exp)
            .cloned()
            .collect();
        let merged = self
            .terms
            .iter()
            .find(|(e, _)| e == lead_exp)
            .map_or(0, |(_, c)| *c)
            .checked_add(*lead_coeff)
            .expect("ordinal coefficient overflow");
        terms.push((lead_exp.clone(), merged));
        terms.extend(rhs.terms.iter().skip(1).cloned());
        Ordinal { terms }
    }

    /// The `n`-th entry of the canonical fundamental sequence of a limit
    /// ordinal, under the conventions
    /// `(lam + w^(e+1))[n] = lam + w^e * n` and
    /// `(lam + w^e)[n] = lam + w^(e[n])` for limit `e`.
    ///
    /// Rejects zero and successor ordinals.
    pub fn fundamental_sequence(&self, n: u64) -> Result<Ordinal> {
        let Some((exp, coeff)) = self.terms.last() else {
            return Err(Error::Precondition(
                "fundamental sequence of zero is undefined".into(),
            ));
        };
        if exp.is_zero() {
            return Err(Error::Precondition(format!(
                "fundamental sequence of the successor ordinal {self} is undefined"
            )));
        }
        // Split off one copy of the trailing w^exp; the rest is the prefix.
        let mut prefix = self.clone();
        if *coeff > 1 {
            prefix.terms.last_mut().unwrap().1 -= 1;
        } else {
            prefix.terms.pop();
        }
        match exp.classify() {
            Classification::Successor(e) => {
                if n > 0 {
                    prefix.terms.push((e, n));
                }
                Ok(prefix)
            }
            Classification::Limit => {
                let e = exp.fundamental_sequence(n)?;
                prefix.terms.push((e, 1));
                Ok(prefix)
            }
            Classification::Zero => unreachable!("exponent checked nonzero"),
        }
    }
}

/// Pseudo-random canonical ordinal with exponent nesting at most `depth`.
/// Built by summing random single terms, so the result is canonical by
/// construction.
pub fn random_ordinal<R: rand::Rng + ?Sized>(rng: &mut R, depth: u32) -> Ordinal {
    let mut out = Ordinal::from_nat(rng.gen_range(0..6));
    let extra_terms = rng.gen_range(0..=3);
    for _ in 0..extra_terms {
        let exp = if depth == 0 {
            Ordinal::from_nat(rng.gen_range(1..4))
        } else {
            random_ordinal(rng, depth - 1)
        };
        let coeff = rng.gen_range(1..=3);
        out = out.add(&Ordinal::from_term(exp, coeff));
        if rng.gen_bool(0.3) {
            out = out.add(&Ordinal::from_nat(rng.gen_range(0..4)));
        }
    }
    out
}

// --- text form ---------------------------------------------------------
//
// ord  := term ("+" term)*
// term := "w" ("^" expo)? ("*" nat)? | nat
// expo := "(" ord ")" | "w" ("^" expo)? | nat
//
// Whitespace is insignificant. Non-canonical input (unordered or repeated
// exponents) is normalized by ordinal addition, not rejected. The formatter
// emits `w^2*3 + w + 4` spacing and parenthesizes every exponent that is
// neither a natural number nor exactly `w`.

/// Parse ordinal notation; the result is always canonical.
pub fn parse_ordinal(text: &str) -> Result<Ordinal> {
    let mut cur = Cursor::new(text);
    let o = parse_ord(&mut cur)?;
    cur.expect_end()?;
    Ok(o)
}

pub(crate) fn parse_ord(cur: &mut Cursor) -> Result<Ordinal> {
    let mut out = parse_term(cur)?;
    while cur.eat(b'+') {
        let t = parse_term(cur)?;
        out = out.add(&t);
    }
    Ok(out)
}

fn parse_term(cur: &mut Cursor) -> Result<Ordinal> {
    if cur.eat(b'w') {
        let exp = if cur.eat(b'^') {
            parse_expo(cur)?
        } else {
            Ordinal::one()
        };
        let coeff = if cur.eat(b'*') { cur.parse_u64()? } else { 1 };
        Ok(Ordinal::from_term(exp, coeff))
    } else {
        Ok(Ordinal::from_nat(cur.parse_u64()?))
    }
}

fn parse_expo(cur: &mut Cursor) -> Result<Ordinal> {
    if cur.eat(b'(') {
        let o = parse_ord(cur)?;
        cur.expect(b')')?;
        Ok(o)
    } else if cur.eat(b'w') {
        if cur.eat(b'^') {
            Ok(Ordinal::from_term(parse_expo(cur)?, 1))
        } else {
            Ok(Ordinal::omega())
        }
    } else {
        Ok(Ordinal::from_nat(cur.parse_u64()?))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (exp, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if exp.is_zero() {
                write!(f, "{coeff}")?;
                continue;
            }
            write!(f, "w")?;
            if *exp != Ordinal::one() {
                if let Some(n) = exp.to_nat() {
                    write!(f, "^{n}")?;
                } else if *exp == Ordinal::omega() {
                    write!(f, "^w")?;
                } else {
                    write!(f, "^({exp})")?;
                }
            }
            if *coeff != 1 {
                write!(f, "*{coeff}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl std::str::FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ordinal(s)
    }
}

impl serde::Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
