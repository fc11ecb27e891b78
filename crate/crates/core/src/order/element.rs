//! Canonical element addresses and exact comparison.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::order::rational::{Dyadic, Rational};
use crate::order::term::OrderTerm;
use crate::skolem::coloring::shuffle_engine;

/// A point of the order denoted by some [`OrderTerm`].
///
/// The shape mirrors the term: `Idx` for `FinOrd` and `Omega`, `Rat` for
/// `Rationals`, `Rev` for `Reverse`, `Left`/`Right` for `Sum`, `Shuf` for
/// `Shuffle`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Idx(u64),
    Rat(Rational),
    Rev(Box<Element>),
    Left(Box<Element>),
    Right(Box<Element>),
    Shuf {
        pos: Dyadic,
        color: usize,
        sub: Box<Element>,
    },
}

impl Element {
    pub fn rev(e: Element) -> Element {
        Element::Rev(Box::new(e))
    }

    pub fn left(e: Element) -> Element {
        Element::Left(Box::new(e))
    }

    pub fn right(e: Element) -> Element {
        Element::Right(Box::new(e))
    }

    pub fn shuf(pos: Dyadic, color: usize, sub: Element) -> Element {
        Element::Shuf {
            pos,
            color,
            sub: Box::new(sub),
        }
    }

    /// Nesting depth of the address.
    pub fn depth(&self) -> usize {
        match self {
            Element::Idx(_) | Element::Rat(_) => 1,
            Element::Rev(e) | Element::Left(e) | Element::Right(e) => 1 + e.depth(),
            Element::Shuf { sub, .. } => 1 + sub.depth(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Element::Idx(k) => json!(k),
            Element::Rat(q) => json!(q.to_string()),
            Element::Rev(e) => json!({ "rev": e.to_json() }),
            Element::Left(e) => json!({ "sum": "L", "sub": e.to_json() }),
            Element::Right(e) => json!({ "sum": "R", "sub": e.to_json() }),
            Element::Shuf { pos, color, sub } => {
                json!({ "pos": pos.to_string(), "color": color, "sub": sub.to_json() })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Element> {
        let bad = || Error::TypeMismatch(format!("malformed element: {v}"));
        match v {
            Value::Number(n) => n.as_u64().map(Element::Idx).ok_or_else(bad),
            Value::String(s) => s.parse().map(Element::Rat),
            Value::Object(m) => {
                if let Some(e) = m.get("rev") {
                    return Ok(Element::rev(Element::from_json(e)?));
                }
                let sub = Element::from_json(m.get("sub").ok_or_else(bad)?)?;
                if let Some(side) = m.get("sum") {
                    return match side.as_str() {
                        Some("L") => Ok(Element::left(sub)),
                        Some("R") => Ok(Element::right(sub)),
                        _ => Err(bad()),
                    };
                }
                let pos: Dyadic = m.get("pos").and_then(Value::as_str).ok_or_else(bad)?.parse()?;
                let color = m.get("color").and_then(Value::as_u64).ok_or_else(bad)? as usize;
                Ok(Element::shuf(pos, color, sub))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Element::from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn mismatch(t: &OrderTerm, e: &Element) -> Error {
    Error::TypeMismatch(format!("{e} does not address an element of {t}"))
}

/// Checks that `e` addresses an element of `t`, including that shuffle
/// colors agree with the coloring at their positions.
pub fn typecheck(t: &OrderTerm, e: &Element) -> Result<()> {
    match (t, e) {
        (OrderTerm::FinOrd(n), Element::Idx(k)) if k < n => Ok(()),
        (OrderTerm::Omega, Element::Idx(_)) => Ok(()),
        (OrderTerm::Rationals, Element::Rat(_)) => Ok(()),
        (OrderTerm::Reverse(t), Element::Rev(e)) => typecheck(t, e),
        (OrderTerm::Sum(a, _), Element::Left(e)) => typecheck(a, e),
        (OrderTerm::Sum(_, b), Element::Right(e)) => typecheck(b, e),
        (OrderTerm::Shuffle(ps), Element::Shuf { pos, color, sub }) => {
            if *color >= ps.len() || shuffle_engine(ps.len()).color_of_index(pos.index()) != *color {
                return Err(mismatch(t, e));
            }
            typecheck(&ps[*color], sub)
        }
        _ => Err(mismatch(t, e)),
    }
}

/// Exact comparison of two elements of `t`.
///
/// ```
/// use std::cmp::Ordering;
/// use csb_shuffle::order::{compare, parse_term, Element};
/// let t = parse_term("rev(w)").unwrap();
/// let a = Element::rev(Element::Idx(3));
/// let b = Element::rev(Element::Idx(5));
/// assert_eq!(compare(&t, &a, &b).unwrap(), Ordering::Greater);
/// ```
pub fn compare(t: &OrderTerm, a: &Element, b: &Element) -> Result<Ordering> {
    typecheck(t, a)?;
    typecheck(t, b)?;
    Ok(compare_unchecked(t, a, b))
}

/// Comparison without the well-typedness check. Elements must fit `t`.
pub fn compare_unchecked(t: &OrderTerm, a: &Element, b: &Element) -> Ordering {
    match (t, a, b) {
        (_, Element::Idx(x), Element::Idx(y)) => x.cmp(y),
        (_, Element::Rat(x), Element::Rat(y)) => x.cmp(y),
        (OrderTerm::Reverse(t), Element::Rev(x), Element::Rev(y)) => compare_unchecked(t, x, y).reverse(),
        (OrderTerm::Sum(l, _), Element::Left(x), Element::Left(y)) => compare_unchecked(l, x, y),
        (OrderTerm::Sum(_, r), Element::Right(x), Element::Right(y)) => compare_unchecked(r, x, y),
        (OrderTerm::Sum(..), Element::Left(_), Element::Right(_)) => Ordering::Less,
        (OrderTerm::Sum(..), Element::Right(_), Element::Left(_)) => Ordering::Greater,
        (
            OrderTerm::Shuffle(ps),
            Element::Shuf { pos: p, color: c, sub: x },
            Element::Shuf { pos: q, sub: y, .. },
        ) => p.cmp(q).then_with(|| compare_unchecked(&ps[*c], x, y)),
        _ => panic!("ill-typed comparison of {a} and {b} in {t}"),
    }
}

/// Comparison inside `rev(t)`: the flip of the comparison inside `t`.
/// Elements must have the `Rev` shape.
pub fn reverse_semantics(t: &OrderTerm, a: &Element, b: &Element) -> Result<Ordering> {
    compare(&OrderTerm::rev(t.clone()), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::parse_term;

    #[test]
    fn basic_comparisons() {
        let t = parse_term("1+1").unwrap();
        let l = Element::left(Element::Idx(0));
        let r = Element::right(Element::Idx(0));
        assert_eq!(compare(&t, &l, &r).unwrap(), Ordering::Less);

        let t = parse_term("shuffle{2}").unwrap();
        let h = Dyadic::half();
        let a = Element::shuf(h, 0, Element::Idx(0));
        let b = Element::shuf(h, 0, Element::Idx(1));
        assert_eq!(compare(&t, &a, &b).unwrap(), Ordering::Less);

        let t = parse_term("2").unwrap();
        assert!(matches!(
            compare(&t, &Element::Idx(2), &Element::Idx(0)),
            Err(Error::TypeMismatch(_))
        ));
    }

    #[test]
    fn reverse_flips() {
        let t = OrderTerm::FinOrd(2);
        let a = Element::rev(Element::Idx(0));
        let b = Element::rev(Element::Idx(1));
        assert_eq!(reverse_semantics(&t, &a, &b).unwrap(), Ordering::Greater);
    }

    #[test]
    fn json_roundtrip() {
        let e = Element::shuf(
            Dyadic::new(3, 2).unwrap(),
            1,
            Element::left(Element::rev(Element::Rat(Rational::new(-2, 3)))),
        );
        let v = e.to_json();
        assert_eq!(v["pos"], "3/4");
        assert_eq!(Element::from_json(&v).unwrap(), e);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<Element>(&s).unwrap(), e);
    }
}
