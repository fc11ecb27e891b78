//! The two shuffles in self-nested form.
//!
//! `L_i` is presented as the shuffle of `S⁰_i` together with a copy of `L_i`
//! itself at every position of the shared sentinel set `R`. An element is a
//! finite run of `R` positions (`nest`), then a position outside `R` carrying
//! an element of that position's shuffland. The synthetic extension adds
//! `Deep` elements: an infinite run of `R` positions plus a rational payload.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::order::element::{compare_unchecked, typecheck};
use crate::order::{Dyadic, Element, Enumeration, OrderTerm};
use crate::skolem::coloring::{Color, DenseColoring, SentinelSet};
use crate::skolem::identities;
use crate::skolem::points::{ColorFn, Ent, Periodic, Point, Shape, Structure};
use crate::skolem::witness::Traced;

/// One of the two sides, written `+` and `-`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `(-1)^n` times this sign.
    pub fn alt(self, n: usize) -> Sign {
        if n.is_multiple_of(2) {
            self
        } else {
            self.neg()
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" | "plus" => Some(Sign::Plus),
            "-" | "minus" => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An element of one side.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SideElem {
    Finite {
        nest: Vec<Dyadic>,
        pos: Dyadic,
        color: usize,
        sub: Element,
    },
    Deep {
        path: Periodic,
        sub: Element,
    },
}

impl SideElem {
    /// The `n`-th position, if the element has one.
    pub fn entry(&self, n: usize) -> Option<Dyadic> {
        match self {
            SideElem::Finite { nest, pos, .. } => match n.cmp(&nest.len()) {
                Ordering::Less => Some(nest[n]),
                Ordering::Equal => Some(*pos),
                Ordering::Greater => None,
            },
            SideElem::Deep { path, .. } => path.at(n).dyadic(),
        }
    }

    pub fn first(&self) -> Dyadic {
        self.entry(0).expect("elements have a first position")
    }

    /// The element placed in the copy at `q`.
    pub fn prepend(&self, q: Dyadic) -> SideElem {
        match self {
            SideElem::Finite { nest, pos, color, sub } => {
                let mut v = Vec::with_capacity(nest.len() + 1);
                v.push(q);
                v.extend_from_slice(nest);
                SideElem::Finite {
                    nest: v,
                    pos: *pos,
                    color: *color,
                    sub: sub.clone(),
                }
            }
            SideElem::Deep { path, sub } => SideElem::Deep {
                path: path.prepend(Ent::Dy(q)),
                sub: sub.clone(),
            },
        }
    }

    /// Removes the first position if it is a nesting position.
    pub fn drop_first(&self) -> Option<SideElem> {
        match self {
            SideElem::Finite { nest, pos, color, sub } if !nest.is_empty() => Some(SideElem::Finite {
                nest: nest[1..].to_vec(),
                pos: *pos,
                color: *color,
                sub: sub.clone(),
            }),
            SideElem::Finite { .. } => None,
            SideElem::Deep { path, sub } => Some(SideElem::Deep {
                path: path.drop_first(1),
                sub: sub.clone(),
            }),
        }
    }

    pub fn nest_len(&self) -> Option<usize> {
        match self {
            SideElem::Finite { nest, .. } => Some(nest.len()),
            SideElem::Deep { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SideElem::Finite { nest, pos, color, sub } => json!({
                "nest": nest.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "pos": pos.to_string(),
                "color": color,
                "sub": sub.to_json(),
            }),
            SideElem::Deep { path, sub } => json!({ "path": path.to_json(), "sub": sub.to_json() }),
        }
    }
}

impl fmt::Display for SideElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideElem::Finite { nest, pos, sub, .. } => {
                for d in nest {
                    write!(f, "{d}.")?;
                }
                write!(f, "{pos}:{sub}")
            }
            SideElem::Deep { path, sub } => write!(f, "{path:?}:{sub}"),
        }
    }
}

impl fmt::Debug for SideElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Traced for SideElem {
    fn trace_json(&self) -> Value {
        self.to_json()
    }
}

const POOL: usize = 32;
const SUB_POOL: usize = 16;

/// One side: its shufflands, coloring and the shared sentinel set.
pub struct Side {
    sign: Sign,
    shufflands: Vec<OrderTerm>,
    coloring: DenseColoring,
    r: SentinelSet,
    r_pool: Vec<Dyadic>,
    free_pool: Vec<Dyadic>,
    sub_pool: Vec<Vec<Element>>,
}

impl fmt::Debug for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Side")
            .field("sign", &self.sign)
            .field("shufflands", &self.shufflands)
            .finish()
    }
}

impl Side {
    /// The coloring's palette must list the shufflands in order, then the
    /// sentinel.
    pub fn new(sign: Sign, shufflands: Vec<OrderTerm>, coloring: DenseColoring, r: SentinelSet) -> Side {
        let dy = (0..).map(Dyadic::from_index);
        let r_pool = dy.clone().filter(|d| r.contains(*d)).take(POOL).collect();
        let free_pool = dy.filter(|d| !r.contains(*d)).take(POOL).collect();
        let sub_pool = shufflands
            .iter()
            .map(|t| Enumeration::new(t).prefix(SUB_POOL))
            .collect();
        Side {
            sign,
            shufflands,
            coloring,
            r,
            r_pool,
            free_pool,
            sub_pool,
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn shufflands(&self) -> &[OrderTerm] {
        &self.shufflands
    }

    pub fn coloring(&self) -> &DenseColoring {
        &self.coloring
    }

    pub fn sentinel_set(&self) -> &SentinelSet {
        &self.r
    }

    pub fn in_r(&self, d: Dyadic) -> bool {
        self.r.contains(d)
    }

    /// Shuffland index at `d`, or `None` on `R`.
    pub fn color_at(&self, d: Dyadic) -> Option<usize> {
        if self.in_r(d) {
            None
        } else {
            Some(self.coloring.color_at(d))
        }
    }

    pub fn term(&self, c: usize) -> &OrderTerm {
        &self.shufflands[c]
    }

    /// A finite element, with the color read off the position.
    pub fn finite(&self, nest: Vec<Dyadic>, pos: Dyadic, sub: Element) -> Result<SideElem> {
        let color = self
            .color_at(pos)
            .ok_or_else(|| Error::TypeMismatch(format!("{pos} is a nesting position")))?;
        let x = SideElem::Finite { nest, pos, color, sub };
        self.validate(&x)?;
        Ok(x)
    }

    pub fn validate(&self, x: &SideElem) -> Result<()> {
        match x {
            SideElem::Finite { nest, pos, color, sub } => {
                if let Some(d) = nest.iter().find(|d| !self.in_r(**d)) {
                    return Err(Error::NotInR(d.to_string()));
                }
                if self.color_at(*pos) != Some(*color) {
                    return Err(Error::TypeMismatch(format!("color {color} at {pos}")));
                }
                typecheck(&self.shufflands[*color], sub)
            }
            SideElem::Deep { path, sub } => {
                for e in path.prefix().iter().chain(path.cycle()) {
                    match e.dyadic() {
                        Some(d) if self.in_r(d) => {}
                        _ => return Err(Error::NotInR(e.to_string())),
                    }
                }
                typecheck(&OrderTerm::Rationals, sub)
            }
        }
    }

    pub fn compare(&self, a: &SideElem, b: &SideElem) -> Ordering {
        let horizon = match (a, b) {
            (SideElem::Deep { path: p, .. }, SideElem::Deep { path: q, .. }) => p.horizon_with(q),
            _ => usize::MAX,
        };
        let mut k = 0;
        while k < horizon {
            match (a.entry(k), b.entry(k)) {
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                (Some(_), Some(_)) => k += 1,
                _ => break,
            }
        }
        match (a, b) {
            (SideElem::Finite { color, sub: x, .. }, SideElem::Finite { sub: y, .. }) => {
                compare_unchecked(&self.shufflands[*color], x, y)
            }
            (SideElem::Deep { sub: x, .. }, SideElem::Deep { sub: y, .. }) => {
                compare_unchecked(&OrderTerm::Rationals, x, y)
            }
            _ => unreachable!("finite and deep elements differ at some position"),
        }
    }

    /// The point tree of this side: a fan over the coloring, with the
    /// flattened shufflands and a reference back to the root on `R`.
    pub fn structure(&self) -> Structure {
        let mut keys: Vec<Color> = Vec::new();
        let mut parts: Vec<Shape> = self
            .shufflands
            .iter()
            .map(|t| identities::shape(t, &mut keys))
            .collect();
        parts.push(Shape::Ref(0));
        let (c, r) = (self.coloring.clone(), self.r.clone());
        let n = self.shufflands.len();
        let f: ColorFn = Arc::new(move |d: Dyadic| if r.contains(d) { n } else { c.color_at(d) });
        Structure::new(Shape::fan(f, parts), keys)
    }

    /// Point and payload in [`Side::structure`].
    pub fn split(&self, x: &SideElem) -> Result<(Point, Element)> {
        match x {
            SideElem::Finite { nest, pos, color, sub } => {
                let mut seq: Vec<Ent> = nest.iter().map(|d| Ent::Dy(*d)).collect();
                seq.push(Ent::Dy(*pos));
                let payload = identities::split(&self.shufflands[*color], sub, &mut seq);
                Ok((Point::Node(seq), payload))
            }
            SideElem::Deep { .. } => Err(Error::TypeMismatch(format!("{x} has no point"))),
        }
    }

    /// Inverse of [`Side::split`].
    pub fn join(&self, p: &Point, payload: &Element) -> Result<SideElem> {
        let seq = p.as_node().ok_or_else(|| Error::NotANode(p.to_string()))?;
        let bad = || Error::TypeMismatch(format!("{p} with {payload}"));
        let mut nest = Vec::new();
        for (k, e) in seq.iter().enumerate() {
            let d = e.dyadic().ok_or_else(bad)?;
            if self.in_r(d) {
                nest.push(d);
                continue;
            }
            let c = self.coloring.color_at(d);
            let sub = identities::join(&self.shufflands[c], &seq[k + 1..], payload).ok_or_else(bad)?;
            return self.finite(nest, d, sub);
        }
        Err(bad())
    }

    /// A random finite element with at most `max_nest` nesting positions,
    /// drawn from small pools of positions and shuffland elements.
    pub fn random_elem<G: Rng>(&self, rng: &mut G, max_nest: usize) -> SideElem {
        let n = rng.gen_range(0..=max_nest);
        let nest = (0..n).map(|_| self.r_pool[rng.gen_range(0..self.r_pool.len())]).collect();
        let pos = self.free_pool[rng.gen_range(0..self.free_pool.len())];
        let color = self.coloring.color_at(pos);
        let subs = &self.sub_pool[color];
        let sub = subs[rng.gen_range(0..subs.len())].clone();
        SideElem::Finite { nest, pos, color, sub }
    }

    /// A random element of the given shuffland.
    pub fn random_sub<G: Rng>(&self, rng: &mut G, color: usize) -> Element {
        let subs = &self.sub_pool[color];
        subs[rng.gen_range(0..subs.len())].clone()
    }

    /// A random member of `R` from the pool.
    pub fn random_r<G: Rng>(&self, rng: &mut G) -> Dyadic {
        self.r_pool[rng.gen_range(0..self.r_pool.len())]
    }

    /// A random position outside `R` from the pool.
    pub fn random_free<G: Rng>(&self, rng: &mut G) -> Dyadic {
        self.free_pool[rng.gen_range(0..self.free_pool.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::parse_term;
    use crate::skolem::coloring::{make_shared_sentinel_colorings, Palette};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn side(terms: &[&str]) -> Side {
        let ts: Vec<OrderTerm> = terms.iter().map(|s| parse_term(s).unwrap()).collect();
        let mut p = Palette::terms(ts.clone());
        p.colors.push(Color::Label("R".into()));
        let p = p.with_sentinel(ts.len());
        let (a, _, r) = make_shared_sentinel_colorings(p.clone(), p).unwrap();
        Side::new(Sign::Plus, ts, a, r)
    }

    #[test]
    fn split_join_roundtrip() {
        let s = side(&["1", "shuffle{1}"]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = s.random_elem(&mut rng, 3);
            s.validate(&x).unwrap();
            let (p, pay) = s.split(&x).unwrap();
            assert_eq!(s.join(&p, &pay).unwrap(), x);
        }
    }

    #[test]
    fn compare_matches_points() {
        let s = side(&["1", "shuffle{1}"]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<SideElem> = (0..60).map(|_| s.random_elem(&mut rng, 2)).collect();
        for a in &xs {
            for b in &xs {
                let (pa, _) = s.split(a).unwrap();
                let (pb, _) = s.split(b).unwrap();
                let expect = match pa.lex(&pb) {
                    crate::skolem::points::Lex::Equal => Ordering::Equal,
                    l => l.ordering(),
                };
                assert_eq!(s.compare(a, b), expect, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn deep_against_finite() {
        let s = side(&["1"]);
        let q = s.r_pool[0];
        let deep = SideElem::Deep {
            path: Periodic::new(vec![], vec![Ent::Dy(q)]),
            sub: Element::Rat(crate::order::Rational::zero()),
        };
        s.validate(&deep).unwrap();
        let lo = s.finite(vec![q, q], s.free_pool.iter().copied().find(|d| *d < q).unwrap(), Element::Idx(0));
        assert_eq!(s.compare(&lo.unwrap(), &deep), Ordering::Less);
        assert_eq!(deep.prepend(q), deep);
    }
}
