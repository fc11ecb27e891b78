//! Presented orders and executable witnesses for the shuffle identities.
//!
//! A term is presented as a point tree: every `shuffle` becomes a fan over
//! the dyadics, every sum that contains a shuffle becomes a two-child list
//! (entries 1/4 and 3/4), and every other subterm becomes a leaf whose
//! color is that subterm. An element is then a point plus a payload, the
//! element of the leaf's term. Two terms are isomorphic by back-and-forth
//! whenever their point trees are dense colored orders over the same leaf
//! terms, and the payload is carried across unchanged.

use std::cmp::Ordering;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::order::element::{compare_unchecked, typecheck};
use crate::order::{Dyadic, Element, OrderTerm};
use crate::skolem::coloring::{shuffle_engine, Color, DenseColoring, Palette};
use crate::skolem::points::{ColorFn, Ent, Point, Shape, Structure, TreeOrder};
use crate::skolem::session::{ColoredOrder, Session};
use crate::skolem::witness::{IsoWitness, Traced};

/// Entry of the left summand of a flattened sum.
pub fn left_ent() -> Ent {
    Ent::Dy(Dyadic::new(1, 2).unwrap())
}

/// Entry of the right summand of a flattened sum.
pub fn right_ent() -> Ent {
    Ent::Dy(Dyadic::new(3, 2).unwrap())
}

fn contains_shuffle(t: &OrderTerm) -> bool {
    match t {
        OrderTerm::Shuffle(_) => true,
        OrderTerm::Sum(a, b) => contains_shuffle(a) || contains_shuffle(b),
        _ => false,
    }
}

pub(crate) fn flat(t: &OrderTerm) -> bool {
    matches!(t, OrderTerm::Shuffle(_)) || (matches!(t, OrderTerm::Sum(..)) && contains_shuffle(t))
}

/// A term with its point-tree presentation.
pub struct Presentation {
    term: OrderTerm,
    order: TreeOrder,
}

impl Presentation {
    /// Fails with `PreconditionViolation` when the term has no shuffle at
    /// the top (sums aside), since such a term has no dense presentation.
    pub fn new(term: OrderTerm) -> Result<Presentation> {
        let term = term.normalized();
        if !flat(&term) {
            return Err(Error::PreconditionViolation(format!("{term} is not a shuffle or a sum of shuffles")));
        }
        let mut keys = Vec::new();
        let root = shape(&term, &mut keys);
        Ok(Presentation {
            term,
            order: TreeOrder::new(Structure::new(root, keys)),
        })
    }

    pub fn term(&self) -> &OrderTerm {
        &self.term
    }

    pub fn order(&self) -> &TreeOrder {
        &self.order
    }

    pub fn into_order(self) -> TreeOrder {
        self.order
    }

    /// Point and payload of an element.
    pub fn split(&self, e: &Element) -> Result<(Point, Element)> {
        typecheck(&self.term, e)?;
        let mut seq = Vec::new();
        let payload = split(&self.term, e, &mut seq);
        Ok((Point::Node(seq), payload))
    }

    /// Inverse of [`Presentation::split`].
    pub fn join(&self, p: &Point, payload: &Element) -> Result<Element> {
        let seq = p
            .as_node()
            .ok_or_else(|| Error::NotANode(format!("{p}")))?;
        let e = join(&self.term, seq, payload).ok_or_else(|| Error::TypeMismatch(format!("{p} with {payload}")))?;
        typecheck(&self.term, &e)?;
        Ok(e)
    }

    pub fn compare(&self, a: &Element, b: &Element) -> Ordering {
        compare_unchecked(&self.term, a, b)
    }
}

pub(crate) fn shape(t: &OrderTerm, keys: &mut Vec<Color>) -> Shape {
    match t {
        OrderTerm::Shuffle(ps) => {
            let e = shuffle_engine(ps.len());
            let f: ColorFn = Arc::new(move |d: Dyadic| e.color_of_index(d.index()));
            Shape::fan(f, ps.iter().map(|p| shape(p, keys)).collect())
        }
        OrderTerm::Sum(a, b) if contains_shuffle(t) => {
            let mut v = Vec::new();
            if !a.is_empty() {
                v.push((left_ent(), shape(a, keys)));
            }
            if !b.is_empty() {
                v.push((right_ent(), shape(b, keys)));
            }
            Shape::List(v)
        }
        _ => {
            let key = Color::Term(t.clone());
            let k = keys.iter().position(|c| *c == key).unwrap_or_else(|| {
                keys.push(key);
                keys.len() - 1
            });
            Shape::Leaf(k)
        }
    }
}

pub(crate) fn split(t: &OrderTerm, e: &Element, seq: &mut Vec<Ent>) -> Element {
    match (t, e) {
        (OrderTerm::Shuffle(ps), Element::Shuf { pos, color, sub }) => {
            seq.push(Ent::Dy(*pos));
            split(&ps[*color], sub, seq)
        }
        (OrderTerm::Sum(a, _), Element::Left(x)) if contains_shuffle(t) => {
            seq.push(left_ent());
            split(a, x, seq)
        }
        (OrderTerm::Sum(_, b), Element::Right(x)) if contains_shuffle(t) => {
            seq.push(right_ent());
            split(b, x, seq)
        }
        _ => e.clone(),
    }
}

pub(crate) fn join(t: &OrderTerm, seq: &[Ent], payload: &Element) -> Option<Element> {
    match (t, seq.first()) {
        (OrderTerm::Shuffle(ps), Some(Ent::Dy(pos))) => {
            let color = shuffle_engine(ps.len()).color_of_index(pos.index());
            Some(Element::shuf(*pos, color, join(&ps[color], &seq[1..], payload)?))
        }
        (OrderTerm::Sum(a, b), Some(e)) if contains_shuffle(t) => {
            if *e == left_ent() {
                Some(Element::left(join(a, &seq[1..], payload)?))
            } else if *e == right_ent() {
                Some(Element::right(join(b, &seq[1..], payload)?))
            } else {
                None
            }
        }
        (_, None) if !flat(t) => Some(payload.clone()),
        _ => None,
    }
}

/// The ordered sum of `assign(x)` over the elements `x` of `index`.
pub struct OrderedSum {
    index: OrderTerm,
    assign: Box<dyn Fn(&Element) -> OrderTerm + Send + Sync>,
}

impl OrderedSum {
    pub fn new(index: OrderTerm, assign: Box<dyn Fn(&Element) -> OrderTerm + Send + Sync>) -> OrderedSum {
        OrderedSum { index, assign }
    }

    pub fn index(&self) -> &OrderTerm {
        &self.index
    }

    pub fn summand(&self, x: &Element) -> OrderTerm {
        (self.assign)(x)
    }

    pub fn check(&self, pair: &(Element, Element)) -> Result<()> {
        typecheck(&self.index, &pair.0)?;
        typecheck(&(self.assign)(&pair.0), &pair.1)
    }

    pub fn compare(&self, a: &(Element, Element), b: &(Element, Element)) -> Result<Ordering> {
        self.check(a)?;
        self.check(b)?;
        Ok(compare_unchecked(&self.index, &a.0, &b.0)
            .then_with(|| compare_unchecked(&(self.assign)(&a.0), &a.1, &b.1)))
    }

    /// The first `n` pairs of a dovetailed enumeration.
    pub fn sample(&self, n: usize) -> Vec<(Element, Element)> {
        let mut idx = crate::order::Enumeration::new(&self.index);
        let mut inner: Vec<crate::order::Enumeration> = Vec::new();
        let mut out = Vec::new();
        let mut diag = 0usize;
        let mut idle = 0;
        while out.len() < n && idle < 64 {
            let before = out.len();
            for a in 0..=diag {
                let Some(x) = idx.get(a).cloned() else { break };
                if inner.len() <= a {
                    inner.push(crate::order::Enumeration::new(&(self.assign)(&x)));
                }
                if let Some(y) = inner[a].get(diag - a) {
                    out.push((x, y.clone()));
                    if out.len() == n {
                        break;
                    }
                }
            }
            idle = if out.len() == before { idle + 1 } else { 0 };
            diag += 1;
        }
        out
    }
}

/// Ordered sum of two orders.
pub fn ordered_sum(a: OrderTerm, b: OrderTerm) -> OrderTerm {
    OrderTerm::sum(a, b)
}

/// The shuffle of a palette of terms.
pub fn shuffle(palette: &Palette) -> Result<OrderTerm> {
    if palette.is_empty() {
        return Err(Error::EmptyPalette);
    }
    let parts = (0..palette.len())
        .map(|i| {
            palette
                .term(i)
                .cloned()
                .ok_or_else(|| Error::TypeMismatch(format!("color {i} is not a term")))
        })
        .collect::<Result<Vec<_>>>()?;
    OrderTerm::shuffle(parts)
}

/// The dyadics of (0, 1) colored by `c`, as a point tree of depth one.
pub fn coloring_order(c: &DenseColoring) -> TreeOrder {
    let cc = c.clone();
    let f: ColorFn = Arc::new(move |d: Dyadic| cc.color_at(d));
    let k = c.palette().len();
    TreeOrder::new(Structure::new(
        Shape::fan(f, (0..k).map(Shape::Leaf).collect()),
        c.palette().colors.clone(),
    ))
}

/// Isomorphism between two colored orders with the same keys.
pub fn back_and_forth<A, B>(a: A, b: B) -> Result<IsoWitness<A::P, B::P>>
where
    A: ColoredOrder + 'static,
    B: ColoredOrder + 'static,
    A::P: Traced,
    B::P: Traced,
{
    let s = Arc::new(Mutex::new(Session::new(a, b)?));
    Ok(session_witness("back_and_forth", s))
}

/// Wraps a shared session as a lazily extended witness.
pub fn session_witness<A, B>(name: &str, s: Arc<Mutex<Session<A, B>>>) -> IsoWitness<A::P, B::P>
where
    A: ColoredOrder + 'static,
    B: ColoredOrder + 'static,
    A::P: Traced,
    B::P: Traced,
{
    let (s1, s2, s3, s4) = (s.clone(), s.clone(), s.clone(), s);
    IsoWitness::new(
        name,
        Box::new(move |x: &A::P| s1.lock().unwrap().match_left(x)),
        Box::new(move |y: &B::P| s2.lock().unwrap().match_right(y)),
        Box::new(move |x: &A::P, y: &A::P| s3.lock().unwrap().left().compare(x, y)),
        Box::new(move |x: &B::P, y: &B::P| s4.lock().unwrap().right().compare(x, y)),
    )
}

/// Isomorphism between two presented terms, carrying payloads unchanged.
pub fn term_iso(name: &str, src: OrderTerm, dst: OrderTerm) -> Result<IsoWitness<Element, Element>> {
    let ps = Arc::new(Presentation::new(src)?);
    let pd = Arc::new(Presentation::new(dst)?);
    let sa = TreeOrder::new(ps.order().structure().clone());
    let sb = TreeOrder::new(pd.order().structure().clone());
    let s = Arc::new(Mutex::new(Session::new(sa, sb)?));
    let (ps1, pd1, ps2, pd2) = (ps.clone(), pd.clone(), ps.clone(), pd.clone());
    let (s1, s2) = (s.clone(), s);
    Ok(IsoWitness::new(
        name,
        Box::new(move |x: &Element| {
            let (p, payload) = ps1.split(x)?;
            let q = s1.lock().unwrap().match_left(&p)?;
            pd1.join(&q, &payload)
        }),
        Box::new(move |y: &Element| {
            let (q, payload) = pd2.split(y)?;
            let p = s2.lock().unwrap().match_right(&q)?;
            ps2.join(&p, &payload)
        }),
        Box::new(move |a: &Element, b: &Element| ps.compare(a, b)),
        Box::new(move |a: &Element, b: &Element| pd.compare(a, b)),
    ))
}

fn palette_shuffle(s: &[OrderTerm]) -> Result<OrderTerm> {
    if s.is_empty() {
        return Err(Error::EmptyPalette);
    }
    match OrderTerm::shuffle(s.to_vec())? {
        OrderTerm::Zero => Err(Error::EmptyPalette),
        t => Ok(t),
    }
}

/// `Ξ(S) + Ξ(S) ≅ Ξ(S)`.
pub fn witness_idempotence(s: &[OrderTerm]) -> Result<IsoWitness<Element, Element>> {
    let x = palette_shuffle(s)?;
    term_iso("idempotence", OrderTerm::sum(x.clone(), x.clone()), x)
}

/// `Ξ(S) + s + Ξ(S) ≅ Ξ(S)` for `s ∈ S`.
pub fn witness_absorb_shuffland(s: &[OrderTerm], member: &OrderTerm) -> Result<IsoWitness<Element, Element>> {
    let x = palette_shuffle(s)?;
    let member = member.normalized();
    if !shufflands(&x).contains(&member) {
        return Err(Error::PreconditionViolation(format!("{member} is not a member of {x}")));
    }
    let src = OrderTerm::sum(OrderTerm::sum(x.clone(), member), x.clone());
    term_iso("absorb_shuffland", src, x)
}

fn shufflands(x: &OrderTerm) -> Vec<OrderTerm> {
    match x {
        OrderTerm::Shuffle(ps) => ps.clone(),
        _ => Vec::new(),
    }
}

/// Splits `t` as `t1 + X + t2` with `t1`, `t2` in `allowed` or `0`.
pub fn composite_parts(t: &OrderTerm, x: &OrderTerm, allowed: &[OrderTerm]) -> Option<(OrderTerm, OrderTerm)> {
    let ok = |u: &OrderTerm| u.is_empty() || allowed.contains(u);
    if t == x {
        return Some((OrderTerm::Zero, OrderTerm::Zero));
    }
    if let OrderTerm::Sum(a, b) = t {
        if **b == *x && ok(a) {
            return Some(((**a).clone(), OrderTerm::Zero));
        }
        if **a == *x && ok(b) {
            return Some((OrderTerm::Zero, (**b).clone()));
        }
        if let OrderTerm::Sum(a1, a2) = &**a {
            if **a2 == *x && ok(a1) && ok(b) {
                return Some(((**a1).clone(), (**b).clone()));
            }
        }
    }
    None
}

/// `Ξ(S′ ∪ S″) ≅ Ξ(S)` for `S′ ⊆ S` and composites `t1 + Ξ(S) + t2`.
pub fn witness_absorb_set(
    s: &[OrderTerm],
    sub: &[OrderTerm],
    composites: &[OrderTerm],
) -> Result<IsoWitness<Element, Element>> {
    let x = palette_shuffle(s)?;
    let members = shufflands(&x);
    if composites.is_empty() {
        return Err(Error::PreconditionViolation("no composite shufflands".into()));
    }
    for t in sub {
        if !members.contains(&t.normalized()) {
            return Err(Error::PreconditionViolation(format!("{t} is not a member of {x}")));
        }
    }
    for t in composites {
        if composite_parts(&t.normalized(), &x, &members).is_none() {
            return Err(Error::PreconditionViolation(format!("{t} is not of the form t1+{x}+t2")));
        }
    }
    let mut parts = sub.to_vec();
    parts.extend_from_slice(composites);
    let src = OrderTerm::shuffle(parts)?;
    term_iso("absorb_set", src, x)
}
