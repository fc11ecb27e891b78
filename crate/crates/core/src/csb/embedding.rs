//! Convex embeddings as chains of primitive steps.
//!
//! A chain maps `L_i` into `L_{-i}`. Witness steps are isomorphisms between
//! presented orders, built by back-and-forth over their point trees.
//! The chain ends in one placement step: `Inner(q)` puts a value of a side
//! with the target's shufflands into the copy at `q ∈ R`, `Block(p)` puts an
//! element of the shuffland at `p ∉ R` into that block. Both images are
//! convex, and classification reads the first position of a target element.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::csb::side::{Side, SideElem, Sign};
use crate::error::{Error, Result};
use crate::order::{Dyadic, Element, OrderTerm};
use crate::skolem::identities::Presentation;
use crate::skolem::points::{Point, TreeOrder};
use crate::skolem::session::Session;
use crate::skolem::witness::{IsoWitness, Traced};

/// A value flowing through a chain.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Val {
    Side(SideElem),
    Term(Element),
}

impl Val {
    pub fn into_side(self) -> Result<SideElem> {
        match self {
            Val::Side(x) => Ok(x),
            Val::Term(e) => Err(Error::TypeMismatch(format!("{e} is not a side element"))),
        }
    }

    pub fn into_term(self) -> Result<Element> {
        match self {
            Val::Term(e) => Ok(e),
            Val::Side(x) => Err(Error::TypeMismatch(format!("{x} is not a term element"))),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Side(x) => write!(f, "{x}"),
            Val::Term(e) => write!(f, "{e}"),
        }
    }
}

impl Traced for Val {
    fn trace_json(&self) -> Value {
        match self {
            Val::Side(x) => x.to_json(),
            Val::Term(e) => json!({ "term": e.to_json() }),
        }
    }
}

/// Where a value lives.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pres {
    Side(Sign),
    Term(OrderTerm),
}

impl fmt::Display for Pres {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pres::Side(s) => write!(f, "side:{s}"),
            Pres::Term(t) => write!(f, "term:{t}"),
        }
    }
}

/// A presentation with its point tree.
#[derive(Clone)]
pub enum Presented {
    Side(Arc<Side>),
    Term(Arc<Presentation>),
}

impl Presented {
    pub fn order(&self) -> TreeOrder {
        match self {
            Presented::Side(s) => TreeOrder::new(s.structure()),
            Presented::Term(p) => TreeOrder::new(p.order().structure().clone()),
        }
    }

    pub fn split(&self, v: &Val) -> Result<(Point, Element)> {
        match (self, v) {
            (Presented::Side(s), Val::Side(x)) => s.split(x),
            (Presented::Term(p), Val::Term(e)) => p.split(e),
            _ => Err(Error::TypeMismatch(format!("{v} in the wrong presentation"))),
        }
    }

    pub fn join(&self, p: &Point, payload: &Element) -> Result<Val> {
        match self {
            Presented::Side(s) => s.join(p, payload).map(Val::Side),
            Presented::Term(t) => t.join(p, payload).map(Val::Term),
        }
    }

    pub fn compare(&self, a: &Val, b: &Val) -> Ordering {
        match (self, a, b) {
            (Presented::Side(s), Val::Side(x), Val::Side(y)) => s.compare(x, y),
            (Presented::Term(t), Val::Term(x), Val::Term(y)) => t.compare(x, y),
            _ => panic!("comparison of {a} and {b} in the wrong presentation"),
        }
    }
}

/// Isomorphism between two presentations whose point trees carry the same
/// leaf terms; payloads are carried unchanged.
pub fn presented_iso(name: &str, src: Presented, dst: Presented) -> Result<IsoWitness<Val, Val>> {
    let s = Arc::new(Mutex::new(Session::new(src.order(), dst.order())?));
    let (s1, s2) = (s.clone(), s);
    let (a1, b1, a2, b2, a3, b3) = (src.clone(), dst.clone(), src.clone(), dst.clone(), src, dst);
    Ok(IsoWitness::new(
        name,
        Box::new(move |x: &Val| {
            let (p, payload) = a1.split(x)?;
            let q = s1.lock().unwrap().match_left(&p)?;
            b1.join(&q, &payload)
        }),
        Box::new(move |y: &Val| {
            let (q, payload) = b2.split(y)?;
            let p = s2.lock().unwrap().match_right(&q)?;
            a2.join(&p, &payload)
        }),
        Box::new(move |x: &Val, y: &Val| a3.compare(x, y)),
        Box::new(move |x: &Val, y: &Val| b3.compare(x, y)),
    ))
}

/// One step of a chain.
#[derive(Clone)]
pub enum Step {
    /// Into the copy of the target at `q ∈ R`.
    Inner(Dyadic),
    /// Into the shuffland block at `p ∉ R`.
    Block(Dyadic),
    Witness { to: Pres, iso: Arc<IsoWitness<Val, Val>> },
    Identity,
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Inner(q) => write!(f, "Inner({q})"),
            Step::Block(p) => write!(f, "Block({p})"),
            Step::Witness { to, .. } => write!(f, "Witness({to})"),
            Step::Identity => f.write_str("Identity"),
        }
    }
}

/// Position of a target element relative to the image.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classified<T> {
    Below,
    In(T),
    Above,
}

/// A convex embedding `f_i : L_i → L_{-i}`.
#[derive(Clone)]
pub struct Embedding {
    from: Arc<Side>,
    to: Arc<Side>,
    steps: Vec<Step>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}{:?}", self.from.sign(), self.steps)
    }
}

impl Embedding {
    /// Type-checks the chain: witnesses go between presentations, the
    /// placement step is last and fits the target.
    pub fn new(from: Arc<Side>, to: Arc<Side>, steps: Vec<Step>) -> Result<Embedding> {
        let mut cur = Pres::Side(from.sign());
        let shufflands = |s: Sign| if s == from.sign() { from.shufflands() } else { to.shufflands() };
        for (k, step) in steps.iter().enumerate() {
            let last = k + 1 == steps.len();
            cur = match step {
                Step::Inner(q) => {
                    if !last {
                        return Err(Error::InvalidInstance("a placement step must come last".into()));
                    }
                    if !to.in_r(*q) {
                        return Err(Error::NotInR(q.to_string()));
                    }
                    match cur {
                        Pres::Side(s) if shufflands(s) == to.shufflands() => Pres::Side(to.sign()),
                        other => {
                            return Err(Error::TypeMismatch(format!("inner step needs side {} but got {other}", to.sign())))
                        }
                    }
                }
                Step::Block(p) => {
                    if !last {
                        return Err(Error::InvalidInstance("a placement step must come last".into()));
                    }
                    let c = to
                        .color_at(*p)
                        .ok_or_else(|| Error::TypeMismatch(format!("block position {p} is in R")))?;
                    match cur {
                        Pres::Term(t) if t.normalized() == to.term(c).normalized() => Pres::Side(to.sign()),
                        other => {
                            return Err(Error::TypeMismatch(format!("block at {p} holds {} but got {other}", to.term(c))))
                        }
                    }
                }
                Step::Witness { to: t, .. } => t.clone(),
                Step::Identity => cur,
            };
        }
        if cur != Pres::Side(to.sign()) {
            return Err(Error::TypeMismatch(format!("chain ends in {cur}, not side {}", to.sign())));
        }
        Ok(Embedding { from, to, steps })
    }

    pub fn from_side(&self) -> &Arc<Side> {
        &self.from
    }

    pub fn to_side(&self) -> &Arc<Side> {
        &self.to
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Whether the image misses parts of the target on both sides.
    pub fn is_proper(&self) -> bool {
        matches!(self.steps.last(), Some(Step::Inner(_)) | Some(Step::Block(_)))
    }

    pub fn apply(&self, x: &SideElem) -> Result<SideElem> {
        let mut v = Val::Side(x.clone());
        for step in &self.steps {
            v = match step {
                Step::Inner(q) => Val::Side(v.into_side()?.prepend(*q)),
                Step::Block(p) => {
                    let sub = v.into_term()?;
                    Val::Side(self.to.finite(Vec::new(), *p, sub)?)
                }
                Step::Witness { iso, .. } => iso.forward(&v)?,
                Step::Identity => v,
            };
        }
        v.into_side()
    }

    pub fn classify(&self, y: &SideElem) -> Result<Classified<SideElem>> {
        let mut v = Val::Side(y.clone());
        for step in self.steps.iter().rev() {
            v = match step {
                Step::Inner(q) => {
                    let y = v.into_side()?;
                    match y.first().cmp(q) {
                        Ordering::Less => return Ok(Classified::Below),
                        Ordering::Greater => return Ok(Classified::Above),
                        Ordering::Equal => Val::Side(y.drop_first().expect("q is a nesting position")),
                    }
                }
                Step::Block(p) => {
                    let y = v.into_side()?;
                    match y.first().cmp(p) {
                        Ordering::Less => return Ok(Classified::Below),
                        Ordering::Greater => return Ok(Classified::Above),
                        Ordering::Equal => match y {
                            SideElem::Finite { sub, .. } => Val::Term(sub),
                            SideElem::Deep { .. } => unreachable!("deep elements only have R positions"),
                        },
                    }
                }
                Step::Witness { iso, .. } => iso.backward(&v)?,
                Step::Identity => v,
            };
        }
        Ok(Classified::In(v.into_side()?))
    }
}
