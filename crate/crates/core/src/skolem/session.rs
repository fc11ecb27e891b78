//! Back-and-forth matching between two countable dense colored orders.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::order::{Element, Enumeration, OrderTerm, Rational};
use crate::skolem::coloring::Color;
use crate::skolem::points::{Point, Search, TreeOrder};

/// A colored linear order with an enumeration and a partner search.
pub trait ColoredOrder: Send + Sync {
    type P: Clone + Eq + Hash + Debug + Send + Sync;

    fn compare(&self, a: &Self::P, b: &Self::P) -> Ordering;
    fn color(&self, p: &Self::P) -> Result<usize>;
    /// Names of the colors, indexed by color.
    fn keys(&self) -> Vec<Color>;
    /// The `k`-th element of a fixed enumeration.
    fn nth(&self, k: usize) -> Self::P;
    /// First element in enumeration order strictly between the bounds.
    fn search(&self, lo: Option<&Self::P>, hi: Option<&Self::P>, color: usize) -> Search<Self::P>;
    fn to_json(&self, p: &Self::P) -> Value;
}

impl ColoredOrder for TreeOrder {
    type P = Point;

    fn compare(&self, a: &Point, b: &Point) -> Ordering {
        a.lex(b).ordering()
    }

    fn color(&self, p: &Point) -> Result<usize> {
        TreeOrder::color(self, p).ok_or_else(|| Error::NotANode(format!("{p} is not a point")))
    }

    fn keys(&self) -> Vec<Color> {
        self.structure().keys.clone()
    }

    fn nth(&self, k: usize) -> Point {
        TreeOrder::nth(self, k)
    }

    fn search(&self, lo: Option<&Point>, hi: Option<&Point>, color: usize) -> Search<Point> {
        TreeOrder::search(self, lo, hi, Some(color))
    }

    fn to_json(&self, p: &Point) -> Value {
        p.to_json()
    }
}

/// The rationals, one color, enumerated by height `|p| + q`.
pub struct RationalsOrder {
    key: Color,
    en: Mutex<Enumeration>,
}

impl RationalsOrder {
    pub fn new(key: Color) -> RationalsOrder {
        RationalsOrder {
            key,
            en: Mutex::new(Enumeration::new(&OrderTerm::Rationals)),
        }
    }

    fn height(q: &Rational) -> BigInt {
        q.numer().abs() + q.denom()
    }
}

/// Least-height rational strictly between the bounds.
pub fn simplest_between(lo: Option<&Rational>, hi: Option<&Rational>) -> Rational {
    let zero = Rational::zero();
    let lo_neg = lo.is_none_or(|l| *l < zero);
    let hi_pos = hi.is_none_or(|h| *h > zero);
    if lo_neg && hi_pos {
        return zero;
    }
    if !lo_neg {
        simplest_positive(lo.unwrap(), hi)
    } else {
        let neg = |q: &Rational| -q.clone();
        -simplest_positive(&neg(hi.unwrap()), lo.map(neg).as_ref())
    }
}

/// Least-height rational in `(a, b)` with `a >= 0`.
fn simplest_positive(a: &Rational, b: Option<&Rational>) -> Rational {
    let n = a.floor();
    let next = Rational::from_big(n.clone() + 1, BigInt::one());
    if b.is_none_or(|b| next < *b) {
        return next;
    }
    let b = b.unwrap();
    let base = Rational::from_big(n, BigInt::one());
    let a1 = a - &base;
    let b1 = b - &base;
    let inv_hi = if a1.is_zero_value() {
        None
    } else {
        Some(Rational::one() / a1)
    };
    let inv_lo = Rational::one() / b1;
    &base + &(Rational::one() / simplest_positive(&inv_lo, inv_hi.as_ref()))
}

impl ColoredOrder for RationalsOrder {
    type P = Rational;

    fn compare(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }

    fn color(&self, _: &Rational) -> Result<usize> {
        Ok(0)
    }

    fn keys(&self) -> Vec<Color> {
        vec![self.key.clone()]
    }

    fn nth(&self, k: usize) -> Rational {
        match self.en.lock().unwrap().get(k) {
            Some(Element::Rat(q)) => q.clone(),
            _ => unreachable!(),
        }
    }

    fn search(&self, lo: Option<&Rational>, hi: Option<&Rational>, color: usize) -> Search<Rational> {
        if color != 0 || matches!((lo, hi), (Some(a), Some(b)) if a >= b) {
            return Search::Empty;
        }
        let q = simplest_between(lo, hi);
        debug_assert!(Self::height(&q) > BigInt::zero());
        Search::Found(q)
    }

    fn to_json(&self, p: &Rational) -> Value {
        Value::String(p.to_string())
    }
}

/// A growing finite partial isomorphism built by alternating steps.
///
/// Step `2k` matches the `k`-th element of `a`, step `2k+1` the `k`-th
/// element of `b`. Partners are the first same-colored element of the
/// other side strictly between the images of the neighbors.
pub struct Session<A: ColoredOrder, B: ColoredOrder> {
    a: A,
    b: B,
    map: Vec<usize>,
    inv: Vec<usize>,
    pairs: Vec<(A::P, B::P)>,
    fwd: HashMap<A::P, B::P>,
    bwd: HashMap<B::P, A::P>,
    steps: usize,
}

impl<A: ColoredOrder, B: ColoredOrder> Session<A, B> {
    /// Colors are matched by equal keys.
    pub fn new(a: A, b: B) -> Result<Self> {
        let (ka, kb) = (a.keys(), b.keys());
        let map: Option<Vec<usize>> = ka.iter().map(|k| kb.iter().position(|x| x == k)).collect();
        match map {
            Some(m) if ka.len() == kb.len() => Self::with_color_map(a, b, m),
            _ => Err(Error::PaletteMismatch(format!(
                "[{}] vs [{}]",
                join(&ka),
                join(&kb)
            ))),
        }
    }

    /// `map[c]` is the color of `b` that color `c` of `a` must go to.
    pub fn with_color_map(a: A, b: B, map: Vec<usize>) -> Result<Self> {
        let kb = b.keys().len();
        let mut inv = vec![usize::MAX; kb];
        if map.len() != a.keys().len() {
            return Err(Error::PaletteMismatch("color map has the wrong length".into()));
        }
        for (c, &d) in map.iter().enumerate() {
            if d >= kb || inv[d] != usize::MAX {
                return Err(Error::PaletteMismatch("color map is not a bijection".into()));
            }
            inv[d] = c;
        }
        if inv.contains(&usize::MAX) {
            return Err(Error::PaletteMismatch("color map is not onto".into()));
        }
        Ok(Session {
            a,
            b,
            map,
            inv,
            pairs: Vec::new(),
            fwd: HashMap::new(),
            bwd: HashMap::new(),
            steps: 0,
        })
    }

    pub fn left(&self) -> &A {
        &self.a
    }

    pub fn right(&self) -> &B {
        &self.b
    }

    pub fn color_map(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Matched pairs in increasing order.
    pub fn pairs(&self) -> &[(A::P, B::P)] {
        &self.pairs
    }

    pub fn image(&self, x: &A::P) -> Option<&B::P> {
        self.fwd.get(x)
    }

    pub fn preimage(&self, y: &B::P) -> Option<&A::P> {
        self.bwd.get(y)
    }

    /// One fair step.
    pub fn step(&mut self) -> Result<()> {
        let k = self.steps / 2;
        if self.steps.is_multiple_of(2) {
            let x = self.a.nth(k);
            self.match_left(&x)?;
        } else {
            let y = self.b.nth(k);
            self.match_right(&y)?;
        }
        self.steps += 1;
        Ok(())
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Partner of an element of `a`, matching it now if needed.
    pub fn match_left(&mut self, x: &A::P) -> Result<B::P> {
        if let Some(y) = self.fwd.get(x) {
            return Ok(y.clone());
        }
        let i = self
            .pairs
            .partition_point(|(p, _)| self.a.compare(p, x) == Ordering::Less);
        let lo = i.checked_sub(1).map(|j| &self.pairs[j].1);
        let hi = self.pairs.get(i).map(|p| &p.1);
        let color = self.map[self.a.color(x)?];
        let y = match self.b.search(lo, hi, color) {
            Search::Found(y) => y,
            Search::Empty => {
                return Err(Error::PreconditionViolation(format!(
                    "no partner of color {color} for {x:?} between {lo:?} and {hi:?}"
                )))
            }
            Search::Exhausted => return Err(Error::BudgetExhausted(self.pairs.len())),
        };
        self.insert(i, x.clone(), y.clone());
        Ok(y)
    }

    /// Partner of an element of `b`, matching it now if needed.
    pub fn match_right(&mut self, y: &B::P) -> Result<A::P> {
        if let Some(x) = self.bwd.get(y) {
            return Ok(x.clone());
        }
        let i = self
            .pairs
            .partition_point(|(_, q)| self.b.compare(q, y) == Ordering::Less);
        let lo = i.checked_sub(1).map(|j| &self.pairs[j].0);
        let hi = self.pairs.get(i).map(|p| &p.0);
        let color = self.inv[self.b.color(y)?];
        let x = match self.a.search(lo, hi, color) {
            Search::Found(x) => x,
            Search::Empty => {
                return Err(Error::PreconditionViolation(format!(
                    "no partner of color {color} for {y:?} between {lo:?} and {hi:?}"
                )))
            }
            Search::Exhausted => return Err(Error::BudgetExhausted(self.pairs.len())),
        };
        self.insert(i, x.clone(), y.clone());
        Ok(x)
    }

    fn insert(&mut self, i: usize, x: A::P, y: B::P) {
        self.fwd.insert(x.clone(), y.clone());
        self.bwd.insert(y.clone(), x.clone());
        self.pairs.insert(i, (x, y));
    }

    /// Re-checks order and color preservation of the whole table.
    pub fn check(&self) -> Result<()> {
        for w in self.pairs.windows(2) {
            if self.a.compare(&w[0].0, &w[1].0) != Ordering::Less
                || self.b.compare(&w[0].1, &w[1].1) != Ordering::Less
            {
                return Err(Error::WitnessViolation(format!(
                    "order broken at {:?} / {:?}",
                    w[0], w[1]
                )));
            }
        }
        for (x, y) in &self.pairs {
            if self.map[self.a.color(x)?] != self.b.color(y)? {
                return Err(Error::WitnessViolation(format!("color broken at {x:?} -> {y:?}")));
            }
        }
        Ok(())
    }
}

fn join(keys: &[Color]) -> String {
    keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Dyadic;
    use crate::skolem::points::{ColorFn, Shape, Structure};
    use std::sync::Arc;

    fn xi(k: usize, seeded: bool) -> TreeOrder {
        let e = if seeded {
            crate::skolem::make_seeded_coloring(
                crate::skolem::Palette::labels(&(0..k).map(|i| format!("c{i}")).collect::<Vec<_>>()),
                7,
            )
            .unwrap()
        } else {
            crate::skolem::make_dense_coloring(crate::skolem::Palette::labels(
                &(0..k).map(|i| format!("c{i}")).collect::<Vec<_>>(),
            ))
            .unwrap()
        };
        let f: ColorFn = Arc::new(move |d: Dyadic| e.color_at(d));
        let keys = (0..k).map(|i| Color::Label(format!("c{i}"))).collect();
        TreeOrder::new(Structure::new(Shape::fan(f, (0..k).map(Shape::Leaf).collect()), keys))
    }

    #[test]
    fn simplest_rationals() {
        let r = |a, b| Rational::new(a, b);
        assert_eq!(simplest_between(Some(&r(1, 3)), Some(&r(1, 2))), r(2, 5));
        assert_eq!(simplest_between(Some(&r(-7, 2)), Some(&r(-3, 1))), r(-10, 3));
        assert_eq!(simplest_between(None, Some(&r(-5, 2))), r(-3, 1));
        assert_eq!(simplest_between(Some(&r(1, 1)), None), r(2, 1));
        assert_eq!(simplest_between(Some(&r(-1, 5)), Some(&r(1, 7))), r(0, 1));
        assert_eq!(simplest_between(Some(&r(0, 1)), Some(&r(1, 100))), r(1, 101));
    }

    #[test]
    fn two_colorings_match() {
        let mut s = Session::new(xi(2, false), xi(2, true)).unwrap();
        s.run(400).unwrap();
        s.check().unwrap();
        for k in 0..200 {
            assert!(s.image(&s.left().nth(k)).is_some());
            assert!(s.preimage(&s.right().nth(k)).is_some());
        }
    }

    #[test]
    fn rationals_against_one_color() {
        let mut s = Session::new(xi(1, false), RationalsOrder::new(Color::Label("c0".into()))).unwrap();
        s.run(300).unwrap();
        s.check().unwrap();
    }

    #[test]
    fn palette_mismatch() {
        assert!(matches!(
            Session::new(xi(1, false), xi(2, false)),
            Err(Error::PaletteMismatch(_))
        ));
    }
}
