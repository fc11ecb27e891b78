//! Colored orders presented as leaves of lazily described trees.
//!
//! A point is a sequence of [`Ent`] entries compared lexicographically. The
//! admissible sequences are described by a [`Shape`] table: a `Fan` node has
//! one child per dyadic (and optionally `-inf`/`+inf` children), a `List`
//! node has a fixed set of children, and a `Leaf` ends a point with a color.
//!
//! Points are enumerated by cost (sum of dyadic levels, 1 per infinity),
//! ties broken lexicographically. [`TreeOrder::search`] returns the first
//! point of a color strictly between two bounds in that order while such a
//! point is cheap, and otherwise descends past the bounds along a shortest
//! path to the color.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::order::{Dyadic, ExtRational};
use crate::skolem::coloring::Color;

/// One entry of a point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ent {
    NegInf,
    Dy(Dyadic),
    PosInf,
}

impl Ent {
    pub fn cost(self) -> u32 {
        match self {
            Ent::Dy(d) => d.level(),
            _ => 1,
        }
    }

    pub fn dyadic(self) -> Option<Dyadic> {
        match self {
            Ent::Dy(d) => Some(d),
            _ => None,
        }
    }

    pub fn to_ext(self) -> ExtRational {
        match self {
            Ent::NegInf => ExtRational::NegInf,
            Ent::Dy(d) => d.into(),
            Ent::PosInf => ExtRational::PosInf,
        }
    }

    pub fn from_ext(x: &ExtRational) -> Option<Ent> {
        match x {
            ExtRational::NegInf => Some(Ent::NegInf),
            ExtRational::PosInf => Some(Ent::PosInf),
            ExtRational::Fin(_) => x.as_dyadic().map(Ent::Dy),
        }
    }
}

impl fmt::Display for Ent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ent::NegInf => f.write_str("-inf"),
            Ent::PosInf => f.write_str("+inf"),
            Ent::Dy(d) => write!(f, "{d}"),
        }
    }
}

impl fmt::Debug for Ent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An eventually periodic infinite sequence `prefix cycle cycle ...`.
///
/// Constructors keep the representation canonical (shortest cycle, shortest
/// prefix), so structural equality is sequence equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Periodic {
    prefix: Vec<Ent>,
    cycle: Vec<Ent>,
}

impl Periodic {
    /// # Panics
    /// If `cycle` is empty.
    pub fn new(prefix: Vec<Ent>, cycle: Vec<Ent>) -> Periodic {
        assert!(!cycle.is_empty(), "empty cycle");
        let mut cycle = cycle;
        let n = cycle.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| cycle[i] == cycle[i % p])) {
            cycle.truncate(p);
        }
        let mut prefix = prefix;
        while let Some(&last) = prefix.last() {
            let l = cycle.len();
            if last == cycle[l - 1] {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        Periodic { prefix, cycle }
    }

    pub fn prefix(&self) -> &[Ent] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Ent] {
        &self.cycle
    }

    pub fn at(&self, n: usize) -> Ent {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn take(&self, n: usize) -> Vec<Ent> {
        (0..n).map(|k| self.at(k)).collect()
    }

    pub fn prepend(&self, e: Ent) -> Periodic {
        let mut p = vec![e];
        p.extend_from_slice(&self.prefix);
        Periodic::new(p, self.cycle.clone())
    }

    /// The sequence with its first `n` entries removed.
    pub fn drop_first(&self, n: usize) -> Periodic {
        if n <= self.prefix.len() {
            Periodic::new(self.prefix[n..].to_vec(), self.cycle.clone())
        } else {
            let mut c = self.cycle.clone();
            c.rotate_left((n - self.prefix.len()) % self.cycle.len());
            Periodic::new(Vec::new(), c)
        }
    }

    /// Replaces the first `seq.len()` entries.
    pub fn with_head(&self, seq: &[Ent]) -> Periodic {
        let tail = self.drop_first(seq.len());
        let mut p = seq.to_vec();
        p.extend_from_slice(&tail.prefix);
        Periodic::new(p, tail.cycle)
    }

    /// Index after which two sequences agree forever, if they do.
    pub fn agreement_index(&self, other: &Periodic) -> Option<usize> {
        let horizon = self.prefix.len().max(other.prefix.len())
            + lcm(self.cycle.len(), other.cycle.len());
        let tail_ok = (horizon..horizon + lcm(self.cycle.len(), other.cycle.len()))
            .all(|k| self.at(k) == other.at(k));
        if !tail_ok {
            return None;
        }
        let mut n = horizon;
        while n > 0 && self.at(n - 1) == other.at(n - 1) {
            n -= 1;
        }
        Some(n)
    }

    /// Length after which the sequence is purely periodic with its cycle.
    pub fn horizon_with(&self, other: &Periodic) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.cycle.len(), other.cycle.len())
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &[Ent]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>();
        json!({ "prefix": s(&self.prefix), "cycle": s(&self.cycle) })
    }
}

impl fmt::Debug for Periodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({:?})^w", self.prefix, self.cycle)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A point: a finite sequence, or an eventually periodic branch.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Node(Vec<Ent>),
    Branch(Periodic),
}

/// Result of a lexicographic comparison that may hit a prefix relation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Lex {
    Less,
    Greater,
    Equal,
    /// The left operand is a proper prefix of the right one.
    LeftPrefix,
    /// The right operand is a proper prefix of the left one.
    RightPrefix,
}

impl Lex {
    /// Ordering for lex results on antichains; prefix cases panic.
    pub fn ordering(self) -> Ordering {
        match self {
            Lex::Less => Ordering::Less,
            Lex::Greater => Ordering::Greater,
            Lex::Equal => Ordering::Equal,
            p => panic!("comparison of a point with its own prefix: {p:?}"),
        }
    }
}

impl Point {
    pub fn node(entries: Vec<Ent>) -> Point {
        Point::Node(entries)
    }

    pub fn at(&self, n: usize) -> Option<Ent> {
        match self {
            Point::Node(v) => v.get(n).copied(),
            Point::Branch(b) => Some(b.at(n)),
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            Point::Node(v) => Some(v.len()),
            Point::Branch(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn as_node(&self) -> Option<&[Ent]> {
        match self {
            Point::Node(v) => Some(v),
            Point::Branch(_) => None,
        }
    }

    pub fn lex(&self, other: &Point) -> Lex {
        if let (Point::Branch(a), Point::Branch(b)) = (self, other) {
            let h = a.horizon_with(b);
            for k in 0..h {
                match a.at(k).cmp(&b.at(k)) {
                    Ordering::Less => return Lex::Less,
                    Ordering::Greater => return Lex::Greater,
                    Ordering::Equal => {}
                }
            }
            return Lex::Equal;
        }
        let mut k = 0;
        loop {
            match (self.at(k), other.at(k)) {
                (None, None) => return Lex::Equal,
                (None, Some(_)) => return Lex::LeftPrefix,
                (Some(_), None) => return Lex::RightPrefix,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Less => return Lex::Less,
                    Ordering::Greater => return Lex::Greater,
                    Ordering::Equal => k += 1,
                },
            }
        }
    }

    pub fn cost(&self) -> Option<u32> {
        self.as_node().map(|v| v.iter().map(|e| e.cost()).sum())
    }

    pub fn to_json(&self) -> Value {
        match self {
            Point::Node(v) => json!(v.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
            Point::Branch(b) => json!({ "branch": b.to_json() }),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Node(v) => write!(f, "{v:?}"),
            Point::Branch(b) => write!(f, "{b:?}"),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Color function of a `Fan` node.
pub type ColorFn = Arc<dyn Fn(Dyadic) -> usize + Send + Sync>;

/// Description of the subtree below a node.
#[derive(Clone)]
pub enum Shape {
    /// End of a point, with its color.
    Leaf(usize),
    /// The shape stored at this index of the table.
    Ref(usize),
    /// One child per dyadic, shaped by `parts[color(q)]`.
    Fan {
        color: ColorFn,
        parts: Vec<Shape>,
        neg_inf: Option<Box<Shape>>,
        pos_inf: Option<Box<Shape>>,
    },
    /// Fixed children, in increasing order of entries.
    List(Vec<(Ent, Shape)>),
}

impl Shape {
    pub fn fan(color: ColorFn, parts: Vec<Shape>) -> Shape {
        Shape::Fan {
            color,
            parts,
            neg_inf: None,
            pos_inf: None,
        }
    }

    /// A fan whose children are all leaves of a fixed color.
    pub fn uniform(color: usize) -> Shape {
        Shape::fan(Arc::new(|_| 0), vec![Shape::Leaf(color)])
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf(c) => write!(f, "Leaf({c})"),
            Shape::Ref(k) => write!(f, "Ref({k})"),
            Shape::Fan { parts, .. } => write!(f, "Fan({parts:?})"),
            Shape::List(v) => write!(f, "List({v:?})"),
        }
    }
}

/// A tree description: `table[0]` is the root; `keys` names leaf colors.
#[derive(Clone, Debug)]
pub struct Structure {
    pub table: Vec<Shape>,
    pub keys: Vec<Color>,
}

impl Structure {
    pub fn new(root: Shape, keys: Vec<Color>) -> Structure {
        Structure {
            table: vec![root],
            keys,
        }
    }

    fn resolve<'a>(&'a self, mut s: &'a Shape) -> &'a Shape {
        while let Shape::Ref(k) = s {
            s = &self.table[*k];
        }
        s
    }

    pub fn root(&self) -> &Shape {
        self.resolve(&self.table[0])
    }

    pub fn child<'a>(&'a self, s: &'a Shape, e: Ent) -> Option<&'a Shape> {
        let c = match (self.resolve(s), e) {
            (Shape::Fan { color, parts, .. }, Ent::Dy(d)) => parts.get(color(d)),
            (Shape::Fan { neg_inf, .. }, Ent::NegInf) => neg_inf.as_deref(),
            (Shape::Fan { pos_inf, .. }, Ent::PosInf) => pos_inf.as_deref(),
            (Shape::List(v), e) => v.iter().find(|(x, _)| *x == e).map(|(_, s)| s),
            (Shape::Leaf(_), _) | (Shape::Ref(_), _) => None,
        }?;
        Some(self.resolve(c))
    }

    /// The shape at the end of a finite sequence, if it is a node.
    pub fn shape_at(&self, seq: &[Ent]) -> Option<&Shape> {
        let mut s = self.root();
        for &e in seq {
            s = self.child(s, e)?;
        }
        Some(s)
    }

    /// Color of a point, or `None` if the sequence is not a point.
    pub fn color_of(&self, seq: &[Ent]) -> Option<usize> {
        match self.shape_at(seq)? {
            Shape::Leaf(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_point(&self, seq: &[Ent]) -> bool {
        self.color_of(seq).is_some()
    }
}

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<P> {
    Found(P),
    /// The search space was exhausted: no such point exists.
    Empty,
    /// The budget ran out before a decision.
    Exhausted,
}

/// Limits for [`TreeOrder::search`].
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_cost: u32,
    pub max_visits: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cost: 96,
            max_visits: 4_000_000,
        }
    }
}

struct Dfs<'a> {
    st: &'a Structure,
    lo: Option<&'a Point>,
    hi: Option<&'a Point>,
    color: Option<usize>,
    visits: usize,
    max_visits: usize,
    truncated: bool,
    out: Vec<Vec<Ent>>,
    want: usize,
}

enum Step {
    Continue,
    Stop,
}

impl<'a> Dfs<'a> {
    fn children(&mut self, s: &Shape, rem: u32, lo_e: Option<Ent>, hi_e: Option<Ent>) -> Vec<Ent> {
        let above = |e: Ent| lo_e.is_none_or(|l| e >= l);
        let below = |e: Ent| hi_e.is_none_or(|h| e <= h);
        let mut out = Vec::new();
        match s {
            Shape::Fan {
                neg_inf, pos_inf, ..
            } => {
                if neg_inf.is_some() && above(Ent::NegInf) && below(Ent::NegInf) {
                    out.push(Ent::NegInf);
                }
                let lo_d = match lo_e {
                    Some(Ent::Dy(d)) => Some(Some(d)),
                    Some(Ent::PosInf) => None,
                    _ => Some(None),
                };
                let hi_d = match hi_e {
                    Some(Ent::Dy(d)) => Some(Some(d)),
                    Some(Ent::NegInf) => None,
                    _ => Some(None),
                };
                if let (Some(l), Some(h)) = (lo_d, hi_d) {
                    let open = match (l, h) {
                        (Some(a), Some(b)) => a < b,
                        _ => true,
                    };
                    if open {
                        self.truncated = true;
                        let mut ds: Vec<Dyadic> = (1..=rem.min(crate::order::rational::MAX_LEVEL))
                            .flat_map(|lv| Dyadic::at_level_between(lv, l, h))
                            .collect();
                        for b in [l, h].into_iter().flatten() {
                            if b.level() <= rem {
                                ds.push(b);
                            }
                        }
                        ds.sort();
                        ds.dedup();
                        out.extend(ds.into_iter().map(Ent::Dy));
                    } else if let (Some(a), Some(b)) = (l, h) {
                        if a == b {
                            if a.level() <= rem {
                                out.push(Ent::Dy(a));
                            } else {
                                self.truncated = true;
                            }
                        }
                    }
                }
                if pos_inf.is_some() && above(Ent::PosInf) && below(Ent::PosInf) {
                    out.push(Ent::PosInf);
                }
            }
            Shape::List(v) => {
                for (e, _) in v {
                    if above(*e) && below(*e) {
                        if e.cost() <= rem {
                            out.push(*e);
                        } else {
                            self.truncated = true;
                        }
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Visits nodes below `prefix` whose total cost is exactly `rem` more.
    fn walk(&mut self, prefix: &mut Vec<Ent>, s: &Shape, rem: u32, tlo: bool, thi: bool) -> Step {
        self.visits += 1;
        if self.visits > self.max_visits {
            return Step::Stop;
        }
        let d = prefix.len();
        let lo_e = if tlo { self.lo.and_then(|p| p.at(d)) } else { None };
        let hi_e = if thi { self.hi.and_then(|p| p.at(d)) } else { None };
        let kids = self.children(s, rem, lo_e, hi_e);
        for e in kids {
            let Some(cs) = self.st.child(s, e) else { continue };
            let ntlo = tlo && lo_e == Some(e);
            let nthi = thi && hi_e == Some(e);
            let c = e.cost();
            prefix.push(e);
            match cs {
                Shape::Leaf(col) => {
                    if c == rem && !ntlo && !nthi && self.color.is_none_or(|k| k == *col) {
                        self.out.push(prefix.clone());
                        if self.out.len() >= self.want {
                            prefix.pop();
                            return Step::Stop;
                        }
                    }
                }
                _ => {
                    if c < rem {
                        if let Step::Stop = self.walk(prefix, cs, rem - c, ntlo, nthi) {
                            prefix.pop();
                            return Step::Stop;
                        }
                    } else {
                        self.truncated = true;
                    }
                }
            }
            prefix.pop();
        }
        Step::Continue
    }
}

/// Cost up to which searches return the first point in enumeration order.
const QUICK_COST: u32 = 10;

/// Dyadics tried per fan in the constructive fallback.
const SCAN_LIMIT: usize = 4096;

fn shape_dist(s: &Shape, k: usize, tbl: &[Vec<Option<u32>>]) -> Option<u32> {
    match s {
        Shape::Leaf(c) => (*c == k).then_some(0),
        Shape::Ref(j) => tbl[*j][k],
        Shape::Fan {
            parts,
            neg_inf,
            pos_inf,
            ..
        } => parts
            .iter()
            .chain(neg_inf.as_deref())
            .chain(pos_inf.as_deref())
            .filter_map(|c| shape_dist(c, k, tbl))
            .min()
            .map(|d| d + 1),
        Shape::List(v) => v.iter().filter_map(|(_, c)| shape_dist(c, k, tbl)).min().map(|d| d + 1),
    }
}

/// A [`Structure`] viewed as a colored linear order of its points.
pub struct TreeOrder {
    st: Structure,
    budget: Budget,
    cache: Mutex<(Vec<Point>, u32)>,
    dist: OnceLock<Vec<Vec<Option<u32>>>>,
}

impl TreeOrder {
    pub fn new(st: Structure) -> TreeOrder {
        TreeOrder {
            st,
            budget: Budget::default(),
            cache: Mutex::new((Vec::new(), 0)),
            dist: OnceLock::new(),
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> TreeOrder {
        self.budget = budget;
        self
    }

    pub fn structure(&self) -> &Structure {
        &self.st
    }

    /// All points of exactly the given cost, in increasing order.
    pub fn points_of_cost(&self, cost: u32) -> Vec<Point> {
        let mut dfs = Dfs {
            st: &self.st,
            lo: None,
            hi: None,
            color: None,
            visits: 0,
            max_visits: usize::MAX,
            truncated: false,
            out: Vec::new(),
            want: usize::MAX,
        };
        dfs.walk(&mut Vec::new(), self.st.root(), cost, false, false);
        dfs.out.into_iter().map(Point::Node).collect()
    }

    /// The `k`-th point in (cost, lexicographic) order.
    pub fn nth(&self, k: usize) -> Point {
        let mut guard = self.cache.lock().unwrap();
        while guard.0.len() <= k {
            guard.1 += 1;
            let c = guard.1;
            assert!(c <= 4 * self.budget.max_cost, "structure has too few points");
            let pts = self.points_of_cost(c);
            guard.0.extend(pts);
        }
        guard.0[k].clone()
    }

    /// A point of the color strictly between the bounds: the first in
    /// enumeration order when that one is cheap, else a shortest descent
    /// past the bounds. `color = None` accepts any color.
    pub fn search(&self, lo: Option<&Point>, hi: Option<&Point>, color: Option<usize>) -> Search<Point> {
        if let (Some(a), Some(b)) = (lo, hi) {
            if a.lex(b) != Lex::Less {
                return Search::Empty;
            }
        }
        let mut visits = 0;
        for c in 1..=self.budget.max_cost.min(QUICK_COST) {
            let mut dfs = Dfs {
                st: &self.st,
                lo,
                hi,
                color,
                visits,
                max_visits: self.budget.max_visits,
                truncated: false,
                out: Vec::new(),
                want: 1,
            };
            dfs.walk(&mut Vec::new(), self.st.root(), c, lo.is_some(), hi.is_some());
            visits = dfs.visits;
            if let Some(p) = dfs.out.pop() {
                return Search::Found(Point::Node(p));
            }
            if visits > self.budget.max_visits {
                return Search::Exhausted;
            }
            if !dfs.truncated {
                return Search::Empty;
            }
        }
        match (color, lo.map(|p| p.as_node()), hi.map(|p| p.as_node())) {
            (Some(k), None | Some(Some(_)), None | Some(Some(_))) => {
                let (tl, th) = (lo.and_then(|p| p.as_node()), hi.and_then(|p| p.as_node()));
                match self.between(self.st.root(), tl, th, k) {
                    Some((v, _)) => Search::Found(Point::Node(v)),
                    None => Search::Exhausted,
                }
            }
            _ => Search::Exhausted,
        }
    }

    /// Least depth below each table entry at which each color occurs.
    fn dist_table(&self) -> &Vec<Vec<Option<u32>>> {
        self.dist.get_or_init(|| {
            let n = self.st.keys.len();
            let mut tbl = vec![vec![None; n]; self.st.table.len()];
            loop {
                let mut changed = false;
                for j in 0..tbl.len() {
                    for k in 0..n {
                        let d = shape_dist(&self.st.table[j], k, &tbl);
                        if d.is_some() && (tbl[j][k].is_none() || d < tbl[j][k]) {
                            tbl[j][k] = d;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    return tbl;
                }
            }
        })
    }

    fn dist(&self, s: &Shape, k: usize) -> Option<u32> {
        shape_dist(s, k, self.dist_table())
    }

    /// Shortest descent from `s` to a point of color `k`, choosing the
    /// first dyadics by index at each fan.
    fn complete(&self, s: &Shape, k: usize) -> Option<Vec<Ent>> {
        let mut s = self.st.resolve(s);
        let mut out = Vec::new();
        loop {
            let want = self.dist(s, k)?;
            if want == 0 {
                return Some(out);
            }
            let fits = |c: &Shape| self.dist(c, k) == Some(want - 1);
            let e = match s {
                Shape::Fan {
                    color,
                    parts,
                    neg_inf,
                    pos_inf,
                } => (0..SCAN_LIMIT as u64)
                    .map(|i| Ent::Dy(Dyadic::from_index(i)))
                    .find(|e| parts.get(color(e.dyadic().unwrap())).is_some_and(fits))
                    .or_else(|| neg_inf.as_deref().filter(|c| fits(c)).map(|_| Ent::NegInf))
                    .or_else(|| pos_inf.as_deref().filter(|c| fits(c)).map(|_| Ent::PosInf))?,
                Shape::List(v) => v.iter().find(|(_, c)| fits(c)).map(|(e, _)| *e)?,
                Shape::Leaf(_) | Shape::Ref(_) => return None,
            };
            out.push(e);
            s = self.st.child(s, e)?;
        }
    }

    /// A suffix below `s` ending in color `k`, strictly above the tail `lo`
    /// and below the tail `hi` of the bounds that still share the prefix.
    /// Returns the suffix and the largest cost among entries not copied
    /// from a bound. Options are ranked by that cost plus twice the length,
    /// since deep dyadics are expensive to color.
    fn between(&self, s: &Shape, lo: Option<&[Ent]>, hi: Option<&[Ent]>, k: usize) -> Option<(Vec<Ent>, u32)> {
        let s = self.st.resolve(s);
        let at_bound = |t: Option<&[Ent]>| t.is_some_and(|t| t.is_empty());
        if at_bound(hi) || (at_bound(lo) && matches!(s, Shape::Leaf(_))) {
            return None;
        }
        let lo = lo.filter(|t| !t.is_empty());
        let fresh = |v: Vec<Ent>| {
            let m = v.iter().map(|e| e.cost()).max().unwrap_or(0);
            (v, m)
        };
        if lo.is_none() && hi.is_none() {
            return self.complete(s, k).map(fresh);
        }
        let (lo_e, hi_e) = (lo.map(|t| t[0]), hi.map(|t| t[0]));
        let free = |e: Ent| lo_e.is_none_or(|l| e > l) && hi_e.is_none_or(|h| e < h);
        let mut cands: Vec<Ent> = Vec::new();
        match s {
            Shape::Fan {
                color,
                parts,
                neg_inf,
                pos_inf,
            } => {
                if neg_inf.is_some() {
                    cands.push(Ent::NegInf);
                }
                let l = match lo_e {
                    Some(Ent::Dy(d)) => Some(Some(d)),
                    Some(Ent::PosInf) => None,
                    _ => Some(None),
                };
                let h = match hi_e {
                    Some(Ent::Dy(d)) => Some(Some(d)),
                    Some(Ent::NegInf) => None,
                    _ => Some(None),
                };
                if let (Some(l), Some(h)) = (l, h) {
                    let mut seen = 0;
                    'levels: for lv in 1..=crate::order::rational::MAX_LEVEL {
                        for d in Dyadic::at_level_between(lv, l, h) {
                            seen += 1;
                            if parts.get(color(d)).is_some_and(|c| self.dist(c, k).is_some()) {
                                cands.push(Ent::Dy(d));
                                break 'levels;
                            }
                            if seen >= SCAN_LIMIT {
                                break 'levels;
                            }
                        }
                    }
                }
                if pos_inf.is_some() {
                    cands.push(Ent::PosInf);
                }
            }
            Shape::List(v) => cands.extend(v.iter().map(|(e, _)| *e)),
            Shape::Leaf(_) | Shape::Ref(_) => return None,
        }
        let mut options: Vec<(Vec<Ent>, u32)> = Vec::new();
        for e in cands.into_iter().filter(|e| free(*e)) {
            if let Some(rest) = self.st.child(s, e).and_then(|c| self.complete(c, k)) {
                let mut v = vec![e];
                v.extend(rest);
                options.push(fresh(v));
                break;
            }
        }
        let descend = |e: Ent, lo: Option<&[Ent]>, hi: Option<&[Ent]>| {
            let (rest, m) = self.between(self.st.child(s, e)?, lo, hi, k)?;
            let mut v = vec![e];
            v.extend(rest);
            Some((v, m))
        };
        match (lo_e, hi_e) {
            (Some(a), Some(b)) if a == b => options.extend(descend(a, Some(&lo.unwrap()[1..]), Some(&hi.unwrap()[1..]))),
            _ => {
                options.extend(lo_e.and_then(|a| descend(a, Some(&lo.unwrap()[1..]), None)));
                options.extend(hi_e.and_then(|b| descend(b, None, Some(&hi.unwrap()[1..]))));
            }
        }
        options.into_iter().min_by_key(|(v, m)| m + 2 * v.len() as u32)
    }

    pub fn color(&self, p: &Point) -> Option<usize> {
        p.as_node().and_then(|v| self.st.color_of(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skolem::coloring::shuffle_engine;

    fn two_colors() -> Structure {
        let e = shuffle_engine(2);
        let f: ColorFn = Arc::new(move |d: Dyadic| e.color_of_index(d.index()));
        Structure::new(
            Shape::fan(f, vec![Shape::Leaf(0), Shape::Leaf(1)]),
            vec![Color::Label("a".into()), Color::Label("b".into())],
        )
    }

    #[test]
    fn enumeration_is_cost_then_lex() {
        let t = TreeOrder::new(two_colors());
        let pts: Vec<Point> = (0..40).map(|k| t.nth(k)).collect();
        for w in pts.windows(2) {
            let (ca, cb) = (w[0].cost().unwrap(), w[1].cost().unwrap());
            assert!(ca < cb || (ca == cb && w[0].lex(&w[1]) == Lex::Less));
        }
        assert_eq!(pts[0], Point::Node(vec![Ent::Dy(Dyadic::half())]));
    }

    #[test]
    fn search_matches_brute_force() {
        let t = TreeOrder::new(two_colors());
        let pts: Vec<Point> = (0..200).map(|k| t.nth(k)).collect();
        for i in 0..12 {
            for j in 0..12 {
                let (a, b) = (&pts[i], &pts[j]);
                if a.lex(b) != Lex::Less {
                    continue;
                }
                for col in 0..2 {
                    let brute = pts
                        .iter()
                        .find(|p| a.lex(p) == Lex::Less && p.lex(b) == Lex::Less && t.color(p) == Some(col))
                        .cloned();
                    match t.search(Some(a), Some(b), Some(col)) {
                        Search::Found(p) => {
                            if let Some(q) = brute {
                                assert_eq!(p, q);
                            }
                        }
                        other => panic!("{other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_children_certify_emptiness() {
        let pair = Shape::List(vec![
            (Ent::Dy(Dyadic::new(1, 2).unwrap()), Shape::Leaf(0)),
            (Ent::Dy(Dyadic::new(3, 2).unwrap()), Shape::Leaf(0)),
        ]);
        let st = Structure::new(Shape::fan(Arc::new(|_| 0), vec![pair]), vec![Color::Label("x".into())]);
        let t = TreeOrder::new(st);
        let h = Dyadic::half();
        let a = Point::Node(vec![Ent::Dy(h), Ent::Dy(Dyadic::new(1, 2).unwrap())]);
        let b = Point::Node(vec![Ent::Dy(h), Ent::Dy(Dyadic::new(3, 2).unwrap())]);
        assert_eq!(t.search(Some(&a), Some(&b), None), Search::Empty);
        assert!(matches!(t.search(Some(&a), None, None), Search::Found(_)));
    }

    #[test]
    fn periodic_canonical_form() {
        let q = |n, l| Ent::Dy(Dyadic::new(n, l).unwrap());
        let a = Periodic::new(vec![q(1, 2)], vec![q(1, 1), q(1, 2)]);
        let b = Periodic::new(vec![], vec![q(1, 2), q(1, 1)]);
        assert_eq!(a, b);
        let c = Periodic::new(vec![q(3, 2)], vec![q(1, 1), q(1, 2), q(1, 1), q(1, 2)]);
        assert_eq!(c.agreement_index(&b), Some(1));
        assert_eq!(b.drop_first(1), Periodic::new(vec![], vec![q(1, 1), q(1, 2)]));
        assert_eq!(Point::Branch(b.clone()).lex(&Point::Branch(c)), Lex::Less);
    }

    fn nested() -> Structure {
        let e = shuffle_engine(3);
        let f: ColorFn = Arc::new(move |d: Dyadic| e.color_of_index(d.index()));
        Structure::new(
            Shape::fan(f, vec![Shape::Leaf(0), Shape::Leaf(1), Shape::Ref(0)]),
            vec![Color::Label("a".into()), Color::Label("b".into())],
        )
    }

    #[test]
    fn search_below_a_shared_expensive_prefix() {
        let st = nested();
        let d = (200..)
            .map(Dyadic::from_index)
            .find(|d| st.color_of(&[Ent::Dy(*d)]).is_none())
            .unwrap();
        let leaf = |k: u64| {
            let x = Dyadic::from_index(k);
            st.color_of(&[Ent::Dy(d), Ent::Dy(x)]).map(|_| x)
        };
        let mut xs: Vec<Dyadic> = (0..64).filter_map(leaf).collect();
        xs.sort();
        let t = TreeOrder::new(st);
        let lo = Point::Node(vec![Ent::Dy(d), Ent::Dy(xs[0])]);
        let hi = Point::Node(vec![Ent::Dy(d), Ent::Dy(xs[xs.len() - 1])]);
        for col in 0..2 {
            match t.search(Some(&lo), Some(&hi), Some(col)) {
                Search::Found(p) => {
                    assert_eq!(lo.lex(&p), Lex::Less);
                    assert_eq!(p.lex(&hi), Lex::Less);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn fallback_stays_between_bounds() {
        let t = TreeOrder::new(nested());
        let mut lo = t.nth(0);
        let hi = t.nth(1);
        let (lo0, hi0) = if lo.lex(&hi) == Lex::Less { (lo.clone(), hi) } else { (hi, lo.clone()) };
        lo = lo0.clone();
        let mut hi = hi0;
        // Repeated bisection pushes the search past the enumeration phase.
        for step in 0..60 {
            let col = step % 2;
            let p = match t.search(Some(&lo), Some(&hi), Some(col)) {
                Search::Found(p) => p,
                other => panic!("step {step}: {other:?}"),
            };
            assert_eq!(lo.lex(&p), Lex::Less);
            assert_eq!(p.lex(&hi), Lex::Less);
            assert_eq!(t.color(&p), Some(col));
            if step % 3 == 0 {
                hi = p;
            } else {
                lo = p;
            }
        }
        assert!(lo.cost().unwrap() > QUICK_COST || hi.cost().unwrap() > QUICK_COST);
    }
}
