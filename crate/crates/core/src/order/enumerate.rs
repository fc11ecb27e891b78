//! Deterministic, surjective enumeration of the elements of a term.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::order::element::Element;
use crate::order::rational::{Dyadic, Rational};
use crate::order::term::OrderTerm;
use crate::skolem::coloring::shuffle_engine;

/// A cached enumeration with random access by index.
pub struct Enumeration {
    cache: Vec<Element>,
    src: Source,
    done: bool,
}

enum Source {
    Empty,
    Count { limit: Option<u64>, next: u64 },
    Rats { height: u64, pending: Vec<Rational> },
    Rev(Box<Enumeration>, usize),
    Sum {
        left: Box<Enumeration>,
        right: Box<Enumeration>,
        at: [usize; 2],
        turn: usize,
    },
    Shuffle {
        parts: Vec<Enumeration>,
        diag: u64,
        a: u64,
    },
}

impl Enumeration {
    pub fn new(t: &OrderTerm) -> Enumeration {
        let src = match t {
            OrderTerm::Zero => Source::Empty,
            OrderTerm::FinOrd(n) => Source::Count {
                limit: Some(*n),
                next: 0,
            },
            OrderTerm::Omega => Source::Count { limit: None, next: 0 },
            OrderTerm::Rationals => Source::Rats {
                height: 0,
                pending: Vec::new(),
            },
            OrderTerm::Reverse(s) => Source::Rev(Box::new(Enumeration::new(s)), 0),
            OrderTerm::Sum(a, b) => Source::Sum {
                left: Box::new(Enumeration::new(a)),
                right: Box::new(Enumeration::new(b)),
                at: [0, 0],
                turn: 0,
            },
            OrderTerm::Shuffle(ps) => {
                if ps.iter().all(|p| p.is_empty()) {
                    Source::Empty
                } else {
                    Source::Shuffle {
                        parts: ps.iter().map(Enumeration::new).collect(),
                        diag: 0,
                        a: 0,
                    }
                }
            }
        };
        Enumeration {
            cache: Vec::new(),
            src,
            done: false,
        }
    }

    /// The `k`-th element, or `None` if the order has at most `k` elements.
    pub fn get(&mut self, k: usize) -> Option<&Element> {
        while self.cache.len() <= k && !self.done {
            match self.pull() {
                Some(e) => self.cache.push(e),
                None => self.done = true,
            }
        }
        self.cache.get(k)
    }

    /// The first `n` elements (fewer if the order is smaller).
    pub fn prefix(&mut self, n: usize) -> Vec<Element> {
        if n > 0 {
            self.get(n - 1);
        }
        self.cache.iter().take(n).cloned().collect()
    }

    fn pull(&mut self) -> Option<Element> {
        match &mut self.src {
            Source::Empty => None,
            Source::Count { limit, next } => {
                if limit.is_some_and(|n| *next >= n) {
                    return None;
                }
                *next += 1;
                Some(Element::Idx(*next - 1))
            }
            Source::Rats { height, pending } => {
                while pending.is_empty() {
                    *height += 1;
                    *pending = rationals_of_height(*height);
                    pending.reverse();
                }
                pending.pop().map(Element::Rat)
            }
            Source::Rev(inner, at) => {
                let e = inner.get(*at).cloned()?;
                *at += 1;
                Some(Element::rev(e))
            }
            Source::Sum {
                left,
                right,
                at,
                turn,
            } => {
                for _ in 0..2 {
                    let side = *turn;
                    *turn = 1 - *turn;
                    let e = if side == 0 {
                        left.get(at[0]).cloned().map(Element::left)
                    } else {
                        right.get(at[1]).cloned().map(Element::right)
                    };
                    if let Some(e) = e {
                        at[side] += 1;
                        return Some(e);
                    }
                }
                None
            }
            Source::Shuffle { parts, diag, a } => {
                let engine = shuffle_engine(parts.len());
                loop {
                    if *a > *diag {
                        *diag += 1;
                        *a = 0;
                    }
                    let (pa, b) = (*a, *diag - *a);
                    *a += 1;
                    let pos = Dyadic::from_index(pa);
                    let color = engine.color_of_index(pa);
                    if let Some(sub) = parts[color].get(b as usize) {
                        return Some(Element::shuf(pos, color, sub.clone()));
                    }
                }
            }
        }
    }
}

/// Reduced rationals `p/q` with `|p| + q = height`, in increasing order.
fn rationals_of_height(height: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 1..=height {
        let p = height - q;
        if BigInt::from(p).gcd(&BigInt::from(q)) != BigInt::from(1) {
            continue;
        }
        out.push(Rational::new(p as i64, q as i64));
        if p > 0 {
            out.push(Rational::new(-(p as i64), q as i64));
        }
    }
    out.sort();
    out
}

/// Iterator over all elements of a term in enumeration order.
pub struct ElementIter {
    en: Enumeration,
    at: usize,
}

impl Iterator for ElementIter {
    type Item = Element;
    fn next(&mut self) -> Option<Element> {
        let e = self.en.get(self.at).cloned();
        self.at += 1;
        e
    }
}

/// The enumeration stream of a term; empty for `0`.
pub fn enumerate(t: &OrderTerm) -> ElementIter {
    ElementIter {
        en: Enumeration::new(t),
        at: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::parse_term;
    use std::collections::HashSet;

    #[test]
    fn finite_and_empty() {
        assert_eq!(enumerate(&OrderTerm::Zero).count(), 0);
        let v: Vec<Element> = enumerate(&OrderTerm::FinOrd(3)).collect();
        assert_eq!(v, vec![Element::Idx(0), Element::Idx(1), Element::Idx(2)]);
        assert_eq!(enumerate(&parse_term("2+rev(3)").unwrap()).count(), 5);
    }

    #[test]
    fn rationals_cover_small_dyadics() {
        let seen: HashSet<Rational> = enumerate(&OrderTerm::Rationals)
            .take(20_000)
            .filter_map(|e| match e {
                Element::Rat(q) => Some(q),
                _ => None,
            })
            .collect();
        for n in -64i64..=64 {
            assert!(seen.contains(&Rational::new(n, 64)));
        }
    }

    #[test]
    fn shuffle_spreads_positions() {
        let t = parse_term("shuffle{1}").unwrap();
        let pos: HashSet<Dyadic> = enumerate(&t)
            .take(100)
            .map(|e| match e {
                Element::Shuf { pos, .. } => pos,
                _ => unreachable!(),
            })
            .collect();
        assert!(pos.len() >= 2);
    }

    #[test]
    fn no_repeats() {
        for s in ["shuffle{1,2}", "shuffle{2,w}", "w+rev(w)", "Q"] {
            let t = parse_term(s).unwrap();
            let v: Vec<Element> = enumerate(&t).take(500).collect();
            let set: HashSet<&Element> = v.iter().collect();
            assert_eq!(set.len(), v.len(), "{s}");
        }
    }
}
