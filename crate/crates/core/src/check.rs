//! Sampled validation of witnesses: monotonicity, roundtrip, colors.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::order::element::compare_unchecked;
use crate::order::{enumerate, Dyadic, Element, OrderTerm};
use crate::skolem::coloring::shuffle_engine;
use crate::skolem::witness::{IsoWitness, Traced};

/// Outcome of one kind of check.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Outcome {
    pub samples: usize,
    pub failures: usize,
    /// First failing input, with what went wrong.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, v: Value) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(v);
        }
    }
}

/// Report of [`iso_check`].
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub witness: String,
    pub seed: u64,
    pub monotonicity: Outcome,
    pub roundtrip: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors: Option<Outcome>,
    pub evaluated: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.monotonicity.passed() && self.roundtrip.passed() && self.colors.as_ref().is_none_or(|c| c.passed())
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        v["passed"] = json!(self.passed());
        v
    }
}

/// How many checks of each kind to run.
#[derive(Clone, Copy, Debug)]
pub struct Plan {
    pub pairs: usize,
    pub roundtrips: usize,
    pub colors: usize,
    pub seed: u64,
}

impl Plan {
    pub fn new(pairs: usize, roundtrips: usize, colors: usize, seed: u64) -> Plan {
        Plan {
            pairs,
            roundtrips,
            colors,
            seed,
        }
    }
}

/// Colors on both sides, for the color-preservation check.
pub struct Coloring<'a, S, D> {
    pub source: &'a dyn Fn(&S) -> Result<Value>,
    pub target: &'a dyn Fn(&D) -> Result<Value>,
    /// Maps a source color to the target color it must go to.
    pub map: &'a dyn Fn(&Value) -> Value,
}

/// A seeded shuffle of the first `n` items.
pub fn seeded_sample<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

fn err_json(e: &crate::error::Error) -> Value {
    json!({ "error": e.to_string() })
}

/// `w` with the images of `a` and `b` exchanged, for fault injection.
pub fn swap_outputs<S, D>(w: Arc<IsoWitness<S, D>>, a: S, b: S) -> Result<IsoWitness<S, D>>
where
    S: Clone + Traced + Send + Sync + 'static,
    D: Clone + Traced + Send + Sync + 'static,
{
    let (fa, fb) = (w.forward(&a)?, w.forward(&b)?);
    let (w1, w2, w3, w4) = (w.clone(), w.clone(), w.clone(), w.clone());
    let (a1, b1, fa1, fb1) = (a.clone(), b.clone(), fa.clone(), fb.clone());
    Ok(IsoWitness::new(
        format!("{} (swapped)", w.name()),
        Box::new(move |x: &S| {
            if w1.compare_source(x, &a1) == Ordering::Equal {
                Ok(fb1.clone())
            } else if w1.compare_source(x, &b1) == Ordering::Equal {
                Ok(fa1.clone())
            } else {
                w1.forward(x)
            }
        }),
        Box::new(move |y: &D| {
            if w2.compare_target(y, &fb) == Ordering::Equal {
                Ok(a.clone())
            } else if w2.compare_target(y, &fa) == Ordering::Equal {
                Ok(b.clone())
            } else {
                w2.backward(y)
            }
        }),
        Box::new(move |x: &S, y: &S| w3.compare_source(x, y)),
        Box::new(move |x: &D, y: &D| w4.compare_target(x, y)),
    ))
}

/// Runs the harness on `source` (and `target` for backward roundtrips).
pub fn iso_check<S, D>(
    w: &IsoWitness<S, D>,
    source: &[S],
    target: &[D],
    plan: Plan,
    coloring: Option<Coloring<'_, S, D>>,
) -> Report
where
    S: Clone + Traced,
    D: Clone + Traced,
{
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut mono = Outcome::default();
    if source.len() >= 2 {
        for _ in 0..plan.pairs {
            let i = rng.gen_range(0..source.len());
            let mut j = rng.gen_range(0..source.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (&source[i], &source[j]);
            mono.samples += 1;
            match (w.forward(a), w.forward(b)) {
                (Ok(fa), Ok(fb)) => {
                    let cs = w.compare_source(a, b);
                    let cd = w.compare_target(&fa, &fb);
                    if cs != cd {
                        mono.fail(json!({
                            "pair": [a.trace_json(), b.trace_json()],
                            "images": [fa.trace_json(), fb.trace_json()],
                        }));
                    }
                }
                (ra, rb) => {
                    let e = ra.err().or(rb.err()).unwrap();
                    mono.fail(json!({ "pair": [a.trace_json(), b.trace_json()], "error": err_json(&e) }));
                }
            }
        }
    }
    let mut rt = Outcome::default();
    let n_src = plan.roundtrips.min(source.len());
    for x in source.iter().take(n_src) {
        rt.samples += 1;
        match w.forward(x).and_then(|y| w.backward(&y)) {
            Ok(back) if w.compare_source(&back, x) == Ordering::Equal => {}
            Ok(back) => rt.fail(json!({ "src": x.trace_json(), "back": back.trace_json() })),
            Err(e) => rt.fail(json!({ "src": x.trace_json(), "error": err_json(&e) })),
        }
    }
    for y in target.iter().take(plan.roundtrips.saturating_sub(n_src).max(plan.roundtrips / 2)) {
        rt.samples += 1;
        match w.backward(y).and_then(|x| w.forward(&x)) {
            Ok(back) if w.compare_target(&back, y) == Ordering::Equal => {}
            Ok(back) => rt.fail(json!({ "dst": y.trace_json(), "back": back.trace_json() })),
            Err(e) => rt.fail(json!({ "dst": y.trace_json(), "error": err_json(&e) })),
        }
    }
    let colors = coloring.map(|c| {
        let mut o = Outcome::default();
        for x in source.iter().take(plan.colors) {
            o.samples += 1;
            let r = w
                .forward(x)
                .and_then(|y| Ok(((c.source)(x)?, (c.target)(&y)?, y)));
            match r {
                Ok((cx, cy, _)) if (c.map)(&cx) == cy => {}
                Ok((cx, cy, y)) => o.fail(json!({
                    "src": x.trace_json(), "dst": y.trace_json(), "src_color": cx, "dst_color": cy
                })),
                Err(e) => o.fail(json!({ "src": x.trace_json(), "error": err_json(&e) })),
            }
        }
        o
    });
    Report {
        witness: w.name().to_string(),
        seed: plan.seed,
        monotonicity: mono,
        roundtrip: rt,
        colors,
        evaluated: w.evaluated(),
    }
}

fn min_elem(t: &OrderTerm) -> Option<Element> {
    match t {
        OrderTerm::FinOrd(_) | OrderTerm::Omega => Some(Element::Idx(0)),
        OrderTerm::Reverse(s) => max_elem(s).map(Element::rev),
        OrderTerm::Sum(a, b) => min_elem(a).map(Element::left).or_else(|| {
            if a.is_empty() {
                min_elem(b).map(Element::right)
            } else {
                None
            }
        }),
        _ => None,
    }
}

fn max_elem(t: &OrderTerm) -> Option<Element> {
    match t {
        OrderTerm::FinOrd(n) => Some(Element::Idx(n - 1)),
        OrderTerm::Reverse(s) => min_elem(s).map(Element::rev),
        OrderTerm::Sum(a, b) => max_elem(b).map(Element::right).or_else(|| {
            if b.is_empty() {
                max_elem(a).map(Element::left)
            } else {
                None
            }
        }),
        _ => None,
    }
}

/// A pair `a < b` with nothing strictly between, if the term has one.
pub fn adjacent_pair(t: &OrderTerm) -> Option<(Element, Element)> {
    match t {
        OrderTerm::FinOrd(n) if *n >= 2 => Some((Element::Idx(0), Element::Idx(1))),
        OrderTerm::Omega => Some((Element::Idx(0), Element::Idx(1))),
        OrderTerm::Reverse(s) => adjacent_pair(s).map(|(a, b)| (Element::rev(b), Element::rev(a))),
        OrderTerm::Sum(a, b) => adjacent_pair(a)
            .map(|(x, y)| (Element::left(x), Element::left(y)))
            .or_else(|| adjacent_pair(b).map(|(x, y)| (Element::right(x), Element::right(y))))
            .or_else(|| Some((Element::left(max_elem(a)?), Element::right(min_elem(b)?)))),
        OrderTerm::Shuffle(ps) => {
            let (c, (x, y)) = ps.iter().enumerate().find_map(|(c, p)| Some((c, adjacent_pair(p)?)))?;
            let e = shuffle_engine(ps.len());
            let pos = (0..).map(Dyadic::from_index).find(|d| e.color_of_index(d.index()) == c)?;
            Some((Element::shuf(pos, c, x), Element::shuf(pos, c, y)))
        }
        _ => None,
    }
}

/// Result of the adjacency probe.
#[derive(Clone, Debug, PartialEq)]
pub enum Probe {
    /// No adjacent pair: structurally dense, and no sampled pair is adjacent.
    Dense,
    /// A certified adjacent pair.
    Adjacent(Element, Element),
}

/// Looks for an adjacent pair, and cross-checks the answer on a sample of
/// `samples` enumerated elements: no sampled element lies strictly between
/// the certificate, and in the dense case every sampled pair has a sampled
/// or constructed element between.
pub fn adjacency_probe(t: &OrderTerm, samples: usize) -> Probe {
    let elems: Vec<Element> = enumerate(t).take(samples).collect();
    match adjacent_pair(t) {
        Some((a, b)) => {
            debug_assert_eq!(compare_unchecked(t, &a, &b), Ordering::Less);
            debug_assert!(!elems.iter().any(|e| {
                compare_unchecked(t, &a, e) == Ordering::Less && compare_unchecked(t, e, &b) == Ordering::Less
            }));
            Probe::Adjacent(a, b)
        }
        None => Probe::Dense,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::parse_term;
    use crate::skolem::identities::witness_idempotence;

    #[test]
    fn adjacency_of_corpus() {
        for (s, adj) in [
            ("shuffle{1}", false),
            ("shuffle{2}", true),
            ("Q", false),
            ("1+Q", false),
            ("1+1", true),
            ("rev(w)", true),
            ("Q+1+1+Q", true),
            ("shuffle{1,Q}", false),
        ] {
            let t = parse_term(s).unwrap();
            assert_eq!(matches!(adjacency_probe(&t, 100), Probe::Adjacent(..)), adj, "{s}");
            assert_eq!(t.has_adjacent(), adj, "{s}");
        }
    }

    #[test]
    fn idempotence_passes() {
        let w = witness_idempotence(&[OrderTerm::fin(1)]).unwrap();
        let t = parse_term("shuffle{1}+shuffle{1}").unwrap();
        let src: Vec<Element> = enumerate(&t).take(200).collect();
        let r = iso_check(&w, &src, &[], Plan::new(300, 100, 0, 1), None);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.to_json()["passed"], json!(true));
    }
}
