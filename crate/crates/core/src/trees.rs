//! Sequences over the closed rationals, colored trees and their frontiers.
//!
//! Trees are intensional: a [`ColoredTree`] answers `node_color` for any
//! sequence and lists children under a budget. [`truncate`] is the only
//! place a finite piece of a tree is materialized.

use std::cmp::Ordering;
use std::fmt::{self, Debug};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::order::{ExtRational, Rational};
use crate::skolem::points::{Ent, Periodic};

/// A finite sequence of closed rationals.
pub type Seq = Vec<ExtRational>;

/// Number of rational (non-infinite) entries.
pub fn rational_count(s: &[ExtRational]) -> usize {
    s.iter().filter(|e| e.is_fin()).count()
}

pub fn prefix_leq(a: &[ExtRational], b: &[ExtRational]) -> bool {
    a.len() <= b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

/// Outcome of [`lex_compare`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LexOrder {
    Lt,
    Gt,
    /// One argument is a prefix of the other (or they are equal).
    Prefix,
}

impl LexOrder {
    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            LexOrder::Lt => Some(Ordering::Less),
            LexOrder::Gt => Some(Ordering::Greater),
            LexOrder::Prefix => None,
        }
    }
}

/// An infinite sequence given pointwise.
pub trait BranchGen {
    fn value_at(&self, n: usize) -> ExtRational;
}

impl BranchGen for Periodic {
    fn value_at(&self, n: usize) -> ExtRational {
        self.at(n).to_ext()
    }
}

/// Any deterministic function of the index.
pub struct FnBranch<F: Fn(usize) -> ExtRational>(pub F);

impl<F: Fn(usize) -> ExtRational> BranchGen for FnBranch<F> {
    fn value_at(&self, n: usize) -> ExtRational {
        (self.0)(n)
    }
}

/// A finite sequence or a branch.
#[derive(Clone, Copy)]
pub enum SeqOrBranch<'a> {
    Seq(&'a [ExtRational]),
    Branch(&'a dyn BranchGen),
}

impl SeqOrBranch<'_> {
    fn at(&self, n: usize) -> Option<ExtRational> {
        match self {
            SeqOrBranch::Seq(s) => s.get(n).cloned(),
            SeqOrBranch::Branch(b) => Some(b.value_at(n)),
        }
    }
}

/// Compares at the first index where the arguments differ.
///
/// Two branches are compared index by index: the caller must make sure
/// they differ somewhere, or this does not return.
pub fn lex_compare(a: SeqOrBranch<'_>, b: SeqOrBranch<'_>) -> LexOrder {
    let mut n = 0;
    loop {
        match (a.at(n), b.at(n)) {
            (Some(x), Some(y)) => match x.cmp(&y) {
                Ordering::Less => return LexOrder::Lt,
                Ordering::Greater => return LexOrder::Gt,
                Ordering::Equal => n += 1,
            },
            _ => return LexOrder::Prefix,
        }
    }
}

/// Shorthand for two finite sequences.
pub fn lex_seq(a: &[ExtRational], b: &[ExtRational]) -> LexOrder {
    lex_compare(SeqOrBranch::Seq(a), SeqOrBranch::Seq(b))
}

pub fn seq_from_ents(v: &[Ent]) -> Seq {
    v.iter().map(|e| e.to_ext()).collect()
}

pub fn seq_to_string(s: &[ExtRational]) -> String {
    let inner: Vec<String> = s.iter().map(|e| e.to_string()).collect();
    format!("<{}>", inner.join(","))
}

/// A tree inside the closed-rational sequences, with node colors.
pub trait ColoredTree {
    type Color: Clone + PartialEq + Debug;

    /// Color of `s`, or `None` when `s` is not a node.
    fn node_color(&self, s: &[ExtRational]) -> Option<Self::Color>;

    /// The first `budget` children of `s` in schedule order. Infinite
    /// entries are always listed, ahead of the rest.
    fn children(&self, s: &[ExtRational], budget: usize) -> Result<Vec<ExtRational>>;

    /// Whether nodes of this color are parents of leaves.
    fn is_front_color(&self, c: &Self::Color) -> bool;

    fn color_name(&self, c: &Self::Color) -> String;

    fn is_node(&self, s: &[ExtRational]) -> bool {
        self.node_color(s).is_some()
    }

    fn is_leaf(&self, s: &[ExtRational]) -> Result<bool> {
        Ok(self.children(s, 1)?.is_empty())
    }

    fn is_front_prime(&self, s: &[ExtRational]) -> Result<bool> {
        let c = self
            .node_color(s)
            .ok_or_else(|| Error::NotANode(seq_to_string(s)))?;
        Ok(self.is_front_color(&c))
    }
}

/// One node of a [`Truncation`].
#[derive(Clone, Debug)]
pub struct TNode<C> {
    pub seq: Seq,
    pub color: C,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// An explicit finite piece of a tree, downward closed by construction.
#[derive(Clone, Debug)]
pub struct Truncation<C> {
    pub depth: usize,
    pub budget: usize,
    pub nodes: Vec<TNode<C>>,
}

/// All nodes of length at most `depth` reachable with `budget` children
/// per node.
pub fn truncate<T: ColoredTree>(t: &T, depth: usize, budget: usize) -> Result<Truncation<T::Color>> {
    let root = t.node_color(&[]).ok_or_else(|| Error::NotANode("<>".into()))?;
    let mut nodes = vec![TNode {
        seq: Vec::new(),
        color: root,
        parent: None,
        children: Vec::new(),
    }];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &k in &frontier {
            let seq = nodes[k].seq.clone();
            for q in t.children(&seq, budget)? {
                let mut s = seq.clone();
                s.push(q);
                let color = t
                    .node_color(&s)
                    .ok_or_else(|| Error::NotANode(seq_to_string(&s)))?;
                let id = nodes.len();
                nodes.push(TNode {
                    seq: s,
                    color,
                    parent: Some(k),
                    children: Vec::new(),
                });
                nodes[k].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(Truncation { depth, budget, nodes })
}

impl<C: Clone + PartialEq + Debug> Truncation<C> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes with no children in the tree (not merely in the truncation).
    pub fn leaves<T: ColoredTree<Color = C>>(&self, t: &T) -> Result<Vec<&TNode<C>>> {
        let mut out = Vec::new();
        for n in &self.nodes {
            if t.is_leaf(&n.seq)? {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// Leaves sorted by the lexicographic order.
    pub fn frontier<T: ColoredTree<Color = C>>(&self, t: &T) -> Result<Vec<Seq>> {
        let mut v: Vec<Seq> = self.leaves(t)?.into_iter().map(|n| n.seq.clone()).collect();
        v.sort_by(|a, b| lex_seq(a, b).to_ordering().expect("leaves form an antichain"));
        Ok(v)
    }

    /// Every node's parent is present with the node's sequence minus one entry.
    pub fn is_downward_closed(&self) -> bool {
        self.nodes.iter().all(|n| match n.parent {
            None => n.seq.is_empty(),
            Some(p) => {
                let ps = &self.nodes[p].seq;
                ps.len() + 1 == n.seq.len() && prefix_leq(ps, &n.seq)
            }
        })
    }

    /// Graphviz rendering; labels are sequences, colors are attributes.
    pub fn to_dot<T: ColoredTree<Color = C>>(&self, t: &T) -> String {
        let mut s = String::from("digraph tree {\n");
        for (k, n) in self.nodes.iter().enumerate() {
            s.push_str(&format!(
                "  n{k} [label=\"{}\", color_name=\"{}\"];\n",
                seq_to_string(&n.seq),
                t.color_name(&n.color)
            ));
        }
        for (k, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                s.push_str(&format!("  n{k} -> n{c};\n"));
            }
        }
        s.push_str("}\n");
        s
    }

    /// Adjacency form: one object per node with its children's ids.
    pub fn to_json<T: ColoredTree<Color = C>>(&self, t: &T) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(k, n)| {
                json!({
                    "id": k,
                    "seq": n.seq.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                    "color": t.color_name(&n.color),
                    "children": n.children,
                })
            })
            .collect();
        json!({ "depth": self.depth, "budget": self.budget, "nodes": nodes })
    }
}

/// Leaves with `n + 2` rational entries found within the budget, sorted.
pub fn layer<T: ColoredTree>(t: &T, n: usize, budget: usize) -> Result<Vec<Seq>> {
    let tr = truncate(t, n + 4, budget)?;
    let mut out: Vec<Seq> = tr
        .leaves(t)?
        .into_iter()
        .filter(|l| rational_count(&l.seq) == n + 2)
        .map(|l| l.seq.clone())
        .collect();
    out.sort_by(|a, b| lex_seq(a, b).to_ordering().expect("leaves form an antichain"));
    Ok(out)
}

/// Reference order on an antichain, straight from the definition: `a` is
/// below `b` iff some common prefix is followed by a smaller entry in `a`.
pub fn brute_force_below(a: &[ExtRational], b: &[ExtRational]) -> bool {
    (0..a.len().min(b.len())).any(|k| a[..k] == b[..k] && a[k] < b[k])
}

/// Sorts an antichain by counting, for each element, how many are below it.
pub fn brute_force_sort(items: &[Seq]) -> Vec<Seq> {
    let mut ranked: Vec<(usize, &Seq)> = items
        .iter()
        .map(|x| (items.iter().filter(|y| brute_force_below(y, x)).count(), x))
        .collect();
    ranked.sort_by_key(|(r, _)| *r);
    ranked.into_iter().map(|(_, x)| x.clone()).collect()
}

/// Colors of [`ExampleTree`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExampleColor {
    Inner,
    OddLeaf,
    EvenLeaf,
}

/// Binary sequences `1^k 0` (k >= 1) and their prefixes.
///
/// Its frontier is ordered like `w` and the single branch `1 1 1 ...` sits
/// above every leaf.
pub struct ExampleTree;

impl ExampleTree {
    fn one() -> ExtRational {
        ExtRational::Fin(Rational::one())
    }

    fn zero() -> ExtRational {
        ExtRational::Fin(Rational::zero())
    }

    /// The unique branch.
    pub fn branch() -> FnBranch<fn(usize) -> ExtRational> {
        FnBranch(|_| ExtRational::Fin(Rational::one()))
    }
}

impl ColoredTree for ExampleTree {
    type Color = ExampleColor;

    fn node_color(&self, s: &[ExtRational]) -> Option<ExampleColor> {
        let ones = s.iter().take_while(|e| **e == Self::one()).count();
        if ones == s.len() {
            return Some(ExampleColor::Inner);
        }
        if ones >= 1 && ones + 1 == s.len() && s[ones] == Self::zero() {
            return Some(if ones % 2 == 1 {
                ExampleColor::OddLeaf
            } else {
                ExampleColor::EvenLeaf
            });
        }
        None
    }

    fn children(&self, s: &[ExtRational], budget: usize) -> Result<Vec<ExtRational>> {
        match self.node_color(s) {
            None => Err(Error::NotANode(seq_to_string(s))),
            Some(ExampleColor::Inner) => {
                let mut v = Vec::new();
                if !s.is_empty() {
                    v.push(Self::zero());
                }
                v.push(Self::one());
                v.truncate(budget.max(1));
                Ok(v)
            }
            Some(_) => Ok(Vec::new()),
        }
    }

    fn is_front_color(&self, c: &ExampleColor) -> bool {
        *c == ExampleColor::Inner
    }

    fn color_name(&self, c: &ExampleColor) -> String {
        format!("{c:?}")
    }
}

impl fmt::Display for LexOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> ExtRational {
        ExtRational::Fin(Rational::integer(n))
    }

    #[test]
    fn prefix_examples() {
        let sigma = vec![q(2), q(1), ExtRational::PosInf];
        let tau = vec![q(2), q(3), ExtRational::NegInf];
        let mut st = sigma.clone();
        st.extend(tau.clone());
        assert!(prefix_leq(&[], &st));
        assert!(prefix_leq(&sigma, &st));
        assert!(!prefix_leq(&tau, &st));
        assert_eq!(rational_count(&st), 4);
        assert_eq!(lex_seq(&sigma, &tau), LexOrder::Lt);
        assert_eq!(lex_seq(&sigma, &st), LexOrder::Prefix);
    }

    #[test]
    fn branch_against_node() {
        let b = FnBranch(|_| q(1));
        let node = vec![q(1), q(2)];
        assert_eq!(lex_compare(SeqOrBranch::Branch(&b), SeqOrBranch::Seq(&node)), LexOrder::Lt);
    }

    #[test]
    fn example_tree_frontier_is_omega_plus_one() {
        let t = ExampleTree;
        let tr = truncate(&t, 8, 2).unwrap();
        assert!(tr.is_downward_closed());
        let front = tr.frontier(&t).unwrap();
        assert_eq!(front.len(), 7);
        for w in front.windows(2) {
            assert!(rational_count(&w[0]) < rational_count(&w[1]));
        }
        let b = ExampleTree::branch();
        for l in &front {
            assert_eq!(lex_compare(SeqOrBranch::Seq(l), SeqOrBranch::Branch(&b)), LexOrder::Lt);
        }
        assert_eq!(brute_force_sort(&front), front);
    }

    #[test]
    fn depth_zero_is_root() {
        let tr = truncate(&ExampleTree, 0, 5).unwrap();
        assert_eq!(tr.len(), 1);
        assert!(tr.to_dot(&ExampleTree).starts_with("digraph"));
    }
}
