//! Branches of the trees: the synthetic oracle, tail classes, the extended
//! coloring `C_i` and the color bijection `Γ`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::csb::instance::{BranchOracle, CsbInstance, Tag};
use crate::csb::side::{SideElem, Sign};
use crate::error::{Error, Result};
use crate::order::{Dyadic, Element, Rational};
use crate::skolem::points::{Ent, Lex, Periodic, Point};
use crate::skolem::witness::IsoWitness;

/// `r0 q r1 q r2 q …`.
pub fn interleave(r: &Periodic, q: Dyadic) -> Periodic {
    let spread = |v: &[Ent]| v.iter().flat_map(|e| [*e, Ent::Dy(q)]).collect::<Vec<_>>();
    Periodic::new(spread(r.prefix()), spread(r.cycle()))
}

/// Inverse of [`interleave`], or `None` if some odd entry is not `q`.
pub fn deinterleave(p: &Periodic, q: Dyadic) -> Option<Periodic> {
    let k = p.prefix().len().div_ceil(2);
    let c = p.cycle().len();
    if (0..k + c).any(|n| p.at(2 * n + 1) != Ent::Dy(q)) {
        return None;
    }
    Some(Periodic::new(
        (0..k).map(|n| p.at(2 * n)).collect(),
        (k..k + c).map(|n| p.at(2 * n)).collect(),
    ))
}

/// Reads the branch off a deep element whose path alternates with `q00`,
/// which is how [`synthetic_elem`] builds them.
pub struct SyntheticOracle {
    q00: Dyadic,
}

impl SyntheticOracle {
    pub fn new(q00: Dyadic) -> SyntheticOracle {
        SyntheticOracle { q00 }
    }
}

impl BranchOracle for SyntheticOracle {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn branch(&self, _side: Sign, x: &SideElem) -> Option<Periodic> {
        match x {
            SideElem::Deep { path, .. } => deinterleave(path, self.q00),
            SideElem::Finite { .. } => None,
        }
    }
}

/// The element of `A_{i,ω}^r` with a rational payload.
pub fn synthetic_elem(r: &Periodic, q00: Dyadic, payload: Rational) -> SideElem {
    SideElem::Deep {
        path: interleave(r, q00),
        sub: Element::Rat(payload),
    }
}

/// Tail of an eventually periodic sequence: its least cycle rotation and
/// the phase at which that rotation starts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ClassTag {
    pub cycle: Vec<Ent>,
    pub phase: usize,
}

impl ClassTag {
    /// The purely periodic member of the class.
    pub fn representative(&self) -> Periodic {
        let mut c = self.cycle.clone();
        let l = c.len();
        c.rotate_right(self.phase % l);
        Periodic::new(Vec::new(), c)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.cycle.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]@{}", c.join(","), self.phase)
    }
}

/// Two sequences agree from some index on iff their tags are equal.
pub fn class_tag(r: &Periodic) -> ClassTag {
    let c = r.cycle();
    let l = c.len();
    let rot = |s: usize| (0..l).map(|j| c[(j + s) % l]).collect::<Vec<_>>();
    let s = (0..l).min_by(|&a, &b| rot(a).cmp(&rot(b))).unwrap_or(0);
    ClassTag {
        cycle: rot(s),
        phase: (r.prefix().len() + s) % l,
    }
}

/// A tail class with its fixed representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchClass {
    rep: Periodic,
    tag: ClassTag,
}

impl BranchClass {
    pub fn representative(&self) -> &Periodic {
        &self.rep
    }

    pub fn tag(&self) -> &ClassTag {
        &self.tag
    }

    pub fn contains(&self, r: &Periodic) -> bool {
        class_tag(r) == self.tag
    }
}

pub fn branch_class_rep(r: &Periodic) -> BranchClass {
    let tag = class_tag(r);
    BranchClass {
        rep: tag.representative(),
        tag,
    }
}

fn dyadic_prefix(r: &Periodic, n: usize) -> Result<Vec<Dyadic>> {
    r.take(n)
        .into_iter()
        .map(|e| e.dyadic().ok_or_else(|| Error::NotInR(e.to_string())))
        .collect()
}

impl CsbInstance {
    /// `h_r : A_{i,ω}^r → A_{i,ω}^{r̄}` by transport at the agreement index.
    pub fn h_r(&self, i: Sign, r: &Periodic, x: &SideElem) -> Result<SideElem> {
        let class = branch_class_rep(r);
        let k = r.agreement_index(&class.rep).expect("same class");
        self.tail_transport(i, &dyadic_prefix(r, k)?, &dyadic_prefix(&class.rep, k)?, x)
    }

    pub fn h_r_inverse(&self, i: Sign, r: &Periodic, y: &SideElem) -> Result<SideElem> {
        let class = branch_class_rep(r);
        let k = r.agreement_index(&class.rep).expect("same class");
        self.tail_transport(i, &dyadic_prefix(&class.rep, k)?, &dyadic_prefix(r, k)?, y)
    }
}

/// A value of `C_i`: a color of `F₊ ∪ F₋` or a branch class.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtColor {
    Tag(Tag),
    Class(ClassTag),
}

impl ExtColor {
    pub fn to_json(&self) -> Value {
        match self {
            ExtColor::Tag(t) => json!(t.to_string()),
            ExtColor::Class(c) => json!({ "class": c.to_string() }),
        }
    }
}

impl fmt::Display for ExtColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtColor::Tag(t) => write!(f, "{t}"),
            ExtColor::Class(c) => write!(f, "class{c}"),
        }
    }
}

/// `C_i` on a point of `front(T_i')` or a branch.
pub fn extended_color(inst: &CsbInstance, i: Sign, p: &Point) -> Result<ExtColor> {
    match p {
        Point::Node(v) => Ok(ExtColor::Tag(inst.address_tag(i, v)?)),
        Point::Branch(r) => {
            for e in r.prefix().iter().chain(r.cycle()) {
                if !e.dyadic().is_some_and(|d| inst.sentinel_set().contains(d)) {
                    return Err(Error::NotInR(e.to_string()));
                }
            }
            Ok(ExtColor::Class(class_tag(r)))
        }
    }
}

/// `Γ : range(C₊) → range(C₋)`: the identity on shared colors, and
/// `[r] ↦ [⟨q00⟩r]` on branch classes.
pub struct Gamma {
    inst: Arc<CsbInstance>,
}

pub fn build_gamma(inst: Arc<CsbInstance>) -> Gamma {
    Gamma { inst }
}

impl Gamma {
    pub fn map(&self, c: &ExtColor) -> ExtColor {
        match c {
            ExtColor::Tag(t) => ExtColor::Tag(*t),
            ExtColor::Class(t) => ExtColor::Class(class_tag(&t.representative().prepend(Ent::Dy(self.inst.q00())))),
        }
    }

    /// The witness `L ≅ Γ(L)` for a branch class of `T₊`: `f_{+,q00}`
    /// followed by transport to the representative of the image class.
    pub fn class_witness(&self, class: &ClassTag) -> IsoWitness<SideElem, SideElem> {
        let rep = class.representative();
        let q00 = self.inst.q00();
        let image = rep.prepend(Ent::Dy(q00));
        let (i1, i2, i3, i4) = (
            self.inst.clone(),
            self.inst.clone(),
            self.inst.clone(),
            self.inst.clone(),
        );
        let image2 = image.clone();
        IsoWitness::new(
            format!("gamma {class}"),
            Box::new(move |x: &SideElem| {
                let y = i1.f_single(Sign::Plus, q00, x)?;
                i1.h_r(Sign::Minus, &image, &y)
            }),
            Box::new(move |y: &SideElem| {
                let z = i2.h_r_inverse(Sign::Minus, &image2, y)?;
                match i2.strip(Sign::Minus, &z)? {
                    Some((q, x)) if q == q00 => Ok(x),
                    _ => Err(Error::NotInImage),
                }
            }),
            Box::new(move |a: &SideElem, b: &SideElem| i3.compare(Sign::Plus, a, b)),
            Box::new(move |a: &SideElem, b: &SideElem| i4.compare(Sign::Minus, a, b)),
        )
    }
}

/// A member of the class of `r` strictly between two points of
/// `front(T_i')`: the common prefix, then a member of `R` between the
/// first differing entries, then the tail of `r`.
pub fn class_member_between(inst: &CsbInstance, r: &Periodic, lo: &Point, hi: &Point) -> Option<Periodic> {
    if lo.lex(hi) != Lex::Less {
        return None;
    }
    let j = (0..).find(|&n| lo.at(n) != hi.at(n))?;
    let mut head = Vec::with_capacity(j + 1);
    for n in 0..j {
        head.push(lo.at(n)?);
    }
    let (a, b) = (lo.at(j)?, hi.at(j)?);
    let q = inst.sentinel_set().witness(a.dyadic(), b.dyadic()).ok()?;
    head.push(Ent::Dy(q));
    Some(r.with_head(&head))
}

/// Orders points of `front(T_i')` and branches, for checks.
pub fn point_order(a: &Point, b: &Point) -> Ordering {
    a.lex(b).ordering()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Dyadic;

    fn d(k: u64) -> Ent {
        Ent::Dy(Dyadic::from_index(k))
    }

    #[test]
    fn interleave_roundtrip() {
        let q = Dyadic::from_index(0);
        let r = Periodic::new(vec![d(3), d(5)], vec![d(1), d(2), d(7)]);
        assert_eq!(deinterleave(&interleave(&r, q), q), Some(r.clone()));
        assert_eq!(deinterleave(&r, q), None);
    }

    #[test]
    fn tags_are_class_functions() {
        let r = Periodic::new(vec![d(3)], vec![d(2), d(1)]);
        let s = r.with_head(&[d(9), d(9), d(4), d(8)]);
        assert_eq!(class_tag(&r), class_tag(&s));
        assert_ne!(class_tag(&r), class_tag(&r.prepend(d(2))));
        let c = branch_class_rep(&r);
        assert!(c.contains(c.representative()));
        assert!(c.contains(&s));
        assert_eq!(branch_class_rep(c.representative()).representative(), c.representative());
        let canon = Periodic::new(vec![], vec![d(1), d(2)]);
        assert_eq!(branch_class_rep(&canon).representative(), &canon);
    }
}
