//! The maps `f_{i,q}` and `f_{i,ρ}`, the strata `A_{i,n}`, and the layer
//! maps `G_i` and `H_i` between `L_i` and the trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::csb::embedding::{Classified, Val};
use crate::csb::instance::{CsbInstance, Tag};
use crate::csb::side::{SideElem, Sign};
use crate::error::{Error, Result};
use crate::order::{Dyadic, ExtRational};
use crate::skolem::points::{Ent, Periodic, Point};
use crate::trees::Seq;

/// One step of peeling an element of `L_i`.
#[derive(Clone, Debug, PartialEq)]
pub enum Peel {
    /// `x = f_{-i,q}(y)`.
    In(Dyadic, SideElem),
    /// `x = (q, z)` with `q ∈ R` and `z` below the image of `f_{-i}`.
    Below(Dyadic, SideElem),
    Above(Dyadic, SideElem),
    /// The first position of `x` is outside `R`.
    Base,
}

/// Where an element sits in the stratification.
#[derive(Clone, Debug, PartialEq)]
pub enum StratumResult {
    /// In `A_{i,n} ∖ A_{i,n+1}`, below the address; `leaf` is `G_i⁻¹(x)`.
    FiniteRank {
        n: usize,
        address: Vec<Dyadic>,
        leaf: Seq,
        tag: Tag,
        payload: Val,
    },
    /// In `A_{i,n}` below `prefix`; the rank was not determined.
    DeepPrefix { n: usize, prefix: Vec<Dyadic> },
    /// In `A_{i,ω}`, on the certified branch.
    Infinite { branch: Periodic },
}

impl StratumResult {
    pub fn rank(&self) -> Option<usize> {
        match self {
            StratumResult::FiniteRank { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let ds = |v: &[Dyadic]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>();
        match self {
            StratumResult::FiniteRank {
                n, address, leaf, tag, ..
            } => json!({
                "rank": n,
                "address": ds(address),
                "leaf": leaf.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "color": tag.to_string(),
            }),
            StratumResult::DeepPrefix { n, prefix } => json!({ "deep": n, "prefix": ds(prefix) }),
            StratumResult::Infinite { branch } => json!({ "branch": branch.to_json() }),
        }
    }
}

/// End of a frontier address.
#[derive(Clone, Copy, Debug, PartialEq)]
enum End {
    Pos(Dyadic),
    Inf(Dyadic, bool),
}

fn dyadics(v: &[Dyadic]) -> Vec<Ent> {
    v.iter().map(|d| Ent::Dy(*d)).collect()
}

impl CsbInstance {
    /// `f_{j,q}(x) = (q, f_j(x))`, from `L_j` to `L_{-j}`.
    pub fn f_single(&self, j: Sign, q: Dyadic, x: &SideElem) -> Result<SideElem> {
        if !self.sentinel_set().contains(q) {
            return Err(Error::NotInR(q.to_string()));
        }
        Ok(self.embedding(j).apply(x)?.prepend(q))
    }

    /// `f_{i,ρ} = f_{i,ρ0} ∘ f_{-i,ρ1} ∘ …`, into `L_{-i}`; the identity for
    /// the empty sequence.
    pub fn f_path(&self, i: Sign, rho: &[Dyadic], x: &SideElem) -> Result<SideElem> {
        let mut x = x.clone();
        for t in (0..rho.len()).rev() {
            x = self.f_single(i.alt(t), rho[t], &x)?;
        }
        Ok(x)
    }

    pub fn peel(&self, i: Sign, x: &SideElem) -> Result<Peel> {
        let q = x.first();
        if !self.sentinel_set().contains(q) {
            return Ok(Peel::Base);
        }
        let z = x.drop_first().expect("nesting position");
        Ok(match self.embedding(i.neg()).classify(&z)? {
            Classified::In(y) => Peel::In(q, y),
            Classified::Below => Peel::Below(q, z),
            Classified::Above => Peel::Above(q, z),
        })
    }

    /// `(q, y)` with `x = f_{-i,q}(y)`, or `None` outside `A_{i,1}`.
    pub fn strip(&self, i: Sign, x: &SideElem) -> Result<Option<(Dyadic, SideElem)>> {
        Ok(match self.peel(i, x)? {
            Peel::In(q, y) => Some((q, y)),
            _ => None,
        })
    }

    pub fn stratum(&self, i: Sign, x: &SideElem, max_depth: usize) -> Result<StratumResult> {
        let certified = match self.oracle() {
            Some(o) => o.branch(i, x),
            None => None,
        };
        let mut address = Vec::new();
        let mut cur = x.clone();
        let mut k = i;
        loop {
            let (tail, tag, payload) = match self.peel(k, &cur)? {
                Peel::In(q, y) => {
                    if address.len() == max_depth {
                        return match certified {
                            Some(r) if r.take(max_depth) == dyadics(&address) => Ok(StratumResult::Infinite { branch: r }),
                            Some(r) => Err(Error::OracleInconsistent(format!(
                                "{x}: branch {r:?} against strip prefix {address:?}"
                            ))),
                            None => Ok(StratumResult::DeepPrefix { n: max_depth, prefix: address }),
                        };
                    }
                    address.push(q);
                    cur = y;
                    k = k.neg();
                    continue;
                }
                Peel::Base => match &cur {
                    SideElem::Finite { pos, color, sub, .. } => {
                        (vec![Ent::Dy(*pos)], Tag::Shuf(k, *color), Val::Term(sub.clone()))
                    }
                    SideElem::Deep { .. } => unreachable!("deep elements start in R"),
                },
                Peel::Below(q, z) => (vec![Ent::Dy(q), Ent::NegInf], Tag::Alpha(k.neg()), Val::Side(z)),
                Peel::Above(q, z) => (vec![Ent::Dy(q), Ent::PosInf], Tag::Delta(k.neg()), Val::Side(z)),
            };
            if let Some(r) = certified {
                return Err(Error::OracleInconsistent(format!(
                    "{x}: branch {r:?} but rank {}",
                    address.len()
                )));
            }
            let mut leaf: Seq = dyadics(&address).iter().chain(&tail).map(|e| e.to_ext()).collect();
            leaf.push(ExtRational::Fin(self.h_forward(tag, &payload)?));
            return Ok(StratumResult::FiniteRank {
                n: address.len(),
                address,
                leaf,
                tag,
                payload,
            });
        }
    }

    fn parse_address(&self, i: Sign, addr: &[Ent]) -> Result<(Vec<Dyadic>, End, Tag)> {
        let bad = || Error::NotALeaf(format!("{addr:?}"));
        let r = self.sentinel_set();
        let (body, end) = match addr {
            [rest @ .., Ent::Dy(q), inf @ (Ent::NegInf | Ent::PosInf)] if r.contains(*q) => {
                (rest, End::Inf(*q, *inf == Ent::NegInf))
            }
            [rest @ .., Ent::Dy(p)] if !r.contains(*p) => (rest, End::Pos(*p)),
            _ => return Err(bad()),
        };
        let rho: Vec<Dyadic> = body
            .iter()
            .map(|e| e.dyadic().filter(|d| r.contains(*d)).ok_or_else(bad))
            .collect::<Result<_>>()?;
        let k = i.alt(rho.len());
        let tag = match end {
            End::Pos(p) => Tag::Shuf(k, self.side(k).color_at(p).ok_or_else(bad)?),
            End::Inf(_, true) => Tag::Alpha(k.neg()),
            End::Inf(_, false) => Tag::Delta(k.neg()),
        };
        if !self.palette(tag.sign()).contains(&tag) {
            return Err(bad());
        }
        Ok((rho, end, tag))
    }

    /// `c_i` on the parents of leaves.
    pub fn address_tag(&self, i: Sign, addr: &[Ent]) -> Result<Tag> {
        Ok(self.parse_address(i, addr)?.2)
    }

    /// `H_i⁻¹`: the element at a frontier address with a payload.
    pub fn h_map_inverse(&self, i: Sign, addr: &[Ent], payload: &Val) -> Result<SideElem> {
        let (rho, end, tag) = self.parse_address(i, addr)?;
        if !self.tag_contains(tag, payload)? {
            return Err(Error::TypeMismatch(format!("{payload} is not in {tag}")));
        }
        let k = i.alt(rho.len());
        let base = match (end, payload) {
            (End::Pos(p), Val::Term(sub)) => self.side(k).finite(Vec::new(), p, sub.clone())?,
            (End::Inf(q, _), Val::Side(z)) => z.prepend(q),
            _ => unreachable!("payload checked against the tag"),
        };
        self.f_path(i.neg(), &rho, &base)
    }

    /// `G_i` on a leaf of `T_i`.
    pub fn g_forward(&self, i: Sign, sigma: &[ExtRational]) -> Result<SideElem> {
        let bad = || Error::NotALeaf(format!("{sigma:?}"));
        let (last, body) = sigma.split_last().ok_or_else(bad)?;
        let q1 = last.as_fin().ok_or_else(bad)?;
        let addr: Vec<Ent> = body.iter().map(|e| Ent::from_ext(e).ok_or_else(bad)).collect::<Result<_>>()?;
        let tag = self.address_tag(i, &addr)?;
        let payload = self.h_inverse(tag, q1).map_err(|_| bad())?;
        self.h_map_inverse(i, &addr, &payload)
    }

    /// `G_i⁻¹`, for elements of finite rank below the instance depth.
    pub fn g_inverse(&self, i: Sign, x: &SideElem) -> Result<Seq> {
        match self.stratum(i, x, self.depth())? {
            StratumResult::FiniteRank { leaf, .. } => Ok(leaf),
            _ => Err(Error::RankNotFinite),
        }
    }

    /// `H_i(x)`: the frontier address or branch, and the payload.
    pub fn h_map(&self, i: Sign, x: &SideElem, max_depth: usize) -> Result<(Point, Val)> {
        match self.stratum(i, x, max_depth)? {
            StratumResult::FiniteRank { leaf, payload, .. } => {
                let addr = leaf[..leaf.len() - 1]
                    .iter()
                    .map(|e| Ent::from_ext(e).expect("address entries are dyadic or infinite"))
                    .collect();
                Ok((Point::Node(addr), payload))
            }
            StratumResult::Infinite { branch } => {
                let y = self.h_r(i, &branch, x)?;
                Ok((Point::Branch(branch), Val::Side(y)))
            }
            StratumResult::DeepPrefix { n, .. } => Err(Error::Unresolved {
                element: x.to_string(),
                depth: n,
            }),
        }
    }

    /// `F_σ^τ = f_{-i,τ} ∘ f_{-i,σ}⁻¹` on `A_{i,n}^σ`.
    pub fn tail_transport(&self, i: Sign, sigma: &[Dyadic], tau: &[Dyadic], x: &SideElem) -> Result<SideElem> {
        if sigma.len() != tau.len() {
            return Err(Error::AddressMismatch(format!("lengths {} and {}", sigma.len(), tau.len())));
        }
        let mut cur = x.clone();
        let mut k = i;
        for q in sigma {
            match self.peel(k, &cur)? {
                Peel::In(p, y) if p == *q => cur = y,
                _ => return Err(Error::AddressMismatch(format!("{x} is not below {sigma:?}"))),
            }
            k = k.neg();
        }
        self.f_path(i.neg(), tau, &cur)
    }

    /// A random leaf of `T_i` with `n + 2` rational entries.
    pub fn random_leaf<G: Rng>(&self, i: Sign, n: usize, rng: &mut G) -> Result<Seq> {
        let side = self.side(i);
        let mut addr: Vec<Ent> = (0..n).map(|_| Ent::Dy(side.random_r(rng))).collect();
        let k = i.alt(n);
        let infinite = self.embedding(k.neg()).is_proper() && rng.gen_bool(0.5);
        let tag = if infinite {
            addr.push(Ent::Dy(side.random_r(rng)));
            let below = rng.gen_bool(0.5);
            addr.push(if below { Ent::NegInf } else { Ent::PosInf });
            if below {
                Tag::Alpha(k.neg())
            } else {
                Tag::Delta(k.neg())
            }
        } else {
            let p = self.side(k).random_free(rng);
            addr.push(Ent::Dy(p));
            Tag::Shuf(k, self.side(k).color_at(p).expect("free position"))
        };
        let payload = self.random_payload(tag, rng)?;
        let mut leaf: Seq = addr.iter().map(|e| e.to_ext()).collect();
        leaf.push(ExtRational::Fin(self.h_forward(tag, &payload)?));
        Ok(leaf)
    }

    /// Half images of random leaves with up to three rational entries
    /// beyond two, half random elements with up to three nesting positions.
    pub fn sample_elements(&self, i: Sign, n: usize, seed: u64) -> Result<Vec<SideElem>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x = if out.len() % 2 == 0 {
                let layer = rng.gen_range(0..=3);
                let leaf = self.random_leaf(i, layer, &mut rng)?;
                self.g_forward(i, &leaf)?
            } else {
                self.side(i).random_elem(&mut rng, 3)
            };
            if !out.contains(&x) {
                out.push(x);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csb::instance::{scenario, CsbInstance};

    fn inst(name: &str) -> CsbInstance {
        CsbInstance::build(&scenario(name).unwrap()).unwrap()
    }

    #[test]
    fn empty_path_is_identity() {
        let inst = inst("same-shuffle");
        let xs = inst.sample_elements(Sign::Minus, 20, 1).unwrap();
        for x in &xs {
            assert_eq!(&inst.f_path(Sign::Plus, &[], x).unwrap(), x);
        }
    }

    #[test]
    fn strip_inverts_f_single() {
        for name in ["same-shuffle", "absorbed-palette"] {
            let inst = inst(name);
            let q = inst.side(Sign::Plus).random_r(&mut ChaCha8Rng::seed_from_u64(9));
            for x in inst.sample_elements(Sign::Minus, 30, 2).unwrap() {
                let y = inst.f_single(Sign::Minus, q, &x).unwrap();
                assert_eq!(inst.strip(Sign::Plus, &y).unwrap(), Some((q, x)));
            }
        }
    }

    #[test]
    fn f_single_needs_r() {
        let inst = inst("same-shuffle");
        let x = inst.sample_elements(Sign::Plus, 1, 0).unwrap().remove(0);
        let p = inst.side(Sign::Plus).random_free(&mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(inst.f_single(Sign::Plus, p, &x), Err(Error::NotInR(_))));
    }

    #[test]
    fn g_roundtrip_on_leaves() {
        for name in ["same-shuffle", "absorbed-palette"] {
            let inst = inst(name);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for n in 0..3 {
                for _ in 0..30 {
                    let leaf = inst.random_leaf(Sign::Plus, n, &mut rng).unwrap();
                    let x = inst.g_forward(Sign::Plus, &leaf).unwrap();
                    assert_eq!(inst.g_inverse(Sign::Plus, &x).unwrap(), leaf, "{name}");
                }
            }
        }
    }

    #[test]
    fn depth_zero_leaves_deeper_elements_unresolved() {
        let inst = inst("absorbed-palette");
        let xs = inst.sample_elements(Sign::Plus, 40, 3).unwrap();
        let deep = xs
            .iter()
            .filter(|x| matches!(inst.stratum(Sign::Plus, x, 0).unwrap(), StratumResult::DeepPrefix { .. }))
            .count();
        assert!(deep > 0);
    }

    #[test]
    fn transport_needs_matching_address() {
        let inst = inst("same-shuffle");
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let leaf = inst.random_leaf(Sign::Plus, 2, &mut rng).unwrap();
        let x = inst.g_forward(Sign::Plus, &leaf).unwrap();
        let sigma: Vec<Dyadic> = leaf[..2].iter().map(|e| e.as_dyadic().unwrap()).collect();
        let other = vec![inst.q00(), inst.q00()];
        let y = inst.tail_transport(Sign::Plus, &sigma, &other, &x).unwrap();
        assert_eq!(inst.tail_transport(Sign::Plus, &other, &sigma, &y).unwrap(), x);
        assert_eq!(inst.tail_transport(Sign::Plus, &sigma, &sigma, &x).unwrap(), x);
        if sigma != other {
            assert!(matches!(
                inst.tail_transport(Sign::Plus, &other, &sigma, &x),
                Err(Error::AddressMismatch(_))
            ));
        }
    }
}
