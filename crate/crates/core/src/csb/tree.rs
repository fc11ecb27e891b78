//! The trees `T₊` and `T₋` of an instance.

use std::fmt;
use std::sync::Arc;

use crate::csb::instance::{CsbInstance, Tag};
use crate::csb::side::Sign;
use crate::error::Result;
use crate::order::{Dyadic, ExtRational};
use crate::trees::ColoredTree;

/// Colors of `T_i`: the sentinels `s₊, s₋`, the front colors, and `0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum NodeColor {
    Sentinel(Sign),
    Tag(Tag),
    Zero,
}

impl fmt::Display for NodeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeColor::Sentinel(s) => write!(f, "s{s}"),
            NodeColor::Tag(t) => write!(f, "{t}"),
            NodeColor::Zero => f.write_str("0"),
        }
    }
}

/// `T_i`. Below `ρ ∈ R^{<ω}` the children are all dyadics, plus `±∞` after
/// a nonempty `ρ` when the relevant embedding is proper; below a front
/// node they are the `h`-images of its color.
#[derive(Clone)]
pub struct SideTree {
    inst: Arc<CsbInstance>,
    sign: Sign,
}

impl SideTree {
    pub fn new(inst: Arc<CsbInstance>, sign: Sign) -> SideTree {
        SideTree { inst, sign }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn instance(&self) -> &Arc<CsbInstance> {
        &self.inst
    }

    fn step(&self, c: NodeColor, e: &ExtRational, at_root: bool) -> Option<NodeColor> {
        match c {
            NodeColor::Sentinel(m) => match e {
                ExtRational::Fin(_) => {
                    let d = e.as_dyadic()?;
                    Some(match self.inst.side(m).color_at(d) {
                        None => NodeColor::Sentinel(m.neg()),
                        Some(k) => NodeColor::Tag(Tag::Shuf(m, k)),
                    })
                }
                _ if at_root || !self.inst.embedding(m).is_proper() => None,
                ExtRational::NegInf => Some(NodeColor::Tag(Tag::Alpha(m))),
                ExtRational::PosInf => Some(NodeColor::Tag(Tag::Delta(m))),
            },
            NodeColor::Tag(t) => match e {
                ExtRational::Fin(q) if self.inst.h_inverse(t, q).is_ok() => Some(NodeColor::Zero),
                _ => None,
            },
            NodeColor::Zero => None,
        }
    }
}

impl ColoredTree for SideTree {
    type Color = NodeColor;

    fn node_color(&self, s: &[ExtRational]) -> Option<NodeColor> {
        let mut c = NodeColor::Sentinel(self.sign);
        for (t, e) in s.iter().enumerate() {
            c = self.step(c, e, t == 0)?;
        }
        Some(c)
    }

    fn children(&self, s: &[ExtRational], budget: usize) -> Result<Vec<ExtRational>> {
        let c = self
            .node_color(s)
            .ok_or_else(|| crate::error::Error::NotANode(crate::trees::seq_to_string(s)))?;
        Ok(match c {
            NodeColor::Sentinel(m) => {
                let mut out = Vec::new();
                if !s.is_empty() && self.inst.embedding(m).is_proper() {
                    out.push(ExtRational::NegInf);
                    out.push(ExtRational::PosInf);
                }
                out.extend((0..budget as u64).map(|k| ExtRational::from(Dyadic::from_index(k))));
                out
            }
            NodeColor::Tag(t) => self
                .inst
                .tag_samples(t, budget)?
                .iter()
                .map(|v| self.inst.h_forward(t, v).map(ExtRational::Fin))
                .collect::<Result<_>>()?,
            NodeColor::Zero => Vec::new(),
        })
    }

    fn is_front_color(&self, c: &NodeColor) -> bool {
        matches!(c, NodeColor::Tag(_))
    }

    fn color_name(&self, c: &NodeColor) -> String {
        c.to_string()
    }
}
