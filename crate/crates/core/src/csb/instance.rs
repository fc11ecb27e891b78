//! Instances: the two sides, the embeddings, the palettes `F_i` and the
//! per-color embeddings `h` into the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::{adjacency_probe, Probe};
use crate::csb::embedding::{presented_iso, Classified, Embedding, Pres, Presented, Step, Val};
use crate::csb::side::{Side, SideElem, Sign};
use crate::error::{Error, Result};
use crate::order::element::{compare_unchecked, typecheck};
use crate::order::rational::{slot_locate, slot_place};
use crate::order::{embed_in_q, invert_from_q, parse_term, Dyadic, Enumeration, OrderTerm, Rational};
use crate::skolem::coloring::{make_shared_sentinel_colorings, Color, Palette, SentinelSet};
use crate::skolem::identities::Presentation;
use crate::skolem::points::Periodic;

/// A color of `F₊ ∪ F₋`: a shuffland, or the part of `L_{-m}` below
/// (`Alpha(m)`) or above (`Delta(m)`) the image of `f_m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Tag {
    Shuf(Sign, usize),
    Alpha(Sign),
    Delta(Sign),
}

impl Tag {
    pub fn sign(self) -> Sign {
        match self {
            Tag::Shuf(m, _) | Tag::Alpha(m) | Tag::Delta(m) => m,
        }
    }

    pub fn key(self) -> Color {
        Color::Label(self.to_string())
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Shuf(m, c) => write!(f, "shuf{m}{c}"),
            Tag::Alpha(m) => write!(f, "alpha{m}"),
            Tag::Delta(m) => write!(f, "delta{m}"),
        }
    }
}

/// Certifies elements of infinite rank together with their branch.
pub trait BranchOracle: Send + Sync {
    fn name(&self) -> &str;
    /// The branch of `x ∈ L_side`, when `x` has infinite rank.
    fn branch(&self, side: Sign, x: &SideElem) -> Option<Periodic>;
}

/// Everything the pipeline needs.
pub struct CsbInstance {
    name: String,
    sides: [Arc<Side>; 2],
    embeds: [Embedding; 2],
    r: SentinelSet,
    q00: Dyadic,
    oracle: Option<Arc<dyn BranchOracle>>,
    depth: usize,
}

impl fmt::Debug for CsbInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CsbInstance")
            .field("name", &self.name)
            .field("plus", &self.sides[0])
            .field("minus", &self.sides[1])
            .field("f_plus", &self.embeds[0])
            .field("f_minus", &self.embeds[1])
            .finish()
    }
}

impl CsbInstance {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn side(&self, s: Sign) -> &Arc<Side> {
        &self.sides[s.index()]
    }

    /// `f_s : L_s → L_{-s}`.
    pub fn embedding(&self, s: Sign) -> &Embedding {
        &self.embeds[s.index()]
    }

    pub fn sentinel_set(&self) -> &SentinelSet {
        &self.r
    }

    /// Least-index member of `R`.
    pub fn q00(&self) -> Dyadic {
        self.q00
    }

    pub fn oracle(&self) -> Option<&Arc<dyn BranchOracle>> {
        self.oracle.as_ref()
    }

    pub fn set_oracle(&mut self, oracle: Option<Arc<dyn BranchOracle>>) {
        self.oracle = oracle;
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn compare(&self, s: Sign, a: &SideElem, b: &SideElem) -> Ordering {
        self.side(s).compare(a, b)
    }

    /// `F_m`, with the shufflands first, then `Alpha(m)` before `Delta(m)`
    /// when `f_m` is not onto.
    pub fn palette(&self, m: Sign) -> Vec<Tag> {
        let mut v: Vec<Tag> = (0..self.side(m).shufflands().len()).map(|c| Tag::Shuf(m, c)).collect();
        if self.embedding(m).is_proper() {
            v.push(Tag::Alpha(m));
            v.push(Tag::Delta(m));
        }
        v
    }

    /// `F₊ ∪ F₋` in a fixed order.
    pub fn all_tags(&self) -> Vec<Tag> {
        let mut v = self.palette(Sign::Plus);
        v.extend(self.palette(Sign::Minus));
        v
    }

    fn part(&self, tag: Tag) -> Result<(usize, usize)> {
        let p = self.palette(tag.sign());
        let j = p
            .iter()
            .position(|t| *t == tag)
            .ok_or_else(|| Error::PaletteMismatch(format!("{tag} is empty")))?;
        Ok((j, p.len()))
    }

    /// Whether `v` is an element of the order named by `tag`.
    pub fn tag_contains(&self, tag: Tag, v: &Val) -> Result<bool> {
        Ok(match (tag, v) {
            (Tag::Shuf(m, c), Val::Term(e)) => typecheck(self.side(m).term(c), e).is_ok(),
            (Tag::Alpha(m), Val::Side(z)) | (Tag::Delta(m), Val::Side(z)) => {
                if self.side(m.neg()).validate(z).is_err() {
                    return Ok(false);
                }
                let c = self.embedding(m).classify(z)?;
                matches!(
                    (tag, c),
                    (Tag::Alpha(_), Classified::Below) | (Tag::Delta(_), Classified::Above)
                )
            }
            _ => false,
        })
    }

    pub fn tag_compare(&self, tag: Tag, a: &Val, b: &Val) -> Ordering {
        match (tag, a, b) {
            (Tag::Shuf(m, c), Val::Term(x), Val::Term(y)) => compare_unchecked(self.side(m).term(c), x, y),
            (Tag::Alpha(m) | Tag::Delta(m), Val::Side(x), Val::Side(y)) => self.side(m.neg()).compare(x, y),
            _ => panic!("{a} and {b} are not both in {tag}"),
        }
    }

    /// `h` restricted to one color: the part `j` of `M` goes to
    /// `(j/M, (j+1)/M)`.
    pub fn h_forward(&self, tag: Tag, v: &Val) -> Result<Rational> {
        let (j, m) = self.part(tag)?;
        let e = match (tag, v) {
            (Tag::Shuf(s, c), Val::Term(x)) => embed_in_q(self.side(s).term(c), x)?,
            (Tag::Alpha(s) | Tag::Delta(s), Val::Side(z)) => nested_embed(self.side(s.neg()), z)?,
            _ => return Err(Error::TypeMismatch(format!("{v} is not in {tag}"))),
        };
        Ok((Rational::integer(j as i64) + e) / Rational::integer(m as i64))
    }

    /// Inverse of [`CsbInstance::h_forward`]; `NotInImage` off the image.
    pub fn h_inverse(&self, tag: Tag, q: &Rational) -> Result<Val> {
        let (j, m) = self.part(tag)?;
        let e = q * &Rational::integer(m as i64) - Rational::integer(j as i64);
        let v = match tag {
            Tag::Shuf(s, c) => Val::Term(invert_from_q(self.side(s).term(c), &e)?),
            Tag::Alpha(s) | Tag::Delta(s) => Val::Side(nested_locate(self.side(s.neg()), &e)?),
        };
        if !self.tag_contains(tag, &v)? {
            return Err(Error::NotInImage);
        }
        Ok(v)
    }

    /// The first `n` elements of a color in a fixed schedule.
    pub fn tag_samples(&self, tag: Tag, n: usize) -> Result<Vec<Val>> {
        match tag {
            Tag::Shuf(m, c) => Ok(Enumeration::new(self.side(m).term(c))
                .prefix(n)
                .into_iter()
                .map(Val::Term)
                .collect()),
            Tag::Alpha(_) | Tag::Delta(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(tag_seed(tag));
                let mut out = Vec::with_capacity(n);
                for _ in 0..200 * n.max(1) {
                    if out.len() == n {
                        break;
                    }
                    let v = self.random_payload(tag, &mut rng)?;
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
                Ok(out)
            }
        }
    }

    /// A random element of a color.
    pub fn random_payload<G: Rng>(&self, tag: Tag, rng: &mut G) -> Result<Val> {
        match tag {
            Tag::Shuf(m, c) => Ok(Val::Term(self.side(m).random_sub(rng, c))),
            Tag::Alpha(m) | Tag::Delta(m) => {
                let side = self.side(m.neg());
                for _ in 0..10_000 {
                    let v = Val::Side(side.random_elem(rng, 2));
                    if self.tag_contains(tag, &v)? {
                        return Ok(v);
                    }
                }
                Err(Error::BudgetExhausted(10_000))
            }
        }
    }
}

fn tag_seed(tag: Tag) -> u64 {
    match tag {
        Tag::Shuf(m, c) => 16 * m.index() as u64 + c as u64 + 1,
        Tag::Alpha(m) => 1001 + m.index() as u64,
        Tag::Delta(m) => 2001 + m.index() as u64,
    }
}

fn nested_embed(side: &Side, z: &SideElem) -> Result<Rational> {
    match z {
        SideElem::Finite { nest, pos, color, sub } => {
            let mut v = slot_place(*pos, &embed_in_q(side.term(*color), sub)?);
            for d in nest.iter().rev() {
                v = slot_place(*d, &v);
            }
            Ok(v)
        }
        SideElem::Deep { .. } => Err(Error::TypeMismatch(format!("{z} has no rational code"))),
    }
}

const MAX_NEST: usize = 1024;

fn nested_locate(side: &Side, v: &Rational) -> Result<SideElem> {
    let mut v = v.clone();
    let mut nest = Vec::new();
    for _ in 0..MAX_NEST {
        let (d, inner) = slot_locate(&v)?;
        if side.in_r(d) {
            nest.push(d);
            v = inner;
            continue;
        }
        let c = side.coloring().color_at(d);
        let sub = invert_from_q(side.term(c), &inner)?;
        return side.finite(nest, d, sub);
    }
    Err(Error::NotInImage)
}

/// A position in an instance file: `"q00"`, a dyadic `"p/q"`, or the first
/// position outside `R` holding a given shuffland.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosSpec {
    Named(String),
    First { first: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSpec {
    Inner(PosSpec),
    Block(PosSpec),
    /// `to` is `"term:<term>"`, `"side:+"` or `"side:-"`.
    Witness { to: String },
    Identity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSpec {
    #[default]
    None,
    Synthetic,
}

fn default_depth() -> usize {
    8
}

/// The JSON instance format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(default)]
    pub name: String,
    pub plus: Vec<String>,
    pub minus: Vec<String>,
    pub f_plus: Vec<StepSpec>,
    pub f_minus: Vec<StepSpec>,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default = "default_depth")]
    pub depth: usize,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<InstanceSpec> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn inner(s: &str) -> StepSpec {
    StepSpec::Inner(PosSpec::Named(s.into()))
}

/// Equal palettes `{1}`, both embeddings `x ↦ (q00, x)`.
pub fn same_shuffle_spec() -> InstanceSpec {
    InstanceSpec {
        name: "same-shuffle".into(),
        plus: vec!["1".into()],
        minus: vec!["1".into()],
        f_plus: vec![inner("q00")],
        f_minus: vec![inner("q00")],
        oracle: OracleSpec::None,
        depth: 8,
    }
}

/// `S⁰₊ = {1}`, `S⁰₋ = {1, shuffle{1}}`: `f₊` sends `L₊` onto a
/// `shuffle{1}` block of `L₋`, `f₋` goes through an isomorphism onto `L₊`
/// and then into the copy at `q00`.
pub fn absorbed_palette_spec() -> InstanceSpec {
    InstanceSpec {
        name: "absorbed-palette".into(),
        plus: vec!["1".into()],
        minus: vec!["1".into(), "shuffle{1}".into()],
        f_plus: vec![
            StepSpec::Witness {
                to: "term:shuffle{1}".into(),
            },
            StepSpec::Block(PosSpec::First {
                first: "shuffle{1}".into(),
            }),
        ],
        f_minus: vec![StepSpec::Witness { to: "side:+".into() }, inner("q00")],
        oracle: OracleSpec::None,
        depth: 8,
    }
}

/// [`same_shuffle_spec`] extended by elements of infinite rank.
pub fn synthetic_branch_spec() -> InstanceSpec {
    InstanceSpec {
        name: "synthetic-branch".into(),
        oracle: OracleSpec::Synthetic,
        ..same_shuffle_spec()
    }
}

/// Built-in instance by name.
pub fn scenario(name: &str) -> Option<InstanceSpec> {
    match name {
        "same-shuffle" => Some(same_shuffle_spec()),
        "absorbed-palette" => Some(absorbed_palette_spec()),
        "synthetic-branch" => Some(synthetic_branch_spec()),
        _ => None,
    }
}

pub const SCENARIOS: [&str; 3] = ["same-shuffle", "absorbed-palette", "synthetic-branch"];

fn parse_palette(v: &[String]) -> Result<Vec<OrderTerm>> {
    let mut out = Vec::new();
    for s in v {
        let t = parse_term(s)?.normalized();
        if !t.is_empty() && !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Rejects pairs of palettes that cannot embed convexly into each other
/// because one shuffle has adjacent elements and the other has none.
pub fn check_biembeddable(plus: &[OrderTerm], minus: &[OrderTerm]) -> Result<()> {
    match (plus.is_empty(), minus.is_empty()) {
        (true, true) => return Err(Error::InvalidInstance("both palettes are empty".into())),
        (true, false) | (false, true) => {
            return Err(Error::NotBiembeddable("exactly one side is empty".into()))
        }
        _ => {}
    }
    let xp = OrderTerm::shuffle(plus.to_vec())?;
    let xm = OrderTerm::shuffle(minus.to_vec())?;
    for (a, b) in [(&xp, &xm), (&xm, &xp)] {
        if let (Probe::Adjacent(x, y), Probe::Dense) = (adjacency_probe(a, 64), adjacency_probe(b, 64)) {
            return Err(Error::NotBiembeddable(format!(
                "{a} has adjacent elements {x} < {y} but {b} is dense"
            )));
        }
    }
    Ok(())
}

fn sentinel_palette(terms: &[OrderTerm]) -> Palette {
    let mut p = Palette::terms(terms.to_vec());
    p.colors.push(Color::Label("R".into()));
    p.with_sentinel(terms.len())
}

fn parse_pos(p: &PosSpec, to: &Side, q00: Dyadic) -> Result<Dyadic> {
    match p {
        PosSpec::Named(s) if s == "q00" => Ok(q00),
        PosSpec::Named(s) => s.parse(),
        PosSpec::First { first } => {
            let t = parse_term(first)?.normalized();
            (0..)
                .map(Dyadic::from_index)
                .take(1 << 16)
                .find(|d| to.color_at(*d).is_some_and(|c| to.term(c).normalized() == t))
                .ok_or_else(|| Error::InvalidInstance(format!("no block holds {t}")))
        }
    }
}

fn parse_pres(s: &str) -> Result<Pres> {
    if let Some(t) = s.strip_prefix("term:") {
        return Ok(Pres::Term(parse_term(t)?.normalized()));
    }
    if let Some(side) = s.strip_prefix("side:").and_then(Sign::parse) {
        return Ok(Pres::Side(side));
    }
    Err(Error::InvalidInstance(format!("unknown presentation {s:?}")))
}

fn presented(p: &Pres, sides: &[Arc<Side>; 2]) -> Result<Presented> {
    Ok(match p {
        Pres::Side(s) => Presented::Side(sides[s.index()].clone()),
        Pres::Term(t) => Presented::Term(Arc::new(Presentation::new(t.clone())?)),
    })
}

fn build_chain(from: Sign, specs: &[StepSpec], sides: &[Arc<Side>; 2], q00: Dyadic) -> Result<Embedding> {
    let to = &sides[from.neg().index()];
    let mut cur = Pres::Side(from);
    let mut steps = Vec::new();
    for spec in specs {
        let step = match spec {
            StepSpec::Inner(p) => Step::Inner(parse_pos(p, to, q00)?),
            StepSpec::Block(p) => Step::Block(parse_pos(p, to, q00)?),
            StepSpec::Identity => Step::Identity,
            StepSpec::Witness { to: target } => {
                let target = parse_pres(target)?;
                let name = format!("f{from}: {cur} -> {target}");
                let iso = presented_iso(&name, presented(&cur, sides)?, presented(&target, sides)?)?;
                cur = target.clone();
                Step::Witness {
                    to: target,
                    iso: Arc::new(iso),
                }
            }
        };
        steps.push(step);
    }
    Embedding::new(sides[from.index()].clone(), to.clone(), steps)
}

impl CsbInstance {
    /// Validates and builds an instance. Biembeddability is probed before
    /// the chains are type-checked.
    pub fn build(spec: &InstanceSpec) -> Result<CsbInstance> {
        let plus = parse_palette(&spec.plus)?;
        let minus = parse_palette(&spec.minus)?;
        check_biembeddable(&plus, &minus)?;
        let (cp, cm, r) = make_shared_sentinel_colorings(sentinel_palette(&plus), sentinel_palette(&minus))?;
        let sides = [
            Arc::new(Side::new(Sign::Plus, plus, cp, r.clone())),
            Arc::new(Side::new(Sign::Minus, minus, cm, r.clone())),
        ];
        let q00 = r.first();
        let fp = build_chain(Sign::Plus, &spec.f_plus, &sides, q00)?;
        let fm = build_chain(Sign::Minus, &spec.f_minus, &sides, q00)?;
        let oracle: Option<Arc<dyn BranchOracle>> = match spec.oracle {
            OracleSpec::None => None,
            OracleSpec::Synthetic => {
                let inner_q00 = |e: &Embedding| matches!(e.steps(), [Step::Inner(q)] if *q == q00);
                if !inner_q00(&fp) || !inner_q00(&fm) || sides[0].shufflands() != sides[1].shufflands() {
                    return Err(Error::InvalidInstance(
                        "the synthetic oracle needs equal palettes and both embeddings inner at q00".into(),
                    ));
                }
                Some(Arc::new(crate::csb::branches::SyntheticOracle::new(q00)))
            }
        };
        Ok(CsbInstance {
            name: spec.name.clone(),
            sides,
            embeds: [fp, fm],
            r,
            q00,
            oracle,
            depth: spec.depth,
        })
    }
}
