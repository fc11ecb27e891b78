//! The isomorphism `Φ = H₋⁻¹ ∘ Ψ ∘ H₊` and the end-to-end run.
//!
//! `Ψ` matches `front(T₊')` with `front(T₋')` by back-and-forth; both sides
//! use the same color keys, so the color map is the identity.

use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::check::{iso_check, swap_outputs, Coloring, Plan, Report};
use crate::csb::branches::extended_color;
use crate::csb::instance::{CsbInstance, Tag};
use crate::csb::side::{SideElem, Sign};
use crate::csb::strata::StratumResult;
use crate::error::{Error, Result};
use crate::skolem::points::{Budget, ColorFn, Point, Search, Shape, Structure, TreeOrder};
use crate::skolem::session::Session;
use crate::skolem::witness::IsoWitness;

fn key_index(keys: &[Tag], t: Tag) -> usize {
    keys.iter().position(|k| *k == t).expect("tag in the palette")
}

fn fan(inst: &CsbInstance, keys: &[Tag], m: Sign, nested: bool) -> Shape {
    let side = inst.side(m).clone();
    let n = side.shufflands().len();
    let mut parts: Vec<Shape> = (0..n).map(|c| Shape::Leaf(key_index(keys, Tag::Shuf(m, c)))).collect();
    parts.push(Shape::Ref(1 + m.neg().index()));
    let color: ColorFn = Arc::new(move |d| side.color_at(d).unwrap_or(n));
    let proper = nested && inst.embedding(m).is_proper();
    let inf = |t: Tag| proper.then(|| Box::new(Shape::Leaf(key_index(keys, t))));
    Shape::Fan {
        color,
        parts,
        neg_inf: inf(Tag::Alpha(m)),
        pos_inf: inf(Tag::Delta(m)),
    }
}

/// `front(T_i')` as a point tree: root, then the nested nodes below `s₊`
/// and `s₋`.
pub fn front_structure(inst: &CsbInstance, i: Sign) -> Structure {
    let tags = inst.all_tags();
    let keys = tags.iter().map(|t| t.key()).collect();
    let mut st = Structure::new(fan(inst, &tags, i, false), keys);
    st.table.push(fan(inst, &tags, Sign::Plus, true));
    st.table.push(fan(inst, &tags, Sign::Minus, true));
    st
}

pub fn front_order(inst: &CsbInstance, i: Sign) -> TreeOrder {
    TreeOrder::new(front_structure(inst, i))
}

/// A point of `front(T_i')` of the given color strictly between two others.
pub fn front_density_search(
    inst: &CsbInstance,
    i: Sign,
    lo: Option<&Point>,
    hi: Option<&Point>,
    tag: Tag,
    budget: Budget,
) -> Search<Point> {
    let c = key_index(&inst.all_tags(), tag);
    front_order(inst, i).with_budget(budget).search(lo, hi, Some(c))
}

type FrontSession = Session<TreeOrder, TreeOrder>;

/// `Φ : L₊ → L₋` on elements of finite rank.
pub struct Phi {
    inst: Arc<CsbInstance>,
    session: Arc<Mutex<FrontSession>>,
    witness: Arc<IsoWitness<SideElem, SideElem>>,
}

fn node_or_unresolved(p: Point, x: &SideElem, depth: usize) -> Result<Point> {
    match p {
        Point::Node(_) => Ok(p),
        Point::Branch(_) => Err(Error::Unresolved {
            element: x.to_string(),
            depth,
        }),
    }
}

fn transfer(
    inst: &CsbInstance,
    session: &Mutex<FrontSession>,
    from: Sign,
    x: &SideElem,
    depth: usize,
) -> Result<SideElem> {
    let (p, payload) = inst.h_map(from, x, depth)?;
    let p = node_or_unresolved(p, x, depth)?;
    let q = {
        let mut s = session.lock().unwrap();
        match from {
            Sign::Plus => s.match_left(&p)?,
            Sign::Minus => s.match_right(&p)?,
        }
    };
    let addr = q.as_node().expect("front points are nodes");
    inst.h_map_inverse(from.neg(), addr, &payload)
}

pub fn build_phi(inst: Arc<CsbInstance>, depth: usize) -> Result<Phi> {
    let session = Arc::new(Mutex::new(Session::new(
        front_order(&inst, Sign::Plus),
        front_order(&inst, Sign::Minus),
    )?));
    let (i1, s1, i2, s2, i3, i4) = (
        inst.clone(),
        session.clone(),
        inst.clone(),
        session.clone(),
        inst.clone(),
        inst.clone(),
    );
    let witness = IsoWitness::new(
        format!("phi {}", inst.name()),
        Box::new(move |x: &SideElem| transfer(&i1, &s1, Sign::Plus, x, depth)),
        Box::new(move |y: &SideElem| transfer(&i2, &s2, Sign::Minus, y, depth)),
        Box::new(move |a: &SideElem, b: &SideElem| i3.compare(Sign::Plus, a, b)),
        Box::new(move |a: &SideElem, b: &SideElem| i4.compare(Sign::Minus, a, b)),
    );
    Ok(Phi {
        inst,
        session,
        witness: Arc::new(witness),
    })
}

impl Phi {
    pub fn witness(&self) -> &IsoWitness<SideElem, SideElem> {
        &self.witness
    }

    pub fn forward(&self, x: &SideElem) -> Result<SideElem> {
        self.witness.forward(x)
    }

    pub fn backward(&self, y: &SideElem) -> Result<SideElem> {
        self.witness.backward(y)
    }

    pub fn instance(&self) -> &Arc<CsbInstance> {
        &self.inst
    }

    /// Number of front points matched so far.
    pub fn session_len(&self) -> usize {
        self.session.lock().unwrap().len()
    }
}

/// Options of [`run_csb`].
#[derive(Clone, Copy, Debug)]
pub struct CsbConfig {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Swap the images of two source elements.
    pub fault: bool,
}

impl Default for CsbConfig {
    fn default() -> Self {
        CsbConfig {
            depth: 8,
            samples: 1000,
            seed: 0,
            jobs: 1,
            fault: false,
        }
    }
}

/// Outcome of [`run_csb`].
#[derive(Clone, Debug)]
pub struct CsbReport {
    pub instance: String,
    pub depth: usize,
    pub seed: u64,
    pub resolved: [usize; 2],
    pub unresolved: [usize; 2],
    pub session_pairs: usize,
    pub check: Report,
}

impl CsbReport {
    pub fn passed(&self) -> bool {
        self.unresolved == [0, 0] && self.check.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "instance": self.instance,
            "depth": self.depth,
            "seed": self.seed,
            "resolved": { "plus": self.resolved[0], "minus": self.resolved[1] },
            "unresolved": { "plus": self.unresolved[0], "minus": self.unresolved[1] },
            "session_pairs": self.session_pairs,
            "check": self.check.to_json(),
            "passed": self.passed(),
        })
    }
}

fn resolves(inst: &CsbInstance, i: Sign, x: &SideElem, depth: usize) -> Result<bool> {
    Ok(matches!(inst.stratum(i, x, depth)?, StratumResult::FiniteRank { .. }))
}

/// Splits samples into resolved and unresolved at `depth`, on `jobs` threads.
fn partition(
    inst: &CsbInstance,
    i: Sign,
    xs: Vec<SideElem>,
    depth: usize,
    jobs: usize,
) -> Result<(Vec<SideElem>, usize)> {
    let chunk = xs.len().div_ceil(jobs.max(1)).max(1);
    let flags: Vec<bool> = std::thread::scope(|s| {
        let handles: Vec<_> = xs
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(|x| resolves(inst, i, x, depth)).collect::<Result<Vec<_>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?
    .concat();
    let unresolved = flags.iter().filter(|f| !**f).count();
    let kept = xs.into_iter().zip(flags).filter(|(_, f)| *f).map(|(x, _)| x).collect();
    Ok((kept, unresolved))
}

fn color_of(inst: &CsbInstance, i: Sign, x: &SideElem, depth: usize) -> Result<Value> {
    let (p, _) = inst.h_map(i, x, depth)?;
    Ok(extended_color(inst, i, &p)?.to_json())
}

/// Samples both sides, builds `Φ` and runs the harness on it.
pub fn run_csb(inst: Arc<CsbInstance>, cfg: CsbConfig) -> Result<CsbReport> {
    let src = inst.sample_elements(Sign::Plus, cfg.samples / 2, cfg.seed)?;
    let dst = inst.sample_elements(Sign::Minus, cfg.samples / 4, cfg.seed.wrapping_add(1))?;
    let (src, un_src) = partition(&inst, Sign::Plus, src, cfg.depth, cfg.jobs)?;
    let (dst, un_dst) = partition(&inst, Sign::Minus, dst, cfg.depth, cfg.jobs)?;
    let phi = build_phi(inst.clone(), cfg.depth)?;
    let plan = Plan::new(cfg.samples, cfg.samples / 2, cfg.samples / 5, cfg.seed);
    let depth = cfg.depth;
    let (ia, ib) = (inst.clone(), inst.clone());
    let source = move |x: &SideElem| color_of(&ia, Sign::Plus, x, depth);
    let target = move |y: &SideElem| color_of(&ib, Sign::Minus, y, depth);
    // Γ is the identity on front colors; class colors never reach Φ.
    let map = |v: &Value| v.clone();
    let coloring = || Coloring {
        source: &source,
        target: &target,
        map: &map,
    };
    let check = if cfg.fault {
        let faulty = swapped(&phi, &inst, &src)?;
        iso_check(&faulty, &src, &dst, plan, Some(coloring()))
    } else {
        iso_check(phi.witness(), &src, &dst, plan, Some(coloring()))
    };
    Ok(CsbReport {
        instance: inst.name().to_string(),
        depth: cfg.depth,
        seed: cfg.seed,
        resolved: [src.len(), dst.len()],
        unresolved: [un_src, un_dst],
        session_pairs: phi.session_len(),
        check,
    })
}

/// `Φ` with the images of the two least source samples exchanged.
fn swapped(phi: &Phi, inst: &CsbInstance, src: &[SideElem]) -> Result<IsoWitness<SideElem, SideElem>> {
    let mut sorted = src.to_vec();
    sorted.sort_by(|a, b| inst.compare(Sign::Plus, a, b));
    if sorted.len() < 2 {
        return Err(Error::InvalidInstance("fault injection needs two samples".into()));
    }
    swap_outputs(phi.witness.clone(), sorted[0].clone(), sorted[1].clone())
}

/// `Φ(x)` together with both stratum descriptions.
pub fn trace_phi(phi: &Phi, x: &SideElem, depth: usize) -> Result<Value> {
    let inst = phi.instance();
    let y = phi.forward(x)?;
    Ok(json!({
        "x": x.to_json(),
        "x_stratum": inst.stratum(Sign::Plus, x, depth)?.to_json(),
        "y": y.to_json(),
        "y_stratum": inst.stratum(Sign::Minus, &y, depth)?.to_json(),
    }))
}
