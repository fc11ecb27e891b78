//! Dense colorings of the dyadic rationals in (0, 1).
//!
//! Colorings are built by a staged greedy schedule. Stage `t` names a dyadic
//! block (the open interval of all dyadics extending a binary word) and a
//! color `c`; it gives `c` to the least-index uncolored dyadic in that block.
//! Afterwards the `t`-th dyadic gets the default color if it is still
//! uncolored. Every block meets every color, so every color is dense, and the
//! `t`-th dyadic is colored once stage `t` has run.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::{Dyadic, DyadicWord, OrderTerm};

const UNSET: u32 = u32::MAX;
const WINDOW: u64 = 64;
/// Stages from here on are resolved along a single chain of blocks.
const LOCAL_FROM: u64 = 1 << 18;

/// One palette member: an order term or an opaque label.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Color {
    Term(OrderTerm),
    Label(String),
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Term(t) => write!(f, "{t}"),
            Color::Label(s) => f.write_str(s),
        }
    }
}

/// Indexed family of colors with an optional sentinel.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Palette {
    pub colors: Vec<Color>,
    pub sentinel: Option<usize>,
}

impl Palette {
    pub fn labels<S: AsRef<str>>(labels: &[S]) -> Palette {
        Palette {
            colors: labels.iter().map(|s| Color::Label(s.as_ref().to_string())).collect(),
            sentinel: None,
        }
    }

    pub fn terms(terms: Vec<OrderTerm>) -> Palette {
        Palette {
            colors: terms.into_iter().map(Color::Term).collect(),
            sentinel: None,
        }
    }

    pub fn with_sentinel(mut self, index: usize) -> Palette {
        self.sentinel = Some(index);
        self
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn term(&self, index: usize) -> Option<&OrderTerm> {
        match self.colors.get(index) {
            Some(Color::Term(t)) => Some(t),
            _ => None,
        }
    }

    pub fn index_of(&self, color: &Color) -> Option<usize> {
        self.colors.iter().position(|c| c == color)
    }
}

/// A row of the construction log.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct LogEntry {
    pub stage: u64,
    pub block: u64,
    pub color: usize,
    /// Enumeration index of the dyadic colored at this stage.
    pub chosen: u64,
}

/// The staged greedy schedule for a fixed number of colors.
///
/// With a `domain`, only dyadics that the domain colors with 0 are colored.
pub struct Engine {
    k: usize,
    seed: Option<u64>,
    domain: Option<Arc<Engine>>,
    local_from: u64,
    state: Mutex<State>,
}

#[derive(Default)]
struct State {
    colors: Vec<u32>,
    chosen: Vec<u64>,
    perms: HashMap<u64, Vec<u8>>,
    local: HashMap<u64, u64>,
}

impl Engine {
    fn new(k: usize, seed: Option<u64>, domain: Option<Arc<Engine>>) -> Engine {
        Engine::with_local_from(k, seed, domain, LOCAL_FROM)
    }

    fn with_local_from(k: usize, seed: Option<u64>, domain: Option<Arc<Engine>>, local_from: u64) -> Engine {
        assert!(k > 0);
        Engine {
            k,
            seed,
            domain,
            local_from,
            state: Mutex::new(State::default()),
        }
    }

    pub fn colors(&self) -> usize {
        self.k
    }

    fn default_color(&self) -> usize {
        self.seed.map_or(0, |s| (s % self.k as u64) as usize)
    }

    fn perm(&self, st: &mut State, window: u64) -> Vec<u8> {
        let seed = self.seed.expect("seeded schedule");
        st.perms
            .entry(window)
            .or_insert_with(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ window.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let mut p: Vec<u8> = (0..WINDOW as u8).collect();
                p.shuffle(&mut rng);
                p
            })
            .clone()
    }

    /// The (block, color) request served at a stage.
    fn request(&self, st: &mut State, stage: u64) -> (u64, usize) {
        let slot = match self.seed {
            None => stage,
            Some(_) => {
                let w = stage / WINDOW;
                w * WINDOW + self.perm(st, w)[(stage % WINDOW) as usize] as u64
            }
        };
        let k = self.k as u64;
        let rot = self.seed.unwrap_or(0) % k;
        (slot / k, ((slot + rot) % k) as usize)
    }

    /// Stage serving a given (block, color) request.
    fn stage_for(&self, st: &mut State, block: u64, color: usize) -> u64 {
        let k = self.k as u64;
        let rot = self.seed.unwrap_or(0) % k;
        let slot = block * k + (color as u64 + k - rot) % k;
        match self.seed {
            None => slot,
            Some(_) => {
                let w = slot / WINDOW;
                let p = self.perm(st, w);
                let pos = p.iter().position(|&x| x as u64 == slot % WINDOW).unwrap();
                w * WINDOW + pos as u64
            }
        }
    }

    fn in_domain(&self, index: u64) -> bool {
        self.domain.as_ref().is_none_or(|d| d.color_of_index(index) == 0)
    }

    fn get(st: &State, index: u64) -> u32 {
        st.colors.get(index as usize).copied().unwrap_or(UNSET)
    }

    fn set(st: &mut State, index: u64, color: usize) {
        let i = index as usize;
        if st.colors.len() <= i {
            st.colors.resize(i + 1, UNSET);
        }
        st.colors[i] = color as u32;
    }

    fn run_stage(&self, st: &mut State) {
        let stage = st.chosen.len() as u64;
        let (block, color) = self.request(st, stage);
        let (lo, hi) = DyadicWord::block(block).block_bounds();
        let mut chosen = u64::MAX;
        for d in Dyadic::between(lo, hi) {
            let idx = d.index();
            if Self::get(st, idx) == UNSET && self.in_domain(idx) {
                Self::set(st, idx, color);
                chosen = idx;
                break;
            }
        }
        st.chosen.push(chosen);
        if Self::get(st, stage) == UNSET && self.in_domain(stage) {
            Self::set(st, stage, self.default_color());
        }
    }

    fn run_until(&self, st: &mut State, stage: u64) {
        while (st.chosen.len() as u64) <= stage {
            self.run_stage(st);
        }
    }

    /// The dyadic index chosen at a stage. Past `local_from` it is found
    /// without running earlier stages: only stages whose blocks overlap can
    /// compete for the same dyadics.
    fn chosen_at(&self, st: &mut State, stage: u64) -> u64 {
        if let Some(&c) = st.chosen.get(stage as usize) {
            return c;
        }
        if stage < self.local_from {
            self.run_until(st, stage);
            return st.chosen[stage as usize];
        }
        if let Some(&c) = st.local.get(&stage) {
            return c;
        }
        let (block, _) = self.request(st, stage);
        let rivals = self.overlapping_before(st, stage, block);
        let taken: Vec<u64> = rivals.into_iter().map(|t| self.chosen_at(st, t)).collect();
        let (m, v) = word_of(block);
        let mut chosen = u64::MAX;
        'levels: for l in m + 1..=crate::order::rational::MAX_LEVEL {
            let start = (1u64 << (l - 1)) - 1 + (v << (l - m - 1));
            let end = start + (1u64 << (l - m - 1));
            for idx in start.max(stage)..end {
                if !taken.contains(&idx) && self.in_domain(idx) {
                    chosen = idx;
                    break 'levels;
                }
            }
        }
        st.local.insert(stage, chosen);
        chosen
    }

    /// Stages before `stage` whose blocks contain or lie inside `block`.
    fn overlapping_before(&self, st: &mut State, stage: u64, block: u64) -> Vec<u64> {
        let (m, v) = word_of(block);
        let mut out = Vec::new();
        for a in 0..=m {
            let anc = (1u64 << a) - 1 + (v >> (m - a));
            for c in 0..self.k {
                let t = self.stage_for(st, anc, c);
                if t < stage {
                    out.push(t);
                }
            }
        }
        if self.seed.is_some() {
            for t in stage / WINDOW * WINDOW..stage {
                let (b, _) = self.request(st, t);
                let (mb, vb) = word_of(b);
                if mb > m && vb >> (mb - m) == v {
                    out.push(t);
                }
            }
        }
        out
    }

    fn local_color(&self, st: &mut State, index: u64) -> usize {
        let d = Dyadic::from_index(index);
        let (l, num) = (d.level(), d.num());
        for m in 0..l {
            let block = (1u64 << m) - 1 + (num >> (l - m));
            for c in 0..self.k {
                let t = self.stage_for(st, block, c);
                if t <= index && self.chosen_at(st, t) == index {
                    return c;
                }
            }
        }
        self.default_color()
    }

    /// Color of the dyadic with the given enumeration index, or `None` when
    /// the index lies outside the domain.
    pub fn try_color_of_index(&self, index: u64) -> Option<usize> {
        if self.k == 1 && self.domain.is_none() {
            return Some(0);
        }
        if !self.in_domain(index) {
            return None;
        }
        let mut st = self.state.lock().unwrap();
        if Self::get(&st, index) == UNSET {
            if index >= self.local_from && st.chosen.len() as u64 <= index {
                return Some(self.local_color(&mut st, index));
            }
            self.run_until(&mut st, index);
        }
        Some(Self::get(&st, index) as usize)
    }

    /// # Panics
    /// If the index is outside the domain.
    pub fn color_of_index(&self, index: u64) -> usize {
        self.try_color_of_index(index)
            .expect("dyadic outside the coloring domain")
    }

    /// A dyadic strictly between the bounds with the given color, read off
    /// the stage that serves the smallest dyadic block inside the interval.
    pub fn witness(&self, lo: Option<Dyadic>, hi: Option<Dyadic>, color: usize) -> Result<Dyadic> {
        if color >= self.k {
            return Err(Error::PaletteMismatch(format!("color {color} of {}", self.k)));
        }
        if let (Some(a), Some(b)) = (lo, hi) {
            if a >= b {
                return Err(Error::PreconditionViolation(format!("empty interval ({a}, {b})")));
            }
        }
        let block = smallest_block_inside(lo, hi);
        let mut st = self.state.lock().unwrap();
        let stage = self.stage_for(&mut st, block, color);
        Ok(Dyadic::from_index(self.chosen_at(&mut st, stage)))
    }

    /// First `n` rows of the construction log.
    pub fn log(&self, n: usize) -> Vec<LogEntry> {
        let mut st = self.state.lock().unwrap();
        if n > 0 {
            self.run_until(&mut st, n as u64 - 1);
        }
        (0..n as u64)
            .map(|s| {
                let (block, color) = self.request(&mut st, s);
                LogEntry {
                    stage: s,
                    block,
                    color,
                    chosen: st.chosen[s as usize],
                }
            })
            .collect()
    }
}

/// Length and value of the binary word of a block index.
fn word_of(block: u64) -> (u32, u64) {
    let m = 63 - (block + 1).leading_zeros();
    (m, block + 1 - (1u64 << m))
}

/// Breadth-first index of the shortest binary word whose block lies inside
/// the interval (the leftmost one among equals).
fn smallest_block_inside(lo: Option<Dyadic>, hi: Option<Dyadic>) -> u64 {
    for m in 0..62u32 {
        let scale = 1u64 << m;
        // smallest k with k / 2^m >= lo
        let k = match lo {
            None => 0,
            Some(a) => {
                if a.level() <= m {
                    a.num() << (m - a.level())
                } else {
                    (a.num() >> (a.level() - m)) + 1
                }
            }
        };
        // need (k + 1) / 2^m <= hi
        let fits = match hi {
            None => k < scale,
            Some(b) => {
                if b.level() <= m {
                    k < b.num() << (m - b.level())
                } else {
                    k < b.num() >> (b.level() - m)
                }
            }
        };
        if fits {
            return scale - 1 + k;
        }
    }
    unreachable!("interval narrower than the deepest level")
}

type EngineKey = (usize, Option<u64>, bool);

fn engines() -> &'static Mutex<HashMap<EngineKey, Arc<Engine>>> {
    static CELL: OnceLock<Mutex<HashMap<EngineKey, Arc<Engine>>>> = OnceLock::new();
    CELL.get_or_init(Default::default)
}

fn engine(k: usize, seed: Option<u64>, nested: bool) -> Arc<Engine> {
    if let Some(e) = engines().lock().unwrap().get(&(k, seed, nested)) {
        return e.clone();
    }
    let domain = nested.then(|| engine(2, None, false));
    let e = Arc::new(Engine::new(k, seed, domain));
    engines()
        .lock()
        .unwrap()
        .entry((k, seed, nested))
        .or_insert(e)
        .clone()
}

/// The process-wide coloring used by `shuffle` terms with `k` parts.
pub fn shuffle_engine(k: usize) -> Arc<Engine> {
    engine(k, None, false)
}

#[derive(Clone)]
enum Layout {
    Plain(Arc<Engine>),
    Sentinel {
        base: Arc<Engine>,
        nested: Arc<Engine>,
        sentinel: usize,
        others: Vec<usize>,
    },
}

/// A total computable dense coloring of the dyadics in (0, 1).
#[derive(Clone)]
pub struct DenseColoring {
    palette: Palette,
    layout: Layout,
}

impl fmt::Debug for DenseColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseColoring").field("palette", &self.palette).finish()
    }
}

impl DenseColoring {
    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn color_at(&self, d: Dyadic) -> usize {
        match &self.layout {
            Layout::Plain(e) => e.color_of_index(d.index()),
            Layout::Sentinel {
                base,
                nested,
                sentinel,
                others,
            } => {
                if base.color_of_index(d.index()) == 1 {
                    *sentinel
                } else {
                    others[nested.color_of_index(d.index())]
                }
            }
        }
    }

    /// A dyadic of the given color strictly between the bounds.
    pub fn witness(&self, lo: Option<Dyadic>, hi: Option<Dyadic>, color: usize) -> Result<Dyadic> {
        match &self.layout {
            Layout::Plain(e) => e.witness(lo, hi, color),
            Layout::Sentinel {
                base,
                nested,
                sentinel,
                others,
            } => {
                if color == *sentinel {
                    base.witness(lo, hi, 1)
                } else {
                    let c = others
                        .iter()
                        .position(|&o| o == color)
                        .ok_or_else(|| Error::PaletteMismatch(format!("no color {color}")))?;
                    nested.witness(lo, hi, c)
                }
            }
        }
    }

    /// First `n` rows of the construction log of the outermost schedule.
    pub fn log(&self, n: usize) -> Vec<LogEntry> {
        match &self.layout {
            Layout::Plain(e) => e.log(n),
            Layout::Sentinel { nested, .. } => nested.log(n),
        }
    }
}

/// Deterministic dense coloring for a nonempty finite palette.
pub fn make_dense_coloring(palette: Palette) -> Result<DenseColoring> {
    if palette.is_empty() {
        return Err(Error::EmptyPalette);
    }
    let layout = Layout::Plain(engine(palette.len(), None, false));
    Ok(DenseColoring { palette, layout })
}

/// A dense coloring built with a seeded variant of the schedule. Different
/// seeds give genuinely different colorings of the same palette.
pub fn make_seeded_coloring(palette: Palette, seed: u64) -> Result<DenseColoring> {
    if palette.is_empty() {
        return Err(Error::EmptyPalette);
    }
    let layout = Layout::Plain(engine(palette.len(), Some(seed), false));
    Ok(DenseColoring { palette, layout })
}

/// The shared sentinel fiber, decided by a single 2-coloring.
#[derive(Clone)]
pub struct SentinelSet {
    base: Arc<Engine>,
}

impl SentinelSet {
    pub fn shared() -> SentinelSet {
        SentinelSet {
            base: engine(2, None, false),
        }
    }

    pub fn contains(&self, d: Dyadic) -> bool {
        self.base.color_of_index(d.index()) == 1
    }

    /// Least-index member.
    pub fn first(&self) -> Dyadic {
        (0..)
            .map(Dyadic::from_index)
            .find(|d| self.contains(*d))
            .unwrap()
    }

    /// A member strictly between the bounds.
    pub fn witness(&self, lo: Option<Dyadic>, hi: Option<Dyadic>) -> Result<Dyadic> {
        self.base.witness(lo, hi, 1)
    }

    /// A non-member strictly between the bounds.
    pub fn co_witness(&self, lo: Option<Dyadic>, hi: Option<Dyadic>) -> Result<Dyadic> {
        self.base.witness(lo, hi, 0)
    }
}

impl fmt::Debug for SentinelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SentinelSet")
    }
}

fn sentinel_coloring(palette: Palette, base: &Arc<Engine>) -> Result<DenseColoring> {
    let sentinel = palette.sentinel.ok_or(Error::SentinelMissing)?;
    if sentinel >= palette.len() || palette.len() < 2 {
        return Err(Error::SentinelMissing);
    }
    let others: Vec<usize> = (0..palette.len()).filter(|&c| c != sentinel).collect();
    let nested = engine(others.len(), None, true);
    Ok(DenseColoring {
        palette,
        layout: Layout::Sentinel {
            base: base.clone(),
            nested,
            sentinel,
            others,
        },
    })
}

/// Two dense colorings whose sentinel fibers are the same set `R`.
pub fn make_shared_sentinel_colorings(
    a: Palette,
    b: Palette,
) -> Result<(DenseColoring, DenseColoring, SentinelSet)> {
    let r = SentinelSet::shared();
    let ca = sentinel_coloring(a, &r.base)?;
    let cb = sentinel_coloring(b, &r.base)?;
    Ok((ca, cb, r))
}
