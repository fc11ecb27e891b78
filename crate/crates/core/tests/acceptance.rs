//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use csb_shuffle::check::{adjacency_probe, iso_check, seeded_sample, Coloring, Plan, Probe, Report};
use csb_shuffle::csb::{
    class_member_between, class_tag, run_csb, scenario, synthetic_elem, CsbConfig, CsbInstance, InstanceSpec, NodeColor,
    SideElem, SideTree, Sign, StratumResult,
};
use csb_shuffle::error::Error;
use csb_shuffle::order::{compare, embed_in_q, enumerate, parse_term, Dyadic, Element, ExtRational, OrderTerm, Rational};
use csb_shuffle::skolem::coloring::{make_dense_coloring, make_seeded_coloring, DenseColoring, Palette};
use csb_shuffle::skolem::identities::{
    back_and_forth, coloring_order, witness_absorb_set, witness_absorb_shuffland, witness_idempotence,
};
use csb_shuffle::skolem::points::{Ent, Lex, Periodic, Point};
use csb_shuffle::trees::{
    brute_force_sort, lex_compare, rational_count, truncate, ColoredTree, ExampleTree, LexOrder, SeqOrBranch,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn term(s: &str) -> OrderTerm {
    parse_term(s).expect("corpus term")
}

fn report_line(r: &Report) -> String {
    let colors = r
        .colors
        .as_ref()
        .map(|c| format!(", colors {}/{}", c.samples - c.failures, c.samples))
        .unwrap_or_default();
    format!(
        "monotone {}/{}, roundtrip {}/{}{colors}",
        r.monotonicity.samples - r.monotonicity.failures,
        r.monotonicity.samples,
        r.roundtrip.samples - r.roundtrip.failures,
        r.roundtrip.samples
    )
}

fn check_report(label: &str, r: &Report, pairs: usize, roundtrips: usize, colors: usize) -> Outcome {
    ensure!(r.passed(), "{label}: {}", r.to_json());
    ensure!(r.monotonicity.samples >= pairs, "{label}: only {} pairs", r.monotonicity.samples);
    ensure!(r.roundtrip.samples >= roundtrips, "{label}: only {} roundtrips", r.roundtrip.samples);
    if colors > 0 {
        let c = r.colors.as_ref().map_or(0, |c| c.samples);
        ensure!(c >= colors, "{label}: only {c} color checks");
    }
    Ok(report_line(r))
}

// 1. Order axioms, with the embedding into Q as a second opinion.
fn order_axioms() -> Outcome {
    let corpus = ["0", "1", "3", "w", "rev(w)", "Q", "shuffle{1}", "shuffle{1,2}", "shuffle{2,w}", "w+rev(w)"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut total = 0;
    for s in corpus {
        let t = term(s);
        let elems: Vec<Element> = enumerate(&t).take(300).collect();
        if elems.is_empty() {
            ensure!(t.is_empty(), "{s}: no elements enumerated");
            continue;
        }
        let cmp = |a: &Element, b: &Element| compare(&t, a, b).expect("enumerated elements");
        let q: Vec<Rational> = elems.iter().map(|e| embed_in_q(&t, e).expect("embeddable")).collect();
        for _ in 0..10_000 {
            let (i, j, k) = (
                rng.gen_range(0..elems.len()),
                rng.gen_range(0..elems.len()),
                rng.gen_range(0..elems.len()),
            );
            let (a, b, c) = (&elems[i], &elems[j], &elems[k]);
            let ab = cmp(a, b);
            ensure!(ab == cmp(b, a).reverse(), "{s}: asymmetric on {a}, {b}");
            ensure!((ab == Ordering::Equal) == (a == b), "{s}: antisymmetry on {a}, {b}");
            ensure!(ab == q[i].cmp(&q[j]), "{s}: disagrees with Q on {a}, {b}");
            if ab != Ordering::Greater && cmp(b, c) != Ordering::Greater {
                ensure!(cmp(a, c) != Ordering::Greater, "{s}: transitivity on {a}, {b}, {c}");
            }
            total += 1;
        }
    }
    Ok(format!("{total} triples over 9 nonempty terms, 0 failures"))
}

// 2. Dense colorings: totality and density witnesses.
fn dense_coloring() -> Outcome {
    let first: Vec<Dyadic> = (0..16).map(Dyadic::from_index).collect();
    let mut witnesses = 0;
    for size in [1usize, 2, 5] {
        let labels: Vec<String> = (0..size).map(|k| format!("c{k}")).collect();
        let c = make_dense_coloring(Palette::labels(&labels)).map_err(|e| e.to_string())?;
        for n in 0..1000 {
            let k = c.color_at(Dyadic::from_index(n));
            ensure!(k < size, "size {size}: color {k} at index {n}");
        }
        for (ai, a) in first.iter().enumerate() {
            for b in &first[ai + 1..] {
                let (lo, hi) = if a < b { (*a, *b) } else { (*b, *a) };
                for color in 0..size.min(8) {
                    let w = c.witness(Some(lo), Some(hi), color).map_err(|e| format!("overrun: {e}"))?;
                    ensure!(lo < w && w < hi, "witness {w} outside ({lo}, {hi})");
                    ensure!(c.color_at(w) == color, "witness {w} has the wrong color");
                    witnesses += 1;
                }
            }
        }
    }
    Ok(format!("totality on 1000 dyadics x 3 palettes, {witnesses} witnesses, 0 overruns"))
}

fn color_key(c: &DenseColoring, p: &Point) -> csb_shuffle::error::Result<Value> {
    let d = p
        .at(0)
        .and_then(|e| e.dyadic())
        .ok_or_else(|| Error::NotANode(p.to_string()))?;
    Ok(json!(c.palette().colors[c.color_at(d)].to_string()))
}

// 3. Two independent colorings over {a, b} are isomorphic.
fn skolem_uniqueness() -> Outcome {
    let labels = ["a", "b"];
    let a = make_dense_coloring(Palette::labels(&labels)).map_err(|e| e.to_string())?;
    let b = make_seeded_coloring(Palette::labels(&labels), 11).map_err(|e| e.to_string())?;
    let differ = (0..200).any(|n| a.color_at(Dyadic::from_index(n)) != b.color_at(Dyadic::from_index(n)));
    ensure!(differ, "the two colorings coincide on the first 200 dyadics");
    let (oa, ob) = (coloring_order(&a), coloring_order(&b));
    let src = seeded_sample(&(0..1000).map(|k| oa.nth(k)).collect::<Vec<_>>(), 3);
    let dst = seeded_sample(&(0..500).map(|k| ob.nth(k)).collect::<Vec<_>>(), 4);
    let w = back_and_forth(oa, ob).map_err(|e| e.to_string())?;
    let source = |p: &Point| color_key(&a, p);
    let target = |p: &Point| color_key(&b, p);
    let map = |v: &Value| v.clone();
    let coloring = Coloring {
        source: &source,
        target: &target,
        map: &map,
    };
    let r = iso_check(&w, &src, &dst, Plan::new(1000, 500, 500, 3), Some(coloring));
    check_report("back_and_forth", &r, 1000, 500, 500)
}

// 4. Shuffle identities as witnesses.
fn shuffle_identities() -> Outcome {
    let sets: [&[&str]; 3] = [&["1"], &["2"], &["1", "w"]];
    let mut lines = Vec::new();
    for set in sets {
        let s: Vec<OrderTerm> = set.iter().map(|x| term(x)).collect();
        let x = OrderTerm::shuffle(s.clone()).map_err(|e| e.to_string())?;
        let m = s[s.len() - 1].clone();
        let composite = OrderTerm::sum(OrderTerm::sum(m.clone(), x.clone()), s[0].clone());
        let dst: Vec<Element> = enumerate(&x).take(500).collect();
        let cases = [
            (
                "idempotence",
                witness_idempotence(&s),
                OrderTerm::sum(x.clone(), x.clone()),
            ),
            (
                "absorb_shuffland",
                witness_absorb_shuffland(&s, &m),
                OrderTerm::sum(OrderTerm::sum(x.clone(), m.clone()), x.clone()),
            ),
            (
                "absorb_set",
                witness_absorb_set(&s, &s[..1], std::slice::from_ref(&composite)),
                OrderTerm::shuffle(vec![s[0].clone(), composite.clone()]).map_err(|e| e.to_string())?,
            ),
        ];
        for (name, w, src_term) in cases {
            let w = w.map_err(|e| format!("{name} {x}: {e}"))?;
            let src: Vec<Element> = seeded_sample(&enumerate(&src_term).take(1000).collect::<Vec<_>>(), 5);
            let r = iso_check(&w, &src, &dst, Plan::new(1000, 500, 0, 5), None);
            check_report(&format!("{name} {x}"), &r, 1000, 500, 0)?;
        }
        lines.push(x.to_string());
    }
    Ok(format!("3 witnesses x {{{}}} at 1000 pairs", lines.join(", ")))
}

fn instance(name: &str) -> Result<Arc<CsbInstance>, String> {
    let spec = scenario(name).ok_or_else(|| format!("no scenario {name}"))?;
    CsbInstance::build(&spec).map(Arc::new).map_err(|e| e.to_string())
}

fn all_in_r(inst: &CsbInstance, s: &[ExtRational]) -> bool {
    s.iter().all(|e| e.as_dyadic().is_some_and(|d| inst.sentinel_set().contains(d)))
}

/// `ρ⟨q₀,q₁⟩` with `q₀ ∉ R`, or `ρ⟨q₀,±∞,q₁⟩` with `q₀ ∈ R`, for `ρ ∈ R^{<ω}`.
fn leaf_shapes(inst: &CsbInstance, s: &[ExtRational]) -> usize {
    let r = |e: &ExtRational| e.as_dyadic().is_some_and(|d| inst.sentinel_set().contains(d));
    let mut shapes = 0;
    if let [rho @ .., q0, q1] = s {
        if all_in_r(inst, rho) && q0.as_dyadic().is_some() && !r(q0) && q1.is_fin() {
            shapes += 1;
        }
    }
    if let [rho @ .., q0, inf, q1] = s {
        if all_in_r(inst, rho) && r(q0) && !inf.is_fin() && q1.is_fin() {
            shapes += 1;
        }
    }
    shapes
}

fn random_branch(inst: &CsbInstance, rng: &mut ChaCha8Rng) -> Periodic {
    let side = inst.side(Sign::Plus);
    let prefix = (0..rng.gen_range(0..=2)).map(|_| Ent::Dy(side.random_r(rng))).collect();
    let cycle = (0..rng.gen_range(1..=2)).map(|_| Ent::Dy(side.random_r(rng))).collect();
    Periodic::new(prefix, cycle)
}

// 5. Tree semantics on truncations, plus the example tree.
fn tree_semantics() -> Outcome {
    let mut checked = 0;
    let mut leaves = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for name in ["same-shuffle", "absorbed-palette"] {
        let inst = instance(name)?;
        for sign in [Sign::Plus, Sign::Minus] {
            let t = SideTree::new(inst.clone(), sign);
            for depth in 1..=4 {
                let budget = 4;
                let tr = truncate(&t, depth, budget).map_err(|e| e.to_string())?;
                ensure!(tr.is_downward_closed(), "{name} T{sign}: not downward closed");
                for n in &tr.nodes {
                    let kids = t.children(&n.seq, budget).map_err(|e| e.to_string())?;
                    let leafy: Vec<bool> = kids
                        .iter()
                        .map(|e| {
                            let mut c = n.seq.clone();
                            c.push(e.clone());
                            t.is_leaf(&c).expect("child is a node")
                        })
                        .collect();
                    let parent_of_leaves = !kids.is_empty() && leafy.iter().all(|l| *l);
                    ensure!(
                        !leafy.iter().any(|l| *l) || parent_of_leaves,
                        "{name}: a sibling of a leaf below {:?} is not a leaf",
                        n.seq
                    );
                    let front = t.is_front_prime(&n.seq).map_err(|e| e.to_string())?;
                    ensure!(front == parent_of_leaves, "{name}: front color mismatch at {:?}", n.seq);
                    let sentinel = matches!(n.color, NodeColor::Sentinel(_));
                    ensure!(sentinel == all_in_r(&inst, &n.seq), "{name}: sentinel mismatch at {:?}", n.seq);
                    checked += 1;
                }
                let front = tr.frontier(&t).map_err(|e| e.to_string())?;
                ensure!(brute_force_sort(&front) == front, "{name} T{sign}: frontier order");
                for l in tr.leaves(&t).map_err(|e| e.to_string())? {
                    ensure!(leaf_shapes(&inst, &l.seq) == 1, "{name}: leaf {:?} has no unique shape", l.seq);
                    leaves += 1;
                }
            }
            for _ in 0..20 {
                let r = random_branch(&inst, &mut rng);
                for n in 0..8 {
                    let pre: Vec<ExtRational> = r.take(n).iter().map(|e| e.to_ext()).collect();
                    let c = t.node_color(&pre);
                    ensure!(matches!(c, Some(NodeColor::Sentinel(_))), "{name}: branch prefix {pre:?}");
                    ensure!(!t.is_leaf(&pre).map_err(|e| e.to_string())?, "{name}: branch prefix is a leaf");
                }
                let j = rng.gen_range(0..4);
                let mut off: Vec<ExtRational> = r.take(j + 3).iter().map(|e| e.to_ext()).collect();
                off[j] = ExtRational::from(inst.side(sign).random_free(&mut rng));
                ensure!(!t.is_node(&off), "{name}: {off:?} leaves R but is still a node");
            }
        }
    }
    let ex = ExampleTree;
    let branch = ExampleTree::branch();
    let mut prev: Vec<Vec<ExtRational>> = Vec::new();
    for depth in 2..=14 {
        let tr = truncate(&ex, depth, 2).map_err(|e| e.to_string())?;
        let front = tr.frontier(&ex).map_err(|e| e.to_string())?;
        ensure!(front.len() == depth - 1, "example: {} leaves at depth {depth}", front.len());
        ensure!(front.starts_with(&prev), "example: frontier is not extended at the end");
        for l in &front {
            let above = lex_compare(SeqOrBranch::Branch(&branch), SeqOrBranch::Seq(l));
            ensure!(above == LexOrder::Gt, "example: branch not above {l:?}");
        }
        let mut lens: Vec<usize> = tr
            .nodes
            .iter()
            .filter(|n| ex.is_front_prime(&n.seq).unwrap_or(false))
            .map(|n| n.seq.len())
            .collect();
        lens.sort_unstable();
        ensure!(lens == (0..=depth).collect::<Vec<_>>(), "example: inner nodes do not form a single chain");
        prev = front;
    }
    Ok(format!(
        "{checked} nodes, {leaves} leaves; example frontier grows as w with its branch on top (w+1)"
    ))
}

// 6. Stratification in SameShuffle.
fn stratification() -> Outcome {
    let inst = instance("same-shuffle")?;
    let depth = inst.depth();
    let mut ranks = [0usize; 9];
    let mut member_tests = 0;
    for sign in [Sign::Plus, Sign::Minus] {
        let xs = inst.sample_elements(sign, 500, 21).map_err(|e| e.to_string())?;
        let mut addressed: Vec<(Vec<Dyadic>, SideElem)> = Vec::new();
        for x in &xs {
            match inst.stratum(sign, x, depth).map_err(|e| e.to_string())? {
                StratumResult::FiniteRank { n, address, .. } => {
                    ranks[n.min(8)] += 1;
                    addressed.push((address, x.clone()));
                }
                other => return Err(format!("{x}: {}", other.to_json())),
            }
        }
        let addrs: Vec<&Vec<Dyadic>> = addressed.iter().map(|(a, _)| a).collect();
        for (a, x) in &addressed {
            ensure!(
                inst.tail_transport(sign, a, a, x).map_err(|e| e.to_string())? == *x,
                "{x} does not rebuild from {a:?}"
            );
            for b in addrs.iter().filter(|b| b.len() == a.len() && **b != a) {
                ensure!(
                    matches!(inst.tail_transport(sign, b, b, x), Err(Error::AddressMismatch(_))),
                    "{x} lies in both {a:?} and {b:?}"
                );
                member_tests += 1;
            }
        }
        for (a, x) in &addressed {
            for (b, y) in &addressed {
                if a.len() == b.len() && a < b && a.iter().zip(b.iter()).any(|(p, q)| p != q) {
                    let j = (0..a.len()).find(|&k| a[k] != b[k]).expect("differ");
                    let want = a[j].cmp(&b[j]);
                    ensure!(inst.compare(sign, x, y) == want, "{x} and {y} out of address order");
                }
            }
        }
    }
    let per_layer = 200;
    for sign in [Sign::Plus, Sign::Minus] {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in 0..=2 {
            let mut leaves = Vec::new();
            while leaves.len() < per_layer {
                let l = inst.random_leaf(sign, n, &mut rng).map_err(|e| e.to_string())?;
                if !leaves.contains(&l) {
                    leaves.push(l);
                }
            }
            leaves = brute_force_sort(&leaves);
            let mut images = Vec::new();
            for l in &leaves {
                ensure!(rational_count(l) == n + 2, "layer {n}: {l:?}");
                let x = inst.g_forward(sign, l).map_err(|e| e.to_string())?;
                match inst.stratum(sign, &x, depth).map_err(|e| e.to_string())? {
                    StratumResult::FiniteRank { n: m, leaf, .. } => {
                        ensure!(m == n && &leaf == l, "range: {l:?} comes back as rank {m}, {leaf:?}")
                    }
                    other => return Err(format!("range: {}", other.to_json())),
                }
                if n > 0 {
                    let q = l[0].as_dyadic().ok_or("layer leaf starts outside R")?;
                    let inner = inst.g_forward(sign.neg(), &l[1..]).map_err(|e| e.to_string())?;
                    let rec = inst.f_single(sign.neg(), q, &inner).map_err(|e| e.to_string())?;
                    ensure!(rec == x, "recursion fails at {l:?}");
                }
                ensure!(inst.g_inverse(sign, &x).map_err(|e| e.to_string())? == *l, "g_inverse at {l:?}");
                images.push(x);
            }
            for w in images.windows(2) {
                ensure!(inst.compare(sign, &w[0], &w[1]) == Ordering::Less, "layer {n} not monotone");
            }
        }
    }
    Ok(format!(
        "1000 elements of finite rank (by rank {:?}), {member_tests} membership tests, G layers 0-2 x 200 x 2 sides",
        &ranks[..4]
    ))
}

// 7. Tail transport, class density and separation on the synthetic scenario.
fn tail_machinery() -> Outcome {
    let inst = instance("synthetic-branch")?;
    let q00 = inst.q00();
    let side = inst.side(Sign::Plus).clone();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let dy = |v: Vec<Ent>| v.into_iter().map(|e| e.dyadic().expect("R entry")).collect::<Vec<_>>();
    for _ in 0..100 {
        let r = random_branch(&inst, &mut rng);
        let x = synthetic_elem(&r, q00, Rational::new(rng.gen_range(-50..50), rng.gen_range(1..9)));
        let b = match inst.stratum(Sign::Plus, &x, 6).map_err(|e| e.to_string())? {
            StratumResult::Infinite { branch } => branch,
            other => return Err(format!("{x}: {}", other.to_json())),
        };
        let k = rng.gen_range(1..=3);
        let sigma = dy(b.take(k));
        let tau: Vec<Dyadic> = (0..k).map(|_| side.random_r(&mut rng)).collect();
        let y = inst.tail_transport(Sign::Plus, &sigma, &tau, &x).map_err(|e| e.to_string())?;
        let back = inst.tail_transport(Sign::Plus, &tau, &sigma, &y).map_err(|e| e.to_string())?;
        ensure!(back == x, "inverse pair fails at {x}");
        let m = rng.gen_range(1..=2);
        let rho = dy(b.take(k + m)[k..].to_vec());
        let (mut s2, mut t2) = (sigma.clone(), tau.clone());
        s2.extend(&rho);
        t2.extend(&rho);
        let z = inst.tail_transport(Sign::Plus, &s2, &t2, &x).map_err(|e| e.to_string())?;
        ensure!(z == y, "stability fails at {x}");
    }
    let front: Vec<Point> = (0..40)
        .map(|_| {
            let n = rng.gen_range(0..=2);
            let leaf = inst.random_leaf(Sign::Plus, n, &mut rng).expect("leaf");
            Point::Node(leaf[..leaf.len() - 1].iter().map(|e| Ent::from_ext(e).expect("entry")).collect())
        })
        .collect();
    let mut pairs = 0;
    for w in front.chunks(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        match lo.lex(&hi) {
            Lex::Less => {}
            Lex::Greater => std::mem::swap(&mut lo, &mut hi),
            _ => continue,
        }
        let r = random_branch(&inst, &mut rng);
        let m = class_member_between(&inst, &r, &lo, &hi).ok_or_else(|| format!("no member of [r] in ({lo}, {hi})"))?;
        let pm = Point::Branch(m.clone());
        ensure!(lo.lex(&pm) == Lex::Less && pm.lex(&hi) == Lex::Less, "member outside ({lo}, {hi})");
        ensure!(class_tag(&m) == class_tag(&r), "member in the wrong class");
        pairs += 1;
    }
    ensure!(pairs >= 20, "only {pairs} frontier pairs");
    let mut cross = 0;
    while cross < 100 {
        let r = random_branch(&inst, &mut rng);
        let s = synthetic_elem(&r, q00, Rational::new(rng.gen_range(-9..9), 1));
        let b = match inst.stratum(Sign::Plus, &s, 6).map_err(|e| e.to_string())? {
            StratumResult::Infinite { branch } => branch,
            other => return Err(format!("{s}: {}", other.to_json())),
        };
        let n = rng.gen_range(1..=3);
        let j = rng.gen_range(0..n);
        let mut sigma = dy(b.take(n));
        let other = side.random_r(&mut rng);
        if other == sigma[j] {
            continue;
        }
        sigma[j] = other;
        for t in sigma.iter_mut().skip(j + 1) {
            *t = side.random_r(&mut rng);
        }
        let k = Sign::Plus.alt(n);
        let y = inst.side(k).random_elem(&mut rng, 2);
        let x = inst.f_path(Sign::Minus, &sigma, &y).map_err(|e| e.to_string())?;
        let want = sigma[j].cmp(&b.at(j).dyadic().expect("R entry"));
        ensure!(inst.compare(Sign::Plus, &x, &s) == want, "{x} and {s} are not separated");
        cross += 1;
    }
    Ok(format!("100 transports, {pairs} density pairs, {cross} separation samples"))
}

// 8. End to end.
fn end_to_end() -> Outcome {
    let mut parts = Vec::new();
    for name in ["same-shuffle", "absorbed-palette"] {
        let inst = instance(name)?;
        let t = Instant::now();
        let r = run_csb(inst, CsbConfig::default()).map_err(|e| e.to_string())?;
        let el = t.elapsed();
        ensure!(r.depth == 8, "depth {}", r.depth);
        ensure!(r.unresolved == [0, 0], "{name}: unresolved {:?}", r.unresolved);
        check_report(name, &r.check, 1000, 500, 200)?;
        ensure!(el < Duration::from_secs(120), "{name}: {el:?}");
        parts.push(format!("{name} {} in {:.2}s", report_line(&r.check), el.as_secs_f64()));
    }
    Ok(parts.join("; "))
}

// 9. Negative control.
fn negative_control() -> Outcome {
    let spec = InstanceSpec {
        name: "discrete-vs-dense".into(),
        plus: vec!["1".into()],
        minus: vec!["2".into()],
        ..scenario("same-shuffle").expect("scenario")
    };
    match CsbInstance::build(&spec) {
        Err(Error::NotBiembeddable(why)) => {
            let (x1, x2) = (term("shuffle{1}"), term("shuffle{2}"));
            ensure!(adjacency_probe(&x1, 200) == Probe::Dense, "shuffle{{1}} probed as discrete");
            let (a, b) = match adjacency_probe(&x2, 200) {
                Probe::Adjacent(a, b) => (a, b),
                Probe::Dense => return Err("shuffle{2} probed as dense".into()),
            };
            let between = enumerate(&x2).take(2000).filter(|e| {
                compare(&x2, &a, e).ok() == Some(Ordering::Less) && compare(&x2, e, &b).ok() == Some(Ordering::Less)
            });
            ensure!(between.count() == 0, "the certified pair is not adjacent");
            Ok(format!("rejected: {why}"))
        }
        Err(e) => Err(format!("rejected for the wrong reason: {e}")),
        Ok(_) => Err("the instance was accepted".into()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("order axioms", order_axioms),
        ("dense coloring", dense_coloring),
        ("skolem uniqueness", skolem_uniqueness),
        ("shuffle identities", shuffle_identities),
        ("tree semantics", tree_semantics),
        ("stratification", stratification),
        ("tail machinery", tail_machinery),
        ("end-to-end csb", end_to_end),
        ("negative control", negative_control),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
