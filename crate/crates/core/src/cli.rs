//! Command-line surface. [`run`] is the whole program minus process I/O.
//!
//! Exit codes: 0 when every check passes, 2 on input errors, 3 on
//! unresolved elements or failed checks.

use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::check::{iso_check, seeded_sample, swap_outputs, Coloring, Plan, Report};
use crate::csb::{run_csb, scenario, CsbConfig, CsbInstance, InstanceSpec, SideTree, Sign};
use crate::error::{Error, Result};
use crate::order::{compare, parse_term, Enumeration, OrderTerm};
use crate::skolem::coloring::{make_dense_coloring, make_seeded_coloring, Palette};
use crate::skolem::identities::{
    back_and_forth, coloring_order, witness_absorb_set, witness_absorb_shuffland, witness_idempotence,
};
use crate::skolem::points::Point;
use crate::skolem::witness::{IsoWitness, Traced};
use crate::trees::{brute_force_sort, seq_to_string, truncate, ColoredTree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "csb", about = "Shuffles of countable linear orders and explicit isomorphisms between them")]
pub struct Cli {
    /// Depth budget (tree depth for `front`, strip depth for `csb`).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Number of sampled checks.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for independent checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and normalize an order term.
    Parse { term: String },
    /// The first `n` enumerated elements of a term, sorted.
    Sample { term: String, n: usize },
    /// Truncation and sorted frontier of a tree of an instance.
    Front {
        /// Built-in scenario name or instance JSON file.
        instance: String,
        #[arg(long, default_value = "+")]
        side: String,
        /// Children listed per node.
        #[arg(long, default_value_t = 3)]
        budget: usize,
        /// Print the truncation as a DOT graph.
        #[arg(long)]
        dot: bool,
    },
    /// Run the harness on a witness: `idempotence SET`,
    /// `absorb-shuffland SET MEMBER`, `absorb-set SET SUB COMPOSITES` or
    /// `skolem LABELS`. Sets are written `{t1,t2,...}`.
    IsoCheck {
        kind: String,
        args: Vec<String>,
        /// Exchange two outputs of the witness.
        #[arg(long)]
        fault: bool,
    },
    /// Build `Φ` for an instance and check it.
    Csb {
        /// Built-in scenario name or instance JSON file.
        instance: String,
        #[arg(long)]
        fault: bool,
    },
}

/// What the process prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> CliOutput {
        CliOutput {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(msg: String) -> CliOutput {
        CliOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput::ok(text)
            } else {
                CliOutput::input_error(text)
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => CliOutput::input_error(format!("error: {e}\n")),
    }
}

fn execute(cli: &Cli) -> Result<CliOutput> {
    match &cli.command {
        Command::Parse { term } => cmd_parse(cli, term),
        Command::Sample { term, n } => cmd_sample(cli, term, *n),
        Command::Front {
            instance,
            side,
            budget,
            dot,
        } => cmd_front(cli, instance, side, *budget, *dot),
        Command::IsoCheck { kind, args, fault } => cmd_iso_check(cli, kind, args, *fault),
        Command::Csb { instance, fault } => cmd_csb(cli, instance, *fault),
    }
}

fn render(cli: &Cli, v: &Value, text: String) -> String {
    match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        Format::Text => text,
    }
}

/// Element constructors of a term.
pub fn grammar(t: &OrderTerm) -> String {
    match t {
        OrderTerm::Zero => "none".into(),
        OrderTerm::FinOrd(n) => format!("idx 0..{}", n - 1),
        OrderTerm::Omega => "idx n".into(),
        OrderTerm::Rationals => "rat q".into(),
        OrderTerm::Reverse(s) => format!("rev({})", grammar(s)),
        OrderTerm::Sum(a, b) => format!("left({}) | right({})", grammar(a), grammar(b)),
        OrderTerm::Shuffle(ps) => {
            let cs: Vec<String> = ps.iter().enumerate().map(|(c, p)| format!("{c}: {}", grammar(p))).collect();
            format!("shuf(pos, {})", cs.join("; "))
        }
    }
}

fn cmd_parse(cli: &Cli, text: &str) -> Result<CliOutput> {
    let t = parse_term(text)?;
    let v = json!({
        "term": t.to_string(),
        "structure": format!("{t:?}"),
        "grammar": grammar(&t),
        "finite": t.is_finite(),
        "cardinality": t.cardinality(),
        "dense": t.is_dense(),
        "has_min": t.has_min(),
        "has_max": t.has_max(),
        "has_adjacent": t.has_adjacent(),
    });
    let mut s = String::new();
    writeln!(s, "{t}").unwrap();
    writeln!(s, "structure: {t:?}").unwrap();
    writeln!(s, "elements: {}", grammar(&t)).unwrap();
    Ok(CliOutput::ok(render(cli, &v, s)))
}

fn cmd_sample(cli: &Cli, text: &str, n: usize) -> Result<CliOutput> {
    let t = parse_term(text)?;
    let mut xs = Enumeration::new(&t).prefix(n);
    xs.sort_by(|a, b| compare(&t, a, b).expect("enumerated elements"));
    let v = json!({ "term": t.to_string(), "elements": xs.iter().map(|e| e.to_json()).collect::<Vec<_>>() });
    let s: String = xs.iter().map(|e| format!("{e}\n")).collect();
    Ok(CliOutput::ok(render(cli, &v, s)))
}

/// Built-in scenario, else a path to an instance JSON file.
pub fn load_instance(name: &str) -> Result<CsbInstance> {
    let spec = match scenario(name) {
        Some(s) => s,
        None => {
            let text = std::fs::read_to_string(name)
                .map_err(|e| Error::InvalidInstance(format!("{name}: not a scenario, and {e}")))?;
            InstanceSpec::from_json(&text)?
        }
    };
    CsbInstance::build(&spec)
}

fn cmd_front(cli: &Cli, instance: &str, side: &str, budget: usize, dot: bool) -> Result<CliOutput> {
    let sign = Sign::parse(side).ok_or_else(|| Error::InvalidInstance(format!("side {side}")))?;
    let inst = Arc::new(load_instance(instance)?);
    let tree = SideTree::new(inst, sign);
    let depth = cli.depth.unwrap_or(3);
    let tr = truncate(&tree, depth, budget)?;
    if dot {
        return Ok(CliOutput::ok(tr.to_dot(&tree)));
    }
    let frontier = tr.frontier(&tree)?;
    let sorted = brute_force_sort(&frontier) == frontier;
    let rows: Vec<(String, String)> = frontier
        .iter()
        .map(|leaf| {
            let parent = tree.node_color(&leaf[..leaf.len() - 1]).expect("parent of a leaf");
            (seq_to_string(leaf), tree.color_name(&parent))
        })
        .collect();
    let v = json!({
        "side": sign.to_string(),
        "depth": depth,
        "budget": budget,
        "nodes": tr.len(),
        "downward_closed": tr.is_downward_closed(),
        "frontier_sorted": sorted,
        "frontier": rows.iter().map(|(s, c)| json!({ "leaf": s, "color": c })).collect::<Vec<_>>(),
    });
    let mut s = String::new();
    writeln!(s, "T{sign}: {} nodes to depth {depth}, {} leaves", tr.len(), rows.len()).unwrap();
    for (leaf, c) in &rows {
        writeln!(s, "{leaf}  {c}").unwrap();
    }
    Ok(CliOutput::ok(render(cli, &v, s)))
}

/// Splits `{a,b,...}` at top-level commas and parses each part.
pub fn parse_set(text: &str) -> Result<Vec<OrderTerm>> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::InvalidInstance(format!("expected {{...}}, got {text}")))?;
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in inner.char_indices() {
        match ch {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    parts
        .into_iter()
        .filter(|p| !p.trim().is_empty())
        .map(parse_term)
        .collect()
}

fn report_text(r: &Report) -> String {
    let line = |name: &str, o: &crate::check::Outcome| {
        let verdict = if o.passed() { "pass" } else { "FAIL" };
        format!("{name}: {verdict} ({} samples, {} failures)\n", o.samples, o.failures)
    };
    let mut s = format!("witness: {}\n", r.witness);
    s += &line("monotonicity", &r.monotonicity);
    s += &line("roundtrip", &r.roundtrip);
    if let Some(c) = &r.colors {
        s += &line("colors", c);
    }
    s += if r.passed() { "result: PASS\n" } else { "result: FAIL\n" };
    s
}

fn finish(cli: &Cli, v: Value, text: String, passed: bool) -> CliOutput {
    CliOutput {
        code: if passed { EXIT_OK } else { EXIT_FAILED },
        stdout: render(cli, &v, text),
        stderr: String::new(),
    }
}

fn check_witness<S, D>(
    cli: &Cli,
    w: IsoWitness<S, D>,
    source: Vec<S>,
    target: Vec<D>,
    fault: bool,
    coloring: Option<Coloring<'_, S, D>>,
) -> Result<Report>
where
    S: Clone + Traced + Send + Sync + 'static,
    D: Clone + Traced + Send + Sync + 'static,
{
    let plan = Plan::new(cli.samples, cli.samples / 2, cli.samples / 2, cli.seed);
    let source = seeded_sample(&source, cli.seed);
    let target = seeded_sample(&target, cli.seed.wrapping_add(1));
    if fault {
        if source.len() < 2 {
            return Err(Error::PreconditionViolation("fault injection needs two samples".into()));
        }
        let w = swap_outputs(Arc::new(w), source[0].clone(), source[1].clone())?;
        Ok(iso_check(&w, &source, &target, plan, coloring))
    } else {
        Ok(iso_check(&w, &source, &target, plan, coloring))
    }
}

fn term_samples(t: &OrderTerm, n: usize) -> Vec<crate::order::Element> {
    Enumeration::new(t).prefix(n)
}

fn cmd_iso_check(cli: &Cli, kind: &str, args: &[String], fault: bool) -> Result<CliOutput> {
    let arg = |k: usize| {
        args.get(k)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidInstance(format!("{kind}: missing argument {}", k + 1)))
    };
    let n = cli.samples;
    let report = match kind {
        "idempotence" | "absorb-shuffland" | "absorb-set" => {
            let s = parse_set(arg(0)?)?;
            let x = OrderTerm::shuffle(s.clone())?;
            let (w, src) = match kind {
                "idempotence" => (witness_idempotence(&s)?, OrderTerm::sum(x.clone(), x.clone())),
                "absorb-shuffland" => {
                    let m = parse_term(arg(1)?)?;
                    let src = OrderTerm::sum(OrderTerm::sum(x.clone(), m.clone()), x.clone());
                    (witness_absorb_shuffland(&s, &m)?, src)
                }
                _ => {
                    let (sub, comp) = (parse_set(arg(1)?)?, parse_set(arg(2)?)?);
                    let mut parts = sub.clone();
                    parts.extend(comp.iter().cloned());
                    (witness_absorb_set(&s, &sub, &comp)?, OrderTerm::shuffle(parts)?)
                }
            };
            check_witness(cli, w, term_samples(&src, n), term_samples(&x, n / 2), fault, None)?
        }
        "skolem" => {
            let labels: Vec<&str> = arg(0)?.split(',').filter(|l| !l.is_empty()).collect();
            let a = make_dense_coloring(Palette::labels(&labels))?;
            let b = make_seeded_coloring(Palette::labels(&labels), cli.seed)?;
            let (oa, ob) = (coloring_order(&a), coloring_order(&b));
            let src: Vec<Point> = (0..n).map(|k| oa.nth(k)).collect();
            let dst: Vec<Point> = (0..n / 2).map(|k| ob.nth(k)).collect();
            let w = back_and_forth(oa, ob)?;
            let (ca, cb) = (a.clone(), b.clone());
            let key = |c: &crate::skolem::coloring::DenseColoring, p: &Point| -> Result<Value> {
                let d = p
                    .at(0)
                    .and_then(|e| e.dyadic())
                    .ok_or_else(|| Error::NotANode(p.to_string()))?;
                Ok(json!(c.palette().colors[c.color_at(d)].to_string()))
            };
            let source = move |p: &Point| key(&ca, p);
            let target = move |p: &Point| key(&cb, p);
            let map = |v: &Value| v.clone();
            let coloring = Coloring {
                source: &source,
                target: &target,
                map: &map,
            };
            check_witness(cli, w, src, dst, fault, Some(coloring))?
        }
        other => return Err(Error::InvalidInstance(format!("unknown witness kind {other}"))),
    };
    let passed = report.passed();
    Ok(finish(cli, report.to_json(), report_text(&report), passed))
}

fn cmd_csb(cli: &Cli, instance: &str, fault: bool) -> Result<CliOutput> {
    let inst = Arc::new(load_instance(instance)?);
    let cfg = CsbConfig {
        depth: cli.depth.unwrap_or(inst.depth()),
        samples: cli.samples,
        seed: cli.seed,
        jobs: cli.jobs,
        fault,
    };
    let r = run_csb(inst, cfg)?;
    let mut s = format!("instance: {} (depth {}, seed {})\n", r.instance, r.depth, r.seed);
    writeln!(s, "resolved: +{} -{}", r.resolved[0], r.resolved[1]).unwrap();
    writeln!(s, "unresolved: +{} -{}", r.unresolved[0], r.unresolved[1]).unwrap();
    writeln!(s, "front pairs: {}", r.session_pairs).unwrap();
    s += &report_text(&r.check);
    if r.unresolved != [0, 0] {
        s += "unresolved elements present\n";
    }
    let passed = r.passed();
    Ok(finish(cli, r.to_json(), s, passed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutput {
        run(std::iter::once("csb").chain(args.iter().copied()))
    }

    #[test]
    fn parse_exit_codes() {
        assert_eq!(run_args(&["parse", "shuffle{1,2}"]).code, EXIT_OK);
        assert_eq!(run_args(&["parse", "shuffle{}"]).code, EXIT_INPUT);
        let out = run_args(&["parse", "rev(w)+1"]);
        assert!(out.stdout.contains("Sum(Reverse(Omega), FinOrd(1))"), "{}", out.stdout);
    }

    #[test]
    fn sample_counts() {
        let count = |t: &str| {
            let out = run_args(&["--format", "json", "sample", t, "10"]);
            let v: Value = serde_json::from_str(&out.stdout).unwrap();
            v["elements"].as_array().unwrap().len()
        };
        assert_eq!(count("0"), 0);
        assert_eq!(count("3"), 3);
        assert_eq!(count("w"), 10);
    }

    #[test]
    fn sets() {
        assert_eq!(parse_set("{1,shuffle{1,2}}").unwrap().len(), 2);
        assert!(parse_set("{}").unwrap().is_empty());
        assert!(parse_set("1,2").is_err());
    }

    #[test]
    fn unknown_instance_is_input_error() {
        assert_eq!(run_args(&["csb", "/nonexistent/instance.json"]).code, EXIT_INPUT);
    }
}
