use csb_shuffle::cli::{run, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn csb(args: &[&str]) -> csb_shuffle::cli::CliOutput {
    run(std::iter::once("csb").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    serde_json::from_str(&csb(&a).stdout).expect("json output")
}

#[test]
fn parse_reports_structure() {
    let v = json(&["parse", "rev(w)+1"]);
    assert_eq!(v["structure"], "Sum(Reverse(Omega), FinOrd(1))");
    assert_eq!(v["has_max"], true);
    assert_eq!(csb(&["parse", "shuffle{}"]).code, EXIT_INPUT);
    assert_eq!(csb(&["parse", "w+"]).code, EXIT_INPUT);
}

#[test]
fn sample_is_sorted_and_sized() {
    assert_eq!(json(&["sample", "0", "10"])["elements"].as_array().unwrap().len(), 0);
    assert_eq!(json(&["sample", "3", "10"])["elements"].as_array().unwrap().len(), 3);
    let out = csb(&["sample", "rev(w)", "4"]).stdout;
    let idx: Vec<&str> = out.lines().collect();
    assert_eq!(idx.len(), 4);
    assert!(idx[0].contains('3') && idx[3].contains('0'), "{out}");
}

#[test]
fn front_frontier_is_sorted() {
    let v = json(&["--depth", "4", "front", "absorbed-palette", "--side", "-", "--budget", "3"]);
    assert_eq!(v["frontier_sorted"], true);
    assert_eq!(v["downward_closed"], true);
    assert!(!v["frontier"].as_array().unwrap().is_empty());
    let dot = csb(&["--depth", "2", "front", "same-shuffle", "--dot"]).stdout;
    assert!(dot.starts_with("digraph"), "{dot}");
}

#[test]
fn iso_check_passes_and_fault_fails() {
    let ok = csb(&["--samples", "1000", "iso-check", "idempotence", "{1}"]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.stdout);
    let bad = csb(&["--format", "json", "iso-check", "idempotence", "{1}", "--fault"]);
    assert_eq!(bad.code, EXIT_FAILED);
    let v: Value = serde_json::from_str(&bad.stdout).unwrap();
    assert!(v["monotonicity"]["failures"].as_u64().unwrap() > 0);
    assert!(v["monotonicity"]["counterexample"].is_object());
    assert_eq!(csb(&["iso-check", "absorb-set", "{1,2}", "{1}", "{2}"]).code, EXIT_INPUT);
    assert_eq!(csb(&["iso-check", "nonsense", "{1}"]).code, EXIT_INPUT);
}

#[test]
fn csb_exit_codes() {
    assert_eq!(csb(&["--samples", "200", "csb", "same-shuffle"]).code, EXIT_OK);
    let shallow = json(&["--samples", "200", "--depth", "0", "csb", "absorbed-palette"]);
    let un = &shallow["unresolved"];
    assert!(un["plus"].as_u64().unwrap() + un["minus"].as_u64().unwrap() > 0, "{shallow}");
    assert_eq!(csb(&["--samples", "200", "--depth", "0", "csb", "absorbed-palette"]).code, EXIT_FAILED);
    assert_eq!(csb(&["csb", "no-such-file.json"]).code, EXIT_INPUT);
}

#[test]
fn instance_files_are_validated() {
    let dir = std::env::temp_dir().join(format!("csb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"plus":["1"],"minus":["2"],"f_plus":[{"inner":"q00"}],"f_minus":[{"inner":"q00"}]}"#).unwrap();
    assert_eq!(csb(&["csb", bad.to_str().unwrap()]).code, EXIT_INPUT);
    let good = dir.join("good.json");
    std::fs::write(&good, csb_shuffle::csb::scenario("same-shuffle").unwrap().to_json()).unwrap();
    assert_eq!(csb(&["--samples", "100", "csb", good.to_str().unwrap()]).code, EXIT_OK);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_is_reproducible() {
    for args in [
        vec!["--format", "json", "--seed", "4", "--samples", "300", "csb", "absorbed-palette"],
        vec!["--format", "json", "--seed", "4", "--samples", "300", "iso-check", "skolem", "a,b"],
    ] {
        let a = csb(&args).stdout;
        assert_eq!(a, csb(&args).stdout);
        let mut par = args.clone();
        par.splice(0..0, ["--jobs", "4"]);
        assert_eq!(a, csb(&par).stdout, "--jobs changed the output");
    }
}
