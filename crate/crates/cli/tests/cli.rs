use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use klm_core::closure::{close, initial_map, ConsequenceMap, System};
use klm_core::kb::parse_kb;
use klm_core::model::parse_model;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn klm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn entail_exit_codes() {
    let kb = data("penguin.klm");
    let yes = klm(&["entail", "--system", "P", "--kb", path_str(&kb), "b |~ ~p"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout(&yes).lines().next(), Some("ENTAILED"));
    let no = klm(&["entail", "--system", "P", "--kb", path_str(&kb), "p |~ f"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(stdout(&no).lines().next(), Some("NOT ENTAILED"));
    let missing = klm(&["entail", "--system", "P", "--kb", "missing.klm", "p |~ f"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    let bad_query = klm(&["entail", "--kb", path_str(&kb), "p |~"]);
    assert_eq!(bad_query.status.code(), Some(2));
}

#[test]
fn unknown_beyond_the_search_budget() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("wide.klm");
    let vars: Vec<String> = (0..7).map(|i| format!("x{i}")).collect();
    std::fs::write(&kb, format!("vars: {}\nassume: x0 |~ x1\n", vars.join(" "))).unwrap();
    let o = klm(&["entail", "--kb", path_str(&kb), "x0 & x2 |~ x1", "--budget", "0"]);
    assert_eq!(stdout(&o).trim(), "UNKNOWN");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_report_fields() {
    let o = klm(&["entail", "--kb", path_str(&data("nixon.klm")), "t |~ e", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "NOT ENTAILED");
    assert_eq!(v["certificate_kind"], "countermodel");
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn trace_and_countermodel_outputs() {
    let kb = data("penguin.klm");
    let o = klm(&["entail", "--kb", path_str(&kb), "b | p |~ f", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 1);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cm.model");
    let o = klm(&["entail", "--kb", path_str(&kb), "p |~ f", "--countermodel", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let m = parse_model(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(klm_core::model::validate(&m).is_valid());
    assert_eq!(klm(&["check-model", path_str(&out)]).status.code(), Some(0));
}

#[test]
fn closure_dump_is_deterministic_and_preserves_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    let kb = data("penguin.klm");
    for out in [&a, &b] {
        let o = klm(&["closure", "--system", "P", "--kb", path_str(&kb), "--dump", path_str(out)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let parsed = parse_kb(&std::fs::read_to_string(&kb).unwrap()).unwrap();
    let map = ConsequenceMap::parse_dump(parsed.universe.clone(), &text).unwrap();
    assert_eq!(map, close(&initial_map(&parsed).unwrap(), System::P).0);
    let u = &parsed.universe;
    let p = u.worlds_of(&"p".parse().unwrap()).unwrap();
    let not_f = u.worlds_of(&"~f".parse().unwrap()).unwrap();
    assert!(map.core_of(&p).is_subset(&not_f));
}

#[test]
fn closure_of_empty_one_variable_kb_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("one.klm");
    std::fs::write(&kb, "vars: p\n").unwrap();
    let dump = dir.path().join("d.txt");
    assert_eq!(klm(&["closure", "--kb", path_str(&kb), "--dump", path_str(&dump)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text, "A=0 C=0\nA=1 C=1\nA=2 C=2\nA=3 C=3\n");
}

#[test]
fn closure_refuses_five_variables() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("five.klm");
    std::fs::write(&kb, "vars: a b c d e\nassume: a |~ b\n").unwrap();
    let o = klm(&["closure", "--kb", path_str(&kb), "--dump", path_str(&dir.path().join("d"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_model_on_loop_fixture() {
    let path = data("loop.model");
    let o = klm(&["check-model", path_str(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let dir = tempfile::tempdir().unwrap();
    let edited = dir.path().join("ordered.model");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&edited, text.replace("flavor: Cumulative", "flavor: CumulativeOrdered")).unwrap();
    let o = klm(&["check-model", path_str(&edited)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("transitive"));
    assert_eq!(klm(&["check-model", "nowhere.model"]).status.code(), Some(2));
}

#[test]
fn canonical_writes_a_valid_model() {
    let dir = tempfile::tempdir().unwrap();
    for (system, flavor) in [("P", "Preferential"), ("C", "Cumulative"), ("CL", "CumulativeOrdered"), ("M", "SimplePreferential")] {
        let out = dir.path().join(format!("{system}.model"));
        let o = klm(&["canonical", "--system", system, "--kb", path_str(&data("penguin.klm")), path_str(&out)]);
        assert_eq!(o.status.code(), Some(0), "{system}: {}", stdout(&o));
        assert!(stdout(&o).contains("result: pass"));
        let m = parse_model(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(m.flavor().name(), flavor);
    }
}

#[test]
fn demo_tables_match_golden_files() {
    for name in ["penguin", "nixon", "loop"] {
        let o = klm(&["demo", name]);
        assert_eq!(o.status.code(), Some(0));
        let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/demo_{name}.txt"));
        assert_eq!(stdout(&o), std::fs::read_to_string(golden).unwrap(), "{name}");
    }
    assert_eq!(klm(&["demo", "tweety"]).status.code(), Some(2));
}
