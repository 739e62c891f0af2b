//! CLI acceptance: the exit-code matrix over a golden set of
//! (model, command) pairs, plus the JSON and DOT output invariants.

use taskalg::modelcheck::build_prefix_tree;
use taskalg::semantics::{enumerate_traces, EnumConfig};
use taskalg_cli::{json, run};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn taskalg_cmd(args: &[&str]) -> Outcome {
    let mut argv = vec!["taskalg".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = run(&argv, &mut stdout, &mut stderr);
    Outcome {
        code,
        stdout: String::from_utf8(stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(stderr).expect("utf8 stderr"),
    }
}

#[test]
fn criterion_10_exit_code_matrix() {
    let login = data("login.tfm");
    let bad_syntax = data("bad_syntax.tfm");
    let explosion = data("explosion.tfm");
    let recovery = data("recovery.query");
    let assoc_left = data("assoc_left.tfm");
    let assoc_right = data("assoc_right.tfm");
    let simple = data("simple.tfm");
    let fail = data("fail.tfm");
    let looping = data("loop.tfm");

    let matrix: Vec<(Vec<&str>, i32)> = vec![
        // parse: ok and errors
        (vec!["parse", &login], 0),
        (vec!["parse", &login, "--ast"], 0),
        (vec!["parse", &bad_syntax], 2),
        (vec!["parse", "no-such-file.tfm"], 2),
        // traces: ok and resource cap
        (vec!["traces", &login, "--unroll", "3"], 0),
        (
            vec!["traces", &explosion, "--unroll", "20", "--max-traces", "50"],
            3,
        ),
        // check: holds, fails, query errors, usage errors
        (vec!["check", &login, "--query", "CTL: EF failed"], 0),
        (
            vec!["check", &login, "--query", "LTL: G !task(validatePassword)"],
            1,
        ),
        (vec!["check", &login, "--query", "LTL: AG succeeded"], 2),
        (vec!["check", &login], 2),
        (vec!["check", &login, "--query-file", &recovery], 0),
        // eq: equal, subset, incomparable under differing truncation
        (vec!["eq", &assoc_left, &assoc_right], 0),
        (vec!["eq", &simple, &fail], 1),
        (vec!["eq", &looping, &simple], 1),
        (vec!["eq", &login, &login], 0),
        // usage errors
        (vec!["frobnicate"], 2),
        (vec![], 2),
    ];

    let total = matrix.len();
    for (args, want) in matrix {
        let outcome = taskalg_cmd(&args);
        assert_eq!(
            outcome.code, want,
            "taskalg {:?}\nstdout:\n{}\nstderr:\n{}",
            args, outcome.stdout, outcome.stderr
        );
        // verdict-bearing commands never report success on a failing verdict
        if outcome.code == 0 && args.first() == Some(&"check") {
            assert!(outcome.stdout.contains("holds"));
        }
    }
    println!("criterion 10a PASS: exit-code matrix over {total} command invocations");
}

#[test]
fn criterion_10_json_round_trip() {
    for name in [
        "login.tfm",
        "simple.tfm",
        "stateful.tfm",
        "guarded.tfm",
        "loop.tfm",
        "fail.tfm",
    ] {
        let path = data(name);
        let outcome = taskalg_cmd(&["traces", &path, "--format", "json"]);
        assert_eq!(outcome.code, 0, "{name}: {}", outcome.stderr);

        let reconstructed =
            json::trace_set_from_json(&outcome.stdout).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = std::fs::read_to_string(&path).unwrap();
        let resolved = taskalg::resolve(taskalg::parse_model(&text).unwrap()).unwrap();
        let direct = enumerate_traces(&resolved, &EnumConfig::default())
            .unwrap()
            .set;
        assert_eq!(reconstructed, direct, "{name}");
    }
    println!("criterion 10b PASS: JSON output reconstructs the identical trace set");
}

#[test]
fn criterion_10_dot_output_shape() {
    for name in ["login.tfm", "simple.tfm", "loop.tfm"] {
        let path = data(name);
        let outcome = taskalg_cmd(&["traces", &path, "--format", "dot"]);
        assert_eq!(outcome.code, 0);
        let dot = &outcome.stdout;

        assert!(dot.starts_with("digraph traces {"));
        assert!(dot.trim_end().ends_with('}'));
        let node_lines = dot
            .lines()
            .map(str::trim_start)
            .filter(|l| {
                l.starts_with('n')
                    && l.chars().nth(1).is_some_and(|c| c.is_ascii_digit())
                    && !l.contains("->")
            })
            .count();
        let edge_lines = dot.lines().filter(|l| l.contains("->")).count();

        let text = std::fs::read_to_string(&path).unwrap();
        let resolved = taskalg::resolve(taskalg::parse_model(&text).unwrap()).unwrap();
        let set = enumerate_traces(&resolved, &EnumConfig::default())
            .unwrap()
            .set;
        let tree = build_prefix_tree(&set);
        assert_eq!(node_lines, tree.node_count(), "{name}");
        // a tree has exactly one edge per non-root node
        assert_eq!(edge_lines, tree.node_count() - 1, "{name}");
    }
    println!("criterion 10c PASS: DOT node count equals prefix-tree node count");
}

#[test]
fn check_json_format_reports_the_verdict() {
    let outcome = taskalg_cmd(&[
        "check",
        &data("login.tfm"),
        "--query",
        "CTL: EF failed",
        "--format",
        "json",
    ]);
    assert_eq!(outcome.code, 0);
    let parsed: serde_json::Value = serde_json::from_str(&outcome.stdout).unwrap();
    assert_eq!(parsed["holds"], serde_json::json!(true));
    assert_eq!(parsed["assumption_dependent"], serde_json::json!(true));
    assert!(parsed["evidence"].is_object());
}

#[test]
fn traces_text_prints_one_line_per_trace() {
    let outcome = taskalg_cmd(&[
        "traces",
        &data("login.tfm"),
        "--unroll",
        "3",
        "--format",
        "text",
    ]);
    assert_eq!(outcome.code, 0);
    assert_eq!(outcome.stdout.lines().count(), 4);
}

#[test]
fn capped_enumeration_still_prints_partial_output() {
    let outcome = taskalg_cmd(&[
        "traces",
        &data("explosion.tfm"),
        "--unroll",
        "20",
        "--max-traces",
        "50",
        "--format",
        "json",
    ]);
    assert_eq!(outcome.code, 3);
    let reconstructed = json::trace_set_from_json(&outcome.stdout).unwrap();
    assert!(reconstructed.flags.caps_hit);
    assert!(!reconstructed.is_empty());
}

#[test]
fn eq_reports_distinguishing_traces() {
    let outcome = taskalg_cmd(&["eq", &data("simple.tfm"), &data("fail.tfm")]);
    assert_eq!(outcome.code, 1);
    assert!(outcome.stdout.contains("relation:"));
    assert!(outcome.stdout.contains("left-only:"));
    assert!(outcome.stdout.contains("right-only:"));
}

#[test]
fn eq_ignore_assumes_flag() {
    let guarded = data("guarded.tfm");
    let mut plain = std::env::temp_dir();
    plain.push("taskalg_plain_selection.tfm");
    std::fs::write(&plain, "main = a[other] + [halt] b\n").unwrap();
    let plain = plain.to_string_lossy().into_owned();

    let strict = taskalg_cmd(&["eq", &guarded, &plain]);
    assert_eq!(strict.code, 1);
    let relaxed = taskalg_cmd(&["eq", &guarded, &plain, "--ignore-assumes"]);
    assert_eq!(relaxed.code, 0, "{}", relaxed.stderr);
}

#[test]
fn help_exits_zero() {
    let outcome = taskalg_cmd(&["--help"]);
    assert_eq!(outcome.code, 0);
    assert!(outcome.stdout.contains("taskalg"));
}
