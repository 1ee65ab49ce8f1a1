use std::process::Command;

use cadadj_cli::parse::{parse_system, print_system};
use cadadj_cli::report::{emit_dot, emit_json, run, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_poly(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=4);
    let mut terms = Vec::new();
    for _ in 0..n {
        let mut t = match rng.gen_range(0..4) {
            0 => format!("{}/{}", rng.gen_range(-9..=9), rng.gen_range(1..=5)),
            1 => format!("{}.{}", rng.gen_range(0..=9), rng.gen_range(0..=99)),
            _ => rng.gen_range(-9..=9).to_string(),
        };
        for v in VARS {
            match rng.gen_range(0..4) {
                0 => {}
                1 => t.push_str(&format!("*{v}")),
                _ => t.push_str(&format!("*{v}^{}", rng.gen_range(1..=3))),
            }
        }
        terms.push(format!("({t})"));
    }
    let lhs = terms.join(" + ");
    if rng.gen_bool(0.3) {
        format!("({lhs})^2")
    } else {
        lhs
    }
}

fn random_formula(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        let rel = ["<", "<=", "=", "==", "!=", ">=", ">"][rng.gen_range(0..7)];
        return format!("{} {rel} {}", random_poly(rng), random_poly(rng));
    }
    let op = if rng.gen_bool(0.5) { "&&" } else { "||" };
    let parts: Vec<String> = (0..rng.gen_range(2..=3)).map(|_| random_formula(rng, depth - 1)).collect();
    format!("({})", parts.join(&format!(" {op} ")))
}

#[test]
fn printed_systems_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vars: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
    for _ in 0..100 {
        let text = random_formula(&mut rng, 3);
        let sys = parse_system(&text, &vars).unwrap_or_else(|e| panic!("{text}: {e}"));
        let printed = print_system(&sys);
        let again = parse_system(&printed, &vars).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(again, sys, "{text}\n{printed}");
    }
}

fn circles() -> &'static str {
    "x^2 + y^2 <= 4 && (x - 1)^2 + y^2 >= 1"
}

#[test]
fn json_is_deterministic_across_runs_and_threads() {
    let cfg = RunConfig::default();
    let a = emit_json(&run(&cfg, circles()).unwrap().report);
    let b = emit_json(&run(&cfg, circles()).unwrap().report);
    let seq = RunConfig { parallel: false, ..RunConfig::default() };
    let c = emit_json(&run(&seq, circles()).unwrap().report);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["counts"]["N_CELL"].as_u64().unwrap() as usize, v["cells"].as_array().unwrap().len());
    assert!(v.get("timings").is_none());
}

#[test]
fn dot_lists_every_cell_and_adjacency() {
    let r = run(&RunConfig::default(), circles()).unwrap();
    let dot = emit_dot(&r.report);
    assert!(dot.starts_with("graph cad {\n"));
    assert!(dot.ends_with("}\n"));
    let nodes = dot.lines().filter(|l| l.contains("[label=")).count();
    let edges = dot.lines().filter(|l| l.contains(" -- ")).count();
    assert_eq!(nodes, r.report.counts.n_cell);
    assert_eq!(edges, r.report.counts.n_adj);
    let filled = dot.lines().filter(|l| l.contains("fillcolor")).count();
    assert_eq!(filled, r.report.counts.n_cell_set);
}

fn cadadj(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cadadj")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes_and_error_reports() {
    let (code, out) = cadadj(&["x <"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "SyntaxError");
    assert_eq!(v["error"]["column"], 4);

    let (code, out) = cadadj(&["--vars", "x,y,z", "x*y + x*z + y*z = 0"]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "NotWellBased");

    let (code, _) = cadadj(&["--vars", "x,y,z", "--subst", "x,y+z,z", "x*y + x*z + y*z = 0"]);
    assert_eq!(code, 0);

    let (code, _) = cadadj(&["--vars", "x,y", "--subst", "x,x", "x + y > 0"]);
    assert_eq!(code, 2);

    let (code, out) = cadadj(&["--format", "text", "y^2 = x*(x^4 - 1)"]);
    assert_eq!(code, 0);
    assert!(out.contains("cells: 21 (7 in set)"), "{out}");
    assert!(out.contains("components: 2"), "{out}");
}

#[test]
fn complement_components() {
    // the complement of a closed disc in the plane is connected; the annulus splits it
    let (_, out) = cadadj(&["--components", "complement", "--format", "text", "x^2 + y^2 <= 1"]);
    assert!(out.contains("components: 1"), "{out}");
    let (_, out) = cadadj(&["--components", "complement", "--format", "text", "x^2 + y^2 >= 1 && x^2 + y^2 <= 4"]);
    assert!(out.contains("components: 2"), "{out}");
}
