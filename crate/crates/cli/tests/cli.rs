use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ndlr_core::diagram::{parse_diagram_file, replay, WitnessStep};
use ndlr_core::{alpha_eq, apply, parse, standard_redex, Expr, Label, Redex, Signature};
use serde_json::Value;

fn diagrams() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../diagrams")
}

fn ndlr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndlr")).args(args).env_remove("NDLR_CONFIG").output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn term_file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn sig() -> Signature {
    Signature::bool_list()
}

#[test]
fn parse_echoes_and_reports_errors() {
    let d = tempfile::tempdir().unwrap();
    let f = term_file(&d, "a.t", "(  \\x .  x   True )");
    let o = ndlr(&["parse", &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "\\x.(x True)");

    let bad = term_file(&d, "b.t", "Cons True Nil Nil");
    let o = ndlr(&["parse", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Cons"));

    let o = ndlr(&["--sig", "/nonexistent/sig.txt", "parse", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("signature"));
}

#[test]
fn custom_signature() {
    let d = tempfile::tempdir().unwrap();
    let s = term_file(&d, "sig", "type Unit = U/0\n");
    let f = term_file(&d, "a.t", "case[Unit] U of {U -> U}");
    let o = ndlr(&["--sig", &s, "reduce", &f]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).ends_with("RESULT Converged nd=0\n"));
}

#[test]
fn reduce_traces() {
    let d = tempfile::tempdir().unwrap();
    let f = term_file(&d, "e.t", "((letrec x=True in \\y.y) False)");
    let o = ndlr(&["reduce", &f]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("lapp st @ε => letrec x=True in ((\\y.y) False)\n"), "{out}");
    assert!(out.ends_with("RESULT Converged nd=0\n"), "{out}");

    let f = term_file(&d, "c.t", "choice True False");
    let out = stdout(&ndlr(&["reduce", &f, "--nd", "all"]));
    let leaves: Vec<&str> = out.lines().filter(|l| l.starts_with("LEAF")).collect();
    assert_eq!(leaves.len(), 2);
    assert!(leaves.iter().all(|l| l.contains("Converged nd=1")));

    let f = term_file(&d, "y.t", "letrec x=x in x");
    assert!(stdout(&ndlr(&["reduce", &f])).ends_with("RESULT Stuck:Cycle nd=0\n"));

    let f = term_file(&d, "o.t", "(\\x.x y)");
    assert_eq!(ndlr(&["reduce", &f]).status.code(), Some(2));

    let f = term_file(&d, "w.t", "letrec f=\\x.(f x) in (f True)");
    let o = ndlr(&["reduce", &f, "--max-steps", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).ends_with("RESULT Exhausted nd=0\n"));
}

#[test]
fn reduce_records_replay() {
    let d = tempfile::tempdir().unwrap();
    let src = "letrec f=\\x.x, g=choice f f in (g True)";
    let f = term_file(&d, "e.t", src);
    let o = ndlr(&["--records", "reduce", &f, "--nd", "right"]);
    assert!(o.status.success());
    let mut cur = parse(src, &sig()).unwrap();
    let mut steps = 0;
    for line in stdout(&o).lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        if v["type"] == "step" {
            let r: Redex = serde_json::from_value(serde_json::json!({"label": v["label"], "pos": v["pos"]})).unwrap();
            let (next, _) = apply(&cur, &r).unwrap();
            let claimed = parse(v["after"].as_str().unwrap(), &sig()).unwrap();
            assert!(alpha_eq(&next, &claimed), "{next} vs {claimed}");
            cur = claimed;
            steps += 1;
        } else {
            assert_eq!(v["result"], "Converged");
            assert_eq!(v["nd"], 1);
        }
    }
    assert!(steps > 3);
}

#[test]
fn apply_rules() {
    let d = tempfile::tempdir().unwrap();
    let f = term_file(&d, "e.t", "((letrec x=True in \\y.y) False)");
    let o = ndlr(&["apply", &f, "--rule", "ldel", "--pos", "appF.letB(x)"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let result = parse(out.lines().next().unwrap(), &sig()).unwrap();
    assert!(alpha_eq(&result, &parse("((\\y.y) False)", &sig()).unwrap()));
    assert!(out.contains("STEP ldel i"));

    let f = term_file(&d, "u.t", "letrec x=\\z.z in (x x)");
    let o = ndlr(&["apply", &f, "--rule", "ucp", "--pos", "letIn.appF"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());

    let f = term_file(&d, "c.t", "letrec x=\\z.z in \\w.x");
    let o = ndlr(&["apply", &f, "--rule", "cp", "--pos", "letIn.lam"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("STEP cpd"), "{}", stdout(&o));
}

#[test]
fn enumerate_counts() {
    let o = ndlr(&["enumerate", "--size", "3", "--count"]);
    assert_eq!(stdout(&o).trim(), "39");
    let o = ndlr(&["enumerate", "--size", "2"]);
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn check_diagrams_exit_codes() {
    let fork = diagrams().join("ldel.fork");
    let f = fork.to_str().unwrap();
    let o = ndlr(&["check-diagrams", "--red", "ldel", "--diagrams", f, "--size", "6", "--mode", "fork"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let d = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(&fork).unwrap();
    let mutated: Vec<&str> = text.lines().filter(|l| !l.starts_with("st,a . ldel")).collect();
    let m = term_file(&d, "mut.fork", &mutated.join("\n"));
    let o = ndlr(&["check-diagrams", "--red", "ldel", "--diagrams", &m, "--size", "6", "--mode", "fork"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("COUNTEREXAMPLE"));

    let bad = term_file(&d, "bad.fork", "st,a . ldel ~> ldel . st,lbeta+\n");
    let o = ndlr(&["check-diagrams", "--red", "ldel", "--diagrams", &bad, "--mode", "fork"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"), "{o:?}");

    let o = ndlr(&["check-diagrams", "--red", "ldel", "--diagrams", f, "--size", "4", "--mode", "commute"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn propose_emits_dsl() {
    let o = ndlr(&["check-diagrams", "--red", "ldel", "--size", "6", "--mode", "propose"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let set = parse_diagram_file(&out).unwrap();
    assert!(set.iter().any(|d| d.to_string().starts_with("st,a . i,ldel ~> i,ldel . st,a")), "{out}");
}

fn follow(e: &Expr, path: &[Label]) -> Expr {
    let mut cur = e.clone();
    for &l in path {
        let steps = match standard_redex(&cur) {
            ndlr_core::standard::StandardRedex::Deterministic(s) => vec![s],
            ndlr_core::standard::StandardRedex::NdChoice(a, b) => vec![a, b],
            ndlr_core::standard::StandardRedex::None(_) => vec![],
        };
        cur = steps.into_iter().find(|s| s.label == l).expect("path replays").after;
    }
    cur
}

#[derive(serde::Deserialize)]
struct Rec {
    source: String,
    red: Redex,
    target: String,
    branches: Vec<Value>,
}

/// Every matched branch in the record output replays to the claimed join.
#[test]
fn diagram_records_replay() {
    for (file, mode) in [("ldel.commute", "commute"), ("ldel.fork", "fork")] {
        let p = diagrams().join(file);
        let o = ndlr(&[
            "--records",
            "check-diagrams",
            "--red",
            "ldel",
            "--diagrams",
            p.to_str().unwrap(),
            "--size",
            "6",
            "--mode",
            mode,
        ]);
        assert!(o.status.success());
        let mut matched = 0;
        for line in stdout(&o).lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            if v["type"] == "summary" {
                continue;
            }
            let r: Rec = serde_json::from_value(v).unwrap();
            let s = parse(&r.source, &sig()).unwrap();
            let t = parse(&r.target, &sig()).unwrap();
            assert!(alpha_eq(&apply(&s, &r.red).unwrap().0, &t));
            for b in r.branches {
                if b["outcome"] != "Matched" {
                    continue;
                }
                let path: Vec<Label> = serde_json::from_value(b["path"].clone()).unwrap();
                let from_s: Vec<WitnessStep> = serde_json::from_value(b["from_s"].clone()).unwrap();
                let from_t: Vec<WitnessStep> = serde_json::from_value(b["from_t"].clone()).unwrap();
                if mode == "commute" {
                    assert!(alpha_eq(&replay(&s, &from_s).unwrap(), &follow(&t, &path)));
                } else {
                    let joined = replay(&t, &from_t).unwrap();
                    assert!(alpha_eq(&replay(&follow(&s, &path), &from_s).unwrap(), &joined));
                }
                matched += 1;
            }
        }
        assert!(matched > 0);
    }
}

#[test]
fn check_equiv_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let ch = term_file(&d, "ch.t", "choice True False");
    let tr = term_file(&d, "tr.t", "True");
    let o = ndlr(&["check-equiv", &ch, &tr, "--ctx-size", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("COUNTEREXAMPLE context=[] D=1"));

    let s = term_file(&d, "s.t", "((letrec x=True in \\y.y) False)");
    let t = term_file(&d, "t.t", "((\\y.y) False)");
    let o = ndlr(&["check-equiv", &s, &t, "--ctx-size", "4", "--reduction-contexts"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let w = term_file(&d, "w.t", "letrec f=\\x.(f x) in (f True)");
    let o = ndlr(&["check-equiv", &w, &w, "--ctx-size", "2", "--max-steps", "30"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn config_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let cfg = term_file(&d, "cfg.toml", "step_bound = 1\n");
    let f = term_file(&d, "e.t", "((letrec x=True in \\y.y) False)");
    let o = Command::new(env!("CARGO_BIN_EXE_ndlr")).args(["reduce", &f]).env("NDLR_CONFIG", &cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(3));

    let bad = term_file(&d, "bad.toml", "step_bound = 0\n");
    let o = Command::new(env!("CARGO_BIN_EXE_ndlr")).args(["reduce", &f]).env("NDLR_CONFIG", &bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let unknown = term_file(&d, "u.toml", "colour = 1\n");
    let o = ndlr(&["--config", &unknown, "reduce", &f]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_output() {
    let p = diagrams().join("ldel.commute");
    let a = ndlr(&[
        "check-diagrams",
        "--red",
        "ldel",
        "--diagrams",
        p.to_str().unwrap(),
        "--size",
        "5",
        "--mode",
        "commute",
        "--workers",
        "1",
    ]);
    let b = ndlr(&[
        "check-diagrams",
        "--red",
        "ldel",
        "--diagrams",
        p.to_str().unwrap(),
        "--size",
        "5",
        "--mode",
        "commute",
        "--workers",
        "4",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
