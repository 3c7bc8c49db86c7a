use super::*;
use crate::algebra::{AlgebraKind, Monomial};
use crate::catalog;
use crate::kernel::Field;
use crate::twist::check_hexagon;

const WEYL: &str = include_str!("../../../../configs/weyl.toml");
const HEISENBERG: &str = include_str!("../../../../configs/heisenberg.toml");

fn err(text: &str) -> Error {
    parse_config(text).expect_err("config should be rejected")
}

fn located(e: &Error) -> (usize, usize) {
    match e {
        Error::Parse { line, column, .. } => (*line, *column),
        other => {
            let s = other.to_string();
            let at = s.split("at ").nth(1).expect("message carries a position");
            let pos = at.split(':').take(2).map(|x| x.trim().parse().unwrap()).collect::<Vec<usize>>();
            (pos[0], pos[1])
        }
    }
}

#[test]
fn weyl_file_parses() {
    let cfg = parse_config(WEYL).unwrap();
    assert_eq!(cfg.field, Field::RATIONALS);
    assert_eq!((cfg.seed, cfg.cutoff), (7, 6));
    let w = &cfg.algebras["weyl"].algebra;
    let AlgebraKind::IteratedOre { names, delta } = w.kind() else { panic!("not an Ore extension") };
    assert_eq!(names, &["x", "y"]);
    assert_eq!(delta[1][0], w.scalar(Field::RATIONALS.int(-1)));
    assert!(w.same_presentation(&catalog::weyl_algebra(Field::RATIONALS)));
    assert_eq!(cfg.tasks.len(), 6);
    assert_eq!(cfg.tasks[5], Task::Hochschild("K".into()));
}

#[test]
fn empty_task_list() {
    let cfg = parse_config("field = 0\n").unwrap();
    assert!(cfg.tasks.is_empty());
    let r = run(&cfg, RunOptions::default());
    assert!(r.tasks.is_empty());
    assert_eq!(r.status, TaskStatus::Pass);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn unfiltered_delta_is_rejected_at_its_value() {
    let text = "[algebras.a]\nkind = \"ore\"\ngenerators = [\"x1\", \"x2\"]\ndelta = [{ var = \"x2\", of = \"x1\", value = \"x2\" }]\n";
    let e = err(text);
    assert!(matches!(e, Error::Validation(_)), "{e}");
    // the value string opens in column 43 of line 4
    assert_eq!(located(&e), (4, 43));
}

#[test]
fn derivation_of_a_later_generator_is_rejected() {
    let text = "[algebras.a]\nkind = \"ore\"\ngenerators = [\"x\", \"y\"]\ndelta = [{ var = \"x\", of = \"y\", value = \"1\" }]\n";
    assert!(matches!(err(text), Error::Validation(_)));
}

#[test]
fn composite_characteristic() {
    let e = err("seed = 1\nfield = 6\n");
    assert!(matches!(e, Error::Validation(_)), "{e}");
    assert_eq!(located(&e).0, 2);
}

#[test]
fn unknown_generator_in_a_value() {
    let text = "[algebras.a]\nkind = \"ore\"\ngenerators = [\"x\", \"y\"]\ndelta = [{ var = \"y\", of = \"x\", value = \"1 + q\" }]\n";
    let e = err(text);
    assert!(matches!(e, Error::UnknownGenerator(_) | Error::Parse { .. }), "{e}");
    assert_eq!(located(&e).0, 4);
}

#[test]
fn syntax_errors_carry_positions() {
    let e = err("field = 0\ncutoff = = 3\n");
    assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    let e = err("field = 0\nbogus = 1\n");
    assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    // a malformed linear combination is positioned inside its string
    let text = "[algebras.a]\nkind = \"polynomial\"\ngenerators = [\"x\"]\n[algebras.b]\nkind = \"polynomial\"\ngenerators = [\"y\"]\n[twists.t]\nkind = \"table\"\nleft = \"a\"\nright = \"b\"\ntable = [{ b = \"y\", a = \"x\", value = \"x⊗y - * 1⊗1\" }]\n";
    let e = err(text);
    let (line, col) = located(&e);
    assert_eq!(line, 11);
    assert!(col > 36, "{e}");
}

#[test]
fn zero_cutoff_and_unknown_references() {
    assert!(matches!(err("cutoff = 0\n"), Error::Validation(_)));
    assert!(matches!(err("tasks = [\"hochschild:nope\"]\n"), Error::Validation(_)));
    assert!(matches!(err("tasks = [\"preset:nope\"]\n"), Error::Validation(_)));
    assert!(matches!(err("tasks = [\"frobnicate:x\"]\n"), Error::Validation(_)));
    let text = "[resolutions.R]\nalgebra = \"missing\"\nfamily = \"bar\"\n";
    assert!(matches!(err(text), Error::Validation(_)));
}

#[test]
fn table_twist_matches_the_ore_twist() {
    let text = "[algebras.a]\nkind = \"polynomial\"\ngenerators = [\"x\"]\n[algebras.b]\nkind = \"polynomial\"\ngenerators = [\"y\"]\n[twists.t]\nkind = \"table\"\nleft = \"a\"\nright = \"b\"\ntable = [{ b = \"y\", a = \"x\", value = \"x⊗y - 1⊗1\" }]\n";
    let cfg = parse_config(text).unwrap();
    let t = &cfg.twists["t"].twist;
    let w = catalog::weyl_twist(Field::RATIONALS);
    for b in 0..4 {
        for a in 0..4 {
            let (bm, am) = (Monomial(vec![b]), Monomial(vec![a]));
            assert_eq!(t.apply_mono(&bm, &am), w.apply_mono(&bm, &am), "y^{b} ⊗ x^{a}");
        }
    }
    assert!(check_hexagon(t, 3, 20, 1).unwrap().passed());
}

#[test]
fn sl2_is_out_of_scope() {
    let cfg = load(None, &Overrides { tasks: vec!["preset:lie-sl2-excluded".into()], ..Default::default() }).unwrap();
    let r = run(&cfg, RunOptions::default());
    assert_eq!(r.tasks[0].status, TaskStatus::Fail);
    assert!(r.tasks[0].message.as_deref().unwrap().starts_with("out of scope"));
    assert_eq!(r.exit_code(), 1);
}

const BROKEN: &str = r#"
tasks = ["check-twist:bad", "twisted-product:P", "hochschild:P", "verify-resolution:K"]

[algebras.a]
kind = "polynomial"
generators = ["x"]

[algebras.b]
kind = "polynomial"
generators = ["y"]

[twists.bad]
kind = "table"
left = "a"
right = "b"
table = [
    { b = "y", a = "x", value = "x⊗y" },
    { b = "y", a = "x^2", value = "x^2⊗y + 1⊗1" },
]

[resolutions.PA]
algebra = "a"
family = "koszul"
lift = { twist = "bad", side = "left" }

[resolutions.PB]
algebra = "b"
family = "koszul"
lift = { twist = "bad", side = "right" }

[resolutions.K]
algebra = "a"
family = "koszul"

[products.P]
kind = "bimodule"
left = "PA"
right = "PB"
twist = "bad"
"#;

#[test]
fn dependent_tasks_are_skipped() {
    let cfg = parse_config(BROKEN).unwrap();
    let r = run(&cfg, RunOptions::default());
    let st: Vec<TaskStatus> = r.tasks.iter().map(|t| t.status).collect();
    assert_eq!(st, [TaskStatus::Fail, TaskStatus::Skipped, TaskStatus::Skipped, TaskStatus::Pass]);
    assert!(!r.tasks[0].violations.is_empty());
    assert_eq!(r.tasks[1].message.as_deref(), Some("skipped: check-twist:bad failed"));
    assert_eq!(r.status, TaskStatus::Fail);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn weyl_file_runs() {
    let cfg = parse_config(WEYL).unwrap();
    let r = run(&cfg, RunOptions::default());
    for t in &r.tasks {
        assert_eq!(t.status, TaskStatus::Pass, "{t:?}");
    }
    let hh = r.tasks.last().unwrap();
    let dims: Vec<usize> = hh.tables[0].rows.iter().map(|row| row.dim).collect();
    assert_eq!(dims, [1, 0, 0]);
    assert!(hh.tables[0].rows.iter().all(|row| row.stability == "stable"));
}

#[test]
fn ore_module_chain() {
    let cfg = parse_config(HEISENBERG).unwrap();
    let r = run(&cfg, RunOptions::default());
    assert_eq!(r.exit_code(), 0, "{}", r.to_text());
    let tor = r.tasks.iter().find(|t| t.task == "tor-ext:H").unwrap();
    let dims: Vec<usize> = tor.tables[0].rows.iter().map(|row| row.dim).collect();
    assert_eq!(dims, [1, 2, 2, 1]);
}

#[test]
fn overrides_replace_tasks_and_cutoff() {
    let ov = Overrides { tasks: vec!["tor-ext:H".into()], cutoff: Some(2), seed: Some(3) };
    let cfg = load(Some(HEISENBERG), &ov).unwrap();
    assert_eq!(cfg.tasks, [Task::TorExt("H".into())]);
    assert_eq!((cfg.cutoff, cfg.seed), (2, 3));
    let bad = Overrides { tasks: vec!["tor-ext:nothing".into()], ..Default::default() };
    assert!(load(Some(HEISENBERG), &bad).is_err());
    let (out, code) = execute(Some("cutoff = \n"), &Overrides::default(), Format::Text, RunOptions::default());
    assert_eq!(code, 2);
    assert!(out.starts_with("error: parse error at 1:"));
}

#[test]
fn renderings_agree() {
    let cfg =
        load(Some(WEYL), &Overrides { tasks: vec!["check-twist:tau".into(), "verify-resolution:K".into()], ..Default::default() }).unwrap();
    let r = run(&cfg, RunOptions::default());
    let text = r.to_text();
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for (t, jt) in r.tasks.iter().zip(json["tasks"].as_array().unwrap()) {
        assert_eq!(jt["task"], t.task.as_str());
        assert_eq!(jt["checks"].as_array().unwrap().len(), t.checks.len());
        for c in &t.checks {
            assert!(text.contains(&format!("{}: {}", c.name, c.detail)));
        }
        for tab in &t.tables {
            assert!(text.contains(&tab.title));
        }
    }
    assert!(json.get("timing_ms").is_none());
    assert_eq!(json["status"], "pass");
}

#[test]
fn reports_are_reproducible() {
    let cfg = parse_config(WEYL).unwrap();
    let a = run(&cfg, RunOptions::default()).to_json();
    let b = run(&cfg, RunOptions::default()).to_json();
    assert_eq!(a, b);
    let t = run(&cfg, RunOptions { timings: true });
    assert!(t.tasks.iter().all(|r| r.timing_ms.is_some()));
}
