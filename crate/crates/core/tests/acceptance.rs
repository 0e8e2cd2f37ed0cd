//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints a PASS/FAIL line even when cargo captures test output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stl_sentry::engine::{Code, Engine, FileResult, Run};
use stl_sentry::report::{parse_json, render_json};
use stl_sentry::rules::{match_all, RuleContext, RuleId};
use stl_sentry::scanner::DeprecatedSet;
use stl_sentry::suppression::mark_comment;
use stl_sentry::type_parser::parse_type_str;
use stl_sentry::{RuleConfig, Severity};

type Outcome = Result<String, String>;
type Expected = Vec<(Code, u32, bool)>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Corpus exactness

/// (file, [(code, line, suppressed)]) for every listing in the corpus.
fn corpus_expectations() -> Vec<(&'static str, Expected)> {
    vec![
        ("vector_bool_use.cpp", vec![(Code::VecBool, 5, false)]),
        ("vector_sketch.cpp", vec![]),
        ("coap_sort.cpp", vec![(Code::Coap, 10, false)]),
        ("auto_ptr_local.cpp", vec![]),
        (
            "believe_me.cpp",
            vec![
                (Code::VecBool, 50, true),
                (Code::VecBool, 51, true),
                (Code::VecBool, 52, true),
                (Code::Coap, 53, true),
            ],
        ),
        ("deprecated_foo.cpp", vec![(Code::Deprecated, 24, false)]),
    ]
}

fn corpus_exactness() -> Outcome {
    let dir = fixtures().join("corpus");
    let engine = Engine::default();
    let start = Instant::now();
    let paths: Vec<PathBuf> = corpus_expectations().iter().map(|(f, _)| dir.join(f)).collect();
    let run = engine.analyze_paths(&paths).map_err(|(p, e)| format!("{}: {e}", p.display()))?;
    let elapsed = start.elapsed();

    for (file, expected) in corpus_expectations() {
        let result = run
            .files
            .iter()
            .find(|f| f.path.ends_with(file))
            .ok_or_else(|| format!("{file} missing from run"))?;
        let got: Vec<_> = result.diagnostics.iter().map(|d| (d.rule, d.line, d.suppressed)).collect();
        ensure(got == expected, || format!("{file}: expected {expected:?}, got {got:?}"))?;
        ensure(result.parse_errors.is_empty(), || format!("{file}: parse errors {:?}", result.parse_errors))?;
        for d in &result.diagnostics {
            let expected_severity = match d.rule {
                Code::Coap => Severity::Error,
                _ => Severity::Warning,
            };
            ensure(d.severity == expected_severity, || format!("{file}: {d:?}"))?;
        }
    }
    ensure(elapsed < Duration::from_secs(1), || format!("corpus took {elapsed:?}"))?;
    Ok(format!("{} files, {:.1?}", paths.len(), elapsed))
}

// ---------------------------------------------------------------------------
// Oracle equivalence on random type trees

const NAMES: [&str; 8] = ["vector", "list", "map", "auto_ptr", "int", "bool", "Foo", "I_KNOW_VECTOR_BOOL"];

#[derive(Debug, Clone)]
struct Node {
    qualified: bool,
    name: &'static str,
    args: Vec<Node>,
}

fn gen_node(rng: &mut ChaCha8Rng, depth: u32) -> Node {
    let name = *NAMES.choose(rng).unwrap();
    let templated = matches!(name, "vector" | "list" | "map" | "auto_ptr");
    let args = if templated && depth < 4 {
        let n = rng.gen_range(1..=3);
        (0..n).map(|_| gen_node(rng, depth + 1)).collect()
    } else {
        Vec::new()
    };
    Node {
        qualified: templated && rng.gen_bool(0.5),
        name,
        args,
    }
}

fn render(n: &Node, rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    if n.qualified {
        s.push_str("std::");
    }
    s.push_str(n.name);
    if !n.args.is_empty() {
        s.push('<');
        let parts: Vec<String> = n.args.iter().map(|a| render(a, rng)).collect();
        s.push_str(&parts.join(", "));
        // Exercise both `> >` and `>>`.
        if s.ends_with('>') && rng.gen_bool(0.5) {
            s.push(' ');
        }
        s.push('>');
    }
    s
}

/// Brute-force oracle over the generator's own tree: every node is checked
/// against the rule definitions directly.
fn oracle(n: &Node) -> Vec<(RuleId, Vec<usize>, bool)> {
    fn go(n: &Node, path: &mut Vec<usize>, out: &mut Vec<(RuleId, Vec<usize>, bool)>) {
        let arg_is = |i: usize, name: &str| n.args.get(i).is_some_and(|a| a.name == name);
        if n.name == "vector" && arg_is(0, "bool") && n.args[0].args.is_empty() {
            let tagged = n.args.iter().any(|a| a.name == "I_KNOW_VECTOR_BOOL");
            out.push((RuleId::VecBool, path.clone(), tagged));
        }
        let positions: &[usize] = match n.name {
            "vector" | "list" => &[0],
            "map" => &[0, 1],
            _ => &[],
        };
        for &p in positions {
            if arg_is(p, "auto_ptr") {
                out.push((RuleId::Coap, path.clone(), false));
            }
        }
        if n.name == "Foo" {
            out.push((RuleId::Deprecated, path.clone(), false));
        }
        for (i, a) in n.args.iter().enumerate() {
            path.push(i);
            go(a, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let ctx = RuleContext::default();
    let dep: DeprecatedSet = ["Foo"].into_iter().collect();
    let cfg = RuleConfig {
        deprecated: vec!["Foo".to_string()],
        ..RuleConfig::default()
    };
    let engine = Engine::new(cfg);
    let mut fired = 0usize;
    for i in 0..1000 {
        let tree = gen_node(&mut rng, 1);
        let text = render(&tree, &mut rng);
        let ty = parse_type_str(&text).map_err(|e| format!("tree {i} `{text}`: {e}"))?;

        let mut expected = oracle(&tree);
        expected.sort();
        let mut got: Vec<_> = match_all(&ty, &ctx, &dep).into_iter().map(|m| (m.rule, m.path)).collect();
        got.sort();
        let want: Vec<_> = expected.iter().map(|(r, p, _)| (*r, p.clone())).collect();
        ensure(got == want, || format!("tree {i} `{text}`: rules {got:?}, oracle {want:?}"))?;

        // Same through the whole pipeline, including template-tag suppression.
        let result = engine.analyze_source("t.cpp", &format!("{text} x;\n"));
        let mut per_rule: BTreeMap<(RuleId, bool), usize> = BTreeMap::new();
        for d in &result.diagnostics {
            let rule = d.rule.rule().ok_or_else(|| format!("tree {i}: unexpected {d:?}"))?;
            *per_rule.entry((rule, d.suppressed)).or_default() += 1;
        }
        let mut want: BTreeMap<(RuleId, bool), usize> = BTreeMap::new();
        for (r, _, s) in &expected {
            *want.entry((*r, *s)).or_default() += 1;
        }
        ensure(per_rule == want, || format!("tree {i} `{text}`: engine {per_rule:?}, oracle {want:?}"))?;
        fired += expected.len();
    }
    Ok(format!("1000 trees, {fired} oracle matches"))
}

// ---------------------------------------------------------------------------
// Suppression monotonicity

const STATEMENTS: &[&str] = &[
    "std::vector<bool> v{};",
    "vector<bool> w;",
    "std::map<int, std::vector<bool> > m;",
    "std::vector<std::auto_ptr<int> > coap;",
    "std::map<std::auto_ptr<int>, std::auto_ptr<int> > twice;",
    "Foo foo( 1, 2 );",
    "std::list<Foo> foos;",
    "std::vector<Foo> mixed; std::vector<bool> flags;",
    "Flags fl;",
    "Coaps cs;",
    "std::vector<int> fine;",
    "int n = 3;",
    "void take( std::vector<bool> v, const Foo& f );",
    "std::vector<bool, I_KNOW_VECTOR_BOOL> known;",
    "auto* p = new std::list<std::auto_ptr<Foo> >();",
];

fn gen_file(rng: &mut ChaCha8Rng) -> String {
    let mut lines = vec![
        "class Foo: public Deprecated<Foo> { };".to_string(),
        "typedef std::vector<bool> Flags;".to_string(),
        "using Coaps = std::deque<std::auto_ptr<int> >;".to_string(),
    ];
    let n = rng.gen_range(3..12);
    for _ in 0..n {
        lines.push(STATEMENTS.choose(rng).unwrap().to_string());
    }
    lines.join("\n") + "\n"
}

fn with_mark(src: &str, line: u32, mark: &str) -> String {
    src.lines()
        .enumerate()
        .map(|(i, l)| {
            if i as u32 + 1 == line {
                format!("{l} {mark}\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect()
}

fn counts(r: &FileResult) -> (usize, usize) {
    let live = r
        .diagnostics
        .iter()
        .filter(|d| !d.suppressed && d.rule.rule().is_some())
        .count();
    let deprecated = r.diagnostics.iter().filter(|d| d.rule == Code::Deprecated).count();
    (live, deprecated)
}

fn suppression_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let engine = Engine::default();
    let marks = [
        mark_comment(RuleId::VecBool),
        mark_comment(RuleId::Coap),
        "// stl-sentry: believe-me(DEPRECATED)".to_string(),
    ];
    let mut insertions = 0usize;
    let mut reductions = 0usize;
    for i in 0..200 {
        let src = gen_file(&mut rng);
        let base = engine.analyze_source("g.cpp", &src);
        let (live0, dep0) = counts(&base);
        let diagnosed: Vec<(u32, Code)> = base
            .diagnostics
            .iter()
            .filter(|d| !d.suppressed)
            .map(|d| (d.line, d.rule))
            .collect();
        let mut all_marked = src.clone();
        for (line, code) in diagnosed {
            for mark in &marks {
                let marked = with_mark(&src, line, mark);
                let (live1, dep1) = counts(&engine.analyze_source("g.cpp", &marked));
                ensure(live1 <= live0, || format!("file {i}: mark on line {line} raised {live0} -> {live1}\n{marked}"))?;
                ensure(dep1 == dep0, || format!("file {i}: DEPRECATED {dep0} -> {dep1}\n{marked}"))?;
                insertions += 1;
                if live1 < live0 {
                    reductions += 1;
                }
            }
            if let Some(rule) = code.rule().filter(|r| *r != RuleId::Deprecated) {
                all_marked = with_mark(&all_marked, line, &mark_comment(rule));
            }
        }
        // Marks on every diagnosed line at once, and on an arbitrary line.
        let (live2, dep2) = counts(&engine.analyze_source("g.cpp", &all_marked));
        ensure(live2 <= live0 && dep2 == dep0, || format!("file {i}: all marks {live0}/{dep0} -> {live2}/{dep2}"))?;
        let any_line = rng.gen_range(1..=src.lines().count() as u32);
        let (live3, dep3) = counts(&engine.analyze_source("g.cpp", &with_mark(&src, any_line, &marks[0])));
        ensure(live3 <= live0 && dep3 == dep0, || format!("file {i}: mark on line {any_line}"))?;
    }
    ensure(reductions > 0, || "no mark ever suppressed anything".to_string())?;
    Ok(format!("200 files, {insertions} insertions, {reductions} suppressing"))
}

// ---------------------------------------------------------------------------
// Determinism and JSON round trip

fn binary() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stl-sentry"));
    c.env_remove("STL_SENTRY_CONFIG");
    c
}

fn determinism_and_round_trip() -> Outcome {
    let dir = fixtures();
    for args in [vec!["--format", "json"], vec!["--show-suppressed"], vec![]] {
        let out = |_: u8| {
            binary()
                .args(&args)
                .arg(&dir)
                .output()
                .map_err(|e| format!("spawn: {e}"))
        };
        let (a, b) = (out(0)?, out(1)?);
        ensure(a.stdout == b.stdout && a.status.code() == b.status.code(), || {
            format!("outputs differ for {args:?}")
        })?;
        ensure(!a.stdout.is_empty(), || format!("no output for {args:?}"))?;
    }

    let engine = Engine::default();
    let mut checked = 0;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir.join("corpus"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    let whole = engine.analyze_paths(&paths).map_err(|(p, e)| format!("{}: {e}", p.display()))?;
    let mut runs: Vec<Run> = whole.files.iter().map(|f| Run::new(vec![f.clone()])).collect();
    runs.push(whole);
    runs.push(Run::default());
    for run in &runs {
        let json = render_json(run);
        let back = parse_json(&json).map_err(|e| e.to_string())?;
        ensure(&back == run, || format!("decode changed the run:\n{json}"))?;
        ensure(render_json(&back) == json, || format!("re-encode differs:\n{json}"))?;
        checked += 1;
    }
    Ok(format!("3 output modes stable, {checked} reports round-tripped"))
}

// ---------------------------------------------------------------------------
// Exit codes

fn exit_code_contract() -> Outcome {
    let dir = fixtures().join("exit");
    let cases: [(&[&str], &str, i32); 5] = [
        (&[], "clean.cpp", 0),
        (&[], "warning.cpp", 0),
        (&["--deny-warnings"], "warning.cpp", 1),
        (&[], "error.cpp", 2),
        (&["--config", "CONFIG"], "clean.cpp", 3),
    ];
    for (flags, file, want) in cases {
        let bad = dir.join("bad_config.json");
        let flags: Vec<&std::ffi::OsStr> = flags
            .iter()
            .map(|f| if *f == "CONFIG" { bad.as_os_str() } else { std::ffi::OsStr::new(f) })
            .collect();
        let out = binary()
            .args(&flags)
            .arg(dir.join(file))
            .output()
            .map_err(|e| format!("spawn: {e}"))?;
        ensure(out.status.code() == Some(want), || {
            format!("{flags:?} {file}: exit {:?}, want {want}", out.status.code())
        })?;
    }
    Ok("0/1/2/3 as specified".to_string())
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 5] = [
        ("corpus exactness", corpus_exactness),
        ("oracle equivalence", oracle_equivalence),
        ("suppression monotonicity", suppression_monotonicity),
        ("determinism and round trip", determinism_and_round_trip),
        ("exit-code contract", exit_code_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(note) => println!("PASS  {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", 5 - failed, 5);
    if failed > 0 {
        std::process::exit(1);
    }
}
