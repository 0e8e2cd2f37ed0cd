use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stl_sentry::report::parse_json;

fn sentry() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stl-sentry"));
    c.env_remove("STL_SENTRY_CONFIG");
    c
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) {
    let path = dir.join(name);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, body).unwrap();
}

#[test]
fn directories_recurse_over_source_extensions() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["a.cpp", "b.cc", "c.cxx", "d.h", "sub/e.hpp"] {
        write(tmp.path(), name, "std::vector<bool> v;\n");
    }
    write(tmp.path(), "ignored.c", "std::vector<bool> v;\n");
    write(tmp.path(), "notes.txt", "std::vector<bool> v;\n");

    let out = sentry().args(["--format", "json"]).arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let run = parse_json(stdout(&out).trim_end()).unwrap();
    assert_eq!(run.summary.files, 5);
    assert_eq!(run.summary.warnings, 5);
    let names: Vec<_> = run.files.iter().map(|f| f.path.rsplit('/').next().unwrap().to_string()).collect();
    assert_eq!(names, ["a.cpp", "b.cc", "c.cxx", "d.h", "e.hpp"]);
}

#[test]
fn explicit_files_are_checked_whatever_their_extension() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "legacy.inl", "std::list<std::auto_ptr<int> > l;\n");
    let out = sentry().arg(tmp.path().join("legacy.inl")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("error: [COAP]"));
}

#[cfg(unix)]
#[test]
fn symlinks_are_followed_one_level() {
    use std::os::unix::fs::symlink;
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("root");
    let outside = tmp.path().join("outside");
    let deeper = tmp.path().join("deeper");
    write(&root, "main.cpp", "int x;\n");
    write(&outside, "linked.cpp", "std::vector<bool> v;\n");
    write(&deeper, "far.cpp", "std::vector<bool> w;\n");
    symlink(&outside, root.join("via_link")).unwrap();
    symlink(&deeper, outside.join("second_link")).unwrap();
    // A cycle back to the root must not hang.
    symlink(&root, outside.join("loop")).unwrap();

    let out = sentry().args(["--format", "json"]).arg(&root).output().unwrap();
    let run = parse_json(stdout(&out).trim_end()).unwrap();
    let files: Vec<_> = run.files.iter().map(|f| f.path.clone()).collect();
    assert_eq!(files.len(), 2, "{files:?}");
    assert!(files.iter().any(|f| f.ends_with("via_link/linked.cpp")));
    assert!(!files.iter().any(|f| f.ends_with("far.cpp")));
}

#[test]
fn config_from_environment_and_flag() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "a.cpp", "Widget w;\nstd::vector<bool> v;\n");
    write(tmp.path(), "env.json", r#"{"deprecated": ["Widget"]}"#);
    write(tmp.path(), "flag.json", r#"{"rules": {"VEC_BOOL": {"enabled": false}}}"#);
    let src = tmp.path().join("a.cpp");

    let out = sentry()
        .env("STL_SENTRY_CONFIG", tmp.path().join("env.json"))
        .arg(&src)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("[DEPRECATED]") && text.contains("[VEC_BOOL]"), "{text}");

    // --config wins over the environment.
    let out = sentry()
        .env("STL_SENTRY_CONFIG", tmp.path().join("env.json"))
        .arg("--config")
        .arg(tmp.path().join("flag.json"))
        .arg(&src)
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(!text.contains("[DEPRECATED]") && !text.contains("[VEC_BOOL]"), "{text}");
    assert!(text.starts_with("0 warnings, 0 errors"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "a.cpp", "vector<bool> v;\nstd::vector<bool> w; // stl-sentry: believe-me(VEC_BOOL)\n");
    write(
        tmp.path(),
        "cfg.json",
        r#"{"match_unqualified": true, "deny_warnings": false, "show_suppressed": false}"#,
    );
    let base = || {
        let mut c = sentry();
        c.arg("--config").arg(tmp.path().join("cfg.json")).arg(tmp.path().join("a.cpp"));
        c
    };
    let plain = base().output().unwrap();
    assert_eq!(plain.status.code(), Some(0));
    assert!(stdout(&plain).starts_with(&format!("{}:1:1: warning", tmp.path().join("a.cpp").display())));

    assert_eq!(base().arg("--deny-warnings").output().unwrap().status.code(), Some(1));

    let strict = base().args(["--no-unqualified", "--deny-warnings"]).output().unwrap();
    assert_eq!(strict.status.code(), Some(0), "{}", stdout(&strict));

    let shown = stdout(&base().arg("--show-suppressed").output().unwrap());
    assert!(shown.lines().any(|l| l.starts_with("suppressed: ") && l.ends_with("(comment-mark)")), "{shown}");
}

#[test]
fn usage_errors_exit_3_on_stderr() {
    for args in [
        vec!["--format", "yaml", "a.cpp"],
        vec!["--format"],
        vec!["--bogus", "a.cpp"],
        vec![],
    ] {
        let out = sentry().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_config_names_the_problem() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", r#"{"rules": {"COAP": {"severity": "fatal"}}}"#);
    write(tmp.path(), "a.cpp", "");
    let out = sentry()
        .arg("--config")
        .arg(tmp.path().join("cfg.json"))
        .arg(tmp.path().join("a.cpp"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("fatal") && err.contains("line 1"), "{err}");
}

#[test]
fn list_rules_and_help() {
    let out = sentry().arg("--list-rules").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("VEC_BOOL") && l.contains("warning")));
    assert!(text.lines().any(|l| l.starts_with("COAP") && l.contains("error")));

    let help = sentry().arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("--deny-warnings"));
}

#[test]
fn invalid_utf8_is_tolerated() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("latin1.cpp");
    fs::write(&path, b"// caf\xe9\nstd::vector<bool> v;\n").unwrap();
    let out = sentry().arg(&path).output().unwrap();
    assert!(stdout(&out).contains(":2:1: warning: [VEC_BOOL]"));
}
