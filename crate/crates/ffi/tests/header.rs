use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

fn manifest(rel: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)).unwrap()
}

fn exported(src: &str) -> BTreeSet<String> {
    src.lines()
        .filter_map(|l| {
            let l = l.trim();
            let rest = l
                .strip_prefix("pub unsafe extern \"C\" fn ")
                .or_else(|| l.strip_prefix("pub extern \"C\" fn "))?;
            Some(rest.split('(').next().unwrap().to_string())
        })
        .collect()
}

fn strip_comments(mut s: &str) -> String {
    let mut out = String::new();
    while let Some(start) = s.find("/*") {
        out.push_str(&s[..start]);
        let end = s[start..].find("*/").expect("closed comment");
        s = &s[start + end + 2..];
    }
    out.push_str(s);
    out
}

fn declared(header: &str) -> BTreeSet<String> {
    strip_comments(header)
        .split(';')
        .filter_map(|decl| {
            let head = decl.split('(').next()?;
            let name = head
                .split(|c: char| !(c.is_alphanumeric() || c == '_'))
                .filter(|s| !s.is_empty())
                .last()?;
            name.starts_with("xlie_").then(|| name.to_string())
        })
        .collect()
}

#[test]
fn header_matches_exports() {
    let src = manifest("src/lib.rs");
    let header = manifest("include/xlie.h");
    let exports = exported(&src);
    assert!(exports.len() >= 10);
    assert_eq!(exports, declared(&header));
    assert_eq!(src.matches("#[no_mangle]").count(), exports.len());
}

#[test]
fn header_status_values_match() {
    use xlie_ffi::XlieStatus::*;
    let header = manifest("include/xlie.h");
    for (name, v) in [
        ("OK", Ok),
        ("NEGATIVE", Negative),
        ("INVALID_INPUT", InvalidInput),
        ("BUDGET_EXHAUSTED", BudgetExhausted),
        ("NULL_POINTER", NullPointer),
        ("PANIC", Panic),
    ] {
        let line = format!("XLIE_STATUS_{name} = {}", v as i32);
        assert!(header.contains(&line), "{line}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-std=c99"])
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/xlie.h"))
        .output()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
