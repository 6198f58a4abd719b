#![allow(dead_code)]

use std::process::{Command, Output};

pub fn toptrap(args: &[&str]) -> Output {
    toptrap_env(args, &[])
}

pub fn toptrap_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_toptrap"));
    cmd.args(args).env_remove("TOPTRAP_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("toptrap binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Parses the `max cross-method delta: <value>` line printed by `evolve`.
pub fn reported_delta(stderr: &str) -> Option<f64> {
    stderr
        .lines()
        .find_map(|l| l.strip_prefix("max cross-method delta: "))
        .and_then(|v| v.trim().parse().ok())
}

/// Well-formed XML with an `svg` root and no external references.
pub fn check_svg(text: &str) -> Result<usize, String> {
    let doc = roxmltree::Document::parse(text).map_err(|e| format!("not well-formed: {e}"))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(format!("root element is <{}>", root.tag_name().name()));
    }
    for node in doc.descendants().filter(|n| n.is_element()) {
        for attr in node.attributes() {
            if attr.name() == "href" || attr.value().contains("url(") {
                return Err(format!("external reference in <{}>", node.tag_name().name()));
            }
        }
        if matches!(node.tag_name().name(), "image" | "script" | "use" | "foreignObject") {
            return Err(format!("disallowed element <{}>", node.tag_name().name()));
        }
    }
    Ok(doc.descendants().filter(|n| n.has_tag_name("polyline")).count())
}
