//! JSON and Markdown rendering of suite reports.
//!
//! The JSON writer prints every float with 17 significant digits and keeps
//! the `timing` object on a single line, so that reports from identical
//! seeds differ in exactly one line.

use std::fmt::Write;

use serde_json::Value;

use super::SuiteReport;

fn number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let f = n.as_f64().expect("f64 number");
        let _ = write!(out, "{f:.16e}");
    } else {
        let _ = write!(out, "{n}");
    }
}

fn string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings serialize"));
}

fn compact(v: &Value, out: &mut String) {
    match v {
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                compact(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                string(k, out);
                out.push_str(": ");
                compact(item, out);
            }
            out.push('}');
        }
        scalar => leaf(scalar, out),
    }
}

fn leaf(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => number(n, out),
        Value::String(s) => string(s, out),
        _ => unreachable!("containers handled by callers"),
    }
}

/// Pretty-prints `v`. Arrays of scalars and the `timing` object stay on one
/// line.
pub fn write_json_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => compact(v, out),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                string(k, out);
                out.push_str(": ");
                if k == "timing" {
                    compact(item, out);
                } else {
                    write_json_value(item, indent + 1, out);
                }
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => leaf(scalar, out),
    }
}

pub fn render_json(report: &SuiteReport) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    let mut out = String::new();
    write_json_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3e}")
    } else {
        x.to_string()
    }
}

pub fn render_markdown(report: &SuiteReport) -> String {
    let mut out = String::new();
    let s = &report.summary;
    let _ = writeln!(out, "# Verification report\n");
    let _ = writeln!(
        out,
        "Engine {} {}, schema {}, seed {}. Overall: **{}**.\n",
        report.engine.name,
        report.engine.version,
        report.schema_version,
        report.seed,
        if report.pass { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        out,
        "{} records: {} gating ({} passed, {} failed), {} informational. Wall clock {:.2} s.\n",
        s.records, s.gating, s.passed, s.failed, s.informational, report.timing.wall_clock_seconds
    );
    let mut suite = "";
    for r in &report.records {
        if r.suite != suite {
            suite = &r.suite;
            let _ = writeln!(out, "\n## {suite}\n");
            let _ = writeln!(
                out,
                "| status | identity | check | geometry | metric | max abs | max rel | tolerance | samples |"
            );
            let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
        }
        let status = match (r.gating, r.pass) {
            (false, _) => "info",
            (true, true) => "pass",
            (true, false) => "**FAIL**",
        };
        let _ = writeln!(
            out,
            "| {status} | {} | `{}` | {} | {:?} | {} | {} | {} | {} |",
            r.label.replace('|', "\\|"),
            r.check,
            r.geometry.as_deref().unwrap_or("flat"),
            r.metric,
            sci(r.max_abs),
            sci(r.max_rel),
            sci(r.tolerance),
            r.samples
        );
    }
    let failures: Vec<_> = report.failures().collect();
    if !failures.is_empty() {
        let _ = writeln!(out, "\n## Failures\n");
        for r in failures {
            let _ = writeln!(out, "- `{}` on {}", r.check, r.geometry.as_deref().unwrap_or("flat"));
            if let Some(note) = &r.note {
                let _ = writeln!(out, "  - note: {note}");
            }
            if let Some(w) = &r.worst {
                let mut s = String::new();
                compact(w, &mut s);
                let _ = writeln!(out, "  - worst sample: `{s}`");
            }
        }
    }
    out
}
