//! Serialization of analysis results, state spaces, and verification reports to
//! JSON, DOT, and human-readable text. All emitters are deterministic: the same
//! input and flags produce byte-identical output.

use crate::ast::{AmbientId, BinderId, CanonicalName, NameSite, Process};
use crate::cfa::{AbstractCap, AnalysisResult, ContentsRelation, Item};
use crate::semantics::StateSpace;
use crate::verify::{PrecisionReport, VerificationReport};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Bumped whenever any serialized field changes meaning.
pub const SCHEMA_VERSION: &str = "1";

/// Hex SHA-256 of the input the command consumed.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// The envelope around every JSON payload.
pub fn document(command: &str, input_digest: &str, payload: Value) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input_digest": input_digest,
        "payload": payload,
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Source spellings of binder sites, for rendering canonical names. Bound names
/// serialize as `text#site`, free names as their bare text.
pub fn site_texts(p: &Process) -> BTreeMap<BinderId, String> {
    let mut table = BTreeMap::new();
    fn walk(p: &Process, table: &mut BTreeMap<BinderId, String>) {
        match p {
            Process::Zero | Process::Var(_) => {}
            Process::Restriction(n, body) => {
                if let NameSite::Bound(id) = n.site {
                    table.entry(id).or_insert_with(|| n.text.clone());
                }
                walk(body, table);
            }
            Process::Ambient(_, body) | Process::Rec(_, body) => walk(body, table),
            Process::Prefix(cap, cont) => {
                if let crate::ast::Capability::Input { binder, .. } = cap {
                    if let NameSite::Bound(id) = binder.site {
                        table.entry(id).or_insert_with(|| binder.text.clone());
                    }
                }
                walk(cont, table);
            }
            Process::Parallel(l, r) | Process::Choice(l, r) => {
                walk(l, table);
                walk(r, table);
            }
        }
    }
    walk(p, &mut table);
    table
}

fn canon_text(name: &CanonicalName, table: &BTreeMap<BinderId, String>) -> String {
    match name {
        CanonicalName::Free(text) => text.clone(),
        CanonicalName::Bound(id) => {
            let text = table.get(id).map(String::as_str).unwrap_or("?");
            format!("{text}#{}", id.0)
        }
    }
}

fn cap_text(cap: &AbstractCap, table: &BTreeMap<BinderId, String>) -> String {
    let t = |n: &CanonicalName| canon_text(n, table);
    match cap {
        AbstractCap::Enter(n) => format!("enter {}", t(n)),
        AbstractCap::Accept(n) => format!("accept {}", t(n)),
        AbstractCap::Exit(n) => format!("exit {}", t(n)),
        AbstractCap::Expel(n) => format!("expel {}", t(n)),
        AbstractCap::MergePlus(n) => format!("merge+ {}", t(n)),
        AbstractCap::MergeMinus(n) => format!("merge- {}", t(n)),
        AbstractCap::Output { dir, channel, payload } => {
            format!("{}!{}{{{}}}", t(channel), dir.mark(), t(payload))
        }
        AbstractCap::Input { dir, channel, binder } => {
            format!("{}?{}{{{}}}", t(channel), dir.mark(), t(binder))
        }
    }
}

fn item_text(item: &Item, table: &BTreeMap<BinderId, String>) -> String {
    match item {
        Item::Amb(a) => a.to_string(),
        Item::Cap(c) => cap_text(c, table),
    }
}

// ---------------------------------------------------------------------------
// Analysis result
// ---------------------------------------------------------------------------

pub fn analysis_json(result: &AnalysisResult, term: &Process) -> Value {
    let table = site_texts(term);
    let mut contents = Map::new();
    for (ambient, items) in &result.contents {
        let rendered: Vec<Value> =
            items.iter().map(|i| Value::String(item_text(i, &table))).collect();
        contents.insert(ambient.to_string(), Value::Array(rendered));
    }
    let mut bindings = Map::new();
    for (name, values) in &result.bindings {
        let rendered: Vec<Value> = values
            .iter()
            .map(|v| Value::String(canon_text(v, &table)))
            .collect();
        bindings.insert(canon_text(name, &table), Value::Array(rendered));
    }
    // String order, matching the key order of the contents object.
    let mut ambients: Vec<String> = result.contents.keys().map(|a| a.to_string()).collect();
    ambients.sort();
    json!({
        "top": result.top.to_string(),
        "ambients": ambients,
        "contents": contents,
        "bindings": bindings,
        "stats": {
            "constraints": result.stats.constraints,
            "iterations": result.stats.iterations,
            "contents_size": result.contents.values().map(|s| s.len()).sum::<usize>(),
            "bindings_size": result.bindings.values().map(|s| s.len()).sum::<usize>(),
        },
    })
}

/// The father-son graph: oval ambient nodes, box capability nodes, an edge from
/// each ambient to everything it may contain. Edges present in the initial
/// structure are black; edges the closure added are red.
pub fn analysis_dot(
    result: &AnalysisResult,
    initial: &ContentsRelation,
    term: &Process,
) -> String {
    let table = site_texts(term);
    let mut out = String::from("digraph contents {\n");
    for ambient in result.contents.keys() {
        out.push_str(&format!(
            "  \"amb {ambient}\" [shape=oval, label=\"{ambient}\"];\n"
        ));
    }
    let mut caps = std::collections::BTreeSet::new();
    for items in result.contents.values() {
        for item in items {
            if let Item::Cap(c) = item {
                caps.insert(cap_text(c, &table));
            }
        }
    }
    for cap in &caps {
        out.push_str(&format!("  \"cap {cap}\" [shape=box, label=\"{cap}\"];\n"));
    }
    for (ambient, items) in &result.contents {
        for item in items {
            let derived = !initial
                .get(ambient)
                .is_some_and(|s| s.contains(item));
            let color = if derived { "red" } else { "black" };
            let target = match item {
                Item::Amb(a) => format!("amb {a}"),
                Item::Cap(c) => format!("cap {}", cap_text(c, &table)),
            };
            out.push_str(&format!(
                "  \"amb {ambient}\" -> \"{target}\" [color={color}];\n"
            ));
        }
    }
    out.push_str("}\n");
    out
}

pub fn analysis_text(result: &AnalysisResult, term: &Process) -> String {
    let table = site_texts(term);
    let mut out = String::new();
    out.push_str(&format!("top: {}\n", result.top));
    out.push_str("contents:\n");
    for (ambient, items) in &result.contents {
        let rendered: Vec<String> = items.iter().map(|i| item_text(i, &table)).collect();
        out.push_str(&format!("  {ambient}: {{{}}}\n", rendered.join(", ")));
    }
    out.push_str("bindings:\n");
    for (name, values) in &result.bindings {
        let rendered: Vec<String> =
            values.iter().map(|v| canon_text(v, &table)).collect();
        out.push_str(&format!(
            "  {}: {{{}}}\n",
            canon_text(name, &table),
            rendered.join(", ")
        ));
    }
    out.push_str(&format!(
        "stats: {} constraints, {} iterations\n",
        result.stats.constraints, result.stats.iterations
    ));
    out
}

// ---------------------------------------------------------------------------
// State space
// ---------------------------------------------------------------------------

pub fn space_json(space: &StateSpace) -> Value {
    let states: Vec<Value> = space
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| json!({"id": i, "term": s.to_string()}))
        .collect();
    let edges: Vec<Value> = space
        .edges
        .iter()
        .map(|(from, redex, to)| {
            json!({
                "from": from,
                "to": to,
                "rule": redex.rule.name(),
                "family": redex.family(),
                "via_rec": redex.via_rec,
                "participants": [redex.participants[0], redex.participants[1]],
            })
        })
        .collect();
    json!({
        "states": states,
        "edges": edges,
        "stats": {
            "states": space.states.len(),
            "edges": space.edges.len(),
            "depth_reached": space.depth_reached,
            "truncated": space.truncated,
        },
    })
}

pub fn space_text(space: &StateSpace, trace: bool) -> String {
    let mut out = format!(
        "{} state{}, {} transition{} (depth reached {}{})\n",
        space.states.len(),
        if space.states.len() == 1 { "" } else { "s" },
        space.edges.len(),
        if space.edges.len() == 1 { "" } else { "s" },
        space.depth_reached,
        if space.truncated { ", truncated" } else { ", complete" },
    );
    if trace {
        for (i, state) in space.states.iter().enumerate() {
            out.push_str(&format!("s{i}: {state}\n"));
        }
        for (from, redex, to) in &space.edges {
            out.push_str(&format!(
                "s{from} --{}--> s{to} [{}, {}]\n",
                redex.family(),
                redex.participants[0],
                redex.participants[1],
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

fn pairs_json(pairs: &std::collections::BTreeSet<(AmbientId, AmbientId)>) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|(p, c)| json!([p.to_string(), c.to_string()]))
            .collect(),
    )
}

pub fn verification_json(report: &VerificationReport, precision: &PrecisionReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "state": v.state,
                "term": v.term,
                "failures": v.failures.iter().map(|f| json!({
                    "rule": f.rule,
                    "detail": f.detail,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "verification": {
            "process": report.process,
            "states_checked": report.states_checked,
            "depth": report.depth,
            "truncated": report.truncated,
            "violations": violations,
        },
        "precision": {
            "exact": pairs_json(&precision.exact),
            "predicted": pairs_json(&precision.predicted),
            "spurious": pairs_json(&precision.spurious),
            "missed": pairs_json(&precision.missed),
            "truncated": precision.truncated,
        },
    })
}

pub fn verification_text(report: &VerificationReport, precision: &PrecisionReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("process: {}\n", report.process));
    out.push_str(&format!(
        "states checked: {} (depth {}, {})\n",
        report.states_checked,
        report.depth,
        if report.truncated { "truncated" } else { "complete" },
    ));
    if report.violations.is_empty() {
        out.push_str("violations: none\n");
    } else {
        out.push_str(&format!("violations: {}\n", report.violations.len()));
        for v in &report.violations {
            out.push_str(&format!("  state s{}: {}\n", v.state, v.term));
            for f in &v.failures {
                out.push_str(&format!("    {f}\n"));
            }
        }
    }
    let fmt_pairs = |set: &std::collections::BTreeSet<(AmbientId, AmbientId)>| -> String {
        if set.is_empty() {
            "none".to_string()
        } else {
            set.iter()
                .map(|(p, c)| format!("{p} ▸ {c}"))
                .collect::<Vec<_>>()
                .join(", ")
        }
    };
    out.push_str(&format!(
        "precision: {} exact, {} predicted\n",
        precision.exact.len(),
        precision.predicted.len()
    ));
    out.push_str(&format!("  spurious: {}\n", fmt_pairs(&precision.spurious)));
    out.push_str(&format!("  missed: {}\n", fmt_pairs(&precision.missed)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfa::{analyze, generate_constraints, initial_structure};
    use crate::fixtures::{parse_ok, CELL_MOL, ENTER_PAIR};
    use crate::semantics::explore;
    use crate::verify::{check_theorem, measure_precision};

    #[test]
    fn digest_is_stable_hex() {
        assert_eq!(
            digest(b"hello"),
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
    }

    #[test]
    fn analysis_json_shape() {
        let p = parse_ok(CELL_MOL);
        let result = analyze(&p).unwrap();
        let value = analysis_json(&result, &p);
        assert_eq!(value["top"], "⊤");
        let ambients: Vec<&str> =
            value["ambients"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(ambients, vec!["D", "cell", "mol", "⊤"]);
        // Bound names render as text#site; x receives cell3.
        let bindings = value["bindings"].as_object().unwrap();
        let x_key = bindings.keys().find(|k| k.starts_with("x#")).unwrap();
        let values = bindings[x_key].as_array().unwrap();
        assert!(values.iter().any(|v| v.as_str().unwrap().starts_with("cell3#")));
    }

    #[test]
    fn dot_marks_initial_vs_derived() {
        let p = parse_ok(ENTER_PAIR);
        let constraints = generate_constraints(&p, &crate::ast::AmbientId::Top).unwrap();
        let result = crate::cfa::solve(&constraints, &crate::ast::AmbientId::Top);
        let initial = initial_structure(&constraints, &crate::ast::AmbientId::Top);
        let dot = analysis_dot(&result, &initial, &p);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"amb ⊤\" -> \"amb a\" [color=black]"));
        assert!(dot.contains("\"amb b\" -> \"amb a\" [color=red]"));
        assert!(dot.contains("shape=box"));
    }

    #[test]
    fn emitters_are_deterministic() {
        let p = parse_ok(CELL_MOL);
        let result = analyze(&p).unwrap();
        let a = document("analyze", &digest(CELL_MOL.as_bytes()), analysis_json(&result, &p));
        let b = document("analyze", &digest(CELL_MOL.as_bytes()), analysis_json(&result, &p));
        assert_eq!(a, b);
        let space = explore(&p, 6, 10_000);
        assert_eq!(space_text(&space, true), space_text(&space, true));
    }

    #[test]
    fn verification_text_reads_well() {
        let p = parse_ok(ENTER_PAIR);
        let report = check_theorem(&p, 5, 100).unwrap();
        let precision = measure_precision(&p, 5, 100).unwrap();
        let text = verification_text(&report, &precision);
        assert!(text.contains("violations: none"));
        assert!(text.contains("spurious: none"));
        assert!(text.contains("missed: none"));
        let value = verification_json(&report, &precision);
        assert_eq!(value["verification"]["states_checked"], 2);
        assert_eq!(value["precision"]["missed"].as_array().unwrap().len(), 0);
    }
}
