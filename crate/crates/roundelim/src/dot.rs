//! Graphviz text for diagrams and trees.

use std::fmt::Write;

use roundelim_core::simulator::LabeledTree;
use roundelim_core::Diagram;

use crate::json::side_name;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Arrows point from weaker to stronger labels. Equivalence classes become
/// clusters.
pub fn diagram_dot(d: &Diagram) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", side_name(d.side())).unwrap();
    out.push_str("  rankdir=LR;\n");
    for (i, class) in d.classes().iter().enumerate() {
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        out.push_str("    style=dashed;\n");
        for l in class {
            writeln!(out, "    {};", quote(l.as_str())).unwrap();
        }
        out.push_str("  }\n");
    }
    for l in d.labels() {
        writeln!(out, "  {};", quote(l.as_str())).unwrap();
    }
    for (a, b) in d.edges() {
        writeln!(out, "  {} -> {};", quote(a.as_str()), quote(b.as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn tree_dot(t: &LabeledTree) -> String {
    let mut out = String::from("graph tree {\n");
    for w in 0..t.n() {
        writeln!(out, "  n{w} [label=\"{w}\"];").unwrap();
    }
    for e in t.edges() {
        let half = |i: usize, p: usize| match &e.labels[i] {
            Some(l) => format!("{p}:{}", l.as_str()),
            None => format!("{p}"),
        };
        let color = e.color.map(|c| format!(" c{c}")).unwrap_or_default();
        writeln!(
            out,
            "  n{} -- n{} [taillabel=\"{}\", headlabel=\"{}\", label=\"{}\"];",
            e.u,
            e.v,
            half(0, e.port_u),
            half(1, e.port_v),
            color.trim()
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
