//! Graphviz output.

use std::fmt::Write;

use super::document::TtsDocument;
use crate::automata::TimedAutomaton;
use crate::semantics::DiscretizedTTS;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Locations in automaton order; urgent ones are drawn double-bordered and
/// labelled `(U)`, initial ones get an entry arrow from an invisible node.
pub fn export_dot_ta(ta: &TimedAutomaton) -> String {
    let mut out = String::new();
    out.push_str("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, l) in ta.locations.iter().enumerate() {
        let mut label = l.name.clone();
        if l.urgent {
            label.push_str(" (U)");
        }
        label.push_str("\\n");
        label.push_str(&l.invariant.to_string());
        let shape = if l.urgent { ", peripheries=2, style=filled, fillcolor=lightgray" } else { "" };
        writeln!(out, "  {} [label={}{}];", quote(&l.name), quote(&label), shape).unwrap();
        if l.initial {
            writeln!(out, "  __init{i} [shape=point, style=invis];").unwrap();
            writeln!(out, "  __init{i} -> {};", quote(&l.name)).unwrap();
        }
    }
    for e in &ta.edges {
        let mut label = e.action.clone();
        if !e.guard.is_true() {
            write!(label, "\\n{}", e.guard).unwrap();
        }
        if !e.resets.is_empty() {
            let r: Vec<String> = e.resets.iter().map(|c| format!("{c}:=0")).collect();
            write!(label, "\\n{}", r.join(", ")).unwrap();
        }
        writeln!(out, "  {} -> {} [label={}];", quote(&e.source), quote(&e.target), quote(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn export_dot_tts(tts: &DiscretizedTTS) -> String {
    export_dot_tts_document(&TtsDocument::from_tts(tts))
}

pub fn export_dot_tts_document(tts: &TtsDocument) -> String {
    let mut out = String::new();
    out.push_str("digraph tts {\n  rankdir=LR;\n  node [shape=box];\n");
    for (i, s) in tts.states.iter().enumerate() {
        let valuation: Vec<String> = s.valuation.iter().map(|(c, v)| format!("{c}:={v}")).collect();
        let label = format!("({}, [{}])", s.location, valuation.join(", "));
        writeln!(out, "  s{i} [label={}];", quote(&label)).unwrap();
        if s.initial {
            writeln!(out, "  __init{i} [shape=point, style=invis];\n  __init{i} -> s{i};").unwrap();
        }
    }
    for t in &tts.transitions {
        writeln!(out, "  s{} -> s{} [label={}];", t.source, t.target, quote(&t.label)).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn count_edges(dot: &str) -> usize {
        dot.lines().filter(|l| l.contains(" -> ") && !l.contains("__init")).count()
    }

    fn count_nodes(dot: &str) -> usize {
        dot.lines().filter(|l| l.contains("[label=") && !l.contains(" -> ")).count()
    }

    #[test]
    fn example1_shape() {
        let dot = export_dot_ta(&fixtures::example1());
        assert_eq!(count_nodes(&dot), 2);
        assert_eq!(count_edges(&dot), 1);
        assert!(dot.contains("x > 1"));
        assert!(dot.contains("__init0 -> \"l0\""));
    }

    #[test]
    fn example3_shape() {
        let dot = export_dot_ta(&fixtures::example3());
        assert_eq!(count_nodes(&dot), 4);
        assert_eq!(count_edges(&dot), 2);
        assert_eq!(dot.matches("peripheries=2").count(), 2);
    }

    #[test]
    fn deterministic() {
        let ta = fixtures::example6();
        assert_eq!(export_dot_ta(&ta), export_dot_ta(&ta));
    }

    #[test]
    fn tts_graph() {
        use crate::semantics::{explore, ExploreConfig, SemanticsKind};
        let tts = explore(&fixtures::example2(), SemanticsKind::Baseline, &ExploreConfig::with_cap(2)).unwrap();
        let dot = export_dot_tts(&tts);
        assert!(dot.contains("(ld, [x:=0])"));
        assert_eq!(count_edges(&dot), 0);
    }
}
