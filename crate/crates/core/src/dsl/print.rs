use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::{Architecture, Diagram};

/// Canonical text of a diagram. Types, ports and motifs come out sorted
/// whatever order they were built in.
pub fn print_diagram(d: &Diagram) -> String {
    let mut d = d.clone();
    d.canonicalize();
    let mut s = String::new();
    writeln!(s, "diagram {} {{", d.name).unwrap();
    for t in &d.types {
        writeln!(
            s,
            "  type {}({}) {}",
            t.name,
            t.ports.join(", "),
            t.cardinality
        )
        .unwrap();
    }
    for m in &d.motifs {
        writeln!(s, "  motif {m}").unwrap();
    }
    s.push_str("}\n");
    s
}

/// Canonical text of an architecture: components grouped by type, connectors
/// in set order with port instances sorted by (component, port).
pub fn print_architecture(a: &Architecture) -> String {
    let mut s = String::new();
    writeln!(s, "architecture {} of {} {{", a.name, a.diagram).unwrap();
    let mut by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (id, t) in &a.components {
        by_type.entry(t).or_default().push(id);
    }
    for (t, ids) in by_type {
        writeln!(s, "  component {} : {t}", ids.join(", ")).unwrap();
    }
    for c in &a.configuration {
        writeln!(s, "  connector {c}").unwrap();
    }
    s.push_str("}\n");
    s
}
