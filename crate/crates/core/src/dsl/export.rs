use std::fmt::Write;

use serde_json::Value;

use crate::model::{Architecture, Configuration, Diagram};

/// Graphviz rendering of a diagram: one box per type, one point node per
/// motif, edges labelled with multiplicity and degree.
pub fn export_dot_diagram(d: &Diagram) -> String {
    let mut s = String::new();
    writeln!(s, "graph \"{}\" {{", d.name).unwrap();
    writeln!(s, "  node [shape=box];").unwrap();
    for t in &d.types {
        writeln!(
            s,
            "  \"{}\" [label=\"{} ({}) {}\"];",
            t.name,
            t.name,
            t.ports.join(", "),
            t.cardinality
        )
        .unwrap();
    }
    for (i, m) in d.motifs.iter().enumerate() {
        writeln!(s, "  \"m{i}\" [shape=point];").unwrap();
        for (g, c) in &m.ports {
            writeln!(
                s,
                "  \"m{i}\" -- \"{}\" [label=\"{} : {} : {}\"];",
                g.type_name, g.port_name, c.multiplicity, c.degree
            )
            .unwrap();
        }
    }
    s.push_str("}\n");
    s
}

/// Graphviz rendering of an architecture. Binary connectors become plain
/// edges; any other arity goes through an auxiliary point node.
pub fn export_dot_architecture(a: &Architecture) -> String {
    let mut s = String::new();
    writeln!(s, "graph \"{}\" {{", a.name).unwrap();
    writeln!(s, "  node [shape=box];").unwrap();
    for (id, t) in &a.components {
        writeln!(s, "  \"{id}\" [label=\"{id} : {t}\"];").unwrap();
    }
    for (k, c) in a.configuration.iter().enumerate() {
        let ports: Vec<_> = c.iter().collect();
        if let [x, y] = ports[..] {
            writeln!(
                s,
                "  \"{}\" -- \"{}\" [taillabel=\"{}\", headlabel=\"{}\"];",
                x.component, y.component, x.port, y.port
            )
            .unwrap();
        } else {
            writeln!(s, "  \"c{k}\" [shape=point];").unwrap();
            for p in ports {
                writeln!(
                    s,
                    "  \"c{k}\" -- \"{}\" [headlabel=\"{}\"];",
                    p.component, p.port
                )
                .unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Configurations as arrays of connectors, each an array of `id.port`
/// strings, all in canonical order.
pub fn configurations_json<'a>(configs: impl IntoIterator<Item = &'a Configuration>) -> Value {
    Value::Array(
        configs
            .into_iter()
            .map(|c| serde_json::to_value(c).expect("configurations serialize"))
            .collect(),
    )
}
