//! Shared fixtures: corpus access and seeded random generators.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use archdia::dsl::{parse_architecture, parse_diagram};
use archdia::model::{validate_diagram, PortInstance};
use archdia::oracle::universe;
use archdia::{
    Architecture, Cardinalities, ChoiceKind, ComponentType, Configuration, Connector,
    ConnectorMotif, Diagram, GenericPortRef, Interval, PortConstraint, TypedInterval,
};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_diagram(name: &str) -> Diagram {
    parse_diagram(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_architecture(name: &str, diagram: &str) -> (Architecture, Diagram) {
    let d = corpus_diagram(diagram);
    let a = parse_architecture(&corpus_text(name), &d).unwrap_or_else(|e| panic!("{name}: {e}"));
    (a, d)
}

/// Every corpus file with the given extension, sorted by name.
pub fn corpus_files(ext: &str) -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(ext))
        .collect();
    out.sort();
    out
}

/// Corpus architectures and the diagram each is written against.
pub const CORPUS_ARCHITECTURES: &[(&str, &str)] = &[
    ("quaternary.archa", "quaternary.archd"),
    ("binary.archa", "binary.archd"),
    ("master_slave_1.archa", "master_slave.archd"),
    ("master_slave_2.archa", "master_slave.archd"),
    ("star.archa", "star.archd"),
    ("map_reduce.archa", "map_reduce.archd"),
];

pub fn conn(ports: &[(&str, &str)]) -> Connector {
    Connector::new(ports.iter().map(|(c, p)| PortInstance::new(*c, *p))).unwrap()
}

/// Connector from `"a.p b.q"` notation.
pub fn conn_str(s: &str) -> Connector {
    Connector::new(s.split_whitespace().map(|x| {
        let (c, p) = x.split_once('.').unwrap();
        PortInstance::new(c, p)
    }))
    .unwrap()
}

pub fn show(conf: &Configuration) -> Vec<String> {
    conf.iter()
        .map(|c| {
            c.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Shape parameters for random diagrams.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_types: usize,
    pub max_n: u32,
    pub max_motifs: usize,
    /// Only singleton intervals.
    pub simple: bool,
    /// Only `sc` multiplicities with lower bound at least one.
    pub sc_multiplicity: bool,
    /// Allow cardinality intervals (otherwise every type has a fixed count).
    pub interval_cards: bool,
}

impl Shape {
    pub const ORACLE: Shape = Shape {
        max_types: 3,
        max_n: 3,
        max_motifs: 2,
        simple: false,
        sc_multiplicity: false,
        interval_cards: true,
    };
    pub const SIMPLE: Shape = Shape {
        simple: true,
        sc_multiplicity: true,
        interval_cards: false,
        ..Shape::ORACLE
    };
}

fn typed(
    rng: &mut ChaCha8Rng,
    lo_min: u32,
    max: u32,
    simple: bool,
    force_sc: bool,
) -> TypedInterval {
    let lo = rng.gen_range(lo_min..=max);
    let hi = if simple {
        lo
    } else {
        rng.gen_range(lo..=max.max(lo))
    };
    let kind = if force_sc || simple || rng.gen_bool(0.5) {
        ChoiceKind::Sc
    } else {
        ChoiceKind::Mc
    };
    TypedInterval { kind, lo, hi }
}

/// A random valid diagram. Not necessarily consistent.
pub fn random_diagram(rng: &mut ChaCha8Rng, shape: Shape) -> Diagram {
    loop {
        let k = rng.gen_range(1..=shape.max_types);
        let mut types = Vec::new();
        let mut ports = Vec::new();
        for i in 0..k {
            let name = format!("T{}", i + 1);
            let np = rng.gen_range(1..=2);
            let names: Vec<String> = ["p", "r"][..np].iter().map(|s| s.to_string()).collect();
            for p in &names {
                ports.push(GenericPortRef::new(name.clone(), p.clone()));
            }
            let lo = rng.gen_range(1..=shape.max_n);
            let hi = if shape.interval_cards && !shape.simple && rng.gen_bool(0.3) {
                rng.gen_range(lo..=shape.max_n)
            } else {
                lo
            };
            types.push(ComponentType::new(name, names, Interval::new(lo, hi)));
        }
        let nm = rng.gen_range(1..=shape.max_motifs);
        let mut motifs = Vec::new();
        for _ in 0..nm {
            let size = rng.gen_range(1..=ports.len().min(3));
            let chosen: Vec<_> = ports.choose_multiple(rng, size).cloned().collect();
            let mut m = BTreeMap::new();
            for g in chosen {
                let n = types
                    .iter()
                    .find(|t| t.name == g.type_name)
                    .unwrap()
                    .cardinality
                    .hi;
                let mult = if shape.sc_multiplicity || shape.simple {
                    typed(rng, 1, n.clamp(1, 2), shape.simple, true)
                } else {
                    let mut t = typed(rng, 0, n.clamp(1, 2), false, false);
                    t.hi = t.hi.max(1);
                    t
                };
                let deg = typed(rng, 0, 2, shape.simple, false);
                m.insert(g, PortConstraint::new(mult, deg));
            }
            motifs.push(ConnectorMotif { ports: m });
        }
        let d = Diagram::new("R", types, motifs);
        if validate_diagram(&d).is_ok() {
            return d;
        }
    }
}

/// Largest universe over every cardinality assignment.
pub fn max_universe(d: &Diagram) -> usize {
    d.cardinality_assignments()
        .iter()
        .map(|c| universe(d, c).unwrap().len())
        .max()
        .unwrap_or(0)
}

/// Random diagram whose universe stays within `limit` at every cardinality.
pub fn random_bounded_diagram(rng: &mut ChaCha8Rng, shape: Shape, limit: usize) -> Diagram {
    loop {
        let d = random_diagram(rng, shape);
        if max_universe(&d) <= limit {
            return d;
        }
    }
}

pub fn random_cards(rng: &mut ChaCha8Rng, d: &Diagram) -> Cardinalities {
    d.types
        .iter()
        .map(|t| {
            (
                t.name.clone(),
                rng.gen_range(t.cardinality.lo..=t.cardinality.hi),
            )
        })
        .collect()
}

/// Random architecture built from universe connectors.
pub fn random_architecture(
    rng: &mut ChaCha8Rng,
    d: &Diagram,
    cards: &Cardinalities,
) -> Architecture {
    let u = universe(d, cards).unwrap();
    let conf: Configuration = u.into_iter().filter(|_| rng.gen_bool(0.3)).collect();
    Architecture::with_instances("Rand", d.name.clone(), cards, conf)
}

/// A small structural change that usually breaks conformance.
pub fn mutate(
    rng: &mut ChaCha8Rng,
    a: &Architecture,
    d: &Diagram,
    cards: &Cardinalities,
) -> Architecture {
    let mut a = a.clone();
    let conns: Vec<Connector> = a.configuration.iter().cloned().collect();
    let ids: Vec<String> = a.components.keys().cloned().collect();
    match rng.gen_range(0..6) {
        0 if !conns.is_empty() => {
            a.configuration.remove(conns.choose(rng).unwrap());
        }
        1 => {
            if let Some(c) = universe(d, cards).unwrap().choose(rng) {
                a.configuration.insert(c.clone());
            }
        }
        2 if !conns.is_empty() => {
            // Add some port instance to a connector.
            let c = conns.choose(rng).unwrap();
            let id = ids.choose(rng).unwrap();
            let t = &a.components[id];
            let ty = d.component_type(t).unwrap();
            let port = ty.ports.choose(rng).unwrap();
            let mut ports: Vec<_> = c.iter().cloned().collect();
            ports.push(PortInstance::new(id.clone(), port.clone()));
            a.configuration.remove(c);
            a.configuration.insert(Connector::new(ports).unwrap());
        }
        3 if conns.iter().any(|c| c.len() > 1) => {
            let c = conns
                .iter()
                .filter(|c| c.len() > 1)
                .collect::<Vec<_>>()
                .choose(rng)
                .cloned()
                .unwrap()
                .clone();
            let mut ports: Vec<_> = c.iter().cloned().collect();
            ports.remove(rng.gen_range(0..ports.len()));
            a.configuration.remove(&c);
            a.configuration.insert(Connector::new(ports).unwrap());
        }
        4 => {
            let t = d.types.choose(rng).unwrap();
            let k = a.count_of(&t.name) + 1;
            a.components
                .insert(archdia::model::instance_id(&t.name, k), t.name.clone());
        }
        _ => {
            // Drop a component that no connector mentions, or failing that, a connector.
            let unused: Vec<_> = ids
                .iter()
                .filter(|id| {
                    !a.configuration
                        .iter()
                        .any(|c| c.iter().any(|p| &&p.component == id))
                })
                .cloned()
                .collect();
            if let Some(id) = unused.choose(rng) {
                a.components.remove(id);
            } else if let Some(c) = conns.choose(rng) {
                a.configuration.remove(c);
            }
        }
    }
    a
}

/// Random type-preserving permutation of component ids.
pub fn random_permutation(rng: &mut ChaCha8Rng, a: &Architecture) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    let mut by_type: BTreeMap<&str, Vec<&String>> = BTreeMap::new();
    for (id, t) in &a.components {
        by_type.entry(t).or_default().push(id);
    }
    for ids in by_type.values() {
        let mut shuffled = ids.clone();
        shuffled.shuffle(rng);
        for (from, to) in ids.iter().zip(shuffled) {
            map.insert((*from).clone(), to.clone());
        }
    }
    map
}

/// Replace every `sc[k,k]` by `mc[k,k]` (or the reverse when `to_mc` is false).
pub fn flip_singletons(d: &Diagram, to_mc: bool) -> Diagram {
    let mut d = d.clone();
    let kind = if to_mc {
        ChoiceKind::Mc
    } else {
        ChoiceKind::Sc
    };
    for m in &mut d.motifs {
        for c in m.ports.values_mut() {
            for iv in [&mut c.multiplicity, &mut c.degree] {
                if iv.is_singleton() {
                    iv.kind = kind;
                }
            }
        }
    }
    d.canonicalize();
    d
}
