mod common;

use archdia::conformance::{semantic_conforms, verify, SearchPath};
use archdia::consistency::{check, check_interval};
use archdia::dsl::{export_dot_architecture, parse_diagram};
use archdia::oracle::brute_force;
use archdia::synthesis::{count_configs, enumerate_diagram, SynthesisConstraints};
use archdia::{
    ComponentType, ConnectorMotif, Diagram, GenericPortRef, Interval, PortConstraint, TypedInterval,
};

use common::*;

/// check, then synthesize, then conform every synthesized architecture.
#[test]
fn every_corpus_diagram_goes_through_the_pipeline() {
    let none = SynthesisConstraints::default();
    for f in corpus_files(".archd") {
        let d = corpus_diagram(&f);
        let consistent = check(&d).consistent;
        let all = enumerate_diagram(&d, &none).unwrap();
        assert_eq!(consistent, !all.is_empty(), "{f}");
        assert_eq!(count_configs(&d, &none).unwrap(), all.len() as u128, "{f}");
        for a in &all {
            let v = verify(a, &d);
            assert!(v.conforms, "{f}: {} {:?}", a.name, v.failure);
        }
    }
}

#[test]
fn corpus_counts() {
    let none = SynthesisConstraints::default();
    let counts: Vec<(String, u128)> = corpus_files(".archd")
        .into_iter()
        .map(|f| {
            let n = count_configs(&corpus_diagram(&f), &none).unwrap();
            (f, n)
        })
        .collect();
    let want = [
        ("binary.archd", 1),
        ("blocks.archd", 90),
        ("inconsistent.archd", 0),
        ("map_reduce.archd", 150),
        ("master_slave.archd", 4),
        ("master_slave_simple.archd", 2),
        ("master_slave_uniform.archd", 50),
        ("multistar.archd", 6),
        ("quaternary.archd", 1),
        ("repository.archd", 5),
        ("star.archd", 1),
        ("three_types.archd", 2),
    ];
    let want: Vec<(String, u128)> = want.iter().map(|(f, n)| (f.to_string(), *n)).collect();
    assert_eq!(counts, want);
}

#[test]
fn corpus_architectures_conform() {
    for (a, d) in CORPUS_ARCHITECTURES {
        let (arch, diagram) = corpus_architecture(a, d);
        assert!(verify(&arch, &diagram).conforms, "{a}");
        assert_eq!(semantic_conforms(&arch, &diagram), Ok(true), "{a}");
    }
}

#[test]
fn map_reduce_is_one_of_the_synthesized() {
    let (a, d) = corpus_architecture("map_reduce.archa", "map_reduce.archd");
    let v = verify(&a, &d);
    assert_eq!(v.path, SearchPath::Greedy);
    let sizes: Vec<_> = v.partition.unwrap().iter().map(|p| p.len()).collect();
    assert_eq!(sizes, [3, 2, 4, 3]);
}

#[test]
fn quaternary_architecture_renders_one_hyperedge() {
    let (a, _) = corpus_architecture("quaternary.archa", "quaternary.archd");
    let dot = export_dot_architecture(&a);
    assert_eq!(dot.matches("shape=point").count(), 1);
    assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), 4);
}

fn single_port(n: u32, m: TypedInterval, d: TypedInterval) -> Diagram {
    Diagram::new(
        "Gap",
        vec![ComponentType::new("T", ["p"], Interval::exact(n))],
        vec![ConnectorMotif::new([(
            GenericPortRef::new("T", "p"),
            PortConstraint::new(m, d),
        )])],
    )
}

/// The interval criterion only counts connectors. With multiple-choice
/// multiplicity it accepts diagrams no architecture satisfies: two instances
/// each in three connectors would need three distinct connectors over two
/// instances that all contain both, but only one such connector exists.
#[test]
fn interval_criterion_overapproximates_mc_multiplicity() {
    let d = single_port(2, TypedInterval::mc(1, 2), TypedInterval::exact(3));
    assert!(check_interval(&d).consistent);
    assert!(brute_force(&d, &d.lower_cardinalities())
        .unwrap()
        .is_empty());
    assert!(enumerate_diagram(&d, &SynthesisConstraints::default())
        .unwrap()
        .is_empty());
}

#[test]
fn zero_degree_motif_admits_the_empty_configuration() {
    let d = parse_diagram("type T(p) 2 motif { T.p : 2 : 0 }").unwrap();
    assert!(check(&d).consistent);
    let all = enumerate_diagram(&d, &SynthesisConstraints::default()).unwrap();
    assert_eq!(all.len(), 1);
    assert!(all[0].configuration.is_empty());
}
