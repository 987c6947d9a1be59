//! Architecture diagrams: a small language for architecture styles.
//!
//! A diagram names component types with cardinalities and a set of connector
//! motifs. This crate parses diagrams and architectures ([`dsl`]), decides
//! whether a diagram admits any conforming architecture ([`consistency`]),
//! enumerates regular configurations of a port ([`regular`]), synthesizes
//! every conforming architecture at a fixed scale ([`synthesis`]), and checks
//! conformance of a given architecture in polynomial time ([`conformance`]).
//! [`oracle`] is an independent brute-force enumerator used for testing.

pub mod cli;
pub mod conformance;
pub mod consistency;
pub mod dsl;
pub mod model;
pub mod oracle;
mod par;
pub mod regular;
pub mod synthesis;

pub use model::{
    Architecture, Cardinalities, ChoiceKind, ComponentType, Configuration, Connector,
    ConnectorMotif, Diagram, GenericPortRef, Interval, PortConstraint, PortInstance, TypedInterval,
};
