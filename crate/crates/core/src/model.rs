//! Domain types shared by every other module.
//!
//! A [`Diagram`] describes an architecture style: component types with a
//! cardinality interval, plus a list of [`ConnectorMotif`]s. Each motif
//! constrains, per generic port, how many instances of the port appear in
//! every connector (multiplicity) and in how many connectors every instance
//! takes part (degree). An [`Architecture`] is a concrete set of components
//! together with a configuration, i.e. a set of [`Connector`]s.
//!
//! Simple diagrams are the special case where every interval is a singleton.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

/// Number of instances chosen for each component type.
pub type Cardinalities = BTreeMap<String, u32>;

/// A configuration is a set of connectors.
pub type Configuration = BTreeSet<Connector>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("zero multiplicity")]
    ZeroMultiplicity,
    #[error("connector must contain at least one port instance")]
    EmptyConnector,
}

/// Single choice (`sc`) or multiple choice (`mc`) interpretation of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChoiceKind {
    Sc,
    Mc,
}

impl fmt::Display for ChoiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChoiceKind::Sc => "sc",
            ChoiceKind::Mc => "mc",
        })
    }
}

/// A multiplicity or degree constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypedInterval {
    pub kind: ChoiceKind,
    pub lo: u32,
    pub hi: u32,
}

impl TypedInterval {
    pub fn sc(lo: u32, hi: u32) -> Self {
        Self {
            kind: ChoiceKind::Sc,
            lo,
            hi,
        }
    }

    pub fn mc(lo: u32, hi: u32) -> Self {
        Self {
            kind: ChoiceKind::Mc,
            lo,
            hi,
        }
    }

    /// The plain integer `k`, which is sugar for `sc[k,k]`.
    pub fn exact(k: u32) -> Self {
        Self::sc(k, k)
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: u32) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn values(&self) -> RangeInclusive<u32> {
        self.lo..=self.hi
    }

    /// Possible outputs of a choice function: the whole interval for `mc`,
    /// one singleton per value for `sc`.
    pub fn choices(&self) -> Vec<(u32, u32)> {
        match self.kind {
            ChoiceKind::Mc => vec![(self.lo, self.hi)],
            ChoiceKind::Sc => self.values().map(|z| (z, z)).collect(),
        }
    }

    pub fn as_interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

impl fmt::Display for TypedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == ChoiceKind::Sc && self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}[{},{}]", self.kind, self.lo, self.hi)
        }
    }
}

/// Untyped interval, used for cardinalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Interval {
    pub lo: u32,
    pub hi: u32,
}

impl Interval {
    pub fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    pub fn exact(k: u32) -> Self {
        Self { lo: k, hi: k }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn values(&self) -> RangeInclusive<u32> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<String>,
    pub cardinality: Interval,
}

impl ComponentType {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        ports: impl IntoIterator<Item = S>,
        cardinality: Interval,
    ) -> Self {
        Self {
            name: name.into(),
            ports: ports.into_iter().map(Into::into).collect(),
            cardinality,
        }
    }

    pub fn has_port(&self, port: &str) -> bool {
        self.ports.iter().any(|p| p == port)
    }
}

/// A generic port, qualified by its component type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GenericPortRef {
    pub type_name: String,
    pub port_name: String,
}

impl GenericPortRef {
    pub fn new(type_name: impl Into<String>, port_name: impl Into<String>) -> Self {
        Self {
            type_name: type_name.into(),
            port_name: port_name.into(),
        }
    }
}

impl fmt::Display for GenericPortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.type_name, self.port_name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PortConstraint {
    pub multiplicity: TypedInterval,
    pub degree: TypedInterval,
}

impl PortConstraint {
    pub fn new(multiplicity: TypedInterval, degree: TypedInterval) -> Self {
        Self {
            multiplicity,
            degree,
        }
    }

    /// Singleton multiplicity and degree, as in simple diagrams.
    pub fn exact(multiplicity: u32, degree: u32) -> Self {
        Self::new(
            TypedInterval::exact(multiplicity),
            TypedInterval::exact(degree),
        )
    }
}

/// A set of generic ports with their multiplicity and degree constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConnectorMotif {
    pub ports: BTreeMap<GenericPortRef, PortConstraint>,
}

impl ConnectorMotif {
    pub fn new(ports: impl IntoIterator<Item = (GenericPortRef, PortConstraint)>) -> Self {
        Self {
            ports: ports.into_iter().collect(),
        }
    }

    pub fn port_set(&self) -> BTreeSet<&GenericPortRef> {
        self.ports.keys().collect()
    }

    pub fn constraint(&self, port: &GenericPortRef) -> Option<&PortConstraint> {
        self.ports.get(port)
    }
}

impl fmt::Display for ConnectorMotif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        for (i, (p, c)) in self.ports.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p} : {} : {}", c.multiplicity, c.degree)?;
        }
        f.write_str(" }")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagram {
    pub name: String,
    pub types: Vec<ComponentType>,
    pub motifs: Vec<ConnectorMotif>,
}

impl Diagram {
    /// Builds a diagram in canonical form (types, ports and motifs sorted).
    pub fn new(
        name: impl Into<String>,
        types: Vec<ComponentType>,
        motifs: Vec<ConnectorMotif>,
    ) -> Self {
        let mut d = Self {
            name: name.into(),
            types,
            motifs,
        };
        d.canonicalize();
        d
    }

    pub fn canonicalize(&mut self) {
        for t in &mut self.types {
            t.ports.sort();
        }
        self.types.sort_by(|a, b| a.name.cmp(&b.name));
        self.motifs.sort();
    }

    pub fn component_type(&self, name: &str) -> Option<&ComponentType> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn cardinality(&self, type_name: &str) -> Option<Interval> {
        self.component_type(type_name).map(|t| t.cardinality)
    }

    pub fn has_port(&self, port: &GenericPortRef) -> bool {
        self.component_type(&port.type_name)
            .is_some_and(|t| t.has_port(&port.port_name))
    }

    /// Every cardinality assignment allowed by the diagram, in lexicographic
    /// order over the canonical type order.
    pub fn cardinality_assignments(&self) -> Vec<Cardinalities> {
        let mut out = vec![Cardinalities::new()];
        for t in &self.types {
            let mut next =
                Vec::with_capacity(out.len() * (t.cardinality.hi - t.cardinality.lo + 1) as usize);
            for partial in &out {
                for n in t.cardinality.values() {
                    let mut c = partial.clone();
                    c.insert(t.name.clone(), n);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Lower bound of every cardinality interval.
    pub fn lower_cardinalities(&self) -> Cardinalities {
        self.types
            .iter()
            .map(|t| (t.name.clone(), t.cardinality.lo))
            .collect()
    }
}

/// Canonical identifier `T#k` of the `k`-th (1-based) instance of type `T`.
pub fn instance_id(type_name: &str, k: usize) -> String {
    format!("{type_name}#{k}")
}

/// Splits a canonical instance identifier into type name and 1-based index.
pub fn split_instance_id(id: &str) -> Option<(&str, usize)> {
    let (ty, k) = id.rsplit_once('#')?;
    let k: usize = k.parse().ok()?;
    (k >= 1 && !ty.is_empty()).then_some((ty, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PortInstance {
    pub component: String,
    pub port: String,
}

impl PortInstance {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Self {
            component: component.into(),
            port: port.into(),
        }
    }
}

impl fmt::Display for PortInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.port)
    }
}

/// A non-empty set of port instances that interact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connector(BTreeSet<PortInstance>);

impl Connector {
    pub fn new(ports: impl IntoIterator<Item = PortInstance>) -> Result<Self, ModelError> {
        let set: BTreeSet<_> = ports.into_iter().collect();
        if set.is_empty() {
            return Err(ModelError::EmptyConnector);
        }
        Ok(Self(set))
    }

    pub fn ports(&self) -> &BTreeSet<PortInstance> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &PortInstance> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &PortInstance) -> bool {
        self.0.contains(p)
    }
}

impl fmt::Display for Connector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Serialize for Connector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|p| p.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Architecture {
    pub name: String,
    /// Name of the diagram the architecture is written against.
    pub diagram: String,
    /// Component id to component type name.
    pub components: BTreeMap<String, String>,
    pub configuration: Configuration,
}

impl Architecture {
    /// Architecture whose components are the canonical instances `T#1..T#n`
    /// of every type in `cards`.
    pub fn with_instances(
        name: impl Into<String>,
        diagram: impl Into<String>,
        cards: &Cardinalities,
        configuration: Configuration,
    ) -> Self {
        let components = cards
            .iter()
            .flat_map(|(t, &n)| (1..=n as usize).map(move |k| (instance_id(t, k), t.clone())))
            .collect();
        Self {
            name: name.into(),
            diagram: diagram.into(),
            components,
            configuration,
        }
    }

    pub fn type_of(&self, component: &str) -> Option<&str> {
        self.components.get(component).map(String::as_str)
    }

    /// Generic port of a port instance, if the component is known.
    pub fn generic(&self, p: &PortInstance) -> Option<GenericPortRef> {
        self.type_of(&p.component)
            .map(|t| GenericPortRef::new(t, p.port.clone()))
    }

    /// Component ids of a type, in canonical order.
    pub fn instances_of<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.components
            .iter()
            .filter(move |(_, t)| t.as_str() == type_name)
            .map(|(id, _)| id.as_str())
    }

    pub fn count_of(&self, type_name: &str) -> usize {
        self.instances_of(type_name).count()
    }

    /// Ordering key used for canonical output order; ignores names.
    pub fn shape_key(&self) -> (&BTreeMap<String, String>, &Configuration) {
        (&self.components, &self.configuration)
    }

    /// Applies a component renaming to ids and connectors.
    pub fn renamed(&self, rename: &BTreeMap<String, String>) -> Self {
        let map = |id: &String| rename.get(id).cloned().unwrap_or_else(|| id.clone());
        Self {
            name: self.name.clone(),
            diagram: self.diagram.clone(),
            components: self
                .components
                .iter()
                .map(|(id, t)| (map(id), t.clone()))
                .collect(),
            configuration: self
                .configuration
                .iter()
                .map(|c| {
                    Connector(
                        c.iter()
                            .map(|p| PortInstance::new(map(&p.component), p.port.clone()))
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// Name of a validation rule, stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    DuplicateType,
    EmptyPorts,
    DuplicatePort,
    IntervalOrder,
    EmptyMotif,
    UnknownType,
    UnknownPort,
    MultiplicityHiZero,
    MotifDistinguishability,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::DuplicateType => "duplicate-type",
            Rule::EmptyPorts => "empty-ports",
            Rule::DuplicatePort => "duplicate-port",
            Rule::IntervalOrder => "interval-order",
            Rule::EmptyMotif => "empty-motif",
            Rule::UnknownType => "unknown-type",
            Rule::UnknownPort => "unknown-port",
            Rule::MultiplicityHiZero => "multiplicity-hi-zero",
            Rule::MotifDistinguishability => "motif-distinguishability",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    /// Index of the offending motif in `Diagram::motifs`.
    pub motif: Option<usize>,
    pub port: Option<GenericPortRef>,
    pub type_name: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// Checks every structural well-formedness rule of a diagram.
pub fn validate_diagram(d: &Diagram) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push =
        |rule, motif, port: Option<&GenericPortRef>, type_name: Option<&str>, message: String| {
            violations.push(Violation {
                rule,
                motif,
                port: port.cloned(),
                type_name: type_name.map(str::to_owned),
                message,
            })
        };

    let mut seen_types = BTreeSet::new();
    for t in &d.types {
        if !seen_types.insert(t.name.as_str()) {
            push(
                Rule::DuplicateType,
                None,
                None,
                Some(&t.name),
                format!("type `{}` declared twice", t.name),
            );
        }
        if t.ports.is_empty() {
            push(
                Rule::EmptyPorts,
                None,
                None,
                Some(&t.name),
                format!("type `{}` has no ports", t.name),
            );
        }
        let mut seen_ports = BTreeSet::new();
        for p in &t.ports {
            if !seen_ports.insert(p.as_str()) {
                push(
                    Rule::DuplicatePort,
                    None,
                    None,
                    Some(&t.name),
                    format!("port `{}` declared twice in type `{}`", p, t.name),
                );
            }
        }
        if t.cardinality.lo > t.cardinality.hi {
            push(
                Rule::IntervalOrder,
                None,
                None,
                Some(&t.name),
                format!("cardinality of `{}`: interval lo > hi", t.name),
            );
        }
    }

    for (i, motif) in d.motifs.iter().enumerate() {
        if motif.ports.is_empty() {
            push(
                Rule::EmptyMotif,
                Some(i),
                None,
                None,
                "motif must name at least one port".into(),
            );
        }
        for (p, c) in &motif.ports {
            match d.component_type(&p.type_name) {
                None => push(
                    Rule::UnknownType,
                    Some(i),
                    Some(p),
                    Some(&p.type_name),
                    format!("unknown component type `{}`", p.type_name),
                ),
                Some(t) if !t.has_port(&p.port_name) => push(
                    Rule::UnknownPort,
                    Some(i),
                    Some(p),
                    Some(&p.type_name),
                    format!("type `{}` has no port `{}`", p.type_name, p.port_name),
                ),
                Some(_) => {}
            }
            for (what, iv) in [("multiplicity", c.multiplicity), ("degree", c.degree)] {
                if iv.lo > iv.hi {
                    push(
                        Rule::IntervalOrder,
                        Some(i),
                        Some(p),
                        None,
                        format!("{what} of `{p}`: interval lo > hi"),
                    );
                }
            }
            if c.multiplicity.hi == 0 {
                push(
                    Rule::MultiplicityHiZero,
                    Some(i),
                    Some(p),
                    None,
                    format!("multiplicity hi must be >= 1 for `{p}`"),
                );
            }
        }
    }

    for j in 0..d.motifs.len() {
        for i in 0..j {
            let (a, b) = (&d.motifs[i], &d.motifs[j]);
            if a.port_set() != b.port_set() {
                continue;
            }
            let separated = a.ports.iter().any(|(p, ca)| {
                let cb = &b.ports[p];
                ca.multiplicity.hi < cb.multiplicity.lo || cb.multiplicity.hi < ca.multiplicity.lo
            });
            if !separated {
                push(
                    Rule::MotifDistinguishability,
                    Some(j),
                    None,
                    None,
                    format!("motifs {i} and {j} share a port set but no port has disjoint multiplicities"),
                );
            }
        }
    }

    ValidationReport { violations }
}

/// True iff every cardinality, multiplicity and degree interval is a singleton.
pub fn is_simple(d: &Diagram) -> bool {
    d.types.iter().all(|t| t.cardinality.is_singleton())
        && d.motifs.iter().all(|m| {
            m.ports
                .values()
                .all(|c| c.multiplicity.is_singleton() && c.degree.is_singleton())
        })
}

/// Exact matching factor `n·d/m`: the number of connectors in any regular
/// configuration of a port.
pub fn matching_factor(n: u32, m: u32, d: u32) -> Result<Ratio<u64>, ModelError> {
    if m == 0 {
        return Err(ModelError::ZeroMultiplicity);
    }
    Ok(Ratio::new(u64::from(n) * u64::from(d), u64::from(m)))
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}
