use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan, Warning};
use crate::model::{
    validate_diagram, Architecture, ChoiceKind, ComponentType, Connector, ConnectorMotif, Diagram,
    GenericPortRef, Interval, PortConstraint, PortInstance, TypedInterval,
};

/// A parse result together with its warnings.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: Option<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, file: Option<&'a str>) -> Result<Self, ParseError> {
        Ok(Self {
            toks: tokenize(text, file)?,
            pos: 0,
            file,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan {
            file: self.file.map(str::to_owned),
            line: t.line,
            column: t.column,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            span: self.span(),
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.peek().describe())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {}", t.describe()))),
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref t => Err(self.error(format!("expected integer, found {}", t.describe()))),
        }
    }

    fn skip_semicolons(&mut self) {
        while self.is_sym(';') {
            self.bump();
        }
    }

    /// `[a,b]`, checking `a <= b`.
    fn bracket(&mut self) -> Result<(u32, u32), ParseError> {
        let at = self.span();
        self.expect_sym('[')?;
        let lo = self.int()?;
        self.expect_sym(',')?;
        let hi = self.int()?;
        self.expect_sym(']')?;
        if lo > hi {
            return Err(ParseError {
                span: at,
                message: format!("interval lo > hi in [{lo},{hi}]"),
                violations: Vec::new(),
            });
        }
        Ok((lo, hi))
    }

    fn card(&mut self) -> Result<Interval, ParseError> {
        if self.is_sym('[') {
            let (lo, hi) = self.bracket()?;
            Ok(Interval::new(lo, hi))
        } else {
            Ok(Interval::exact(self.int()?))
        }
    }

    fn typed(&mut self) -> Result<TypedInterval, ParseError> {
        let kind = match self.peek() {
            Tok::Int(_) => return Ok(TypedInterval::exact(self.int()?)),
            Tok::Ident(s) if s == "sc" => ChoiceKind::Sc,
            Tok::Ident(s) if s == "mc" => ChoiceKind::Mc,
            t => {
                return Err(self.error(format!(
                    "expected integer, `sc[..]` or `mc[..]`, found {}",
                    t.describe()
                )))
            }
        };
        self.bump();
        let (lo, hi) = self.bracket()?;
        Ok(TypedInterval { kind, lo, hi })
    }

    fn port_ref(&mut self) -> Result<(String, String), ParseError> {
        let a = self.ident()?;
        self.expect_sym('.')?;
        let b = self.ident()?;
        Ok((a, b))
    }

    /// End of the declaration list: `}` when wrapped, else end of input.
    fn expect_close(&mut self, wrapped: bool, decls: &str) -> Result<(), ParseError> {
        self.skip_semicolons();
        let close = if wrapped { Tok::Sym('}') } else { Tok::Eof };
        if *self.peek() != close {
            let what = if wrapped { "`}`" } else { "end of input" };
            return Err(self.error(format!(
                "expected {decls} or {what}, found {}",
                self.peek().describe()
            )));
        }
        self.bump();
        self.skip_semicolons();
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.error(format!("expected end of input, found {}", t.describe()))),
        }
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram, ParseError> {
    parse_diagram_in(text, None)
}

/// Parses and validates a diagram. `file` only labels spans.
pub fn parse_diagram_in(text: &str, file: Option<&str>) -> Result<Diagram, ParseError> {
    let mut p = Parser::new(text, file)?;
    let header = p.span();
    let wrapped = p.is_keyword("diagram");
    let mut name = "unnamed".to_string();
    if wrapped {
        p.bump();
        name = p.ident()?;
        p.expect_sym('{')?;
    }

    let mut types = Vec::new();
    let mut type_spans = Vec::new();
    let mut motifs = Vec::new();
    let mut motif_spans: Vec<(SourceSpan, BTreeMap<GenericPortRef, SourceSpan>)> = Vec::new();
    loop {
        p.skip_semicolons();
        if p.is_keyword("type") {
            type_spans.push(p.span());
            p.bump();
            let tname = p.ident()?;
            p.expect_sym('(')?;
            let mut ports = vec![p.ident()?];
            while p.is_sym(',') {
                p.bump();
                ports.push(p.ident()?);
            }
            p.expect_sym(')')?;
            let card = p.card()?;
            types.push(ComponentType::new(tname, ports, card));
        } else if p.is_keyword("motif") {
            let at = p.span();
            p.bump();
            p.expect_sym('{')?;
            let mut ports = BTreeMap::new();
            let mut spans = BTreeMap::new();
            if !p.is_sym('}') {
                loop {
                    let pspan = p.span();
                    let (t, port) = p.port_ref()?;
                    p.expect_sym(':')?;
                    let m = p.typed()?;
                    p.expect_sym(':')?;
                    let d = p.typed()?;
                    let g = GenericPortRef::new(t, port);
                    if ports.insert(g.clone(), PortConstraint::new(m, d)).is_some() {
                        return Err(ParseError {
                            span: pspan,
                            message: format!("port `{g}` appears twice in motif"),
                            violations: Vec::new(),
                        });
                    }
                    spans.insert(g, pspan);
                    if !p.is_sym(',') {
                        break;
                    }
                    p.bump();
                }
            }
            p.expect_sym('}')?;
            motifs.push(ConnectorMotif { ports });
            motif_spans.push((at, spans));
        } else {
            break;
        }
    }
    p.expect_close(wrapped, "`type`, `motif`")?;

    let raw = Diagram {
        name: name.clone(),
        types,
        motifs,
    };
    let report = validate_diagram(&raw);
    if let Some(v) = report.violations.first() {
        let span = match (v.motif, &v.port, &v.type_name) {
            (Some(i), Some(g), _) => motif_spans[i]
                .1
                .get(g)
                .cloned()
                .unwrap_or(motif_spans[i].0.clone()),
            (Some(i), None, _) => motif_spans[i].0.clone(),
            (None, _, Some(t)) => raw
                .types
                .iter()
                .rposition(|ty| &ty.name == t)
                .map(|k| type_spans[k].clone())
                .unwrap_or(header.clone()),
            _ => header.clone(),
        };
        return Err(ParseError {
            span,
            message: v.message.clone(),
            violations: report.violations,
        });
    }
    Ok(Diagram::new(name, raw.types, raw.motifs))
}

pub fn parse_architecture(text: &str, d: &Diagram) -> Result<Architecture, ParseError> {
    parse_architecture_in(text, d, None).map(|p| p.value)
}

pub fn parse_architecture_with_warnings(
    text: &str,
    d: &Diagram,
) -> Result<Parsed<Architecture>, ParseError> {
    parse_architecture_in(text, d, None)
}

/// Parses an architecture, resolving component types and ports against `d`.
/// Repeated connectors and repeated port instances within a connector
/// collapse, with a warning.
pub fn parse_architecture_in(
    text: &str,
    d: &Diagram,
    file: Option<&str>,
) -> Result<Parsed<Architecture>, ParseError> {
    let mut p = Parser::new(text, file)?;
    let mut warnings = Vec::new();
    let wrapped = p.is_keyword("architecture");
    let mut name = "unnamed".to_string();
    let mut of = d.name.clone();
    if wrapped {
        p.bump();
        name = p.ident()?;
        p.expect_keyword("of")?;
        let at = p.span();
        of = p.ident()?;
        if of != d.name {
            warnings.push(Warning {
                span: at,
                message: format!(
                    "architecture is declared of `{of}` but checked against diagram `{}`",
                    d.name
                ),
            });
        }
        p.expect_sym('{')?;
    }

    let mut components = BTreeMap::new();
    let mut configuration = BTreeSet::new();
    loop {
        p.skip_semicolons();
        if p.is_keyword("component") {
            p.bump();
            let mut ids = vec![(p.span(), p.ident()?)];
            while p.is_sym(',') {
                p.bump();
                ids.push((p.span(), p.ident()?));
            }
            p.expect_sym(':')?;
            let tspan = p.span();
            let t = p.ident()?;
            if d.component_type(&t).is_none() {
                return Err(ParseError {
                    span: tspan,
                    message: format!("unknown component type `{t}`"),
                    violations: Vec::new(),
                });
            }
            for (span, id) in ids {
                if components.insert(id.clone(), t.clone()).is_some() {
                    return Err(ParseError {
                        span,
                        message: format!("component `{id}` declared twice"),
                        violations: Vec::new(),
                    });
                }
            }
        } else if p.is_keyword("connector") {
            let at = p.span();
            p.bump();
            let mut ports = BTreeSet::new();
            loop {
                let span = p.span();
                let (c, port) = p.port_ref()?;
                let Some(t) = components.get(&c) else {
                    return Err(ParseError {
                        span,
                        message: format!("unknown component `{c}`"),
                        violations: Vec::new(),
                    });
                };
                if !d.component_type(t).is_some_and(|ty| ty.has_port(&port)) {
                    return Err(ParseError {
                        span,
                        message: format!("type `{t}` has no port `{port}`"),
                        violations: Vec::new(),
                    });
                }
                let pi = PortInstance::new(c, port);
                if !ports.insert(pi.clone()) {
                    warnings.push(Warning {
                        span,
                        message: format!("port instance `{pi}` repeated in connector"),
                    });
                }
                if !p.is_sym(',') {
                    break;
                }
                p.bump();
            }
            let conn = Connector::new(ports).expect("connector has at least one port");
            if configuration.contains(&conn) {
                warnings.push(Warning {
                    span: at,
                    message: format!("duplicate connector `{conn}`"),
                });
            }
            configuration.insert(conn);
        } else {
            break;
        }
    }
    p.expect_close(wrapped, "`component`, `connector`")?;

    Ok(Parsed {
        value: Architecture {
            name,
            diagram: of,
            components,
            configuration,
        },
        warnings,
    })
}
