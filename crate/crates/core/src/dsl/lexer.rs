use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Int(u32),
    Sym(char),
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: &str = "{}()[],:.;";

pub(super) fn tokenize(text: &str, file: Option<&str>) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    let span = |line, column| SourceSpan {
        file: file.map(str::to_owned),
        line,
        column,
    };

    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '#' {
                    s.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                column: col,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
                column += 1;
            }
            let n = s.parse().map_err(|_| ParseError {
                span: span(l, col),
                message: format!("integer `{s}` out of range"),
                violations: Vec::new(),
            })?;
            out.push(Token {
                tok: Tok::Int(n),
                line: l,
                column: col,
            });
        } else if SYMBOLS.contains(c) {
            chars.next();
            column += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: l,
                column: col,
            });
        } else {
            return Err(ParseError {
                span: span(l, col),
                message: format!("unexpected character `{c}`"),
                violations: Vec::new(),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_inside_identifier_and_comments() {
        let toks = tokenize("T#1.p # note\n  x", None).unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("T#1".into()),
                Tok::Sym('.'),
                Tok::Ident("p".into()),
                Tok::Ident("x".into()),
                Tok::Eof
            ]
        );
        assert_eq!((toks[3].line, toks[3].column), (2, 3));
    }

    #[test]
    fn bad_character() {
        let e = tokenize("type T(p) 1\n  @", Some("f.archd")).unwrap_err();
        assert_eq!(e.span.to_string(), "f.archd:2:3");
    }
}
