//! Parser for the textual instance format.
//!
//! The format is UTF-8 and line-oriented; `#` starts a comment that runs to
//! the end of the line:
//!
//! ```text
//! instance <name>
//! var <ident> [aux] ( {<int>(,<int>)*} | <int>..<int> )
//! order <ident> <ident> ...            # optional, exactly once
//! con alldifferent ( <ident>+ )
//! con rel <ident> <op> <ident> [+ <int>]
//! con ext (allowed|forbidden) ( <ident>+ ) { (<int>,...) (; (<int>,...))* }
//! ```

use crate::instance::{
    Constraint, ConstraintKind, ExtPolarity, Instance, RelOp, ValidationError, Variable,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: undeclared variable `{name}`")]
    UndeclaredVariable { line: usize, name: String },
    #[error("line {line}: duplicate `order` line")]
    DuplicateOrder { line: usize },
    #[error("missing `instance <name>` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: ValidationError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    DotDot,
    Plus,
    Op(RelOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
        }
    }
}

fn lex_line(line: usize, text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '{' => {
                toks.push((Tok::LBrace, col));
                i += 1;
            }
            '}' => {
                toks.push((Tok::RBrace, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semi, col));
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '.' => {
                if chars.get(i + 1) == Some(&'.') {
                    toks.push((Tok::DotDot, col));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: "expected `..`".into(),
                    });
                }
            }
            '=' => {
                toks.push((Tok::Op(RelOp::Eq), col));
                i += 1;
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(RelOp::Ne), col));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: "expected `!=`".into(),
                    });
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(RelOp::Le), col));
                    i += 2;
                } else {
                    toks.push((Tok::Op(RelOp::Lt), col));
                    i += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(RelOp::Ge), col));
                    i += 2;
                } else {
                    toks.push((Tok::Op(RelOp::Gt), col));
                    i += 1;
                }
            }
            '-' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: "expected digits after `-`".into(),
                    });
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(parse_int(line, col, &s)?), col));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(parse_int(line, col, &s)?), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(s), col));
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

fn parse_int(line: usize, col: usize, s: &str) -> Result<i64, ParseError> {
    s.parse().map_err(|_| ParseError::Syntax {
        line,
        col,
        msg: format!("integer `{s}` out of range"),
    })
}

/// Cursor over one line's tokens.
struct Line<'a> {
    line: usize,
    toks: &'a [(Tok, usize)],
    pos: usize,
}

impl<'a> Line<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let col = self
            .toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(_, c)| c + 1).unwrap_or(1));
        Err(ParseError::Syntax {
            line: self.line,
            col,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self, what: &str) -> Result<&'a Tok, ParseError> {
        match self.toks.get(self.pos) {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err(format!("expected {what}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let what = tok.describe();
        let got = self.next(&what)?;
        if *got == tok {
            Ok(())
        } else {
            self.pos -= 1;
            self.err(format!("expected {what}, found {}", got.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next(what)? {
            Tok::Ident(s) => Ok(s.clone()),
            other => {
                self.pos -= 1;
                self.err(format!("expected {what}, found {}", other.describe()))
            }
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match self.next("integer")? {
            Tok::Int(v) => Ok(*v),
            other => {
                self.pos -= 1;
                self.err(format!("expected integer, found {}", other.describe()))
            }
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            let (t, col) = &self.toks[self.pos];
            Err(ParseError::Syntax {
                line: self.line,
                col: *col,
                msg: format!("unexpected trailing {}", t.describe()),
            })
        }
    }
}

/// Parses one instance from `text`. Variable declaration order is preserved;
/// without an `order` line the ordering defaults to declaration order.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut name: Option<String> = None;
    let mut variables: Vec<Variable> = Vec::new();
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut ordering: Option<(usize, Vec<usize>)> = None;
    let mut con_lines: Vec<usize> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = lex_line(lineno, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut line = Line {
            line: lineno,
            toks: &toks,
            pos: 0,
        };
        let head = line.ident("directive")?;
        match head.as_str() {
            "instance" => {
                if name.is_some() {
                    return line.err("duplicate `instance` line");
                }
                name = Some(line.ident("instance name")?);
                line.finish()?;
            }
            "var" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader);
                }
                let vname = line.ident("variable name")?;
                let aux = if line.peek() == Some(&Tok::Ident("aux".into()))
                    && line.toks.len() - line.pos > 1
                {
                    line.pos += 1;
                    true
                } else {
                    false
                };
                let domain = parse_domain(&mut line)?;
                line.finish()?;
                if variables.iter().any(|v| v.name == vname) {
                    return Err(ParseError::Invalid {
                        line: lineno,
                        source: ValidationError::DuplicateVariable(vname),
                    });
                }
                if domain.is_empty() {
                    return Err(ParseError::Invalid {
                        line: lineno,
                        source: ValidationError::EmptyDomain(vname),
                    });
                }
                let mut sorted = domain.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != domain.len() {
                    return Err(ParseError::Invalid {
                        line: lineno,
                        source: ValidationError::DuplicateDomainValue(vname),
                    });
                }
                variables.push(Variable {
                    name: vname,
                    domain: sorted,
                    aux,
                });
            }
            "order" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader);
                }
                if ordering.is_some() {
                    return Err(ParseError::DuplicateOrder { line: lineno });
                }
                let mut ord = Vec::new();
                while line.peek().is_some() {
                    let vname = line.ident("variable name")?;
                    let idx = lookup(&variables, &vname, lineno)?;
                    ord.push(idx);
                }
                if ord.is_empty() {
                    return line.err("`order` line lists no variables");
                }
                ordering = Some((lineno, ord));
            }
            "con" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader);
                }
                let con = parse_constraint(&mut line, &variables)?;
                line.finish()?;
                check_constraint(&con, constraints.len(), lineno)?;
                con_lines.push(lineno);
                constraints.push(con);
            }
            other => {
                line.pos -= 1;
                return line.err(format!(
                    "unknown directive `{other}` (expected instance, var, order or con)"
                ));
            }
        }
    }

    let name = name.ok_or(ParseError::MissingHeader)?;
    let order_line = ordering.as_ref().map(|(l, _)| *l);
    Instance::new(name, variables, constraints, ordering.map(|(_, o)| o)).map_err(|source| {
        ParseError::Invalid {
            line: order_line.unwrap_or(0),
            source,
        }
    })
}

fn lookup(variables: &[Variable], name: &str, line: usize) -> Result<usize, ParseError> {
    variables
        .iter()
        .position(|v| v.name == name)
        .ok_or_else(|| ParseError::UndeclaredVariable {
            line,
            name: name.into(),
        })
}

fn parse_domain(line: &mut Line) -> Result<Vec<i64>, ParseError> {
    match line.peek() {
        Some(Tok::LBrace) => {
            line.pos += 1;
            let mut values = vec![line.int()?];
            loop {
                match line.next("`,` or `}`")? {
                    Tok::Comma => values.push(line.int()?),
                    Tok::RBrace => break,
                    other => {
                        line.pos -= 1;
                        return line.err(format!("expected `,` or `}}`, found {}", other.describe()));
                    }
                }
            }
            Ok(values)
        }
        _ => {
            let lo = line.int()?;
            line.expect(Tok::DotDot)?;
            let hi = line.int()?;
            if lo > hi {
                line.pos -= 1;
                return line.err(format!("empty range {lo}..{hi}"));
            }
            Ok((lo..=hi).collect())
        }
    }
}

fn parse_scope(line: &mut Line, variables: &[Variable]) -> Result<Vec<usize>, ParseError> {
    line.expect(Tok::LParen)?;
    let mut scope = Vec::new();
    loop {
        match line.next("variable name or `)`")? {
            Tok::Ident(s) => scope.push(lookup(variables, s, line.line)?),
            Tok::RParen => break,
            other => {
                line.pos -= 1;
                return line.err(format!(
                    "expected variable name or `)`, found {}",
                    other.describe()
                ));
            }
        }
    }
    if scope.is_empty() {
        return line.err("constraint scope is empty");
    }
    Ok(scope)
}

fn parse_constraint(line: &mut Line, variables: &[Variable]) -> Result<Constraint, ParseError> {
    let kind = line.ident("constraint kind")?;
    match kind.as_str() {
        "alldifferent" => {
            let scope = parse_scope(line, variables)?;
            Ok(Constraint {
                kind: ConstraintKind::AllDifferent,
                scope,
            })
        }
        "rel" => {
            let x = line.ident("variable name")?;
            let x = lookup(variables, &x, line.line)?;
            let op = match line.next("relation operator")? {
                Tok::Op(op) => *op,
                other => {
                    line.pos -= 1;
                    return line.err(format!(
                        "expected one of = != < <= > >=, found {}",
                        other.describe()
                    ));
                }
            };
            let y = line.ident("variable name")?;
            let y = lookup(variables, &y, line.line)?;
            let offset = if line.peek() == Some(&Tok::Plus) {
                line.pos += 1;
                line.int()?
            } else {
                0
            };
            Ok(Constraint {
                kind: ConstraintKind::Relation { op, offset },
                scope: vec![x, y],
            })
        }
        "ext" => {
            let pol = match line.ident("`allowed` or `forbidden`")?.as_str() {
                "allowed" => ExtPolarity::Allowed,
                "forbidden" => ExtPolarity::Forbidden,
                other => {
                    line.pos -= 1;
                    return line.err(format!("expected `allowed` or `forbidden`, found `{other}`"));
                }
            };
            let scope = parse_scope(line, variables)?;
            line.expect(Tok::LBrace)?;
            let mut tuples = vec![parse_tuple(line)?];
            loop {
                match line.next("`;` or `}`")? {
                    Tok::Semi => tuples.push(parse_tuple(line)?),
                    Tok::RBrace => break,
                    other => {
                        line.pos -= 1;
                        return line.err(format!("expected `;` or `}}`, found {}", other.describe()));
                    }
                }
            }
            Ok(Constraint {
                kind: ConstraintKind::Extension {
                    polarity: pol,
                    tuples,
                },
                scope,
            })
        }
        other => {
            line.pos -= 1;
            line.err(format!(
                "unknown constraint kind `{other}` (expected alldifferent, rel or ext)"
            ))
        }
    }
}

fn parse_tuple(line: &mut Line) -> Result<Vec<i64>, ParseError> {
    line.expect(Tok::LParen)?;
    let mut t = vec![line.int()?];
    loop {
        match line.next("`,` or `)`")? {
            Tok::Comma => t.push(line.int()?),
            Tok::RParen => break,
            other => {
                line.pos -= 1;
                return line.err(format!("expected `,` or `)`, found {}", other.describe()));
            }
        }
    }
    Ok(t)
}

/// Per-line constraint checks so errors carry the offending line number;
/// `Instance::new` re-validates globally.
fn check_constraint(c: &Constraint, index: usize, line: usize) -> Result<(), ParseError> {
    let mut seen = std::collections::HashSet::new();
    for &v in &c.scope {
        if !seen.insert(v) {
            return Err(ParseError::Invalid {
                line,
                source: ValidationError::RepeatedScopeVariable(index),
            });
        }
    }
    match &c.kind {
        ConstraintKind::AllDifferent if c.scope.len() < 2 => Err(ParseError::Invalid {
            line,
            source: ValidationError::AllDifferentArity(index),
        }),
        ConstraintKind::Extension { tuples, .. } => {
            for t in tuples {
                if t.len() != c.scope.len() {
                    return Err(ParseError::Invalid {
                        line,
                        source: ValidationError::TupleLength {
                            index,
                            got: t.len(),
                            expected: c.scope.len(),
                        },
                    });
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance() {
        let inst =
            parse_instance("instance t\nvar x {0,1}\nvar y {0,1}\ncon alldifferent (x y)").unwrap();
        assert_eq!(inst.name, "t");
        assert_eq!(inst.variables.len(), 2);
        assert_eq!(inst.constraints.len(), 1);
        // no `order` line: declaration order
        assert_eq!(inst.ordering, vec![0, 1]);
    }

    #[test]
    fn range_domain_expands() {
        let inst = parse_instance("instance t\nvar x 1..3").unwrap();
        assert_eq!(inst.variables[0].domain, vec![1, 2, 3]);
    }

    #[test]
    fn alldifferent_unary_rejected() {
        let err = parse_instance("instance t\nvar x {0,1}\ncon alldifferent (x)").unwrap_err();
        assert_eq!(
            err,
            ParseError::Invalid {
                line: 3,
                source: ValidationError::AllDifferentArity(0)
            }
        );
    }

    #[test]
    fn aux_flag_and_comments() {
        let text = "# header comment\ninstance t\nvar a aux {0}  # trailing\nvar b 0..1\n";
        let inst = parse_instance(text).unwrap();
        assert!(inst.variables[0].aux);
        assert!(!inst.variables[1].aux);
    }

    #[test]
    fn rel_with_offset() {
        let inst =
            parse_instance("instance t\nvar x 0..9\nvar y 0..9\ncon rel x <= y + -2").unwrap();
        match &inst.constraints[0].kind {
            ConstraintKind::Relation { op, offset } => {
                assert_eq!(*op, RelOp::Le);
                assert_eq!(*offset, -2);
            }
            other => panic!("unexpected kind {other:?}"),
        }
    }

    #[test]
    fn ext_tuples() {
        let text = "instance t\nvar x {0,1}\nvar y {0,1}\ncon ext forbidden ( x y ) { (0,0) ; (1,1) }";
        let inst = parse_instance(text).unwrap();
        match &inst.constraints[0].kind {
            ConstraintKind::Extension { polarity, tuples } => {
                assert_eq!(*polarity, ExtPolarity::Forbidden);
                assert_eq!(tuples, &vec![vec![0, 0], vec![1, 1]]);
            }
            other => panic!("unexpected kind {other:?}"),
        }
    }

    #[test]
    fn order_line_applies() {
        let text = "instance t\nvar x {0}\nvar y {0}\norder y x";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.ordering, vec![1, 0]);
    }

    #[test]
    fn order_not_permutation() {
        let text = "instance t\nvar x {0}\nvar y {0}\norder x x";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(
            err,
            ParseError::Invalid {
                line: 4,
                source: ValidationError::BadOrdering
            }
        );
    }

    #[test]
    fn undeclared_variable_in_scope() {
        let err = parse_instance("instance t\nvar x {0,1}\ncon alldifferent (x z)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredVariable {
                line: 3,
                name: "z".into()
            }
        );
    }

    #[test]
    fn duplicate_variable_name() {
        let err = parse_instance("instance t\nvar x {0}\nvar x {1}").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { line: 3, .. }));
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_instance("instance t\nvar x {0,}").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn render_round_trips() {
        let text = concat!(
            "instance rt\n",
            "var a {0,1,2}\n",
            "var b aux 5..7\n",
            "var c {-3,9}\n",
            "order c a b\n",
            "con alldifferent ( a b )\n",
            "con rel a < c + 4\n",
            "con ext allowed ( b c ) { (5,-3) ; (6,9) }\n",
        );
        let inst = parse_instance(text).unwrap();
        let rendered = inst.render();
        let reparsed = parse_instance(&rendered).unwrap();
        assert_eq!(inst, reparsed);
    }
}
