//! The textual query language: `LTL:` or `CTL:` followed by a formula.
//!
//! Atoms: `task(name)`, `succeeded`, `failed`, `assumed(v)`, `assumed(!v)`,
//! `state(expr)`, `true`, `false`. Connectives `! & | ->`; LTL operators
//! `X F G` and infix `U`; CTL operators `EX AX EF AF EG AG`, `E[f U g]`,
//! `A[f U g]`. Precedence: unary, then `U`, `&`, `|`, `->`; implication is
//! right-associative.

use thiserror::Error;

use super::{AtomicProp, CtlFormula, LtlFormula};
use crate::lexer::{lex, Token};
use crate::parser::{parse_expr, ParseDiagnostic, SourceSpan, TokenStream};
use crate::state::check_bool_sorted;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Ltl(LtlFormula),
    Ctl(CtlFormula),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct QueryError {
    pub span: SourceSpan,
    pub message: String,
}

impl From<ParseDiagnostic> for QueryError {
    fn from(diag: ParseDiagnostic) -> Self {
        QueryError {
            span: diag.span,
            message: diag.message,
        }
    }
}

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut ts = TokenStream::new(lex(text)?);
    let mode = match ts.peek().clone() {
        Token::Ident(word) if word == "LTL" || word == "CTL" => {
            ts.bump();
            word
        }
        _ => {
            return Err(QueryError {
                span: ts.peek_span(),
                message: "query must start with `LTL:` or `CTL:`".into(),
            })
        }
    };
    ts.expect(Token::Colon)?;
    let formula = parse_implies(&mut ts, false)?;
    ts.expect(Token::Eof)?;
    if mode == "LTL" {
        Ok(Query::Ltl(to_ltl(formula)?))
    } else {
        Ok(Query::Ctl(to_ctl(formula)?))
    }
}

/// Mode-agnostic surface formula; conversion enforces the LTL/CTL split
/// and points errors at the offending operator.
#[derive(Debug)]
enum Surface {
    Atom(AtomicProp),
    Not(Box<Surface>),
    And(Box<Surface>, Box<Surface>),
    Or(Box<Surface>, Box<Surface>),
    Implies(Box<Surface>, Box<Surface>),
    Unary {
        op: String,
        span: SourceSpan,
        arg: Box<Surface>,
    },
    Until {
        quantifier: Option<char>,
        span: SourceSpan,
        lhs: Box<Surface>,
        rhs: Box<Surface>,
    },
}

const UNARY_OPS: [&str; 9] = ["X", "F", "G", "EX", "AX", "EF", "AF", "EG", "AG"];

// `separator_u` marks that a bare `U` at this level belongs to an
// enclosing `E[.. U ..]` / `A[.. U ..]` and must be left unconsumed.
fn parse_implies(ts: &mut TokenStream, separator_u: bool) -> Result<Surface, QueryError> {
    let lhs = parse_or(ts, separator_u)?;
    if ts.eat(&Token::Arrow) {
        let rhs = parse_implies(ts, separator_u)?;
        Ok(Surface::Implies(Box::new(lhs), Box::new(rhs)))
    } else {
        Ok(lhs)
    }
}

fn parse_or(ts: &mut TokenStream, separator_u: bool) -> Result<Surface, QueryError> {
    let mut lhs = parse_and(ts, separator_u)?;
    while ts.eat(&Token::Pipe) {
        let rhs = parse_and(ts, separator_u)?;
        lhs = Surface::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_and(ts: &mut TokenStream, separator_u: bool) -> Result<Surface, QueryError> {
    let mut lhs = parse_until(ts, separator_u)?;
    while ts.eat(&Token::Amp) {
        let rhs = parse_until(ts, separator_u)?;
        lhs = Surface::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_until(ts: &mut TokenStream, separator_u: bool) -> Result<Surface, QueryError> {
    let lhs = parse_unary(ts)?;
    if !separator_u && matches!(ts.peek(), Token::Ident(w) if w == "U") {
        let span = ts.peek_span();
        ts.bump();
        let rhs = parse_until(ts, false)?;
        return Ok(Surface::Until {
            quantifier: None,
            span,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        });
    }
    Ok(lhs)
}

fn parse_unary(ts: &mut TokenStream) -> Result<Surface, QueryError> {
    if ts.eat(&Token::Bang) {
        return Ok(Surface::Not(Box::new(parse_unary(ts)?)));
    }
    let span = ts.peek_span();
    if let Token::Ident(word) = ts.peek().clone() {
        if UNARY_OPS.contains(&word.as_str()) {
            ts.bump();
            let arg = parse_unary(ts)?;
            return Ok(Surface::Unary {
                op: word,
                span,
                arg: Box::new(arg),
            });
        }
        if word == "E" || word == "A" {
            ts.bump();
            ts.expect(Token::LBracket)?;
            let lhs = parse_implies(ts, true)?;
            match ts.peek().clone() {
                Token::Ident(u) if u == "U" => {
                    ts.bump();
                }
                _ => {
                    return Err(QueryError {
                        span: ts.peek_span(),
                        message: format!("expected `U` inside `{word}[...]`"),
                    })
                }
            }
            let rhs = parse_implies(ts, true)?;
            ts.expect(Token::RBracket)?;
            return Ok(Surface::Until {
                quantifier: Some(word.chars().next().unwrap()),
                span,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            });
        }
    }
    parse_atom(ts)
}

fn parse_atom(ts: &mut TokenStream) -> Result<Surface, QueryError> {
    let span = ts.peek_span();
    match ts.peek().clone() {
        Token::True => {
            ts.bump();
            Ok(Surface::Atom(AtomicProp::Const(true)))
        }
        Token::False => {
            ts.bump();
            Ok(Surface::Atom(AtomicProp::Const(false)))
        }
        Token::LParen => {
            ts.bump();
            // parentheses open a fresh context; a bare U inside them is an
            // ordinary until again
            let inner = parse_implies(ts, false)?;
            ts.expect(Token::RParen)?;
            Ok(inner)
        }
        Token::Ident(word) => match word.as_str() {
            "succeeded" => {
                ts.bump();
                Ok(Surface::Atom(AtomicProp::Succeeded))
            }
            "failed" => {
                ts.bump();
                Ok(Surface::Atom(AtomicProp::Failed))
            }
            "task" => {
                ts.bump();
                ts.expect(Token::LParen)?;
                let name = ts.expect_ident()?;
                ts.expect(Token::RParen)?;
                Ok(Surface::Atom(AtomicProp::Task(name)))
            }
            "assumed" => {
                ts.bump();
                ts.expect(Token::LParen)?;
                let polarity = !ts.eat(&Token::Bang);
                let var = ts.expect_ident()?;
                ts.expect(Token::RParen)?;
                Ok(Surface::Atom(AtomicProp::Assumed { var, polarity }))
            }
            "state" => {
                ts.bump();
                ts.expect(Token::LParen)?;
                let expr = parse_expr(ts)?;
                ts.expect(Token::RParen)?;
                check_bool_sorted(&expr).map_err(|e| QueryError {
                    span,
                    message: e.to_string(),
                })?;
                Ok(Surface::Atom(AtomicProp::State(expr)))
            }
            other => Err(QueryError {
                span,
                message: format!(
                    "unknown atom `{other}`; expected task(..), succeeded, failed, \
                     assumed(..), state(..), true or false"
                ),
            }),
        },
        other => Err(QueryError {
            span,
            message: format!("unexpected {} in query", other.describe()),
        }),
    }
}

fn to_ltl(surface: Surface) -> Result<LtlFormula, QueryError> {
    Ok(match surface {
        Surface::Atom(ap) => LtlFormula::Atom(ap),
        Surface::Not(g) => LtlFormula::Not(Box::new(to_ltl(*g)?)),
        Surface::And(a, b) => LtlFormula::And(Box::new(to_ltl(*a)?), Box::new(to_ltl(*b)?)),
        Surface::Or(a, b) => LtlFormula::Or(Box::new(to_ltl(*a)?), Box::new(to_ltl(*b)?)),
        Surface::Implies(a, b) => LtlFormula::Implies(Box::new(to_ltl(*a)?), Box::new(to_ltl(*b)?)),
        Surface::Unary { op, span, arg } => {
            let arg = Box::new(to_ltl(*arg)?);
            match op.as_str() {
                "X" => LtlFormula::Next(arg),
                "F" => LtlFormula::Finally(arg),
                "G" => LtlFormula::Globally(arg),
                other => {
                    return Err(QueryError {
                        span,
                        message: format!(
                            "path quantifier `{other}` is not allowed in an LTL query"
                        ),
                    })
                }
            }
        }
        Surface::Until {
            quantifier: None,
            lhs,
            rhs,
            ..
        } => LtlFormula::Until(Box::new(to_ltl(*lhs)?), Box::new(to_ltl(*rhs)?)),
        Surface::Until {
            quantifier: Some(q),
            span,
            ..
        } => {
            return Err(QueryError {
                span,
                message: format!("path-quantified `{q}[.. U ..]` is not allowed in an LTL query"),
            })
        }
    })
}

fn to_ctl(surface: Surface) -> Result<CtlFormula, QueryError> {
    Ok(match surface {
        Surface::Atom(ap) => CtlFormula::Atom(ap),
        Surface::Not(g) => CtlFormula::Not(Box::new(to_ctl(*g)?)),
        Surface::And(a, b) => CtlFormula::And(Box::new(to_ctl(*a)?), Box::new(to_ctl(*b)?)),
        Surface::Or(a, b) => CtlFormula::Or(Box::new(to_ctl(*a)?), Box::new(to_ctl(*b)?)),
        Surface::Implies(a, b) => CtlFormula::Implies(Box::new(to_ctl(*a)?), Box::new(to_ctl(*b)?)),
        Surface::Unary { op, span, arg } => {
            let arg = Box::new(to_ctl(*arg)?);
            match op.as_str() {
                "EX" => CtlFormula::Ex(arg),
                "AX" => CtlFormula::Ax(arg),
                "EF" => CtlFormula::Ef(arg),
                "AF" => CtlFormula::Af(arg),
                "EG" => CtlFormula::Eg(arg),
                "AG" => CtlFormula::Ag(arg),
                other => {
                    return Err(QueryError {
                        span,
                        message: format!(
                        "`{other}` needs a path quantifier in a CTL query (EX, AX, EF, AF, EG, AG)"
                    ),
                    })
                }
            }
        }
        Surface::Until {
            quantifier: Some('E'),
            lhs,
            rhs,
            ..
        } => CtlFormula::Eu(Box::new(to_ctl(*lhs)?), Box::new(to_ctl(*rhs)?)),
        Surface::Until {
            quantifier: Some(_),
            lhs,
            rhs,
            ..
        } => CtlFormula::Au(Box::new(to_ctl(*lhs)?), Box::new(to_ctl(*rhs)?)),
        Surface::Until {
            quantifier: None,
            span,
            ..
        } => {
            return Err(QueryError {
                span,
                message: "bare `U` is not allowed in a CTL query; use E[f U g] or A[f U g]".into(),
            })
        }
    })
}
