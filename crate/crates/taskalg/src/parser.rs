//! Recursive-descent parser for the textual model syntax.
//!
//! Precedence, tightest first: `;`, then `||`, then `+`; all three
//! associate to the right. A guard written after an operand guards that
//! operand; a guard written after `+` guards the operand that follows.
//!
//! ```text
//! model    := def* "main" "=" activity EOF
//! def      := "let" IDENT "=" ( "{" activity "}" | "[" assigns? "]" )
//! activity := sel
//! sel      := par guard? ( "+" guard? sel )?
//! par      := seq ( "||" par )?
//! seq      := atom ( ";" seq )?
//! atom     := "eps" | "sigma" | "phi" | IDENT ( "(" assigns? ")" )?
//!           | "{" activity "}" | "(" activity ")"
//!           | ("until" | "while") guard? "{" activity "}"
//! guard    := "[" expr "]"
//! ```

use std::fmt;

use thiserror::Error;

use crate::ast::{Activity, Assignment, DefBody, Definition, Expr, Guard, Model, RelOp};
use crate::lexer::{lex, Spanned, Token};

/// A location in the source text: 1-based line and column plus the length
/// of the offending token in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// First-error report from the lexer or parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

pub(crate) struct TokenStream {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl TokenStream {
    pub(crate) fn new(tokens: Vec<Spanned>) -> Self {
        TokenStream { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    pub(crate) fn peek_span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    pub(crate) fn bump(&mut self) -> Spanned {
        let spanned = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        spanned
    }

    pub(crate) fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == token {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, token: Token) -> Result<Spanned, ParseDiagnostic> {
        if self.peek() == &token {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[token.describe()]))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<String, ParseDiagnostic> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected(&["identifier".to_string()])),
        }
    }

    pub(crate) fn unexpected(&self, expected: &[String]) -> ParseDiagnostic {
        ParseDiagnostic {
            span: self.peek_span(),
            message: format!(
                "unexpected {}{}",
                self.peek().describe(),
                if expected.is_empty() {
                    String::new()
                } else {
                    format!("; expected {}", expected.join(" or "))
                }
            ),
            expected: expected.to_vec(),
        }
    }
}

/// Parses a whole model file: definitions followed by `main = activity`.
pub fn parse_model(text: &str) -> Result<Model, ParseDiagnostic> {
    let mut ts = TokenStream::new(lex(text)?);
    let mut definitions = Vec::new();
    while ts.peek() == &Token::Let {
        ts.bump();
        let name = ts.expect_ident()?;
        ts.expect(Token::Assign)?;
        let body = match ts.peek() {
            Token::LBrace => {
                ts.bump();
                let activity = parse_sel(&mut ts)?;
                ts.expect(Token::RBrace)?;
                DefBody::Compound(activity)
            }
            Token::LBracket => {
                ts.bump();
                let assigns = parse_assigns(&mut ts, Token::RBracket)?;
                ts.expect(Token::RBracket)?;
                DefBody::Simple(assigns)
            }
            _ => return Err(ts.unexpected(&["`{`".to_string(), "`[`".to_string()])),
        };
        definitions.push(Definition { name, body });
    }
    ts.expect(Token::Main)?;
    ts.expect(Token::Assign)?;
    let main = parse_sel(&mut ts)?;
    ts.expect(Token::Eof)?;
    Ok(Model { definitions, main })
}

/// Parses a bare activity with no surrounding definitions.
pub fn parse_activity(text: &str) -> Result<Activity, ParseDiagnostic> {
    let mut ts = TokenStream::new(lex(text)?);
    let activity = parse_sel(&mut ts)?;
    ts.expect(Token::Eof)?;
    Ok(activity)
}

fn parse_sel(ts: &mut TokenStream) -> Result<Activity, ParseDiagnostic> {
    let left = parse_par(ts)?;
    let left_guard = parse_opt_guard(ts)?;
    if ts.eat(&Token::Plus) {
        let right_guard = parse_opt_guard(ts)?;
        let right = parse_sel(ts)?;
        Ok(Activity::Sel {
            left_guard,
            left: Box::new(left),
            right_guard,
            right: Box::new(right),
        })
    } else if let Some(guard) = left_guard {
        // a trailing guard is only meaningful before `+`
        Err(ParseDiagnostic {
            span: ts.peek_span(),
            message: format!("guard `[{}]` must be followed by `+`", guard.expr),
            expected: vec!["`+`".to_string()],
        })
    } else {
        Ok(left)
    }
}

fn parse_par(ts: &mut TokenStream) -> Result<Activity, ParseDiagnostic> {
    let left = parse_seq(ts)?;
    if ts.eat(&Token::PipePipe) {
        let right = parse_par(ts)?;
        Ok(Activity::Par(Box::new(left), Box::new(right)))
    } else {
        Ok(left)
    }
}

fn parse_seq(ts: &mut TokenStream) -> Result<Activity, ParseDiagnostic> {
    let left = parse_atom(ts)?;
    if ts.eat(&Token::Semi) {
        let right = parse_seq(ts)?;
        Ok(Activity::Seq(Box::new(left), Box::new(right)))
    } else {
        Ok(left)
    }
}

fn parse_atom(ts: &mut TokenStream) -> Result<Activity, ParseDiagnostic> {
    match ts.peek().clone() {
        Token::Eps => {
            ts.bump();
            Ok(Activity::Empty)
        }
        Token::Sigma => {
            ts.bump();
            Ok(Activity::Succeed)
        }
        Token::Phi => {
            ts.bump();
            Ok(Activity::Fail)
        }
        Token::Ident(name) => {
            ts.bump();
            let overrides = if ts.eat(&Token::LParen) {
                let assigns = parse_assigns(ts, Token::RParen)?;
                ts.expect(Token::RParen)?;
                Some(assigns)
            } else {
                None
            };
            Ok(Activity::TaskRef { name, overrides })
        }
        Token::LBrace => {
            ts.bump();
            let inner = parse_sel(ts)?;
            ts.expect(Token::RBrace)?;
            Ok(Activity::Encapsulated(Box::new(inner)))
        }
        Token::LParen => {
            ts.bump();
            let inner = parse_sel(ts)?;
            ts.expect(Token::RParen)?;
            Ok(inner)
        }
        Token::Until | Token::While => {
            let is_until = ts.peek() == &Token::Until;
            ts.bump();
            let guard = parse_opt_guard(ts)?;
            ts.expect(Token::LBrace)?;
            let body = Box::new(parse_sel(ts)?);
            ts.expect(Token::RBrace)?;
            Ok(if is_until {
                Activity::Until { guard, body }
            } else {
                Activity::While { guard, body }
            })
        }
        _ => Err(ts.unexpected(&[
            "`eps`".to_string(),
            "`sigma`".to_string(),
            "`phi`".to_string(),
            "task name".to_string(),
            "`{`".to_string(),
            "`(`".to_string(),
            "`until`".to_string(),
            "`while`".to_string(),
        ])),
    }
}

fn parse_opt_guard(ts: &mut TokenStream) -> Result<Option<Guard>, ParseDiagnostic> {
    if ts.eat(&Token::LBracket) {
        let expr = parse_expr(ts)?;
        ts.expect(Token::RBracket)?;
        Ok(Some(Guard { expr }))
    } else {
        Ok(None)
    }
}

fn parse_assigns(ts: &mut TokenStream, close: Token) -> Result<Vec<Assignment>, ParseDiagnostic> {
    let mut assigns = Vec::new();
    if ts.peek() == &close {
        return Ok(assigns);
    }
    loop {
        let target = ts.expect_ident()?;
        ts.expect(Token::Assign)?;
        let value = parse_expr(ts)?;
        assigns.push(Assignment { target, value });
        if !ts.eat(&Token::Comma) {
            break;
        }
    }
    Ok(assigns)
}

/// Expression grammar, loosest first: `||`, `&&`, `!`, relations, primaries.
/// Shared with the query parser for `state(...)` atoms.
pub(crate) fn parse_expr(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    parse_or(ts)
}

fn parse_or(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    let mut lhs = parse_and(ts)?;
    while ts.eat(&Token::PipePipe) {
        let rhs = parse_and(ts)?;
        lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_and(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    let mut lhs = parse_not(ts)?;
    while ts.eat(&Token::AmpAmp) {
        let rhs = parse_not(ts)?;
        lhs = Expr::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_not(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    if ts.eat(&Token::Bang) {
        Ok(Expr::Not(Box::new(parse_not(ts)?)))
    } else {
        parse_rel(ts)
    }
}

fn parse_rel(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    let lhs = parse_prim(ts)?;
    let op = match ts.peek() {
        Token::EqEq => RelOp::Eq,
        Token::NotEq => RelOp::Ne,
        Token::Lt => RelOp::Lt,
        Token::Le => RelOp::Le,
        Token::Gt => RelOp::Gt,
        Token::Ge => RelOp::Ge,
        _ => return Ok(lhs),
    };
    ts.bump();
    let rhs = parse_prim(ts)?;
    Ok(Expr::Rel {
        op,
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
    })
}

fn parse_prim(ts: &mut TokenStream) -> Result<Expr, ParseDiagnostic> {
    match ts.peek().clone() {
        Token::Int(i) => {
            ts.bump();
            Ok(Expr::Int(i))
        }
        Token::Str(s) => {
            ts.bump();
            Ok(Expr::Str(s))
        }
        Token::True => {
            ts.bump();
            Ok(Expr::Bool(true))
        }
        Token::False => {
            ts.bump();
            Ok(Expr::Bool(false))
        }
        Token::Ident(name) => {
            ts.bump();
            if ts.eat(&Token::LParen) {
                let mut args = Vec::new();
                if ts.peek() != &Token::RParen {
                    loop {
                        args.push(parse_expr(ts)?);
                        if !ts.eat(&Token::Comma) {
                            break;
                        }
                    }
                }
                ts.expect(Token::RParen)?;
                Ok(Expr::Call { callee: name, args })
            } else {
                Ok(Expr::Var(name))
            }
        }
        Token::LParen => {
            ts.bump();
            let inner = parse_expr(ts)?;
            ts.expect(Token::RParen)?;
            Ok(inner)
        }
        _ => Err(ts.unexpected(&[
            "integer".to_string(),
            "string".to_string(),
            "`true`".to_string(),
            "`false`".to_string(),
            "identifier".to_string(),
            "`(`".to_string(),
        ])),
    }
}
