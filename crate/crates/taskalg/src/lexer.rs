//! Tokenizer shared by the model parser and the query parser.
//!
//! `||` is one token whether it means parallel composition or logical or;
//! the parsers pick the meaning from context. `--` starts a line comment.

use std::fmt;

use crate::parser::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Let,
    Main,
    Eps,
    Sigma,
    Phi,
    Until,
    While,
    True,
    False,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Plus,
    Comma,
    Colon,
    Assign,
    PipePipe,
    Pipe,
    AmpAmp,
    Amp,
    Bang,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Arrow,
    Eof,
}

impl Token {
    /// Short human description used in "expected ..." diagnostics.
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Int(i) => format!("integer `{i}`"),
            Token::Str(s) => format!("string {s:?}"),
            Token::Let => "`let`".into(),
            Token::Main => "`main`".into(),
            Token::Eps => "`eps`".into(),
            Token::Sigma => "`sigma`".into(),
            Token::Phi => "`phi`".into(),
            Token::Until => "`until`".into(),
            Token::While => "`while`".into(),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::Semi => "`;`".into(),
            Token::Plus => "`+`".into(),
            Token::Comma => "`,`".into(),
            Token::Colon => "`:`".into(),
            Token::Assign => "`=`".into(),
            Token::PipePipe => "`||`".into(),
            Token::Pipe => "`|`".into(),
            Token::AmpAmp => "`&&`".into(),
            Token::Amp => "`&`".into(),
            Token::Bang => "`!`".into(),
            Token::EqEq => "`==`".into(),
            Token::NotEq => "`!=`".into(),
            Token::Lt => "`<`".into(),
            Token::Le => "`<=`".into(),
            Token::Gt => "`>`".into(),
            Token::Ge => "`>=`".into(),
            Token::Arrow => "`->`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub span: SourceSpan,
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Tokenizes the input, appending an `Eof` token whose span points at the
/// last character so every diagnostic stays within the text.
pub fn lex(text: &str) -> Result<Vec<Spanned>, ParseDiagnostic> {
    let mut scanner = Scanner::new(text);
    let mut tokens = Vec::new();
    let mut last_pos = (1u32, 1u32);

    loop {
        while let Some(c) = scanner.peek() {
            if c.is_whitespace() {
                scanner.bump();
            } else {
                break;
            }
        }
        let (line, column) = (scanner.line, scanner.column);
        let Some(c) = scanner.peek() else {
            break;
        };
        last_pos = (line, column);
        let span1 = SourceSpan {
            line,
            column,
            length: 1,
        };
        let span2 = SourceSpan {
            line,
            column,
            length: 2,
        };

        let spanned = match c {
            '{' => {
                scanner.bump();
                Spanned {
                    token: Token::LBrace,
                    span: span1,
                }
            }
            '}' => {
                scanner.bump();
                Spanned {
                    token: Token::RBrace,
                    span: span1,
                }
            }
            '(' => {
                scanner.bump();
                Spanned {
                    token: Token::LParen,
                    span: span1,
                }
            }
            ')' => {
                scanner.bump();
                Spanned {
                    token: Token::RParen,
                    span: span1,
                }
            }
            '[' => {
                scanner.bump();
                Spanned {
                    token: Token::LBracket,
                    span: span1,
                }
            }
            ']' => {
                scanner.bump();
                Spanned {
                    token: Token::RBracket,
                    span: span1,
                }
            }
            ';' => {
                scanner.bump();
                Spanned {
                    token: Token::Semi,
                    span: span1,
                }
            }
            '+' => {
                scanner.bump();
                Spanned {
                    token: Token::Plus,
                    span: span1,
                }
            }
            ',' => {
                scanner.bump();
                Spanned {
                    token: Token::Comma,
                    span: span1,
                }
            }
            ':' => {
                scanner.bump();
                Spanned {
                    token: Token::Colon,
                    span: span1,
                }
            }
            '|' => {
                scanner.bump();
                if scanner.peek() == Some('|') {
                    scanner.bump();
                    Spanned {
                        token: Token::PipePipe,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Pipe,
                        span: span1,
                    }
                }
            }
            '&' => {
                scanner.bump();
                if scanner.peek() == Some('&') {
                    scanner.bump();
                    Spanned {
                        token: Token::AmpAmp,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Amp,
                        span: span1,
                    }
                }
            }
            '!' => {
                scanner.bump();
                if scanner.peek() == Some('=') {
                    scanner.bump();
                    Spanned {
                        token: Token::NotEq,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Bang,
                        span: span1,
                    }
                }
            }
            '=' => {
                scanner.bump();
                if scanner.peek() == Some('=') {
                    scanner.bump();
                    Spanned {
                        token: Token::EqEq,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Assign,
                        span: span1,
                    }
                }
            }
            '<' => {
                scanner.bump();
                if scanner.peek() == Some('=') {
                    scanner.bump();
                    Spanned {
                        token: Token::Le,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Lt,
                        span: span1,
                    }
                }
            }
            '>' => {
                scanner.bump();
                if scanner.peek() == Some('=') {
                    scanner.bump();
                    Spanned {
                        token: Token::Ge,
                        span: span2,
                    }
                } else {
                    Spanned {
                        token: Token::Gt,
                        span: span1,
                    }
                }
            }
            '-' => {
                scanner.bump();
                match scanner.peek() {
                    Some('-') => {
                        // comment to end of line
                        while let Some(c) = scanner.peek() {
                            if c == '\n' {
                                break;
                            }
                            scanner.bump();
                        }
                        continue;
                    }
                    Some('>') => {
                        scanner.bump();
                        Spanned {
                            token: Token::Arrow,
                            span: span2,
                        }
                    }
                    _ => {
                        return Err(ParseDiagnostic {
                            span: span1,
                            message: "stray `-`; use `--` for comments".into(),
                            expected: vec![],
                        });
                    }
                }
            }
            '"' => {
                scanner.bump();
                let mut content = String::new();
                loop {
                    match scanner.bump() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(ParseDiagnostic {
                                span: span1,
                                message: "unterminated string literal".into(),
                                expected: vec!["`\"`".into()],
                            });
                        }
                        Some(c) => content.push(c),
                    }
                }
                let length = (content.chars().count() + 2) as u32;
                Spanned {
                    token: Token::Str(content),
                    span: SourceSpan {
                        line,
                        column,
                        length,
                    },
                }
            }
            'ε' => {
                scanner.bump();
                Spanned {
                    token: Token::Eps,
                    span: span1,
                }
            }
            'σ' => {
                scanner.bump();
                Spanned {
                    token: Token::Sigma,
                    span: span1,
                }
            }
            'φ' => {
                scanner.bump();
                Spanned {
                    token: Token::Phi,
                    span: span1,
                }
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(c) = scanner.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        scanner.bump();
                    } else {
                        break;
                    }
                }
                let length = digits.len() as u32;
                let value: i64 = digits.parse().map_err(|_| ParseDiagnostic {
                    span: SourceSpan {
                        line,
                        column,
                        length,
                    },
                    message: format!("integer literal `{digits}` out of range"),
                    expected: vec![],
                })?;
                Spanned {
                    token: Token::Int(value),
                    span: SourceSpan {
                        line,
                        column,
                        length,
                    },
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(c) = scanner.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        scanner.bump();
                    } else {
                        break;
                    }
                }
                let length = word.len() as u32;
                let span = SourceSpan {
                    line,
                    column,
                    length,
                };
                let token = match word.as_str() {
                    "let" => Token::Let,
                    "main" => Token::Main,
                    "eps" => Token::Eps,
                    "sigma" => Token::Sigma,
                    "phi" => Token::Phi,
                    "until" => Token::Until,
                    "while" => Token::While,
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word),
                };
                Spanned { token, span }
            }
            other => {
                return Err(ParseDiagnostic {
                    span: span1,
                    message: format!("unexpected character `{other}`"),
                    expected: vec![],
                });
            }
        };
        tokens.push(spanned);
    }

    tokens.push(Spanned {
        token: Token::Eof,
        span: SourceSpan {
            line: last_pos.0,
            column: last_pos.1,
            length: 1,
        },
    });
    Ok(tokens)
}
