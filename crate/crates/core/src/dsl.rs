//! Surface syntax for action plans.
//!
//! ```text
//! plan theft { agent a; reasons: wants_item(a), can_get_away(a); action: steal(a); }
//! ```
//!
//! A document holds one or more `plan` blocks. Identifiers match
//! `[A-Za-z_][A-Za-z0-9_]*`; keywords are recognised by position, so a
//! predicate may be called `action`. Whitespace (including CRLF line ends)
//! is insignificant. Every reason and the action must be applied to the
//! plan's declared agent variable.

use std::fmt;

use thiserror::Error;

use crate::model::{ActionPlan, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{position}: syntax error: {message}")]
    Syntax { position: Position, message: String },
    #[error("{position}: invalid plan: {message}")]
    Validation { position: Position, message: String },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { position, .. } | ParseError::Validation { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Semi => f.write_str("`;`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: Position,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let position = Position { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokenKind::Ident(ident),
                position,
            });
            continue;
        }
        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ';' => TokenKind::Semi,
            ':' => TokenKind::Colon,
            ',' => TokenKind::Comma,
            other => {
                return Err(ParseError::Syntax {
                    position,
                    message: format!("unexpected character `{}`", other.escape_debug()),
                })
            }
        };
        chars.next();
        column += 1;
        tokens.push(Token { kind, position });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        position: Position { line, column },
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.cursor].clone();
        if token.kind != TokenKind::Eof {
            self.cursor += 1;
        }
        token
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let token = self.peek();
        ParseError::Syntax {
            position: token.position,
            message: format!("expected {expected}, found {}", token.kind),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&kind.to_string()))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if s == word => {
                self.advance();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{word}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Position), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                let position = self.advance().position;
                Ok((s, position))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// `pred ( var )`, checking `var` against the plan's agent variable.
    fn atom(&mut self, agent_var: &str) -> Result<String, ParseError> {
        let (predicate, _) = self.ident("a predicate name")?;
        self.expect(TokenKind::LParen)?;
        let (var, position) = self.ident("an agent variable")?;
        self.expect(TokenKind::RParen)?;
        if var != agent_var {
            return Err(ParseError::Validation {
                position,
                message: format!(
                    "`{predicate}` is applied to `{var}` but the plan's agent variable is `{agent_var}`"
                ),
            });
        }
        Ok(predicate)
    }

    fn plan(&mut self) -> Result<ActionPlan, ParseError> {
        self.keyword("plan")?;
        let (name, name_position) = self.ident("a plan name")?;
        self.expect(TokenKind::LBrace)?;
        self.keyword("agent")?;
        let (agent_var, _) = self.ident("an agent variable")?;
        self.expect(TokenKind::Semi)?;

        self.keyword("reasons")?;
        self.expect(TokenKind::Colon)?;
        let mut reasons = Vec::new();
        if self.peek().kind == TokenKind::Semi {
            return Err(ParseError::Validation {
                position: self.peek().position,
                message: "reasons list is empty; a plan needs at least one reason".to_string(),
            });
        }
        loop {
            let position = self.peek().position;
            let reason = self.atom(&agent_var)?;
            if reasons.contains(&reason) {
                return Err(ParseError::Validation {
                    position,
                    message: format!("reason `{reason}` is listed more than once"),
                });
            }
            reasons.push(reason);
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;

        self.keyword("action")?;
        self.expect(TokenKind::Colon)?;
        let action = self.atom(&agent_var)?;
        self.expect(TokenKind::Semi)?;
        self.expect(TokenKind::RBrace)?;

        ActionPlan::new(name, agent_var, reasons, action).map_err(|e: ModelError| {
            ParseError::Validation {
                position: name_position,
                message: e.to_string(),
            }
        })
    }
}

/// Parses a document holding one or more plan blocks.
pub fn parse_plans(src: &str) -> Result<Vec<ActionPlan>, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(src)?,
        cursor: 0,
    };
    let mut plans = vec![parser.plan()?];
    while parser.peek().kind != TokenKind::Eof {
        let position = parser.peek().position;
        let plan = parser.plan()?;
        if plans.iter().any(|p| p.name() == plan.name()) {
            return Err(ParseError::Validation {
                position,
                message: format!("plan `{}` is defined more than once", plan.name()),
            });
        }
        plans.push(plan);
    }
    Ok(plans)
}

/// Parses a document holding exactly one plan block.
pub fn parse_plan(src: &str) -> Result<ActionPlan, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(src)?,
        cursor: 0,
    };
    let plan = parser.plan()?;
    if parser.peek().kind != TokenKind::Eof {
        return Err(parser.unexpected("end of input"));
    }
    Ok(plan)
}

/// Canonical one-line rendering, terminated by LF.
pub fn print_plan(plan: &ActionPlan) -> String {
    let var = plan.agent_var();
    let reasons = plan
        .reasons()
        .iter()
        .map(|r| format!("{r}({var})"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "plan {} {{ agent {var}; reasons: {reasons}; action: {}({var}); }}\n",
        plan.name(),
        plan.action()
    )
}

pub fn print_plans(plans: &[ActionPlan]) -> String {
    plans.iter().map(print_plan).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const THEFT: &str =
        "plan theft { agent a; reasons: wants_item(a), can_get_away(a); action: steal(a); }\n";

    #[test]
    fn parses_the_theft_plan() {
        let plan = parse_plan(THEFT).unwrap();
        assert_eq!(plan.name(), "theft");
        assert_eq!(plan.agent_var(), "a");
        assert_eq!(plan.reasons(), ["wants_item", "can_get_away"]);
        assert_eq!(plan.action(), "steal");
        assert_eq!(print_plan(&plan), THEFT);
    }

    #[test]
    fn empty_reasons_is_a_validation_error() {
        let err = parse_plan("plan p { agent a; reasons: ; action: act(a); }").unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
        assert_eq!(err.position(), Position { line: 1, column: 28 });
    }

    #[test]
    fn variable_mismatch_is_a_validation_error() {
        let err = parse_plan("plan p {\n  agent a;\n  reasons: r(b);\n  action: act(a);\n}")
            .unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
        assert_eq!(err.position(), Position { line: 3, column: 14 });
        let err = parse_plan("plan p { agent a; reasons: r(a); action: act(x); }").unwrap_err();
        assert!(matches!(err, ParseError::Validation { .. }));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_plan("plan p { agent a reasons: r(a); action: act(a); }").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                position: Position { line: 1, column: 18 },
                message: "expected `;`, found `reasons`".into()
            }
        );
        let err = parse_plan("plan p { agent a; reasons: r(a, b); action: act(a); }").unwrap_err();
        assert_eq!(err.position(), Position { line: 1, column: 31 });
        let err = parse_plan("plan p { agent a; reasons: r(a); action: act(a); ").unwrap_err();
        assert!(err.to_string().contains("end of input"));
        let err = parse_plan("plan p { agent a; reasons: r(a) & q(a); action: act(a); }").unwrap_err();
        assert_eq!(err.position(), Position { line: 1, column: 33 });
    }

    #[test]
    fn crlf_input_is_accepted() {
        let src = "plan p {\r\n  agent a;\r\n  reasons: r(a);\r\n  action: act(a);\r\n}\r\n";
        let plan = parse_plan(src).unwrap();
        assert_eq!(print_plan(&plan), "plan p { agent a; reasons: r(a); action: act(a); }\n");
        let err = parse_plan("plan p {\r\n  agent a\r\n  reasons: r(a);").unwrap_err();
        assert_eq!(err.position(), Position { line: 3, column: 3 });
    }

    #[test]
    fn single_reason_has_no_trailing_comma() {
        let plan = ActionPlan::new("p", "x", vec!["r".into()], "act").unwrap();
        assert_eq!(print_plan(&plan), "plan p { agent x; reasons: r(x); action: act(x); }\n");
    }

    #[test]
    fn reason_order_is_preserved() {
        let a = ActionPlan::new("p", "x", vec!["r".into(), "s".into()], "act").unwrap();
        let b = ActionPlan::new("p", "x", vec!["s".into(), "r".into()], "act").unwrap();
        assert_ne!(print_plan(&a), print_plan(&b));
        assert_ne!(parse_plan(&print_plan(&a)).unwrap(), b);
    }

    #[test]
    fn multiple_plans() {
        let src = format!("{THEFT}plan buy {{ agent b; reasons: wants_item(b); action: pay(b); }}");
        let plans = parse_plans(&src).unwrap();
        assert_eq!(plans.len(), 2);
        assert_eq!(print_plans(&plans), format!("{THEFT}plan buy {{ agent b; reasons: wants_item(b); action: pay(b); }}\n"));
        let err = parse_plan(&src).unwrap_err();
        assert_eq!(err.position(), Position { line: 2, column: 1 });
        let dup = format!("{THEFT}{THEFT}");
        assert!(matches!(parse_plans(&dup), Err(ParseError::Validation { .. })));
    }

    #[test]
    fn keywords_are_positional() {
        let plan = parse_plan("plan plan { agent agent; reasons: reasons(agent); action: action(agent); }").unwrap();
        assert_eq!(parse_plan(&print_plan(&plan)).unwrap(), plan);
    }

    fn ident() -> impl Strategy<Value = String> {
        "[A-Za-z_][A-Za-z0-9_]{0,8}"
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(
            name in ident(),
            var in ident(),
            reasons in prop::collection::btree_set(ident(), 1..5),
            action in ident(),
        ) {
            let plan = ActionPlan::new(name, var, reasons.into_iter().collect(), action).unwrap();
            prop_assert_eq!(parse_plan(&print_plan(&plan)).unwrap(), plan);
        }

        #[test]
        fn parser_never_panics(src in "[a-z(){};:, \n]{0,60}") {
            let _ = parse_plans(&src);
        }
    }
}
