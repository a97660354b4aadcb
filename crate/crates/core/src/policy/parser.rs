//! Recursive-descent parser for policy formulas.
//!
//! ```text
//! expr   := term ("OR" term)*
//! term   := factor ("AND" factor)*
//! factor := ATTR | "(" expr ")"
//! ATTR   := [A-Za-z0-9_:!.-]+
//! ```
//!
//! `AND` and `OR` are case-sensitive keywords; chains associate to the left.

use std::fmt;

use thiserror::Error;

use super::PolicyAst;

pub(super) fn is_attribute_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '!' | '.' | '-')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expected {
    Attribute,
    LeftParen,
    RightParen,
    And,
    Or,
    EndOfInput,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Attribute => "attribute",
            Expected::LeftParen => "'('",
            Expected::RightParen => "')'",
            Expected::And => "AND",
            Expected::Or => "OR",
            Expected::EndOfInput => "end of input",
        })
    }
}

/// Parse failure at a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub position: usize,
    pub expected: Vec<Expected>,
    /// Offending token text; `None` at end of input.
    pub found: Option<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: expected ", self.position)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            write!(f, "{e}")?;
        }
        match &self.found {
            Some(tok) => write!(f, ", found `{tok}`"),
            None => f.write_str(", found end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Attr(String),
    And,
    Or,
    LParen,
    RParen,
    Invalid(char),
    End,
}

impl Token {
    fn text(&self) -> Option<String> {
        match self {
            Token::Attr(a) => Some(a.clone()),
            Token::And => Some("AND".into()),
            Token::Or => Some("OR".into()),
            Token::LParen => Some("(".into()),
            Token::RParen => Some(")".into()),
            Token::Invalid(c) => Some(c.to_string()),
            Token::End => None,
        }
    }
}

fn tokenize(text: &str) -> Vec<(usize, Token)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((pos, Token::LParen));
        } else if c == ')' {
            chars.next();
            out.push((pos, Token::RParen));
        } else if is_attribute_char(c) {
            let mut end = pos;
            while let Some(&(i, c)) = chars.peek() {
                if !is_attribute_char(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let word = &text[pos..end];
            let tok = match word {
                "AND" => Token::And,
                "OR" => Token::Or,
                _ => Token::Attr(word.to_string()),
            };
            out.push((pos, tok));
        } else {
            chars.next();
            out.push((pos, Token::Invalid(c)));
        }
    }
    out.push((text.len(), Token::End));
    out
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &(usize, Token) {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        t
    }

    fn error(&self, expected: Vec<Expected>) -> SyntaxError {
        let (position, tok) = self.peek();
        SyntaxError {
            position: *position,
            expected,
            found: tok.text(),
        }
    }

    /// What may follow a complete factor at the current nesting.
    fn after_factor(&self) -> Vec<Expected> {
        let mut v = vec![Expected::And, Expected::Or];
        v.push(if self.depth > 0 {
            Expected::RightParen
        } else {
            Expected::EndOfInput
        });
        v
    }

    fn expr(&mut self) -> Result<PolicyAst, SyntaxError> {
        let mut node = self.term()?;
        while self.peek().1 == Token::Or {
            self.bump();
            let rhs = self.term()?;
            node = PolicyAst::or(node, rhs);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<PolicyAst, SyntaxError> {
        let mut node = self.factor()?;
        while self.peek().1 == Token::And {
            self.bump();
            let rhs = self.factor()?;
            node = PolicyAst::and(node, rhs);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<PolicyAst, SyntaxError> {
        match &self.peek().1 {
            Token::Attr(a) => {
                let leaf = PolicyAst::Leaf(a.clone());
                self.bump();
                Ok(leaf)
            }
            Token::LParen => {
                self.bump();
                self.depth += 1;
                let inner = self.expr()?;
                if self.peek().1 != Token::RParen {
                    return Err(self.error(self.after_factor()));
                }
                self.bump();
                self.depth -= 1;
                Ok(inner)
            }
            _ => Err(self.error(vec![Expected::Attribute, Expected::LeftParen])),
        }
    }
}

pub fn parse_policy(text: &str) -> Result<PolicyAst, SyntaxError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        cursor: 0,
        depth: 0,
    };
    let ast = parser.expr()?;
    if parser.peek().1 != Token::End {
        return Err(parser.error(parser.after_factor()));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(a: &str) -> PolicyAst {
        PolicyAst::leaf(a)
    }

    #[test]
    fn single_attribute() {
        assert_eq!(parse_policy("A").unwrap(), leaf("A"));
        assert_eq!(parse_policy("  role:admin ").unwrap(), leaf("role:admin"));
    }

    #[test]
    fn and_binds_tighter() {
        assert_eq!(
            parse_policy("A AND B OR C").unwrap(),
            PolicyAst::or(PolicyAst::and(leaf("A"), leaf("B")), leaf("C"))
        );
        assert_eq!(
            parse_policy("A OR B AND C").unwrap(),
            PolicyAst::or(leaf("A"), PolicyAst::and(leaf("B"), leaf("C")))
        );
        assert_eq!(
            parse_policy("(A OR B) AND C").unwrap(),
            PolicyAst::and(PolicyAst::or(leaf("A"), leaf("B")), leaf("C"))
        );
    }

    #[test]
    fn chains_associate_left() {
        assert_eq!(
            parse_policy("A AND B AND C").unwrap(),
            PolicyAst::and(PolicyAst::and(leaf("A"), leaf("B")), leaf("C"))
        );
    }

    #[test]
    fn unterminated_group() {
        let err = parse_policy("A AND (B OR").unwrap_err();
        assert_eq!(err.position, 11);
        assert!(err.expected.contains(&Expected::Attribute));
        assert_eq!(err.found, None);
    }

    #[test]
    fn error_positions() {
        let err = parse_policy("").unwrap_err();
        assert_eq!((err.position, err.found.as_deref()), (0, None));

        let err = parse_policy("A B").unwrap_err();
        assert_eq!(err.position, 2);
        assert_eq!(
            err.expected,
            vec![Expected::And, Expected::Or, Expected::EndOfInput]
        );

        let err = parse_policy("(A OR B").unwrap_err();
        assert_eq!(err.position, 7);
        assert!(err.expected.contains(&Expected::RightParen));

        let err = parse_policy("A AND $x").unwrap_err();
        assert_eq!((err.position, err.found.as_deref()), (6, Some("$")));

        let err = parse_policy("A)").unwrap_err();
        assert_eq!(err.position, 1);

        let err = parse_policy("OR A").unwrap_err();
        assert_eq!(err.position, 0);
        assert_eq!(err.found.as_deref(), Some("OR"));
    }

    #[test]
    fn lowercase_keywords_are_attributes() {
        let err = parse_policy("A and B").unwrap_err();
        assert_eq!(err.position, 2);
        assert_eq!(err.found.as_deref(), Some("and"));
    }

    #[test]
    fn display_round_trips() {
        for text in ["A", "A AND B OR C", "(A OR B) AND (C OR D AND E)"] {
            let ast = parse_policy(text).unwrap();
            assert_eq!(parse_policy(&ast.to_string()).unwrap(), ast);
        }
    }
}
