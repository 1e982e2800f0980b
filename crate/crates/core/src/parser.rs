//! Text parser for ODE right-hand sides and transformation components.
//!
//! Grammar: identifiers `x`, `u`, `u'` (alias `p`), `u''` (alias `q`);
//! integer and ratio literals; operators `+ - * / ^` with the usual
//! precedence; unary minus; parentheses. `^` takes an integer literal
//! exponent, negative exponents fold into the denominator. Whitespace is
//! ignored. Anything outside the rational class (function names, other
//! identifiers) is rejected.

use crate::expr::{ExprError, JetVar, RationalExpr};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("non-integer exponent at position {pos}: `^` requires an integer literal")]
    NonIntegerExponent { pos: usize },
    #[error("unknown identifier `{name}` at position {pos}: only rational expressions in x, u, u' (p), u'' (q) are supported")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(JetVar),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_tok(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Int(text.parse().unwrap())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let mut primes = 0usize;
                while end < self.src.len() && self.src[end] == b'\'' {
                    primes += 1;
                    end += 1;
                }
                let var = match (name, primes) {
                    ("x", 0) => JetVar::X,
                    ("u", 0) => JetVar::U,
                    ("u", 1) | ("p", 0) => JetVar::P,
                    ("u", 2) | ("q", 0) => JetVar::Q,
                    ("u", _) => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: format!(
                                "u with {primes} primes is not a jet variable (only u' and u'')"
                            ),
                        })
                    }
                    _ => {
                        let mut full = name.to_string();
                        for _ in 0..primes {
                            full.push('\'');
                        }
                        return Err(ParseError::UnknownIdentifier {
                            pos: start,
                            name: full,
                        });
                    }
                };
                self.pos = end;
                Tok::Var(var)
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end_pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end_pos)
    }

    fn expr(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some((_, Tok::Plus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Some((_, Tok::Minus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                Some(&(pos, Tok::Slash)) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|_| ParseError::DivisionByZero { pos })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalExpr, ParseError> {
        if let Some((_, Tok::Minus)) = self.peek() {
            self.bump();
            let inner = self.factor()?;
            return Ok(-&inner);
        }
        let base = self.atom()?;
        if let Some(&(pos, Tok::Caret)) = self.peek() {
            self.bump();
            let e = self.int_exponent()?;
            return base
                .powi(e)
                .map_err(|err| match err {
                    ExprError::DivisionByZero => ParseError::DivisionByZero { pos },
                    _ => ParseError::Syntax {
                        pos,
                        msg: "invalid exponentiation".into(),
                    },
                });
        }
        Ok(base)
    }

    fn int_exponent(&mut self) -> Result<i64, ParseError> {
        let pos = self.here();
        let mut negate = false;
        let mut parens = false;
        if let Some((_, Tok::LParen)) = self.peek() {
            self.bump();
            parens = true;
        }
        if let Some((_, Tok::Minus)) = self.peek() {
            self.bump();
            negate = true;
        }
        let value = match self.bump() {
            Some((p, Tok::Int(n))) => {
                i64::try_from(&n).map_err(|_| ParseError::Syntax {
                    pos: p,
                    msg: "exponent too large".into(),
                })?
            }
            _ => return Err(ParseError::NonIntegerExponent { pos }),
        };
        if parens {
            match self.bump() {
                Some((_, Tok::RParen)) => {}
                _ => return Err(ParseError::NonIntegerExponent { pos }),
            }
        }
        Ok(if negate { -value } else { value })
    }

    fn atom(&mut self) -> Result<RationalExpr, ParseError> {
        match self.bump() {
            Some((_, Tok::Int(n))) => Ok(RationalExpr::from_rational(
                num_rational::BigRational::from_integer(n),
            )),
            Some((_, Tok::Var(v))) => Ok(RationalExpr::var(v)),
            Some((pos, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        pos,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {:?}", tok),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end_pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse a rational expression in the jet variables into canonical form.
pub fn parse(text: &str) -> Result<RationalExpr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_tok()? {
        toks.push(t);
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        end_pos: text.len(),
    };
    let value = parser.expr()?;
    if let Some((pos, tok)) = parser.peek() {
        return Err(ParseError::Syntax {
            pos: *pos,
            msg: format!("trailing input starting with {:?}", tok),
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::JetVar;

    #[test]
    fn parses_paper_right_hand_sides() {
        let f = parse("3*u''^2/(1+u')").unwrap();
        assert_eq!(f, parse("3*q^2/(1+p)").unwrap());
        assert_eq!(f.to_string(), "3*q^2/(1+p)");

        assert!(parse("0").unwrap().is_zero());
        assert_eq!(
            parse("(q^2-p^2)/(q-p)").unwrap(),
            parse("q+p").unwrap()
        );
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(
            parse("  3 * q ^ 2 / ( 1 + p )\t").unwrap(),
            parse("3*q^2/(1+p)").unwrap()
        );
    }

    #[test]
    fn ratio_literals() {
        let f = parse("3/2*q^2/p").unwrap();
        assert_eq!(f.to_string(), "3/2*q^2/(p)");
    }

    #[test]
    fn negative_exponents_fold_into_denominator() {
        assert_eq!(parse("x^-2").unwrap(), parse("1/x^2").unwrap());
        assert_eq!(parse("(1+p)^(-1)").unwrap(), parse("1/(1+p)").unwrap());
    }

    #[test]
    fn unary_minus() {
        let f = parse("-q^2").unwrap();
        assert_eq!(f, -&parse("q^2").unwrap());
        assert_eq!(parse("-1/(x*u)").unwrap().to_string(), "-1/(x*u)");
    }

    #[test]
    fn syntax_error_with_position() {
        match parse("(") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("expected syntax error, got {:?}", other),
        }
        match parse("1 + + 2") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn unknown_identifier_rejected() {
        match parse("sin(x)") {
            Err(ParseError::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "sin");
                assert_eq!(pos, 0);
            }
            other => panic!("expected unknown identifier, got {:?}", other),
        }
        assert!(matches!(
            parse("2*y"),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn non_integer_exponent_rejected() {
        assert!(matches!(
            parse("x^u"),
            Err(ParseError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse("x^(3/2)"),
            Err(ParseError::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn division_by_zero_literal() {
        assert!(matches!(
            parse("1/0"),
            Err(ParseError::DivisionByZero { .. })
        ));
        assert!(matches!(
            parse("1/(q-q)"),
            Err(ParseError::DivisionByZero { .. })
        ));
        assert!(matches!(
            parse("0^-1"),
            Err(ParseError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn too_many_primes() {
        assert!(matches!(parse("u'''"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("x'"),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn aliases_agree() {
        assert_eq!(parse("u'").unwrap(), RationalExpr::var(JetVar::P));
        assert_eq!(parse("u''").unwrap(), RationalExpr::var(JetVar::Q));
    }
}
