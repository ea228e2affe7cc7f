//! Element expressions such as `x[5,0]*x[1,0] - x[3,0]^2`, `2/3*z + y4`.
//!
//! ```text
//! expr   := ["+" | "-"] term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ["^" nat]
//! atom   := int ["/" int] | "x[" ordinal "," nat "]" | "z" | "y" nat | "(" expr ")"
//! ```

use num_bigint::BigInt;

use super::field::Field;
use super::poly::{Poly, VarId};
use super::PolyError;
use crate::ordinals::Ordinal;

/// A variable reference as written in an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarToken {
    /// `x[beta,stage]`
    X { beta: Ordinal, stage: u32 },
    Z,
    /// `y<id>`: a registry handle
    Y(u32),
}

/// Parses `text`, mapping each variable token through `resolve`.
pub fn parse_poly<R>(text: &str, field: Field, mut resolve: R) -> Result<Poly, PolyError>
where
    R: FnMut(&VarToken) -> Result<VarId, String>,
{
    let mut p = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
        field,
        resolve: &mut resolve,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return p.error("unexpected trailing input");
    }
    Ok(out)
}

struct Parser<'a, R> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    field: Field,
    resolve: &'a mut R,
}

impl<R> Parser<'_, R>
where
    R: FnMut(&VarToken) -> Result<VarId, String>,
{
    fn error<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&str, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected digits");
        }
        Ok(&self.text[start..self.pos])
    }

    fn small_nat(&mut self) -> Result<u32, PolyError> {
        let at = self.pos;
        let d = self.digits()?;
        d.parse::<u32>().map_err(|_| PolyError::Parse {
            position: at,
            message: "number too large".into(),
        })
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.small_nat()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn variable(&mut self, token: VarToken, at: usize) -> Result<Poly, PolyError> {
        match (self.resolve)(&token) {
            Ok(v) => Ok(Poly::var(self.field, v)),
            Err(message) => Err(PolyError::Parse { position: at, message }),
        }
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n: BigInt = self.digits()?.parse().expect("digits");
                let d: BigInt = if self.eat(b'/') {
                    self.digits()?.parse().expect("digits")
                } else {
                    BigInt::from(1)
                };
                match self.field.from_ratio(&n, &d) {
                    Ok(c) => Ok(Poly::constant(self.field, c)),
                    Err(_) => Err(PolyError::Parse {
                        position: at,
                        message: format!("{n}/{d} is not defined in {}", self.field.name()),
                    }),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.error("expected ')'");
                }
                Ok(inner)
            }
            Some(b'z') => {
                self.pos += 1;
                self.variable(VarToken::Z, at)
            }
            Some(b'y') => {
                self.pos += 1;
                let id = self.small_nat()?;
                self.variable(VarToken::Y(id), at)
            }
            Some(b'x') => {
                self.pos += 1;
                if !self.eat(b'[') {
                    return self.error("expected '[' after 'x'");
                }
                self.skip_ws();
                let start = self.pos;
                let mut depth = 0usize;
                while self.pos < self.src.len() {
                    match self.src[self.pos] {
                        b'(' => depth += 1,
                        b')' => depth = depth.saturating_sub(1),
                        b',' if depth == 0 => break,
                        b']' if depth == 0 => break,
                        _ => {}
                    }
                    self.pos += 1;
                }
                let beta = Ordinal::parse(&self.text[start..self.pos]).map_err(|e| PolyError::Parse {
                    position: start + e.position,
                    message: e.message,
                })?;
                if !self.eat(b',') {
                    return self.error("expected ',' in generator subscript");
                }
                let stage = self.small_nat()?;
                if !self.eat(b']') {
                    return self.error("expected ']'");
                }
                self.variable(VarToken::X { beta, stage }, at)
            }
            Some(_) => self.error("expected a number, variable or '('"),
            None => self.error("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_with_table(text: &str, field: Field) -> (Result<Poly, PolyError>, Vec<VarToken>) {
        let mut seen: Vec<VarToken> = Vec::new();
        let r = parse_poly(text, field, |t| {
            if let VarToken::Y(_) = t {
                return Err("unknown handle".into());
            }
            let idx = match seen.iter().position(|s| s == t) {
                Some(i) => i,
                None => {
                    seen.push(t.clone());
                    seen.len() - 1
                }
            };
            Ok(VarId(idx as u32))
        });
        (r, seen)
    }

    #[test]
    fn generator_expressions() {
        let (p, seen) = parse_with_table("x[5,0]*x[1,0] - x[3,0]^2", Field::Rationals);
        let p = p.unwrap();
        assert_eq!(seen.len(), 3);
        assert_eq!(p.len(), 2);
        assert_eq!(p.degree(), Some(2));
        let (p, seen) = parse_with_table("x[w*3+2, 4] + 2/3*z", Field::Rationals);
        assert!(p.is_ok());
        assert_eq!(
            seen[0],
            VarToken::X {
                beta: Ordinal::parse("w*3 + 2").unwrap(),
                stage: 4
            }
        );
        assert_eq!(seen[1], VarToken::Z);
    }

    #[test]
    fn arithmetic_is_exact() {
        let (p, _) = parse_with_table("(z + 1)^2 - z^2 - 2*z", Field::Rationals);
        assert!(p.unwrap().is_one());
        let (p, _) = parse_with_table("(z + 1)^2 + z^2 + 1", Field::Prime(2));
        assert!(p.unwrap().is_zero());
    }

    #[test]
    fn errors_are_positioned() {
        let (p, _) = parse_with_table("x[1,0] + y7", Field::Prime(2));
        assert!(matches!(p, Err(PolyError::Parse { position: 9, .. })));
        let (p, _) = parse_with_table("x[1 0]", Field::Prime(2));
        assert!(p.is_err());
        let (p, _) = parse_with_table("1/2", Field::Prime(2));
        assert!(p.is_err());
        let (p, _) = parse_with_table("x[1,0] +", Field::Prime(2));
        assert!(p.is_err());
    }
}
