//! Recursive descent, lowest to highest precedence:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?        right-associative
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-r^2 = -(r^2)`.

use super::lexer::{Token, TokenKind};
use super::{Ast, BinOp, ExprError, Func};

pub fn parse(tokens: &[Token]) -> Result<Ast, ExprError> {
    let end = tokens.last().map(|t| t.position + t.text.len()).unwrap_or(0);
    let mut p = Parser { tokens, pos: 0, end };
    let ast = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(match t.kind {
            TokenKind::RParen => ExprError::UnbalancedParen { position: t.position },
            _ => ExprError::UnexpectedToken {
                found: t.text.clone(),
                position: t.position,
            },
        });
    }
    Ok(ast)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&'a Token, ExprError> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or(ExprError::UnexpectedEnd { position: self.end })?;
        self.pos += 1;
        Ok(t)
    }

    fn peek_op(&self) -> Option<(char, usize)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                position,
                ..
            }) => Some((*c, *position)),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        while let Some((c @ ('+' | '-'), pos)) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Ast::binary(op, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        while let Some((c @ ('*' | '/'), pos)) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Ast::binary(op, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if let Some(('-', _)) = self.peek_op() {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.primary()?;
        if let Some(('^', pos)) = self.peek_op() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Ast::binary(BinOp::Pow, base, exponent, pos));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Ast, ExprError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Number(v) => Ok(Ast::Const(v)),
            TokenKind::Ident => {
                if matches!(self.peek(), Some(Token { kind: TokenKind::LParen, .. })) {
                    self.call(t)
                } else {
                    Ok(Ast::Var {
                        name: t.text.clone(),
                        pos: t.position,
                    })
                }
            }
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.close_paren(t.position)?;
                Ok(inner)
            }
            TokenKind::RParen => Err(ExprError::UnbalancedParen { position: t.position }),
            _ => Err(ExprError::UnexpectedToken {
                found: t.text.clone(),
                position: t.position,
            }),
        }
    }

    fn close_paren(&mut self, open: usize) -> Result<(), ExprError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ExprError::UnexpectedToken {
                found: t.text.clone(),
                position: t.position,
            }),
            None => Err(ExprError::UnbalancedParen { position: open }),
        }
    }

    fn call(&mut self, name: &Token) -> Result<Ast, ExprError> {
        let func = Func::from_name(&name.text).ok_or_else(|| ExprError::UnknownFunction {
            name: name.text.clone(),
            position: name.position,
        })?;
        let open = self.next()?.position;
        let mut args = vec![self.expr()?];
        while let Some(Token {
            kind: TokenKind::Comma,
            ..
        }) = self.peek()
        {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.close_paren(open)?;
        if args.len() != func.arity() {
            return Err(ExprError::ArityMismatch {
                name: name.text.clone(),
                expected: func.arity(),
                found: args.len(),
                position: name.position,
            });
        }
        Ok(Ast::Call {
            func,
            args,
            pos: name.position,
        })
    }
}
