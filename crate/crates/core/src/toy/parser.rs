//! Recursive-descent parser with name resolution.
//!
//! ```text
//! program   = { function } ;
//! function  = "fn" IDENT "(" [ IDENT { "," IDENT } ] ")" block ;
//! tests     = { "test" IDENT block } ;
//! block     = "{" { stmt } "}" ;
//! stmt      = "let" IDENT "=" expr ";"
//!           | IDENT "=" expr ";"
//!           | "if" expr block [ "else" ( block | if-stmt ) ]
//!           | "while" expr block
//!           | "return" expr ";"            (functions only)
//!           | "assert" expr ";"            (tests only)
//!           | expr ";" ;
//! expr      = or ;  or = and { "||" and } ;  and = bitor { "&&" bitor } ;
//! bitor     = bitxor { "|" bitxor } ;  bitxor = bitand { "^" bitand } ;
//! bitand    = equality { "&" equality } ;
//! equality  = relation { ("==" | "!=") relation } ;
//! relation  = shift { ("<" | "<=" | ">" | ">=") shift } ;
//! shift     = additive { ("<<" | ">>") additive } ;
//! additive  = term { ("+" | "-") term } ;
//! term      = unary { ("*" | "/" | "%") unary } ;
//! unary     = ("-" | "~" | "!") unary | primary ;
//! primary   = INT | "true" | "false" | IDENT [ "(" [ expr { "," expr } ] ")" ] | "(" expr ")" ;
//! ```
//!
//! Variables must be declared (parameter or earlier `let`) before use;
//! calls must name a defined function with matching arity.

use std::collections::{HashMap, HashSet};

use super::ast::{BinaryOp, Expr, Function, Program, Stmt, UnaryOp};
use super::lexer::{tokenize, Pos, Tok, Token};
use super::{LangError, TestCase};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Function,
    Test,
}

struct CallSite {
    name: String,
    arity: usize,
    pos: Pos,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    scope: HashSet<String>,
    calls: Vec<CallSite>,
    context: Context,
}

impl Parser {
    fn new(src: &str) -> Result<Self, LangError> {
        Ok(Self {
            toks: tokenize(src)?,
            at: 0,
            scope: HashSet::new(),
            calls: Vec::new(),
            context: Context::Function,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), LangError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", tok_text(&tok))))
        }
    }

    fn unexpected(&self, wanted: &str) -> LangError {
        LangError::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn ident(&mut self) -> Result<(String, Pos), LangError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn function(&mut self) -> Result<Function, LangError> {
        self.expect(Tok::Fn)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        self.scope.clear();
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let (p, pos) = self.ident()?;
                if !self.scope.insert(p.clone()) {
                    return Err(LangError::syntax(pos, format!("duplicate parameter `{p}`")));
                }
                params.push(p);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        self.context = Context::Function;
        let body = self.block()?;
        Ok(Function { name, params, body })
    }

    fn test_case(&mut self) -> Result<TestCase, LangError> {
        self.expect(Tok::Test)?;
        let (name, _) = self.ident()?;
        self.scope.clear();
        self.context = Context::Test;
        let pos = self.pos();
        let body = self.block()?;
        if !body.iter().any(|s| matches!(s, Stmt::Assert(_))) {
            return Err(LangError::syntax(
                pos,
                format!("test `{name}` has no assertion"),
            ));
        }
        Ok(TestCase { name, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, LangError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        match self.peek().clone() {
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                self.scope.insert(name.clone());
                Ok(Stmt::Let { name, value })
            }
            Tok::If => self.if_stmt(),
            Tok::While => {
                self.bump();
                let cond = self.expr()?;
                let body = self.block()?;
                Ok(Stmt::While { cond, body })
            }
            Tok::Return => {
                let pos = self.pos();
                if self.context == Context::Test {
                    return Err(LangError::syntax(pos, "`return` is not allowed in tests"));
                }
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return(e))
            }
            Tok::Assert => {
                let pos = self.pos();
                if self.context == Context::Function {
                    return Err(LangError::syntax(pos, "`assert` is only allowed in tests"));
                }
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assert(e))
            }
            Tok::Ident(name) if self.toks[self.at + 1].tok == Tok::Assign => {
                let pos = self.pos();
                self.bump();
                self.bump();
                if !self.scope.contains(&name) {
                    return Err(LangError::unresolved(pos, &name));
                }
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign { name, value })
            }
            _ => {
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt, LangError> {
        self.expect(Tok::If)?;
        let cond = self.expr()?;
        let then_branch = self.block()?;
        let else_branch = if self.eat(&Tok::Else) {
            if *self.peek() == Tok::If {
                Some(vec![self.if_stmt()?])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_branch,
            else_branch,
        })
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        self.binary(1)
    }

    fn binary_op(tok: &Tok) -> Option<BinaryOp> {
        Some(match tok {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::Pipe => BinaryOp::BitOr,
            Tok::Caret => BinaryOp::BitXor,
            Tok::Amp => BinaryOp::BitAnd,
            Tok::EqEq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Shl => BinaryOp::Shl,
            Tok::Shr => BinaryOp::Shr,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Percent => BinaryOp::Rem,
            _ => return None,
        })
    }

    /// Precedence climbing over left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        while let Some(op) = Self::binary_op(self.peek()) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        let op = match self.peek() {
            Tok::Minus => UnaryOp::Neg,
            Tok::Tilde => UnaryOp::BitNot,
            Tok::Bang => UnaryOp::Not,
            _ => return self.primary(),
        };
        self.bump();
        Ok(Expr::unary(op, self.unary()?))
    }

    fn primary(&mut self) -> Result<Expr, LangError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(Tok::Comma)?;
                        }
                    }
                    self.calls.push(CallSite {
                        name: name.clone(),
                        arity: args.len(),
                        pos,
                    });
                    Ok(Expr::Call { name, args })
                } else if self.scope.contains(&name) {
                    Ok(Expr::Var(name))
                } else {
                    Err(LangError::unresolved(pos, &name))
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn check_calls(&self, arities: &HashMap<&str, usize>) -> Result<(), LangError> {
        for call in &self.calls {
            match arities.get(call.name.as_str()) {
                None => return Err(LangError::unresolved(call.pos, &call.name)),
                Some(&n) if n != call.arity => {
                    return Err(LangError::syntax(
                        call.pos,
                        format!(
                            "`{}` takes {n} argument(s), {} given",
                            call.name, call.arity
                        ),
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn tok_text(tok: &Tok) -> String {
    let d = tok.describe();
    d.trim_matches('`').to_owned()
}

fn arity_table(program: &Program) -> HashMap<&str, usize> {
    program
        .functions
        .iter()
        .map(|f| (f.name.as_str(), f.params.len()))
        .collect()
}

pub fn parse(src: &str) -> Result<Program, LangError> {
    let mut p = Parser::new(src)?;
    let mut functions: Vec<Function> = Vec::new();
    let mut names = HashSet::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let f = p.function()?;
        if !names.insert(f.name.clone()) {
            return Err(LangError::syntax(
                pos,
                format!("duplicate function `{}`", f.name),
            ));
        }
        functions.push(f);
    }
    let program = Program { functions };
    p.check_calls(&arity_table(&program))?;
    Ok(program)
}

/// Parses a test file against the program whose functions it calls.
pub fn parse_tests(src: &str, program: &Program) -> Result<Vec<TestCase>, LangError> {
    let mut p = Parser::new(src)?;
    let mut tests: Vec<TestCase> = Vec::new();
    let mut names = HashSet::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let t = p.test_case()?;
        if !names.insert(t.name.clone()) {
            return Err(LangError::syntax(pos, format!("duplicate test `{}`", t.name)));
        }
        tests.push(t);
    }
    p.check_calls(&arity_table(program))?;
    Ok(tests)
}
