//! Step-budgeted interpreter.
//!
//! Every executed statement and every evaluated expression node costs one
//! step. Integers are 64-bit with wrapping arithmetic; division or modulo by
//! zero, shifts outside `0..64`, type mismatches, reads of unset variables and
//! call depth beyond [`MAX_CALL_DEPTH`] end the run with [`RunOutcome::Error`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{BinaryOp, Expr, Function, Program, Stmt, UnaryOp};
use super::TestCase;

pub const DEFAULT_STEP_LIMIT: u64 = 100_000;
pub const MAX_CALL_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RunOutcome {
    Pass,
    /// An assertion evaluated to `false`.
    Fail,
    /// A runtime error such as division by zero.
    Error,
    /// The step budget ran out.
    Timeout,
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunOutcome::Pass => "PASS",
            RunOutcome::Fail => "FAIL",
            RunOutcome::Error => "ERROR",
            RunOutcome::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Unit,
}

enum Halt {
    Fail,
    Error,
    Timeout,
}

enum Flow {
    Next,
    Return(Value),
}

type Exec<T> = Result<T, Halt>;

struct Machine<'p> {
    functions: HashMap<&'p str, &'p Function>,
    steps: u64,
    limit: u64,
    depth: usize,
}

type Frame<'p> = HashMap<&'p str, Value>;

impl<'p> Machine<'p> {
    fn tick(&mut self) -> Exec<()> {
        self.steps += 1;
        if self.steps > self.limit {
            Err(Halt::Timeout)
        } else {
            Ok(())
        }
    }

    fn block(&mut self, body: &'p [Stmt], frame: &mut Frame<'p>) -> Exec<Flow> {
        for s in body {
            if let Flow::Return(v) = self.stmt(s, frame)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Next)
    }

    fn stmt(&mut self, s: &'p Stmt, frame: &mut Frame<'p>) -> Exec<Flow> {
        self.tick()?;
        match s {
            Stmt::Let { name, value } => {
                let v = self.expr(value, frame)?;
                frame.insert(name, v);
            }
            Stmt::Assign { name, value } => {
                let v = self.expr(value, frame)?;
                match frame.get_mut(name.as_str()) {
                    Some(slot) => *slot = v,
                    None => return Err(Halt::Error),
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let branch = if self.condition(cond, frame)? {
                    Some(then_branch)
                } else {
                    else_branch.as_ref()
                };
                if let Some(b) = branch {
                    return self.block(b, frame);
                }
            }
            Stmt::While { cond, body } => {
                while self.condition(cond, frame)? {
                    if let Flow::Return(v) = self.block(body, frame)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            Stmt::Return(e) => return Ok(Flow::Return(self.expr(e, frame)?)),
            Stmt::Expr(e) => {
                self.expr(e, frame)?;
            }
            Stmt::Assert(e) => match self.expr(e, frame)? {
                Value::Bool(true) => {}
                Value::Bool(false) => return Err(Halt::Fail),
                _ => return Err(Halt::Error),
            },
            Stmt::NoOp => {}
        }
        Ok(Flow::Next)
    }

    fn condition(&mut self, e: &'p Expr, frame: &mut Frame<'p>) -> Exec<bool> {
        match self.expr(e, frame)? {
            Value::Bool(b) => Ok(b),
            _ => Err(Halt::Error),
        }
    }

    fn expr(&mut self, e: &'p Expr, frame: &mut Frame<'p>) -> Exec<Value> {
        self.tick()?;
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(name) => *frame.get(name.as_str()).ok_or(Halt::Error)?,
            Expr::Call { name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.expr(a, frame)?);
                }
                self.call(name, values)?
            }
            Expr::Unary { op, operand } => match (op, self.expr(operand, frame)?) {
                (UnaryOp::Neg, Value::Int(v)) => Value::Int(v.wrapping_neg()),
                (UnaryOp::BitNot, Value::Int(v)) => Value::Int(!v),
                (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                _ => return Err(Halt::Error),
            },
            Expr::Binary { op, lhs, rhs } => match op {
                BinaryOp::And => {
                    Value::Bool(self.condition(lhs, frame)? && self.condition(rhs, frame)?)
                }
                BinaryOp::Or => {
                    Value::Bool(self.condition(lhs, frame)? || self.condition(rhs, frame)?)
                }
                _ => {
                    let l = self.expr(lhs, frame)?;
                    let r = self.expr(rhs, frame)?;
                    binary(*op, l, r)?
                }
            },
        })
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> Exec<Value> {
        let f = *self.functions.get(name).ok_or(Halt::Error)?;
        if self.depth >= MAX_CALL_DEPTH {
            return Err(Halt::Error);
        }
        self.depth += 1;
        let mut frame: Frame<'p> = f.params.iter().map(String::as_str).zip(args).collect();
        let flow = self.block(&f.body, &mut frame);
        self.depth -= 1;
        Ok(match flow? {
            Flow::Return(v) => v,
            Flow::Next => Value::Unit,
        })
    }
}

fn binary(op: BinaryOp, l: Value, r: Value) -> Exec<Value> {
    use BinaryOp::*;
    use Value::{Bool, Int};
    Ok(match (op, l, r) {
        (Add, Int(a), Int(b)) => Int(a.wrapping_add(b)),
        (Sub, Int(a), Int(b)) => Int(a.wrapping_sub(b)),
        (Mul, Int(a), Int(b)) => Int(a.wrapping_mul(b)),
        (Div | Rem, Int(_), Int(0)) => return Err(Halt::Error),
        (Div, Int(a), Int(b)) => Int(a.wrapping_div(b)),
        (Rem, Int(a), Int(b)) => Int(a.wrapping_rem(b)),
        (Lt, Int(a), Int(b)) => Bool(a < b),
        (Le, Int(a), Int(b)) => Bool(a <= b),
        (Gt, Int(a), Int(b)) => Bool(a > b),
        (Ge, Int(a), Int(b)) => Bool(a >= b),
        (Eq, Int(a), Int(b)) => Bool(a == b),
        (Ne, Int(a), Int(b)) => Bool(a != b),
        (Eq, Bool(a), Bool(b)) => Bool(a == b),
        (Ne, Bool(a), Bool(b)) => Bool(a != b),
        (BitAnd, Int(a), Int(b)) => Int(a & b),
        (BitOr, Int(a), Int(b)) => Int(a | b),
        (BitXor, Int(a), Int(b)) => Int(a ^ b),
        (BitAnd, Bool(a), Bool(b)) => Bool(a & b),
        (BitOr, Bool(a), Bool(b)) => Bool(a | b),
        (BitXor, Bool(a), Bool(b)) => Bool(a ^ b),
        (Shl | Shr, Int(_), Int(s)) if !(0..64).contains(&s) => return Err(Halt::Error),
        (Shl, Int(a), Int(s)) => Int(a << s),
        (Shr, Int(a), Int(s)) => Int(a >> s),
        _ => return Err(Halt::Error),
    })
}

/// Runs one test against `program` within `step_limit` steps.
pub fn run_test(program: &Program, test: &TestCase, step_limit: u64) -> RunOutcome {
    let mut m = Machine {
        functions: program
            .functions
            .iter()
            .map(|f| (f.name.as_str(), f))
            .collect(),
        steps: 0,
        limit: step_limit.max(1),
        depth: 0,
    };
    let mut frame = Frame::new();
    match m.block(&test.body, &mut frame) {
        Ok(_) => RunOutcome::Pass,
        Err(Halt::Fail) => RunOutcome::Fail,
        Err(Halt::Error) => RunOutcome::Error,
        Err(Halt::Timeout) => RunOutcome::Timeout,
    }
}

/// Calls `name` with integer arguments. `None` if the call does not complete.
pub fn call_function(program: &Program, name: &str, args: &[i64], step_limit: u64) -> Option<Value> {
    let mut m = Machine {
        functions: program
            .functions
            .iter()
            .map(|f| (f.name.as_str(), f))
            .collect(),
        steps: 0,
        limit: step_limit,
        depth: 0,
    };
    m.call(name, args.iter().map(|&a| Value::Int(a)).collect()).ok()
}
