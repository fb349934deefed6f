//! Mutant generation and application.
//!
//! Nodes are addressed by a child-index path from the program root:
//! `[function, statement, ...]`. Below a statement, child 0 is its
//! expression (or condition); `if` has its then-block at 1 and else-block at
//! 2, `while` its body at 1; block children are statement indices.
//! Binary expressions have children 0 (lhs) and 1 (rhs), unary expressions 0,
//! calls one child per argument.
//!
//! Replacement rules per operator:
//!
//! | op  | rule |
//! |-----|------|
//! | AOR | each of `+ - * / %` → the other four |
//! | ROR | each of `< <= > >= == !=` → the other five |
//! | LOR | each of `& \| ^` → the other two |
//! | SOR | `<<` ↔ `>>` |
//! | COR | `&&`/`\|\|` → the other, left operand, right operand, `true`, `false` |
//! | ORU | unary `-`/`~` → the other, and the bare operand |
//! | LVR | integer → {0, 1, -1} minus itself, plus its negation if non-zero; boolean → negation |
//! | STD | any statement except `return` → no-op |

use std::collections::BTreeSet;

use super::ast::{BinaryOp, Expr, OpClass, Program, Stmt, UnaryOp};
use super::LangError;
use crate::matrix::{MethodId, MutationOperator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replacement {
    Expr(Expr),
    Stmt(Stmt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantInstance {
    pub operator: MutationOperator,
    pub path: Vec<usize>,
    pub original: String,
    pub replacement_text: String,
    pub method: MethodId,
    pub replacement: Replacement,
}

impl MutantInstance {
    /// `original ↦ replacement`.
    pub fn description(&self) -> String {
        format!("{} ↦ {}", self.original, self.replacement_text)
    }

    pub fn apply(&self, program: &Program) -> Result<Program, LangError> {
        let mut mutated = program.clone();
        match (locate(&mut mutated, &self.path), &self.replacement) {
            (Some(Slot::Expr(e)), Replacement::Expr(r)) => *e = r.clone(),
            (Some(Slot::Stmt(s)), Replacement::Stmt(r)) => *s = r.clone(),
            _ => {
                return Err(LangError::Internal(format!(
                    "mutant path {:?} does not address a matching node",
                    self.path
                )))
            }
        }
        Ok(mutated)
    }
}

pub enum Slot<'a> {
    Stmt(&'a mut Stmt),
    Expr(&'a mut Expr),
}

/// Mutable access to the node at `path`.
pub fn locate<'a>(program: &'a mut Program, path: &[usize]) -> Option<Slot<'a>> {
    let (f, rest) = path.split_first()?;
    let func = program.functions.get_mut(*f)?;
    in_block(&mut func.body, rest)
}

fn in_block<'a>(block: &'a mut [Stmt], path: &[usize]) -> Option<Slot<'a>> {
    let (i, rest) = path.split_first()?;
    in_stmt(block.get_mut(*i)?, rest)
}

fn in_stmt<'a>(stmt: &'a mut Stmt, path: &[usize]) -> Option<Slot<'a>> {
    let Some((i, rest)) = path.split_first() else {
        return Some(Slot::Stmt(stmt));
    };
    match (stmt, *i) {
        (
            Stmt::Let { value: e, .. }
            | Stmt::Assign { value: e, .. }
            | Stmt::Return(e)
            | Stmt::Expr(e)
            | Stmt::Assert(e),
            0,
        ) => in_expr(e, rest),
        (Stmt::If { cond, .. } | Stmt::While { cond, .. }, 0) => in_expr(cond, rest),
        (Stmt::If { then_branch: b, .. } | Stmt::While { body: b, .. }, 1) => in_block(b, rest),
        (
            Stmt::If {
                else_branch: Some(b),
                ..
            },
            2,
        ) => in_block(b, rest),
        _ => None,
    }
}

fn in_expr<'a>(expr: &'a mut Expr, path: &[usize]) -> Option<Slot<'a>> {
    let Some((i, rest)) = path.split_first() else {
        return Some(Slot::Expr(expr));
    };
    match (expr, *i) {
        (Expr::Binary { lhs, .. }, 0) => in_expr(lhs, rest),
        (Expr::Binary { rhs, .. }, 1) => in_expr(rhs, rest),
        (Expr::Unary { operand, .. }, 0) => in_expr(operand, rest),
        (Expr::Call { args, .. }, i) => in_expr(args.get_mut(i)?, rest),
        _ => None,
    }
}

struct Generator<'a> {
    ops: &'a BTreeSet<MutationOperator>,
    method: MethodId,
    path: Vec<usize>,
    out: Vec<MutantInstance>,
}

impl Generator<'_> {
    fn emit(&mut self, op: MutationOperator, original: String, replacement: Replacement) {
        let replacement_text = match &replacement {
            Replacement::Expr(e) => e.to_string(),
            Replacement::Stmt(s) => s.to_string(),
        };
        self.out.push(MutantInstance {
            operator: op,
            path: self.path.clone(),
            original,
            replacement_text,
            method: self.method.clone(),
            replacement,
        });
    }

    fn child<F: FnOnce(&mut Self)>(&mut self, index: usize, f: F) {
        self.path.push(index);
        f(self);
        self.path.pop();
    }

    fn block(&mut self, stmts: &[Stmt]) {
        for (i, s) in stmts.iter().enumerate() {
            self.child(i, |g| g.stmt(s));
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        if self.ops.contains(&MutationOperator::Std) && !matches!(s, Stmt::Return(_) | Stmt::NoOp) {
            self.emit(
                MutationOperator::Std,
                s.to_string(),
                Replacement::Stmt(Stmt::NoOp),
            );
        }
        match s {
            Stmt::Let { value: e, .. }
            | Stmt::Assign { value: e, .. }
            | Stmt::Return(e)
            | Stmt::Expr(e)
            | Stmt::Assert(e) => self.child(0, |g| g.expr(e)),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.child(0, |g| g.expr(cond));
                self.child(1, |g| g.block(then_branch));
                if let Some(b) = else_branch {
                    self.child(2, |g| g.block(b));
                }
            }
            Stmt::While { cond, body } => {
                self.child(0, |g| g.expr(cond));
                self.child(1, |g| g.block(body));
            }
            Stmt::NoOp => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        self.expr_mutants(e);
        match e {
            Expr::Binary { lhs, rhs, .. } => {
                self.child(0, |g| g.expr(lhs));
                self.child(1, |g| g.expr(rhs));
            }
            Expr::Unary { operand, .. } => self.child(0, |g| g.expr(operand)),
            Expr::Call { args, .. } => {
                for (i, a) in args.iter().enumerate() {
                    self.child(i, |g| g.expr(a));
                }
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) => {}
        }
    }

    fn expr_mutants(&mut self, e: &Expr) {
        let original = e.to_string();
        match e {
            Expr::Binary { op, lhs, rhs } => {
                let (tag, peers): (MutationOperator, &[BinaryOp]) = match op.class() {
                    OpClass::Arithmetic => (MutationOperator::Aor, &BinaryOp::ARITHMETIC),
                    OpClass::Relational => (MutationOperator::Ror, &BinaryOp::RELATIONAL),
                    OpClass::Bitwise => (MutationOperator::Lor, &BinaryOp::BITWISE),
                    OpClass::Shift => (MutationOperator::Sor, &BinaryOp::SHIFT),
                    OpClass::Logical => (MutationOperator::Cor, &BinaryOp::LOGICAL),
                };
                if !self.ops.contains(&tag) {
                    return;
                }
                for &other in peers.iter().filter(|&&p| p != *op) {
                    let r = Expr::binary(other, (**lhs).clone(), (**rhs).clone());
                    self.emit(tag, original.clone(), Replacement::Expr(r));
                }
                if tag == MutationOperator::Cor {
                    for r in [
                        (**lhs).clone(),
                        (**rhs).clone(),
                        Expr::Bool(true),
                        Expr::Bool(false),
                    ] {
                        self.emit(tag, original.clone(), Replacement::Expr(r));
                    }
                }
            }
            Expr::Unary { op, operand } if self.ops.contains(&MutationOperator::Oru) => {
                let swapped = match op {
                    UnaryOp::Neg => UnaryOp::BitNot,
                    UnaryOp::BitNot => UnaryOp::Neg,
                    UnaryOp::Not => return,
                };
                for r in [Expr::unary(swapped, (**operand).clone()), (**operand).clone()] {
                    self.emit(MutationOperator::Oru, original.clone(), Replacement::Expr(r));
                }
            }
            Expr::Int(v) if self.ops.contains(&MutationOperator::Lvr) => {
                for r in literal_replacements(*v) {
                    self.emit(MutationOperator::Lvr, original.clone(), Replacement::Expr(Expr::Int(r)));
                }
            }
            Expr::Bool(b) if self.ops.contains(&MutationOperator::Lvr) => {
                self.emit(MutationOperator::Lvr, original, Replacement::Expr(Expr::Bool(!b)));
            }
            _ => {}
        }
    }
}

/// {0, 1, -1} without `v`, then `-v` when non-zero and not already listed.
pub fn literal_replacements(v: i64) -> Vec<i64> {
    let mut out: Vec<i64> = [0, 1, -1].into_iter().filter(|&c| c != v).collect();
    if v != 0 && !out.contains(&v.wrapping_neg()) && v.wrapping_neg() != v {
        out.push(v.wrapping_neg());
    }
    out
}

/// Enumerates mutants in pre-order: a node's own mutants come before its
/// children's, statements before the expressions they contain.
pub fn generate_mutants(program: &Program, ops: &BTreeSet<MutationOperator>) -> Vec<MutantInstance> {
    let mut out = Vec::new();
    for (fi, func) in program.functions.iter().enumerate() {
        let mut g = Generator {
            ops,
            method: MethodId::new(func.name.clone()),
            path: vec![fi],
            out: Vec::new(),
        };
        g.block(&func.body);
        out.append(&mut g.out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::parse;

    fn only(op: MutationOperator) -> BTreeSet<MutationOperator> {
        [op].into_iter().collect()
    }

    fn mutants_of(src: &str, op: MutationOperator) -> Vec<MutantInstance> {
        generate_mutants(&parse(src).unwrap(), &only(op))
    }

    #[test]
    fn aor_on_addition() {
        let ms = mutants_of("fn f(a,b) { return a + b; }", MutationOperator::Aor);
        let texts: Vec<&str> = ms.iter().map(|m| m.replacement_text.as_str()).collect();
        assert_eq!(texts, ["a - b", "a * b", "a / b", "a % b"]);
        assert_eq!(ms[0].path, [0, 0, 0]);
        assert_eq!(ms[0].description(), "a + b ↦ a - b");
    }

    #[test]
    fn cor_includes_right_operand() {
        let ms = mutants_of("fn f(x, y) { return x || y; }", MutationOperator::Cor);
        let texts: Vec<&str> = ms.iter().map(|m| m.replacement_text.as_str()).collect();
        assert_eq!(texts, ["x && y", "x", "y", "true", "false"]);
        assert!(ms.iter().any(|m| m.description() == "x || y ↦ y"));
    }

    #[test]
    fn lvr_on_booleans_and_integers() {
        let ms = mutants_of("fn f() { return true; }", MutationOperator::Lvr);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].replacement_text, "false");
        assert_eq!(literal_replacements(5), [0, 1, -1, -5]);
        assert_eq!(literal_replacements(0), [1, -1]);
        assert_eq!(literal_replacements(1), [0, -1]);
    }

    #[test]
    fn std_skips_returns() {
        let ms = mutants_of(
            "fn f(a) { let b = a; if b > 0 { b = 1; } return b; }",
            MutationOperator::Std,
        );
        let orig: Vec<&str> = ms.iter().map(|m| m.original.as_str()).collect();
        assert_eq!(orig, ["let b = a;", "if b > 0 { b = 1; }", "b = 1;"]);
        assert!(ms.iter().all(|m| m.replacement_text == "<NO-OP>"));
    }

    #[test]
    fn application_changes_one_node() {
        let p = parse("fn f(a, b) { if a < b { return -a; } return a << (b & 3); }").unwrap();
        let all: BTreeSet<_> = MutationOperator::ALL.into_iter().collect();
        let ms = generate_mutants(&p, &all);
        assert!(!ms.is_empty());
        for m in &ms {
            let mutated = m.apply(&p).unwrap();
            assert_ne!(mutated, p, "{}", m.description());
        }
    }

    #[test]
    fn bad_path_is_internal_error() {
        let p = parse("fn f(a) { return a; }").unwrap();
        let mut m = mutants_of("fn f(a) { return a + 1; }", MutationOperator::Aor).remove(0);
        m.path = vec![0, 5];
        assert!(matches!(m.apply(&p), Err(LangError::Internal(_))));
    }
}
