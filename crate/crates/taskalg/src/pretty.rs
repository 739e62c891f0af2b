//! Pretty-printer. Output re-parses to a structurally equal term, with
//! parentheses only where precedence demands them.

use std::fmt::Write as _;

use crate::ast::{Activity, Assignment, DefBody, Expr, Guard, Model};

// activity precedence, loosest first
const SEL: u8 = 1;
const PAR: u8 = 2;
const SEQ: u8 = 3;
const ATOM: u8 = 4;

/// Renders a whole model, one definition per line, `main` last.
pub fn print_model(model: &Model) -> String {
    let mut out = String::new();
    for def in &model.definitions {
        match &def.body {
            DefBody::Compound(activity) => {
                let _ = writeln!(out, "let {} = {{ {} }}", def.name, print_activity(activity));
            }
            DefBody::Simple(assigns) => {
                let _ = writeln!(out, "let {} = [{}]", def.name, print_assigns(assigns));
            }
        }
    }
    let _ = write!(out, "main = {}", print_activity(&model.main));
    out
}

/// Renders an activity with minimal parentheses.
pub fn print_activity(activity: &Activity) -> String {
    let mut out = String::new();
    write_activity(&mut out, activity, SEL);
    out
}

fn level(activity: &Activity) -> u8 {
    match activity {
        Activity::Sel { .. } => SEL,
        Activity::Par(_, _) => PAR,
        Activity::Seq(_, _) => SEQ,
        _ => ATOM,
    }
}

fn write_activity(out: &mut String, activity: &Activity, min: u8) {
    if level(activity) < min {
        out.push('(');
        write_activity(out, activity, SEL);
        out.push(')');
        return;
    }
    match activity {
        Activity::Empty => out.push_str("eps"),
        Activity::Succeed => out.push_str("sigma"),
        Activity::Fail => out.push_str("phi"),
        Activity::TaskRef { name, overrides } => {
            out.push_str(name);
            if let Some(assigns) = overrides {
                out.push('(');
                out.push_str(&print_assigns(assigns));
                out.push(')');
            }
        }
        Activity::Encapsulated(inner) => {
            out.push_str("{ ");
            write_activity(out, inner, SEL);
            out.push_str(" }");
        }
        Activity::Seq(a, b) => {
            write_activity(out, a, ATOM);
            out.push_str(" ; ");
            write_activity(out, b, SEQ);
        }
        Activity::Par(a, b) => {
            write_activity(out, a, SEQ);
            out.push_str(" || ");
            write_activity(out, b, PAR);
        }
        Activity::Sel {
            left_guard,
            left,
            right_guard,
            right,
        } => {
            write_activity(out, left, PAR);
            if let Some(g) = left_guard {
                let _ = write!(out, "[{}]", g.expr);
            }
            out.push_str(" + ");
            if let Some(g) = right_guard {
                let _ = write!(out, "[{}] ", g.expr);
            }
            write_activity(out, right, SEL);
        }
        Activity::Until { guard, body } => {
            out.push_str("until ");
            write_loop_tail(out, guard, body);
        }
        Activity::While { guard, body } => {
            out.push_str("while ");
            write_loop_tail(out, guard, body);
        }
    }
}

fn write_loop_tail(out: &mut String, guard: &Option<Guard>, body: &Activity) {
    if let Some(g) = guard {
        let _ = write!(out, "[{}] ", g.expr);
    }
    out.push_str("{ ");
    write_activity(out, body, SEL);
    out.push_str(" }");
}

fn print_assigns(assigns: &[Assignment]) -> String {
    assigns
        .iter()
        .map(|a| format!("{}={}", a.target, a.value))
        .collect::<Vec<_>>()
        .join(", ")
}

// expression precedence, loosest first
const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const REL: u8 = 4;
const PRIM: u8 = 5;

fn expr_level(expr: &Expr) -> u8 {
    match expr {
        Expr::Or(_, _) => OR,
        Expr::And(_, _) => AND,
        Expr::Not(_) => NOT,
        Expr::Rel { .. } => REL,
        _ => PRIM,
    }
}

fn write_expr(out: &mut String, expr: &Expr, min: u8) {
    if expr_level(expr) < min {
        out.push('(');
        write_expr(out, expr, OR);
        out.push(')');
        return;
    }
    match expr {
        Expr::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Expr::Str(s) => {
            let _ = write!(out, "\"{s}\"");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Var(name) => out.push_str(name),
        Expr::Call { callee, args } => {
            out.push_str(callee);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, arg, OR);
            }
            out.push(')');
        }
        Expr::Not(inner) => {
            out.push('!');
            write_expr(out, inner, NOT);
        }
        Expr::And(a, b) => {
            // the parser folds chains to the left
            write_expr(out, a, AND);
            out.push_str(" && ");
            write_expr(out, b, NOT);
        }
        Expr::Or(a, b) => {
            write_expr(out, a, OR);
            out.push_str(" || ");
            write_expr(out, b, AND);
        }
        Expr::Rel { op, lhs, rhs } => {
            write_expr(out, lhs, PRIM);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, PRIM);
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        write_expr(&mut out, self, OR);
        f.write_str(&out)
    }
}
