use std::fmt::{self, Write};

use super::{Formula, Monitor, ProcLabel, Process};

// `open` is true when the term extends to the end of the enclosing region,
// so a binder may be printed without parentheses. `tight` is true inside a
// prefix body, where a sum needs parentheses.
fn write_monitor(m: &Monitor, out: &mut String, open: bool, tight: bool) {
    match m {
        Monitor::Verdict(v) => out.push_str(v.keyword()),
        Monitor::Var(x) => out.push_str(x),
        Monitor::Prefix(a, b) => {
            out.push_str(a.as_str());
            out.push('.');
            write_monitor(b, out, open, true);
        }
        Monitor::Sum(ms) => {
            if tight {
                out.push('(');
                write_monitor(m, out, true, false);
                out.push(')');
                return;
            }
            for (i, s) in ms.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_monitor(s, out, open && i + 1 == ms.len(), true);
            }
        }
        Monitor::Rec(x, b) => {
            if !open {
                out.push('(');
                write_monitor(m, out, true, false);
                out.push(')');
                return;
            }
            let _ = write!(out, "rec {x}.");
            if matches!(**b, Monitor::Sum(_)) {
                write_monitor(b, out, true, true);
            } else {
                out.push(' ');
                write_monitor(b, out, true, false);
            }
        }
    }
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_monitor(self, &mut s, true, false);
        f.write_str(&s)
    }
}

// Precedence levels: 0 = anything, 1 = conjunction or tighter, 2 = unary.
fn write_formula(f: &Formula, out: &mut String, level: u8, open: bool) {
    let paren = |out: &mut String, inner: &dyn Fn(&mut String)| {
        out.push('(');
        inner(out);
        out.push(')');
    };
    match f {
        Formula::TT => out.push_str("tt"),
        Formula::FF => out.push_str("ff"),
        Formula::Var(x) => out.push_str(x),
        Formula::Box(a, b) => {
            let _ = write!(out, "[{a}]");
            write_formula(b, out, 2, open);
        }
        Formula::Diamond(a, b) => {
            let _ = write!(out, "<{a}>");
            write_formula(b, out, 2, open);
        }
        Formula::And(cs) | Formula::Or(cs) => {
            let (mine, sep) = if matches!(f, Formula::And(_)) {
                (1, " & ")
            } else {
                (0, " | ")
            };
            if level > mine {
                paren(out, &|o| write_formula(f, o, 0, true));
                return;
            }
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_formula(c, out, mine + 1, open && i + 1 == cs.len());
            }
        }
        Formula::Max(x, b) | Formula::Min(x, b) => {
            if !open {
                paren(out, &|o| write_formula(f, o, 0, true));
                return;
            }
            let kw = if matches!(f, Formula::Max(..)) {
                "max"
            } else {
                "min"
            };
            let _ = write!(out, "{kw} {x}.");
            // Conjunctive and disjunctive bodies get parentheses for readability.
            write_formula(b, out, 2, true);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, &mut s, 0, true);
        f.write_str(&s)
    }
}

fn write_process(p: &Process, out: &mut String, open: bool, tight: bool) {
    match p {
        Process::Nil => out.push_str("nil"),
        Process::Var(x) => out.push_str(x),
        Process::Prefix(l, b) => {
            match l {
                ProcLabel::Act(a) => out.push_str(a.as_str()),
                ProcLabel::Verdict(v) => {
                    let _ = write!(out, "[{v}]");
                }
            }
            out.push('.');
            write_process(b, out, open, true);
        }
        Process::Sum(ps) => {
            if tight {
                out.push('(');
                write_process(p, out, true, false);
                out.push(')');
                return;
            }
            for (i, s) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_process(s, out, open && i + 1 == ps.len(), true);
            }
        }
        Process::Rec(x, b) => {
            if !open {
                out.push('(');
                write_process(p, out, true, false);
                out.push(')');
                return;
            }
            let _ = write!(out, "rec {x}.");
            if matches!(**b, Process::Sum(_)) {
                write_process(b, out, true, true);
            } else {
                out.push(' ');
                write_process(b, out, true, false);
            }
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_process(self, &mut s, true, false);
        f.write_str(&s)
    }
}
