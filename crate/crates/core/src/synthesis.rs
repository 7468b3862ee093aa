//! Monitor synthesis from formulas, reading monitors back as formulas,
//! duality, and the encoding of monitors as processes.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::terms::{
    eliminate_verdict_sums, name, rename_formula_binders, Alphabet, Formula, Monitor, Name,
    ProcLabel, Process, Verdict,
};

/// Swaps `tt/ff`, `&/|`, `[a]/<a>` and `max/min`.
pub fn dualize(f: &Formula) -> Formula {
    match f {
        Formula::TT => Formula::FF,
        Formula::FF => Formula::TT,
        Formula::Var(_) => f.clone(),
        Formula::Box(a, b) => Formula::diamond(a.clone(), dualize(b)),
        Formula::Diamond(a, b) => Formula::boxed(a.clone(), dualize(b)),
        Formula::And(cs) => Formula::Or(cs.iter().map(dualize).collect()),
        Formula::Or(cs) => Formula::And(cs.iter().map(dualize).collect()),
        Formula::Max(x, b) => Formula::Min(x.clone(), Box::new(dualize(b))),
        Formula::Min(x, b) => Formula::Max(x.clone(), Box::new(dualize(b))),
    }
}

/// Swaps the verdicts `yes` and `no`.
pub fn dualize_monitor(m: &Monitor) -> Monitor {
    m.map_verdicts(|v| Monitor::Verdict(v.dual()))
}

fn first_upper(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn first_lower(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// Maps every name to `convert(name)`, adding numeric suffixes to keep
/// distinct names distinct.
fn rename_map(names: &BTreeSet<Name>, convert: fn(&str) -> String) -> HashMap<Name, Name> {
    let mut used = BTreeSet::new();
    let mut out = HashMap::new();
    for x in names {
        let base = convert(x);
        let mut cand = base.clone();
        let mut k = 1;
        while used.contains(&cand) {
            cand = format!("{base}{k}");
            k += 1;
        }
        used.insert(cand.clone());
        out.insert(x.clone(), name(&cand));
    }
    out
}

fn formula_vars(f: &Formula, out: &mut BTreeSet<Name>) {
    match f {
        Formula::TT | Formula::FF => {}
        Formula::Var(x) => {
            out.insert(x.clone());
        }
        Formula::Box(_, b) | Formula::Diamond(_, b) => formula_vars(b, out),
        Formula::Max(x, b) | Formula::Min(x, b) => {
            out.insert(x.clone());
            formula_vars(b, out);
        }
        Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| formula_vars(c, out)),
    }
}

fn msf_safety(f: &Formula, names: &HashMap<Name, Name>) -> Monitor {
    match f {
        Formula::TT => Monitor::yes(),
        Formula::FF => Monitor::no(),
        Formula::Var(x) => Monitor::Var(names[x].clone()),
        Formula::Box(a, b) => match msf_safety(b, names) {
            Monitor::Verdict(Verdict::Yes) => Monitor::yes(),
            m => Monitor::prefix(a.clone(), m),
        },
        Formula::And(cs) => {
            let mut acc = Monitor::yes();
            for c in cs {
                let m = msf_safety(c, names);
                if m == Monitor::no() {
                    return m;
                }
                if m == Monitor::yes() {
                    continue;
                }
                acc = if acc == Monitor::yes() {
                    m
                } else {
                    Monitor::sum(vec![acc, m])
                };
            }
            acc
        }
        Formula::Max(x, b) => match msf_safety(b, names) {
            Monitor::Verdict(Verdict::Yes) => Monitor::yes(),
            m => Monitor::Rec(names[x].clone(), Box::new(m)),
        },
        Formula::Diamond(..) | Formula::Or(_) | Formula::Min(..) => unreachable!("checked sHML"),
    }
}

/// The synthesized monitor of an sHML or cHML formula. A conjunct
/// synthesized to `no` absorbs its conjunction, since a sum of `no` with
/// other summands would only reject after one more action. Binders are
/// first renamed apart; monitor variables are the formula variables with a
/// lowercase first letter.
pub fn msf(f: &Formula) -> Result<Monitor> {
    if f.is_shml() {
        let f = rename_formula_binders(f, &BTreeSet::new());
        let mut vars = BTreeSet::new();
        formula_vars(&f, &mut vars);
        let names = rename_map(&vars, first_lower);
        Ok(msf_safety(&f, &names))
    } else if f.is_chml() {
        Ok(dualize_monitor(&msf(&dualize(f))?))
    } else {
        Err(Error::MixedFragment)
    }
}

fn read_back(m: &Monitor, names: &HashMap<Name, Name>) -> Formula {
    match m {
        Monitor::Verdict(Verdict::No) => Formula::FF,
        Monitor::Verdict(_) => Formula::TT,
        Monitor::Var(x) => Formula::Var(names[x].clone()),
        Monitor::Prefix(a, b) => Formula::boxed(a.clone(), read_back(b, names)),
        Monitor::Sum(ms) => Formula::and(ms.iter().map(|s| read_back(s, names)).collect()),
        Monitor::Rec(x, b) => Formula::Max(names[x].clone(), Box::new(read_back(b, names))),
    }
}

fn monitor_vars(m: &Monitor, out: &mut BTreeSet<Name>) {
    m.visit(&mut |t| match t {
        Monitor::Var(x) | Monitor::Rec(x, _) => {
            out.insert(x.clone());
        }
        _ => {}
    });
}

/// Reads a single-verdict monitor as a formula: an sHML formula for a
/// rejection monitor, a cHML formula for an acceptance monitor. Verdict
/// summands are first expanded over `alphabet`.
pub fn monitor_to_formula(m: &Monitor, alphabet: &Alphabet) -> Result<Formula> {
    let vs = m.verdicts();
    let has_yes = vs.contains(&Verdict::Yes);
    let has_no = vs.contains(&Verdict::No);
    if has_yes && has_no {
        return Err(Error::TwoVerdict);
    }
    if has_yes {
        return Ok(dualize(&monitor_to_formula(&dualize_monitor(m), alphabet)?));
    }
    let m = eliminate_verdict_sums(m, alphabet);
    let mut vars = BTreeSet::new();
    monitor_vars(&m, &mut vars);
    let names = rename_map(&vars, first_upper);
    Ok(read_back(&m, &names))
}

/// Encodes a monitor as a process whose verdicts are actions followed by `nil`.
pub fn pi(m: &Monitor) -> Process {
    match m {
        Monitor::Verdict(v) => Process::prefix(ProcLabel::Verdict(*v), Process::Nil),
        Monitor::Var(x) => Process::Var(x.clone()),
        Monitor::Prefix(a, b) => Process::prefix(ProcLabel::Act(a.clone()), pi(b)),
        Monitor::Sum(ms) => Process::sum(ms.iter().map(pi).collect()),
        Monitor::Rec(x, b) => Process::Rec(x.clone(), Box::new(pi(b))),
    }
}

fn verdict_summand(p: &Process) -> Option<Verdict> {
    match p {
        Process::Prefix(ProcLabel::Verdict(v), _) => Some(*v),
        Process::Sum(ps) => ps.iter().find_map(verdict_summand),
        _ => None,
    }
}

/// Decodes a process: any sum with a verdict-prefixed summand becomes that
/// verdict.
pub fn pi_inverse(p: &Process) -> Result<Monitor> {
    if let Some(v) = verdict_summand(p) {
        return Ok(Monitor::Verdict(v));
    }
    Ok(match p {
        Process::Nil => return Err(Error::BareNil),
        Process::Var(x) => Monitor::Var(x.clone()),
        Process::Prefix(ProcLabel::Act(a), b) => Monitor::prefix(a.clone(), pi_inverse(b)?),
        Process::Prefix(ProcLabel::Verdict(_), _) => unreachable!("handled above"),
        Process::Sum(ps) => Monitor::sum(ps.iter().map(pi_inverse).collect::<Result<Vec<_>>>()?),
        Process::Rec(x, b) => Monitor::Rec(x.clone(), Box::new(pi_inverse(b)?)),
    })
}
