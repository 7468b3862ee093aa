//! Abstract syntax for monitors, formulas and processes, with metrics and
//! syntactic normalizations.

mod normalize;
mod print;
mod syntax;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use normalize::{
    eliminate_verdict_sums, rename_binders_apart, rename_formula_binders, well_form,
};
pub use syntax::{
    parse_formula, parse_formula_any, parse_formula_file, parse_monitor, parse_monitor_any,
    parse_monitor_file, parse_process, TermFile,
};

/// Variable names are shared, immutable strings.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

const KEYWORDS: &[&str] = &[
    "yes", "no", "end", "rec", "tt", "ff", "max", "min", "nil", "tau",
];

/// Symbol used by the two-verdict encoding for the `no` verdict.
pub const MARKER: &str = "[no]";

/// An observable action.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(Arc<str>);

impl Action {
    /// Creates an action from a symbol made of ASCII letters, digits and `_`.
    pub fn new(symbol: &str) -> Result<Action> {
        let valid = !symbol.is_empty()
            && symbol
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !KEYWORDS.contains(&symbol);
        if valid {
            Ok(Action(Arc::from(symbol)))
        } else {
            Err(Error::InvalidAction(symbol.to_string()))
        }
    }

    /// The reserved `[no]` action of the two-verdict encoding.
    pub fn marker() -> Action {
        Action(Arc::from(MARKER))
    }

    pub fn is_marker(&self) -> bool {
        &*self.0 == MARKER
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits a string into single-character actions, e.g. `"10e"` into `1 0 e`.
pub fn word(s: &str) -> Vec<Action> {
    s.chars()
        .map(|c| Action::new(&c.to_string()).expect("invalid action character"))
        .collect()
}

/// Renders a trace as a string of symbols separated by spaces.
/// All words over `alphabet` of length at most `n`, shortest first.
pub fn words_up_to(alphabet: &Alphabet, n: usize) -> Vec<Vec<Action>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet.iter() {
                let mut v: Vec<Action> = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn show_trace(trace: &[Action]) -> String {
    crate::error::format_trace(trace)
}

/// A finite, sorted set of actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    actions: Vec<Action>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Action>>(actions: I) -> Alphabet {
        let set: BTreeSet<Action> = actions.into_iter().collect();
        Alphabet {
            actions: set.into_iter().collect(),
        }
    }

    pub fn from_symbols(symbols: &[&str]) -> Result<Alphabet> {
        let actions = symbols
            .iter()
            .map(|s| Action::new(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Alphabet::new(actions))
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Action> {
        self.actions.iter()
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.actions.binary_search(a).is_ok()
    }

    pub fn index_of(&self, a: &Action) -> Option<usize> {
        self.actions.binary_search(a).ok()
    }

    pub fn has_marker(&self) -> bool {
        self.contains(&Action::marker())
    }

    pub fn with_marker(&self) -> Alphabet {
        self.union(&Alphabet::new([Action::marker()]))
    }

    pub fn without_marker(&self) -> Alphabet {
        Alphabet::new(self.actions.iter().filter(|a| !a.is_marker()).cloned())
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet::new(self.actions.iter().chain(other.actions.iter()).cloned())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.actions.iter().map(|a| a.as_str()).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Yes,
    No,
    End,
}

impl Verdict {
    pub fn dual(self) -> Verdict {
        match self {
            Verdict::Yes => Verdict::No,
            Verdict::No => Verdict::Yes,
            Verdict::End => Verdict::End,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::End => "end",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Monitor terms: `v | a.m | m + n | rec x.m | x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monitor {
    Verdict(Verdict),
    Prefix(Action, Box<Monitor>),
    /// Flattened sum with at least two summands.
    Sum(Vec<Monitor>),
    Rec(Name, Box<Monitor>),
    Var(Name),
}

impl Monitor {
    pub fn yes() -> Monitor {
        Monitor::Verdict(Verdict::Yes)
    }

    pub fn no() -> Monitor {
        Monitor::Verdict(Verdict::No)
    }

    pub fn end() -> Monitor {
        Monitor::Verdict(Verdict::End)
    }

    pub fn prefix(a: Action, body: Monitor) -> Monitor {
        Monitor::Prefix(a, Box::new(body))
    }

    pub fn rec(x: &str, body: Monitor) -> Monitor {
        Monitor::Rec(name(x), Box::new(body))
    }

    pub fn var(x: &str) -> Monitor {
        Monitor::Var(name(x))
    }

    /// Builds a flattened sum. A single summand is returned as is.
    ///
    /// # Panics
    /// Panics when `summands` is empty.
    pub fn sum(summands: Vec<Monitor>) -> Monitor {
        let mut flat = Vec::with_capacity(summands.len());
        for m in summands {
            match m {
                Monitor::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => panic!("empty sum"),
            1 => flat.pop().unwrap(),
            _ => Monitor::Sum(flat),
        }
    }

    pub fn as_verdict(&self) -> Option<Verdict> {
        match self {
            Monitor::Verdict(v) => Some(*v),
            _ => None,
        }
    }

    /// Number of syntax nodes; an n-ary sum counts as n - 1 binary sums.
    pub fn size(&self) -> usize {
        match self {
            Monitor::Verdict(_) | Monitor::Var(_) => 1,
            Monitor::Prefix(_, b) | Monitor::Rec(_, b) => b.size() + 1,
            Monitor::Sum(ms) => ms.iter().map(Monitor::size).sum::<usize>() + ms.len() - 1,
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Monitor::Verdict(_) | Monitor::Var(_) => 1,
            Monitor::Prefix(_, b) => b.height() + 1,
            Monitor::Rec(_, b) => b.height(),
            Monitor::Sum(ms) => ms.iter().map(Monitor::height).max().unwrap_or(1),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Monitor::Verdict(_) => {}
            Monitor::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Monitor::Prefix(_, b) => b.collect_free(bound, out),
            Monitor::Sum(ms) => ms.iter().for_each(|m| m.collect_free(bound, out)),
            Monitor::Rec(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Verdicts occurring syntactically in the term.
    pub fn verdicts(&self) -> BTreeSet<Verdict> {
        let mut out = BTreeSet::new();
        self.visit(&mut |m| {
            if let Monitor::Verdict(v) = m {
                out.insert(*v);
            }
        });
        out
    }

    /// True when the term does not use both `yes` and `no`.
    pub fn is_single_verdict(&self) -> bool {
        let vs = self.verdicts();
        !(vs.contains(&Verdict::Yes) && vs.contains(&Verdict::No))
    }

    /// Actions occurring in prefixes.
    pub fn actions(&self) -> Alphabet {
        let mut out = Vec::new();
        self.visit(&mut |m| {
            if let Monitor::Prefix(a, _) = m {
                out.push(a.clone());
            }
        });
        Alphabet::new(out)
    }

    /// Pre-order traversal of all subterm occurrences.
    pub fn visit<F: FnMut(&Monitor)>(&self, f: &mut F) {
        f(self);
        match self {
            Monitor::Prefix(_, b) | Monitor::Rec(_, b) => b.visit(f),
            Monitor::Sum(ms) => ms.iter().for_each(|m| m.visit(f)),
            Monitor::Verdict(_) | Monitor::Var(_) => {}
        }
    }

    /// True when some sum has a verdict among its summands.
    pub fn has_verdict_sum(&self) -> bool {
        let mut found = false;
        self.visit(&mut |m| {
            if let Monitor::Sum(ms) = m {
                if ms.iter().any(|s| s.as_verdict().is_some()) {
                    found = true;
                }
            }
        });
        found
    }

    /// Capture-avoiding substitution is unnecessary here: the substituted
    /// term is always closed in the semantics, so this replaces free
    /// occurrences of `x` by `by` directly.
    pub fn substitute(&self, x: &Name, by: &Monitor) -> Monitor {
        match self {
            Monitor::Verdict(_) => self.clone(),
            Monitor::Var(y) => {
                if y == x {
                    by.clone()
                } else {
                    self.clone()
                }
            }
            Monitor::Prefix(a, b) => Monitor::Prefix(a.clone(), Box::new(b.substitute(x, by))),
            Monitor::Sum(ms) => Monitor::Sum(ms.iter().map(|m| m.substitute(x, by)).collect()),
            Monitor::Rec(y, b) => {
                if y == x {
                    self.clone()
                } else {
                    Monitor::Rec(y.clone(), Box::new(b.substitute(x, by)))
                }
            }
        }
    }

    /// Replaces every verdict `v` by `f(v)`.
    pub fn map_verdicts<F: Fn(Verdict) -> Monitor + Copy>(&self, f: F) -> Monitor {
        match self {
            Monitor::Verdict(v) => f(*v),
            Monitor::Var(_) => self.clone(),
            Monitor::Prefix(a, b) => Monitor::prefix(a.clone(), b.map_verdicts(f)),
            Monitor::Sum(ms) => Monitor::sum(ms.iter().map(|m| m.map_verdicts(f)).collect()),
            Monitor::Rec(x, b) => Monitor::Rec(x.clone(), Box::new(b.map_verdicts(f))),
        }
    }
}

/// Formulas of Hennessy-Milner logic with recursion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    TT,
    FF,
    Box(Action, Box<Formula>),
    Diamond(Action, Box<Formula>),
    /// Flattened conjunction with at least two conjuncts.
    And(Vec<Formula>),
    /// Flattened disjunction with at least two disjuncts.
    Or(Vec<Formula>),
    Max(Name, Box<Formula>),
    Min(Name, Box<Formula>),
    Var(Name),
}

impl Formula {
    pub fn boxed(a: Action, body: Formula) -> Formula {
        Formula::Box(a, Box::new(body))
    }

    pub fn diamond(a: Action, body: Formula) -> Formula {
        Formula::Diamond(a, Box::new(body))
    }

    pub fn max(x: &str, body: Formula) -> Formula {
        Formula::Max(name(x), Box::new(body))
    }

    pub fn min(x: &str, body: Formula) -> Formula {
        Formula::Min(name(x), Box::new(body))
    }

    pub fn var(x: &str) -> Formula {
        Formula::Var(name(x))
    }

    /// Flattened conjunction; empty means `tt`, one conjunct is returned as is.
    pub fn and(conjuncts: Vec<Formula>) -> Formula {
        let mut flat = Vec::with_capacity(conjuncts.len());
        for c in conjuncts {
            match c {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::TT,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    /// Flattened disjunction; empty means `ff`.
    pub fn or(disjuncts: Vec<Formula>) -> Formula {
        let mut flat = Vec::with_capacity(disjuncts.len());
        for c in disjuncts {
            match c {
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::FF,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> &[Formula] {
        match self {
            Formula::And(cs) => cs,
            other => std::slice::from_ref(other),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::TT | Formula::FF | Formula::Var(_) => 1,
            Formula::Box(_, b)
            | Formula::Diamond(_, b)
            | Formula::Max(_, b)
            | Formula::Min(_, b) => b.size() + 1,
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().map(Formula::size).sum::<usize>() + cs.len() - 1
            }
        }
    }

    /// Modal depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::TT | Formula::FF | Formula::Var(_) => 0,
            Formula::Box(_, b) | Formula::Diamond(_, b) => b.depth() + 1,
            Formula::Max(_, b) | Formula::Min(_, b) => b.depth(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::TT | Formula::FF => {}
            Formula::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Formula::Box(_, b) | Formula::Diamond(_, b) => b.collect_free(bound, out),
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().for_each(|c| c.collect_free(bound, out))
            }
            Formula::Max(x, b) | Formula::Min(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Variables that are free and not under any modality.
    pub fn free_unguarded(&self) -> BTreeSet<Name> {
        match self {
            Formula::TT | Formula::FF | Formula::Box(..) | Formula::Diamond(..) => BTreeSet::new(),
            Formula::Var(x) => BTreeSet::from([x.clone()]),
            Formula::And(cs) | Formula::Or(cs) => {
                cs.iter().flat_map(|c| c.free_unguarded()).collect()
            }
            Formula::Max(x, b) | Formula::Min(x, b) => {
                let mut s = b.free_unguarded();
                s.remove(x);
                s
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Safety fragment: `tt, ff, [a], &, max, X`.
    pub fn is_shml(&self) -> bool {
        match self {
            Formula::TT | Formula::FF | Formula::Var(_) => true,
            Formula::Box(_, b) | Formula::Max(_, b) => b.is_shml(),
            Formula::And(cs) => cs.iter().all(Formula::is_shml),
            Formula::Diamond(..) | Formula::Or(_) | Formula::Min(..) => false,
        }
    }

    /// Co-safety fragment: `tt, ff, <a>, |, min, X`.
    pub fn is_chml(&self) -> bool {
        match self {
            Formula::TT | Formula::FF | Formula::Var(_) => true,
            Formula::Diamond(_, b) | Formula::Min(_, b) => b.is_chml(),
            Formula::Or(cs) => cs.iter().all(Formula::is_chml),
            Formula::Box(..) | Formula::And(_) | Formula::Max(..) => false,
        }
    }

    /// Replaces free occurrences of `x` by `by`. Callers keep bound names
    /// apart from the free names of `by`, so no renaming is needed.
    pub fn substitute(&self, x: &Name, by: &Formula) -> Formula {
        match self {
            Formula::TT | Formula::FF => self.clone(),
            Formula::Var(y) => {
                if y == x {
                    by.clone()
                } else {
                    self.clone()
                }
            }
            Formula::Box(a, b) => Formula::boxed(a.clone(), b.substitute(x, by)),
            Formula::Diamond(a, b) => Formula::diamond(a.clone(), b.substitute(x, by)),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.substitute(x, by)).collect()),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.substitute(x, by)).collect()),
            Formula::Max(y, b) => {
                if y == x {
                    self.clone()
                } else {
                    Formula::Max(y.clone(), Box::new(b.substitute(x, by)))
                }
            }
            Formula::Min(y, b) => {
                if y == x {
                    self.clone()
                } else {
                    Formula::Min(y.clone(), Box::new(b.substitute(x, by)))
                }
            }
        }
    }

    pub fn actions(&self) -> Alphabet {
        let mut out = Vec::new();
        self.collect_actions(&mut out);
        Alphabet::new(out)
    }

    fn collect_actions(&self, out: &mut Vec<Action>) {
        match self {
            Formula::TT | Formula::FF | Formula::Var(_) => {}
            Formula::Box(a, b) | Formula::Diamond(a, b) => {
                out.push(a.clone());
                b.collect_actions(out);
            }
            Formula::Max(_, b) | Formula::Min(_, b) => b.collect_actions(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_actions(out)),
        }
    }
}

/// Labels of process prefixes: ordinary actions or verdicts used as actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcLabel {
    Act(Action),
    Verdict(Verdict),
}

/// Regular CCS processes, used as images of monitors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Prefix(ProcLabel, Box<Process>),
    Sum(Vec<Process>),
    Rec(Name, Box<Process>),
    Var(Name),
}

impl Process {
    pub fn prefix(l: ProcLabel, body: Process) -> Process {
        Process::Prefix(l, Box::new(body))
    }

    /// Flattened sum; panics on an empty list.
    pub fn sum(summands: Vec<Process>) -> Process {
        let mut flat = Vec::with_capacity(summands.len());
        for p in summands {
            match p {
                Process::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => panic!("empty sum"),
            1 => flat.pop().unwrap(),
            _ => Process::Sum(flat),
        }
    }

    pub fn substitute(&self, x: &Name, by: &Process) -> Process {
        match self {
            Process::Nil => Process::Nil,
            Process::Var(y) => {
                if y == x {
                    by.clone()
                } else {
                    self.clone()
                }
            }
            Process::Prefix(l, b) => Process::prefix(l.clone(), b.substitute(x, by)),
            Process::Sum(ps) => Process::Sum(ps.iter().map(|p| p.substitute(x, by)).collect()),
            Process::Rec(y, b) => {
                if y == x {
                    self.clone()
                } else {
                    Process::Rec(y.clone(), Box::new(b.substitute(x, by)))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    fn m_e() -> Monitor {
        Monitor::rec(
            "x",
            Monitor::prefix(
                a("a"),
                Monitor::sum(vec![
                    Monitor::prefix(a("a"), Monitor::no()),
                    Monitor::var("x"),
                ]),
            ),
        )
    }

    // Direct evaluation of the size and height recurrences on binary sums.
    fn oracle_size(m: &Monitor) -> usize {
        match m {
            Monitor::Verdict(_) | Monitor::Var(_) => 1,
            Monitor::Prefix(_, b) | Monitor::Rec(_, b) => 1 + oracle_size(b),
            Monitor::Sum(ms) => {
                let mut it = ms.iter().rev();
                let mut acc = oracle_size(it.next().unwrap());
                for p in it {
                    acc = oracle_size(p) + acc + 1;
                }
                acc
            }
        }
    }

    #[test]
    fn size_examples() {
        assert_eq!(Monitor::yes().size(), 1);
        assert_eq!(Monitor::prefix(a("a"), Monitor::yes()).size(), 2);
        assert_eq!(m_e().size(), 6);
        assert_eq!(oracle_size(&m_e()), 6);
    }

    #[test]
    fn height_examples() {
        assert_eq!(Monitor::yes().height(), 1);
        let abno = Monitor::prefix(a("a"), Monitor::prefix(a("b"), Monitor::no()));
        assert_eq!(abno.height(), 3);
        assert_eq!(m_e().height(), 3);
    }

    #[test]
    fn reserved_actions_rejected() {
        assert!(Action::new("tau").is_err());
        assert!(Action::new("no").is_err());
        assert!(Action::new("[no]").is_err());
        assert!(Action::new("req").is_ok());
        assert!(Action::marker().is_marker());
    }

    #[test]
    fn fragments_and_free_vars() {
        assert!(Formula::FF.free_vars().is_empty());
        assert!(Formula::FF.is_shml() && Formula::FF.is_chml());
        let f = Formula::max("X", Formula::boxed(a("a"), Formula::var("X")));
        assert!(f.free_vars().is_empty());
        assert!(f.is_shml() && !f.is_chml());
        let g = Formula::diamond(a("a"), Formula::TT);
        assert!(g.free_vars().is_empty());
        assert!(!g.is_shml() && g.is_chml());
    }

    #[test]
    fn sum_flattens() {
        let s = Monitor::sum(vec![
            Monitor::sum(vec![Monitor::yes(), Monitor::no()]),
            Monitor::end(),
        ]);
        assert_eq!(
            s,
            Monitor::Sum(vec![Monitor::yes(), Monitor::no(), Monitor::end()])
        );
        assert_eq!(s.size(), 5);
    }
}
