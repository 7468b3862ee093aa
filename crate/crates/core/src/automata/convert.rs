use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::time::Instant;

use super::{Dfa, Nfa};
use crate::error::{Error, Result};
use crate::semantics::SubmonitorGraph;
use crate::terms::{name, rename_binders_apart, Alphabet, Monitor, Name, Verdict};

/// Largest trimmed NFA accepted by [`nfa_to_monitor`] without `force`.
pub const NFA_STATE_CAP: usize = 10;
/// Largest trimmed DFA accepted by [`dfa_to_monitor`] without `force`.
pub const DFA_STATE_CAP: usize = 12;

/// Resource limits for the automaton-to-monitor construction.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    /// Skip the state cap.
    pub force: bool,
    /// Give up with [`Error::Timeout`] after this instant.
    pub deadline: Option<Instant>,
}

/// The automaton of a single-verdict monitor: states are the submonitors
/// reachable by weak transitions, accepting states are those that reach
/// `verdict` silently.
pub fn monitor_to_nfa(m: &Monitor, verdict: Verdict, alphabet: &Alphabet) -> Result<Nfa> {
    if verdict == Verdict::End {
        return Err(Error::InvalidParameter(
            "the target verdict must be yes or no".into(),
        ));
    }
    if m.verdicts().contains(&verdict.dual()) {
        return Err(Error::WrongVerdict {
            expected: verdict.to_string(),
            found: verdict.dual().to_string(),
        });
    }
    verdict_nfa(m, verdict, alphabet)
}

/// Like [`monitor_to_nfa`] but accepts monitors with both verdicts; the
/// automaton recognizes the traces on which `verdict` is reachable.
pub fn verdict_nfa(m: &Monitor, verdict: Verdict, alphabet: &Alphabet) -> Result<Nfa> {
    let m = rename_binders_apart(m)?;
    let alphabet = alphabet.union(&m.actions());
    let g = SubmonitorGraph::new(&m, &alphabet)?;
    let mut index = HashMap::from([(g.root(), 0usize)]);
    let mut order = vec![g.root()];
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut queue = VecDeque::from([g.root()]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(alphabet.len());
        for sym in 0..alphabet.len() {
            let mut succ: Vec<usize> = g
                .weak_successors(i, sym)
                .into_iter()
                .map(|j| {
                    *index.entry(j).or_insert_with(|| {
                        order.push(j);
                        queue.push_back(j);
                        order.len() - 1
                    })
                })
                .collect();
            succ.sort_unstable();
            succ.dedup();
            row.push(succ);
        }
        delta.push(row);
    }
    let accepting = (0..order.len())
        .filter(|&k| g.reaches_now(order[k], verdict))
        .collect();
    let labels = (0..order.len()).map(|k| format!("q{k}")).collect();
    Ok(Nfa::from_parts(alphabet, labels, 0, accepting, delta))
}

/// Irrevocable, trimmed automaton whose only accepting state `y` has no
/// outgoing transitions.
struct Prepared {
    nfa: Nfa,
    y: usize,
}

fn prepare(nfa: &Nfa) -> Result<Option<Prepared>> {
    if !nfa.has_irrevocable_language() {
        return Err(Error::NotIrrevocable);
    }
    let closed = nfa.irrevocable_closure();
    if closed.is_empty() {
        return Ok(None);
    }
    // Every accepting state of the closure accepts all words, so they are
    // merged into one sink `y`.
    let rejecting: Vec<usize> = (0..closed.num_states())
        .filter(|q| !closed.is_accepting(*q))
        .collect();
    let mut pos: HashMap<usize, usize> =
        rejecting.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let y = rejecting.len();
    for &q in closed.accepting() {
        pos.insert(q, y);
    }
    let k = closed.alphabet().len();
    let mut delta = vec![vec![Vec::new(); k]; y + 1];
    for &q in &rejecting {
        for (sym, slot) in delta[pos[&q]].iter_mut().enumerate() {
            let mut succ: Vec<usize> = closed.successors(q, sym).iter().map(|d| pos[d]).collect();
            succ.sort_unstable();
            succ.dedup();
            *slot = succ;
        }
    }
    let mut labels: Vec<String> = rejecting
        .iter()
        .map(|&q| closed.label(q).to_string())
        .collect();
    labels.push("Y".into());
    let merged = Nfa::from_parts(
        closed.alphabet().clone(),
        labels,
        pos[&closed.initial()],
        BTreeSet::from([y]),
        delta,
    );
    let trimmed = merged.trim();
    let y = *trimmed
        .accepting()
        .iter()
        .next()
        .expect("language is not empty");
    Ok(Some(Prepared { nfa: trimmed, y }))
}

/// Shape measures of the automaton the path construction runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStats {
    /// States after closing, merging accepting states and trimming.
    pub states: usize,
    /// Largest number of outgoing transitions of a rejecting state.
    pub max_out_degree: usize,
    /// Number of repetition-free paths from the initial state.
    pub paths: usize,
}

/// Measures the automaton that [`nfa_to_monitor`] would build from.
pub fn path_stats(nfa: &Nfa) -> Result<PathStats> {
    let Some(p) = prepare(nfa)? else {
        return Ok(PathStats {
            states: 0,
            max_out_degree: 0,
            paths: 0,
        });
    };
    let a = &p.nfa;
    let k = a.alphabet().len();
    let max_out_degree = (0..a.num_states())
        .filter(|&q| q != p.y)
        .map(|q| (0..k).map(|s| a.successors(q, s).len()).sum())
        .max()
        .unwrap_or(0);
    fn count(a: &Nfa, y: usize, path: &mut Vec<usize>) -> usize {
        let q = *path.last().unwrap();
        if q == y {
            return 1;
        }
        let mut total = 1;
        for s in 0..a.alphabet().len() {
            for &d in a.successors(q, s) {
                if !path.contains(&d) {
                    path.push(d);
                    total += count(a, y, path);
                    path.pop();
                }
            }
        }
        total
    }
    Ok(PathStats {
        states: a.num_states(),
        max_out_degree,
        paths: count(a, p.y, &mut vec![a.initial()]),
    })
}

/// Builds a `yes`-monitor recognizing the (irrevocable) language of `nfa`.
/// One recursive submonitor is created per repetition-free path of states;
/// revisiting a state on the path jumps back to its variable.
pub fn nfa_to_monitor(nfa: &Nfa, limits: Limits) -> Result<Monitor> {
    build(nfa, NFA_STATE_CAP, limits)
}

/// The same construction on a DFA; the result is a deterministic monitor.
pub fn dfa_to_monitor(dfa: &Dfa, limits: Limits) -> Result<Monitor> {
    build(&dfa.to_nfa(), DFA_STATE_CAP, limits)
}

fn build(nfa: &Nfa, cap: usize, limits: Limits) -> Result<Monitor> {
    let Some(p) = prepare(nfa)? else {
        return Ok(Monitor::end());
    };
    if !limits.force && p.nfa.num_states() > cap {
        return Err(Error::CapExceeded {
            states: p.nfa.num_states(),
            cap,
        });
    }
    let mut b = PathBuilder {
        nfa: &p.nfa,
        y: p.y,
        deadline: limits.deadline,
        used: HashSet::new(),
        states: vec![p.nfa.initial()],
        vars: Vec::new(),
    };
    let token = b.state_token(p.nfa.initial());
    b.go(format!("x_{token}"))
}

struct PathBuilder<'a> {
    nfa: &'a Nfa,
    y: usize,
    deadline: Option<Instant>,
    used: HashSet<String>,
    states: Vec<usize>,
    vars: Vec<Name>,
}

impl PathBuilder<'_> {
    fn state_token(&self, q: usize) -> String {
        let label = self.nfa.label(q);
        if !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            label.to_string()
        } else {
            q.to_string()
        }
    }

    fn fresh(&mut self, base: String) -> Name {
        let mut candidate = base.clone();
        let mut k = 1;
        while !self.used.insert(candidate.clone()) {
            candidate = format!("{base}_{k}");
            k += 1;
        }
        name(&candidate)
    }

    fn go(&mut self, var: String) -> Result<Monitor> {
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Error::Timeout);
        }
        let q = *self.states.last().unwrap();
        if q == self.y {
            return Ok(Monitor::yes());
        }
        let x = self.fresh(var.clone());
        self.vars.push(x.clone());
        let mut summands = Vec::new();
        for (sym, a) in self.nfa.alphabet().actions().iter().enumerate() {
            for &d in self.nfa.successors(q, sym) {
                let body = match self.states.iter().position(|&s| s == d) {
                    Some(i) => Monitor::Var(self.vars[i].clone()),
                    None => {
                        let next = format!("{var}_{}_{}", a.as_str(), self.state_token(d));
                        self.states.push(d);
                        let sub = self.go(next);
                        self.states.pop();
                        sub?
                    }
                };
                summands.push(Monitor::prefix(a.clone(), body));
            }
        }
        self.vars.pop();
        Ok(Monitor::Rec(x, Box::new(Monitor::sum(summands))))
    }
}
