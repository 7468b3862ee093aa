//! Finite labelled transition systems.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::terms::{Action, Alphabet};

/// A transition label: an observable action or the silent `tau`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tau,
    Act(Action),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("tau"),
            Label::Act(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLts {
    names: Vec<String>,
    index: HashMap<String, usize>,
    transitions: Vec<(usize, Label, usize)>,
    out: Vec<Vec<(Label, usize)>>,
    init: Option<usize>,
}

impl FiniteLts {
    pub fn new(
        names: Vec<String>,
        transitions: Vec<(usize, Label, usize)>,
        init: Option<usize>,
    ) -> Result<FiniteLts> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidLts(format!("duplicate state `{n}`")));
            }
        }
        let mut out = vec![Vec::new(); names.len()];
        let mut transitions = transitions;
        transitions.sort();
        transitions.dedup();
        for (s, l, d) in &transitions {
            if *s >= names.len() || *d >= names.len() {
                return Err(Error::InvalidLts("transition endpoint out of range".into()));
            }
            out[*s].push((l.clone(), *d));
        }
        if matches!(init, Some(i) if i >= names.len()) {
            return Err(Error::InvalidLts("initial state out of range".into()));
        }
        Ok(FiniteLts {
            names,
            index,
            transitions,
            out,
            init,
        })
    }

    /// States named `s0`, `s1`, ... with the given edges; `None` is tau.
    pub fn from_edges(n: usize, edges: &[(usize, Option<Action>, usize)]) -> Result<FiniteLts> {
        let names = (0..n).map(|i| format!("s{i}")).collect();
        let ts = edges
            .iter()
            .map(|(s, l, d)| {
                let label = l.clone().map(Label::Act).unwrap_or(Label::Tau);
                (*s, label, *d)
            })
            .collect();
        FiniteLts::new(names, ts, if n > 0 { Some(0) } else { None })
    }

    /// Reads the `states:` / `init:` / `src -label-> dst` text format.
    pub fn parse(text: &str) -> Result<FiniteLts> {
        let mut names: Option<Vec<String>> = None;
        let mut init_name = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::InvalidLts(format!("line {}: {msg}", i + 1));
            if let Some(rest) = line.strip_prefix("states:") {
                let list: Vec<String> = rest
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                names = Some(list);
            } else if let Some(rest) = line.strip_prefix("init:") {
                init_name = Some(rest.trim().to_string());
            } else {
                let (src, rest) = line
                    .split_once('-')
                    .ok_or_else(|| err("expected `src -label-> dst`"))?;
                let (label, dst) = rest.split_once("->").ok_or_else(|| err("expected `->`"))?;
                let label = label.trim();
                let label = if label == "tau" {
                    Label::Tau
                } else {
                    Label::Act(Action::new(label).map_err(|_| err("invalid action label"))?)
                };
                edges.push((src.trim().to_string(), label, dst.trim().to_string()));
            }
        }
        let names = names.ok_or_else(|| Error::InvalidLts("missing `states:` header".into()))?;
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let lookup = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::InvalidLts(format!("undeclared state `{n}`")))
        };
        let mut ts = Vec::new();
        for (s, l, d) in &edges {
            ts.push((lookup(s)?, l.clone(), lookup(d)?));
        }
        let init = match &init_name {
            Some(n) => Some(lookup(n)?),
            None => None,
        };
        FiniteLts::new(names, ts, init)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn init(&self) -> Option<usize> {
        self.init
    }

    pub fn transitions(&self) -> &[(usize, Label, usize)] {
        &self.transitions
    }

    pub fn successors(&self, p: usize) -> &[(Label, usize)] {
        &self.out[p]
    }

    /// Observable actions labelling some transition.
    pub fn actions(&self) -> Alphabet {
        Alphabet::new(self.transitions.iter().filter_map(|(_, l, _)| match l {
            Label::Act(a) => Some(a.clone()),
            Label::Tau => None,
        }))
    }

    fn tau_closure(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(p) = stack.pop() {
            for (l, q) in &self.out[p] {
                if *l == Label::Tau && !seen[*q] {
                    seen[*q] = true;
                    stack.push(*q);
                }
            }
        }
        (0..seen.len()).filter(|&i| seen[i]).collect()
    }

    /// Precomputes the weak transition relation `τ* a τ*`.
    pub fn weak(&self) -> WeakLts {
        let closures: Vec<Vec<usize>> = (0..self.num_states())
            .map(|p| self.tau_closure(p))
            .collect();
        let mut by_action: BTreeMap<Action, Vec<Vec<usize>>> = BTreeMap::new();
        for a in self.actions().iter() {
            let mut table = Vec::with_capacity(self.num_states());
            for p in 0..self.num_states() {
                let mut seen = vec![false; self.num_states()];
                for &q in &closures[p] {
                    for (l, r) in &self.out[q] {
                        if matches!(l, Label::Act(b) if b == a) {
                            for &s in &closures[*r] {
                                seen[s] = true;
                            }
                        }
                    }
                }
                table.push((0..seen.len()).filter(|&i| seen[i]).collect());
            }
            by_action.insert(a.clone(), table);
        }
        WeakLts {
            states: self.num_states(),
            by_action,
        }
    }
}

impl fmt::Display for FiniteLts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.names.join(", "))?;
        if let Some(i) = self.init {
            writeln!(f, "init: {}", self.names[i])?;
        }
        for (s, l, d) in &self.transitions {
            writeln!(f, "{} -{}-> {}", self.names[*s], l, self.names[*d])?;
        }
        Ok(())
    }
}

/// Weak transition relation of a finite LTS.
#[derive(Clone, Debug)]
pub struct WeakLts {
    states: usize,
    by_action: BTreeMap<Action, Vec<Vec<usize>>>,
}

impl WeakLts {
    pub fn num_states(&self) -> usize {
        self.states
    }

    /// States `q` with `p =a=> q`.
    pub fn successors(&self, p: usize, a: &Action) -> &[usize] {
        self.by_action
            .get(a)
            .map(|t| t[p].as_slice())
            .unwrap_or(&[])
    }
}
