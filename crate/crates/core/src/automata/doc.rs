use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Dfa, Nfa};
use crate::error::{Error, Result};
use crate::terms::{Action, Alphabet};

/// One transition of an [`AutomatonDoc`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub src: String,
    pub symbol: String,
    pub dst: String,
}

/// Serializable form of an automaton. States and transitions are listed in
/// lexicographic order so that equal automata give identical documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDoc {
    /// `"nfa"` or `"dfa"`.
    pub kind: String,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<Transition>,
}

fn symbol(s: &str) -> Result<Action> {
    if s == Action::marker().as_str() {
        Ok(Action::marker())
    } else {
        Action::new(s)
    }
}

impl AutomatonDoc {
    fn build(kind: &str, nfa: &Nfa) -> AutomatonDoc {
        let mut states: Vec<String> = (0..nfa.num_states())
            .map(|q| nfa.label(q).to_string())
            .collect();
        states.sort();
        let mut accepting: Vec<String> = nfa
            .accepting()
            .iter()
            .map(|&q| nfa.label(q).to_string())
            .collect();
        accepting.sort();
        let mut transitions: Vec<Transition> = nfa
            .edges()
            .into_iter()
            .map(|(s, a, d)| Transition {
                src: nfa.label(s).to_string(),
                symbol: nfa.alphabet().actions()[a].to_string(),
                dst: nfa.label(d).to_string(),
            })
            .collect();
        transitions.sort();
        AutomatonDoc {
            kind: kind.to_string(),
            alphabet: nfa.alphabet().iter().map(|a| a.to_string()).collect(),
            states,
            initial: nfa.label(nfa.initial()).to_string(),
            accepting,
            transitions,
        }
    }

    pub fn from_nfa(nfa: &Nfa) -> AutomatonDoc {
        AutomatonDoc::build("nfa", nfa)
    }

    pub fn from_dfa(dfa: &Dfa) -> AutomatonDoc {
        AutomatonDoc::build("dfa", &dfa.to_nfa())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<AutomatonDoc> {
        serde_json::from_str(text).map_err(|e| Error::InvalidAutomaton(e.to_string()))
    }

    /// Reads the document as an NFA, whatever its kind.
    pub fn to_nfa(&self) -> Result<Nfa> {
        let bad = |m: String| Error::InvalidAutomaton(m);
        let alphabet = Alphabet::new(
            self.alphabet
                .iter()
                .map(|s| symbol(s))
                .collect::<Result<Vec<_>>>()?,
        );
        if alphabet.len() != self.alphabet.len() {
            return Err(bad("duplicate alphabet symbol".into()));
        }
        let unique: BTreeSet<&String> = self.states.iter().collect();
        if unique.len() != self.states.len() {
            return Err(bad("duplicate state name".into()));
        }
        let index = |s: &str| {
            self.states
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| bad(format!("unknown state `{s}`")))
        };
        let initial = index(&self.initial)?;
        let accepting = self
            .accepting
            .iter()
            .map(|s| index(s))
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .transitions
            .iter()
            .map(|t| Ok((index(&t.src)?, symbol(&t.symbol)?, index(&t.dst)?)))
            .collect::<Result<Vec<_>>>()?;
        Nfa::with_labels(alphabet, self.states.clone(), initial, accepting, &edges)
    }

    /// Reads the document as a DFA; fails on nondeterministic transitions.
    pub fn to_dfa(&self) -> Result<Dfa> {
        Dfa::from_nfa(&self.to_nfa()?)
    }
}
