//! Finite automata over monitor alphabets: conversions between monitors and
//! automata, subset construction, minimization and language equivalence.

mod convert;
mod doc;

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::terms::{Action, Alphabet};

pub use convert::{
    dfa_to_monitor, monitor_to_nfa, nfa_to_monitor, path_stats, verdict_nfa, Limits, PathStats,
    DFA_STATE_CAP, NFA_STATE_CAP,
};
pub use doc::{AutomatonDoc, Transition};

/// A nondeterministic automaton without epsilon transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    labels: Vec<String>,
    initial: usize,
    accepting: BTreeSet<usize>,
    /// `delta[q][i]` are the sorted successors of `q` on the `i`-th symbol.
    delta: Vec<Vec<Vec<usize>>>,
}

/// A deterministic automaton with a partial transition function; a missing
/// transition rejects every continuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    labels: Vec<String>,
    initial: usize,
    accepting: BTreeSet<usize>,
    delta: Vec<Vec<Option<usize>>>,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

impl Nfa {
    /// An automaton with states `q0..q{n-1}`; edges are `(src, symbol, dst)`.
    pub fn new(
        alphabet: Alphabet,
        states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        edges: &[(usize, Action, usize)],
    ) -> Result<Nfa> {
        Nfa::with_labels(alphabet, default_labels(states), initial, accepting, edges)
    }

    pub fn with_labels(
        alphabet: Alphabet,
        labels: Vec<String>,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        edges: &[(usize, Action, usize)],
    ) -> Result<Nfa> {
        let n = labels.len();
        let bad = |m: String| Err(Error::InvalidAutomaton(m));
        if initial >= n {
            return bad("initial state out of range".into());
        }
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        if accepting.iter().any(|&q| q >= n) {
            return bad("accepting state out of range".into());
        }
        let mut delta = vec![vec![Vec::new(); alphabet.len()]; n];
        for (s, a, d) in edges {
            if *s >= n || *d >= n {
                return bad("transition endpoint out of range".into());
            }
            let Some(i) = alphabet.index_of(a) else {
                return bad(format!("symbol `{a}` is not in the alphabet"));
            };
            delta[*s][i].push(*d);
        }
        for row in &mut delta {
            for succ in row.iter_mut() {
                succ.sort_unstable();
                succ.dedup();
            }
        }
        Ok(Nfa {
            alphabet,
            labels,
            initial,
            accepting,
            delta,
        })
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet,
        labels: Vec<String>,
        initial: usize,
        accepting: BTreeSet<usize>,
        delta: Vec<Vec<Vec<usize>>>,
    ) -> Nfa {
        Nfa {
            alphabet,
            labels,
            initial,
            accepting,
            delta,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    /// Successors of `q` on the symbol with index `sym`.
    pub fn successors(&self, q: usize, sym: usize) -> &[usize] {
        &self.delta[q][sym]
    }

    /// All transitions as `(src, symbol index, dst)`.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (i, succ) in row.iter().enumerate() {
                out.extend(succ.iter().map(|&d| (q, i, d)));
            }
        }
        out
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().map(Vec::len).sum()
    }

    /// Whether the automaton accepts `word`; symbols outside the alphabet
    /// reject.
    pub fn member(&self, word: &[Action]) -> bool {
        let mut cur = BTreeSet::from([self.initial]);
        for a in word {
            let Some(i) = self.alphabet.index_of(a) else {
                return false;
            };
            cur = cur
                .iter()
                .flat_map(|&q| self.delta[q][i].iter().copied())
                .collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for succ in &self.delta[q] {
                for &d in succ {
                    if seen.insert(d) {
                        stack.push(d);
                    }
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        self.reachable().iter().all(|q| !self.accepting.contains(q))
    }

    /// States from which an accepting state is reachable.
    pub fn coreachable(&self) -> BTreeSet<usize> {
        let mut rev = vec![Vec::new(); self.num_states()];
        for (s, _, d) in self.edges() {
            rev[d].push(s);
        }
        let mut seen: BTreeSet<usize> = self.accepting.clone();
        let mut stack: Vec<usize> = seen.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keeps the states that are both reachable and co-reachable. The
    /// initial state is always kept.
    pub fn trim(&self) -> Nfa {
        let reach = self.reachable();
        let co = self.coreachable();
        let keep: Vec<usize> = (0..self.num_states())
            .filter(|q| *q == self.initial || (reach.contains(q) && co.contains(q)))
            .collect();
        self.restrict(&keep)
    }

    /// The sub-automaton on `keep` (which must contain the initial state),
    /// renumbered in the given order.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Nfa {
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let delta = keep
            .iter()
            .map(|&q| {
                self.delta[q]
                    .iter()
                    .map(|succ| succ.iter().filter_map(|d| index.get(d).copied()).collect())
                    .collect()
            })
            .collect();
        Nfa {
            alphabet: self.alphabet.clone(),
            labels: keep.iter().map(|&q| self.labels[q].clone()).collect(),
            initial: index[&self.initial],
            accepting: self
                .accepting
                .iter()
                .filter_map(|q| index.get(q).copied())
                .collect(),
            delta,
        }
    }

    /// The same automaton over a larger alphabet.
    pub fn extend_alphabet(&self, alphabet: &Alphabet) -> Nfa {
        let full = self.alphabet.union(alphabet);
        let delta = self
            .delta
            .iter()
            .map(|row| {
                full.iter()
                    .map(|a| match self.alphabet.index_of(a) {
                        Some(i) => row[i].clone(),
                        None => Vec::new(),
                    })
                    .collect()
            })
            .collect();
        Nfa {
            alphabet: full,
            labels: self.labels.clone(),
            initial: self.initial,
            accepting: self.accepting.clone(),
            delta,
        }
    }

    /// Every reachable accepting state has, on every symbol, a transition
    /// to an accepting state.
    pub fn is_irrevocable(&self) -> bool {
        self.reachable()
            .iter()
            .filter(|q| self.accepting.contains(q))
            .all(|&q| {
                self.delta[q]
                    .iter()
                    .all(|succ| succ.iter().any(|d| self.accepting.contains(d)))
            })
    }

    /// Adds a self-loop on every symbol for which an accepting state has no
    /// accepting successor. The result recognizes the suffix closure.
    pub fn irrevocable_closure(&self) -> Nfa {
        let mut out = self.clone();
        for &q in &self.accepting {
            for succ in out.delta[q].iter_mut() {
                if !succ.iter().any(|d| self.accepting.contains(d)) {
                    succ.push(q);
                    succ.sort_unstable();
                }
            }
        }
        out
    }

    /// Whether the recognized language is suffix-closed.
    pub fn has_irrevocable_language(&self) -> bool {
        language_witness(self, &self.irrevocable_closure()).is_none()
    }
}

impl Dfa {
    /// A deterministic automaton with states `q0..q{n-1}`.
    pub fn new(
        alphabet: Alphabet,
        states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        edges: &[(usize, Action, usize)],
    ) -> Result<Dfa> {
        Dfa::with_labels(alphabet, default_labels(states), initial, accepting, edges)
    }

    pub fn with_labels(
        alphabet: Alphabet,
        labels: Vec<String>,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        edges: &[(usize, Action, usize)],
    ) -> Result<Dfa> {
        let nfa = Nfa::with_labels(alphabet, labels, initial, accepting, edges)?;
        Dfa::from_nfa(&nfa)
    }

    /// Reinterprets an NFA with at most one successor per state and symbol.
    pub fn from_nfa(nfa: &Nfa) -> Result<Dfa> {
        let mut delta = Vec::with_capacity(nfa.num_states());
        for row in &nfa.delta {
            let mut out = Vec::with_capacity(row.len());
            for succ in row {
                match succ.as_slice() {
                    [] => out.push(None),
                    [d] => out.push(Some(*d)),
                    _ => {
                        return Err(Error::InvalidAutomaton(
                            "more than one successor for a state and symbol".into(),
                        ))
                    }
                }
            }
            delta.push(out);
        }
        Ok(Dfa {
            alphabet: nfa.alphabet.clone(),
            labels: nfa.labels.clone(),
            initial: nfa.initial,
            accepting: nfa.accepting.clone(),
            delta,
        })
    }

    pub fn to_nfa(&self) -> Nfa {
        Nfa {
            alphabet: self.alphabet.clone(),
            labels: self.labels.clone(),
            initial: self.initial,
            accepting: self.accepting.clone(),
            delta: self
                .delta
                .iter()
                .map(|row| row.iter().map(|d| d.iter().copied().collect()).collect())
                .collect(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn next(&self, q: usize, sym: usize) -> Option<usize> {
        self.delta[q][sym]
    }

    pub fn member(&self, word: &[Action]) -> bool {
        let mut q = self.initial;
        for a in word {
            match self.alphabet.index_of(a).and_then(|i| self.delta[q][i]) {
                Some(d) => q = d,
                None => return false,
            }
        }
        self.accepting.contains(&q)
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().flatten().all(Option::is_some)
    }

    pub fn is_irrevocable(&self) -> bool {
        self.to_nfa().is_irrevocable()
    }
}

/// The reachable-subset construction; the empty subset is left out, so the
/// result may be partial.
pub fn subset_construction(nfa: &Nfa) -> Dfa {
    let k = nfa.alphabet.len();
    let start = vec![nfa.initial];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut sets = vec![start.clone()];
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = vec![None; k];
        for (sym, slot) in row.iter_mut().enumerate() {
            let mut next: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&q| nfa.delta[q][sym].iter().copied())
                .collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                continue;
            }
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = sets.len();
                    index.insert(next.clone(), j);
                    sets.push(next);
                    queue.push_back(j);
                    j
                }
            };
            *slot = Some(j);
        }
        if delta.len() <= i {
            delta.resize(i + 1, Vec::new());
        }
        delta[i] = row;
    }
    let labels = sets
        .iter()
        .map(|s| {
            let names: Vec<&str> = s.iter().map(|&q| nfa.label(q)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    let accepting = (0..sets.len())
        .filter(|&i| sets[i].iter().any(|q| nfa.accepting.contains(q)))
        .collect();
    Dfa {
        alphabet: nfa.alphabet.clone(),
        labels,
        initial: 0,
        accepting,
        delta,
    }
}

/// The minimal complete DFA for the same language, with states numbered in
/// breadth-first order from the initial state. A rejecting sink is present
/// whenever some word leaves the language for good.
pub fn minimize_dfa(dfa: &Dfa) -> Dfa {
    let k = dfa.alphabet.len();
    // Complete the automaton on its reachable part.
    let reach = dfa.to_nfa().reachable();
    let states: Vec<usize> = reach.into_iter().collect();
    let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let sink = states.len();
    let n = states.len() + 1;
    let mut delta = vec![vec![sink; k]; n];
    for (i, &q) in states.iter().enumerate() {
        for (slot, next) in delta[i].iter_mut().zip(&dfa.delta[q]) {
            if let Some(d) = next {
                *slot = pos[d];
            }
        }
    }
    let accepting: Vec<bool> = (0..n)
        .map(|i| i < sink && dfa.accepting.contains(&states[i]))
        .collect();
    // Moore partition refinement.
    let mut class: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
    loop {
        let mut signature: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for q in 0..n {
            let key = (
                class[q],
                delta[q].iter().map(|&d| class[d]).collect::<Vec<_>>(),
            );
            let fresh = signature.len();
            next[q] = *signature.entry(key).or_insert(fresh);
        }
        let old = class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if signature.len() == old {
            break;
        }
    }
    // Canonical breadth-first numbering of the classes.
    let start = class[pos[&dfa.initial]];
    let mut number: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut reps = vec![pos[&dfa.initial]];
    let mut queue = VecDeque::from([pos[&dfa.initial]]);
    while let Some(q) = queue.pop_front() {
        for &d in &delta[q] {
            if let std::collections::hash_map::Entry::Vacant(e) = number.entry(class[d]) {
                e.insert(reps.len());
                reps.push(d);
                queue.push_back(d);
            }
        }
    }
    let out_delta = reps
        .iter()
        .map(|&q| {
            (0..k)
                .map(|sym| Some(number[&class[delta[q][sym]]]))
                .collect()
        })
        .collect();
    Dfa {
        alphabet: dfa.alphabet.clone(),
        labels: default_labels(reps.len()),
        initial: 0,
        accepting: (0..reps.len()).filter(|&i| accepting[reps[i]]).collect(),
        delta: out_delta,
    }
}

/// A shortest word accepted by exactly one of the automata, if any. The
/// automata are compared over the union of their alphabets.
pub fn language_witness(a: &Nfa, b: &Nfa) -> Option<Vec<Action>> {
    let alphabet = a.alphabet.union(&b.alphabet);
    let da = subset_construction(&a.extend_alphabet(&alphabet));
    let db = subset_construction(&b.extend_alphabet(&alphabet));
    type Pair = (Option<usize>, Option<usize>);
    let start: Pair = (Some(da.initial), Some(db.initial));
    let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    let accepts = |d: &Dfa, q: Option<usize>| q.is_some_and(|q| d.accepting.contains(&q));
    while let Some(pair) = queue.pop_front() {
        if accepts(&da, pair.0) != accepts(&db, pair.1) {
            let mut word = Vec::new();
            let mut cur = pair;
            while let Some(Some((prev, sym))) = parent.get(&cur) {
                word.push(alphabet.actions()[*sym].clone());
                cur = *prev;
            }
            word.reverse();
            return Some(word);
        }
        for sym in 0..alphabet.len() {
            let next = (
                pair.0.and_then(|q| da.delta[q][sym]),
                pair.1.and_then(|q| db.delta[q][sym]),
            );
            if next == (None, None) || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some((pair, sym)));
            queue.push_back(next);
        }
    }
    None
}

pub fn language_equiv(a: &Nfa, b: &Nfa) -> bool {
    language_witness(a, b).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{word, words_up_to};

    fn act(s: &str) -> Action {
        Action::new(s).unwrap()
    }

    fn bits() -> Alphabet {
        Alphabet::from_symbols(&["0", "1"]).unwrap()
    }

    /// Words of even length over {1}: not irrevocable.
    fn even_ones() -> Dfa {
        let one = Alphabet::from_symbols(&["1"]).unwrap();
        Dfa::new(one, 2, 0, [0], &[(0, act("1"), 1), (1, act("1"), 0)]).unwrap()
    }

    /// The standard NFA for "the n-th symbol from the end is 1".
    fn ln(n: usize) -> Nfa {
        let mut edges = vec![(0, act("0"), 0), (0, act("1"), 0), (0, act("1"), 1)];
        for i in 1..n {
            edges.push((i, act("0"), i + 1));
            edges.push((i, act("1"), i + 1));
        }
        Nfa::new(bits(), n + 1, 0, [n], &edges).unwrap()
    }

    #[test]
    fn membership_and_emptiness() {
        let a = ln(2);
        assert!(a.member(&word("10")));
        assert!(a.member(&word("011")));
        assert!(!a.member(&word("01")));
        assert!(!a.member(&[act("z")]));
        assert!(!a.is_empty());
        let none = Nfa::new(bits(), 2, 0, [1], &[]).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn irrevocability() {
        assert!(!even_ones().is_irrevocable());
        let one = Alphabet::from_symbols(&["a"]).unwrap();
        let single = Nfa::new(one, 1, 0, [0], &[]).unwrap();
        assert!(!single.is_irrevocable());
        let closed = single.irrevocable_closure();
        assert_eq!(closed.successors(0, 0), &[0]);
        assert!(closed.is_irrevocable());
        assert!(!even_ones().to_nfa().has_irrevocable_language());
    }

    #[test]
    fn subset_construction_of_ln() {
        for n in 1..=5 {
            let d = subset_construction(&ln(n));
            let m = minimize_dfa(&d);
            assert_eq!(m.num_states(), 1 << n, "n = {n}");
            for w in words_up_to(&bits(), 7) {
                assert_eq!(d.member(&w), ln(n).member(&w));
                assert_eq!(m.member(&w), ln(n).member(&w));
            }
        }
    }

    #[test]
    fn dfa_input_is_preserved() {
        let d = even_ones();
        let s = subset_construction(&d.to_nfa());
        assert_eq!(s.num_states(), 2);
        assert!(language_equiv(&s.to_nfa(), &d.to_nfa()));
        let m = minimize_dfa(&d);
        assert_eq!(m.num_states(), 2);
    }

    #[test]
    fn minimization_drops_unreachable_states() {
        let a = Alphabet::from_symbols(&["a"]).unwrap();
        let d = Dfa::new(
            a,
            4,
            0,
            [1, 3],
            &[
                (0, act("a"), 1),
                (1, act("a"), 1),
                (2, act("a"), 3),
                (3, act("a"), 3),
            ],
        )
        .unwrap();
        let m = minimize_dfa(&d);
        assert_eq!(m.num_states(), 2);
        assert!(m.is_complete());
    }

    #[test]
    fn myhill_nerode_count_matches() {
        // Brute-force oracle: distinct residual languages over short words.
        let d = minimize_dfa(&subset_construction(&ln(3)));
        let words = words_up_to(&bits(), 5);
        let suffixes = words_up_to(&bits(), 4);
        let mut classes = BTreeSet::new();
        for w in &words {
            let sig: Vec<bool> = suffixes
                .iter()
                .map(|s| {
                    let mut ws = w.clone();
                    ws.extend(s.iter().cloned());
                    ln(3).member(&ws)
                })
                .collect();
            classes.insert(sig);
        }
        assert_eq!(classes.len(), d.num_states());
    }

    #[test]
    fn witnesses_are_shortest() {
        assert_eq!(language_witness(&ln(2), &ln(2)), None);
        let w = language_witness(&ln(1), &ln(2)).unwrap();
        assert_eq!(w.len(), 1);
        assert!(ln(1).member(&w) != ln(2).member(&w));
    }

    #[test]
    fn subset_construction_keeps_irrevocability() {
        let closed = ln(2).irrevocable_closure();
        let d = subset_construction(&closed);
        assert!(d.is_irrevocable());
        assert!(minimize_dfa(&d).is_irrevocable());
    }
}
