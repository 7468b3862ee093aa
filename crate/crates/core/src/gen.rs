//! Seeded random generators for monitors, formulas and transition systems,
//! used by property tests and benchmarks.

use rand::Rng;

use crate::automata::Nfa;
use crate::lts::{FiniteLts, Label};
use crate::terms::{name, Alphabet, Formula, Monitor, Name, Verdict};

/// Which verdicts a random monitor may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictMode {
    Yes,
    No,
    Both,
}

impl VerdictMode {
    fn pick<R: Rng>(self, rng: &mut R) -> Verdict {
        let v = match self {
            VerdictMode::Yes => Verdict::Yes,
            VerdictMode::No => Verdict::No,
            VerdictMode::Both => {
                if rng.gen_bool(0.5) {
                    Verdict::Yes
                } else {
                    Verdict::No
                }
            }
        };
        if rng.gen_bool(0.1) {
            Verdict::End
        } else {
            v
        }
    }
}

/// A closed random monitor of size at most `max_size` (at least 1).
pub fn random_monitor<R: Rng>(
    rng: &mut R,
    max_size: usize,
    alphabet: &Alphabet,
    mode: VerdictMode,
) -> Monitor {
    let budget = rng.gen_range(1..=max_size.max(1));
    let mut counter = 0;
    monitor_rec(rng, budget, alphabet, mode, &mut Vec::new(), &mut counter)
}

fn monitor_rec<R: Rng>(
    rng: &mut R,
    budget: usize,
    alphabet: &Alphabet,
    mode: VerdictMode,
    bound: &mut Vec<Name>,
    counter: &mut usize,
) -> Monitor {
    if budget <= 1 || alphabet.is_empty() {
        if !bound.is_empty() && rng.gen_bool(0.5) {
            let x = bound[rng.gen_range(0..bound.len())].clone();
            return Monitor::Var(x);
        }
        return Monitor::Verdict(mode.pick(rng));
    }
    match rng.gen_range(0..10) {
        0..=4 => {
            let a = alphabet.actions()[rng.gen_range(0..alphabet.len())].clone();
            Monitor::prefix(
                a,
                monitor_rec(rng, budget - 1, alphabet, mode, bound, counter),
            )
        }
        5..=7 if budget >= 3 => {
            let left = rng.gen_range(1..budget - 1);
            let l = monitor_rec(rng, left, alphabet, mode, bound, counter);
            let r = monitor_rec(rng, budget - 1 - left, alphabet, mode, bound, counter);
            Monitor::sum(vec![l, r])
        }
        _ => {
            let x = name(&format!("x{}", *counter));
            *counter += 1;
            bound.push(x.clone());
            let body = monitor_rec(rng, budget - 1, alphabet, mode, bound, counter);
            bound.pop();
            Monitor::Rec(x, Box::new(body))
        }
    }
}

/// A random sHML formula of size at most `max_size`. When `closed` is false
/// the free variable `Y` may occur.
pub fn random_shml<R: Rng>(
    rng: &mut R,
    max_size: usize,
    alphabet: &Alphabet,
    closed: bool,
) -> Formula {
    let budget = rng.gen_range(1..=max_size.max(1));
    let mut bound = Vec::new();
    if !closed {
        bound.push(name("Y"));
    }
    let mut counter = 0;
    shml_rec(rng, budget, alphabet, &mut bound, &mut counter)
}

fn shml_rec<R: Rng>(
    rng: &mut R,
    budget: usize,
    alphabet: &Alphabet,
    bound: &mut Vec<Name>,
    counter: &mut usize,
) -> Formula {
    if budget <= 1 || alphabet.is_empty() {
        return match rng.gen_range(0..4) {
            0 => Formula::TT,
            1 if !bound.is_empty() => Formula::Var(bound[rng.gen_range(0..bound.len())].clone()),
            _ => Formula::FF,
        };
    }
    match rng.gen_range(0..10) {
        0..=4 => {
            let a = alphabet.actions()[rng.gen_range(0..alphabet.len())].clone();
            Formula::boxed(a, shml_rec(rng, budget - 1, alphabet, bound, counter))
        }
        5..=7 if budget >= 3 => {
            let left = rng.gen_range(1..budget - 1);
            let l = shml_rec(rng, left, alphabet, bound, counter);
            let r = shml_rec(rng, budget - 1 - left, alphabet, bound, counter);
            Formula::and(vec![l, r])
        }
        _ => {
            let x = name(&format!("X{}", *counter));
            *counter += 1;
            bound.push(x.clone());
            let body = shml_rec(rng, budget - 1, alphabet, bound, counter);
            bound.pop();
            Formula::Max(x, Box::new(body))
        }
    }
}

/// A random LTS with between one and `max_states` states. Each possible
/// action edge is present with probability `edge_p`, each tau edge with
/// probability `tau_p`.
pub fn random_lts<R: Rng>(
    rng: &mut R,
    max_states: usize,
    alphabet: &Alphabet,
    edge_p: f64,
    tau_p: f64,
) -> FiniteLts {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            for a in alphabet.iter() {
                if rng.gen_bool(edge_p) {
                    edges.push((s, Label::Act(a.clone()), d));
                }
            }
            if s != d && rng.gen_bool(tau_p) {
                edges.push((s, Label::Tau, d));
            }
        }
    }
    let names = (0..n).map(|i| format!("s{i}")).collect();
    FiniteLts::new(names, edges, Some(0)).expect("generated endpoints are in range")
}

/// A random NFA with between one and `max_states` states; each possible
/// transition is present with probability `edge_p` and each state accepts
/// with probability one third.
pub fn random_nfa<R: Rng>(rng: &mut R, max_states: usize, alphabet: &Alphabet, edge_p: f64) -> Nfa {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut edges = Vec::new();
    for s in 0..n {
        for a in alphabet.iter() {
            for d in 0..n {
                if rng.gen_bool(edge_p) {
                    edges.push((s, a.clone(), d));
                }
            }
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(1.0 / 3.0)).collect();
    Nfa::new(alphabet.clone(), n, 0, accepting, &edges).expect("generated endpoints are in range")
}
