//! Verdict equivalence of monitors: an exact decision procedure, a bounded
//! oracle, and the simple traces used in size lower bounds.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::automata::{language_witness, verdict_nfa};
use crate::error::{format_trace, Result};
use crate::semantics::{verdicts_of, Machine, RuleSystem};
use crate::terms::{Action, Alphabet, Monitor, Verdict};

/// A trace on which exactly one of two monitors reaches `verdict`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub verdict: Verdict,
    pub trace: Vec<Action>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.verdict, format_trace(&self.trace))
    }
}

fn compared(include_end: bool) -> Vec<Verdict> {
    let mut vs = vec![Verdict::Yes, Verdict::No];
    if include_end {
        vs.push(Verdict::End);
    }
    vs
}

/// A shortest distinguishing trace for the first verdict (in the order
/// `yes`, `no`, `end`) whose languages differ, or `None` when the monitors
/// are equivalent. `end` is compared only when `include_end` is set.
pub fn verdict_witness(
    m1: &Monitor,
    m2: &Monitor,
    alphabet: &Alphabet,
    include_end: bool,
) -> Result<Option<Witness>> {
    let alphabet = alphabet.union(&m1.actions()).union(&m2.actions());
    for verdict in compared(include_end) {
        let a = verdict_nfa(m1, verdict, &alphabet)?;
        let b = verdict_nfa(m2, verdict, &alphabet)?;
        if let Some(trace) = language_witness(&a, &b) {
            return Ok(Some(Witness { verdict, trace }));
        }
    }
    Ok(None)
}

/// Whether both monitors reach `yes` and `no` on exactly the same traces.
pub fn verdict_equiv(m1: &Monitor, m2: &Monitor, alphabet: &Alphabet) -> Result<bool> {
    Ok(verdict_witness(m1, m2, alphabet, false)?.is_none())
}

/// Compares the `yes`/`no` verdicts reached on every trace of length at most
/// `max_len` under the substitution rules.
pub fn bounded_equiv(
    m1: &Monitor,
    m2: &Monitor,
    alphabet: &Alphabet,
    max_len: usize,
) -> Result<bool> {
    let alphabet = alphabet.union(&m1.actions()).union(&m2.actions());
    let k1 = Machine::new(m1, RuleSystem::O, &alphabet)?;
    let k2 = Machine::new(m2, RuleSystem::O, &alphabet)?;
    let conclusive = |set: &HashSet<Monitor>| -> BTreeSet<Verdict> {
        verdicts_of(set.iter())
            .into_iter()
            .filter(|v| *v != Verdict::End)
            .collect()
    };
    let mut stack = vec![(
        k1.tau_closure(HashSet::from([m1.clone()])),
        k2.tau_closure(HashSet::from([m2.clone()])),
        0usize,
    )];
    while let Some((s1, s2, depth)) = stack.pop() {
        if conclusive(&s1) != conclusive(&s2) {
            return Ok(false);
        }
        if depth == max_len {
            continue;
        }
        for a in alphabet.iter() {
            stack.push((k1.after(&s1, a), k2.after(&s2, a), depth + 1));
        }
    }
    Ok(true)
}

/// Targets of single steps that use neither the verdict self-loop nor a
/// backward jump to a binder.
fn simple_steps(m: &Monitor, out: &mut Vec<(Option<Action>, Monitor)>) {
    match m {
        Monitor::Verdict(_) | Monitor::Var(_) => {}
        Monitor::Prefix(a, b) => out.push((Some(a.clone()), (**b).clone())),
        Monitor::Sum(ms) => ms.iter().for_each(|s| simple_steps(s, out)),
        Monitor::Rec(_, b) => out.push((None, (**b).clone())),
    }
}

/// Traces of length at most `max_len` with a derivation from `m` that uses
/// neither the verdict self-loop nor a backward jump. Such derivations only
/// move into subterms, so no returned trace is longer than the height of `m`.
pub fn simple_traces(m: &Monitor, max_len: usize) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(m.clone(), Vec::new())];
    while let Some((t, trace)) = stack.pop() {
        if !seen.insert((t.clone(), trace.clone())) {
            continue;
        }
        out.insert(trace.clone());
        let mut steps = Vec::new();
        simple_steps(&t, &mut steps);
        for (label, next) in steps {
            match label {
                None => stack.push((next, trace.clone())),
                Some(a) if trace.len() < max_len => {
                    let mut longer = trace.clone();
                    longer.push(a);
                    stack.push((next, longer));
                }
                Some(_) => {}
            }
        }
    }
    out
}

/// A split `x · u · z` of a trace with `u` non-empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pump {
    pub x: Vec<Action>,
    pub u: Vec<Action>,
    pub z: Vec<Action>,
}

/// For a trace that is not simple for `m`, a split `x u z` such that `m`
/// reaches the same verdicts on `x u^i z` for `i` in `0..=3`. Candidates
/// are tried with the shortest `x`, then the shortest `u`; each is checked
/// before it is returned. `None` when the trace is simple or no split
/// passes the check.
pub fn pump_check(m: &Monitor, trace: &[Action], alphabet: &Alphabet) -> Result<Option<Pump>> {
    if simple_traces(m, trace.len()).contains(trace) {
        return Ok(None);
    }
    let alphabet = alphabet
        .union(&m.actions())
        .union(&Alphabet::new(trace.iter().cloned()));
    let machine = Machine::new(m, RuleSystem::O, &alphabet)?;
    let target = machine.verdicts_on(m, trace);
    let n = trace.len();
    for start in 0..n {
        for end in start + 1..=n {
            let (x, u, z) = (&trace[..start], &trace[start..end], &trace[end..]);
            let holds = (0..=3).all(|i| {
                let mut w = x.to_vec();
                for _ in 0..i {
                    w.extend_from_slice(u);
                }
                w.extend_from_slice(z);
                machine.verdicts_on(m, &w) == target
            });
            if holds {
                return Ok(Some(Pump {
                    x: x.to_vec(),
                    u: u.to_vec(),
                    z: z.to_vec(),
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Limits;
    use crate::gen::{random_monitor, VerdictMode};
    use crate::pipeline::{determinize_monitor, Method};
    use crate::terms::{eliminate_verdict_sums, parse_monitor, well_form, word};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn ab() -> Alphabet {
        Alphabet::from_symbols(&["a", "b"]).unwrap()
    }

    fn mon(s: &str) -> Monitor {
        parse_monitor(
            s,
            &Alphabet::from_symbols(&["a", "b", "req", "res", "cls"]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let m_e = mon("rec x.a.(a.no + x)");
        assert!(verdict_equiv(&m_e, &mon("a.a.no"), &ab()).unwrap());
        let server = mon("rec x.(req.cls.no + req.res.x)");
        let server2 = mon("req.(res.(rec y.req.(res.y + cls.no)) + cls.no)");
        assert!(verdict_equiv(&server, &server2, &Alphabet::new([])).unwrap());
        let w = verdict_witness(&m_e, &mon("a.yes + a.no"), &ab(), false)
            .unwrap()
            .unwrap();
        assert_eq!(
            w,
            Witness {
                verdict: Verdict::Yes,
                trace: word("a")
            }
        );
        assert_eq!(w.to_string(), "yes on a");
    }

    #[test]
    fn end_is_compared_on_request() {
        let (m1, m2) = (mon("a.end + b.no"), mon("b.no"));
        assert!(verdict_equiv(&m1, &m2, &ab()).unwrap());
        let w = verdict_witness(&m1, &m2, &ab(), true).unwrap().unwrap();
        assert_eq!((w.verdict, w.trace), (Verdict::End, word("a")));
    }

    #[test]
    fn bounded_examples() {
        let m_e = mon("rec x.a.(a.no + x)");
        assert!(bounded_equiv(&m_e, &m_e, &ab(), 4).unwrap());
        assert!(bounded_equiv(&m_e, &mon("a.a.no"), &ab(), 6).unwrap());
        assert!(!bounded_equiv(&mon("a.yes"), &mon("b.yes"), &ab(), 1).unwrap());
        assert!(bounded_equiv(&mon("a.a.yes"), &mon("a.a.no"), &ab(), 1).unwrap());
    }

    #[test]
    fn decision_agrees_with_the_bounded_oracle() {
        let mut rng = StdRng::seed_from_u64(8);
        let mut equal = 0;
        for i in 0..500 {
            let m1 = random_monitor(&mut rng, 12, &ab(), VerdictMode::Both);
            let m2 = match i % 4 {
                0 => random_monitor(&mut rng, 12, &ab(), VerdictMode::Both),
                1 => well_form(&m1).unwrap(),
                2 => eliminate_verdict_sums(&m1, &ab()),
                _ if m1.is_single_verdict() => determinize_monitor(
                    &m1,
                    Method::Automata,
                    &ab(),
                    Limits {
                        force: true,
                        deadline: None,
                    },
                )
                .unwrap(),
                _ => random_monitor(&mut rng, 6, &ab(), VerdictMode::Both),
            };
            let bounded = bounded_equiv(&m1, &m2, &ab(), 6).unwrap();
            if verdict_equiv(&m1, &m2, &ab()).unwrap() {
                equal += 1;
                assert!(bounded, "{m1} vs {m2}");
                continue;
            }
            // Inequivalent: the oracle sees it iff some verdict differs
            // within its bound.
            let short = [Verdict::Yes, Verdict::No].iter().any(|&v| {
                let a = verdict_nfa(&m1, v, &ab()).unwrap();
                let b = verdict_nfa(&m2, v, &ab()).unwrap();
                language_witness(&a, &b).is_some_and(|w| w.len() <= 6)
            });
            assert_eq!(bounded, !short, "{m1} vs {m2}");
        }
        assert!(equal > 100);
    }

    #[test]
    fn simple_trace_examples() {
        assert_eq!(simple_traces(&mon("yes"), 3), BTreeSet::from([vec![]]));
        assert_eq!(
            simple_traces(&mon("a.b.no"), 5),
            BTreeSet::from([vec![], word("a"), word("ab")])
        );
        assert_eq!(
            simple_traces(&mon("rec x.a.x"), 5),
            BTreeSet::from([vec![], word("a")])
        );
    }

    #[test]
    fn pumping_examples() {
        let m = mon("rec x.(a.x + b.no)");
        let p = pump_check(&m, &word("aaab"), &ab()).unwrap().unwrap();
        assert!(!p.u.is_empty() && p.u.iter().all(|a| a.as_str() == "a"));
        assert_eq!(
            pump_check(&mon("a.b.no"), &word("ab"), &ab()).unwrap(),
            None
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn simple_traces_are_bounded_by_size(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = random_monitor(&mut rng, 14, &ab(), VerdictMode::Both);
            let traces = simple_traces(&m, m.height());
            prop_assert!(traces.len() <= m.size(), "{}", m);
            for t in &traces {
                prop_assert!(t.len() <= m.height());
                for k in 0..t.len() {
                    prop_assert!(traces.contains(&t[..k]));
                }
            }
            prop_assert_eq!(simple_traces(&m, m.height() + 3), traces);
        }

        #[test]
        fn pumps_are_verified(seed in any::<u64>(), t in "[ab]{0,6}") {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = random_monitor(&mut rng, 10, &ab(), VerdictMode::Both);
            let trace = word(&t);
            if let Some(p) = pump_check(&m, &trace, &ab()).unwrap() {
                prop_assert!(!p.u.is_empty());
                let whole: Vec<Action> = p.x.iter().chain(&p.u).chain(&p.z).cloned().collect();
                prop_assert_eq!(whole, trace);
            }
        }
    }
}
