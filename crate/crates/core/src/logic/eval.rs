use std::collections::{BTreeSet, HashMap};

use crate::lts::{FiniteLts, WeakLts};
use crate::terms::{Action, Formula, Name};

pub type StateSet = BTreeSet<usize>;

/// Interpretation of free logical variables; unmapped variables denote the
/// empty set.
pub type Environment = HashMap<Name, StateSet>;

pub(crate) type Bits = Vec<bool>;

pub(crate) fn to_set(bits: &[bool]) -> StateSet {
    (0..bits.len()).filter(|&i| bits[i]).collect()
}

pub(crate) fn to_bits(set: &StateSet, n: usize) -> Bits {
    let mut b = vec![false; n];
    for &i in set {
        if i < n {
            b[i] = true;
        }
    }
    b
}

/// Evaluates formulas over the weak transition relation of one LTS.
pub(crate) struct Evaluator {
    weak: WeakLts,
}

impl Evaluator {
    pub(crate) fn new(lts: &FiniteLts) -> Evaluator {
        Evaluator { weak: lts.weak() }
    }

    pub(crate) fn n(&self) -> usize {
        self.weak.num_states()
    }

    fn boxed(&self, a: &Action, inner: &[bool]) -> Bits {
        (0..self.n())
            .map(|p| self.weak.successors(p, a).iter().all(|&q| inner[q]))
            .collect()
    }

    fn diamond(&self, a: &Action, inner: &[bool]) -> Bits {
        (0..self.n())
            .map(|p| self.weak.successors(p, a).iter().any(|&q| inner[q]))
            .collect()
    }

    pub(crate) fn eval(&self, f: &Formula, env: &mut HashMap<Name, Bits>) -> Bits {
        let n = self.n();
        match f {
            Formula::TT => vec![true; n],
            Formula::FF => vec![false; n],
            Formula::Var(x) => env.get(x).cloned().unwrap_or_else(|| vec![false; n]),
            Formula::Box(a, b) => {
                let inner = self.eval(b, env);
                self.boxed(a, &inner)
            }
            Formula::Diamond(a, b) => {
                let inner = self.eval(b, env);
                self.diamond(a, &inner)
            }
            Formula::And(cs) => {
                let mut acc = vec![true; n];
                for c in cs {
                    let s = self.eval(c, env);
                    acc.iter_mut().zip(s).for_each(|(x, y)| *x &= y);
                }
                acc
            }
            Formula::Or(cs) => {
                let mut acc = vec![false; n];
                for c in cs {
                    let s = self.eval(c, env);
                    acc.iter_mut().zip(s).for_each(|(x, y)| *x |= y);
                }
                acc
            }
            Formula::Max(x, b) => self.fixpoint(x, b, env, true),
            Formula::Min(x, b) => self.fixpoint(x, b, env, false),
        }
    }

    fn fixpoint(
        &self,
        x: &Name,
        body: &Formula,
        env: &mut HashMap<Name, Bits>,
        greatest: bool,
    ) -> Bits {
        let saved = env.remove(x);
        let mut cur = vec![greatest; self.n()];
        loop {
            env.insert(x.clone(), cur.clone());
            let next = self.eval(body, env);
            if next == cur {
                break;
            }
            cur = next;
        }
        env.remove(x);
        if let Some(s) = saved {
            env.insert(x.clone(), s);
        }
        cur
    }
}

pub(crate) fn env_bits(env: &Environment, n: usize) -> HashMap<Name, Bits> {
    env.iter()
        .map(|(k, v)| (k.clone(), to_bits(v, n)))
        .collect()
}

/// The set of states satisfying `f`. Fixpoints are computed by iteration,
/// greatest from the full set and least from the empty set; modalities use
/// weak transitions.
pub fn eval_formula(f: &Formula, lts: &FiniteLts, env: &Environment) -> StateSet {
    let ev = Evaluator::new(lts);
    let mut bits = env_bits(env, ev.n());
    to_set(&ev.eval(f, &mut bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_formula, Alphabet};

    fn ab() -> Alphabet {
        Alphabet::from_symbols(&["a", "b"]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &ab()).unwrap()
    }

    fn a() -> Action {
        Action::new("a").unwrap()
    }

    fn all(n: usize) -> StateSet {
        (0..n).collect()
    }

    #[test]
    fn constants() {
        let lts = FiniteLts::from_edges(3, &[(0, Some(a()), 1)]).unwrap();
        assert_eq!(
            eval_formula(&Formula::TT, &lts, &Environment::new()),
            all(3)
        );
        assert!(eval_formula(&Formula::FF, &lts, &Environment::new()).is_empty());
    }

    #[test]
    fn box_on_a_loop() {
        let lts = FiniteLts::from_edges(1, &[(0, Some(a()), 0)]).unwrap();
        assert!(eval_formula(&f("[a]ff"), &lts, &Environment::new()).is_empty());
        assert_eq!(eval_formula(&f("[b]ff"), &lts, &Environment::new()), all(1));
    }

    #[test]
    fn chain_examples() {
        // s0 -a-> s1 -a-> s2, s3 -tau-> s0
        let lts = FiniteLts::from_edges(4, &[(0, Some(a()), 1), (1, Some(a()), 2), (3, None, 0)])
            .unwrap();
        let env = Environment::new();
        let phi_e = f("max X.[a]([a]ff & X)");
        let flat = f("[a][a]ff");
        assert_eq!(eval_formula(&phi_e, &lts, &env), StateSet::from([1, 2]));
        assert_eq!(eval_formula(&flat, &lts, &env), StateSet::from([1, 2]));
        assert_eq!(
            eval_formula(&f("<a><a>tt"), &lts, &env),
            StateSet::from([0, 3])
        );
        assert_eq!(eval_formula(&f("min X.(<a>X | [a]ff)"), &lts, &env), all(4));
    }

    #[test]
    fn environment_lookup() {
        let lts = FiniteLts::from_edges(2, &[(0, Some(a()), 1)]).unwrap();
        let mut env = Environment::new();
        env.insert("Y".into(), StateSet::from([1]));
        assert_eq!(eval_formula(&f("[a]Y"), &lts, &env), all(2));
        assert_eq!(eval_formula(&f("<a>Y"), &lts, &env), StateSet::from([0]));
        assert_eq!(eval_formula(&f("[a]Z"), &lts, &env), StateSet::from([1]));
    }
}
