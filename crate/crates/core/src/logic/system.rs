use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::eval::{env_bits, to_set, Bits, Environment, Evaluator, StateSet};
use crate::error::{Error, Result};
use crate::lts::FiniteLts;
use crate::terms::{name, parse_formula_any, Formula, Name};

/// A system of greatest-fixpoint equations `X_i = F_i` with a principal
/// variable and a set of free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub equations: Vec<(Name, Formula)>,
    pub principal: Name,
    pub free: BTreeSet<Name>,
}

impl EquationSystem {
    pub fn new(
        equations: Vec<(Name, Formula)>,
        principal: &str,
        free: BTreeSet<Name>,
    ) -> Result<EquationSystem> {
        let sys = EquationSystem {
            equations,
            principal: name(principal),
            free,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidSystem(m));
        let mut lhs = HashSet::new();
        for (x, _) in &self.equations {
            if !lhs.insert(x.clone()) {
                return invalid(format!("variable `{x}` is defined twice"));
            }
            if self.free.contains(x) {
                return invalid(format!("variable `{x}` is both defined and free"));
            }
        }
        if !lhs.contains(&self.principal) {
            return invalid(format!(
                "principal variable `{}` has no equation",
                self.principal
            ));
        }
        for (x, f) in &self.equations {
            for y in f.free_vars() {
                if !lhs.contains(&y) && !self.free.contains(&y) {
                    return invalid(format!("equation for `{x}` mentions undeclared `{y}`"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.equations.iter().position(|(y, _)| &**y == x)
    }

    pub fn rhs(&self, x: &str) -> Option<&Formula> {
        self.equations
            .iter()
            .find(|(y, _)| &**y == x)
            .map(|(_, f)| f)
    }

    /// Keeps only equations reachable from the principal variable, in their
    /// original order.
    pub fn prune(&self) -> EquationSystem {
        let mut keep = HashSet::from([self.principal.clone()]);
        let mut stack = vec![self.principal.clone()];
        while let Some(x) = stack.pop() {
            if let Some(f) = self.rhs(&x) {
                for y in f.free_vars() {
                    if self.index_of(&y).is_some() && keep.insert(y.clone()) {
                        stack.push(y);
                    }
                }
            }
        }
        EquationSystem {
            equations: self
                .equations
                .iter()
                .filter(|(x, _)| keep.contains(x))
                .cloned()
                .collect(),
            principal: self.principal.clone(),
            free: self.free.clone(),
        }
    }

    /// Reads the `principal:` / `free:` / `X = formula` text format.
    pub fn parse(text: &str) -> Result<EquationSystem> {
        let mut principal = None;
        let mut free = BTreeSet::new();
        let mut equations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("principal:") {
                principal = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("free:") {
                free.extend(
                    rest.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(name),
                );
            } else {
                let (lhs, rhs) = line.split_once('=').ok_or_else(|| Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: "expected `X = formula`".into(),
                })?;
                let f = parse_formula_any(rhs).map_err(|e| match e {
                    Error::Syntax {
                        column, message, ..
                    } => Error::Syntax {
                        line: i + 1,
                        column: column + lhs.len() + 1,
                        message,
                    },
                    other => other,
                })?;
                equations.push((name(lhs.trim()), f));
            }
        }
        let principal = match principal {
            Some(p) => p,
            None => equations
                .first()
                .map(|(x, _)| x.to_string())
                .ok_or_else(|| Error::InvalidSystem("no equations".into()))?,
        };
        EquationSystem::new(equations, &principal, free)
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "principal: {}", self.principal)?;
        if !self.free.is_empty() {
            let names: Vec<&str> = self.free.iter().map(|n| &**n).collect();
            writeln!(f, "free: {}", names.join(", "))?;
        }
        for (x, rhs) in &self.equations {
            writeln!(f, "{x} = {rhs}")?;
        }
        Ok(())
    }
}

fn solve_recursive(
    ev: &Evaluator,
    eqs: &[(Name, Formula)],
    env: &mut HashMap<Name, Bits>,
) -> Vec<Bits> {
    let Some(((x, f), rest)) = eqs.split_first() else {
        return Vec::new();
    };
    let mut cur = vec![true; ev.n()];
    loop {
        env.insert(x.clone(), cur.clone());
        let inner = solve_recursive(ev, rest, env);
        for ((y, _), s) in rest.iter().zip(&inner) {
            env.insert(y.clone(), s.clone());
        }
        let next = ev.eval(f, env);
        for (y, _) in rest {
            env.remove(y);
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    env.insert(x.clone(), cur.clone());
    let mut out = vec![cur];
    out.extend(solve_recursive(ev, rest, env));
    env.remove(x);
    out
}

/// The solution of every equation, computed by the nested recursive
/// definition: the first variable is a greatest fixpoint over the solution
/// of the remaining system. The cost grows exponentially with the number of
/// equations; [`solve_simultaneous`] computes the same vector.
pub fn solve_recursive_all(
    sys: &EquationSystem,
    lts: &FiniteLts,
    env: &Environment,
) -> Vec<StateSet> {
    let ev = Evaluator::new(lts);
    let mut bits = env_bits(env, ev.n());
    for (x, _) in &sys.equations {
        bits.remove(x);
    }
    solve_recursive(&ev, &sys.equations, &mut bits)
        .iter()
        .map(|b| to_set(b))
        .collect()
}

/// The greatest simultaneous fixpoint of all equations, iterated from the
/// full state set.
pub fn solve_simultaneous(
    sys: &EquationSystem,
    lts: &FiniteLts,
    env: &Environment,
) -> Vec<StateSet> {
    let ev = Evaluator::new(lts);
    let mut bits = env_bits(env, ev.n());
    for (x, _) in &sys.equations {
        bits.insert(x.clone(), vec![true; ev.n()]);
    }
    loop {
        let mut changed = false;
        for (x, f) in &sys.equations {
            let next = ev.eval(f, &mut bits);
            if bits[x] != next {
                bits.insert(x.clone(), next);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    sys.equations
        .iter()
        .map(|(x, _)| to_set(&bits[x]))
        .collect()
}

/// Denotation of the principal variable.
pub fn eval_system(sys: &EquationSystem, lts: &FiniteLts, env: &Environment) -> StateSet {
    let i = sys.index_of(&sys.principal).expect("validated system");
    solve_simultaneous(sys, lts, env).swap_remove(i)
}
