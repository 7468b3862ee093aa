use std::collections::{BTreeSet, HashMap, VecDeque};

use super::standard::{formula_to_system, to_standard_form, Rhs};
use super::system::EquationSystem;
use crate::error::{Error, Result};
use crate::terms::{name, Action, Formula, Name};

fn defined(sys: &EquationSystem) -> BTreeSet<Name> {
    sys.equations.iter().map(|(x, _)| x.clone()).collect()
}

fn rhs_table(sys: &EquationSystem) -> Option<Vec<Rhs>> {
    let d = defined(sys);
    sys.equations
        .iter()
        .map(|(_, f)| Rhs::from_formula(f, &d))
        .collect()
}

fn rhs_is_deterministic(r: &Rhs) -> bool {
    let mut target: HashMap<&Action, &Name> = HashMap::new();
    r.boxes
        .iter()
        .all(|(a, x)| *target.entry(a).or_insert(x) == x)
}

/// Every equation is in standard form and boxes with the same action lead
/// to the same variable.
pub fn is_deterministic_system(sys: &EquationSystem) -> bool {
    rhs_table(sys).is_some_and(|t| t.iter().all(rhs_is_deterministic))
}

/// Replaces every equation set by one variable per reachable subset of
/// equations, so that each action is boxed at most once per equation.
///
/// Variables of single equations keep their names and all of them are kept;
/// the variable for a larger subset `Q` is named after the principal
/// variable followed by the sorted positions of `Q`, e.g. `X_1_2`.
pub fn determinize_system(sys: &EquationSystem) -> Result<EquationSystem> {
    sys.validate()?;
    let table = rhs_table(sys).ok_or_else(|| {
        Error::NotStandardForm(
            "every right-hand side must be ff or a conjunction of [a]X and free variables".into(),
        )
    })?;
    let index: HashMap<Name, usize> = sys
        .equations
        .iter()
        .enumerate()
        .map(|(i, (x, _))| (x.clone(), i))
        .collect();
    let mut taken: BTreeSet<Name> = defined(sys);
    taken.extend(sys.free.iter().cloned());
    let base = sys.principal.to_string();

    let mut names: HashMap<Vec<usize>, Name> = HashMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for (i, (x, _)) in sys.equations.iter().enumerate() {
        names.insert(vec![i], x.clone());
        order.push(vec![i]);
        queue.push_back(vec![i]);
    }
    let mut out = HashMap::new();
    while let Some(q) = queue.pop_front() {
        let rhs = if q.iter().any(|&i| table[i].ff) {
            Rhs::ff()
        } else {
            let mut actions: Vec<Action> = Vec::new();
            let mut targets: HashMap<Action, BTreeSet<usize>> = HashMap::new();
            let mut vars: Vec<Name> = Vec::new();
            for &i in &q {
                for (a, x) in &table[i].boxes {
                    if !targets.contains_key(a) {
                        actions.push(a.clone());
                    }
                    targets.entry(a.clone()).or_default().insert(index[x]);
                }
                for y in &table[i].vars {
                    if !vars.contains(y) {
                        vars.push(y.clone());
                    }
                }
            }
            let mut boxes = Vec::new();
            for a in actions {
                let d: Vec<usize> = targets[&a].iter().copied().collect();
                let x = match names.get(&d) {
                    Some(x) => x.clone(),
                    None => {
                        let joined: Vec<String> = d.iter().map(|i| i.to_string()).collect();
                        let mut candidate = format!("{base}_{}", joined.join("_"));
                        while taken.contains(candidate.as_str()) {
                            candidate.push_str("_s");
                        }
                        let x = name(&candidate);
                        taken.insert(x.clone());
                        names.insert(d.clone(), x.clone());
                        order.push(d.clone());
                        queue.push_back(d);
                        x
                    }
                };
                boxes.push((a, x));
            }
            Rhs {
                ff: false,
                boxes,
                vars,
            }
        };
        out.insert(q, rhs);
    }
    let equations = order
        .iter()
        .map(|q| (names[q].clone(), out[q].to_formula()))
        .collect();
    Ok(EquationSystem {
        equations,
        principal: sys.principal.clone(),
        free: sys.free.clone(),
    })
}

fn simplify_box(a: &Action, body: Formula) -> Formula {
    if body == Formula::TT {
        Formula::TT
    } else {
        Formula::boxed(a.clone(), body)
    }
}

/// Rebuilds a conjunction, dropping `tt` and letting `ff` absorb the rest.
fn simplify_and(cs: Vec<Formula>) -> Formula {
    let mut out: Vec<Formula> = Vec::new();
    for c in cs {
        for d in c.conjuncts().to_vec() {
            match d {
                Formula::TT => {}
                Formula::FF => return Formula::FF,
                d if !out.contains(&d) => out.push(d),
                _ => {}
            }
        }
    }
    Formula::and(out)
}

fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::TT | Formula::FF | Formula::Var(_) => f.clone(),
        Formula::Box(a, b) => simplify_box(a, simplify(b)),
        Formula::Diamond(a, b) => Formula::diamond(a.clone(), simplify(b)),
        Formula::And(cs) => simplify_and(cs.iter().map(simplify).collect()),
        Formula::Or(cs) => Formula::or(cs.iter().map(simplify).collect()),
        Formula::Max(x, b) => close(x, simplify(b)),
        Formula::Min(x, b) => Formula::Min(x.clone(), Box::new(simplify(b))),
    }
}

fn close(x: &Name, body: Formula) -> Formula {
    if body.free_vars().contains(x) {
        Formula::Max(x.clone(), Box::new(body))
    } else {
        body
    }
}

/// Reads a deterministic system back as a single formula by eliminating
/// equations from last to first, each as a greatest fixpoint.
pub fn system_to_formula(sys: &EquationSystem) -> Result<Formula> {
    sys.validate()?;
    if !is_deterministic_system(sys) {
        return Err(Error::NotDeterministicForm(
            "boxes with the same action must lead to the same variable".into(),
        ));
    }
    let mut eqs = sys.prune().equations;
    let p = eqs.iter().position(|(x, _)| *x == sys.principal).unwrap();
    let principal = eqs.remove(p);
    eqs.insert(0, principal);
    let mut eqs: Vec<(Name, Formula)> = eqs.into_iter().map(|(x, f)| (x, simplify(&f))).collect();
    while eqs.len() > 1 {
        let (x, f) = eqs.pop().unwrap();
        let solved = close(&x, f);
        for (_, g) in &mut eqs {
            *g = simplify(&g.substitute(&x, &solved));
        }
    }
    let (x, f) = eqs.pop().unwrap();
    Ok(close(&x, f))
}

/// Two distinct conjuncts of any conjunction are boxes with different
/// actions, unless one of them is a free variable of the whole formula.
pub fn is_deterministic_form(f: &Formula) -> bool {
    if !f.is_shml() {
        return false;
    }
    let free = f.free_vars();
    let mut ok = true;
    check_det(f, &free, &mut ok);
    ok
}

fn check_det(f: &Formula, free: &BTreeSet<Name>, ok: &mut bool) {
    match f {
        Formula::TT | Formula::FF | Formula::Var(_) => {}
        Formula::Box(_, b) | Formula::Diamond(_, b) | Formula::Max(_, b) | Formula::Min(_, b) => {
            check_det(b, free, ok)
        }
        Formula::And(cs) | Formula::Or(cs) => {
            let is_free = |c: &Formula| matches!(c, Formula::Var(y) if free.contains(y));
            for (i, c1) in cs.iter().enumerate() {
                for c2 in &cs[i + 1..] {
                    if c1 == c2 || is_free(c1) || is_free(c2) {
                        continue;
                    }
                    match (c1, c2) {
                        (Formula::Box(a1, _), Formula::Box(a2, _)) if a1 != a2 => {}
                        _ => *ok = false,
                    }
                }
            }
            cs.iter().for_each(|c| check_det(c, free, ok));
        }
    }
}

/// An equivalent sHML formula in deterministic form, obtained through
/// standard form, a standard system, its determinization and read-back.
pub fn determinize_formula(f: &Formula) -> Result<Formula> {
    let standard = to_standard_form(f)?;
    let sys = formula_to_system(&standard)?;
    let det = determinize_system(&sys)?;
    system_to_formula(&det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::{eval_formula, Environment};
    use crate::logic::system::eval_system;
    use crate::lts::FiniteLts;
    use crate::terms::{parse_formula, Alphabet};

    fn ab() -> Alphabet {
        Alphabet::from_symbols(&["a", "b"]).unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &ab()).unwrap()
    }

    fn sys(text: &str) -> EquationSystem {
        EquationSystem::parse(text).unwrap()
    }

    /// Every LTS over {a} with at most two states.
    fn small_lts() -> Vec<FiniteLts> {
        let a = Action::new("a").unwrap();
        let mut out = Vec::new();
        for n in 1..=2usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|s| (0..n).map(move |d| (s, d))).collect();
            for mask in 0..(1u32 << pairs.len()) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &(s, d))| (s, Some(a.clone()), d))
                    .collect();
                out.push(FiniteLts::from_edges(n, &edges).unwrap());
            }
        }
        out
    }

    #[test]
    fn determinizes_phi_e_system() {
        let s = sys("X = [a]X_1\nX_1 = [a]X_2 & [a]X_1\nX_2 = ff\n");
        let d = determinize_system(&s).unwrap();
        assert_eq!(d, sys("X = [a]X_1\nX_1 = [a]X_1_2\nX_2 = ff\nX_1_2 = ff\n"));
        assert!(is_deterministic_system(&d));
        assert!(!is_deterministic_system(&s));
    }

    #[test]
    fn determinizes_pair_system() {
        let s = sys("X = [a]X & [a]Y\nY = ff\n");
        let d = determinize_system(&s).unwrap();
        assert_eq!(d, sys("X = [a]X_0_1\nY = ff\nX_0_1 = ff\n"));
        let env = Environment::new();
        for lts in small_lts() {
            assert_eq!(eval_system(&s, &lts, &env), eval_system(&d, &lts, &env));
        }
    }

    #[test]
    fn deterministic_systems_are_kept() {
        let s = sys("X = [a]X_1 & [b]X\nX_1 = ff\n");
        assert_eq!(determinize_system(&s).unwrap(), s);
    }

    #[test]
    fn rejects_non_standard_systems() {
        let s = sys("X = [a][a]ff");
        assert!(matches!(
            determinize_system(&s),
            Err(Error::NotStandardForm(_))
        ));
        assert!(matches!(
            system_to_formula(&sys("X = [a]X & [a]Z\nZ = ff")),
            Err(Error::NotDeterministicForm(_))
        ));
    }

    #[test]
    fn read_back_examples() {
        let s = sys("X = [a]X_1\nX_1 = [a]X_1_2\nX_2 = ff\nX_1_2 = ff\n");
        assert_eq!(system_to_formula(&s).unwrap(), f("[a][a]ff"));
        assert_eq!(system_to_formula(&sys("X = ff")).unwrap(), Formula::FF);
        assert_eq!(
            system_to_formula(&sys("X = [a]X")).unwrap(),
            f("max X.[a]X")
        );
    }

    #[test]
    fn determinize_formula_examples() {
        let phi_e = f("max X.[a]([a]ff & X)");
        assert_eq!(determinize_formula(&phi_e).unwrap(), f("[a][a]ff"));
        assert_eq!(determinize_formula(&f("[a]ff")).unwrap(), f("[a]ff"));
    }

    #[test]
    fn form_predicates() {
        let flat = f("[a][a]ff");
        let phi_e = f("max X.[a]([a]ff & X)");
        assert!(is_deterministic_form(&flat));
        assert!(!is_deterministic_form(&phi_e));
        assert!(is_deterministic_form(&f("[a]([a]ff & X)")));
        assert!(!is_deterministic_form(&f("[a]X & [a]Y")));
    }

    #[test]
    fn determinized_formulas_stay_equivalent() {
        let env = Environment::new();
        for text in [
            "max X.[a]([a]ff & X)",
            "max X.([a]X & [a][a]ff)",
            "[a]([a]ff & [a][a]ff) & [a]max X.[a]X",
            "max X.([a]X & max Z.[a]([a]Z & [a]ff))",
        ] {
            let g = f(text);
            let d = determinize_formula(&g).unwrap();
            assert!(is_deterministic_form(&d), "{text} -> {d}");
            for lts in small_lts() {
                assert_eq!(
                    eval_formula(&g, &lts, &env),
                    eval_formula(&d, &lts, &env),
                    "{text} -> {d}"
                );
            }
        }
    }
}
