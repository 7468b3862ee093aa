use std::collections::{BTreeSet, HashMap};

use super::{name, Alphabet, Formula, Monitor, Name};
use crate::error::{Error, Result};

/// Picks `base` if unused, otherwise `base1`, `base2`, ...
fn fresh(base: &str, used: &BTreeSet<Name>, start: usize) -> Name {
    if start == 0 && !used.contains(base) {
        return name(base);
    }
    let mut k = start.max(1);
    loop {
        let cand = format!("{base}{k}");
        if !used.contains(cand.as_str()) {
            return name(&cand);
        }
        k += 1;
    }
}

fn binder_counts(m: &Monitor, counts: &mut HashMap<Name, usize>, all: &mut BTreeSet<Name>) {
    match m {
        Monitor::Verdict(_) => {}
        Monitor::Var(x) => {
            all.insert(x.clone());
        }
        Monitor::Prefix(_, b) => binder_counts(b, counts, all),
        Monitor::Sum(ms) => ms.iter().for_each(|s| binder_counts(s, counts, all)),
        Monitor::Rec(x, b) => {
            *counts.entry(x.clone()).or_default() += 1;
            all.insert(x.clone());
            binder_counts(b, counts, all);
        }
    }
}

struct Renamer {
    counts: HashMap<Name, usize>,
    used: BTreeSet<Name>,
    next: HashMap<Name, usize>,
    collapse: bool,
}

impl Renamer {
    fn binder(&mut self, x: &Name) -> Name {
        if self.counts[x] == 1 {
            return x.clone();
        }
        let k = self.next.entry(x.clone()).or_insert(1);
        loop {
            let cand = format!("{x}{k}");
            *k += 1;
            if !self.used.contains(cand.as_str()) {
                let n = name(&cand);
                self.used.insert(n.clone());
                return n;
            }
        }
    }

    fn go(&mut self, m: &Monitor, scope: &mut Vec<(Name, Name)>, in_sum: bool) -> Monitor {
        match m {
            Monitor::Verdict(_) => m.clone(),
            Monitor::Var(x) => {
                let renamed = scope
                    .iter()
                    .rev()
                    .find(|(old, _)| old == x)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| x.clone());
                Monitor::Var(renamed)
            }
            Monitor::Prefix(a, b) => Monitor::prefix(a.clone(), self.go(b, scope, false)),
            Monitor::Sum(ms) => Monitor::sum(ms.iter().map(|s| self.go(s, scope, true)).collect()),
            Monitor::Rec(x, b) => {
                let nx = self.binder(x);
                scope.push((x.clone(), nx.clone()));
                let body = self.go(b, scope, false);
                scope.pop();
                match body {
                    Monitor::Verdict(v) if self.collapse && !in_sum => Monitor::Verdict(v),
                    body => Monitor::Rec(nx, Box::new(body)),
                }
            }
        }
    }
}

/// Renames binders apart, collapses `rec x.v` to `v` outside sums and
/// flattens sums. Inside a sum `rec x.v` reaches `v` silently while `v`
/// itself does not, so it is kept there.
///
/// Names bound once are kept; a name bound several times becomes `x1`,
/// `x2`, ... in left-to-right order.
pub fn well_form(m: &Monitor) -> Result<Monitor> {
    if let Some(x) = m.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(x.to_string()));
    }
    let mut counts = HashMap::new();
    let mut used = BTreeSet::new();
    binder_counts(m, &mut counts, &mut used);
    let mut r = Renamer {
        counts,
        used,
        next: HashMap::new(),
        collapse: true,
    };
    Ok(r.go(m, &mut Vec::new(), false))
}

/// Renames binders apart and flattens sums, leaving the behaviour of the
/// monitor unchanged; `rec x.v` is always kept.
pub fn rename_binders_apart(m: &Monitor) -> Result<Monitor> {
    if let Some(x) = m.free_vars().into_iter().next() {
        return Err(Error::FreeVariable(x.to_string()));
    }
    let mut counts = HashMap::new();
    let mut used = BTreeSet::new();
    binder_counts(m, &mut counts, &mut used);
    let mut r = Renamer {
        counts,
        used,
        next: HashMap::new(),
        collapse: false,
    };
    Ok(r.go(m, &mut Vec::new(), false))
}

/// Rewrites every `p + v` into `p + Σ_{a ∈ Act} a.v`.
pub fn eliminate_verdict_sums(m: &Monitor, alphabet: &Alphabet) -> Monitor {
    match m {
        Monitor::Verdict(_) | Monitor::Var(_) => m.clone(),
        Monitor::Prefix(a, b) => Monitor::prefix(a.clone(), eliminate_verdict_sums(b, alphabet)),
        Monitor::Rec(x, b) => {
            Monitor::Rec(x.clone(), Box::new(eliminate_verdict_sums(b, alphabet)))
        }
        Monitor::Sum(ms) => {
            let mut out = Vec::new();
            for s in ms {
                match s {
                    Monitor::Verdict(v) => out.extend(
                        alphabet
                            .iter()
                            .map(|a| Monitor::prefix(a.clone(), Monitor::Verdict(*v))),
                    ),
                    other => out.push(eliminate_verdict_sums(other, alphabet)),
                }
            }
            if out.is_empty() {
                Monitor::end()
            } else {
                Monitor::sum(out)
            }
        }
    }
}

/// Renames bound formula variables so that every binder has its own name,
/// distinct from the free variables and from `avoid`.
pub fn rename_formula_binders(f: &Formula, avoid: &BTreeSet<Name>) -> Formula {
    let mut used: BTreeSet<Name> = avoid.clone();
    used.extend(f.free_vars());
    rename_f(f, &mut used, &mut Vec::new())
}

fn rename_f(f: &Formula, used: &mut BTreeSet<Name>, scope: &mut Vec<(Name, Name)>) -> Formula {
    match f {
        Formula::TT | Formula::FF => f.clone(),
        Formula::Var(x) => Formula::Var(
            scope
                .iter()
                .rev()
                .find(|(old, _)| old == x)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| x.clone()),
        ),
        Formula::Box(a, b) => Formula::boxed(a.clone(), rename_f(b, used, scope)),
        Formula::Diamond(a, b) => Formula::diamond(a.clone(), rename_f(b, used, scope)),
        Formula::And(cs) => Formula::and(cs.iter().map(|c| rename_f(c, used, scope)).collect()),
        Formula::Or(cs) => Formula::or(cs.iter().map(|c| rename_f(c, used, scope)).collect()),
        Formula::Max(x, b) | Formula::Min(x, b) => {
            let nx = fresh(x, used, 0);
            used.insert(nx.clone());
            scope.push((x.clone(), nx.clone()));
            let body = rename_f(b, used, scope);
            scope.pop();
            if matches!(f, Formula::Max(..)) {
                Formula::Max(nx, Box::new(body))
            } else {
                Formula::Min(nx, Box::new(body))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{parse_monitor, Action};

    fn ab() -> Alphabet {
        Alphabet::from_symbols(&["a", "b"]).unwrap()
    }

    #[test]
    fn renames_duplicate_binders() {
        let m = parse_monitor("rec x.(a.x) + rec x.(b.x)", &ab()).unwrap();
        let w = well_form(&m).unwrap();
        assert_eq!(
            w,
            parse_monitor("rec x1. a.x1 + rec x2. b.x2", &ab()).unwrap()
        );
    }

    #[test]
    fn collapses_rec_over_verdict() {
        let m = parse_monitor("rec x.yes", &ab()).unwrap();
        assert_eq!(well_form(&m).unwrap(), Monitor::yes());
        let nested = parse_monitor("a.rec x. rec y. no", &ab()).unwrap();
        assert_eq!(
            well_form(&nested).unwrap(),
            parse_monitor("a.no", &ab()).unwrap()
        );
    }

    #[test]
    fn keeps_well_formed_terms() {
        let m_e = parse_monitor("rec x. a.(a.no + x)", &ab()).unwrap();
        assert_eq!(well_form(&m_e).unwrap(), m_e);
    }

    #[test]
    fn reports_free_variables() {
        let m = parse_monitor("a.y", &ab()).unwrap();
        assert_eq!(well_form(&m), Err(Error::FreeVariable("y".into())));
    }

    #[test]
    fn fresh_names_avoid_existing_ones() {
        let m = parse_monitor("rec x. a.x + rec x. b.x + rec x1. a.x1", &ab()).unwrap();
        let w = well_form(&m).unwrap();
        let mut binders = Vec::new();
        w.visit(&mut |t| {
            if let Monitor::Rec(x, _) = t {
                binders.push(x.to_string());
            }
        });
        let unique: BTreeSet<_> = binders.iter().collect();
        assert_eq!(unique.len(), binders.len(), "{binders:?}");
    }

    #[test]
    fn verdict_sum_elimination_examples() {
        let m = parse_monitor("a.yes + no", &ab()).unwrap();
        assert_eq!(
            eliminate_verdict_sums(&m, &ab()),
            parse_monitor("a.yes + a.no + b.no", &ab()).unwrap()
        );
        assert_eq!(
            eliminate_verdict_sums(&Monitor::yes(), &ab()),
            Monitor::yes()
        );
        let only_a = Alphabet::new([Action::new("a").unwrap()]);
        let r = parse_monitor("rec x.(x + yes)", &only_a).unwrap();
        assert_eq!(
            eliminate_verdict_sums(&r, &only_a),
            parse_monitor("rec x.(x + a.yes)", &only_a).unwrap()
        );
    }

    #[test]
    fn formula_binders_renamed_apart() {
        let f = Formula::and(vec![
            Formula::max(
                "X",
                Formula::boxed(Action::new("a").unwrap(), Formula::var("X")),
            ),
            Formula::max("X", Formula::var("Y")),
            Formula::var("X"),
        ]);
        let g = rename_formula_binders(&f, &BTreeSet::new());
        let text = g.to_string();
        assert_eq!(text, "(max X1.[a]X1) & (max X2.Y) & X");
    }
}
