use std::collections::{BTreeSet, HashMap, VecDeque};

use super::system::EquationSystem;
use crate::error::{Error, Result};
use crate::terms::{name, rename_formula_binders, Action, Formula, Name};

/// Right-hand side of an equation in standard form: `ff`, or a conjunction
/// of boxed equation variables and free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Rhs {
    pub ff: bool,
    pub boxes: Vec<(Action, Name)>,
    pub vars: Vec<Name>,
}

impl Rhs {
    pub(crate) fn ff() -> Rhs {
        Rhs {
            ff: true,
            boxes: Vec::new(),
            vars: Vec::new(),
        }
    }

    pub(crate) fn tt() -> Rhs {
        Rhs {
            ff: false,
            boxes: Vec::new(),
            vars: Vec::new(),
        }
    }

    fn conj(&self, other: &Rhs) -> Rhs {
        if self.ff || other.ff {
            return Rhs::ff();
        }
        let mut r = self.clone();
        for b in &other.boxes {
            if !r.boxes.contains(b) {
                r.boxes.push(b.clone());
            }
        }
        for v in &other.vars {
            if !r.vars.contains(v) {
                r.vars.push(v.clone());
            }
        }
        r
    }

    pub(crate) fn to_formula(&self) -> Formula {
        if self.ff {
            return Formula::FF;
        }
        let mut cs: Vec<Formula> = self
            .boxes
            .iter()
            .map(|(a, x)| Formula::boxed(a.clone(), Formula::Var(x.clone())))
            .collect();
        cs.extend(self.vars.iter().map(|y| Formula::Var(y.clone())));
        Formula::and(cs)
    }

    /// Reads a standard-form right-hand side; `defined` are the equation
    /// variables of the system.
    pub(crate) fn from_formula(f: &Formula, defined: &BTreeSet<Name>) -> Option<Rhs> {
        if *f == Formula::FF {
            return Some(Rhs::ff());
        }
        let mut r = Rhs::tt();
        for c in f.conjuncts() {
            match c {
                Formula::TT => {}
                Formula::Box(a, b) => match &**b {
                    Formula::Var(x) if defined.contains(x) => {
                        if !r.boxes.contains(&(a.clone(), x.clone())) {
                            r.boxes.push((a.clone(), x.clone()));
                        }
                    }
                    _ => return None,
                },
                Formula::Var(y) if !defined.contains(y) => {
                    if !r.vars.contains(y) {
                        r.vars.push(y.clone());
                    }
                }
                _ => return None,
            }
        }
        Some(r)
    }
}

fn split_standard(f: &Formula) -> Result<(Formula, BTreeSet<Name>)> {
    Ok(match f {
        Formula::TT | Formula::FF => (f.clone(), BTreeSet::new()),
        Formula::Var(x) => (Formula::TT, BTreeSet::from([x.clone()])),
        Formula::Box(a, b) => {
            let (psi, vars) = split_standard(b)?;
            (Formula::boxed(a.clone(), join(psi, &vars)), BTreeSet::new())
        }
        Formula::And(cs) => {
            let mut psis = Vec::new();
            let mut vars = BTreeSet::new();
            for c in cs {
                let (p, v) = split_standard(c)?;
                if p != Formula::TT {
                    psis.push(p);
                }
                vars.extend(v);
            }
            (Formula::and(psis), vars)
        }
        Formula::Max(x, b) => {
            let (psi, mut vars) = split_standard(b)?;
            vars.remove(x);
            if vars.is_empty() {
                (Formula::Max(x.clone(), Box::new(psi)), vars)
            } else {
                let body = join(psi.clone(), &vars);
                let unfolded = psi.substitute(x, &Formula::Max(x.clone(), Box::new(body)));
                (unfolded, vars)
            }
        }
        Formula::Diamond(..) | Formula::Or(_) | Formula::Min(..) => return Err(Error::NotShml),
    })
}

/// `ψ ∧ ⋀ vars`, leaving out a trivial `ψ` unless `keep_tt`.
fn join_with(psi: Formula, vars: &BTreeSet<Name>, keep_tt: bool) -> Formula {
    if vars.is_empty() {
        return psi;
    }
    let mut cs = Vec::new();
    if psi != Formula::TT || keep_tt {
        cs.push(psi);
    }
    cs.extend(vars.iter().map(|y| Formula::Var(y.clone())));
    Formula::and(cs)
}

fn join(psi: Formula, vars: &BTreeSet<Name>) -> Formula {
    join_with(psi, vars, false)
}

/// An equivalent formula `ψ ∧ X_1 ∧ ... ∧ X_k` where `ψ` has no free
/// unguarded variables. The rewriting is applied under every modality too.
pub fn to_standard_form(f: &Formula) -> Result<Formula> {
    if !f.is_shml() {
        return Err(Error::NotShml);
    }
    let f = rename_formula_binders(f, &BTreeSet::new());
    let (psi, vars) = split_standard(&f)?;
    Ok(join_with(psi, &vars, true))
}

/// Every free unguarded variable is a top-level conjunct.
pub fn is_standard_form(f: &Formula) -> bool {
    f.is_shml()
        && f.conjuncts()
            .iter()
            .all(|c| matches!(c, Formula::Var(_)) || c.free_unguarded().is_empty())
}

/// A standard-form system of equations equivalent to an sHML formula.
///
/// Equations are named `X`, `X_1`, `X_2`, ... in breadth-first order from
/// the principal variable `X`; unreachable equations are dropped.
pub fn formula_to_system(f: &Formula) -> Result<EquationSystem> {
    if !f.is_shml() {
        return Err(Error::NotShml);
    }
    let free = f.free_vars();
    let f = rename_formula_binders(f, &free);
    let mut b = Builder::default();
    let root = b.build(&f);
    Ok(b.finish(root, free))
}

#[derive(Default)]
struct Builder {
    eqs: Vec<(Name, Rhs)>,
}

impl Builder {
    fn add(&mut self, rhs: Rhs) -> Name {
        // `#` cannot occur in parsed names, so these never clash.
        let x = name(&format!("#{}", self.eqs.len()));
        self.eqs.push((x.clone(), rhs));
        x
    }

    fn rhs(&self, x: &Name) -> &Rhs {
        &self.eqs.iter().find(|(y, _)| y == x).unwrap().1
    }

    fn build(&mut self, f: &Formula) -> Name {
        match f {
            Formula::TT => self.add(Rhs::tt()),
            Formula::FF => self.add(Rhs::ff()),
            Formula::Var(y) => self.add(Rhs {
                ff: false,
                boxes: Vec::new(),
                vars: vec![y.clone()],
            }),
            Formula::Box(a, b) => {
                let inner = self.build(b);
                self.add(Rhs {
                    ff: false,
                    boxes: vec![(a.clone(), inner)],
                    vars: Vec::new(),
                })
            }
            Formula::And(cs) => {
                let mut acc = Rhs::tt();
                for c in cs {
                    let x = self.build(c);
                    acc = acc.conj(self.rhs(&x));
                }
                self.add(acc)
            }
            Formula::Max(y, b) => {
                let start = self.eqs.len();
                let inner = self.build(b);
                let mentions = self.eqs[start..].iter().any(|(_, r)| r.vars.contains(y));
                if !mentions {
                    return inner;
                }
                let mut f1 = self.rhs(&inner).clone();
                f1.vars.retain(|v| v != y);
                let ny = self.add(f1.clone());
                for (_, r) in &mut self.eqs[start..] {
                    if r.vars.contains(y) {
                        r.vars.retain(|v| v != y);
                        *r = r.conj(&f1);
                    }
                }
                ny
            }
            Formula::Diamond(..) | Formula::Or(_) | Formula::Min(..) => {
                unreachable!("checked sHML")
            }
        }
    }

    fn finish(self, root: Name, free: BTreeSet<Name>) -> EquationSystem {
        let table: HashMap<Name, Rhs> = self.eqs.into_iter().collect();
        let mut order = vec![root.clone()];
        let mut seen = BTreeSet::from([root.clone()]);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for (_, t) in &table[&x].boxes {
                if seen.insert(t.clone()) {
                    order.push(t.clone());
                    queue.push_back(t.clone());
                }
            }
        }
        let base = variable_base(&free);
        let names: HashMap<Name, Name> = order
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let n = if i == 0 {
                    base.clone()
                } else {
                    format!("{base}_{i}")
                };
                (x.clone(), name(&n))
            })
            .collect();
        let equations = order
            .iter()
            .map(|x| {
                let r = &table[x];
                let renamed = Rhs {
                    ff: r.ff,
                    boxes: r
                        .boxes
                        .iter()
                        .map(|(a, t)| (a.clone(), names[t].clone()))
                        .collect(),
                    vars: r.vars.clone(),
                };
                (names[x].clone(), renamed.to_formula())
            })
            .collect();
        EquationSystem {
            equations,
            principal: name(&base),
            free,
        }
    }
}

/// A base name whose indexed variants do not clash with `avoid`.
pub(crate) fn variable_base(avoid: &BTreeSet<Name>) -> String {
    let clashes = |b: &str| {
        avoid
            .iter()
            .any(|y| &**y == b || y.strip_prefix(b).is_some_and(|r| r.starts_with('_')))
    };
    for b in ["X", "Z", "W", "V", "U"] {
        if !clashes(b) {
            return b.to_string();
        }
    }
    let mut k = 0;
    loop {
        let b = format!("Q{k}");
        if !clashes(&b) {
            return b;
        }
        k += 1;
    }
}

/// Every right-hand side is `ff` or a conjunction of `[a]X_j` and free variables.
pub fn is_standard_system(sys: &EquationSystem) -> bool {
    let defined: BTreeSet<Name> = sys.equations.iter().map(|(x, _)| x.clone()).collect();
    sys.equations
        .iter()
        .all(|(_, f)| Rhs::from_formula(f, &defined).is_some())
}
