//! Operational semantics of monitors under the three rule systems, of
//! processes, and of monitored systems.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::lts::{FiniteLts, Label};
use crate::terms::{Action, Alphabet, Monitor, Name, ProcLabel, Process, Verdict};

/// How recursion is unfolded.
///
/// `O` substitutes (`rec x.m -> m[rec x.m/x]`); `N` jumps forward into the
/// body and back from `x` to `rec x.m`; `M` jumps forward and from `x`
/// directly to the body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleSystem {
    O,
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    MAct,
    MRec,
    MRecF,
    MRecB,
    MRecP,
    MSelL,
    MSelR,
    MVerd,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::MAct => "mAct",
            Rule::MRec => "mRec",
            Rule::MRecF => "mRecF",
            Rule::MRecB => "mRecB",
            Rule::MRecP => "mRecP",
            Rule::MSelL => "mSelL",
            Rule::MSelR => "mSelR",
            Rule::MVerd => "mVerd",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub label: Label,
    pub target: Monitor,
    /// Outermost rule of the derivation.
    pub rule: Rule,
}

/// Executes monitors in one rule system. For `M` and `N` the machine is
/// built from the initial monitor, which fixes the binder of each variable.
#[derive(Clone, Debug)]
pub struct Machine {
    system: RuleSystem,
    alphabet: Alphabet,
    binders: HashMap<Name, Monitor>,
}

impl Machine {
    pub fn new(initial: &Monitor, system: RuleSystem, alphabet: &Alphabet) -> Result<Machine> {
        let mut binders = HashMap::new();
        if system != RuleSystem::O {
            if let Some(x) = initial.free_vars().into_iter().next() {
                return Err(Error::FreeVariable(x.to_string()));
            }
            let mut dup = None;
            initial.visit(&mut |t| {
                if let Monitor::Rec(x, _) = t {
                    if let Some(prev) = binders.insert(x.clone(), t.clone()) {
                        if prev != *t {
                            dup = Some(x.clone());
                        }
                    }
                }
            });
            if let Some(x) = dup {
                return Err(Error::DuplicateBinder(x.to_string()));
            }
        }
        Ok(Machine {
            system,
            alphabet: alphabet.clone(),
            binders,
        })
    }

    pub fn system(&self) -> RuleSystem {
        self.system
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// One-step transitions in a fixed enumeration order.
    pub fn steps(&self, m: &Monitor) -> Vec<Step> {
        match m {
            Monitor::Verdict(_) => self
                .alphabet
                .iter()
                .map(|a| Step {
                    label: Label::Act(a.clone()),
                    target: m.clone(),
                    rule: Rule::MVerd,
                })
                .collect(),
            Monitor::Prefix(a, b) => vec![Step {
                label: Label::Act(a.clone()),
                target: (**b).clone(),
                rule: Rule::MAct,
            }],
            Monitor::Sum(ms) => {
                let mut out = Vec::new();
                for (i, s) in ms.iter().enumerate() {
                    let rule = if i == 0 { Rule::MSelL } else { Rule::MSelR };
                    out.extend(self.steps(s).into_iter().map(|st| Step { rule, ..st }));
                }
                out
            }
            Monitor::Rec(x, b) => match self.system {
                RuleSystem::O => vec![Step {
                    label: Label::Tau,
                    target: b.substitute(x, m),
                    rule: Rule::MRec,
                }],
                RuleSystem::M | RuleSystem::N => vec![Step {
                    label: Label::Tau,
                    target: (**b).clone(),
                    rule: Rule::MRecF,
                }],
            },
            Monitor::Var(x) => match (self.system, self.binders.get(x)) {
                (RuleSystem::N, Some(p)) => vec![Step {
                    label: Label::Tau,
                    target: p.clone(),
                    rule: Rule::MRecB,
                }],
                (RuleSystem::M, Some(Monitor::Rec(_, body))) => vec![Step {
                    label: Label::Tau,
                    target: (**body).clone(),
                    rule: Rule::MRecP,
                }],
                _ => Vec::new(),
            },
        }
    }

    fn tau_targets(&self, m: &Monitor) -> Vec<Monitor> {
        match m {
            Monitor::Verdict(_) | Monitor::Prefix(..) => Vec::new(),
            _ => self
                .steps(m)
                .into_iter()
                .filter(|s| s.label == Label::Tau)
                .map(|s| s.target)
                .collect(),
        }
    }

    /// All monitors reachable by zero or more tau steps.
    pub fn tau_closure(&self, start: HashSet<Monitor>) -> HashSet<Monitor> {
        let mut seen = start;
        let mut stack: Vec<Monitor> = seen.iter().cloned().collect();
        while let Some(m) = stack.pop() {
            for t in self.tau_targets(&m) {
                if !seen.contains(&t) {
                    seen.insert(t.clone());
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Weak `a`-successors of a tau-closed set.
    pub fn after(&self, set: &HashSet<Monitor>, a: &Action) -> HashSet<Monitor> {
        let mut next = HashSet::new();
        for m in set {
            for s in self.steps(m) {
                if matches!(&s.label, Label::Act(b) if b == a) {
                    next.insert(s.target);
                }
            }
        }
        self.tau_closure(next)
    }

    /// Monitors `m'` with `m =t=> m'`.
    pub fn derive(&self, m: &Monitor, trace: &[Action]) -> BTreeSet<Monitor> {
        let mut cur = self.tau_closure(HashSet::from([m.clone()]));
        for a in trace {
            if cur.is_empty() {
                break;
            }
            cur = self.after(&cur, a);
        }
        cur.into_iter().collect()
    }

    pub fn verdicts_on(&self, m: &Monitor, trace: &[Action]) -> BTreeSet<Verdict> {
        verdicts_of(self.derive(m, trace).iter())
    }
}

pub fn verdicts_of<'a, I: IntoIterator<Item = &'a Monitor>>(ms: I) -> BTreeSet<Verdict> {
    ms.into_iter().filter_map(Monitor::as_verdict).collect()
}

pub fn steps(m: &Monitor, system: RuleSystem, alphabet: &Alphabet) -> Result<Vec<Step>> {
    Ok(Machine::new(m, system, alphabet)?.steps(m))
}

pub fn derive(
    m: &Monitor,
    trace: &[Action],
    system: RuleSystem,
    alphabet: &Alphabet,
) -> Result<BTreeSet<Monitor>> {
    Ok(Machine::new(m, system, alphabet)?.derive(m, trace))
}

/// `{v | m =trace=> v}`; `end` is included only when reached syntactically.
pub fn verdicts_on(
    m: &Monitor,
    trace: &[Action],
    system: RuleSystem,
    alphabet: &Alphabet,
) -> Result<BTreeSet<Verdict>> {
    Ok(Machine::new(m, system, alphabet)?.verdicts_on(m, trace))
}

/// Every sum of two or more summands is a sum of prefixes with distinct actions.
pub fn is_deterministic(m: &Monitor) -> bool {
    let mut ok = true;
    m.visit(&mut |t| {
        if let Monitor::Sum(ms) = t {
            let mut seen = HashSet::new();
            for s in ms {
                match s {
                    Monitor::Prefix(a, _) if seen.insert(a.clone()) => {}
                    _ => ok = false,
                }
            }
        }
    });
    ok
}

// ---------------------------------------------------------------------------
// Processes

/// One-step transitions of a process; `None` is tau.
pub fn process_steps(p: &Process) -> Vec<(Option<ProcLabel>, Process)> {
    match p {
        Process::Nil | Process::Var(_) => Vec::new(),
        Process::Prefix(l, b) => vec![(Some(l.clone()), (**b).clone())],
        Process::Sum(ps) => ps.iter().flat_map(process_steps).collect(),
        Process::Rec(x, b) => vec![(None, b.substitute(x, p))],
    }
}

fn process_closure(start: HashSet<Process>) -> HashSet<Process> {
    let mut seen = start;
    let mut stack: Vec<Process> = seen.iter().cloned().collect();
    while let Some(p) = stack.pop() {
        for (l, q) in process_steps(&p) {
            if l.is_none() && !seen.contains(&q) {
                seen.insert(q.clone());
                stack.push(q);
            }
        }
    }
    seen
}

/// Processes reachable from `p` along the weak trace.
pub fn process_derive(p: &Process, trace: &[ProcLabel]) -> HashSet<Process> {
    let mut cur = process_closure(HashSet::from([p.clone()]));
    for l in trace {
        let mut next = HashSet::new();
        for q in &cur {
            for (m, r) in process_steps(q) {
                if m.as_ref() == Some(l) {
                    next.insert(r);
                }
            }
        }
        cur = process_closure(next);
    }
    cur
}

// ---------------------------------------------------------------------------
// Monitored systems

/// Transitions of the monitored system `m ◁ p` (rules iMon, iTer, iAsyP, iAsyM).
pub fn monitored_step(
    m: &Monitor,
    p: usize,
    lts: &FiniteLts,
    alphabet: &Alphabet,
) -> Vec<(Label, Monitor, usize)> {
    let machine = Machine {
        system: RuleSystem::O,
        alphabet: alphabet.union(&lts.actions()),
        binders: HashMap::new(),
    };
    monitored_step_with(&machine.steps(m), m, p, lts)
}

fn monitored_step_with(
    msteps: &[Step],
    m: &Monitor,
    p: usize,
    lts: &FiniteLts,
) -> Vec<(Label, Monitor, usize)> {
    let mut out = Vec::new();
    let has_tau = msteps.iter().any(|s| s.label == Label::Tau);
    for (l, q) in lts.successors(p) {
        match l {
            Label::Tau => out.push((Label::Tau, m.clone(), *q)),
            Label::Act(a) => {
                let mut matched = false;
                for s in msteps {
                    if matches!(&s.label, Label::Act(b) if b == a) {
                        matched = true;
                        out.push((l.clone(), s.target.clone(), *q));
                    }
                }
                if !matched && !has_tau {
                    out.push((l.clone(), Monitor::end(), *q));
                }
            }
        }
    }
    for s in msteps {
        if s.label == Label::Tau {
            out.push((Label::Tau, s.target.clone(), p));
        }
    }
    out
}

/// Explores monitored systems for one monitor, caching monitor steps.
pub struct MonitoredSystem<'a> {
    lts: &'a FiniteLts,
    machine: Machine,
    ids: HashMap<Monitor, usize>,
    terms: Vec<Monitor>,
    cache: Vec<Option<Vec<Step>>>,
}

impl<'a> MonitoredSystem<'a> {
    pub fn new(lts: &'a FiniteLts, alphabet: &Alphabet) -> MonitoredSystem<'a> {
        MonitoredSystem {
            lts,
            machine: Machine {
                system: RuleSystem::O,
                alphabet: alphabet.union(&lts.actions()),
                binders: HashMap::new(),
            },
            ids: HashMap::new(),
            terms: Vec::new(),
            cache: Vec::new(),
        }
    }

    fn id(&mut self, m: &Monitor) -> usize {
        if let Some(&i) = self.ids.get(m) {
            return i;
        }
        let i = self.terms.len();
        self.ids.insert(m.clone(), i);
        self.terms.push(m.clone());
        self.cache.push(None);
        i
    }

    fn successors(&mut self, mi: usize, p: usize) -> Vec<(usize, usize)> {
        if self.cache[mi].is_none() {
            let st = self.machine.steps(&self.terms[mi]);
            self.cache[mi] = Some(st);
        }
        let m = self.terms[mi].clone();
        let msteps = self.cache[mi].as_ref().unwrap();
        let next = monitored_step_with(msteps, &m, p, self.lts);
        next.into_iter()
            .map(|(_, m2, q)| (self.id(&m2), q))
            .collect()
    }

    /// True when `m ◁ p` can reach a configuration with verdict `v`.
    pub fn reaches(&mut self, m: &Monitor, p: usize, v: Verdict) -> bool {
        let start = (self.id(m), p);
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((mi, q)) = queue.pop_front() {
            if self.terms[mi].as_verdict() == Some(v) {
                return true;
            }
            for next in self.successors(mi, q) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        false
    }
}

/// Acceptance: `m ◁ p =t=> yes ◁ p'` for some `t`.
pub fn acc(m: &Monitor, p: usize, lts: &FiniteLts, alphabet: &Alphabet) -> bool {
    MonitoredSystem::new(lts, alphabet).reaches(m, p, Verdict::Yes)
}

/// Rejection: `m ◁ p =t=> no ◁ p'` for some `t`.
pub fn rej(m: &Monitor, p: usize, lts: &FiniteLts, alphabet: &Alphabet) -> bool {
    MonitoredSystem::new(lts, alphabet).reaches(m, p, Verdict::No)
}

/// States `p` of the LTS such that `m ◁ p` reaches verdict `v`.
pub fn states_reaching(
    m: &Monitor,
    v: Verdict,
    lts: &FiniteLts,
    alphabet: &Alphabet,
) -> BTreeSet<usize> {
    let mut sys = MonitoredSystem::new(lts, alphabet);
    (0..lts.num_states())
        .filter(|&p| sys.reaches(m, p, v))
        .collect()
}

// ---------------------------------------------------------------------------
// Submonitor graph (system N on hash-consed submonitors)

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Verdict(Verdict),
    Prefix(usize, usize),
    Sum(Vec<usize>),
    Rec(Name, usize),
    Var(Name),
}

/// The distinct submonitors of a closed, uniquely bound monitor, with the
/// transitions of system N between them.
#[derive(Clone, Debug)]
pub struct SubmonitorGraph {
    alphabet: Alphabet,
    nodes: Vec<Node>,
    root: usize,
    binder: HashMap<Name, usize>,
    tau_closure: Vec<Vec<usize>>,
}

impl SubmonitorGraph {
    pub fn new(m: &Monitor, alphabet: &Alphabet) -> Result<SubmonitorGraph> {
        if let Some(x) = m.free_vars().into_iter().next() {
            return Err(Error::FreeVariable(x.to_string()));
        }
        let mut g = SubmonitorGraph {
            alphabet: alphabet.clone(),
            nodes: Vec::new(),
            root: 0,
            binder: HashMap::new(),
            tau_closure: Vec::new(),
        };
        let mut ids = HashMap::new();
        g.root = g.intern(m, &mut ids)?;
        g.tau_closure = (0..g.nodes.len()).map(|i| g.compute_closure(i)).collect();
        Ok(g)
    }

    fn intern(&mut self, m: &Monitor, ids: &mut HashMap<Node, usize>) -> Result<usize> {
        let node = match m {
            Monitor::Verdict(v) => Node::Verdict(*v),
            Monitor::Var(x) => Node::Var(x.clone()),
            Monitor::Prefix(a, b) => {
                let ai = self.alphabet.index_of(a).ok_or_else(|| {
                    Error::InvalidParameter(format!("action `{a}` is not in the alphabet"))
                })?;
                Node::Prefix(ai, self.intern(b, ids)?)
            }
            Monitor::Sum(ms) => Node::Sum(
                ms.iter()
                    .map(|s| self.intern(s, ids))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Monitor::Rec(x, b) => Node::Rec(x.clone(), self.intern(b, ids)?),
        };
        if let Some(&i) = ids.get(&node) {
            return Ok(i);
        }
        let i = self.nodes.len();
        if let Node::Rec(x, _) = &node {
            if self.binder.insert(x.clone(), i).is_some() {
                return Err(Error::DuplicateBinder(x.to_string()));
            }
        }
        ids.insert(node.clone(), i);
        self.nodes.push(node);
        Ok(i)
    }

    fn tau_step(&self, i: usize, out: &mut Vec<usize>) {
        match &self.nodes[i] {
            Node::Rec(_, b) => out.push(*b),
            Node::Var(x) => out.push(self.binder[x]),
            Node::Sum(cs) => cs.iter().for_each(|&c| self.tau_step(c, out)),
            Node::Verdict(_) | Node::Prefix(..) => {}
        }
    }

    fn compute_closure(&self, i: usize) -> Vec<usize> {
        let mut seen = HashSet::from([i]);
        let mut stack = vec![i];
        let mut buf = Vec::new();
        while let Some(j) = stack.pop() {
            buf.clear();
            self.tau_step(j, &mut buf);
            for &k in &buf {
                if seen.insert(k) {
                    stack.push(k);
                }
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    fn act_step(&self, i: usize, sym: usize, out: &mut Vec<usize>) {
        match &self.nodes[i] {
            Node::Verdict(_) => out.push(i),
            Node::Prefix(a, b) => {
                if *a == sym {
                    out.push(*b)
                }
            }
            Node::Sum(cs) => cs.iter().for_each(|&c| self.act_step(c, sym, out)),
            Node::Rec(..) | Node::Var(_) => {}
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn verdict(&self, i: usize) -> Option<Verdict> {
        match self.nodes[i] {
            Node::Verdict(v) => Some(v),
            _ => None,
        }
    }

    /// Submonitors reachable from `i` by tau steps, including `i`.
    pub fn closure(&self, i: usize) -> &[usize] {
        &self.tau_closure[i]
    }

    /// Targets of a single `sym`-labelled step, without tau.
    pub fn strong_successors(&self, i: usize, sym: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.act_step(i, sym, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Targets of `i =sym=>` (tau* sym tau*).
    pub fn weak_successors(&self, i: usize, sym: usize) -> Vec<usize> {
        let mut mid = Vec::new();
        for &j in self.closure(i) {
            self.act_step(j, sym, &mut mid);
        }
        let mut out: Vec<usize> = mid
            .iter()
            .flat_map(|&k| self.tau_closure[k].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Whether some tau-successor of `i` (including `i`) is verdict `v`.
    pub fn reaches_now(&self, i: usize, v: Verdict) -> bool {
        self.closure(i).iter().any(|&j| self.verdict(j) == Some(v))
    }

    /// Rebuilds the monitor term of a node.
    pub fn term(&self, i: usize) -> Monitor {
        match &self.nodes[i] {
            Node::Verdict(v) => Monitor::Verdict(*v),
            Node::Var(x) => Monitor::Var(x.clone()),
            Node::Prefix(a, b) => {
                Monitor::prefix(self.alphabet.actions()[*a].clone(), self.term(*b))
            }
            Node::Sum(cs) => Monitor::Sum(cs.iter().map(|&c| self.term(c)).collect()),
            Node::Rec(x, b) => Monitor::Rec(x.clone(), Box::new(self.term(*b))),
        }
    }
}
