//! Monitors with both verdicts: the encoding of `no` as a marker action,
//! conflict detection and determinization.

use std::collections::{HashMap, VecDeque};

use crate::automata::Limits;
use crate::error::{Error, Result};
use crate::pipeline::{determinize_monitor, Method};
use crate::semantics::SubmonitorGraph;
use crate::terms::{
    eliminate_verdict_sums, rename_binders_apart, Action, Alphabet, Monitor, Verdict,
};

/// Replaces every `no` by `[no].yes`, where `[no]` is the reserved marker
/// action. The input must not contain the marker or verdict sums.
pub fn nu(m: &Monitor) -> Result<Monitor> {
    if m.actions().has_marker() {
        return Err(Error::MarkerInAlphabet);
    }
    if m.has_verdict_sum() {
        return Err(Error::VerdictSum);
    }
    Ok(m.map_verdicts(|v| match v {
        Verdict::No => Monitor::prefix(Action::marker(), Monitor::yes()),
        v => Monitor::Verdict(v),
    }))
}

fn is_marked_yes(m: &Monitor) -> bool {
    matches!(m, Monitor::Prefix(a, b) if a.is_marker() && **b == Monitor::yes())
}

/// Inverse of [`nu`]: `[no].yes` becomes `no`, and so does every sum with a
/// `[no].yes` summand.
pub fn nu_inverse(m: &Monitor) -> Result<Monitor> {
    if m.verdicts().contains(&Verdict::No) {
        return Err(Error::NoVerdictPresent);
    }
    decode(m)
}

fn decode(m: &Monitor) -> Result<Monitor> {
    Ok(match m {
        _ if is_marked_yes(m) => Monitor::no(),
        Monitor::Prefix(a, _) if a.is_marker() => {
            return Err(Error::InvalidParameter(
                "the marker action must be followed by `yes`".into(),
            ))
        }
        Monitor::Verdict(_) | Monitor::Var(_) => m.clone(),
        Monitor::Prefix(a, b) => Monitor::prefix(a.clone(), decode(b)?),
        Monitor::Sum(ms) => {
            if ms.iter().any(is_marked_yes) {
                Monitor::no()
            } else {
                Monitor::sum(ms.iter().map(decode).collect::<Result<Vec<_>>>()?)
            }
        }
        Monitor::Rec(x, b) => Monitor::Rec(x.clone(), Box::new(decode(b)?)),
    })
}

type Pair = (usize, usize);

/// A shortest trace over `alphabet` (extended by the actions of `m`) on
/// which `m` can reach both `yes` and `no`, found by breadth-first search
/// over pairs of submonitors moving on a common action.
pub fn conflict_witness(m: &Monitor, alphabet: &Alphabet) -> Result<Option<Vec<Action>>> {
    let m = rename_binders_apart(m)?;
    let alphabet = alphabet.union(&m.actions());
    let g = SubmonitorGraph::new(&m, &alphabet)?;
    let start = (g.root(), g.root());
    let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if g.reaches_now(p, Verdict::Yes) && g.reaches_now(q, Verdict::No) {
            let mut trace = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, sym))) = parent.get(&cur) {
                trace.push(alphabet.actions()[*sym].clone());
                cur = *prev;
            }
            trace.reverse();
            return Ok(Some(trace));
        }
        for sym in 0..alphabet.len() {
            let left = g.weak_successors(p, sym);
            let right = g.weak_successors(q, sym);
            for &p2 in &left {
                for &q2 in &right {
                    if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((p2, q2)) {
                        e.insert(Some(((p, q), sym)));
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether some trace leads `m` to both `yes` and `no`.
pub fn is_conflicting(m: &Monitor, alphabet: &Alphabet) -> Result<bool> {
    Ok(conflict_witness(m, alphabet)?.is_some())
}

/// A deterministic monitor with the same `yes` and `no` behaviour as the
/// non-conflicting monitor `m`: verdict sums are expanded, `no` is encoded
/// by the marker, the acceptance monitor is determinized and the marker is
/// decoded again.
pub fn determinize_two_verdict(
    m: &Monitor,
    alphabet: &Alphabet,
    limits: Limits,
) -> Result<Monitor> {
    if let Some(witness) = conflict_witness(m, alphabet)? {
        return Err(Error::Conflicting { witness });
    }
    let alphabet = alphabet.union(&m.actions());
    let expanded = eliminate_verdict_sums(m, &alphabet);
    let encoded = nu(&expanded)?;
    let det = determinize_monitor(&encoded, Method::Automata, &alphabet.with_marker(), limits)?;
    nu_inverse(&det)
}
