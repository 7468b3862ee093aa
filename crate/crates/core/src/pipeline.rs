//! End-to-end determinization of single-verdict monitors and the size
//! benchmark over the hard families.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::automata::{dfa_to_monitor, minimize_dfa, monitor_to_nfa, subset_construction, Limits};
use crate::error::{Error, Result};
use crate::families::{landau_partition, marked_alphabet, mn_monitor, mn_nfa, un_monitor};
use crate::logic::determinize_formula;
use crate::synthesis::{dualize_monitor, monitor_to_formula, msf};
use crate::terms::{Alphabet, Monitor, Verdict};

/// How a monitor is determinized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Read back as a formula, determinize the formula, synthesize again.
    Equations,
    /// Monitor to NFA, subset construction, minimization, DFA to monitor.
    #[default]
    Automata,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "equations" => Ok(Method::Equations),
            "automata" => Ok(Method::Automata),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Equations => "equations",
            Method::Automata => "automata",
        })
    }
}

/// The verdict of a single-verdict monitor (`yes` when it has none).
fn single_verdict(m: &Monitor) -> Result<Verdict> {
    let vs = m.verdicts();
    match (vs.contains(&Verdict::Yes), vs.contains(&Verdict::No)) {
        (true, true) => Err(Error::TwoVerdict),
        (false, true) => Ok(Verdict::No),
        _ => Ok(Verdict::Yes),
    }
}

/// A deterministic monitor equivalent to the single-verdict monitor `m`.
/// The automata route honours the state caps and deadline in `limits`.
pub fn determinize_monitor(
    m: &Monitor,
    method: Method,
    alphabet: &Alphabet,
    limits: Limits,
) -> Result<Monitor> {
    let verdict = single_verdict(m)?;
    let alphabet = alphabet.union(&m.actions());
    match method {
        Method::Automata => {
            let nfa = monitor_to_nfa(m, verdict, &alphabet)?;
            let dfa = minimize_dfa(&subset_construction(&nfa));
            let out = dfa_to_monitor(&dfa, limits)?;
            Ok(if verdict == Verdict::No {
                dualize_monitor(&out)
            } else {
                out
            })
        }
        Method::Equations => {
            if m.verdicts().contains(&Verdict::Yes) {
                let dual = determinize_monitor(&dualize_monitor(m), method, &alphabet, limits)?;
                return Ok(dualize_monitor(&dual));
            }
            // Synthesis maps `tt` to `yes`; a rejection monitor never
            // accepts, so such leaves become `end`.
            let f = monitor_to_formula(m, &alphabet)?;
            let out = msf(&determinize_formula(&f)?)?;
            Ok(out.map_verdicts(|v| match v {
                Verdict::Yes => Monitor::end(),
                v => Monitor::Verdict(v),
            }))
        }
    }
}

/// A benchmarked family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Mn,
    Un,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "mn" => Ok(Family::Mn),
            "un" => Ok(Family::Un),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Mn => "Mn",
            Family::Un => "Un",
        })
    }
}

/// One benchmark row. Cells that timed out or hit a cap are empty and
/// explained in `note`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub nfa_states: Option<usize>,
    pub min_dfa_states: Option<usize>,
    pub monitor_size: usize,
    pub det_monitor_size: Option<usize>,
    pub nfa_ms: Option<f64>,
    pub dfa_ms: Option<f64>,
    pub det_ms: Option<f64>,
    pub note: String,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Benchmarks one family member; `timeout` bounds the deterministic monitor
/// construction.
pub fn bench_row(family: Family, n: usize, timeout: Duration) -> Result<BenchRow> {
    let monitor = match family {
        Family::Mn => mn_monitor(n)?,
        Family::Un => un_monitor(n as u64)?,
    };
    let alphabet = marked_alphabet();
    let mut notes = Vec::new();

    let t = Instant::now();
    let nfa = match family {
        Family::Mn => mn_nfa(n)?,
        Family::Un => monitor_to_nfa(&monitor, Verdict::Yes, &alphabet)?,
    };
    let nfa_ms = millis(t.elapsed());

    let t = Instant::now();
    let dfa = minimize_dfa(&subset_construction(&nfa));
    let dfa_ms = millis(t.elapsed());

    let t = Instant::now();
    let limits = Limits {
        force: true,
        deadline: Some(Instant::now() + timeout),
    };
    let det = match dfa_to_monitor(&dfa, limits) {
        Ok(d) => Some(d.size()),
        Err(Error::Timeout) => {
            notes.push(format!(
                "deterministic monitor timed out after {}s",
                timeout.as_secs()
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let det_ms = det.map(|_| millis(t.elapsed()));
    if family == Family::Un {
        notes.push(format!("landau lcm {}", landau_partition(n as u64)?.lcm));
    }
    Ok(BenchRow {
        family: family.to_string(),
        n,
        nfa_states: Some(nfa.num_states()),
        min_dfa_states: Some(dfa.num_states()),
        monitor_size: monitor.size(),
        det_monitor_size: det,
        nfa_ms: Some(nfa_ms),
        dfa_ms: Some(dfa_ms),
        det_ms,
        note: notes.join("; "),
    })
}

/// Benchmarks `family` for every `n` in `range`, one row each.
pub fn bench(
    family: Family,
    range: std::ops::RangeInclusive<usize>,
    timeout: Duration,
) -> Result<Vec<BenchRow>> {
    range.map(|n| bench_row(family, n, timeout)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{language_equiv, verdict_nfa};
    use crate::families::mn_monitor_size;
    use crate::gen::{random_monitor, VerdictMode};
    use crate::semantics::is_deterministic;
    use crate::terms::parse_monitor;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn ab() -> Alphabet {
        Alphabet::from_symbols(&["a", "b"]).unwrap()
    }

    fn server() -> Alphabet {
        Alphabet::from_symbols(&["req", "res", "cls"]).unwrap()
    }

    /// Oracle: equal yes and no languages.
    fn same_verdicts(m1: &Monitor, m2: &Monitor, alphabet: &Alphabet) -> bool {
        [Verdict::Yes, Verdict::No].iter().all(|&v| {
            language_equiv(
                &verdict_nfa(m1, v, alphabet).unwrap(),
                &verdict_nfa(m2, v, alphabet).unwrap(),
            )
        })
    }

    #[test]
    fn determinizes_the_running_example() {
        let m_e = parse_monitor("rec x.a.(a.no + x)", &ab()).unwrap();
        let target = parse_monitor("a.a.no", &ab()).unwrap();
        for method in [Method::Automata, Method::Equations] {
            let d = determinize_monitor(&m_e, method, &ab(), Limits::default()).unwrap();
            assert!(is_deterministic(&d), "{method}: {d}");
            assert!(same_verdicts(&d, &target, &ab()), "{method}: {d}");
        }
    }

    #[test]
    fn determinizes_the_server_monitor() {
        let m = parse_monitor("rec x.(req.cls.no + req.res.x)", &server()).unwrap();
        let m2 =
            parse_monitor("req.(res.(rec y.req.(res.y + cls.no)) + cls.no)", &server()).unwrap();
        assert!(same_verdicts(&m, &m2, &server()));
        for method in [Method::Automata, Method::Equations] {
            let d = determinize_monitor(&m, method, &server(), Limits::default()).unwrap();
            assert!(is_deterministic(&d), "{method}: {d}");
            assert!(same_verdicts(&d, &m2, &server()), "{method}: {d}");
        }
    }

    #[test]
    fn deterministic_input_stays_equivalent() {
        let m = parse_monitor("a.yes", &ab()).unwrap();
        for method in [Method::Automata, Method::Equations] {
            let d = determinize_monitor(&m, method, &ab(), Limits::default()).unwrap();
            assert!(same_verdicts(&d, &m, &ab()));
        }
        let two = parse_monitor("a.yes + b.no", &ab()).unwrap();
        assert_eq!(
            determinize_monitor(&two, Method::Automata, &ab(), Limits::default()),
            Err(Error::TwoVerdict)
        );
    }

    #[test]
    fn methods_agree_on_random_monitors() {
        let mut rng = StdRng::seed_from_u64(21);
        for i in 0..120 {
            let mode = if i % 2 == 0 {
                VerdictMode::Yes
            } else {
                VerdictMode::No
            };
            let m = random_monitor(&mut rng, 12, &ab(), mode);
            let limits = Limits {
                force: true,
                deadline: None,
            };
            let a = determinize_monitor(&m, Method::Automata, &ab(), limits).unwrap();
            let e = determinize_monitor(&m, Method::Equations, &ab(), limits).unwrap();
            assert!(is_deterministic(&a), "{m} -> {a}");
            assert!(is_deterministic(&e), "{m} -> {e}");
            assert!(same_verdicts(&a, &m, &ab()), "{m} -> {a}");
            assert!(same_verdicts(&e, &m, &ab()), "{m} -> {e}");
        }
    }

    #[test]
    fn bench_rows_match_the_families() {
        let rows = bench(Family::Mn, 1..=3, Duration::from_secs(60)).unwrap();
        for row in &rows {
            assert_eq!(row.nfa_states, Some(row.n + 2));
            assert_eq!(row.min_dfa_states, Some((1 << row.n) + 2));
            assert_eq!(row.monitor_size, mn_monitor_size(row.n));
            assert!(row.det_monitor_size.is_some());
        }
        assert_eq!(rows[1].monitor_size, 15);
        let un = bench_row(Family::Un, 10, Duration::from_millis(200)).unwrap();
        assert!(un.monitor_size <= 200);
        assert_eq!("un".parse::<Family>().unwrap(), Family::Un);
        assert_eq!("automata".parse::<Method>().unwrap(), Method::Automata);
    }
}
