use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use detmon::automata::{language_equiv, minimize_dfa, monitor_to_nfa, subset_construction, Limits};
use detmon::equivalence::{simple_traces, verdict_equiv};
use detmon::families::{marked_alphabet, mn_monitor, mn_nfa, un_monitor, un_predicate};
use detmon::gen::{random_lts, random_monitor, random_shml, VerdictMode};
use detmon::logic::{
    determinize_formula, determinize_system, eval_formula, formula_to_system, Environment,
    EquationSystem,
};
use detmon::pipeline::{determinize_monitor, Method};
use detmon::semantics::{is_deterministic, rej, Machine, RuleSystem};
use detmon::synthesis::msf;
use detmon::terms::{
    eliminate_verdict_sums, parse_formula, parse_monitor, well_form, word, words_up_to, Alphabet,
    Monitor, Verdict,
};
use detmon::verdicts::{conflict_witness, determinize_two_verdict, is_conflicting, nu, nu_inverse};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ab() -> Alphabet {
    Alphabet::from_symbols(&["a", "b"]).unwrap()
}

fn server() -> Alphabet {
    Alphabet::from_symbols(&["req", "res", "cls"]).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    check(start.elapsed() <= budget, || {
        format!("took {:?}, budget {budget:?}", start.elapsed())
    })
}

/// Verdicts reached on every word up to `len` under the substitution rules.
fn bounded_profile(m: &Monitor, alphabet: &Alphabet, len: usize) -> Vec<BTreeSet<Verdict>> {
    let k = Machine::new(m, RuleSystem::O, alphabet).unwrap();
    words_up_to(alphabet, len)
        .iter()
        .map(|w| {
            k.verdicts_on(m, w)
                .into_iter()
                .filter(|v| *v != Verdict::End)
                .collect()
        })
        .collect()
}

fn c1_golden_synthesis() -> Outcome {
    let start = Instant::now();
    let phi_e = parse_formula("max X.[a]([a]ff & X)", &ab()).map_err(|e| e.to_string())?;
    let m_e = parse_monitor("rec x.a.(a.no + x)", &ab()).unwrap();
    let phi = parse_formula("max X.([req][cls]ff & [req][res]X)", &server()).unwrap();
    let m = parse_monitor("rec x.(req.cls.no + req.res.x)", &server()).unwrap();
    let got_e = msf(&phi_e).map_err(|e| e.to_string())?;
    let got = msf(&phi).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(got_e == m_e, || format!("msf(phi_e) = {got_e}"))?;
    check(got == m, || format!("msf(server) = {got}"))?;
    check(elapsed < Duration::from_millis(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{got_e}; {got}"))
}

fn c2_golden_determinization() -> Outcome {
    let start = Instant::now();
    let m_e = parse_monitor("rec x.a.(a.no + x)", &ab()).unwrap();
    let target = parse_monitor("a.a.no", &ab()).unwrap();
    let d = determinize_monitor(&m_e, Method::Automata, &ab(), Limits::default())
        .map_err(|e| e.to_string())?;
    check(is_deterministic(&d), || format!("{d} is not deterministic"))?;
    check(
        bounded_profile(&d, &ab(), 6) == bounded_profile(&target, &ab(), 6),
        || format!("{d} differs from a.a.no"),
    )?;
    check(verdict_equiv(&d, &target, &ab()).unwrap(), || {
        format!("{d} not equivalent to a.a.no")
    })?;
    let phi_e = parse_formula("max X.[a]([a]ff & X)", &ab()).unwrap();
    let df = determinize_formula(&phi_e).map_err(|e| e.to_string())?;
    check(df == parse_formula("[a][a]ff", &ab()).unwrap(), || {
        format!("determinized formula {df}")
    })?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("{d}; {df}"))
}

fn c3_equation_goldens() -> Outcome {
    let phi_e = parse_formula("max X.[a]([a]ff & X)", &ab()).unwrap();
    let sys = formula_to_system(&phi_e).map_err(|e| e.to_string())?;
    let expected = EquationSystem::parse("X = [a]X_1\nX_1 = [a]X_2 & [a]X_1\nX_2 = ff\n").unwrap();
    check(sys == expected, || format!("system:\n{sys}"))?;
    let det = determinize_system(&sys).map_err(|e| e.to_string())?;
    let expected =
        EquationSystem::parse("X = [a]X_1\nX_1 = [a]X_1_2\nX_2 = ff\nX_1_2 = ff\n").unwrap();
    check(det == expected, || format!("deterministic system:\n{det}"))?;
    Ok(format!("{} and {} equations", sys.len(), det.len()))
}

fn c4_mn_state_counts() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for n in 1..=8 {
        let nfa = mn_nfa(n).map_err(|e| e.to_string())?;
        let dfa = minimize_dfa(&subset_construction(&nfa));
        check(nfa.num_states() == n + 2, || {
            format!("n = {n}: nfa has {}", nfa.num_states())
        })?;
        check(dfa.num_states() == (1 << n) + 2, || {
            format!("n = {n}: dfa has {}", dfa.num_states())
        })?;
        counts.push(dfa.num_states());
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("min dfa states {counts:?}"))
}

fn c5_mn_monitor() -> Outcome {
    let start = Instant::now();
    let alphabet = marked_alphabet();
    let mut sizes = Vec::new();
    for n in 1..=8 {
        let m = mn_monitor(n).map_err(|e| e.to_string())?;
        let nfa = monitor_to_nfa(&m, Verdict::Yes, &alphabet).map_err(|e| e.to_string())?;
        check(language_equiv(&nfa, &mn_nfa(n).unwrap()), || {
            format!("n = {n}: language differs")
        })?;
        // Size of the suffix reading k more bits: s(0) = |e.yes|, s(k) = 2 s(k-1) + 3.
        let mut s = 2;
        for _ in 1..n {
            s = 2 * s + 3;
        }
        check(m.size() == 8 + s, || {
            format!("n = {n}: size {} vs {}", m.size(), 8 + s)
        })?;
        check(m.size() >= 3 << (n - 1), || {
            format!("n = {n}: size below 3*2^(n-1)")
        })?;
        sizes.push(m.size());
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("sizes {sizes:?}"))
}

fn c6_double_exponential_trend() -> Outcome {
    let start = Instant::now();
    let alphabet = marked_alphabet();
    let limits = Limits {
        force: true,
        deadline: None,
    };
    let mut sizes = Vec::new();
    for n in 1..=3 {
        let m = mn_monitor(n).unwrap();
        let d = determinize_monitor(&m, Method::Automata, &alphabet, limits)
            .map_err(|e| e.to_string())?;
        check(is_deterministic(&d), || {
            format!("n = {n}: not deterministic")
        })?;
        check(verdict_equiv(&d, &m, &alphabet).unwrap(), || {
            format!("n = {n}: not equivalent")
        })?;
        check(
            bounded_profile(&d, &alphabet, 5) == bounded_profile(&m, &alphabet, 5),
            || format!("n = {n}: bounded traces differ"),
        )?;
        sizes.push(d.size() as f64);
    }
    // The floor 2^(2^(n-1)) grows by factors 2 and 4 between consecutive n.
    let floor = [2.0, 4.0, 16.0];
    for i in 1..3 {
        let ratio = sizes[i] / sizes[i - 1];
        let floor_ratio = floor[i] / floor[i - 1];
        check(ratio > floor_ratio, || {
            format!("growth {ratio:.2} at n = {} not above {floor_ratio}", i + 1)
        })?;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("deterministic sizes {sizes:?}"))
}

fn c7_un_linearity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=60u64 {
        let m = un_monitor(n).map_err(|e| e.to_string())?;
        check(m.size() as u64 <= 20 * n, || {
            format!("n = {n}: size {}", m.size())
        })?;
        worst = worst.max(m.size() as f64 / n as f64);
    }
    let alphabet = marked_alphabet();
    let words = words_up_to(&alphabet, 10);
    for n in [5u64, 7] {
        let nfa = monitor_to_nfa(&un_monitor(n).unwrap(), Verdict::Yes, &alphabet)
            .map_err(|e| e.to_string())?;
        for w in &words {
            let expected = un_predicate(n, w).unwrap();
            check(nfa.member(w) == expected, || {
                format!("n = {n}: membership differs on {w:?}")
            })?;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "max size/n {worst:.2}; {} words checked per n",
        words.len()
    ))
}

fn c8_system_equivalence() -> Outcome {
    let start = Instant::now();
    let alphabet = ab();
    let words = words_up_to(&alphabet, 6);
    let mut rng = StdRng::seed_from_u64(8);
    for i in 0..500 {
        let mode = [VerdictMode::Yes, VerdictMode::No, VerdictMode::Both][i % 3];
        let m =
            well_form(&random_monitor(&mut rng, 12, &alphabet, mode)).map_err(|e| e.to_string())?;
        let machines: Vec<Machine> = [RuleSystem::O, RuleSystem::M, RuleSystem::N]
            .iter()
            .map(|&s| Machine::new(&m, s, &alphabet).unwrap())
            .collect();
        for w in &words {
            let o = machines[0].verdicts_on(&m, w);
            for k in &machines[1..] {
                let other = k.verdicts_on(&m, w);
                check(other == o, || {
                    format!(
                        "{m} on {w:?}: O gives {o:?}, {:?} gives {other:?}",
                        k.system()
                    )
                })?;
            }
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("500 monitors x {} traces", words.len()))
}

fn c9_monitorability() -> Outcome {
    let start = Instant::now();
    let alphabet = ab();
    let mut rng = StdRng::seed_from_u64(9);
    let ltss: Vec<_> = (0..50)
        .map(|_| random_lts(&mut rng, 5, &alphabet, 0.4, 0.15))
        .collect();
    let env = Environment::new();
    let mut formulas = 0;
    while formulas < 200 {
        let f = random_shml(&mut rng, 10, &alphabet, true);
        if f.depth() > 4 {
            continue;
        }
        formulas += 1;
        let m = msf(&f).map_err(|e| format!("{f}: {e}"))?;
        for lts in &ltss {
            let sat = eval_formula(&f, lts, &env);
            for p in 0..lts.num_states() {
                let r = rej(&m, p, lts, &alphabet);
                check(r == !sat.contains(&p), || {
                    format!("{f} at {} in\n{lts}: rej = {r}", lts.state_name(p))
                })?;
            }
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok("200 formulas x 50 systems".to_string())
}

/// Oracle: explores sets of derivatives under the substitution rules one
/// action at a time, bounded by `size(m)^2` rounds.
fn brute_force_conflict(m: &Monitor, alphabet: &Alphabet) -> bool {
    let machine = Machine::new(m, RuleSystem::O, alphabet).unwrap();
    let both =
        |set: &HashSet<Monitor>| set.contains(&Monitor::yes()) && set.contains(&Monitor::no());
    let key = |s: &HashSet<Monitor>| s.iter().map(|t| t.to_string()).collect::<BTreeSet<_>>();
    let start = machine.tau_closure(HashSet::from([m.clone()]));
    let mut seen = HashSet::from([key(&start)]);
    let mut frontier = vec![start];
    for _ in 0..=m.size() * m.size() {
        let mut next = Vec::new();
        for set in &frontier {
            if both(set) {
                return true;
            }
            for a in alphabet.iter() {
                let after = machine.after(set, a);
                if !after.is_empty() && seen.insert(key(&after)) {
                    next.push(after);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    false
}

fn c10_conflict_detection() -> Outcome {
    let start = Instant::now();
    let alphabet = ab();
    let m_c = parse_monitor("a.yes + a.no", &alphabet).unwrap();
    let m_e = parse_monitor("rec x.a.(a.no + x)", &alphabet).unwrap();
    check(is_conflicting(&m_c, &alphabet).unwrap(), || {
        "m_c not conflicting".into()
    })?;
    let w = conflict_witness(&m_c, &alphabet).unwrap();
    check(w == Some(word("a")), || format!("m_c witness {w:?}"))?;
    check(!is_conflicting(&m_e, &alphabet).unwrap(), || {
        "m_e conflicting".into()
    })?;
    let mut rng = StdRng::seed_from_u64(10);
    let mut conflicting = 0;
    for _ in 0..300 {
        let m = random_monitor(&mut rng, 14, &alphabet, VerdictMode::Both);
        let got = conflict_witness(&m, &alphabet).map_err(|e| e.to_string())?;
        let expected = brute_force_conflict(&m, &alphabet);
        check(got.is_some() == expected, || {
            format!("{m}: got {got:?}, oracle {expected}")
        })?;
        if let Some(t) = got {
            conflicting += 1;
            let vs = Machine::new(&m, RuleSystem::O, &alphabet)
                .unwrap()
                .verdicts_on(&m, &t);
            check(
                vs.contains(&Verdict::Yes) && vs.contains(&Verdict::No),
                || format!("{m}: bad witness {t:?}"),
            )?;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{conflicting}/300 random monitors conflicting"))
}

fn c11_simple_trace_bound() -> Outcome {
    let alphabet = ab();
    let mut rng = StdRng::seed_from_u64(11);
    let mut tightest = 0.0f64;
    for i in 0..500 {
        let mode = [VerdictMode::Yes, VerdictMode::No, VerdictMode::Both][i % 3];
        let m = random_monitor(&mut rng, 16, &alphabet, mode);
        let count = simple_traces(&m, m.height()).len();
        check(count <= m.size(), || {
            format!("{m}: {count} simple traces, size {}", m.size())
        })?;
        tightest = tightest.max(count as f64 / m.size() as f64);
    }
    Ok(format!("500 monitors, max traces/size {tightest:.2}"))
}

fn c12_two_verdict_round_trip() -> Outcome {
    let start = Instant::now();
    let alphabet = ab();
    let limits = Limits {
        force: true,
        deadline: None,
    };
    let mut rng = StdRng::seed_from_u64(12);
    let mut done = 0;
    let mut drawn = 0;
    while done < 200 {
        drawn += 1;
        check(drawn < 100_000, || {
            "too few non-conflicting two-verdict monitors".into()
        })?;
        let m = random_monitor(&mut rng, 10, &alphabet, VerdictMode::Both);
        let vs = m.verdicts();
        if !(vs.contains(&Verdict::Yes) && vs.contains(&Verdict::No))
            || is_conflicting(&m, &alphabet).unwrap()
        {
            continue;
        }
        done += 1;
        let flat = eliminate_verdict_sums(&m, &alphabet);
        check(
            bounded_profile(&flat, &alphabet, 5) == bounded_profile(&m, &alphabet, 5),
            || format!("{m}: sum elimination changed verdicts"),
        )?;
        let back = nu_inverse(&nu(&flat).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        check(back == flat, || format!("{flat}: round trip gives {back}"))?;
        let d = determinize_two_verdict(&m, &alphabet, limits).map_err(|e| format!("{m}: {e}"))?;
        check(is_deterministic(&d), || {
            format!("{m}: {d} not deterministic")
        })?;
        check(verdict_equiv(&d, &m, &alphabet).unwrap(), || {
            format!("{m}: {d} not equivalent")
        })?;
        check(
            bounded_profile(&d, &alphabet, 6) == bounded_profile(&m, &alphabet, 6),
            || format!("{m}: {d} differs on short traces"),
        )?;
    }
    within(start, Duration::from_secs(180))?;
    Ok(format!("200 monitors from {drawn} draws"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("golden synthesis", c1_golden_synthesis),
        ("golden determinization", c2_golden_determinization),
        ("equation system goldens", c3_equation_goldens),
        ("M_n state counts", c4_mn_state_counts),
        ("M_n monitor", c5_mn_monitor),
        ("double-exponential trend", c6_double_exponential_trend),
        ("U_n linearity", c7_un_linearity),
        ("rule system equivalence", c8_system_equivalence),
        ("monitorability", c9_monitorability),
        ("conflict detection", c10_conflict_detection),
        ("simple-trace bound", c11_simple_trace_bound),
        ("two-verdict round trip", c12_two_verdict_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
