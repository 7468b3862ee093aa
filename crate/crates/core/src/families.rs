//! Language families with known size gaps between automata, monitors and
//! deterministic monitors, with their predicates, automata and monitors.

use std::collections::BTreeSet;

use crate::automata::{minimize_dfa, subset_construction, Dfa, Nfa};
use crate::error::{Error, Result};
use crate::terms::{Action, Alphabet, Monitor};

fn sym(s: &str) -> Action {
    Action::new(s).expect("family symbols are valid actions")
}

/// The alphabet `{0, 1}`.
pub fn binary_alphabet() -> Alphabet {
    Alphabet::new([sym("0"), sym("1")])
}

/// The alphabet `{0, 1, e}`.
pub fn marked_alphabet() -> Alphabet {
    Alphabet::new([sym("0"), sym("1"), sym("e")])
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!(
            "n must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

/// Splits `word` at its first `e`: the part before it, provided an `e`
/// occurs.
fn before_marker(word: &[Action]) -> Option<&[Action]> {
    word.iter()
        .position(|a| a.as_str() == "e")
        .map(|i| &word[..i])
}

/// Binary words whose `n`-th symbol from the end is `1`.
pub fn ln_predicate(n: usize, word: &[Action]) -> bool {
    n >= 1
        && word.len() >= n
        && word.iter().all(|a| matches!(a.as_str(), "0" | "1"))
        && word[word.len() - n].as_str() == "1"
}

/// Words `x e y` over `{0, 1, e}` with `x` binary and in the `n`-th-from-last
/// language.
pub fn mn_predicate(n: usize, word: &[Action]) -> bool {
    word.iter().all(|a| matches!(a.as_str(), "0" | "1" | "e"))
        && before_marker(word).is_some_and(|x| ln_predicate(n, x))
}

/// The standard `n + 1`-state NFA for the `n`-th-from-last language.
pub fn ln_nfa(n: usize) -> Result<Nfa> {
    check_n(n, 1)?;
    let mut edges = vec![(0, sym("0"), 0), (0, sym("1"), 0), (0, sym("1"), 1)];
    for i in 1..n {
        edges.push((i, sym("0"), i + 1));
        edges.push((i, sym("1"), i + 1));
    }
    Nfa::new(binary_alphabet(), n + 1, 0, [n], &edges)
}

/// The `n + 2`-state NFA for the marked family: the `n`-th-from-last NFA with
/// an `e`-step from its accepting state into an accepting sink `Y`.
pub fn mn_nfa(n: usize) -> Result<Nfa> {
    check_n(n, 1)?;
    let y = n + 1;
    let mut edges = vec![(0, sym("0"), 0), (0, sym("1"), 0), (0, sym("1"), 1)];
    for i in 1..n {
        edges.push((i, sym("0"), i + 1));
        edges.push((i, sym("1"), i + 1));
    }
    edges.push((n, sym("e"), y));
    for s in ["0", "1", "e"] {
        edges.push((y, sym(s), y));
    }
    let mut labels: Vec<String> = (0..=n).map(|i| format!("q{i}")).collect();
    labels.push("Y".into());
    Nfa::with_labels(marked_alphabet(), labels, 0, [y], &edges)
}

/// The minimal complete DFA of the marked family (`2^n + 2` states).
pub fn mn_dfa(n: usize) -> Result<Dfa> {
    Ok(minimize_dfa(&subset_construction(&mn_nfa(n)?)))
}

/// The monitor `rec x.(0.x + 1.x + 1.p)` where `p` reads any `n - 1`
/// binary symbols and then `e` to reach `yes`.
pub fn mn_monitor(n: usize) -> Result<Monitor> {
    check_n(n, 1)?;
    fn tail(remaining: usize) -> Monitor {
        if remaining == 0 {
            Monitor::prefix(sym("e"), Monitor::yes())
        } else {
            Monitor::sum(vec![
                Monitor::prefix(sym("0"), tail(remaining - 1)),
                Monitor::prefix(sym("1"), tail(remaining - 1)),
            ])
        }
    }
    let x = Monitor::var("x");
    Ok(Monitor::rec(
        "x",
        Monitor::sum(vec![
            Monitor::prefix(sym("0"), x.clone()),
            Monitor::prefix(sym("1"), x),
            Monitor::prefix(sym("1"), tail(n - 1)),
        ]),
    ))
}

/// Closed form of `size(mn_monitor(n))`.
pub fn mn_monitor_size(n: usize) -> usize {
    8 + 5 * (1 << (n - 1)) - 3
}

/// An integer partition of `n` whose parts have the largest possible lcm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandauPartition {
    pub n: u64,
    /// Sorted ascending.
    pub parts: Vec<u64>,
    pub lcm: u64,
}

impl LandauPartition {
    /// The distinct part values.
    pub fn distinct_parts(&self) -> Vec<u64> {
        self.parts
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Best choice of prime powers with distinct primes and a bounded sum.
#[derive(Clone, Debug)]
struct Choice {
    product: u64,
    /// Sorted prime powers.
    powers: Vec<u64>,
}

impl Choice {
    fn sum(&self) -> u64 {
        self.powers.iter().sum()
    }

    /// Larger product, then smaller sum, then fewer parts, then
    /// lexicographically smaller parts.
    fn better_than(&self, other: &Choice) -> bool {
        (
            self.product,
            std::cmp::Reverse(self.sum()),
            std::cmp::Reverse(self.powers.len()),
        )
            .cmp(&(
                other.product,
                std::cmp::Reverse(other.sum()),
                std::cmp::Reverse(other.powers.len()),
            ))
            .then_with(|| other.powers.cmp(&self.powers))
            .is_gt()
    }
}

/// The Landau partition of `n`: the largest lcm `F(n)` over all partitions
/// of `n`, attained by prime powers of distinct primes padded with ones.
pub fn landau_partition(n: u64) -> Result<LandauPartition> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let cap = n as usize;
    // best[s] is the best choice with sum at most s over the primes so far.
    let mut best: Vec<Choice> = vec![
        Choice {
            product: 1,
            powers: Vec::new(),
        };
        cap + 1
    ];
    for p in primes_up_to(n) {
        let previous = best.clone();
        for s in 0..=cap {
            let mut q = p;
            while q as usize <= s {
                let base = &previous[s - q as usize];
                let mut powers = base.powers.clone();
                powers.push(q);
                powers.sort_unstable();
                let cand = Choice {
                    product: base.product * q,
                    powers,
                };
                if cand.better_than(&best[s]) {
                    best[s] = cand;
                }
                q *= p;
            }
        }
    }
    let choice = &best[cap];
    let mut parts = vec![1; (n - choice.sum()) as usize];
    parts.extend(&choice.powers);
    parts.sort_unstable();
    Ok(LandauPartition {
        n,
        parts,
        lcm: choice.product,
    })
}

/// Unary words over `symbol` whose length is a positive multiple of a part
/// of the Landau partition of `n`.
pub fn chrobak_predicate(n: u64, symbol: &Action, word: &[Action]) -> Result<bool> {
    let parts = landau_partition(n)?.distinct_parts();
    let k = word.len() as u64;
    Ok(word.iter().all(|a| a == symbol) && k > 0 && parts.iter().any(|m| k.is_multiple_of(*m)))
}

/// Words `x e y` over `{0, 1, e}` with `x` binary and, for some symbol `i`,
/// the number of `i`s in `x` a positive multiple of a Landau part of `n`.
pub fn un_predicate(n: u64, word: &[Action]) -> Result<bool> {
    let parts = landau_partition(n)?.distinct_parts();
    if !word.iter().all(|a| matches!(a.as_str(), "0" | "1" | "e")) {
        return Ok(false);
    }
    let Some(x) = before_marker(word) else {
        return Ok(false);
    };
    Ok(["0", "1"].iter().any(|i| {
        let k = x.iter().filter(|a| a.as_str() == *i).count() as u64;
        k > 0 && parts.iter().any(|m| k.is_multiple_of(*m))
    }))
}

/// Counter monitor for symbol `i` and modulus `m`: it ignores the other
/// binary symbol, counts `i`s modulo `m` and offers `e.yes` whenever the
/// count is a positive multiple of `m`.
fn counter(i: &str, other: &str, m: u64) -> Monitor {
    let var = |l: u64| format!("x{i}_{m}_{l}");
    let mut body = Monitor::rec(
        &var(m),
        Monitor::sum(vec![
            Monitor::prefix(sym(other), Monitor::var(&var(m))),
            Monitor::prefix(sym(i), Monitor::var(&var(1))),
            Monitor::prefix(sym("e"), Monitor::yes()),
        ]),
    );
    for l in (0..m).rev() {
        body = Monitor::rec(
            &var(l),
            Monitor::sum(vec![
                Monitor::prefix(sym(other), Monitor::var(&var(l))),
                Monitor::prefix(sym(i), body),
            ]),
        );
    }
    body
}

/// A monitor of size linear in `n` for the Chrobak-based family: the sum of
/// one counter per symbol and distinct Landau part.
pub fn un_monitor(n: u64) -> Result<Monitor> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let parts = landau_partition(n)?.distinct_parts();
    let mut summands = Vec::new();
    for (i, other) in [("0", "1"), ("1", "0")] {
        for &m in &parts {
            summands.push(counter(i, other, m));
        }
    }
    Ok(Monitor::sum(summands))
}

/// Encodes a word over `{0, 1, e}` in binary: `0 -> 00`, `1 -> 01`,
/// `e -> 11`.
pub fn encode_binary(word: &[Action]) -> Result<Vec<Action>> {
    let mut out = Vec::with_capacity(2 * word.len());
    for a in word {
        let pair = match a.as_str() {
            "0" => ["0", "0"],
            "1" => ["0", "1"],
            "e" => ["1", "1"],
            other => {
                return Err(Error::InvalidParameter(format!(
                    "symbol `{other}` is not in {{0, 1, e}}"
                )))
            }
        };
        out.extend(pair.iter().map(|s| sym(s)));
    }
    Ok(out)
}

/// Whether every `rec` binds a different variable.
pub fn binders_are_unique(m: &Monitor) -> bool {
    let mut seen = BTreeSet::new();
    let mut ok = true;
    m.visit(&mut |t| {
        if let Monitor::Rec(x, _) = t {
            ok &= seen.insert(x.clone());
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{language_equiv, monitor_to_nfa};
    use crate::semantics::{verdicts_on, RuleSystem};
    use crate::terms::{parse_monitor, word, words_up_to, Verdict};
    use proptest::prelude::*;

    fn all_partitions(n: u64, max: u64, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            all_partitions(n - k, k, out, cur);
            cur.pop();
        }
    }

    /// Brute-force F(n) over every partition of `n`.
    fn landau_oracle(n: u64) -> u64 {
        let mut parts = Vec::new();
        all_partitions(n, n, &mut parts, &mut Vec::new());
        parts
            .iter()
            .map(|p| p.iter().fold(1, |a, &b| lcm(a, b)))
            .max()
            .unwrap()
    }

    #[test]
    fn predicates() {
        assert!(ln_predicate(2, &word("10")));
        assert!(!ln_predicate(2, &word("01")));
        assert!(mn_predicate(2, &word("10e")));
        assert!(mn_predicate(2, &word("10e0e1")));
        assert!(!mn_predicate(2, &word("00e")));
        assert!(!mn_predicate(2, &word("10")));
    }

    #[test]
    fn mn_automata_sizes() {
        for n in 1..=8 {
            assert_eq!(mn_nfa(n).unwrap().num_states(), n + 2);
            assert_eq!(mn_dfa(n).unwrap().num_states(), (1 << n) + 2, "n = {n}");
        }
        assert!(mn_nfa(0).is_err());
    }

    #[test]
    fn mn_automata_match_the_predicate() {
        let ab = marked_alphabet();
        for n in 1..=3 {
            let nfa = mn_nfa(n).unwrap();
            let dfa = mn_dfa(n).unwrap();
            for w in words_up_to(&ab, 7) {
                assert_eq!(nfa.member(&w), mn_predicate(n, &w));
                assert_eq!(dfa.member(&w), mn_predicate(n, &w));
            }
        }
        let bin = binary_alphabet();
        for w in words_up_to(&bin, 8) {
            assert_eq!(ln_nfa(3).unwrap().member(&w), ln_predicate(3, &w));
        }
    }

    /// Oracle for the monitor size: s(n-1) = 2, s(k) = 3 + 2 s(k+1).
    fn size_oracle(n: usize) -> usize {
        let mut s = 2;
        for _ in 0..n - 1 {
            s = 3 + 2 * s;
        }
        8 + s
    }

    #[test]
    fn mn_monitor_shape() {
        let ab = marked_alphabet();
        assert_eq!(
            mn_monitor(1).unwrap(),
            parse_monitor("rec x.(0.x + 1.x + 1.e.yes)", &ab).unwrap()
        );
        assert_eq!(mn_monitor(2).unwrap().size(), 15);
        for n in 1..=10 {
            let m = mn_monitor(n).unwrap();
            assert_eq!(m.size(), size_oracle(n));
            assert_eq!(m.size(), mn_monitor_size(n));
            assert!(m.size() >= 3 << (n - 1));
            assert!(binders_are_unique(&m) && m.is_closed() && m.is_single_verdict());
        }
    }

    #[test]
    fn mn_monitor_recognizes_the_family() {
        let ab = marked_alphabet();
        for n in 1..=4 {
            let m = mn_monitor(n).unwrap();
            let nfa = monitor_to_nfa(&m, Verdict::Yes, &ab).unwrap();
            assert!(language_equiv(&nfa, &mn_nfa(n).unwrap()));
        }
        let m = mn_monitor(2).unwrap();
        for w in words_up_to(&ab, 5) {
            let reached = verdicts_on(&m, &w, RuleSystem::O, &ab)
                .unwrap()
                .contains(&Verdict::Yes);
            assert_eq!(reached, mn_predicate(2, &w));
        }
    }

    #[test]
    fn landau_examples() {
        let p5 = landau_partition(5).unwrap();
        assert_eq!((p5.parts.clone(), p5.lcm), (vec![2, 3], 6));
        assert_eq!(landau_partition(1).unwrap().parts, vec![1]);
        let p7 = landau_partition(7).unwrap();
        assert_eq!((p7.parts.clone(), p7.lcm), (vec![3, 4], 12));
        assert!(landau_partition(0).is_err());
    }

    #[test]
    fn landau_matches_brute_force() {
        for n in 1..=20 {
            let p = landau_partition(n).unwrap();
            assert_eq!(p.lcm, landau_oracle(n), "n = {n}");
            assert_eq!(p.parts.iter().sum::<u64>(), n);
            assert_eq!(p.parts.iter().fold(1, |a, &b| lcm(a, b)), p.lcm);
        }
    }

    #[test]
    fn chrobak_examples() {
        let one = sym("1");
        assert!(chrobak_predicate(5, &one, &word("111111")).unwrap());
        assert!(!chrobak_predicate(5, &one, &[]).unwrap());
        assert!(!chrobak_predicate(5, &one, &word("11111")).unwrap());
        assert!(!chrobak_predicate(5, &one, &word("0101")).unwrap());
    }

    #[test]
    fn un_examples() {
        assert!(un_predicate(5, &word("11e")).unwrap());
        assert!(!un_predicate(5, &word("1e")).unwrap());
        assert!(!un_predicate(5, &word("11")).unwrap());
        assert!(un_predicate(5, &word("10101e1")).unwrap());
        assert!(un_monitor(1).is_err());
    }

    #[test]
    fn un_monitor_sizes() {
        for n in 2..=60 {
            let m = un_monitor(n).unwrap();
            let parts = landau_partition(n).unwrap().distinct_parts();
            let expected: u64 =
                2 * parts.iter().map(|m| 9 + 5 * m).sum::<u64>() + 2 * parts.len() as u64 - 1;
            assert_eq!(m.size() as u64, expected);
            assert!(m.size() as u64 <= 20 * n, "n = {n}");
            assert!(binders_are_unique(&m) && m.is_closed() && m.is_single_verdict());
        }
    }

    #[test]
    fn un_monitor_recognizes_the_family() {
        let ab = marked_alphabet();
        for n in [2, 5] {
            let nfa = monitor_to_nfa(&un_monitor(n).unwrap(), Verdict::Yes, &ab).unwrap();
            for w in words_up_to(&ab, 8) {
                assert_eq!(
                    nfa.member(&w),
                    un_predicate(n, &w).unwrap(),
                    "n = {n}, {w:?}"
                );
            }
        }
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_binary(&word("e")).unwrap(), word("11"));
        assert_eq!(encode_binary(&[]).unwrap(), Vec::<Action>::new());
        assert_eq!(encode_binary(&word("10e")).unwrap(), word("010011"));
        assert!(encode_binary(&[sym("a")]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn encoding_is_injective(a in "[01e]{0,6}", b in "[01e]{0,6}") {
            let ea = encode_binary(&word(&a)).unwrap();
            let eb = encode_binary(&word(&b)).unwrap();
            prop_assert_eq!(ea.len(), 2 * a.len());
            prop_assert_eq!(ea == eb, a == b);
        }
    }
}
