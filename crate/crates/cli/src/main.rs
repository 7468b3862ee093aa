use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use detmon::automata::{
    dfa_to_monitor, language_witness, minimize_dfa, monitor_to_nfa, nfa_to_monitor,
    subset_construction, verdict_nfa, AutomatonDoc, Limits,
};
use detmon::families::{ln_nfa, marked_alphabet, mn_dfa, mn_monitor, mn_nfa, un_monitor};
use detmon::lts::FiniteLts;
use detmon::pipeline::{bench, Family, Method};
use detmon::semantics::{acc, rej};
use detmon::synthesis::{dualize_monitor, msf};
use detmon::terms::{
    parse_formula_file, parse_monitor_file, show_trace, Action, Alphabet, Monitor, Verdict,
};
use detmon::verdicts::{conflict_witness, determinize_two_verdict};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] detmon::Error),
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Write(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(detmon::Error::CapExceeded { .. } | detmon::Error::Timeout) => 3,
            CliError::Core(detmon::Error::Conflicting { .. }) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Synthesize, determinize and compare runtime monitors.
#[derive(Debug, Parser)]
#[command(name = "detmon", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a monitor from a safety or co-safety formula.
    Synth {
        /// Formula text, or `@path` to read a file.
        formula: String,
    },
    /// Build a deterministic monitor with the same verdicts.
    Determinize {
        /// Monitor text, or `@path`.
        monitor: String,
        #[arg(long, default_value = "automata")]
        method: String,
        #[arg(long)]
        alphabet: Option<String>,
        /// Ignore the automaton state caps.
        #[arg(long)]
        force: bool,
        /// Time budget in seconds for the monitor construction.
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Print the automaton recognizing the traces that reach a verdict.
    ToNfa {
        monitor: String,
        #[arg(long, value_enum, default_value_t = VerdictArg::Yes)]
        verdict: VerdictArg,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Convert an automaton document to a monitor.
    FromNfa {
        /// Automaton JSON, or `@path`.
        automaton: String,
        /// Verdict reached on the accepted traces.
        #[arg(long, value_enum, default_value_t = VerdictArg::Yes)]
        verdict: VerdictArg,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Determinize and minimize an automaton document.
    ToDfa { automaton: String },
    /// Compare two monitors verdict by verdict.
    Equiv {
        left: String,
        right: String,
        #[arg(long)]
        alphabet: Option<String>,
        /// Also compare the traces reaching `end`.
        #[arg(long)]
        include_end: bool,
    },
    /// Report a trace reaching both verdicts, if any.
    Conflict {
        monitor: String,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Emit a member of a benchmark family.
    Family {
        #[arg(long, value_enum)]
        name: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Output::Monitor)]
        output: Output,
    },
    /// Run a monitor against every state of a finite LTS.
    Simulate {
        #[arg(long)]
        monitor: String,
        /// LTS text, or `@path`.
        #[arg(long)]
        lts: String,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Write the size benchmark as CSV.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        #[arg(long)]
        max_n: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-row time budget in seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerdictArg {
    Yes,
    No,
    End,
}

impl From<VerdictArg> for Verdict {
    fn from(v: VerdictArg) -> Verdict {
        match v {
            VerdictArg::Yes => Verdict::Yes,
            VerdictArg::No => Verdict::No,
            VerdictArg::End => Verdict::End,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Ln,
    Mn,
    Un,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Monitor,
    Nfa,
    Dfa,
}

/// Reads `@path` arguments from disk and returns other arguments unchanged.
fn load(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_string(),
            source,
        }),
        None => Ok(arg.to_string()),
    }
}

fn extra_alphabet(list: Option<&str>) -> CliResult<Alphabet> {
    let Some(list) = list else {
        return Ok(Alphabet::default());
    };
    let actions = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Action::new)
        .collect::<detmon::Result<Vec<_>>>()?;
    Ok(Alphabet::new(actions))
}

fn monitor_arg(arg: &str, alphabet: Option<&str>) -> CliResult<(Monitor, Alphabet)> {
    let file = parse_monitor_file(&load(arg)?)?;
    let alphabet = file.alphabet.union(&extra_alphabet(alphabet)?);
    Ok((file.term, alphabet))
}

fn limits(force: bool, timeout: Option<u64>) -> Limits {
    Limits {
        force,
        deadline: timeout.map(|s| Instant::now() + Duration::from_secs(s)),
    }
}

fn has_both_verdicts(m: &Monitor) -> bool {
    let vs = m.verdicts();
    vs.contains(&Verdict::Yes) && vs.contains(&Verdict::No)
}

/// Runs a command and returns its output with the exit status.
fn run(command: Command) -> CliResult<(String, u8)> {
    let ok = |s: String| Ok((s, 0));
    match command {
        Command::Synth { formula } => {
            let file = parse_formula_file(&load(&formula)?)?;
            ok(format!("{}\n", msf(&file.term)?))
        }
        Command::Determinize {
            monitor,
            method,
            alphabet,
            force,
            timeout,
        } => {
            let (m, alphabet) = monitor_arg(&monitor, alphabet.as_deref())?;
            let limits = limits(force, timeout);
            let out = if has_both_verdicts(&m) {
                determinize_two_verdict(&m, &alphabet, limits)?
            } else {
                detmon::pipeline::determinize_monitor(
                    &m,
                    method.parse::<Method>()?,
                    &alphabet,
                    limits,
                )?
            };
            ok(format!("{out}\n"))
        }
        Command::ToNfa {
            monitor,
            verdict,
            alphabet,
        } => {
            let (m, alphabet) = monitor_arg(&monitor, alphabet.as_deref())?;
            let nfa = match verdict {
                VerdictArg::End => verdict_nfa(&m, Verdict::End, &alphabet)?,
                v => monitor_to_nfa(&m, v.into(), &alphabet)?,
            };
            ok(format!("{}\n", AutomatonDoc::from_nfa(&nfa).to_json()))
        }
        Command::FromNfa {
            automaton,
            verdict,
            force,
            timeout,
        } => {
            let doc = AutomatonDoc::from_json(&load(&automaton)?)?;
            let limits = limits(force, timeout);
            let m = if doc.kind == "dfa" {
                dfa_to_monitor(&doc.to_dfa()?, limits)?
            } else {
                nfa_to_monitor(&doc.to_nfa()?, limits)?
            };
            let m = match verdict {
                VerdictArg::Yes => m,
                VerdictArg::No => dualize_monitor(&m),
                VerdictArg::End => {
                    return Err(detmon::Error::InvalidParameter(
                        "automata convert to yes or no monitors".into(),
                    )
                    .into());
                }
            };
            ok(format!("{m}\n"))
        }
        Command::ToDfa { automaton } => {
            let nfa = AutomatonDoc::from_json(&load(&automaton)?)?.to_nfa()?;
            let dfa = minimize_dfa(&subset_construction(&nfa));
            ok(format!("{}\n", AutomatonDoc::from_dfa(&dfa).to_json()))
        }
        Command::Equiv {
            left,
            right,
            alphabet,
            include_end,
        } => {
            let (m1, a1) = monitor_arg(&left, alphabet.as_deref())?;
            let (m2, a2) = monitor_arg(&right, alphabet.as_deref())?;
            let alphabet = a1.union(&a2);
            let mut verdicts = vec![Verdict::Yes, Verdict::No];
            if include_end {
                verdicts.push(Verdict::End);
            }
            let mut text = String::new();
            let mut first = None;
            for v in verdicts {
                let a = verdict_nfa(&m1, v, &alphabet)?;
                let b = verdict_nfa(&m2, v, &alphabet)?;
                match language_witness(&a, &b) {
                    None => text.push_str(&format!("{v}: equal\n")),
                    Some(t) => {
                        text.push_str(&format!("{v}: differ\n"));
                        first.get_or_insert((v, t));
                    }
                }
            }
            match first {
                None => ok(format!("{text}equivalent\n")),
                Some((v, t)) => Ok((
                    format!("{text}not equivalent: {v} on {}\n", show_trace(&t)),
                    1,
                )),
            }
        }
        Command::Conflict { monitor, alphabet } => {
            let (m, alphabet) = monitor_arg(&monitor, alphabet.as_deref())?;
            match conflict_witness(&m, &alphabet)? {
                None => ok("not conflicting\n".to_string()),
                Some(t) => Ok((format!("conflicting on {}\n", show_trace(&t)), 1)),
            }
        }
        Command::Family { name, n, output } => {
            let text = match (name, output) {
                (FamilyArg::Ln, Output::Monitor) => {
                    let dfa = minimize_dfa(&subset_construction(&ln_nfa(n)?));
                    format!("{}\n", dfa_to_monitor(&dfa, Limits::default())?)
                }
                (FamilyArg::Ln, Output::Nfa) => {
                    AutomatonDoc::from_nfa(&ln_nfa(n)?).to_json() + "\n"
                }
                (FamilyArg::Ln, Output::Dfa) => {
                    AutomatonDoc::from_dfa(&minimize_dfa(&subset_construction(&ln_nfa(n)?)))
                        .to_json()
                        + "\n"
                }
                (FamilyArg::Mn, Output::Monitor) => {
                    format!("alphabet: {}\n{}\n", marked_alphabet(), mn_monitor(n)?)
                }
                (FamilyArg::Mn, Output::Nfa) => {
                    AutomatonDoc::from_nfa(&mn_nfa(n)?).to_json() + "\n"
                }
                (FamilyArg::Mn, Output::Dfa) => {
                    AutomatonDoc::from_dfa(&mn_dfa(n)?).to_json() + "\n"
                }
                (FamilyArg::Un, out) => {
                    let m = un_monitor(n as u64)?;
                    match out {
                        Output::Monitor => format!("alphabet: {}\n{m}\n", marked_alphabet()),
                        Output::Nfa => {
                            let nfa = monitor_to_nfa(&m, Verdict::Yes, &marked_alphabet())?;
                            AutomatonDoc::from_nfa(&nfa).to_json() + "\n"
                        }
                        Output::Dfa => {
                            let nfa = monitor_to_nfa(&m, Verdict::Yes, &marked_alphabet())?;
                            AutomatonDoc::from_dfa(&minimize_dfa(&subset_construction(&nfa)))
                                .to_json()
                                + "\n"
                        }
                    }
                }
            };
            ok(text)
        }
        Command::Simulate {
            monitor,
            lts,
            alphabet,
        } => {
            let (m, alphabet) = monitor_arg(&monitor, alphabet.as_deref())?;
            let lts = FiniteLts::parse(&load(&lts)?)?;
            let alphabet = alphabet.union(&lts.actions());
            let mut text = String::new();
            for p in 0..lts.num_states() {
                let status = match (acc(&m, p, &lts, &alphabet), rej(&m, p, &lts, &alphabet)) {
                    (true, true) => "acc rej",
                    (true, false) => "acc",
                    (false, true) => "rej",
                    (false, false) => "inconclusive",
                };
                text.push_str(&format!("{}: {status}\n", lts.state_name(p)));
            }
            ok(text)
        }
        Command::Bench {
            family,
            min_n,
            max_n,
            out,
            timeout,
        } => {
            let family = match family {
                FamilyArg::Mn => Family::Mn,
                FamilyArg::Un => Family::Un,
                FamilyArg::Ln => {
                    return Err(
                        detmon::Error::InvalidParameter("bench supports mn and un".into()).into(),
                    );
                }
            };
            let rows = bench(family, min_n..=max_n, Duration::from_secs(timeout))?;
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                writer
                    .serialize(row)
                    .map_err(|e| CliError::Write(e.to_string()))?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| CliError::Write(e.to_string()))?;
            let text = String::from_utf8(bytes).map_err(|e| CliError::Write(e.to_string()))?;
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| CliError::Write(e.to_string()))?;
                    ok(String::new())
                }
                None => ok(text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Core(detmon::Error::CapExceeded { .. })) {
                eprintln!("hint: pass --force to lift the state caps");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
