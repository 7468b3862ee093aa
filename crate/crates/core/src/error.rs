use thiserror::Error;

use crate::terms::Action;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown action `{symbol}` at {line}:{column}")]
    UnknownAction {
        symbol: String,
        line: usize,
        column: usize,
    },

    #[error("reserved token `{token}` at {line}:{column}")]
    ReservedToken {
        token: String,
        line: usize,
        column: usize,
    },

    #[error("invalid action symbol `{0}`")]
    InvalidAction(String),

    #[error("free variable `{0}`")]
    FreeVariable(String),

    #[error("variable `{0}` is bound more than once")]
    DuplicateBinder(String),

    #[error("formula is not in sHML")]
    NotShml,

    #[error("formula mixes sHML and cHML operators")]
    MixedFragment,

    #[error("monitor uses both yes and no verdicts")]
    TwoVerdict,

    #[error("monitor uses verdict `{found}` but `{expected}` was requested")]
    WrongVerdict { expected: String, found: String },

    #[error("monitor contains a verdict inside a sum")]
    VerdictSum,

    #[error("equation system is not in standard form: {0}")]
    NotStandardForm(String),

    #[error("equation system is not in deterministic form: {0}")]
    NotDeterministicForm(String),

    #[error("invalid equation system: {0}")]
    InvalidSystem(String),

    #[error("automaton language is not irrevocable")]
    NotIrrevocable,

    #[error("automaton has {states} states, above the cap of {cap} (use force to override)")]
    CapExceeded { states: usize, cap: usize },

    #[error("computation exceeded its time budget")]
    Timeout,

    #[error("monitor is conflicting; witness trace: {}", format_trace(.witness))]
    Conflicting { witness: Vec<Action> },

    #[error("marker action `[no]` already present in the alphabet")]
    MarkerInAlphabet,

    #[error("verdict `no` must not occur in a ν-encoded monitor")]
    NoVerdictPresent,

    #[error("process has a nil that is not verdict-prefixed")]
    BareNil,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid LTS: {0}")]
    InvalidLts(String),

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
}

pub fn format_trace(trace: &[Action]) -> String {
    if trace.is_empty() {
        "ε".to_string()
    } else {
        trace
            .iter()
            .map(|a| a.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
