//! Concrete syntax.
//!
//! Monitors: `.` binds tighter than `+`, `rec x.` extends as far right as
//! possible. Formulas: `<a>`/`[a]` bind tightest, then `&`, then `|`;
//! `max X.` and `min X.` extend as far right as possible.

use super::{name, Action, Alphabet, Formula, Monitor, ProcLabel, Process, Verdict, KEYWORDS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Dot,
    Plus,
    Amp,
    Pipe,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let simple = match c {
                '.' => Some(Tok::Dot),
                '+' => Some(Tok::Plus),
                '&' => Some(Tok::Amp),
                '|' => Some(Tok::Pipe),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBrack),
                ']' => Some(Tok::RBrack),
                '<' => Some(Tok::Lt),
                '>' => Some(Tok::Gt),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token {
                    tok,
                    line: li + 1,
                    col,
                });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(ident),
                    line: li + 1,
                    col,
                });
            } else {
                return Err(Error::Syntax {
                    line: li + 1,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    let (line, col) = out.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    alphabet: Option<&'a Alphabet>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, alphabet: Option<&'a Alphabet>) -> Result<Parser<'a>> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            alphabet,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize)> {
        if let Tok::Ident(s) = self.peek().clone() {
            let t = self.bump();
            Ok((s, t.line, t.col))
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn variable(&mut self) -> Result<String> {
        let (s, line, column) = self.ident("a variable name")?;
        if KEYWORDS.contains(&s.as_str()) {
            return Err(Error::ReservedToken {
                token: s,
                line,
                column,
            });
        }
        if !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            return Err(Error::Syntax {
                line,
                column,
                message: format!("`{s}` is not a valid variable name"),
            });
        }
        Ok(s)
    }

    fn action(&self, s: &str, line: usize, column: usize) -> Result<Action> {
        if s == "tau" {
            return Err(Error::ReservedToken {
                token: s.to_string(),
                line,
                column,
            });
        }
        let a = Action::new(s).map_err(|_| Error::ReservedToken {
            token: s.to_string(),
            line,
            column,
        })?;
        self.check_known(a, line, column)
    }

    fn check_known(&self, a: Action, line: usize, column: usize) -> Result<Action> {
        match self.alphabet {
            Some(alph) if !alph.contains(&a) => {
                if a.is_marker() {
                    Err(Error::ReservedToken {
                        token: a.to_string(),
                        line,
                        column,
                    })
                } else {
                    Err(Error::UnknownAction {
                        symbol: a.to_string(),
                        line,
                        column,
                    })
                }
            }
            _ => Ok(a),
        }
    }

    // ---- monitors ----

    fn monitor_sum(&mut self) -> Result<Monitor> {
        let mut parts = vec![self.monitor_prefixed()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            parts.push(self.monitor_prefixed()?);
        }
        Ok(Monitor::sum(parts))
    }

    fn monitor_prefixed(&mut self) -> Result<Monitor> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                let x = self.variable()?;
                self.expect(Tok::Dot, "`.` after the recursion variable")?;
                let body = self.monitor_sum()?;
                Ok(Monitor::Rec(name(&x), Box::new(body)))
            }
            Tok::Ident(s) if *self.peek_at(1) == Tok::Dot => {
                let (line, col) = self.here();
                self.bump();
                self.bump();
                let a = self.action(&s, line, col)?;
                let body = self.monitor_prefixed()?;
                Ok(Monitor::prefix(a, body))
            }
            Tok::LBrack => {
                let (line, col) = self.here();
                self.bump();
                let (s, _, _) = self.ident("`no` in the marker `[no]`")?;
                if s != "no" {
                    return Err(Error::Syntax {
                        line,
                        column: col,
                        message: "only the marker `[no]` may appear in brackets".into(),
                    });
                }
                self.expect(Tok::RBrack, "`]`")?;
                self.expect(Tok::Dot, "`.` after `[no]`")?;
                let a = self.check_known(Action::marker(), line, col)?;
                let body = self.monitor_prefixed()?;
                Ok(Monitor::prefix(a, body))
            }
            _ => self.monitor_atom(),
        }
    }

    fn monitor_atom(&mut self) -> Result<Monitor> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let m = self.monitor_sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(m)
            }
            Tok::Ident(s) => match s.as_str() {
                "yes" => {
                    self.bump();
                    Ok(Monitor::yes())
                }
                "no" => {
                    self.bump();
                    Ok(Monitor::no())
                }
                "end" => {
                    self.bump();
                    Ok(Monitor::end())
                }
                _ => Ok(Monitor::Var(name(&self.variable()?))),
            },
            _ => self.error("expected a monitor"),
        }
    }

    // ---- processes ----

    fn process_sum(&mut self) -> Result<Process> {
        let mut parts = vec![self.process_prefixed()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            parts.push(self.process_prefixed()?);
        }
        Ok(Process::sum(parts))
    }

    fn process_prefixed(&mut self) -> Result<Process> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "rec" => {
                self.bump();
                let x = self.variable()?;
                self.expect(Tok::Dot, "`.` after the recursion variable")?;
                let body = self.process_sum()?;
                Ok(Process::Rec(name(&x), Box::new(body)))
            }
            Tok::Ident(s) if *self.peek_at(1) == Tok::Dot => {
                let (line, col) = self.here();
                self.bump();
                self.bump();
                let a = self.action(&s, line, col)?;
                let body = self.process_prefixed()?;
                Ok(Process::prefix(ProcLabel::Act(a), body))
            }
            Tok::LBrack => {
                self.bump();
                let (s, line, column) = self.ident("a verdict label")?;
                let v = match s.as_str() {
                    "yes" => Verdict::Yes,
                    "no" => Verdict::No,
                    "end" => Verdict::End,
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            column,
                            message: "expected a verdict label".into(),
                        })
                    }
                };
                self.expect(Tok::RBrack, "`]`")?;
                self.expect(Tok::Dot, "`.` after a verdict label")?;
                let body = self.process_prefixed()?;
                Ok(Process::prefix(ProcLabel::Verdict(v), body))
            }
            Tok::LParen => {
                self.bump();
                let p = self.process_sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(s) if s == "nil" => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::Ident(_) => Ok(Process::Var(name(&self.variable()?))),
            _ => self.error("expected a process"),
        }
    }

    // ---- formulas ----

    fn formula_or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.formula_and()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.formula_and()?);
        }
        Ok(Formula::or(parts))
    }

    fn formula_and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.formula_unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.formula_unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn formula_unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "max" || s == "min" => {
                self.bump();
                let x = self.variable()?;
                self.expect(Tok::Dot, "`.` after the fixpoint variable")?;
                let body = self.formula_or()?;
                let x = name(&x);
                Ok(if s == "max" {
                    Formula::Max(x, Box::new(body))
                } else {
                    Formula::Min(x, Box::new(body))
                })
            }
            Tok::LBrack => {
                self.bump();
                let (s, line, col) = self.ident("an action")?;
                let a = self.action(&s, line, col)?;
                self.expect(Tok::RBrack, "`]`")?;
                let body = self.formula_unary()?;
                Ok(Formula::boxed(a, body))
            }
            Tok::Lt => {
                self.bump();
                let (s, line, col) = self.ident("an action")?;
                let a = self.action(&s, line, col)?;
                self.expect(Tok::Gt, "`>`")?;
                let body = self.formula_unary()?;
                Ok(Formula::diamond(a, body))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula_or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) => match s.as_str() {
                "tt" => {
                    self.bump();
                    Ok(Formula::TT)
                }
                "ff" => {
                    self.bump();
                    Ok(Formula::FF)
                }
                _ => Ok(Formula::Var(name(&self.variable()?))),
            },
            _ => self.error("expected a formula"),
        }
    }
}

/// Parses a monitor whose actions must belong to `alphabet`.
pub fn parse_monitor(text: &str, alphabet: &Alphabet) -> Result<Monitor> {
    let mut p = Parser::new(text, Some(alphabet))?;
    let m = p.monitor_sum()?;
    p.finish()?;
    Ok(m)
}

/// Parses a formula whose actions must belong to `alphabet`.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    let mut p = Parser::new(text, Some(alphabet))?;
    let f = p.formula_or()?;
    p.finish()?;
    Ok(f)
}

/// Parses a monitor over whatever actions it mentions.
pub fn parse_monitor_any(text: &str) -> Result<Monitor> {
    let mut p = Parser::new(text, None)?;
    let m = p.monitor_sum()?;
    p.finish()?;
    Ok(m)
}

/// Parses a formula over whatever actions it mentions.
pub fn parse_formula_any(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text, None)?;
    let f = p.formula_or()?;
    p.finish()?;
    Ok(f)
}

/// Parses a process term; verdict labels are written `[yes]`, `[no]`, `[end]`.
pub fn parse_process(text: &str, alphabet: &Alphabet) -> Result<Process> {
    let mut p = Parser::new(text, Some(alphabet))?;
    let t = p.process_sum()?;
    p.finish()?;
    Ok(t)
}

/// A term read from a file, together with its declared alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermFile<T> {
    pub alphabet: Alphabet,
    pub term: T,
}

/// Splits off the `alphabet:` header. The header line is blanked so that
/// error positions still refer to the original file.
fn split_header(text: &str) -> Result<(Option<Alphabet>, String)> {
    let mut alphabet = None;
    let mut body = String::with_capacity(text.len());
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if let Some(rest) = content.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(Error::Syntax {
                    line: i + 1,
                    column: 1,
                    message: "duplicate alphabet header".into(),
                });
            }
            let mut actions = Vec::new();
            for sym in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let a = Action::new(sym).map_err(|_| Error::ReservedToken {
                    token: sym.to_string(),
                    line: i + 1,
                    column: 1,
                })?;
                actions.push(a);
            }
            alphabet = Some(Alphabet::new(actions));
            body.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    Ok((alphabet, body))
}

/// Parses a monitor file. Without a header the alphabet is the set of
/// actions the term uses.
pub fn parse_monitor_file(text: &str) -> Result<TermFile<Monitor>> {
    let (alphabet, body) = split_header(text)?;
    let mut p = Parser::new(&body, alphabet.as_ref())?;
    let term = p.monitor_sum()?;
    p.finish()?;
    let alphabet = alphabet.unwrap_or_else(|| term.actions());
    Ok(TermFile { alphabet, term })
}

/// Parses a formula file, with the same header convention as monitors.
pub fn parse_formula_file(text: &str) -> Result<TermFile<Formula>> {
    let (alphabet, body) = split_header(text)?;
    let mut p = Parser::new(&body, alphabet.as_ref())?;
    let term = p.formula_or()?;
    p.finish()?;
    let alphabet = alphabet.unwrap_or_else(|| term.actions());
    Ok(TermFile { alphabet, term })
}
