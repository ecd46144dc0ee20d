//! Line-oriented sessions.

use std::io::{self, BufRead, Write};

use tss_core::asymptotics::{axiom_suite, eventual_compare, limit_at_infinity};
use tss_core::hahn::{decompose, Verdict};
use tss_core::{Budget, Constant, Dominant, ExpRational, FieldKind, Rational, Series};

use crate::eval::{evaluate, EvalError, EvalErrorKind};
use crate::parse::{parse, SyntaxError};

pub const DEFAULT_TERMS: usize = 10;
pub const DEFAULT_BUDGET: usize = 64;

const HELP: &str = "\
expand <expr> [k]       first k terms (a bare expression is expanded too)
compare <e1> , <e2>     eventual order
limit <expr>            limit as x -> +inf
dominant <expr>         leading monomial
decompose <expr>        infinite, constant and infinitesimal parts
axioms                  run the exponential axiom checks
set budget <n>          term budget for undecided work
set field <name>        rational or exprational
set terms <k>           default number of displayed terms
show                    current settings
quit                    leave";

/// How a command ended, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Indeterminate,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Indeterminate => 2,
            Status::Error => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub status: Status,
}

impl Reply {
    fn ok(text: impl Into<String>) -> Self {
        Reply { text: text.into(), status: Status::Ok }
    }

    fn indeterminate(text: impl Into<String>) -> Self {
        Reply { text: text.into(), status: Status::Indeterminate }
    }

    fn error(text: impl Into<String>) -> Self {
        Reply { text: text.into(), status: Status::Error }
    }
}

pub fn syntax_report(err: &SyntaxError, source: &str) -> String {
    let pad = source[..err.offset.min(source.len())].chars().count();
    format!("error: {}\n  {source}\n  {}^", err.message.replace('\n', " "), " ".repeat(pad))
}

pub fn verdict_symbol(v: Verdict) -> &'static str {
    match v {
        Verdict::Less => "≺",
        Verdict::Equal => "=",
        Verdict::Greater => "≻",
        Verdict::Indeterminate => "?",
    }
}

#[derive(Clone, Debug)]
pub struct Session {
    pub budget: Budget,
    pub field: FieldKind,
    pub terms: usize,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            budget: Budget::new(DEFAULT_BUDGET).expect("positive"),
            field: FieldKind::Rational,
            terms: DEFAULT_TERMS,
        }
    }
}

enum Failure {
    Syntax(SyntaxError),
    Eval(EvalError),
}

impl Session {
    /// Parses and evaluates `source` in the session's field.
    fn series<C: Constant>(&self, source: &str) -> Result<Series<C>, Failure> {
        let e = parse(source).map_err(Failure::Syntax)?;
        evaluate::<C>(&e, self.budget).map_err(Failure::Eval)
    }

    /// Kernel errors that only mean the budget ran out are reported as
    /// indeterminate rather than as failures.
    fn failure(&self, f: Failure, source: &str) -> Reply {
        match f {
            Failure::Syntax(s) => Reply::error(syntax_report(&s, source)),
            Failure::Eval(e) if e.is_undecided() => {
                let text = e.report(source, self.field);
                Reply::indeterminate(text.replacen("error:", "indeterminate:", 1))
            }
            Failure::Eval(e) => Reply::error(e.report(source, self.field)),
        }
    }

    /// Runs one line. Blank lines and `#` comments give an empty reply.
    pub fn execute(&mut self, line: &str) -> Reply {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Reply::ok("");
        }
        let (verb, rest) = match line.split_once(char::is_whitespace) {
            Some((v, r)) => (v, r.trim()),
            None => (line, ""),
        };
        match verb {
            "help" => Reply::ok(HELP),
            "show" => Reply::ok(self.settings()),
            "set" => self.set(rest),
            "axioms" => {
                let report = axiom_suite(self.budget);
                let status = if report.failed() > 0 {
                    Status::Error
                } else if report.indeterminate() > 0 {
                    Status::Indeterminate
                } else {
                    Status::Ok
                };
                Reply { text: report.to_string(), status }
            }
            "expand" | "compare" | "limit" | "dominant" | "decompose" if rest.is_empty() => {
                Reply::error(format!("error: {verb} needs an expression (see help)"))
            }
            "expand" => self.dispatch(Verb::Expand, rest),
            "compare" => self.dispatch(Verb::Compare, rest),
            "limit" => self.dispatch(Verb::Limit, rest),
            "dominant" => self.dispatch(Verb::Dominant, rest),
            "decompose" => self.dispatch(Verb::Decompose, rest),
            _ => self.dispatch(Verb::Expand, line),
        }
    }

    fn settings(&self) -> String {
        format!("budget = {}\nfield = {}\nterms = {}", self.budget.max_terms(), self.field, self.terms)
    }

    fn set(&mut self, rest: &str) -> Reply {
        let mut words = rest.split_whitespace();
        let (key, value) = match (words.next(), words.next(), words.next()) {
            (Some(k), Some(v), None) => (k, v),
            _ => return Reply::error("error: usage: set budget <n> | set field <rational|exprational> | set terms <k>"),
        };
        match key {
            "budget" => match value.parse::<usize>().ok().and_then(|n| Budget::new(n).ok()) {
                Some(b) => {
                    self.budget = b;
                    Reply::ok(format!("budget = {}", b.max_terms()))
                }
                None => Reply::error(format!("error: budget must be a positive integer, got {value:?}")),
            },
            "terms" => match value.parse::<usize>() {
                Ok(k) if k > 0 => {
                    self.terms = k;
                    Reply::ok(format!("terms = {k}"))
                }
                _ => Reply::error(format!("error: terms must be a positive integer, got {value:?}")),
            },
            "field" => match parse_field(value) {
                Some(f) => {
                    self.field = f;
                    Reply::ok(format!("field = {f}"))
                }
                None => Reply::error(format!("error: unknown field {value:?} (rational or exprational)")),
            },
            _ => Reply::error(format!("error: unknown setting {key:?} (budget, field or terms)")),
        }
    }

    fn dispatch(&self, verb: Verb, rest: &str) -> Reply {
        match self.field {
            FieldKind::Rational => self.run::<Rational>(verb, rest),
            FieldKind::ExpRational => self.run::<ExpRational>(verb, rest),
        }
    }

    fn run<C: Constant>(&self, verb: Verb, rest: &str) -> Reply {
        match verb {
            Verb::Expand => {
                let (source, k) = split_count(rest);
                self.expand::<C>(source, k.unwrap_or(self.terms))
            }
            Verb::Compare => match split_comma(rest) {
                Some((a, b)) => self.compare::<C>(a, b),
                None => Reply::error("error: usage: compare <e1> , <e2>"),
            },
            Verb::Limit => match self.series::<C>(rest) {
                Ok(f) => {
                    let l = limit_at_infinity(&f, self.budget);
                    let status = if l == tss_core::asymptotics::Limit::Indeterminate {
                        Status::Indeterminate
                    } else {
                        Status::Ok
                    };
                    Reply { text: l.to_string(), status }
                }
                Err(e) => self.failure(e, rest),
            },
            Verb::Dominant => match self.series::<C>(rest) {
                Ok(f) => match f.dominant(self.budget) {
                    Ok(Dominant::Zero) => Reply::ok("0"),
                    Ok(Dominant::Term(t)) => Reply::ok(t.monomial.to_string()),
                    Ok(Dominant::Indeterminate) => Reply::indeterminate("Indeterminate"),
                    Err(k) => self.kernel_failure(k, rest),
                },
                Err(e) => self.failure(e, rest),
            },
            Verb::Decompose => match self.series::<C>(rest) {
                Ok(f) => match decompose(&f, self.budget) {
                    Ok(d) => {
                        let parts = [
                            ("infinite     ", d.infinite.expansion(self.terms, self.budget)),
                            ("constant     ", Series::constant(d.constant).expansion(1, self.budget)),
                            ("infinitesimal", d.infinitesimal.expansion(self.terms, self.budget)),
                        ];
                        let mut status = Status::Ok;
                        let mut lines = Vec::new();
                        for (name, e) in parts {
                            if let Some(k) = &e.error {
                                return self.kernel_failure(k.clone(), rest);
                            }
                            if e.is_indeterminate() {
                                status = Status::Indeterminate;
                            }
                            lines.push(format!("{name} = {e}"));
                        }
                        Reply { text: lines.join("\n"), status }
                    }
                    Err(k) => self.kernel_failure(k, rest),
                },
                Err(e) => self.failure(e, rest),
            },
        }
    }

    fn kernel_failure(&self, k: tss_core::KernelError, source: &str) -> Reply {
        let err = EvalError { kind: EvalErrorKind::Kernel(k), span: 0..source.len() };
        self.failure(Failure::Eval(err), source)
    }

    /// The text printed by `expand` and `tss eval`.
    pub fn expand_text(&self, source: &str, k: usize) -> Reply {
        match self.field {
            FieldKind::Rational => self.expand::<Rational>(source, k),
            FieldKind::ExpRational => self.expand::<ExpRational>(source, k),
        }
    }

    fn expand<C: Constant>(&self, source: &str, k: usize) -> Reply {
        let f = match self.series::<C>(source) {
            Ok(f) => f,
            Err(e) => return self.failure(e, source),
        };
        let e = f.expansion(k, self.budget);
        if let Some(err) = e.error.clone() {
            return self.kernel_failure(err, source);
        }
        if e.is_indeterminate() {
            Reply::indeterminate(e.to_string())
        } else {
            Reply::ok(e.to_string())
        }
    }

    /// The line printed by `compare` and `tss compare`.
    pub fn compare_text(&self, a: &str, b: &str) -> Reply {
        match self.field {
            FieldKind::Rational => self.compare::<Rational>(a, b),
            FieldKind::ExpRational => self.compare::<ExpRational>(a, b),
        }
    }

    fn compare<C: Constant>(&self, a: &str, b: &str) -> Reply {
        let (a, b) = (a.trim(), b.trim());
        let f = match self.series::<C>(a) {
            Ok(f) => f,
            Err(e) => return self.failure(e, a),
        };
        let g = match self.series::<C>(b) {
            Ok(g) => g,
            Err(e) => return self.failure(e, b),
        };
        let v = eventual_compare(&f, &g, self.budget);
        let text = format!("{a} {} {b} ({v})", verdict_symbol(v));
        if v.is_determinate() {
            Reply::ok(text)
        } else {
            Reply::indeterminate(text)
        }
    }
}

#[derive(Clone, Copy)]
enum Verb {
    Expand,
    Compare,
    Limit,
    Dominant,
    Decompose,
}

pub fn parse_field(name: &str) -> Option<FieldKind> {
    match name {
        "rational" => Some(FieldKind::Rational),
        "exprational" => Some(FieldKind::ExpRational),
        _ => None,
    }
}

/// Splits off a trailing term count when the rest still parses.
fn split_count(rest: &str) -> (&str, Option<usize>) {
    if let Some((head, last)) = rest.rsplit_once(char::is_whitespace) {
        if let Ok(k) = last.parse::<usize>() {
            if k > 0 && parse(head).is_ok() {
                return (head.trim_end(), Some(k));
            }
        }
    }
    (rest, None)
}

/// Splits at the first comma outside parentheses.
fn split_comma(rest: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in rest.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&rest[..i], &rest[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Reads commands until end of input or `quit`.
///
/// With `echo`, each command is written back after a `> ` marker so that the
/// output reads as a transcript. Returns the most severe status seen.
pub fn run(input: impl BufRead, mut output: impl Write, prompt: bool, echo: bool) -> io::Result<Status> {
    let mut session = Session::default();
    let mut worst = Status::Ok;
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(output, "tss> ")?;
            output.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        if echo {
            writeln!(output, "> {line}")?;
        }
        let trimmed = line.trim();
        if trimmed == "quit" || trimmed == "exit" {
            break;
        }
        let reply = session.execute(trimmed);
        worst = worst.max(reply.status);
        if !reply.text.is_empty() {
            writeln!(output, "{}", reply.text)?;
        }
    }
    if prompt {
        writeln!(output)?;
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reply(lines: &[&str]) -> Reply {
        let mut s = Session::default();
        let mut last = Reply::ok("");
        for l in lines {
            last = s.execute(l);
        }
        last
    }

    #[test]
    fn worked_commands() {
        assert_eq!(reply(&["compare exp(x), x^1000"]).text, "exp(x) ≻ x^1000 (Greater)");
        assert_eq!(reply(&["limit 1/(1-1/x)"]).text, "1");
        assert_eq!(reply(&["dominant x^2+3+1/x"]).text, "x^2");
        assert_eq!(reply(&["expand 1/(1-1/x) 3"]).text, "1 + x^-1 + x^-2 + o(x^-2)");
        assert_eq!(reply(&["set terms 2", "1/(1-1/x)"]).text, "1 + x^-1 + o(x^-1)");
    }

    #[test]
    fn trailing_counts_and_commas() {
        assert_eq!(split_count("x + 2"), ("x + 2", None));
        assert_eq!(split_count("x 2"), ("x", Some(2)));
        assert_eq!(split_count("2"), ("2", None));
        assert_eq!(split_comma("exp(x, y), x"), Some(("exp(x, y)", " x")));
        assert_eq!(split_comma("x"), None);
    }

    #[test]
    fn statuses() {
        assert_eq!(reply(&["1/0"]).status, Status::Error);
        assert_eq!(reply(&["set field nope"]).status, Status::Error);
        assert_eq!(reply(&["x^^2"]).text, "error: expected an expression, found '^'\n  x^^2\n    ^");
        assert_eq!(reply(&["# note"]).text, "");
        assert_eq!(reply(&["set field exprational", "limit exp(1/x)"]).text, "1");
        assert_eq!(reply(&["set field exprational", "limit exp(1) + 1/x"]).text, "e^(1)");
    }
}
