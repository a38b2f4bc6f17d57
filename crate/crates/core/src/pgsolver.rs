//! Reading and writing games and solutions in the PGSolver text formats.
//!
//! ```text
//! parity <max id>;
//! <id> <priority> <owner> <succ>,<succ>,... ["label"];
//! ```
//!
//! and for solutions
//!
//! ```text
//! paritysol <max id>;
//! <id> <winner> [<strategy successor>];
//! ```
//!
//! Vertex ids must be dense from 0. Comments, `start` lines and other
//! extensions seen in the wild are rejected.

use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameError, ParityGame, Player, Priority, Vertex};
use crate::solution::Solution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("vertex {0} is defined twice")]
    DuplicateVertex(Vertex),
    #[error("vertex {vertex} has successor {successor} outside [0, {count})")]
    SuccessorOutOfRange {
        vertex: Vertex,
        successor: Vertex,
        count: usize,
    },
    #[error("vertex {0} has an empty successor list")]
    EmptySuccessors(Vertex),
    #[error("vertex {0} is missing (ids must be dense)")]
    MissingVertex(Vertex),
    #[error("vertex {id} exceeds the declared maximum id {max}")]
    AboveHeader { id: Vertex, max: Vertex },
    #[error("no vertices")]
    Empty,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A parse failure. `line` is 1-based; 0 when the problem is not tied to a line.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return syntax(line, format!("expected {what}, found {tok:?}"));
    }
    tok.parse()
        .map_err(|_| ParseError {
            line,
            kind: ParseErrorKind::Syntax(format!("{what} {tok:?} out of range")),
        })
}

/// Splits a line into its `;`-terminated body, or reports a syntax error.
fn body_of(lineno: usize, line: &str) -> Result<&str, ParseError> {
    match line.trim_end().strip_suffix(';') {
        Some(b) => Ok(b),
        None => syntax(lineno, "missing terminating ';'"),
    }
}

/// Parses a `<keyword> INT` header body, if the line is one.
fn header(lineno: usize, body: &str, keyword: &str) -> Result<Option<Vertex>, ParseError> {
    let mut toks = body.split_whitespace();
    if toks.next() != Some(keyword) {
        return Ok(None);
    }
    let max = match toks.next() {
        Some(t) => parse_int(lineno, t, "maximum vertex id")?,
        None => return syntax(lineno, "header without maximum vertex id"),
    };
    if toks.next().is_some() {
        return syntax(lineno, "trailing tokens in header");
    }
    Ok(Some(max))
}

/// Non-blank lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Checks ids are dense below `count` and returns the per-id slots.
fn dense<T>(slots: Vec<Option<T>>) -> Result<Vec<T>, ParseError> {
    slots
        .into_iter()
        .enumerate()
        .map(|(id, s)| s.ok_or(ParseError { line: 0, kind: ParseErrorKind::MissingVertex(id) }))
        .collect()
}

/// The header names the maximum id; the vertex-count reading (one more) is
/// also accepted since both conventions circulate. Anything larger means
/// trailing vertices are missing.
fn check_header(declared: Option<Vertex>, count: usize) -> Result<(), ParseError> {
    match declared {
        Some(h) if h > count => err(0, ParseErrorKind::MissingVertex(count)),
        _ => Ok(()),
    }
}

struct NodeSpec {
    line: usize,
    priority: Priority,
    owner: Player,
    successors: Vec<Vertex>,
    label: Option<String>,
}

fn parse_nodespec(lineno: usize, body: &str) -> Result<(Vertex, NodeSpec), ParseError> {
    let (fields, label) = match body.find('"') {
        Some(q) => {
            let rest = &body[q + 1..];
            let Some(label) = rest.strip_suffix('"') else {
                return syntax(lineno, "label must be the last field and be quoted");
            };
            if label.contains('"') {
                return syntax(lineno, "label contains a quote");
            }
            if !body[..q].ends_with(char::is_whitespace) {
                return syntax(lineno, "label not separated by a space");
            }
            (&body[..q], Some(label.to_string()))
        }
        None => (body, None),
    };
    let toks: Vec<&str> = fields.split_whitespace().collect();
    if toks.len() < 3 {
        return syntax(lineno, "expected: id priority owner successors");
    }
    let id: Vertex = parse_int(lineno, toks[0], "vertex id")?;
    let priority: Priority = parse_int(lineno, toks[1], "priority")?;
    let owner = match toks[2] {
        "0" => Player::Even,
        "1" => Player::Odd,
        t => return syntax(lineno, format!("owner must be 0 or 1, found {t:?}")),
    };
    let successors = match toks.len() {
        3 => return err(lineno, ParseErrorKind::EmptySuccessors(id)),
        4 => toks[3]
            .split(',')
            .map(|s| parse_int(lineno, s, "successor id"))
            .collect::<Result<Vec<Vertex>, _>>()?,
        _ => return syntax(lineno, "unexpected tokens after successor list"),
    };
    Ok((
        id,
        NodeSpec {
            line: lineno,
            priority,
            owner,
            successors,
            label,
        },
    ))
}

/// Parses a game in PGSolver format.
pub fn parse_game(text: &str) -> Result<ParityGame, ParseError> {
    let mut declared_max = None;
    let mut slots: Vec<Option<NodeSpec>> = Vec::new();
    for (idx, (lineno, line)) in lines(text).enumerate() {
        let body = body_of(lineno, line)?;
        if idx == 0 {
            if let Some(max) = header(lineno, body, "parity")? {
                declared_max = Some(max);
                continue;
            }
        }
        let (id, spec) = parse_nodespec(lineno, body)?;
        if let Some(max) = declared_max {
            if id > max {
                return err(lineno, ParseErrorKind::AboveHeader { id, max });
            }
        }
        if id >= slots.len() {
            slots.resize_with(id + 1, || None);
        }
        if slots[id].is_some() {
            return err(lineno, ParseErrorKind::DuplicateVertex(id));
        }
        slots[id] = Some(spec);
    }
    if slots.is_empty() {
        return err(0, ParseErrorKind::Empty);
    }
    check_header(declared_max, slots.len())?;
    let specs = dense(slots)?;
    let n = specs.len();
    for (v, s) in specs.iter().enumerate() {
        if let Some(&w) = s.successors.iter().find(|&&w| w >= n) {
            return err(
                s.line,
                ParseErrorKind::SuccessorOutOfRange {
                    vertex: v,
                    successor: w,
                    count: n,
                },
            );
        }
    }
    let mut priority = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for s in specs {
        priority.push(s.priority);
        owner.push(s.owner);
        successors.push(s.successors);
        labels.push(s.label);
    }
    let game = ParityGame::new(priority, owner, successors)
        .map_err(|e| ParseError { line: 0, kind: e.into() })?;
    Ok(game.with_labels(labels))
}

/// Writes `game` in canonical PGSolver form: header, ascending ids,
/// successors in stored order.
pub fn write_game(game: &ParityGame) -> String {
    let mut out = String::new();
    let n = game.vertex_count();
    if n == 0 {
        return out;
    }
    writeln!(out, "parity {};", n - 1).unwrap();
    for v in game.vertices() {
        write!(out, "{} {} {} ", v, game.priority(v), game.owner(v).index()).unwrap();
        for (i, w) in game.successors(v).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{w}").unwrap();
        }
        if let Some(label) = game.label(v) {
            write!(out, " \"{label}\"").unwrap();
        }
        out.push_str(";\n");
    }
    out
}

/// Parses a solution file. The result is total over its id range.
pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let mut declared_max = None;
    let mut slots: Vec<Option<(Player, Option<Vertex>)>> = Vec::new();
    for (idx, (lineno, line)) in lines(text).enumerate() {
        let body = body_of(lineno, line)?;
        if idx == 0 {
            if let Some(max) = header(lineno, body, "paritysol")? {
                declared_max = Some(max);
                continue;
            }
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return syntax(lineno, "expected: id winner [strategy]");
        }
        let id: Vertex = parse_int(lineno, toks[0], "vertex id")?;
        let winner = match toks[1] {
            "0" => Player::Even,
            "1" => Player::Odd,
            t => return syntax(lineno, format!("winner must be 0 or 1, found {t:?}")),
        };
        let strategy = match toks.get(2) {
            Some(t) => Some(parse_int(lineno, t, "strategy successor")?),
            None => None,
        };
        if let Some(max) = declared_max {
            if id > max {
                return err(lineno, ParseErrorKind::AboveHeader { id, max });
            }
        }
        if id >= slots.len() {
            slots.resize_with(id + 1, || None);
        }
        if slots[id].is_some() {
            return err(lineno, ParseErrorKind::DuplicateVertex(id));
        }
        slots[id] = Some((winner, strategy));
    }
    if slots.is_empty() {
        return err(0, ParseErrorKind::Empty);
    }
    check_header(declared_max, slots.len())?;
    let entries = dense(slots)?;
    let mut sol = Solution::empty(entries.len());
    for (v, (w, s)) in entries.into_iter().enumerate() {
        sol.set(v, w, s);
    }
    Ok(sol)
}

/// Writes a total solution. The strategy column is present iff the vertex is
/// owned by its winner.
pub fn write_solution(game: &ParityGame, solution: &Solution) -> String {
    let mut out = String::new();
    let n = solution.vertex_count();
    if n == 0 {
        return out;
    }
    writeln!(out, "paritysol {};", n - 1).unwrap();
    for v in 0..n {
        let w = solution
            .winner(v)
            .expect("only total solutions can be written");
        write!(out, "{} {}", v, w.index()).unwrap();
        if game.owner(v) == w {
            if let Some(s) = solution.strategy(v) {
                write!(out, " {s}").unwrap();
            }
        }
        out.push_str(";\n");
    }
    out
}
