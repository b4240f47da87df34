//! Problem instances and solutions for the minimum arborescence solver.
//!
//! An instance is a dense n x n cost matrix over nodes 1..=n, a distinguished
//! origin (the root the tree must grow from), and a sentinel cost M that
//! stands in for every infeasible arc. M is strictly larger than every finite
//! cost, so the engines can treat "infeasible" as "too expensive to ever pick"
//! and test feasibility with a plain `cost < M` comparison.
//!
//! The text format is line-oriented:
//!
//! ```text
//! N ORIGIN [M]
//! c(1,1) c(1,2) ... c(1,N)
//! ...
//! c(N,1) ...        c(N,N)
//! ```
//!
//! Entries are nonnegative integers or the token `inf`. Row i column j is the
//! cost of the arc i -> j. When M is omitted it is chosen as
//! (largest finite cost) + 1. Blank lines are ignored.

use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Arc costs, duals, and objectives all use one signed width.
///
/// Duals and the objective are bounded by n * M, so validation rejects
/// sentinels where (n + 1) * M would leave i64.
pub type Cost = i64;

/// Terminal disposition of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    /// A minimum arborescence rooted at the origin was found.
    Optimum,
    /// Some node cannot be reached from the origin; z reports the sentinel.
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Optimum => f.write_str("OPTIMUM"),
            Status::Infeasible => f.write_str("INFEASIBLE"),
        }
    }
}

/// A validated solver input.
///
/// Stored 1-based: the cost grid is (n+1) x (n+1) with row and column 0
/// padded with M, so engine code indexes nodes directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    n: usize,
    origin: usize,
    m: Cost,
    cost: Vec<Vec<Cost>>,
}

impl ProblemInstance {
    /// Builds an instance, choosing the sentinel automatically.
    ///
    /// `rows[i-1][j-1]` is the cost of arc i -> j; `None` marks an infeasible
    /// arc. Diagonal entries are accepted as given; the engines never select
    /// them because a candidate arc's tail must lie outside the head's
    /// component.
    pub fn new(origin: usize, rows: Vec<Vec<Option<Cost>>>) -> Result<Self, InvalidInstance> {
        let m = choose_sentinel(&rows);
        Self::with_sentinel(origin, rows, m)
    }

    /// Builds an instance with an explicit sentinel.
    pub fn with_sentinel(
        origin: usize,
        rows: Vec<Vec<Option<Cost>>>,
        m: Cost,
    ) -> Result<Self, InvalidInstance> {
        let violations = validate(origin, &rows, m);
        if !violations.is_empty() {
            return Err(InvalidInstance(violations));
        }
        let n = rows.len();
        let mut cost = vec![vec![m; n + 1]; n + 1];
        for (i, row) in rows.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if let Some(c) = entry {
                    cost[i + 1][j + 1] = *c;
                }
            }
        }
        Ok(ProblemInstance { n, origin, m, cost })
    }

    /// Parses the text format. Equivalent to `text.parse()`.
    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        text.parse()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    /// The sentinel M: strictly above every finite cost.
    pub fn sentinel(&self) -> Cost {
        self.m
    }

    /// Raw cost of arc i -> j (1-based); infeasible arcs read as M.
    pub fn cost(&self, i: usize, j: usize) -> Cost {
        self.cost[i][j]
    }

    /// Whether arc i -> j carries a finite cost.
    pub fn is_finite(&self, i: usize, j: usize) -> bool {
        self.cost[i][j] < self.m
    }

    pub fn finite_cost(&self, i: usize, j: usize) -> Option<Cost> {
        self.is_finite(i, j).then(|| self.cost[i][j])
    }

    /// Re-checks the construction invariants; empty for any value built
    /// through the public constructors.
    pub fn violations(&self) -> Vec<Violation> {
        let rows: Vec<Vec<Option<Cost>>> = (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.finite_cost(i, j)).collect())
            .collect();
        validate(self.origin, &rows, self.m)
    }

    /// Renders the text format with an explicit sentinel, so the result
    /// parses back to an identical instance.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} {}\n", self.n, self.origin, self.m));
        for i in 1..=self.n {
            let row: Vec<String> = (1..=self.n)
                .map(|j| match self.finite_cost(i, j) {
                    Some(c) => c.to_string(),
                    None => "inf".to_string(),
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Sentinel rule: one more than the largest finite cost, and 1 for a matrix
/// with no finite entries at all.
pub fn choose_sentinel(rows: &[Vec<Option<Cost>>]) -> Cost {
    rows.iter()
        .flatten()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0)
        .saturating_add(1)
}

/// Checks every construction invariant and reports all failures at once.
pub fn validate(origin: usize, rows: &[Vec<Option<Cost>>], m: Cost) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = rows.len();
    if n == 0 {
        out.push(Violation::EmptyMatrix);
        return out;
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            out.push(Violation::NotSquare {
                row: i + 1,
                expected: n,
                found: row.len(),
            });
        }
    }
    if origin == 0 || origin > n {
        out.push(Violation::OriginOutOfRange { origin, n });
    }
    let mut max_finite: Cost = 0;
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if let Some(c) = *entry {
                if c < 0 {
                    out.push(Violation::NegativeCost {
                        i: i + 1,
                        j: j + 1,
                        value: c,
                    });
                }
                max_finite = max_finite.max(c);
            }
        }
    }
    if m <= max_finite || m < 1 {
        out.push(Violation::SentinelTooSmall {
            m,
            bound: max_finite,
        });
    }
    if (n as i128 + 1) * (m as i128) > i64::MAX as i128 {
        out.push(Violation::SentinelOverflow { m, n });
    }
    out
}

/// One violated construction invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("origin {origin} out of range 1..={n}")]
    OriginOutOfRange { origin: usize, n: usize },
    #[error("cost({i},{j}) = {value} is negative")]
    NegativeCost { i: usize, j: usize, value: Cost },
    #[error("sentinel {m} must exceed every finite cost (largest is {bound}) and be at least 1")]
    SentinelTooSmall { m: Cost, bound: Cost },
    #[error("sentinel {m} with {n} nodes could overflow i64 duals")]
    SentinelOverflow { m: Cost, n: usize },
}

/// All invariant failures from one construction attempt.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct InvalidInstance(pub Vec<Violation>);

impl fmt::Display for InvalidInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid instance: ")?;
        for (idx, v) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Text-format failure, located by 1-based line and character column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty input, expected header `N ORIGIN [M]`")]
    EmptyInput,
    #[error("header takes 2 or 3 fields `N ORIGIN [M]`, found {0}")]
    HeaderArity(usize),
    #[error("expected {what}, found `{token}`")]
    BadToken { what: &'static str, token: String },
    #[error("node count must be at least 1")]
    ZeroNodes,
    #[error("origin {origin} out of range 1..={n}")]
    OriginOutOfRange { origin: usize, n: usize },
    #[error("matrix row {row} has {found} entries, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} matrix rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("unexpected content after the matrix")]
    TrailingContent,
    #[error("cost is negative")]
    NegativeCost,
    #[error("cost {value} does not lie below the sentinel {m}")]
    CostNotBelowSentinel { value: Cost, m: Cost },
    #[error("sentinel {m} with {n} nodes could overflow i64 duals")]
    SentinelOverflow { m: Cost, n: usize },
}

/// Splits a line into (1-based char column, token) pairs.
pub(crate) fn line_tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0usize;
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((c0, b0)) = start.take() {
                out.push((c0, &line[b0..byte]));
            }
        } else if start.is_none() {
            start = Some((col, byte));
        }
    }
    if let Some((c0, b0)) = start {
        out.push((c0, &line[b0..]));
    }
    out
}

fn parse_usize(line: usize, col: usize, token: &str, what: &'static str) -> Result<usize, ParseError> {
    token.parse::<usize>().map_err(|_| ParseError {
        line,
        col,
        kind: ParseErrorKind::BadToken {
            what,
            token: token.to_string(),
        },
    })
}

impl FromStr for ProblemInstance {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(idx, l)| (idx + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());

        let (header_line, header) = lines.next().ok_or(ParseError {
            line: 1,
            col: 1,
            kind: ParseErrorKind::EmptyInput,
        })?;
        let fields = line_tokens(header);
        if fields.len() < 2 || fields.len() > 3 {
            return Err(ParseError {
                line: header_line,
                col: 1,
                kind: ParseErrorKind::HeaderArity(fields.len()),
            });
        }
        let n = parse_usize(header_line, fields[0].0, fields[0].1, "node count")?;
        if n == 0 {
            return Err(ParseError {
                line: header_line,
                col: fields[0].0,
                kind: ParseErrorKind::ZeroNodes,
            });
        }
        let origin = parse_usize(header_line, fields[1].0, fields[1].1, "origin")?;
        if origin == 0 || origin > n {
            return Err(ParseError {
                line: header_line,
                col: fields[1].0,
                kind: ParseErrorKind::OriginOutOfRange { origin, n },
            });
        }
        let explicit_m = match fields.get(2) {
            None => None,
            Some(&(col, token)) => {
                let m = token.parse::<Cost>().map_err(|_| ParseError {
                    line: header_line,
                    col,
                    kind: ParseErrorKind::BadToken {
                        what: "sentinel",
                        token: token.to_string(),
                    },
                })?;
                if m < 1 {
                    return Err(ParseError {
                        line: header_line,
                        col,
                        kind: ParseErrorKind::CostNotBelowSentinel { value: 0, m },
                    });
                }
                Some((col, m))
            }
        };

        let mut rows: Vec<Vec<Option<Cost>>> = Vec::with_capacity(n);
        let mut max_pos = (header_line, 1usize);
        let mut max_finite: Cost = 0;
        for row_idx in 1..=n {
            let (line_no, line) = lines.next().ok_or(ParseError {
                line: header_line,
                col: 1,
                kind: ParseErrorKind::MissingRows {
                    expected: n,
                    found: row_idx - 1,
                },
            })?;
            let tokens = line_tokens(line);
            if tokens.len() != n {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseErrorKind::RowWidth {
                        row: row_idx,
                        expected: n,
                        found: tokens.len(),
                    },
                });
            }
            let mut row = Vec::with_capacity(n);
            for (col, token) in tokens {
                if token == "inf" {
                    row.push(None);
                    continue;
                }
                let value = token.parse::<Cost>().map_err(|_| ParseError {
                    line: line_no,
                    col,
                    kind: ParseErrorKind::BadToken {
                        what: "cost or `inf`",
                        token: token.to_string(),
                    },
                })?;
                if value < 0 {
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::NegativeCost,
                    });
                }
                if let Some((m_col, m)) = explicit_m {
                    let _ = m_col;
                    if value >= m {
                        return Err(ParseError {
                            line: line_no,
                            col,
                            kind: ParseErrorKind::CostNotBelowSentinel { value, m },
                        });
                    }
                }
                if value >= max_finite {
                    max_finite = value;
                    max_pos = (line_no, col);
                }
                row.push(Some(value));
            }
            rows.push(row);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(ParseError {
                line: line_no,
                col: 1,
                kind: ParseErrorKind::TrailingContent,
            });
        }

        let m = explicit_m.map(|(_, m)| m).unwrap_or_else(|| choose_sentinel(&rows));
        if (n as i128 + 1) * (m as i128) > i64::MAX as i128 {
            let (line, col) = if explicit_m.is_some() {
                (header_line, fields[2].0)
            } else {
                max_pos
            };
            return Err(ParseError {
                line,
                col,
                kind: ParseErrorKind::SentinelOverflow { m, n },
            });
        }

        ProblemInstance::with_sentinel(origin, rows, m).map_err(|err| ParseError {
            line: header_line,
            col: 1,
            kind: ParseErrorKind::BadToken {
                what: "consistent instance",
                token: err.to_string(),
            },
        })
    }
}

/// Final state of a solve, in the shape the original procedure prints:
/// the objective plus one value per node for each working array.
///
/// All vectors have length n with node j at position j - 1. `predecessor`
/// holds the starred arc's tail for each node (0 = none); the origin entry is
/// 0 for the verbatim engine and `origin` for the structured engine, which
/// closes its run by pointing the origin at itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub status: Status,
    pub z: Cost,
    pub predecessor: Vec<usize>,
    pub dual: Vec<Cost>,
    pub i_bar: Vec<usize>,
    pub j_bar: Vec<usize>,
    pub span: Vec<i64>,
}

impl Solution {
    pub fn n(&self) -> usize {
        self.predecessor.len()
    }

    /// Predecessor of node j (1-based), 0 when j has no starred arc.
    pub fn predecessor_of(&self, j: usize) -> usize {
        self.predecessor[j - 1]
    }

    /// Predecessor array with the origin entry forced to 0, so results from
    /// both engines compare equal when they name the same tree.
    pub fn normalized_predecessor(&self, origin: usize) -> Vec<usize> {
        let mut p = self.predecessor.clone();
        p[origin - 1] = 0;
        p
    }
}
