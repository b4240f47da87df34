//! Dependency parsing as minimum arborescence.
//!
//! A parse instance is a token list (the pseudo-token ROOT included), a root
//! index, and real-valued arc weights `w(head, dependent)`. Decoding picks
//! the head assignment maximizing total weight; the solvers minimize cost,
//! so the adapter flips the objective with an affine map on quantized
//! integers:
//!
//! ```text
//! q(w) = round_ties_even(w * scale)        c(i, j) = q_max - q(w(i, j))
//! ```
//!
//! Because every spanning assignment has exactly n - 1 arcs, the map
//! preserves the argmax exactly and ties stay ties:
//!
//! ```text
//! cost(T) = (n - 1) * q_max - score(T)
//! ```
//!
//! [`ParseInstance::decode`] asserts that identity on every answer. The
//! diagonal and the root's incoming column are infeasible by construction;
//! weights there are rejected rather than ignored so a stray entry cannot
//! silently distort `q_max` and with it the whole cost matrix.

use crate::instance::{Cost, InvalidInstance, ProblemInstance, Status};
use crate::{structured, verbatim};
use serde::Serialize;
use std::str::FromStr;
use thiserror::Error;

/// Default weight quantization: three decimal places.
pub const DEFAULT_SCALE: u32 = 1000;

/// Which solver decodes the instance. Both produce identical assignments;
/// exposing the choice lets callers cross-check that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Verbatim,
    Structured,
}

/// A scored dependency parsing instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseInstance {
    tokens: Vec<String>,
    root: usize,
    weights: Vec<Vec<Option<f64>>>,
}

impl ParseInstance {
    /// Builds an instance from a dense weight grid: `weights[i-1][j-1]` is
    /// the weight of attaching token j under head i, `None` where no arc
    /// exists. Self-arcs and arcs into the root must be `None`.
    pub fn new(
        tokens: Vec<String>,
        root: usize,
        weights: Vec<Vec<Option<f64>>>,
    ) -> Result<Self, AdapterError> {
        let n = tokens.len();
        if n == 0 {
            return Err(AdapterError::NoTokens);
        }
        if root == 0 || root > n {
            return Err(AdapterError::RootOutOfRange { root, n });
        }
        if weights.len() != n {
            return Err(AdapterError::WrongRowCount {
                expected: n,
                found: weights.len(),
            });
        }
        for (i0, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(AdapterError::NotSquare {
                    row: i0 + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j0, entry) in row.iter().enumerate() {
                let (i, j) = (i0 + 1, j0 + 1);
                if let Some(w) = *entry {
                    if !w.is_finite() {
                        return Err(AdapterError::NotFinite { i, j, value: w });
                    }
                    if i == j {
                        return Err(AdapterError::SelfArc { i });
                    }
                    if j == root {
                        return Err(AdapterError::IntoRoot { i, root });
                    }
                }
            }
        }
        Ok(ParseInstance {
            tokens,
            root,
            weights,
        })
    }

    /// Builds an instance from explicit `(head, dependent, weight)` arcs.
    pub fn from_arcs(
        tokens: Vec<String>,
        root: usize,
        arcs: &[(usize, usize, f64)],
    ) -> Result<Self, AdapterError> {
        let n = tokens.len();
        let mut weights = vec![vec![None; n]; n];
        for &(head, dep, w) in arcs {
            if head == 0 || head > n || dep == 0 || dep > n {
                return Err(AdapterError::ArcOutOfRange { head, dep, n });
            }
            if weights[head - 1][dep - 1].is_some() {
                return Err(AdapterError::DuplicateArc { head, dep });
            }
            weights[head - 1][dep - 1] = Some(w);
        }
        Self::new(tokens, root, weights)
    }

    /// Parses the parse-file format. Equivalent to `text.parse()`.
    pub fn from_text(text: &str) -> Result<Self, ParseFileError> {
        text.parse()
    }

    pub fn n(&self) -> usize {
        self.tokens.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Surface form of token j (1-based).
    pub fn token(&self, j: usize) -> &str {
        &self.tokens[j - 1]
    }

    /// Weight of arc i -> j (1-based), if present.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights[i - 1][j - 1]
    }

    fn quantized(&self, scale: u32) -> Result<(Vec<Vec<Option<i64>>>, i64), AdapterError> {
        if scale == 0 {
            return Err(AdapterError::ZeroScale);
        }
        let mut grid = vec![vec![None; self.n()]; self.n()];
        let mut q_max: i64 = 0;
        for (i0, row) in self.weights.iter().enumerate() {
            for (j0, entry) in row.iter().enumerate() {
                if let Some(w) = *entry {
                    let r = (w * scale as f64).round_ties_even();
                    // +-2^62 keeps the i64 cast exact and leaves headroom
                    // for the cost subtraction below.
                    if !(-4.611_686_018_427_388e18..=4.611_686_018_427_388e18).contains(&r) {
                        return Err(AdapterError::QuantizeOverflow {
                            i: i0 + 1,
                            j: j0 + 1,
                            value: w,
                            scale,
                        });
                    }
                    let q = r as i64;
                    q_max = q_max.max(q);
                    grid[i0][j0] = Some(q);
                }
            }
        }
        Ok((grid, q_max))
    }

    fn reduce(&self, grid: &[Vec<Option<i64>>], q_max: i64) -> Result<ProblemInstance, AdapterError> {
        let rows = grid
            .iter()
            .enumerate()
            .map(|(i0, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j0, entry)| {
                        entry
                            .map(|q| {
                                Cost::try_from(q_max as i128 - q as i128).map_err(|_| {
                                    AdapterError::ReductionOverflow {
                                        i: i0 + 1,
                                        j: j0 + 1,
                                    }
                                })
                            })
                            .transpose()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemInstance::new(self.root, rows)?)
    }

    /// The equivalent minimization instance: costs `q_max - q(w)`, absent
    /// arcs infeasible, origin at the root.
    pub fn to_min_instance(&self, scale: u32) -> Result<ProblemInstance, AdapterError> {
        let (grid, q_max) = self.quantized(scale)?;
        self.reduce(&grid, q_max)
    }

    /// Decodes the maximum-weight head assignment through the chosen engine
    /// and proves the affine identity on the way out.
    pub fn decode(&self, engine: Engine, scale: u32) -> Result<HeadAssignment, DecodeError> {
        let (grid, q_max) = self.quantized(scale)?;
        let inst = self.reduce(&grid, q_max)?;
        let sol = match engine {
            Engine::Verbatim => verbatim::solve(&inst),
            Engine::Structured => structured::solve(&inst),
        };
        if sol.status == Status::Infeasible {
            return Err(DecodeError::Infeasible {
                sentinel: inst.sentinel(),
            });
        }
        let head = sol.normalized_predecessor(self.root);
        let mut score: i128 = 0;
        for j in 1..=self.n() {
            if j == self.root {
                continue;
            }
            let q = grid[head[j - 1] - 1][j - 1].expect("selected arcs carry weights");
            score += q as i128;
        }
        let arcs = self.n() as i128 - 1;
        assert_eq!(
            sol.z as i128,
            arcs * q_max as i128 - score,
            "affine reduction identity violated: cost {} vs {} * {} - {}",
            sol.z,
            arcs,
            q_max,
            score
        );
        let score = i64::try_from(score)
            .map_err(|_| AdapterError::ReductionOverflow { i: 0, j: 0 })
            .map_err(DecodeError::Adapter)?;
        Ok(HeadAssignment {
            head,
            score,
            cost: sol.z,
            q_max,
            scale,
        })
    }

    /// Renders an assignment as one `index surface head` line per non-root
    /// token, ascending.
    pub fn export_heads(&self, assignment: &HeadAssignment) -> String {
        assert_eq!(assignment.head.len(), self.n(), "assignment/token mismatch");
        let mut out = String::new();
        for j in 1..=self.n() {
            if j == self.root {
                continue;
            }
            out.push_str(&format!("{} {} {}\n", j, self.token(j), assignment.head[j - 1]));
        }
        out
    }
}

/// A decoded head assignment: `head[j-1]` is token j's head, 0 at the root.
/// `score` and `q_max` are quantized (weight times scale); `cost` is the
/// minimization objective, tied to the score by
/// `cost = (n - 1) * q_max - score`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeadAssignment {
    pub head: Vec<usize>,
    pub score: i64,
    pub cost: Cost,
    pub q_max: i64,
    pub scale: u32,
}

impl HeadAssignment {
    /// The score back on the original weight scale.
    pub fn raw_score(&self) -> f64 {
        self.score as f64 / self.scale as f64
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdapterError {
    #[error("token list is empty")]
    NoTokens,
    #[error("root index {root} out of range 1..={n}")]
    RootOutOfRange { root: usize, n: usize },
    #[error("weight grid has {found} rows, expected {expected}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("weight row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("weight({i},{j}) = {value} is not a finite number")]
    NotFinite { i: usize, j: usize, value: f64 },
    #[error("weight({i},{i}) would make token {i} its own head")]
    SelfArc { i: usize },
    #[error("weight({i},{root}) would give the root token a head")]
    IntoRoot { i: usize, root: usize },
    #[error("arc ({head},{dep}) falls outside 1..={n}")]
    ArcOutOfRange { head: usize, dep: usize, n: usize },
    #[error("arc ({head},{dep}) given twice")]
    DuplicateArc { head: usize, dep: usize },
    #[error("scale must be positive")]
    ZeroScale,
    #[error("weight({i},{j}) = {value} overflows at scale {scale}")]
    QuantizeOverflow {
        i: usize,
        j: usize,
        value: f64,
        scale: u32,
    },
    #[error("reduced cost at ({i},{j}) overflows 64-bit integers")]
    ReductionOverflow { i: usize, j: usize },
    #[error(transparent)]
    Instance(#[from] InvalidInstance),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("no spanning head assignment exists; objective pinned at sentinel {sentinel}")]
    Infeasible { sentinel: Cost },
    #[error(transparent)]
    Adapter(#[from] AdapterError),
}

/// Parse-file failure, located by 1-based line and character column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseFileError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseFileErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseFileErrorKind {
    #[error("empty input, expected header `N ROOT`")]
    EmptyInput,
    #[error("header takes 2 fields `N ROOT`, found {0}")]
    HeaderArity(usize),
    #[error("expected {what}, found `{token}`")]
    BadToken { what: &'static str, token: String },
    #[error("token count must be at least 1")]
    ZeroTokens,
    #[error("root index {root} out of range 1..={n}")]
    RootOutOfRange { root: usize, n: usize },
    #[error("token line has {found} surface forms, expected {expected}")]
    TokenCount { expected: usize, found: usize },
    #[error("missing token line")]
    MissingTokens,
    #[error("arc line takes 3 fields `HEAD DEP WEIGHT`, found {0}")]
    ArcArity(usize),
    #[error(transparent)]
    Arc(AdapterError),
}

impl FromStr for ParseInstance {
    type Err = ParseFileError;

    /// Format, blank lines ignored:
    ///
    /// ```text
    /// N ROOT_INDEX
    /// token_1 ... token_N
    /// head dep weight     (any number of arc lines)
    /// ```
    fn from_str(s: &str) -> Result<Self, ParseFileError> {
        let err = |line, col, kind| ParseFileError { line, col, kind };
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(idx, line)| (idx + 1, crate::instance::line_tokens(line)))
            .filter(|(_, toks)| !toks.is_empty());

        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(1, 1, ParseFileErrorKind::EmptyInput))?;
        if header.len() != 2 {
            return Err(err(
                hline,
                header.get(2).map_or(1, |t| t.0),
                ParseFileErrorKind::HeaderArity(header.len()),
            ));
        }
        let uint = |what, (col, tok): (usize, &str), line| {
            tok.parse::<usize>().map_err(|_| {
                err(
                    line,
                    col,
                    ParseFileErrorKind::BadToken {
                        what,
                        token: tok.to_string(),
                    },
                )
            })
        };
        let n = uint("node count", header[0], hline)?;
        if n == 0 {
            return Err(err(hline, header[0].0, ParseFileErrorKind::ZeroTokens));
        }
        let root = uint("root index", header[1], hline)?;
        if root == 0 || root > n {
            return Err(err(
                hline,
                header[1].0,
                ParseFileErrorKind::RootOutOfRange { root, n },
            ));
        }

        let (tline, toks) = lines
            .next()
            .ok_or_else(|| err(hline + 1, 1, ParseFileErrorKind::MissingTokens))?;
        if toks.len() != n {
            return Err(err(
                tline,
                toks.first().map_or(1, |t| t.0),
                ParseFileErrorKind::TokenCount {
                    expected: n,
                    found: toks.len(),
                },
            ));
        }
        let tokens: Vec<String> = toks.iter().map(|&(_, t)| t.to_string()).collect();

        let mut weights = vec![vec![None; n]; n];
        for (lno, arc) in lines {
            if arc.len() != 3 {
                return Err(err(
                    lno,
                    arc.get(3).map_or(1, |t| t.0),
                    ParseFileErrorKind::ArcArity(arc.len()),
                ));
            }
            let head = uint("head index", arc[0], lno)?;
            let dep = uint("dependent index", arc[1], lno)?;
            let (wcol, wtok) = arc[2];
            let w: f64 = wtok.parse().map_err(|_| {
                err(
                    lno,
                    wcol,
                    ParseFileErrorKind::BadToken {
                        what: "weight",
                        token: wtok.to_string(),
                    },
                )
            })?;
            let arc_err = |col, e| err(lno, col, ParseFileErrorKind::Arc(e));
            if head == 0 || head > n || dep == 0 || dep > n {
                return Err(arc_err(
                    arc[0].0,
                    AdapterError::ArcOutOfRange { head, dep, n },
                ));
            }
            if head == dep {
                return Err(arc_err(arc[0].0, AdapterError::SelfArc { i: head }));
            }
            if dep == root {
                return Err(arc_err(arc[1].0, AdapterError::IntoRoot { i: head, root }));
            }
            if !w.is_finite() {
                return Err(arc_err(
                    wcol,
                    AdapterError::NotFinite {
                        i: head,
                        j: dep,
                        value: w,
                    },
                ));
            }
            if weights[head - 1][dep - 1].is_some() {
                return Err(arc_err(arc[0].0, AdapterError::DuplicateArc { head, dep }));
            }
            weights[head - 1][dep - 1] = Some(w);
        }

        Ok(ParseInstance::new(tokens, root, weights).expect("grid entries pre-validated"))
    }
}
