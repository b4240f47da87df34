//! The classic worked instances used across tests, examples, and docs.
//!
//! Both matrices are encoded exactly as published, diagonal zeros and
//! arcs into the origin included. The procedure never reads those cells
//! (the origin's class is never scanned and a node never competes to be
//! its own predecessor), so keeping them finite is harmless and lets the
//! text fixtures mirror the printed tables cell for cell.

use crate::instance::ProblemInstance;
use crate::parse::ParseInstance;

/// Bock's ten-node network, origin 10, sentinel 98. The minimum
/// arborescence costs 87.
pub const TEN_NODE_TEXT: &str = "\
10 10
0 52 88 7 2 9 9 29 69 79
12 0 2 13 1 9 9 64 31 93
5 82 0 7 1 9 9 27 83 49
10 3 59 0 0 9 9 74 16 42
17 55 96 32 0 9 9 75 65 87
22 89 96 30 67 0 5 52 42 86
36 47 64 72 56 8 0 51 52 61
58 30 33 43 95 28 25 0 3 47
73 55 64 43 69 42 81 6 0 7
89 61 97 63 25 26 71 72 43 0
";

/// Cost matrix of the four-token parsing example after the max-to-min
/// flip, origin 1 (the ROOT token), sentinel 9. The minimum arborescence
/// costs 10.
pub const BOOK_THAT_FLIGHT_COSTS_TEXT: &str = "\
4 1
0 0 8 8
0 0 7 5
0 6 0 4
0 7 5 0
";

/// The same four-token example in parse-file form: surface tokens and the
/// raw attachment weights, highest total weight 26.
pub const BOOK_THAT_FLIGHT_PARSE_TEXT: &str = "\
4 1
ROOT Book that flight
1 2 12
1 3 4
1 4 4
2 3 5
2 4 7
3 2 6
3 4 8
4 2 5
4 3 7
";

pub fn ten_node() -> ProblemInstance {
    TEN_NODE_TEXT.parse().expect("embedded instance is valid")
}

pub fn book_that_flight_costs() -> ProblemInstance {
    BOOK_THAT_FLIGHT_COSTS_TEXT
        .parse()
        .expect("embedded instance is valid")
}

pub fn book_that_flight() -> ParseInstance {
    BOOK_THAT_FLIGHT_PARSE_TEXT
        .parse()
        .expect("embedded parse instance is valid")
}
