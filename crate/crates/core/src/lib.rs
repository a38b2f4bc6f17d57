//! Parity game solving by tangle learning.
//!
//! A tangle is a strongly connected set of vertices in which one player has
//! a strategy that wins every cycle, so the opponent has to leave. The
//! solver learns tangles from a top-down decomposition of the game and
//! attracts them as a whole in later decompositions until it finds a
//! dominion.
//!
//! ```
//! use tangle_core::{parse_game, solve, verify, Player, SolverConfig};
//!
//! let game = parse_game("parity 1;\n0 1 0 1;\n1 2 1 0,1;\n").unwrap();
//! let out = solve(&game, &SolverConfig::default()).unwrap();
//! assert_eq!(out.solution.winner(0), Some(Player::Even));
//! assert!(verify(&game, &out.solution).accepted);
//! ```

pub mod attractor;
pub mod bench;
pub mod game;
pub mod generate;
pub mod oracle;
pub mod pgsolver;
pub mod scc;
pub mod solution;
pub mod solver;
pub mod tangle;

pub use attractor::{attr, tattr, AttractorResult, Strategy};
pub use game::{ParityGame, Player, Priority, SubgameMask, Vertex, VertexSet};
pub use generate::{generate, GenSpec};
pub use oracle::{brute_force, verify, zielonka, Verdict};
pub use pgsolver::{parse_game, parse_solution, write_game, write_solution};
pub use solution::Solution;
pub use solver::{solve, SolveError, SolveOutput, SolverConfig, SolverStats, Variant};
pub use tangle::{check_tangle, Tangle, TangleStore};
