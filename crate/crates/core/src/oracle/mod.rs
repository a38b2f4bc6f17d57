//! Reference solvers and a solution checker, kept independent of the tangle
//! learning code: they have their own attractor and SCC routines.

mod brute;
mod graph;
mod verify;
mod zielonka;

pub use brute::{brute_force, brute_force_bounded, BoundExceeded, DEFAULT_BOUND};
pub use verify::{verify, Rule, Verdict, VerdictViolation};
pub use zielonka::{zielonka, zielonka_subgame};
