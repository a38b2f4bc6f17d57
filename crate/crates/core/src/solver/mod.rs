//! The tangle learning solver.
//!
//! [`solve`] repeatedly searches for a dominion, attracts to it, and removes
//! the result from the game. The search builds a top-down decomposition into
//! regions, extracts new tangles from the regions, and uses them in the next
//! decomposition until a region yields a tangle without escapes.

mod audit;
mod engine;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor::{FREE, OUTSIDE};
use crate::game::{self, ParityGame, Priority, SubgameMask, Vertex, Violation};
use crate::solution::Solution;
use crate::tangle::{Tangle, TangleStore};

use engine::Engine;

/// The partial map from vertices to the priority of their region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionMap {
    region: Vec<u32>,
}

impl RegionMap {
    pub fn new(n: usize) -> RegionMap {
        RegionMap {
            region: vec![FREE; n],
        }
    }

    pub fn get(&self, v: Vertex) -> Option<Priority> {
        match self.region[v] {
            FREE | OUTSIDE => None,
            p => Some(p),
        }
    }

    pub fn set(&mut self, v: Vertex, p: Priority) {
        assert!(p < FREE, "priority {p} out of range");
        self.region[v] = p;
    }

    pub fn clear(&mut self, v: Vertex) {
        self.region[v] = FREE;
    }

    /// Keeps only the entries with priority above `p`.
    pub fn retain_above(&mut self, p: Priority) {
        for r in &mut self.region {
            if *r != FREE && *r <= p {
                *r = FREE;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Standard tangle learning.
    Tl,
    /// Players take turns learning tangles.
    Atl,
    /// New tangles immediately refine the decomposition.
    Otftl,
    /// Alternating and on-the-fly combined.
    Otfatl,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Tl, Variant::Atl, Variant::Otftl, Variant::Otfatl];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Tl => "tl",
            Variant::Atl => "atl",
            Variant::Otftl => "otftl",
            Variant::Otfatl => "otfatl",
        }
    }

    pub fn alternating(self) -> bool {
        matches!(self, Variant::Atl | Variant::Otfatl)
    }

    pub fn on_the_fly(self) -> bool {
        matches!(self, Variant::Otftl | Variant::Otfatl)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Variant, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Only extract from regions where no top vertex escapes downward.
    pub skip_reduction: bool,
    /// Solve simple self-loops up front.
    pub self_loop_preprocess: bool,
    /// Record one trace line per learned tangle and dominion.
    pub trace: bool,
    /// Check the decomposition and tangle invariants as the solver runs.
    /// Slow; meant for tests.
    pub audit: bool,
    /// Maximum number of tangles learned before giving up.
    pub budget: u64,
    pub deadline: Option<Instant>,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            variant: Variant::Tl,
            skip_reduction: false,
            self_loop_preprocess: false,
            trace: false,
            audit: false,
            budget: 10_000_000,
            deadline: None,
        }
    }
}

impl SolverConfig {
    pub fn new(variant: Variant) -> SolverConfig {
        SolverConfig {
            variant,
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Tangles added to the store plus dominions returned by search.
    pub tangles_learned: u64,
    pub dominions_found: u64,
    pub search_calls: u64,
    /// Regions computed over all decompositions.
    pub decomposition_iterations: u64,
    /// Turn switches (alternating variants).
    pub turns: u64,
    /// Tangles pulled in by the tangle attractor.
    pub tangle_attractions: u64,
    pub max_region_count: u64,
}

impl SolverStats {
    pub const FIELDS: [&'static str; 7] = [
        "tangles_learned",
        "dominions_found",
        "search_calls",
        "decomposition_iterations",
        "turns",
        "tangle_attractions",
        "max_region_count",
    ];

    pub fn values(&self) -> [u64; 7] {
        [
            self.tangles_learned,
            self.dominions_found,
            self.search_calls,
            self.decomposition_iterations,
            self.turns,
            self.tangle_attractions,
            self.max_region_count,
        ]
    }

    pub fn add(&mut self, other: &SolverStats) {
        self.tangles_learned += other.tangles_learned;
        self.dominions_found += other.dominions_found;
        self.search_calls += other.search_calls;
        self.decomposition_iterations += other.decomposition_iterations;
        self.turns += other.turns;
        self.tangle_attractions += other.tangle_attractions;
        self.max_region_count = self.max_region_count.max(other.max_region_count);
    }

    /// `key=value` pairs separated by spaces.
    pub fn to_line(&self) -> String {
        Self::FIELDS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid game: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidGame(Vec<Violation>),
    #[error("tangle budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("deadline reached")]
    Timeout,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub solution: Solution,
    pub stats: SolverStats,
    /// Trace lines, when enabled.
    pub trace: Vec<String>,
    /// Invariant violations found in audit mode.
    pub audit: Vec<String>,
}

/// Solves `game`, returning winning regions and strategies for both players.
pub fn solve(game: &ParityGame, config: &SolverConfig) -> Result<SolveOutput, SolveError> {
    let violations = game::validate(game);
    if !violations.is_empty() {
        return Err(SolveError::InvalidGame(violations));
    }
    let n = game.vertex_count();
    let mut solution = Solution::empty(n);
    let mut labels = vec![FREE; n];
    if config.self_loop_preprocess {
        let (solved, rest) = game::solve_self_loops(game);
        solution.merge(&solved);
        for (v, l) in labels.iter_mut().enumerate() {
            if !rest.contains(v) {
                *l = OUTSIDE;
            }
        }
    }
    let mut engine = Engine::new(game, config, labels, TangleStore::new(n));
    while engine.remaining() > 0 {
        let dominion = engine.search()?;
        engine.claim(&dominion, &mut solution);
    }
    debug_assert!(solution.is_total());
    Ok(engine.finish(solution))
}

/// Runs one search on `subgame` with the given tangles and returns the
/// updated store, the dominion found, and the counters of this search.
pub fn search(
    subgame: &SubgameMask<'_>,
    store: TangleStore,
    config: &SolverConfig,
) -> Result<(TangleStore, Tangle, SolverStats), SolveError> {
    let game = subgame.game();
    if subgame.is_empty() {
        return Err(SolveError::Internal("search on an empty subgame".into()));
    }
    let labels = (0..game.vertex_count())
        .map(|v| if subgame.contains(v) { FREE } else { OUTSIDE })
        .collect();
    let mut engine = Engine::new(game, config, labels, store);
    let dominion = engine.search()?;
    let (store, stats) = engine.into_parts();
    Ok((store, dominion, stats))
}

/// Like [`solve`], also returning the trace and audit log.
pub fn solve_traced(game: &ParityGame, variant: Variant) -> Result<SolveOutput, SolveError> {
    solve(
        game,
        &SolverConfig {
            trace: true,
            ..SolverConfig::new(variant)
        },
    )
}
