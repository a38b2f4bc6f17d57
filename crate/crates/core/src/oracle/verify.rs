use std::fmt;

use serde::Serialize;

use crate::game::{ParityGame, Player, Priority, Vertex};
use crate::solution::Solution;

use super::graph::winning_cycle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    VertexCount,
    Undecided,
    /// The loser can move out of the winner's region.
    Closure,
    StrategyMissing,
    StrategyNotEdge,
    /// The strategy leaves the winning region.
    StrategyLeaves,
    /// A strategy entry on a vertex the winner does not own.
    StrategyForeign,
    /// The loser wins a cycle that the strategy allows.
    LosingCycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictViolation {
    pub vertex: Option<Vertex>,
    pub cycle: Option<Vec<Vertex>>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for VerdictViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rule)?;
        if let Some(v) = self.vertex {
            write!(f, " at {v}")?;
        }
        if let Some(c) = &self.cycle {
            write!(f, " in {c:?}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub accepted: bool,
    pub violations: Vec<VerdictViolation>,
}

fn violation(vertex: Vertex, rule: Rule, detail: String) -> VerdictViolation {
    VerdictViolation {
        vertex: Some(vertex),
        cycle: None,
        rule,
        detail,
    }
}

/// Checks that each player wins its claimed region with its strategy:
/// the region is closed under the loser's moves, the strategy is defined and
/// stays in the region, and every cycle consistent with the strategy is won.
pub fn verify(game: &ParityGame, sol: &Solution) -> Verdict {
    let n = game.vertex_count();
    let mut out = Vec::new();
    if sol.vertex_count() != n {
        out.push(VerdictViolation {
            vertex: None,
            cycle: None,
            rule: Rule::VertexCount,
            detail: format!("game has {n} vertices, solution has {}", sol.vertex_count()),
        });
        return Verdict {
            accepted: false,
            violations: out,
        };
    }
    for v in 0..n {
        let Some(w) = sol.winner(v) else {
            out.push(violation(v, Rule::Undecided, "no winner".into()));
            continue;
        };
        let owned = game.owner(v) == w;
        match (owned, sol.strategy(v)) {
            (true, None) => out.push(violation(v, Rule::StrategyMissing, format!("{w} owns it"))),
            (true, Some(s)) => {
                if !game.has_edge(v, s) {
                    out.push(violation(v, Rule::StrategyNotEdge, format!("no edge to {s}")));
                } else if sol.winner(s) != Some(w) {
                    out.push(violation(v, Rule::StrategyLeaves, format!("moves to {s}")));
                }
            }
            (false, Some(s)) => out.push(violation(
                v,
                Rule::StrategyForeign,
                format!("choice {s} on a vertex {w} does not own"),
            )),
            (false, None) => {
                for &s in game.successors(v) {
                    if sol.winner(s) != Some(w) {
                        out.push(violation(v, Rule::Closure, format!("{} escapes to {s}", w.opponent())));
                    }
                }
            }
        }
    }
    for player in [Player::Even, Player::Odd] {
        let region: Vec<Vertex> = (0..n).filter(|&v| sol.winner(v) == Some(player)).collect();
        let local = |w: Vertex| region.binary_search(&w).ok();
        let adj: Vec<Vec<usize>> = region
            .iter()
            .map(|&v| {
                if game.owner(v) == player {
                    sol.strategy(v).and_then(local).into_iter().collect()
                } else {
                    game.successors(v).iter().filter_map(|&w| local(w)).collect()
                }
            })
            .collect();
        let priority: Vec<Priority> = region.iter().map(|&v| game.priority(v)).collect();
        if let Some((top, members)) = winning_cycle(&adj, &priority, player.opponent()) {
            let mut cycle: Vec<Vertex> = members.iter().map(|&i| region[i]).collect();
            cycle.sort_unstable();
            out.push(VerdictViolation {
                vertex: None,
                cycle: Some(cycle),
                rule: Rule::LosingCycle,
                detail: format!("{} wins a cycle with top priority {top}", player.opponent()),
            });
        }
    }
    Verdict {
        accepted: out.is_empty(),
        violations: out,
    }
}
