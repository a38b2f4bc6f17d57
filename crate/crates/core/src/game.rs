//! The parity game arena, vertex sets and subgame views.
//!
//! A game is a directed graph where every vertex carries a priority and an
//! owner. Players compare the highest priority seen infinitely often: Even
//! wins a play when that priority is even, Odd when it is odd.

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor;
use crate::solution::Solution;

/// Index of a vertex in a [`ParityGame`].
pub type Vertex = usize;

/// Vertex priority. Raw values are kept as read; only order and parity matter.
pub type Priority = u32;

/// The largest priority a game may carry. Larger values are reserved as
/// sentinels by the region bookkeeping of the solver.
pub const MAX_PRIORITY: Priority = u32::MAX - 2;

/// One of the two players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    /// The player who wins plays whose dominant priority is `p`.
    #[inline]
    pub fn of_priority(p: Priority) -> Player {
        if p & 1 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }

    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// 0 for Even, 1 for Odd; the encoding used by the PGSolver formats.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Player> {
        match i {
            0 => Some(Player::Even),
            1 => Some(Player::Odd),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => write!(f, "Even"),
            Player::Odd => write!(f, "Odd"),
        }
    }
}

/// Errors raised when constructing a game from raw parts.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("vertex {vertex} has no successors")]
    NoSuccessors { vertex: Vertex },
    #[error("vertex {vertex} has successor {successor} outside [0, {count})")]
    SuccessorOutOfRange {
        vertex: Vertex,
        successor: Vertex,
        count: usize,
    },
    #[error("vertex {vertex} has priority {priority} above the supported maximum")]
    PriorityTooLarge { vertex: Vertex, priority: Priority },
    #[error("per-vertex arrays disagree in length ({priorities} priorities, {owners} owners, {successors} successor lists)")]
    LengthMismatch {
        priorities: usize,
        owners: usize,
        successors: usize,
    },
}

/// The rule a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    NoSuccessor,
    SuccessorOutOfRange,
    PredecessorOutOfRange,
    DuplicateSuccessor,
    TransposeMismatch,
    PriorityOutOfRange,
}

/// A broken game invariant, located at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub vertex: Vertex,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {}: {:?}: {}", self.vertex, self.rule, self.detail)
    }
}

/// A parity game with successor and predecessor lists in compressed form.
///
/// Immutable after construction; share it freely between threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    priority: Vec<Priority>,
    owner: Vec<Player>,
    succ_offsets: Vec<usize>,
    succ: Vec<Vertex>,
    pred_offsets: Vec<usize>,
    pred: Vec<Vertex>,
    labels: Vec<Option<String>>,
}

fn compress(lists: &[Vec<Vertex>]) -> (Vec<usize>, Vec<Vertex>) {
    let mut offsets = Vec::with_capacity(lists.len() + 1);
    let mut flat = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    offsets.push(0);
    for list in lists {
        flat.extend_from_slice(list);
        offsets.push(flat.len());
    }
    (offsets, flat)
}

impl ParityGame {
    /// Builds a game, deduplicating successor lists and deriving predecessors.
    pub fn new(
        priority: Vec<Priority>,
        owner: Vec<Player>,
        mut successors: Vec<Vec<Vertex>>,
    ) -> Result<ParityGame, GameError> {
        let n = priority.len();
        if owner.len() != n || successors.len() != n {
            return Err(GameError::LengthMismatch {
                priorities: n,
                owners: owner.len(),
                successors: successors.len(),
            });
        }
        for (v, &p) in priority.iter().enumerate() {
            if p > MAX_PRIORITY {
                return Err(GameError::PriorityTooLarge {
                    vertex: v,
                    priority: p,
                });
            }
        }
        let mut seen = vec![usize::MAX; n];
        for (v, list) in successors.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(GameError::NoSuccessors { vertex: v });
            }
            let before = list.len();
            let mut kept = Vec::with_capacity(before);
            for &w in list.iter() {
                if w >= n {
                    return Err(GameError::SuccessorOutOfRange {
                        vertex: v,
                        successor: w,
                        count: n,
                    });
                }
                if seen[w] != v {
                    seen[w] = v;
                    kept.push(w);
                }
            }
            if kept.len() != before {
                warn!(
                    "vertex {v}: dropped {} duplicate successor(s)",
                    before - kept.len()
                );
            }
            *list = kept;
        }
        let mut predecessors = vec![Vec::new(); n];
        for (v, list) in successors.iter().enumerate() {
            for &w in list {
                predecessors[w].push(v);
            }
        }
        Ok(Self::from_parts_unchecked(
            priority,
            owner,
            successors,
            predecessors,
            vec![None; n],
        ))
    }

    /// Assembles a game without any checking. Used to build deliberately
    /// broken games for [`validate`]; everything else should go through
    /// [`ParityGame::new`].
    pub fn from_parts_unchecked(
        priority: Vec<Priority>,
        owner: Vec<Player>,
        successors: Vec<Vec<Vertex>>,
        predecessors: Vec<Vec<Vertex>>,
        labels: Vec<Option<String>>,
    ) -> ParityGame {
        let (succ_offsets, succ) = compress(&successors);
        let (pred_offsets, pred) = compress(&predecessors);
        ParityGame {
            priority,
            owner,
            succ_offsets,
            succ,
            pred_offsets,
            pred,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> ParityGame {
        assert_eq!(labels.len(), self.vertex_count());
        self.labels = labels;
        self
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.priority.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn priority(&self, v: Vertex) -> Priority {
        self.priority[v]
    }

    #[inline]
    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    #[inline]
    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[self.succ_offsets[v]..self.succ_offsets[v + 1]]
    }

    #[inline]
    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[self.pred_offsets[v]..self.pred_offsets[v + 1]]
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.vertex_count()
    }

    pub fn has_edge(&self, from: Vertex, to: Vertex) -> bool {
        self.successors(from).contains(&to)
    }

    pub fn max_priority(&self) -> Option<Priority> {
        self.priority.iter().copied().max()
    }

    /// Number of distinct priorities.
    pub fn priority_count(&self) -> usize {
        let mut ps = self.priority.clone();
        ps.sort_unstable();
        ps.dedup();
        ps.len()
    }
}

/// Lists every broken [`ParityGame`] invariant. Empty means the game is valid.
pub fn validate(game: &ParityGame) -> Vec<Violation> {
    let n = game.vertex_count();
    let mut out = Vec::new();
    let mut seen = vec![usize::MAX; n];
    let mut edges = Vec::new();
    for v in game.vertices() {
        if game.priority(v) > MAX_PRIORITY {
            out.push(Violation {
                vertex: v,
                rule: Rule::PriorityOutOfRange,
                detail: format!("priority {} is reserved", game.priority(v)),
            });
        }
        if game.successors(v).is_empty() {
            out.push(Violation {
                vertex: v,
                rule: Rule::NoSuccessor,
                detail: "successor list is empty".into(),
            });
        }
        for &w in game.successors(v) {
            if w >= n {
                out.push(Violation {
                    vertex: v,
                    rule: Rule::SuccessorOutOfRange,
                    detail: format!("edge {v}->{w} leaves [0, {n})"),
                });
                continue;
            }
            if seen[w] == v {
                out.push(Violation {
                    vertex: v,
                    rule: Rule::DuplicateSuccessor,
                    detail: format!("edge {v}->{w} listed twice"),
                });
                continue;
            }
            seen[w] = v;
            edges.push((v, w));
        }
        for &u in game.predecessors(v) {
            if u >= n {
                out.push(Violation {
                    vertex: v,
                    rule: Rule::PredecessorOutOfRange,
                    detail: format!("predecessor {u} outside [0, {n})"),
                });
            }
        }
    }
    let mut transposed: Vec<(Vertex, Vertex)> = game
        .vertices()
        .flat_map(|w| {
            game.predecessors(w)
                .iter()
                .filter(|&&u| u < n)
                .map(move |&u| (u, w))
        })
        .collect();
    edges.sort_unstable();
    transposed.sort_unstable();
    if edges != transposed {
        // Report each vertex whose predecessor list disagrees.
        let mut expected = vec![Vec::new(); n];
        for &(u, w) in &edges {
            expected[w].push(u);
        }
        for w in game.vertices() {
            let mut actual: Vec<Vertex> = game.predecessors(w).to_vec();
            actual.sort_unstable();
            if actual != expected[w] {
                out.push(Violation {
                    vertex: w,
                    rule: Rule::TransposeMismatch,
                    detail: format!(
                        "predecessors {:?}, successor lists imply {:?}",
                        actual, expected[w]
                    ),
                });
            }
        }
    }
    out
}

/// A set of vertices over `[0, capacity)` with constant-time membership.
/// Iteration is in ascending vertex order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    capacity: usize,
    len: usize,
}

impl VertexSet {
    pub fn new(capacity: usize) -> VertexSet {
        VertexSet {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
            len: 0,
        }
    }

    pub fn full(capacity: usize) -> VertexSet {
        let mut s = VertexSet::new(capacity);
        for v in 0..capacity {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(capacity: usize, vertices: impl IntoIterator<Item = Vertex>) -> VertexSet {
        let mut s = VertexSet::new(capacity);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v < self.capacity && self.words[v >> 6] & (1 << (v & 63)) != 0
    }

    /// Returns true if `v` was not yet present.
    #[inline]
    pub fn insert(&mut self, v: Vertex) -> bool {
        assert!(v < self.capacity, "vertex {v} outside set capacity {}", self.capacity);
        let w = &mut self.words[v >> 6];
        let bit = 1 << (v & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Returns true if `v` was present.
    #[inline]
    pub fn remove(&mut self, v: Vertex) -> bool {
        if v >= self.capacity {
            return false;
        }
        let w = &mut self.words[v >> 6];
        let bit = 1 << (v & 63);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.remove(v);
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A game restricted to a set of active vertices. Only edges with both
/// endpoints active are visible.
#[derive(Clone, Debug)]
pub struct SubgameMask<'g> {
    game: &'g ParityGame,
    active: VertexSet,
}

impl<'g> SubgameMask<'g> {
    pub fn full(game: &'g ParityGame) -> SubgameMask<'g> {
        SubgameMask {
            game,
            active: VertexSet::full(game.vertex_count()),
        }
    }

    pub fn new(game: &'g ParityGame, active: VertexSet) -> SubgameMask<'g> {
        assert_eq!(active.capacity(), game.vertex_count());
        SubgameMask { game, active }
    }

    #[inline]
    pub fn game(&self) -> &'g ParityGame {
        self.game
    }

    #[inline]
    pub fn active(&self) -> &VertexSet {
        &self.active
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.active.contains(v)
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn successors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.game
            .successors(v)
            .iter()
            .copied()
            .filter(move |&w| self.active.contains(w))
    }

    pub fn predecessors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.game
            .predecessors(v)
            .iter()
            .copied()
            .filter(move |&w| self.active.contains(w))
    }

    /// The subgame without `removed`.
    pub fn without(&self, removed: &VertexSet) -> SubgameMask<'g> {
        let mut active = self.active.clone();
        active.difference_with(removed);
        SubgameMask {
            game: self.game,
            active,
        }
    }

    /// Highest priority among active vertices.
    pub fn top_priority(&self) -> Option<Priority> {
        self.active.iter().map(|v| self.game.priority(v)).max()
    }
}

/// Solves every vertex that has a self-loop won by its owner, or whose only
/// move is a self-loop, then extends those sets by the standard attractor of
/// each winner. Returns the partial solution and the unsolved remainder.
pub fn solve_self_loops(game: &ParityGame) -> (Solution, SubgameMask<'_>) {
    let n = game.vertex_count();
    let mut solution = Solution::empty(n);
    let mut seeds = [VertexSet::new(n), VertexSet::new(n)];
    for v in game.vertices() {
        let succ = game.successors(v);
        if !succ.contains(&v) {
            continue;
        }
        let pr_winner = Player::of_priority(game.priority(v));
        if pr_winner == game.owner(v) || succ.len() == 1 {
            seeds[pr_winner.index()].insert(v);
        }
    }
    let mut subgame = SubgameMask::full(game);
    for player in [Player::Even, Player::Odd] {
        let seed = &seeds[player.index()];
        let seed: VertexSet =
            VertexSet::from_vertices(n, seed.iter().filter(|&v| subgame.contains(v)));
        if seed.is_empty() {
            continue;
        }
        let result = attractor::attr(&subgame, player, &seed);
        for v in result.attracted.iter() {
            let choice = if game.owner(v) != player {
                None
            } else if seed.contains(v) {
                Some(v)
            } else {
                result.strategy.get(v)
            };
            solution.set(v, player, choice);
        }
        subgame = subgame.without(&result.attracted);
    }
    (solution, subgame)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> ParityGame {
        ParityGame::new(
            vec![0, 2, 1, 3, 0, 4, 1, 3],
            [0, 0, 0, 0, 1, 1, 1, 1]
                .iter()
                .map(|&o| Player::from_index(o).unwrap())
                .collect(),
            vec![
                vec![1, 4],
                vec![2],
                vec![2, 3],
                vec![0],
                vec![0, 5],
                vec![6],
                vec![6, 7],
                vec![4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn player_parity() {
        assert_eq!(Player::of_priority(0), Player::Even);
        assert_eq!(Player::of_priority(7), Player::Odd);
        assert_eq!(Player::Even.opponent(), Player::Odd);
    }

    #[test]
    fn predecessors_are_transposed() {
        let g = fig4();
        assert_eq!(g.predecessors(0), &[3, 4]);
        assert_eq!(g.predecessors(6), &[5, 6]);
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn duplicates_are_dropped() {
        let g = ParityGame::new(vec![0, 1], vec![Player::Even; 2], vec![vec![1, 1, 0], vec![0]])
            .unwrap();
        assert_eq!(g.successors(0), &[1, 0]);
        assert_eq!(g.predecessors(1), &[0]);
    }

    #[test]
    fn rejects_dead_ends_and_dangling_edges() {
        assert_eq!(
            ParityGame::new(vec![0], vec![Player::Even], vec![vec![]]),
            Err(GameError::NoSuccessors { vertex: 0 })
        );
        assert!(matches!(
            ParityGame::new(vec![0], vec![Player::Even], vec![vec![3]]),
            Err(GameError::SuccessorOutOfRange { successor: 3, .. })
        ));
    }

    #[test]
    fn validate_reports_dangling_successor() {
        let succ = vec![vec![1], vec![2], vec![3], vec![4, 99], vec![0]];
        let mut pred = vec![Vec::new(); 5];
        for (v, l) in succ.iter().enumerate() {
            for &w in l {
                if w < 5 {
                    pred[w].push(v);
                }
            }
        }
        let g = ParityGame::from_parts_unchecked(
            vec![0; 5],
            vec![Player::Even; 5],
            succ,
            pred,
            vec![None; 5],
        );
        let violations = validate(&g);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert_eq!(violations[0].vertex, 3);
        assert_eq!(violations[0].rule, Rule::SuccessorOutOfRange);
        assert!(violations[0].detail.contains("3->99"));
    }

    #[test]
    fn validate_reports_corrupt_predecessors() {
        let g = ParityGame::from_parts_unchecked(
            vec![0, 1],
            vec![Player::Even; 2],
            vec![vec![1], vec![0]],
            vec![vec![1], vec![1]],
            vec![None; 2],
        );
        let violations = validate(&g);
        assert!(violations
            .iter()
            .any(|v| v.rule == Rule::TransposeMismatch && v.vertex == 1));
    }

    #[test]
    fn vertex_set_iterates_ascending() {
        let s = VertexSet::from_vertices(200, [130, 3, 64, 3, 199]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_vec(), vec![3, 64, 130, 199]);
        let t = VertexSet::from_vertices(200, [3, 64, 130, 199, 5]);
        assert!(s.is_subset(&t));
        assert!(!t.is_subset(&s));
    }

    #[test]
    fn self_loops_fig4() {
        let g = fig4();
        let (sol, rest) = solve_self_loops(&g);
        for v in 4..8 {
            assert_eq!(sol.winner(v), Some(Player::Odd));
        }
        assert_eq!(sol.strategy(6), Some(6));
        assert_eq!(rest.active().to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn self_loops_absent() {
        let g = ParityGame::new(vec![0, 1], vec![Player::Even; 2], vec![vec![1], vec![0]]).unwrap();
        let (sol, rest) = solve_self_loops(&g);
        assert!(g.vertices().all(|v| sol.winner(v).is_none()));
        assert_eq!(rest.len(), 2);
    }

    #[test]
    fn forced_losing_loop_goes_to_opponent() {
        let g = ParityGame::new(vec![2], vec![Player::Odd], vec![vec![0]]).unwrap();
        let (sol, rest) = solve_self_loops(&g);
        assert_eq!(sol.winner(0), Some(Player::Even));
        assert_eq!(sol.strategy(0), None);
        assert!(rest.is_empty());
    }
}
