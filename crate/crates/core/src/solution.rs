use crate::game::{ParityGame, Player, Vertex, VertexSet};

/// Winning regions and winning strategies.
///
/// `strategy(v)` is defined exactly on vertices owned by their winner. A
/// solution under construction may leave some vertices undecided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    winner: Vec<Option<Player>>,
    strategy: Vec<Option<Vertex>>,
}

impl Solution {
    pub fn empty(n: usize) -> Solution {
        Solution {
            winner: vec![None; n],
            strategy: vec![None; n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.winner.len()
    }

    #[inline]
    pub fn winner(&self, v: Vertex) -> Option<Player> {
        self.winner[v]
    }

    #[inline]
    pub fn strategy(&self, v: Vertex) -> Option<Vertex> {
        self.strategy[v]
    }

    pub fn set(&mut self, v: Vertex, winner: Player, strategy: Option<Vertex>) {
        self.winner[v] = Some(winner);
        self.strategy[v] = strategy;
    }

    pub fn set_winner(&mut self, v: Vertex, winner: Option<Player>) {
        self.winner[v] = winner;
    }

    pub fn set_strategy(&mut self, v: Vertex, strategy: Option<Vertex>) {
        self.strategy[v] = strategy;
    }

    pub fn is_total(&self) -> bool {
        self.winner.iter().all(Option::is_some)
    }

    /// Winning region of `player`.
    pub fn region(&self, player: Player) -> VertexSet {
        VertexSet::from_vertices(
            self.winner.len(),
            self.winner
                .iter()
                .enumerate()
                .filter(|(_, w)| **w == Some(player))
                .map(|(v, _)| v),
        )
    }

    /// `player`'s strategy on the vertices it owns and wins, as (from, to) pairs.
    pub fn strategy_of<'a>(
        &'a self,
        game: &'a ParityGame,
        player: Player,
    ) -> impl Iterator<Item = (Vertex, Vertex)> + 'a {
        self.strategy
            .iter()
            .enumerate()
            .filter(move |(v, _)| self.winner[*v] == Some(player) && game.owner(*v) == player)
            .filter_map(|(v, s)| s.map(|w| (v, w)))
    }

    /// Copies every decided vertex of `other` into `self`.
    pub fn merge(&mut self, other: &Solution) {
        for v in 0..self.winner.len() {
            if let Some(w) = other.winner[v] {
                self.winner[v] = Some(w);
                self.strategy[v] = other.strategy[v];
            }
        }
    }

    pub fn winners(&self) -> &[Option<Player>] {
        &self.winner
    }
}
