use thiserror::Error;

use crate::game::{ParityGame, Player, Priority, Vertex};
use crate::solution::Solution;

use super::graph::winning_cycle;

pub const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("{player} has more than {bound} memoryless strategies")]
pub struct BoundExceeded {
    pub player: Player,
    pub bound: u64,
}

/// Solves by enumerating memoryless strategies, with the default bound.
pub fn brute_force(game: &ParityGame) -> Result<Solution, BoundExceeded> {
    brute_force_bounded(game, DEFAULT_BOUND)
}

/// Solves by enumerating memoryless strategies. Refuses when either player
/// has more than `bound` strategies.
pub fn brute_force_bounded(game: &ParityGame, bound: u64) -> Result<Solution, BoundExceeded> {
    let n = game.vertex_count();
    let space = |p: Player, within: &[bool]| -> Option<u64> {
        game.vertices()
            .filter(|&v| game.owner(v) == p && within[v])
            .try_fold(1u64, |acc, v| acc.checked_mul(game.successors(v).len() as u64))
            .filter(|&s| s <= bound)
    };
    let all = vec![true; n];
    for p in [Player::Even, Player::Odd] {
        if space(p, &all).is_none() {
            return Err(BoundExceeded { player: p, bound });
        }
    }
    let first = if space(Player::Even, &all) <= space(Player::Odd, &all) {
        Player::Even
    } else {
        Player::Odd
    };

    // vertices `first` wins with some strategy
    let mut wins = vec![false; n];
    for_each_strategy(game, first, &all, |choice| {
        let lost = opponent_reach(game, first, choice);
        for v in 0..n {
            wins[v] |= !lost[v];
        }
        false
    });

    let mut sol = Solution::empty(n);
    for p in [Player::Even, Player::Odd] {
        let region: Vec<bool> = (0..n).map(|v| wins[v] == (p == first)).collect();
        let mut found = None;
        for_each_strategy(game, p, &region, |choice| {
            let lost = opponent_reach(game, p, choice);
            if (0..n).all(|v| !region[v] || !lost[v]) {
                found = Some(choice.to_vec());
                return true;
            }
            false
        });
        let choice = found.expect("memoryless determinacy gives a uniform strategy");
        for v in (0..n).filter(|&v| region[v]) {
            let s = (game.owner(v) == p).then(|| choice[v]);
            sol.set(v, p, s);
        }
    }
    Ok(sol)
}

/// Calls `f` with every choice function of `player` over the vertices in
/// `within`; other vertices take their first successor. Stops when `f`
/// returns true.
fn for_each_strategy(
    game: &ParityGame,
    player: Player,
    within: &[bool],
    mut f: impl FnMut(&[Vertex]) -> bool,
) {
    let free: Vec<Vertex> = game
        .vertices()
        .filter(|&v| game.owner(v) == player && within[v])
        .collect();
    let mut idx = vec![0usize; free.len()];
    let mut choice: Vec<Vertex> = game.vertices().map(|v| game.successors(v)[0]).collect();
    loop {
        for (k, &v) in free.iter().enumerate() {
            choice[v] = game.successors(v)[idx[k]];
        }
        if f(&choice) {
            return;
        }
        let mut k = 0;
        loop {
            if k == free.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < game.successors(free[k]).len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Vertices from which the opponent of `player` can reach a cycle it wins,
/// when `player` is fixed to `choice`.
fn opponent_reach(game: &ParityGame, player: Player, choice: &[Vertex]) -> Vec<bool> {
    let n = game.vertex_count();
    let adj: Vec<Vec<usize>> = game
        .vertices()
        .map(|v| {
            if game.owner(v) == player {
                vec![choice[v]]
            } else {
                game.successors(v).to_vec()
            }
        })
        .collect();
    let priority: Vec<Priority> = game.vertices().map(|v| game.priority(v)).collect();
    let mut bad = vec![false; n];
    let mut alive: Vec<bool> = vec![true; n];
    // collect every opponent-won cycle: after finding one, cut it out and look again
    loop {
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if alive[v] {
                    adj[v].iter().copied().filter(|&w| alive[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        match winning_cycle(&sub, &priority, player.opponent()) {
            Some((_, members)) => {
                for v in members {
                    bad[v] = true;
                    alive[v] = false;
                }
            }
            None => break,
        }
    }
    // backward reachability to the bad vertices
    let mut radj = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            radj[w].push(v);
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| bad[v]).collect();
    while let Some(w) = queue.pop() {
        for &v in &radj[w] {
            if !bad[v] {
                bad[v] = true;
                queue.push(v);
            }
        }
    }
    bad
}
