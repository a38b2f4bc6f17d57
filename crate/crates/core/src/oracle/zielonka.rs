use crate::game::{ParityGame, Player, SubgameMask, Vertex};
use crate::solution::Solution;

use super::graph::attractor;

enum Frame {
    Solve(Vec<Vertex>),
    /// The top attractor `a` of `set` is known and the rest has been solved.
    Combine {
        set: Vec<Vertex>,
        a: Vec<Vertex>,
        player: Player,
        choice: Vec<Option<Vertex>>,
    },
}

/// Zielonka's recursive algorithm, run with an explicit stack.
pub fn zielonka(game: &ParityGame) -> Solution {
    zielonka_subgame(&SubgameMask::full(game))
}

/// Solves the subgame; vertices outside it stay undecided.
pub fn zielonka_subgame(subgame: &SubgameMask<'_>) -> Solution {
    let game = subgame.game();
    let n = game.vertex_count();
    let mut winner: Vec<Option<Player>> = vec![None; n];
    let mut strategy: Vec<Option<Vertex>> = vec![None; n];
    let mut stack = vec![Frame::Solve(subgame.active().iter().collect())];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Solve(set) => {
                if set.is_empty() {
                    continue;
                }
                let top = set.iter().map(|&v| game.priority(v)).max().unwrap();
                let player = Player::of_priority(top);
                let inside = membership(n, &set);
                let heads: Vec<Vertex> =
                    set.iter().copied().filter(|&v| game.priority(v) == top).collect();
                let (in_a, choice) = attractor(game, &inside, player, &heads);
                let a: Vec<Vertex> = set.iter().copied().filter(|&v| in_a[v]).collect();
                let rest: Vec<Vertex> = set.iter().copied().filter(|&v| !in_a[v]).collect();
                stack.push(Frame::Combine {
                    set,
                    a,
                    player,
                    choice,
                });
                stack.push(Frame::Solve(rest));
            }
            Frame::Combine {
                set,
                a,
                player,
                choice,
            } => {
                let inside = membership(n, &set);
                let in_a = membership(n, &a);
                let lost: Vec<Vertex> = set
                    .iter()
                    .copied()
                    .filter(|&v| !in_a[v] && winner[v] == Some(player.opponent()))
                    .collect();
                if lost.is_empty() {
                    for &v in &a {
                        winner[v] = Some(player);
                        strategy[v] = if game.owner(v) != player {
                            None
                        } else if let Some(w) = choice[v] {
                            Some(w)
                        } else {
                            // a top vertex: any move inside keeps the play here
                            game.successors(v).iter().copied().find(|&w| inside[w])
                        };
                    }
                    continue;
                }
                let opponent = player.opponent();
                let (in_b, choice_b) = attractor(game, &inside, opponent, &lost);
                let mut rest = Vec::new();
                for &v in &set {
                    if in_b[v] {
                        if winner[v] != Some(opponent) || in_a[v] {
                            winner[v] = Some(opponent);
                            strategy[v] = None;
                        }
                        if game.owner(v) == opponent && choice_b[v].is_some() {
                            strategy[v] = choice_b[v];
                        }
                    } else {
                        winner[v] = None;
                        strategy[v] = None;
                        rest.push(v);
                    }
                }
                stack.push(Frame::Solve(rest));
            }
        }
    }
    let mut sol = Solution::empty(n);
    for v in 0..n {
        if let Some(w) = winner[v] {
            sol.set(v, w, strategy[v]);
        }
    }
    sol
}

fn membership(n: usize, set: &[Vertex]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::verify;
    use crate::pgsolver::parse_game;

    #[test]
    fn fig4_is_won_by_odd() {
        let g = parse_game(include_str!("../../tests/fixtures/fig4.pg")).unwrap();
        let sol = zielonka(&g);
        assert!(g.vertices().all(|v| sol.winner(v) == Some(Player::Odd)));
        assert!(verify(&g, &sol).accepted);
    }

    #[test]
    fn fig1_is_won_by_odd() {
        let g = parse_game(include_str!("../../tests/fixtures/fig1.pg")).unwrap();
        let sol = zielonka(&g);
        assert!(g.vertices().all(|v| sol.winner(v) == Some(Player::Odd)));
        assert!(verify(&g, &sol).accepted);
    }

    #[test]
    fn even_self_loop() {
        let g = ParityGame::new(vec![0], vec![Player::Even], vec![vec![0]]).unwrap();
        let sol = zielonka(&g);
        assert_eq!(sol.winner(0), Some(Player::Even));
        assert_eq!(sol.strategy(0), Some(0));
    }

    #[test]
    fn opponent_region_is_recomputed() {
        // 0 (prio 2, Odd) -> 1 ; 1 (prio 1, Odd) -> 1 or 0 ; 2 (prio 0, Even) -> 2
        let g = ParityGame::new(
            vec![2, 1, 0],
            vec![Player::Odd, Player::Odd, Player::Even],
            vec![vec![1], vec![1, 0], vec![2, 1]],
        )
        .unwrap();
        let sol = zielonka(&g);
        assert_eq!(sol.winner(0), Some(Player::Odd));
        assert_eq!(sol.winner(1), Some(Player::Odd));
        assert_eq!(sol.winner(2), Some(Player::Even));
        assert!(verify(&g, &sol).accepted, "{:?}", verify(&g, &sol));
    }
}
