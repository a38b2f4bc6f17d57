//! Game corpora and reference computations shared by the integration tests.
#![allow(dead_code)]

use tangle_core::attractor::AttractorResult;
use tangle_core::game::{ParityGame, Player, SubgameMask, Vertex, VertexSet};
use tangle_core::tangle::TangleStore;
use tangle_core::{generate, parse_game, GenSpec};

pub fn fig1() -> ParityGame {
    parse_game(include_str!("../fixtures/fig1.pg")).unwrap()
}

pub fn fig4() -> ParityGame {
    parse_game(include_str!("../fixtures/fig4.pg")).unwrap()
}

/// Nonempty successor lists over `0..n` with at most two entries.
fn successor_choices(n: usize) -> Vec<Vec<Vertex>> {
    let mut out: Vec<Vec<Vertex>> = (0..n).map(|w| vec![w]).collect();
    for a in 0..n {
        for b in a + 1..n {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Every game with `n` vertices, priorities at most 3, and out-degree at
/// most 2 (self-loops included).
pub fn all_games(n: usize) -> impl Iterator<Item = ParityGame> {
    let succ = successor_choices(n);
    let per_vertex = 4 * 2 * succ.len();
    let total = per_vertex.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut priority = Vec::with_capacity(n);
        let mut owner = Vec::with_capacity(n);
        let mut successors = Vec::with_capacity(n);
        for _ in 0..n {
            let c = code % per_vertex;
            code /= per_vertex;
            priority.push((c % 4) as u32);
            owner.push(if (c / 4).is_multiple_of(2) { Player::Even } else { Player::Odd });
            successors.push(succ[c / 8].clone());
        }
        ParityGame::new(priority, owner, successors).unwrap()
    })
}

/// Seeded games with 3 to 50 vertices and out-degree 1 or 2.
pub fn low_outdegree(count: u64) -> impl Iterator<Item = ParityGame> {
    (0..count).map(|seed| generate(&GenSpec::new(3 + (seed as usize % 48), 1, 2, seed)).unwrap())
}

/// Seeded games with 2 to 50 vertices and out-degree anywhere in 1..N.
pub fn full_random(count: u64) -> impl Iterator<Item = ParityGame> {
    (0..count).map(|seed| {
        let n = 2 + (seed as usize * 7 % 49);
        generate(&GenSpec::new(n, 1, n - 1, 10_000 + seed)).unwrap()
    })
}

/// Seeded games whose priorities are `low` and `low + 1`.
pub fn two_priority(count: u64, low: u32) -> impl Iterator<Item = ParityGame> {
    (0..count).map(move |seed| {
        let n = 5 + (seed as usize % 96);
        let spec = GenSpec {
            max_priority: 1,
            ..GenSpec::new(n, 1, 3.min(n - 1), 20_000 + seed)
        };
        let g = generate(&spec).unwrap();
        let priority = g.vertices().map(|v| g.priority(v) + low).collect();
        let owner = g.vertices().map(|v| g.owner(v)).collect();
        let succ = g.vertices().map(|v| g.successors(v).to_vec()).collect();
        ParityGame::new(priority, owner, succ).unwrap()
    })
}

/// The tangle attractor computed literally as a least fixpoint: repeat the
/// one-step rule until nothing changes.
pub fn naive_tattr(
    sub: &SubgameMask<'_>,
    store: Option<&TangleStore>,
    player: Player,
    seed: &VertexSet,
) -> VertexSet {
    let game = sub.game();
    let mut z = seed.clone();
    loop {
        let mut next = z.clone();
        for v in sub.active().iter() {
            if z.contains(v) {
                continue;
            }
            let mut succ = sub.successors(v).peekable();
            let pulled = if game.owner(v) == player {
                succ.any(|w| z.contains(w))
            } else {
                succ.peek().is_some() && succ.all(|w| z.contains(w))
            };
            if pulled {
                next.insert(v);
            }
        }
        if let Some(store) = store {
            for t in store.iter().filter(|t| t.player == player) {
                if !t.vertices.iter().all(|&v| sub.contains(v)) {
                    continue;
                }
                let esc: Vec<Vertex> =
                    t.escapes.iter().copied().filter(|&e| sub.contains(e)).collect();
                if !esc.is_empty() && esc.iter().all(|&e| z.contains(e)) {
                    for &v in &t.vertices {
                        next.insert(v);
                    }
                }
            }
        }
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Checks that the strategy of an attractor result leads every attracted
/// vertex of `player` to an attracted successor.
pub fn strategy_stays(game: &ParityGame, player: Player, r: &AttractorResult, seed: &VertexSet) -> bool {
    r.attracted.iter().all(|v| {
        if game.owner(v) != player {
            return true;
        }
        match r.strategy.get(v) {
            Some(w) => game.has_edge(v, w) && r.attracted.contains(w),
            None => seed.contains(v),
        }
    })
}
