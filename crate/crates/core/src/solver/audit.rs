//! Invariant checks run in audit mode. Each returns human-readable
//! violations; an empty list means the invariant holds.

use crate::attractor::{FREE, NO_VERTEX, OUTSIDE};
use crate::game::{SubgameMask, VertexSet};
use crate::tangle::{check_tangle_in, LocalGraph, Tangle, TangleViolation};

use super::engine::{Engine, Region};

/// Checks a freshly computed region: no free vertex can still be attracted,
/// every strategy-consistent cycle inside is won by the region's player, and
/// every vertex reaches a top vertex inside the region.
pub(super) fn region(engine: &Engine<'_>, r: &Region) -> Vec<String> {
    let game = engine.game;
    let labels = &engine.labels;
    let p = r.priority;
    let player = r.player;
    let mut out = Vec::new();
    let in_sub = |l: u32| l == FREE || l == p;

    for v in game.vertices().filter(|&v| labels[v] == FREE) {
        let succ = game.successors(v);
        let attracted = if game.owner(v) == player {
            succ.iter().any(|&w| labels[w] == p)
        } else {
            succ.iter().all(|&w| !in_sub(labels[w]) || labels[w] == p)
                && succ.iter().any(|&w| labels[w] == p)
        };
        if attracted {
            out.push(format!("region {p}: vertex {v} is attractable"));
        }
    }
    for t in engine.store.iter().filter(|t| t.player == player) {
        let vertices_in = t.vertices.iter().all(|&v| in_sub(labels[v]));
        let some_free = t.vertices.iter().any(|&v| labels[v] == FREE);
        let esc: Vec<_> = t.escapes.iter().filter(|&&e| in_sub(labels[e])).collect();
        if vertices_in && some_free && !esc.is_empty() && esc.iter().all(|&&e| labels[e] == p) {
            out.push(format!("region {p}: tangle {} is attractable", t.id));
        }
    }

    let mut vertices = engine.region_vertices(r).to_vec();
    vertices.sort_unstable();
    let strategy = &engine.strategy;
    let graph = LocalGraph::restricted(game, &vertices, player, |v| match strategy[v] {
        NO_VERTEX => None,
        w => Some(w),
    });
    if let Some((q, cycle)) = graph.opponent_cycle(game, player) {
        out.push(format!("region {p}: opponent wins a cycle with top {q} in {cycle:?}"));
    }

    // backward search from the top vertices along the restricted edges
    let mut reached = vec![false; vertices.len()];
    let mut queue: Vec<usize> = (0..vertices.len())
        .filter(|&i| game.priority(vertices[i]) == p)
        .collect();
    for &i in &queue {
        reached[i] = true;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (i, succ) in graph.adj.iter().enumerate() {
        for &j in succ {
            preds[j].push(i);
        }
    }
    while let Some(i) = queue.pop() {
        for &j in &preds[i] {
            if !reached[j] {
                reached[j] = true;
                queue.push(j);
            }
        }
    }
    for (i, &ok) in reached.iter().enumerate() {
        if !ok {
            out.push(format!("region {p}: vertex {} cannot reach the top", vertices[i]));
        }
    }
    out
}

/// Checks a tangle at extraction time: it is a tangle of the game being
/// solved, and its escapes lie in higher regions of its player.
pub(super) fn tangle(engine: &Engine<'_>, t: &Tangle, highest: bool) -> Vec<String> {
    let game = engine.game;
    let labels = &engine.labels;
    let n = game.vertex_count();
    let active = VertexSet::from_vertices(n, (0..n).filter(|&v| labels[v] != OUTSIDE));
    let sub = SubgameMask::new(game, active);
    let mut out: Vec<String> = check_tangle_in(&sub, t)
        .into_iter()
        // the whole reduced highest region need not be strongly connected
        .filter(|v| !(highest && *v == TangleViolation::NotStronglyConnected))
        .map(|v| format!("{t}: {v:?}"))
        .collect();
    for &e in &t.escapes {
        let l = labels[e];
        if l == FREE || l == OUTSIDE || l <= t.priority || l % 2 != t.priority % 2 {
            out.push(format!("{t}: escape {e} is not in a higher region of its player"));
        }
    }
    out
}
