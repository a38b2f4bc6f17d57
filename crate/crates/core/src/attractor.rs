//! Attractor computation: the standard attractor and the tangle attractor.
//!
//! Both run as one backward search from the seed. Opponent vertices keep a
//! counter of successors not yet attracted, so each edge is inspected a
//! constant number of times. Tangles keep a counter of escapes not yet
//! attracted; a tangle is pulled in when its counter reaches zero.
//!
//! The solver drives [`attract`] directly over a label array (see
//! [`FREE`]/[`OUTSIDE`]) so that regions can be carved out of a game without
//! allocating per region. [`attr`] and [`tattr`] wrap it for callers that
//! work with [`SubgameMask`]s.

use crate::game::{ParityGame, Player, SubgameMask, Vertex, VertexSet};
use crate::tangle::{TangleId, TangleStore};

/// Marks a missing strategy entry in flat strategy arrays.
pub const NO_VERTEX: Vertex = usize::MAX;

/// Label of a vertex in the current subgame that no region holds yet.
pub const FREE: u32 = u32::MAX - 1;
/// Label of a vertex outside the game being solved.
pub const OUTSIDE: u32 = u32::MAX;

/// A partial successor choice per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct Strategy {
    choice: Vec<Vertex>,
}

impl Strategy {
    pub fn new(n: usize) -> Strategy {
        Strategy {
            choice: vec![NO_VERTEX; n],
        }
    }

    pub(crate) fn from_raw(choice: Vec<Vertex>) -> Strategy {
        Strategy { choice }
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Option<Vertex> {
        match self.choice[v] {
            NO_VERTEX => None,
            w => Some(w),
        }
    }

    #[inline]
    pub fn set(&mut self, v: Vertex, w: Vertex) {
        self.choice[v] = w;
    }

    #[inline]
    pub fn unset(&mut self, v: Vertex) {
        self.choice[v] = NO_VERTEX;
    }

    /// (vertex, successor) pairs in ascending vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != NO_VERTEX)
            .map(|(v, &w)| (v, w))
    }

    pub fn domain_len(&self) -> usize {
        self.pairs().count()
    }
}

impl std::fmt::Debug for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.pairs()).finish()
    }
}

#[derive(Clone, Debug)]
pub struct AttractorResult {
    pub attracted: VertexSet,
    pub strategy: Strategy,
    /// Tangles pulled in, in the order they fired. Empty for [`attr`].
    pub attracted_tangles: Vec<TangleId>,
    /// Vertices and tangles processed.
    pub steps: usize,
}

/// Reusable per-game buffers for [`attract`].
#[derive(Clone, Debug)]
pub struct Scratch {
    remaining: Vec<u32>,
    stamp: Vec<u32>,
    tangle_left: Vec<u32>,
    tangle_stamp: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    pub fn new(n: usize) -> Scratch {
        Scratch {
            remaining: vec![0; n],
            stamp: vec![0; n],
            tangle_left: Vec::new(),
            tangle_stamp: Vec::new(),
            epoch: 0,
        }
    }

    fn next_epoch(&mut self, tangles: usize) {
        if self.tangle_stamp.len() < tangles {
            self.tangle_stamp.resize(tangles, 0);
            self.tangle_left.resize(tangles, 0);
        }
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.tangle_stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }
}

/// Outcome of one [`attract`] call.
#[derive(Clone, Debug, Default)]
pub struct Attraction {
    pub tangles: Vec<TangleId>,
    pub steps: usize,
}

/// Attracts to `seed` as `player` within the vertices labelled [`FREE`].
///
/// Every attracted vertex (seed included) is relabelled `mark` and appended
/// to `region` in attraction order. `strategy` receives a successor for each
/// attracted `player` vertex, taken from the earliest attracted successor, or
/// from a tangle's witness when the vertex came in with that tangle. When
/// `tangles` is given, tangles of `player` whose escapes within the subgame
/// are all attracted and whose vertices are all in the subgame are pulled in
/// whole. A tangle with no escape in the subgame is never pulled in.
///
/// Vertices labelled neither `FREE` nor `mark` are outside the subgame.
#[allow(clippy::too_many_arguments)]
pub fn attract(
    game: &ParityGame,
    labels: &mut [u32],
    mark: u32,
    player: Player,
    seed: &[Vertex],
    tangles: Option<&TangleStore>,
    strategy: &mut [Vertex],
    region: &mut Vec<Vertex>,
    scratch: &mut Scratch,
) -> Attraction {
    debug_assert!(mark != FREE && mark != OUTSIDE);
    scratch.next_epoch(tangles.map_or(0, TangleStore::capacity));
    let epoch = scratch.epoch;
    let mut out = Attraction::default();
    let mut head = region.len();
    for &v in seed {
        assert_eq!(labels[v], FREE, "seed vertex {v} is not in the subgame");
        labels[v] = mark;
        region.push(v);
    }
    while head < region.len() {
        let u = region[head];
        head += 1;
        out.steps += 1;
        for &v in game.predecessors(u) {
            let l = labels[v];
            if l == mark {
                if game.owner(v) == player && strategy[v] == NO_VERTEX {
                    strategy[v] = u;
                }
            } else if l == FREE {
                if game.owner(v) == player {
                    labels[v] = mark;
                    strategy[v] = u;
                    region.push(v);
                } else {
                    if scratch.stamp[v] != epoch {
                        scratch.stamp[v] = epoch;
                        scratch.remaining[v] = game
                            .successors(v)
                            .iter()
                            .filter(|&&w| labels[w] == FREE || labels[w] == mark)
                            .count() as u32;
                    }
                    scratch.remaining[v] -= 1;
                    if scratch.remaining[v] == 0 {
                        labels[v] = mark;
                        region.push(v);
                    }
                }
            }
        }
        let Some(store) = tangles else { continue };
        for &t in store.escape_watchers(player, u) {
            if !store.is_alive(t) {
                continue;
            }
            let tangle = store.get(t);
            // only escapes inside the subgame count
            if scratch.tangle_stamp[t] != epoch {
                scratch.tangle_stamp[t] = epoch;
                scratch.tangle_left[t] = tangle
                    .escapes
                    .iter()
                    .filter(|&&w| labels[w] == FREE || labels[w] == mark)
                    .count() as u32;
            }
            scratch.tangle_left[t] -= 1;
            if scratch.tangle_left[t] != 0 {
                continue;
            }
            if !tangle
                .vertices
                .iter()
                .all(|&w| labels[w] == FREE || labels[w] == mark)
            {
                continue;
            }
            out.steps += 1;
            out.tangles.push(t);
            for &w in &tangle.vertices {
                if labels[w] == FREE {
                    labels[w] = mark;
                    region.push(w);
                }
            }
            for &(w, to) in &tangle.witness {
                if strategy[w] == NO_VERTEX {
                    strategy[w] = to;
                }
            }
        }
    }
    out
}

fn run(
    subgame: &SubgameMask<'_>,
    store: Option<&TangleStore>,
    player: Player,
    seed: &VertexSet,
) -> AttractorResult {
    let game = subgame.game();
    let n = game.vertex_count();
    let mut labels: Vec<u32> = (0..n)
        .map(|v| if subgame.contains(v) { FREE } else { OUTSIDE })
        .collect();
    let seed: Vec<Vertex> = seed.iter().collect();
    for &v in &seed {
        assert!(subgame.contains(v), "seed vertex {v} is not in the subgame");
    }
    let mut strategy = vec![NO_VERTEX; n];
    let mut region = Vec::new();
    let mut scratch = Scratch::new(n);
    let a = attract(
        game,
        &mut labels,
        0,
        player,
        &seed,
        store,
        &mut strategy,
        &mut region,
        &mut scratch,
    );
    AttractorResult {
        attracted: VertexSet::from_vertices(n, region),
        strategy: Strategy::from_raw(strategy),
        attracted_tangles: a.tangles,
        steps: a.steps,
    }
}

/// The `player`-attractor of `seed` in `subgame`.
pub fn attr(subgame: &SubgameMask<'_>, player: Player, seed: &VertexSet) -> AttractorResult {
    run(subgame, None, player, seed)
}

/// The `player`-attractor of `seed` in `subgame` that also pulls in the
/// tangles of `player` from `store`.
pub fn tattr(
    subgame: &SubgameMask<'_>,
    store: &TangleStore,
    player: Player,
    seed: &VertexSet,
) -> AttractorResult {
    run(subgame, Some(store), player, seed)
}
