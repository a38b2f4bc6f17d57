//! Tangles: strongly connected vertex sets in which one player has a
//! strategy that wins every cycle, so the opponent must escape.
//!
//! This module extracts new tangles from a region of the decomposition and
//! keeps the learned ones in a [`TangleStore`].

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::attractor::{Strategy, FREE, NO_VERTEX, OUTSIDE};
use crate::game::{ParityGame, Player, Priority, SubgameMask, Vertex, VertexSet};
use crate::scc::SccFinder;
use crate::solver::RegionMap;

pub type TangleId = usize;

/// Id of a tangle that has not been stored.
pub const UNSTORED: TangleId = usize::MAX;

#[derive(Clone, PartialEq, Eq)]
pub struct Tangle {
    /// Assigned by [`TangleStore::add`]; [`UNSTORED`] until then.
    pub id: TangleId,
    pub priority: Priority,
    pub player: Player,
    /// Sorted.
    pub vertices: Vec<Vertex>,
    /// Choices of `player`'s vertices, sorted by vertex.
    pub witness: Vec<(Vertex, Vertex)>,
    /// Successors of opponent vertices that leave the tangle. Sorted.
    pub escapes: Vec<Vertex>,
}

impl Tangle {
    /// Builds a tangle from its vertices and witness, taking the priority from
    /// the vertices and the escapes from the edges visible in `subgame`.
    pub fn new(
        subgame: &SubgameMask<'_>,
        priority: Priority,
        mut vertices: Vec<Vertex>,
        mut witness: Vec<(Vertex, Vertex)>,
    ) -> Tangle {
        vertices.sort_unstable();
        vertices.dedup();
        witness.sort_unstable();
        let player = Player::of_priority(priority);
        let escapes = escapes_of(subgame, player, &vertices);
        Tangle {
            id: UNSTORED,
            priority,
            player,
            vertices,
            witness,
            escapes,
        }
    }

    /// A tangle the opponent cannot leave is a dominion.
    pub fn is_dominion(&self) -> bool {
        self.escapes.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn witness_of(&self, v: Vertex) -> Option<Vertex> {
        self.witness
            .binary_search_by_key(&v, |&(u, _)| u)
            .ok()
            .map(|i| self.witness[i].1)
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        VertexSet::from_vertices(n, self.vertices.iter().copied())
    }
}

fn fmt_list(f: &mut fmt::Formatter<'_>, vs: &[Vertex]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for Tangle {
    /// The trace format: `tangle <id> p=<priority> V={..} esc={..}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == UNSTORED {
            write!(f, "tangle - p={} V=", self.priority)?;
        } else {
            write!(f, "tangle {} p={} V=", self.id, self.priority)?;
        }
        fmt_list(f, &self.vertices)?;
        write!(f, " esc=")?;
        fmt_list(f, &self.escapes)
    }
}

impl fmt::Debug for Tangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} σ={:?}", self.witness)
    }
}

/// Escapes of a sorted vertex set won by `player`, against `subgame`.
pub fn escapes_of(subgame: &SubgameMask<'_>, player: Player, vertices: &[Vertex]) -> Vec<Vertex> {
    let game = subgame.game();
    let mut out: Vec<Vertex> = vertices
        .iter()
        .filter(|&&u| game.owner(u) != player)
        .flat_map(|&u| subgame.successors(u))
        .filter(|w| vertices.binary_search(w).is_err())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Ways a vertex set and witness can fail to be a tangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TangleViolation {
    Empty,
    UnsortedVertices,
    PriorityMismatch { stated: Priority, actual: Priority },
    PlayerMismatch,
    /// A vertex of the tangle's player has no witness choice.
    WitnessMissing(Vertex),
    /// Witness entry for a vertex outside the tangle or not owned by its player.
    WitnessForeign(Vertex),
    WitnessNotEdge(Vertex, Vertex),
    WitnessLeaves(Vertex, Vertex),
    NotStronglyConnected,
    /// A cycle in the witness-restricted graph won by the opponent; the
    /// vertices of the strongly connected part holding it.
    OpponentCycle { priority: Priority, vertices: Vec<Vertex> },
    EscapesMismatch { stated: Vec<Vertex>, actual: Vec<Vertex> },
}

/// A small graph over local indices `0..nodes.len()`.
pub(crate) struct LocalGraph {
    pub nodes: Vec<Vertex>,
    pub adj: Vec<Vec<usize>>,
}

impl LocalGraph {
    /// Restricts the game to `nodes`: vertices owned by `player` follow
    /// `choice` (when it stays inside), the others keep all internal edges.
    pub fn restricted(
        game: &ParityGame,
        nodes: &[Vertex],
        player: Player,
        choice: impl Fn(Vertex) -> Option<Vertex>,
    ) -> LocalGraph {
        let local = |w: Vertex| nodes.binary_search(&w).ok();
        let adj = nodes
            .iter()
            .map(|&v| {
                if game.owner(v) == player {
                    choice(v).and_then(local).into_iter().collect()
                } else {
                    game.successors(v).iter().filter_map(|&w| local(w)).collect()
                }
            })
            .collect();
        LocalGraph {
            nodes: nodes.to_vec(),
            adj,
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let mut count = 0;
        SccFinder::new(n).run(
            &(0..n).collect::<Vec<_>>(),
            |v| self.adj[v].iter().copied(),
            |_| count += 1,
        );
        count == 1
    }

    /// Looks for a cycle whose highest priority has the parity of `player`'s
    /// opponent. Works by repeated SCC decomposition: a nontrivial SCC whose
    /// top priority favours the opponent holds such a cycle; otherwise its
    /// top vertices are dropped and the rest is decomposed again.
    pub fn opponent_cycle(&self, game: &ParityGame, player: Player) -> Option<(Priority, Vec<Vertex>)> {
        let n = self.nodes.len();
        let mut group = vec![0usize; n];
        let mut next_group = 1;
        let mut finder = SccFinder::new(n);
        let mut work: Vec<(usize, Vec<usize>)> = vec![(0, (0..n).collect())];
        while let Some((gid, members)) = work.pop() {
            let mut comps = Vec::new();
            finder.run(
                &members,
                |v| {
                    self.adj[v]
                        .iter()
                        .copied()
                        .filter(|&w| group[w] == gid)
                        .collect::<Vec<_>>()
                        .into_iter()
                },
                |c| comps.push(c.to_vec()),
            );
            for comp in comps {
                let nontrivial = comp.len() > 1 || self.adj[comp[0]].contains(&comp[0]);
                if !nontrivial {
                    continue;
                }
                let top = comp
                    .iter()
                    .map(|&v| game.priority(self.nodes[v]))
                    .max()
                    .unwrap();
                if Player::of_priority(top) != player {
                    let mut vs: Vec<Vertex> = comp.iter().map(|&v| self.nodes[v]).collect();
                    vs.sort_unstable();
                    return Some((top, vs));
                }
                let gid = next_group;
                next_group += 1;
                let rest: Vec<usize> = comp
                    .into_iter()
                    .filter(|&v| game.priority(self.nodes[v]) != top)
                    .collect();
                for &v in &rest {
                    group[v] = gid;
                }
                if !rest.is_empty() {
                    work.push((gid, rest));
                }
            }
        }
        None
    }
}

/// Checks every tangle invariant of `t` against the full game.
pub fn check_tangle(game: &ParityGame, t: &Tangle) -> Vec<TangleViolation> {
    check_tangle_in(&SubgameMask::full(game), t)
}

/// Checks every tangle invariant of `t`, computing escapes against `subgame`.
pub fn check_tangle_in(subgame: &SubgameMask<'_>, t: &Tangle) -> Vec<TangleViolation> {
    let game = subgame.game();
    let mut out = Vec::new();
    if t.vertices.is_empty() {
        out.push(TangleViolation::Empty);
        return out;
    }
    if t.vertices.windows(2).any(|w| w[0] >= w[1]) {
        out.push(TangleViolation::UnsortedVertices);
        return out;
    }
    let actual = t.vertices.iter().map(|&v| game.priority(v)).max().unwrap();
    if actual != t.priority {
        out.push(TangleViolation::PriorityMismatch {
            stated: t.priority,
            actual,
        });
    }
    if Player::of_priority(t.priority) != t.player {
        out.push(TangleViolation::PlayerMismatch);
    }
    for &(v, w) in &t.witness {
        if !t.contains(v) || game.owner(v) != t.player {
            out.push(TangleViolation::WitnessForeign(v));
        } else if !game.has_edge(v, w) {
            out.push(TangleViolation::WitnessNotEdge(v, w));
        } else if !t.contains(w) {
            out.push(TangleViolation::WitnessLeaves(v, w));
        }
    }
    for &v in &t.vertices {
        if game.owner(v) == t.player && t.witness_of(v).is_none() {
            out.push(TangleViolation::WitnessMissing(v));
        }
    }
    let graph = LocalGraph::restricted(game, &t.vertices, t.player, |v| t.witness_of(v));
    if !graph.is_strongly_connected() {
        out.push(TangleViolation::NotStronglyConnected);
    }
    if let Some((priority, vertices)) = graph.opponent_cycle(game, t.player) {
        out.push(TangleViolation::OpponentCycle { priority, vertices });
    }
    let escapes = escapes_of(subgame, t.player, &t.vertices);
    if escapes != t.escapes {
        out.push(TangleViolation::EscapesMismatch {
            stated: t.escapes.clone(),
            actual: escapes,
        });
    }
    out
}

/// Reusable buffers for region reduction and tangle extraction, working
/// over the solver's label array.
///
/// Labels during extraction of the region at priority `p`: the region is
/// labelled `p`, the lower part of the subgame is [`FREE`] or a priority
/// below `p`, higher regions carry their own priority, and [`OUTSIDE`] marks
/// vertices not in the game being solved.
#[derive(Clone, Debug)]
pub struct Extractor {
    removed: Vec<u32>,
    component: Vec<u32>,
    epoch: u32,
    queue: Vec<Vertex>,
    scc: SccFinder,
}

#[inline]
fn is_lower(label: u32, p: u32) -> bool {
    label == FREE || label < p
}

/// Outcome of [`Extractor::extract`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extraction {
    /// Tangles were produced (possibly none).
    Done,
    /// Skip-reduction mode found a top vertex escaping downward.
    Skipped,
}

impl Extractor {
    pub fn new(n: usize) -> Extractor {
        Extractor {
            removed: vec![0; n],
            component: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
            scc: SccFinder::new(n),
        }
    }

    fn bump(&mut self) -> u32 {
        if self.epoch >= u32::MAX - 2 {
            self.removed.iter_mut().for_each(|s| *s = 0);
            self.component.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Removes from the region every vertex where the opponent can reach a
    /// lower region while `player` follows `strategy`. Returns the remaining
    /// vertices, in region order. The removal mark stays valid until the
    /// next call.
    ///
    /// With `skip_only` set, nothing is removed: `None` signals that some
    /// vertex escapes downward.
    #[allow(clippy::too_many_arguments)]
    pub fn reduce(
        &mut self,
        game: &ParityGame,
        labels: &[u32],
        p: u32,
        player: Player,
        region: &[Vertex],
        strategy: &[Vertex],
        skip_only: bool,
    ) -> Option<Vec<Vertex>> {
        let epoch = self.bump();
        self.queue.clear();
        for &v in region {
            let escapes = if game.owner(v) == player {
                let s = strategy[v];
                s == NO_VERTEX || labels[s] != p
            } else {
                game.successors(v).iter().any(|&w| is_lower(labels[w], p))
            };
            if escapes {
                if skip_only {
                    return None;
                }
                self.removed[v] = epoch;
                self.queue.push(v);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            for &v in game.predecessors(u) {
                if labels[v] != p || self.removed[v] == epoch {
                    continue;
                }
                if game.owner(v) != player || strategy[v] == u {
                    self.removed[v] = epoch;
                    self.queue.push(v);
                }
            }
        }
        Some(
            region
                .iter()
                .copied()
                .filter(|&v| self.removed[v] != epoch)
                .collect(),
        )
    }

    /// Extracts the tangles of the region labelled `p`.
    ///
    /// Reduces the region, then returns each nontrivial bottom SCC of the
    /// reduced region under the strategy-restricted edges. When `highest` is
    /// set (no higher region of `player` exists) the whole reduced region is
    /// returned as one tangle instead, which is then a dominion. Escapes are
    /// computed against every vertex not labelled [`OUTSIDE`].
    #[allow(clippy::too_many_arguments)]
    pub fn extract(
        &mut self,
        game: &ParityGame,
        labels: &[u32],
        p: u32,
        player: Player,
        region: &[Vertex],
        strategy: &[Vertex],
        highest: bool,
        skip_reduction: bool,
        out: &mut Vec<Tangle>,
    ) -> Extraction {
        let Some(mut reduced) =
            self.reduce(game, labels, p, player, region, strategy, skip_reduction)
        else {
            return Extraction::Skipped;
        };
        if reduced.is_empty() {
            return Extraction::Done;
        }
        let epoch = self.epoch;
        let removed = &self.removed;
        let inside = |w: Vertex| labels[w] == p && removed[w] != epoch;
        if highest {
            reduced.sort_unstable();
            out.push(Self::build(game, labels, p, player, reduced, strategy, inside));
            return Extraction::Done;
        }
        // Local E': player's vertices follow the strategy, the opponent keeps
        // every edge that stays in the reduced region.
        let succ = |v: Vertex| {
            let own = game.owner(v) == player;
            let s = strategy[v];
            game.successors(v)
                .iter()
                .copied()
                .filter(move |&w| if own { w == s } else { inside(w) })
        };
        let mut comps: Vec<Vec<Vertex>> = Vec::new();
        self.scc.run(&reduced, succ, |c| comps.push(c.to_vec()));
        for (i, comp) in comps.iter().enumerate() {
            for &v in comp {
                self.component[v] = i as u32 + 1;
            }
        }
        let component = &self.component;
        for (i, mut comp) in comps.into_iter().enumerate() {
            let cid = i as u32 + 1;
            let mut self_loop = false;
            let mut bottom = true;
            'check: for &v in &comp {
                for w in succ(v) {
                    if component[w] != cid {
                        bottom = false;
                        break 'check;
                    }
                    if w == v {
                        self_loop = true;
                    }
                }
            }
            if !bottom || (comp.len() == 1 && !self_loop) {
                continue;
            }
            comp.sort_unstable();
            let t = Self::build(game, labels, p, player, comp, strategy, |w| component[w] == cid);
            out.push(t);
        }
        // component ids are reused per call; clear them for the next region
        for &v in &reduced {
            self.component[v] = 0;
        }
        Extraction::Done
    }

    fn build(
        game: &ParityGame,
        labels: &[u32],
        p: u32,
        player: Player,
        vertices: Vec<Vertex>,
        strategy: &[Vertex],
        member: impl Fn(Vertex) -> bool,
    ) -> Tangle {
        let mut witness = Vec::new();
        let mut escapes = Vec::new();
        for &v in &vertices {
            if game.owner(v) == player {
                witness.push((v, strategy[v]));
            } else {
                escapes.extend(
                    game.successors(v)
                        .iter()
                        .copied()
                        .filter(|&w| labels[w] != OUTSIDE && !member(w)),
                );
            }
        }
        escapes.sort_unstable();
        escapes.dedup();
        Tangle {
            id: UNSTORED,
            priority: p,
            player,
            vertices,
            witness,
            escapes,
        }
    }
}

/// Labels for the public region functions: `r` vertices keep their region
/// priority, the region gets `p`, the rest of the subgame is free.
fn labels_for(
    subgame: &SubgameMask<'_>,
    region: &VertexSet,
    p: Priority,
    regions: Option<&RegionMap>,
) -> Vec<u32> {
    let n = subgame.game().vertex_count();
    (0..n)
        .map(|v| {
            if region.contains(v) {
                p
            } else if subgame.contains(v) {
                FREE
            } else if let Some(q) = regions.and_then(|r| r.get(v)) {
                q
            } else {
                OUTSIDE
            }
        })
        .collect()
}

fn flat_strategy(n: usize, strategy: &Strategy) -> Vec<Vertex> {
    let mut flat = vec![NO_VERTEX; n];
    for (v, w) in strategy.pairs() {
        flat[v] = w;
    }
    flat
}

/// Removes from `region` (a region of `subgame` at priority `p`) every
/// vertex where the opponent can reach the rest of `subgame` while `player`
/// follows `strategy`.
pub fn reduce_region(
    subgame: &SubgameMask<'_>,
    region: &VertexSet,
    strategy: &Strategy,
    player: Player,
    p: Priority,
) -> VertexSet {
    let game = subgame.game();
    let n = game.vertex_count();
    let labels = labels_for(subgame, region, p, None);
    let order: Vec<Vertex> = region.iter().collect();
    let kept = Extractor::new(n)
        .reduce(game, &labels, p, player, &order, &flat_strategy(n, strategy), false)
        .expect("reduction without skip never bails");
    VertexSet::from_vertices(n, kept)
}

/// Extracts the tangles of `region`, a region at priority `p` of `subgame`.
/// `regions` holds the higher regions already carved off; escapes are
/// computed against `subgame` together with those regions.
pub fn extract_tangles(
    subgame: &SubgameMask<'_>,
    region: &VertexSet,
    strategy: &Strategy,
    player: Player,
    p: Priority,
    regions: &RegionMap,
    highest: bool,
) -> Vec<Tangle> {
    let game = subgame.game();
    let n = game.vertex_count();
    let labels = labels_for(subgame, region, p, Some(regions));
    let order: Vec<Vertex> = region.iter().collect();
    let mut out = Vec::new();
    Extractor::new(n).extract(
        game,
        &labels,
        p,
        player,
        &order,
        &flat_strategy(n, strategy),
        highest,
        false,
        &mut out,
    );
    out
}

/// Result of [`TangleStore::add`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOutcome {
    Added(TangleId),
    /// A tangle with the same vertex set is already stored.
    Duplicate(TangleId),
}

/// The learned tangles, indexed by contained vertex and by escape vertex.
///
/// Tangle identity is the vertex set. Pruned tangles keep their slot (ids
/// are stable) but are no longer visible.
#[derive(Clone, Debug)]
pub struct TangleStore {
    tangles: Vec<Tangle>,
    alive: Vec<bool>,
    live: usize,
    containing: Vec<Vec<TangleId>>,
    watchers: [Vec<Vec<TangleId>>; 2],
    by_set: HashMap<u64, Vec<TangleId>>,
}

fn fingerprint(vertices: &[Vertex]) -> u64 {
    let mut h = DefaultHasher::new();
    vertices.hash(&mut h);
    h.finish()
}

impl TangleStore {
    pub fn new(n: usize) -> TangleStore {
        TangleStore {
            tangles: Vec::new(),
            alive: Vec::new(),
            live: 0,
            containing: vec![Vec::new(); n],
            watchers: [vec![Vec::new(); n], vec![Vec::new(); n]],
            by_set: HashMap::new(),
        }
    }

    /// Number of live tangles.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// One past the largest id handed out.
    pub fn capacity(&self) -> usize {
        self.tangles.len()
    }

    pub fn get(&self, id: TangleId) -> &Tangle {
        &self.tangles[id]
    }

    pub fn is_alive(&self, id: TangleId) -> bool {
        self.alive[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tangle> {
        self.tangles
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(t, _)| t)
    }

    /// Tangles of `player` that have `v` among their escapes. May include
    /// pruned tangles; check [`TangleStore::is_alive`].
    #[inline]
    pub fn escape_watchers(&self, player: Player, v: Vertex) -> &[TangleId] {
        &self.watchers[player.index()][v]
    }

    /// Tangles containing `v`.
    pub fn containing(&self, v: Vertex) -> impl Iterator<Item = TangleId> + '_ {
        self.containing[v].iter().copied().filter(|&t| self.alive[t])
    }

    pub fn find(&self, vertices: &[Vertex]) -> Option<TangleId> {
        self.by_set
            .get(&fingerprint(vertices))?
            .iter()
            .copied()
            .find(|&id| self.alive[id] && self.tangles[id].vertices == vertices)
    }

    /// Stores `t` unless a tangle with the same vertex set is present.
    pub fn add(&mut self, mut t: Tangle) -> AddOutcome {
        debug_assert!(t.vertices.windows(2).all(|w| w[0] < w[1]));
        if let Some(id) = self.find(&t.vertices) {
            return AddOutcome::Duplicate(id);
        }
        let id = self.tangles.len();
        t.id = id;
        for &v in &t.vertices {
            self.containing[v].push(id);
        }
        for &v in &t.escapes {
            self.watchers[t.player.index()][v].push(id);
        }
        self.by_set
            .entry(fingerprint(&t.vertices))
            .or_default()
            .push(id);
        self.tangles.push(t);
        self.alive.push(true);
        self.live += 1;
        AddOutcome::Added(id)
    }

    /// Drops every tangle that touches `removed` and strips `removed` from the
    /// escapes of the others.
    pub fn prune(&mut self, removed: &VertexSet) {
        let list: Vec<Vertex> = removed.iter().collect();
        self.prune_with(&list, |v| removed.contains(v));
    }

    pub(crate) fn prune_with(&mut self, removed: &[Vertex], is_removed: impl Fn(Vertex) -> bool) {
        for &v in removed {
            for id in std::mem::take(&mut self.containing[v]) {
                if !self.alive[id] {
                    continue;
                }
                self.alive[id] = false;
                self.live -= 1;
                let fp = fingerprint(&self.tangles[id].vertices);
                if let Some(ids) = self.by_set.get_mut(&fp) {
                    ids.retain(|&x| x != id);
                    if ids.is_empty() {
                        self.by_set.remove(&fp);
                    }
                }
            }
        }
        for &v in removed {
            for player in 0..2 {
                for id in std::mem::take(&mut self.watchers[player][v]) {
                    if self.alive[id] {
                        self.tangles[id].escapes.retain(|&w| !is_removed(w));
                    }
                }
            }
        }
    }
}
