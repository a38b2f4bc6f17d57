use std::time::Instant;

use crate::attractor::{attract, Scratch, FREE, NO_VERTEX, OUTSIDE};
use crate::game::{ParityGame, Player, Priority, Vertex};
use crate::solution::Solution;
use crate::tangle::{AddOutcome, Extraction, Extractor, Tangle, TangleStore};

use super::audit;
use super::{SolveError, SolveOutput, SolverConfig, SolverStats};

#[derive(Clone, Copy, Debug)]
pub(super) struct Region {
    pub priority: Priority,
    pub player: Player,
    pub start: usize,
    pub end: usize,
    /// No higher region of the same player exists.
    pub highest: bool,
}

/// Solver state over one game. Vertices carry a label: [`OUTSIDE`] once
/// solved (or never part of the game being solved), [`FREE`] while not in a
/// region, or the priority of their region.
pub(super) struct Engine<'g> {
    pub game: &'g ParityGame,
    config: &'g SolverConfig,
    pub labels: Vec<u32>,
    pub strategy: Vec<Vertex>,
    /// Vertices by descending priority.
    order: Vec<Vertex>,
    pos: usize,
    pub buf: Vec<Vertex>,
    pub regions: Vec<Region>,
    per_player: [usize; 2],
    pub store: TangleStore,
    scratch: Scratch,
    extractor: Extractor,
    found: Vec<Tangle>,
    remaining: usize,
    stats: SolverStats,
    trace: Vec<String>,
    audit: Vec<String>,
}

impl<'g> Engine<'g> {
    pub fn new(
        game: &'g ParityGame,
        config: &'g SolverConfig,
        labels: Vec<u32>,
        store: TangleStore,
    ) -> Engine<'g> {
        let n = game.vertex_count();
        let mut order: Vec<Vertex> = game.vertices().collect();
        order.sort_by_key(|&v| std::cmp::Reverse(game.priority(v)));
        let remaining = labels.iter().filter(|&&l| l != OUTSIDE).count();
        Engine {
            game,
            config,
            labels,
            strategy: vec![NO_VERTEX; n],
            order,
            pos: 0,
            buf: Vec::new(),
            regions: Vec::new(),
            per_player: [0, 0],
            store,
            scratch: Scratch::new(n),
            extractor: Extractor::new(n),
            found: Vec::new(),
            remaining,
            stats: SolverStats::default(),
            trace: Vec::new(),
            audit: Vec::new(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn finish(self, solution: Solution) -> SolveOutput {
        SolveOutput {
            solution,
            stats: self.stats,
            trace: self.trace,
            audit: self.audit,
        }
    }

    pub fn into_parts(self) -> (TangleStore, SolverStats) {
        (self.store, self.stats)
    }

    pub fn region_vertices(&self, r: &Region) -> &[Vertex] {
        &self.buf[r.start..r.end]
    }

    fn pop_region(&mut self) {
        let r = self.regions.pop().expect("no region to pop");
        for &v in &self.buf[r.start..r.end] {
            self.labels[v] = FREE;
            self.strategy[v] = NO_VERTEX;
        }
        self.buf.truncate(r.start);
        self.per_player[r.player.index()] -= 1;
    }

    fn reset_decomposition(&mut self) {
        while !self.regions.is_empty() {
            self.pop_region();
        }
        self.pos = 0;
    }

    /// Drops every region with priority at most `p` and resumes the
    /// decomposition below the remaining ones.
    fn reset_to(&mut self, p: u32) {
        while self.regions.last().is_some_and(|r| r.priority <= p) {
            self.pop_region();
        }
        let game = self.game;
        self.pos = match self.regions.last() {
            Some(r) => self.order.partition_point(|&v| game.priority(v) >= r.priority),
            None => 0,
        };
    }

    fn check_deadline(&self) -> Result<(), SolveError> {
        match self.config.deadline {
            Some(d) if Instant::now() >= d => Err(SolveError::Timeout),
            _ => Ok(()),
        }
    }

    /// Computes the next region of the decomposition. Returns its index, or
    /// `None` when every vertex is in a region.
    fn next_region(&mut self) -> Result<Option<usize>, SolveError> {
        let game = self.game;
        while self.pos < self.order.len() && self.labels[self.order[self.pos]] != FREE {
            self.pos += 1;
        }
        if self.pos == self.order.len() {
            return Ok(None);
        }
        if self.stats.decomposition_iterations % 256 == 255 {
            self.check_deadline()?;
        }
        let p = game.priority(self.order[self.pos]);
        let player = Player::of_priority(p);
        let mut seed = Vec::new();
        while self.pos < self.order.len() && game.priority(self.order[self.pos]) == p {
            let v = self.order[self.pos];
            if self.labels[v] == FREE {
                seed.push(v);
            }
            self.pos += 1;
        }
        let start = self.buf.len();
        let a = attract(
            game,
            &mut self.labels,
            p,
            player,
            &seed,
            Some(&self.store),
            &mut self.strategy,
            &mut self.buf,
            &mut self.scratch,
        );
        let region = Region {
            priority: p,
            player,
            start,
            end: self.buf.len(),
            highest: self.per_player[player.index()] == 0,
        };
        self.per_player[player.index()] += 1;
        self.regions.push(region);
        self.stats.decomposition_iterations += 1;
        self.stats.tangle_attractions += a.tangles.len() as u64;
        self.stats.max_region_count = self.stats.max_region_count.max(self.regions.len() as u64);
        if self.config.audit {
            let found = audit::region(self, &region);
            self.audit.extend(found);
        }
        Ok(Some(self.regions.len() - 1))
    }

    /// Extracts the tangles of region `idx` into `self.found`.
    fn extract(&mut self, idx: usize) {
        let r = self.regions[idx];
        self.found.clear();
        let outcome = self.extractor.extract(
            self.game,
            &self.labels,
            r.priority,
            r.player,
            &self.buf[r.start..r.end],
            &self.strategy,
            r.highest,
            self.config.skip_reduction,
            &mut self.found,
        );
        if outcome == Extraction::Skipped {
            debug_assert!(self.found.is_empty());
        }
        if self.config.audit {
            for t in &self.found {
                let found = audit::tangle(self, t, r.highest);
                self.audit.extend(found);
            }
        }
    }

    /// Extracts from region `idx`. Returns a dominion if one was found, and
    /// otherwise leaves the new (not yet stored) tangles in `fresh`. With
    /// `mine` unset only dominions are of interest.
    fn harvest(&mut self, idx: usize, mine: bool, fresh: &mut Vec<Tangle>) -> Option<Tangle> {
        self.extract(idx);
        let mut found = std::mem::take(&mut self.found);
        let mut dominion = None;
        for t in found.drain(..) {
            if t.is_dominion() {
                dominion = Some(t);
                break;
            }
            if mine && self.store.find(&t.vertices).is_none() {
                fresh.push(t);
            }
        }
        self.found = found;
        if dominion.is_some() {
            fresh.clear();
        }
        dominion
    }

    fn learn(&mut self, fresh: Vec<Tangle>) -> Result<(), SolveError> {
        for t in fresh {
            match self.store.add(t) {
                AddOutcome::Added(id) => {
                    self.stats.tangles_learned += 1;
                    if self.config.trace {
                        self.trace.push(self.store.get(id).to_string());
                    }
                }
                AddOutcome::Duplicate(_) => {}
            }
        }
        if self.stats.tangles_learned > self.config.budget {
            return Err(SolveError::BudgetExceeded(self.config.budget));
        }
        Ok(())
    }

    fn found_dominion(&mut self, t: Tangle) -> Tangle {
        self.stats.tangles_learned += 1;
        self.stats.dominions_found += 1;
        if self.config.trace {
            self.trace.push(format!("dominion {t}"));
        }
        t
    }

    /// The highest region that attracts one of `fresh` once it is learned.
    fn reset_point(&self, fresh: &[Tangle]) -> u32 {
        fresh
            .iter()
            .map(|t| {
                t.escapes
                    .iter()
                    .map(|&e| self.labels[e])
                    .min()
                    .unwrap_or(FREE)
            })
            .max()
            .unwrap_or(FREE)
    }

    /// Searches the current game for a dominion.
    pub fn search(&mut self) -> Result<Tangle, SolveError> {
        self.stats.search_calls += 1;
        self.reset_decomposition();
        self.check_deadline()?;
        let variant = self.config.variant;
        let alternating = variant.alternating();
        let otf = variant.on_the_fly();
        let top = self
            .order
            .iter()
            .find(|&&v| self.labels[v] == FREE)
            .map(|&v| self.game.priority(v))
            .ok_or_else(|| SolveError::Internal("search on an empty game".into()))?;
        let mut turn = Player::of_priority(top);
        if alternating && self.config.trace {
            self.trace.push(format!("turn {turn}"));
        }
        let mut pending: Vec<Tangle> = Vec::new();
        let mut fresh: Vec<Tangle> = Vec::new();
        loop {
            if let Some(idx) = self.next_region()? {
                let r = self.regions[idx];
                let mine = !alternating || r.player == turn;
                if !mine && !r.highest {
                    continue;
                }
                if let Some(d) = self.harvest(idx, mine, &mut fresh) {
                    return Ok(self.found_dominion(d));
                }
                if fresh.is_empty() {
                    continue;
                }
                if otf {
                    let p = self.reset_point(&fresh);
                    self.learn(std::mem::take(&mut fresh))?;
                    self.reset_to(p);
                } else {
                    pending.append(&mut fresh);
                }
                continue;
            }
            // the decomposition is complete
            self.check_deadline()?;
            if !pending.is_empty() {
                self.learn(std::mem::take(&mut pending))?;
                self.reset_decomposition();
                continue;
            }
            if !alternating {
                return Err(SolveError::Internal(
                    "a full decomposition yielded no new tangle".into(),
                ));
            }
            // the opponent takes over on the same decomposition
            turn = turn.opponent();
            self.stats.turns += 1;
            if self.config.trace {
                self.trace.push(format!("turn {turn}"));
            }
            let mut reset = None;
            for idx in 0..self.regions.len() {
                if self.regions[idx].player != turn {
                    continue;
                }
                if let Some(d) = self.harvest(idx, true, &mut fresh) {
                    return Ok(self.found_dominion(d));
                }
                if fresh.is_empty() {
                    continue;
                }
                if otf {
                    reset = Some(self.reset_point(&fresh));
                    break;
                }
                pending.append(&mut fresh);
            }
            if otf {
                let Some(p) = reset else {
                    return Err(SolveError::Internal(
                        "neither player learns a tangle from the decomposition".into(),
                    ));
                };
                self.learn(std::mem::take(&mut fresh))?;
                self.reset_to(p);
                continue;
            }
            if pending.is_empty() {
                return Err(SolveError::Internal(
                    "neither player learns a tangle from the decomposition".into(),
                ));
            }
            self.learn(std::mem::take(&mut pending))?;
            self.reset_decomposition();
        }
    }

    /// Attracts to `dominion` in the remaining game, records the winner and
    /// strategies, and removes the attracted vertices.
    pub fn claim(&mut self, dominion: &Tangle, solution: &mut Solution) {
        self.reset_decomposition();
        let player = dominion.player;
        for &(v, w) in &dominion.witness {
            self.strategy[v] = w;
        }
        let mut won = Vec::new();
        // region label 0 is as good as any: every other vertex is FREE or OUTSIDE
        attract(
            self.game,
            &mut self.labels,
            0,
            player,
            &dominion.vertices,
            None,
            &mut self.strategy,
            &mut won,
            &mut self.scratch,
        );
        for &v in &won {
            let choice = if self.game.owner(v) == player {
                debug_assert_ne!(self.strategy[v], NO_VERTEX);
                Some(self.strategy[v])
            } else {
                None
            };
            solution.set(v, player, choice);
            self.labels[v] = OUTSIDE;
            self.strategy[v] = NO_VERTEX;
        }
        self.remaining -= won.len();
        let labels = &self.labels;
        self.store.prune_with(&won, |v| labels[v] == OUTSIDE);
    }
}
