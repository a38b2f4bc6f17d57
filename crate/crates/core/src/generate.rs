//! Random games in the style of PGSolver's `randomgame`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{ParityGame, Player, Priority, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub vertex_count: usize,
    /// Priorities are drawn from `0..=max_priority`.
    pub max_priority: Priority,
    pub min_outdeg: usize,
    pub max_outdeg: usize,
    pub self_loops: bool,
    pub seed: u64,
}

impl GenSpec {
    /// `N` vertices, priorities up to `N`, out-degree in `l..=h`.
    pub fn new(vertex_count: usize, min_outdeg: usize, max_outdeg: usize, seed: u64) -> GenSpec {
        GenSpec {
            vertex_count,
            max_priority: vertex_count as Priority,
            min_outdeg,
            max_outdeg,
            self_loops: false,
            seed,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("a game needs at least one vertex")]
    Empty,
    #[error("minimum out-degree must be at least 1")]
    ZeroOutdeg,
    #[error("minimum out-degree {0} exceeds maximum {1}")]
    Inverted(usize, usize),
    #[error("out-degree {degree} needs more than the {available} available successors")]
    TooFewVertices { degree: usize, available: usize },
    #[error("priority {0} is too large")]
    Priority(Priority),
}

pub fn generate(spec: &GenSpec) -> Result<ParityGame, GenError> {
    let n = spec.vertex_count;
    if n == 0 {
        return Err(GenError::Empty);
    }
    if spec.min_outdeg == 0 {
        return Err(GenError::ZeroOutdeg);
    }
    if spec.min_outdeg > spec.max_outdeg {
        return Err(GenError::Inverted(spec.min_outdeg, spec.max_outdeg));
    }
    let available = if spec.self_loops { n } else { n - 1 };
    if spec.max_outdeg > available {
        return Err(GenError::TooFewVertices {
            degree: spec.max_outdeg,
            available,
        });
    }
    if spec.max_priority > crate::game::MAX_PRIORITY {
        return Err(GenError::Priority(spec.max_priority));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut priority = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    let mut successors = Vec::with_capacity(n);
    for v in 0..n {
        priority.push(rng.gen_range(0..=spec.max_priority));
        owner.push(if rng.gen_bool(0.5) { Player::Odd } else { Player::Even });
        let degree = rng.gen_range(spec.min_outdeg..=spec.max_outdeg);
        let succ: Vec<Vertex> = sample(&mut rng, available, degree)
            .into_iter()
            .map(|i| if !spec.self_loops && i >= v { i + 1 } else { i })
            .collect();
        successors.push(succ);
    }
    Ok(ParityGame::new(priority, owner, successors).expect("generated games are valid"))
}
