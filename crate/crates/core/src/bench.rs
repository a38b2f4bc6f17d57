//! Benchmark harness: solves every (game, variant) pair with a timeout and
//! writes one CSV row per run.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::game::ParityGame;
use crate::oracle;
use crate::solver::{self, SolveError, SolverConfig, SolverStats, Variant};

/// First line of every bench CSV.
pub const CSV_VERSION_LINE: &str = "# tangle-bench csv v1";

/// A solver run by the bench: a tangle learning variant or Zielonka.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchSolver {
    Tangle(Variant),
    Zielonka,
}

impl BenchSolver {
    pub fn name(self) -> &'static str {
        match self {
            BenchSolver::Tangle(v) => v.name(),
            BenchSolver::Zielonka => "zlk",
        }
    }

    pub fn parse(s: &str) -> Result<BenchSolver, String> {
        if s == "zlk" {
            Ok(BenchSolver::Zielonka)
        } else {
            s.parse().map(BenchSolver::Tangle)
        }
    }
}

pub struct BenchGame {
    pub id: String,
    pub game: ParityGame,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub game: String,
    pub variant: String,
    /// Wall time in seconds; the timeout value for timed-out runs.
    pub time_s: f64,
    pub timeout: bool,
    pub tangles_learned: u64,
    pub dominions_found: u64,
    pub search_calls: u64,
    pub decomposition_iterations: u64,
    pub turns: u64,
    pub tangle_attractions: u64,
    pub max_region_count: u64,
    /// Empty on success.
    pub error: String,
}

pub struct BenchOptions {
    pub solvers: Vec<BenchSolver>,
    pub timeout: Duration,
    pub workers: usize,
    pub skip_reduction: bool,
    pub self_loops: bool,
}

/// Runs one (game, solver) pair.
pub fn run_one(game: &BenchGame, solver: BenchSolver, opts: &BenchOptions) -> BenchRecord {
    let start = Instant::now();
    let (stats, error, timeout) = match solver {
        BenchSolver::Zielonka => {
            oracle::zielonka(&game.game);
            (SolverStats::default(), String::new(), false)
        }
        BenchSolver::Tangle(variant) => {
            let config = SolverConfig {
                variant,
                skip_reduction: opts.skip_reduction,
                self_loop_preprocess: opts.self_loops,
                deadline: Some(start + opts.timeout),
                ..SolverConfig::default()
            };
            match solver::solve(&game.game, &config) {
                Ok(out) => (out.stats, String::new(), false),
                Err(SolveError::Timeout) => (SolverStats::default(), String::new(), true),
                Err(e) => (SolverStats::default(), e.to_string(), false),
            }
        }
    };
    let elapsed = start.elapsed();
    let timeout = timeout || elapsed > opts.timeout;
    let [tangles_learned, dominions_found, search_calls, decomposition_iterations, turns, tangle_attractions, max_region_count] =
        stats.values();
    BenchRecord {
        game: game.id.clone(),
        variant: solver.name().to_string(),
        time_s: if timeout {
            opts.timeout.as_secs_f64()
        } else {
            elapsed.as_secs_f64()
        },
        timeout,
        tangles_learned,
        dominions_found,
        search_calls,
        decomposition_iterations,
        turns,
        tangle_attractions,
        max_region_count,
        error,
    }
}

/// Runs every pair on `opts.workers` threads. Records come back in
/// (game, solver) order.
pub fn run(games: &[BenchGame], opts: &BenchOptions) -> Vec<BenchRecord> {
    let jobs: Vec<(usize, usize)> = (0..games.len())
        .flat_map(|g| (0..opts.solvers.len()).map(move |s| (g, s)))
        .collect();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..opts.workers.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(g, s)) = jobs.get(i) else { break };
                let record = run_one(&games[g], opts.solvers[s], opts);
                log::info!("{} {} {:.3}s", record.game, record.variant, record.time_s);
                results.lock().unwrap()[i] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

pub fn write_csv<W: Write>(mut out: W, records: &[BenchRecord]) -> Result<(), csv::Error> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgsolver::parse_game;

    fn fixtures() -> Vec<BenchGame> {
        vec![
            BenchGame {
                id: "fig1".into(),
                game: parse_game(include_str!("../tests/fixtures/fig1.pg")).unwrap(),
            },
            BenchGame {
                id: "fig4".into(),
                game: parse_game(include_str!("../tests/fixtures/fig4.pg")).unwrap(),
            },
        ]
    }

    #[test]
    fn fixtures_times_variants() {
        let opts = BenchOptions {
            solvers: Variant::ALL.into_iter().map(BenchSolver::Tangle).collect(),
            timeout: Duration::from_secs(10),
            workers: 3,
            skip_reduction: false,
            self_loops: false,
        };
        let records = run(&fixtures(), &opts);
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| !r.timeout && r.error.is_empty()));
        assert_eq!(records[0].game, "fig1");
        assert_eq!(records[4].variant, "tl");

        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert!(lines.next().unwrap().starts_with("game,variant,time_s,timeout,tangles_learned"));
        assert_eq!(lines.count(), 8);
    }

    #[test]
    fn solver_names() {
        assert_eq!(BenchSolver::parse("zlk"), Ok(BenchSolver::Zielonka));
        assert_eq!(BenchSolver::parse("otfatl"), Ok(BenchSolver::Tangle(Variant::Otfatl)));
        assert!(BenchSolver::parse("pp").is_err());
    }
}
