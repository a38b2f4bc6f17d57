//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tangle_core::attractor::{attr, tattr};
use tangle_core::game::{ParityGame, Player, SubgameMask, VertexSet};
use tangle_core::oracle::{verify, zielonka};
use tangle_core::solver::{self, search, SolverConfig, Variant};
use tangle_core::tangle::TangleStore;
use tangle_core::{generate, GenSpec, Solution};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn all_odd(game: &ParityGame, sol: &Solution) -> bool {
    game.vertices().all(|v| sol.winner(v) == Some(Player::Odd))
}

fn traced(variant: Variant) -> SolverConfig {
    SolverConfig {
        trace: true,
        ..SolverConfig::new(variant)
    }
}

fn fixture_fig1() -> Outcome {
    let start = Instant::now();
    let g = common::fig1();
    for variant in Variant::ALL {
        let out = solver::solve(&g, &traced(variant)).map_err(|e| format!("{variant}: {e}"))?;
        if !all_odd(&g, &out.solution) {
            return Err(format!("{variant}: Odd does not win everything"));
        }
        if !verify(&g, &out.solution).accepted {
            return Err(format!("{variant}: verifier rejects"));
        }
        // c,e = 2,4 and b,c,d,e = 1,2,3,4
        if !out
            .trace
            .iter()
            .any(|l| l.contains("V={2,4} ") || l.contains("V={1,2,3,4} "))
        {
            return Err(format!("{variant}: neither tangle in trace {:?}", out.trace));
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("4 variants, {t:?}"))
}

fn fixture_fig4() -> Outcome {
    let start = Instant::now();
    let g = common::fig4();
    let out = solver::solve(&g, &traced(Variant::Tl)).map_err(|e| e.to_string())?;
    let pos = |needle: &str| {
        out.trace
            .iter()
            .position(|l| l.contains(needle))
            .ok_or_else(|| format!("`{needle}` missing from {:?}", out.trace))
    };
    // c = 2, a,e = 0,4, g = 6
    let c = pos("tangle 0 p=1 V={2} ")?;
    let ae = pos("p=0 V={0,4} ")?;
    let dom = pos("dominion tangle - p=1 V={6} ")?;
    if !(c < ae && ae < dom) {
        return Err(format!("order {c} {ae} {dom} in {:?}", out.trace));
    }
    if !all_odd(&g, &out.solution) || !verify(&g, &out.solution).accepted {
        return Err("wrong or unverified final solution".into());
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{{c}} < {{a,e}} < dominion {{g}}, {t:?}"))
}

/// Solves with every variant and Zielonka; checks agreement and verifies.
fn agree(g: &ParityGame, config: impl Fn(Variant) -> SolverConfig) -> Result<(), String> {
    let reference = zielonka(g);
    if !verify(g, &reference).accepted {
        return Err(format!("zielonka output rejected on\n{}", tangle_core::write_game(g)));
    }
    for variant in Variant::ALL {
        let out = solver::solve(g, &config(variant))
            .map_err(|e| format!("{variant}: {e} on\n{}", tangle_core::write_game(g)))?;
        if out.solution.winners() != reference.winners() {
            return Err(format!("{variant} disagrees with zielonka on\n{}", tangle_core::write_game(g)));
        }
        let verdict = verify(g, &out.solution);
        if !verdict.accepted {
            return Err(format!(
                "{variant} rejected: {:?} on\n{}",
                verdict.violations,
                tangle_core::write_game(g)
            ));
        }
        if !out.audit.is_empty() {
            return Err(format!(
                "{variant} audit: {:?} on\n{}",
                out.audit,
                tangle_core::write_game(g)
            ));
        }
    }
    Ok(())
}

fn corpora() -> impl Iterator<Item = ParityGame> {
    (1..=3)
        .flat_map(common::all_games)
        .chain(common::low_outdegree(1000))
        .chain(common::full_random(200))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for g in corpora() {
        agree(&g, SolverConfig::new)?;
        count += 1;
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(60) {
        return Err(format!("{count} games took {t:?}"));
    }
    Ok(format!("{count} games, 5 solvers, zero disagreements, {t:?}"))
}

fn two_priorities() -> Outcome {
    let mut checked = 0;
    for low in [0, 1] {
        for g in common::two_priority(200, low) {
            for variant in Variant::ALL {
                let out = solver::solve(&g, &SolverConfig::new(variant)).map_err(|e| e.to_string())?;
                if out.stats.tangles_learned != out.stats.dominions_found {
                    return Err(format!(
                        "{variant}: {} learned vs {} dominions on\n{}",
                        out.stats.tangles_learned,
                        out.stats.dominions_found,
                        tangle_core::write_game(&g)
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} runs over priorities {{0,1}} and {{1,2}}"))
}

fn tangle_well_formedness() -> Outcome {
    let mut tangles = 0;
    let mut count = 0;
    for g in corpora() {
        for variant in Variant::ALL {
            let config = SolverConfig {
                audit: true,
                ..SolverConfig::new(variant)
            };
            let out = solver::solve(&g, &config).map_err(|e| e.to_string())?;
            if !out.audit.is_empty() {
                return Err(format!(
                    "{variant}: {:?} on\n{}",
                    out.audit,
                    tangle_core::write_game(&g)
                ));
            }
            tangles += out.stats.tangles_learned;
        }
        count += 1;
    }
    Ok(format!("{tangles} tangles over {count} games, all well formed with escapes in higher regions"))
}

fn random_subset(rng: &mut ChaCha8Rng, of: &VertexSet, p: f64) -> VertexSet {
    VertexSet::from_vertices(of.capacity(), of.iter().filter(|_| rng.gen_bool(p)))
}

fn attractor_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tangle_checks = 0;
    for seed in 0..1000u64 {
        let n = 3 + (seed as usize % 48);
        let h = if seed % 2 == 0 { 2 } else { n - 1 };
        let g = generate(&GenSpec::new(n, 1, h, 30_000 + seed)).unwrap();
        let full = SubgameMask::full(&g);
        // tangles learned by one search form a realistic store
        let (store, _, _) = search(&full, TangleStore::new(n), &SolverConfig::new(Variant::Tl))
            .map_err(|e| e.to_string())?;
        let sub = if seed % 3 == 0 {
            SubgameMask::full(&g)
        } else {
            SubgameMask::new(&g, random_subset(&mut rng, &VertexSet::full(n), 0.8))
        };
        if sub.is_empty() {
            continue;
        }
        let empty = TangleStore::new(n);
        for player in [Player::Even, Player::Odd] {
            let mut a = random_subset(&mut rng, sub.active(), 0.2);
            // seeding with a tangle's escapes makes the tangle clause fire
            let own: Vec<_> = store.iter().filter(|t| t.player == player).collect();
            if !own.is_empty() && rng.gen_bool(0.7) {
                let t = own[rng.gen_range(0..own.len())];
                for &e in t.escapes.iter().filter(|&&e| sub.contains(e)) {
                    a.insert(e);
                }
            }
            let mut b = random_subset(&mut rng, sub.active(), 0.2);
            b.union_with(&a);
            let plain = attr(&sub, player, &a);
            let again = attr(&sub, player, &plain.attracted);
            if again.attracted != plain.attracted {
                return Err(format!("attr not idempotent (seed {seed})"));
            }
            if !plain.attracted.is_subset(&attr(&sub, player, &b).attracted) {
                return Err(format!("attr not monotone (seed {seed})"));
            }
            let te = tattr(&sub, &empty, player, &a);
            if te.attracted != plain.attracted || te.strategy != plain.strategy {
                return Err(format!("tattr with no tangles differs from attr (seed {seed})"));
            }
            if !common::strategy_stays(&g, player, &plain, &a) {
                return Err(format!("attr strategy leaves the set (seed {seed})"));
            }
            let t = tattr(&sub, &store, player, &a);
            if tattr(&sub, &store, player, &t.attracted).attracted != t.attracted {
                return Err(format!("tattr not idempotent (seed {seed})"));
            }
            if !t.attracted.is_subset(&tattr(&sub, &store, player, &b).attracted) {
                return Err(format!("tattr not monotone (seed {seed})"));
            }
            if !common::strategy_stays(&g, player, &t, &a) {
                return Err(format!("tattr strategy leaves the set (seed {seed})"));
            }
            if common::naive_tattr(&sub, None, player, &a) != plain.attracted {
                return Err(format!("attr differs from the naive fixpoint (seed {seed})"));
            }
            if common::naive_tattr(&sub, Some(&store), player, &a) != t.attracted {
                return Err(format!("tattr differs from the naive fixpoint (seed {seed})"));
            }
            tangle_checks += t.attracted_tangles.len();
        }
    }
    Ok(format!("1000 games, {tangle_checks} tangle attractions checked"))
}

fn mutation_rejection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut kinds = [0usize; 3];
    for (name, g) in [("fig1", common::fig1()), ("fig4", common::fig4())] {
        let sol = solver::solve(&g, &SolverConfig::default())
            .map_err(|e| e.to_string())?
            .solution;
        let n = g.vertex_count();
        for i in 0..100 {
            let mut bad = sol.clone();
            let v = rng.gen_range(0..n);
            let w = sol.winner(v).unwrap();
            let kind = i % 3;
            match kind {
                // winner flip, strategy left as is
                0 => bad.set_winner(v, Some(w.opponent())),
                // winner flip with a strategy that fits the new winner
                1 => {
                    let s = (g.owner(v) == w.opponent())
                        .then(|| g.successors(v)[rng.gen_range(0..g.successors(v).len())]);
                    bad.set(v, w.opponent(), s);
                }
                // strategy retarget outside the winning region, or off the
                // edges when the region is everything
                _ => {
                    let owned: Vec<_> = g.vertices().filter(|&u| sol.strategy(u).is_some()).collect();
                    let u = owned[rng.gen_range(0..owned.len())];
                    let wu = sol.winner(u).unwrap();
                    let outside: Vec<_> = g.vertices().filter(|&x| sol.winner(x) != Some(wu)).collect();
                    let target = if outside.is_empty() {
                        let off: Vec<_> = g.vertices().filter(|&x| !g.has_edge(u, x)).collect();
                        off[rng.gen_range(0..off.len())]
                    } else {
                        outside[rng.gen_range(0..outside.len())]
                    };
                    bad.set_strategy(u, Some(target));
                }
            }
            if verify(&g, &bad).accepted {
                return Err(format!("{name}: mutation {i} (kind {kind}) accepted"));
            }
            kinds[kind] += 1;
        }
    }
    Ok(format!(
        "200 mutations rejected ({} flips, {} consistent flips, {} retargets)",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn scale_smoke() -> Outcome {
    let g = generate(&GenSpec::new(100_000, 1, 2, 2024)).unwrap();
    let mut parts = Vec::new();
    for variant in Variant::ALL {
        let start = Instant::now();
        let out = solver::solve(&g, &SolverConfig::new(variant)).map_err(|e| format!("{variant}: {e}"))?;
        let t = start.elapsed();
        if t >= Duration::from_secs(120) {
            return Err(format!("{variant} took {t:?}"));
        }
        if !verify(&g, &out.solution).accepted {
            return Err(format!("{variant}: verifier rejects"));
        }
        parts.push(format!("{variant} {:.2}s ({} tangles)", t.as_secs_f64(), out.stats.tangles_learned));
    }
    Ok(parts.join(", "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fixture correctness (fig. 1)", fixture_fig1),
        ("fixture narrative (fig. 4)", fixture_fig4),
        ("oracle equivalence", oracle_equivalence),
        ("two-priority games learn only dominions", two_priorities),
        ("tangle well-formedness", tangle_well_formedness),
        ("attractor laws", attractor_laws),
        ("mutation rejection", mutation_rejection),
        ("scale smoke", scale_smoke),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
