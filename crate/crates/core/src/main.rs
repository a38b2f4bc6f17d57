use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use tangle_core::bench::{self, BenchGame, BenchOptions, BenchSolver};
use tangle_core::oracle;
use tangle_core::solver::{self, SolveError, SolverConfig};
use tangle_core::{generate, parse_game, parse_solution, write_game, write_solution, GenSpec};

#[derive(Parser)]
#[command(name = "tangle", version, about = "Parity game solver based on tangle learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game in PGSolver format and print the solution.
    Solve(SolveArgs),
    /// Check a solution against a game.
    Verify {
        game: PathBuf,
        solution: PathBuf,
    },
    /// Generate a random game.
    Generate(GenerateArgs),
    /// Run solvers over a corpus and write CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// tl, atl, otftl, otfatl, or zlk (Zielonka).
    #[arg(long, default_value = "tl")]
    variant: String,
    #[arg(long)]
    skip_reduction: bool,
    /// Solve simple self-loops before the main loop.
    #[arg(long)]
    self_loops: bool,
    /// Print counters as key=value to stderr.
    #[arg(long)]
    stats: bool,
    /// Print counters as JSON to stderr.
    #[arg(long)]
    stats_json: bool,
    /// Print learned tangles to stderr.
    #[arg(long)]
    trace: bool,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Write the solution here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Game file; stdin when absent.
    input: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of vertices.
    #[arg(short = 'n', long)]
    vertices: usize,
    /// Largest priority; defaults to the vertex count.
    #[arg(long)]
    max_priority: Option<u32>,
    #[arg(long, default_value_t = 1)]
    min_outdeg: usize,
    #[arg(long, default_value_t = 2)]
    max_outdeg: usize,
    #[arg(long)]
    allow_self_loops: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .pg games.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Generated games as N,l,h,count (repeatable).
    #[arg(long = "gen")]
    gen: Vec<String>,
    /// Comma-separated solvers.
    #[arg(long, default_value = "tl,atl,otftl,otfatl")]
    variants: String,
    /// Seconds per run.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Base seed for generated games.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    skip_reduction: bool,
    #[arg(long)]
    self_loops: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: Option<&Path>) -> io::Result<String> {
    match path {
        Some(p) => fs::read_to_string(p),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let text = match read_input(args.input.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let game = match parse_game(&text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("parse error: {e}");
            return ExitCode::from(1);
        }
    };
    let solution = if args.variant == "zlk" {
        oracle::zielonka(&game)
    } else {
        let variant = match args.variant.parse() {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        };
        let config = SolverConfig {
            variant,
            skip_reduction: args.skip_reduction,
            self_loop_preprocess: args.self_loops,
            trace: args.trace,
            deadline: args.timeout.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            ..SolverConfig::default()
        };
        let out = match solver::solve(&game, &config) {
            Ok(out) => out,
            Err(e @ SolveError::InvalidGame(_)) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        for line in &out.trace {
            eprintln!("{line}");
        }
        if args.stats {
            eprintln!("{}", out.stats.to_line());
        }
        if args.stats_json {
            eprintln!("{}", serde_json::to_string(&out.stats).expect("stats serialize"));
        }
        out.solution
    };
    if let Err(e) = write_output(args.out.as_deref(), &write_solution(&game, &solution)) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(game: &Path, solution: &Path) -> ExitCode {
    let load = |p: &Path| fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let parsed = load(game).and_then(|g| {
        let s = load(solution)?;
        let game = parse_game(&g).map_err(|e| format!("game: {e}"))?;
        let sol = parse_solution(&s).map_err(|e| format!("solution: {e}"))?;
        Ok((game, sol))
    });
    let (game, sol) = match parsed {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if game.vertex_count() != sol.vertex_count() {
        eprintln!(
            "error: game has {} vertices, solution has {}",
            game.vertex_count(),
            sol.vertex_count()
        );
        return ExitCode::from(1);
    }
    let verdict = oracle::verify(&game, &sol);
    if verdict.accepted {
        println!("accepted");
        ExitCode::SUCCESS
    } else {
        println!("rejected: {} violation(s)", verdict.violations.len());
        for v in &verdict.violations {
            println!("{v}");
        }
        ExitCode::from(3)
    }
}

fn cmd_generate(args: GenerateArgs) -> ExitCode {
    let spec = GenSpec {
        max_priority: args.max_priority.unwrap_or(args.vertices as u32),
        self_loops: args.allow_self_loops,
        ..GenSpec::new(args.vertices, args.min_outdeg, args.max_outdeg, args.seed)
    };
    match generate(&spec) {
        Ok(g) => match write_output(args.out.as_deref(), &write_game(&g)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_corpus(dir: &Path, games: &mut Vec<BenchGame>) -> Result<(), String> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pg"))
        .collect();
    paths.sort();
    for p in paths {
        let text = fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
        let game = parse_game(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        games.push(BenchGame { id, game });
    }
    Ok(())
}

fn generated(spec: &str, base_seed: u64, games: &mut Vec<BenchGame>) -> Result<(), String> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("--gen {spec}: {e}"))?;
    let (n, l, h, count) = match parts[..] {
        [n, l, h] => (n, l, h, 1),
        [n, l, h, c] => (n, l, h, c),
        _ => return Err(format!("--gen {spec}: expected N,l,h[,count]")),
    };
    for i in 0..count {
        let seed = base_seed.wrapping_add(i as u64);
        let game = generate(&GenSpec::new(n, l, h, seed)).map_err(|e| format!("--gen {spec}: {e}"))?;
        games.push(BenchGame {
            id: format!("rand-{n}-{l}-{h}-{seed}"),
            game,
        });
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let mut games = Vec::new();
    let mut loaded = Ok(());
    if let Some(dir) = &args.corpus {
        loaded = load_corpus(dir, &mut games);
    }
    for spec in &args.gen {
        loaded = loaded.and_then(|_| generated(spec, args.seed, &mut games));
    }
    let solvers = args
        .variants
        .split(',')
        .map(|s| BenchSolver::parse(s.trim()))
        .collect::<Result<Vec<_>, _>>();
    let solvers = match (loaded, solvers) {
        (Ok(()), Ok(s)) => s,
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if games.is_empty() {
        eprintln!("error: no games; pass --corpus or --gen");
        return ExitCode::from(1);
    }
    let opts = BenchOptions {
        solvers,
        timeout: Duration::from_secs_f64(args.timeout),
        workers: args.workers,
        skip_reduction: args.skip_reduction,
        self_loops: args.self_loops,
    };
    let records = bench::run(&games, &opts);
    let result = match &args.out {
        Some(p) => fs::File::create(p)
            .map_err(csv::Error::from)
            .and_then(|f| bench::write_csv(io::BufWriter::new(f), &records)),
        None => bench::write_csv(io::stdout().lock(), &records),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { game, solution } => cmd_verify(&game, &solution),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench(args) => cmd_bench(args),
    }
}
