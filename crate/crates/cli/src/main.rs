use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spartite::exact::brute_force_n;
use spartite::io::{
    parse_allocation, parse_cover, parse_general_graph, parse_lp_record, parse_skeleton,
    write_general_graph,
};
use spartite::simulate::{
    run_experiment, scaling_sweep, write_pmf_csv, write_sidecar, write_sweep_csv, PRule, Pmf,
    SimConfig, SweepRow,
};
use spartite::verify::{verify_cycle_cover, verify_lp_solution, VerificationReport};
use spartite::{
    blow_up, build_cycle_cover, exact_solve, solve_lp, Error, ExactConfig, GeneralGraph,
    NodeAllocation, SkeletonGraph,
};

/// Vertex count above which `simulate` and `sweep` need `--allow-long`.
const LONG_RUN_VERTICES: u64 = 100;

/// Exit status when a verification check fails.
const VERIFY_FAILED: u8 = 1;

#[derive(Parser)]
#[command(
    name = "spartite",
    version,
    about = "Cycle covers of complete S-partite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print an optimal LP record: objective, y, c
    Solve {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a cycle cover of K_x and write it one cycle per line
    Cover {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a cover file or an LP record against the instance
    Verify {
        #[command(flatten)]
        instance: Instance,
        #[arg(
            long,
            conflicts_with = "solution",
            required_unless_present = "solution"
        )]
        cover: Option<PathBuf>,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// n(G) by subset enumeration (at most 20 vertices)
    Oracle {
        #[arg(long)]
        graph: PathBuf,
    },
    /// n(G) by branch-and-bound, optionally writing a witness edge list
    Exact {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = ExactConfig::default().node_budget)]
        budget: u64,
        /// Never fall back to the matching reduction; fail when the budget runs out
        #[arg(long)]
        search_only: bool,
    },
    /// Empirical distribution of n(G) over random subgraphs of K_x
    Simulate {
        #[command(flatten)]
        instance: Instance,
        #[command(flatten)]
        run: RunOptions,
    },
    /// p-hat-star over scaled allocations k*x
    Sweep {
        #[command(flatten)]
        instance: Instance,
        /// Scale factors, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1")]
        scales: Vec<u64>,
        #[command(flatten)]
        run: RunOptions,
    },
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    skeleton: PathBuf,
    #[arg(long)]
    alloc: PathBuf,
}

#[derive(Args)]
struct RunOptions {
    /// Edge probability: a number in [0, 1] or one of n^-0.5, n^-0.4,
    /// log(n)/n, 4log(n)/n, 6log(n)/n. Repeat or separate with commas.
    #[arg(long = "p", required = true, value_delimiter = ',')]
    p: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    allow_long: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output table; a `<out>.meta` sidecar is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
    /// Branch-and-bound node budget per sample
    #[arg(long, default_value_t = ExactConfig::default().node_budget)]
    budget: u64,
    /// Never fall back to the matching reduction; samples that exhaust the
    /// budget are dropped and counted as timeouts
    #[arg(long)]
    search_only: bool,
}

impl RunOptions {
    fn exact(&self) -> ExactConfig {
        ExactConfig {
            node_budget: self.budget,
            matching_fallback: !self.search_only,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Txt,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension { .. }
            | Error::InvalidGraph(_)
            | Error::Parse { .. }
            | Error::Io(_) => 2,
            Error::Precondition(_) | Error::TooLarge { .. } => 3,
            Error::Budget { .. } => 4,
            Error::Internal(_) => 5,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_instance(i: &Instance) -> Result<(SkeletonGraph, NodeAllocation), Error> {
    let s = parse_skeleton(&read(&i.skeleton)?)?;
    let x = parse_allocation(&read(&i.alloc)?)?;
    if x.len() != s.node_count() {
        return Err(Error::Dimension {
            what: "allocation",
            expected: s.node_count(),
            found: x.len(),
        });
    }
    Ok((s, x))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Space-aligned rendering of a CSV table.
fn csv_to_txt(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
            .collect();
        out.push_str(&cells.join("  "));
        out.push('\n');
    }
    out
}

fn parse_rules(p: &[String]) -> Result<Vec<PRule>, Error> {
    p.iter().map(|s| s.parse()).collect()
}

fn check_size(n: u64, allow_long: bool) -> Result<(), Failure> {
    if n > LONG_RUN_VERTICES && !allow_long {
        return Err(Failure {
            code: 4,
            message: format!(
                "instance has {n} vertices; runs above {LONG_RUN_VERTICES} need --allow-long"
            ),
        });
    }
    Ok(())
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

fn write_table(run: &RunOptions, csv: String, meta: Option<String>) -> Result<(), Error> {
    let table = match run.format {
        Format::Csv => csv,
        Format::Txt => csv_to_txt(&csv),
    };
    emit(run.out.as_deref(), &table)?;
    if let Some(meta) = meta {
        match &run.out {
            Some(out) => fs::write(sidecar_path(out), meta)?,
            None => eprint!("{meta}"),
        }
    }
    Ok(())
}

fn report_outcome(report: &VerificationReport) -> u8 {
    println!("{report}");
    if report.overall {
        0
    } else {
        VERIFY_FAILED
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { instance, out } => {
            let (s, x) = load_instance(&instance)?;
            let sol = solve_lp(&s, &x)?;
            emit(out.as_deref(), &sol.to_record())?;
        }
        Command::Cover { instance, out } => {
            let (s, x) = load_instance(&instance)?;
            let sol = solve_lp(&s, &x)?;
            let cover = build_cycle_cover(&s, &x, &sol)?;
            match out {
                Some(path) => {
                    fs::write(path, cover.to_text())?;
                    println!(
                        "covered {}, cycles {}",
                        cover.covered(),
                        cover.cycle_count()
                    );
                }
                None => {
                    eprintln!(
                        "covered {}, cycles {}",
                        cover.covered(),
                        cover.cycle_count()
                    );
                    print!("{}", cover.to_text());
                }
            }
        }
        Command::Verify {
            instance,
            cover,
            solution,
        } => {
            let (s, x) = load_instance(&instance)?;
            let report = match (cover, solution) {
                (Some(path), _) => {
                    let cover = parse_cover(&read(&path)?)?;
                    let expected = solve_lp(&s, &x)?.objective as usize;
                    verify_cycle_cover(&blow_up(&s, &x)?, &cover, expected)
                }
                (None, Some(path)) => {
                    let sol = parse_lp_record(&read(&path)?)?;
                    let mut report = verify_lp_solution(&s, &x, &sol, true);
                    if report.overall {
                        let best = solve_lp(&s, &x)?.objective;
                        if sol.objective != best {
                            report = VerificationReport {
                                overall: false,
                                ..report
                            };
                            eprintln!("objective {} is below the optimum {best}", sol.objective);
                        }
                    }
                    report
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            return Ok(report_outcome(&report));
        }
        Command::Oracle { graph } => {
            let g = parse_general_graph(&read(&graph)?)?;
            println!("{}", brute_force_n(&g)?);
        }
        Command::Exact {
            graph,
            out,
            budget,
            search_only,
        } => {
            let g = parse_general_graph(&read(&graph)?)?;
            let config = ExactConfig {
                node_budget: budget,
                matching_fallback: !search_only,
            };
            let sol = exact_solve(&g, &config)?;
            println!("{}", sol.order);
            if let Some(path) = out {
                let witness = GeneralGraph::new(g.vertex_count(), sol.edges)?;
                fs::write(path, write_general_graph(&witness))?;
            }
        }
        Command::Simulate { instance, run } => {
            let (s, x) = load_instance(&instance)?;
            check_size(x.total(), run.allow_long)?;
            let rules = parse_rules(&run.p)?;
            let exact = run.exact();
            let pool = thread_pool(run.threads)?;
            let runs: Vec<(String, Pmf)> = rules
                .iter()
                .map(|&rule| {
                    let mut cfg = SimConfig::new(s.clone(), x.clone(), rule, run.samples, run.seed);
                    cfg.exact = exact;
                    pool.install(|| run_experiment(&cfg))
                        .map(|pmf| (rule.label(), pmf))
                })
                .collect::<Result<_, _>>()?;
            let timeouts: usize = runs.iter().map(|(_, p)| p.timeouts).sum();
            if timeouts > 0 {
                eprintln!("warning: {timeouts} samples exceeded the node budget and were dropped");
            }
            let mut csv = Vec::new();
            write_pmf_csv(&mut csv, &runs)?;
            let mut meta = Vec::new();
            write_sidecar(&mut meta, run.seed, &runs)?;
            write_table(
                &run,
                String::from_utf8(csv).expect("utf-8"),
                Some(String::from_utf8(meta).expect("utf-8")),
            )?;
        }
        Command::Sweep {
            instance,
            scales,
            run,
        } => {
            let (s, x) = load_instance(&instance)?;
            let largest = scales.iter().max().copied().unwrap_or(0);
            check_size(largest * x.total(), run.allow_long)?;
            let rules = parse_rules(&run.p)?;
            let exact = run.exact();
            let pool = thread_pool(run.threads)?;
            let rows: Vec<SweepRow> = pool
                .install(|| scaling_sweep(&s, &x, &scales, &rules, run.samples, run.seed, exact))?;
            let timeouts: usize = rows.iter().map(|r| r.timeouts).sum();
            if timeouts > 0 {
                eprintln!("warning: {timeouts} samples exceeded the node budget and were dropped");
            }
            let mut csv = Vec::new();
            write_sweep_csv(&mut csv, &rows)?;
            write_table(&run, String::from_utf8(csv).expect("utf-8"), None)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
