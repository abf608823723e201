use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use knn_realize::approx::{embed, Budget, EmbedOptions, EmbedStatus, Impossibility};
use knn_realize::gen::{gen_points, random_regular_digraph, Distribution};
use knn_realize::io::{emit_graph, emit_realization, parse_graph, parse_realization, NumberMode, RunReport};
use knn_realize::lambda::{lambda_acyclic_capped, LambdaOutcome, Pair, DEFAULT_MAX_VERTICES};
use knn_realize::line::{decide_1d, realize_1d, Outcome1d, RealizeError, Witness};
use knn_realize::oracle::{Provenance, Realization};
use knn_realize::{knn_graph, sigma_score, verify_realization, DirectedGraph};

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(
    name = "knn-realize",
    version,
    about = "Recognize and realize Euclidean kNN digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random point sets or k-regular digraphs
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build the kNN graph of a point file
    BuildKnn {
        points: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Decide whether a graph is a kNN graph on the line
    #[command(name = "decide-1d")]
    Decide1d {
        graph: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Compute exact line coordinates realizing a graph
    #[command(name = "realize-1d")]
    Realize1d {
        graph: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Search the pair-order graph for a cycle
    LambdaCheck {
        graph: PathBuf,
        /// Refuse graphs with more vertices than this
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Approximately embed a graph in R^d
    Embed {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.15)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest component kept after cutting [default: adaptive]
        #[arg(long)]
        size_cap: Option<usize>,
        /// Solver limits as `key=value` pairs separated by commas; keys are
        /// supergraphs, line, restarts and iterations
        #[arg(long)]
        budget: Option<String>,
        /// Where to write the realization; the report goes to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of edges preserved by a realization
    Score {
        graph: PathBuf,
        realization: PathBuf,
        #[command(flatten)]
        mode: Mode,
        #[command(flatten)]
        out: Out,
    },
    /// Check that a realization is exact
    Verify {
        graph: PathBuf,
        realization: PathBuf,
        #[command(flatten)]
        mode: Mode,
        #[command(flatten)]
        out: Out,
    },
    /// Time the line decision over doubling sizes and write CSV
    Bench {
        #[arg(long, default_value_t = 10)]
        min_exp: u32,
        #[arg(long, default_value_t = 17)]
        max_exp: u32,
        #[arg(short, long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append rows to this file instead of printing them
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random points, written as a realization file
    Points {
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// uniform-box, gaussian or line-distinct-gaps
        #[arg(long, default_value = "line-distinct-gaps")]
        dist: Distribution,
        #[command(flatten)]
        out: Out,
    },
    /// A uniformly random k-regular digraph
    Graph {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// The kNN graph of random points
    Knn {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "line-distinct-gaps")]
        dist: Distribution,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(multiple = false)]
struct Mode {
    /// Read coordinates as exact rationals (default)
    #[arg(long)]
    exact: bool,
    /// Read coordinates as f64 and compare with a relative margin
    #[arg(long)]
    float: bool,
}

impl Mode {
    fn number_mode(&self) -> NumberMode {
        if self.float {
            NumberMode::Float
        } else {
            NumberMode::Exact
        }
    }
}

/// A failure that ends the run with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<DirectedGraph, Failure> {
    parse_graph(&read(path)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn load_realization(path: &Path, mode: NumberMode) -> Result<Realization, Failure> {
    parse_realization(&read(path)?, mode).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn one_based(vs: &[usize]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn pairs(cycle: &[Pair]) -> String {
    cycle
        .iter()
        .map(|p| format!("{{{},{}}}", p.0 + 1, p.1 + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn witness(w: &Witness) -> String {
    match w {
        Witness::ClassOrder { component, error } => format!("component {} class order: {error}", component + 1),
        Witness::Window { vertex } => format!("no contiguous window for vertex {}", vertex + 1),
    }
}

/// Summary line on stderr, colored when stderr is a terminal and
/// `NO_COLOR` is unset.
fn status_line(ok: bool, text: &str) {
    let mut err = std::io::stderr();
    let styled = err.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let _ = if styled {
        let color = if ok { "32" } else { "31" };
        writeln!(err, "\x1b[1;{color}m{text}\x1b[0m")
    } else {
        writeln!(err, "{text}")
    };
}

fn parse_budget(spec: &str) -> Result<Budget, Failure> {
    let mut budget = Budget::default();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Failure::new(EXIT_USAGE, format!("bad --budget entry `{item}`"));
        let (key, value) = item.split_once('=').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "supergraphs" => budget.supergraphs = value,
            "line" => budget.line_attempts = value,
            "restarts" => budget.restarts = value,
            "iterations" => budget.iterations = value,
            _ => return Err(bad()),
        }
    }
    Ok(budget)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen(cmd) => run_gen(cmd),
        Command::BuildKnn { points, k, out } => {
            let r = load_realization(&points, NumberMode::Exact)?;
            let g = knn_graph(&r.points, k).map_err(|e| Failure::new(EXIT_NO, e.to_string()))?;
            write_out(out.out.as_deref(), &emit_graph(&g))?;
            Ok(EXIT_OK)
        }
        Command::Decide1d { graph, out } => {
            let g = load_graph(&graph)?;
            let decision = decide_1d(&g);
            let mut report = RunReport::new();
            report
                .set("n", g.n())
                .set("k", g.k())
                .set("components", decision.components.len());
            let code = match &decision.outcome {
                Outcome1d::Realizable { ordering, window_start } => {
                    report.set("status", "realizable");
                    report.set("ordering", one_based(ordering.as_slice()));
                    report.set("window_start", one_based(window_start));
                    EXIT_OK
                }
                Outcome1d::NotRealizable(w) => {
                    report.set("status", "not-realizable");
                    report.set("witness", witness(w));
                    EXIT_NO
                }
            };
            report.set("ops", decision.ops);
            write_out(out.out.as_deref(), &report.to_text())?;
            status_line(code == EXIT_OK, report.get("status").unwrap_or_default());
            Ok(code)
        }
        Command::Realize1d { graph, out } => {
            let g = load_graph(&graph)?;
            match realize_1d(&g) {
                Ok(r) => {
                    write_out(out.out.as_deref(), &emit_realization(&r.realization))?;
                    status_line(true, "realized");
                    Ok(EXIT_OK)
                }
                Err(RealizeError::NotRealizable(w)) => {
                    status_line(false, &format!("not-realizable: {}", witness(&w)));
                    Ok(EXIT_NO)
                }
                Err(e) => Err(Failure::new(EXIT_UNKNOWN, e.to_string())),
            }
        }
        Command::LambdaCheck {
            graph,
            max_vertices,
            out,
        } => {
            let g = load_graph(&graph)?;
            let mut report = RunReport::new();
            let code = match lambda_acyclic_capped(&g, max_vertices) {
                Ok(LambdaOutcome::Realizable(order)) => {
                    report.set("status", "acyclic").set("pairs", order.len());
                    EXIT_OK
                }
                Ok(LambdaOutcome::NotRealizable(cycle)) => {
                    report.set("status", "cycle").set("cycle", pairs(&cycle));
                    EXIT_NO
                }
                Err(e) => {
                    report.set("status", "unknown").set("reason", e);
                    EXIT_UNKNOWN
                }
            };
            write_out(out.out.as_deref(), &report.to_text())?;
            status_line(code == EXIT_OK, report.get("status").unwrap_or_default());
            Ok(code)
        }
        Command::Embed {
            graph,
            dim,
            eps,
            seed,
            size_cap,
            budget,
            out,
        } => {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Failure::new(EXIT_USAGE, "--eps must lie in (0, 1]"));
            }
            if dim == 0 {
                return Err(Failure::new(EXIT_USAGE, "--dim must be positive"));
            }
            let budget = budget.as_deref().map(parse_budget).transpose()?.unwrap_or_default();
            let g = load_graph(&graph)?;
            let options = EmbedOptions { size_cap, budget, seed };
            let start = Instant::now();
            let result = embed(&g, dim, eps, &options);
            let elapsed = start.elapsed();

            let mut report = RunReport::new();
            report
                .set("status", result.status.name())
                .set("seed", seed)
                .set("dim", dim)
                .set("eps", eps)
                .set(
                    "size_cap",
                    result
                        .cut
                        .as_ref()
                        .map_or("none".to_string(), |c| c.size_cap.to_string()),
                )
                .set(
                    "budget",
                    format!(
                        "supergraphs={},line={},restarts={},iterations={}",
                        budget.supergraphs, budget.line_attempts, budget.restarts, budget.iterations
                    ),
                );
            if let Some(score) = &result.score {
                report
                    .set("score", score.fraction)
                    .set("score_decimal", format!("{:.6}", score.as_f64()));
            }
            if let Some(cut) = &result.cut {
                let removed: Vec<String> = cut
                    .removed_edges
                    .iter()
                    .map(|(u, v)| format!("{}>{}", u + 1, v + 1))
                    .collect();
                report
                    .set("removed_fraction", cut.removed_fraction)
                    .set("removed_count", cut.removed_edges.len())
                    .set("removed_edges", removed.join(" "))
                    .set("components", cut.components.component_count());
            }
            let statuses: Vec<&str> = result.components.iter().map(|c| c.status.name()).collect();
            report.set("component_statuses", statuses.join(" "));
            if let Some(t) = &result.translation {
                report.set("translation", t);
            }
            if let EmbedStatus::CertifiedImpossible(why) = &result.status {
                match why {
                    Impossibility::Global { cycle } => {
                        report.set("certificate", format!("global cycle {}", pairs(cycle)))
                    }
                    Impossibility::Component {
                        component,
                        cycle,
                        supergraphs,
                    } => report.set(
                        "certificate",
                        format!(
                            "component {} over {supergraphs} completions, first cycle {}",
                            component + 1,
                            pairs(cycle)
                        ),
                    ),
                };
            }
            report.set("time_ms", elapsed.as_millis());
            if let (Some(r), Some(path)) = (&result.realization, &out) {
                write_out(Some(path), &emit_realization(r))?;
            }
            write_out(None, &report.to_text())?;
            let code = match result.status {
                EmbedStatus::Success => EXIT_OK,
                EmbedStatus::CertifiedImpossible(_) => EXIT_NO,
                EmbedStatus::ThresholdExceeded | EmbedStatus::Unknown => EXIT_UNKNOWN,
            };
            status_line(code == EXIT_OK, result.status.name());
            Ok(code)
        }
        Command::Score {
            graph,
            realization,
            mode,
            out,
        } => {
            let g = load_graph(&graph)?;
            let r = load_realization(&realization, mode.number_mode())?;
            let score = sigma_score(&g, &r).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            let mut report = RunReport::new();
            report
                .set("score", score.fraction)
                .set("score_decimal", format!("{:.6}", score.as_f64()))
                .set("preserved", score.preserved_edges)
                .set("total", score.total_edges);
            write_out(out.out.as_deref(), &report.to_text())?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            graph,
            realization,
            mode,
            out,
        } => {
            let g = load_graph(&graph)?;
            let r = load_realization(&realization, mode.number_mode())?;
            let ok = verify_realization(&g, &r).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))?;
            let mut report = RunReport::new();
            report.set("status", if ok { "verified" } else { "failed" });
            write_out(out.out.as_deref(), &report.to_text())?;
            status_line(ok, report.get("status").unwrap_or_default());
            Ok(if ok { EXIT_OK } else { EXIT_NO })
        }
        Command::Bench {
            min_exp,
            max_exp,
            k,
            seed,
            out,
        } => run_bench(min_exp, max_exp, k, seed, out.as_deref()),
    }
}

fn run_gen(cmd: GenCommand) -> Outcome {
    match cmd {
        GenCommand::Points {
            n,
            dim,
            seed,
            dist,
            out,
        } => {
            if dim == 0 {
                return Err(Failure::new(EXIT_USAGE, "--dim must be positive"));
            }
            let points = gen_points(n, dim, seed, dist);
            let r = Realization::identity(points, Provenance::UserSupplied);
            write_out(out.out.as_deref(), &emit_realization(&r))?;
        }
        GenCommand::Graph { n, k, seed, out } => {
            if n < k + 1 {
                return Err(Failure::new(EXIT_USAGE, "need n > k"));
            }
            write_out(out.out.as_deref(), &emit_graph(&random_regular_digraph(n, k, seed)))?;
        }
        GenCommand::Knn {
            n,
            k,
            dim,
            seed,
            dist,
            out,
        } => {
            if dim == 0 || n < k + 1 {
                return Err(Failure::new(EXIT_USAGE, "need --dim > 0 and n > k"));
            }
            let g = knn_graph(&gen_points(n, dim, seed, dist), k).map_err(|e| Failure::new(EXIT_NO, e.to_string()))?;
            write_out(out.out.as_deref(), &emit_graph(&g))?;
        }
    }
    Ok(EXIT_OK)
}

const BENCH_HEADER: &str = "operation,n,k,ops,wall_ns";

fn run_bench(min_exp: u32, max_exp: u32, k: usize, seed: u64, out: Option<&Path>) -> Outcome {
    if min_exp > max_exp || max_exp > 24 || (1usize << min_exp) < k + 1 {
        return Err(Failure::new(
            EXIT_USAGE,
            "need 2^min_exp > k and min_exp <= max_exp <= 24",
        ));
    }
    let mut rows = String::new();
    for e in min_exp..=max_exp {
        let n = 1usize << e;
        let g = knn_graph(&gen_points(n, 1, seed, Distribution::LineDistinctGaps), k)
            .map_err(|err| Failure::new(EXIT_UNKNOWN, err.to_string()))?;
        let start = Instant::now();
        let decision = decide_1d(&g);
        let wall = start.elapsed().as_nanos();
        if !decision.is_realizable() {
            return Err(Failure::new(
                EXIT_UNKNOWN,
                format!("line kNN graph with n={n} rejected"),
            ));
        }
        rows.push_str(&format!("decide-1d,{n},{k},{},{wall}\n", decision.ops));
    }
    match out {
        Some(path) => {
            let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
            let text = if fresh { format!("{BENCH_HEADER}\n{rows}") } else { rows };
            file.write_all(text.as_bytes())
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        }
        None => print!("{BENCH_HEADER}\n{rows}"),
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
