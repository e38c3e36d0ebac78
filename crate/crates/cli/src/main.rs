//! `jss`: solve, benchmark, chart and validate job-shop instances.

mod bench;
mod document;
mod gantt;
mod run;

use std::io::Write as _;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jobshop::instance::{builtin_instance, parse_instance_lenient, validate_instance, Instance};

use document::ResultDocument;
use run::{load, parse_size, solve, Algo, Outcome, SolverArgs, Source};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "jss", version, about = "Job-shop scheduling solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and emit a result document.
    Solve(SolveArgs),
    /// Run several algorithms over several instances and tabulate time and cost.
    Bench(BenchArgs),
    /// Draw a schedule as a text chart and optionally an SVG file.
    Gantt(GanttArgs),
    /// Check an instance file for format and consistency errors.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Instance file.
    #[arg(conflicts_with_all = ["builtin", "gen"])]
    instance: Option<String>,
    /// Built-in instance (paper4x4, tiny2x2).
    #[arg(long, conflicts_with = "gen")]
    builtin: Option<String>,
    /// Random NxM instance generated from --seed.
    #[arg(long, value_parser = parse_size)]
    gen: Option<(usize, usize)>,
}

impl InstanceArgs {
    fn source(&self, seed: u64) -> Option<Source> {
        if let Some(path) = &self.instance {
            Some(Source::File(path.clone()))
        } else if let Some(name) = &self.builtin {
            Some(Source::Builtin(name.clone()))
        } else {
            self.gen.map(|(jobs, machines)| Source::Generated { jobs, machines, seed })
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Instance files.
    files: Vec<String>,
    /// Built-in instance; repeatable.
    #[arg(long)]
    builtin: Vec<String>,
    /// Random NxM instance generated from --seed; repeatable.
    #[arg(long, value_parser = parse_size)]
    gen: Vec<(usize, usize)>,
    /// Comma-separated algorithms (ga, ts, gta, exact).
    #[arg(long, default_value = "ga,ts,gta")]
    algos: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct GanttArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Result document to draw instead of solving.
    #[arg(long, conflicts_with = "algo")]
    result: Option<String>,
    /// Algorithm used when no --result is given.
    #[arg(long, value_enum, default_value = "gta")]
    algo: Algo,
    /// Also write an SVG chart to this path.
    #[arg(long)]
    svg: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Instance file.
    #[arg(conflicts_with = "builtin")]
    instance: Option<String>,
    #[arg(long)]
    builtin: Option<String>,
}

/// Error carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_FAILURE,
            error: e.into(),
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        error: anyhow::anyhow!("{msg}"),
    }
}

type CmdResult = std::result::Result<ExitCode, Failure>;

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {path}")),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn require_source(args: &InstanceArgs, seed: u64) -> std::result::Result<Source, Failure> {
    args.source(seed)
        .ok_or_else(|| fail(EXIT_USAGE, "an instance is required: give a file, --builtin NAME or --gen NxM"))
}

fn render_document(doc: &ResultDocument, format: Format) -> String {
    match format {
        Format::Json => doc.to_json() + "\n",
        Format::Text => {
            let mut out = format!(
                "instance {}\nalgo {}\nseed {}\nmakespan {}\n",
                doc.instance, doc.algo, doc.seed, doc.makespan
            );
            if let Some(t) = doc.wall_seconds {
                out.push_str(&format!("wall_seconds {t:.6}\n"));
            }
            out.push_str("job pos machine start end\n");
            for [j, p, m, s, e] in &doc.starts {
                out.push_str(&format!("{j} {p} {m} {s} {e}\n"));
            }
            let path: Vec<String> = doc
                .critical_path
                .iter()
                .map(|[j, p]| format!("J{}O{}", j + 1, p + 1))
                .collect();
            out.push_str(&format!("critical_path {}\n", path.join(" ")));
            out
        }
        Format::Csv => {
            let mut out = String::from("job,pos,machine,start,end\n");
            for [j, p, m, s, e] in &doc.starts {
                out.push_str(&format!("{j},{p},{m},{s},{e}\n"));
            }
            out
        }
    }
}

fn solve_document<'a>(inst: &'a Instance, algo: Algo, solver: &SolverArgs) -> std::result::Result<(ResultDocument, jobshop::schedule::Schedule<'a>), Failure> {
    let timed = solve(inst, algo, solver)?;
    match timed.outcome {
        Outcome::Solved(s) => {
            let wall = (!solver.serial).then_some(timed.wall_seconds);
            let doc = ResultDocument::new(&s, algo.name(), solver.seed, wall, solver.params(algo));
            Ok((doc, s))
        }
        Outcome::Unproven {
            incumbent,
            lower_bound,
            nodes,
        } => Err(fail(
            EXIT_BUDGET,
            format!(
                "node budget exhausted after {nodes} nodes without proving optimality (incumbent {incumbent}, lower bound {lower_bound}); raise --node-budget"
            ),
        )),
    }
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let source = require_source(&args.instance, args.solver.seed)?;
    let inst = load(&source)?;
    let (doc, _) = solve_document(&inst, args.algo, &args.solver)?;
    emit(args.out.as_deref(), &render_document(&doc, args.format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let mut algos = Vec::new();
    for name in args.algos.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let algo = Algo::parse(name)
            .ok_or_else(|| fail(EXIT_USAGE, format!("unknown algorithm {name:?} (expected ga, ts, gta or exact)")))?;
        if !algos.contains(&algo) {
            algos.push(algo);
        }
    }
    if algos.is_empty() {
        return Err(fail(EXIT_USAGE, "--algos must name at least one algorithm"));
    }
    let mut sources: Vec<Source> = args.files.iter().cloned().map(Source::File).collect();
    sources.extend(args.builtin.iter().cloned().map(Source::Builtin));
    sources.extend(args.gen.iter().map(|&(jobs, machines)| Source::Generated {
        jobs,
        machines,
        seed: args.solver.seed,
    }));
    if sources.is_empty() {
        return Err(fail(EXIT_USAGE, "no instances given: pass files, --builtin NAME or --gen NxM"));
    }

    let mut records = Vec::new();
    for source in &sources {
        match load(source) {
            Ok(inst) => {
                for &algo in &algos {
                    records.push(bench::run_one(&inst, algo, &args.solver));
                }
            }
            Err(e) => {
                let name = match source {
                    Source::File(p) => p.clone(),
                    Source::Builtin(n) => n.clone(),
                    Source::Generated { jobs, machines, seed } => format!("gen{jobs}x{machines}-s{seed}"),
                };
                for &algo in &algos {
                    records.push(bench::RunRecord {
                        instance: name.clone(),
                        size: "?".to_string(),
                        algo: algo.name().to_string(),
                        wall_seconds: None,
                        cost: None,
                        seed: args.solver.seed,
                        params: args.solver.params(algo),
                        error: Some(format!("{e:#}")),
                        measured_seconds: None,
                    });
                }
            }
        }
    }

    let text = match args.format {
        Format::Text => bench::render_table(&records, &algos),
        Format::Json => bench::render_json(&records) + "\n",
        Format::Csv => bench::render_csv(&records),
    };
    emit(None, &text)?;
    if records.iter().any(bench::RunRecord::succeeded) {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(fail(EXIT_FAILURE, "every run failed"))
    }
}

fn cmd_gantt(args: GanttArgs) -> CmdResult {
    let source = require_source(&args.instance, args.solver.seed)?;
    let inst = load(&source)?;
    let schedule = match &args.result {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
            let doc = ResultDocument::from_json(&text).with_context(|| format!("malformed result document {path}"))?;
            doc.to_schedule(&inst).with_context(|| format!("result document {path} does not describe a feasible schedule"))?
        }
        None => solve_document(&inst, args.algo, &args.solver)?.1,
    };
    emit(None, &gantt::render_text(&schedule))?;
    if let Some(path) = &args.svg {
        emit(Some(path), &gantt::render_svg(&schedule))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let inst = match (&args.instance, &args.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
            parse_instance_lenient(&text).with_context(|| path.to_string())?
        }
        (None, Some(name)) => builtin_instance(name)?,
        (None, None) => return Err(fail(EXIT_USAGE, "give an instance file or --builtin NAME")),
    };
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        println!("OK");
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("{v}");
    }
    Ok(ExitCode::from(EXIT_FAILURE))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gantt(a) => cmd_gantt(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
