//! `ivdl`: build, run and inspect interval-valued computation sequences.
//!
//! Exit codes: 0 ok, 2 usage or parse error, 3 no solution or empty result,
//! 4 component limit exceeded.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ivdl_core::dlog::{self, BuildOptions, DlogError, DlogInstance, LabelMap, Outcome};
use ivdl_core::interval::{IntervalValue, DEFAULT_COMPONENT_LIMIT};
use ivdl_core::oracle::brute_dlog;
use ivdl_core::program::{parse_program, ComputationSequence, EvalError, Evaluator, Limits};
use num_bigint::BigUint;
use serde::Serialize;

use render::Row;

#[derive(Parser)]
#[command(name = "ivdl", version, about = "Interval-valued computation sequences for discrete logarithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct BuildFlags {
    /// Skip gates whose operands are all global constants.
    #[arg(long)]
    fold: bool,
    /// Compute power rows on the host instead of in-circuit.
    #[arg(long)]
    host_rows: bool,
}

impl From<BuildFlags> for BuildOptions {
    fn from(f: BuildFlags) -> Self {
        BuildOptions { fold_constant_gates: f.fold, host_power_rows: f.host_rows }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build and evaluate the sequence for a^x = b (mod p).
    Solve {
        a: BigUint,
        b: BigUint,
        p: BigUint,
        /// Write the sequence to PATH (labels go to PATH.labels).
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
        /// Print every instruction with its value and labels.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
        /// Component cap per value.
        #[arg(long, default_value_t = DEFAULT_COMPONENT_LIMIT)]
        limit: usize,
        #[command(flatten)]
        flags: BuildFlags,
    },
    /// Emit the sequence for a^x = b (mod p) without running it.
    Build {
        a: BigUint,
        b: BigUint,
        p: BigUint,
        /// Output file; stdout when absent.
        #[arg(short, long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Label sidecar file.
        #[arg(long, value_name = "PATH")]
        labels: Option<PathBuf>,
        #[command(flatten)]
        flags: BuildFlags,
    },
    /// Evaluate a sequence file and print its output tape.
    Run {
        path: PathBuf,
        /// Print each index with its value.
        #[arg(long)]
        dump_values: bool,
        /// Render every value to PATH (.svg for SVG, otherwise text).
        #[arg(long, value_name = "PATH")]
        render: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_COMPONENT_LIMIT)]
        limit: usize,
    },
    /// List every x in [0, 2^n) with a^x = b (mod p) by enumeration.
    Oracle {
        a: BigUint,
        b: BigUint,
        p: BigUint,
        /// Exponent width; defaults to max(3, bits(p)).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print length, operation counts, bit height and component counts.
    Stats {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COMPONENT_LIMIT)]
        limit: usize,
    },
    /// Draw values of a sequence, or inline values, as strips or SVG bars.
    Render {
        /// Sequence file to evaluate.
        #[arg(required_unless_present = "value")]
        path: Option<PathBuf>,
        /// Inline value such as "[0,1/2^2) [1/2^1,3/2^2)"; repeatable.
        #[arg(long, conflicts_with = "path")]
        value: Vec<String>,
        /// Indices to draw, e.g. "3", "5-9" or "1,4-6".
        #[arg(long)]
        indices: Option<String>,
        /// Only draw indices that carry a label.
        #[arg(long)]
        labeled: bool,
        #[arg(long, value_enum, default_value_t = Format::Txt)]
        format: Format,
        /// Cells per strip as a power of two.
        #[arg(long)]
        grid: Option<u64>,
        /// Label sidecar; defaults to PATH.labels when present.
        #[arg(long, value_name = "PATH")]
        labels: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Txt,
    Svg,
}

enum Failure {
    Usage(String),
    Empty,
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Empty => 3,
            Failure::Resource(_) => 4,
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Resource { .. } => Failure::Resource(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<DlogError> for Failure {
    fn from(e: DlogError) -> Self {
        match e {
            DlogError::Eval(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) | Failure::Resource(msg) => eprintln!("error: {msg}"),
                Failure::Empty => {}
            }
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Solve { a, b, p, emit, trace, json, limit, flags } => {
            cmd_solve(a, b, p, emit.as_deref(), trace, json, Limits { max_components: limit }, flags.into())
        }
        Command::Build { a, b, p, out, labels, flags } => {
            cmd_build(a, b, p, out.as_deref(), labels.as_deref(), flags.into())
        }
        Command::Run { path, dump_values, render, limit } => {
            cmd_run(&path, dump_values, render.as_deref(), Limits { max_components: limit })
        }
        Command::Oracle { a, b, p, n } => cmd_oracle(a, b, p, n),
        Command::Stats { path, limit } => cmd_stats(&path, Limits { max_components: limit }),
        Command::Render { path, value, indices, labeled, format, grid, labels, out } => {
            let input = match path {
                Some(p) => RenderInput::Program(p),
                None => RenderInput::Values(value),
            };
            cmd_render(input, indices.as_deref(), labeled, format, grid, labels.as_deref(), out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct SolveReport {
    schema: u32,
    a: String,
    b: String,
    p: String,
    n: usize,
    x: Option<u64>,
    output: String,
    verified: bool,
    length: usize,
    bit_height: u64,
    max_components: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    a: BigUint,
    b: BigUint,
    p: BigUint,
    emit: Option<&Path>,
    trace: bool,
    json: bool,
    limits: Limits,
    opts: BuildOptions,
) -> CmdResult {
    let inst = DlogInstance::new(a, b, p)?;
    let (solution, values) = if trace {
        let (s, r) = dlog::run_traced(&inst, opts, limits)?;
        (s, Some(r))
    } else {
        (dlog::run(&inst, opts, limits)?, None)
    };
    if let Some(path) = emit {
        write_program(&solution.plan.sequence, &solution.plan.labels, path)?;
    }
    if let Some(r) = &values {
        let labels = &solution.plan.labels;
        for (pos, ins) in solution.plan.sequence.instructions().iter().enumerate() {
            let index = pos + 1;
            let names: Vec<String> = labels.names_for(index).iter().map(ToString::to_string).collect();
            println!("{index}\t{ins}\t{}\t{}", r.value(index), names.join(" "));
        }
    }
    let outcome = solution.outcome();
    let m = &solution.metrics;
    if json {
        let report = SolveReport {
            schema: 1,
            a: inst.a().to_string(),
            b: inst.b().to_string(),
            p: inst.p().to_string(),
            n: inst.n(),
            x: match outcome {
                Outcome::Solved(x) => Some(x),
                Outcome::NoSolution => None,
            },
            output: solution.output_string(),
            verified: solution.verified,
            length: m.length,
            bit_height: m.max_bit_height,
            max_components: m.max_components,
        };
        println!("{}", serde_json::to_string(&report).expect("plain struct"));
    } else {
        match outcome {
            Outcome::Solved(x) => println!("x={x} output={} verified={}", solution.output_string(), solution.verified),
            Outcome::NoSolution => println!("no solution (output={} verified=false)", solution.output_string()),
        }
        println!(
            "n={} length={} bit_height={} max_components={}",
            inst.n(),
            m.length,
            m.max_bit_height,
            m.max_components
        );
    }
    match outcome {
        Outcome::Solved(_) => Ok(()),
        Outcome::NoSolution => Err(Failure::Empty),
    }
}

fn write_program(seq: &ComputationSequence, labels: &LabelMap, path: &Path) -> CmdResult {
    write_file(path, &seq.serialize())?;
    write_file(&sidecar(path), &labels.to_text())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".labels");
    PathBuf::from(s)
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_build(
    a: BigUint,
    b: BigUint,
    p: BigUint,
    out: Option<&Path>,
    labels: Option<&Path>,
    opts: BuildOptions,
) -> CmdResult {
    let inst = DlogInstance::new(a, b, p)?;
    let plan = dlog::build_with(&inst, opts)?;
    match out {
        Some(path) => write_file(path, &plan.sequence.serialize())?,
        None => print!("{}", plan.sequence.serialize()),
    }
    if let Some(path) = labels {
        write_file(path, &plan.labels.to_text())?;
    }
    eprintln!("n={} length={}", inst.n(), plan.sequence.len());
    Ok(())
}

fn load_program(path: &Path) -> Result<ComputationSequence, Failure> {
    let text = read_file(path)?;
    parse_program(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_run(path: &Path, dump: bool, render_to: Option<&Path>, limits: Limits) -> CmdResult {
    let seq = load_program(path)?;
    let result = Evaluator::new(limits).evaluate(&seq)?;
    if dump {
        for (pos, v) in result.values.iter().enumerate() {
            println!("{} {v}", pos + 1);
        }
    }
    println!("{}", result.output_string());
    if let Some(target) = render_to {
        let labels = load_labels(None, Some(path))?;
        let rows =
            render::rows_from(result.values.iter().cloned().enumerate().map(|(i, v)| (i + 1, v)), labels.as_ref());
        let format = if target.extension().is_some_and(|e| e == "svg") { Format::Svg } else { Format::Txt };
        write_file(target, &draw(&rows, format, None)?)?;
    }
    Ok(())
}

fn cmd_oracle(a: BigUint, b: BigUint, p: BigUint, n: Option<usize>) -> CmdResult {
    let n = n.unwrap_or_else(|| (p.bits() as usize).max(3));
    if n > dlog::MAX_WIDTH {
        return Err(Failure::Usage(format!("width {n} is above {}", dlog::MAX_WIDTH)));
    }
    let xs = brute_dlog(&a, &b, &p, n)?;
    let line: Vec<String> = xs.iter().map(u64::to_string).collect();
    println!("{}", line.join(" "));
    if xs.is_empty() {
        Err(Failure::Empty)
    } else {
        Ok(())
    }
}

fn cmd_stats(path: &Path, limits: Limits) -> CmdResult {
    let seq = load_program(path)?;
    let (_, m) = Evaluator::new(limits).stream(&seq, |_, _| {})?;
    println!("length {}", m.length);
    println!("bit_height {}", m.max_bit_height);
    println!("max_components {}", m.max_components);
    println!("output_len {}", m.output_len);
    for (op, count) in &m.op_counts {
        println!("op {op} {count}");
    }
    Ok(())
}

enum RenderInput {
    Program(PathBuf),
    Values(Vec<String>),
}

fn load_labels(explicit: Option<&Path>, program: Option<&Path>) -> Result<Option<LabelMap>, Failure> {
    let path = match (explicit, program) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(prog)) if sidecar(prog).exists() => sidecar(prog),
        _ => return Ok(None),
    };
    let text = read_file(&path)?;
    LabelMap::parse(&text).map(Some).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Parses "3", "5-9" and comma lists of those, all 1-based and inclusive.
fn parse_indices(spec: &str, len: usize) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("bad index range `{spec}` for {len} values"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        let (lo, hi): (usize, usize) = match part.split_once('-') {
            Some((lo, hi)) => (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?),
            None => {
                let i = part.parse().map_err(|_| bad())?;
                (i, i)
            }
        };
        if lo == 0 || lo > hi || hi > len {
            return Err(bad());
        }
        out.extend(lo..=hi);
    }
    Ok(out)
}

fn draw(rows: &[Row], format: Format, grid: Option<u64>) -> Result<String, Failure> {
    match format {
        Format::Txt => {
            let finest = rows.iter().map(|r| render::grid_for(&r.value, grid)).max().unwrap_or(0);
            if finest > render::MAX_TEXT_GRID {
                return Err(Failure::Usage(format!(
                    "grid 2^{finest} is too fine for text; pass --grid up to {}",
                    render::MAX_TEXT_GRID
                )));
            }
            Ok(render::render_text(rows, grid))
        }
        Format::Svg => Ok(render::render_svg(rows, grid)),
    }
}

fn cmd_render(
    input: RenderInput,
    indices: Option<&str>,
    labeled: bool,
    format: Format,
    grid: Option<u64>,
    labels: Option<&Path>,
    out: Option<&Path>,
) -> CmdResult {
    let rows = match input {
        RenderInput::Values(texts) => {
            let values = texts
                .iter()
                .map(|t| t.parse::<IntervalValue>().map_err(|e| Failure::Usage(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let picked = match indices {
                Some(spec) => parse_indices(spec, values.len())?,
                None => (1..=values.len()).collect(),
            };
            picked.into_iter().map(|i| Row { index: None, value: values[i - 1].clone(), labels: Vec::new() }).collect()
        }
        RenderInput::Program(path) => {
            let seq = load_program(&path)?;
            let labels = load_labels(labels, Some(&path))?;
            let mut picked = match indices {
                Some(spec) => parse_indices(spec, seq.len())?,
                None => (1..=seq.len()).collect(),
            };
            if labeled {
                let map = labels.as_ref().ok_or_else(|| Failure::Usage("--labeled needs a label sidecar".into()))?;
                picked.retain(|&i| !map.names_for(i).is_empty());
            }
            let mut wanted = vec![false; seq.len() + 1];
            picked.iter().for_each(|&i| wanted[i] = true);
            let mut kept = Vec::new();
            Evaluator::default().stream(&seq, |i, v| {
                if wanted[i] {
                    kept.push((i, v.clone()));
                }
            })?;
            kept.sort_by_key(|&(i, _)| picked.iter().position(|&p| p == i));
            render::rows_from(kept, labels.as_ref())
        }
    };
    let text = draw(&rows, format, grid)?;
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
