use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::RangedU64ValueParser;
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use reach_orient::dismember::DismemberError;
use reach_orient::graph::{score_oriented, MixedGraph, WeightFn};
use reach_orient::instances::{
    format_orientation, gen_random, gen_replacement_lb, gen_sat_gadget, parse_instance,
    parse_orientation, parse_sat, serialize_instance, Filters,
};
use reach_orient::replacement::{Eps, ReplacementError};
use reach_orient::solvers::{
    brute_force, solve_approx_weighted, solve_exact_weighted, Mode, SolveError, SolveOptions,
    SolveResult, DEFAULT_BRUTE_CAP,
};

/// Orient the undirected edges of a mixed graph to maximize the number of
/// ordered vertex pairs (u, v) with v reachable from u.
#[derive(Parser, Debug)]
#[command(name = "reach-orient", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a good orientation (exact by default).
    Solve(SolveArgs),
    /// Score a given orientation.
    Score(ScoreArgs),
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Orientation file; printed to stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["approx", "brute"])]
    exact: bool,
    /// Accept any orientation within a factor (1 - EPS) of optimal.
    #[arg(long, value_name = "EPS", value_parser = parse_eps, conflicts_with = "brute")]
    approx: Option<Eps>,
    /// Try every orientation.
    #[arg(long)]
    brute: bool,
    #[arg(long, default_value_t = DEFAULT_BRUTE_CAP, value_parser = RangedU64ValueParser::<usize>::new().range(1..63))]
    max_brute_edges: usize,
    /// Largest dismembering set whose partial orientations are enumerated.
    #[arg(long, default_value_t = SolveOptions::default().max_dismember, value_parser = RangedU64ValueParser::<usize>::new().range(1..63))]
    max_dismember: usize,
    #[arg(long)]
    parallel: bool,
    /// Print solver statistics.
    #[arg(short = 'v', long = "verbose")]
    verbose: bool,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Orientation file as written by `solve`.
    #[arg(long)]
    orientation: PathBuf,
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Weighted instance encoding a Max-2-SAT formula.
    Sat {
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Instance whose replacement sets need q + 1 members.
    Lb {
        #[arg(long, value_parser = RangedU64ValueParser::<usize>::new().range(1..=4))]
        q: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Random mixed graph.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0.1)]
        arc_prob: f64,
        /// Weights are uniform in 1..=MAX; 1 gives an unweighted instance.
        #[arg(long, default_value_t = 1)]
        weight_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        acyclic: bool,
        #[arg(long)]
        dismembered: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

/// Failure with its exit code: 2 for bad input, 3 for caps and unsupported
/// instances, 1 for anything else.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Failure { code: 2, msg: msg.to_string() }
    }

    fn internal(msg: impl ToString) -> Self {
        Failure { code: 1, msg: msg.to_string() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Graph(_) | SolveError::NonPositiveEps => 2,
            SolveError::BruteCap { .. }
            | SolveError::Dismember(DismemberError::CapExceeded { .. })
            | SolveError::Replacement(ReplacementError::TooMany { .. }) => 3,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

/// Decimal (`0.1`) or fraction (`1/10`) strictly between 0 and 1.
fn parse_eps(s: &str) -> Result<Eps, String> {
    let eps = if let Some((a, b)) = s.split_once('/') {
        let (a, b): (u128, u128) = (a.trim().parse().map_err(|_| "bad numerator")?, b.trim().parse().map_err(|_| "bad denominator")?);
        if b == 0 {
            return Err("zero denominator".into());
        }
        Ratio::new(a, b)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad number '{s}'"));
        }
        let int: u128 = if int.is_empty() { 0 } else { int.parse().map_err(|_| format!("bad number '{s}'"))? };
        let den = 10u128.pow(frac.len() as u32);
        let frac: u128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| format!("bad number '{s}'"))? };
        Ratio::new(int * den + frac, den)
    };
    if eps == Ratio::from_integer(0) || eps >= Ratio::from_integer(1) {
        return Err("epsilon must lie strictly between 0 and 1".into());
    }
    Ok(eps)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(MixedGraph, WeightFn), Failure> {
    let text = read(path)?;
    parse_instance(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Write through a temporary file in the target directory so a failed run
/// never leaves a partial file behind.
fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    let Some(path) = output else {
        print!("{text}");
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::internal(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn mode_name(mode: Mode) -> String {
    match mode {
        Mode::Exact => "exact".into(),
        Mode::Approx(eps) => format!("approx {eps}"),
        Mode::Brute => "brute".into(),
        Mode::LowerBound => "lower-bound".into(),
    }
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let (g, w) = load(&args.input)?;
    let opts = SolveOptions { max_dismember: args.max_dismember, parallel: args.parallel, ..Default::default() };
    let res: SolveResult = if args.brute {
        brute_force(&g, &w, args.max_brute_edges)?
    } else if let Some(eps) = args.approx {
        solve_approx_weighted(&g, &w, eps, &opts)?
    } else {
        solve_exact_weighted(&g, &w, &opts)?
    };
    let check = score_oriented(&g, &res.orientation, &w);
    if check != res.value {
        return Err(Failure::internal(format!("reported value {} but orientation scores {check}", res.value)));
    }
    println!("c mode {}", mode_name(res.mode));
    if args.verbose {
        let s = &res.stats;
        println!("c contractions {}", s.contractions);
        println!("c pieces {}", s.pieces);
        println!("c dismembering-size {}", s.dismembering_size);
        println!("c members {}", s.members);
        println!("c max-components {}", s.max_components);
        println!("c max-replacement-set {}", s.max_replacement_set);
        println!("c assignments {}", s.assignments);
        println!("c leaves {}", s.leaves);
        println!("c pruned {}", s.pruned);
        println!("c elapsed-ms {}", s.elapsed.as_millis());
    }
    let text = format_orientation(&g, &res.orientation, res.value);
    if args.output.is_some() {
        println!("s {}", res.value);
    }
    emit(args.output.as_deref(), &text)
}

fn score(args: &ScoreArgs) -> Result<(), Failure> {
    let (g, w) = load(&args.input)?;
    let text = read(&args.orientation)?;
    let (recorded, o) = parse_orientation(&text, &g)
        .map_err(|e| Failure::input(format!("{}: {e}", args.orientation.display())))?;
    let value = score_oriented(&g, &o, &w);
    println!("s {value}");
    match recorded {
        Some(r) if r != value => Err(Failure::input(format!("file records value {r}, orientation scores {value}"))),
        _ => Ok(()),
    }
}

fn generate(kind: &GenKind) -> Result<(), Failure> {
    let (g, w, output) = match kind {
        GenKind::Sat { input, output } => {
            let sat = parse_sat(&read(input)?).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
            let gadget = gen_sat_gadget(&sat);
            (gadget.instance.graph, gadget.instance.w, output)
        }
        GenKind::Lb { q, output } => {
            let family = gen_replacement_lb(*q).map_err(Failure::input)?;
            (family.instance.graph, family.instance.w, output)
        }
        GenKind::Random { n, edge_prob, arc_prob, weight_max, seed, connected, acyclic, dismembered, output } => {
            let filters = Filters { connected: *connected, acyclic: *acyclic, dismembered: *dismembered };
            let (g, w) = gen_random(*n, *edge_prob, *arc_prob, *weight_max, *seed, filters).map_err(Failure::input)?;
            (g, w, output)
        }
    };
    let text = serialize_instance(&g, &w);
    match parse_instance(&text) {
        Ok(back) if back == (g, w) => emit(output.as_deref(), &text),
        _ => Err(Failure::internal("generated instance does not reparse")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Score(args) => score(args),
        Command::Gen { kind } => generate(kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
