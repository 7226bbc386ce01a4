//! `confl3`: generate instances, run the heuristic or the exact solver,
//! export LP files and tabulate gaps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use confl_core::heuristic::{self, HeuristicParams, RunStatus};
use confl_core::io::{self, GeneratorParams, ResultRow, SolutionDoc};
use confl_core::{build_3confl, strengthen, verify_solution, ConflModel, HeuristicError, Instance};
use confl_milp::{export_lp_text, Backend, BundledSolver, MipLimits, MipStatus};

#[derive(Parser, Debug)]
#[command(name = "confl3", version, about = "Fiber/copper/wireless connected facility location toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random testpoint-grid instance.
    Generate(GenerateArgs),
    /// Run the LP-guided fixing heuristic.
    Solve(SolveArgs),
    /// Solve the MILP with branch and bound, or hand it to an external solver.
    Exact(ExactArgs),
    /// Write the MILP in LP format.
    ExportLp(ExportArgs),
    /// Tabulate reference and heuristic gaps from solution files.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// JSON file with generator parameters; flags below override it.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    grid_width: Option<usize>,
    #[arg(long)]
    grid_height: Option<usize>,
    #[arg(long)]
    facilities: Option<usize>,
    #[arg(long)]
    offices: Option<usize>,
    #[arg(long)]
    steiner: Option<usize>,
    /// Probability that a pixel holds a user.
    #[arg(long)]
    density: Option<f64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight of the a-priori attractiveness.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Solutions built per outer iteration.
    #[arg(long, default_value_t = 5)]
    sigma: usize,
    /// Hamming radius of MIP-VLNS (default max(2, ceil(0.2 |F|))).
    #[arg(long)]
    vlns_radius: Option<usize>,
    /// Global time limit in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Time limit of the outer loop in seconds.
    #[arg(long, default_value_t = 3000.0)]
    outer_limit: f64,
    /// Time limit of each check-and-repair solve in seconds.
    #[arg(long, default_value_t = 60.0)]
    sub_limit: f64,
    /// Time limit of the final MIP-VLNS in seconds.
    #[arg(long, default_value_t = 600.0)]
    vlns_limit: f64,
    /// Test mode: run exactly N outer iterations with node-capped solves.
    #[arg(long)]
    iters: Option<usize>,
    /// Branch-and-bound node cap per solve in test mode.
    #[arg(long, default_value_t = 20_000)]
    node_limit: usize,
    /// Candidates kept per sampling step.
    #[arg(long, default_value_t = 10)]
    candidates: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    /// Bundled simplex and branch and bound.
    Bundled,
    /// Write an LP file for an external solver.
    ExternalLpFile,
}

#[derive(Args, Debug)]
struct ExactArgs {
    instance: PathBuf,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Add superinterferer and conflict rows.
    #[arg(long)]
    strong: bool,
    #[arg(long, value_enum, default_value_t = BackendKind::Bundled)]
    backend: BackendKind,
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Node cap instead of the time limit.
    #[arg(long)]
    node_limit: Option<usize>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[arg(long)]
    strong: bool,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Solution files; each instance needs one exact and one heuristic file.
    #[arg(required = true)]
    solutions: Vec<PathBuf>,
    #[arg(long)]
    csv: bool,
}

/// Failure with its exit code: 1 for no solution, 2 for bad input.
#[derive(Debug)]
enum Failure {
    NoSolution(String),
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONFL3_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Exact(a) => exact(a),
        Command::ExportLp(a) => export(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoSolution(m)) => {
            eprintln!("confl3: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("confl3: {m}");
            ExitCode::from(2)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(input(&format!("cannot write {}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(&format!("cannot read {}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    io::read_instance(&read_text(path)?).map_err(input(&path.display().to_string()))
}

fn seconds(name: &str, s: f64) -> Result<Duration, Failure> {
    if s.is_finite() && s > 0.0 {
        Ok(Duration::from_secs_f64(s))
    } else {
        Err(Failure::Input(format!("--{name} must be a positive number of seconds, got {s}")))
    }
}

fn generate(a: GenerateArgs) -> Outcome {
    let mut params = match &a.params {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(input(&p.display().to_string()))?,
        None => GeneratorParams::default(),
    };
    let overrides = [
        (a.grid_width, &mut params.grid_width),
        (a.grid_height, &mut params.grid_height),
        (a.facilities, &mut params.n_facilities),
        (a.offices, &mut params.n_central_offices),
        (a.steiner, &mut params.n_steiner),
    ];
    for (value, field) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    if let Some(d) = a.density {
        params.user_density = d;
    }
    let inst = io::generate(&params, a.seed).map_err(|e| Failure::Input(e.to_string()))?;
    log::info!(
        "generated {}: {} users, {} facilities, {} offices",
        inst.meta.name,
        inst.users.len(),
        inst.facilities.len(),
        inst.central_offices.len()
    );
    write_out(a.output.as_deref(), &io::write_instance(&inst))
}

fn solve(a: SolveArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let params = HeuristicParams {
        alpha: a.alpha,
        sigma: a.sigma,
        vlns_radius: a.vlns_radius,
        global_time_limit: seconds("time-limit", a.time_limit)?,
        outer_loop_limit: seconds("outer-limit", a.outer_limit)?,
        subproblem_time_limit: seconds("sub-limit", a.sub_limit)?,
        vlns_time_limit: seconds("vlns-limit", a.vlns_limit)?,
        seed: a.seed,
        candidate_pool: a.candidates,
        iterations: a.iters,
        node_limit: a.node_limit,
    };
    let result = match heuristic::run(&inst, &params) {
        Ok(r) => r,
        Err(HeuristicError::NoCompletableFos { technology }) => {
            return Err(Failure::NoSolution(format!(
                "coverage threshold W_{} ({}) exceeds the weight the facilities can reach",
                technology.number(),
                technology.key()
            )))
        }
        Err(e @ (HeuristicError::Params(_) | HeuristicError::Build(_))) => return Err(Failure::Input(e.to_string())),
        Err(e) => return Err(Failure::NoSolution(e.to_string())),
    };
    let plain = build_3confl(&inst).map_err(|e| Failure::Input(e.to_string()))?;
    let status = match result.status {
        RunStatus::Solved => "solved",
        RunStatus::NoSolution => "no_solution",
    };
    let mut doc = SolutionDoc::new("heuristic", &inst, status);
    doc.objective = result.objective;
    doc.lower_bound = result.lower_bound.is_finite().then_some(result.lower_bound);
    doc.gap = result.gap;
    if let Some(x) = &result.solution {
        doc.set_assignment(&plain, x);
    }
    doc.set_trace(&result.trace);
    write_out(a.output.as_deref(), &doc.to_json())?;

    let summary = match (result.objective, result.gap) {
        (Some(v), Some(g)) => format!(
            "{}: objective {v:.6}, lower bound {:.6}, gap {:.2}% after {} outer iterations",
            inst.meta.name,
            result.lower_bound,
            100.0 * g,
            result.outer_iterations
        ),
        _ => format!("{}: no feasible solution found", inst.meta.name),
    };
    if a.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    match result.status {
        RunStatus::Solved => Ok(()),
        RunStatus::NoSolution => Err(Failure::NoSolution("no feasible solution".into())),
    }
}

fn model_of(inst: &Instance, strong: bool) -> Result<ConflModel, Failure> {
    let plain = build_3confl(inst).map_err(|e| Failure::Input(e.to_string()))?;
    if strong {
        strengthen(&plain, inst).map_err(|e| Failure::Input(e.to_string()))
    } else {
        Ok(plain)
    }
}

fn exact(a: ExactArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let confl = model_of(&inst, a.strong)?;
    if a.backend == BackendKind::ExternalLpFile {
        write_out(a.output.as_deref(), &export_lp_text(&confl.model))?;
        eprintln!("LP file written; solve it with an external MILP solver");
        return Ok(());
    }
    let limits = match a.node_limit {
        Some(n) => MipLimits::nodes(n),
        None => MipLimits::time(seconds("time-limit", a.time_limit)?),
    };
    let r = BundledSolver::default()
        .solve_mip(&confl.model, &limits)
        .map_err(|e| Failure::NoSolution(e.to_string()))?;
    let status = match r.status {
        MipStatus::Optimal => "optimal",
        MipStatus::Feasible => "feasible",
        MipStatus::Infeasible => "infeasible",
        MipStatus::TimeoutNoIncumbent => "timeout",
    };
    let mut doc = SolutionDoc::new("exact", &inst, status);
    doc.lower_bound = r.lower_bound.is_finite().then_some(r.lower_bound);
    if let Some(x) = &r.incumbent {
        let check = verify_solution(&inst, &confl, x).map_err(|e| Failure::NoSolution(e.to_string()))?;
        if !check.feasible {
            return Err(Failure::NoSolution(format!("solver returned a solution with {} violations", check.violation_count())));
        }
        doc.objective = Some(r.objective);
        doc.gap = Some(r.relative_gap());
        doc.set_assignment(&confl, x);
    }
    write_out(a.output.as_deref(), &doc.to_json())?;
    let summary = match doc.objective {
        Some(v) => format!("{}: {status}, objective {v:.6}, bound {:.6}, {} nodes", inst.meta.name, r.lower_bound, r.nodes),
        None => format!("{}: {status} after {} nodes", inst.meta.name, r.nodes),
    };
    if a.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    if r.status.has_solution() {
        Ok(())
    } else {
        Err(Failure::NoSolution(format!("no solution ({status})")))
    }
}

fn export(a: ExportArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let confl = model_of(&inst, a.strong)?;
    write_out(a.output.as_deref(), &export_lp_text(&confl.model))
}

fn report(a: ReportArgs) -> Outcome {
    // instance hash -> (name, exact gap, heuristic gap)
    let mut by_instance: BTreeMap<String, (String, Option<f64>, Option<f64>)> = BTreeMap::new();
    let mut order = Vec::new();
    for path in &a.solutions {
        let doc = SolutionDoc::from_json(&read_text(path)?).map_err(input(&path.display().to_string()))?;
        let gap = doc
            .gap
            .ok_or_else(|| Failure::Input(format!("{}: solution has no gap", path.display())))?;
        let entry = by_instance.entry(doc.instance_hash.clone()).or_insert_with(|| {
            order.push(doc.instance_hash.clone());
            (doc.instance.clone(), None, None)
        });
        let slot = match doc.method.as_str() {
            "exact" => &mut entry.1,
            "heuristic" => &mut entry.2,
            m => return Err(Failure::Input(format!("{}: unknown method `{m}`", path.display()))),
        };
        if slot.replace(100.0 * gap).is_some() {
            return Err(Failure::Input(format!("{}: second {} solution for instance {}", path.display(), doc.method, doc.instance)));
        }
    }
    let mut rows = Vec::new();
    for hash in order {
        let (name, reference, heuristic) = &by_instance[&hash];
        let missing = |side| Failure::Input(confl_core::ReportError::MissingSide(name.clone(), side).to_string());
        rows.push(ResultRow::new(
            name.clone(),
            reference.ok_or_else(|| missing("exact"))?,
            heuristic.ok_or_else(|| missing("heuristic"))?,
        ));
    }
    let table = io::report(&rows, a.csv).map_err(|e| Failure::Input(e.to_string()))?;
    print!("{table}");
    Ok(())
}
