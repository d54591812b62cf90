//! Command-line planner: task files in, plans, policies, validation reports
//! and execution traces out.
//!
//! Exit codes: 0 success / solution found, 1 proven no solution (or invalid
//! policy / failed check), 2 budget exhausted, 3 input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use delplan_core::bench::{
    self, apartment, letter, mailcheck, mailtell, watts_strogatz, NeighborhoodGraph, WsParams,
};
use delplan_core::policy::{
    execute, find_ic_policy, parse_policy, resolve_policy, serialize_policy, validate_policy,
    SuccessorKind, TraceOutcome,
};
use delplan_core::seqplan::{search_plan, verify_plan, Plan, SearchOutcome};
use delplan_core::taskfile::{parse_task, serialize_task, task_hash};
use delplan_core::{Error, PlanMode, PlanningTask};

#[derive(Parser)]
#[command(name = "delplan", version, about = "Cooperative epistemic planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Standard,
    Ic,
}

impl From<ModeArg> for PlanMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Standard => PlanMode::Standard,
            ModeArg::Ic => PlanMode::ImplicitlyCoordinated,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuccessorArg {
    Cen,
    Ps,
}

impl From<SuccessorArg> for SuccessorKind {
    fn from(s: SuccessorArg) -> Self {
        match s {
            SuccessorArg::Cen => SuccessorKind::Centralized,
            SuccessorArg::Ps => SuccessorKind::PerspectiveSensitive,
        }
    }
}

#[derive(Args)]
struct TaskArgs {
    /// Task file to load.
    #[arg(long)]
    task: PathBuf,
    /// Shift the initial state to this agent's perspective before anything
    /// else (the agent's associated task).
    #[arg(long)]
    perspective: Option<String>,
}

impl TaskArgs {
    fn load(&self) -> Result<(PlanningTask, String), Error> {
        let text = fs::read_to_string(&self.task)
            .map_err(|e| Error::InvalidParams(format!("{}: {e}", self.task.display())))?;
        let mut task = parse_task(&text)?;
        if let Some(agent) = &self.perspective {
            let id = task.sig().agent_id(agent)?;
            task = task.perspective(id);
        }
        Ok((task, task_hash(&text)))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search for a shortest sequential plan.
    Plan {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Ic)]
        mode: ModeArg,
        /// Search horizon in actions.
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
    },
    /// Verify a given action sequence.
    Check {
        #[command(flatten)]
        task: TaskArgs,
        /// Comma-separated action names.
        #[arg(long)]
        plan: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Ic)]
        mode: ModeArg,
    },
    /// Synthesize an implicitly coordinated policy.
    Policy {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
        /// Write the policy here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a policy file against a task.
    ValidatePolicy {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, value_enum, default_value_t = SuccessorArg::Ps)]
        successor: SuccessorArg,
    },
    /// Execute a policy with a seeded chooser and print the trace.
    Exec {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a benchmark task file.
    Gen {
        #[command(subcommand)]
        scenario: GenCommand,
    },
    /// Run seeded benchmark trials; one row per trial on stdout.
    Bench {
        #[command(subcommand)]
        scenario: BenchCommand,
    },
}

#[derive(Args)]
struct WsArgs {
    /// Number of agents (nodes).
    #[arg(long)]
    agents: usize,
    /// Mean degree of the Watts-Strogatz lattice (even).
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Rewiring probability.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WsArgs {
    fn params(&self) -> WsParams {
        WsParams { n: self.agents, k: self.k, beta: self.beta, seed: self.seed }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write the task here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Letter passing where passes reveal the addressee to the receiver.
    Mailtell {
        #[command(flatten)]
        ws: WsArgs,
        /// 1-based sender agent; sampled from the seed when absent.
        #[arg(long)]
        sender: Option<usize>,
        /// 1-based addressee agent; sampled from the seed when absent.
        #[arg(long)]
        addressee: Option<usize>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Letter passing where only a private check reveals the addressee.
    Mailcheck {
        #[command(flatten)]
        ws: WsArgs,
        #[arg(long)]
        sender: Option<usize>,
        #[arg(long)]
        addressee: Option<usize>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// The restricted Russian card problem (Alice holds 012).
    Cards {
        /// Include all 46376 candidate first announcements instead of only
        /// the known solution set; synthesis over the result is the
        /// long-running mode.
        #[arg(long)]
        all_announcements: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// The door-mat scenario.
    Apartment {
        /// Omit Anne's announcement action.
        #[arg(long)]
        without_announce: bool,
        #[command(flatten)]
        out: OutputArg,
    },
    /// The three-agent letter chain.
    Letter {
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    Mailtell {
        #[command(flatten)]
        ws: WsArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
    },
    Mailcheck {
        #[command(flatten)]
        ws: WsArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: usize,
    },
}

fn emit(out: &OutputArg, text: &str) -> Result<(), Error> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pick_endpoints(
    ws: &WsArgs,
    sender: Option<usize>,
    addressee: Option<usize>,
) -> Result<(usize, usize), Error> {
    let n = ws.agents;
    let to_index = |v: usize, what: &str| -> Result<usize, Error> {
        if v == 0 || v > n {
            Err(Error::InvalidParams(format!("{what} {v} outside 1..={n}")))
        } else {
            Ok(v - 1)
        }
    };
    match (sender, addressee) {
        (Some(s), Some(a)) => Ok((to_index(s, "sender")?, to_index(a, "addressee")?)),
        (s, a) => {
            let mut rng = bench::trial_rng(ws.seed, 0);
            let (ds, da) = bench::sample_pair(&mut rng, n);
            Ok((s.map(|v| to_index(v, "sender")).transpose()?.unwrap_or(ds),
                a.map(|v| to_index(v, "addressee")).transpose()?.unwrap_or(da)))
        }
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Plan { task, mode, max_depth } => {
            let (task, _) = task.load()?;
            match search_plan(&task, mode.into(), max_depth) {
                SearchOutcome::Found(plan) => {
                    println!("{plan}");
                    Ok(0)
                }
                SearchOutcome::ProvenNone => {
                    println!("no plan");
                    Ok(1)
                }
                SearchOutcome::DepthExhausted => {
                    println!("no plan within depth {max_depth}");
                    Ok(2)
                }
            }
        }
        Command::Check { task, plan, mode } => {
            let (task, _) = task.load()?;
            let plan = Plan(plan.split(',').map(|s| s.trim().to_owned()).collect());
            if verify_plan(&task, &plan, mode.into())? {
                println!("plan");
                Ok(0)
            } else {
                println!("not a plan");
                Ok(1)
            }
        }
        Command::Policy { task, max_nodes, output } => {
            let (task, hash) = task.load()?;
            match find_ic_policy(&task, max_nodes) {
                Ok(Some(gp)) => {
                    let text = serialize_policy(&gp, &hash);
                    match output {
                        Some(path) => fs::write(&path, text).map_err(|e| {
                            Error::InvalidParams(format!("{}: {e}", path.display()))
                        })?,
                        None => print!("{text}"),
                    }
                    Ok(0)
                }
                Ok(None) => {
                    println!("no policy");
                    Ok(1)
                }
                Err(Error::ResourceLimit(n)) => {
                    println!("budget exhausted after {n} states");
                    Ok(2)
                }
                Err(e) => Err(e),
            }
        }
        Command::ValidatePolicy { task, policy, successor } => {
            let (task, hash) = task.load()?;
            let text = fs::read_to_string(&policy)
                .map_err(|e| Error::InvalidParams(format!("{}: {e}", policy.display())))?;
            let file = parse_policy(&text)?;
            if let Some(h) = &file.task_hash {
                if *h != hash {
                    eprintln!("warning: policy was written for a task with hash {h}");
                }
            }
            let (gp, unreached) = resolve_policy(&task, &file, successor.into())?;
            for key in &unreached {
                eprintln!("warning: entry {key} not reachable from the initial state");
            }
            let report = validate_policy(&task, &gp, successor.into());
            println!("{report}");
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Exec { task, policy, seed } => {
            let (task, _) = task.load()?;
            let text = fs::read_to_string(&policy)
                .map_err(|e| Error::InvalidParams(format!("{}: {e}", policy.display())))?;
            let file = parse_policy(&text)?;
            let (gp, _) = resolve_policy(&task, &file, SuccessorKind::PerspectiveSensitive)?;
            let trace = execute(&task, &gp, seed)?;
            println!("{trace}");
            Ok(if trace.outcome == TraceOutcome::GoalReached { 0 } else { 1 })
        }
        Command::Gen { scenario } => {
            let (task, out) = match scenario {
                GenCommand::Mailtell { ws, sender, addressee, out } => {
                    let graph = watts_strogatz(&ws.params())?;
                    let (s, a) = pick_endpoints(&ws, sender, addressee)?;
                    (mailtell(&graph, s, a)?, out)
                }
                GenCommand::Mailcheck { ws, sender, addressee, out } => {
                    let graph = watts_strogatz(&ws.params())?;
                    let (s, a) = pick_endpoints(&ws, sender, addressee)?;
                    (mailcheck(&graph, s, a)?, out)
                }
                GenCommand::Cards { all_announcements, out } => {
                    let rc = bench::russian_cards();
                    let task = if all_announcements {
                        rc.full_task()
                    } else {
                        rc.task_with(&[bench::RussianCards::solution_announcement()])?
                    };
                    (task, out)
                }
                GenCommand::Apartment { without_announce, out } => {
                    (apartment(!without_announce), out)
                }
                GenCommand::Letter { out } => (letter(), out),
            };
            emit(&out, &serialize_task(&task))?;
            Ok(0)
        }
        Command::Bench { scenario } => {
            run_bench(scenario)?;
            Ok(0)
        }
    }
}

fn run_bench(scenario: BenchCommand) -> Result<(), Error> {
    match scenario {
        BenchCommand::Mailtell { ws, trials, max_depth } => {
            println!("trial n k beta seed sender addressee path_len plan_len time_s");
            for trial in 0..trials {
                let seed = ws.seed.wrapping_add(trial as u64);
                let params = WsParams { seed, ..ws.params() };
                let graph = watts_strogatz(&params)?;
                let mut rng = bench::trial_rng(ws.seed, trial as u64);
                let (sender, addressee) = bench::sample_pair(&mut rng, ws.agents);
                let start = Instant::now();
                let task = mailtell(&graph, sender, addressee)?;
                let plan = search_plan(&task, PlanMode::ImplicitlyCoordinated, max_depth);
                let elapsed = start.elapsed().as_secs_f64();
                let plan_len = match &plan {
                    SearchOutcome::Found(p) => p.len() as i64,
                    _ => -1,
                };
                println!(
                    "{trial} {} {} {} {seed} {} {} {} {plan_len} {elapsed:.4}",
                    ws.agents,
                    ws.k,
                    ws.beta,
                    sender + 1,
                    addressee + 1,
                    graph.distance(sender, addressee),
                );
            }
        }
        BenchCommand::Mailcheck { ws, trials, max_nodes } => {
            println!("trial n k beta seed sender addressee path_len worst_len time_s");
            for trial in 0..trials {
                let seed = ws.seed.wrapping_add(trial as u64);
                let params = WsParams { seed, ..ws.params() };
                let graph = watts_strogatz(&params)?;
                let mut rng = bench::trial_rng(ws.seed, trial as u64);
                let (sender, addressee) = bench::sample_pair(&mut rng, ws.agents);
                let start = Instant::now();
                let task = mailcheck(&graph, sender, addressee)?;
                let worst = find_ic_policy(&task, max_nodes)?
                    .map(|gp| delplan_core::policy::worst_case_trace_len(&task, &gp))
                    .transpose()?
                    .map_or(-1, |w| w as i64);
                let elapsed = start.elapsed().as_secs_f64();
                println!(
                    "{trial} {} {} {} {seed} {} {} {} {worst} {elapsed:.4}",
                    ws.agents,
                    ws.k,
                    ws.beta,
                    sender + 1,
                    addressee + 1,
                    full_path_or_skip(&graph, sender),
                );
            }
        }
    }
    Ok(())
}

fn full_path_or_skip(graph: &NeighborhoodGraph, sender: usize) -> i64 {
    // The exact covering-walk oracle is exponential; report -1 beyond its
    // practical range rather than stalling the benchmark.
    if graph.num_nodes() <= 16 {
        graph.full_path_len(sender) as i64
    } else {
        -1
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(Error::ResourceLimit(n)) => {
            eprintln!("budget exhausted after {n} states");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
