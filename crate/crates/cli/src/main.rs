use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bundlepath::bundles::order_sequence;
use bundlepath::io::{
    bench, bench_csv, load_instance, load_map, load_scenario, plan_csv, render_instance_svg, render_plan_svg, run_plan,
    write_file, IoError,
};
use bundlepath::mms::{self, SolveLimits};
use bundlepath::oracle::{dp_refined, DiscretizedInstance, DEFAULT_SAMPLES};
use bundlepath::robot::{KRule, RobotError, Solver};
use bundlepath::rubber_band::{rubber_band_solve, trim_bundles, DEFAULT_TRIM};
use bundlepath::Tolerances;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bundlepath", version, about = "Shortest paths along bundles of segments, and an exploring robot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Mms,
    RubberBand,
    GraphOnly,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Mms => Solver::Mms,
            SolverArg::RubberBand => Solver::RubberBand,
            SolverArg::GraphOnly => Solver::GraphOnly,
        }
    }
}

#[derive(Args, Clone)]
struct LimitArgs {
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Relative length decrease below which iteration stops.
    #[arg(long, default_value_t = 1e-10)]
    tol_len: f64,
    /// Angular tolerance for sector and ordering comparisons.
    #[arg(long, default_value_t = 1e-7)]
    tol_angle: f64,
}

impl LimitArgs {
    fn limits(&self) -> SolveLimits {
        SolveLimits {
            max_iter: self.max_iter,
            tol_len: self.tol_len,
            ..SolveLimits::default()
        }
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol_angle: self.tol_angle,
            tol_len: self.tol_len,
            ..Tolerances::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file and print the length trace.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "mms")]
        solver: SolverArg,
        /// Number of cutting segments; defaults to ⌊N/5⌋, at least 1.
        #[arg(long)]
        k: Option<usize>,
        /// Also run the sampling oracle and report the gap.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run a planning scenario.
    Plan {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Solve seeded random instances with every method.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Compare the solver with the sampling oracle on seeded random instances.
    OracleCheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

fn solve_cmd(
    instance: PathBuf,
    solver: SolverArg,
    k: Option<usize>,
    oracle: bool,
    svg: Option<PathBuf>,
    limits: LimitArgs,
) -> anyhow::Result<()> {
    let tol = limits.tolerances();
    let seq = load_instance(&instance)?;
    seq.validate(&tol).context("invalid instance")?;
    let seq = order_sequence(&seq, &tol).context("cannot order bundle segments")?;
    let k = k.unwrap_or_else(|| KRule::FloorNOver5.k_for(seq.interior_count()));
    let report = match solver {
        SolverArg::Mms => mms::solve(&seq, k, &limits.limits())?,
        SolverArg::RubberBand => {
            let segs = trim_bundles(&seq, DEFAULT_TRIM * seq.diameter().max(1.0), &tol)?;
            rubber_band_solve(&segs, seq.p(), seq.q(), &limits.limits())
        }
        SolverArg::GraphOnly => anyhow::bail!("graph_only applies to planning only"),
    };
    let length = report.path.length();
    println!("solver: {}", if matches!(solver, SolverArg::Mms) { "mms" } else { "rubber_band" });
    if matches!(solver, SolverArg::Mms) {
        println!("k: {k}");
    }
    println!("iterations: {}", report.iterations);
    println!("converged_by: {:?}", report.converged_by);
    let trace: Vec<String> = report.per_iteration_lengths.iter().map(|l| l.to_string()).collect();
    println!("lengths: {}", trace.join(" "));
    println!("length: {length}");
    if oracle {
        let inst = DiscretizedInstance::from_sequence(&seq, DEFAULT_SAMPLES);
        let o = dp_refined(&inst, 4)?.length();
        println!("oracle_length: {o}");
        println!("gap: {}", (length - o) / o);
    }
    if let Some(p) = svg {
        write_file(&p, &render_instance_svg(&seq, &report.path))?;
    }
    Ok(())
}

fn plan_cmd(
    scenario: PathBuf,
    solver: Option<SolverArg>,
    radius: Option<f64>,
    k: Option<usize>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    limits: LimitArgs,
) -> anyhow::Result<()> {
    let mut sc = load_scenario(&scenario)?;
    if let Some(s) = solver {
        sc.solver = s.into();
    }
    if let Some(r) = radius {
        sc.radius = r;
    }
    if let Some(k) = k {
        sc.k_rule = KRule::Fixed(k);
    }
    sc.limits = Some(limits.limits());
    let map = load_map(&sc.map_path)?;
    let out = run_plan(&sc, &map)?;
    let text = plan_csv(&out, true);
    match csv {
        Some(p) => write_file(&p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = svg {
        write_file(&p, &render_plan_svg(&map, &out.trace))?;
    }
    Ok(())
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn bench_cmd(seed: u64, count: usize, oracle: bool, csv: Option<PathBuf>, limits: LimitArgs) -> anyhow::Result<()> {
    let rows = bench(seed, count, &limits.limits(), oracle, threads())?;
    let text = bench_csv(&rows, true);
    match csv {
        Some(p) => write_file(&p, &text)?,
        None => print!("{text}"),
    }
    let mms: f64 = rows.iter().map(|r| r.mms_time).sum();
    let rb: f64 = rows.iter().map(|r| r.rb_time).sum();
    eprintln!("solve time: mms {mms:.4}s, rubber band {rb:.4}s, reduction {:.2}%", 100.0 * (1.0 - mms / rb));
    Ok(())
}

fn oracle_check_cmd(seed: u64, count: usize, limits: LimitArgs) -> anyhow::Result<bool> {
    let rows = bench(seed, count, &limits.limits(), true, threads())?;
    let mut ok = true;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &rows {
        let o = r.oracle_length.expect("oracle requested");
        let ratio = r.mms_length / o;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if !(0.999..=1.005).contains(&ratio) {
            ok = false;
            println!("instance {}: mms {} oracle {} ratio {}", r.id, r.mms_length, o, ratio);
        }
    }
    println!("{} instances, mms/oracle in [{lo}, {hi}]: {}", rows.len(), if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<IoError>() {
        Some(IoError::Parse { .. } | IoError::NonSimplePolygon(_)) => 2,
        Some(IoError::Robot(RobotError::NoPath)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            instance,
            solver,
            k,
            oracle,
            svg,
            limits,
        } => solve_cmd(instance, solver, k, oracle, svg, limits),
        Command::Plan {
            scenario,
            solver,
            radius,
            k,
            csv,
            svg,
            limits,
        } => plan_cmd(scenario, solver, radius, k, csv, svg, limits),
        Command::Bench {
            seed,
            count,
            oracle,
            csv,
            limits,
        } => bench_cmd(seed, count, oracle, csv, limits),
        Command::OracleCheck { seed, count, limits } => match oracle_check_cmd(seed, count, limits) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
