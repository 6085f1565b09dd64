//! `swipt` — transmit covariance optimization for a two-user MISO
//! interference channel with energy-harvesting receivers.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use swipt_cli::compare::build_report;
use swipt_cli::instance::{Instance, InstanceFile};
use swipt_cli::sweep::{
    default_axis_bounds, run_sweep, write_csv, write_solutions, SchemeKind, SweepSpec,
};
use swipt_cli::{CliError, Result};
use swipt_core::ideal::solve_ideal;
use swipt_core::model::Beamformer;
use swipt_core::oracle::{random_instance, ScaleProfile};
use swipt_core::search::SearchControl;
use swipt_core::tdma_a::solve_tdma_a;
use swipt_core::tdma_b::solve_tdma_b;

#[derive(Parser)]
#[command(
    name = "swipt",
    about = "Sum-rate-optimal transmit covariances for a two-user MISO interference channel with energy-harvesting receivers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ResolutionArgs {
    /// Grid points per angle coordinate in the beam searches.
    #[arg(long, default_value_t = 64)]
    grid: usize,

    /// Points in the slot-fraction grid of the two-slot scheme.
    #[arg(long = "alpha-steps", default_value_t = 101)]
    alpha_steps: usize,

    /// Evaluate grids sequentially even when the worker pool is available.
    #[arg(long)]
    sequential: bool,
}

impl ResolutionArgs {
    fn control(&self) -> SearchControl {
        let mut control = SearchControl::with_grid(self.grid);
        if self.sequential {
            control.parallel = false;
        }
        control
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scheme at a single energy-target point.
    Solve {
        /// Instance file (JSON).
        #[arg(long)]
        instance: PathBuf,

        /// Scheme: ideal, tdma-a or tdma-b.
        #[arg(long)]
        scheme: String,

        /// Energy target of receiver 1 (joules per symbol interval).
        #[arg(long, default_value_t = 0.0)]
        e1: f64,

        /// Energy target of receiver 2.
        #[arg(long, default_value_t = 0.0)]
        e2: f64,

        #[command(flatten)]
        resolution: ResolutionArgs,
    },

    /// Sweep an (E1, E2) lattice and write one CSV row per cell and scheme.
    Sweep {
        #[arg(long)]
        instance: PathBuf,

        /// Axis maximum for E1; defaults to 90% of the deliverable bound.
        #[arg(long = "e1-max")]
        e1_max: Option<f64>,

        /// Axis maximum for E2; defaults to 90% of the deliverable bound.
        #[arg(long = "e2-max")]
        e2_max: Option<f64>,

        /// Lattice points per axis (at least 2).
        #[arg(long, default_value_t = 10)]
        steps: usize,

        /// Comma-separated scheme subset.
        #[arg(long, default_value = "ideal,tdma-a,tdma-b")]
        schemes: String,

        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,

        /// Also write the per-row covariances to this JSON sidecar.
        #[arg(long = "emit-solutions")]
        emit_solutions: Option<PathBuf>,

        #[command(flatten)]
        resolution: ResolutionArgs,
    },

    /// Sweep and report per-cell winners and dominance verdicts.
    Compare {
        #[arg(long)]
        instance: PathBuf,

        #[arg(long = "e1-max")]
        e1_max: Option<f64>,

        #[arg(long = "e2-max")]
        e2_max: Option<f64>,

        #[arg(long, default_value_t = 10)]
        steps: usize,

        /// Comma-separated scheme subset (needs at least two).
        #[arg(long, default_value = "ideal,tdma-a,tdma-b")]
        schemes: String,

        #[command(flatten)]
        resolution: ResolutionArgs,
    },

    /// Generate a reproducible random instance file.
    Gen {
        /// Seed for the deterministic generator.
        #[arg(long)]
        seed: u64,

        /// Antennas per transmitter.
        #[arg(long, default_value_t = 2)]
        nt: usize,

        /// Noise regime: noise-limited or interference-limited.
        #[arg(long, default_value = "noise-limited")]
        profile: String,

        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { instance, scheme, e1, e2, resolution } => {
            let inst = InstanceFile::load_validated(&instance)?;
            let scheme = SchemeKind::from_str(&scheme)?;
            print_header(&instance, &inst, e1, e2);
            cmd_solve(&inst, scheme, e1, e2, &resolution)
        }
        Command::Sweep {
            instance,
            e1_max,
            e2_max,
            steps,
            schemes,
            out,
            emit_solutions,
            resolution,
        } => {
            let inst = InstanceFile::load_validated(&instance)?;
            let spec = build_spec(&inst, e1_max, e2_max, steps, &schemes, &resolution)?;
            let (rows, records) = run_sweep(&inst, &spec)?;
            write_csv(&rows, &out)?;
            if let Some(path) = emit_solutions {
                write_solutions(&records, &path)?;
            }
            let feasible = rows.iter().filter(|r| r.feasible).count();
            println!(
                "wrote {} rows ({} feasible) to {}",
                rows.len(),
                feasible,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { instance, e1_max, e2_max, steps, schemes, resolution } => {
            let inst = InstanceFile::load_validated(&instance)?;
            let spec = build_spec(&inst, e1_max, e2_max, steps, &schemes, &resolution)?;
            if spec.schemes.len() < 2 {
                return Err(CliError::Parse("compare needs at least two schemes".into()));
            }
            let (rows, _) = run_sweep(&inst, &spec)?;
            print!("{}", build_report(&rows).render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { seed, nt, profile, out } => cmd_gen(seed, nt, &profile, out),
    }
}

fn build_spec(
    inst: &Instance,
    e1_max: Option<f64>,
    e2_max: Option<f64>,
    steps: usize,
    schemes: &str,
    resolution: &ResolutionArgs,
) -> Result<SweepSpec> {
    let (d1, d2) = default_axis_bounds(inst);
    let schemes = schemes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(SchemeKind::from_str)
        .collect::<Result<Vec<_>>>()?;
    if schemes.is_empty() {
        return Err(CliError::Parse("no schemes requested".into()));
    }
    Ok(SweepSpec {
        e1_max: e1_max.unwrap_or(d1),
        e2_max: e2_max.unwrap_or(d2),
        steps,
        schemes,
        alpha_steps: resolution.alpha_steps,
        control: resolution.control(),
    })
}

fn print_header(path: &std::path::Path, inst: &Instance, e1: f64, e2: f64) {
    let ch = &inst.channels;
    println!("instance: {}", path.display());
    println!(
        "nt = {}, noise = ({}, {}), power budgets = ({}, {})",
        ch.nt, ch.sigma1_sq, ch.sigma2_sq, inst.budget.p1, inst.budget.p2
    );
    println!(
        "channel norms: |h11| = {:.4}, |h12| = {:.4}, |h21| = {:.4}, |h22| = {:.4}",
        ch.h11.norm(),
        ch.h12.norm(),
        ch.h21.norm(),
        ch.h22.norm()
    );
    println!(
        "targets: E1 = {e1}, E2 = {e2} (gamma = {}, delta = {})",
        inst.gamma, inst.delta
    );
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn print_beam(label: &str, beam: &Beamformer) {
    let entries: Vec<String> = beam.direction.entries().iter().map(|&z| fmt_complex(z)).collect();
    let coords = beam
        .span_coords
        .map(|(a, b)| format!(", span coords = ({}, {})", fmt_complex(a), fmt_complex(b)))
        .unwrap_or_default();
    println!("{label}: power = {:.6}, direction = [{}]{}", beam.power, entries.join(", "), coords);
}

fn cmd_solve(
    inst: &Instance,
    scheme: SchemeKind,
    e1: f64,
    e2: f64,
    resolution: &ResolutionArgs,
) -> Result<ExitCode> {
    let ch = &inst.channels;
    let budget = &inst.budget;
    let tgt = inst.target(e1, e2);
    let control = resolution.control();
    println!("scheme: {}", scheme.name());

    match scheme {
        SchemeKind::Ideal => {
            let sol = solve_ideal(ch, budget, &tgt, &control)?;
            println!("feasible: {}", sol.feasible);
            if !sol.feasible {
                println!("the energy targets exceed the jointly deliverable region");
                return Ok(ExitCode::from(2));
            }
            println!("rates: r1 = {:.6}, r2 = {:.6}", sol.achieved_rates.0, sol.achieved_rates.1);
            println!("sum rate: {:.6}", sol.objective);
            println!(
                "harvested energy: ({:.6}, {:.6})",
                sol.achieved_energies.0, sol.achieved_energies.1
            );
            print_beam("beam tx1", &sol.beams.0);
            print_beam("beam tx2", &sol.beams.1);
        }
        SchemeKind::TdmaA => {
            let sol = solve_tdma_a(ch, budget, &tgt, &control)?;
            println!("feasible: {}", sol.feasible());
            if !sol.feasible() {
                println!(
                    "harvesting cannot meet the targets within the interval (beta* = {:.6} < 1)",
                    sol.min_time.beta_star
                );
                return Ok(ExitCode::from(2));
            }
            println!(
                "alpha = {:.9}, w* = {:.9}, beta* = {:.9}",
                sol.min_time.alpha, sol.min_time.w_star, sol.min_time.beta_star
            );
            println!(
                "slot-2 rates: r1 = {:.6}, r2 = {:.6}",
                sol.slot2_rates.0, sol.slot2_rates.1
            );
            println!("sum rate: {:.6}", sol.overall_sum_rate);
            print_beam("harvest beam tx1", &sol.min_time.eh_beams.0);
            print_beam("harvest beam tx2", &sol.min_time.eh_beams.1);
            print_beam("detect beam tx1", &sol.id_beams.0);
            print_beam("detect beam tx2", &sol.id_beams.1);
        }
        SchemeKind::TdmaB => {
            let sol = solve_tdma_b(ch, budget, &tgt, resolution.alpha_steps, &control)?;
            println!("feasible: {}", sol.feasible);
            if !sol.feasible {
                println!("the targets violate the time-sharing feasibility bound");
                return Ok(ExitCode::from(2));
            }
            println!("alpha = {:.9}", sol.alpha);
            println!(
                "slot rates: r1 = {:.6} (slot 1), r2 = {:.6} (slot 2)",
                sol.slot1.rate, sol.slot2.rate
            );
            println!("sum rate: {:.6}", sol.overall_sum_rate);
            println!(
                "closed-form slots: ({}, {})",
                sol.used_closed_form.0, sol.used_closed_form.1
            );
            print_beam("slot-1 beam tx1", &sol.slot1.beams.0);
            print_beam("slot-1 beam tx2", &sol.slot1.beams.1);
            print_beam("slot-2 beam tx1", &sol.slot2.beams.0);
            print_beam("slot-2 beam tx2", &sol.slot2.beams.1);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(seed: u64, nt: usize, profile: &str, out: Option<PathBuf>) -> Result<ExitCode> {
    let profile = match profile {
        "noise-limited" => ScaleProfile::noise_limited(),
        "interference-limited" => ScaleProfile::interference_limited(),
        other => {
            return Err(CliError::Parse(format!(
                "unknown profile {other:?}; expected noise-limited or interference-limited"
            )))
        }
    };
    if nt == 0 {
        return Err(CliError::Parse("nt must be at least 1".into()));
    }
    let (ch, budget, tgt) = random_instance(seed, nt, &profile);
    let to_pairs = |v: &swipt_core::linalg::CVector| -> Vec<[f64; 2]> {
        v.entries().iter().map(|z| [z.re, z.im]).collect()
    };
    let file = InstanceFile {
        nt,
        h11: to_pairs(&ch.h11),
        h12: to_pairs(&ch.h12),
        h21: to_pairs(&ch.h21),
        h22: to_pairs(&ch.h22),
        sigma1_sq: ch.sigma1_sq,
        sigma2_sq: ch.sigma2_sq,
        p1: budget.p1,
        p2: budget.p2,
        gamma: 1.0,
        delta: 1.0,
    };
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Parse(format!("serializing instance: {e}")))?;
    match out {
        Some(path) => {
            std::fs::write(&path, text + "\n")?;
            println!("wrote instance (seed {seed}) to {}", path.display());
        }
        None => println!("{text}"),
    }
    println!(
        "suggested feasible targets: E1 = {:.6}, E2 = {:.6}",
        tgt.e1, tgt.e2
    );
    Ok(ExitCode::SUCCESS)
}
