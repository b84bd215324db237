use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chns_core::harness::{
    self, convergence_rates, run_coarsening, run_convergence, run_relaxation, run_stability_sweep,
    ErrorRecord, RunOutput,
};
use chns_core::io::{
    parse_config, write_energy_csv, write_error_table_csv, write_state_vtk, ErrorTable,
    ExperimentConfig, ExperimentKind, Overrides,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "chns",
    version,
    about = "Cahn-Hilliard-Navier-Stokes experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution convergence study.
    Converge(RunArgs),
    /// Spinodal coarsening from random data.
    Coarsen(RunArgs),
    /// Shape relaxation under a rotating wall flow.
    Relax(RunArgs),
    /// Coarsening repeated for several time steps.
    Stability(RunArgs),
    /// Quick structural and invariant checks.
    Selftest,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Time step(s), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    tau: Option<Vec<f64>>,
    /// Mesh resolution(s), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    nx: Option<Vec<usize>>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            nx: self.nx.clone(),
            tau: self.tau.clone(),
            seed: self.seed,
            output_dir: self.out.clone(),
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
    Gate(String),
}

impl From<chns_core::Error> for Failure {
    fn from(e: chns_core::Error) -> Self {
        match e {
            chns_core::Error::Config(msg) => Failure::Usage(msg),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Selftest => selftest(),
        Command::Converge(a) => experiment(ExperimentKind::Converge, a),
        Command::Coarsen(a) => experiment(ExperimentKind::Coarsen, a),
        Command::Relax(a) => experiment(ExperimentKind::Relax, a),
        Command::Stability(a) => experiment(ExperimentKind::Stability, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Gate(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn experiment(kind: ExperimentKind, args: &RunArgs) -> Outcome {
    let cfg = parse_config(kind, args.config.as_deref(), &args.overrides())?;
    fs::create_dir_all(&cfg.output_dir)?;
    let json = serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Run(e.to_string()))?;
    fs::write(cfg.output_dir.join("config.json"), json + "\n")?;
    match kind {
        ExperimentKind::Converge => converge(&cfg),
        ExperimentKind::Coarsen => {
            let out = run_coarsening(
                cfg.seed,
                cfg.nx[0],
                cfg.params,
                &cfg.snapshot_times,
                cfg.scheme_options(),
            )?;
            write_run(&cfg.output_dir, &out)?;
            energy_gate(&out, "coarsening")
        }
        ExperimentKind::Relax => {
            let out = run_relaxation(
                &cfg.polygon,
                cfg.nx[0],
                cfg.params,
                &cfg.snapshot_times,
                cfg.scheme_options(),
            )?;
            write_run(&cfg.output_dir, &out)?;
            energy_gate(&out, "relaxation")
        }
        ExperimentKind::Stability => stability(&cfg),
    }
}

fn converge(cfg: &ExperimentConfig) -> Outcome {
    let records = run_convergence(&cfg.nx, cfg.tau_rule, cfg.params, cfg.scheme_options())?;
    write_error_table_csv(
        &cfg.output_dir.join("errors_l2.csv"),
        ErrorTable::L2,
        &records,
    )?;
    write_error_table_csv(
        &cfg.output_dir.join("errors_h1.csv"),
        ErrorTable::H1,
        &records,
    )?;
    print_records(&records);
    let gated = |r: &ErrorRecord| [r.phi_linf_l2, r.mu_l2_l2, r.u_linf_l2, r.p_l2_l2];
    for w in records.windows(2) {
        let (a, b) = (gated(&w[0]), gated(&w[1]));
        if a.iter().zip(&b).any(|(x, y)| y >= x) {
            return Err(Failure::Gate(format!(
                "errors did not decrease from nx = {} to nx = {}",
                w[0].nx, w[1].nx
            )));
        }
    }
    Ok(())
}

fn print_records(records: &[ErrorRecord]) {
    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "nx", "tau", "phi linf-L2", "mu l2-L2", "u linf-L2", "p l2-L2"
    );
    for r in records {
        println!(
            "{:>4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.nx, r.tau, r.phi_linf_l2, r.mu_l2_l2, r.u_linf_l2, r.p_l2_l2
        );
    }
    for (w, rt) in records.windows(2).zip(convergence_rates(records)) {
        println!(
            "rates {:>3} -> {:<3}  L2: phi {:.2} mu {:.2} u {:.2} p {:.2}   H1: phi {:.2} mu {:.2} u {:.2} p {:.2}",
            w[0].nx,
            w[1].nx,
            rt.phi_linf_l2,
            rt.mu_l2_l2,
            rt.u_linf_l2,
            rt.p_l2_l2,
            rt.phi_h1,
            rt.mu_h1,
            rt.u_h1,
            rt.p_h1
        );
    }
}

fn write_run(dir: &Path, out: &RunOutput) -> Outcome {
    write_energy_csv(&dir.join("energy.csv"), &out.trace)?;
    for (k, snap) in out.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:02}_t{}.vtk", snap.time);
        write_state_vtk(&dir.join(name), &out.disc, &snap.state)?;
    }
    let last = out
        .trace
        .last()
        .map_or(out.initial_energy, |r| r.modified_energy);
    println!(
        "{} steps, modified energy {:.6e} -> {:.6e}, {} snapshots in {}",
        out.trace.len(),
        out.initial_energy,
        last,
        out.snapshots.len(),
        dir.display()
    );
    Ok(())
}

fn energy_gate(out: &RunOutput, what: &str) -> Outcome {
    if out.is_monotone() {
        Ok(())
    } else {
        Err(Failure::Gate(format!(
            "{what}: modified energy increased (max relative increase {:.3e})",
            out.max_energy_increase()
        )))
    }
}

fn stability(cfg: &ExperimentConfig) -> Outcome {
    let sweep = run_stability_sweep(
        &cfg.taus,
        cfg.seed,
        cfg.nx[0],
        cfg.params,
        cfg.scheme_options(),
    )?;
    let mut summary =
        String::from("tau,steps,initial_energy,final_energy,max_relative_increase,monotone\n");
    let mut failed = Vec::new();
    for e in &sweep {
        let o = &e.output;
        write_energy_csv(
            &cfg.output_dir.join(format!("energy_tau{:e}.csv", e.tau)),
            &o.trace,
        )?;
        let last = o
            .trace
            .last()
            .map_or(o.initial_energy, |r| r.modified_energy);
        summary.push_str(&format!(
            "{:e},{},{:.12e},{:.12e},{:.6e},{}\n",
            e.tau,
            o.trace.len(),
            o.initial_energy,
            last,
            o.max_energy_increase(),
            e.is_monotone()
        ));
        println!(
            "tau {:<8e} {:>6} steps  energy {:.6e} -> {:.6e}  {}",
            e.tau,
            o.trace.len(),
            o.initial_energy,
            last,
            if e.is_monotone() {
                "nonincreasing"
            } else {
                "INCREASED"
            }
        );
        if !e.is_monotone() {
            failed.push(e.tau);
        }
    }
    fs::write(cfg.output_dir.join("stability.csv"), summary)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Gate(format!(
            "energy increased for tau = {failed:?}"
        )))
    }
}

fn selftest() -> Outcome {
    let checks = harness::selftest()?;
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed += usize::from(!c.passed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Gate(format!(
            "{failed} of {} self-test checks failed",
            checks.len()
        )))
    }
}
