use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hrn_sim::experiments::{run_with_traces, Figure, SweepSpec};
use hrn_sim::{load_sweep_config, table, SimResult};

/// Hybrid relay + RIS link simulator.
#[derive(Debug, Parser)]
#[command(name = "hrn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hybrid channel gain vs. d_AB and d_RI (free space).
    Fig3(Common),
    /// Gain improvement of the hybrid network over the best single helper.
    Fig4(Common),
    /// Achievable rate vs. transmit power (UMi, DF relays).
    Fig5(Common),
    /// Achievable rate vs. number of RIS elements (UMi, AF relays).
    Fig6(Common),
    /// Sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// PSO swarm size.
    #[arg(long)]
    particles: Option<usize>,
    /// PSO iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// PSO per-dimension velocity clamp, radians.
    #[arg(long)]
    vclamp: Option<f64>,
    /// Write PSO convergence traces to this CSV.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

impl Common {
    fn apply(&self, spec: &mut SweepSpec) {
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(p) = self.particles {
            spec.pso.particle_count = p;
        }
        if let Some(i) = self.iters {
            spec.pso.iteration_count = i;
        }
        if let Some(v) = self.vclamp {
            spec.pso.velocity_clamp = v;
        }
    }
}

fn sink(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(mut spec: SweepSpec, common: &Common) -> SimResult<()> {
    common.apply(&mut spec);
    let output = run_with_traces(&spec, common.jobs)?;
    table::write_result(&output.result, sink(&common.out)?)?;
    if let Some(path) = &common.trace_out {
        table::write_traces(&output.traces, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fig3(c) => execute(SweepSpec::preset(Figure::Fig3), c),
        Command::Fig4(c) => execute(SweepSpec::preset(Figure::Fig4), c),
        Command::Fig5(c) => execute(SweepSpec::preset(Figure::Fig5), c),
        Command::Fig6(c) => execute(SweepSpec::preset(Figure::Fig6), c),
        Command::Sweep { config, common } => load_sweep_config(config).and_then(|spec| execute(spec, common)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
