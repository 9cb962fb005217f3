mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use dirac_qwalk::exec::{set_backend, Backend};
use dirac_qwalk::lattice::Axis;
use dirac_qwalk::spectral::Window;

use commands::{parse_axis, parse_range, parse_window, FeitFleckArgs, ResourcesArgs, SynthChoice};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "dirac-qwalk",
    version,
    about = "Dirac equation as a quantum walk: classical and circuit simulation"
)]
struct Cli {
    /// Kernel backend for field and statevector loops.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Parallel)]
    backend: BackendArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sequential,
    Parallel,
}

#[derive(Subcommand)]
enum Command {
    /// Classical split-step evolution; writes snapshots and a norm/position series.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Overrides the config's splitting order.
        #[arg(long, value_parser = ["2", "3"])]
        order: Option<String>,
        /// Output prefix; files are `<prefix>_series.csv` and so on.
        #[arg(long)]
        out: PathBuf,
    },
    /// The same evolution run through the quantum circuit on a statevector.
    Qevolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_parser = ["2", "3"])]
        order: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Builds a circuit preparing a field snapshot from |0...0>.
    Prepare {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        emit_circuit: PathBuf,
    },
    /// Autocorrelation, spectral density and the filtered eigenstate at one energy.
    FeitFleck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        /// Final time; rounded to a whole number of steps.
        #[arg(long)]
        tf: f64,
        #[arg(long, value_parser = parse_window, default_value = "hann")]
        window: Window,
        /// Energies sampled in the spectral density.
        #[arg(long, default_value_t = 1024)]
        points: usize,
        /// Peaks below this fraction of the maximum are dropped.
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        /// Read the autocorrelation off an ancilla instead of the classical solver.
        #[arg(long)]
        quantum_autocorr: bool,
        /// Sample post-selection outcomes with the config seed instead of projecting.
        #[arg(long)]
        sampled: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Branch energies of one free step along an axis.
    Dispersion {
        #[arg(long = "nstar", default_value_t = 1.0)]
        n_star: f64,
        #[arg(long, value_parser = parse_axis, default_value = "x")]
        axis: Axis,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = 256)]
        points: usize,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact rational splittings: one row of denominators per solution.
    SearchSplittings {
        #[arg(long)]
        m: u32,
        /// Number of weights: `7` or an inclusive range `7..9`.
        #[arg(long, value_parser = parse_range)]
        r: ::std::vec::Vec<u32>,
        #[arg(long = "pmax", default_value_t = 12)]
        p_max: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clifford+T gate counts of one time step versus qubits per axis.
    Resources {
        #[arg(long, default_value_t = 3)]
        dims: u32,
        /// Inclusive range `2..100`, optionally `:step`.
        #[arg(long, value_parser = parse_range)]
        n: ::std::vec::Vec<u32>,
        #[arg(long, default_value_t = 1e-10)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, value_enum, default_value_t = SynthChoice::Gridsynth)]
        synth: SynthChoice,
        /// Where the lowered 1-D n_z=3 step goes; defaults to `<out>` with a `_nz3_step.txt` suffix.
        #[arg(long)]
        example: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn with_order(mut cfg: RunConfig, order: Option<String>) -> Result<RunConfig> {
    if let Some(o) = order {
        cfg.order = o.parse().expect("validated by clap");
        cfg.validate()?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    set_backend(match cli.backend {
        BackendArg::Sequential => Backend::Sequential,
        BackendArg::Parallel => Backend::Parallel,
    });
    match cli.command {
        Command::Evolve {
            config,
            steps,
            order,
            out,
        } => commands::evolve(&with_order(RunConfig::load(&config)?, order)?, steps, &out),
        Command::Qevolve {
            config,
            steps,
            order,
            out,
        } => commands::qevolve(&with_order(RunConfig::load(&config)?, order)?, steps, &out),
        Command::Prepare {
            field,
            emit_circuit,
        } => commands::prepare(&field, &emit_circuit),
        Command::FeitFleck {
            config,
            energy,
            tf,
            window,
            points,
            threshold,
            quantum_autocorr,
            sampled,
            out,
        } => {
            let args = FeitFleckArgs {
                energy,
                tf,
                window,
                points,
                threshold,
                quantum_autocorr,
                sampled,
            };
            commands::feit_fleck(&RunConfig::load(&config)?, &args, &out)
        }
        Command::Dispersion {
            n_star,
            axis,
            mass,
            ell,
            order,
            points,
            out,
        } => commands::dispersion_scan(n_star, axis, mass, ell, order, points, out.as_deref()),
        Command::SearchSplittings { m, r, p_max, out } => {
            commands::search_splittings(m, &r, p_max, out.as_deref())
        }
        Command::Resources {
            dims,
            n,
            epsilon,
            order,
            synth,
            example,
            out,
        } => {
            let stem = out.with_extension("");
            let example = example.unwrap_or_else(|| commands::with_suffix(&stem, "nz3_step.txt"));
            commands::resources(
                &ResourcesArgs {
                    dims,
                    ns: n,
                    epsilon,
                    order,
                    synth,
                    example,
                },
                &out,
            )
        }
    }
}
