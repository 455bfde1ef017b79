use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfoam::cli::{
    cmd_gap_to_dir, cmd_geometry, cmd_loopback, cmd_sweep, load_scenario, parse_list,
};
use qfoam::metrics::{SweepAxis, SweepSpec, SystemKind};
use qfoam::scenario::Scenario;

#[derive(Parser)]
#[command(name = "qfoam", version, about = "QF-UCA OAM link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (key = value lines); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn scenario(&self) -> qfoam::Result<Scenario> {
        let mut sc = load_scenario(self.config.as_deref())?;
        if let Some(s) = self.seed {
            sc.seed = s;
        }
        Ok(sc)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Element layout of the transmit array.
    Geometry {
        #[command(flatten)]
        common: Common,
    },
    /// Gap between the mode-domain channel and its diagonal approximation.
    Gap {
        #[command(flatten)]
        common: Common,
        /// Distances in metres.
        #[arg(long, default_value = "20,50,100,200")]
        distances: String,
        /// Elements per cell.
        #[arg(long = "k-values", default_value = "4,8,16")]
        k_values: String,
    },
    /// Random frames through the full transceiver chain.
    Loopback {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        /// Disable receiver noise.
        #[arg(long)]
        noiseless: bool,
    },
    /// Spectrum efficiency over one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// snr_db, distance_m or freq_hz.
        #[arg(long, default_value = "snr_db")]
        axis: String,
        #[arg(long, default_value = "")]
        values: String,
        /// Any of qf_uca, uca_n, uca_bigger, siso_xN, siso_x<n>.
        #[arg(long, default_value = "qf_uca,uca_n,uca_bigger,siso_xN")]
        systems: String,
    },
}

fn run(cli: Cli) -> qfoam::Result<()> {
    match cli.command {
        Command::Geometry { common } => {
            let path = cmd_geometry(&common.scenario()?, &common.out)?;
            println!("wrote {}", path.display());
        }
        Command::Gap {
            common,
            distances,
            k_values,
        } => {
            let path = cmd_gap_to_dir(
                &common.scenario()?,
                &parse_list::<f64>(&distances)?,
                &parse_list::<usize>(&k_values)?,
                &common.out,
            )?;
            println!("wrote {}", path.display());
        }
        Command::Loopback {
            common,
            frames,
            noiseless,
        } => {
            let s = cmd_loopback(&common.scenario()?, frames, noiseless, &common.out)?;
            println!(
                "frames={} symbols={} errors={} ser={}",
                s.frames,
                s.symbols,
                s.errors,
                s.ser()
            );
        }
        Command::Sweep {
            common,
            axis,
            values,
            systems,
        } => {
            let spec = SweepSpec {
                axis: axis.parse::<SweepAxis>()?,
                values: parse_list::<f64>(&values)?,
                base: common.scenario()?,
                systems: systems
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<SystemKind>)
                    .collect::<qfoam::Result<_>>()?,
            };
            let path = cmd_sweep(&spec, &common.out)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
