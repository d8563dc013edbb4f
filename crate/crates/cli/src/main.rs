use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qshift::Precision;
use qshift_cli::{run, Overrides};

const FORMATS: &str = "\
Output formats (floats printed as {:.16e}):
  solve, laurent        n,re,im
  solve (family mode)   member,re_a0,im_a0,zero_count
  residual              re_z,im_z,re_residual,im_residual,abs_residual
  continue              re_z,im_z,re_f,im_f
  pole-orbit            n,re,im,order
  nevanlinna curve      r,m,N,T
  nevanlinna checks     quantity,value
  expoly-check          JSON report with the leading witness
  classify              JSON, one object per theorem part

Exit codes: 0 success, 1 I/O error, 2 invalid configuration,
3 numerical failure, 4 refused formal expansion.";

#[derive(Parser, Debug)]
#[command(version, about = "Series solutions and checks for f'(z) = A f(qz) + B f(z)^2 + C f(z) + D", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Run the configuration file.
    Run {
        config: PathBuf,
        #[arg(long, value_enum)]
        precision: Option<PrecisionArg>,
        /// Truncation order N, overriding the file.
        #[arg(long)]
        order: Option<usize>,
        /// Output path, overriding the file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

fn main() -> ExitCode {
    let Action::Run { config, precision, order, output } = Cli::parse().action;
    let ov = Overrides {
        precision: precision.map(|p| match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }),
        order,
        output,
    };
    match run(&config, &ov) {
        Ok(notes) => {
            for n in notes {
                eprintln!("{n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
