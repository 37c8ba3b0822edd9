use clap::{Args, Parser, Subcommand};
use radiance::config::{Format, Mode, RunConfig};
use radiance::{run, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

const TABLES: &str = "\
CSV columns (fixed per mode, 17 significant digits):
  circular, linear, rest-frame-*   n,omega,theta,dW,dW_err   (dw,dw_err with --quantity rate)
  schott, nikishov-ritus           n,w,w_err
  classical-limit                  dphi,w,w_err,w_cl,rel_diff
  oracle-compare                   omega,theta,phi_gamma,rel_err
  sweep                            index,<param>,total,error,converged
Spectrum tables end with a row `total,...,W,err`. Rows hold per-harmonic
totals; with --theta-points they hold dW_n/dtheta and omega is the resonance.

Exit status: 0 converged, 2 not converged (results still written), 1 usage.";

#[derive(Parser)]
#[command(name = "radiance", version, about = "Radiation spectra of an electron in a plane wave", after_help = TABLES)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Flat JSON config; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy or rate spectrum, circular polarization.
    Circular(Opts),
    /// Energy or rate spectrum, linear polarization.
    Linear(Opts),
    /// Classical rate of circular motion in the average rest frame.
    Schott(Opts),
    /// Classical rate of figure-8 motion in the average rest frame.
    NikishovRitus(Opts),
    /// Finite-window spectrum in the average rest frame, circular polarization.
    RestFrameCircular(Opts),
    /// Finite-window spectrum in the average rest frame, linear polarization.
    RestFrameLinear(Opts),
    /// Series currents and energy against direct quadrature (JSON by default).
    OracleCompare(Opts),
    /// One-parameter sweep, resumable through `<out>.manifest.json`.
    Sweep(Opts),
    /// Rest-frame rate against its classical limit for several window lengths.
    ClassicalLimit(Opts),
}

fn config_of(cmd: Cmd) -> Result<RunConfig, CliError> {
    let (mode, opts) = match cmd {
        Cmd::Circular(o) => (Mode::Circular, o),
        Cmd::Linear(o) => (Mode::Linear, o),
        Cmd::Schott(o) => (Mode::Schott, o),
        Cmd::NikishovRitus(o) => (Mode::NikishovRitus, o),
        Cmd::RestFrameCircular(o) => (Mode::RestFrameCircular, o),
        Cmd::RestFrameLinear(o) => (Mode::RestFrameLinear, o),
        Cmd::OracleCompare(o) => (Mode::OracleCompare, o),
        Cmd::Sweep(o) => (Mode::Sweep, o),
        Cmd::ClassicalLimit(o) => (Mode::ClassicalLimit, o),
    };
    let base = match &opts.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.overlay(&opts.run);
    cfg.mode = Some(mode);
    if mode == Mode::OracleCompare && cfg.format.is_none() {
        cfg.format = Some(Format::Json);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config_of(cli.cmd).and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            println!("{}", report.summary);
            if report.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("radiance: not converged; results written with converged = false");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("radiance: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
