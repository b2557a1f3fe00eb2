use std::path::PathBuf;
use std::process::ExitCode;

use blowup_lab::harness::{commands, ConfigMap, Outcome};
use blowup_lab::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blowup-lab", version, about = "Blow-up experiments for damped semilinear wave equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Strauss and Fujita exponents and the criticality class of p.
    Exponents(Common),
    /// Multipliers r1, r2 and the decaying solution rho.
    Ode(Common),
    /// phi_lambda, xi_q and eta_q on a radial grid.
    Testfn(Common),
    /// One radial solver run with blow-up detection.
    Solve(Common),
    /// Iteration sequences, thresholds and Volterra envelopes.
    Iterate(Common),
    /// Lifespan sweep over an eps ladder with a scaling fit.
    Sweep(Common),
}

fn load(c: &Common) -> Result<ConfigMap> {
    let mut cfg = match &c.config {
        Some(p) => ConfigMap::load(p)?,
        None => ConfigMap::default(),
    };
    for s in &c.set {
        cfg.set(s)?;
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    let (f, c): (fn(ConfigMap, &std::path::Path) -> Result<Outcome>, Common) = match cmd {
        Command::Exponents(c) => (commands::exponents, c),
        Command::Ode(c) => (commands::ode, c),
        Command::Testfn(c) => (commands::testfn, c),
        Command::Solve(c) => (commands::solve, c),
        Command::Iterate(c) => (commands::iterate, c),
        Command::Sweep(c) => (commands::sweep, c),
    };
    f(load(&c)?, &c.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            match o.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
