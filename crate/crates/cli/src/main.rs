use std::io::Write;
use std::process::ExitCode;

use circle_rearrange::commands::{self, CertifyArgs, EvalArgs, FlowArgs, OracleArgs, PolarizeArgs};
use clap::{Parser, Subcommand};

/// Exact rearrangement computations on the circle R/Z.
#[derive(Parser, Debug)]
#[command(name = "circle-rearrange", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Functionals, defects and admissibility of a triple.
    Eval(EvalArgs),
    /// CSV trace of the interval-growth flow.
    Flow(FlowArgs),
    /// Stability certificate, or a perturbation sweep.
    Certify(CertifyArgs),
    /// Discrete oracle on Z/N.
    Oracle(OracleArgs),
    /// Polarize a set, or symmetrize it by repeated polarization.
    Polarize(PolarizeArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::Eval(a) => commands::eval(a),
        Cmd::Flow(a) => commands::flow(a),
        Cmd::Certify(a) => commands::certify(a),
        Cmd::Oracle(a) => commands::oracle(a),
        Cmd::Polarize(a) => commands::polarize_cmd(a),
    };
    match res {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.text.as_bytes());
            let _ = out.flush();
            match report.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
