#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use maslov_core::interference::InterferenceConfig;

use args::{usage, Cli, Command, Format, OutputArgs};
use commands::Problem;

fn run(cli: Cli) -> Result<()> {
    let open = |o: &OutputArgs| output::open(o.out.as_deref());
    match cli.command {
        Command::Kernel {
            model,
            ends,
            t,
            methods,
            numeric,
            output,
        } => {
            let p = problem(&model, &ends, &numeric)?;
            let format = output.format.unwrap_or(Format::Json);
            commands::cmd_kernel(&p, t, &methods.list(), format, &mut *open(&output)?)
        }
        Command::Scan {
            model,
            ends,
            t_min,
            t_max,
            steps,
            methods,
            numeric,
            output,
        } => {
            let p = problem(&model, &ends, &numeric)?;
            let times = commands::scan_times(t_min, t_max, steps)?;
            let format = output.format.unwrap_or(Format::Csv);
            commands::cmd_scan(&p, &times, &methods.list(), format, &mut *open(&output)?)
        }
        Command::Morse {
            model,
            ends,
            t,
            numeric,
            output,
        } => {
            let p = problem(&model, &ends, &numeric)?;
            let format = output.format.unwrap_or(Format::Json);
            commands::cmd_morse(&p, t, format, &mut *open(&output)?)
        }
        Command::Interfere {
            m,
            omega,
            hbar,
            t_a,
            t_b,
            width,
            x1,
            x2,
            numeric,
            output,
        } => {
            for (name, v) in [("--m", m), ("--omega", omega), ("--hbar", hbar), ("--width", width)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(usage(format!("{name} must be > 0, got {v}")).into());
                }
            }
            let mut config = InterferenceConfig::standard(m, omega, hbar);
            config.width = width;
            for (arm, t) in config.arms.iter_mut().zip([t_a, t_b]) {
                if let Some(t) = t {
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(usage(format!("arm durations must be > 0, got {t}")).into());
                    }
                    arm.duration = t;
                }
                arm.source = x1;
                arm.detector = x2;
            }
            let cfg = numeric.config()?;
            let format = output.format.unwrap_or(Format::Json);
            commands::cmd_interfere(&config, &cfg, format, &mut *open(&output)?)
        }
    }
}

fn problem(model: &args::ModelArgs, ends: &args::Endpoints, numeric: &args::NumericArgs) -> Result<Problem> {
    let model = model.build()?;
    let (x1, x2) = ends.points(&model)?;
    Ok(Problem {
        model,
        x1,
        x2,
        cfg: numeric.config()?,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast::<clap::Error>() {
            Ok(usage) => usage.exit(),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}
