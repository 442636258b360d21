use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use xyvortex::degree::DegreeForm;
use xyvortex::render::LengthMode;
use xyvortex::runner::{execute, record_failure, Command, RunOptions, RunRecord, PRESETS};

#[derive(Parser, Debug)]
#[command(name = "xyvortex", version, about = "Vorticity and topological degree in the anisotropic quantum XY model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (JSON); takes precedence over --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named preset: fig1a, fig1b, fig1c, fig2, fig2a, fig3, fig4, table1, antiferro.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory (defaults to the config's `outputs`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross length mode; both modes are drawn when omitted.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Degree estimator form.
    #[arg(long, global = true, value_enum)]
    form: Option<Form>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Eigenvalues and integrated density of states.
    Spectrum,
    /// Vorticity fields and cross plots.
    Vorticity,
    /// Degree estimates along the configured contours.
    Degree,
    /// Degree table over d, k and contour.
    Table1,
    /// Compare fields at +beta and -beta.
    Antiferro,
    /// Calibrate the degree estimator on analytic fields.
    Oracle {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        degrees: Vec<i32>,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
        counts: Vec<usize>,
    },
    /// Redraw a figure from an exported field (.json) or IDOS curve (.csv).
    Render { input: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Log,
    Equal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Left,
    Right,
    Sym,
}

fn summarize(record: &RunRecord) {
    for s in &record.spectra {
        println!(
            "k={} d={}: dim {}, spectrum [{:.6}, {:.6}], kernel {}, symmetry defect {:.2e}",
            s.k,
            s.degree.map_or("free".to_string(), |d| d.to_string()),
            s.dim,
            s.min_eigenvalue,
            s.max_eigenvalue,
            s.kernel_count,
            s.symmetry_defect
        );
    }
    for d in &record.degrees {
        match d.estimate {
            Some(v) => println!("d={} k={} beta={} m={}: {:.4}", d.d_prescribed, d.k, d.beta, d.contour_m, v),
            None => println!(
                "d={} k={} beta={} m={}: {}",
                d.d_prescribed,
                d.k,
                d.beta,
                d.contour_m,
                d.error.as_deref().unwrap_or("-")
            ),
        }
    }
    for a in &record.antiferro {
        println!("k={} beta={}: max deviation {:.3e}, mean {:.3e}", a.k, a.beta, a.max_deviation, a.mean_deviation);
    }
    for o in &record.oracle {
        println!("oracle d={}: {:.6} ({} points), reversed {:.6}", o.degree, o.estimate, o.points, o.reversed);
    }
    println!("{} files written, {:.1} s", record.outputs.len(), record.elapsed_seconds);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Vorticity => Command::Vorticity,
        Cmd::Degree => Command::Degree,
        Cmd::Table1 => Command::Table1,
        Cmd::Antiferro => Command::Antiferro,
        Cmd::Oracle { degrees, counts } => Command::Oracle { degrees, counts },
        Cmd::Render { input } => Command::Render { input },
    };
    let mut options =
        match RunOptions::resolve(&command, cli.config.as_deref(), cli.preset.as_deref(), cli.out.as_deref()) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                if let Some(out) = &cli.out {
                    let _ = record_failure(&command, out, &e);
                }
                if cli.preset.is_some() {
                    eprintln!("known presets: {}", PRESETS.join(", "));
                }
                return ExitCode::from(e.exit_code() as u8);
            }
        };
    options.mode = cli.mode.map(|m| match m {
        Mode::Log => LengthMode::LogScale,
        Mode::Equal => LengthMode::Equal,
    });
    options.form = cli.form.map(|f| match f {
        Form::Left => DegreeForm::Left,
        Form::Right => DegreeForm::Right,
        Form::Sym => DegreeForm::Symmetrized,
    });

    let (record, result) = execute(&command, &options);
    summarize(&record);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
