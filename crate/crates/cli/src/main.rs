//! `verify`: run the verification suites and emit machine-readable reports.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure, 2 on a
//! configuration or usage error.

mod config;
mod report;
mod suites;
mod tables;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use report::Report;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "verify", version, about = "Verification suites for the graded star product, the quantization map, the quantum supertorus, and the action identity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of odd (Grassmann) generators.
    #[arg(long)]
    n: Option<usize>,
    /// Even dimension (must be even).
    #[arg(long)]
    m: Option<usize>,
    /// Deformation parameter a0 (theta = 1/a0).
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long = "alpha-re")]
    alpha_re: Option<f64>,
    #[arg(long = "alpha-im")]
    alpha_im: Option<f64>,
    /// Grid points per even axis (power of two).
    #[arg(long)]
    grid: Option<usize>,
    /// Half-extent of the even grid.
    #[arg(long)]
    extent: Option<f64>,
    /// Use the exact rational backend where supported.
    #[arg(long)]
    exact: bool,
    /// Run independent suites concurrently (only affects `all`).
    #[arg(long)]
    parallel: bool,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long = "tol-homomorphism")]
    tol_homomorphism: Option<f64>,
    #[arg(long = "tol-conjugation")]
    tol_conjugation: Option<f64>,
    #[arg(long = "tol-resolution")]
    tol_resolution: Option<f64>,
    #[arg(long = "tol-berezin")]
    tol_berezin: Option<f64>,
    #[arg(long = "tol-trace")]
    tol_trace: Option<f64>,
    #[arg(long = "tol-cyclicity")]
    tol_cyclicity: Option<f64>,
    #[arg(long = "tol-numeric")]
    tol_numeric: Option<f64>,
    #[arg(long = "tol-structural")]
    tol_structural: Option<f64>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Exterior algebra, Berezin integrals, and sign laws.
    Grassmann(CommonOpts),
    /// Graded symplectic forms and Darboux reduction.
    Symplectic(CommonOpts),
    /// Hilbert superspaces and the superadjoint.
    Hilbert(CommonOpts),
    /// Structure constants and the graded star product tables.
    Star(CommonOpts),
    /// The quantization map on the grid model.
    Quantization(CommonOpts),
    /// Factor sets and the Clifford equivalence.
    Clifford(CommonOpts),
    /// The quantum supertorus mode algebra.
    Torus(CommonOpts),
    /// The symbolic and numeric action-identity proofs.
    Qft(CommonOpts),
    /// Every suite in sequence.
    All(CommonOpts),
    /// Write structure-constant tables, factor sets, and canonical bases.
    DumpTables {
        #[command(flatten)]
        common: CommonOpts,
        /// Output directory for the JSON tables.
        #[arg(long, default_value = "tables")]
        out: PathBuf,
    },
}

fn build_config(opts: &CommonOpts) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        cfg.apply_file(path)?;
    }
    macro_rules! merge {
        ($($field:ident),*) => { $( if let Some(v) = opts.$field { cfg.$field = v; } )* };
    }
    merge!(n, m, a0, alpha_re, alpha_im, grid, extent);
    if opts.exact {
        cfg.exact = true;
    }
    if let Some(path) = &opts.json {
        cfg.json = Some(path.clone());
    }
    macro_rules! merge_tol {
        ($($flag:ident => $field:ident),*) => {
            $( if let Some(v) = opts.$flag { cfg.tol.$field = v; } )*
        };
    }
    merge_tol!(
        tol_homomorphism => homomorphism,
        tol_conjugation => conjugation,
        tol_resolution => resolution,
        tol_berezin => berezin,
        tol_trace => trace,
        tol_cyclicity => cyclicity,
        tol_numeric => numeric,
        tol_structural => structural
    );
    cfg.validate()?;
    Ok(cfg)
}

fn run(selected: &[&str], cfg: &RunConfig, parallel: bool) -> anyhow::Result<Report> {
    let suites = if parallel && selected.len() > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = selected
                .iter()
                .map(|name| scope.spawn(move || suites::run_suite(name, cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("suite thread panicked"))
                .collect::<anyhow::Result<Vec<_>>>()
        })?
    } else {
        selected
            .iter()
            .map(|name| suites::run_suite(name, cfg))
            .collect::<anyhow::Result<Vec<_>>>()?
    };
    Ok(Report {
        config: serde_json::to_value(cfg)?,
        suites,
    })
}

fn print_report(report: &Report) {
    for suite in &report.suites {
        for rec in &suite.checks {
            println!(
                "[{}] {:<10} {:<55} measured {:.3e} (tol {:.1e}, {:.0} ms)",
                if rec.passed() { "pass" } else { "FAIL" },
                suite.suite,
                rec.name,
                rec.measured,
                rec.tolerance,
                rec.runtime_ms,
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, selected, dump_out) = match &cli.command {
        Command::Grassmann(o) => (o, vec!["grassmann"], None),
        Command::Symplectic(o) => (o, vec!["symplectic"], None),
        Command::Hilbert(o) => (o, vec!["hilbert"], None),
        Command::Star(o) => (o, vec!["star"], None),
        Command::Quantization(o) => (o, vec!["quantization"], None),
        Command::Clifford(o) => (o, vec!["clifford"], None),
        Command::Torus(o) => (o, vec!["torus"], None),
        Command::Qft(o) => (o, vec!["qft"], None),
        Command::All(o) => (o, suites::SUITES.to_vec(), None),
        Command::DumpTables { common, out } => (common, vec![], Some(out.clone())),
    };

    let cfg = match build_config(opts) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };

    if let Some(out) = dump_out {
        return match tables::dump_tables(&cfg, &out) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", out.join(f).display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("dump-tables failed: {e:#}");
                ExitCode::from(1)
            }
        };
    }

    match run(&selected, &cfg, opts.parallel) {
        Ok(report) => {
            print_report(&report);
            if let Some(path) = &cfg.json {
                match serde_json::to_string_pretty(&report) {
                    Ok(text) => {
                        if let Err(e) = std::fs::write(path, text + "\n") {
                            eprintln!("writing report {}: {e}", path.display());
                            return ExitCode::from(1);
                        }
                    }
                    Err(e) => {
                        eprintln!("serializing report: {e}");
                        return ExitCode::from(1);
                    }
                }
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("suite failed to run: {e:#}");
            ExitCode::from(1)
        }
    }
}
