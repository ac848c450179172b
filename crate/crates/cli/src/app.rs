use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use oam_core::experiments::{self, ResultSet};
use oam_core::validate::{run_checks, FaultInjection};

use crate::config::{default_config, parse_config, ResolvedConfig};
use crate::output::{emit_results, OutputFormat};

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_RUNTIME: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "oamsim", version, about = "Misaligned multi-mode OAM link simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (TOML, or JSON by extension); defaults to the reference system
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Overrides the scenario seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for sweeps
    #[arg(long, global = true, env = "OAMSIM_THREADS")]
    pub threads: Option<usize>,

    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bessel arguments k_p R_r ρ and k_g R_r ρ per tilt
    Table2,
    /// Channel gain and interference of the focus mode at the lower band edge
    Table3,
    /// Focus-mode SINR across the band for several tilts
    Fig3,
    /// Mode-averaged gain and interference over a tilt grid
    Fig4,
    /// Spectral efficiency vs SNR for several tilts
    Fig5,
    /// Spectral efficiency vs SNR for two array sizes
    Fig6,
    /// Generic sweep over the axes in the scenario file
    Sweep,
    /// Run the numerical self-checks
    Validate {
        /// Corrupt one steering weight to exercise the failure path
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn load(cli: &Cli) -> Result<ResolvedConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path).map_err(|e| e.to_string())?,
        None => default_config(),
    };
    if let Some(seed) = cli.seed {
        cfg.scenario.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &ResolvedConfig) -> oam_core::Result<ResultSet> {
    let s = &cfg.scenario;
    let p = &cfg.presets;
    match cli.command {
        Command::Table2 => experiments::run_table2(s),
        Command::Table3 => experiments::run_table3(s),
        Command::Fig3 => experiments::run_fig3(s, p),
        Command::Fig4 => experiments::run_fig4(s),
        Command::Fig5 => experiments::run_fig5(s, p),
        Command::Fig6 => experiments::run_fig6(s, p),
        Command::Sweep => experiments::run_sweep(s),
        Command::Validate { .. } => unreachable!("validate has its own path"),
    }
}

fn validate(cli: &Cli, cfg: &ResolvedConfig, inject_fault: bool) -> ExitCode {
    let fault = FaultInjection {
        flip_weight_sign: inject_fault,
    };
    let checks = match run_checks(&cfg.scenario, fault) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<28} measured {:.3e}  tolerance {:.1e}", c.name, c.measured, c.tolerance);
        failed += usize::from(!c.passed);
    }
    if cli.verbose {
        eprintln!("{} checks, {failed} failed", checks.len());
    }
    if failed > 0 {
        ExitCode::from(EXIT_VALIDATION)
    } else {
        ExitCode::SUCCESS
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    let cfg = match load(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    eprintln!("seed: {}", cfg.scenario.seed);
    if let Command::Validate { inject_fault } = cli.command {
        return validate(cli, &cfg, inject_fault);
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let started = Instant::now();
    let rs = match pool.install(|| execute(cli, &cfg)) {
        Ok(rs) => rs,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    if cli.verbose {
        eprintln!(
            "{}: {} rows in {:.2?} on {} threads, fingerprint {}",
            rs.meta.name,
            rs.rows.len(),
            started.elapsed(),
            pool.current_num_threads(),
            rs.meta.fingerprint
        );
    }
    if let Err(e) = emit_results(&rs, cli.format, cli.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    ExitCode::SUCCESS
}
