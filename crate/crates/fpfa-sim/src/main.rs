use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fpfa_sim::config::ScenarioConfig;
use fpfa_sim::error::{Result, SimError};
use fpfa_sim::harness;

#[derive(Parser)]
#[command(
    name = "fpfa-sim",
    version,
    about = "Multi-user THz downlink simulator with movable-port user antennas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one drop and print per-user link reports.
    Drop(CommonArgs),
    /// Run the configured Monte Carlo sweep and write CSV, summary and plots.
    Sweep(CommonArgs),
    /// Run the invariant self-check suite on random instances.
    Validate(CommonArgs),
}

/// Configuration sources. Precedence: defaults, then the config file, then
/// the per-key flags, then --set pairs.
#[derive(Args)]
struct CommonArgs {
    /// Configuration file with key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override any configuration key, repeatable: --set users=32.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[arg(long = "band_centers_ghz", value_name = "GHZ,...")]
    band_centers_ghz: Option<String>,
    #[arg(long = "bandwidth_ratio")]
    bandwidth_ratio: Option<String>,
    #[arg(long = "antennas")]
    antennas: Option<String>,
    #[arg(long = "users")]
    users: Option<String>,
    #[arg(long = "ports")]
    ports: Option<String>,
    #[arg(long = "port_line_wavelengths")]
    port_line_wavelengths: Option<String>,
    #[arg(long = "tx_power_dbm")]
    tx_power_dbm: Option<String>,
    #[arg(long = "architectures", alias = "arch", value_name = "ARCH,...")]
    architectures: Option<String>,
    #[arg(long = "drops")]
    drops: Option<String>,
    #[arg(long = "seed")]
    seed: Option<String>,
    #[arg(long = "r_min_m")]
    r_min_m: Option<String>,
    #[arg(long = "cell_radius_m")]
    cell_radius_m: Option<String>,
    #[arg(long = "sector_deg")]
    sector_deg: Option<String>,
    #[arg(long = "bs_height_m")]
    bs_height_m: Option<String>,
    #[arg(long = "user_height_m")]
    user_height_m: Option<String>,
    #[arg(long = "paths")]
    paths: Option<String>,
    #[arg(long = "reflection_magnitude")]
    reflection_magnitude: Option<String>,
    #[arg(long = "reflection_phase_deg")]
    reflection_phase_deg: Option<String>,
    #[arg(long = "noise_figure_db")]
    noise_figure_db: Option<String>,
    #[arg(long = "pfa_band")]
    pfa_band: Option<String>,
    #[arg(long = "port_order")]
    port_order: Option<String>,
    #[arg(long = "sweep_axis", alias = "sweep")]
    sweep_axis: Option<String>,
    #[arg(long = "sweep_values", value_name = "VALUE,...")]
    sweep_values: Option<String>,
    #[arg(long = "out_dir", alias = "out-dir")]
    out_dir: Option<String>,
}

impl CommonArgs {
    fn flag_pairs(&self) -> Vec<(&'static str, &String)> {
        let entries: [(&'static str, &Option<String>); 24] = [
            ("band_centers_ghz", &self.band_centers_ghz),
            ("bandwidth_ratio", &self.bandwidth_ratio),
            ("antennas", &self.antennas),
            ("users", &self.users),
            ("ports", &self.ports),
            ("port_line_wavelengths", &self.port_line_wavelengths),
            ("tx_power_dbm", &self.tx_power_dbm),
            ("architectures", &self.architectures),
            ("drops", &self.drops),
            ("seed", &self.seed),
            ("r_min_m", &self.r_min_m),
            ("cell_radius_m", &self.cell_radius_m),
            ("sector_deg", &self.sector_deg),
            ("bs_height_m", &self.bs_height_m),
            ("user_height_m", &self.user_height_m),
            ("paths", &self.paths),
            ("reflection_magnitude", &self.reflection_magnitude),
            ("reflection_phase_deg", &self.reflection_phase_deg),
            ("noise_figure_db", &self.noise_figure_db),
            ("pfa_band", &self.pfa_band),
            ("port_order", &self.port_order),
            ("sweep_axis", &self.sweep_axis),
            ("sweep_values", &self.sweep_values),
            ("out_dir", &self.out_dir),
        ];
        entries
            .iter()
            .filter_map(|(key, value)| value.as_ref().map(|v| (*key, v)))
            .collect()
    }

    fn build(&self) -> Result<ScenarioConfig> {
        let mut config = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        for (key, value) in self.flag_pairs() {
            config.apply_pair(key, value)?;
        }
        for entry in &self.set {
            let (key, value) = entry.split_once('=').ok_or_else(|| {
                SimError::Config(format!("--set expects KEY=VALUE, got '{entry}'"))
            })?;
            config.apply_pair(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn cmd_drop(args: &CommonArgs) -> Result<bool> {
    let config = args.build()?;
    let reports = harness::run_drop_all(&config, config.seed)?;
    println!("drop with seed {} ({} users)", config.seed, config.users);
    for report in &reports {
        println!("{report}");
        for u in &report.users {
            println!(
                "       user {:>3}  band {}  port {:>3}  sinr {:>12.4e}  se {:>7.3} bit/s/Hz  {}",
                u.user,
                u.band,
                u.port,
                u.sinr,
                u.se,
                if u.served { "served" } else { "shed" }
            );
        }
    }
    Ok(true)
}

fn cmd_sweep(args: &CommonArgs) -> Result<bool> {
    let config = args.build()?;
    let result = harness::run_sweep(&config)?;
    print!("{}", result.summary_text());
    let written = harness::write_outputs(&config, &result)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn cmd_validate(args: &CommonArgs) -> Result<bool> {
    let config = args.build()?;
    let checks = harness::self_check(config.seed)?;
    let mut all_passed = true;
    for c in &checks {
        println!(
            "{} {:<42} {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
        all_passed &= c.passed;
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Drop(args) => cmd_drop(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
