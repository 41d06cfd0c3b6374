use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hydromag",
    version,
    about = "Hydrogen in a uniform magnetic field: series solves, scans, densities and classical checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binding and total energy of one state.
    Energy {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        controls: ControlArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Levels over a range of γ.
    Scan(ScanArgs),
    /// |Ψ|² on a cylindrical (ρ, z) grid.
    Density {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        controls: ControlArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form levels and field conversions.
    Spectrum(SpectrumArgs),
    /// Classical Poisson-bracket and conservation suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Settings file, either key=value lines or a JSON object.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Include wall-clock time in the emitted record.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, default_value_t = 0)]
    pub nu: u8,
    /// Field in atomic units B/B₀, as a decimal string.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "gauss")]
    pub gamma: Option<String>,
    /// Field in gauss.
    #[arg(long, allow_negative_numbers = true)]
    pub gauss: Option<f64>,
    /// Counted from the most bound state of the sector, starting at 1.
    #[arg(long, default_value_t = 1)]
    pub index: usize,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ControlArgs {
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long)]
    pub imax: Option<usize>,
    /// Number of free constants P.
    #[arg(long)]
    pub nconst: Option<usize>,
    #[arg(long)]
    pub rmatch: Option<f64>,
    #[arg(long)]
    pub ebtol: Option<f64>,
    /// Largest refinement change of E_b accepted as converged.
    #[arg(long)]
    pub convtol: Option<f64>,
    /// Skip the refinement solves.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub z_max: Option<f64>,
    #[arg(long, default_value_t = 81)]
    pub n_rho: usize,
    #[arg(long, default_value_t = 81)]
    pub n_z: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_lo: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_hi: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Sector as m,nu; repeat for several.
    #[arg(long = "sector", value_parser = parse_sector, default_value = "0,0", allow_negative_numbers = true)]
    pub sectors: Vec<(i32, u8)>,
    /// Levels 1..=N of each sector.
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub controls: ControlArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Principal quantum number n.
    #[arg(long)]
    pub bohr: Option<u64>,
    /// Landau index N; needs --gamma or --gauss.
    #[arg(long)]
    pub landau: Option<u64>,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "gauss")]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gauss: Option<f64>,
    /// Effective-field preset (Ge, InSb).
    #[arg(long)]
    pub material: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite to run; repeat for several. All suites run by default.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Integrator tolerance for the drift suites.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_sector(s: &str) -> Result<(i32, u8), String> {
    let (m, nu) = s.split_once(',').ok_or_else(|| format!("expected m,nu, got `{s}`"))?;
    let m = m.trim().parse().map_err(|e| format!("bad m in `{s}`: {e}"))?;
    let nu = nu.trim().parse().map_err(|e| format!("bad nu in `{s}`: {e}"))?;
    Ok((m, nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sectors_parse() {
        assert_eq!(parse_sector("0,0"), Ok((0, 0)));
        assert_eq!(parse_sector("-2, 1"), Ok((-2, 1)));
        assert!(parse_sector("1").is_err());
        assert!(parse_sector("a,0").is_err());
    }

    #[test]
    fn negative_values_reach_validation() {
        let cli = Cli::try_parse_from(["hydromag", "energy", "--gamma", "-1", "--m", "-1"]).unwrap();
        let Command::Energy { state, .. } = cli.command else { panic!() };
        assert_eq!(state.gamma.as_deref(), Some("-1"));
        assert_eq!(state.m, -1);
    }

    #[test]
    fn field_flags_conflict() {
        assert!(Cli::try_parse_from(["hydromag", "energy", "--gamma", "1", "--gauss", "1"]).is_err());
    }

    #[test]
    fn command_is_required() {
        assert!(Cli::try_parse_from(["hydromag"]).is_err());
    }
}
