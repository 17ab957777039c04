use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lhsphere",
    version,
    about = "Decay rates, reflection coefficients, resonances and ray fans for magnetodielectric spheres"
)]
pub struct Cli {
    /// key=value file supplying defaults for long flags; explicit flags win
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output format (default csv; svg for ray plots)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to a file instead of stdout
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized E1/M1 decay rates over a ka or rho sweep
    Rates(RatesArgs),
    /// Reflection coefficient q_n (TM) or p_n (TE) over a ka sweep
    Mie(MieArgs),
    /// Resonance table: asymptotic estimates, polished roots and Q
    Modes(ModesArgs),
    /// Ray fan through the sphere
    Rays(RaysArgs),
    /// Regenerate a figure preset
    Figure(FigureArgs),
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Debug, Clone, Args)]
pub struct MediaArgs {
    /// Sphere permittivity, `re` or `re+imj`
    #[arg(long, default_value = "1", value_parser = complex, allow_hyphen_values = true)]
    pub eps1: Complex64,
    /// Sphere permeability
    #[arg(long, default_value = "1", value_parser = complex, allow_hyphen_values = true)]
    pub mu1: Complex64,
    /// Host permittivity
    #[arg(long, default_value = "1", value_parser = complex, allow_hyphen_values = true)]
    pub eps2: Complex64,
    /// Host permeability
    #[arg(long, default_value = "1", value_parser = complex, allow_hyphen_values = true)]
    pub mu2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    Ka,
    Rho,
}

#[derive(Debug, Clone, Args)]
pub struct KaRange {
    #[arg(long, default_value_t = 0.05)]
    pub ka_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub ka_max: f64,
    /// Grid points, endpoints included
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    E1Radial,
    E1Tangential,
    M1Radial,
    M1Tangential,
    E1Average,
    M1Average,
}

impl Quantity {
    pub fn column(&self) -> &'static str {
        match self {
            Quantity::E1Radial => "e1_radial",
            Quantity::E1Tangential => "e1_tangential",
            Quantity::M1Radial => "m1_radial",
            Quantity::M1Tangential => "m1_tangential",
            Quantity::E1Average => "e1_average",
            Quantity::M1Average => "m1_average",
        }
    }
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub media: MediaArgs,
    /// Swept variable
    #[arg(long, value_enum, default_value_t = Vary::Ka)]
    pub vary: Vary,
    #[command(flatten)]
    pub ka: KaRange,
    /// Emitter distance r/a for ka sweeps
    #[arg(long, default_value_t = 1.001)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.001)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub rho_max: f64,
    /// Size parameter for rho sweeps
    #[arg(long = "ka", default_value_t = 1.0)]
    pub ka_fixed: f64,
    /// Columns to compute (default: the four oriented rates)
    #[arg(long, value_enum, value_delimiter = ',')]
    pub only: Vec<Quantity>,
    #[arg(long, default_value_t = lhsphere::decay::DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = lhsphere::decay::DEFAULT_ORDER_CAP)]
    pub n_cap: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pol {
    Tm,
    Te,
}

impl From<Pol> for lhsphere::Polarization {
    fn from(p: Pol) -> Self {
        match p {
            Pol::Tm => lhsphere::Polarization::Tm,
            Pol::Te => lhsphere::Polarization::Te,
        }
    }
}

#[derive(Debug, Args)]
pub struct MieArgs {
    #[command(flatten)]
    pub media: MediaArgs,
    #[command(flatten)]
    pub ka: KaRange,
    /// Multipole order
    #[arg(long, short, default_value_t = 1)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Pol::Te)]
    pub pol: Pol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindFilter {
    /// Surface modes for a left-handed sphere, everything otherwise
    Auto,
    Surface,
    Volume,
    All,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub media: MediaArgs,
    #[arg(long, default_value_t = 0.05)]
    pub ka_min: f64,
    #[arg(long, default_value_t = 2.5)]
    pub ka_max: f64,
    /// Seed-scan resolution
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[arg(long)]
    pub n_min: Option<u32>,
    /// Defaults to ceil(n_max) + 5, at least 5, at most 200
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Pol::Tm, Pol::Te])]
    pub pol: Vec<Pol>,
    #[arg(long, value_enum, default_value_t = KindFilter::Auto)]
    pub kind: KindFilter,
}

#[derive(Debug, Args)]
pub struct RaysArgs {
    #[command(flatten)]
    pub media: MediaArgs,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    pub source_x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub source_y: f64,
    #[arg(long, default_value_t = 61)]
    pub fan: u32,
    #[arg(long, default_value_t = 8)]
    pub bounces: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
}

/// Parses `re`, `re+imj`, `re-imj` (also with `i`), or a pure `imj`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let bad = || format!("expected `re` or `re+imj`, got `{s}`");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t
            .parse::<f64>()
            .ok()
            .filter(|re| re.is_finite())
            .map(|re| Complex64::new(re, 0.0))
            .ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "+" | "" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    let v = Complex64::new(re, im);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

/// Appends `--key=value` for every config entry whose flag is accepted by
/// the chosen subcommand and not already present on the command line.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let strings: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strings.iter().enumerate() {
        if a == "--config" {
            path = strings.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;

    let command = Cli::command();
    let sub_name = strings
        .iter()
        .skip(1)
        .find(|a| command.find_subcommand(a.as_str()).is_some());
    let Some(sub) = sub_name.and_then(|n| command.find_subcommand(n.as_str())) else {
        return Ok(argv);
    };
    let accepted: Vec<String> = sub
        .get_arguments()
        .chain(command.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    let all_known: Vec<String> = command
        .get_subcommands()
        .flat_map(|s| s.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();

    let mut out = argv;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim().trim_start_matches("--"), v.trim()))
            .ok_or_else(|| CliError::Usage(format!("{path}:{}: expected key=value", lineno + 1)))?;
        if key == "config" {
            continue;
        }
        if !all_known.iter().any(|k| k == key) {
            return Err(CliError::Usage(format!("{path}:{}: unknown key `{key}`", lineno + 1)));
        }
        if !accepted.iter().any(|k| k == key) {
            continue;
        }
        let flag = format!("--{key}");
        let given = strings.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !given {
            out.push(format!("{flag}={value}").into());
        }
    }
    Ok(out)
}
