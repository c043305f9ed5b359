//! Command-line driver: argument grammar, configuration, output rendering.
//!
//! Precision knobs resolve as flags, then environment variables, then the
//! `--config` file, then built-in defaults:
//!
//! | knob            | flag                | environment                | range        | default |
//! |-----------------|---------------------|----------------------------|--------------|---------|
//! | Hahn cap        | `--hahn-cap`        | `TEICHLAB_HAHN_CAP`        | `(0, 64]`    | `8`     |
//! | coefficient `k` | `--coeff-degree`    | `TEICHLAB_COEFF_DEGREE`    | `1..=12`     | `12`    |
//! | p-adic `N`      | `--padic-precision` | `TEICHLAB_PADIC_PRECISION` | `1..=256`    | `20`    |
//! | Witt length     | `--witt-length`     | `TEICHLAB_WITT_LENGTH`     | `1..=3`      | `3`     |
//! | grid            | `--grid`            | `TEICHLAB_GRID`            | `64..=2^20`  | `4096`  |
//!
//! Exit codes: `0` success, `1` invalid input, `2` a property check failed,
//! `64` usage error.

mod commands;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::arith::parse_rational;
use crate::error::{Error, Result};
use crate::numfield::NumberField;
use crate::tilt::Exponent;

pub use output::{Cell, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "teichlab", version, about = "Arithmetic Teichmüller laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base field: `Q`, `Q(i)`, `Q(sqrt(-d))`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "TEICHLAB_HAHN_CAP")]
    pub hahn_cap: Option<String>,
    #[arg(long, global = true, env = "TEICHLAB_COEFF_DEGREE")]
    pub coeff_degree: Option<usize>,
    #[arg(long, global = true, env = "TEICHLAB_PADIC_PRECISION")]
    pub padic_precision: Option<u32>,
    #[arg(long, global = true, env = "TEICHLAB_WITT_LENGTH")]
    pub witt_length: Option<usize>,
    #[arg(long, global = true, env = "TEICHLAB_GRID")]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Places of the field up to a bound.
    Places {
        #[arg(long, default_value_t = 30)]
        bound: u64,
    },
    /// Height of a point at `φ^m(x · y₀)`.
    Height(HeightArgs),
    /// Sampled stabilized height.
    StabilizedHeight(HeightArgs),
    /// Beltrami data and distances along the Frobenius orbit of `x · y₀`.
    Orbit {
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        m_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        m_max: i64,
        #[arg(long, default_value_t = 7)]
        bound: u64,
    },
    /// The classical product formula for one element.
    ProductFormula {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Distance between two arithmeticoids.
    Distance {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m1: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        m2: i64,
        #[arg(long, allow_hyphen_values = true)]
        x1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<String>,
        /// JSON arithmeticoid replacing the first point.
        #[arg(long)]
        a: Option<PathBuf>,
        /// JSON arithmeticoid replacing the second point.
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Normalization coordinate and hyperplane equations.
    PeriodMap {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        frobenius: i64,
        #[arg(long, default_value_t = 13)]
        bound: u64,
        /// Elements whose hyperplane equation is checked.
        #[arg(long, allow_hyphen_values = true)]
        x: Vec<String>,
    },
    /// Principal and value divisors.
    Frobenioid {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        frobenius: i64,
    },
    /// Arithmetic degree of an ideloid.
    Degree {
        /// Place label such as `v5` or `v5'`.
        #[arg(long)]
        place: Option<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        order: String,
        /// Multiply by the principal ideloid of `x`.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        frobenius: i64,
    },
    #[command(subcommand)]
    Cohomology(CohomologyCommand),
    #[command(subcommand)]
    Tilt(TiltCommand),
    #[command(subcommand)]
    Szpiro(SzpiroCommand),
    /// Invert the first `r` Tate parameters.
    Mutate {
        /// `label=|q|`, e.g. `q1=1/9`.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Debug, Args)]
pub struct HeightArgs {
    /// Coordinates; one value is the point `(z : 1)`.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub z: Vec<String>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub frobenius: i64,
    /// Act on `y₀` by this element first.
    #[arg(long, allow_hyphen_values = true)]
    pub act: Option<String>,
    /// JSON arithmeticoid replacing `y₀`.
    #[arg(long)]
    pub arithmeticoid: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CohomologyCommand {
    /// Kummer class of `x` at a place.
    Kummer {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        place: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// The class of a curve from its Tate and Schottky parameters.
    TateClass {
        /// `place=q`, e.g. `v3=243`.
        #[arg(long = "param")]
        params: Vec<String>,
        /// `re,im`.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Collate classes under per-label transforms read from JSON.
    Collate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum TiltCommand {
    /// Evaluate the Artin–Hasse exponential at a Hahn series.
    Eval {
        #[arg(long)]
        p: u64,
        /// Terms `c*t^e` joined by `+`, coefficients in the prime field.
        #[arg(long)]
        a: String,
    },
    /// Artin–Hasse coefficients and their integrality.
    ArtinHasse {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        degree: usize,
    },
    /// Witt ring identities on random Teichmüller lifts.
    WittCheck {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SzpiroCommand {
    /// Height of a lift of an `SL2(ℝ)` matrix.
    Height {
        /// `a,b,c,d`.
        #[arg(long, default_value = "1,0,0,1", allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        winding: i64,
    },
    /// Subadditivity on random pairs.
    Subadd {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Schottky parameter and theta values.
    Theta {
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        tau: String,
        #[arg(long, default_value_t = 5)]
        ell: u64,
    },
    /// The chain `|Θ| ≥ Σ h ≥ h(Π)` on random monodromy.
    Cor312 {
        #[arg(long, default_value_t = 5)]
        ell: u64,
        #[arg(long, default_value_t = 3)]
        punctures: usize,
        #[arg(long, default_value_t = 0)]
        genus: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// A window of the log-Θ lattice.
    Lattice {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n_min: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        n_max: i64,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        m_min: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        m_max: i64,
        #[arg(long, default_value_t = 5)]
        ell: u64,
    },
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: Option<String>,
    pub hahn_cap: Option<String>,
    pub coeff_degree: Option<usize>,
    pub padic_precision: Option<u32>,
    pub witt_length: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

/// Fully resolved settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub field: NumberField,
    pub hahn_cap: Exponent,
    pub coeff_degree: usize,
    pub padic_precision: u32,
    pub witt_length: usize,
    pub grid: usize,
    pub seed: u64,
    pub format: Format,
}

impl Config {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)?
            }
            None => ConfigFile::default(),
        };
        let field_spec = args.field.clone().or(file.field).unwrap_or_else(|| "Q".into());
        let cap_text = args.hahn_cap.clone().or(file.hahn_cap).unwrap_or_else(|| "8".into());
        let cap = parse_rational(&cap_text)?;
        let hahn_cap = Exponent::new(
            i64::try_from(cap.numer()).map_err(|_| Error::Parse(cap_text.clone()))?,
            i64::try_from(cap.denom()).map_err(|_| Error::Parse(cap_text.clone()))?,
        );
        let cfg = Config {
            field: NumberField::parse(&field_spec)?,
            hahn_cap,
            coeff_degree: args.coeff_degree.or(file.coeff_degree).unwrap_or(12),
            padic_precision: args.padic_precision.or(file.padic_precision).unwrap_or(20),
            witt_length: args.witt_length.or(file.witt_length).unwrap_or(3),
            grid: args.grid.or(file.grid).unwrap_or(crate::szpiro::DEFAULT_GRID),
            seed: args.seed.or(file.seed).unwrap_or(0),
            format: args.format.or(file.format).unwrap_or(Format::Table),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if self.hahn_cap <= Exponent::from_integer(0) || self.hahn_cap > Exponent::from_integer(64) {
            return bad("hahn cap must lie in (0, 64]");
        }
        if !(1..=12).contains(&self.coeff_degree) {
            return bad("coefficient degree must lie in 1..=12");
        }
        if !(1..=256).contains(&self.padic_precision) {
            return bad("p-adic precision must lie in 1..=256");
        }
        if !(1..=crate::tilt::MAX_WITT_LENGTH).contains(&self.witt_length) {
            return bad("Witt length must lie in 1..=3");
        }
        if !(64..=1 << 20).contains(&self.grid) {
            return bad("grid must lie in 64..=1048576");
        }
        Ok(())
    }
}

/// Parse `argv`, run, write to `out`, and return the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = Config::resolve(&cli.global).and_then(|cfg| {
        let report = commands::execute(&cli.command, &cfg)?;
        Ok((cfg, report))
    });
    match outcome {
        Ok((cfg, report)) => {
            let _ = out.write_all(report.render(cfg.format).as_bytes());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
