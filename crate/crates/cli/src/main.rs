//! `cubioid`: command-line access to the combinatorial and numerical tools.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubioid_core::config::Config;
use cubioid_core::Angle;
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cubioid", version, about = "Angle tripling, invariant gaps and cubic parameter slices")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; every pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with tolerance overrides; takes precedence over flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    tolerances: ToleranceFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ToleranceFlags {
    /// Escape radius for the Böttcher product [default: 1e8]
    #[arg(long, global = true)]
    r_big: Option<f64>,
    /// Tail diameter for a landed ray [default: 1e-8]
    #[arg(long, global = true)]
    land_tol: Option<f64>,
    /// Critical-value distance for a crashed ray [default: 1e-9]
    #[arg(long, global = true)]
    crash_tol: Option<f64>,
    /// Newton step tolerance [default: 1e-13]
    #[arg(long, global = true)]
    newton_tol: Option<f64>,
    /// Newton iteration cap [default: 64]
    #[arg(long, global = true)]
    max_newton: Option<usize>,
    /// Escape iteration budget [default: 5000]
    #[arg(long, global = true)]
    escape_iter: Option<usize>,
    /// Ray steps per level [default: 8]
    #[arg(long, global = true)]
    steps_per_level: Option<usize>,
    /// Landing separation for co-landing rays [default: 1e-3]
    #[arg(long, global = true)]
    wake_tol: Option<f64>,
}

impl ToleranceFlags {
    fn apply(&self, cfg: &mut Config) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(r_big, land_tol, crash_tol, newton_tol, max_newton, escape_iter, steps_per_level, wake_tol);
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holes of the principal parameter gap up to a period.
    QAtlas {
        #[arg(long)]
        max_period: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also draw the holes as chords.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        size: u32,
    },
    /// The quadratic invariant gap generated by a critical chord.
    Gaps {
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        theta: Angle,
        /// Pullback depth for the vertex set.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        max_period: usize,
        /// Vertices at which to evaluate the semiconjugacy.
        #[arg(long, value_parser = parse_angle, value_delimiter = ',')]
        psi: Vec<Angle>,
        /// Include the vassal gap (periodic gaps only).
        #[arg(long)]
        vassal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type-D finite gaps of a rotation number with their parameter holes.
    Typed {
        #[arg(long, value_parser = parse_rotation)]
        rotation: (u64, u64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The multiplier polynomial of a rotation number.
    Tpoly {
        #[arg(long, value_parser = parse_rotation)]
        rotation: (u64, u64),
        #[arg(long)]
        roots: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a dynamic ray (with --b) or a parameter ray (with --param) as CSV.
    TraceRay {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required_unless_present = "param")]
        b: Option<Complex64>,
        #[arg(long, conflicts_with = "b")]
        param: bool,
        #[arg(long, value_parser = parse_angle)]
        theta: Angle,
        /// Depth in levels; each level divides the potential by 3.
        #[arg(long, default_value_t = 20.0, conflicts_with = "potential")]
        depth: f64,
        /// Final potential instead of a depth.
        #[arg(long)]
        potential: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the λ-slice in the b-plane as PNG with a JSON sidecar.
    RenderSlice {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
        center: Complex64,
        #[arg(long, default_value_t = 6.0)]
        width: f64,
        #[arg(long, value_parser = parse_resolution, default_value = "512x512")]
        res: (u32, u32),
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Parameter rays to overlay.
        #[arg(long, value_parser = parse_angle, value_delimiter = ',')]
        rays: Vec<Angle>,
        /// Potential down to which overlaid rays are traced.
        #[arg(long, default_value_t = 1e-4)]
        ray_potential: f64,
        /// Mark the roots of this multiplier polynomial.
        #[arg(long, value_parser = parse_rotation)]
        tpoly: Option<(u64, u64)>,
        #[arg(long)]
        png: PathBuf,
    },
    /// Trace both boundary rays of a wake and compare their landing estimates.
    WakeCheck {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_parser = parse_hole)]
        hole: (Angle, Angle),
        /// Potential at which the ray points are compared.
        #[arg(long, default_value_t = 1e-6)]
        potential: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_angle(s: &str) -> Result<Angle, String> {
    s.trim().parse::<Angle>().map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Complex64::new(f(re)?, f(im)?))
}

fn parse_rotation(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| format!("expected p/q but got {s:?}"))?;
    let f = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((f(p)?, f(q)?))
}

fn parse_resolution(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH but got {s:?}"))?;
    let f = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    Ok((f(w)?, f(h)?))
}

fn parse_hole(s: &str) -> Result<(Angle, Angle), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected θ₁,θ₂ but got {s:?}"))?;
    Ok((parse_angle(a)?, parse_angle(b)?))
}

/// Defaults, then flags, then the config file.
fn resolve_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    cli.tolerances.apply(&mut cfg);
    if let Some(path) = &cli.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        let overrides: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut merged = serde_json::to_value(cfg)?;
        let fields = merged.as_object_mut().expect("config serializes to an object");
        for (k, v) in overrides {
            if !fields.contains_key(&k) {
                return Err(CliError::Usage(format!("config {}: unknown key {k:?}", path.display())));
            }
            fields.insert(k, v);
        }
        cfg = serde_json::from_value(merged)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(argv: Vec<String>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.render().to_string().trim().to_string()));
        }
    };
    let cfg = resolve_config(&cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let header = output::Header::new(argv, cfg);
    commands::dispatch(&cli.command, &header)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match run(argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
