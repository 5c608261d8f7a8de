mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heis_cauchy::projection::{projected_parea, projected_parea_ambient, AmbientDirection, PansuDirection};
use heis_cauchy::surfaces::p_area;
use heis_cauchy::verify::{self, VerifyConfig, Which};
use heis_cauchy::{load_surface, Constants, Dim, Error, QuadratureSpec, SphereRule, Surface};

use output::{num, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "heis", version, about = "p-areas and projected p-areas in the Heisenberg groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    quad: QuadArgs,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuadArgs {
    #[arg(long, global = true, default_value_t = 256)]
    radial_nodes: usize,
    #[arg(long, global = true, default_value_t = 512)]
    angular_nodes: usize,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    mc_samples: u64,
    /// Seed for Monte Carlo streams and random directions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    rel_tol: f64,
    #[arg(long, value_enum, global = true, default_value_t = RuleArg::Auto)]
    sphere_rule: RuleArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Auto,
    ProductAngles,
    MonteCarlo,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            radial_nodes: self.radial_nodes,
            angular_nodes: self.angular_nodes,
            sphere_rule: match self.sphere_rule {
                RuleArg::Auto => SphereRule::Auto,
                RuleArg::ProductAngles => SphereRule::ProductAngles,
                RuleArg::MonteCarlo => SphereRule::MonteCarlo,
            },
            mc_samples: self.mc_samples,
            seed: self.seed,
            rel_tol: self.rel_tol,
            singular_endpoint: true,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print C_n, omega_{2n-1}, S_{2n-1} and the Pansu sphere p-area.
    Constants {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// p-area of a surface given as JSON.
    Parea {
        #[arg(long)]
        surface: PathBuf,
    },
    /// Projected p-areas along Pansu normals or ambient directions.
    Project {
        #[arg(long)]
        surface: PathBuf,
        /// Frame lambda of the Pansu sphere supplying the normals.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Comma-separated unit direction in the contact plane.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
              conflicts_with_all = ["alpha", "random_dirs"])]
        dir: Option<Vec<f64>>,
        /// Polar angle of u(0), radians (n = 1).
        #[arg(long, requires = "beta", allow_negative_numbers = true, conflicts_with = "random_dirs")]
        alpha: Option<f64>,
        /// Azimuth of u(0), radians (n = 1).
        #[arg(long, requires = "alpha", allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Number of uniformly random directions.
        #[arg(long)]
        random_dirs: Option<usize>,
    },
    /// Run one verification.
    Verify {
        #[arg(long)]
        which: WhichArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        surface: Option<PathBuf>,
        /// Directions (or unit vectors) to sample.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Override the default tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Fill the seconds column.
        #[arg(long)]
        timing: bool,
    },
    /// Run the full verification suite.
    ReportAll {
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum WhichArg {
    PansuProjection,
    Cauchy,
    Anydirection,
    RotationalConstancy,
    LemmaKr,
    ExpectedValue,
    PansuArea,
}

impl From<WhichArg> for Which {
    fn from(w: WhichArg) -> Which {
        match w {
            WhichArg::PansuProjection => Which::PansuProjection,
            WhichArg::Cauchy => Which::Cauchy,
            WhichArg::Anydirection => Which::Anydirection,
            WhichArg::RotationalConstancy => Which::RotationalConstancy,
            WhichArg::LemmaKr => Which::LemmaKr,
            WhichArg::ExpectedValue => Which::ExpectedValue,
            WhichArg::PansuArea => Which::PansuArea,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { .. }
            | Error::Expr(_)
            | Error::Io { .. }
            | Error::InvalidParameter { .. }
            | Error::NonUnitDirection(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidSurface(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HEIS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("HEIS_THREADS must be a non-negative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let spec = cli.quad.spec();
    spec.validate()?;
    let mut table = Table::new(&spec);
    let mut verification_failed = false;
    match cli.command {
        Command::Constants { n, lambda } => {
            let c = Constants::new(Dim::new(n)?, lambda)?;
            table.columns(&["n", "lambda", "c_n", "omega", "s", "pansu_area", "pansu_projection"]);
            table.row(vec![
                n.to_string(),
                num(lambda),
                num(c.c_n),
                num(c.omega),
                num(c.s),
                num(c.pansu_area()),
                num(c.pansu_projection()),
            ]);
        }
        Command::Parea { surface } => {
            let s = load_surface(&surface)?;
            let r = p_area(&s, &spec)?;
            table.columns(&["value", "error_estimate", "evaluations", "method", "flagged"]);
            table.row(vec![
                num(r.value),
                num(r.error_estimate),
                r.evaluations.to_string(),
                r.method.clone(),
                r.flagged.to_string(),
            ]);
        }
        Command::Project {
            surface,
            lambda,
            dir,
            alpha,
            beta,
            random_dirs,
        } => {
            let s = load_surface(&surface)?;
            project(&mut table, &s, lambda, dir, alpha.zip(beta), random_dirs, &spec)?;
        }
        Command::Verify {
            which,
            n,
            lambda,
            surface,
            samples,
            tol,
            timing,
        } => {
            let surface = surface.map(load_surface).transpose()?;
            let cfg = VerifyConfig {
                which: which.into(),
                n: Dim::new(n)?,
                lambda,
                surface,
                samples,
                seed: cli.quad.seed,
                quadrature: spec,
                tol,
                timing,
            };
            let report = verify::run(&cfg)?;
            verification_failed = !report.all_pass();
            table.report(report);
        }
        Command::ReportAll { timing } => {
            let cfg = VerifyConfig {
                seed: cli.quad.seed,
                quadrature: spec,
                timing,
                ..VerifyConfig::new(Which::PansuArea)
            };
            let report = verify::run_all(&cfg)?;
            verification_failed = !report.all_pass();
            table.report(report);
        }
    }
    let text = table.render(cli.format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::Usage(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{text}"),
    }
    if verification_failed {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

fn project(
    table: &mut Table,
    s: &Surface,
    lambda: f64,
    dir: Option<Vec<f64>>,
    angles: Option<(f64, f64)>,
    random_dirs: Option<usize>,
    spec: &QuadratureSpec,
) -> Result<(), Failure> {
    if let Some((alpha, beta)) = angles {
        if !(0.0..=PI).contains(&alpha) {
            return Err(Failure::Usage(format!("--alpha must lie in [0, pi], got {alpha}")));
        }
        let r = projected_parea_ambient(s, &AmbientDirection::new(alpha, beta)?, spec)?;
        table.columns(&["alpha", "beta", "value", "error_estimate", "evaluations", "method"]);
        table.row(vec![
            num(alpha),
            num(beta),
            num(r.value),
            num(r.error_estimate),
            r.evaluations.to_string(),
            r.method,
        ]);
        return Ok(());
    }
    let dirs = match (dir, random_dirs) {
        (Some(d), _) => vec![PansuDirection::from_dir(&d, lambda)?],
        (None, Some(k)) => PansuDirection::random(s.dim(), lambda, k, spec.seed)?,
        (None, None) => {
            let mut d = vec![0.0; s.dim().contact()];
            d[0] = 1.0;
            vec![PansuDirection::from_dir(&d, lambda)?]
        }
    };
    table.columns(&["index", "dir", "value", "error_estimate", "evaluations", "method"]);
    for (i, d) in dirs.iter().enumerate() {
        let r = projected_parea(s, d, spec)?;
        let dir: Vec<String> = d.dir.iter().map(|x| num(*x)).collect();
        table.row(vec![
            i.to_string(),
            dir.join(" "),
            num(r.value),
            num(r.error_estimate),
            r.evaluations.to_string(),
            r.method,
        ]);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
