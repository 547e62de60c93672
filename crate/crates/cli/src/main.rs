//! Batch command-line interface.
//!
//! Three subcommands: `decompose` extracts certified components and writes
//! a report file, `verify` checks residual equations and the identity
//! suite over a grid, `bound` evaluates certified bound series and the
//! closed-form constants.
//!
//! Exit codes: 0 success, 1 verification residuals above tolerance,
//! 2 convergence failures, 3 hypothesis failures (critical exponent,
//! divergent series, regime violations), 4 I/O or schema errors,
//! 64 malformed flags.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use stabilis_core::bounds::{
    bound_series, corollary_constant, BoundSeriesSpec, CorollaryId, SeriesKind,
};
use stabilis_core::canonical::to_canonical_string;
use stabilis_core::config::{probe_grid, Direction, DirectionChoice, ExtractionConfig};
use stabilis_core::diffops::{
    equation_residual, even_odd_split, verify_identity_suite, EquationKind,
};
use stabilis_core::envelope::PerturbationBound;
use stabilis_core::error::Error as CoreError;
use stabilis_core::function::{FunctionHandle, FunctionSpec};
use stabilis_core::space::{NormSpec, Point};
use stabilis_core::stability::{extract_all, resolve_series_direction};

#[derive(Parser)]
#[command(
    name = "stabilis",
    about = "Certified quadratic/cubic/quartic decomposition of approximately \
             polynomial functions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract certified components and write a JSON report.
    Decompose(DecomposeArgs),
    /// Check residual equations or the identity suite over a grid.
    Verify(VerifyArgs),
    /// Evaluate a certified bound series or a closed-form constant.
    Bound(BoundArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input function: `poly:a,b,c` or a path to a function JSON file.
    #[arg(long)]
    input: String,
    /// Perturbation envelope: `constant:EPS` or `power:THETA,P`. A
    /// pointwise perturbation bound `e` converts to `constant:106e` (106
    /// is the operator's absolute coefficient sum).
    #[arg(long)]
    phi: String,
    /// Scaling direction.
    #[arg(long, default_value = "auto")]
    direction: String,
    /// Stopping tolerance on successive-iterate deltas. Pick it at or
    /// above the noise scale of the input.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration cap per component.
    #[arg(long, default_value_t = 40)]
    max_iter: usize,
    /// Report output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV dump of (x, f, reconstruction, bound) columns.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Probe grid half-width.
    #[arg(long, default_value_t = 2.0)]
    grid_radius: f64,
    /// Probe points per axis.
    #[arg(long, default_value_t = 41)]
    grid_points: usize,
    /// Norm on the target space: `max` or `euclidean`.
    #[arg(long, default_value = "max")]
    norm: String,
    /// Largest admissible argument norm in dilation mode.
    #[arg(long, default_value_t = 1e12)]
    argument_cap: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Input function: `poly:a,b,c` or a path to a function JSON file.
    #[arg(long)]
    input: String,
    /// Which residual to check: `mixed`, `quadratic`, `cubic`, `quartic`,
    /// or `identities`.
    #[arg(long)]
    equation: String,
    /// Pair grid half-width.
    #[arg(long, default_value_t = 2.0)]
    grid_radius: f64,
    /// Pair grid points per axis.
    #[arg(long, default_value_t = 21)]
    grid_points: usize,
    /// Residual tolerance (scale-normalized).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Optional JSON output of the residual table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Perturbation envelope: `constant:EPS` or `power:THETA,P`.
    #[arg(long)]
    phi: String,
    /// Series id (`3.2`, `3.13`, `3.23`, `3.29`, `3.33`) or closed-form id
    /// (`cor3.6`, `cor3.11`, `cor3.12`).
    #[arg(long)]
    which: String,
    /// Probe point (comma-separated coordinates).
    #[arg(long, default_value = "1")]
    x: String,
    /// Number of series terms before the tail majorant.
    #[arg(long, default_value_t = 200)]
    terms: usize,
    /// Scaling direction.
    #[arg(long, default_value = "auto")]
    direction: String,
}

enum Failure {
    Core(CoreError),
    Io(String),
    ResidualExceeded,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Core(e)
    }
}

fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::NoConvergence { .. } | CoreError::ArgumentCap { .. } => 2,
        CoreError::CriticalExponent { .. }
        | CoreError::DivergentSeries { .. }
        | CoreError::Regime { .. } => 3,
        _ => 4,
    }
}

fn parse_input(input: &str) -> Result<FunctionHandle, Failure> {
    if let Some(rest) = input.strip_prefix("poly:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(Failure::Core(CoreError::InvalidInput(format!(
                "poly input needs three coefficients, got {input:?}"
            ))));
        }
        let mut coeffs = [0.0; 3];
        for (slot, text) in coeffs.iter_mut().zip(&parts) {
            *slot = text.trim().parse::<f64>().map_err(|_| {
                Failure::Core(CoreError::InvalidInput(format!(
                    "bad coefficient {text:?} in {input:?}"
                )))
            })?;
        }
        return Ok(FunctionHandle::poly1(coeffs[0], coeffs[1], coeffs[2])?);
    }
    let text = fs::read_to_string(input)
        .map_err(|e| Failure::Io(format!("cannot read {input:?}: {e}")))?;
    Ok(FunctionSpec::from_json(&text)?.to_handle()?)
}

fn parse_phi(text: &str) -> Result<PerturbationBound, Failure> {
    let bad = || {
        Failure::Core(CoreError::InvalidInput(format!(
            "bad envelope {text:?}; expected constant:EPS or power:THETA,P"
        )))
    };
    if let Some(eps) = text.strip_prefix("constant:") {
        let eps = eps.trim().parse::<f64>().map_err(|_| bad())?;
        return Ok(PerturbationBound::constant(eps)?);
    }
    if let Some(rest) = text.strip_prefix("power:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let theta = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let p = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        return Ok(PerturbationBound::power(theta, p)?);
    }
    Err(bad())
}

fn parse_direction(text: &str) -> Result<DirectionChoice, Failure> {
    match text {
        "auto" => Ok(DirectionChoice::Auto),
        "contraction" => Ok(DirectionChoice::Fixed(Direction::Contraction)),
        "dilation" => Ok(DirectionChoice::Fixed(Direction::Dilation)),
        other => Err(Failure::Core(CoreError::InvalidInput(format!(
            "bad direction {other:?}"
        )))),
    }
}

fn parse_norm(text: &str) -> Result<NormSpec, Failure> {
    match text {
        "max" | "max-coordinate" => Ok(NormSpec::MaxCoordinate),
        "euclidean" => Ok(NormSpec::Euclidean),
        other => Err(Failure::Core(CoreError::InvalidInput(format!(
            "bad norm {other:?}"
        )))),
    }
}

fn parse_point(text: &str) -> Result<Point, Failure> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords
        .map_err(|_| Failure::Core(CoreError::InvalidInput(format!("bad point {text:?}"))))?;
    Ok(Point::new(coords)?)
}

fn run_decompose(args: &DecomposeArgs) -> Result<(), Failure> {
    let f = parse_input(&args.input)?;
    let phi = parse_phi(&args.phi)?;
    let cfg = ExtractionConfig {
        direction: parse_direction(&args.direction)?,
        max_iterations: args.max_iter,
        tolerance: args.tol,
        norm: parse_norm(&args.norm)?,
        argument_cap: args.argument_cap,
        probe_radius: args.grid_radius,
        probe_points: args.grid_points,
    };
    let report = extract_all(&f, &phi, &cfg)?;
    for warning in &report.warnings {
        eprintln!("{warning}");
    }
    let text = to_canonical_string(&report.to_json());
    fs::write(&args.out, text)
        .map_err(|e| Failure::Io(format!("cannot write {:?}: {e}", args.out)))?;

    if let Some(plot) = &args.plot {
        if f.dim_in() != 1 || f.dim_out() != 1 {
            return Err(Failure::Core(CoreError::InvalidInput(
                "--plot requires a one-dimensional scalar function".into(),
            )));
        }
        let reconstruction = report.reconstruction()?;
        let shift = report.origin_shift.clone();
        let mut csv = String::from("x,f,reconstruction,bound\n");
        for (x, bound) in &report.certified_bound_at {
            let fx = f.eval(x)?.as_scalar()?;
            let mut rx = reconstruction.eval(x)?.as_scalar()?;
            if let Some(shift) = &shift {
                rx += shift.coords()[0];
            }
            csv.push_str(&format!(
                "{:.16e},{fx:.16e},{rx:.16e},{bound:.16e}\n",
                x.coords()[0]
            ));
        }
        fs::write(plot, csv).map_err(|e| Failure::Io(format!("cannot write {plot:?}: {e}")))?;
    }

    let max_bound = report
        .certified_bound_at
        .iter()
        .fold(0.0f64, |m, (_, b)| m.max(*b));
    println!(
        "residual_sup = {:.6e}, certified bound <= {:.6e}",
        report.residual_sup, max_bound
    );
    println!(
        "iterations: quadratic {} ({}), cubic {} ({}), quartic {} ({})",
        report.quadratic.iterations,
        report.quadratic.direction,
        report.cubic.iterations,
        report.cubic.direction,
        report.quartic.iterations,
        report.quartic.direction
    );
    println!("report written to {}", args.out.display());
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let f = parse_input(&args.input)?;
    if args.grid_points < 2 {
        return Err(Failure::Core(CoreError::InvalidInput(
            "--grid-points must be >= 2".into(),
        )));
    }
    let axis = probe_grid(f.dim_in(), args.grid_radius, args.grid_points);
    let pairs: Vec<(Point, Point)> = axis
        .iter()
        .flat_map(|x| axis.iter().map(move |y| (x.clone(), y.clone())))
        .collect();

    if args.equation == "identities" {
        let (fe, fo) = even_odd_split(&f)?;
        let report = verify_identity_suite(&fe, &fo, &pairs, args.tol)?;
        for entry in &report.entries {
            println!(
                "identity {}: max residual {:.6e} at x = {:?}, y = {:?}",
                entry.identity,
                entry.max_residual,
                entry.argmax.0.coords(),
                entry.argmax.1.coords()
            );
        }
        if let Some(out) = &args.out {
            let json = serde_json::to_value(&report.entries).map_err(CoreError::from)?;
            fs::write(out, to_canonical_string(&json))
                .map_err(|e| Failure::Io(format!("cannot write {out:?}: {e}")))?;
        }
        if report.pass() {
            return Ok(());
        }
        let worst = report.worst().expect("suite has entries");
        eprintln!(
            "FAIL: identity {} residual {:.6e} exceeds tolerance {:.6e}",
            worst.identity, worst.max_residual, args.tol
        );
        return Err(Failure::ResidualExceeded);
    }

    let kind: EquationKind = args
        .equation
        .parse()
        .map_err(|e: CoreError| Failure::Core(e))?;
    let mut worst = 0.0f64;
    let mut argmax = &pairs[0];
    for pair in &pairs {
        let r = equation_residual(kind, &f, &pair.0, &pair.1)?;
        let normalized = r.normalized(NormSpec::MaxCoordinate);
        if normalized > worst {
            worst = normalized;
            argmax = pair;
        }
    }
    println!(
        "{}: max residual {:.6e} at x = {:?}, y = {:?}",
        args.equation,
        worst,
        argmax.0.coords(),
        argmax.1.coords()
    );
    if let Some(out) = &args.out {
        let json = serde_json::json!({
            "equation": args.equation,
            "max_residual": worst,
            "argmax": [argmax.0.coords(), argmax.1.coords()],
        });
        fs::write(out, to_canonical_string(&json))
            .map_err(|e| Failure::Io(format!("cannot write {out:?}: {e}")))?;
    }
    if worst <= args.tol {
        Ok(())
    } else {
        eprintln!(
            "FAIL: residual {worst:.6e} exceeds tolerance {:.6e}",
            args.tol
        );
        Err(Failure::ResidualExceeded)
    }
}

fn series_direction(
    choice: DirectionChoice,
    phi: &PerturbationBound,
    series: SeriesKind,
) -> Result<Direction, Failure> {
    match choice {
        DirectionChoice::Fixed(d) => Ok(d),
        DirectionChoice::Auto => Ok(resolve_series_direction(phi, series)?),
    }
}

fn run_bound(args: &BoundArgs) -> Result<(), Failure> {
    let phi = parse_phi(&args.phi)?;
    let x = parse_point(&args.x)?;
    let choice = parse_direction(&args.direction)?;

    if let Ok(corollary) = args.which.parse::<CorollaryId>() {
        let (theta, p) = match phi {
            PerturbationBound::Power { theta, p } => (theta, p),
            PerturbationBound::Constant(eps) => (eps, 0.0),
            PerturbationBound::Custom { .. } => (1.0, 0.0),
        };
        let coefficient = corollary_constant(corollary, theta, p)?;
        println!("closed-form coefficient = {coefficient:.12e}");
        let (series_phi, factor, direction) = match corollary {
            CorollaryId::Cor3_6 => (phi.clone(), theta, Direction::Contraction),
            CorollaryId::Cor3_11 => (phi.clone(), theta, Direction::Dilation),
            CorollaryId::Cor3_12 => (phi.clone(), 1.0, Direction::Dilation),
        };
        let closed_form = match corollary {
            CorollaryId::Cor3_12 => match series_phi {
                PerturbationBound::Constant(eps) => coefficient * eps,
                _ => coefficient,
            },
            _ => {
                let norm = NormSpec::MaxCoordinate;
                coefficient * factor * stabilis_core::space::point_norm(&x, norm).powf(p)
            }
        };
        println!("closed-form value at x = {closed_form:.12e}");
        let spec = BoundSeriesSpec {
            which: SeriesKind::Full33,
            phi: series_phi,
            direction,
            norm: NormSpec::MaxCoordinate,
        };
        match bound_series(&spec, &x, args.terms) {
            Ok((partial, tail)) => {
                println!("series partial_sum = {partial:.12e}");
                println!("series tail_majorant = {tail:.12e}");
                println!("series total = {:.12e}", partial + tail);
                if corollary == CorollaryId::Cor3_12 {
                    println!(
                        "note: the exact series value is 263/210 per unit epsilon; the printed \
                         closed form 431/420 does not reproduce it, and certified bounds use \
                         the series"
                    );
                }
            }
            Err(CoreError::DivergentSeries { ratio }) => {
                println!(
                    "series diverges (term ratio {ratio}); no certifying series backs the \
                     closed form at this exponent"
                );
            }
            Err(e) => return Err(Failure::Core(e)),
        }
        return Ok(());
    }

    let which: SeriesKind = args.which.parse().map_err(Failure::Core)?;
    let direction = series_direction(choice, &phi, which)?;
    let spec = BoundSeriesSpec {
        which,
        phi,
        direction,
        norm: NormSpec::MaxCoordinate,
    };
    let (partial, tail) = bound_series(&spec, &x, args.terms)?;
    println!("direction = {direction}");
    println!("partial_sum = {partial:.12e}");
    println!("tail_majorant = {tail:.12e}");
    println!("total = {:.12e}", partial + tail);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Decompose(args) => run_decompose(args),
        Command::Verify(args) => run_verify(args),
        Command::Bound(args) => run_bound(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ResidualExceeded) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
