//! `quadcurl`: source solves, eigenvalue solves and convergence studies.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 solver failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadcurl_core::harness::{
    convergence_study, eigen_levels, eigen_study, solve_manufactured, source_mesh, write_eigen_csv, write_source_csv,
};
use quadcurl_core::{Domain, Error, MeshKind, SpectralOrder};

#[derive(Parser)]
#[command(name = "quadcurl", version, about = "Conforming spectral elements for the quad-curl problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Square,
    Lshape,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshArg {
    Uniform,
    Perturbed,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Source,
    Eigen,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the manufactured source problem and report its errors.
    Solve {
        #[arg(long, value_enum, default_value = "square")]
        domain: DomainArg,
        #[arg(long, value_enum, default_value = "uniform")]
        mesh: MeshArg,
        /// Mesh size as 1/n or a decimal.
        #[arg(long, default_value = "1/10", value_parser = parse_h)]
        h: usize,
        /// L,M,N or a single N for (N,N,N).
        #[arg(long, default_value = "3,4,3", value_parser = parse_order)]
        order: SpectralOrder,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Gauss points per direction for the element integrals.
        #[arg(long)]
        quad: Option<usize>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest eigenvalues of the quad-curl operator.
    Eigen {
        #[arg(long, value_enum, default_value = "square")]
        domain: DomainArg,
        #[arg(long, default_value = "1/10", value_parser = parse_h)]
        h: usize,
        #[arg(long, default_value = "4", value_parser = parse_order)]
        order: SpectralOrder,
        #[arg(long, default_value_t = 5)]
        num: usize,
        #[arg(long)]
        shift: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a study over meshes halving h from the base size.
    Study {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "square")]
        domain: DomainArg,
        #[arg(long, value_enum, default_value = "uniform")]
        mesh: MeshArg,
        /// Base mesh size; defaults to 1/10 for source, 1/5 (square) or 1/4 (L-shape) for eigen.
        #[arg(long, value_parser = parse_h)]
        h: Option<usize>,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value = "3,4,3", value_parser = parse_order)]
        order: SpectralOrder,
        #[arg(long, default_value_t = 5)]
        num: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Cells per unit length for h given as "1/n" or a decimal.
fn parse_h(s: &str) -> Result<usize, String> {
    let h = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) =
                (a.trim().parse().map_err(|_| "bad numerator")?, b.trim().parse().map_err(|_| "bad denominator")?);
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("cannot parse mesh size {s:?}"))?,
    };
    if !(h.is_finite() && h > 0.0 && h <= 1.0) {
        return Err(format!("mesh size must lie in (0, 1], got {s}"));
    }
    let n = (1.0 / h).round();
    if (n * h - 1.0).abs() > 1e-9 {
        return Err(format!("1/h must be an integer, got h = {s}"));
    }
    Ok(n as usize)
}

fn parse_order(s: &str) -> Result<SpectralOrder, String> {
    let parts: Vec<usize> =
        s.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    match parts[..] {
        [n] => SpectralOrder::uniform(n),
        [l, m, n] => SpectralOrder::new(l, m, n),
        _ => return Err("expected N or L,M,N".into()),
    }
    .map_err(|e| e.to_string())
}

fn domain(d: DomainArg) -> Domain {
    match d {
        DomainArg::Square => Domain::Square,
        DomainArg::Lshape => Domain::LShape,
    }
}

fn mesh_kind(m: MeshArg) -> MeshKind {
    match m {
        MeshArg::Uniform => MeshKind::Uniform,
        MeshArg::Perturbed => MeshKind::Perturbed,
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve { domain: d, mesh, h, order, seed, quad, out } => {
            if matches!(d, DomainArg::Lshape) {
                return Err(Error::InvalidParameter("the manufactured source problem is posed on the square".into()));
            }
            let mesh = source_mesh(mesh_kind(mesh), h, seed)?;
            let (_, sol, mut report) = solve_manufactured(&mesh, order, quad)?;
            report.h = 1.0 / h as f64;
            eprintln!(
                "dofs {} relative residual {:.2e} constraint residual {:.2e}",
                report.dofs, sol.relative_residual, sol.constraint_residual
            );
            write_source_csv(sink(&out)?, &[report])
        }
        Command::Eigen { domain: d, h, order, num, shift, out } => {
            let level = eigen_study(domain(d), h, order, num, shift)?;
            eprintln!("dofs {} iterations {} shift {}", level.n_u, level.solution.iterations, level.solution.shift);
            write_eigen_csv(sink(&out)?, &[level])
        }
        Command::Study { kind, domain: d, mesh, h, levels, order, num, seed, out } => match kind {
            KindArg::Source => {
                if matches!(d, DomainArg::Lshape) {
                    return Err(Error::InvalidParameter(
                        "the manufactured source problem is posed on the square".into(),
                    ));
                }
                let reports = convergence_study(mesh_kind(mesh), h.unwrap_or(10), levels, order, seed)?;
                write_source_csv(sink(&out)?, &reports)
            }
            KindArg::Eigen => {
                let d = domain(d);
                let base = h.unwrap_or(if d == Domain::Square { 5 } else { 4 });
                if levels < 1 {
                    return Err(Error::InvalidParameter("study needs at least one level".into()));
                }
                let results = eigen_levels(d, base, levels, order, num)?;
                write_eigen_csv(sink(&out)?, &results)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Singular(_) | Error::NoConvergence { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
