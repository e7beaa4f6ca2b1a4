use std::io::{IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use opgeom::Method;
use opgeom_cli::{run, Command, Format, RunConfig, DEFAULT_BUDGET, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "opgeom", version, about = "Geometry of operators on finite-dimensional normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Operator-norm method for `norm-op`.
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Read JSON input from this file instead of standard input.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Norm of a vector: {space, v}
    Norm,
    /// Birkhoff-James orthogonality of x to y: {space, x, y, tol?}
    Bj,
    /// Operator norm: {operator}
    NormOp,
    /// Norm attainment set: {operator}
    Attain,
    /// Two-condition membership test for the attainment set: {operator, x}
    Thm21,
    /// Greedy orthogonality-preserving basis: {operator}
    Basis {
        /// Check the image Gram matrix and compare with the SVD.
        #[arg(long)]
        verify: bool,
    },
    /// Extreme-contraction verdict: {operator}
    Classify,
    /// Midpoint decomposition of a non-extreme contraction: {operator}
    Witness,
    /// Extreme non-isometry of a plane with a flat sphere segment
    Counterexample {
        /// Space JSON; otherwise {space} is read from the input.
        #[arg(long)]
        space: Option<String>,
    },
    /// Randomized search on a strictly convex plane
    SearchExcon {
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Extreme non-isometry experiment over several planes: {spaces}
    Thm27 {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Spectral,
    Vertex,
    Multistart,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

fn config(cli: &Cli) -> RunConfig {
    let (command, verify, space, budget) = match &cli.command {
        Cmd::Norm => (Command::Norm, false, None, DEFAULT_BUDGET),
        Cmd::Bj => (Command::Bj, false, None, DEFAULT_BUDGET),
        Cmd::NormOp => (Command::NormOp, false, None, DEFAULT_BUDGET),
        Cmd::Attain => (Command::Attain, false, None, DEFAULT_BUDGET),
        Cmd::Thm21 => (Command::Thm21, false, None, DEFAULT_BUDGET),
        Cmd::Basis { verify } => (Command::Basis, *verify, None, DEFAULT_BUDGET),
        Cmd::Classify => (Command::Classify, false, None, DEFAULT_BUDGET),
        Cmd::Witness => (Command::Witness, false, None, DEFAULT_BUDGET),
        Cmd::Counterexample { space } => (Command::Counterexample, false, space.clone(), DEFAULT_BUDGET),
        Cmd::SearchExcon { space, budget } => (Command::SearchExcon, false, space.clone(), *budget),
        Cmd::Thm27 { budget } => (Command::Thm27, false, None, *budget),
    };
    RunConfig {
        command,
        tol: cli.tol,
        seed: cli.seed,
        method: match cli.method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Vertex => Method::Vertex,
            MethodArg::Multistart => Method::Multistart,
        },
        format: match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        },
        budget,
        verify,
        space,
    }
}

fn read_input(cli: &Cli, cfg: &RunConfig) -> std::io::Result<Vec<u8>> {
    if let Some(path) = &cli.input {
        return std::fs::read(path);
    }
    let mut buf = Vec::new();
    let stdin = std::io::stdin();
    if cfg.space.is_none() && !stdin.is_terminal() {
        stdin.lock().read_to_end(&mut buf)?;
    }
    Ok(buf)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = config(&cli);
    let input = match read_input(&cli, &cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("{{\"error\": \"io\", \"message\": {:?}}}", e.to_string());
            return ExitCode::from(2);
        }
    };
    let (code, out) = run(&cfg, &input);
    let written = if code == 0 {
        std::io::stdout().write_all(&out)
    } else {
        std::io::stderr().write_all(&out)
    };
    if written.is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
