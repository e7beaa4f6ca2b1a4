//! JSON-in, JSON-out front end. [`run`] is the whole program minus argument
//! parsing and I/O, so tests drive it directly.

pub mod experiment;
pub mod text;

use nalgebra::DVector;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use opgeom::extreme;
use opgeom::operator::OperatorJson;
use opgeom::space::SpaceJson;
use opgeom::{attain, basis, bjorth, opnorm, Error, Method, Operator, Space};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Bj,
    NormOp,
    Attain,
    Thm21,
    Basis,
    Classify,
    Witness,
    Counterexample,
    SearchExcon,
    Thm27,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    pub seed: u64,
    pub method: Method,
    pub format: Format,
    pub budget: usize,
    /// `basis`: also run the orthogonality check and the SVD comparison.
    pub verify: bool,
    /// Space JSON given on the command line, used instead of the input.
    pub space: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol: DEFAULT_TOL,
            seed: 0,
            method: Method::Auto,
            format: Format::Json,
            budget: DEFAULT_BUDGET,
            verify: false,
            space: None,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Malformed(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) if !e.is_validation() => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (code, message) = match self {
            Failure::Core(e) => (e.code(), e.to_string()),
            Failure::Malformed(m) => ("malformed_json", m.clone()),
            Failure::Config(m) => ("invalid_config", m.clone()),
        };
        json!({ "error": code, "message": message })
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn parse<T: DeserializeOwned>(input: &[u8]) -> std::result::Result<T, Failure> {
    serde_json::from_slice(input).map_err(|e| Failure::Malformed(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> Outcome {
    serde_json::to_value(v).map_err(|e| Failure::Core(Error::Numerical(e.to_string())))
}

fn space_of(j: SpaceJson) -> std::result::Result<Space, Failure> {
    Ok(Space::try_from(j)?)
}

fn operator_of(j: OperatorJson) -> std::result::Result<Operator, Failure> {
    Ok(Operator::try_from(j)?)
}

fn vector_in(space: &Space, v: Vec<f64>) -> std::result::Result<DVector<f64>, Failure> {
    let v = DVector::from_vec(v);
    space.check_dim(&v)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Malformed("vector entries must be finite".into()));
    }
    Ok(v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    space: SpaceJson,
    v: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BjInput {
    space: SpaceJson,
    x: Vec<f64>,
    y: Vec<f64>,
    tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorInput {
    operator: OperatorJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Thm21Input {
    operator: OperatorJson,
    x: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceInput {
    space: SpaceJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacesInput {
    spaces: Vec<SpaceJson>,
}

fn operator_input(input: &[u8]) -> std::result::Result<Operator, Failure> {
    operator_of(parse::<OperatorInput>(input)?.operator)
}

fn space_input(cfg: &RunConfig, input: &[u8]) -> std::result::Result<Space, Failure> {
    match &cfg.space {
        Some(s) => space_of(parse::<SpaceJson>(s.as_bytes())?),
        None => space_of(parse::<SpaceInput>(input)?.space),
    }
}

fn is_blank(input: &[u8]) -> bool {
    input.iter().all(|b| b.is_ascii_whitespace())
}

fn dispatch(cfg: &RunConfig, input: &[u8]) -> Outcome {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Failure::Config(format!("tol must be positive, got {}", cfg.tol)));
    }
    let (tol, seed) = (cfg.tol, cfg.seed);
    match cfg.command {
        Command::Norm => {
            let inp: NormInput = parse(input)?;
            let space = space_of(inp.space)?;
            let v = vector_in(&space, inp.v)?;
            Ok(json!({ "norm": space.norm(&v)? }))
        }
        Command::Bj => {
            let inp: BjInput = parse(input)?;
            let space = space_of(inp.space)?;
            let x = vector_in(&space, inp.x)?;
            let y = vector_in(&space, inp.y)?;
            to_value(&bjorth::bj_orthogonal(&space, &x, &y, inp.tol.unwrap_or(tol))?)
        }
        Command::NormOp => to_value(&opnorm::operator_norm(&operator_input(input)?, cfg.method, seed)?),
        Command::Attain => to_value(&attain::norm_attainment_set(&operator_input(input)?, tol, seed)?),
        Command::Thm21 => {
            let inp: Thm21Input = parse(input)?;
            let op = operator_of(inp.operator)?;
            let x = vector_in(op.domain(), inp.x)?;
            to_value(&attain::check_theorem21(&op, &x, tol)?)
        }
        Command::Basis => {
            let op = operator_input(input)?;
            let result = basis::greedy_orthogonal_basis(&op)?;
            let mut out = to_value(&result)?;
            if cfg.verify {
                let ok = basis::verify_orthogonality_on_basis(&op, &result, tol)?;
                out["verification"] = json!({ "orthogonal_images": ok, "tol": tol });
                out["svd_comparison"] = to_value(&basis::compare_with_svd(&op)?)?;
            }
            Ok(out)
        }
        Command::Classify => to_value(&extreme::classify(&operator_input(input)?, tol, seed)?),
        Command::Witness => to_value(&extreme::nonextreme_witness(&operator_input(input)?, tol, seed)?),
        Command::Counterexample => to_value(&extreme::lemma21_construct(&space_input(cfg, input)?)?),
        Command::SearchExcon => {
            let space = space_input(cfg, input)?;
            to_value(&extreme::search_extreme_nonisometry(&space, seed, cfg.budget)?)
        }
        Command::Thm27 => {
            let spaces = if is_blank(input) {
                experiment::default_spaces()
            } else {
                parse::<SpacesInput>(input)?
                    .spaces
                    .into_iter()
                    .map(space_of)
                    .collect::<std::result::Result<Vec<_>, _>>()?
            };
            to_value(&experiment::theorem27_experiment(&spaces, seed, cfg.budget, tol)?)
        }
    }
}

fn render(value: &Value, format: Format) -> Vec<u8> {
    let mut out = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("a Value always serializes"),
        Format::Text => text::render(value),
    };
    out.push('\n');
    out.into_bytes()
}

/// Run one command. Returns the exit code (0 success, 1 internal numerical
/// failure, 2 invalid input) and the report or error object.
pub fn run(config: &RunConfig, input: &[u8]) -> (i32, Vec<u8>) {
    match dispatch(config, input) {
        Ok(v) => (0, render(&v, config.format)),
        Err(f) => (f.exit_code(), render(&f.to_json(), config.format)),
    }
}
