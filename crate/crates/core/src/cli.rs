//! Command-line grammar and dispatch for the `rahman` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bispectral::{
    default_anchors, discover_commutant, normalize_gauge, reproduce_reference_b, reproduce_reference_commutant,
    seven_point_operators, solve_bispectral, Anchor,
};
use crate::error::{Error, Result};
use crate::io::{matrix_csv, matrix_json, named_row_layout, to_canonical_json};
use crate::kernel::build_kernel;
use crate::params::{
    alpha_relation_residuals, compatible_alpha2, compatible_beta, derive_mapped, derive_weight, ChainParams, ParamSet,
};
use crate::polyeval::build_poly_matrix;
use crate::scalar::{self, Scalar};
use crate::simulator::{chi_square_vs_kernel, run_chains, ChainState, ChiSquareConfig};
use crate::spectral::{stationarity_for_chain, verify_eigen_chain, verify_orthogonality};
use crate::statespace::{StateSpace, StencilPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternChoice {
    Adjacency,
    Diagonal,
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "rahman", version, about = "Exact Rahman polynomials, dice-chain kernels and bispectral operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Fractional digits in CSV output.
    #[arg(long = "float-digits", global = true, default_value_t = 6)]
    pub float_digits: usize,

    /// Write the result here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SizeArg {
    /// Simplex size (number of dice).
    #[arg(long = "N", value_name = "N")]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct PArgs {
    #[arg(long, num_args = 4, required = true, allow_negative_numbers = true, value_names = ["P1", "P2", "P3", "P4"], value_parser = scalar_arg)]
    pub p: Vec<Scalar>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, num_args = 2, required = true, allow_negative_numbers = true, value_names = ["A1", "A2"], value_parser = scalar_arg)]
    pub alpha: Vec<Scalar>,
    #[arg(long, num_args = 2, required = true, allow_negative_numbers = true, value_names = ["B1", "B2"], value_parser = scalar_arg)]
    pub beta: Vec<Scalar>,
}

/// Chain given relative to `p`: `alpha2` and `beta` are derived when omitted.
#[derive(Debug, Args)]
pub struct CompatArgs {
    #[arg(long, num_args = 1..=2, required = true, allow_negative_numbers = true, value_names = ["A1", "A2"], value_parser = scalar_arg)]
    pub alpha: Vec<Scalar>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["B1", "B2"], value_parser = scalar_arg)]
    pub beta: Option<Vec<Scalar>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived quantities of p, and the compatible chain for a given alpha.
    Params {
        #[command(flatten)]
        p: PArgs,
        #[arg(long, num_args = 1..=2, allow_negative_numbers = true, value_parser = scalar_arg)]
        alpha: Option<Vec<Scalar>>,
    },
    /// Exact transition matrix of the dice chain.
    Kernel {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Value matrix of all Rahman polynomials on the simplex.
    Polys {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
    },
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Bispectral(BispectralCommand),
    #[command(subcommand)]
    Commutant(CommutantCommand),
    /// Monte Carlo run of the chain with a chi-square check against the kernel.
    Simulate {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        /// Independent chains with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        chains: u64,
        #[arg(long, num_args = 2, value_names = ["I1", "I2"])]
        start: Option<Vec<usize>>,
        /// Also write the transition counts as CSV.
        #[arg(long = "counts-out")]
        counts_out: Option<PathBuf>,
        #[arg(long = "min-visits", default_value_t = 1000)]
        min_visits: u64,
        #[arg(long, default_value_t = 0.001)]
        significance: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Check K P = P diag(lambda) exactly.
    Eigen {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
        #[command(flatten)]
        chain: CompatArgs,
    },
    /// Gram matrix of the polynomials under the trinomial weight.
    Orth {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
    },
    /// Decide whether the trinomial weight is stationary for the chain.
    Stationary {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
        #[command(flatten)]
        chain: CompatArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum BispectralCommand {
    /// Five-point operator for multiplication by (p1+p2)x - (p3+p4)y.
    Solve {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
    },
    /// Entry-by-entry comparison with the N=5 closed forms.
    Reproduce {
        #[command(flatten)]
        p: PArgs,
        /// Print rows with entry names instead of JSON.
        #[arg(long = "paper-layout")]
        named_layout: bool,
    },
    /// Operators for multiplication by x and by y.
    Seven {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        p: PArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum CommutantCommand {
    /// Matrices on a stencil pattern that commute with the kernel.
    Discover {
        #[command(flatten)]
        size: SizeArg,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_enum, default_value_t = PatternChoice::Adjacency)]
        pattern: PatternChoice,
        /// Gauge condition M[ROW][COL] = VALUE; give it twice.
        #[arg(long, num_args = 3, action = clap::ArgAction::Append, allow_negative_numbers = true, value_names = ["ROW", "COL", "VALUE"])]
        anchor: Vec<i64>,
    },
    /// Comparison with the N=3 closed-form commutant.
    Reproduce {
        #[command(flatten)]
        chain: ChainArgs,
    },
}

fn scalar_arg(s: &str) -> std::result::Result<Scalar, String> {
    scalar::parse(s).map_err(|e| e.to_string())
}

/// Parses `argv` (program name first) into a run configuration.
pub fn parse_config<I, T>(argv: I) -> Result<Cli>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))
}

/// Rendered result and whether the verification it reports passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub pass: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn param_set(a: &PArgs) -> ParamSet {
    let [p1, p2, p3, p4]: [Scalar; 4] = a.p.clone().try_into().expect("clap enforces four values");
    ParamSet::new(p1, p2, p3, p4)
}

fn chain_params(a: &ChainArgs) -> ChainParams {
    ChainParams::new(a.alpha[0].clone(), a.alpha[1].clone(), a.beta[0].clone(), a.beta[1].clone())
}

fn resolve_chain(p: &ParamSet, a: &CompatArgs) -> Result<ChainParams> {
    let alpha1 = a.alpha[0].clone();
    let alpha2 = match a.alpha.get(1) {
        Some(a2) => a2.clone(),
        None => compatible_alpha2(p, &alpha1)?,
    };
    let (beta1, beta2) = match &a.beta {
        Some(b) => (b[0].clone(), b[1].clone()),
        None => compatible_beta(p, &alpha1, &alpha2)?,
    };
    Ok(ChainParams::new(alpha1, alpha2, beta1, beta2))
}

struct Rendered {
    json: Value,
    csv: Option<String>,
    pass: bool,
}

impl Rendered {
    fn new(json: Value, pass: bool) -> Self {
        Rendered { json, csv: None, pass }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs a parsed command and renders its result.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let digits = cli.float_digits;
    if let Command::Bispectral(BispectralCommand::Reproduce { p, named_layout: true }) = &cli.command {
        let (op, cmp) = reproduce_reference_b(&param_set(p))?;
        let mut body = named_row_layout(&op, &cmp);
        let bad = cmp.mismatches().count() + cmp.unexpected_nonzeros.len();
        body.push_str(&format!(
            "{} of {} named entries match; {} unexpected nonzeros\n",
            cmp.entries.len() - cmp.mismatches().count(),
            cmp.entries.len(),
            cmp.unexpected_nonzeros.len()
        ));
        return Ok(Outcome { body, pass: bad == 0 && cmp.pass });
    }

    let r = render(cli, digits)?;
    let body = match cli.format {
        Format::Json => to_canonical_json(&r.json)?,
        Format::Csv => r
            .csv
            .ok_or_else(|| Error::Usage("--format csv is only available for matrix results".into()))?,
    };
    Ok(Outcome { body, pass: r.pass })
}

fn render(cli: &Cli, digits: usize) -> Result<Rendered> {
    Ok(match &cli.command {
        Command::Params { p, alpha } => {
            let p = param_set(p);
            p.validate()?;
            let mapped = derive_mapped(&p)?;
            let weight = derive_weight(&p)?;
            let chain = match alpha {
                None => Value::Null,
                Some(a) => {
                    let cp = resolve_chain(&p, &CompatArgs { alpha: a.clone(), beta: None })?;
                    let residuals = alpha_relation_residuals(&p, &cp.alpha1, &cp.alpha2)?;
                    json!({
                        "chain": cp,
                        "regime": cp.regime(),
                        "alpha_relation_residuals": residuals.iter().map(scalar::format).collect::<Vec<_>>(),
                    })
                }
            };
            json_only(json!({
                "command": "params",
                "params": p,
                "sum": scalar::format(&p.sum()),
                "cross": scalar::format(&p.cross()),
                "mapped": mapped,
                "weight": weight,
                "compatible": chain,
            }))
        }
        Command::Kernel { size, chain } => {
            let cp = chain_params(chain);
            let k = build_kernel(size.n, &cp)?;
            let states = k.space.states();
            Rendered::new(
                json!({
                    "command": "kernel",
                    "size": size.n,
                    "chain": cp,
                    "regime": cp.regime(),
                    "rows_sum_to_one": k.rows_sum_to_one(),
                    "strictly_positive": k.is_strictly_positive(),
                    "matrix": matrix_json(&k.matrix, states, states),
                }),
                true,
            )
            .with_csv(matrix_csv(&k.matrix, digits))
        }
        Command::Polys { size, p } => {
            let pm = build_poly_matrix(size.n, &param_set(p))?;
            let states = pm.space.states();
            Rendered::new(
                json!({
                    "command": "polys",
                    "size": size.n,
                    "params": pm.params,
                    "mapped": pm.mapped,
                    "determinant": scalar::format(&pm.determinant),
                    "matrix": matrix_json(&pm.matrix, states, states),
                }),
                true,
            )
            .with_csv(matrix_csv(&pm.matrix, digits))
        }
        Command::Verify(VerifyCommand::Eigen { size, p, chain }) => {
            let p = param_set(p);
            let cp = resolve_chain(&p, chain)?;
            let report = verify_eigen_chain(size.n, &p, &cp)?;
            let pass = report.pass;
            Rendered::new(tagged("verify eigen", to_value(&report)?), pass)
        }
        Command::Verify(VerifyCommand::Orth { size, p }) => {
            let report = verify_orthogonality(size.n, &param_set(p))?;
            let pass = report.off_diagonal_zero;
            let space = StateSpace::enumerate(size.n)?;
            let mut v = to_value(&report)?;
            v["gram"] = matrix_json(&report.gram, space.states(), space.states());
            Rendered::new(tagged("verify orth", v), pass).with_csv(matrix_csv(&report.gram, digits))
        }
        Command::Verify(VerifyCommand::Stationary { size, p, chain }) => {
            let p = param_set(p);
            let cp = resolve_chain(&p, chain)?;
            let report = stationarity_for_chain(size.n, &p, &cp)?;
            // Either answer is a result; only errors are failures here.
            Rendered::new(tagged("verify stationary", to_value(&report)?), true)
        }
        Command::Bispectral(BispectralCommand::Solve { size, p }) => {
            let op = solve_bispectral(size.n, &param_set(p))?;
            let pass = op.intertwining_exact && op.row_sums_zero;
            let mut v = to_value(&op)?;
            v["matrix"] = matrix_json(&op.matrix, op.space.states(), op.space.states());
            v["pattern"] = to_value(&op.space.adjacency(true))?;
            Rendered::new(tagged("bispectral solve", v), pass).with_csv(matrix_csv(&op.matrix, digits))
        }
        Command::Bispectral(BispectralCommand::Reproduce { p, .. }) => {
            let (op, cmp) = reproduce_reference_b(&param_set(p))?;
            let pass = cmp.pass;
            Rendered::new(
                json!({
                    "command": "bispectral reproduce",
                    "params": op.params,
                    "stencil": op.stencil,
                    "matrix": matrix_json(&op.matrix, op.space.states(), op.space.states()),
                    "comparison": cmp,
                }),
                pass,
            )
            .with_csv(matrix_csv(&op.matrix, digits))
        }
        Command::Bispectral(BispectralCommand::Seven { size, p }) => {
            let ops = seven_point_operators(size.n, &param_set(p))?;
            let space = StateSpace::enumerate(size.n)?;
            let states = space.states();
            let pass = ops.linear_consistency;
            let mut v = to_value(&ops)?;
            v["bx"] = matrix_json(&ops.bx, states, states);
            v["by"] = matrix_json(&ops.by, states, states);
            let csv = format!("{}\n{}", matrix_csv(&ops.bx, digits), matrix_csv(&ops.by, digits));
            Rendered::new(tagged("bispectral seven", v), pass).with_csv(csv)
        }
        Command::Commutant(CommutantCommand::Discover { size, chain, pattern, anchor }) => {
            let cp = chain_params(chain);
            let k = build_kernel(size.n, &cp)?;
            let dim = k.space.len();
            let pattern = match pattern {
                PatternChoice::Adjacency => k.space.adjacency(true),
                PatternChoice::Diagonal => StencilPattern::diagonal(dim),
                PatternChoice::Full => StencilPattern::full(dim),
            };
            let basis = discover_commutant(&k, &pattern);
            let explicit = !anchor.is_empty();
            let anchors = if explicit { parse_anchors(anchor, dim)? } else { default_anchors(&k.space).to_vec() };
            let normalized = match basis.nontrivial_element() {
                None => None,
                Some(m) => match normalize_gauge(m, &anchors) {
                    Ok(g) => Some(g),
                    Err(e) if explicit => return Err(e),
                    Err(_) => None,
                },
            };
            let states = k.space.states();
            let pass = basis.all_commute;
            let csv = normalized.as_ref().map(|m| matrix_csv(m, digits));
            let mut v = json!({
                "command": "commutant discover",
                "size": size.n,
                "chain": cp,
                "pattern": pattern,
                "dimension": basis.dimension,
                "identity_in_span": basis.identity_in_span,
                "all_commute": basis.all_commute,
                "basis": basis.basis.iter().map(|m| matrix_json(m, states, states)).collect::<Vec<_>>(),
                "anchors": anchors,
                "normalized": normalized.as_ref().map(|m| matrix_json(m, states, states)),
            });
            v["ordering"] = json!(states);
            let r = Rendered::new(v, pass);
            match csv {
                Some(c) => r.with_csv(c),
                None => r,
            }
        }
        Command::Commutant(CommutantCommand::Reproduce { chain }) => {
            let cp = chain_params(chain);
            let (basis, cmp) = reproduce_reference_commutant(&cp)?;
            let pass = cmp.pass;
            let states = StateSpace::enumerate(3)?;
            json_with_pass(
                json!({
                    "command": "commutant reproduce",
                    "chain": cp,
                    "dimension": basis.dimension,
                    "all_commute": basis.all_commute,
                    "basis": basis.basis.iter().map(|m| matrix_json(m, states.states(), states.states())).collect::<Vec<_>>(),
                    "comparison": cmp,
                }),
                pass,
            )
        }
        Command::Simulate { size, chain, seed, steps, chains, start, counts_out, min_visits, significance } => {
            let cp = chain_params(chain);
            if !(0.0..1.0).contains(significance) {
                return Err(Error::Range(format!("significance {significance} is outside [0, 1)")));
            }
            if *chains < 1 {
                return Err(Error::Range("--chains must be at least 1".into()));
            }
            let start = match start {
                Some(s) => ChainState::new(s[0], s[1]),
                None => ChainState::new(0, 0),
            };
            if start.i1 + start.i2 > size.n {
                return Err(Error::InvalidState { i1: start.i1, i2: start.i2, dice: size.n });
            }
            let kernel = build_kernel(size.n, &cp)?;
            let seeds: Vec<u64> = (0..*chains).map(|i| seed.wrapping_add(i)).collect();
            let counts = run_chains(size.n, start, *steps, &cp, &seeds)?;
            let config = ChiSquareConfig { min_visits: *min_visits, significance: *significance, ..Default::default() };
            let report = chi_square_vs_kernel(&counts, &kernel, config);
            let csv = counts.to_csv();
            if let Some(path) = counts_out {
                std::fs::write(path, &csv)?;
            }
            let states = kernel.space.states();
            Rendered::new(
                json!({
                    "command": "simulate",
                    "size": size.n,
                    "chain": cp,
                    "rng": counts.rng,
                    "seeds": counts.seeds,
                    "start": counts.start,
                    "steps": counts.steps,
                    "ordering": states,
                    "counts": counts.counts,
                    "chi_square": report,
                }),
                report.all_pass,
            )
            .with_csv(csv)
        }
    })
}

fn tagged(command: &str, mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("command".into(), json!(command));
    }
    v
}

fn json_only(v: Value) -> Rendered {
    Rendered::new(v, true)
}

fn json_with_pass(v: Value, pass: bool) -> Rendered {
    Rendered::new(v, pass)
}

fn parse_anchors(raw: &[i64], dim: usize) -> Result<Vec<Anchor>> {
    if raw.len() != 6 {
        return Err(Error::Usage(format!("--anchor must be given exactly twice, got {}", raw.len() / 3)));
    }
    raw.chunks(3)
        .map(|c| {
            let idx = |v: i64, what: &str| {
                usize::try_from(v)
                    .ok()
                    .filter(|&i| i < dim)
                    .ok_or_else(|| Error::Usage(format!("--anchor {what} {v} is outside 0..{dim}")))
            };
            Ok(Anchor { row: idx(c[0], "row")?, col: idx(c[1], "column")?, value: c[2] })
        })
        .collect()
}

/// Writes the outcome where the configuration asks and returns the exit code.
pub fn emit(cli: &Cli, outcome: &Outcome) -> Result<i32> {
    match &cli.output {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(outcome.exit_code())
}
