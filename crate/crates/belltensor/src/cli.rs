//! Command-line interface. Results go to standard output as JSON, or as
//! aligned text with `--pretty`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use belltensor_core::bellnorm::{m_bell_norm, NormMethod, SeesawOptions, LOCALITY_TOL};
use belltensor_core::compat::{compatibility_problem, epsilon_star_dual, gamma_threshold, is_compatible};
use belltensor_core::games::{
    classical_bias, is_scaled_hadamard, normalize, quantum_bias_sdp, uncertainty_product, GameMatrix,
};
use belltensor_core::measurements::{effect_from_observable, MeasurementTuple};
use belltensor_core::scan::linear_grid;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::dump::SdpDump;
use crate::emit::{biased_svg, deformed_svg, emit_csv, emit_svg, CurveField, PlotKind};
use crate::error::{status_name, Error, Result};
use crate::format::{write_json, CertificateJson};
use crate::ids::{parse_game, parse_tuple};
use crate::parallel;
use crate::verify::{format_line, run_with, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "belltensor", version, about = "Bell-locality and compatibility norms of dichotomic observables")]
pub struct Cli {
    /// Print aligned text instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GameArg {
    /// chsh, mt:<t>, gpq:<p>:<q>, i3322, or a real-matrix JSON file.
    #[arg(long)]
    pub game: String,
}

#[derive(Debug, Args)]
pub struct TupleArg {
    /// pauli:x[,y[,z]] or a tuple JSON file.
    #[arg(long)]
    pub tuple: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Largest quantum bias of a game with Alice's observables fixed.
    NormM {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        tuple: TupleArg,
        /// Divide the game by its classical bias first.
        #[arg(long)]
        normalize: bool,
    },
    /// Compatibility norm.
    NormC {
        #[command(flatten)]
        tuple: TupleArg,
        /// Write the compatibility SDP as JSON.
        #[arg(long, value_name = "PATH")]
        dump_sdp: Option<PathBuf>,
    },
    /// White-noise compatibility threshold 1/‖A‖_c.
    Gamma {
        #[command(flatten)]
        tuple: TupleArg,
    },
    /// Decides compatibility and optionally writes a joint POVM.
    Compatible {
        #[command(flatten)]
        tuple: TupleArg,
        #[arg(long, value_name = "PATH")]
        emit_certificate: Option<PathBuf>,
    },
    /// Classical bias by exhaustive search.
    Bias {
        #[command(flatten)]
        game: GameArg,
    },
    /// Quantum bias by the Tsirelson SDP.
    Qbias {
        #[command(flatten)]
        game: GameArg,
    },
    /// max|M⁻¹| · β(M) and the scaled-Hadamard test.
    Uncertainty {
        #[command(flatten)]
        game: GameArg,
    },
    /// Lower bound on the norm by alternating maximization.
    Seesaw {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        tuple: TupleArg,
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parameter sweeps over the deformed or biased CHSH family.
    Scan {
        #[command(subcommand)]
        family: ScanFamily,
    },
    /// Runs the verification criteria.
    Verify {
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated criterion ids; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Args)]
pub struct ScanOutput {
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "-1:1:0.01", allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Region)]
    pub kind: Kind,
    /// Quantity drawn by curve plots.
    #[arg(long, value_enum, default_value_t = Field::Norm)]
    pub field: Field,
}

#[derive(Debug, Subcommand)]
pub enum ScanFamily {
    /// Normalized [[1, 1], [1, -t]].
    Mt {
        #[command(flatten)]
        output: ScanOutput,
        /// Defaults to -4:4:0.02 for regions and -4,-2,0,0.5,1,2,4 for curves.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// Normalized biased game G(p, q).
    Gpq {
        #[command(flatten)]
        output: ScanOutput,
        #[arg(long, default_value = "0:1:0.05")]
        p: String,
        #[arg(long, default_value = "0:1:0.05")]
        q: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Region,
    Curves,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Field {
    Norm,
    Ratio,
}

/// `start:stop:step` or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::parse("grid", spec, format!("'{s}' is not a number")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => Ok(linear_grid(num(a)?, num(b)?, num(step)?)?),
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::parse("grid", spec, "expected start:stop:step or a comma-separated list")),
    }
}

fn load_game(arg: &GameArg, normalized: bool) -> Result<GameMatrix> {
    let g = parse_game(&arg.game)?;
    Ok(if normalized { normalize(&g)? } else { g })
}

fn method_name(m: NormMethod) -> &'static str {
    match m {
        NormMethod::ClosedForm => "closed_form",
        NormMethod::Sdp => "sdp",
    }
}

fn effects_pair(a: &MeasurementTuple) -> Result<(belltensor_core::HermitianMatrix, belltensor_core::HermitianMatrix)> {
    let e = a.observables().iter().map(effect_from_observable).collect::<belltensor_core::Result<Vec<_>>>()?;
    Ok((e[0].clone(), e[1].clone()))
}

/// Executes one parsed command and returns its JSON result.
pub fn execute(cli: &Cli) -> Result<(Value, bool)> {
    let value = match &cli.command {
        Command::NormM { game, tuple, normalize } => {
            let g = load_game(game, *normalize)?;
            let a = parse_tuple(&tuple.tuple)?;
            let n = m_bell_norm(&a, &g)?;
            let beta = classical_bias(&g)?;
            json!({
                "norm_m": n.value,
                "is_norm": n.is_norm,
                "lambda_bound": n.lambda_bound,
                "method": method_name(n.method),
                "classical_bias": beta,
                "bell_local": n.value <= beta + LOCALITY_TOL,
            })
        }
        Command::NormC { tuple, dump_sdp } => {
            let a = parse_tuple(&tuple.tuple)?;
            if let Some(path) = dump_sdp {
                write_json(path, &SdpDump::from(&compatibility_problem(&a)?))?;
            }
            json!({
                "norm_c": belltensor_core::compat::compatibility_norm(&a)?,
                "injective_norm": a.injective_norm()?,
            })
        }
        Command::Gamma { tuple } => {
            let a = parse_tuple(&tuple.tuple)?;
            let mut out = Map::new();
            out.insert("gamma".into(), json!(gamma_threshold(&a)?));
            if a.len() == 2 && a.is_valid()? {
                let (p, q) = effects_pair(&a)?;
                out.insert("epsilon_star".into(), json!(epsilon_star_dual(&p, &q)?));
            }
            Value::Object(out)
        }
        Command::Compatible { tuple, emit_certificate } => {
            let a = parse_tuple(&tuple.tuple)?;
            let c = is_compatible(&a)?;
            let mut written = Value::Null;
            if let (Some(path), Some(cert)) = (emit_certificate, &c.certificate) {
                write_json(path, &CertificateJson::from(cert))?;
                written = json!(path.display().to_string());
            }
            json!({ "compatible": c.compatible, "norm_c": c.norm, "certificate": written })
        }
        Command::Bias { game } => json!({ "classical_bias": classical_bias(&load_game(game, false)?)? }),
        Command::Qbias { game } => {
            let g = load_game(game, false)?;
            json!({ "quantum_bias": quantum_bias_sdp(&g)?, "classical_bias": classical_bias(&g)? })
        }
        Command::Uncertainty { game } => {
            let g = load_game(game, false)?;
            let n = g.n() as f64;
            json!({
                "product": uncertainty_product(&g)?,
                "lower_bound": (n / 2.0).sqrt(),
                "hadamard": is_scaled_hadamard(&g, 1e-9 * g.matrix().max_abs().max(1.0)),
            })
        }
        Command::Seesaw {
            game,
            tuple,
            normalize,
            restarts,
            iters,
            seed,
        } => {
            let g = load_game(game, *normalize)?;
            let a = parse_tuple(&tuple.tuple)?;
            let opts = SeesawOptions {
                restarts: *restarts,
                iters: *iters,
                seed: *seed,
                ..SeesawOptions::default()
            };
            let r = parallel::seesaw(&a, &g, &opts)?;
            json!({
                "value": r.value,
                "converged": r.converged,
                "iterations": r.iterations,
                "best_restart": r.best_restart,
                "max_decrease": r.max_decrease,
            })
        }
        Command::Scan { family } => scan(family)?,
        Command::Verify {
            tolerance_scale,
            seed,
            only,
        } => {
            let opts = VerifyOptions {
                tolerance_scale: *tolerance_scale,
                seed: *seed,
                only: only.clone(),
            };
            let report = run_with(&opts, |r| {
                if cli.pretty {
                    println!("{}", format_line(r));
                }
            });
            let passed = report.passed;
            let value = serde_json::to_value(&report).expect("report serializes");
            return Ok((value, passed));
        }
    };
    Ok((value, true))
}

fn scan(family: &ScanFamily) -> Result<Value> {
    let (out, summary) = match family {
        ScanFamily::Mt { output, t } => {
            let ys = parse_grid(&output.y)?;
            let kind = plot_kind(output.kind);
            let ts = match (t, kind) {
                (Some(spec), _) => parse_grid(spec)?,
                (None, PlotKind::Region) => belltensor_core::scan::default_t_region(),
                (None, PlotKind::Curves) => belltensor_core::scan::default_t_curves(),
            };
            let records = parallel::scan_deformed(&ys, &ts)?;
            emit_csv(&records, &output.out)?;
            if let Some(path) = &output.svg {
                emit_svg(&deformed_svg(&records, kind, curve_field(output.field)), path)?;
            }
            let violated = records.iter().filter(|r| r.violated).count();
            (output, (records.len(), violated))
        }
        ScanFamily::Gpq { output, p, q } => {
            let ys = parse_grid(&output.y)?;
            let records = parallel::scan_biased(&ys, &parse_grid(p)?, &parse_grid(q)?)?;
            emit_csv(&records, &output.out)?;
            if let Some(path) = &output.svg {
                emit_svg(&biased_svg(&records, plot_kind(output.kind), curve_field(output.field)), path)?;
            }
            let violated = records.iter().filter(|r| r.violated).count();
            (output, (records.len(), violated))
        }
    };
    Ok(json!({
        "points": summary.0,
        "violated": summary.1,
        "csv": out.out.display().to_string(),
        "svg": out.svg.as_ref().map(|p| p.display().to_string()),
    }))
}

fn plot_kind(k: Kind) -> PlotKind {
    match k {
        Kind::Region => PlotKind::Region,
        Kind::Curves => PlotKind::Curves,
    }
}

fn curve_field(f: Field) -> CurveField {
    match f {
        Field::Norm => CurveField::Norm,
        Field::Ratio => CurveField::Ratio,
    }
}

/// `key  value` lines for a flat JSON object.
fn pretty(value: &Value) -> String {
    match value {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| format!("{k:<width$}  {}\n", v))
                .collect()
        }
        other => format!("{other}\n"),
    }
}

fn error_json(e: &Error) -> Value {
    let mut out = json!({ "error": e.to_string() });
    if let Error::Core(belltensor_core::Error::Solver { status, iterations, .. }) = e {
        out["status"] = json!(status_name(*status));
        out["iterations"] = json!(iterations);
    }
    out
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((value, passed)) => {
            let is_verify = matches!(cli.command, Command::Verify { .. });
            let _ = if cli.pretty {
                if is_verify {
                    writeln!(out, "{}", if passed { "all criteria passed" } else { "some criteria failed" })
                } else {
                    write!(out, "{}", pretty(&value))
                }
            } else {
                writeln!(out, "{value}")
            };
            if passed {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(&e));
            if e.is_solver_failure() {
                EXIT_SOLVER
            } else {
                EXIT_VALIDATION
            }
        }
    }
}
