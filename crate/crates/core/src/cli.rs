//! The `bq` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bases::BasisSection;
use crate::budget::Budget;
use crate::embeddings::{self, BlockSequence, EmbeddingCertificate};
use crate::error::{Error, Result};
use crate::estimate::{Direction, Estimate};
use crate::harness::{self, fixtures, SuiteConfig};
use crate::quantities::{self, witness, WitnessSequence};
use crate::spaces::{Coeffs, Functional, SpaceDescriptor};

#[derive(Debug, Parser)]
#[command(
    name = "bq",
    version,
    about = "Norms, basis constants and certificates on finite sections of classical sequence spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON (schema 1).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VectorArgs {
    /// Space descriptor, e.g. `james:8`.
    pub space: SpaceDescriptor,
    /// Comma separated coefficients; missing trailing ones are zero.
    #[arg(long, conflicts_with = "file", allow_hyphen_values = true)]
    pub coeffs: Option<Coeffs>,
    /// File with one coefficient per line.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norm of a vector.
    Norm(VectorArgs),
    /// Dual norm of a functional given by its values on the basis.
    Dualnorm(VectorArgs),
    /// Basis constant, unconditional constant and projection norms.
    Constants { space: SpaceDescriptor },
    /// Tail norms of a functional, or of a registered witness.
    Profile {
        #[command(flatten)]
        vector: VectorArgs,
        #[arg(long)]
        witness: Option<String>,
    },
    /// Cauchy gaps of bounded partial sums and the implied bc1 lower bound.
    Ca {
        #[command(flatten)]
        vector: VectorArgs,
        #[arg(long)]
        witness: Option<String>,
        /// Also search for sequences refuting `bc1 <= BOUND`.
        #[arg(long)]
        upper_check: Option<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// l1 copy spanned by blocks separated by a functional.
    #[command(name = "certify-l1")]
    CertifyL1 {
        #[command(flatten)]
        vector: VectorArgs,
        /// Cut points splitting the coefficients into blocks, e.g. `0,2,4`.
        #[arg(long)]
        blocks: Option<Coeffs>,
        /// Separating functional; all ones when absent.
        #[arg(long, allow_hyphen_values = true)]
        functional: Option<Coeffs>,
    },
    /// c0 copy spanned by blocks.
    #[command(name = "certify-c0")]
    CertifyC0 {
        #[command(flatten)]
        vector: VectorArgs,
        #[arg(long)]
        blocks: Option<Coeffs>,
    },
    /// Run the rule suite.
    Harness {
        /// Suite configuration; `default.json` falls back to the shipped one.
        #[arg(long, default_value = "default.json")]
        config: PathBuf,
        /// Include wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// List the registry of known values.
    Fixtures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

fn read_coeffs(args: &VectorArgs) -> Result<Vec<f64>> {
    let v = match (&args.coeffs, &args.file) {
        (Some(c), _) => c.0.clone(),
        (None, Some(path)) => read_file(path)?,
        (None, None) => Vec::new(),
    };
    if v.len() > args.space.dim() {
        return Err(Error::invalid(format!(
            "{} coefficients exceed the dimension of {}",
            v.len(),
            args.space
        )));
    }
    let mut padded = v;
    padded.resize(args.space.dim(), 0.0);
    Ok(padded)
}

fn read_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "{}:{}: `{}` is not a number",
                        path.display(),
                        i + 1,
                        l.trim()
                    ))
                })
        })
        .collect()
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn estimate_json(e: &Estimate) -> serde_json::Value {
    serde_json::to_value(e).expect("serializable")
}

fn emit_json(out: &mut dyn Write, value: serde_json::Value) -> Result<()> {
    let mut v = value;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema".into(), json!(harness::SCHEMA));
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&v).expect("serializable")
    )
    .map_err(io)
}

fn io(e: std::io::Error) -> Error {
    Error::invalid(format!("output failed: {e}"))
}

fn estimate_row(label: &str, e: &Estimate) -> String {
    let [v, d, c] = harness::estimate_cells(e);
    format!("{label:<8} {v:<16} {d:<6} {c:<10} {}", e.method)
}

fn run_command(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let fmt = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io);

    match &cli.command {
        Command::Norm(args) => {
            let x = read_coeffs(args)?;
            let v = args.space.norm(&x)?;
            match fmt {
                Format::Json => emit_json(
                    out,
                    json!({"space": args.space, "norm": v, "direction": Direction::Exact}),
                )?,
                Format::Csv => w(
                    out,
                    format!("space,norm,direction\n{},{},exact", args.space, v),
                )?,
                Format::Text => w(out, num(v))?,
            }
        }
        Command::Dualnorm(args) => {
            let f = read_coeffs(args)?;
            let e = args.space.dual_norm(&f)?;
            match fmt {
                Format::Json => emit_json(
                    out,
                    json!({"space": args.space, "lower": e.lower, "upper": e.upper}),
                )?,
                Format::Csv => w(
                    out,
                    format!("space,lower,upper\n{},{},{}", args.space, e.lower, e.upper),
                )?,
                Format::Text if e.lower == e.upper => w(out, num(e.lower))?,
                Format::Text => w(out, format!("[{}, {}]", num(e.lower), num(e.upper)))?,
            }
        }
        Command::Constants { space } => {
            let section = BasisSection::new(*space);
            let mut rows: Vec<(String, Estimate)> = vec![
                ("K".into(), section.basis_constant()?),
                ("Ku".into(), section.unconditional_constant()?),
            ];
            for n in 1..=space.dim() {
                rows.push((format!("P_{n}"), section.projection_norm(n)?));
            }
            match fmt {
                Format::Json => {
                    let items: Vec<_> = rows
                        .iter()
                        .map(|(k, e)| {
                            let mut v = estimate_json(e);
                            v["quantity"] = json!(k);
                            v
                        })
                        .collect();
                    emit_json(out, json!({"space": space, "constants": items}))?
                }
                Format::Csv => {
                    w(out, "quantity,value,direction,certified,method".into())?;
                    for (k, e) in &rows {
                        w(
                            out,
                            format!(
                                "{k},{},{},{},\"{}\"",
                                e.value,
                                e.direction.tag(),
                                e.certified,
                                e.method
                            ),
                        )?;
                    }
                }
                Format::Text => {
                    w(out, format!("{space}"))?;
                    for (k, e) in &rows {
                        w(out, estimate_row(k, e))?;
                    }
                }
            }
        }
        Command::Profile {
            vector,
            witness: name,
        } => {
            let section = BasisSection::new(vector.space);
            let f = match name {
                Some(n) => witness::lookup(n)?.functional(vector.space.dim())?,
                None => Functional::new(vector.space, read_coeffs(vector)?)?,
            };
            let p = quantities::sh_profile(&section, &f)?;
            match fmt {
                Format::Json => emit_json(
                    out,
                    json!({
                        "space": vector.space,
                        "tail_norms": p.profile.values,
                        "summary": estimate_json(&p.summary),
                        "witness": p.witness,
                    }),
                )?,
                Format::Csv => {
                    w(out, "n,lower,upper".into())?;
                    for (n, e) in p.profile.values.iter().enumerate() {
                        w(out, format!("{n},{},{}", e.lower, e.upper))?;
                    }
                }
                Format::Text => {
                    for (n, e) in p.profile.values.iter().enumerate() {
                        let v = if e.lower == e.upper {
                            num(e.lower)
                        } else {
                            format!("[{}, {}]", num(e.lower), num(e.upper))
                        };
                        w(out, format!("n={n:<3} {v}"))?;
                    }
                    w(out, estimate_row("summary", &p.summary))?;
                }
            }
        }
        Command::Ca {
            vector,
            witness: name,
            upper_check,
            trials,
        } => {
            let seq = match name {
                Some(n) => witness::lookup(n)?.sequence(vector.space.dim())?,
                None => WitnessSequence::new(
                    vector.space,
                    quantities::CoeffRule::Explicit(read_coeffs(vector)?),
                    vector.space.dim(),
                )?,
            };
            let gaps = quantities::gap_profile(vector.space, &seq.partial_sums())?;
            let cert = quantities::bc1_certificate(&seq)?;
            let check = upper_check
                .map(|b| quantities::bc1_upper_check(vector.space, b, *trials, cli.seed))
                .transpose()?;
            match fmt {
                Format::Json => emit_json(
                    out,
                    json!({
                        "space": vector.space,
                        "gaps": gaps,
                        "bc1": estimate_json(&cert),
                        "upper_check": check,
                    }),
                )?,
                Format::Csv => {
                    w(out, "n,gap".into())?;
                    for (n, g) in gaps.iter().enumerate() {
                        w(out, format!("{},{g}", n + 1))?;
                    }
                }
                Format::Text => {
                    for (n, g) in gaps.iter().enumerate() {
                        w(out, format!("n={:<3} {}", n + 1, num(*g)))?;
                    }
                    w(out, estimate_row("bc1", &cert))?;
                    if let Some(c) = check {
                        w(
                            out,
                            format!("bc1 <= {}: {:?} ({})", num(c.bound), c.status, c.note),
                        )?;
                    }
                }
            }
        }
        Command::CertifyL1 {
            vector,
            blocks,
            functional,
        } => {
            let b = block_sequence(vector, blocks)?;
            let mut fv = functional
                .as_ref()
                .map(|c| c.0.clone())
                .unwrap_or_else(|| vec![1.0; vector.space.dim()]);
            fv.resize(vector.space.dim(), 0.0);
            let f = Functional::new(vector.space, fv)?;
            let cert = embeddings::build_l1_embedding(&b, &f)?;
            print_certificate(out, fmt, &cert)?;
        }
        Command::CertifyC0 { vector, blocks } => {
            let b = block_sequence(vector, blocks)?;
            let cert = embeddings::build_c0_embedding(&b)?;
            print_certificate(out, fmt, &cert)?;
        }
        Command::Harness { config, timings } => {
            let mut cfg = match std::fs::read_to_string(config) {
                Ok(text) => SuiteConfig::parse(&text)?,
                Err(_) if config == Path::new("default.json") => SuiteConfig::shipped(),
                Err(e) => {
                    return Err(Error::invalid(format!(
                        "cannot read {}: {e}",
                        config.display()
                    )))
                }
            };
            cfg.timings |= *timings;
            if cli.seed != 0 {
                cfg.seed = cli.seed;
            }
            let report = harness::run_suite(&cfg);
            match fmt {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                )
                .map_err(io)?,
                Format::Csv => write!(out, "{}", harness::render_csv(&report)).map_err(io)?,
                Format::Text => write!(out, "{}", harness::render_text(&report)).map_err(io)?,
            }
            return Ok(report.exit_code());
        }
        Command::Fixtures => {
            let all = fixtures::fixtures();
            match fmt {
                Format::Json => emit_json(out, json!({"fixtures": all}))?,
                Format::Csv => {
                    w(out, "space,quantity,lower,upper,reproduced,source".into())?;
                    for r in all {
                        w(
                            out,
                            format!(
                                "{},{},{},{},{},\"{}\"",
                                r.space,
                                r.quantity,
                                r.value.lower,
                                r.value.upper,
                                r.reproduced,
                                r.source
                            ),
                        )?;
                    }
                }
                Format::Text => {
                    for r in all {
                        let v = if r.value.is_exact() {
                            num(r.value.lower)
                        } else {
                            format!("[{}, {}]", num(r.value.lower), num(r.value.upper))
                        };
                        w(
                            out,
                            format!(
                                "{:<14} {:<14} {:<8} {}",
                                r.space.name(),
                                r.quantity,
                                v,
                                r.source
                            ),
                        )?;
                    }
                }
            }
        }
    }
    Ok(0)
}

fn block_sequence(vector: &VectorArgs, blocks: &Option<Coeffs>) -> Result<BlockSequence> {
    match blocks {
        None => Ok(BlockSequence::coordinates(vector.space)),
        Some(cuts) => {
            let cuts: Vec<usize> = cuts
                .iter()
                .map(|c| {
                    if *c >= 0.0 && c.fract() == 0.0 {
                        Ok(*c as usize)
                    } else {
                        Err(Error::invalid(format!(
                            "cut `{c}` is not a nonnegative integer"
                        )))
                    }
                })
                .collect::<Result<_>>()?;
            let mut coeffs = match (&vector.coeffs, &vector.file) {
                (None, None) => vec![1.0; vector.space.dim()],
                _ => read_coeffs(vector)?,
            };
            coeffs.resize(vector.space.dim(), 0.0);
            BlockSequence::from_cuts(vector.space, &coeffs, &cuts)
        }
    }
}

#[derive(Serialize)]
struct CertificateOut<'a> {
    #[serde(flatten)]
    certificate: &'a EmbeddingCertificate,
    alpha_lower: Option<Estimate>,
}

fn print_certificate(out: &mut dyn Write, fmt: Format, cert: &EmbeddingCertificate) -> Result<()> {
    let alpha = embeddings::alpha_lower_bound(cert).ok();
    match fmt {
        Format::Json => {
            let v = serde_json::to_value(CertificateOut {
                certificate: cert,
                alpha_lower: alpha,
            })
            .expect("serializable");
            emit_json(out, v)
        }
        Format::Csv => {
            let mut s = String::from("quantity,value,direction,certified,method\n");
            let mut rows = vec![
                ("upper", &cert.upper),
                ("lower", &cert.lower),
                ("analytic_lower", &cert.analytic_lower),
            ];
            if let Some(a) = &alpha {
                rows.push(("alpha_lower", a));
            }
            for (k, e) in rows {
                s.push_str(&format!(
                    "{k},{},{},{},\"{}\"\n",
                    e.value,
                    e.direction.tag(),
                    e.certified,
                    e.method
                ));
            }
            write!(out, "{s}").map_err(io)
        }
        Format::Text => {
            writeln!(
                out,
                "{:?} copy in {} from {} blocks (scale {})",
                cert.model,
                cert.space,
                cert.m,
                num(cert.scale)
            )
            .map_err(io)?;
            for (k, e) in [
                ("upper", &cert.upper),
                ("lower", &cert.lower),
                ("closed", &cert.analytic_lower),
                ("Ku", &cert.ku),
            ] {
                writeln!(out, "{}", estimate_row(k, e)).map_err(io)?;
            }
            match &alpha {
                Some(a) => writeln!(out, "{}", estimate_row("alpha", a)).map_err(io),
                None => writeln!(out, "alpha    unavailable").map_err(io),
            }
        }
    }
}

/// Parses `argv`, runs the command and returns the exit status:
/// 0 success, 1 harness violation, 2 input error, 3 budget or solver failure.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Budget::from_env() {
        Ok(b) => {
            b.install();
        }
        Err(e) => {
            let _ = writeln!(err, "error: BQ_BUDGET: {e}");
            return 2;
        }
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if !e.use_stderr() {
                0
            } else if std::error::Error::source(&e)
                .and_then(|s| s.downcast_ref::<Error>())
                .is_some_and(Error::is_resource_failure)
            {
                3
            } else {
                2
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match run_command(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_resource_failure() {
                3
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["bq"];
        argv.extend_from_slice(args);
        let code = dispatch(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn james_norm_of_ones() {
        let (code, out, _) = run(&["norm", "james:8", "--coeffs", "1,1,1,1,1,1,1,1"]);
        assert_eq!((code, out.as_str()), (0, "1\n"));
    }

    #[test]
    fn unknown_verb_and_bad_input() {
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["norm", "c0:2", "--coeffs", "1,2,3"]).0, 2);
        assert_eq!(run(&["norm", "james:40", "--coeffs", "1"]).0, 3);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn json_output_carries_schema() {
        let (code, out, _) = run(&["constants", "summing:6", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["constants"][0]["value"], 2.0);
        assert_eq!(v["constants"][1]["value"], 11.0);
        assert_eq!(v["constants"][1]["direction"], "Exact");
    }

    #[test]
    fn every_verb_runs() {
        for args in [
            vec!["dualnorm", "james:4", "--coeffs", "1,0,0,0"],
            vec!["profile", "l1:5", "--witness", "l1-ones"],
            vec![
                "ca",
                "c:6",
                "--witness",
                "c-unit-jump",
                "--upper-check",
                "1.5",
            ],
            vec![
                "certify-l1",
                "summing:6",
                "--coeffs",
                "1,-1,1,-1,1,-1",
                "--blocks",
                "0,2,4,6",
                "--functional",
                "0,-0.2,0,-0.2,0,-0.2",
            ],
            vec!["certify-c0", "c0:6", "--blocks", "0,2,4,6"],
            vec!["fixtures", "--csv"],
        ] {
            let (code, out, err) = run(&args);
            assert_eq!(code, 0, "{args:?}: {err}");
            assert!(!out.is_empty());
        }
    }
}
