//! `bt`: check, normalize, rewrite, instantiate, prove, evaluate and render
//! !-tensor expressions.
//!
//! Exit status is 0 on success, 1 when the input is well understood but the
//! answer is negative (ill-formed term, rejected proof, failing instance),
//! and 2 for usage, file and parse errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bangtensor::boxops::{apply_op, fresh_for, weaken, BoxOp, OpKind};
use bangtensor::calculus::{Checker, Equation, Theory};
use bangtensor::instantiate::{enumerate_instances, InstanceBound};
use bangtensor::model::parse_model;
use bangtensor::render::to_dot;
use bangtensor::syntax::{export_json, parse_proof, parse_theory};
use bangtensor::{check_wellformed, normalize, parse_tensor, BoxName, TensorExpr};
use clap::{ArgGroup, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bt",
    version,
    about = "A checker and rewriter for !-tensor expressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report well-formedness violations.
    Check { file: PathBuf },
    /// Print the canonical form.
    Normalize {
        /// Print the canonical form as JSON.
        #[arg(long)]
        json: bool,
        file: PathBuf,
    },
    /// Apply one !-box operation.
    #[command(group(ArgGroup::new("operation").required(true).args(["exp", "kill", "copy", "drop", "weaken"])))]
    Op {
        #[arg(long, value_name = "BOX")]
        exp: Option<String>,
        #[arg(long, value_name = "BOX")]
        kill: Option<String>,
        #[arg(long, value_name = "BOX")]
        copy: Option<String>,
        #[arg(long, value_name = "BOX")]
        drop: Option<String>,
        /// Add the `--with` expression inside this box.
        #[arg(long, value_name = "BOX", requires = "with")]
        weaken: Option<String>,
        #[arg(long, value_name = "EXPR")]
        with: Option<String>,
        file: PathBuf,
    },
    /// Print every concrete instance with at most N expansions per box.
    Instantiate {
        #[arg(long, value_name = "N")]
        bound: usize,
        file: PathBuf,
    },
    /// Check proof scripts against a theory. Theorems accepted in one script
    /// are available as lemmas in later ones.
    Prove {
        theory: PathBuf,
        #[arg(required = true)]
        proofs: Vec<PathBuf>,
    },
    /// Compare both sides of every bounded instance of an axiom or theorem
    /// in an array model.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "N")]
        bound: usize,
        /// Proof scripts to search for theorem statements.
        #[arg(long = "proof", value_name = "FILE")]
        proofs: Vec<PathBuf>,
        theory: PathBuf,
        equation: String,
    },
    /// Print the Graphviz DOT rendering.
    Render { file: PathBuf },
}

/// Why a command stopped early.
enum Failure {
    /// Bad input: unreadable file, parse error, unknown name.
    Usage(String),
    /// A negative answer, already printed.
    Negative,
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn tensor(path: &Path) -> Result<TensorExpr, Failure> {
    parse_tensor(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn theory(path: &Path) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn box_name(s: &str) -> Result<BoxName, Failure> {
    BoxName::new(s).map_err(usage)
}

/// Print violations and fail if the term is ill-formed.
fn require_wellformed(out: &mut impl Write, g: &TensorExpr) -> Outcome {
    match check_wellformed(g) {
        Ok(()) => Ok(()),
        Err(vs) => {
            for v in vs {
                writeln!(out, "{v}").ok();
            }
            Err(Failure::Negative)
        }
    }
}

fn run(cmd: Command, out: &mut impl Write) -> Outcome {
    match cmd {
        Command::Check { file } => {
            let g = tensor(&file)?;
            require_wellformed(out, &g)?;
            writeln!(out, "ok").ok();
        }
        Command::Normalize { json, file } => {
            let g = tensor(&file)?;
            require_wellformed(out, &g)?;
            let n = normalize(&g).map_err(|_| Failure::Negative)?;
            if json {
                writeln!(out, "{}", export_json(&n)).ok();
            } else {
                writeln!(out, "{n}").ok();
            }
        }
        Command::Op {
            exp,
            kill,
            copy,
            drop,
            weaken: wk,
            with,
            file,
        } => {
            let g = tensor(&file)?;
            require_wellformed(out, &g)?;
            let result = if let Some(a) = wk {
                let k = parse_tensor(with.as_deref().unwrap_or("1"))
                    .map_err(|e| usage(format!("--with: {e}")))?;
                weaken(&box_name(&a)?, &k, &g)
            } else {
                let (kind, target) = [
                    (OpKind::Exp, exp),
                    (OpKind::Kill, kill),
                    (OpKind::Copy, copy),
                    (OpKind::Drop, drop),
                ]
                .into_iter()
                .find_map(|(k, t)| t.map(|t| (k, t)))
                .expect("clap requires one operation");
                let mut fr = fresh_for([&g]);
                apply_op(&BoxOp::new(kind, box_name(&target)?), &mut fr, &g)
            };
            match result {
                Ok(h) => writeln!(out, "{h}").ok(),
                Err(e) => {
                    writeln!(out, "{e}").ok();
                    return Err(Failure::Negative);
                }
            };
        }
        Command::Instantiate { bound, file } => {
            let g = tensor(&file)?;
            require_wellformed(out, &g)?;
            for inst in enumerate_instances(&g, InstanceBound(bound)) {
                writeln!(out, "{inst}").ok();
            }
        }
        Command::Prove { theory: th, proofs } => {
            let th = theory(&th)?;
            let mut checker = Checker::new(&th);
            let mut accepted = true;
            for p in &proofs {
                let script =
                    parse_proof(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                let verdict = checker.check_script(&script);
                accepted &= verdict.accepted();
                write!(out, "{verdict}").ok();
            }
            if !accepted {
                return Err(Failure::Negative);
            }
        }
        Command::Eval {
            model,
            bound,
            proofs,
            theory: th,
            equation,
        } => {
            let th = theory(&th)?;
            let m = parse_model(&read(&model)?)
                .map_err(|e| usage(format!("{}: {e}", model.display())))?;
            let eq = find_equation(&th, &proofs, &equation)?;
            let report = m.check(&eq, InstanceBound(bound)).map_err(usage)?;
            writeln!(out, "{report}").ok();
            if !report.passed() {
                return Err(Failure::Negative);
            }
        }
        Command::Render { file } => {
            let g = tensor(&file)?;
            require_wellformed(out, &g)?;
            write!(out, "{}", to_dot(&g).expect("checked above")).ok();
        }
    }
    Ok(())
}

fn find_equation(th: &Theory, proofs: &[PathBuf], name: &str) -> Result<Equation, Failure> {
    if let Some(ax) = th.axiom(name) {
        return Ok(ax.clone());
    }
    for p in proofs {
        let script = parse_proof(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        if let Some(t) = script.theorems.into_iter().find(|t| t.name == name) {
            return Ok(t.statement);
        }
    }
    Err(usage(format!("no axiom or theorem named {name}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("bt: {msg}");
            ExitCode::from(2)
        }
    }
}
