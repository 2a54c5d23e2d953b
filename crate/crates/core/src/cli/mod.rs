//! The `tamewild` command line.
//!
//! Exit codes: 0 yes / falsified, 1 no, 2 parse error, 3 shape error,
//! 4 search too large, 5 not falsified.

mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use format::{extract_section, section, MatrixFile, TransformFile};

use crate::algebra::PrimeField;
use crate::equivalence::{
    orbit_table, pair_similarity_problem, sim_similar, similar, similar_bruteforce,
    single_similarity_problem, tuple_at,
};
use crate::error::{Error, Result};
use crate::invariants::{char_poly, invariant_factors, rational_canonical_form, spectrum_in_field};
use crate::matrix::{mat_det, mat_rank, Matrix, MatrixSpace, MatrixTuple};
use crate::wildness::{apply_transform, falsify_containment, Outcome, ScalarStage, Verdict};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SHAPE: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;
pub const EXIT_NOT_FALSIFIED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "tamewild",
    version,
    about = "Similarity invariants and containment falsification over F_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Invariant,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Single,
    Pairs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, determinant, characteristic polynomial, roots, invariant factors
    /// and rational canonical form of one square matrix.
    Invariants { path: PathBuf },
    /// Decide whether two matrices are similar.
    Similar {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "invariant")]
        mode: Mode,
    },
    /// Decide whether two pairs are simultaneously similar.
    Simsimilar { a: PathBuf, b: PathBuf },
    /// Partition all objects of a problem into equivalence classes.
    Orbits {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a transform on a tuple of matrices.
    Apply {
        transform: PathBuf,
        input: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Search for a counterexample to a pair-to-single containment witness.
    Falsify {
        transform: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Defaults to the modulus in the transform file.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::NotPrime(_) => EXIT_PARSE,
        Error::TooLarge(_) => EXIT_TOO_LARGE,
        _ => EXIT_SHAPE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_YES };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut text = String::new();
    let code = match execute(&cli.command, &mut text) {
        Ok(code) => code,
        Err(CliError::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_PARSE;
        }
        Err(CliError::Core(path, e)) => {
            let _ = write!(out, "{text}");
            match path {
                Some(p) => {
                    let _ = writeln!(err, "error: {}: {e}", p.display());
                }
                None => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            return exit_code(&e);
        }
    };
    let _ = write!(out, "{text}");
    code
}

enum CliError {
    Io(String),
    Core(Option<PathBuf>, Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(None, e)
    }
}

fn read(path: &Path) -> std::result::Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_matrices(path: &Path) -> std::result::Result<MatrixFile, CliError> {
    MatrixFile::parse(&read(path)?).map_err(|e| CliError::Core(Some(path.to_owned()), e))
}

fn load_transform(path: &Path) -> std::result::Result<TransformFile, CliError> {
    TransformFile::parse(&read(path)?).map_err(|e| CliError::Core(Some(path.to_owned()), e))
}

fn in_file<T>(path: &Path, r: Result<T>) -> std::result::Result<T, CliError> {
    r.map_err(|e| CliError::Core(Some(path.to_owned()), e))
}

fn matrix_section(name: &str, m: &Matrix) -> String {
    section(
        name,
        &MatrixFile::new(vec![m.clone()])
            .expect("one matrix")
            .to_string(),
    )
}

fn tuple_section(name: &str, t: &MatrixTuple) -> String {
    section(name, &MatrixFile::from_tuple(t).to_string())
}

fn yes_no(b: bool) -> (&'static str, i32) {
    if b {
        ("YES", EXIT_YES)
    } else {
        ("NO", EXIT_NO)
    }
}

fn execute(cmd: &Command, out: &mut String) -> std::result::Result<i32, CliError> {
    match cmd {
        Command::Invariants { path } => {
            let file = load_matrices(path)?;
            let a = in_file(path, file.single_square())?;
            let factors = invariant_factors(a)?;
            let spectrum: Vec<String> = spectrum_in_field(a)?
                .iter()
                .map(|r| r.to_string())
                .collect();
            out.push_str(&format!("rank: {}\n", mat_rank(a)));
            out.push_str(&format!("det: {}\n", mat_det(a)?));
            out.push_str(&format!("char_poly: {}\n", char_poly(a)?));
            out.push_str(&format!("spectrum: [{}]\n", spectrum.join(", ")));
            out.push_str(&format!("invariant_factors: {factors}\n"));
            out.push_str(&matrix_section("rcf", &rational_canonical_form(&factors)?));
            Ok(EXIT_YES)
        }
        Command::Similar { a, b, mode } => {
            let fa = load_matrices(a)?;
            let fb = load_matrices(b)?;
            let ma = in_file(a, fa.single_square())?;
            let mb = in_file(b, fb.single_square())?;
            match mode {
                Mode::Invariant => {
                    let (word, code) = yes_no(similar(ma, mb)?);
                    out.push_str(&format!("{word}\n"));
                    Ok(code)
                }
                Mode::Bruteforce => {
                    let s = similar_bruteforce(ma, mb)?;
                    let (word, code) = yes_no(s.is_some());
                    out.push_str(&format!("{word}\n"));
                    if let Some(s) = s {
                        out.push_str(&matrix_section("conjugator", &s));
                    }
                    Ok(code)
                }
            }
        }
        Command::Simsimilar { a, b } => {
            let ta = in_file(a, load_matrices(a)?.tuple(2))?;
            let tb = in_file(b, load_matrices(b)?.tuple(2))?;
            let s = sim_similar(&ta, &tb)?;
            let (word, code) = yes_no(s.is_some());
            out.push_str(&format!("{word}\n"));
            if let Some(s) = s {
                out.push_str(&matrix_section("conjugator", &s));
            }
            Ok(code)
        }
        Command::Orbits {
            problem,
            n,
            p,
            json,
        } => {
            cmd_orbits(*problem, *n, *p, *json, out)?;
            Ok(EXIT_YES)
        }
        Command::Apply {
            transform,
            input,
            budget,
        } => {
            let mut t = load_transform(transform)?.transform;
            if let Some(b) = budget {
                t = t.with_budget(*b);
            }
            let x = load_matrices(input)?;
            let x = in_file(input, x.tuple(t.arity_in()))?;
            let (y, steps) = apply_transform(&t, &x)?;
            out.push_str(&format!("steps: {steps}\n"));
            out.push_str(&tuple_section("output", &y));
            Ok(EXIT_YES)
        }
        Command::Falsify {
            transform,
            n,
            p,
            budget,
            json,
        } => {
            let mut t = load_transform(transform)?.transform;
            if let Some(b) = budget {
                t = t.with_budget(*b);
            }
            let p = match p {
                Some(p) => u32::try_from(*p).map_err(|_| Error::NotPrime(*p))?,
                None => t.field().modulus(),
            };
            let verdict = falsify_containment(&t, *n, p)?;
            if *json {
                out.push_str(&verdict_json(&verdict));
                out.push('\n');
            } else {
                out.push_str(&verdict_text(&verdict));
            }
            Ok(if verdict.is_falsified() {
                EXIT_YES
            } else {
                EXIT_NOT_FALSIFIED
            })
        }
    }
}

fn cmd_orbits(kind: ProblemKind, n: usize, p: u64, json: bool, out: &mut String) -> Result<()> {
    let field = PrimeField::new(p)?;
    let space = MatrixSpace::new(n, field)?;
    let (table, arity) = match kind {
        ProblemKind::Single => (orbit_table(&single_similarity_problem(n, field)?)?, 1),
        ProblemKind::Pairs => (orbit_table(&pair_similarity_problem(n, field)?)?, 2),
    };
    let reps: Vec<MatrixTuple> = table
        .representatives
        .iter()
        .map(|&r| tuple_at(&space, arity, r))
        .collect();
    if json {
        let orbits: Vec<_> = table
            .classes
            .iter()
            .zip(&reps)
            .map(|(c, r)| {
                json!({
                    "size": c.len(),
                    "representative": r.parts().iter().map(rows_of).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = json!({
            "problem": match kind { ProblemKind::Single => "single", ProblemKind::Pairs => "pairs" },
            "n": n,
            "p": p,
            "objects": space.len().pow(arity as u32),
            "classes": table.class_count(),
            "orbits": orbits,
        });
        out.push_str(&serde_json::to_string_pretty(&doc).expect("json values serialize"));
        out.push('\n');
        return Ok(());
    }
    out.push_str(&format!("{} classes\n", table.class_count()));
    for (k, (c, r)) in table.classes.iter().zip(&reps).enumerate() {
        let parts: Vec<String> = r
            .parts()
            .iter()
            .map(|m| {
                m.entries()
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&format!(
            "class {k} size {} rep {}\n",
            c.len(),
            parts.join(" | ")
        ));
    }
    Ok(())
}

fn rows_of(m: &Matrix) -> Vec<Vec<u32>> {
    m.entries().chunks(m.cols()).map(<[u32]>::to_vec).collect()
}

fn tuple_rows(t: &MatrixTuple) -> Vec<Vec<Vec<u32>>> {
    t.parts().iter().map(rows_of).collect()
}

fn stage_text(s: &ScalarStage) -> String {
    match s {
        ScalarStage::Collision {
            first,
            second,
            value,
        } => format!(
            "collision ({},{}) ({},{}) -> {value}",
            first.0, first.1, second.0, second.1
        ),
        ScalarStage::Degenerate => "degenerate".into(),
    }
}

/// Text report. Tuples and images are emitted as matrix-file sections so
/// they can be fed back to `simsimilar` and `similar`.
pub fn verdict_text(v: &Verdict) -> String {
    let mut s = format!(
        "verdict: {}\nscalar_stage: {}\nsteps: {}\n",
        v.label(),
        stage_text(&v.scalar_stage),
        v.steps_used
    );
    match &v.outcome {
        Outcome::FailsCondition1 { input, reason } => {
            s.push_str(&format!("reason: {reason}\n"));
            s.push_str(&tuple_section("input", input));
        }
        Outcome::FailsCondition2(w) | Outcome::DegenerateOnScalars(w) => {
            s.push_str(&format!("pairs_equivalent: {}\n", w.pairs_equivalent));
            s.push_str(&format!("images_similar: {}\n", !w.pairs_equivalent));
            s.push_str(&tuple_section("left", &w.left));
            s.push_str(&tuple_section("right", &w.right));
            s.push_str(&matrix_section("left_image", &w.left_image));
            s.push_str(&matrix_section("right_image", &w.right_image));
            if let Some(c) = &w.image_conjugator {
                s.push_str(&matrix_section("image_conjugator", c));
            }
        }
        Outcome::NotFalsified { reason } => s.push_str(&format!("reason: {reason}\n")),
    }
    s
}

pub fn verdict_json(v: &Verdict) -> String {
    let mut doc = json!({
        "verdict": v.label(),
        "scalar_stage": v.scalar_stage,
        "steps_used": v.steps_used,
    });
    match &v.outcome {
        Outcome::FailsCondition1 { input, reason } => {
            doc["reason"] = json!(reason);
            doc["input"] = json!(tuple_rows(input));
        }
        Outcome::FailsCondition2(w) | Outcome::DegenerateOnScalars(w) => {
            doc["witness"] = json!({
                "left": tuple_rows(&w.left),
                "right": tuple_rows(&w.right),
                "left_image": rows_of(&w.left_image),
                "right_image": rows_of(&w.right_image),
                "pairs_equivalent": w.pairs_equivalent,
                "image_conjugator": w.image_conjugator.as_ref().map(rows_of),
            });
        }
        Outcome::NotFalsified { reason } => doc["reason"] = json!(reason),
    }
    serde_json::to_string_pretty(&doc).expect("json values serialize")
}
