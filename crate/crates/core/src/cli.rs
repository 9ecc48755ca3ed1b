//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error (and a non-member for `member`), 2 the word-count
//! limit was hit, 3 a verification failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::basis::{self, BasisError, DEFAULT_MAX_WORDS};
use crate::eval::{self, EvalError};
use crate::exterior::{self, GlWeight};
use crate::growth::{grow, FlowDiagram};
use crate::member;
use crate::svg;
use crate::wave;
use crate::words::{enumerate_words, TypeString, Word};

/// Environment variable overriding the word-count limit.
pub const MAX_WORDS_VAR: &str = "GLWEB_MAX_WORDS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "glweb", version, about = "Web bases for tensor products of V and its dual over quantum gl(n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow the diagram of a word and print it in text form.
    Grow {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: Word,
        /// Also write an SVG drawing.
        #[arg(long)]
        render: Option<PathBuf>,
        /// Write the diagram here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the coefficients of a word's vector, one `word<TAB>coefficient` line each.
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: Word,
        /// Use the slice-by-slice evaluator.
        #[arg(long)]
        slice: bool,
    },
    /// Assemble the coefficient matrix of all words of a length.
    Basis {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "type")]
        type_: Option<TypeString>,
        #[arg(long)]
        weight: Option<GlWeight>,
        /// CSV, or JSON when the name ends in `.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check triangularity and print a PASS/FAIL line.
        #[arg(long)]
        verify: bool,
    },
    /// Check triangularity for every length up to `r`.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
    /// List the words giving invariant tensors of a type.
    Invariants {
        #[arg(long)]
        n: usize,
        #[arg(long = "type")]
        type_: TypeString,
    },
    /// List the words giving highest weight vectors of a type and weight.
    Hw {
        #[arg(long)]
        n: usize,
        #[arg(long = "type")]
        type_: TypeString,
        #[arg(long)]
        weight: GlWeight,
    },
    /// Pages, book and closed wave graph of a word, or all closed wave graphs of a shape.
    Wave {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        word: Option<Word>,
        /// Enumerate closed wave graphs with K blocks of size N.
        #[arg(long, num_args = 2, value_names = ["N", "K"])]
        enumerate: Option<Vec<usize>>,
    },
    /// Decide whether a diagram file is a basis diagram; exit 0 if so, 1 if not.
    Member {
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Draw a diagram file, or the grown diagram of a word, as SVG.
    Render {
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[arg(long)]
        word: Option<Word>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in verification suites.
    Selftest,
}

enum Failure {
    Usage(String),
    Guard(String),
    Verify,
    NotMember,
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<BasisError> for Failure {
    fn from(e: BasisError) -> Self {
        match e {
            BasisError::TooLarge { .. } => Failure::Guard(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn max_words() -> Result<usize, Failure> {
    match std::env::var(MAX_WORDS_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{MAX_WORDS_VAR} must be a number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_WORDS),
    }
}

fn check_n(n: usize) -> Result<(), Failure> {
    if n == 0 || n > exterior::MAX_RANK {
        return Err(usage(format!("n must be in 1..={}", exterior::MAX_RANK)));
    }
    Ok(())
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parses `args` (including the program name) and runs the command, writing to `out`.
/// Diagnostics go to standard error. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Guard(m)) => {
            eprintln!("error: {m} (raise {MAX_WORDS_VAR} to allow more)");
            EXIT_GUARD
        }
        Err(Failure::Verify) => EXIT_VERIFY,
        Err(Failure::NotMember) => EXIT_USAGE,
    }
}

fn read_diagram(path: &PathBuf) -> Result<FlowDiagram, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    FlowDiagram::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Grow { n, word, render, out: path } => {
            check_n(n)?;
            let d = grow(&word, n).map_err(usage)?;
            match path {
                Some(p) => fs::write(p, d.to_text())?,
                None => write!(out, "{}", d.to_text())?,
            }
            if let Some(p) = render {
                fs::write(p, svg::render(&d))?;
            }
        }
        Command::Eval { n, word, slice } => {
            check_n(n)?;
            let d = grow(&word, n).map_err(usage)?;
            let coeffs = if slice {
                let v = eval::slice_evaluate_diagram(&d)?;
                let top = d.top();
                v.terms()
                    .iter()
                    .map(|(k, c)| {
                        let letters = k
                            .iter()
                            .zip(&top)
                            .map(|(s, &l)| {
                                let value = s.trailing_zeros() + 1;
                                if l < 0 {
                                    crate::words::Letter::bar(value)
                                } else {
                                    crate::words::Letter::plain(value)
                                }
                            })
                            .collect();
                        (Word::new(letters), c.clone())
                    })
                    .collect()
            } else {
                eval::evaluate_diagram(&d)?
            };
            for (x, c) in coeffs {
                writeln!(out, "{x}\t{c}")?;
            }
        }
        Command::Basis { n, r, type_, weight, out: path, verify } => {
            check_n(n)?;
            let m = basis::assemble(r, n, type_.as_ref(), weight.as_ref(), max_words()?)?;
            match &path {
                Some(p) if p.extension().is_some_and(|e| e == "json") => {
                    let text = serde_json::to_string_pretty(&m.to_json()).map_err(usage)?;
                    fs::write(p, text + "\n")?;
                }
                Some(p) => m.write_csv(fs::File::create(p)?)?,
                None if !verify => m.write_csv(&mut *out)?,
                None => {}
            }
            if verify {
                let rep = basis::verify_triangular(&m);
                writeln!(
                    out,
                    "{} triangularity n={n} r={r}: {} rows, {} violations",
                    status(rep.passed()),
                    rep.rows,
                    rep.violations.len()
                )?;
                for v in &rep.violations {
                    writeln!(out, "  {v}")?;
                }
                if !rep.passed() {
                    return Err(Failure::Verify);
                }
            }
        }
        Command::Verify { n, r } => {
            check_n(n)?;
            let mut ok = true;
            for len in 0..=r {
                let m = basis::assemble(len, n, None, None, max_words()?)?;
                let rep = basis::verify_triangular(&m);
                writeln!(
                    out,
                    "{} triangularity n={n} r={len}: {} rows, {} violations",
                    status(rep.passed()),
                    rep.rows,
                    rep.violations.len()
                )?;
                for v in rep.violations.iter().take(10) {
                    writeln!(out, "  {v}")?;
                }
                ok &= rep.passed();
            }
            if !ok {
                return Err(Failure::Verify);
            }
        }
        Command::Invariants { n, type_ } => {
            check_n(n)?;
            let words = basis::invariant_basis(&type_, n)?;
            for w in &words {
                writeln!(out, "{w}")?;
            }
            let oracle = basis::oracle_invariants(&type_, n);
            writeln!(out, "{} count {} oracle {oracle}", status(words.len() == oracle), words.len())?;
            if words.len() != oracle {
                return Err(Failure::Verify);
            }
        }
        Command::Hw { n, type_, weight } => {
            check_n(n)?;
            if weight.n() != n {
                return Err(usage(format!("weight {weight} does not have {n} coordinates")));
            }
            let words = basis::highest_weight_subset(&type_, &weight, n)?;
            for w in &words {
                writeln!(out, "{w}")?;
            }
            let oracle = basis::oracle_dimensions(&type_, &weight, n);
            writeln!(out, "{} count {} oracle {oracle}", status(words.len() == oracle), words.len())?;
            if words.len() != oracle {
                return Err(Failure::Verify);
            }
        }
        Command::Wave { n, word, enumerate } => match (word, enumerate) {
            (Some(w), None) => {
                let n = n.ok_or_else(|| usage("--word needs --n"))?;
                let pages = wave::pages_of(&w, n).map_err(usage)?;
                for p in &pages {
                    writeln!(out, "page {}: {p}", p.index)?;
                }
                let book = wave::bind_book(&pages).map_err(usage)?;
                for a in &book.arcs {
                    writeln!(out, "arc page {} {}-{}", a.page, a.left + 1, a.right + 1)?;
                }
                for h in &book.open {
                    writeln!(out, "open page {} {} {}", h.page, h.pos + 1, if h.opening { "up" } else { "down" })?;
                }
                match wave::closed_wave_of(&w, n).map_err(usage)? {
                    Some(g) => writeln!(out, "closed {g}")?,
                    None => writeln!(out, "not closed")?,
                }
            }
            (None, Some(nk)) => {
                let all = wave::enumerate_closed(nk[0], nk[1]).map_err(usage)?;
                for g in &all {
                    writeln!(out, "{g}\t{}", g.word())?;
                }
                writeln!(out, "count {}", all.len())?;
            }
            _ => return Err(usage("give either --word with --n, or --enumerate N K")),
        },
        Command::Member { diagram } => {
            let d = read_diagram(&diagram)?;
            match member::is_basis_diagram(&d) {
                Ok(rep) => {
                    writeln!(out, "is_basis {}", rep.is_basis)?;
                    writeln!(out, "word {}", rep.extracted_word)?;
                    if let Some((i, j)) = rep.mismatch_cell {
                        writeln!(out, "mismatch {i} {j}")?;
                    }
                    if !rep.is_basis {
                        return Err(Failure::NotMember);
                    }
                }
                Err(member::MemberError::Zero) => {
                    writeln!(out, "is_basis false")?;
                    writeln!(out, "word none")?;
                    return Err(Failure::NotMember);
                }
                Err(e) => return Err(usage(e)),
            }
        }
        Command::Render { diagram, word, n, out: path } => {
            let d = match (diagram, word, n) {
                (Some(p), None, _) => read_diagram(&p)?,
                (None, Some(w), Some(n)) => {
                    check_n(n)?;
                    grow(&w, n).map_err(usage)?
                }
                _ => return Err(usage("give either --diagram, or --word with --n")),
            };
            fs::write(path, svg::render(&d))?;
        }
        Command::Selftest => {
            if !selftest(out)? {
                return Err(Failure::Verify);
            }
        }
    }
    Ok(())
}

/// Reduced versions of the verification suites, one PASS/FAIL line each.
fn selftest(out: &mut dyn Write) -> Result<bool, Failure> {
    let mut all = true;
    let mut line = |out: &mut dyn Write, ok: bool, name: &str| -> Result<(), Failure> {
        all &= ok;
        writeln!(out, "{} {name}", status(ok))?;
        Ok(())
    };

    for n in 2..=3 {
        let rep = exterior::verify_hopf_relations(n, false).map_err(usage)?;
        line(out, rep.passed(), &format!("relations n={n} ({} checks)", rep.checked))?;
    }

    let mut equivariant = true;
    for n in 1..=2i32 {
        for r in -n..=n {
            for s in -n..=n {
                if (r + s).abs() <= n {
                    let merge = exterior::check_equivariance(n as usize, &[r, s], |x| x.merge_at(0)).map_err(usage)?;
                    let split = exterior::check_equivariance(n as usize, &[r + s], |x| x.split_at(0, r, s)).map_err(usage)?;
                    equivariant &= merge.is_none() && split.is_none();
                }
            }
        }
    }
    line(out, equivariant, "equivariance n<=2")?;

    let mut triangular = true;
    for (n, r) in [(2, 4), (3, 3)] {
        for len in 0..=r {
            triangular &= basis::verify_triangular(&basis::assemble(len, n, None, None, DEFAULT_MAX_WORDS)?).passed();
        }
    }
    line(out, triangular, "triangularity n=2 r<=4, n=3 r<=3")?;

    let mut counts = true;
    for r in 0..=4 {
        for u in TypeString::all(r) {
            counts &= basis::invariant_basis(&u, 2)?.len() == basis::oracle_invariants(&u, 2);
        }
    }
    let six: TypeString = "++++++".parse().map_err(usage)?;
    counts &= basis::highest_weight_subset(&six, &GlWeight::new(vec![3, 3]), 2)?.len() == 5;
    line(out, counts, "invariant and highest weight counts")?;

    let mut round_trip = true;
    for n in 1..=3 {
        for r in 0..=3 {
            for x in enumerate_words(r, n, None, None) {
                let d = grow(&x, n).map_err(usage)?;
                round_trip &= FlowDiagram::from_text(&d.to_text()).ok().as_ref() == Some(&d);
                round_trip &= member::is_basis_diagram(&d).is_ok_and(|m| m.is_basis && m.extracted_word == x);
            }
        }
    }
    line(out, round_trip, "text and membership round trip r<=3")?;

    let waves = wave::enumerate_closed(3, 2).map_err(usage)?.len() == 5 && wave::enumerate_closed(3, 3).map_err(usage)?.len() == 42;
    line(out, waves, "closed wave graph counts")?;
    Ok(all)
}
