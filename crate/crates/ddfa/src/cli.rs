//! `ddfa` subcommands.
//!
//! Exit codes: 0 success (or verified), 1 verification/search failure,
//! 2 input error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddfa_core::automaton::{to_dot, AutomatonError, Word};
use ddfa_core::discharge::{DischargeError, StateValuation};
use ddfa_core::regularity::{
    k_kernel, scaled_charge_check, search_relation_menus, verify_quasi_k_regular, ConjectureOutcome,
    ConjectureParams, Level, RegularityError, SearchParams,
};
use ddfa_core::sequences::{FinalChargeSequence, SequenceError, Tabulated};
use ddfa_core::Ratio;
use num_traits::One;

use crate::bfile::{format_bfile, parse_bfile, BFileError};
use crate::builtin::{Builtin, BuiltinError};
use crate::document::{load_document, DocumentError, Loaded, LoadedAutomaton};
use crate::specfile::{load_spec, SpecFile, SpecFileError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ddfa", version, about = "Discharging finite automata: runs, sequences and regularity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an automaton document.
    Validate {
        doc: PathBuf,
    },
    /// Run a word and print the final state and charge.
    Run {
        doc: PathBuf,
        /// Symbols, one character each, or separated by spaces/commas; "" or ε is the empty word.
        word: String,
        /// Print the state and charge vector after every step.
        #[arg(long)]
        trace: bool,
        /// Start state (defaults to the document's start state).
        #[arg(long)]
        from: Option<String>,
    },
    /// Print the first terms of a final-charge or builtin sequence.
    Sequence(SequenceArgs),
    /// Check relation menus for a sequence, or run the scaled-charge experiment.
    Verify(VerifyArgs),
    /// Search relation menus at one level by brute force.
    Search(SearchArgs),
    /// Distinct vectors and ranks of the truncated k-kernel.
    Kernel(KernelArgs),
    /// Graphviz rendering of an automaton.
    Dot {
        doc: PathBuf,
        /// Graph name (defaults to the file stem).
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    /// Final charge.
    Charge,
    /// Numerator of the final charge in lowest terms.
    Numerator,
    /// Final charge times the valuation of the final state.
    Reduced,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    /// Automaton document; its alphabet must be the digits of the base.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    pub doc: Option<PathBuf>,
    /// Builtin sequence instead of a document.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum)]
    pub form: Option<Form>,
    /// Write an OEIS b-file instead of printing.
    #[arg(long)]
    pub bfile: Option<PathBuf>,
    /// First index in the b-file.
    #[arg(long, default_value_t = 0)]
    pub offset: u64,
}

#[derive(Debug, Args)]
pub struct SequenceSource {
    /// Builtin sequence name.
    #[arg(long, conflicts_with = "seq_file")]
    pub seq: Option<String>,
    /// b-file starting at index 0.
    #[arg(long)]
    pub seq_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Conjecture {
    /// Scale each reduced final charge by the least power of the base making it an integer.
    ScaledCharges,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SequenceSource,
    /// Spec file with the relation menus.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Largest n checked [default: 4096, or 2048 with --conjecture].
    #[arg(long)]
    pub max: Option<u64>,
    /// Levels checked above the exponent bound.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, value_enum, requires = "doc")]
    pub conjecture: Option<Conjecture>,
    /// Discharging automaton for --conjecture; its valuation is used, or 1 everywhere.
    #[arg(long)]
    pub doc: Option<PathBuf>,
    /// Base for --conjecture.
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    /// Coefficient bound for --conjecture.
    #[arg(long, default_value_t = 2)]
    pub coeff_bound: i64,
    /// Exponent bound E for --conjecture.
    #[arg(long, default_value_t = 1)]
    pub exponent_bound: u32,
    /// Starting index m for --conjecture.
    #[arg(long, default_value_t = 1)]
    pub start: u64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub source: SequenceSource,
    #[arg(long)]
    pub base: u64,
    #[arg(long)]
    pub exponent_bound: u32,
    #[arg(long)]
    pub start: u64,
    /// Level searched [default: exponent bound + 1].
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long)]
    pub coeff_bound: i64,
    #[arg(long)]
    pub max: u64,
    /// Write the menus found as a spec file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub source: SequenceSource,
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    /// Length of each truncated kernel vector.
    #[arg(long, default_value_t = 64)]
    pub window: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Document { path: PathBuf, source: DocumentError },
    #[error("{}: {source}", path.display())]
    Spec { path: PathBuf, source: SpecFileError },
    #[error("{}: {source}", path.display())]
    BFile { path: PathBuf, source: BFileError },
    #[error(transparent)]
    Builtin(#[from] BuiltinError),
    #[error(transparent)]
    Regularity(#[from] RegularityError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Discharge(#[from] DischargeError),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    load_document(&read(path)?).map_err(|source| CliError::Document { path: path.to_path_buf(), source })
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Integer sequence with at least `len` terms.
fn integer_source(source: &SequenceSource, len: u64) -> Result<Tabulated, CliError> {
    let len = usize::try_from(len).map_err(|_| usage("requested range is too large"))?;
    match (&source.seq, &source.seq_file) {
        (Some(name), None) => Ok(name.parse::<Builtin>()?.integers(len)?),
        (None, Some(path)) => {
            let (first, values) =
                parse_bfile(&read(path)?).map_err(|source| CliError::BFile { path: path.clone(), source })?;
            if first != 0 {
                return Err(usage(format!("{}: b-file must start at index 0", path.display())));
            }
            if values.len() < len {
                return Err(usage(format!("{}: {} terms given, {len} needed", path.display(), values.len())));
            }
            Ok(Tabulated::new(values))
        }
        _ => Err(usage("give a sequence with --seq NAME or --seq-file PATH")),
    }
}

fn span(base: u64, exponent: u32, count: u64) -> Result<u64, CliError> {
    base.checked_pow(exponent)
        .and_then(|b| b.checked_mul(count))
        .ok_or_else(|| usage("requested range is too large"))
}

fn level_name(level: Level) -> String {
    format!("({}, {})", level.exponent, level.residue)
}

fn cmd_validate(doc: &Path, out: &mut dyn Write) -> Result<u8, CliError> {
    let loaded = load(doc)?;
    let m = loaded.machine();
    write!(out, "valid {}: {} states, {} symbols", loaded.kind(), m.num_states(), m.num_symbols())?;
    if loaded.discharging().is_some() {
        write!(out, ", discharge weights sum to 1")?;
    }
    writeln!(out)?;
    Ok(EXIT_OK)
}

fn cmd_run(doc: &Path, word: &str, trace: bool, from: Option<&str>, out: &mut dyn Write) -> Result<u8, CliError> {
    let loaded = load(doc)?;
    let m = loaded.machine();
    let q = match from {
        Some(name) => m.state(name)?,
        None => m.start(),
    };
    let word = Word::parse(word);
    match loaded.discharging() {
        Some(d) => {
            if trace {
                for (i, (state, vector)) in d.charge_trajectory(q, &word)?.iter().enumerate() {
                    let symbol = if i == 0 { "-" } else { word.symbols()[i - 1].as_str() };
                    writeln!(out, "{i} {symbol} {} {vector}", m.state_name(*state))?;
                }
            }
            let result = d.delta_c(q, &word)?;
            writeln!(out, "{} {}", m.state_name(result.state), result.charge)?;
            if let Some(valuation) = &loaded.valuation {
                writeln!(out, "reduced {}", d.reduced_delta_c(valuation, q, &word)?.render(m))?;
            }
        }
        None => {
            let state = m.delta_star(q, &word)?;
            write!(out, "{}", m.state_name(state))?;
            match &loaded.automaton {
                LoadedAutomaton::Dfa(dfa) => {
                    write!(out, " {}", if dfa.is_accepting(state) { "accept" } else { "reject" })?
                }
                LoadedAutomaton::Dfao(dfao) => write!(out, " {}", dfao.output_of(state))?,
                _ => unreachable!("discharging kinds handled above"),
            }
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sequence(args: &SequenceArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let terms: Vec<String> = match (&args.doc, &args.builtin) {
        (_, Some(name)) => {
            if args.form.is_some() {
                return Err(usage("--form applies to documents, not builtins"));
            }
            name.parse::<Builtin>()?.render(args.count)
        }
        (Some(doc), None) => {
            let loaded = load(doc)?;
            let d = loaded
                .discharging()
                .ok_or_else(|| usage(format!("{}: sequences need a ddfa or ddfao", doc.display())))?;
            let seq = FinalChargeSequence::new(d, args.base)?;
            let valuation = loaded.valuation_or_none();
            (0..args.count as u64)
                .map(|n| match args.form.unwrap_or(Form::Charge) {
                    Form::Charge => seq.charge_result(n).charge.to_string(),
                    Form::Numerator => seq.charge_result(n).charge.numer().to_string(),
                    Form::Reduced => seq.reduced(&valuation, n).render(loaded.machine()),
                })
                .collect()
        }
        (None, None) => return Err(usage("give a document or --builtin NAME")),
    };
    match &args.bfile {
        Some(path) => {
            fs::write(path, format_bfile(args.offset, &terms))
                .map_err(|source| CliError::Write { path: path.clone(), source })?;
            writeln!(out, "wrote {} terms to {}", terms.len(), path.display())?;
        }
        None => writeln!(out, "{}", terms.join(", "))?,
    }
    Ok(EXIT_OK)
}

fn cmd_conjecture(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let doc = args.doc.as_deref().ok_or_else(|| usage("--conjecture needs --doc"))?;
    let loaded = load(doc)?;
    let d = loaded
        .discharging()
        .ok_or_else(|| usage(format!("{}: --conjecture needs a ddfa or ddfao", doc.display())))?;
    let valuation = loaded
        .valuation
        .clone()
        .unwrap_or_else(|| StateValuation::constant(loaded.machine().num_states(), Ratio::one()));
    let params = ConjectureParams {
        exponent_bound: args.exponent_bound,
        start: args.start,
        coeff_bound: args.coeff_bound,
        max_n: args.max.unwrap_or(2048),
        depth: args.depth,
    };
    let finding = scaled_charge_check(d, args.base, &valuation, params)?;
    writeln!(
        out,
        "scaled charges: base {}, E = {}, m = {}, C = {}, N = {}",
        args.base, params.exponent_bound, params.start, params.coeff_bound, params.max_n
    )?;
    let shown: Vec<String> = finding.scaled.terms().iter().take(24).map(|v| v.to_string()).collect();
    writeln!(out, "prefix: {}", shown.join(", "))?;
    if let Some(search) = &finding.search {
        for (level, menu) in &search.menus {
            let options: Vec<String> = menu.options.iter().map(|o| o.render(args.base)).collect();
            writeln!(out, "menu {}: {}", level_name(*level), options.join(" | "))?;
        }
    }
    match &finding.outcome {
        ConjectureOutcome::Verified { .. } => {
            let report = finding.verification.as_ref().expect("verified findings carry a report");
            writeln!(out, "{report}")?;
            Ok(EXIT_OK)
        }
        ConjectureOutcome::NotScalable { n } => {
            writeln!(out, "finding: term {n} has no integer multiple by a power of {}", args.base)?;
            Ok(EXIT_FAILED)
        }
        ConjectureOutcome::NoCover => {
            let search = finding.search.as_ref().expect("search ran");
            for f in &search.failures {
                writeln!(
                    out,
                    "finding: no menu within C = {} covers {}: {} values uncovered, first n = {}",
                    params.coeff_bound,
                    level_name(f.level),
                    f.uncovered,
                    f.first_uncovered
                )?;
            }
            Ok(EXIT_FAILED)
        }
        ConjectureOutcome::VerificationFailed => {
            let report = finding.verification.as_ref().expect("verification ran");
            writeln!(out, "finding: {report}")?;
            Ok(EXIT_FAILED)
        }
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.conjecture.is_some() {
        return cmd_conjecture(args, out);
    }
    let path = args.spec.as_deref().ok_or_else(|| usage("give --spec FILE (or --conjecture)"))?;
    let spec = load_spec(&read(path)?).map_err(|source| CliError::Spec { path: path.to_path_buf(), source })?;
    let max = args.max.unwrap_or(4096);
    let seq = integer_source(&args.source, span(spec.base, spec.exponent_bound + args.depth, max + 1)?)?;
    let report = verify_quasi_k_regular(&seq, &spec, max, args.depth)?;
    for level in &report.levels {
        let origin = if level.derived { "derived" } else { "given" };
        writeln!(out, "level {} ({origin}): {} checked", level_name(level.level), level.checked)?;
        for (option, hits) in level.options.iter().zip(&level.hits) {
            writeln!(out, "  {}: {hits}", option.render(spec.base))?;
        }
        if let Some(n) = level.first_failure {
            writeln!(out, "  FAILED at {} values, first n = {n}", level.failures)?;
        }
    }
    writeln!(out, "{report}")?;
    Ok(if report.verified { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_search(args: &SearchArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let level = args.level.unwrap_or(args.exponent_bound + 1);
    let seq = integer_source(&args.source, span(args.base, level, args.max + 1)?)?;
    let params = SearchParams {
        base: args.base,
        exponent_bound: args.exponent_bound,
        start: args.start,
        level,
        coeff_bound: args.coeff_bound,
        max_n: args.max,
    };
    let found = search_relation_menus(&seq, params)?;
    for (level, menu) in &found.menus {
        let options: Vec<String> = menu.options.iter().map(|o| o.render(args.base)).collect();
        writeln!(out, "menu {}: {}", level_name(*level), options.join(" | "))?;
    }
    for f in &found.failures {
        writeln!(out, "uncovered {}: {} values, first n = {}", level_name(f.level), f.uncovered, f.first_uncovered)?;
    }
    if let Some(path) = &args.out {
        fs::write(path, SpecFile::from_spec(&found.to_spec()).to_json())
            .map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    if found.covered() {
        writeln!(out, "covered for {} <= n <= {}", args.start, args.max)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "not covered")?;
        Ok(EXIT_FAILED)
    }
}

fn cmd_kernel(args: &KernelArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let seq = integer_source(&args.source, span(args.base, args.depth, args.window as u64)?)?;
    let report = k_kernel(&seq, args.base, args.depth, args.window)?;
    for d in &report.depths {
        writeln!(out, "depth {}: {} distinct vectors, rank {}", d.depth, d.distinct, d.rank)?;
    }
    Ok(EXIT_OK)
}

fn cmd_dot(doc: &Path, name: Option<&str>, out: &mut dyn Write) -> Result<u8, CliError> {
    let loaded = load(doc)?;
    let stem = doc.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.write_all(to_dot(loaded.as_automaton(), name.unwrap_or(&stem)).as_bytes())?;
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Validate { doc } => cmd_validate(doc, out),
        Command::Run { doc, word, trace, from } => cmd_run(doc, word, *trace, from.as_deref(), out),
        Command::Sequence(args) => cmd_sequence(args, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Search(args) => cmd_search(args, out),
        Command::Kernel(args) => cmd_kernel(args, out),
        Command::Dot { doc, name } => cmd_dot(doc, name.as_deref(), out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn main_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(args, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
