use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pfl_core::bryant::decide_corank_one_involutive;
use pfl_core::contact::{
    canonical_contact_system, classify_contact_detailed, classify_pfaffian_detailed, generate_kumpera_ruiz, kr_reduce,
    Classification, ClassificationStatus, ProlongationLetter, ProlongationWord,
};
use pfl_core::exterior::{annihilator, pushforward, pushforward_system, Distribution, JetSpec, PfaffianSystem};
use pfl_core::flags::{derived_flag, derived_flag_forms, lie_flag};
use pfl_core::format::{reduction_trace, CorankOneReport, Document, Stats, VerdictReport};
use pfl_core::poly::RationalPoint;
use pfl_core::PflError;

const EXIT_CANONICAL: u8 = 0;
const EXIT_EXTENDED: u8 = 10;
const EXIT_REJECTED: u8 = 20;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 1;

#[derive(Parser)]
#[command(name = "pfl", version, about = "Exact flag computations and normal forms for polynomial distributions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Contact,
    Pfaffian,
    Bryant,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a normal form: the canonical contact system or a prolongation word.
    Generate {
        /// Jet dimensions `n,m`.
        #[arg(long)]
        spec: Option<String>,
        /// Letters such as `R(0,0),S(1,0)`.
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Decide equivalence to a normal form at a base point.
    Classify {
        input: PathBuf,
        #[arg(long)]
        at: Option<String>,
        /// Defaults to the kind of the input document.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        witnesses: bool,
        /// Include timing and size figures.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Transport a distribution or Pfaffian system by a verified polynomial pair.
    Pushforward {
        input: PathBuf,
        #[arg(long)]
        diffeo: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Recover the prolongation word of an ordered generator family.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Derived and Lie flags with ranks at the base point.
    Flags {
        input: PathBuf,
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Look for a corank-one involutive subdistribution.
    Bryant {
        input: PathBuf,
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        witnesses: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Core(PflError),
}

impl From<PflError> for CliError {
    fn from(e: PflError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(PflError::Internal(_)) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => f.write_str(s),
            CliError::Core(PflError::NotWeberForm { level, reason }) => {
                write!(f, "not in iterated Weber form at level {level}: {reason}")
            }
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("pfl: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("pfl: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("PFL_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("PFL_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn run(cmd: Cmd) -> CliResult<u8> {
    match cmd {
        Cmd::Generate { spec, word, output } => {
            let (distribution, word) = generate(spec.as_deref(), word.as_deref())?;
            emit(&Document::Distribution { distribution, word }, &output, false)?;
            Ok(EXIT_CANONICAL)
        }
        Cmd::Classify { input, at, mode, witnesses, stats, output } => {
            let doc = read_doc(&input)?;
            let base = base_point(at.as_deref(), doc.chart().dim())?;
            let mode = mode.unwrap_or(match doc {
                Document::Pfaffian(_) => Mode::Pfaffian,
                _ => Mode::Contact,
            });
            if let Mode::Bryant = mode {
                return bryant(&doc, &base, witnesses, &output, true);
            }
            let started = Instant::now();
            let (classification, chart, size) = match mode {
                Mode::Contact => {
                    let d = expect_distribution(doc)?;
                    (classify_contact_detailed(&d, &base)?, d.chart().clone(), distribution_size(&d))
                }
                _ => {
                    let sys = match doc {
                        Document::Pfaffian(sys) => sys,
                        other => annihilator(&expect_distribution(other)?, &base)?.system,
                    };
                    (classify_pfaffian_detailed(&sys, &base)?, sys.chart().clone(), system_size(&sys))
                }
            };
            let mut report = VerdictReport::from_classification(&classification, witnesses);
            if stats {
                report.stats = Some(Stats {
                    elapsed_ms: started.elapsed().as_millis() as u64,
                    generators: size.0,
                    max_terms: size.1,
                });
            }
            emit(&Document::Verdict { chart, report }, &output, true)?;
            Ok(verdict_code(&classification))
        }
        Cmd::Pushforward { input, diffeo, output } => {
            let doc = read_doc(&input)?;
            let phi = match read_doc(&diffeo)? {
                Document::DiffeoPair(p) => p,
                other => return Err(CliError::Input(format!("{} is a {:?} document, not a diffeo pair", diffeo.display(), other.kind()))),
            };
            let out = match doc {
                Document::Distribution { distribution, .. } => {
                    Document::Distribution { distribution: pushforward(&distribution, &phi)?, word: None }
                }
                Document::Pfaffian(sys) => Document::Pfaffian(pushforward_system(&sys, &phi)?),
                other => return Err(CliError::Input(format!("cannot push forward a {:?} document", other.kind()))),
            };
            emit(&out, &output, false)?;
            Ok(EXIT_CANONICAL)
        }
        Cmd::Reduce { input, at, output } => {
            let d = expect_distribution(read_doc(&input)?)?;
            let base = base_point(at.as_deref(), d.dim())?;
            let r = kr_reduce(d.generators(), &base)?;
            let trace = reduction_trace(&r)?;
            emit(&Document::Word { word: r.word, trace: Some(trace) }, &output, false)?;
            Ok(EXIT_CANONICAL)
        }
        Cmd::Flags { input, at, output } => {
            let doc = read_doc(&input)?;
            let chart = doc.chart();
            let base = base_point(at.as_deref(), chart.dim())?;
            let reports = match doc {
                Document::Distribution { distribution: d, .. } => {
                    vec![derived_flag(&d, &base, None)?.report, lie_flag(&d, &base, None)?.report]
                }
                Document::Pfaffian(sys) => vec![derived_flag_forms(&sys, &base, None)?.report],
                other => return Err(CliError::Input(format!("no flags for a {:?} document", other.kind()))),
            };
            emit(&Document::FlagReport { chart, reports }, &output, false)?;
            Ok(EXIT_CANONICAL)
        }
        Cmd::Bryant { input, at, witnesses, output } => {
            let doc = read_doc(&input)?;
            let base = base_point(at.as_deref(), doc.chart().dim())?;
            bryant(&doc, &base, witnesses, &output, false)
        }
    }
}

fn bryant(doc: &Document, base: &RationalPoint, witnesses: bool, output: &Output, tee: bool) -> CliResult<u8> {
    let d = expect_distribution(doc.clone())?;
    let v = decide_corank_one_involutive(&d, base)?;
    let report = CorankOneReport::from_verdict(&v, witnesses);
    emit(&Document::CorankOne { chart: d.chart().clone(), report }, output, tee)?;
    Ok(if v.exists { EXIT_CANONICAL } else { EXIT_REJECTED })
}

fn verdict_code(c: &Classification) -> u8 {
    match c.verdict.status {
        ClassificationStatus::CanonicalEquivalent => EXIT_CANONICAL,
        ClassificationStatus::ExtendedKr => EXIT_EXTENDED,
        ClassificationStatus::Rejected => EXIT_REJECTED,
    }
}

fn generate(spec: Option<&str>, word: Option<&str>) -> CliResult<(Distribution, Option<ProlongationWord>)> {
    let spec = spec.map(parse_spec).transpose()?;
    match (spec, word) {
        (None, None) => Err(CliError::Input("generate needs --spec, --word or both".into())),
        (Some(s), None) => Ok((canonical_contact_system(s)?, Some(ProlongationWord::canonical(s)))),
        (s, Some(text)) => {
            let m = match s {
                Some(s) => s.m,
                None => letter_width(text)?,
            };
            let w = ProlongationWord::parse(text, m)?;
            if let Some(s) = s {
                if s != w.spec {
                    return Err(CliError::Input(format!(
                        "word lives on J^{}(R,R^{}) but --spec asks for J^{}(R,R^{})",
                        w.spec.n, w.spec.m, s.n, s.m
                    )));
                }
            }
            Ok((generate_kumpera_ruiz(&w)?, Some(w)))
        }
    }
}

/// Number of parameters in the first letter, which fixes `m`.
fn letter_width(text: &str) -> CliResult<usize> {
    let first = text.split_inclusive(')').next().unwrap_or("").trim();
    let letter = ProlongationLetter::parse(first)?;
    Ok(letter.c.len())
}

fn parse_spec(text: &str) -> CliResult<JetSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Input(format!("--spec expects `n,m`, got {text:?}"));
    let [n, m] = parts.as_slice() else { return Err(bad()) };
    let n = n.parse().map_err(|_| bad())?;
    let m = m.parse().map_err(|_| bad())?;
    Ok(JetSpec::new(n, m)?)
}

fn base_point(at: Option<&str>, dim: usize) -> CliResult<RationalPoint> {
    let p = match at {
        None => RationalPoint::origin(dim),
        Some(text) => RationalPoint::parse(text)?,
    };
    p.check_dim(dim)?;
    Ok(p)
}

fn read_doc(path: &Path) -> CliResult<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Document::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn expect_distribution(doc: Document) -> CliResult<Distribution> {
    match doc {
        Document::Distribution { distribution, .. } => Ok(distribution),
        other => Err(CliError::Input(format!("expected a distribution document, found {:?}", other.kind()))),
    }
}

fn distribution_size(d: &Distribution) -> (usize, usize) {
    let terms = d.generators().iter().flat_map(|f| f.components()).map(|p| p.num_terms()).max();
    (d.generators().len(), terms.unwrap_or(0))
}

fn system_size(s: &PfaffianSystem) -> (usize, usize) {
    let terms = s.forms().iter().flat_map(|w| w.components()).map(|p| p.num_terms()).max();
    (s.forms().len(), terms.unwrap_or(0))
}

/// Reports go to `--out` when given, otherwise to standard output. `tee` prints them in both places.
fn emit(doc: &Document, output: &Output, tee: bool) -> CliResult<()> {
    let Format::Json = output.format;
    let text = doc.to_json()?;
    match &output.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if tee {
                print!("{text}");
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}
