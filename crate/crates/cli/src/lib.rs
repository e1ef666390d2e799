//! Command-line front end over JSON documents.
//!
//! Every command reads one JSON document (from a file argument or stdin) and
//! writes one JSON document carrying `"schema_version": "1"`. Failures are
//! written as `{"schema_version": "1", "error": code, "detail": text}` with
//! exit code 1 for domain errors and 2 for malformed input or usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use condim_core::{
    condorcet_dimension, derive_profile, embed, greedy_dominating_set_traced, hunt_high_dimension,
    is_condorcet_winning_set, is_dominating_set, lemma2_check, lemma4_instance, log2_ceil_bound, majority_digraph,
    planar_winning_set, run_dimension_survey, CandidateId, CondorcetError, Construction, DimensionResult, DistanceTie,
    EmbeddingError, ExperimentConfig, ExperimentError, Generator, GreedyRound, Norm, PlanarError, PlanarResult,
    PreferenceProfile, ProfileDocument, QuadrantReport, SpatialDocument, SpatialElection, Tournament, TournamentError,
    Verdict, WinningSetCertificate,
};

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable supplying the default worker-thread count.
pub const THREADS_ENV: &str = "CONDIM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "condim",
    version,
    about = "Condorcet winning sets for ordinal and spatial elections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Io {
    /// Input JSON document; read from stdin when omitted.
    input: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance generator, e.g. `impartial:m=10,n=9` or `spatial:m=20,n=21,d=2,box=100,norm=inf`.
    #[arg(long)]
    generator: Option<Generator>,
    #[arg(long)]
    instances: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest set size searched per instance (default: m).
    #[arg(long)]
    k_max: Option<usize>,
    /// Highest-dimension witnesses kept in a survey report.
    #[arg(long)]
    max_witnesses: Option<usize>,
    /// Worker threads.
    #[arg(long, env = THREADS_ENV, default_value_t = 1)]
    threads: usize,
    /// Include wall-clock time in the report (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstructionArg {
    CandidateSimplex,
    VoterSimplex,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::CandidateSimplex => Construction::CandidateSimplex,
            ConstructionArg::VoterSimplex => Construction::VoterSimplex,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive a preference profile from a spatial document.
    Derive {
        #[command(flatten)]
        io: Io,
        /// Norm overriding the document's own.
        #[arg(long)]
        norm: Option<Norm>,
    },
    /// Exact Condorcet dimension with a certified witness.
    Dim {
        #[command(flatten)]
        io: Io,
        /// Largest set size searched (default: m).
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Test whether a candidate set is Condorcet winning.
    CheckSet {
        #[command(flatten)]
        io: Io,
        /// Comma-separated candidate indices.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
    },
    /// Majority digraph of a profile.
    Tournament {
        #[command(flatten)]
        io: Io,
        /// Also include a DOT rendering.
        #[arg(long)]
        dot: bool,
    },
    /// Greedy logarithmic dominating set of the majority tournament.
    Dominate {
        #[command(flatten)]
        io: Io,
    },
    /// Certified winning set of size at most 3 for a 2-D election under L1 or L-infinity.
    PlanarSet {
        #[command(flatten)]
        io: Io,
        /// Norm overriding the document's own (`p:1` or `inf`).
        #[arg(long)]
        norm: Option<Norm>,
    },
    /// Embed a profile into a normed space.
    Embed {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "candidate-simplex")]
        construction: ConstructionArg,
        #[arg(long, default_value = "inf")]
        norm: Norm,
    },
    /// Emit the three-voter, three-candidate cyclic spatial example.
    Lemma4 {
        #[arg(long, default_value = "p:2")]
        norm: Norm,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dimension histogram over generated instances.
    Survey {
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Search generated instances for one of at least the target dimension.
    Hunt {
        #[command(flatten)]
        args: ExperimentArgs,
        #[arg(long, default_value_t = 4)]
        target: usize,
    },
}

/// A failed invocation, rendered as an error document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: &'static str,
    pub detail: String,
    pub exit: i32,
}

impl Failure {
    fn input(code: &'static str, detail: impl ToString) -> Self {
        Self {
            code,
            detail: detail.to_string(),
            exit: EXIT_INPUT,
        }
    }

    fn domain(code: &'static str, detail: impl ToString) -> Self {
        Self {
            code,
            detail: detail.to_string(),
            exit: EXIT_DOMAIN,
        }
    }

    pub fn render(&self) -> String {
        render(&ErrorDocument {
            error: self.code,
            detail: &self.detail,
        })
    }
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    error: &'a str,
    detail: &'a str,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: &'static str,
    #[serde(flatten)]
    payload: &'a T,
}

/// Pretty JSON with the schema version and a trailing newline.
pub fn render<T: Serialize>(payload: &T) -> String {
    let mut text = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        payload,
    })
    .expect("output documents always serialize");
    text.push('\n');
    text
}

// ---- output documents ---------------------------------------------------

#[derive(Debug, Serialize)]
pub struct DeriveOutput {
    #[serde(flatten)]
    pub profile: ProfileDocument,
    pub norm: Norm,
    /// Exact distance ties, broken by candidate index.
    pub ties: Vec<DistanceTie>,
}

impl DeriveOutput {
    pub fn new(e: &SpatialElection, norm: &Norm) -> Self {
        let d = derive_profile(e, norm);
        Self {
            profile: d.profile.to_document(),
            norm: norm.clone(),
            ties: d.ties,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DimOutput {
    #[serde(flatten)]
    pub result: DimensionResult,
}

#[derive(Debug, Serialize)]
pub struct CheckSetOutput {
    pub set: Vec<CandidateId>,
    pub winning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<WinningSetCertificate>,
    /// First outside candidate the set fails to beat, with its support count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub challenger: Option<CandidateId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct TournamentOutput {
    pub m: usize,
    /// Arcs `[loser, winner]`.
    pub arcs: Vec<[CandidateId; 2]>,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dot: Option<String>,
}

impl TournamentOutput {
    pub fn new(t: &Tournament, dot: bool) -> Self {
        Self {
            m: t.m(),
            arcs: t.arcs().into_iter().map(|(a, b)| [a, b]).collect(),
            complete: t.is_complete(),
            dot: dot.then(|| t.to_dot()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DominateOutput {
    pub set: Vec<CandidateId>,
    pub rounds: Vec<GreedyRound>,
    /// `⌈log₂ m⌉`.
    pub bound: usize,
    pub dominating: bool,
    pub certificate: Option<WinningSetCertificate>,
}

#[derive(Debug, Serialize)]
pub struct PlanarOutput {
    pub set: Vec<CandidateId>,
    #[serde(flatten)]
    pub result: PlanarResult,
    pub quadrant_report: QuadrantReport,
}

// ---- dispatch -----------------------------------------------------------

/// Result of one invocation: the exit code and the text for stdout (or the
/// output file on success).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
}

/// Runs the CLI with the given arguments (including the program name),
/// reading stdin only when a command needs input and no file was given.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    exit: EXIT_OK,
                    stdout: e.to_string(),
                },
                ErrorKind::InvalidSubcommand => failure(Failure::input("unknown_command", e.render())),
                _ => failure(Failure::input("usage", e.render())),
            };
        }
    };
    let (output, result) = dispatch(cli.command, stdin);
    match result {
        Ok(text) => match output {
            Some(path) => match fs::write(&path, &text) {
                Ok(()) => Outcome {
                    exit: EXIT_OK,
                    stdout: String::new(),
                },
                Err(e) => failure(Failure::input("io", format!("{}: {e}", path.display()))),
            },
            None => Outcome {
                exit: EXIT_OK,
                stdout: text,
            },
        },
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> Outcome {
    Outcome {
        exit: f.exit,
        stdout: f.render(),
    }
}

fn dispatch(command: Command, stdin: &mut dyn Read) -> (Option<PathBuf>, Result<String, Failure>) {
    match command {
        Command::Derive { io, norm } => {
            let r = read_election(&io, stdin)
                .map(|(e, doc_norm)| render(&DeriveOutput::new(&e, &norm.unwrap_or(doc_norm))));
            (io.output, r)
        }
        Command::Dim { io, k_max } => {
            let r = read_profile(&io, stdin).and_then(|p| {
                let k = k_max.unwrap_or(p.m());
                let result = condorcet_dimension(&p, k).map_err(condorcet_failure)?;
                Ok(render(&DimOutput { result }))
            });
            (io.output, r)
        }
        Command::CheckSet { io, set } => {
            let r = read_profile(&io, stdin).and_then(|p| {
                let ids: Vec<CandidateId> = set.iter().copied().map(CandidateId).collect();
                let verdict = is_condorcet_winning_set(&p, &ids).map_err(condorcet_failure)?;
                let mut sorted = ids;
                sorted.sort_unstable();
                sorted.dedup();
                let out = match verdict {
                    Verdict::Winning(cert) => CheckSetOutput {
                        set: sorted,
                        winning: true,
                        certificate: Some(cert),
                        challenger: None,
                        count: None,
                    },
                    Verdict::Defeated { challenger, count } => CheckSetOutput {
                        set: sorted,
                        winning: false,
                        certificate: None,
                        challenger: Some(challenger),
                        count: Some(count),
                    },
                };
                Ok(render(&out))
            });
            (io.output, r)
        }
        Command::Tournament { io, dot } => {
            let r = read_profile(&io, stdin).map(|p| render(&TournamentOutput::new(&majority_digraph(&p), dot)));
            (io.output, r)
        }
        Command::Dominate { io } => {
            let r = read_profile(&io, stdin).and_then(|p| render_dominate(&p));
            (io.output, r)
        }
        Command::PlanarSet { io, norm } => {
            let r = read_election(&io, stdin).and_then(|(e, doc_norm)| {
                let norm = norm.unwrap_or(doc_norm);
                let result = planar_winning_set(&e, &norm).map_err(planar_failure)?;
                // the quadrant property is stated for the L1 working election
                let working = if result.sheared {
                    condim_core::shear_to_l1(&e).map_err(planar_failure)?
                } else {
                    e
                };
                let quadrant_report = lemma2_check(&working, &result.selection);
                Ok(render(&PlanarOutput {
                    set: result.certificate.set.clone(),
                    result,
                    quadrant_report,
                }))
            });
            (io.output, r)
        }
        Command::Embed { io, construction, norm } => {
            let r = read_profile(&io, stdin).and_then(|p| {
                let result = embed(&p, construction.into(), &norm).map_err(embedding_failure)?;
                Ok(render(&result.to_document()))
            });
            (io.output, r)
        }
        Command::Lemma4 { norm, output } => {
            let doc = SpatialDocument::new(&lemma4_instance(), &norm);
            (output, Ok(render(&doc)))
        }
        Command::Survey { args } => {
            let r = experiment_config(&args).and_then(|cfg| {
                let report = run_dimension_survey(&cfg, args.threads).map_err(experiment_failure)?;
                let report = if args.timing { report } else { report.without_timing() };
                Ok(render(&report))
            });
            (args.output, r)
        }
        Command::Hunt { args, target } => {
            let r = experiment_config(&args).and_then(|cfg| {
                let outcome = hunt_high_dimension(&cfg, target, args.threads).map_err(experiment_failure)?;
                Ok(render(&outcome))
            });
            (args.output, r)
        }
    }
}

fn render_dominate(p: &PreferenceProfile) -> Result<String, Failure> {
    let t = majority_digraph(p);
    let trace = greedy_dominating_set_traced(&t).map_err(|e| match e {
        TournamentError::IncompleteTournament { .. } => Failure::domain("incomplete_tournament", e),
    })?;
    let mut set = trace.set;
    set.sort_unstable();
    let certificate = is_condorcet_winning_set(p, &set)
        .map_err(condorcet_failure)?
        .into_certificate();
    Ok(render(&DominateOutput {
        dominating: is_dominating_set(&t, &set),
        set,
        rounds: trace.rounds,
        bound: log2_ceil_bound(p.m()),
        certificate,
    }))
}

// ---- input --------------------------------------------------------------

fn read_text(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::input("io", format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::input("io", format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input("malformed_document", e))
}

fn read_profile(io: &Io, stdin: &mut dyn Read) -> Result<PreferenceProfile, Failure> {
    let doc: ProfileDocument = parse_document(&read_text(io.input.as_deref(), stdin)?)?;
    PreferenceProfile::try_from(doc).map_err(|e| Failure::input("invalid_profile", e))
}

fn read_election(io: &Io, stdin: &mut dyn Read) -> Result<(SpatialElection, Norm), Failure> {
    let doc: SpatialDocument = parse_document(&read_text(io.input.as_deref(), stdin)?)?;
    let e = doc.election().map_err(|e| Failure::input("invalid_election", e))?;
    Ok((e, doc.norm))
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => parse_document::<ExperimentConfig>(&read_text(Some(path), &mut std::io::empty())?)?,
        None => {
            let generator = args
                .generator
                .clone()
                .ok_or_else(|| Failure::input("usage", "either --config or --generator is required"))?;
            ExperimentConfig::new(generator, 1000, 0)
        }
    };
    if let Some(g) = &args.generator {
        cfg.generator = g.clone();
    }
    if let Some(i) = args.instances {
        cfg.instances = i;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.k_max.is_some() {
        cfg.k_max = args.k_max;
    }
    if let Some(w) = args.max_witnesses {
        cfg.max_witnesses = w;
    }
    if args.threads == 0 {
        return Err(Failure::input("usage", "--threads must be at least 1"));
    }
    cfg.validate().map_err(experiment_failure)?;
    Ok(cfg)
}

// ---- error mapping ------------------------------------------------------

fn condorcet_failure(e: CondorcetError) -> Failure {
    match e {
        CondorcetError::EmptySet => Failure::input("empty_set", e),
        CondorcetError::CandidateOutOfRange { .. } => Failure::input("candidate_out_of_range", e),
        CondorcetError::InvalidBound => Failure::input("invalid_bound", e),
        CondorcetError::DimensionExceedsBound { .. } => Failure::domain("dimension_exceeds_bound", e),
    }
}

fn planar_failure(e: PlanarError) -> Failure {
    let code = match e {
        PlanarError::WrongDimension { .. } => "wrong_dimension",
        PlanarError::EvenVoterCount { .. } => "even_voter_count",
        PlanarError::UnsupportedNorm(_) => "unsupported_norm",
        PlanarError::TiedPreferences { .. } => "tied_preferences",
        PlanarError::NoCertifiedSubset { .. } => "no_certified_subset",
    };
    Failure::domain(code, e)
}

fn embedding_failure(e: EmbeddingError) -> Failure {
    let code = match e {
        EmbeddingError::UnsupportedNorm(_) => "unsupported_norm",
        EmbeddingError::RoundtripFailed(_) => "roundtrip_failed",
    };
    Failure::domain(code, e)
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::InvalidConfig(_) => Failure::input("invalid_config", e),
        _ => Failure::domain("experiment_failed", e),
    }
}
