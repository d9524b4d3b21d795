//! `hdist`: command-line front end for the `hdist` library.
//!
//! Every JSON output is `{"config": ..., "result": ...}`; CSV and complex
//! text outputs carry the config on a leading `# config: ` line.
//!
//! Exit codes: 0 on success, 1 when a verification or hypothesis check
//! fails, 2 on input and parameter errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hdist::distortion::{
    build_family, evaluate_distortion, lm_distortion_experiment, theorem_distortion_bound, EmbeddingSpec, FamilyChoice,
};
use hdist::gallery::{verify_appendix, GalleryGraph, DEFAULT_FILL_BUDGET};
use hdist::laplacian::{spectrum_with, DEFAULT_TOLERANCE, DENSE_LIMIT};
use hdist::random::concentration_report;
use hdist::verify::verify_all;
use hdist::{json, Error, LmParams, Simplex, SimplicialComplex};

#[derive(Parser, Serialize)]
#[command(name = "hdist", version, about = "Spectral gaps, fillings and distortion of simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Sample a Linial–Meshulam complex.
    Lmgen(LmgenArgs),
    /// Spectrum of the upper Laplacian in degree k.
    Spectrum(SpectrumArgs),
    /// Dimension of the (reduced) k-th cohomology.
    Cohomology(ComplexK),
    /// Gallery distances, connectivity and filling numbers.
    #[command(subcommand)]
    Gallery(GalleryCmd),
    /// Distortion bounds and measured distortion.
    #[command(subcommand)]
    Distortion(DistortionCmd),
    /// Concentration events over repeated Linial–Meshulam samples.
    Concentration(ConcentrationArgs),
    /// End-to-end numerical checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args, Serialize)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct LmParamsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl LmParamsArgs {
    fn params(&self) -> LmParams {
        LmParams { n: self.n, p: self.p, k: self.k, seed: self.seed }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ComplexFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Serialize)]
struct LmgenArgs {
    #[command(flatten)]
    lm: LmParamsArgs,
    #[arg(long, value_enum, default_value_t = ComplexFormat::Text)]
    format: ComplexFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Serialize)]
struct ComplexK {
    /// Complex file (text or JSON).
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    base: ComplexK,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Largest |X^(k)| handled by the dense eigensolver.
    #[arg(long, default_value_t = DENSE_LIMIT)]
    dense_limit: usize,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GalleryCmd {
    /// Gallery distance between two k-simplices.
    Dist(GalleryDistArgs),
    /// Whether X^(k) is connected by (k+1)-galleries.
    Connected(ComplexK),
    /// Filling number of a set of k-simplices.
    Fill(GalleryFillArgs),
    /// Link-connectivity propositions for degree k.
    Links(ComplexK),
}

#[derive(Args, Serialize)]
struct GalleryDistArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Comma-separated vertex labels.
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Serialize)]
struct GalleryFillArgs {
    #[arg(long)]
    complex: PathBuf,
    /// A member of S as comma-separated vertex labels; repeat for each.
    #[arg(long = "simplex")]
    simplices: Vec<String>,
    /// Use the facets of this simplex as S.
    #[arg(long, conflicts_with = "simplices")]
    boundary_of: Option<String>,
    #[arg(long, default_value_t = DEFAULT_FILL_BUDGET)]
    budget: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DistortionCmd {
    /// Measured distortion of an embedding against the lower bound.
    Eval(EvalArgs),
    /// The lower bound and its ingredients.
    Bound(BoundArgs),
    /// Bound versus measured distortion on random complexes.
    LmExperiment(ExperimentArgs),
}

#[derive(Args, Serialize)]
struct FamilyArgs {
    /// Boundary family: auto, vertex or simplices.
    #[arg(long, default_value = "auto")]
    family: String,
}

impl FamilyArgs {
    fn choice(&self) -> Result<FamilyChoice> {
        Ok(self.family.parse()?)
    }
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[command(flatten)]
    base: ComplexK,
    /// Embedding file (CSV or JSON), or `gaussian:m:seed`, or `spectral:m`.
    #[arg(long)]
    embedding: String,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = DEFAULT_FILL_BUDGET)]
    budget: u64,
}

#[derive(Args, Serialize)]
struct BoundArgs {
    #[command(flatten)]
    base: ComplexK,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Args, Serialize)]
struct ExperimentArgs {
    #[command(flatten)]
    lm: LmParamsArgs,
    #[arg(long)]
    trials: usize,
    /// `gaussian:m:seed` or `spectral:m`.
    #[arg(long)]
    embedding: String,
    #[arg(long, default_value_t = DEFAULT_FILL_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Serialize)]
struct ConcentrationArgs {
    #[command(flatten)]
    lm: LmParamsArgs,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VerifyCmd {
    /// Coboundary, adjointness, Stokes and both filling inequalities.
    All(VerifyArgs),
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[command(flatten)]
    base: ComplexK,
    #[arg(long)]
    embedding: String,
    #[command(flatten)]
    family: FamilyArgs,
    /// Random cochains per check.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Seed for the random cochains.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// What a subcommand produced.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    config: &'a C,
    result: &'a R,
}

fn envelope<C: Serialize, R: Serialize>(config: &C, result: &R) -> Result<String> {
    let mut s = json::to_string(&Envelope { config, result })?;
    s.push('\n');
    Ok(s)
}

fn config_line<C: Serialize>(config: &C) -> Result<String> {
    Ok(format!("# config: {}\n", json::to_string(config)?))
}

fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SimplicialComplex::parse_any(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_labels(x: &SimplicialComplex, text: &str) -> Result<Simplex> {
    let labels = text
        .split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("vertex label {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(x.simplex_by_labels(&labels)?)
}

fn embedding_spec(x: &SimplicialComplex, arg: &str) -> Result<EmbeddingSpec> {
    if arg.starts_with("gaussian:") || arg.starts_with("spectral:") {
        return Ok(EmbeddingSpec::parse(arg)?);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading embedding {arg}"))?;
    let e = hdist::Embedding::parse_any(x, &text).with_context(|| format!("parsing embedding {arg}"))?;
    Ok(EmbeddingSpec::Fixed(e))
}

fn labels_of(x: &SimplicialComplex, g: &GalleryGraph<'_>, nodes: &[usize]) -> Vec<Vec<u64>> {
    nodes.iter().map(|&i| x.simplex_labels(x.simplex(g.k() + 1, i))).collect()
}

#[derive(Serialize)]
struct DistResult {
    k: usize,
    distance: Option<usize>,
    gallery: Option<Vec<Vec<u64>>>,
}

#[derive(Serialize)]
struct ConnectedResult {
    k: usize,
    connected: bool,
    nodes: usize,
    max_degree: usize,
}

#[derive(Serialize)]
struct FillOutput {
    k: usize,
    terminals: Vec<Vec<u64>>,
    lower: usize,
    upper: usize,
    exact: Option<usize>,
    witness: Option<Vec<Vec<u64>>>,
    states: u64,
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Lmgen(a) => {
            let x = hdist::linial_meshulam(&a.lm.params())?;
            let text = match a.format {
                ComplexFormat::Text => config_line(cli)? + &x.to_text(),
                ComplexFormat::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        config: &'a Cli,
                        maximal: Vec<Vec<u64>>,
                    }
                    json::to_string(&Out { config: cli, maximal: x.to_maximal_labels() })? + "\n"
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::Spectrum(a) => {
            let x = read_complex(&a.base.complex)?;
            let opts =
                hdist::SpectrumOptions { tolerance: a.tolerance, dense_limit: a.dense_limit, ..Default::default() };
            Ok(Outcome::ok(envelope(cli, &spectrum_with(&x, a.base.k, &opts)?)?))
        }
        Command::Cohomology(a) => {
            let x = read_complex(&a.complex)?;
            Ok(Outcome::ok(envelope(cli, &hdist::cohomology_dim(&x, a.k)?)?))
        }
        Command::Gallery(g) => run_gallery(cli, g),
        Command::Distortion(d) => run_distortion(cli, d),
        Command::Concentration(a) => {
            let r = concentration_report(&a.lm.params(), a.epsilon, a.trials)?;
            let text = match a.format {
                TableFormat::Json => envelope(cli, &r)?,
                TableFormat::Csv => {
                    let mut s = config_line(cli)?;
                    s.push_str("seed,top_count,max_degree,min_degree\n");
                    for t in &r.samples {
                        s.push_str(&format!("{},{},{},{}\n", t.seed, t.top_count, t.max_degree, t.min_degree));
                    }
                    s
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::Verify(VerifyCmd::All(a)) => {
            let x = read_complex(&a.base.complex)?;
            let f = embedding_spec(&x, &a.embedding)?.realize(&x, 0)?;
            let r = verify_all(&x, a.base.k, &f, a.family.choice()?, a.trials, a.seed)?;
            Ok(Outcome { passed: r.passed, text: envelope(cli, &r)? })
        }
    }
}

fn run_gallery(cli: &Cli, cmd: &GalleryCmd) -> Result<Outcome> {
    match cmd {
        GalleryCmd::Dist(a) => {
            let x = read_complex(&a.complex)?;
            let (s0, s1) = (parse_labels(&x, &a.from)?, parse_labels(&x, &a.to)?);
            if s0.dim() != s1.dim() {
                return Err(Error::DegreeMismatch(s0.dim(), s1.dim()).into());
            }
            let k = s0.dim();
            let g = GalleryGraph::new(&x, k);
            let (i0, i1) = (x.index_of(&s0).expect("resolved"), x.index_of(&s1).expect("resolved"));
            let gallery = g.shortest_gallery(i0, i1).map(|p| labels_of(&x, &g, &p));
            Ok(Outcome::ok(envelope(cli, &DistResult { k, distance: g.distance(i0, i1), gallery })?))
        }
        GalleryCmd::Connected(a) => {
            let x = read_complex(&a.complex)?;
            let connected = hdist::gallery::is_gallery_connected(&x, a.k)?;
            let g = GalleryGraph::new(&x, a.k);
            let r = ConnectedResult { k: a.k, connected, nodes: g.node_count(), max_degree: g.max_degree() };
            Ok(Outcome::ok(envelope(cli, &r)?))
        }
        GalleryCmd::Fill(a) => {
            let x = read_complex(&a.complex)?;
            let terms: Vec<Simplex> = match &a.boundary_of {
                Some(s) => {
                    let sigma = parse_labels(&x, s)?;
                    if sigma.dim() == 0 {
                        anyhow::bail!(Error::InvalidParameter(
                            "--boundary-of needs a simplex of dimension >= 1".into()
                        ));
                    }
                    sigma.facets().collect()
                }
                None => a.simplices.iter().map(|s| parse_labels(&x, s)).collect::<Result<_>>()?,
            };
            let first = terms.first().ok_or(Error::EmptyInput)?;
            let k = first.dim();
            let r = hdist::fill_number(&x, &terms, a.budget)?;
            let g = GalleryGraph::new(&x, k);
            let out = FillOutput {
                k,
                terminals: terms.iter().map(|s| x.simplex_labels(s)).collect(),
                lower: r.lower,
                upper: r.upper,
                exact: r.exact,
                witness: r.witness.as_ref().map(|w| labels_of(&x, &g, w)),
                states: r.states,
            };
            Ok(Outcome::ok(envelope(cli, &out)?))
        }
        GalleryCmd::Links(a) => {
            let x = read_complex(&a.complex)?;
            let r = verify_appendix(&x, a.k)?;
            Ok(Outcome { passed: r.passed, text: envelope(cli, &r)? })
        }
    }
}

fn run_distortion(cli: &Cli, cmd: &DistortionCmd) -> Result<Outcome> {
    match cmd {
        DistortionCmd::Eval(a) => {
            let x = read_complex(&a.base.complex)?;
            let f = embedding_spec(&x, &a.embedding)?.realize(&x, 0)?;
            let fam = build_family(&x, a.base.k, a.family.choice()?)?;
            Ok(Outcome::ok(envelope(cli, &evaluate_distortion(&x, &fam, &f, a.budget)?)?))
        }
        DistortionCmd::Bound(a) => {
            let x = read_complex(&a.base.complex)?;
            let fam = build_family(&x, a.base.k, a.family.choice()?)?;
            Ok(Outcome::ok(envelope(cli, &theorem_distortion_bound(&x, &fam)?)?))
        }
        DistortionCmd::LmExperiment(a) => {
            let spec = EmbeddingSpec::parse(&a.embedding)?;
            let r = lm_distortion_experiment(&a.lm.params(), &spec, a.trials, a.budget)?;
            let text = match a.format {
                TableFormat::Json => envelope(cli, &r)?,
                TableFormat::Csv => config_line(cli)? + &r.to_csv(),
            };
            Ok(Outcome::ok(text))
        }
    }
}

fn output_path(cli: &Cli) -> Option<&Path> {
    let out = match &cli.command {
        Command::Lmgen(a) => &a.output,
        Command::Spectrum(a) => &a.base.output,
        Command::Cohomology(a) => &a.output,
        Command::Gallery(GalleryCmd::Dist(a)) => &a.output,
        Command::Gallery(GalleryCmd::Connected(a) | GalleryCmd::Links(a)) => &a.output,
        Command::Gallery(GalleryCmd::Fill(a)) => &a.output,
        Command::Distortion(DistortionCmd::Eval(a)) => &a.base.output,
        Command::Distortion(DistortionCmd::Bound(a)) => &a.base.output,
        Command::Distortion(DistortionCmd::LmExperiment(a)) => &a.output,
        Command::Concentration(a) => &a.output,
        Command::Verify(VerifyCmd::All(a)) => &a.base.output,
    };
    out.out.as_deref()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::HypothesisNotMet(_) | Error::KernelMismatch { .. } | Error::EigenNonConvergence(_)) => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DISTORTION_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("DISTORTION_THREADS = {v:?}"))?;
        if n == 0 {
            anyhow::bail!(Error::InvalidParameter("DISTORTION_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli)).and_then(|outcome| {
        match output_path(&cli) {
            Some(p) => fs::write(p, &outcome.text).with_context(|| format!("writing {}", p.display()))?,
            None => std::io::stdout().write_all(outcome.text.as_bytes())?,
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
