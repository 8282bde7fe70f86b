//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 invariant violated, 2 cardinality guard, 3 usage or
//! bad input, 4 vacuous `l` range.
//!
//! Options may also come from a TOML file (`--config`) whose keys are the
//! long flag names with `-` written as `_`. Flags on the command line win over
//! the file; the file's `guard` wins over `SQUEEZELAB_MAX_CARD`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::convex::ConvexFn;
use crate::families::{generate, FamilyError, FamilyKind, FamilySpec, SeededRng};
use crate::numset::{read_set_file, write_set_file, DuplicatePolicy, SetFileError};
use crate::report;
use crate::squeeze::{self, SqueezeError, Variant};
use crate::verify::{self, InputsSummary, StatementId, VerifyError, VerifyReport};
use crate::{CardinalityGuard, NumSet, Scalar, SetError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_VACUOUS: i32 = 4;

pub const GUARD_ENV: &str = "SQUEEZELAB_MAX_CARD";

#[derive(Debug, Parser)]
#[command(
    name = "squeezelab",
    version,
    about = "Exact sumset, distance-set and squeeze-certificate computations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one set and write it in set-file format.
    Compute(Opts),
    /// Build a squeeze certificate and write it as JSON.
    Certify(Opts),
    /// Run one verifier on one input.
    Verify(Opts),
    /// Run one verifier over a grid of family x n x k x seed.
    Sweep(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// kA
    Ksum,
    /// kA - kA
    Kdiff,
    /// A - A
    Diff,
    /// AA
    Product,
    /// (A - A)^2
    Sqdiff,
    /// squared distances of A^d, i.e. d(A - A)^2
    Delta,
    /// {c}A
    Dilate,
    /// lower half A'
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnDuplicate {
    Warn,
    Error,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// TOML file of defaults; flags given here override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input family, e.g. ap, convex, geo:2, randint:1..10^6,
    /// randrat:1..100/1..9, gap:r=2,dims=3x3,steps=1:10. Repeatable for sweep.
    #[arg(long)]
    pub family: Vec<String>,
    /// Input set file (one rational per line).
    #[arg(long, conflicts_with = "family")]
    pub file: Option<PathBuf>,
    /// Set size(s), comma separated for sweep.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// k value(s), comma separated for sweep.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Dimension for --op delta.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds per grid point (sweep).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Maximum cardinality of any computed set.
    #[arg(long)]
    pub guard: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweep.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Convex function: square or poly:c0,c1,...
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Squeeze variant: plus, minus or mult.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long, value_enum)]
    pub op: Option<Op>,
    /// Dilation factor for --op dilate.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Upper end t of (0, t) for lemma-differences.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// cor-quad, ruzsa, main-chain, expander, distributive, lemma-differences, d-identity
    #[arg(long)]
    pub statement: Option<String>,
    /// Record runtime_ms in reports (makes output time dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_enum)]
    pub on_duplicate: Option<OnDuplicate>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<OneOrMany<String>>,
    file: Option<PathBuf>,
    n: Option<OneOrMany<usize>>,
    k: Option<OneOrMany<usize>>,
    d: Option<usize>,
    seed: Option<u64>,
    trials: Option<u64>,
    guard: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
    #[serde(rename = "fn")]
    function: Option<String>,
    variant: Option<String>,
    op: Option<Op>,
    c: Option<String>,
    t: Option<String>,
    statement: Option<String>,
    timing: Option<bool>,
    on_duplicate: Option<OnDuplicate>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Vacuous(String),
    #[error("{0}")]
    Violated(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Guard(_) => EXIT_GUARD,
            CliError::Vacuous(_) => EXIT_VACUOUS,
            CliError::Violated(_) => EXIT_VIOLATED,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<SetError> for CliError {
    fn from(e: SetError) -> Self {
        match e {
            SetError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            other => usage(other.to_string()),
        }
    }
}

impl From<SqueezeError> for CliError {
    fn from(e: SqueezeError) -> Self {
        match e {
            SqueezeError::Set(s) => s.into(),
            SqueezeError::Convex(c) => usage(c.to_string()),
            SqueezeError::MissingFunction(_) => usage(e.to_string()),
            SqueezeError::EmptyEllRange { n, k, ref lower_exclusive, ref upper_inclusive } => CliError::Vacuous(format!(
                "empty l range: N/(2k) = {lower_exclusive} < l <= N/k - 1 = {upper_inclusive} has no integer (N = {n}, k = {k})"
            )),
            other => CliError::Violated(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Set(s) => s.into(),
            VerifyError::Squeeze(s) => s.into(),
            VerifyError::PreconditionViolated(m) => usage(format!("precondition violated: {m}")),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        usage(e.to_string())
    }
}

impl From<SetFileError> for CliError {
    fn from(e: SetFileError) -> Self {
        usage(e.to_string())
    }
}

/// Options after merging the config file, flags and environment.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub families: Vec<FamilyKind>,
    pub file: Option<PathBuf>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub d: Option<usize>,
    pub seed: u64,
    pub trials: u64,
    pub guard: CardinalityGuard,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub function: Option<ConvexFn>,
    pub variant: Option<Variant>,
    pub op: Option<Op>,
    pub c: Option<Scalar>,
    pub t: Option<Scalar>,
    pub statement: Option<StatementId>,
    pub timing: bool,
    pub on_duplicate: DuplicatePolicy,
}

fn parse_scalar(flag: &str, s: &str) -> Result<Scalar, CliError> {
    s.parse().map_err(|e| usage(format!("--{flag} {s:?}: {e}")))
}

fn non_empty_or<T>(cli: Vec<T>, file: Option<OneOrMany<T>>) -> Vec<T> {
    if cli.is_empty() {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    } else {
        cli
    }
}

pub fn resolve(opts: Opts, env_guard: Option<String>) -> Result<Resolved, CliError> {
    let file_cfg: FileConfig = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    // A source given on the command line replaces the file's source entirely.
    let (family_strs, file) = if !opts.family.is_empty() || opts.file.is_some() {
        (opts.family, opts.file)
    } else {
        (
            file_cfg.family.map(OneOrMany::into_vec).unwrap_or_default(),
            file_cfg.file,
        )
    };
    if !family_strs.is_empty() && file.is_some() {
        return Err(usage("give either --family or --file, not both"));
    }
    let families = family_strs
        .iter()
        .map(|s| s.parse::<FamilyKind>())
        .collect::<Result<Vec<_>, _>>()?;

    let k = non_empty_or(opts.k, file_cfg.k);
    if k.contains(&0) {
        return Err(usage("k must be at least 1"));
    }

    let guard_value = match opts.guard.or(file_cfg.guard) {
        Some(g) => Some(g),
        None => match env_guard {
            Some(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| usage(format!("{GUARD_ENV}={s:?} is not a positive integer")))?,
            ),
            None => None,
        },
    };
    let guard = match guard_value {
        Some(g) => CardinalityGuard::new(g).ok_or_else(|| usage("guard must be at least 1"))?,
        None => CardinalityGuard::default(),
    };

    let function = opts
        .function
        .or(file_cfg.function)
        .map(|s| {
            s.parse::<ConvexFn>()
                .map_err(|e| usage(format!("--fn {s:?}: {e}")))
        })
        .transpose()?;
    let variant = opts
        .variant
        .or(file_cfg.variant)
        .map(|s| s.parse::<Variant>().map_err(usage))
        .transpose()?;
    let statement = opts
        .statement
        .or(file_cfg.statement)
        .map(|s| {
            s.parse::<StatementId>()
                .map_err(|e| usage(format!("--statement {s:?}: {e}")))
        })
        .transpose()?;
    let c = opts
        .c
        .or(file_cfg.c)
        .map(|s| parse_scalar("c", &s))
        .transpose()?;
    let t = opts
        .t
        .or(file_cfg.t)
        .map(|s| parse_scalar("t", &s))
        .transpose()?;
    let threads = opts.threads.or(file_cfg.threads);
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }

    Ok(Resolved {
        families,
        file,
        n: non_empty_or(opts.n, file_cfg.n),
        k,
        d: opts.d.or(file_cfg.d),
        seed: opts.seed.or(file_cfg.seed).unwrap_or(0),
        trials: opts.trials.or(file_cfg.trials).unwrap_or(1),
        guard,
        out: opts.out.or(file_cfg.out),
        format: opts.format.or(file_cfg.format).unwrap_or(Format::Json),
        threads,
        function,
        variant,
        op: opts.op.or(file_cfg.op),
        c,
        t,
        statement,
        timing: opts.timing || file_cfg.timing.unwrap_or(false),
        on_duplicate: match opts.on_duplicate.or(file_cfg.on_duplicate) {
            Some(OnDuplicate::Warn) => DuplicatePolicy::Warn,
            _ => DuplicatePolicy::Error,
        },
    })
}

/// One concrete input set and where it came from.
#[derive(Debug, Clone)]
pub struct Input {
    pub set: NumSet,
    pub source: String,
    pub seed: Option<u64>,
    spec: Option<FamilySpec>,
}

impl Input {
    /// Three sets for the triangle inequality. Random families draw `X`, `Y`,
    /// `Z` from three seeds taken off a generator seeded with the input seed.
    fn triple(&self) -> Result<(NumSet, NumSet, NumSet), CliError> {
        match &self.spec {
            Some(spec) => {
                let mut rng = SeededRng::new(spec.seed);
                let mut next =
                    || generate(&FamilySpec::new(spec.kind.clone(), spec.n, rng.next_u64()));
                Ok((next()?, next()?, next()?))
            }
            None => Ok((self.set.clone(), self.set.clone(), self.set.clone())),
        }
    }
}

fn load_file(path: &Path, policy: DuplicatePolicy) -> Result<Input, CliError> {
    let (set, warnings) = read_set_file(path, policy)?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(Input {
        set,
        source: format!("file:{}", path.display()),
        seed: None,
        spec: None,
    })
}

fn from_family(kind: &FamilyKind, n: usize, seed: u64) -> Result<Input, CliError> {
    let spec = FamilySpec::new(kind.clone(), n, seed);
    let set = generate(&spec)?;
    Ok(Input {
        set,
        source: kind.to_string(),
        seed: Some(seed),
        spec: Some(spec),
    })
}

fn single<T: Copy>(values: &[T], name: &str, default: Option<T>) -> Result<T, CliError> {
    match values {
        [] => default.ok_or_else(|| usage(format!("--{name} is required"))),
        [x] => Ok(*x),
        _ => Err(usage(format!("--{name} takes one value outside sweep"))),
    }
}

/// The single input of compute, certify and verify. Without a source the
/// canonical AP is used.
fn single_input(cfg: &Resolved) -> Result<Input, CliError> {
    if let Some(path) = &cfg.file {
        return load_file(path, cfg.on_duplicate);
    }
    let kind = match cfg.families.as_slice() {
        [] => FamilyKind::Ap,
        [kind] => kind.clone(),
        _ => return Err(usage("--family takes one value outside sweep")),
    };
    let n = single(&cfg.n, "n", None)?;
    from_family(&kind, n, cfg.seed)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| usage(format!("--out {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn cmd_compute(cfg: &Resolved) -> Result<i32, CliError> {
    let op = cfg.op.ok_or_else(|| usage("--op is required"))?;
    let input = single_input(cfg)?;
    let a = &input.set;
    let g = &cfg.guard;
    let k = || single(&cfg.k, "k", Some(1));
    let (result, label) = match op {
        Op::Ksum => {
            let k = k()?;
            (a.iterated_sumset(k, g)?, format!("{k}A"))
        }
        Op::Kdiff => {
            let k = k()?;
            (a.k_diff(k, g)?, format!("{k}A-{k}A"))
        }
        Op::Diff => (a.difference_set(a, g)?, "A-A".to_string()),
        Op::Product => (a.product_set(a, g)?, "AA".to_string()),
        Op::Sqdiff => (a.squared_difference_set(g)?, "(A-A)^2".to_string()),
        Op::Delta => {
            let d = cfg.d.ok_or_else(|| usage("--op delta needs --d"))?;
            if d == 0 {
                return Err(usage("--d must be at least 1"));
            }
            let s = a.squared_difference_set(g)?;
            (
                s.iterated_sumset(d, g)?,
                format!("squared distances of A^{d}"),
            )
        }
        Op::Dilate => {
            let c = cfg
                .c
                .as_ref()
                .ok_or_else(|| usage("--op dilate needs --c"))?;
            (a.dilate(c), format!("{{{c}}}A"))
        }
        Op::Half => (a.half_lower()?, "A'".to_string()),
    };
    let header = format!(
        "{label}, A = {} (n = {}), cardinality {}",
        input.source,
        a.len(),
        result.len()
    );
    let mut out = open_out(&cfg.out)?;
    write_set_file(&mut out, &result, Some(&header))?;
    out.flush()?;
    eprintln!("cardinality {}", result.len());
    Ok(EXIT_OK)
}

pub fn cmd_certify(cfg: &Resolved) -> Result<i32, CliError> {
    if cfg.format == Format::Csv {
        return Err(usage("certificates are written as JSON only"));
    }
    let variant = cfg.variant.unwrap_or(Variant::ShiftPlus);
    let function = match (variant, &cfg.function) {
        (Variant::Multiplicative, Some(_)) => {
            return Err(usage("--fn does not apply to the mult variant"))
        }
        (Variant::Multiplicative, None) => None,
        (_, f) => Some(f.clone().unwrap_or_else(ConvexFn::square)),
    };
    let k = single(&cfg.k, "k", Some(1))?;
    let input = single_input(cfg)?;
    let cert = squeeze::build_certificate(variant, function.as_ref(), &input.set, k, &cfg.guard)?;
    let mut out = open_out(&cfg.out)?;
    out.write_all(cert.to_json().as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    eprintln!("certified_count {}", cert.certified_count);
    Ok(EXIT_OK)
}

/// Runs `statement` on one input.
pub fn run_statement(
    statement: StatementId,
    input: &Input,
    k: Option<usize>,
    t: Option<&Scalar>,
    guard: &CardinalityGuard,
) -> Result<VerifyReport, CliError> {
    let a = &input.set;
    let need_k = || k.ok_or_else(|| usage("k is required"));
    let report = match statement {
        StatementId::CorQuad => verify::verify_cor_quad(a, need_k()?, guard)?,
        StatementId::MainTheoremChain => verify::verify_main_chain(a, need_k()?, guard)?,
        StatementId::ExpanderXX => verify::verify_expander(a, need_k()?, guard)?,
        StatementId::DistributiveRefinement => {
            verify::verify_distributive_refinement(a, need_k()?, guard)?
        }
        StatementId::DIdentity => verify::verify_d_identity(a, need_k()?, guard)?,
        StatementId::LemmaDifferences => {
            let t = match t {
                Some(t) => t.clone(),
                None => &a.max().ok_or_else(|| usage("empty input"))? + &Scalar::one(),
            };
            verify::verify_lemma_differences(a, need_k()?, &t)?
        }
        StatementId::RuzsaTriangle => {
            let (x, y, z) = input.triple()?;
            verify::ruzsa_triangle(&x, &y, &z, guard)?
        }
    };
    Ok(report.with_source(Some(input.source.clone()), input.seed))
}

fn write_reports(cfg: &Resolved, reports: &[VerifyReport]) -> Result<i32, CliError> {
    let mut out = open_out(&cfg.out)?;
    match cfg.format {
        Format::Json => report::write_jsonl(&mut out, reports)?,
        Format::Csv => report::write_csv(&mut out, reports)?,
    }
    let failed: Vec<&VerifyReport> = reports.iter().filter(|r| !r.holds).collect();
    for r in &failed {
        eprintln!(
            "invariant violated: {} (n = {}, k = {:?}, seed = {:?}): {}",
            r.statement_id,
            r.inputs.n,
            r.inputs.k,
            r.inputs.seed,
            r.failed_checks.join(", ")
        );
    }
    eprintln!("{} report(s), {} failing", reports.len(), failed.len());
    Ok(if failed.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATED
    })
}

fn statement_k(statement: StatementId, k: usize) -> Option<usize> {
    (statement != StatementId::RuzsaTriangle).then_some(k)
}

fn finish_report(cfg: &Resolved, r: VerifyReport) -> VerifyReport {
    if cfg.timing {
        r
    } else {
        r.without_timing()
    }
}

pub fn cmd_verify(cfg: &Resolved) -> Result<i32, CliError> {
    let statement = cfg
        .statement
        .ok_or_else(|| usage("--statement is required"))?;
    let k = single(&cfg.k, "k", Some(1))?;
    let input = single_input(cfg)?;
    let r = run_statement(
        statement,
        &input,
        statement_k(statement, k),
        cfg.t.as_ref(),
        &cfg.guard,
    )?;
    write_reports(cfg, &[finish_report(cfg, r)])
}

/// A family input `(kind, n, seed)`, or `None` for the file, with its `k`.
pub type GridPoint = (Option<(FamilyKind, usize, u64)>, Option<usize>);

/// Grid points in output order: family, n, k, then seed.
pub fn sweep_grid(cfg: &Resolved, statement: StatementId) -> Result<Vec<GridPoint>, CliError> {
    let ks: Vec<Option<usize>> = if statement == StatementId::RuzsaTriangle {
        vec![None]
    } else if cfg.k.is_empty() {
        vec![Some(1)]
    } else {
        cfg.k.iter().map(|&k| Some(k)).collect()
    };
    if cfg.file.is_some() {
        return Ok(ks.into_iter().map(|k| (None, k)).collect());
    }
    if cfg.n.is_empty() {
        return Err(usage("--n is required"));
    }
    let families = if cfg.families.is_empty() {
        vec![FamilyKind::RandomInteger {
            lo: 1,
            hi: 1_000_000,
        }]
    } else {
        cfg.families.clone()
    };
    let mut grid = Vec::new();
    for fam in &families {
        for &n in &cfg.n {
            for &k in &ks {
                for i in 0..cfg.trials {
                    let seed = cfg
                        .seed
                        .checked_add(i)
                        .ok_or_else(|| usage("seed range overflows"))?;
                    grid.push((Some((fam.clone(), n, seed)), k));
                }
            }
        }
    }
    Ok(grid)
}

/// Grid points with an empty `l` range hold vacuously with bound 0.
fn vacuous_report(statement: StatementId, input: &Input, k: Option<usize>) -> VerifyReport {
    VerifyReport {
        statement_id: statement,
        inputs: InputsSummary {
            family: Some(input.source.clone()),
            n: input.set.len(),
            k,
            seed: input.seed,
        },
        cardinalities: [("vacuous".to_string(), 1)].into_iter().collect(),
        certified_lower_bound: 0,
        holds: true,
        failed_checks: Vec::new(),
        runtime_ms: None,
        witness: None,
    }
}

pub fn cmd_sweep(cfg: &Resolved) -> Result<i32, CliError> {
    let statement = cfg
        .statement
        .ok_or_else(|| usage("--statement is required"))?;
    let grid = sweep_grid(cfg, statement)?;
    let file_input = cfg
        .file
        .as_ref()
        .map(|p| load_file(p, cfg.on_duplicate))
        .transpose()?;
    let run_point = |(point, k): &GridPoint| -> Result<VerifyReport, CliError> {
        let input = match point {
            Some((fam, n, seed)) => from_family(fam, *n, *seed)?,
            None => file_input.clone().expect("file input"),
        };
        match run_statement(statement, &input, *k, cfg.t.as_ref(), &cfg.guard) {
            Ok(r) => Ok(finish_report(cfg, r)),
            Err(CliError::Vacuous(_)) => Ok(vacuous_report(statement, &input, *k)),
            Err(e) => Err(e),
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    // Indexed collect keeps grid order regardless of completion order.
    let results: Vec<Result<VerifyReport, CliError>> =
        pool.install(|| grid.par_iter().map(run_point).collect());
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_reports(cfg, &reports)
}

pub fn run(cli: Cli, env_guard: Option<String>) -> Result<i32, CliError> {
    match cli.command {
        Command::Compute(o) => cmd_compute(&resolve(o, env_guard)?),
        Command::Certify(o) => cmd_certify(&resolve(o, env_guard)?),
        Command::Verify(o) => cmd_verify(&resolve(o, env_guard)?),
        Command::Sweep(o) => cmd_sweep(&resolve(o, env_guard)?),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli, std::env::var(GUARD_ENV).ok()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
