//! Command-line front end: entropy and conditional-entropy queries, posterior
//! marginals, model validation, and a benchmark harness contrasting the
//! streaming algorithms with the stored-lattice one.
//!
//! Output discipline: stdout carries exactly one JSON document per run,
//! stderr carries human-readable diagnostics. Exit codes are stable:
//! 0 success, 1 malformed input or usage error, 2 impossible observation or
//! constraint, 3 refusal to enumerate past a cap.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hmm_entropy::{
    esrfb_entropy, esrfb_subseq_entropy, esrfb_subseq_enumerate, hernando_entropy, load_model,
    load_model_unvalidated, load_obs, mann_mccallum_entropy, mann_mccallum_subseq_entropy,
    mann_mccallum_subseq_enumerate, oracle_posterior, oracle_subseq_entropy, pairwise_marginal,
    random_model, random_obs, range_marginal, EntropyResult, Error, HmmModel, ObservationSeq,
    ScaledFbResult, SubseqConstraint, SubseqEnumRow, SubseqEnumeration, Violation,
    DEFAULT_ASSIGNMENT_CAP,
};

#[derive(Parser)]
#[command(
    name = "hmm-entropy",
    version,
    about = "Posterior state-sequence entropy for hidden Markov models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of the hidden state sequence given the observations.
    Entropy(EntropyArgs),
    /// Entropy conditioned on fixing a window of hidden states.
    Subseq(SubseqArgs),
    /// Posterior state, pair, or window marginals.
    Marginal(MarginalArgs),
    /// Time and memory on a seeded random instance.
    Bench(BenchArgs),
    /// Check a model file for stochasticity violations.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Algorithm {
    Esrfb,
    Hernando,
    MannMccallum,
    Brute,
}

#[derive(Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum Unit {
    Nats,
    Bits,
}

impl Unit {
    fn from_flag(bits: bool) -> Unit {
        if bits {
            Unit::Bits
        } else {
            Unit::Nats
        }
    }

    fn convert(self, nats: f64) -> f64 {
        match self {
            Unit::Nats => nats,
            Unit::Bits => nats / LN_2,
        }
    }
}

/// The JSON document every entropy-producing command prints. `value` is the
/// entropy in `unit`; `log_likelihood` is always in nats. `peak_state_elems`
/// counts floating-point cells the algorithm retained between steps, not
/// process memory. Under `--enumerate` each array element is one report
/// tagged with its window `states`; a window with zero posterior mass gets
/// `value: null` and `p_constraint: 0`.
#[derive(Serialize)]
struct RunReport {
    algorithm: Algorithm,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<usize>>,
    value: Option<f64>,
    unit: Unit,
    log_likelihood: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_constraint: Option<f64>,
    wall_time_ms: f64,
    peak_state_elems: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Malformed(_) | Error::InvalidModel(_) | Error::InvalidWeight { .. } => 1,
            Error::ImpossibleObservation { .. } | Error::ImpossibleConstraint => 2,
            Error::CapExceeded { .. } => 3,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems exit 1 (clap would default to 2); --help and
            // --version render normally and exit 0.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Entropy(args) => run_entropy(args),
        Command::Subseq(args) => run_subseq(args),
        Command::Marginal(args) => run_marginal(args),
        Command::Bench(args) => run_bench(args),
        Command::Validate(args) => run_validate(args),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|err| Failure::usage(format!("cannot read {}: {err}", path.display())))
}

fn read_model(path: &Path) -> Result<HmmModel, Failure> {
    Ok(load_model(&read_file(path)?)?)
}

fn read_obs(path: &Path, model: &HmmModel) -> Result<ObservationSeq, Failure> {
    Ok(load_obs(&read_file(path)?, model.num_symbols())?)
}

fn parse_states(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("cannot parse state index {part:?} in --states")))
        })
        .collect()
}

fn emit<T: Serialize>(doc: &T) {
    println!("{}", serde_json::to_string(doc).expect("report serializes"));
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

#[derive(Args)]
struct EntropyArgs {
    /// Model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Observation JSON file.
    #[arg(long)]
    obs: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Esrfb)]
    algorithm: Algorithm,
    /// Report the entropy in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

fn run_entropy(args: EntropyArgs) -> Result<(), Failure> {
    let model = read_model(&args.model)?;
    let obs = read_obs(&args.obs, &model)?;
    let unit = Unit::from_flag(args.bits);

    let start = Instant::now();
    let (entropy, log_likelihood, peak) = match args.algorithm {
        Algorithm::Esrfb => unpack(esrfb_entropy(&model, &obs)?),
        Algorithm::Hernando => unpack(hernando_entropy(&model, &obs)?),
        Algorithm::MannMccallum => unpack(mann_mccallum_entropy(&model, &obs)?),
        Algorithm::Brute => {
            let table = oracle_posterior(&model, &obs)?;
            (table.entropy(), table.p_obs().ln(), table.len() + 1)
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    emit(&RunReport {
        algorithm: args.algorithm,
        states: None,
        value: Some(unit.convert(entropy)),
        unit,
        log_likelihood,
        p_constraint: None,
        wall_time_ms,
        peak_state_elems: peak as u64,
    });
    Ok(())
}

fn unpack(result: EntropyResult) -> (f64, f64, usize) {
    (
        result.entropy,
        result.log_likelihood,
        result.peak_state_elems,
    )
}

// ---------------------------------------------------------------------------
// subseq
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SubseqArgs {
    /// Model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Observation JSON file.
    #[arg(long)]
    obs: PathBuf,
    /// First constrained time index.
    #[arg(long)]
    from: usize,
    /// Last constrained time index (inclusive).
    #[arg(long)]
    to: usize,
    /// Comma-separated fixed states, one per constrained step, e.g. "0,2,1".
    #[arg(long, required_unless_present = "enumerate", conflicts_with = "enumerate")]
    states: Option<String>,
    /// Report one row per possible window assignment instead.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, value_enum, default_value_t = Algorithm::Esrfb)]
    algorithm: Algorithm,
    /// Report the entropy in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

fn run_subseq(args: SubseqArgs) -> Result<(), Failure> {
    let model = read_model(&args.model)?;
    let obs = read_obs(&args.obs, &model)?;
    let unit = Unit::from_flag(args.bits);

    if args.algorithm == Algorithm::Hernando {
        return Err(Failure::usage(
            "hernando is forward-only and keeps no backward quantities; \
             use esrfb, mann-mccallum, or brute for window conditioning",
        ));
    }

    if args.enumerate {
        return run_subseq_enumerate(&model, &obs, &args, unit);
    }

    let states = parse_states(args.states.as_deref().expect("clap requires --states"))?;
    let constraint = SubseqConstraint::new(args.from, args.to, states)?;
    constraint.check(&model, &obs)?;

    let start = Instant::now();
    let (h_cond, p_constraint, log_likelihood, peak) = match args.algorithm {
        Algorithm::Esrfb => {
            let r = esrfb_subseq_entropy(&model, &obs, &constraint)?;
            (r.h_cond, r.p_constraint, r.log_likelihood, r.peak_state_elems)
        }
        Algorithm::MannMccallum => {
            let r = mann_mccallum_subseq_entropy(&model, &obs, &constraint)?;
            (r.h_cond, r.p_constraint, r.log_likelihood, r.peak_state_elems)
        }
        Algorithm::Brute => {
            let table = oracle_posterior(&model, &obs)?;
            let r = oracle_subseq_entropy(&model, &obs, &constraint)?;
            (r.h_cond, r.p_constraint, table.p_obs().ln(), table.len() + 1)
        }
        Algorithm::Hernando => unreachable!("rejected above"),
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    emit(&RunReport {
        algorithm: args.algorithm,
        states: Some(constraint.states().to_vec()),
        value: Some(unit.convert(h_cond)),
        unit,
        log_likelihood,
        p_constraint: Some(p_constraint),
        wall_time_ms,
        peak_state_elems: peak as u64,
    });
    Ok(())
}

fn run_subseq_enumerate(
    model: &HmmModel,
    obs: &ObservationSeq,
    args: &SubseqArgs,
    unit: Unit,
) -> Result<(), Failure> {
    let start = Instant::now();
    let enumeration = match args.algorithm {
        Algorithm::Esrfb => esrfb_subseq_enumerate(model, obs, args.from, args.to)?,
        Algorithm::MannMccallum => mann_mccallum_subseq_enumerate(model, obs, args.from, args.to)?,
        Algorithm::Brute => brute_enumerate(model, obs, args.from, args.to)?,
        Algorithm::Hernando => unreachable!("rejected above"),
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let SubseqEnumeration {
        rows,
        log_likelihood,
        peak_state_elems,
    } = enumeration;
    let reports: Vec<RunReport> = rows
        .into_iter()
        .map(|row| RunReport {
            algorithm: args.algorithm,
            states: Some(row.states),
            value: row.h_cond.map(|h| unit.convert(h)),
            unit,
            log_likelihood,
            p_constraint: Some(row.p_constraint),
            wall_time_ms,
            peak_state_elems: peak_state_elems as u64,
        })
        .collect();
    emit(&reports);
    Ok(())
}

/// Per-assignment table from the enumeration oracle, aggregated in a single
/// pass over the full posterior: window mass and sum of q ln q per window,
/// then the conditional entropy from those two numbers.
fn brute_enumerate(
    model: &HmmModel,
    obs: &ObservationSeq,
    from: usize,
    to: usize,
) -> Result<SubseqEnumeration, Failure> {
    if from > to || to > obs.t_max() {
        return Err(Failure::usage(format!(
            "window {from}..={to} does not fit the sequence 0..={}",
            obs.t_max()
        )));
    }
    let n = model.num_states();
    let width = to - from + 1;
    let mut count: usize = 1;
    for _ in 0..width {
        count = count
            .checked_mul(n)
            .filter(|&c| c as u64 <= DEFAULT_ASSIGNMENT_CAP)
            .ok_or_else(|| Failure {
                code: 3,
                message: format!(
                    "refusing to enumerate {n}^{width} window assignments (cap {DEFAULT_ASSIGNMENT_CAP})"
                ),
            })?;
    }

    let table = oracle_posterior(model, obs)?;
    let mut mass = vec![0.0; count];
    let mut qlogq = vec![0.0; count];
    for (idx, &q) in table.probs().iter().enumerate() {
        let states = table.states_of(idx);
        let w = states[from..=to].iter().fold(0, |acc, &s| acc * n + s);
        mass[w] += q;
        if q > 0.0 {
            qlogq[w] += q * q.ln();
        }
    }

    let full_width = width == obs.len();
    let rows = (0..count)
        .map(|w| {
            let states = unrank(w, n, width);
            let p = mass[w];
            if p <= 0.0 {
                return SubseqEnumRow {
                    states,
                    p_constraint: 0.0,
                    h_cond: None,
                    h_joint_term: None,
                };
            }
            let h_cond = if full_width {
                // Nothing is left unconstrained.
                0.0
            } else {
                snap_nonneg(-qlogq[w] / p + p.ln())
            };
            SubseqEnumRow {
                states,
                p_constraint: p,
                h_cond: Some(h_cond),
                h_joint_term: Some(qlogq[w]),
            }
        })
        .collect();
    Ok(SubseqEnumeration {
        rows,
        log_likelihood: table.p_obs().ln(),
        peak_state_elems: table.len() + 1 + 2 * count,
    })
}

fn unrank(mut index: usize, num_states: usize, width: usize) -> Vec<usize> {
    let mut states = vec![0; width];
    for slot in states.iter_mut().rev() {
        *slot = index % num_states;
        index /= num_states;
    }
    states
}

/// Cancellation can leave a conditional entropy a few ulps below zero; snap
/// those to 0, matching the library's own clamping.
fn snap_nonneg(h: f64) -> f64 {
    if h <= 0.0 && h > -1e-12 {
        0.0
    } else {
        h
    }
}

// ---------------------------------------------------------------------------
// marginal
// ---------------------------------------------------------------------------

#[derive(Args)]
#[command(group(clap::ArgGroup::new("query").required(true)))]
struct MarginalArgs {
    /// Model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Observation JSON file.
    #[arg(long)]
    obs: PathBuf,
    /// Posterior state distribution at time T.
    #[arg(long, value_name = "T", group = "query")]
    at: Option<usize>,
    /// Joint posterior over the states at times T-1 and T.
    #[arg(long, value_name = "T", group = "query")]
    pair: Option<usize>,
    /// Posterior probability of fixed states over the window L..=R.
    #[arg(long, num_args = 2, value_names = ["L", "R"], group = "query", requires = "states")]
    range: Option<Vec<usize>>,
    /// Comma-separated states for --range.
    #[arg(long, requires = "range")]
    states: Option<String>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MarginalDoc {
    State {
        t: usize,
        probabilities: Vec<f64>,
    },
    Pair {
        t: usize,
        probabilities: Vec<Vec<f64>>,
    },
    Range {
        from: usize,
        to: usize,
        states: Vec<usize>,
        probability: f64,
    },
}

fn run_marginal(args: MarginalArgs) -> Result<(), Failure> {
    let model = read_model(&args.model)?;
    let obs = read_obs(&args.obs, &model)?;
    let fb = ScaledFbResult::compute(&model, &obs)?;
    let n = model.num_states();

    let doc = if let Some(t) = args.at {
        check_time_index(t, obs.t_max())?;
        MarginalDoc::State {
            t,
            probabilities: fb.state_marginal(t),
        }
    } else if let Some(t) = args.pair {
        if t == 0 {
            return Err(Failure::usage(
                "--pair needs T >= 1: the pair covers the step from T-1 to T",
            ));
        }
        check_time_index(t, obs.t_max())?;
        let flat = pairwise_marginal(&model, &obs, &fb, t);
        MarginalDoc::Pair {
            t,
            probabilities: flat.chunks(n).map(<[f64]>::to_vec).collect(),
        }
    } else {
        let range = args.range.as_ref().expect("clap guarantees one query");
        let states = parse_states(args.states.as_deref().expect("clap ties --states to --range"))?;
        let constraint = SubseqConstraint::new(range[0], range[1], states)?;
        constraint.check(&model, &obs)?;
        let probability = range_marginal(&model, &obs, &fb, &constraint)?;
        MarginalDoc::Range {
            from: constraint.from(),
            to: constraint.to(),
            states: constraint.states().to_vec(),
            probability,
        }
    };
    emit(&doc);
    Ok(())
}

fn check_time_index(t: usize, t_max: usize) -> Result<(), Failure> {
    if t > t_max {
        return Err(Failure::usage(format!(
            "time index {t} outside the sequence 0..={t_max}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BenchArgs {
    /// Hidden-state count for the generated model (the symbol count matches).
    #[arg(long)]
    n: usize,
    /// Observation count for the generated sequence.
    #[arg(long)]
    t: usize,
    /// Seed for the model and sequence generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Timing samples to take; the median is reported.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    #[arg(long, value_enum, default_value_t = Algorithm::Esrfb)]
    algorithm: Algorithm,
}

#[derive(Serialize)]
struct BenchReport {
    algorithm: Algorithm,
    n: usize,
    t: usize,
    seed: u64,
    repeat: usize,
    median_wall_time_ms: f64,
    peak_state_elems: u64,
}

fn run_bench(args: BenchArgs) -> Result<(), Failure> {
    if args.n == 0 || args.t == 0 || args.repeat == 0 {
        return Err(Failure::usage("--n, --t, and --repeat must be positive"));
    }
    let model = random_model(args.n, args.n, args.seed);
    let obs = random_obs(args.n, args.t, args.seed.wrapping_add(1));

    let mut times = Vec::with_capacity(args.repeat);
    let mut peak = 0usize;
    for _ in 0..args.repeat {
        let start = Instant::now();
        peak = match args.algorithm {
            Algorithm::Esrfb => esrfb_entropy(&model, &obs)?.peak_state_elems,
            Algorithm::Hernando => hernando_entropy(&model, &obs)?.peak_state_elems,
            Algorithm::MannMccallum => mann_mccallum_entropy(&model, &obs)?.peak_state_elems,
            Algorithm::Brute => oracle_posterior(&model, &obs)?.len() + 1,
        };
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));

    emit(&BenchReport {
        algorithm: args.algorithm,
        n: args.n,
        t: args.t,
        seed: args.seed,
        repeat: args.repeat,
        median_wall_time_ms: times[times.len() / 2],
        peak_state_elems: peak as u64,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ValidateArgs {
    /// Model JSON file.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Serialize)]
struct ValidateDoc {
    valid: bool,
    violations: Vec<Violation>,
}

fn run_validate(args: ValidateArgs) -> Result<(), Failure> {
    let text = read_file(&args.model)?;
    let model = load_model_unvalidated(&text)?;
    match model.validate() {
        Ok(()) => {
            emit(&ValidateDoc {
                valid: true,
                violations: Vec::new(),
            });
            Ok(())
        }
        Err(report) => {
            let message = report.to_string();
            emit(&ValidateDoc {
                valid: false,
                violations: report.violations,
            });
            Err(Failure::usage(message))
        }
    }
}
