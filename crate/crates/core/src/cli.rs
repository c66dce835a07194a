//! Command-line front end.
//!
//! [`dispatch`] takes the argument vector and explicit streams so the whole
//! command surface can be driven from tests. Exit codes: 0 on success, 1 on
//! usage or input errors, 2 on a verification mismatch or an inconsistent
//! sign system.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitcore::{BitString, HammingKind, Parity, PromiseSet};
use crate::functions::{reduce_instance, FunctionSpec, InputMatrix, InputMode};
use crate::games::{ccf_search, GameOutcome, GameSpec};
use crate::groups::{build_op_matrix, reduction_toggles, MatrixKind, OpWord};
use crate::protocols::{
    plan_entangled, run_classical_mixed, run_classical_mod4, run_with_plan, verify_with_tol,
    Backend, Message, Runner,
};
use crate::quantum::{build_signed_state, format_amplitude, ghz, psi3, StateVector, DEFAULT_TOL};
use crate::signsolve::{solve_for, SignConstraint, SignSolution};

/// Environment variable capping the worker threads used by sweeps and searches.
pub const THREADS_ENV: &str = "ENTANGLE_CC_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "entangle-cc",
    version,
    about = "Simulate and verify constant-communication protocols for accumulative boolean functions"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled inputs and measurement outcomes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Amplitudes at or below this magnitude count as zero.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the operation matrix M, Mprime or N for m parties.
    Matrices {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "M")]
        kind: MatrixKind,
    },
    /// Print a shared state, optionally after applying an operation word.
    State {
        #[arg(long, value_enum, default_value_t = Initial::Psi3)]
        initial: Initial,
        #[arg(long)]
        m: Option<usize>,
        /// Reference string for `signed` and `basis`.
        #[arg(long)]
        u: Option<BitString>,
        /// Promise the signed state must serve (default: u's class without its complement).
        #[arg(long)]
        promise: Option<String>,
        /// Word such as `IHH` or `HHRHR`.
        #[arg(long)]
        word: Option<OpWord>,
    },
    /// Run one protocol on one input matrix.
    Run {
        #[command(flatten)]
        function: FunctionArgs,
        /// File with m lines of n bits, or `-` for stdin.
        #[arg(long)]
        inputs: String,
    },
    /// Compare a protocol with the oracle over many inputs.
    Verify {
        #[command(flatten)]
        function: FunctionArgs,
        /// Every promise input of length n (the default).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Seeded random inputs instead of an exhaustive sweep.
        #[arg(long)]
        samples: Option<usize>,
        /// Largest exhaustive sweep allowed.
        #[arg(long, default_value_t = 1 << 20)]
        cap: u128,
    },
    /// Search deterministic local strategies for a single-tuple game.
    Game {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        promise: String,
        /// Even set A for `--promise mixed`.
        #[arg(long)]
        a: Option<String>,
        /// Win iff the XOR of answers is 1 exactly on this tuple.
        #[arg(long, conflicts_with = "target")]
        target_u: Option<BitString>,
        /// Win iff the XOR of answers is 1 exactly on tuples of this parity.
        #[arg(long, value_enum)]
        target: Option<ParityArg>,
    },
    /// Complement input vectors to turn an f_u instance into an f_u2 instance.
    Reduce {
        #[arg(long)]
        u: BitString,
        #[arg(long)]
        u2: BitString,
        #[arg(long)]
        inputs: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Initial {
    Psi3,
    Ghz,
    Signed,
    Basis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Entangled,
    Classical,
    Mixed,
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// F_u, F_B, G_A, G_11, or the shorthands F_<bits> and G_<bits>.
    #[arg(long)]
    family: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    u: Option<BitString>,
    /// Comma-separated minterm set for F_B.
    #[arg(long)]
    b: Option<String>,
    /// Comma-separated even set for G_A.
    #[arg(long)]
    a: Option<String>,
    /// even, odd, all, class, class-no-complement, hamming-odd, hamming-even,
    /// or a comma-separated list.
    #[arg(long)]
    promise: Option<String>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    /// Force an entangled backend: psi3, psi4 or ghz.
    #[arg(long)]
    backend: Option<Backend>,
}

enum Failure {
    Usage(String),
    Mismatch,
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Parses `argv` (program name first), runs the command, and returns the exit code.
pub fn dispatch<I, T>(
    argv: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut piped = String::new();
    if reads_stdin(&cli.command) {
        if let Err(e) = stdin.read_to_string(&mut piped) {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    }
    let mut buf = Vec::new();
    let result = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, &piped, &mut buf)),
            Err(e) => usage(e.to_string()),
        },
        None => execute(&cli, &piped, &mut buf),
    };
    if let Err(e) = out.write_all(&buf) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    match result {
        Ok(()) => 0,
        Err(Failure::Mismatch) => 2,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn reads_stdin(command: &Command) -> bool {
    matches!(command, Command::Run { inputs, .. } | Command::Reduce { inputs, .. } if inputs == "-")
}

fn execute(cli: &Cli, stdin: &str, out: &mut Vec<u8>) -> CliResult {
    match &cli.command {
        Command::Matrices { m, kind } => matrices(cli, *m, *kind, out),
        Command::State {
            initial,
            m,
            u,
            promise,
            word,
        } => state(
            cli,
            *initial,
            *m,
            u.as_ref(),
            promise.as_deref(),
            word.as_ref(),
            out,
        ),
        Command::Run { function, inputs } => {
            let inputs = read_inputs(inputs, stdin)?;
            run(cli, function, &inputs, out)
        }
        Command::Verify {
            function,
            exhaustive: _,
            samples,
            cap,
        } => verify_cmd(cli, function, *samples, *cap, out),
        Command::Game {
            m,
            promise,
            a,
            target_u,
            target,
        } => game(
            cli,
            *m,
            promise,
            a.as_deref(),
            target_u.as_ref(),
            *target,
            out,
        ),
        Command::Reduce { u, u2, inputs } => {
            let inputs = read_inputs(inputs, stdin)?;
            reduce(cli, u, u2, &inputs, out)
        }
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn read_inputs(source: &str, stdin: &str) -> CliResult<InputMatrix> {
    if source == "-" {
        return Ok(stdin.parse()?);
    }
    let text =
        std::fs::read_to_string(source).map_err(|e| Failure::Usage(format!("{source}: {e}")))?;
    Ok(text.parse()?)
}

fn parse_list(s: &str) -> CliResult<Vec<BitString>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(Failure::from))
        .collect()
}

fn parse_promise(
    s: &str,
    m: usize,
    u: Option<&BitString>,
    a: Option<&BTreeSet<BitString>>,
) -> CliResult<PromiseSet> {
    let need_u = || {
        u.copied()
            .ok_or_else(|| Failure::Usage(format!("promise {s:?} needs --u")))
    };
    let set = match s {
        "even" => PromiseSet::parity_class(m, Parity::Even)?,
        "odd" => PromiseSet::parity_class(m, Parity::Odd)?,
        "all" => PromiseSet::full(m)?,
        "class" => PromiseSet::parity_class(m, need_u()?.parity_class())?,
        "class-no-complement" => {
            let u = need_u()?;
            PromiseSet::parity_class(m, u.parity_class())?.excluding(&u.complement())?
        }
        "hamming-odd" => PromiseSet::hamming_promise(&need_u()?, HammingKind::OddMultipleOf2)?,
        "hamming-even" => PromiseSet::hamming_promise(&need_u()?, HammingKind::EvenMultipleOf2)?,
        "mixed" => {
            let a = a.ok_or_else(|| Failure::Usage("promise \"mixed\" needs --a".into()))?;
            PromiseSet::mixed_union(m, a)?
        }
        list => PromiseSet::explicit(m, parse_list(list)?)?,
    };
    if set.width() != m {
        return usage(format!(
            "promise width {} does not match m = {m}",
            set.width()
        ));
    }
    Ok(set)
}

/// Resolves the family flags into a spec. `shape` is `(m, n)` taken from an
/// input matrix when there is one.
fn build_spec(f: &FunctionArgs, shape: Option<(usize, usize)>) -> CliResult<FunctionSpec> {
    let n = match (f.n, shape) {
        (Some(n), Some((_, k))) if n != k => {
            return usage(format!("--n {n} but the inputs have {k} tuples"))
        }
        (Some(n), _) => n,
        (None, Some((_, k))) => k,
        (None, None) => 1,
    };
    let width_hint = |w: usize| -> CliResult<usize> {
        for other in [f.m, shape.map(|s| s.0)].into_iter().flatten() {
            if other != w {
                return usage(format!("width {w} does not match m = {other}"));
            }
        }
        Ok(w)
    };
    let no_promise = |name: &str| -> CliResult {
        if f.promise.is_some() {
            return usage(format!("{name} has a fixed promise"));
        }
        Ok(())
    };

    let family = f.family.as_str();
    match family {
        "G_11" => {
            no_promise(family)?;
            width_hint(2)?;
            Ok(FunctionSpec::g_11(n)?)
        }
        "G_A" | "F_B" => {
            let (flag, list) = if family == "G_A" {
                ("--a", &f.a)
            } else {
                ("--b", &f.b)
            };
            let Some(list) = list else {
                return usage(format!("{family} needs {flag}"));
            };
            let set: BTreeSet<BitString> = parse_list(list)?.into_iter().collect();
            let Some(first) = set.iter().next().copied() else {
                return usage(format!("{flag} is empty"));
            };
            let m = width_hint(first.width())?;
            if family == "G_A" {
                no_promise(family)?;
                return Ok(FunctionSpec::g_a(m, set, n)?);
            }
            let promise = match &f.promise {
                Some(p) => parse_promise(p, m, Some(&first), None)?,
                None => PromiseSet::parity_class(m, first.parity_class())?,
            };
            Ok(FunctionSpec::f_b(set, promise, n)?)
        }
        _ => {
            if let Some(bits) = family.strip_prefix("G_") {
                let a: BitString = bits.parse()?;
                no_promise(family)?;
                let m = width_hint(a.width())?;
                return Ok(FunctionSpec::g_a(m, [a].into(), n)?);
            }
            let u = match (family.strip_prefix("F_"), f.u) {
                (Some("u"), Some(u)) => u,
                (Some("u"), None) => return usage("F_u needs --u"),
                (Some(bits), given) => {
                    let u: BitString = bits.parse()?;
                    if given.is_some_and(|g| g != u) {
                        return usage(format!("--u disagrees with {family}"));
                    }
                    u
                }
                (None, _) => return usage(format!("unknown family {family:?}")),
            };
            let m = width_hint(u.width())?;
            let promise = parse_promise(
                f.promise.as_deref().unwrap_or("hamming-odd"),
                m,
                Some(&u),
                None,
            )?;
            Ok(FunctionSpec::f_u(u, promise, n)?)
        }
    }
}

fn runner_for(f: &FunctionArgs, spec: &FunctionSpec) -> CliResult<Runner> {
    let classical_family = matches!(
        spec.family(),
        crate::functions::Family::MixedParity { .. } | crate::functions::Family::TwoPartyAnd
    );
    let protocol = f.protocol.unwrap_or(if classical_family {
        ProtocolArg::Mixed
    } else {
        ProtocolArg::Entangled
    });
    if f.backend.is_some() && protocol != ProtocolArg::Entangled {
        return usage("--backend applies to the entangled protocol only");
    }
    Ok(match protocol {
        ProtocolArg::Entangled => Runner::Entangled(f.backend),
        ProtocolArg::Classical => Runner::ClassicalMod4,
        ProtocolArg::Mixed => Runner::ClassicalMixed,
    })
}

#[derive(Serialize)]
struct MatricesJson<'a> {
    m: usize,
    kind: &'a str,
    rows: Vec<String>,
    cols: Vec<String>,
    cells: Vec<Vec<String>>,
}

fn matrices(cli: &Cli, m: usize, kind: MatrixKind, out: &mut dyn Write) -> CliResult {
    let mat = build_op_matrix(m, kind)?;
    let rows: Vec<String> = mat.row_labels().iter().map(ToString::to_string).collect();
    let cols: Vec<String> = mat.col_labels().iter().map(ToString::to_string).collect();
    let cells: Vec<Vec<String>> = mat
        .cells()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    if cli.format == Format::Json {
        return emit_json(
            out,
            &MatricesJson {
                m,
                kind: kind.as_str(),
                rows,
                cols,
                cells,
            },
        );
    }
    let w = cells
        .iter()
        .flatten()
        .chain(&cols)
        .map(String::len)
        .max()
        .unwrap_or(m);
    let line = |label: &str, items: &[String]| {
        let body: Vec<String> = items.iter().map(|c| format!("{c:<w$}")).collect();
        format!("{label:<m$}  {}", body.join("  "))
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line("", &cols))?;
    for (label, row) in rows.iter().zip(&cells) {
        writeln!(out, "{}", line(label, row))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AmplitudeJson {
    basis: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct StateJson {
    m: usize,
    initial: String,
    word: Option<String>,
    consistent: bool,
    witness: Vec<String>,
    amplitudes: Vec<AmplitudeJson>,
    support: Option<String>,
}

fn state(
    cli: &Cli,
    initial: Initial,
    m: Option<usize>,
    u: Option<&BitString>,
    promise: Option<&str>,
    word: Option<&OpWord>,
    out: &mut dyn Write,
) -> CliResult {
    let initial_name = format!("{initial:?}").to_lowercase();
    let need_u = || {
        u.copied()
            .ok_or_else(|| Failure::Usage(format!("--initial {initial_name} needs --u")))
    };
    let base: StateVector = match initial {
        Initial::Psi3 => psi3(),
        Initial::Ghz => ghz(m.ok_or_else(|| Failure::Usage("--initial ghz needs --m".into()))?)?,
        Initial::Basis => StateVector::basis(&need_u()?)?,
        Initial::Signed => {
            let u = need_u()?;
            let p = parse_promise(
                promise.unwrap_or("class-no-complement"),
                u.width(),
                Some(&u),
                None,
            )?;
            match solve_for(&u, &p)? {
                SignSolution::Consistent(sg) => build_signed_state(u.width(), &sg)?,
                SignSolution::Inconsistent { witness } => {
                    return inconsistent(cli, u.width(), &initial_name, word, &witness, out);
                }
            }
        }
    };
    if let Some(m) = m {
        if m != base.width() {
            return usage(format!(
                "--m {m} does not match the {}-qubit state",
                base.width()
            ));
        }
    }
    let base = base.with_tol(cli.tol);
    let shown = match word {
        Some(w) => base.apply_word(w)?,
        None => base,
    };
    let support = shown.support_parity().to_string();
    if cli.format == Format::Json {
        let amplitudes = shown
            .support()
            .iter()
            .map(|v| {
                let a = shown.amplitude(v);
                let clean = |x: f64| if x.abs() > cli.tol { x } else { 0.0 };
                AmplitudeJson {
                    basis: v.to_string(),
                    re: clean(a.re),
                    im: clean(a.im),
                }
            })
            .collect();
        return emit_json(
            out,
            &StateJson {
                m: shown.width(),
                initial: initial_name,
                word: word.map(ToString::to_string),
                consistent: true,
                witness: Vec::new(),
                amplitudes,
                support: Some(support),
            },
        );
    }
    for v in shown.support() {
        writeln!(
            out,
            "{} |{}>",
            format_amplitude(shown.amplitude(&v), cli.tol),
            v
        )?;
    }
    writeln!(out, "support: {support}")?;
    Ok(())
}

fn inconsistent(
    cli: &Cli,
    m: usize,
    initial: &str,
    word: Option<&OpWord>,
    witness: &[SignConstraint],
    out: &mut dyn Write,
) -> CliResult {
    let lines: Vec<String> = witness.iter().map(ToString::to_string).collect();
    if cli.format == Format::Json {
        emit_json(
            out,
            &StateJson {
                m,
                initial: initial.to_string(),
                word: word.map(ToString::to_string),
                consistent: false,
                witness: lines,
                amplitudes: Vec::new(),
                support: None,
            },
        )?;
    } else {
        writeln!(out, "INCONSISTENT")?;
        for l in lines {
            writeln!(out, "{l}")?;
        }
    }
    Err(Failure::Mismatch)
}

#[derive(Serialize)]
struct RunJson<'a> {
    value: u8,
    cbits: usize,
    messages: &'a [Message],
    support: Vec<String>,
}

fn run(cli: &Cli, f: &FunctionArgs, inputs: &InputMatrix, out: &mut dyn Write) -> CliResult {
    let spec = build_spec(f, Some((inputs.parties(), inputs.len())))?;
    let outcome = match runner_for(f, &spec)? {
        Runner::Entangled(backend) => {
            let plan = plan_entangled(&spec, backend)?.with_tol(cli.tol);
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            run_with_plan(&plan, &spec, inputs, &mut rng)?
        }
        Runner::ClassicalMod4 => run_classical_mod4(&spec, inputs)?,
        Runner::ClassicalMixed => run_classical_mixed(&spec, inputs)?,
    };
    let support: Vec<String> = outcome.support.iter().map(ToString::to_string).collect();
    let cbits = outcome.transcript.total_cbits();
    if cli.format == Format::Json {
        return emit_json(
            out,
            &RunJson {
                value: outcome.value,
                cbits,
                messages: outcome.transcript.messages(),
                support,
            },
        );
    }
    writeln!(out, "value: {}", outcome.value)?;
    writeln!(out, "cbits: {cbits}")?;
    for msg in outcome.transcript.messages() {
        let bits: String = msg
            .payload
            .iter()
            .map(|b| if *b == 1 { '1' } else { '0' })
            .collect();
        writeln!(out, "message {} -> {}: {bits}", msg.from, msg.to)?;
    }
    writeln!(out, "support: {}", support.join(" "))?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyJson {
    family: String,
    m: usize,
    n: usize,
    trials: usize,
    mismatches: usize,
    min_cbits: usize,
    max_cbits: usize,
    expected_cbits: usize,
    support_violations: usize,
    first_mismatch: Option<usize>,
    passed: bool,
}

fn verify_cmd(
    cli: &Cli,
    f: &FunctionArgs,
    samples: Option<usize>,
    cap: u128,
    out: &mut dyn Write,
) -> CliResult {
    let spec = build_spec(f, None)?;
    let runner = runner_for(f, &spec)?;
    let coverage = match samples {
        Some(count) => InputMode::Random {
            count,
            seed: cli.seed,
        },
        None => InputMode::Exhaustive { cap },
    };
    let r = verify_with_tol(&spec, runner, coverage, cli.seed, cli.tol)?;
    let passed = r.passed();
    let report = VerifyJson {
        family: spec.family().name().to_string(),
        m: spec.width(),
        n: spec.n(),
        trials: r.trials,
        mismatches: r.mismatches,
        min_cbits: r.min_cbits,
        max_cbits: r.max_cbits,
        expected_cbits: r.expected_cbits,
        support_violations: r.support_violations,
        first_mismatch: r.first_mismatch,
        passed,
    };
    if cli.format == Format::Json {
        emit_json(out, &report)?;
    } else {
        writeln!(out, "family: {}", report.family)?;
        writeln!(out, "m: {}", report.m)?;
        writeln!(out, "n: {}", report.n)?;
        writeln!(out, "trials: {}", report.trials)?;
        writeln!(out, "mismatches: {}", report.mismatches)?;
        writeln!(out, "min_cbits: {}", report.min_cbits)?;
        writeln!(out, "max_cbits: {}", report.max_cbits)?;
        writeln!(out, "expected_cbits: {}", report.expected_cbits)?;
        writeln!(out, "support_violations: {}", report.support_violations)?;
        match report.first_mismatch {
            Some(k) => writeln!(out, "first_mismatch: {k}")?,
            None => writeln!(out, "first_mismatch: none")?,
        }
        writeln!(out, "passed: {passed}")?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

#[derive(Serialize)]
struct GameJson {
    result: &'static str,
    strategy: Option<Vec<[u8; 2]>>,
}

fn game(
    cli: &Cli,
    m: usize,
    promise: &str,
    a: Option<&str>,
    target_u: Option<&BitString>,
    target: Option<ParityArg>,
    out: &mut dyn Write,
) -> CliResult {
    let a_set: Option<BTreeSet<BitString>> = a
        .map(parse_list)
        .transpose()?
        .map(|v| v.into_iter().collect());
    let promise = parse_promise(promise, m, target_u, a_set.as_ref())?;
    let game = match (target_u, target) {
        (Some(u), None) => GameSpec::minterm(promise, u)?,
        (None, Some(p)) => {
            let want = match p {
                ParityArg::Even => 0,
                ParityArg::Odd => 1,
            };
            GameSpec::from_fn(promise, |v| u8::from(v.parity() == want))?
        }
        _ => return usage("give exactly one of --target-u and --target"),
    };
    let outcome = ccf_search(&game)?;
    let strategy = match &outcome {
        GameOutcome::Winnable(s) => Some(s),
        GameOutcome::Impossible => None,
    };
    if cli.format == Format::Json {
        return emit_json(
            out,
            &GameJson {
                result: if strategy.is_some() {
                    "winnable"
                } else {
                    "impossible"
                },
                strategy: strategy.map(|s| {
                    (1..=s.width())
                        .map(|j| [s.respond(j, 0), s.respond(j, 1)])
                        .collect()
                }),
            },
        );
    }
    match strategy {
        Some(s) => writeln!(out, "{s}")?,
        None => writeln!(out, "IMPOSSIBLE")?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ReduceJson {
    u: BitString,
    u2: BitString,
    toggles: Vec<usize>,
    inputs: Vec<String>,
}

fn reduce(
    cli: &Cli,
    u: &BitString,
    u2: &BitString,
    inputs: &InputMatrix,
    out: &mut dyn Write,
) -> CliResult {
    let reduced = reduce_instance(u, u2, inputs)?;
    if cli.format == Format::Json {
        return emit_json(
            out,
            &ReduceJson {
                u: *u,
                u2: *u2,
                toggles: reduction_toggles(u, u2)?.into_iter().collect(),
                inputs: reduced.to_string().lines().map(str::to_string).collect(),
            },
        );
    }
    writeln!(out, "{reduced}")?;
    Ok(())
}
