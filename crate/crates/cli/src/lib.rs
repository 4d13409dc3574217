//! Front end for the `fqlct` binary: flag, environment and config-file
//! handling, subcommand dispatch and JSON reports.
//!
//! Precedence is flag, then `FQLCT_*` environment variable, then `--config`
//! file, then built-in default. Reports go to stdout (or `--out`), a short
//! human-readable table goes to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Deserialize;
use serde_json::{json, Value};

use fqlct::cache::{count_table_cached, Cache};
use fqlct::counting::{
    count_table, verify_remez_monic, verify_weierstrass_smallball, CountOptions, CountTable, IdealSpec,
    SmallBallReport, Strategy, DEFAULT_NODE_BUDGET,
};
use fqlct::lct::{
    best_bound, estimate_lct, example_curve, ideal_bounds, round6, weierstrass_lower_bound, zeta_partial_sum,
    BoundValue, Window, EXAMPLE_CURVE_CAP,
};
use fqlct::weierstrass::{reduce_to_weierstrass, PrepareConfig};
use fqlct::{parse_elem, parse_poly, Error, FieldSpec, MPoly, OElem, RingCtx, TOOL_VERSION};

pub const MAX_VARS: usize = 8;
pub const MAX_PRECISION: u32 = 64;
pub const MAX_WORKERS: usize = 256;
const DEFAULT_PREPARE_PRECISION: u32 = 8;
/// Allowed shortfall of a slope estimate below its certified bound.
const BOUND_SLACK: f64 = 0.02;

#[derive(Parser, Debug)]
#[command(name = "fqlct", version, about = "Sublevel counts and log-canonical threshold bounds over F_q((t))")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count N_k = #{x in (O/t^k)^n : f_i(x) = 0 mod t^k}.
    Count(Common),
    /// Estimate the threshold from counts and report certified lower bounds.
    LctEstimate(EstimateArgs),
    /// Weierstrass-prepare a single generator.
    Prepare(Common),
    /// Check the Remez small-ball inequality for a monic univariate polynomial.
    VerifyRemez(Common),
    /// Check the small-ball inequality for a Weierstrass polynomial.
    VerifySmallball(Common),
    /// Exact partial sums of the local zeta function at s.
    Zeta(ZetaArgs),
    /// Pull x_{m+1}^d back along (y, y^D, ..., y^{D^m}) and compare with 1/(d D^m).
    ExampleCurve(CurveArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Residue field size q = p^e.
    #[arg(long, env = "FQLCT_Q")]
    q: Option<u32>,
    #[arg(long, env = "FQLCT_P")]
    p: Option<u32>,
    #[arg(long, env = "FQLCT_E")]
    e: Option<u32>,
    /// Modulus over GF(p), comma-separated coefficients, low degree first.
    #[arg(long, env = "FQLCT_MODULUS")]
    modulus: Option<String>,
    /// Precision M of O/t^M.
    #[arg(long = "M", env = "FQLCT_M")]
    precision: Option<u32>,
    /// Number of variables.
    #[arg(short = 'n', env = "FQLCT_N")]
    n: Option<usize>,
    /// Generator (repeatable; `;` separates several in one value).
    #[arg(short = 'f', env = "FQLCT_F", value_delimiter = ';')]
    f: Vec<String>,
    /// Base point, comma-separated elements of O (default: origin).
    #[arg(long, env = "FQLCT_X0")]
    x0: Option<String>,
    /// Count on x0 + t^j O^n.
    #[arg(long = "radius-j", env = "FQLCT_RADIUS_J")]
    radius_j: Option<u32>,
    #[arg(long, env = "FQLCT_K")]
    k: Option<u32>,
    #[arg(long, env = "FQLCT_KMAX")]
    kmax: Option<u32>,
    /// flat or pruned.
    #[arg(long, env = "FQLCT_STRATEGY")]
    strategy: Option<Strategy>,
    #[arg(long, env = "FQLCT_WORKERS")]
    workers: Option<usize>,
    /// Node budget for the counting engine.
    #[arg(long, env = "FQLCT_BUDGET")]
    budget: Option<u64>,
    #[arg(long, env = "FQLCT_SEED")]
    seed: Option<u64>,
    /// JSON-lines count cache.
    #[arg(long, env = "FQLCT_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, env = "FQLCT_OUT")]
    out: Option<PathBuf>,
    /// TOML file supplying defaults for any of the above.
    #[arg(long, env = "FQLCT_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "window-lo", env = "FQLCT_WINDOW_LO")]
    window_lo: Option<u32>,
    #[arg(long = "window-hi", env = "FQLCT_WINDOW_HI")]
    window_hi: Option<u32>,
}

#[derive(Args, Debug)]
struct ZetaArgs {
    #[command(flatten)]
    common: Common,
    /// Rational s >= 0, e.g. `1/4`.
    #[arg(long, env = "FQLCT_S")]
    s: String,
    /// Degree d for the closed-form bound d / (1 - q^-(1/d - s)).
    #[arg(long, env = "FQLCT_DEGREE")]
    d: Option<u32>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "d", env = "FQLCT_DEGREE")]
    d: u32,
    #[arg(long = "D", env = "FQLCT_BIG_D")]
    big_d: u32,
    #[arg(long = "m", env = "FQLCT_CODIM")]
    m: u32,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    q: Option<FieldSection>,
    #[serde(rename = "M")]
    precision: Option<u32>,
    n: Option<usize>,
    f: Option<Vec<String>>,
    x0: Option<String>,
    radius_j: Option<u32>,
    k: Option<u32>,
    kmax: Option<u32>,
    strategy: Option<Strategy>,
    workers: Option<usize>,
    budget: Option<u64>,
    seed: Option<u64>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FieldSection {
    p: Option<u32>,
    e: Option<u32>,
    modulus: Option<ModulusText>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum ModulusText {
    Text(String),
    List(Vec<u32>),
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

/// Validated session settings.
struct Session {
    field: FieldSpec,
    precision: Option<u32>,
    n: Option<usize>,
    raw_gens: Vec<String>,
    x0: Option<String>,
    radius_j: u32,
    k: Option<u32>,
    kmax: Option<u32>,
    opts: CountOptions,
    seed: u64,
    cache: Option<Cache>,
    out: Option<PathBuf>,
}

/// Parsed generators and base point in a fixed ring.
struct Input {
    ctx: RingCtx,
    gens: Vec<MPoly>,
    x0: Option<Vec<OElem>>,
}

impl Session {
    fn resolve(mut c: Common) -> Res<Session> {
        if let Some(path) = c.config.clone() {
            let text = fs::read_to_string(&path)
                .or_else(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            let cfg: ConfigFile =
                toml::from_str(&text).or_else(|e| usage(format!("bad config {}: {e}", path.display())))?;
            let fs = cfg.q.unwrap_or_default();
            c.p = c.p.or(fs.p);
            c.e = c.e.or(fs.e);
            c.modulus = c.modulus.or(fs.modulus.map(|m| match m {
                ModulusText::Text(s) => s,
                ModulusText::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            }));
            c.precision = c.precision.or(cfg.precision);
            c.n = c.n.or(cfg.n);
            if c.f.is_empty() {
                c.f = cfg.f.unwrap_or_default();
            }
            c.x0 = c.x0.or(cfg.x0);
            c.radius_j = c.radius_j.or(cfg.radius_j);
            c.k = c.k.or(cfg.k);
            c.kmax = c.kmax.or(cfg.kmax);
            c.strategy = c.strategy.or(cfg.strategy);
            c.workers = c.workers.or(cfg.workers);
            c.budget = c.budget.or(cfg.budget);
            c.seed = c.seed.or(cfg.seed);
            c.cache = c.cache.or(cfg.cache);
            c.out = c.out.or(cfg.out);
        }
        let field = resolve_field(&c)?;
        if let Some(m) = c.precision {
            if m == 0 || m > MAX_PRECISION {
                return usage(format!("--M must be in 1..={MAX_PRECISION}, got {m}"));
            }
        }
        if let Some(n) = c.n {
            if n == 0 || n > MAX_VARS {
                return usage(format!("-n must be in 1..={MAX_VARS}, got {n}"));
            }
        }
        for (name, v) in [("--k", c.k), ("--kmax", c.kmax)] {
            if v.is_some_and(|v| v > MAX_PRECISION) {
                return usage(format!("{name} must be at most {MAX_PRECISION}"));
            }
        }
        let workers = c.workers.unwrap_or(1);
        if !(1..=MAX_WORKERS).contains(&workers) {
            return usage(format!("--workers must be in 1..={MAX_WORKERS}, got {workers}"));
        }
        let budget = c.budget.unwrap_or(DEFAULT_NODE_BUDGET);
        if budget == 0 {
            return usage("--budget must be positive");
        }
        Ok(Session {
            field,
            precision: c.precision,
            n: c.n,
            raw_gens: c.f,
            x0: c.x0,
            radius_j: c.radius_j.unwrap_or(0),
            k: c.k,
            kmax: c.kmax,
            opts: CountOptions { strategy: c.strategy.unwrap_or(Strategy::Pruned), workers, node_budget: budget },
            seed: c.seed.unwrap_or(0),
            cache: c.cache.map(Cache::new),
            out: c.out,
        })
    }

    /// Deepest level requested by --k / --kmax.
    fn depth(&self) -> Res<u32> {
        match (self.k, self.kmax) {
            (None, None) => usage("one of --k or --kmax is required"),
            (a, b) => Ok(a.unwrap_or(0).max(b.unwrap_or(0))),
        }
    }

    /// Parse generators and base point at precision `--M`, or `default_m`.
    fn input(&self, default_m: u32) -> Res<Input> {
        let n = match self.n {
            Some(n) => n,
            None => return usage("-n is required"),
        };
        if self.raw_gens.is_empty() {
            return usage("at least one -f generator is required");
        }
        let m = self.precision.unwrap_or(default_m.clamp(1, MAX_PRECISION));
        let ctx = RingCtx::new(self.field.clone(), m)?;
        let gens = self.raw_gens.iter().map(|s| parse_poly(s, &ctx, n)).collect::<Result<Vec<_>, _>>()?;
        let x0 = match &self.x0 {
            None => None,
            Some(s) => Some(s.split(',').map(|c| parse_elem(c, &ctx)).collect::<Result<Vec<_>, _>>()?),
        };
        Ok(Input { ctx, gens, x0 })
    }

    fn single(&self, default_m: u32) -> Res<Input> {
        let input = self.input(default_m)?;
        if input.gens.len() != 1 {
            return usage("this command takes exactly one -f generator");
        }
        Ok(input)
    }

    fn spec(&self, input: &Input) -> Res<IdealSpec> {
        Ok(IdealSpec::new(input.gens.clone(), input.x0.clone(), self.radius_j)?)
    }

    fn table(&self, spec: &IdealSpec, k_max: u32, log: &mut String) -> Res<CountTable> {
        match &self.cache {
            None => Ok(count_table(spec, k_max, &self.opts)?),
            Some(cache) => {
                let (table, stats) = count_table_cached(spec, k_max, &self.opts, cache)?;
                log.push_str(&format!(
                    "cache {}: {} levels reused, {} written\n",
                    cache.path().display(),
                    stats.hits,
                    stats.written
                ));
                Ok(table)
            }
        }
    }
}

fn resolve_field(c: &Common) -> Res<FieldSpec> {
    let modulus = match &c.modulus {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .or_else(|_| usage(format!("--modulus `{s}` is not a comma-separated list of integers")))?,
        ),
    };
    let (p, e) = match (c.q, c.p) {
        (Some(q), p) => {
            let (qp, qe) = match prime_power(q) {
                Some(pe) => pe,
                None => return usage(format!("--q {q} is not a prime power")),
            };
            if p.is_some_and(|p| p != qp) || c.e.is_some_and(|e| e != qe) {
                return usage(format!("--q {q} disagrees with --p/--e"));
            }
            (qp, qe)
        }
        (None, Some(p)) => (p, c.e.unwrap_or(1)),
        (None, None) => return usage("a field is required: --q, or --p with optional --e"),
    };
    Ok(FieldSpec::new(p, e, modulus.as_deref())?)
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

fn parse_ratio(s: &str) -> Res<Ratio<u64>> {
    let bad = || Failure::Usage(format!("--s `{s}` is not a non-negative rational like 1/4"));
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let a: u64 = a.parse().map_err(|_| bad())?;
    let b: u64 = b.parse().map_err(|_| bad())?;
    if b == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(a, b))
}

fn table_json(t: &CountTable) -> Value {
    json!({
        "q": t.q,
        "n": t.n,
        "strategy": t.strategy,
        "rows": t.rows.iter().map(|r| json!({
            "k": r.k,
            "N_k": r.count,
            "volume": format!("{}/{}^{}", r.count, t.q, t.n as u32 * r.k),
        })).collect::<Vec<_>>(),
    })
}

fn table_text(t: &CountTable) -> String {
    let mut s = format!("{:>4}  {:>20}  {:>12}\n", "k", "N_k", "mu_k");
    for r in &t.rows {
        s.push_str(&format!("{:>4}  {:>20}  {:>12.6e}\n", r.k, r.count, t.volume_f64(r.k).unwrap_or(f64::NAN)));
    }
    s
}

fn smallball_text(r: &SmallBallReport) -> String {
    let mut s = format!("d = {}\n{:>4}  {:>20}  {}\n", r.d, "k", "N_k", "pass");
    for row in &r.rows {
        s.push_str(&format!("{:>4}  {:>20}  {}\n", row.k, row.count, row.pass));
    }
    s
}

fn input_json(s: &Session, input: Option<&Input>) -> Value {
    let f = &s.field;
    let mut v = json!({
        "field": { "p": f.p(), "e": f.e(), "q": f.q(), "modulus": f.modulus() },
        "radius_j": s.radius_j,
    });
    if let Some(inp) = input {
        v["precision"] = json!(inp.ctx.precision());
        v["n"] = json!(inp.gens[0].n());
        v["generators"] = inp
            .gens
            .iter()
            .zip(&s.raw_gens)
            .map(|(g, raw)| json!({ "raw": raw, "canonical": g.to_string() }))
            .collect();
        v["x0"] = match &inp.x0 {
            None => Value::Null,
            Some(x) => x.iter().map(|c| Value::String(inp.ctx.format(c))).collect(),
        };
    }
    v
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

struct Report {
    fingerprint: Option<String>,
    input: Value,
    result: Value,
}

fn dispatch(cmd: Command, log: &mut String) -> Res<(Session, Report)> {
    match cmd {
        Command::Count(c) => {
            let s = Session::resolve(c)?;
            let depth = s.depth()?;
            let input = s.input(depth)?;
            let spec = s.spec(&input)?;
            let table = s.table(&spec, depth, log)?;
            log.push_str(&table_text(&table));
            let mut result = json!({ "k_max": depth, "table": table_json(&table) });
            if let Some(k) = s.k {
                result["k"] = json!(k);
                result["N_k"] = json!(table.count(k));
            }
            let report = Report { fingerprint: Some(spec.fingerprint().into()), input: input_json(&s, Some(&input)), result };
            Ok((s, report))
        }
        Command::LctEstimate(a) => {
            let s = Session::resolve(a.common)?;
            let depth = s.depth()?;
            let window = match (a.window_lo, a.window_hi) {
                (None, None) => None,
                (Some(lo), Some(hi)) => Some(Window { lo, hi }),
                (lo, hi) => Some(Window { lo: lo.unwrap_or(depth / 2), hi: hi.unwrap_or(depth) }),
            };
            let input = s.input(depth)?;
            let spec = s.spec(&input)?;
            let table = s.table(&spec, depth, log)?;
            log.push_str(&table_text(&table));
            let est = estimate_lct(&table, window)?;
            let bounds = ideal_bounds(&spec, s.seed)?;
            let best = best_bound(&bounds);
            let consistent = match (&best, est.regression) {
                (Some(b), Some(r)) if b.value != BoundValue::Infinite => r >= b.as_f64() - BOUND_SLACK,
                _ => true,
            };
            if let Some(r) = est.regression {
                log.push_str(&format!("estimate {:.6}", r));
            }
            if let Some(b) = &best {
                log.push_str(&format!("  certified bound >= {:.6} ({:?})", b.as_f64(), b.provenance));
            }
            log.push('\n');
            let result = json!({
                "table": table_json(&table),
                "estimate": est.to_json(),
                "bounds": bounds.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
                "best_bound": best.as_ref().map(|b| b.to_json()),
                "consistent": consistent,
            });
            let report = Report { fingerprint: Some(spec.fingerprint().into()), input: input_json(&s, Some(&input)), result };
            Ok((s, report))
        }
        Command::Prepare(c) => {
            let s = Session::resolve(c)?;
            let input = s.single(DEFAULT_PREPARE_PRECISION)?;
            let spec = s.spec(&input)?;
            let prep = reduce_to_weierstrass(&spec.generators()[0], PrepareConfig { seed: s.seed })?;
            log.push_str(&format!("s0 = {}\nomega = {}\nu = {}\n", prep.s0, prep.omega, prep.unit_u));
            let mut result = prep.to_json();
            result["bound"] = weierstrass_lower_bound(&prep).to_json();
            let report = Report { fingerprint: Some(spec.fingerprint().into()), input: input_json(&s, Some(&input)), result };
            Ok((s, report))
        }
        Command::VerifyRemez(c) => verify(c, true, log),
        Command::VerifySmallball(c) => verify(c, false, log),
        Command::Zeta(a) => {
            let sv = parse_ratio(&a.s)?;
            let s = Session::resolve(a.common)?;
            let depth = s.depth()?;
            if depth + 1 > MAX_PRECISION {
                return usage(format!("zeta needs counts to k + 1 <= {MAX_PRECISION}"));
            }
            let input = s.input(depth + 1)?;
            let spec = s.spec(&input)?;
            let table = s.table(&spec, depth + 1, log)?;
            let rep = zeta_partial_sum(&table, sv, depth, a.d)?;
            for r in &rep.rows {
                log.push_str(&format!("{:>4}  {:.6}\n", r.k, r.partial_sum.to_f64()));
            }
            let mut result = rep.to_json();
            result["table"] = table_json(&table);
            let report = Report { fingerprint: Some(spec.fingerprint().into()), input: input_json(&s, Some(&input)), result };
            Ok((s, report))
        }
        Command::ExampleCurve(a) => {
            let s = Session::resolve(a.common)?;
            let k_max = match s.kmax.or(s.k) {
                Some(k) => k,
                None => return usage("--kmax is required"),
            };
            let rep = example_curve(a.d, a.big_d, a.m, &s.field, k_max, EXAMPLE_CURVE_CAP, &s.opts)?;
            log.push_str(&table_text(&rep.table));
            let bound = match rep.bound.value {
                BoundValue::Finite(r) => r.to_string(),
                BoundValue::Infinite => "inf".into(),
            };
            log.push_str(&format!(
                "estimate {}  bound {}  matches {}\n",
                rep.estimate.regression.map(round6).map_or("n/a".into(), |x| x.to_string()),
                bound,
                rep.matches
            ));
            let result = json!({
                "d": rep.d,
                "D": rep.big_d,
                "m": rep.m,
                "exponent": rep.exponent,
                "pullback": rep.pullback.to_string(),
                "table": table_json(&rep.table),
                "estimate": rep.estimate.regression.map(round6),
                "estimate_exact": rep.estimate.regression_exact.map(|r| r.to_string()),
                "lct_estimate": rep.estimate.to_json(),
                "bound": bound,
                "bound_cert": rep.bound.to_json(),
                "matches": rep.matches,
            });
            let mut inp = input_json(&s, None);
            inp["precision"] = json!(k_max);
            let report = Report { fingerprint: Some(rep.table.fingerprint.clone()), input: inp, result };
            Ok((s, report))
        }
    }
}

fn verify(c: Common, remez: bool, log: &mut String) -> Res<(Session, Report)> {
    let s = Session::resolve(c)?;
    let depth = s.depth()?;
    let input = s.single(depth)?;
    let spec = s.spec(&input)?;
    let f = &spec.generators()[0];
    let rep = if remez {
        verify_remez_monic(f, depth, &s.opts)?
    } else {
        verify_weierstrass_smallball(f, depth, &s.opts)?
    };
    log.push_str(&smallball_text(&rep));
    let result = serde_json::to_value(&rep).expect("report serializes");
    let report = Report { fingerprint: Some(spec.fingerprint().into()), input: input_json(&s, Some(&input)), result };
    Ok((s, report))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Count(_) => "count",
        Command::LctEstimate(_) => "lct-estimate",
        Command::Prepare(_) => "prepare",
        Command::VerifyRemez(_) => "verify-remez",
        Command::VerifySmallball(_) => "verify-smallball",
        Command::Zeta(_) => "zeta",
        Command::ExampleCurve(_) => "example-curve",
    }
}

fn error_json(command: &str, e: &Error) -> Value {
    let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::BudgetExceeded { partial, .. } = e {
        err["partial"] = table_json(partial);
    }
    json!({ "command": command, "tool_version": TOOL_VERSION, "error": err })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Run one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let name = command_name(&cli.command);
    let mut log = String::new();
    let dispatched = dispatch(cli.command, &mut log);
    match dispatched {
        Ok((session, report)) => {
            let v = json!({
                "command": name,
                "tool_version": TOOL_VERSION,
                "fingerprint": report.fingerprint,
                "seed": session.seed,
                "generated_at": now_unix(),
                "input": report.input,
                "result": report.result,
            });
            let text = pretty(&v);
            match &session.out {
                None => Outcome { code: 0, stdout: text, stderr: log },
                Some(path) => match fs::write(path, &text) {
                    Ok(()) => Outcome { code: 0, stdout: String::new(), stderr: log },
                    Err(e) => Outcome { code: 1, stdout: pretty(&error_json(name, &Error::Io(e))), stderr: log },
                },
            }
        }
        Err(Failure::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("{log}error: {msg}\n") },
        Err(Failure::Compute(e)) => {
            log.push_str(&format!("error: {e}\n"));
            Outcome { code: 1, stdout: pretty(&error_json(name, &e)), stderr: log }
        }
    }
}
