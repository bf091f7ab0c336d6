//! The `lotka` command line: classification, sweeps, simulation and checks.
//!
//! Exit codes: 0 center / check passed / success, 1 focus / check failed,
//! 2 degenerate or not elliptic, 64 usage error, 65 numeric error, 74 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lotka_center::conserved::{build_integral, invariance_residual, relative_drift, IntegralCase};
use lotka_center::dynamics::{
    bautin_scenario_with, integrate_field, poincare_return_with, return_orbit, BautinOptions,
    BautinStage, IntegratorOptions, ReturnOptions, ScanOptions, TraceShift,
};
use lotka_center::model::canonicalize;
use lotka_center::symmetry::{
    r1_residual, r2_residual, r2_transform, trajectory_reversibility_error,
};
use lotka_center::{
    classify_with, CanonicalParams, CenterCase, CenterClassification, Error, Point, RawLotkaParams,
    Tolerances, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOCUS: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NUMERIC: i32 = 65;
pub const EXIT_IO: i32 = 74;

/// Largest sweep grid accepted.
pub const MAX_GRID_NODES: usize = 20_000_000;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Parse(_)
            | Error::Domain { .. }
            | Error::CaseMismatch(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<i32, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "lotka",
    version,
    about = "Center-focus analysis of the generalized Lotka system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the equilibrium (1, 1) as center, focus or degenerate.
    Classify(ClassifyArgs),
    /// Classify every node of an (a1, b1, a3) grid at fixed K; JSON lines.
    Sweep(SweepArgs),
    /// Integrate one trajectory; CSV columns t,x,y.
    Simulate(SimulateArgs),
    /// One Poincaré return from (x0, 1).
    Poincare(PoincareArgs),
    /// Check a first integral pointwise and along one return.
    VerifyIntegral(VerifyIntegralArgs),
    /// Check the reflection identities of cases (r1) and (r2).
    VerifyReversible(VerifyReversibleArgs),
    /// Two-stage perturbation of a weak focus producing limit cycles.
    Bautin(BautinArgs),
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b3: Option<f64>,
    #[arg(long = "K", allow_negative_numbers = true)]
    k: Option<f64>,
    /// Raw rate constants and exponents, used instead of the canonical flags.
    #[arg(long, allow_negative_numbers = true)]
    k1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta3: Option<f64>,
}

/// Canonical parameters, and the raw equilibrium when raw input was given.
struct Resolved {
    params: CanonicalParams,
    raw_equilibrium: Option<Point>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<Resolved, Failure> {
        let canon = [self.a1, self.b1, self.a3, self.b3, self.k];
        let raw = [
            self.k1,
            self.k2,
            self.k3,
            self.k4,
            self.alpha1,
            self.beta1,
            self.alpha2,
            self.beta2,
            self.alpha3,
            self.beta3,
        ];
        let any_canon = canon.iter().any(Option::is_some);
        let any_raw = raw.iter().any(Option::is_some);
        match (any_canon, any_raw) {
            (true, true) => Err(Failure::Usage(
                "give either --a1 --b1 --a3 --b3 --K or the raw --k1..--k4 --alpha*/--beta* flags, not both".into(),
            )),
            (false, false) => Err(Failure::Usage(
                "missing parameters: --a1 --b1 --a3 --b3 --K (or raw --k1..--k4 --alpha1..--beta3)".into(),
            )),
            (true, false) => {
                let [Some(a1), Some(b1), Some(a3), Some(b3), Some(k)] = canon else {
                    return Err(Failure::Usage("all of --a1 --b1 --a3 --b3 --K are required".into()));
                };
                Ok(Resolved { params: CanonicalParams::new(a1, b1, a3, b3, k)?, raw_equilibrium: None })
            }
            (false, true) => {
                let [Some(k1), Some(k2), Some(k3), Some(k4), Some(alpha1), Some(beta1), Some(alpha2), Some(beta2), Some(alpha3), Some(beta3)] =
                    raw
                else {
                    return Err(Failure::Usage(
                        "raw input needs all of --k1 --k2 --k3 --k4 --alpha1 --beta1 --alpha2 --beta2 --alpha3 --beta3".into(),
                    ));
                };
                let raw = RawLotkaParams { k1, k2, k3, k4, alpha1, beta1, alpha2, beta2, alpha3, beta3 };
                let (params, eq) = canonicalize(&raw)?;
                Ok(Resolved { params, raw_equilibrium: Some(eq) })
            }
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct ClassifyTolArgs {
    /// Relative tolerance of the center-case equalities.
    #[arg(long, default_value_t = lotka_center::tol::CASE_REL_TOL)]
    case_tol: f64,
    /// Zero threshold for normalized focal values.
    #[arg(long, default_value_t = lotka_center::tol::FOCAL_ZERO_TOL)]
    focal_tol: f64,
}

impl ClassifyTolArgs {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let t = Tolerances {
            case_rel: self.case_tol,
            focal_zero: self.focal_tol,
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    tol: ClassifyTolArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "K", allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    a1_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    a1_max: f64,
    #[arg(long, default_value_t = 50)]
    a1_steps: usize,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    b1_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    b1_max: f64,
    #[arg(long, default_value_t = 50)]
    b1_steps: usize,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    a3_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    a3_max: f64,
    #[arg(long, default_value_t = 50)]
    a3_steps: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: ClassifyTolArgs,
}

#[derive(Args, Debug)]
struct IntegratorArgs {
    /// Relative tolerance of the adaptive integrator.
    #[arg(long, default_value_t = 1e-11)]
    rel_tol: f64,
    #[arg(long, default_value_t = IntegratorOptions::DEFAULT_MAX_STEPS)]
    max_steps: usize,
}

impl IntegratorArgs {
    fn options(&self) -> Result<IntegratorOptions, Failure> {
        Ok(IntegratorOptions::new(self.rel_tol)?.with_max_steps(self.max_steps))
    }

    fn return_options(&self, t_max: Option<f64>) -> Result<ReturnOptions, Failure> {
        self.options()?;
        Ok(ReturnOptions {
            rel_tol: self.rel_tol,
            t_max,
            max_steps: self.max_steps,
        })
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1.1)]
    x0: f64,
    #[arg(long, default_value_t = 1.0)]
    y0: f64,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[command(flatten)]
    integ: IntegratorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PoincareArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Section coordinate of the start point.
    #[arg(long, default_value_t = 1.1)]
    x0: f64,
    /// Time limit for the return; 50 linear periods when absent.
    #[arg(long)]
    t_max: Option<f64>,
    #[command(flatten)]
    integ: IntegratorArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points are uniform on [lo, hi]^2.
    #[arg(long, default_value_t = 0.2)]
    lo: f64,
    #[arg(long, default_value_t = 5.0)]
    hi: f64,
}

impl SampleArgs {
    fn points(&self, n: usize) -> Result<Vec<Point>, Failure> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return Err(Failure::Usage(format!(
                "need 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if n == 0 {
            return Err(Failure::Usage("--points must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..n)
            .map(|_| Point {
                x: rng.gen_range(self.lo..self.hi),
                y: rng.gen_range(self.lo..self.hi),
            })
            .collect())
    }
}

#[derive(Args, Debug)]
struct VerifyIntegralArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// One of i, ii, iii, iv, r1, r2, r1r2.
    #[arg(long)]
    case: String,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[command(flatten)]
    sample: SampleArgs,
    /// Start of the orbit used for the drift check.
    #[arg(long, default_value_t = 1.1)]
    x0: f64,
    #[command(flatten)]
    integ: IntegratorArgs,
    #[arg(long, default_value_t = 1e-10)]
    residual_tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    drift_tol: f64,
}

#[derive(Args, Debug)]
struct VerifyReversibleArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// r1 or r2; chosen from the parameters when absent.
    #[arg(long)]
    which: Option<String>,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, default_value_t = 1e-12)]
    residual_tol: f64,
    /// Start and duration of the trajectory-level check.
    #[arg(long, default_value_t = 1.1)]
    x0: f64,
    #[arg(long, default_value_t = 0.95)]
    y0: f64,
    #[arg(long, default_value_t = 2.0)]
    flow_time: f64,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    flow_tol: f64,
}

#[derive(Args, Debug)]
struct BautinArgs {
    #[arg(long, allow_negative_numbers = true)]
    b1: f64,
    #[arg(long, allow_negative_numbers = true)]
    a3: f64,
    #[arg(long = "dK", default_value_t = 0.02, allow_negative_numbers = true)]
    d_k: f64,
    /// Trace shift: `auto`, `none` or a number.
    #[arg(long = "dA1", default_value = "auto", allow_negative_numbers = true)]
    d_a1: String,
    #[arg(long, default_value_t = 1e-3)]
    r_min: f64,
    #[arg(long, default_value_t = 3.0)]
    r_max: f64,
    #[arg(long, default_value_t = 100)]
    n_scan: usize,
    #[arg(long, default_value_t = ScanOptions::default().rel_tol)]
    rel_tol: f64,
    /// Displacements at or below this are treated as zero.
    #[arg(long, default_value_t = ScanOptions::default().noise)]
    noise: f64,
    #[arg(long, default_value_t = ScanOptions::default().root_tol)]
    root_tol: f64,
    #[arg(long, default_value_t = BautinOptions::default().shift_iterations)]
    shift_iterations: usize,
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Poincare(a) => cmd_poincare(&a, out),
        Command::VerifyIntegral(a) => cmd_verify_integral(&a, out),
        Command::VerifyReversible(a) => cmd_verify_reversible(&a, out),
        Command::Bautin(a) => cmd_bautin(&a, out),
    };
    let result = result.and_then(|code| out.flush().map(|_| code).map_err(Failure::from));
    match result {
        Ok(code) => code,
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, "usage error", m),
                Failure::Numeric(m) => (EXIT_NUMERIC, "error", m),
                Failure::Io(m) => (EXIT_IO, "I/O error", m),
            };
            let _ = writeln!(err, "lotka: {kind}: {msg}");
            code
        }
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Center => EXIT_OK,
        Verdict::FocusStable | Verdict::FocusUnstable | Verdict::WeakFocusOrder2Plus => EXIT_FOCUS,
        Verdict::NotElliptic | Verdict::DegenerateDetZero => EXIT_DEGENERATE,
    }
}

fn cases_list(cl: &CenterClassification) -> String {
    let names: Vec<String> = cl.cases.iter().map(CenterCase::to_string).collect();
    format!("[{}]", names.join(","))
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let tols = a.tol.tolerances()?;
    let r = a.params.resolve()?;
    let c = r.params;
    let cl = classify_with(&c, &tols)?;
    let headline = match (cl.verdict, cl.focal.and_then(|f| f.leading())) {
        (Verdict::Center, _) => format!("Center, cases={}", cases_list(&cl)),
        (v @ (Verdict::FocusStable | Verdict::FocusUnstable), Some((n, value))) => {
            format!("{v}, L{n}={value:.6}")
        }
        (v, _) => v.to_string(),
    };
    writeln!(out, "{headline}")?;
    if let Some(eq) = r.raw_equilibrium {
        writeln!(out, "equilibrium    x={} y={}", eq.x, eq.y)?;
    }
    writeln!(
        out,
        "parameters     a1={} b1={} a3={} b3={} K={}",
        c.a1, c.b1, c.a3, c.b3, c.k
    )?;
    let j = c.jacobian();
    writeln!(out, "trace          {}", j.trace)?;
    writeln!(out, "det            {}", j.determinant)?;
    writeln!(out, "verdict        {}", cl.verdict)?;
    writeln!(out, "cases          {}", cases_list(&cl))?;
    writeln!(out, "witness        {}", cl.witness)?;
    if let Some(f) = &cl.focal {
        // `+ 0.0` prints an exact zero without its sign
        writeln!(out, "L1             {}", f.l1 + 0.0)?;
        if let Some(l2) = f.l2 {
            writeln!(out, "L2             {}", l2 + 0.0)?;
        }
    }
    Ok(verdict_code(cl.verdict))
}

fn grid_axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Failure::Usage(format!("{name} range must be finite")));
    }
    if !(lo < hi) || n < 2 {
        return Err(Failure::Usage(format!(
            "{name} range is empty: need min < max and at least 2 steps, got [{lo}, {hi}] with {n}"
        )));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
        .collect())
}

fn sweep_threads() -> Result<Option<usize>, Failure> {
    match std::env::var("LOTKA_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "LOTKA_THREADS must be a positive integer, got {s:?}"
            ))),
        },
    }
}

fn opt_num(v: Option<f64>) -> serde_json::Value {
    v.filter(|x| x.is_finite())
        .map_or(serde_json::Value::Null, |x| json!(x))
}

fn sweep_record(a1: f64, b1: f64, a3: f64, k: f64, tols: &Tolerances) -> String {
    let b3 = a1 / k;
    let base = |v: serde_json::Value| {
        let mut m = json!({ "a1": a1, "b1": b1, "a3": a3, "b3": b3, "K": k });
        if let (Some(m), serde_json::Value::Object(extra)) = (m.as_object_mut(), v) {
            m.extend(extra);
        }
        m
    };
    let rec = match CanonicalParams::new(a1, b1, a3, b3, k).and_then(|c| classify_with(&c, tols)) {
        Ok(cl) => {
            let cases: Vec<String> = cl.cases.iter().map(CenterCase::to_string).collect();
            base(json!({
                "verdict": cl.verdict.to_string(),
                "cases": cases,
                "L1": opt_num(cl.focal.map(|f| f.l1)),
                "L2": opt_num(cl.focal.and_then(|f| f.l2)),
            }))
        }
        Err(e) => base(json!({ "verdict": "Error", "error": e.to_string() })),
    };
    rec.to_string()
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let tols = a.tol.tolerances()?;
    if !(a.k > 0.0 && a.k.is_finite()) {
        return Err(Failure::Usage(format!("--K must be positive, got {}", a.k)));
    }
    let a1s = grid_axis("a1", a.a1_min, a.a1_max, a.a1_steps)?;
    let b1s = grid_axis("b1", a.b1_min, a.b1_max, a.b1_steps)?;
    let a3s = grid_axis("a3", a.a3_min, a.a3_max, a.a3_steps)?;
    let nodes = a1s
        .len()
        .checked_mul(b1s.len())
        .and_then(|n| n.checked_mul(a3s.len()));
    if !matches!(nodes, Some(n) if n <= MAX_GRID_NODES) {
        return Err(Failure::Usage(format!(
            "grid exceeds {MAX_GRID_NODES} nodes"
        )));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Numeric(format!("thread pool: {e}")))?;

    let mut file_sink;
    let sink: &mut dyn Write = match &a.out {
        Some(p) => {
            file_sink = BufWriter::new(File::create(p)?);
            &mut file_sink
        }
        None => out,
    };
    // one a1 plane at a time keeps memory bounded; order within a plane is preserved
    let plane = b1s.len() * a3s.len();
    for &a1 in &a1s {
        let lines: Vec<String> = pool.install(|| {
            (0..plane)
                .into_par_iter()
                .map(|i| sweep_record(a1, b1s[i / a3s.len()], a3s[i % a3s.len()], a.k, &tols))
                .collect()
        });
        for line in lines {
            writeln!(sink, "{line}")?;
        }
    }
    sink.flush()?;
    Ok(EXIT_OK)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let c = a.params.resolve()?.params;
    let start = Point::new(a.x0, a.y0)?;
    let traj = integrate_field(c, start, a.t_max, a.integ.options()?)?;
    let csv = traj.to_delimited(',');
    match &a.out {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(csv.as_bytes())?;
            f.flush()?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    writeln!(
        err,
        "termination={:?} accepted={} rejected={} positivity_rejections={}",
        traj.termination,
        traj.stats.accepted,
        traj.stats.rejected,
        traj.stats.positivity_rejections
    )?;
    Ok(EXIT_OK)
}

fn cmd_poincare(a: &PoincareArgs, out: &mut dyn Write) -> CliResult {
    let c = a.params.resolve()?.params;
    let rec = poincare_return_with(&c, a.x0, &a.integ.return_options(a.t_max)?)?;
    writeln!(out, "{rec}")?;
    writeln!(
        out,
        "relative displacement {:e}",
        rec.displacement / (rec.start_x - 1.0)
    )?;
    Ok(EXIT_OK)
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_verify_integral(a: &VerifyIntegralArgs, out: &mut dyn Write) -> CliResult {
    let c = a.params.resolve()?.params;
    let case: IntegralCase = a.case.parse()?;
    let pts = a.sample.points(a.points)?;
    let fi = build_integral(case, &c)?;
    let residual = invariance_residual(&fi, &c, &pts);
    a.integ.options()?;
    let (rec, traj) = return_orbit(&c, a.x0, a.integ.rel_tol)?;
    let drift = relative_drift(&fi, &traj.points)?;
    let ok = residual <= a.residual_tol && drift <= a.drift_tol;
    writeln!(out, "case           {case}")?;
    writeln!(out, "integral       {fi}")?;
    writeln!(
        out,
        "residual       {residual:e} (tol {:e}, {} points)",
        a.residual_tol,
        pts.len()
    )?;
    writeln!(
        out,
        "drift          {drift:e} (tol {:e}, return time {})",
        a.drift_tol, rec.return_time
    )?;
    writeln!(out, "{}", pass_word(ok))?;
    Ok(if ok { EXIT_OK } else { EXIT_FOCUS })
}

fn cmd_verify_reversible(a: &VerifyReversibleArgs, out: &mut dyn Write) -> CliResult {
    let c = a.params.resolve()?.params;
    let which = match a.which.as_deref().map(str::to_ascii_lowercase).as_deref() {
        Some("r1") => CenterCase::R1,
        Some("r2") => CenterCase::R2,
        Some(other) => {
            return Err(Failure::Usage(format!(
                "--which must be r1 or r2, got {other:?}"
            )))
        }
        None if CenterCase::R1.status(&c).0 => CenterCase::R1,
        None => CenterCase::R2,
    };
    let pts = a.sample.points(a.points)?;
    let start = Point::new(a.x0, a.y0)?;
    if !(a.flow_time > 0.0 && a.flow_time.is_finite()) {
        return Err(Failure::Usage(format!(
            "--flow-time must be positive, got {}",
            a.flow_time
        )));
    }
    let (residual, flow) = if which == CenterCase::R1 {
        let res = r1_residual(&c, &pts)?;
        (
            res,
            trajectory_reversibility_error(c, start, a.flow_time, a.rel_tol)?,
        )
    } else {
        let res = r2_residual(&c, &pts)?;
        let g = r2_transform(&c)?;
        (
            res,
            trajectory_reversibility_error(g, g.map(start), a.flow_time, a.rel_tol)?,
        )
    };
    let ok = residual <= a.residual_tol && flow <= a.flow_tol;
    writeln!(out, "case           {}", which.to_string().to_lowercase())?;
    writeln!(
        out,
        "residual       {residual:e} (tol {:e}, {} points)",
        a.residual_tol,
        pts.len()
    )?;
    writeln!(
        out,
        "flow error     {flow:e} (tol {:e}, t = {})",
        a.flow_tol, a.flow_time
    )?;
    writeln!(out, "{}", pass_word(ok))?;
    Ok(if ok { EXIT_OK } else { EXIT_FOCUS })
}

fn write_stage(out: &mut dyn Write, label: &str, s: &BautinStage) -> io::Result<()> {
    let p = &s.params;
    write!(out, "{label:<14} a1={} K={} trace={:e}", p.a1, p.k, s.trace)?;
    if let Some(l1) = s.l1 {
        write!(out, " L1={l1:e}")?;
    }
    writeln!(out)?;
    writeln!(out, "{:<14} {}", "", s.report)
}

fn cmd_bautin(a: &BautinArgs, out: &mut dyn Write) -> CliResult {
    let shift = match a.d_a1.to_ascii_lowercase().as_str() {
        "auto" => TraceShift::Auto,
        "none" => TraceShift::None,
        s => match s.parse::<f64>() {
            Ok(v) if v.is_finite() => TraceShift::Fixed(v),
            _ => {
                return Err(Failure::Usage(format!(
                    "--dA1 must be auto, none or a number, got {s:?}"
                )))
            }
        },
    };
    if !(a.r_min > 0.0 && a.r_min < a.r_max && a.r_max.is_finite()) || a.n_scan < 2 {
        return Err(Failure::Usage(
            "need 0 < --r-min < --r-max and --n-scan >= 2".into(),
        ));
    }
    IntegratorOptions::new(a.rel_tol)?;
    for (name, v) in [("--noise", a.noise), ("--root-tol", a.root_tol)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Usage(format!("{name} must be positive, got {v}")));
        }
    }
    if !(a.d_k.is_finite() && 1.0 + a.d_k > 0.0) {
        return Err(Failure::Usage(format!(
            "--dK must keep K = 1 + dK positive, got {}",
            a.d_k
        )));
    }
    let opts = BautinOptions {
        r_min: a.r_min,
        r_max: a.r_max,
        n_scan: a.n_scan,
        scan: ScanOptions {
            rel_tol: a.rel_tol,
            noise: a.noise,
            root_tol: a.root_tol,
        },
        shift_iterations: a.shift_iterations,
    };
    let rep = bautin_scenario_with(a.b1, a.a3, a.d_k, shift, &opts)?;
    writeln!(
        out,
        "base           b1={} a3={} L2={:e}",
        a.b1, a.a3, rep.base_l2
    )?;
    write_stage(out, "stage K", &rep.k_stage)?;
    if let Some((eps, s)) = &rep.trace_stage {
        write_stage(out, &format!("stage eps={eps:.4e}"), s)?;
    }
    writeln!(out, "result         {}", rep.final_report())?;
    Ok(EXIT_OK)
}
