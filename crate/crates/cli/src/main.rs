mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use frames_core::acceptance::{run_criterion, AcceptanceOptions, CRITERIA};
use frames_core::base_rings::Series;
use frames_core::frames::{validate_frame, validate_kappa_frame, BreuilFrame, Frame, WittElem, WittFrame};
use frames_core::kappa::{kappa_identities, sigma_over_p_criterion, Pipeline};
use frames_core::lifting::deform;
use frames_core::matrix::{self, Matrix};
use frames_core::oracles::table_is_ghost_compatible;
use frames_core::report::{Check, Report};
use frames_core::windows::{dual, nilpotence, random_window, validate_window, validate_window_hom, Window};
use frames_core::witt::WittPolyTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scenario::{ConfigError, Scenario, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "frames", about = "Frames, windows and Breuil windows over truncated power series rings")]
struct Cli {
    /// Scenario JSON; the default is p = 3, r = 1, E = p + x, N = 7, a_max = 3, n = 4.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Writes the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Prints the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Records wall-clock timings; reports are then no longer byte-identical.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Window JSON {rk_l, rk_t, psi}; a seeded random window when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Level a of the base ring S_a.
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 1)]
    rk_l: usize,
    #[arg(long, default_value_t = 1)]
    rk_t: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validates the frame axioms of B_a and the truncated Witt frames.
    CheckFrame,
    /// Checks that kappa is a u-homomorphism and that the diagrams commute.
    CheckKappa,
    /// Evaluates the sigma/p criterion on the scenario's Frobenius lift.
    Criterion,
    /// Generates the universal Witt polynomials.
    GenWittPolys {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// A seeded random window over B_a, or a display over the Witt frame.
    RandomWindow {
        #[command(flatten)]
        w: WindowArgs,
        #[arg(long)]
        display: bool,
    },
    /// Base change of a window along kappa_a.
    Push {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// A window over B_a whose push is isomorphic to the given display.
    Recover {
        /// Display JSON; a seeded random display when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        rk_l: usize,
        #[arg(long, default_value_t = 1)]
        rk_t: usize,
    },
    /// Recovers a window from its push and lifts the display isomorphism back to B_a.
    Lift {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// Deforms a window along a seeded random Hodge lift u: L -> I T.
    Deform {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// The dual window, with w^tt = w and the dual comparison under kappa.
    Dualize {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// Nilpotence of V^# and of lambda modulo the maximal ideal.
    Nilpotence {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// Runs the acceptance suite.
    Selftest,
    /// Summarises a saved report without recomputing anything.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Serialize, Deserialize)]
struct RunReport {
    schema_version: u32,
    command: String,
    scenario: Scenario,
    checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    result: Value,
    timing: Option<Value>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<frames_core::Error> for Failure {
    fn from(e: frames_core::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Out = Result<(Report, Value), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            let (kind, msg, code) = match f {
                Failure::Config(m) => ("config", m, 2),
                Failure::Run(m) => ("runtime", m, 3),
            };
            eprintln!("{}", json!({ "error": { "kind": kind, "message": msg } }));
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    if let Command::Report { input } = &cli.command {
        return summarise(input);
    }
    let mut sc = Scenario::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        sc.seed = s;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let start = Instant::now();
    let (name, (report, result)) = match &cli.command {
        Command::CheckFrame => ("check-frame", check_frame(&sc, &mut rng)?),
        Command::CheckKappa => ("check-kappa", check_kappa(&sc, &mut rng)?),
        Command::Criterion => ("criterion", criterion(&sc)?),
        Command::GenWittPolys { p, n } => ("gen-witt-polys", gen_witt_polys(p.unwrap_or(sc.ring.p), n.unwrap_or(sc.witt_length))?),
        Command::RandomWindow { w, display } => ("random-window", random(&sc, w, *display, &mut rng)?),
        Command::Push { w } => ("push", push(&sc, w, &mut rng)?),
        Command::Recover { input, level, rk_l, rk_t } => {
            ("recover", recover(&sc, input.as_deref(), *level, *rk_l, *rk_t, &mut rng)?)
        }
        Command::Lift { w } => ("lift", lift(&sc, w, &mut rng)?),
        Command::Deform { w } => ("deform", deform_cmd(&sc, w, &mut rng)?),
        Command::Dualize { w } => ("dualize", dualize(&sc, w, &mut rng)?),
        Command::Nilpotence { w } => ("nilpotence", nilpotence_cmd(&sc, w, &mut rng)?),
        Command::Selftest => ("selftest", selftest(&sc, cli.timing)?),
        Command::Report { .. } => unreachable!(),
    };
    let timing = cli.timing.then(|| json!({ "elapsed_secs": start.elapsed().as_secs_f64() }));
    let pass = report.all_pass();
    let out = RunReport { schema_version: SCHEMA_VERSION, command: name.into(), scenario: sc, checks: report.checks, result, timing };
    let text = serde_json::to_string_pretty(&out).map_err(|e| Failure::Run(e.to_string()))?;
    if let Some(path) = &cli.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    }
    if cli.json {
        println!("{text}");
    } else {
        print_summary(&out);
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn print_summary(r: &RunReport) {
    for c in &r.checks {
        let w = c.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default();
        println!("{} {}{w}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    println!("{}: {} checks, {failed} failed", r.command, r.checks.len());
}

fn summarise(path: &Path) -> Result<ExitCode, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let r: RunReport = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    print_summary(&r);
    Ok(if r.checks.iter().all(|c| c.pass) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report payloads serialise")
}

fn prefixed(rep: Report, prefix: &str) -> Report {
    Report {
        checks: rep
            .checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("{prefix}{}", c.name);
                c
            })
            .collect(),
    }
}

fn level_of(sc: &Scenario, a: usize) -> Result<usize, Failure> {
    if a == 0 || a > sc.max_level {
        return Err(Failure::Config(format!("level {a} outside [1, max_level = {}]", sc.max_level)));
    }
    Ok(a)
}

fn pipeline(sc: &Scenario) -> Result<Pipeline, Failure> {
    Pipeline::new(&sc.ring, sc.max_level, sc.witt_length).map_err(|e| Failure::Config(e.to_string()))
}

fn breuil_frame(sc: &Scenario, a: usize) -> Result<BreuilFrame, Failure> {
    BreuilFrame::new(&sc.ring, level_of(sc, a)?).map_err(|e| Failure::Config(e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Checks shape and coefficient ranges before any arithmetic sees the input.
fn check_shape<E>(w: &Window<E>, ok: impl Fn(&E) -> bool) -> Result<(), Failure> {
    let h = w.rk_l + w.rk_t;
    if w.psi.rows != h || w.psi.cols != h || w.psi.data.len() != h * h {
        return Err(Failure::Config(format!("psi must be {h} x {h}")));
    }
    if !w.psi.data.iter().all(ok) {
        return Err(Failure::Config("psi has entries outside the coefficient ring".into()));
    }
    Ok(())
}

fn series_ok(f: &BreuilFrame) -> impl Fn(&Series) -> bool + '_ {
    let s = f.series();
    move |x: &Series| x.0.len() == s.dim() && x.0.iter().enumerate().all(|(i, c)| *c < s.modulus_at(i))
}

fn window_arg(f: &BreuilFrame, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Result<Window<Series>, Failure> {
    let win = match &w.input {
        Some(p) => read_json(p)?,
        None => random_window(f, w.rk_l, w.rk_t, rng),
    };
    check_shape(&win, series_ok(f))?;
    if matrix::inverse(f.series(), &win.psi).is_none() {
        return Err(Failure::Config("psi is not invertible".into()));
    }
    Ok(win)
}

fn frame_report<F: Frame>(name: String, f: &F, rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let r = validate_frame(f, rng, samples);
    let failed: Vec<&String> = r.failures().iter().map(|c| &c.name).collect();
    Check::new(name, "frame axioms", r.all_pass()).with_witness(format!("{} checks, failed {failed:?}", r.checks.len()))
}

fn check_frame(sc: &Scenario, rng: &mut ChaCha8Rng) -> Out {
    let mut rep = Report::default();
    for a in 1..=sc.max_level {
        let f = breuil_frame(sc, a)?;
        rep.push(frame_report(format!("breuil-frame a={a}"), &f, rng, 10));
        let mut c = validate_kappa_frame(&f.level, &f.theta())?;
        c.name = format!("tau-theta a={a}");
        rep.push(c);
        let wf = WittFrame::new(&sc.ring, a, sc.witt_length).map_err(|e| Failure::Config(e.to_string()))?;
        rep.push(frame_report(format!("witt-frame a={a} n={}", sc.witt_length), &wf, rng, 6));
    }
    Ok((rep, Value::Null))
}

fn check_kappa(sc: &Scenario, rng: &mut ChaCha8Rng) -> Out {
    let pl = pipeline(sc)?;
    let mut rep = Report::default();
    for a in 1..=sc.max_level {
        rep.extend(prefixed(kappa_identities(pl.kappa(a), rng, 50, 50), &format!("a={a} ")));
    }
    rep.extend(pl.diagram_checks(rng, 4));
    let units: Vec<Value> = (1..=sc.max_level).map(|a| to_value(&pl.kappa(a).u)).collect();
    Ok((rep, json!({ "u": units })))
}

fn criterion(sc: &Scenario) -> Out {
    let c = sigma_over_p_criterion(&sc.ring)?;
    let verdict = if c.nilpotent { "nilpotent" } else { "not nilpotent" };
    let mut rep = Report::default();
    rep.push(Check::new("criterion-evaluated", "sigma/p on J/J^2 mod p", true).with_witness(verdict));
    Ok((rep, json!({ "matrix": c.matrix, "nilpotent": c.nilpotent, "verdict": verdict })))
}

fn gen_witt_polys(p: u64, n: usize) -> Out {
    if !(1..=6).contains(&n) {
        return Err(Failure::Config(format!("Witt length {n} outside [1, 6]")));
    }
    let t = WittPolyTable::generate(p, n).map_err(|e| Failure::Config(e.to_string()))?;
    let samples = vec![(vec![1, -1, 2, 0, 1, 0], vec![3, 1, -2, 1, 0, 2]), (vec![2, 2, 2, 2, 2, 2], vec![1, 1, 1, 1, 1, 1])];
    let res = table_is_ghost_compatible(&t, &samples);
    let mut rep = Report::default();
    rep.push(Check::new("witt-polys-integral", "the ghost recursion divides exactly", true));
    let c = Check::new("witt-polys-ghost", "polynomials reproduce ghost sum, product and shift on integer samples", res.is_ok());
    rep.push(match res {
        Ok(()) => c,
        Err(w) => c.with_witness(w),
    });
    Ok((rep, to_value(&t)))
}

fn random(sc: &Scenario, w: &WindowArgs, display: bool, rng: &mut ChaCha8Rng) -> Out {
    let a = level_of(sc, w.level)?;
    let mut rep = Report::default();
    if display {
        let wf = WittFrame::new(&sc.ring, a, sc.witt_length).map_err(|e| Failure::Config(e.to_string()))?;
        let d = random_window(&wf, w.rk_l, w.rk_t, rng);
        rep.extend(validate_window(&wf, &d, rng, 3));
        return Ok((rep, to_value(&d)));
    }
    let f = breuil_frame(sc, a)?;
    let win = random_window(&f, w.rk_l, w.rk_t, rng);
    rep.extend(validate_window(&f, &win, rng, 3));
    Ok((rep, to_value(&win)))
}

fn push(sc: &Scenario, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Out {
    let pl = pipeline(sc)?;
    let a = level_of(sc, w.level)?;
    let win = window_arg(&pl.kappa(a).src, w, rng)?;
    let d = pl.push(a, &win);
    let rep = validate_window(&pl.kappa(a).dst, &d, rng, 3);
    Ok((rep, json!({ "window": to_value(&win), "display": to_value(&d) })))
}

fn recover(sc: &Scenario, input: Option<&Path>, level: usize, rk_l: usize, rk_t: usize, rng: &mut ChaCha8Rng) -> Out {
    let pl = pipeline(sc)?;
    let a = level_of(sc, level)?;
    let wf = &pl.kappa(a).dst;
    let d: Window<WittElem> = match input {
        Some(p) => read_json(p)?,
        None => random_window(wf, rk_l, rk_t, rng),
    };
    let q = &wf.quotient;
    check_shape(&d, |x: &WittElem| x.0.len() == sc.witt_length && x.0.iter().all(|c| c.0.len() == q.dim()))?;
    let rec = pl.recover(a, &d)?;
    let rep = prefixed(validate_window_hom(wf, &pl.push(a, &rec.window), &d, &rec.iso, true), "push(recover(d)) ~ d: ");
    Ok((rep, json!({ "window": to_value(&rec.window), "iso": to_value(&rec.iso.g), "iterations": rec.iterations })))
}

fn lift(sc: &Scenario, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Out {
    let pl = pipeline(sc)?;
    let a = level_of(sc, w.level)?;
    let win = window_arg(&pl.kappa(a).src, w, rng)?;
    let rec = pl.recover(a, &pl.push(a, &win))?;
    let mut rep = Report::default();
    let nil = nilpotence(&pl.kappa(a).src, &win)?;
    match pl.lift_hom(a, &rec.window, &win, &rec.iso, sc.max_level as u32) {
        Ok(h) => {
            rep.extend(prefixed(validate_window_hom(&h.frame, &h.source, &h.target, &h.hom, true), "recover(push(w)) ~ w: "));
            Ok((rep, json!({ "recovered": to_value(&rec.window), "g": to_value(&h.hom.g), "precision": h.precision, "nilpotent": nil.nilpotent })))
        }
        Err(e) => {
            rep.push(Check::new("recover(push(w)) ~ w", "the display isomorphism lifts to B_a", false).with_witness(e.to_string()));
            Ok((rep, json!({ "recovered": to_value(&rec.window), "nilpotent": nil.nilpotent })))
        }
    }
}

fn deform_cmd(sc: &Scenario, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Out {
    let a = level_of(sc, w.level)?;
    let f = breuil_frame(sc, a)?;
    let win = window_arg(&f, w, rng)?;
    let u = Matrix::from_fn(win.rk_t, win.rk_l, |_, _| f.random_ideal(rng));
    let (nw, hom) = deform(&f, &win, &u)?;
    let mut rep = validate_window(&f, &nw, rng, 3);
    rep.extend(prefixed(validate_window_hom(&f, &nw, &win, &hom, true), "deformation iso: "));
    Ok((rep, json!({ "window": to_value(&win), "u": to_value(&u), "deformed": to_value(&nw) })))
}

fn dualize(sc: &Scenario, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Out {
    let pl = pipeline(sc)?;
    let a = level_of(sc, w.level)?;
    let f = &pl.kappa(a).src;
    let win = window_arg(f, w, rng)?;
    let d = dual(f, &win)?;
    let mut rep = Report::default();
    rep.push(Check::new("double-dual", "w^tt = w", dual(f, &d)? == win));
    let dc = pl.dual_compat(a, &win);
    let c = Check::new("dual-push", "(kappa_* w)^t is isomorphic to kappa_*(w^t)", dc.is_ok());
    rep.push(match &dc {
        Ok(dc) => c.with_witness(format!("c = u f(c) after {} iteration(s)", dc.iterations)),
        Err(e) => c.with_witness(e.to_string()),
    });
    Ok((rep, json!({ "window": to_value(&win), "dual": to_value(&d) })))
}

fn nilpotence_cmd(sc: &Scenario, w: &WindowArgs, rng: &mut ChaCha8Rng) -> Out {
    let a = level_of(sc, w.level)?;
    let f = breuil_frame(sc, a)?;
    let win = window_arg(&f, w, rng)?;
    let n = nilpotence(&f, &win)?;
    let mut rep = Report::default();
    rep.push(Check::new("criteria-agree", "V^# is nilpotent mod m iff lambda is", n.nilpotent == n.lambda_nilpotent));
    Ok((rep, json!({ "window": to_value(&win), "nilpotence": to_value(&n) })))
}

fn selftest(sc: &Scenario, timing: bool) -> Out {
    let ids: Vec<u8> = if sc.suites.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { sc.suites.clone() };
    let opts = AcceptanceOptions { seed: sc.seed, timing };
    let mut rep = Report::default();
    let mut lines = Vec::new();
    for id in ids {
        let r = run_criterion(id, &opts)?;
        lines.push(json!({ "id": r.id, "title": r.title, "pass": r.pass }));
        rep.extend(prefixed(r.report, &format!("criterion {id}: ")));
    }
    Ok((rep, json!({ "criteria": lines })))
}
