//! Command implementations behind the `ftcp` binary.
//!
//! Each command reads a scenario file, runs it, and produces a TOML summary
//! (always returned, also written to `summary.toml` when an output
//! directory is known) plus CSV series. Floats are written with 17
//! significant digits so that reruns diff byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rayon::prelude::*;

use crate::agents::{envelope, ConsensusInstance};
use crate::engagement::{run_engagement, EngagementResult, ModelKind};
use crate::engine::{consensus_time_upper_bound, run_consensus, ConsensusOutcome};
use crate::error::{usage, Error, Result};
use crate::oracle::{compare_with_engine, random_instance, Comparison};
use crate::scenario::{override_dt, Mode, ScenarioFile};
use crate::synth::{negative_gain_bound, partition, synthesize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Consensus,
    Synth,
    Engage,
    Sweep,
    OracleCheck,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Consensus => Mode::Consensus,
            Command::Synth => Mode::Synth,
            Command::Engage => Mode::Engage,
            Command::Sweep => Mode::Robustness,
            Command::OracleCheck => Mode::Oracle,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario: PathBuf,
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub decimate: Option<usize>,
    pub parallel: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// No consensus, an aborted missile, or an oracle disagreement.
    Failed,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: String,
    pub status: Status,
    pub files: Vec<PathBuf>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Failed => 3,
        }
    }
}

/// Exit code for a command that failed before producing a report.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Diverged(_) => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

pub fn run(command: Command, opts: &RunOptions) -> Result<Report> {
    let file = ScenarioFile::load(&opts.scenario)?;
    if file.mode != command.mode() {
        return Err(usage(format!(
            "scenario mode is \"{}\" but the command expects \"{}\"",
            file.mode.name(),
            command.mode().name()
        )));
    }
    if opts.dt.is_some_and(|dt| !(dt > 0.0)) {
        return Err(usage("--dt must be positive"));
    }
    if opts.decimate == Some(0) || opts.parallel == Some(0) {
        return Err(usage("--decimate and --parallel must be at least 1"));
    }
    let out = opts.out.clone().or_else(|| file.output.dir.clone());
    let mut sink = Sink::new(out)?;
    let (summary, status) = match command {
        Command::Consensus => cmd_consensus(&file, &mut sink)?,
        Command::Synth => cmd_synth(&file, &mut sink)?,
        Command::Engage => cmd_engage(&file, opts, &mut sink)?,
        Command::Sweep => in_pool(opts.parallel, || cmd_sweep_negative_gain(&file, &mut sink))?,
        Command::OracleCheck => {
            in_pool(opts.parallel, || cmd_oracle_check(&file, opts, &mut sink))?
        }
    };
    sink.write("summary.toml", &summary)?;
    Ok(Report {
        summary,
        status,
        files: sink.files,
    })
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Where output files go; nothing is written without a directory.
struct Sink {
    dir: Option<PathBuf>,
    files: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)
                .map_err(|e| usage(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(Self {
            dir,
            files: Vec::new(),
        })
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        if let Some(p) = self.path(name) {
            fs::write(&p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
            self.files.push(p);
        }
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let Some(p) = self.path(name) else {
            return Ok(());
        };
        write_csv(&p, header, rows)?;
        self.files.push(p);
        Ok(())
    }
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let io = |e: csv::Error| usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// 17 significant digits, valid as a TOML float and as CSV.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Minimal TOML emitter with fixed float formatting.
#[derive(Default)]
pub struct Summary {
    text: String,
}

impl Summary {
    pub fn table(&mut self, name: &str) -> &mut Self {
        let _ = write!(self.text, "\n[{name}]\n");
        self
    }

    pub fn array_table(&mut self, name: &str) -> &mut Self {
        let _ = write!(self.text, "\n[[{name}]]\n");
        self
    }

    pub fn float(&mut self, key: &str, v: f64) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {}", fmt_f64(v));
        self
    }

    /// Omitted entirely when `None`; TOML has no null.
    pub fn opt_float(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        if let Some(v) = v {
            self.float(key, v);
        }
        self
    }

    pub fn floats(&mut self, key: &str, vs: &[f64]) -> &mut Self {
        let items: Vec<String> = vs.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(self.text, "{key} = [{}]", items.join(", "));
        self
    }

    pub fn int(&mut self, key: &str, v: i64) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {v}");
        self
    }

    pub fn ints(&mut self, key: &str, vs: &[usize]) -> &mut Self {
        let items: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(self.text, "{key} = [{}]", items.join(", "));
        self
    }

    pub fn bool(&mut self, key: &str, v: bool) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {v}");
        self
    }

    pub fn str(&mut self, key: &str, v: &str) -> &mut Self {
        let _ = writeln!(self.text, "{key} = {}", toml::Value::String(v.to_owned()));
        self
    }

    pub fn finish(self) -> String {
        self.text.trim_start().to_owned()
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn outcome_summary(s: &mut Summary, out: &ConsensusOutcome) {
    s.bool("converged", true)
        .float("t_f", out.t_f)
        .float("x_f", out.x_f)
        .opt_float("t_c_bound", out.upper_bound_t_c)
        .int("iterations", out.iterations as i64)
        .int("merge_iterations", out.merge_iterations as i64)
        .int("sign_reversals", out.sign_reversals() as i64);
    for e in &out.events {
        s.array_table("result.events")
            .float("time", e.time)
            .float("value", e.value)
            .int("follower", e.follower as i64 + 1)
            .int("leader", e.leader as i64 + 1)
            .str("kind", &format!("{:?}", e.kind).to_lowercase());
    }
}

fn knot_csvs(sink: &mut Sink, instance: &ConsensusInstance, out: &ConsensusOutcome) -> Result<()> {
    let n = instance.n();
    for i in 0..n {
        let rows = out.knots.iter().map(|k| {
            vec![
                fmt_f64(k.time),
                fmt_f64(k.states[i]),
                fmt_f64(k.states[i] - k.states[(i + 1) % n]),
            ]
        });
        sink.csv(&format!("agent_{}.csv", i + 1), &["t", "x", "sigma"], rows)?;
    }
    Ok(())
}

fn cmd_consensus(file: &ScenarioFile, sink: &mut Sink) -> Result<(String, Status)> {
    let instance = file.consensus_instance()?;
    let mut s = Summary::default();
    s.table("instance")
        .int("n", instance.n() as i64)
        .floats("states", instance.states0())
        .floats("gains", instance.gains())
        .float("spread", envelope(instance.states0())?.spread);
    s.table("result");
    match run_consensus(&instance) {
        Ok(out) => {
            outcome_summary(&mut s, &out);
            knot_csvs(sink, &instance, &out)?;
            Ok((s.finish(), Status::Ok))
        }
        Err(Error::Diverged(d)) => {
            s.bool("converged", false)
                .str("reason", &format!("{:?}", d.reason))
                .float("time", d.time)
                .float("initial_spread", d.initial_spread)
                .float("final_spread", d.final_spread)
                .float("spread_rate", d.spread_rate)
                .int("iterations", d.iterations as i64);
            Ok((s.finish(), Status::Failed))
        }
        Err(e) => Err(e),
    }
}

fn cmd_synth(file: &ScenarioFile, sink: &mut Sink) -> Result<(String, Status)> {
    let req = file.synthesis_request()?;
    let gains = synthesize(&req)?;
    let part = partition(&req.states0)?;
    let instance = ConsensusInstance::new(req.states0.clone(), gains.clone())?;
    let out = run_consensus(&instance)?;
    let spread = envelope(&req.states0)?.spread;
    let t_err = (out.t_f - req.t_f).abs() / req.t_f;
    let x_err = (out.x_f - req.x_f).abs() / spread;
    let ok = t_err <= 1e-9 && x_err <= 1e-9 && out.sign_reversals() == 0;

    let mut s = Summary::default();
    s.table("request")
        .floats("states", &req.states0)
        .float("x_f", req.x_f)
        .float("t_f", req.t_f)
        .float("margin", req.margin);
    s.table("partition")
        .int("i_max", part.i_max as i64 + 1)
        .int("j_min", part.j_min as i64 + 1)
        .ints("v_max", &one_based(&part.v_max))
        .ints("v_min", &one_based(&part.v_min));
    s.table("gains").floats("w", &gains);
    s.table("round_trip")
        .float("t_f", out.t_f)
        .float("x_f", out.x_f)
        .float("t_f_rel_error", t_err)
        .float("x_f_rel_error", x_err)
        .int("sign_reversals", out.sign_reversals() as i64)
        .bool("passed", ok);
    sink.csv(
        "gains.csv",
        &["agent", "state0", "gain"],
        gains
            .iter()
            .zip(&req.states0)
            .enumerate()
            .map(|(i, (w, x))| vec![(i + 1).to_string(), fmt_f64(*x), fmt_f64(*w)]),
    )?;
    Ok((s.finish(), if ok { Status::Ok } else { Status::Failed }))
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::ConstantSpeed => "constant_speed",
        ModelKind::Realistic => "realistic",
    }
}

fn engagement_csvs(sink: &mut Sink, res: &EngagementResult) -> Result<()> {
    for (i, h) in res.histories.iter().enumerate() {
        let rows = h.iter().map(|x| {
            [x.t, x.r, x.theta, x.theta_dot, x.gamma, x.v, x.a_m, x.sigma]
                .iter()
                .map(|&v| fmt_f64(v))
                .collect()
        });
        sink.csv(
            &format!("missile_{}.csv", i + 1),
            &["t", "r", "theta", "theta_dot", "gamma", "v", "a_M", "sigma"],
            rows,
        )?;
    }
    Ok(())
}

fn cmd_engage(file: &ScenarioFile, opts: &RunOptions, sink: &mut Sink) -> Result<(String, Status)> {
    let mut scenario = file.engagement()?;
    let explicit_layer = file
        .engage
        .as_ref()
        .is_some_and(|b| b.boundary_time.is_some());
    if let Some(dt) = opts.dt {
        override_dt(&mut scenario, dt, explicit_layer);
    }
    if let Some(d) = opts.decimate {
        scenario.record_every = d;
    }
    let res = run_engagement(&scenario)?;

    let mut s = Summary::default();
    s.table("run")
        .str("model", model_name(scenario.model.kind))
        .float("dt", res.dt)
        .int("steps", res.steps as i64)
        .float("duration", res.steps as f64 * res.dt)
        .int("decimate", scenario.record_every as i64)
        .floats("gains", &scenario.guidance.gains)
        .bool("all_intercepted", res.all_intercepted())
        .bool("aborted", res.any_aborted());
    s.table("consensus")
        .bool("reached", res.consensus_time.is_some())
        .opt_float("time", res.consensus_time)
        .opt_float("value", res.consensus_value);
    if let Some(pc) = res.post_consensus {
        s.float("max_abs_rate_after", pc.max_abs_rate)
            .float("max_rate_spread_after", pc.max_rate_spread)
            .float("max_abs_accel_after", pc.max_abs_accel)
            .float("max_heading_error_after", pc.max_heading_error);
    }
    s.table("separation")
        .float("min_pairwise", res.min_pairwise_separation);
    for (i, m) in res.missiles.iter().enumerate() {
        s.array_table("missiles")
            .int("index", i as i64 + 1)
            .bool("intercepted", m.intercepted)
            .float("miss_distance", m.miss_distance)
            .opt_float("intercept_time", m.intercept_time)
            .float("peak_accel", m.peak_accel)
            .float("impact_angle", m.final_state.gamma);
        if let Some(reason) = &m.aborted {
            s.str("aborted", reason);
        }
    }
    for e in &res.margins {
        s.array_table("collision_margins")
            .int("follower", e.follower as i64 + 1)
            .int("leader", e.leader as i64 + 1)
            .float("max_abs_integral", e.max_abs_integral)
            .float("bound", e.bound)
            .float("min_gap", e.min_gap)
            .bool("safe", e.safe);
    }
    engagement_csvs(sink, &res)?;
    let status = if res.any_aborted() {
        Status::Failed
    } else {
        Status::Ok
    };
    Ok((s.finish(), status))
}

fn cmd_sweep_negative_gain(file: &ScenarioFile, sink: &mut Sink) -> Result<(String, Status)> {
    let instance = file.consensus_instance()?;
    let k = file.sweep_agent()?;
    let sweep = file
        .sweep
        .as_ref()
        .ok_or_else(|| usage("missing [sweep] block"))?;
    if sweep.steps < 2 || !(sweep.from < sweep.to) {
        return Err(usage("[sweep] needs from < to and steps >= 2"));
    }
    let bound = negative_gain_bound(instance.gains(), k)?;
    let step = (sweep.to - sweep.from) / (sweep.steps - 1) as f64;
    let points: Vec<f64> = (0..sweep.steps)
        .map(|j| sweep.from + step * j as f64)
        .collect();

    let results: Vec<(f64, Result<ConsensusOutcome>)> = points
        .par_iter()
        .map(|&w| {
            let mut gains = instance.gains().to_vec();
            gains[k] = w;
            (
                w,
                instance.with_gains(gains).and_then(|i| run_consensus(&i)),
            )
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut highest_diverged: Option<f64> = None;
    let mut lowest_converged: Option<f64> = None;
    for (w, r) in &results {
        let (converged, t_f, x_f) = match r {
            Ok(o) => (true, o.t_f, o.x_f),
            Err(Error::Diverged(_)) => (false, f64::NAN, f64::NAN),
            Err(e) => return Err(e.clone()),
        };
        if converged {
            lowest_converged = Some(lowest_converged.map_or(*w, |c: f64| c.min(*w)));
        } else {
            highest_diverged = Some(highest_diverged.map_or(*w, |d: f64| d.max(*w)));
        }
        rows.push(vec![
            fmt_f64(*w),
            converged.to_string(),
            fmt_f64(t_f),
            fmt_f64(x_f),
        ]);
    }
    sink.csv("sweep.csv", &["w_k", "converged", "t_f", "x_f"], rows)?;

    let mut s = Summary::default();
    s.table("sweep")
        .int("agent", k as i64 + 1)
        .float("from", sweep.from)
        .float("to", sweep.to)
        .int("steps", sweep.steps as i64)
        .float("negative_bound", bound)
        .int(
            "converged",
            results.iter().filter(|r| r.1.is_ok()).count() as i64,
        )
        .opt_float("highest_diverged", highest_diverged)
        .opt_float("lowest_converged", lowest_converged);
    let brackets = match (highest_diverged, lowest_converged) {
        (Some(d), Some(c)) => d <= bound && bound < c + 1e-12 * bound.abs().max(1.0),
        _ => false,
    };
    s.bool("bound_bracketed", brackets);
    Ok((s.finish(), Status::Ok))
}

fn comparison_row(label: String, c: &Comparison) -> Vec<String> {
    let opt = |v: Option<f64>| fmt_f64(v.unwrap_or(f64::NAN));
    vec![
        label,
        fmt_f64(c.engine_t_f),
        opt(c.oracle_t_f),
        fmt_f64(c.engine_x_f),
        opt(c.oracle_x_f),
        fmt_f64(c.dt),
        c.agree.to_string(),
    ]
}

fn cmd_oracle_check(
    file: &ScenarioFile,
    opts: &RunOptions,
    sink: &mut Sink,
) -> Result<(String, Status)> {
    let instance = file.consensus_instance()?;
    if !instance.all_gains_positive() {
        return Err(usage("oracle-check needs every gain positive"));
    }
    let mut cfg = file.oracle_config(&instance)?;
    if let Some(dt) = opts.dt {
        cfg.dt = dt;
    }
    let main = compare_with_engine(&instance, &cfg)?;

    let block = file.oracle.clone().unwrap_or_default();
    let n_min = block.n_min.unwrap_or(3);
    let n_max = block.n_max.unwrap_or(8);
    if n_min < 2 || n_min > n_max {
        return Err(usage("[oracle] needs 2 <= n_min <= n_max"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(block.seed);
    let mut batch = Vec::with_capacity(block.random_instances);
    for _ in 0..block.random_instances {
        let n = rand::Rng::gen_range(&mut rng, n_min..=n_max);
        batch.push(random_instance(&mut rng, n)?);
    }
    let checks: Vec<Comparison> = batch
        .par_iter()
        .map(|inst| compare_with_engine(inst, &crate::oracle::OracleConfig::for_instance(inst)?))
        .collect::<Result<_>>()?;

    let mut rows = vec![comparison_row("scenario".into(), &main)];
    rows.extend(
        checks
            .iter()
            .enumerate()
            .map(|(i, c)| comparison_row(format!("random_{}", i + 1), c)),
    );
    sink.csv(
        "oracle.csv",
        &[
            "instance",
            "engine_t_f",
            "oracle_t_f",
            "engine_x_f",
            "oracle_x_f",
            "dt",
            "agree",
        ],
        rows,
    )?;

    let agreed = checks.iter().filter(|c| c.agree).count();
    let mut s = Summary::default();
    s.table("scenario")
        .float("engine_t_f", main.engine_t_f)
        .float("engine_x_f", main.engine_x_f)
        .opt_float("oracle_t_f", main.oracle_t_f)
        .opt_float("oracle_x_f", main.oracle_x_f)
        .float("dt", main.dt)
        .float("t_tolerance", main.t_tolerance)
        .float("x_tolerance", main.x_tolerance)
        .float("t_c_bound", consensus_time_upper_bound(&instance)?)
        .bool("agree", main.agree);
    s.table("random")
        .int("instances", checks.len() as i64)
        .int("agreed", agreed as i64)
        .int("seed", block.seed as i64);
    let ok = main.agree && agreed == checks.len();
    Ok((s.finish(), if ok { Status::Ok } else { Status::Failed }))
}
