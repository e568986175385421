//! Command-line front end: `gen`, `run`, `verify` and `bench`.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or input error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::apsp::{ApproxApsp, ExactApspConfig, HittingSetApsp};
use crate::error::{Error, Result};
use crate::gadgets::{
    gen_kcycle, gen_oumv_decremental, gen_oumv_fully, gen_oumv_incremental, harness_run, kcycle, GadgetScript,
    KCycleMode, OuMvInstance,
};
use crate::graph::generators::{gnp, random_updates};
use crate::graph::script::{ScriptEvent, UpdateScript};
use crate::graph::{bfs_dist, path_is_valid, Dist, DynamicGraph};
use crate::inverse::DEFAULT_KAPPA;
use crate::path_reporter::{PathReporter, PathReporterConfig};
use crate::provider::{BfsOracle, DistanceProvider};
use crate::rng::{derive, rng_for};
use crate::spanner::{
    audit, AlgSpanner, AlgSpannerConfig, CombSpanner, CombSpannerConfig, DynamicSpanner, SpannerMode,
};
use crate::steiner::{steiner_opt, SteinerState};

pub const RUN_HEADER: &str = "# dynpaths-run v1";
pub const VERIFY_HEADER: &str = "# dynpaths-verify v1";
pub const BENCH_HEADER: &str = "# dynpaths-bench v1";

#[derive(Debug, Parser)]
#[command(name = "dynpaths", version, about = "Dynamic shortest-path structures, workloads and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a workload script.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Replay a script and print the answers as CSV.
    Run(RunArgs),
    /// Replay a script and check every answer against BFS.
    Verify(RunArgs),
    /// Time updates and queries over repeated replays.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        #[arg(long, default_value_t = 1)]
        warmup: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fully,
    Inc,
    Dec,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    OumvFully {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        beta: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    OumvInc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        beta: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    OumvDec {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        beta: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Kcycle {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Fully)]
        mode: ModeArg,
        /// Directed input graph in script format (`N n 1` plus `E u v` lines).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        beta: u64,
        /// Number of colorings; defaults to 3 k^(k-1).
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        updates: usize,
        #[arg(long, default_value_t = 0.5)]
        p_delete: f64,
        /// A distance and a path query after every this many updates.
        #[arg(long, default_value_t = 5)]
        query_every: usize,
        /// Terminals added at the start (for Steiner runs).
        #[arg(long, default_value_t = 0)]
        terminals: usize,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    ExactApsp,
    ApproxApsp,
    PathReporter,
    SpannerComb,
    SpannerAlg,
    Steiner,
    BfsOracle,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub structure: Structure,
    #[arg(long)]
    pub script: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Path-reporter depth D (approx-apsp: 0 picks the automatic depth).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub b: Option<u64>,
    /// Column-sample repetitions of the path reporter.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Hitting-set constant for exact-apsp.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report wall times in harness output (otherwise zeroed).
    #[arg(long)]
    pub timing: bool,
}

impl RunArgs {
    fn eps(&self) -> f64 {
        self.eps.unwrap_or(1.0)
    }

    fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::ParamDomain(format!("eps {e} must be positive")));
            }
        }
        if let Some(kp) = self.kappa {
            if !(kp > 0.0 && kp <= 1.0) {
                return Err(Error::ParamDomain(format!("kappa {kp} outside (0, 1]")));
            }
        }
        if self.k == Some(0) || self.b == Some(0) || self.reps == Some(0) {
            return Err(Error::ParamDomain("k, b and reps must be positive".into()));
        }
        if let Some(c) = self.c {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::ParamDomain(format!("c {c} must be positive")));
            }
        }
        Ok(())
    }

    fn reporter_config(&self, default_depth: usize) -> PathReporterConfig {
        let mut cfg =
            PathReporterConfig::new(self.depth.unwrap_or(default_depth), derive(self.seed, "cli-reporter", 0))
                .with_kappa(self.kappa.unwrap_or(DEFAULT_KAPPA));
        if let Some(r) = self.reps {
            cfg = cfg.with_reps(r);
        }
        cfg
    }
}

/// A structure under test, in one of three shapes.
enum Engine {
    Dist(Box<dyn DistanceProvider>),
    Spanner(Box<dyn DynamicSpanner>),
    Steiner(Box<SteinerState>),
}

fn spanner_mode(script: &UpdateScript) -> SpannerMode {
    let edits = script.events.iter().filter_map(|e| e.edge_event());
    let (mut ins, mut del) = (false, false);
    for e in edits {
        if e.is_insert() {
            ins = true;
        } else {
            del = true;
        }
    }
    match (ins, del) {
        (true, false) => SpannerMode::Incremental,
        (false, true) => SpannerMode::Decremental,
        _ => SpannerMode::Rebuild,
    }
}

fn build(args: &RunArgs, script: &UpdateScript, g: &DynamicGraph) -> Result<Engine> {
    let seed = args.seed;
    Ok(match args.structure {
        Structure::BfsOracle => Engine::Dist(Box::new(BfsOracle::new(g))),
        Structure::PathReporter => Engine::Dist(Box::new(PathReporter::new(g, args.reporter_config(8))?)),
        Structure::ExactApsp => {
            let mut cfg = ExactApspConfig::new(8, seed);
            cfg.reporter = args.reporter_config(8);
            if let Some(c) = args.c {
                cfg.c = c;
            }
            Engine::Dist(Box::new(HittingSetApsp::new(g, cfg)?))
        }
        Structure::ApproxApsp => {
            let eps = args.eps();
            let mut sc = CombSpannerConfig::new(eps / 2.0, derive(seed, "cli-spanner", 0), spanner_mode(script));
            sc.k = args.k;
            let sp = CombSpanner::new(g, sc)?;
            Engine::Dist(Box::new(ApproxApsp::new(sp, eps, args.reporter_config(0))?))
        }
        Structure::SpannerComb => {
            let mut sc = CombSpannerConfig::new(args.eps(), derive(seed, "cli-spanner", 0), spanner_mode(script));
            sc.k = args.k;
            Engine::Spanner(Box::new(CombSpanner::new(g, sc)?))
        }
        Structure::SpannerAlg => {
            let mut ac = AlgSpannerConfig::new(args.eps(), args.kappa.unwrap_or(0.5), derive(seed, "cli-spanner", 1));
            ac.k = args.k;
            ac.b = args.b;
            ac.reps = args.reps;
            Engine::Spanner(Box::new(AlgSpanner::new(g, ac)?))
        }
        Structure::Steiner => Engine::Steiner(Box::new(SteinerState::new(g, &[], args.eps(), seed)?)),
    })
}

/// Provider view of an engine, used for gadget harness runs.
struct SpannerProvider<'a>(&'a mut dyn DynamicSpanner);

impl DistanceProvider for SpannerProvider<'_> {
    fn name(&self) -> &'static str {
        "spanner"
    }

    fn apply(&mut self, ev: crate::graph::EdgeEvent) -> Result<()> {
        self.0.apply(ev)
    }

    fn dist(&mut self, u: usize, v: usize) -> Result<Dist> {
        Ok(bfs_dist(self.0.subgraph(), u)[v])
    }

    fn path(&mut self, u: usize, v: usize) -> Result<Option<Vec<usize>>> {
        Ok(crate::graph::bfs_path(self.0.subgraph(), u, v))
    }
}

fn load_script(path: &PathBuf) -> Result<(UpdateScript, DynamicGraph)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let script = UpdateScript::parse(&text)?;
    script.validate()?;
    let g = script.initial_graph()?;
    Ok((script, g))
}

fn fmt_dist(d: Dist) -> String {
    d.to_string()
}

fn fmt_path(p: &[usize]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

/// One answer from an engine, as it appears in the run CSV.
#[derive(Debug, Clone, PartialEq)]
enum Answer {
    None,
    Size(usize),
    Dist(Dist),
    Path(Option<Vec<usize>>),
    Tree(Option<usize>),
}

impl Answer {
    fn cells(&self) -> (String, String) {
        match self {
            Answer::None => (String::new(), String::new()),
            Answer::Size(s) => (s.to_string(), String::new()),
            Answer::Dist(d) => (fmt_dist(*d), String::new()),
            Answer::Path(Some(p)) => ((p.len() - 1).to_string(), fmt_path(p)),
            Answer::Path(None) => ("inf".into(), String::new()),
            Answer::Tree(Some(w)) => (w.to_string(), String::new()),
            Answer::Tree(None) => ("disconnected".into(), String::new()),
        }
    }
}

fn steiner_answer(r: Result<Option<usize>>) -> Result<Answer> {
    match r {
        Ok(w) => Ok(Answer::Tree(w)),
        Err(Error::Disconnected(..)) => Ok(Answer::Tree(None)),
        Err(e) => Err(e),
    }
}

impl Engine {
    fn step(&mut self, ev: &ScriptEvent) -> Result<Answer> {
        let weight = |t: Option<&crate::steiner::SteinerTree>| t.map(|t| t.weight());
        match (self, ev) {
            (Engine::Dist(p), ScriptEvent::Insert(..) | ScriptEvent::Delete(..)) => {
                p.apply(ev.edge_event().expect("edge"))?;
                Ok(Answer::None)
            }
            (Engine::Spanner(s), ScriptEvent::Insert(..) | ScriptEvent::Delete(..)) => {
                s.apply(ev.edge_event().expect("edge"))?;
                Ok(Answer::Size(s.subgraph().edge_count()))
            }
            (Engine::Steiner(s), ScriptEvent::Insert(..) | ScriptEvent::Delete(..)) => {
                steiner_answer(s.apply(ev.edge_event().expect("edge")).map(weight))
            }
            (Engine::Steiner(s), ScriptEvent::AddTerminal(v)) => steiner_answer(s.add_terminal(*v).map(weight)),
            (Engine::Steiner(s), ScriptEvent::RemoveTerminal(v)) => steiner_answer(s.remove_terminal(*v).map(weight)),
            (Engine::Dist(p), ScriptEvent::DistQuery { u, v, .. }) => Ok(Answer::Dist(p.dist(*u, *v)?)),
            (Engine::Dist(p), ScriptEvent::PathQuery { u, v }) => Ok(Answer::Path(p.path(*u, *v)?)),
            (Engine::Spanner(s), ScriptEvent::DistQuery { u, v, .. }) => {
                Ok(Answer::Dist(bfs_dist(s.subgraph(), *u)[*v]))
            }
            (Engine::Spanner(s), ScriptEvent::PathQuery { u, v }) => {
                Ok(Answer::Path(crate::graph::bfs_path(s.subgraph(), *u, *v)))
            }
            (Engine::Steiner(s), ScriptEvent::DistQuery { u, v, .. }) => Ok(Answer::Dist(bfs_dist(s.graph(), *u)[*v])),
            _ => Ok(Answer::None),
        }
    }

    fn spanner(&self) -> Option<&dyn DynamicSpanner> {
        match self {
            Engine::Spanner(s) => Some(s.as_ref()),
            _ => None,
        }
    }
}

fn tag(ev: &ScriptEvent) -> (&'static str, String, String) {
    match ev {
        ScriptEvent::Insert(u, v) => ("I", u.to_string(), v.to_string()),
        ScriptEvent::Delete(u, v) => ("D", u.to_string(), v.to_string()),
        ScriptEvent::DistQuery { u, v, .. } => ("QD", u.to_string(), v.to_string()),
        ScriptEvent::PathQuery { u, v } => ("QP", u.to_string(), v.to_string()),
        ScriptEvent::AddTerminal(v) => ("T+", v.to_string(), String::new()),
        ScriptEvent::RemoveTerminal(v) => ("T-", v.to_string(), String::new()),
        ScriptEvent::Phase { index, .. } => ("PH", index.to_string(), String::new()),
    }
}

fn structure_name(s: Structure) -> &'static str {
    match s {
        Structure::ExactApsp => "exact-apsp",
        Structure::ApproxApsp => "approx-apsp",
        Structure::PathReporter => "path-reporter",
        Structure::SpannerComb => "spanner-comb",
        Structure::SpannerAlg => "spanner-alg",
        Structure::Steiner => "steiner",
        Structure::BfsOracle => "bfs-oracle",
    }
}

fn is_gadget(script: &UpdateScript) -> bool {
    !script.thresholds().is_empty()
}

fn harness(engine: &mut Engine, script: UpdateScript) -> Result<crate::gadgets::HarnessReport> {
    let gs = GadgetScript::from_script(script)?;
    match engine {
        Engine::Dist(p) => harness_run(&gs, p.as_mut()),
        Engine::Spanner(s) => harness_run(&gs, &mut SpannerProvider(s.as_mut())),
        Engine::Steiner(_) => Err(Error::ParamDomain("gadget scripts need a distance structure".into())),
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<String> {
    args.validate()?;
    let (script, g) = load_script(&args.script)?;
    let mut engine = build(args, &script, &g)?;
    let name = structure_name(args.structure);
    if is_gadget(&script) {
        let report = harness(&mut engine, script)?;
        return Ok(report.to_csv(args.timing));
    }
    let mut s = String::new();
    writeln!(s, "{RUN_HEADER} structure={name}").unwrap();
    writeln!(s, "step,event,u,v,answer,detail").unwrap();
    let (mut audited, mut violations) = (0usize, 0usize);
    for (step, ev) in script.events.iter().enumerate() {
        let ans = engine.step(ev)?;
        let (kind, u, v) = tag(ev);
        let (a, mut detail) = ans.cells();
        if let (Some(sp), Some(_)) = (engine.spanner(), ev.edge_event()) {
            audited += 1;
            detail = match audit(sp.graph(), sp.subgraph(), sp.stretch()) {
                None => "audit-ok".into(),
                Some(f) => {
                    violations += 1;
                    format!("audit-fail {f:?}").replace(',', ";")
                }
            };
        }
        if ans != Answer::None || !detail.is_empty() {
            writeln!(s, "{step},{kind},{u},{v},{a},{detail}").unwrap();
        }
    }
    if let Some(sp) = engine.spanner() {
        let st = sp.stretch();
        writeln!(
            s,
            "# audit updates={audited} violations={violations} stretch_mult={} stretch_add={} final_edges={}",
            st.mult,
            st.additive,
            sp.subgraph().edge_count()
        )
        .unwrap();
    }
    Ok(s)
}

/// Outcome of `verify`: number of checks and the mismatches found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: usize,
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn check(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches.push(context());
        }
    }

    pub fn to_text(&self, structure: &str) -> String {
        let mut s = format!("{VERIFY_HEADER} structure={structure}\n");
        writeln!(s, "checks={} mismatches={}", self.checks, self.mismatches.len()).unwrap();
        if let Some(first) = self.mismatches.first() {
            writeln!(s, "first mismatch: {first}").unwrap();
        }
        writeln!(s, "{}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

/// Acceptable answer range `[lo, hi]` for a distance query, given the BFS truth.
fn admissible(args: &RunArgs, engine: &Engine, truth: Dist) -> (Dist, Dist) {
    match (args.structure, truth) {
        (_, Dist::Inf) => (Dist::Inf, Dist::Inf),
        (Structure::PathReporter, Dist::Finite(d)) => {
            let depth = args.depth.unwrap_or(8) as u32;
            if d <= depth {
                (truth, truth)
            } else {
                (Dist::Inf, Dist::Inf)
            }
        }
        (Structure::ApproxApsp, Dist::Finite(d)) => {
            (truth, Dist::Finite(((1.0 + args.eps()) * d as f64 + 1e-9).floor() as u32))
        }
        (Structure::SpannerComb | Structure::SpannerAlg, Dist::Finite(d)) => {
            let st = engine.spanner().expect("spanner engine").stretch();
            (truth, Dist::Finite((st.bound(d) + 1e-9).floor().min(u32::MAX as f64 - 1.0) as u32))
        }
        _ => (truth, truth),
    }
}

pub fn cmd_verify(args: &RunArgs) -> Result<VerifyReport> {
    args.validate()?;
    let (script, g) = load_script(&args.script)?;
    let mut engine = build(args, &script, &g)?;
    let mut oracle = g.clone();
    let mut terminals = BTreeSet::new();
    let mut report = VerifyReport::default();
    let mut last_dist = Dist::Inf;
    let thresholds: std::collections::BTreeMap<usize, u64> = script.thresholds().into_iter().collect();
    for (step, ev) in script.events.iter().enumerate() {
        if let Some(e) = ev.edge_event() {
            oracle.apply(e)?;
        }
        match ev {
            ScriptEvent::AddTerminal(v) => {
                terminals.insert(*v);
            }
            ScriptEvent::RemoveTerminal(v) => {
                terminals.remove(v);
            }
            _ => {}
        }
        let ans = engine.step(ev)?;
        match (ev, &ans) {
            (ScriptEvent::DistQuery { u, v, expected }, Answer::Dist(d)) => {
                let truth = bfs_dist(&oracle, *u)[*v];
                if let Some(x) = expected {
                    report.check(*x == truth, || {
                        format!("step {step}: script expects {x} for ({u},{v}) but BFS gives {truth}")
                    });
                }
                let (lo, hi) = admissible(args, &engine, truth);
                report.check(lo <= *d && *d <= hi, || {
                    format!("step {step}: QD {u} {v} answered {d}, BFS {truth}, allowed [{lo}, {hi}]")
                });
                last_dist = *d;
            }
            (ScriptEvent::PathQuery { u, v }, Answer::Path(p)) => {
                let truth = bfs_dist(&oracle, *u)[*v];
                let (lo, hi) = admissible(args, &engine, truth);
                match p {
                    Some(p) => {
                        let len = Dist::Finite(p.len() as u32 - 1);
                        report.check(path_is_valid(&oracle, p, *u, *v) && lo <= len && len <= hi, || {
                            format!(
                                "step {step}: QP {u} {v} returned {} (BFS {truth}, allowed [{lo}, {hi}])",
                                fmt_path(p)
                            )
                        });
                    }
                    None => report
                        .check(hi == Dist::Inf, || format!("step {step}: QP {u} {v} returned no path, BFS {truth}")),
                }
            }
            (ScriptEvent::Phase { index, expected_bit: Some(bit) }, _) => {
                let th = thresholds.get(index).copied().unwrap_or(0);
                let observed = matches!(last_dist, Dist::Finite(d) if (d as u64) < th);
                report.check(observed == *bit, || {
                    format!("step {step}: phase {index} observed {observed} expected {bit}")
                });
            }
            (_, Answer::Size(_)) => {
                let sp = engine.spanner().expect("spanner engine");
                let fail = audit(&oracle, sp.subgraph(), sp.stretch());
                report.check(fail.is_none(), || format!("step {step}: spanner audit {fail:?}"));
            }
            (_, Answer::Tree(w)) => {
                let Engine::Steiner(s) = &engine else { unreachable!() };
                let opt =
                    if oracle.n() <= 16 && terminals.len() <= 5 { steiner_opt(&oracle, &terminals) } else { None };
                match (s.tree(), w) {
                    (Some(t), Some(_)) => {
                        report.check(t.is_valid_for(&oracle, &terminals), || {
                            format!("step {step}: Steiner tree invalid")
                        });
                        if let Some(opt) = opt {
                            let bound = (2.0 + args.eps()) * opt as f64;
                            report.check(t.weight() >= opt && t.weight() as f64 <= bound + 1e-9, || {
                                format!("step {step}: Steiner weight {} vs OPT {opt}", t.weight())
                            });
                        }
                    }
                    _ => {
                        let any = terminals.iter().next().copied();
                        let connected = any.is_none_or(|a| {
                            let d = bfs_dist(&oracle, a);
                            terminals.iter().all(|&t| d[t].is_finite())
                        });
                        report.check(!connected, || format!("step {step}: Steiner reported disconnected terminals"));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(report)
}

fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

pub fn cmd_bench(args: &RunArgs, repeat: usize, warmup: usize) -> Result<String> {
    args.validate()?;
    if repeat == 0 {
        return Err(Error::ParamDomain("repeat must be positive".into()));
    }
    let (script, g) = load_script(&args.script)?;
    let mut init = Vec::new();
    let mut updates = Vec::new();
    let mut queries = Vec::new();
    let mut totals = Vec::new();
    for rep in 0..warmup + repeat {
        let all = Instant::now();
        let t = Instant::now();
        let mut engine = build(args, &script, &g)?;
        let build_us = t.elapsed().as_micros() as u64;
        let (mut up, mut qu) = (Vec::new(), Vec::new());
        for ev in &script.events {
            let t = Instant::now();
            engine.step(ev)?;
            let us = t.elapsed().as_micros() as u64;
            match ev {
                ScriptEvent::DistQuery { .. } | ScriptEvent::PathQuery { .. } => qu.push(us),
                ScriptEvent::Phase { .. } => {}
                _ => up.push(us),
            }
        }
        if rep >= warmup {
            init.push(build_us);
            updates.extend(up);
            queries.extend(qu);
            totals.push(all.elapsed().as_micros() as u64);
        }
    }
    let mut s =
        format!("{BENCH_HEADER} structure={} repeat={repeat} warmup={warmup}\n", structure_name(args.structure));
    writeln!(s, "kind,count,median_us,p90_us,p99_us,max_us").unwrap();
    for (kind, mut v) in [("init", init), ("update", updates), ("query", queries), ("total", totals)] {
        v.sort_unstable();
        let max = v.last().copied().unwrap_or(0);
        writeln!(
            s,
            "{kind},{},{},{},{},{max}",
            v.len(),
            percentile(&v, 0.5),
            percentile(&v, 0.9),
            percentile(&v, 0.99)
        )
        .unwrap();
    }
    Ok(s)
}

fn read_graph(path: &PathBuf) -> Result<DynamicGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    UpdateScript::parse(&text)?.initial_graph()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomScriptSpec {
    pub n: usize,
    pub p: f64,
    pub updates: usize,
    pub p_delete: f64,
    pub query_every: usize,
    pub terminals: usize,
    pub directed: bool,
    pub seed: u64,
}

/// Seeded random script: G(n, p) start, legal updates, periodic queries with
/// BFS-filled expected distances.
pub fn gen_random(spec: &RandomScriptSpec) -> Result<UpdateScript> {
    let RandomScriptSpec { n, p, updates, p_delete, query_every, terminals, directed, seed } = *spec;
    if n == 0 || !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&p_delete) || terminals > n {
        return Err(Error::ParamDomain("need n > 0, p and p_delete in [0, 1], terminals <= n".into()));
    }
    let g = gnp(n, p, directed, derive(seed, "gen-graph", 0));
    let mut script = UpdateScript::from_graph(&g);
    script.annotations.push(format!("gen random n={n} p={p} updates={updates} seed={seed}"));
    let mut rng = rng_for(seed, "gen-queries", 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &t in order.iter().take(terminals) {
        script.push(ScriptEvent::AddTerminal(t));
    }
    let mut cur = g.clone();
    for (i, ev) in random_updates(&g, updates, p_delete, derive(seed, "gen-updates", 0)).into_iter().enumerate() {
        cur.apply(ev)?;
        script.push(ev);
        if query_every > 0 && (i + 1) % query_every == 0 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            script.push(ScriptEvent::DistQuery { u, v, expected: Some(bfs_dist(&cur, u)[v]) });
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            script.push(ScriptEvent::PathQuery { u, v });
        }
    }
    Ok(script)
}

pub fn cmd_gen(kind: &GenKind) -> Result<UpdateScript> {
    let oumv = |n: usize, density: f64, seed: u64| -> Result<OuMvInstance> {
        if n == 0 || !(0.0..=1.0).contains(&density) {
            return Err(Error::ParamDomain("need n > 0 and density in [0, 1]".into()));
        }
        Ok(OuMvInstance::random(n, density, seed))
    };
    let gs = match *kind {
        GenKind::OumvFully { n, alpha, beta, density, seed } => gen_oumv_fully(&oumv(n, density, seed)?, alpha, beta)?,
        GenKind::OumvInc { n, beta, density, seed } => gen_oumv_incremental(&oumv(n, density, seed)?, beta)?,
        GenKind::OumvDec { n, beta, density, seed } => gen_oumv_decremental(&oumv(n, density, seed)?, beta)?,
        GenKind::Kcycle { k, mode, ref graph, alpha, beta, reps, seed } => {
            let g = read_graph(graph)?;
            let mode = match mode {
                ModeArg::Fully => KCycleMode::Fully { alpha, beta },
                ModeArg::Inc => KCycleMode::Incremental { beta },
                ModeArg::Dec => KCycleMode::Decremental { beta },
            };
            if k < 3 {
                return Err(Error::ParamDomain(format!("k = {k} must be at least 3")));
            }
            gen_kcycle(&g, k, mode, reps.unwrap_or_else(|| kcycle::default_reps(k)), seed)?
        }
        GenKind::Random { n, p, updates, p_delete, query_every, terminals, directed, seed } => {
            return gen_random(&RandomScriptSpec { n, p, updates, p_delete, query_every, terminals, directed, seed });
        }
    };
    Ok(gs.script)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gen { kind, out } => cmd_gen(kind).and_then(|s| emit(out, &s.to_text(), stdout)).map(|_| 0),
        Command::Run(args) => cmd_run(args).and_then(|s| emit(&args.out, &s, stdout)).map(|_| 0),
        Command::Verify(args) => cmd_verify(args).and_then(|r| {
            emit(&args.out, &r.to_text(structure_name(args.structure)), stdout)?;
            Ok(if r.passed() { 0 } else { 1 })
        }),
        Command::Bench { run, repeat, warmup } => {
            cmd_bench(run, *repeat, *warmup).and_then(|s| emit(&run.out, &s, stdout)).map(|_| 0)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
