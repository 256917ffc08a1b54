//! Benchmark runner: load a suite of tasks, solve original and compiled
//! variants, and record coverage, cost-quality, and time scores to a CSV.
//!
//! The CSV is append-safe and crash-resumable: rows already present are
//! kept verbatim and their tasks skipped, so an interrupted run followed
//! by a resume produces the same file as an uninterrupted run. Timing can
//! be driven by a fixed fake clock to make that property testable exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::time::Instant;

use crate::compile::{compile, CompileOptions};
use crate::external::{external_solve, ExternalPlannerConfig, HarnessError};
use crate::jsonio;
use crate::metrics::{agl_score, sat_score};
use crate::pddl::{ground, parse_pddl, GroundingOptions};
use crate::search::{
    solve_greedy, solve_optimal, SearchLimits, SearchOutcome, SearchResult,
};
use crate::strips::{validate_plan, Task};

pub const CSV_SCHEMA: &str = "bench-csv/1";
pub const BEST_KNOWN_FORMAT: &str = "best-known/1";

const CSV_HEADER: [&str; 15] = [
    "schema", "task_id", "domain", "variant", "outcome", "detail", "cost", "parse_s", "ground_s",
    "compile_s", "search_s", "total_s", "expansions", "sat_score", "agl_score",
];

#[derive(Clone, Debug)]
pub enum Engine {
    Optimal,
    Greedy,
    External(ExternalPlannerConfig),
}

/// Clock used for phase timing. `Fixed` reports the given duration for
/// every phase, which makes benchmark output byte-deterministic.
#[derive(Clone, Copy, Debug)]
pub enum BenchClock {
    Wall,
    Fixed(f64),
}

impl BenchClock {
    fn time<T>(self, f: impl FnOnce() -> T) -> (T, f64) {
        match self {
            BenchClock::Wall => {
                let start = Instant::now();
                let out = f();
                (out, start.elapsed().as_secs_f64())
            }
            BenchClock::Fixed(s) => (f(), s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub engine: Engine,
    /// Also compile each task and solve the compiled variant.
    pub both_variants: bool,
    pub limits: SearchLimits,
    pub agl_horizon_s: f64,
    /// Worker threads; rows are still committed in task order.
    pub jobs: usize,
    pub clock: BenchClock,
    pub compile_options: CompileOptions,
    pub grounding: GroundingOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            engine: Engine::Optimal,
            both_variants: true,
            limits: SearchLimits::default(),
            agl_horizon_s: crate::metrics::DEFAULT_AGL_HORIZON_S,
            jobs: 1,
            clock: BenchClock::Wall,
            compile_options: CompileOptions::default(),
            grounding: GroundingOptions::default(),
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub task_id: String,
    pub domain: String,
    pub variant: String,
    pub outcome: String,
    pub detail: String,
    pub cost: Option<u64>,
    pub parse_s: f64,
    pub ground_s: f64,
    pub compile_s: f64,
    pub search_s: f64,
    pub total_s: f64,
    pub expansions: u64,
    pub sat_score: f64,
    pub agl_score: f64,
}

impl BenchRecord {
    fn to_row(&self) -> Vec<String> {
        vec![
            CSV_SCHEMA.to_string(),
            self.task_id.clone(),
            self.domain.clone(),
            self.variant.clone(),
            self.outcome.clone(),
            self.detail.clone(),
            self.cost.map(|c| c.to_string()).unwrap_or_default(),
            format!("{:.6}", self.parse_s),
            format!("{:.6}", self.ground_s),
            format!("{:.6}", self.compile_s),
            format!("{:.6}", self.search_s),
            format!("{:.6}", self.total_s),
            self.expansions.to_string(),
            format!("{:.6}", self.sat_score),
            format!("{:.6}", self.agl_score),
        ]
    }

    fn from_row(row: &csv::StringRecord) -> Result<BenchRecord, HarnessError> {
        let field = |i: usize| -> &str { row.get(i).unwrap_or("") };
        if field(0) != CSV_SCHEMA {
            return Err(HarnessError::Csv(format!("unknown csv schema `{}`", field(0))));
        }
        let num = |i: usize| -> Result<f64, HarnessError> {
            field(i).parse().map_err(|_| HarnessError::Csv(format!("bad number `{}`", field(i))))
        };
        Ok(BenchRecord {
            task_id: field(1).to_string(),
            domain: field(2).to_string(),
            variant: field(3).to_string(),
            outcome: field(4).to_string(),
            detail: field(5).to_string(),
            cost: if field(6).is_empty() { None } else { field(6).parse().ok() },
            parse_s: num(7)?,
            ground_s: num(8)?,
            compile_s: num(9)?,
            search_s: num(10)?,
            total_s: num(11)?,
            expansions: field(12).parse().unwrap_or(0),
            sat_score: num(13)?,
            agl_score: num(14)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Suite discovery
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum TaskSource {
    Json(PathBuf),
    Pddl { domain: PathBuf, problem: PathBuf },
}

#[derive(Clone, Debug)]
struct SuiteTask {
    id: String,
    domain_name: String,
    source: TaskSource,
}

fn is_domain_file(path: &Path) -> bool {
    path.file_stem()
        .and_then(|s| s.to_str())
        .is_some_and(|s| s == "domain" || s.ends_with("-domain"))
}

fn domain_file_for(problem: &Path) -> Option<PathBuf> {
    let dir = problem.parent()?;
    let stem = problem.file_stem()?.to_str()?;
    let mut candidates = vec![format!("{stem}-domain.pddl")];
    if let Some(prefix) = stem.strip_suffix("-problem") {
        candidates.push(format!("{prefix}-domain.pddl"));
    }
    candidates.push("domain.pddl".to_string());
    candidates.into_iter().map(|name| dir.join(name)).find(|path| path.exists())
}

/// Finds `.json` task documents and `.pddl` problems (with a sibling
/// `<stem>-domain.pddl` or shared `domain.pddl`) under the suite root.
fn discover(suite: &Path) -> Result<Vec<SuiteTask>, HarnessError> {
    let mut out = Vec::new();
    let mut stack = vec![suite.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let mut entries: Vec<PathBuf> =
            std::fs::read_dir(&dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(suite).unwrap_or(&path);
            let id = rel.with_extension("").to_string_lossy().replace('\\', "/");
            let domain_name = rel
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(|p| p.to_string_lossy().replace('\\', "/"))
                .unwrap_or_else(|| ".".to_string());
            match path.extension().and_then(|e| e.to_str()) {
                Some("json") => {
                    if !id.ends_with(".best") {
                        out.push(SuiteTask { id, domain_name, source: TaskSource::Json(path) });
                    }
                }
                Some("pddl") if !is_domain_file(&path) => {
                    if let Some(domain) = domain_file_for(&path) {
                        out.push(SuiteTask {
                            id,
                            domain_name,
                            source: TaskSource::Pddl { domain, problem: path },
                        });
                    }
                }
                _ => {}
            }
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

fn run_engine(engine: &Engine, task: &Task, limits: &SearchLimits) -> Result<SearchResult, HarnessError> {
    let result = match engine {
        Engine::Optimal => solve_optimal(task, limits),
        Engine::Greedy => solve_greedy(task, limits),
        Engine::External(config) => external_solve(config, task, limits)?,
    };
    // Never trust a solved claim, internal or external.
    if let SearchOutcome::Solved(plan) = &result.outcome {
        let check = validate_plan(task, &plan.steps);
        if !check.is_valid() {
            return Err(HarnessError::PlanValidation(check.describe()));
        }
    }
    Ok(result)
}

struct VariantRun {
    outcome: String,
    detail: String,
    cost: Option<u64>,
    search_s: f64,
    expansions: u64,
}

fn run_variant(engine: &Engine, task: &Task, opts: &BenchOptions) -> VariantRun {
    let (result, search_s) = opts.clock.time(|| run_engine(engine, task, &opts.limits));
    match result {
        Ok(result) => {
            let (outcome, detail) = match &result.outcome {
                SearchOutcome::Solved(_) => ("solved".to_string(), String::new()),
                SearchOutcome::Unsolvable => ("unsolvable".to_string(), String::new()),
                SearchOutcome::Limit(kind) => ("limit".to_string(), kind.as_str().to_string()),
            };
            VariantRun {
                outcome,
                detail,
                cost: result.cost(),
                search_s,
                expansions: result.stats.expansions,
            }
        }
        Err(err) => VariantRun {
            outcome: "error".to_string(),
            detail: err.to_string(),
            cost: None,
            search_s,
            expansions: 0,
        },
    }
}

fn load_error_record(entry: &SuiteTask, parse_s: f64, ground_s: f64, detail: String) -> Vec<BenchRecord> {
    vec![BenchRecord {
        task_id: entry.id.clone(),
        domain: entry.domain_name.clone(),
        variant: "original".into(),
        outcome: "error".into(),
        detail,
        cost: None,
        parse_s,
        ground_s,
        compile_s: 0.0,
        search_s: 0.0,
        total_s: parse_s + ground_s,
        expansions: 0,
        sat_score: 0.0,
        agl_score: 0.0,
    }]
}

fn bench_task(entry: &SuiteTask, opts: &BenchOptions, best_seed: Option<u64>) -> Vec<BenchRecord> {
    let parse_s;
    let mut ground_s = 0.0;

    let task = match &entry.source {
        TaskSource::Json(path) => {
            let (loaded, t) = opts.clock.time(|| {
                std::fs::read_to_string(path)
                    .map_err(|e| e.to_string())
                    .and_then(|text| jsonio::read_task_json(&text).map_err(|e| e.to_string()))
            });
            parse_s = t;
            match loaded {
                Ok(task) => task,
                Err(e) => return load_error_record(entry, parse_s, ground_s, e),
            }
        }
        TaskSource::Pddl { domain, problem } => {
            let (model, t_parse) = opts.clock.time(|| {
                let d = std::fs::read_to_string(domain).map_err(|e| e.to_string())?;
                let p = std::fs::read_to_string(problem).map_err(|e| e.to_string())?;
                parse_pddl(&d, &p).map_err(|e| e.to_string())
            });
            parse_s = t_parse;
            let model = match model {
                Ok(m) => m,
                Err(e) => return load_error_record(entry, parse_s, ground_s, e),
            };
            let (task, t_ground) =
                opts.clock.time(|| ground(&model, &opts.grounding).map_err(|e| e.to_string()));
            ground_s = t_ground;
            match task {
                Ok(task) => task,
                Err(e) => return load_error_record(entry, parse_s, ground_s, e),
            }
        }
    };

    let mut runs: Vec<(String, f64, VariantRun)> = Vec::new();
    let original = run_variant(&opts.engine, &task, opts);
    runs.push(("original".into(), 0.0, original));

    if opts.both_variants {
        let (compiled, compile_s) = opts.clock.time(|| compile(&task, &opts.compile_options));
        match compiled {
            Ok(compiled) => {
                let run = run_variant(&opts.engine, &compiled.task, opts);
                runs.push(("compiled".into(), compile_s, run));
            }
            Err(e) => {
                runs.push((
                    "compiled".into(),
                    compile_s,
                    VariantRun {
                        outcome: "error".into(),
                        detail: e.to_string(),
                        cost: None,
                        search_s: 0.0,
                        expansions: 0,
                    },
                ));
            }
        }
    }

    // Best known cost for this task: prior knowledge plus this run.
    let mut best = best_seed;
    for (_, _, run) in &runs {
        if let Some(c) = run.cost {
            best = Some(best.map_or(c, |b| b.min(c)));
        }
    }

    runs.into_iter()
        .map(|(variant, compile_s, run)| {
            let total_s = parse_s + ground_s + compile_s + run.search_s;
            let sat = match (best, run.cost) {
                (Some(b), Some(c)) => sat_score(b, Some(c)).unwrap_or(0.0),
                _ => 0.0,
            };
            let agl = if run.cost.is_some() { agl_score(total_s, opts.agl_horizon_s) } else { 0.0 };
            BenchRecord {
                task_id: entry.id.clone(),
                domain: entry.domain_name.clone(),
                variant,
                outcome: run.outcome,
                detail: run.detail,
                cost: run.cost,
                parse_s,
                ground_s,
                compile_s,
                search_s: run.search_s,
                total_s,
                expansions: run.expansions,
                sat_score: sat,
                agl_score: agl,
            }
        })
        .collect()
}

fn read_existing(csv_path: &Path) -> Result<Vec<BenchRecord>, HarnessError> {
    if !csv_path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| HarnessError::Csv(e.to_string()))?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| HarnessError::Csv(e.to_string()))?;
        out.push(BenchRecord::from_row(&row)?);
    }
    Ok(out)
}

fn best_known_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.file_name().unwrap_or_default().to_os_string();
    name.push(".best.json");
    csv_path.with_file_name(name)
}

fn read_best_known(path: &Path) -> HashMap<String, u64> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return HashMap::new();
    };
    let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) else {
        return HashMap::new();
    };
    if value.get("format").and_then(|f| f.as_str()) != Some(BEST_KNOWN_FORMAT) {
        return HashMap::new();
    }
    value
        .get("costs")
        .and_then(|c| c.as_object())
        .map(|map| {
            map.iter().filter_map(|(k, v)| v.as_u64().map(|c| (k.clone(), c))).collect()
        })
        .unwrap_or_default()
}

fn write_best_known(path: &Path, costs: &BTreeMap<String, u64>) -> Result<(), HarnessError> {
    let doc = serde_json::json!({ "format": BEST_KNOWN_FORMAT, "costs": costs });
    std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(())
}

/// Runs the suite, appending one row per (task, variant) to `csv_out`.
/// Already-recorded rows are skipped; per-task failures become rows and
/// never abort the batch. Returns the aggregate summary over the whole
/// CSV (existing plus new rows).
pub fn run_benchmark(
    suite: &Path,
    opts: &BenchOptions,
    csv_out: &Path,
) -> Result<BenchSummary, HarnessError> {
    if let Engine::External(config) = &opts.engine {
        config.validate()?;
    }
    let tasks = discover(suite)?;
    let existing = read_existing(csv_out)?;
    let done: BTreeSet<(String, String)> =
        existing.iter().map(|r| (r.task_id.clone(), r.variant.clone())).collect();

    let best_path = best_known_path(csv_out);
    let mut best: HashMap<String, u64> = read_best_known(&best_path);
    for record in &existing {
        if let Some(cost) = record.cost {
            let entry = best.entry(record.task_id.clone()).or_insert(cost);
            *entry = (*entry).min(cost);
        }
    }

    let wanted_variants: &[&str] =
        if opts.both_variants { &["original", "compiled"] } else { &["original"] };
    let pending: Vec<&SuiteTask> = tasks
        .iter()
        .filter(|t| {
            wanted_variants
                .iter()
                .any(|v| !done.contains(&(t.id.clone(), v.to_string())))
        })
        .collect();

    let file_exists = csv_out.exists();
    let file = std::fs::OpenOptions::new().create(true).append(true).open(csv_out)?;
    let mut writer = csv::Writer::from_writer(file);
    if !file_exists {
        writer
            .write_record(CSV_HEADER)
            .map_err(|e| HarnessError::Csv(e.to_string()))?;
        writer.flush()?;
    }

    let mut new_records: Vec<BenchRecord> = Vec::new();
    let jobs = opts.jobs.max(1);
    if jobs == 1 || pending.len() <= 1 {
        for entry in &pending {
            let records = bench_task(entry, opts, best.get(&entry.id).copied());
            new_records.extend(commit_records(&mut writer, records, &done, &mut best)?);
        }
    } else {
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, Vec<BenchRecord>)>();
        // Tasks are independent: a task's best-known cost only involves its
        // own prior rows, all present in this snapshot.
        let best_snapshot = best.clone();
        let results: Mutex<BTreeMap<usize, Vec<BenchRecord>>> = Mutex::new(BTreeMap::new());
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(pending.len()) {
                let tx = tx.clone();
                let pending = &pending;
                let next = &next;
                let best_snapshot = &best_snapshot;
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= pending.len() {
                        break;
                    }
                    let entry = pending[i];
                    let records = bench_task(entry, opts, best_snapshot.get(&entry.id).copied());
                    if tx.send((i, records)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            // Commit rows in task order as they become available.
            let mut committed = 0usize;
            for (i, records) in rx {
                let mut guard = results.lock().unwrap();
                guard.insert(i, records);
                while let Some(records) = guard.remove(&committed) {
                    new_records.extend(commit_records(&mut writer, records, &done, &mut best)?);
                    committed += 1;
                }
            }
            Ok::<(), HarnessError>(())
        })?;
    }
    writer.flush()?;

    let best_out: BTreeMap<String, u64> = best.into_iter().collect();
    write_best_known(&best_path, &best_out)?;

    let mut all = existing;
    all.extend(new_records);
    Ok(summarize(&all, opts.both_variants))
}

/// Writes the rows not already present and returns exactly those, so
/// summaries never double-count a (task, variant) pair across a resume.
fn commit_records(
    writer: &mut csv::Writer<std::fs::File>,
    records: Vec<BenchRecord>,
    done: &BTreeSet<(String, String)>,
    best: &mut HashMap<String, u64>,
) -> Result<Vec<BenchRecord>, HarnessError> {
    let mut written = Vec::with_capacity(records.len());
    for record in records {
        if done.contains(&(record.task_id.clone(), record.variant.clone())) {
            continue;
        }
        writer
            .write_record(record.to_row())
            .map_err(|e| HarnessError::Csv(e.to_string()))?;
        if let Some(cost) = record.cost {
            let entry = best.entry(record.task_id.clone()).or_insert(cost);
            *entry = (*entry).min(cost);
        }
        written.push(record);
    }
    writer.flush()?;
    Ok(written)
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DomainAgg {
    pub domain: String,
    pub tasks: usize,
    /// Indexed `[original, compiled]`.
    pub coverage: [usize; 2],
    pub sat: [f64; 2],
    pub agl: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub domains: Vec<DomainAgg>,
    pub totals: DomainAgg,
    pub both_variants: bool,
}

fn summarize(records: &[BenchRecord], both_variants: bool) -> BenchSummary {
    let mut by_domain: BTreeMap<String, DomainAgg> = BTreeMap::new();
    let mut task_ids: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for record in records {
        let agg = by_domain.entry(record.domain.clone()).or_insert_with(|| DomainAgg {
            domain: record.domain.clone(),
            ..Default::default()
        });
        task_ids.entry(record.domain.clone()).or_default().insert(record.task_id.clone());
        let slot = match record.variant.as_str() {
            "original" => 0,
            _ => 1,
        };
        if record.outcome == "solved" {
            agg.coverage[slot] += 1;
        }
        agg.sat[slot] += record.sat_score;
        agg.agl[slot] += record.agl_score;
    }
    let mut totals = DomainAgg { domain: "total".into(), ..Default::default() };
    let mut domains: Vec<DomainAgg> = Vec::new();
    for (name, mut agg) in by_domain {
        agg.tasks = task_ids[&name].len();
        totals.tasks += agg.tasks;
        for i in 0..2 {
            totals.coverage[i] += agg.coverage[i];
            totals.sat[i] += agg.sat[i];
            totals.agl[i] += agg.agl[i];
        }
        domains.push(agg);
    }
    BenchSummary { domains, totals, both_variants }
}

/// Rebuilds the summary from a CSV alone.
pub fn summary_from_csv(csv_path: &Path, both_variants: bool) -> Result<BenchSummary, HarnessError> {
    Ok(summarize(&read_existing(csv_path)?, both_variants))
}

impl BenchSummary {
    /// Plain-text table, one row per domain plus a totals row. The better
    /// figure per metric pair is starred; ties star both.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
            "domain (#tasks)", "cov P", "cov Pc", "sat P", "sat Pc", "agl P", "agl Pc"
        ));
        let mark = |a: f64, b: f64, text_a: String, text_b: String| -> (String, String) {
            if !self.both_variants {
                return (text_a, "-".into());
            }
            match a.partial_cmp(&b) {
                Some(std::cmp::Ordering::Greater) => (format!("{text_a}*"), text_b),
                Some(std::cmp::Ordering::Less) => (text_a, format!("{text_b}*")),
                _ => (format!("{text_a}*"), format!("{text_b}*")),
            }
        };
        for agg in self.domains.iter().chain(std::iter::once(&self.totals)) {
            let (cov_a, cov_b) = mark(
                agg.coverage[0] as f64,
                agg.coverage[1] as f64,
                agg.coverage[0].to_string(),
                agg.coverage[1].to_string(),
            );
            let (sat_a, sat_b) =
                mark(agg.sat[0], agg.sat[1], format!("{:.1}", agg.sat[0]), format!("{:.1}", agg.sat[1]));
            let (agl_a, agl_b) =
                mark(agg.agl[0], agg.agl[1], format!("{:.1}", agg.agl[0]), format!("{:.1}", agg.agl[1]));
            out.push_str(&format!(
                "{:<28} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
                format!("{} ({})", agg.domain, agg.tasks),
                cov_a,
                cov_b,
                sat_a,
                sat_b,
                agl_a,
                agl_b
            ));
        }
        out
    }
}
