//! Resolved run configuration and the command drivers.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use patcx::complexity::{check_pattern_sturmian, pstar, ComplexityCertificate, SearchBounds};
use patcx::rotation::nonrecurrence_witness;
use patcx::seqcore::{tau_language, SequenceSource, Window};
use patcx::witnesses::{doubling_lower_bound, gap_window_witness, long_blocks_witness};
use patcx::{Error, Result};

use crate::args::{BoundsArgs, Cli, CommandArgs, Format, InputArgs, WitnessArgs};
use crate::generator::{self, Generated, PRESETS};
use crate::reproduce;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Spec(String),
    PrefixFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Doubling { steps: usize },
    LongBlocks,
    GapWindow,
    Nonrecurrence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Gen { length: usize },
    Lang { window: Vec<usize> },
    Pstar,
    CheckSturmian,
    Witness(WitnessKind),
    Reproduce { only: Vec<usize> },
    Presets,
}

/// Search bounds given on the command line; unset fields take defaults that
/// depend on the input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundOverrides {
    pub max_n: Option<usize>,
    pub diameter: Option<usize>,
    pub shifts: Option<usize>,
    pub node_budget: Option<usize>,
    pub no_pruning: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<Input>,
    pub bounds: BoundOverrides,
    pub horizon: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub workers: Option<usize>,
}

fn input_of(args: InputArgs) -> Option<Input> {
    match (args.spec, args.prefix_file) {
        (Some(s), _) => Some(Input::Spec(s)),
        (None, Some(p)) => Some(Input::PrefixFile(p)),
        (None, None) => None,
    }
}

fn bounds_of(b: BoundsArgs) -> BoundOverrides {
    BoundOverrides {
        max_n: b.max_n.map(|v| v as usize),
        diameter: b.diameter.map(|v| v as usize),
        shifts: b.shifts.map(|v| v as usize),
        node_budget: b.budget.map(|v| v as usize),
        no_pruning: b.no_pruning,
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let mut cfg = RunConfig {
            command: Command::Presets,
            input: None,
            bounds: BoundOverrides::default(),
            horizon: None,
            output: cli.output,
            format: cli.format,
            seed: cli.seed,
            workers: cli.workers.map(|w| w as usize),
        };
        cfg.command = match cli.command {
            CommandArgs::Gen { input, length } => {
                cfg.input = input_of(input);
                if !matches!(cfg.input, Some(Input::Spec(_))) {
                    return Err(Error::InvalidArgument("gen needs --spec".into()));
                }
                Command::Gen { length: length as usize }
            }
            CommandArgs::Lang { input, window, shifts } => {
                cfg.input = input_of(input);
                cfg.bounds.shifts = shifts.map(|s| s as usize);
                Command::Lang { window }
            }
            CommandArgs::Pstar { input, bounds } => {
                cfg.input = input_of(input);
                cfg.bounds = bounds_of(bounds);
                Command::Pstar
            }
            CommandArgs::CheckSturmian { input, bounds } => {
                cfg.input = input_of(input);
                cfg.bounds = bounds_of(bounds);
                Command::CheckSturmian
            }
            CommandArgs::Witness { kind } => {
                let (input, horizon, kind) = match kind {
                    WitnessArgs::Doubling { input, steps, horizon } => (input, horizon, WitnessKind::Doubling { steps }),
                    WitnessArgs::LongBlocks { input, horizon } => (input, horizon, WitnessKind::LongBlocks),
                    WitnessArgs::GapWindow { input, horizon } => (input, horizon, WitnessKind::GapWindow),
                    WitnessArgs::Nonrecurrence { input, horizon } => (input, horizon, WitnessKind::Nonrecurrence),
                };
                cfg.input = input_of(input);
                cfg.horizon = horizon;
                if cfg.input.is_none() && !matches!(kind, WitnessKind::Doubling { .. }) {
                    return Err(Error::InvalidArgument("this witness needs --spec or --prefix-file".into()));
                }
                Command::Witness(kind)
            }
            CommandArgs::Reproduce { only } => Command::Reproduce { only },
            CommandArgs::Presets => Command::Presets,
        };
        let needs_input = matches!(cfg.command, Command::Lang { .. } | Command::Pstar | Command::CheckSturmian);
        if needs_input && cfg.input.is_none() {
            return Err(Error::InvalidArgument("an input is required: --spec or --prefix-file".into()));
        }
        if cfg.horizon == Some(0) {
            return Err(Error::InvalidArgument("--horizon must be positive".into()));
        }
        Ok(cfg)
    }
}

/// A finished command: both renderings and the process exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub structured: Value,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String, structured: Value) -> Self {
        Output { text, structured, exit_code: 0 }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.text.clone(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.structured).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

struct Loaded {
    source: SequenceSource,
    generated: Option<Generated>,
}

fn load(input: &Input) -> Result<Loaded> {
    match input {
        Input::Spec(s) => {
            let g = generator::resolve_spec(s)?;
            Ok(Loaded { source: g.source.clone(), generated: Some(g) })
        }
        Input::PrefixFile(p) => Ok(Loaded { source: generator::load_prefix_file(p)?, generated: None }),
    }
}

fn required(cfg: &RunConfig) -> Result<Loaded> {
    load(cfg.input.as_ref().ok_or_else(|| Error::InvalidArgument("an input is required".into()))?)
}

/// Defaults: the library defaults for generators; for a finite prefix the
/// diameter is capped to fit and every readable shift is used.
pub fn resolve_bounds(source: &SequenceSource, o: &BoundOverrides) -> Result<SearchBounds> {
    let d = SearchBounds::default();
    let b = match source.valid_up_to() {
        None => SearchBounds {
            max_n: o.max_n.unwrap_or(d.max_n),
            diameter_cap: o.diameter.unwrap_or(d.diameter_cap),
            shift_bound: o.shifts.unwrap_or(d.shift_bound),
            node_budget: o.node_budget.unwrap_or(d.node_budget),
            pruning: !o.no_pruning,
        },
        Some(len) => {
            if len < 2 {
                return Err(Error::InvalidArgument(format!("a prefix of {len} bits is too short to search")));
            }
            let diameter = o.diameter.unwrap_or(d.diameter_cap.min(len - 2).max(1));
            if diameter + 1 >= len {
                return Err(Error::InvalidArgument(format!(
                    "diameter {diameter} leaves no shifts in a {len}-bit prefix"
                )));
            }
            SearchBounds {
                max_n: o.max_n.unwrap_or(d.max_n.min(diameter + 1)),
                diameter_cap: diameter,
                shift_bound: o.shifts.unwrap_or(len - diameter - 1),
                node_budget: o.node_budget.unwrap_or(d.node_budget),
                pruning: !o.no_pruning,
            }
        }
    };
    b.validate()?;
    Ok(b)
}

fn horizon_for(cfg: &RunConfig, source: &SequenceSource, default: usize) -> usize {
    cfg.horizon.or(source.valid_up_to()).unwrap_or(default)
}

pub fn offsets_string(w: &Window) -> String {
    w.to_string()
}

fn certificate_json(label: &str, cert: &ComplexityCertificate) -> Value {
    json!({
        "source": label,
        "bounds": cert.bounds,
        "rows": cert.rows.iter().map(|r| json!({
            "n": r.n,
            "pstar_lb": r.best_count,
            "window": r.best_window.offsets(),
            "verdict": r.verdict,
            "explored_nodes": r.explored_nodes,
        })).collect::<Vec<_>>(),
        "explored_nodes": cert.explored_nodes,
        "budget_exhausted": cert.budget_exhausted,
        "exhaustive": cert.exhaustive,
    })
}

fn certificate_table(cert: &ComplexityCertificate) -> String {
    let mut t = Table::new(["n", "pstar_lb", "2n", "window", "verdict", "explored"]);
    for r in &cert.rows {
        t.row([
            r.n.to_string(),
            r.best_count.to_string(),
            (2 * r.n).to_string(),
            r.best_window.to_string(),
            r.verdict.to_string(),
            r.explored_nodes.to_string(),
        ]);
    }
    let b = &cert.bounds;
    format!(
        "{}search: D = {}, S = {}, budget = {}, counted = {}, {}\n",
        t.render(),
        b.diameter_cap,
        b.shift_bound,
        b.node_budget,
        cert.explored_nodes,
        if cert.exhaustive {
            "exhaustive"
        } else if cert.budget_exhausted {
            "budget exhausted"
        } else {
            "partial"
        }
    )
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn execute(cfg: &RunConfig) -> Result<Output> {
    if let Some(w) = cfg.workers {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match &cfg.command {
        Command::Gen { length } => cmd_gen(cfg, *length),
        Command::Lang { window } => cmd_lang(cfg, window),
        Command::Pstar => cmd_pstar(cfg),
        Command::CheckSturmian => cmd_check(cfg),
        Command::Witness(kind) => cmd_witness(cfg, *kind),
        Command::Reproduce { only } => Ok(cmd_reproduce(cfg.seed, only)),
        Command::Presets => {
            let mut t = Table::new(["preset", "sequence"]);
            for (name, what) in PRESETS {
                t.row([*name, *what]);
            }
            let v = PRESETS.iter().map(|(n, w)| json!({"name": n, "description": w})).collect();
            Ok(Output::ok(t.render(), Value::Array(v)))
        }
    }
}

pub fn cmd_gen(cfg: &RunConfig, length: usize) -> Result<Output> {
    let loaded = required(cfg)?;
    let g = loaded.generated.expect("gen takes a spec");
    let body = generator::render_bits_file(&g, length)?;
    let structured = json!({
        "source": g.source.label(),
        "spec": g.spec,
        "length": length,
        "depth_consumed": g.depth_consumed(length)?,
        "bits": g.source.prefix(length)?.to_bit_string(),
    });
    Ok(Output::ok(body, structured))
}

pub fn cmd_lang(cfg: &RunConfig, offsets: &[usize]) -> Result<Output> {
    let loaded = required(cfg)?;
    let window = Window::normalized(offsets.to_vec())?;
    let shifts = match (cfg.bounds.shifts, loaded.source.valid_up_to()) {
        (Some(s), _) => s,
        (None, Some(len)) => len
            .checked_sub(window.diameter() + 1)
            .ok_or_else(|| Error::InvalidArgument(format!("window {window} does not fit in {len} bits")))?,
        (None, None) => SearchBounds::default().shift_bound,
    };
    let report = tau_language(&loaded.source, &window, shifts)?;
    let mut t = Table::new(["word", "first shift"]);
    for p in &report.patterns {
        t.row([p.bits.to_string(), p.witness_shift.to_string()]);
    }
    let text = format!(
        "window {}, shifts 0..={}: {} words{}\n{}",
        report.window,
        report.shift_bound,
        report.count(),
        if report.saturated { " (saturated)" } else { "" },
        t.render()
    );
    Ok(Output::ok(text, to_value(&report)))
}

pub fn cmd_pstar(cfg: &RunConfig) -> Result<Output> {
    let loaded = required(cfg)?;
    let bounds = resolve_bounds(&loaded.source, &cfg.bounds)?;
    let cert = pstar(&loaded.source, &bounds)?;
    Ok(Output::ok(certificate_table(&cert), certificate_json(loaded.source.label(), &cert)))
}

pub fn cmd_check(cfg: &RunConfig) -> Result<Output> {
    let loaded = required(cfg)?;
    let bounds = resolve_bounds(&loaded.source, &cfg.bounds)?;
    let check = check_pattern_sturmian(&loaded.source, &bounds)?;
    let mut text = format!("verdict: {}\n", check.verdict);
    if let (Some(n), Some(w), Some(c)) = (check.refuting_n, &check.refuting_window, check.refuting_count) {
        text.push_str(&format!("refuted at n = {n}: window {w} reads {c} > {} patterns\n", 2 * n));
    }
    if let Some(p) = check.periodicity {
        text.push_str(&format!(
            "eventually periodic within the horizon: period {}, preperiod {}\n",
            p.period, p.preperiod
        ));
    }
    text.push_str(&certificate_table(&check.certificate));
    let structured = json!({
        "verdict": check.verdict,
        "refuting_n": check.refuting_n,
        "refuting_window": check.refuting_window.as_ref().map(|w| w.offsets().to_vec()),
        "refuting_count": check.refuting_count,
        "periodicity": check.periodicity,
        "certificate": certificate_json(loaded.source.label(), &check.certificate),
    });
    Ok(Output::ok(text, structured))
}

pub fn cmd_witness(cfg: &RunConfig, kind: WitnessKind) -> Result<Output> {
    match kind {
        WitnessKind::Doubling { steps } => {
            let source = match &cfg.input {
                Some(i) => load(i)?.source,
                None => generator::preset("block-doubling-defect")?.source,
            };
            let horizon = horizon_for(cfg, &source, 1 << 20);
            let trace = doubling_lower_bound(&source, steps, horizon)?;
            let mut t = Table::new(["k", "|τ_k|", "diameter", "count", "(k+2)2^(k-1)", "step ineq", "K_k", "M_k"]);
            for s in &trace.steps {
                t.row([
                    s.k.to_string(),
                    s.window.size().to_string(),
                    s.window.diameter().to_string(),
                    s.count.to_string(),
                    s.closed_form_bound.to_string(),
                    s.meets_step_inequality.map_or("-".into(), |b| b.to_string()),
                    s.recurrence_offset.map_or("-".into(), |v| v.to_string()),
                    s.prefix_len.map_or("-".into(), |v| v.to_string()),
                ]);
            }
            let mut text = format!("source: {}\nhorizon: {horizon}\n{}", source.label(), t.render());
            match trace.certified_through {
                Some(k) => text.push_str(&format!("certified through k = {k}\n")),
                None => text.push_str("nothing certified\n"),
            }
            if let Some(f) = &trace.failure {
                text.push_str(&format!("stopped: {f}\n"));
            }
            Ok(Output::ok(text, to_value(&trace)))
        }
        WitnessKind::LongBlocks => {
            let loaded = required(cfg)?;
            let horizon = horizon_for(cfg, &loaded.source, 20_000);
            let w = long_blocks_witness(&loaded.source, horizon)?;
            let text = match &w {
                Some(w) => format!(
                    "complete {}-run of length {}; longest 0-run {} at {}, longest 1-run {} at {}\n\
                     window {} (n = {}) reads {} > {} patterns\n",
                    w.threshold_letter as u8,
                    w.threshold,
                    w.zero_run.len,
                    w.zero_run.start,
                    w.one_run.len,
                    w.one_run.start,
                    w.window,
                    w.n,
                    w.count,
                    2 * w.n
                ),
                None => format!("no long-blocks witness within {horizon} bits\n"),
            };
            Ok(Output::ok(text, to_value(&w)))
        }
        WitnessKind::GapWindow => {
            let loaded = required(cfg)?;
            let horizon = horizon_for(cfg, &loaded.source, 10_000);
            let w = gap_window_witness(&loaded.source, horizon)?;
            let text = match &w {
                Some(w) => {
                    let words: Vec<String> = w.words_found.iter().map(|x| x.to_string()).collect();
                    format!(
                        "first gap increase at n = {} (s_n = {}, s_n+1 = {})\nwindow {}: reads {} at s_n and {} at s_n+1\n\
                         010 {}\nwords within shifts 0..={}: {}\n",
                        w.n,
                        w.s_n,
                        w.s_next,
                        w.window,
                        w.read_at_s_n,
                        w.read_at_s_next,
                        w.witness_010.map_or("not found".to_string(), |m| format!("at shift {m}")),
                        w.shift_bound,
                        words.join(" ")
                    )
                }
                None => format!("no gap increase within {horizon} bits\n"),
            };
            Ok(Output::ok(text, to_value(&w)))
        }
        WitnessKind::Nonrecurrence => {
            let loaded = required(cfg)?;
            let spec = loaded
                .generated
                .and_then(|g| g.rotation)
                .ok_or_else(|| Error::InvalidArgument("the nonrecurrence witness needs a rotation spec".into()))?;
            let horizon = cfg.horizon.unwrap_or(100_000);
            let w = nonrecurrence_witness(&spec, horizon)?;
            let text = match &w {
                Some(w) => format!(
                    "window {} reads constant {} at shift {} {}; occurrences within 0..={}: {} {:?}\n",
                    w.window,
                    w.letter as u8,
                    w.unique_shift,
                    if w.confirmed { "only" } else { "but not uniquely" },
                    w.horizon,
                    w.occurrence_count,
                    w.occurrences
                ),
                None => "no closed cell with both endpoints on the orbit\n".to_string(),
            };
            Ok(Output::ok(text, to_value(&w)))
        }
    }
}

pub fn cmd_reproduce(seed: u64, only: &[usize]) -> Output {
    let ids: Vec<usize> = if only.is_empty() { reproduce::ALL.to_vec() } else { only.to_vec() };
    let results = reproduce::run_suite(&ids, seed);
    let mut t = Table::new(["#", "result", "seconds", "criterion", "detail"]);
    for r in &results {
        t.row([
            r.id.to_string(),
            if r.passed { "PASS" } else { "FAIL" }.to_string(),
            format!("{:.2}", r.elapsed_secs),
            r.title.to_string(),
            r.detail.clone(),
        ]);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let text = format!("{}{} of {} passed\n", t.render(), results.len() - failed, results.len());
    Output {
        text,
        structured: to_value(&results),
        exit_code: if failed == 0 { 0 } else { 2 },
    }
}
