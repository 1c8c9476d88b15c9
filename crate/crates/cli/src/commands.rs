use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use sli_core::benchmark::{build_single_law_dataset, dataset_stats, load_cascade, BenchmarkSpec};
use sli_core::datagen::{gen_idp_pi, gen_llm_tasks, gen_rp_ri, RuleDb};
use sli_core::dsl::{parse_transcript, print_constructor, print_law};
use sli_core::evaluation::{evaluate_dataset, wilcoxon_signed_rank, Alternative, ComparisonRecord};
use sli_core::gateway::{build_sli_prompt, CompletionRequest, Fixtures, Gateway};
use sli_core::phonology::{load_lexicon, preprocess};
use sli_core::rewrite::{apply_cascade, apply_to_lexicon, Cascade};
use sli_core::task::{read_tasks, tasks_to_string, Condition, PbeTask};
use sli_core::{assets, Inventory, SoundLaw};

use crate::config::Config;
use crate::error::{code, CliError};
use crate::input::{lexicon_text, load_words, parse_laws, read_text};
use crate::manifest::RunManifest;
use crate::{Cli, Command, Format, Global};

#[derive(Debug, Args)]
pub struct WordsArgs {
    /// Lexicon file, or `builtin:NAME`.
    #[arg(long)]
    pub lexicon: Option<String>,
    pub words: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Inline law in any notation.
    #[arg(short, long, conflicts_with = "law")]
    pub rule: Option<String>,
    /// File holding the law.
    #[arg(long)]
    pub law: Option<PathBuf>,
    #[command(flatten)]
    pub words: WordsArgs,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// Cascade file: classical rules one per line, or a JSON array of laws.
    #[arg(long)]
    pub cascade: PathBuf,
    /// Print the words each law changes.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub words: WordsArgs,
}

#[derive(Debug, Args)]
pub struct ParseLawArgs {
    /// Law text; read from --file or stdin when absent.
    pub text: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenCondition {
    RpRi,
    RpLi,
    RpPi,
    IdpPi,
}

#[derive(Debug, Args)]
pub struct DatagenArgs {
    #[arg(long, value_enum)]
    pub condition: GenCondition,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Output JSONL (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input words: seed pool for rp-li/rp-pi, sampled inputs for idp-pi.
    #[arg(long)]
    pub lexicon: Option<String>,
    /// Label for the lexicon in task ids; `poc` or `ptk` pick the bundled ones.
    #[arg(long, default_value = "poc")]
    pub source: String,
    /// Rule database for idp-pi (bundled demo rules when absent).
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Recorded transcripts (JSONL) to replay.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Cascade file (bundled demo cascade when absent).
    #[arg(long)]
    pub cascade: Option<PathBuf>,
    /// Protoform lexicon (bundled demo lexicon when absent).
    #[arg(long)]
    pub lexicon: Option<String>,
    #[arg(long, default_value = "demo")]
    pub pair: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub distractor_fraction: Option<f64>,
    #[arg(long)]
    pub distractor_min: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// JSONL of {"task_id", "transcripts": [...]}.
    #[arg(long, conflicts_with_all = ["gold", "query"])]
    pub samples: Option<PathBuf>,
    /// Score each task's own gold law as every sample.
    #[arg(long)]
    pub gold: bool,
    /// Ask the configured model for samples.
    #[arg(long)]
    pub query: bool,
    /// Writes PREFIX.json and PREFIX.md.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Wilcoxon,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum, default_value = "wilcoxon")]
    pub test: TestKind,
    /// Numbers, whitespace-separated or a JSON array.
    #[arg(long, requires = "y")]
    pub x: Option<PathBuf>,
    #[arg(long, requires = "x")]
    pub y: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "two-sided")]
    pub alternative: AltArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Number of comparisons for the Bonferroni correction.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value = "x < y")]
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AltArg {
    TwoSided,
    Less,
    Greater,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Evaluation reports written by `eval` (PREFIX.json).
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
}

struct Ctx {
    global: Global,
    config: Config,
    inv: &'static Inventory,
}

fn leak_inventory(path: &Path) -> Result<&'static Inventory, CliError> {
    let text = read_text(path)?;
    let inv = Inventory::from_table(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Ok(Box::leak(Box::new(inv)))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = Config::load(cli.global.config.as_deref())?;
    if let Some(n) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::new(code::IO, e.to_string()))?;
    }
    let inv_path = cli.global.inventory.clone().or_else(|| config.inventory.as_ref().map(PathBuf::from));
    let inv = match inv_path {
        Some(p) => leak_inventory(&p)?,
        None => Inventory::default_table(),
    };
    let ctx = Ctx { global: cli.global, config, inv };
    match cli.command {
        Command::Tokenize(a) => tokenize(&ctx, a),
        Command::Apply(a) => apply(&ctx, a),
        Command::Derive(a) => derive(&ctx, a),
        Command::ParseLaw(a) => parse_law(&ctx, a),
        Command::Datagen(a) => datagen(&ctx, a),
        Command::Bench(a) => bench(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
        Command::Report(a) => report(&ctx, a),
    }
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    if !s.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn emit_json(v: &Value) {
    emit(&serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError::io(path, e))
}

fn tokenize(ctx: &Ctx, a: WordsArgs) -> Result<(), CliError> {
    let words = load_words(a.lexicon.as_deref(), &a.words, ctx.inv)?;
    match ctx.global.format {
        Format::Json => emit_json(&Value::Array(
            words
                .iter()
                .map(|w| json!({"word": w.to_string(), "phones": w.to_spaced(), "tokens": preprocess(w).to_string()}))
                .collect(),
        )),
        _ => {
            for w in &words {
                emit(&format!("{}\t{}", w.to_spaced(), preprocess(w)));
            }
        }
    }
    Ok(())
}

fn one_law(text: &str, inv: &Inventory) -> Result<SoundLaw, CliError> {
    let mut laws = parse_laws(text, inv)?;
    match laws.len() {
        1 => Ok(laws.remove(0)),
        0 => Err(CliError::parse("no law found")),
        n => Err(CliError::parse(format!("expected one law, found {n}; use `derive` for cascades"))),
    }
}

fn apply(ctx: &Ctx, a: ApplyArgs) -> Result<(), CliError> {
    let text = match (&a.rule, &a.law) {
        (Some(r), _) => r.clone(),
        (None, Some(p)) => read_text(p)?,
        (None, None) => return Err(CliError::parse("give a law with --rule or --law")),
    };
    let law = one_law(&text, ctx.inv)?;
    let words = load_words(a.words.lexicon.as_deref(), &a.words.words, ctx.inv)?;
    let app = apply_to_lexicon(&law, &words, ctx.inv);
    match ctx.global.format {
        Format::Json => emit_json(&Value::Array(
            words
                .iter()
                .zip(&app.outputs)
                .zip(&app.changed)
                .map(|((i, o), c)| json!({"input": i.to_string(), "output": o.to_string(), "changed": c}))
                .collect(),
        )),
        Format::Md => {
            let mut s = String::from("| input | output |\n|---|---|\n");
            for (i, o) in words.iter().zip(&app.outputs) {
                s.push_str(&format!("| {i} | {o} |\n"));
            }
            emit(&s);
        }
        Format::Text => {
            for o in &app.outputs {
                emit(&o.to_string());
            }
        }
    }
    Ok(())
}

fn read_cascade(path: &Path, inv: &Inventory) -> Result<Cascade, CliError> {
    let text = read_text(path)?;
    let name = path.file_stem().map_or_else(|| "cascade".to_string(), |s| s.to_string_lossy().into_owned());
    load_cascade(&name, &text, inv).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn derive(ctx: &Ctx, a: DeriveArgs) -> Result<(), CliError> {
    let cascade = read_cascade(&a.cascade, ctx.inv)?;
    let words = load_words(a.words.lexicon.as_deref(), &a.words.words, ctx.inv)?;
    let trace = apply_cascade(&cascade, &words, ctx.inv).map_err(|e| CliError::apply(e.to_string()))?;
    if ctx.global.format == Format::Json {
        let stages: Vec<Value> = trace
            .stages
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let changes: Vec<Value> = s
                    .before
                    .iter()
                    .zip(&s.after)
                    .zip(&s.changed)
                    .filter(|(_, c)| **c)
                    .map(|((b, a), _)| json!([b.to_string(), a.to_string()]))
                    .collect();
                json!({"law": j, "label": cascade.label(j), "changes": changes})
            })
            .collect();
        let finals: Vec<String> = trace.final_state().iter().map(|w| w.to_string()).collect();
        let mut v = json!({"outputs": finals});
        if a.trace {
            v["stages"] = Value::Array(stages);
        }
        emit_json(&v);
        return Ok(());
    }
    if a.trace {
        for (j, s) in trace.stages.iter().enumerate() {
            emit(&format!("law {j}: {}", cascade.label(j).unwrap_or("")));
            for ((b, after), c) in s.before.iter().zip(&s.after).zip(&s.changed) {
                if *c {
                    emit(&format!("  {b} -> {after}"));
                }
            }
        }
    }
    for (w, out) in words.iter().zip(trace.final_state()) {
        emit(&if a.trace { format!("{w} => {out}") } else { out.to_string() });
    }
    Ok(())
}

fn parse_law(ctx: &Ctx, a: ParseLawArgs) -> Result<(), CliError> {
    let text = match (a.text, a.file) {
        (Some(t), _) => t,
        (None, Some(p)) => read_text(&p)?,
        (None, None) => {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| CliError::io(Path::new("-"), e))?;
            s
        }
    };
    if text.contains("BasicAction") {
        for d in parse_transcript(&text, ctx.inv).diagnostics {
            if d.severity == sli_core::dsl::Severity::Warning {
                eprintln!("warning: {d}");
            }
        }
    }
    let laws = parse_laws(&text, ctx.inv)?;
    if laws.is_empty() {
        return Err(CliError::parse("no law found"));
    }
    match ctx.global.format {
        Format::Json => emit_json(&Value::Array(
            laws.iter().map(|l| serde_json::to_value(l).expect("laws serialize")).collect(),
        )),
        _ => {
            for l in &laws {
                emit(&print_constructor(l, ctx.inv));
                emit(&print_law(l));
            }
        }
    }
    Ok(())
}

fn gateway(ctx: &Ctx, endpoint: Option<String>, model: Option<String>, cache_dir: Option<PathBuf>) -> Result<Gateway, CliError> {
    let mut cfg = ctx.config.gateway.clone();
    if let Some(e) = endpoint {
        cfg.endpoint = e;
    }
    if let Some(m) = model {
        cfg.model = m;
    }
    if cache_dir.is_some() {
        cfg.cache_dir = cache_dir;
    }
    cfg.cache_only |= ctx.global.cache_only;
    Ok(Gateway::new(cfg)?)
}

fn datagen(ctx: &Ctx, a: DatagenArgs) -> Result<(), CliError> {
    let inv = ctx.inv;
    let cfg = &ctx.config.datagen;
    let seed = ctx.global.seed;
    let mut manifest = RunManifest::start("datagen", seed, &ctx.config);
    let bundled_pool = |cond: GenCondition| match (cond, a.source.as_str()) {
        (GenCondition::RpLi, _) => Some(assets::NONCE_WORDS),
        (_, "ptk") => Some(assets::PTK_LEXICON),
        (_, "poc") => Some(assets::POC_LEXICON),
        _ => None,
    };
    let pool = |cond: GenCondition| -> Result<Vec<sli_core::Word>, CliError> {
        let text = match &a.lexicon {
            Some(spec) => lexicon_text(spec)?,
            None => bundled_pool(cond)
                .ok_or_else(|| CliError::parse(format!("no bundled lexicon for source `{}`; pass --lexicon", a.source)))?
                .to_string(),
        };
        load_lexicon(&text, inv).map_err(|e| CliError::parse(e.to_string()))
    };
    if let Some(l) = a.lexicon.as_deref().filter(|l| !l.starts_with("builtin:")) {
        manifest.input(Path::new(l))?;
    }
    let tasks: Vec<PbeTask> = match a.condition {
        GenCondition::RpRi => gen_rp_ri(cfg, inv, seed, a.count)?,
        GenCondition::IdpPi => {
            let text = match &a.rules {
                Some(p) => {
                    manifest.input(p)?;
                    read_text(p)?
                }
                None => assets::RULE_DB.to_string(),
            };
            let (db, warnings) = RuleDb::load(&text, inv);
            for w in warnings {
                log::warn!("rule line {}: {} ({})", w.line, w.text, w.message);
            }
            gen_idp_pi(&db, &pool(a.condition)?, &a.source, cfg, inv, seed, a.count)?
        }
        GenCondition::RpLi | GenCondition::RpPi => {
            let kind = if a.condition == GenCondition::RpLi { Condition::RpLi } else { Condition::RpPi };
            let mut gw = gateway(ctx, a.endpoint.clone(), a.model.clone(), a.cache_dir.clone())?;
            let fixtures = match &a.fixtures {
                Some(p) => {
                    manifest.input(p)?;
                    Some(Fixtures::load(p)?)
                }
                None if a.lexicon.is_none() && gw.config.cache_only => match (kind, a.source.as_str()) {
                    (Condition::RpLi, _) => Some(Fixtures::from_jsonl(assets::RP_LI_FIXTURES)?),
                    (Condition::RpPi, "poc") => Some(Fixtures::from_jsonl(assets::RP_PI_FIXTURES)?),
                    _ => None,
                },
                None => None,
            };
            if let Some(f) = fixtures {
                gw = gw.with_fixtures(f);
            }
            let label = if kind == Condition::RpLi { "nonce" } else { a.source.as_str() };
            gen_llm_tasks(kind, &gw, &pool(a.condition)?, label, cfg, inv, seed, a.count)?
        }
    };
    let text = tasks_to_string(&tasks);
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            manifest.output(p)?;
            manifest.finish(p)?;
            eprintln!("wrote {} tasks to {}", tasks.len(), p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn bench(ctx: &Ctx, a: BenchArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::start("bench", ctx.global.seed, &ctx.config);
    let cascade = match &a.cascade {
        Some(p) => {
            manifest.input(p)?;
            read_cascade(p, ctx.inv)?
        }
        None => load_cascade("demo", assets::DEMO_CASCADE, ctx.inv).map_err(|e| CliError::parse(e.to_string()))?,
    };
    let lex_text = match &a.lexicon {
        Some(spec) => lexicon_text(spec)?,
        None => assets::DEMO_LEXICON.to_string(),
    };
    if let Some(l) = a.lexicon.as_deref().filter(|l| !l.starts_with("builtin:")) {
        manifest.input(Path::new(l))?;
    }
    let lexicon = load_lexicon(&lex_text, ctx.inv).map_err(|e| CliError::parse(e.to_string()))?;
    let mut spec = BenchmarkSpec::new(cascade, lexicon, a.pair.clone(), ctx.global.seed);
    spec.distractor_fraction = a.distractor_fraction.unwrap_or(ctx.config.bench.distractor_fraction);
    spec.distractor_min = a.distractor_min.unwrap_or(ctx.config.bench.distractor_min);
    let ds = build_single_law_dataset(&spec, ctx.inv).map_err(|e| CliError::apply(e.to_string()))?;
    for s in &ds.skipped {
        eprintln!("warning: law {} ({}) changes no word; skipped", s.index, s.label.as_deref().unwrap_or("-"));
    }
    let stats = dataset_stats(&ds.tasks).map_err(|e| CliError::apply(e.to_string()))?;
    let stats_json = serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n";
    let text = tasks_to_string(&ds.tasks);
    match &a.out {
        Some(p) => {
            write_file(p, &text)?;
            let mut sidecar = p.as_os_str().to_owned();
            sidecar.push(".stats.json");
            let sidecar = PathBuf::from(sidecar);
            write_file(&sidecar, &stats_json)?;
            manifest.output(p)?;
            manifest.output(&sidecar)?;
            manifest.finish(p)?;
            eprint!("{stats_json}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleLine {
    task_id: String,
    transcripts: Vec<String>,
}

fn first_law(content: &str, inv: &Inventory) -> Option<SoundLaw> {
    parse_transcript(content, inv).laws.into_iter().next().map(|p| p.law)
}

fn read_samples(path: &Path, tasks: &[PbeTask], inv: &Inventory) -> Result<Vec<Vec<Option<SoundLaw>>>, CliError> {
    let text = read_text(path)?;
    let mut by_id: HashMap<String, Vec<Option<SoundLaw>>> = HashMap::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let s: SampleLine = serde_json::from_str(line)
            .map_err(|e| CliError::schema(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if by_id.contains_key(&s.task_id) {
            return Err(CliError::schema(format!("{}:{}: duplicate task `{}`", path.display(), i + 1, s.task_id)));
        }
        by_id.insert(s.task_id, s.transcripts.iter().map(|t| first_law(t, inv)).collect());
    }
    let known: BTreeSet<&str> = tasks.iter().map(|t| t.id.as_str()).collect();
    if let Some(extra) = by_id.keys().find(|k| !known.contains(k.as_str())) {
        return Err(CliError::schema(format!("samples name unknown task `{extra}`")));
    }
    tasks
        .iter()
        .map(|t| by_id.remove(&t.id).ok_or_else(|| CliError::schema(format!("no samples for task `{}`", t.id))))
        .collect()
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<(), CliError> {
    let inv = ctx.inv;
    let mut manifest = RunManifest::start("eval", ctx.global.seed, &ctx.config);
    let file = std::fs::File::open(&a.tasks).map_err(|e| CliError::io(&a.tasks, e))?;
    let tasks = read_tasks(std::io::BufReader::new(file)).map_err(|e| CliError::schema(format!("{}: {e}", a.tasks.display())))?;
    manifest.input(&a.tasks)?;
    for t in &tasks {
        for w in t.validate(inv) {
            eprintln!("warning: task {}: {w}", t.id);
        }
    }
    let samples = ctx.config.eval.samples.max(1);
    let candidates: Vec<Vec<Option<SoundLaw>>> = if a.gold {
        tasks.iter().map(|t| vec![t.gold_law.clone(); samples]).collect()
    } else if let Some(p) = &a.samples {
        manifest.input(p)?;
        read_samples(p, &tasks, inv)?
    } else if a.query {
        let mut gw = gateway(ctx, None, None, None)?;
        if let Some(p) = &a.fixtures {
            manifest.input(p)?;
            gw = gw.with_fixtures(Fixtures::load(p)?);
        }
        let mut out = Vec::with_capacity(tasks.len());
        for t in &tasks {
            let req = CompletionRequest::new(&gw.config, build_sli_prompt(t), samples);
            out.push(gw.complete(&req)?.iter().map(|tr| first_law(&tr.content, inv)).collect());
        }
        out
    } else {
        return Err(CliError::parse("give --samples, --gold or --query"));
    };
    let report =
        evaluate_dataset(&tasks, &candidates, inv, ctx.config.eval.distance).map_err(|e| CliError::schema(e.to_string()))?;
    let md = report.to_markdown();
    let js = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    if let Some(prefix) = &a.out {
        let with = |ext: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        let (jp, mp) = (with(".json"), with(".md"));
        write_file(&jp, &js)?;
        write_file(&mp, &md)?;
        manifest.output(&jp)?;
        manifest.output(&mp)?;
        manifest.finish(&jp)?;
    }
    match ctx.global.format {
        Format::Json => emit(&js),
        _ => emit(&md),
    }
    Ok(())
}

fn read_numbers(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{}: {e}", path.display())));
    }
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| CliError::schema(format!("{}: `{t}`: {e}", path.display()))))
        .collect()
}

fn stats(ctx: &Ctx, a: StatsArgs) -> Result<(), CliError> {
    if a.m == 0 {
        return Err(CliError::parse("--m must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.alpha) {
        return Err(CliError::parse("--alpha must lie in [0, 1]"));
    }
    let alpha_adj = sli_core::evaluation::bonferroni(a.alpha, a.m);
    let TestKind::Wilcoxon = a.test;
    let (Some(xp), Some(yp)) = (&a.x, &a.y) else {
        match ctx.global.format {
            Format::Json => emit_json(&json!({"alpha": a.alpha, "m": a.m, "alpha_adjusted": alpha_adj})),
            _ => emit(&format!("alpha_adjusted = {alpha_adj:.5}")),
        }
        return Ok(());
    };
    let (x, y) = (read_numbers(xp)?, read_numbers(yp)?);
    let alt = match a.alternative {
        AltArg::TwoSided => Alternative::TwoSided,
        AltArg::Less => Alternative::Less,
        AltArg::Greater => Alternative::Greater,
    };
    let res = wilcoxon_signed_rank(&x, &y, alt).map_err(|e| CliError::schema(e.to_string()))?;
    let rec = ComparisonRecord::new(&a.label, "paired values", &res, a.alpha, a.m);
    match ctx.global.format {
        Format::Json => emit_json(&json!({"result": res, "record": rec})),
        Format::Md => emit(&format!(
            "| Comparison | n | W | p | alpha_adj | significant |\n|---|---|---|---|---|---|\n| {} | {} | {:.3e} | {:.3e} | {:.5} | {} |",
            rec.comparison, rec.n, rec.statistic, rec.p, rec.alpha_adjusted, rec.significant
        )),
        Format::Text => emit(&format!(
            "n = {}\nstatistic = {}\nw_plus = {}\nw_minus = {}\np = {:e}\nmethod = {:?}\nalpha_adjusted = {:.5}\nsignificant = {}",
            res.n, res.statistic, res.w_plus, res.w_minus, res.p_value, res.method, alpha_adj, rec.significant
        )),
    }
    Ok(())
}

fn report(ctx: &Ctx, a: ReportArgs) -> Result<(), CliError> {
    let mut rows: Vec<(String, BTreeMap<String, f64>, f64)> = Vec::new();
    let mut pairs: BTreeSet<String> = BTreeSet::new();
    for p in &a.reports {
        let v: Value = serde_json::from_str(&read_text(p)?).map_err(|e| CliError::schema(format!("{}: {e}", p.display())))?;
        let agg = v.get("aggregates").ok_or_else(|| CliError::schema(format!("{}: not an eval report", p.display())))?;
        let per: BTreeMap<String, f64> = agg["per_language_pair"]
            .as_object()
            .ok_or_else(|| CliError::schema(format!("{}: missing per_language_pair", p.display())))?
            .iter()
            .map(|(k, g)| (k.clone(), g["pass_rate"].as_f64().unwrap_or(0.0)))
            .collect();
        pairs.extend(per.keys().cloned());
        let avg = agg["average_over_pairs"]["pass_rate"].as_f64().unwrap_or(0.0);
        let name = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        rows.push((name, per, avg));
    }
    if ctx.global.format == Format::Json {
        let v: Vec<Value> = rows.iter().map(|(n, per, avg)| json!({"name": n, "pass_rate": per, "avg": avg})).collect();
        emit_json(&Value::Array(v));
        return Ok(());
    }
    let cols: Vec<&String> = pairs.iter().collect();
    let mut s = format!("| Condition | {} | Avg |\n|---|{}---|\n", cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" | "), "---|".repeat(cols.len()));
    for (name, per, avg) in &rows {
        let cells: Vec<String> = cols.iter().map(|c| per.get(*c).map_or("-".into(), |v| format!("{:.2}", 100.0 * v))).collect();
        s.push_str(&format!("| {name} | {} | {:.2} |\n", cells.join(" | "), 100.0 * avg));
    }
    emit(&s);
    Ok(())
}
