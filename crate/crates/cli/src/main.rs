//! `citenorm`: validate corpora, compute normalized indicators, evaluate
//! them against recommendation scores, summarize categories and generate
//! synthetic inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use citenorm_core::citing::WindowLength;
use citenorm_core::corpus::{read_publications, read_references, validate_corpus, Corpus, CorpusConfig};
use citenorm_core::evaluate::{evaluate, EvaluationConfig};
use citenorm_core::stats::{
    category_stats, read_recommendations, validate_recommendations, write_category_stats, CategoryMode, MarginCi,
};
use citenorm_core::synth::{generate_corpus, generate_recommendations, write_synthetic, GeneratorSpec};
use citenorm_core::table::{compute_indicators, parse_indicator_list, ComputeConfig, IndicatorTable};
use citenorm_core::{corpus::CitationIndex, Error, Result};

#[derive(Parser)]
#[command(name = "citenorm", version, about = "Citation-impact normalization toolkit")]
struct Cli {
    /// Worker threads for scoring and bootstrap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus and report counts and anomalies as JSON.
    Validate(ValidateArgs),
    /// Compute indicator tables for every citable publication.
    Compute(ComputeArgs),
    /// Correlate, regress and bootstrap indicators against recommendations.
    Evaluate(EvaluateArgs),
    /// Three-year citation summaries per category.
    CategoryStats(CategoryArgs),
    /// Generate a synthetic corpus and recommendation records.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Publications file (.tsv or .jsonl).
    #[arg(long)]
    publications: PathBuf,
    /// References file (.tsv or .jsonl).
    #[arg(long)]
    references: PathBuf,
    /// Last year of citation observation (default: latest publication year).
    #[arg(long)]
    horizon: Option<i32>,
    /// Comma-separated citable document types.
    #[arg(long, default_value = "article,review,letter")]
    citable_types: String,
    /// Column or key holding the category list.
    #[arg(long, default_value = "categories")]
    category_column: String,
    /// Print the load summary as JSON.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated indicator columns (default: all nine).
    #[arg(long)]
    indicators: Option<String>,
    /// Fixed citing-side window length in years.
    #[arg(long)]
    window_length: Option<u32>,
    /// Recompute journal-year cohort statistics for every citation.
    #[arg(long)]
    no_cohort_cache: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Indicator table written by `compute` (.csv or .jsonl).
    #[arg(long)]
    table: PathBuf,
    /// Recommendation records (.tsv or .jsonl).
    #[arg(long)]
    recommendations: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Fit regressions and margins on each paper's first recommendation.
    #[arg(long)]
    first_only: bool,
    /// Percentile bootstrap intervals for the margins.
    #[arg(long)]
    percentile_ci: bool,
}

#[derive(Args)]
struct CategoryArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    top_k: usize,
    /// Group by full category combination instead of single categories.
    #[arg(long)]
    combinations: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Named preset: two-cultures or humanities-stress.
    #[arg(long, default_value = "two-cultures", conflicts_with = "config")]
    preset: String,
    /// TOML generator spec; unset keys take the two-cultures defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    papers_per_field_year: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(Error::Config(e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Compute(a) => cmd_compute(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::CategoryStats(a) => cmd_category_stats(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn load(args: &CorpusArgs) -> Result<(Corpus, CorpusConfig)> {
    let pubs = read_publications(&args.publications, &args.category_column)?;
    let refs = read_references(&args.references)?;
    let horizon = match args.horizon {
        Some(h) => h,
        None => pubs.iter().map(|p| p.year).max().ok_or(Error::EmptyCorpus)?,
    };
    let mut config = CorpusConfig::new(horizon);
    config.citable_types = args
        .citable_types
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    config.category_column = args.category_column.clone();
    let corpus = Corpus::build(pubs, refs, &config)?;
    if args.summary {
        println!("{}", serde_json::to_string_pretty(&corpus.summary())?);
    }
    Ok((corpus, config))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_run_meta(dir: &Path, command: &str, config: Value, details: Value) -> Result<()> {
    let meta = json!({
        "tool": "citenorm",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "details": details,
    });
    write_json(&dir.join("run_meta.json"), &meta)
}

fn corpus_config_json(args: &CorpusArgs, config: &CorpusConfig) -> Value {
    json!({
        "publications": args.publications,
        "references": args.references,
        "horizon_year": config.horizon_year,
        "citable_types": config.citable_types,
        "category_column": config.category_column,
    })
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let (corpus, config) = load(&args.corpus)?;
    let report = validate_corpus(&corpus);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !report.warnings.is_empty() {
        eprintln!("warnings: {}", report.warnings.len());
    }
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_run_meta(
            out,
            "validate",
            corpus_config_json(&args.corpus, &config),
            serde_json::to_value(&report)?,
        )?;
    }
    Ok(())
}

fn cmd_compute(args: ComputeArgs) -> Result<()> {
    let (corpus, corpus_config) = load(&args.corpus)?;
    let mut config = ComputeConfig::default();
    if let Some(list) = &args.indicators {
        config.indicators = parse_indicator_list(list)?;
        if config.indicators.is_empty() {
            return Err(Error::Config("--indicators selects no columns".into()));
        }
    }
    if let Some(w) = args.window_length {
        if w == 0 {
            return Err(Error::Config("--window-length must be at least 1".into()));
        }
        config.window_length = WindowLength::Fixed(w);
    }
    config.cohort_cache = !args.no_cohort_cache;
    let table = compute_indicators(&corpus, &config)?;

    create_dir(&args.out)?;
    table.write_csv(&args.out.join("indicators.csv"))?;
    table.write_jsonl(&args.out.join("indicators.jsonl"))?;
    let mut resolved = corpus_config_json(&args.corpus, &corpus_config);
    resolved["compute"] = serde_json::to_value(&config)?;
    write_run_meta(&args.out, "compute", resolved, serde_json::to_value(&table.meta)?)?;
    eprintln!("wrote {} rows to {}", table.rows.len(), args.out.display());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let table = IndicatorTable::read(&args.table)?;
    let records = read_recommendations(&args.recommendations)?;
    validate_recommendations(&records)?;
    let config = EvaluationConfig {
        reps: args.reps,
        seed: args.seed,
        first_only: args.first_only,
        margin_ci: if args.percentile_ci {
            MarginCi::Percentile
        } else {
            MarginCi::Normal
        },
    };
    let report = evaluate(&table, &records, &config)?;

    create_dir(&args.out)?;
    write_json(&args.out.join("evaluation.json"), &report)?;
    let text = report.to_text();
    let txt = args.out.join("evaluation.txt");
    fs::write(&txt, &text).map_err(|e| Error::io(&txt, e))?;
    report.write_margins_csv(&args.out.join("margins.csv"))?;
    write_run_meta(
        &args.out,
        "evaluate",
        json!({
            "table": args.table,
            "recommendations": args.recommendations,
            "evaluation": config,
        }),
        serde_json::to_value(&report.meta)?,
    )?;
    print!("{text}");
    Ok(())
}

fn cmd_category_stats(args: CategoryArgs) -> Result<()> {
    let (corpus, corpus_config) = load(&args.corpus)?;
    let mode = if args.combinations {
        CategoryMode::Combination
    } else {
        CategoryMode::Category
    };
    let index = CitationIndex::build(&corpus);
    let rows = category_stats(&corpus, &index, mode, Some(args.top_k));
    create_dir(&args.out)?;
    write_category_stats(&rows, &args.out.join("category_stats.csv"))?;
    let mut resolved = corpus_config_json(&args.corpus, &corpus_config);
    resolved["mode"] = serde_json::to_value(mode)?;
    resolved["top_k"] = json!(args.top_k);
    write_run_meta(&args.out, "category-stats", resolved, json!({ "rows": rows.len() }))?;
    for r in &rows {
        println!("{:<40} {:>8.2} {:>6} {:>6} {:>8}", r.label, r.mean, r.min, r.max, r.n);
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(path) => GeneratorSpec::from_path(path)?,
        None => GeneratorSpec::preset(&args.preset)?,
    };
    spec.seed = args.seed;
    if let Some(n) = args.papers_per_field_year {
        spec.papers_per_field_year = n;
    }
    spec.validate()?;
    let synthetic = generate_corpus(&spec)?;
    let records = generate_recommendations(&synthetic, &spec);
    write_synthetic(&synthetic, &records, &args.out)?;
    let summary = synthetic.corpus.summary();
    write_run_meta(
        &args.out,
        "synth",
        json!({
            "preset": if args.config.is_some() { Value::Null } else { json!(args.preset) },
            "config_file": args.config,
            "spec": spec,
        }),
        json!({ "corpus": summary, "recommendations": records.len() }),
    )?;
    eprintln!(
        "wrote {} publications, {} references and {} recommendations to {}",
        summary.publications,
        summary.linked_references + summary.unlinked_references,
        records.len(),
        args.out.display()
    );
    Ok(())
}
