use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::{de::DeserializeOwned, Serialize};
use vcurate::analytics::{load_counts_file, load_predictions, AnalyticsError};
use vcurate::corpus::{
    reuse_or_enrich_all, status_counts, write_atomically, write_enriched_jsonl, write_json,
    LoadReport, Loaded,
};
use vcurate::sampler::SamplerError;
use vcurate::{
    balance_sample, classification_metrics, emit_report, holdout_split, label_distribution,
    load_jsonl, refine, token_stats, write_jsonl, CurationReport, FunctionRecord, MetricsReport,
    Normalizer, Report, SplitSpec, TokenCounter,
};

use crate::{
    CmdResult, CounterArg, CurateArgs, Failure, MetricsArgs, NormalizeArgs, ReportArgs,
    SampleSplitArgs, StatsArgs,
};

fn load(path: &Path) -> Result<Loaded, Failure> {
    let loaded = load_jsonl(path).map_err(Failure::io)?;
    let r = &loaded.report;
    if !r.diagnostics.is_empty() {
        eprintln!(
            "{}: skipped {} line(s) ({} malformed, {} missing field, {} invalid field)",
            path.display(),
            r.diagnostics.len(),
            r.malformed,
            r.missing_field,
            r.invalid_field
        );
        for d in r.diagnostics.iter().take(10) {
            eprintln!("  {d}");
        }
    }
    Ok(loaded)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::io)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::validation)
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    write_atomically(path, |w| {
        w.write_all(text.as_bytes())
            .map_err(|e| vcurate::corpus::CorpusError::Io {
                path: path.to_owned(),
                source: e,
            })
    })
    .map_err(Failure::io)
}

fn analytics_failure(e: AnalyticsError) -> Failure {
    match e {
        AnalyticsError::Io { .. } | AnalyticsError::InvalidLimit => Failure::io(e),
        _ => Failure::validation(e),
    }
}

#[derive(Serialize)]
struct NormalizeReport<'a> {
    load: &'a LoadReport,
    status_counts: BTreeMap<&'static str, usize>,
}

pub fn normalize(args: NormalizeArgs) -> CmdResult {
    let loaded = load(&args.input)?;
    let enriched = vcurate::corpus::enrich_all(loaded.records, &Normalizer::new());
    write_enriched_jsonl(&enriched, &args.output).map_err(Failure::io)?;

    let counts: BTreeMap<&'static str, usize> = status_counts(&enriched)
        .into_iter()
        .map(|(s, n)| (s.as_str(), n))
        .collect();
    for (status, n) in &counts {
        println!("{status:<12}{n}");
    }
    if let Some(path) = &args.report {
        let report = NormalizeReport {
            load: &loaded.report,
            status_counts: counts,
        };
        write_json(path, &report).map_err(Failure::io)?;
    }
    Ok(())
}

pub fn curate(args: CurateArgs) -> CmdResult {
    let loaded = load(&args.input)?;
    let enriched = reuse_or_enrich_all(loaded.records, &Normalizer::new());
    let (retained, report) = refine(&enriched);
    let kept: Vec<_> = retained.into_iter().map(|i| enriched[i].clone()).collect();
    write_enriched_jsonl(&kept, &args.output).map_err(Failure::io)?;
    if let Some(path) = &args.report {
        write_json(path, &report).map_err(Failure::io)?;
    }
    let summary = emit_report(None, None, Some(report), None).expect("curation section present");
    print!("{}", summary.render_text());
    Ok(())
}

#[derive(Serialize)]
struct SplitManifest {
    seed: u64,
    train_fraction: f64,
    val_fraction: f64,
    test_fraction: f64,
    per_class: Option<usize>,
    input_records: usize,
    subset_size: usize,
    /// Position in the input corpus of each subset.jsonl line.
    subset_source_indices: Vec<usize>,
    /// The split lists hold positions in subset.jsonl.
    train: Vec<usize>,
    validation: Vec<usize>,
    test: Vec<usize>,
}

fn sampler_failure(e: SamplerError) -> Failure {
    let code = match e {
        SamplerError::InsufficientClass { .. } => Failure::INSUFFICIENT_CLASS,
        SamplerError::EmptySubset => Failure::VALIDATION,
        _ => Failure::IO,
    };
    Failure {
        code,
        error: e.into(),
    }
}

pub fn sample_split(args: SampleSplitArgs) -> CmdResult {
    let mut spec = SplitSpec::new(args.train, args.val, args.test, args.seed).map_err(sampler_failure)?;
    if let Some(n) = args.per_class {
        spec = spec.with_per_class(n).map_err(sampler_failure)?;
    }
    let records = load(&args.input)?.records;

    let source: Vec<usize> = match args.per_class {
        Some(n) => {
            let labels: Vec<u8> = records.iter().map(|r| r.target).collect();
            balance_sample(&labels, n, args.seed).map_err(sampler_failure)?
        }
        None => (0..records.len()).collect(),
    };
    let positions: Vec<usize> = (0..source.len()).collect();
    let split = holdout_split(&positions, &spec).map_err(sampler_failure)?;

    fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))
        .map_err(Failure::io)?;
    let subset: Vec<FunctionRecord> = source.iter().map(|&i| records[i].clone()).collect();
    let pick = |ix: &[usize]| -> Vec<FunctionRecord> { ix.iter().map(|&i| subset[i].clone()).collect() };
    let out = |name: &str| args.output.join(name);
    write_jsonl(&subset, out("subset.jsonl")).map_err(Failure::io)?;
    write_jsonl(&pick(&split.train), out("train.jsonl")).map_err(Failure::io)?;
    write_jsonl(&pick(&split.validation), out("validation.jsonl")).map_err(Failure::io)?;
    write_jsonl(&pick(&split.test), out("test.jsonl")).map_err(Failure::io)?;

    println!(
        "subset {}  train {}  validation {}  test {}",
        subset.len(),
        split.train.len(),
        split.validation.len(),
        split.test.len()
    );
    for (label, n) in label_distribution(subset.iter().map(|r| r.target)) {
        println!("  label {label}: {n}");
    }
    let manifest = SplitManifest {
        seed: spec.seed,
        train_fraction: spec.train_fraction,
        val_fraction: spec.val_fraction,
        test_fraction: spec.test_fraction,
        per_class: spec.per_class,
        input_records: records.len(),
        subset_size: subset.len(),
        subset_source_indices: source,
        train: split.train,
        validation: split.validation,
        test: split.test,
    };
    write_json(out("split_manifest.json"), &manifest).map_err(Failure::io)
}

pub fn stats(args: StatsArgs) -> CmdResult {
    let counter = match (&args.counts_file, args.counter) {
        (Some(path), _) => TokenCounter::External(load_counts_file(path).map_err(analytics_failure)?),
        (None, Some(CounterArg::Surface)) => TokenCounter::Surface,
        (None, _) => TokenCounter::Lexical,
    };
    let records = load(&args.input)?.records;
    let distribution = label_distribution(records.iter().map(|r| r.target));
    let texts: Vec<String> = if args.processed {
        reuse_or_enrich_all(records, &Normalizer::new())
            .into_iter()
            .map(|e| e.norm.normalized)
            .collect()
    } else {
        records.into_iter().map(|r| r.func).collect()
    };
    let stats = token_stats(&texts, args.limit, &counter).map_err(analytics_failure)?;
    let report = emit_report(Some(stats), Some(distribution), None, None).expect("sections present");
    finish_report(&report, args.output.as_deref(), None)
}

pub fn metrics(args: MetricsArgs) -> CmdResult {
    let predictions = load_predictions(&args.input).map_err(analytics_failure)?;
    let records = load(&args.labels)?.records;
    let mut preds = Vec::with_capacity(predictions.len());
    let mut labels = Vec::with_capacity(predictions.len());
    for (index, p) in predictions {
        let record = records.get(index).ok_or_else(|| {
            Failure::validation(anyhow::anyhow!(
                "prediction index {index} is outside the {}-record label corpus",
                records.len()
            ))
        })?;
        preds.push(p);
        labels.push(record.target);
    }
    let m = classification_metrics(&preds, &labels, args.averaging.into()).map_err(analytics_failure)?;
    if let Some(path) = &args.output {
        write_json(path, &m).map_err(Failure::io)?;
    }
    let summary = emit_report(None, None, None, Some(m)).expect("metrics section present");
    print!("{}", summary.render_text());
    Ok(())
}

pub fn report(args: ReportArgs) -> CmdResult {
    let (stats, distribution) = match &args.stats {
        Some(path) => {
            let r: Report = read_json(path)?;
            (r.token_stats, r.label_distribution)
        }
        None => (None, None),
    };
    let curation: Option<CurationReport> = args.curation.as_deref().map(read_json).transpose()?;
    let metrics: Option<MetricsReport> = args.metrics.as_deref().map(read_json).transpose()?;
    let report = emit_report(stats, distribution, curation, metrics).map_err(Failure::validation)?;
    finish_report(&report, Some(&args.output), args.text.as_deref())
}

fn finish_report(report: &Report, json: Option<&Path>, text: Option<&Path>) -> CmdResult {
    let rendered = report.render_text();
    if let Some(path) = json {
        write_text(path, &report.to_json())?;
    }
    if let Some(path) = text {
        write_text(path, &rendered)?;
    }
    print!("{rendered}");
    Ok(())
}
