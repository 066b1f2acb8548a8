use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use splitaudit_client::{BundleRequest, Client, DatasetRequest, Thresholds};
use splitaudit_core::diagnostics::{compare_splits, CompareOptions, SplitComparisonMatrix};
use splitaudit_core::ingest::parse_log_with;
use splitaudit_core::preprocess::PreprocessSpec;
use splitaudit_core::report::{
    render_comparison_markdown, render_comparison_text, render_markdown, render_stats_comparison_markdown,
    render_stats_markdown, run_audit, summarize, to_json, AuditReports, Document, StatsComparison, SummaryReport,
    ThresholdConfig,
};
use splitaudit_core::split::{
    describe_split, load_bundle_dir, split as split_log, write_bundle_dir, Provenance, SplitBundle,
};
use splitaudit_core::stats::{compare_stats, core_stats, repeat_stats, temporal_stats, timeline, StatsReport};
use splitaudit_core::time::format_datetime;
use splitaudit_core::{ColumnMapping, InteractionLog, ParseOptions, SubsetRole};
use splitaudit_server::ServerConfig;

use crate::args::{role_name, AuditArgs, CompareArgs, CompareFormat, MappingArgs, ServeArgs, SplitArgs, StatsArgs};

/// Display name of an input: its final path component.
fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_log(path: &Path, mapping: &ColumnMapping, args: &MappingArgs) -> Result<InteractionLog> {
    let options = ParseOptions {
        skip_malformed: args.skip_malformed,
        ordinal_column: None,
    };
    let parsed = parse_log_with(path, mapping, SubsetRole::Raw, &options)
        .with_context(|| format!("reading {}", path.display()))?;
    if parsed.skipped_rows > 0 {
        eprintln!("{}: skipped {} malformed rows", path.display(), parsed.skipped_rows);
    }
    Ok(parsed.log)
}

fn preprocess(log: InteractionLog, spec: &PreprocessSpec) -> Result<InteractionLog> {
    if spec.is_identity() {
        Ok(log)
    } else {
        Ok(spec.apply(&log)?)
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

pub fn stats(a: StatsArgs) -> Result<ExitCode> {
    let mapping = a.mapping.mapping()?;
    let pre = a.preprocess.spec()?;
    let from_bundle = a.input.is_dir();
    if from_bundle && !pre.is_identity() {
        bail!("preprocessing flags apply to log files, not bundle directories");
    }
    let reference_role = a.reference.as_deref().and_then(role_name);
    if reference_role.is_some() && !from_bundle {
        bail!("a subset role as --reference needs a bundle directory input");
    }

    let (analysed, reference) = if from_bundle {
        let bundle = load_bundle_dir(&a.input, None, &mapping)
            .with_context(|| format!("loading bundle {}", a.input.display()))?;
        let pick = |role| bundle.subset(role).cloned().expect("split role");
        let reference = match (reference_role, &a.reference) {
            (Some(role), _) => Some(pick(role)),
            (None, Some(path)) => Some(read_log(Path::new(path), &mapping, &a.mapping)?),
            (None, None) => None,
        };
        (pick(a.role), reference)
    } else {
        let log = preprocess(read_log(&a.input, &mapping, &a.mapping)?, &pre)?;
        let reference = match &a.reference {
            Some(path) => Some(read_log(Path::new(path), &mapping, &a.mapping)?),
            None => None,
        };
        (log, reference)
    };

    let reports = |log: &InteractionLog| -> Result<Vec<StatsReport>> {
        Ok(vec![
            StatsReport::Core(core_stats(log)?),
            StatsReport::Temporal(temporal_stats(log)?),
            StatsReport::Repeats(repeat_stats(log)?),
        ])
    };
    let analysed_reports = reports(&analysed)?;
    let mut logs = vec![(analysed.role(), &analysed)];
    if let Some(r) = &reference {
        logs.push((r.role(), r));
    }
    let series = timeline(&logs, a.granularity, a.date_range)?;

    let mut docs: Vec<(String, Document)> = analysed_reports
        .iter()
        .cloned()
        .map(|r| match r {
            StatsReport::Core(r) => ("core_stats".to_owned(), Document::CoreStats(r)),
            StatsReport::Temporal(r) => ("temporal_stats".to_owned(), Document::TemporalStats(r)),
            StatsReport::Repeats(r) => ("repeat_stats".to_owned(), Document::RepeatStats(r)),
        })
        .collect();
    docs.push(("timeline".to_owned(), Document::Timeline(series)));

    let title = source_name(&a.input);
    let mut markdown = render_stats_markdown(&title, &analysed_reports);
    if let Some(r) = &reference {
        for (analysed, reference) in analysed_reports.iter().zip(reports(r)?) {
            let comparison = compare_stats(analysed, &reference)?;
            markdown.push('\n');
            markdown.push_str(&render_stats_comparison_markdown(&comparison));
            markdown.push('\n');
            docs.push((
                format!("stats_comparison_{}", analysed.kind()),
                Document::StatsComparison(StatsComparison {
                    analysed: analysed.clone(),
                    reference,
                    comparison,
                }),
            ));
        }
    }

    match &a.output.out_dir {
        Some(dir) => {
            create_dir(dir)?;
            if a.output.format.json() {
                for (stem, doc) in &docs {
                    write_file(dir, &format!("{stem}.json"), &to_json(doc))?;
                }
            }
            if a.output.format.markdown() {
                write_file(dir, "stats.md", markdown.as_bytes())?;
            }
        }
        None if a.output.format.markdown() => print(&markdown)?,
        None => {
            for (_, doc) in &docs {
                print(&String::from_utf8_lossy(&to_json(doc)))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn split(a: SplitArgs) -> Result<ExitCode> {
    let mapping = a.mapping.mapping()?;
    let pre = a.preprocess.spec()?;
    let spec = a.split.spec()?.context("--split loo|gts is required")?;

    let raw = read_log(&a.input, &mapping, &a.mapping)?;
    let provenance = Provenance::new(source_name(&a.input), pre.clone(), raw.len());
    let working = preprocess(raw, &pre)?;
    let bundle = split_log(&working, &spec, provenance)?;
    let mut written = write_bundle_dir(&bundle, &a.out_dir, &a.prefix)
        .with_context(|| format!("writing bundle to {}", a.out_dir.display()))?;
    written.push(write_file(
        &a.out_dir,
        "split_description.json",
        &to_json(&Document::SplitDescription(describe_split(&bundle))),
    )?);
    for path in written {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn load_thresholds(path: Option<&Path>) -> Result<ThresholdConfig> {
    match path {
        None => Ok(ThresholdConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ThresholdConfig::from_json_str(&text).with_context(|| format!("thresholds {}", p.display()))
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set, otherwise the wall clock.
fn timestamp_now() -> Result<String> {
    let secs = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v.trim().parse::<i64>().context("SOURCE_DATE_EPOCH is not an integer")?,
        Err(_) => SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs() as i64,
    };
    Ok(format!("{} UTC", format_datetime(secs * 1000)))
}

pub fn audit(a: AuditArgs) -> Result<ExitCode> {
    let mapping = a.mapping.mapping()?;
    let pre = a.preprocess.spec()?;
    let spec = a.split.spec()?;
    let thresholds = load_thresholds(a.thresholds.as_deref())?;
    let from_bundle = a.input.is_dir();
    if from_bundle && spec.is_some() {
        bail!(
            "--split applies to log files; {} is a bundle directory",
            a.input.display()
        );
    }
    if !from_bundle && spec.is_none() {
        bail!("auditing a log file needs --split loo|gts");
    }
    if !from_bundle && (a.dataset.is_some() || a.prefix.is_some()) {
        bail!("--dataset and --prefix apply to bundle directories");
    }
    let name = a
        .name
        .clone()
        .unwrap_or_else(|| source_name(a.dataset.as_deref().unwrap_or(&a.input)));

    let (reports, mut summary) = match &a.server {
        Some(url) => runtime()?.block_on(audit_remote(url, &a, &name, &mapping, &pre, &thresholds))?,
        None => {
            let (bundle, dataset) = if from_bundle {
                let bundle = load_bundle_dir(&a.input, a.prefix.as_deref(), &mapping)
                    .with_context(|| format!("loading bundle {}", a.input.display()))?;
                let dataset = match &a.dataset {
                    Some(p) => Some(preprocess(read_log(p, &mapping, &a.mapping)?, &pre)?),
                    None => None,
                };
                (bundle, dataset)
            } else {
                let raw = read_log(&a.input, &mapping, &a.mapping)?;
                let provenance = Provenance::new(name.clone(), pre.clone(), raw.len());
                let working = preprocess(raw, &pre)?;
                let spec = spec.as_ref().expect("checked above");
                (split_log(&working, spec, provenance)?, Some(working))
            };
            let reports = run_audit(&bundle, dataset.as_ref(), Some(&name), a.granularity)?;
            let summary = summarize(&reports, &thresholds);
            (reports, summary)
        }
    };
    if a.timestamp {
        summary.generated_at = Some(timestamp_now()?);
    }
    write_audit(&a, &reports, &summary)?;

    if a.fail_on_alert && summary.has_alert() {
        let alerts: Vec<&str> = summary
            .cards
            .iter()
            .filter(|c| c.status == splitaudit_core::report::CardStatus::Alert)
            .map(|c| c.metric.as_str())
            .collect();
        eprintln!("alert: {}", alerts.join(", "));
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_audit(a: &AuditArgs, reports: &AuditReports, summary: &SummaryReport) -> Result<()> {
    let format = a.output.format;
    let markdown = || render_markdown(summary, reports);
    match &a.output.out_dir {
        Some(dir) => {
            create_dir(dir)?;
            if format.json() {
                for (stem, doc) in reports.documents() {
                    write_file(dir, &format!("{stem}.json"), &to_json(&doc))?;
                }
                write_file(dir, "audit.json", &to_json(&Document::Audit(reports.clone())))?;
                write_file(dir, "summary.json", &to_json(&Document::Summary(summary.clone())))?;
            }
            if format.markdown() {
                write_file(dir, "audit.md", markdown().as_bytes())?;
            }
        }
        None if format.markdown() => print(&markdown())?,
        None => print(&String::from_utf8_lossy(&to_json(&Document::Summary(summary.clone()))))?,
    }
    Ok(())
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::fs::canonicalize(path).with_context(|| format!("resolving {}", path.display()))
}

async fn audit_remote(
    url: &str,
    a: &AuditArgs,
    name: &str,
    mapping: &ColumnMapping,
    pre: &PreprocessSpec,
    thresholds: &ThresholdConfig,
) -> Result<(AuditReports, SummaryReport)> {
    let client = Client::new(url)?;
    let register = |path: &Path| -> Result<DatasetRequest> {
        Ok(DatasetRequest {
            name: Some(name.to_owned()),
            path: Some(absolute(path)?),
            mapping: Some(mapping.clone()),
            preprocess: pre.clone(),
            skip_malformed: a.mapping.skip_malformed,
            ..Default::default()
        })
    };
    let bundle_id = if a.input.is_dir() {
        let dataset = match &a.dataset {
            Some(p) => Some(client.register_dataset(&register(p)?).await?.id),
            None => None,
        };
        let req = BundleRequest {
            path: absolute(&a.input)?,
            prefix: a.prefix.clone(),
            name: Some(name.to_owned()),
            mapping: Some(mapping.clone()),
            dataset,
        };
        client.register_bundle(&req).await?.id
    } else {
        let ds = client.register_dataset(&register(&a.input)?).await?;
        let spec = a.split.spec()?.expect("checked by caller");
        client.create_split(&ds.id, &spec, None).await?.id
    };
    let reports = client.audit(&bundle_id, a.granularity).await?;
    let summary = client
        .summary(&bundle_id, &Thresholds::Inline(thresholds.clone()), a.granularity)
        .await?;
    Ok((reports, summary))
}

pub fn compare(a: CompareArgs) -> Result<ExitCode> {
    let mapping = a.mapping.mapping()?;
    let pre = a.preprocess.spec()?;
    let files: Vec<&PathBuf> = a.inputs.iter().filter(|p| !p.is_dir()).collect();
    if !files.is_empty() && a.specs.is_empty() {
        bail!("log file inputs need at least one --spec");
    }
    if files.is_empty() && !a.specs.is_empty() {
        bail!("--spec needs a log file input");
    }

    let mut bundles: Vec<SplitBundle> = Vec::new();
    let mut reference = None;
    for input in &a.inputs {
        if input.is_dir() {
            bundles.push(
                load_bundle_dir(input, None, &mapping)
                    .with_context(|| format!("loading bundle {}", input.display()))?,
            );
            continue;
        }
        let raw = read_log(input, &mapping, &a.mapping)?;
        let provenance = Provenance::new(source_name(input), pre.clone(), raw.len());
        let working = preprocess(raw, &pre)?;
        for spec in &a.specs {
            let spec = spec.clone().with_cold_filtering(!a.keep_cold);
            bundles.push(
                split_log(&working, &spec, provenance.clone())
                    .with_context(|| format!("splitting {} with {}", input.display(), spec.label()))?,
            );
        }
        if files.len() == 1 {
            reference = Some(working);
        }
    }
    let refs: Vec<&SplitBundle> = bundles.iter().collect();
    let matrix: SplitComparisonMatrix = compare_splits(
        &refs,
        &CompareOptions {
            reference: reference.as_ref(),
            allow_provenance_mismatch: a.allow_provenance_mismatch,
        },
    )?;
    for w in &matrix.warnings {
        eprintln!("warning: {w}");
    }
    let (file, body) = match a.format {
        CompareFormat::Text => ("comparison.txt", render_comparison_text(&matrix).into_bytes()),
        CompareFormat::Markdown => ("comparison.md", render_comparison_markdown(&matrix).into_bytes()),
        CompareFormat::Json => ("comparison.json", to_json(&Document::SplitComparison(matrix))),
    };
    match &a.out_dir {
        Some(dir) => {
            create_dir(dir)?;
            write_file(dir, file, &body)?;
        }
        None => print(&String::from_utf8_lossy(&body))?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn serve(a: ServeArgs) -> Result<ExitCode> {
    let config = ServerConfig {
        max_body_bytes: a.max_body_bytes,
        data_dir: a.data_dir,
    };
    eprintln!("listening on http://{}", a.bind);
    runtime()?.block_on(splitaudit_server::serve(a.bind, config))?;
    Ok(ExitCode::SUCCESS)
}
