//! Deterministic Markdown and plain-text rendering. Numbers are printed
//! with four decimals, durations in adaptive units.

use std::fmt::Write;

use super::summary::{AuditReports, SummaryReport};
use crate::diagnostics::{CountShare, SplitComparisonMatrix};
use crate::stats::{ComparisonTable, DistributionSummary, StatsReport};
use crate::time::{format_date, format_datetime, format_duration};

fn num(v: f64) -> String {
    format!("{v:.4}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), num)
}

fn dur(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), format_duration)
}

fn share(s: &CountShare) -> String {
    format!("{} / {} ({}%)", s.count, s.total, num(s.pct))
}

fn anchor(link: &str) -> String {
    link.replace('_', "-")
}

/// Statistic label and how to render it from one side's report.
type Row<'a, R> = (&'a str, &'a dyn Fn(&R) -> String);

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    fn kv(&mut self, key: &str, value: impl Into<String>) {
        self.row([key.to_owned(), value.into()]);
    }

    fn markdown(&self, out: &mut String) {
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        out.push_str(&line(&self.header));
        out.push_str(&line(&vec!["---".to_owned(); self.header.len()]));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out.push('\n');
    }

    fn text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let fmt = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            format!("{}\n", parts.join("  ").trim_end())
        };
        let mut out = fmt(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&fmt(&rule));
        for r in &self.rows {
            out.push_str(&fmt(r));
        }
        out
    }
}

fn distribution_rows(t: &mut Table, name: &str, d: &DistributionSummary, duration: bool) {
    let f = |v: Option<f64>| if duration { dur(v) } else { opt(v) };
    t.kv(&format!("{name} mean"), f(d.mean));
    t.kv(&format!("{name} median"), f(d.median()));
    t.kv(&format!("{name} p95"), f(d.quantile(0.95)));
    t.kv(&format!("{name} max"), f(d.max));
}

/// Summary table followed by one section per available diagnostic.
pub fn render_markdown(summary: &SummaryReport, details: &AuditReports) -> String {
    let mut out = String::new();
    let title = summary.dataset.as_deref().unwrap_or("interaction log");
    let _ = writeln!(out, "# Audit: {title}\n");
    let mut meta = Table::new(["Field", "Value"]);
    meta.kv("toolkit version", summary.toolkit_version.as_str());
    if let Some(label) = &summary.split_label {
        meta.kv("split", label.as_str());
    }
    if let Some(p) = &summary.provenance {
        meta.kv("source", p.source.as_str());
        if let Some(n) = p.source_interactions {
            meta.kv("source interactions", n.to_string());
        }
        if let Some(pre) = &p.preprocessing {
            meta.kv("preprocessing", serde_json::to_string(pre).expect("spec serializes"));
        }
    }
    if let Some(at) = &summary.generated_at {
        meta.kv("generated at", at.as_str());
    }
    meta.markdown(&mut out);

    out.push_str("## Summary\n\n");
    let mut cards = Table::new(["Metric", "Value", "Status", "Details"]);
    for c in &summary.cards {
        cards.row([
            c.metric.clone(),
            opt(c.value),
            c.status.as_str().to_owned(),
            format!("[{}](#{})", c.link, anchor(&c.link)),
        ]);
    }
    cards.markdown(&mut out);

    if details.core.is_some() || details.temporal.is_some() {
        out.push_str("## Core temporal\n\n");
        let mut t = Table::new(["Statistic", "Value"]);
        if let Some(c) = &details.core {
            t.kv("subset", c.role.as_str());
            t.kv("users", c.n_users.to_string());
            t.kv("items", c.n_items.to_string());
            t.kv("interactions", c.n_interactions.to_string());
            t.kv("avg sequence length", num(c.avg_seq_len));
            t.kv("density %", num(c.density_pct));
            distribution_rows(&mut t, "sequence length", &c.seq_len, false);
            distribution_rows(&mut t, "item popularity", &c.popularity, false);
        }
        if let Some(tm) = &details.temporal {
            t.kv("start", format_datetime(tm.start_ts));
            t.kv("end", format_datetime(tm.end_ts));
            t.kv("timeframe", format_duration(tm.timeframe_ms as f64));
            t.kv("collision rate %", num(tm.collision_rate_pct));
            t.kv("colliding interactions", tm.collision_count.to_string());
            distribution_rows(&mut t, "delta t", &tm.delta_t, true);
            distribution_rows(&mut t, "user lifetime", &tm.user_lifetime, true);
            distribution_rows(&mut t, "item lifetime", &tm.item_lifetime, true);
        }
        t.markdown(&mut out);
        if let Some(tm) = &details.temporal {
            let _ = writeln!(out, "Collision rate: {}\n", tm.collision_definition);
        }
    }

    if let Some(r) = &details.repeats {
        out.push_str("## Repeats\n\n");
        let mut t = Table::new(["Statistic", "Value"]);
        t.kv("interactions", r.n_interactions.to_string());
        t.kv("repeated interactions", r.repeated_count.to_string());
        t.kv("repeated interactions %", num(r.repeated_interactions_pct));
        t.kv("consecutive repeats", r.consecutive_count.to_string());
        t.kv("consecutive repeats %", num(r.consecutive_repeats_pct));
        distribution_rows(&mut t, "per-user repeat share", &r.per_user_repeat_share, false);
        t.markdown(&mut out);
    }

    if let Some(tl) = &details.timeline {
        out.push_str("## Timeline\n\n");
        let _ = writeln!(out, "Granularity: {}\n", tl.granularity);
        let mut t = Table::new([
            "Subset",
            "Buckets",
            "First bucket",
            "Last bucket",
            "Interactions",
            "Excluded",
        ]);
        for s in &tl.series {
            let total: usize = s.buckets.iter().map(|b| b.count).sum();
            let edge = |b: Option<&crate::stats::Bucket>| b.map_or_else(|| "n/a".to_owned(), |b| format_date(b.start));
            t.row([
                s.role.as_str().to_owned(),
                s.buckets.len().to_string(),
                edge(s.buckets.first()),
                edge(s.buckets.last()),
                total.to_string(),
                s.excluded.to_string(),
            ]);
        }
        t.markdown(&mut out);
    }

    if let Some(s) = &details.split {
        out.push_str("## Split\n\n");
        let _ = writeln!(out, "Strategy: `{}`\n", s.label);
        let mut t = Table::new(["Subset", "Users", "Items", "Interactions", "Start", "End"]);
        for r in &s.roles {
            let (start, end) = r.time_range.map_or(("n/a".to_owned(), "n/a".to_owned()), |tr| {
                (format_datetime(tr.start), format_datetime(tr.end))
            });
            t.row([
                r.role.as_str().to_owned(),
                r.n_users.to_string(),
                r.n_items.to_string(),
                r.n_interactions.to_string(),
                start,
                end,
            ]);
        }
        t.markdown(&mut out);
        let _ = writeln!(
            out,
            "Users without input: validation {}, test {}\n",
            s.val_users_without_input, s.test_users_without_input
        );
    }

    if !details.leakage.is_empty() {
        out.push_str("## Leakage\n\n");
        let mut t = Table::new(["Statistic", "validation", "test"]);
        let pick = |f: &dyn Fn(&crate::diagnostics::LeakageReport) -> String, side| {
            details.leakage(side).map_or_else(|| "n/a".to_owned(), f)
        };
        use crate::split::EvalSide::{Test, Validation};
        let rows: [Row<'_, crate::diagnostics::LeakageReport>; 5] = [
            ("targets", &|r| r.n_targets.to_string()),
            ("shared interactions", &|r| r.shared_interactions.to_string()),
            ("time overlap %", &|r| num(r.overlap_pct)),
            ("leaked targets", &|r| share(&r.leaked_targets)),
            ("leaked targets (same item)", &|r| share(&r.leaked_item_targets)),
        ];
        for (name, f) in rows {
            t.row([name.to_owned(), pick(f, Validation), pick(f, Test)]);
        }
        t.markdown(&mut out);
    }

    if !details.cold_start.is_empty() {
        out.push_str("## Cold start\n\n");
        use crate::split::EvalSide::{Test, Validation};
        let mut t = Table::new(["Statistic", "validation", "test"]);
        let rows: [Row<'_, crate::diagnostics::ColdStartReport>; 3] = [
            ("cold users", &|r| share(&r.cold_users)),
            ("cold items", &|r| share(&r.cold_items)),
            ("cold target interactions", &|r| share(&r.cold_interactions)),
        ];
        for (name, f) in rows {
            let cell = |side| details.cold_start(side).map_or_else(|| "n/a".to_owned(), f);
            t.row([name.to_owned(), cell(Validation), cell(Test)]);
        }
        t.markdown(&mut out);
    }

    if !details.shift.is_empty() {
        out.push_str("## Shift\n\n");
        use crate::split::EvalSide::{Test, Validation};
        let mut t = Table::new(["Statistic", "validation", "test"]);
        let rows: [Row<'_, crate::diagnostics::ShiftReport>; 7] = [
            ("time gap KS", &|r| opt(r.timegap_ks)),
            ("position KS", &|r| opt(r.position_ks)),
            ("target gap median", &|r| dur(r.target_gaps.median())),
            ("reference gap median", &|r| dur(r.reference_gaps.median())),
            ("target position median", &|r| opt(r.target_positions.median())),
            ("reference position median", &|r| opt(r.reference_positions.median())),
            ("targets without input", &|r| r.targets_without_input.to_string()),
        ];
        for (name, f) in rows {
            let cell = |side| details.shift(side).map_or_else(|| "n/a".to_owned(), f);
            t.row([name.to_owned(), cell(Validation), cell(Test)]);
        }
        t.markdown(&mut out);
    }

    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

fn comparison_table(m: &SplitComparisonMatrix) -> Table {
    let mut t = Table::new([
        "split",
        "overlap_pct",
        "shared",
        "leaked_target_pct",
        "leaked_item_target_pct",
        "cold_users_pct",
        "cold_items_pct",
        "cold_interactions_pct",
        "timegap_ks",
        "position_ks",
    ]);
    for r in &m.rows {
        t.row([
            r.label.clone(),
            num(r.overlap_pct),
            r.shared_interactions.to_string(),
            num(r.leaked_target_pct),
            num(r.leaked_item_target_pct),
            num(r.cold_users_pct),
            num(r.cold_items_pct),
            num(r.cold_interactions_pct),
            opt(r.timegap_ks),
            opt(r.position_ks),
        ]);
    }
    t
}

/// Column-aligned plain text, one row per split.
pub fn render_comparison_text(m: &SplitComparisonMatrix) -> String {
    let mut out = comparison_table(m).text();
    for w in &m.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn render_comparison_markdown(m: &SplitComparisonMatrix) -> String {
    let mut out = String::from("# Split comparison\n\n");
    comparison_table(m).markdown(&mut out);
    for w in &m.warnings {
        let _ = writeln!(out, "> warning: {w}\n");
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

/// Dataset statistics as one field/value table per report.
pub fn render_stats_markdown(title: &str, reports: &[StatsReport]) -> String {
    let mut out = format!("# Statistics: {title}\n\n");
    for r in reports {
        let _ = writeln!(out, "## {}\n", r.kind());
        let mut t = Table::new(["Field", "Value"]);
        for (field, value) in r.numeric_fields() {
            t.row([field, opt(value)]);
        }
        t.markdown(&mut out);
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

/// Analysed vs reference values with relative change.
pub fn render_stats_comparison_markdown(table: &ComparisonTable) -> String {
    let mut out = format!("## Comparison with reference ({})\n\n", table.kind);
    let mut t = Table::new(["Field", "Analysed", "Reference", "Change %"]);
    for r in &table.rows {
        t.row([r.field.clone(), opt(r.analysed), opt(r.reference), opt(r.delta_pct)]);
    }
    t.markdown(&mut out);
    out.pop();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{summarize, ThresholdConfig};

    #[test]
    fn empty_details_give_summary_only() {
        let details = AuditReports::default();
        let s = summarize(&details, &ThresholdConfig::default());
        let md = render_markdown(&s, &details);
        assert!(md.contains("## Summary"));
        assert_eq!(md.matches("## ").count(), 1);
        assert!(md.contains("| collision_rate_pct | n/a | not_applicable | [core_temporal](#core-temporal) |"));
        assert_eq!(md, render_markdown(&s, &details));
    }

    #[test]
    fn text_table_aligns() {
        let t = {
            let mut t = Table::new(["a", "bb"]);
            t.row(["long", "1"]);
            t
        };
        assert_eq!(t.text(), "a     bb\n----  --\nlong   1\n");
    }
}
