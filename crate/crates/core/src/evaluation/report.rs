use super::metrics::Metrics;

pub const METRICS_CSV_HEADER: &str = "param,p_d,p_fa,p_md,accuracy";

/// Metric value with four fractional digits.
pub fn format_metric(v: f64) -> String {
    format!("{v:.4}")
}

/// Shortest decimal form of a grid value.
pub(crate) fn format_param(v: f64) -> String {
    format!("{v}")
}

/// CSV with one row per labeled metrics record.
pub fn metrics_csv(rows: &[(String, Metrics)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_CSV_HEADER.split(',')).expect("in-memory write");
    for (label, m) in rows {
        w.write_record([
            label.clone(),
            format_metric(m.p_d),
            format_metric(m.p_fa),
            format_metric(m.p_md),
            format_metric(m.accuracy),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

/// Fixed-width table of percentages, one row per record.
pub fn text_table(title: &str, first_column: &str, rows: &[(String, Metrics)]) -> String {
    let width = rows.iter().map(|(l, _)| l.len()).chain([first_column.len()]).max().unwrap_or(0);
    let mut out = format!("{title}\n");
    let header = format!("{first_column:<width$}  {:>7}  {:>7}  {:>7}  {:>8}", "P_d", "P_fa", "P_md", "Accuracy");
    out.push_str(&header);
    out.push('\n');
    out.push_str(&"-".repeat(header.len()));
    out.push('\n');
    let pct = |v: f64| format!("{:.1}%", v * 100.0);
    for (label, m) in rows {
        out.push_str(&format!(
            "{label:<width$}  {:>7}  {:>7}  {:>7}  {:>8}\n",
            pct(m.p_d),
            pct(m.p_fa),
            pct(m.p_md),
            pct(m.accuracy)
        ));
    }
    out
}
