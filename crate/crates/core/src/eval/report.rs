use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::Report;

/// Canonical JSON: keys sorted, two-space indentation, trailing newline.
pub fn report_json(report: &Report) -> Result<String> {
    // serde_json::Value keeps object keys in a BTreeMap, hence sorted.
    let value = serde_json::to_value(report)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

/// Writes the JSON report to `path` and its markdown table next to it, with
/// the extension replaced by `md`.
pub fn write_report(report: &Report, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_json(report)?).map_err(|e| Error::io(path, e))?;
    let md = path.with_extension("md");
    std::fs::write(&md, render_table(std::slice::from_ref(report))).map_err(|e| Error::io(&md, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn threshold_label(t: f64) -> String {
    format!("NoC{}", (t * 100.0).round() as i64)
}

/// Markdown table with one row per (strategy, predictor) and NoC columns per
/// dataset.
pub fn render_table(reports: &[Report]) -> String {
    let mut datasets: Vec<(&str, &[f64])> = Vec::new();
    let mut rows: Vec<(&str, &str)> = Vec::new();
    for r in reports {
        if !datasets.iter().any(|(d, _)| *d == r.dataset) {
            datasets.push((&r.dataset, &r.thresholds));
        }
        let key = (r.strategy.name(), r.predictor.as_str());
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    let mut out = String::from("| Strategy | Predictor |");
    let mut rule = String::from("|---|---|");
    for (d, ts) in &datasets {
        for &t in ts.iter() {
            let _ = write!(out, " {d} {} |", threshold_label(t));
            rule.push_str("---:|");
        }
    }
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for (strategy, predictor) in rows {
        let _ = write!(out, "| {strategy} | {predictor} |");
        for (d, ts) in &datasets {
            let found = reports
                .iter()
                .find(|r| r.dataset == *d && r.strategy.name() == strategy && r.predictor == predictor);
            for k in 0..ts.len() {
                match found.and_then(|r| r.mean_noc.get(k)) {
                    Some(v) => {
                        let _ = write!(out, " {v:.2} |");
                    }
                    None => out.push_str(" - |"),
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{InstanceResult, Strategy};
    use crate::interaction::Policy;

    fn report(dataset: &str, strategy: Strategy, means: [f64; 3]) -> Report {
        Report {
            dataset: dataset.into(),
            strategy,
            predictor: "geodesic".into(),
            policy: strategy.apply(Policy::default()),
            thresholds: vec![0.85, 0.9, 0.95],
            mean_noc: means.to_vec(),
            failures: 0,
            skipped: vec![],
            instances: vec![InstanceResult {
                id: "a".into(),
                noc: vec![1, 2, 3],
                reached: vec![true, true, true],
                failed: false,
                error: None,
                final_iou: 0.97,
                trace: vec![],
            }],
        }
    }

    #[test]
    fn single_row() {
        let t = render_table(&[report("synth", Strategy::Adaptive, [1.0, 2.0, 3.5])]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "| Strategy | Predictor | synth NoC85 | synth NoC90 | synth NoC95 |");
        assert_eq!(lines[2], "| adaptive | geodesic | 1.00 | 2.00 | 3.50 |");
    }

    #[test]
    fn two_strategies_two_datasets() {
        let t = render_table(&[
            report("a", Strategy::Clicks, [1.0, 2.0, 3.0]),
            report("a", Strategy::Adaptive, [1.0, 1.5, 2.0]),
            report("b", Strategy::Clicks, [4.0, 5.0, 6.0]),
        ]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("a NoC95") && lines[0].contains("b NoC85"));
        assert_eq!(lines[3], "| adaptive | geodesic | 1.00 | 1.50 | 2.00 | - | - | - |");
    }

    #[test]
    fn json_round_trip_with_infinite_q() {
        let dir = tempfile::tempdir().unwrap();
        let r = report("synth", Strategy::Clicks, [1.0, 2.0, 3.25]);
        assert!(r.policy.q.is_infinite());
        let p = dir.path().join("r.json");
        write_report(&r, &p).unwrap();
        assert_eq!(read_report(&p).unwrap(), r);
        assert!(dir.path().join("r.md").exists());
        let text = std::fs::read_to_string(&p).unwrap();
        let dataset_at = text.find("\"dataset\"").unwrap();
        let failures_at = text.find("\"failures\"").unwrap();
        assert!(dataset_at < failures_at);
    }
}
