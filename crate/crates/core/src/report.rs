//! Report rendering: text tables, full-precision CSV/JSON and an SVG chart.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::json;

use crate::error::{Error, Result};
use crate::score::{
    select_optimal, CombinationReport, ComponentScore, CriteriaSet, ReportEntry, ScoreBreakdown,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(Error::Usage(format!(
                "unknown report format `{s}` (expected text, csv, json or svg)"
            ))),
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "criteria", "method", "g", "winner", "c_e", "c_d", "c_r", "x", "y", "z", "k_r",
];

pub fn render_report(
    reports: &[CombinationReport],
    scores: &ScoreBreakdown,
    format: ReportFormat,
) -> Result<Vec<u8>> {
    render_report_with_notes(reports, scores, format, &[])
}

/// Like [`render_report`], with caveat lines carried into every format.
pub fn render_report_with_notes(
    reports: &[CombinationReport],
    scores: &ScoreBreakdown,
    format: ReportFormat,
    notes: &[String],
) -> Result<Vec<u8>> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("no combinations to report".into()));
    }
    match format {
        ReportFormat::Text => Ok(render_text(reports, scores, notes).into_bytes()),
        ReportFormat::Csv => render_csv(reports, scores, notes),
        ReportFormat::Json => render_json(reports, scores, notes),
        ReportFormat::Svg => Ok(render_svg(reports, notes).into_bytes()),
    }
}

/// The summary line for one combination, e.g. `E+D: Huffman 77.92%`.
pub fn winner_line(report: &CombinationReport) -> String {
    format!(
        "{}: {} {:.2}%",
        report.criteria.label(),
        report.winner,
        report.winner_score
    )
}

fn render_text(reports: &[CombinationReport], scores: &ScoreBreakdown, notes: &[String]) -> String {
    let mut out = String::new();
    let width = scores
        .per_method
        .iter()
        .map(|c| c.method_id.chars().count())
        .chain(reports.iter().flat_map(|r| r.entries.iter().map(|e| e.method_id.chars().count())))
        .max()
        .unwrap_or(6)
        .max(6);
    for n in notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(
        out,
        "x = {:.6}  y = {:.6}  z = {:.6}  k_r = {:.6}",
        scores.x, scores.y, scores.z, scores.k_r
    );
    for report in reports {
        out.push('\n');
        let ext = if report.criteria.is_extension() {
            "  (single-criterion extension)"
        } else {
            ""
        };
        let _ = writeln!(out, "{}{ext}", report.criteria.label());
        let _ = writeln!(out, "  {:<width$}  {:>7}", "method", "g (%)");
        for e in &report.entries {
            let mark = if e.method_id == report.winner { "  *" } else { "" };
            let _ = writeln!(out, "  {:<width$}  {:>7.2}{mark}", e.method_id, e.g);
        }
        let _ = writeln!(out, "{}", winner_line(report));
    }
    out
}

fn component<'a>(scores: &'a ScoreBreakdown, method: &str) -> Result<&'a ComponentScore> {
    scores
        .per_method
        .iter()
        .find(|c| c.method_id == method)
        .ok_or_else(|| Error::Usage(format!("no component scores for `{method}`")))
}

fn render_csv(
    reports: &[CombinationReport],
    scores: &ScoreBreakdown,
    notes: &[String],
) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for n in notes {
        buf.extend_from_slice(format!("# note: {}\n", n.replace('\n', " ")).as_bytes());
    }
    let mut w = csv::Writer::from_writer(buf);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for report in reports {
        for e in &report.entries {
            let c = component(scores, &e.method_id)?;
            w.write_record([
                report.criteria.token(),
                e.method_id.clone(),
                e.g.to_string(),
                (e.method_id == report.winner).to_string(),
                c.c_e.to_string(),
                c.c_d.to_string(),
                c.c_r.to_string(),
                scores.x.to_string(),
                scores.y.to_string(),
                scores.z.to_string(),
                scores.k_r.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn render_json(
    reports: &[CombinationReport],
    scores: &ScoreBreakdown,
    notes: &[String],
) -> Result<Vec<u8>> {
    let combinations: Vec<_> = reports
        .iter()
        .map(|r| {
            json!({
                "criteria": r.criteria.label(),
                "token": r.criteria.token(),
                "extension": r.criteria.is_extension(),
                "entries": r.entries,
                "winner": r.winner,
                "winner_score": r.winner_score,
            })
        })
        .collect();
    let doc = json!({
        "intermediates": {"x": scores.x, "y": scores.y, "z": scores.z, "k_r": scores.k_r},
        "methods": scores.per_method,
        "combinations": combinations,
        "notes": notes,
    });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Io(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

fn render_svg(reports: &[CombinationReport], notes: &[String]) -> String {
    const BAR: f64 = 28.0;
    const GAP: f64 = 36.0;
    const LEFT: f64 = 56.0;
    const TOP: f64 = 24.0;
    const PLOT_H: f64 = 240.0;
    const LEGEND_ROW: f64 = 18.0;

    let m = reports.iter().map(|r| r.entries.len()).max().unwrap_or(1);
    let group_w = m as f64 * BAR;
    let plot_w = reports.len() as f64 * (group_w + GAP) + GAP;
    let legend: Vec<&str> = reports[0].entries.iter().map(|e| e.method_id.as_str()).collect();
    let width = LEFT + plot_w + 16.0;
    let base = TOP + PLOT_H;
    let height = base + 40.0 + LEGEND_ROW * legend.len() as f64 + 8.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    if !notes.is_empty() {
        let _ = writeln!(s, "<desc>{}</desc>", escape(&notes.join("; ")));
    }
    let _ = writeln!(s, r#"<g class="axis">"#);
    for tick in (0..=100).step_by(20) {
        let y = base - PLOT_H * tick as f64 / 100.0;
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">{tick}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base}" stroke="#000"/><text transform="translate(14 {}) rotate(-90)" text-anchor="middle">g (%)</text>"##,
        TOP + PLOT_H / 2.0
    );
    let _ = writeln!(s, "</g>");

    for (gi, report) in reports.iter().enumerate() {
        let x0 = LEFT + GAP + gi as f64 * (group_w + GAP);
        let _ = writeln!(
            s,
            r#"<g class="group" data-criteria="{}">"#,
            report.criteria.token()
        );
        for (bi, e) in report.entries.iter().enumerate() {
            let h = PLOT_H * e.g.clamp(0.0, 100.0) / 100.0;
            let x = x0 + bi as f64 * BAR;
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{x}" y="{}" width="{}" height="{h}" fill="{}"><title>{}: {:.2}%</title></rect>"#,
                base - h,
                BAR - 2.0,
                PALETTE[bi % PALETTE.len()],
                escape(&e.method_id),
                e.g
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="9">{:.2}</text>"#,
                x + (BAR - 2.0) / 2.0,
                base - h - 3.0,
                e.g
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#,
            x0 + group_w / 2.0,
            base + 16.0,
            escape(&report.criteria.label())
        );
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, name) in legend.iter().enumerate() {
        let y = base + 32.0 + LEGEND_ROW * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{y}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            PALETTE[i % PALETTE.len()],
            LEFT + 18.0,
            y + 10.0,
            escape(name)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

/// A report read back from its CSV rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub reports: Vec<CombinationReport>,
    pub scores: ScoreBreakdown,
    pub notes: Vec<String>,
}

fn field_f64(record: &csv::StringRecord, col: usize, line: u64) -> Result<f64> {
    record[col].parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{}` in column {} is not a number", &record[col], CSV_HEADER[col]),
    })
}

/// Reads a CSV report produced by [`render_report`].
pub fn parse_report_csv(text: &str) -> Result<ParsedReport> {
    let notes = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix("# note:"))
        .map(|n| n.trim().to_owned())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| Error::Parse {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("not a report CSV (expected `{}`)", CSV_HEADER.join(",")),
        });
    }

    let mut groups: Vec<(CriteriaSet, Vec<ReportEntry>, Option<String>)> = Vec::new();
    let mut per_method: Vec<ComponentScore> = Vec::new();
    let mut inter = None;
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let criteria: CriteriaSet = record[0].parse()?;
        let method = record[1].to_owned();
        let g = field_f64(&record, 2, line)?;
        let winner = match &record[3] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("winner flag `{other}` is not true/false"),
                })
            }
        };
        let c = ComponentScore {
            method_id: method.clone(),
            c_e: field_f64(&record, 4, line)?,
            c_d: field_f64(&record, 5, line)?,
            c_r: field_f64(&record, 6, line)?,
        };
        let xyzk = (
            field_f64(&record, 7, line)?,
            field_f64(&record, 8, line)?,
            field_f64(&record, 9, line)?,
            field_f64(&record, 10, line)?,
        );
        inter.get_or_insert(xyzk);
        match per_method.iter().find(|p| p.method_id == method) {
            Some(existing) if *existing != c => {
                return Err(Error::Parse {
                    line,
                    message: format!("component scores for `{method}` differ between rows"),
                })
            }
            Some(_) => {}
            None => per_method.push(c),
        }
        if groups.last().map(|g| g.0) != Some(criteria) {
            if groups.iter().any(|g| g.0 == criteria) {
                return Err(Error::Parse {
                    line,
                    message: format!("rows for {criteria} are not contiguous"),
                });
            }
            groups.push((criteria, Vec::new(), None));
        }
        let group = groups.last_mut().expect("pushed above");
        if winner {
            if group.2.is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("{criteria} has more than one winner"),
                });
            }
            group.2 = Some(method.clone());
        }
        group.1.push(ReportEntry { method_id: method, g });
    }
    let Some((x, y, z, k_r)) = inter else {
        return Err(Error::EmptyInput("report CSV has no rows".into()));
    };
    let reports = groups
        .into_iter()
        .map(|(criteria, entries, winner)| {
            let winner = winner.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("{criteria} has no winner row"),
            })?;
            let winner_score = entries
                .iter()
                .find(|e| e.method_id == winner)
                .map(|e| e.g)
                .expect("winner taken from entries");
            Ok(CombinationReport {
                criteria,
                entries,
                winner,
                winner_score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedReport {
        reports,
        scores: ScoreBreakdown {
            per_method,
            x,
            y,
            z,
            k_r,
        },
        notes,
    })
}

/// Recomputes the winner of a parsed report and checks it against the flag.
pub fn check_winners(parsed: &ParsedReport) -> Result<()> {
    for r in &parsed.reports {
        let (best, _) = select_optimal(&r.entries)?;
        if best != r.winner {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "{}: flagged winner `{}` but `{best}` scores highest",
                    r.criteria, r.winner
                ),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::score::{component_scores, evaluate, evaluate_all};

    fn tbl(rows: &[(&str, f64, f64, f64)]) -> crate::MetricsTable {
        crate::MetricsTable::from_triples(rows.iter().copied(), "test").unwrap()
    }

    fn table2() -> (Vec<CombinationReport>, ScoreBreakdown) {
        let t = fixtures::table(fixtures::ENTROPY_CODERS, "t2");
        (evaluate_all(&t).unwrap(), component_scores(&t))
    }

    #[test]
    fn text_has_winner_lines() {
        let (r, s) = table2();
        let text = String::from_utf8(render_report(&r, &s, ReportFormat::Text).unwrap()).unwrap();
        assert!(text.contains("E+D: Huffman 77.92%"), "{text}");
        assert!(text.contains("E+R: LZW 38.65%"));
        assert!(text.lines().any(|l| l.contains("Huffman") && l.ends_with('*')));
    }

    #[test]
    fn singleton_marked_as_extension() {
        let t = fixtures::table(fixtures::ENTROPY_CODERS, "t2");
        let r = evaluate(&t, &["r".parse().unwrap()]).unwrap();
        let text = String::from_utf8(
            render_report(&r, &component_scores(&t), ReportFormat::Text).unwrap(),
        )
        .unwrap();
        assert!(text.contains("R  (single-criterion extension)"));
    }

    #[test]
    fn csv_round_trip_is_identical() {
        let (r, s) = table2();
        let notes = vec!["external codec timings include process spawn overhead".to_owned()];
        let first = render_report_with_notes(&r, &s, ReportFormat::Csv, &notes).unwrap();
        let parsed = parse_report_csv(std::str::from_utf8(&first).unwrap()).unwrap();
        assert_eq!(parsed.reports, r);
        assert_eq!(parsed.scores, s);
        assert_eq!(parsed.notes, notes);
        check_winners(&parsed).unwrap();
        let second =
            render_report_with_notes(&parsed.reports, &parsed.scores, ReportFormat::Csv, &parsed.notes)
                .unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn json_carries_intermediates() {
        let (r, s) = table2();
        let v: serde_json::Value =
            serde_json::from_slice(&render_report(&r, &s, ReportFormat::Json).unwrap()).unwrap();
        assert_eq!(v["intermediates"]["k_r"].as_f64(), Some(s.k_r));
        assert_eq!(v["combinations"][0]["winner"], "Huffman");
        assert_eq!(v["combinations"].as_array().unwrap().len(), 4);
        assert_eq!(v["methods"][1]["c_r"].as_f64(), Some(s.per_method[1].c_r));
    }

    #[test]
    fn svg_is_well_formed_with_m_bars_per_group() {
        let rows = [("a<b", 1.0, 2.0, 3.0), ("c&d", 2.0, 1.0, 1.5), ("\"e\"", 0.5, 0.5, 1.1)];
        let t = tbl(&rows);
        let r = evaluate_all(&t).unwrap();
        let svg = render_report(&r, &component_scores(&t), ReportFormat::Svg).unwrap();
        let text = std::str::from_utf8(&svg).unwrap();
        let doc = roxmltree::Document::parse(text).unwrap();
        let groups: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("group"))
            .collect();
        assert_eq!(groups.len(), 4);
        for g in groups {
            let bars = g
                .descendants()
                .filter(|n| n.attribute("class") == Some("bar"))
                .count();
            assert_eq!(bars, 3);
        }
    }

    #[test]
    fn single_method_bars_at_100() {
        let t = tbl(&[("only", 1.0, 1.0, 2.0)]);
        let r = evaluate_all(&t).unwrap();
        let svg = String::from_utf8(
            render_report(&r, &component_scores(&t), ReportFormat::Svg).unwrap(),
        )
        .unwrap();
        assert_eq!(svg.matches(">100.00</text>").count(), 4);
    }

    #[test]
    fn unknown_format_is_usage_error() {
        assert!(matches!("pdf".parse::<ReportFormat>(), Err(Error::Usage(_))));
    }

    #[test]
    fn empty_reports_rejected() {
        let (_, s) = table2();
        assert!(render_report(&[], &s, ReportFormat::Text).is_err());
    }
}
