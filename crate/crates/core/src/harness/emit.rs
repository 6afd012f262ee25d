//! Report emission: JSON, CSV, and a log-log SVG chart of ratio vs scale.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::InequalityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::InvalidScenario(format!("unknown format {other:?}"))),
        }
    }
}

/// Write the report to `dir` in each requested format; returns the paths.
pub fn emit(report: &InequalityReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &f in formats {
        let path = dir.join(format!(
            "{}.{}",
            report.name,
            match f {
                Format::Json => "json",
                Format::Csv => "csv",
                Format::Svg => "svg",
            }
        ));
        let body = match f {
            Format::Json => serde_json::to_string_pretty(report)? + "\n",
            Format::Csv => to_csv(report),
            Format::Svg => to_svg(report),
        };
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(report: &InequalityReport) -> String {
    let mut out = String::from("lhs,rhs,ratio,seed,scale,resolution,note\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.lhs,
            r.rhs,
            r.ratio,
            r.seed,
            r.scale,
            r.resolution,
            csv_escape(r.note.as_deref().unwrap_or(""))
        );
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn to_svg(report: &InequalityReport) -> String {
    let pts: Vec<(u64, f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.scale > 0.0 && r.ratio > 0.0)
        .map(|r| (r.seed, r.scale, r.ratio))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{} (ratio vs scale, log-log)</text>",
        MARGIN,
        report.name
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN
    );
    if !pts.is_empty() {
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(_, s, r) in &pts {
            let (ls, lr) = (s.ln(), r.ln());
            x0 = x0.min(ls);
            x1 = x1.max(ls);
            y0 = y0.min(lr);
            y1 = y1.max(lr);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let px = |s: f64| MARGIN + (s.ln() - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |r: f64| H - MARGIN - (r.ln() - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        // one polyline per seed group, sorted by scale
        let mut seeds: Vec<u64> = pts.iter().map(|p| p.0).collect();
        seeds.sort_unstable();
        seeds.dedup();
        for (i, seed) in seeds.iter().enumerate() {
            let mut group: Vec<(f64, f64)> = pts
                .iter()
                .filter(|p| p.0 == *seed)
                .map(|p| (p.1, p.2))
                .collect();
            group.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let hue = (i * 47) % 360;
            let path: Vec<String> = group
                .iter()
                .map(|&(s, r)| format!("{:.2},{:.2}", px(s), py(r)))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"hsl({hue},60%,40%)\" points=\"{}\"/>",
                path.join(" ")
            );
            for &(s, r) in &group {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"hsl({hue},60%,40%)\"/>",
                    px(s),
                    py(r)
                );
            }
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">scale [{:.3}, {:.3}]  ratio [{:.3e}, {:.3e}]</text>",
            MARGIN,
            H - MARGIN / 3.0,
            x0.exp(),
            x1.exp(),
            y0.exp(),
            y1.exp()
        );
    } else {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">no plottable rows</text>",
            MARGIN,
            H / 2.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{InequalityReport, Thresholds, TrialRow};

    fn sample() -> InequalityReport {
        InequalityReport::assemble(
            "sample",
            serde_json::json!({}),
            vec![
                TrialRow::new(1.0, 2.0, 0.5).with_context(0, 1.0, 64),
                TrialRow::new(2.0, 3.0, 0.66).with_context(0, 2.0, 64),
                TrialRow::new(1.5, 2.0, 0.75).with_context(1, 1.0, 64),
            ],
            Vec::new(),
            Thresholds::default(),
        )
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = to_csv(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("lhs,rhs,ratio"));
    }

    #[test]
    fn csv_escapes_notes() {
        let mut rep = sample();
        rep.rows[0].note = Some("needs, quoting \"here\"".into());
        let text = to_csv(&rep);
        assert!(text.contains("\"needs, quoting \"\"here\"\"\""));
    }

    #[test]
    fn svg_renders_polylines() {
        let svg = to_svg(&sample());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn emit_writes_all_formats() {
        let dir = tempfile::tempdir().unwrap();
        let rep = sample();
        let paths = emit(&rep, dir.path(), &[Format::Json, Format::Csv, Format::Svg]).unwrap();
        assert_eq!(paths.len(), 3);
        for p in &paths {
            assert!(p.exists());
        }
        let back: InequalityReport =
            serde_json::from_str(&std::fs::read_to_string(&paths[0]).unwrap()).unwrap();
        assert_eq!(back, rep);
    }
}
