//! Text and SVG Gantt charts.

use std::fmt::Write;

use jobshop::schedule::{GanttEntry, Schedule};

pub const MAX_COLUMNS: u64 = 200;

const SVG_WIDTH: f64 = 800.0;
const BAND_HEIGHT: f64 = 30.0;
const LEFT_MARGIN: f64 = 40.0;
const TOP_MARGIN: f64 = 30.0;

/// Single-character job label: 1-9, then A-Z, then a-z, then `#`.
pub fn job_glyph(job: usize) -> char {
    const GLYPHS: &[u8] = b"123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    GLYPHS.get(job).map_or('#', |&b| b as char)
}

/// Time units per column.
pub fn time_per_column(makespan: u64) -> u64 {
    makespan.div_ceil(MAX_COLUMNS).max(1)
}

/// Entry covering the largest part of `[lo, hi)`, if any.
fn dominant(entries: &[GanttEntry], lo: u64, hi: u64) -> Option<&GanttEntry> {
    entries
        .iter()
        .map(|e| (e, e.end.min(hi).saturating_sub(e.start.max(lo))))
        .filter(|&(_, overlap)| overlap > 0)
        .max_by_key(|&(e, overlap)| (overlap, std::cmp::Reverse(e.start)))
        .map(|(e, _)| e)
}

pub fn render_text(s: &Schedule<'_>) -> String {
    let inst = s.instance();
    let makespan = s.makespan();
    let unit = time_per_column(makespan);
    let columns = makespan.div_ceil(unit);
    let mut out = String::new();
    let name = if inst.name().is_empty() { "instance" } else { inst.name() };
    let _ = writeln!(out, "{name}  makespan {makespan}  (1 column = {unit} time unit{})", if unit == 1 { "" } else { "s" });
    let label_width = format!("M{}", inst.num_machines().saturating_sub(1)).len();
    for row in s.gantt_rows() {
        let bar: String = (0..columns)
            .map(|c| {
                dominant(&row.entries, c * unit, (c + 1) * unit)
                    .map_or('.', |e| job_glyph(inst.op(e.op).job))
            })
            .collect();
        let mut line = format!("{:<label_width$} |{bar}|", format!("M{}", row.machine));
        for e in &row.entries {
            let _ = write!(line, "  J{} [{},{})", inst.op(e.op).job + 1, e.start, e.end);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// `O_jk` with 1-based job and position; a comma separates them once either
/// has more than one digit.
pub fn op_label(job: usize, pos: usize) -> String {
    let (j, k) = (job + 1, pos + 1);
    if j < 10 && k < 10 {
        format!("O_{j}{k}")
    } else {
        format!("O_{j},{k}")
    }
}

fn fill_color(job: usize) -> String {
    let hue = (job * 137) % 360;
    format!("hsl({hue},60%,70%)")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Standalone SVG: one band per machine drawn with lines, one `<rect>` per
/// operation.
pub fn render_svg(s: &Schedule<'_>) -> String {
    let inst = s.instance();
    let makespan = s.makespan().max(1);
    let scale = SVG_WIDTH / makespan as f64;
    let width = LEFT_MARGIN + SVG_WIDTH + 20.0;
    let height = TOP_MARGIN + BAND_HEIGHT * inst.num_machines() as f64 + 30.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{LEFT_MARGIN}" y="18">{} makespan {}</text>"#,
        escape(inst.name()),
        s.makespan()
    );
    let _ = writeln!(out, r#"<g transform="translate({LEFT_MARGIN},{TOP_MARGIN})">"#);
    for row in s.gantt_rows() {
        let y = BAND_HEIGHT * row.machine as f64;
        let _ = writeln!(
            out,
            r##"<line x1="0" y1="{y}" x2="{SVG_WIDTH}" y2="{y}" stroke="#ccc"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="-30" y="{}">M{}</text>"#,
            y + BAND_HEIGHT * 0.6,
            row.machine
        );
        for e in &row.entries {
            let op = inst.op(e.op);
            let x = e.start as f64 * scale;
            let w = op.duration as f64 * scale;
            let _ = writeln!(
                out,
                r##"<rect x="{x}" y="{}" width="{w}" height="{}" fill="{}" stroke="#333"/>"##,
                y + 4.0,
                BAND_HEIGHT - 8.0,
                fill_color(op.job)
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x + w / 2.0,
                y + BAND_HEIGHT * 0.6,
                op_label(op.job, op.pos)
            );
        }
    }
    let bottom = BAND_HEIGHT * inst.num_machines() as f64;
    let _ = writeln!(
        out,
        r##"<line x1="0" y1="{bottom}" x2="{SVG_WIDTH}" y2="{bottom}" stroke="#ccc"/>"##
    );
    let _ = writeln!(out, r#"<text x="0" y="{}">0</text>"#, bottom + 15.0);
    let _ = writeln!(
        out,
        r#"<text x="{SVG_WIDTH}" y="{}" text-anchor="end">{}</text>"#,
        bottom + 15.0,
        s.makespan()
    );
    out.push_str("</g>\n</svg>\n");
    out
}
