//! Text strips and SVG bars for interval-values.

use std::fmt::Write as _;

use ivdl_core::dlog::{Label, LabelMap};
use ivdl_core::interval::IntervalValue;

/// Finest grid drawn as text; `2^16` cells per line is already unreadable.
pub const MAX_TEXT_GRID: u64 = 16;

/// One row of a rendering.
#[derive(Clone, Debug)]
pub struct Row {
    pub index: Option<usize>,
    pub value: IntervalValue,
    pub labels: Vec<Label>,
}

impl Row {
    fn caption(&self) -> String {
        let mut parts: Vec<String> = self.index.map(|i| i.to_string()).into_iter().collect();
        parts.extend(self.labels.iter().map(Label::to_string));
        parts.join(" ")
    }
}

pub fn rows_from(values: impl IntoIterator<Item = (usize, IntervalValue)>, labels: Option<&LabelMap>) -> Vec<Row> {
    values
        .into_iter()
        .map(|(index, value)| {
            let labels = labels.map(|m| m.names_for(index)).unwrap_or_default();
            Row { index: Some(index), value, labels }
        })
        .collect()
}

/// Grid used for `v`: the forced one, else `max(bit height, 3)`.
pub fn grid_for(v: &IntervalValue, forced: Option<u64>) -> u64 {
    forced.unwrap_or_else(|| v.bit_height().max(3))
}

/// `2^m` cells, `█` where the cell lies in `v` and `·` elsewhere. Cells only
/// partly covered (finer than the grid) show as `▒`.
pub fn strip(v: &IntervalValue, m: u64) -> String {
    let cells = 1u64 << m;
    let mut out = String::with_capacity(cells as usize * 3);
    let comps = v.components();
    let mut c = 0;
    for cell in 0..cells {
        let (lo, hi) = (cell as f64 / cells as f64, (cell + 1) as f64 / cells as f64);
        while c < comps.len() && comps[c].hi.to_f64() <= lo {
            c += 1;
        }
        let mut covered = 0.0;
        for comp in comps[c..].iter().take_while(|comp| comp.lo.to_f64() < hi) {
            covered += comp.hi.to_f64().min(hi) - comp.lo.to_f64().max(lo);
        }
        out.push(if covered >= hi - lo {
            '█'
        } else if covered > 0.0 {
            '▒'
        } else {
            '·'
        });
    }
    out
}

pub fn render_text(rows: &[Row], grid: Option<u64>) -> String {
    let width = rows.iter().filter_map(|r| r.index).max().map_or(0, |i| i.to_string().len());
    let mut out = String::new();
    for row in rows {
        let bar = strip(&row.value, grid_for(&row.value, grid));
        match row.index {
            Some(i) => {
                let _ = write!(out, "{i:>width$} {bar}");
                for l in &row.labels {
                    let _ = write!(out, " {l}");
                }
                out.push('\n');
            }
            None => {
                out.push_str(&bar);
                out.push('\n');
            }
        }
    }
    out
}

const ROW_H: f64 = 16.0;
const GAP: f64 = 4.0;
const BAR_W: f64 = 640.0;
const CAPTION_W: f64 = 160.0;
const MARGIN: f64 = 8.0;

fn family(l: &Label) -> &'static str {
    match l {
        Label::One | Label::Zero | Label::A(_) | Label::B(_) | Label::P(_) => "inputs",
        Label::X(_) => "x",
        Label::Row(..) => "e_row",
        Label::C(..) => "c",
        Label::F(..) => "f",
        Label::Eq(_) | Label::E => "e",
        Label::Select(_) | Label::Z => "select",
        Label::Out(_) => "out",
    }
}

/// Horizontal bars, one per row, with grid lines at `2^-m` for the finest
/// row grid. A heading is drawn whenever the label family changes.
pub fn render_svg(rows: &[Row], grid: Option<u64>) -> String {
    let m = rows.iter().map(|r| grid_for(&r.value, grid)).max().unwrap_or(3).min(8);
    let mut body = String::new();
    let mut y = MARGIN;
    let mut last_family = None;
    for row in rows {
        let fam = row.labels.first().map(family);
        if let Some(name) = fam.filter(|_| fam != last_family) {
            y += GAP;
            let _ = writeln!(body, r#"<text x="{MARGIN}" y="{:.1}" class="head">{name}</text>"#, y + ROW_H - 4.0);
            y += ROW_H;
            last_family = fam;
        }
        let x0 = MARGIN + CAPTION_W;
        let _ = writeln!(
            body,
            r#"<text x="{MARGIN}" y="{:.1}" class="cap">{}</text>"#,
            y + ROW_H - 4.0,
            escape(&row.caption())
        );
        let _ = writeln!(body, r#"<rect x="{x0}" y="{y:.1}" width="{BAR_W}" height="{:.1}" class="bg"/>"#, ROW_H - 2.0);
        for c in row.value.components() {
            let (lo, hi) = (c.lo.to_f64(), c.hi.to_f64());
            let _ = writeln!(
                body,
                r#"<rect x="{:.3}" y="{y:.1}" width="{:.3}" height="{:.1}" class="on"/>"#,
                x0 + lo * BAR_W,
                (hi - lo) * BAR_W,
                ROW_H - 2.0
            );
        }
        y += ROW_H;
    }
    let height = y + MARGIN;
    let width = MARGIN * 2.0 + CAPTION_W + BAR_W;
    let mut lines = String::new();
    let cells = 1u32 << m;
    for k in 0..=cells {
        let x = MARGIN + CAPTION_W + BAR_W * f64::from(k) / f64::from(cells);
        let _ = writeln!(
            lines,
            r#"<line x1="{x:.3}" y1="{MARGIN}" x2="{x:.3}" y2="{:.1}" class="grid"/>"#,
            height - MARGIN
        );
    }
    format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h:.1}\" viewBox=\"0 0 {w} {h:.1}\">\n",
            "<style>.bg{{fill:#f4f4f4}} .on{{fill:#333}} .grid{{stroke:#bbb;stroke-width:0.5}} ",
            ".cap{{font:11px monospace}} .head{{font:bold 12px sans-serif}}</style>\n",
            "{body}{lines}</svg>\n"
        ),
        w = width,
        h = height,
        body = body,
        lines = lines
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
