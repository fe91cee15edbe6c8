//! Static picture of the Gale dual vectors: one arrow per column of `C`,
//! scaled to the longest, labelled by column index.

use std::fmt::Write;

use circuit_descartes::gale::GaleSystem;
use num_traits::ToPrimitive;

const SIZE: f64 = 480.0;
const RADIUS: f64 = 200.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn gale_diagram(g: &GaleSystem, title: &str) -> String {
    let coords: Vec<(f64, f64)> = g
        .vectors()
        .iter()
        .map(|v| (v.0.to_f64().unwrap_or(0.0), v.1.to_f64().unwrap_or(0.0)))
        .collect();
    let longest = coords
        .iter()
        .map(|(x, y)| x.hypot(*y))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let class_of = |l: usize| {
        g.ordering()
            .and_then(|o| o.classes.iter().position(|c| c.contains(&l)))
    };
    let c = SIZE / 2.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<g stroke="#bbb"><line x1="0" y1="{c}" x2="{SIZE}" y2="{c}"/><line x1="{c}" y1="0" x2="{c}" y2="{SIZE}"/></g>"##
    );
    let _ = writeln!(out, r#"<text x="10" y="20">{}</text>"#, escape(title));
    for (l, (x, y)) in coords.iter().enumerate() {
        let ex = c + RADIUS * x / longest;
        let ey = c - RADIUS * y / longest;
        let colour = class_of(l).map_or("#444", |k| PALETTE[k % PALETTE.len()]);
        let _ = writeln!(
            out,
            r#"<line x1="{c}" y1="{c}" x2="{ex:.2}" y2="{ey:.2}" stroke="{colour}" stroke-width="2"/>"#
        );
        let _ = writeln!(out, r#"<circle cx="{ex:.2}" cy="{ey:.2}" r="3" fill="{colour}"/>"#);
        let (lx, ly) = (ex + 6.0, ey - 6.0);
        let _ = writeln!(out, r#"<text x="{lx:.2}" y="{ly:.2}" fill="{colour}">P{l}</text>"#);
    }
    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
