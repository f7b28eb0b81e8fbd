//! Self-contained SVG renderings of thresholded fields and vineyards.

use std::fmt::Write;

use super::field::ScalarField2D;
use super::vineyard::Vineyard;
use crate::geometry::PointCloud;

const WIDTH: f64 = 512.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Cells with value `<= r` in grey (row runs merged into single rects),
/// optionally overlaid with the points of `overlay`.
pub fn threshold_svg(field: &ScalarField2D, r: f64, overlay: Option<&PointCloud>) -> String {
    let b = field.bbox();
    let scale = WIDTH / (b.xmax - b.xmin);
    let height = (b.ymax - b.ymin) * scale;
    let (cw, ch) = (field.cell_width() * scale, field.cell_height() * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.3}" viewBox="0 0 {WIDTH} {height:.3}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    s.push_str("<g fill=\"#bbbbbb\" shape-rendering=\"crispEdges\">\n");
    for j in 0..field.ny() {
        // SVG y grows downward.
        let y = height - (j + 1) as f64 * ch;
        let mut i = 0;
        while i < field.nx() {
            if field.value(i, j) > r {
                i += 1;
                continue;
            }
            let start = i;
            while i < field.nx() && field.value(i, j) <= r {
                i += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                start as f64 * cw,
                y,
                (i - start) as f64 * cw,
                ch
            );
        }
    }
    s.push_str("</g>\n");
    if let Some(cloud) = overlay {
        s.push_str("<g fill=\"black\">\n");
        for p in cloud.points().filter(|p| p.len() >= 2) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="0.8"/>"#,
                (p[0] - b.xmin) * scale,
                height - (p[1] - b.ymin) * scale
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Persistence of the `max_rank` most persistent dimension-1 classes
/// against `m0`, one polyline per rank.
pub fn vineyard_svg(vineyard: &Vineyard, max_rank: usize) -> String {
    let (w, h, pad) = (WIDTH, 320.0, 40.0);
    let m0s: Vec<f64> = vineyard.records.iter().map(|r| r.m0).collect();
    let (lo, hi) = m0s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| {
            (a.min(m), b.max(m))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let top = vineyard
        .records
        .iter()
        .flat_map(|r| r.persistences().into_iter().take(max_rank))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let sx = |m: f64| pad + (m - lo) / span * (w - 2.0 * pad);
    let sy = |p: f64| h - pad - p / top * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">m0</text>"#,
        w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})">persistence</text>"#,
        h / 2.0,
        h / 2.0
    );
    for rank in 0..max_rank {
        let pts: Vec<String> = vineyard
            .records
            .iter()
            .map(|r| {
                let p = r.persistences().get(rank).copied().unwrap_or(0.0);
                format!("{:.3},{:.3}", sx(r.m0), sy(p))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            PALETTE[rank % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::field::{rasterize, BoundingBox};

    #[test]
    fn threshold_svg_is_well_formed() {
        let b = BoundingBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let f = rasterize(|x| x[0].abs(), b, 8, 8).unwrap();
        let pts = PointCloud::from_points(&[[0.0, 0.0]]).unwrap();
        let svg = threshold_svg(&f, 0.3, Some(&pts));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        // Two middle columns in each of the 8 rows, merged into one rect per row.
        assert_eq!(svg.matches("<rect x=").count(), 8);
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
