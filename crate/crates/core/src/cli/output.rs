use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::CliError;
use crate::geom2d::{BoundingBox, Point, Polygon, Tessellation};
use crate::pipeline::{Boundary, RoundRecord};

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// `param_0,…,param_{N-1}`, one row per sample, 17 significant digits.
pub fn write_samples(path: &Path, samples: &[Vec<f64>]) -> Result<(), CliError> {
    let n = samples.first().map_or(0, Vec::len);
    let header: Vec<String> = (0..n).map(|i| format!("param_{i}")).collect();
    write_rows(path, &header, samples.iter().map(|x| x.iter().copied().map(real).collect()))
}

pub fn write_images(path: &Path, images: &[Point]) -> Result<(), CliError> {
    let header = vec!["y0".to_string(), "y1".to_string()];
    write_rows(path, &header, images.iter().map(|y| vec![real(y.x), real(y.y)]))
}

pub fn write_history(path: &Path, history: &[RoundRecord]) -> Result<(), CliError> {
    let header = ["round", "M", "H"].map(String::from).to_vec();
    write_rows(
        path,
        &header,
        history
            .iter()
            .map(|r| vec![r.round.to_string(), r.samples.to_string(), real(r.energy)]),
    )
}

/// One row per loop vertex: loop index, `outer` or `hole`, coordinates.
pub fn write_boundary(path: &Path, boundary: &Boundary) -> Result<(), CliError> {
    let header = ["loop", "kind", "y0", "y1"].map(String::from).to_vec();
    let loops = boundary
        .loops
        .iter()
        .map(|p| ("outer", p))
        .chain(boundary.holes.iter().map(|p| ("hole", p)));
    let rows = loops.enumerate().flat_map(|(i, (kind, poly))| {
        poly.vertices()
            .iter()
            .map(move |v| vec![i.to_string(), kind.to_string(), real(v.x), real(v.y)])
    });
    write_rows(path, &header, rows)
}

/// Reads a `param_*` CSV back into samples.
pub fn read_samples(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let width = r.headers().map_err(|e| bad(&e))?.len();
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(&e))?;
        let row: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&format!("row {}: {e}", i + 1)))?;
        if row.len() != width {
            return Err(bad(&format!("row {} has {} fields, expected {width}", i + 1, row.len())));
        }
        out.push(row);
    }
    Ok(out)
}

/// Maps plot coordinates to an 800-pixel-wide canvas with y pointing up.
struct Canvas {
    bbox: BoundingBox,
    scale: f64,
    body: String,
}

const WIDTH: f64 = 800.0;

impl Canvas {
    fn new(bbox: BoundingBox) -> Self {
        Self { bbox, scale: WIDTH / bbox.width(), body: String::new() }
    }

    fn height(&self) -> f64 {
        self.bbox.height() * self.scale
    }

    fn px(&self, p: Point) -> (f64, f64) {
        ((p.x - self.bbox.xmin) * self.scale, (self.bbox.ymax - p.y) * self.scale)
    }

    fn polygon(&mut self, poly: &Polygon, class: &str) {
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = self.px(v);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{}"/>"#, pts.join(" "));
    }

    fn square(&mut self, p: Point, half: f64, class: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            x - half,
            y - half,
            2.0 * half,
            2.0 * half
        );
    }

    fn dot(&mut self, p: Point, r: f64, class: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{r:.2}"/>"#);
    }

    fn finish(self, style: &str) -> String {
        let h = self.height();
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {WIDTH:.2} {h:.2}\">\n\
             <style>{style}</style>\n\
             <rect class=\"frame\" x=\"0\" y=\"0\" width=\"{WIDTH:.2}\" height=\"{h:.2}\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn marker_size(count: usize) -> f64 {
    (60.0 / (count.max(1) as f64).sqrt()).clamp(0.8, 4.0)
}

/// Cells as outlined polygons, generators as squares, centroids as dots.
pub fn cells_svg(bbox: BoundingBox, generators: &[Point], tess: &Tessellation) -> String {
    let mut c = Canvas::new(bbox);
    let s = marker_size(generators.len());
    for cell in &tess.cells {
        c.polygon(cell, "cell");
    }
    for &g in generators {
        c.square(g, s, "generator");
    }
    for &m in &tess.centroids {
        c.dot(m, 0.6 * s, "centroid");
    }
    c.finish(
        ".frame{fill:white;stroke:black} .cell{fill:none;stroke:#4a6fa5;stroke-width:0.6} \
         .generator{fill:black} .centroid{fill:#d62728}",
    )
}

/// Images as dots, flagged images circled, boundary loops outlined.
pub fn boundary_svg(bbox: BoundingBox, images: &[Point], boundary: &Boundary) -> String {
    let mut c = Canvas::new(bbox);
    let s = marker_size(images.len());
    for poly in &boundary.loops {
        c.polygon(poly, "outer");
    }
    for poly in &boundary.holes {
        c.polygon(poly, "hole");
    }
    for &y in images {
        c.dot(y, 0.6 * s, "image");
    }
    for &i in &boundary.flagged {
        c.dot(images[i], 2.0 * s, "flagged");
    }
    c.finish(
        ".frame{fill:white;stroke:black} .outer{fill:#dde6f3;stroke:#1f3b73;stroke-width:1.5} \
         .hole{fill:white;stroke:#1f3b73;stroke-dasharray:4 2} .image{fill:black} \
         .flagged{fill:none;stroke:#d62728;stroke-width:1.2}",
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}
