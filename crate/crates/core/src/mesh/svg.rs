use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::PolygonalMesh;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Output width and height in pixels.
    pub size: f64,
    pub stroke: String,
    pub fill: String,
    pub stroke_width: f64,
    pub vertex_markers: bool,
    pub marker_radius: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 512.0,
            stroke: "#1f2d3d".into(),
            fill: "#dfe8f3".into(),
            stroke_width: 0.8,
            vertex_markers: false,
            marker_radius: 1.5,
        }
    }
}

pub fn render_svg(mesh: &PolygonalMesh, opts: &SvgOptions) -> String {
    let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
    let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in mesh.vertices() {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let pad = 8.0;
    let scale = (opts.size - 2.0 * pad) / (xmax - xmin).max(ymax - ymin).max(f64::MIN_POSITIVE);
    // SVG y axis points down
    let map = |x: f64, y: f64| (pad + (x - xmin) * scale, pad + (ymax - y) * scale);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let _ = writeln!(
        s,
        r#"<g stroke="{}" fill="{}" stroke-width="{}" stroke-linejoin="round">"#,
        opts.stroke, opts.fill, opts.stroke_width
    );
    for cell in mesh.cells() {
        s.push_str("<polygon points=\"");
        for (k, &v) in cell.iter().enumerate() {
            let p = mesh.vertex(v);
            let (x, y) = map(p.x, p.y);
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</g>\n");
    if opts.vertex_markers {
        let _ = writeln!(s, r#"<g fill="{}">"#, opts.stroke);
        for p in mesh.vertices() {
            let (x, y) = map(p.x, p.y);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="{}"/>"#,
                opts.marker_radius
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn export_svg(mesh: &PolygonalMesh, path: &Path, opts: &SvgOptions) -> Result<()> {
    fs::write(path, render_svg(mesh, opts))?;
    Ok(())
}

/// Writes `level_<j>.svg` for `levels[j - 1]`, coarsest first.
pub fn export_hierarchy_svg(
    levels: &[PolygonalMesh],
    dir: &Path,
    opts: &SvgOptions,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    levels
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let path = dir.join(format!("level_{}.svg", i + 1));
            export_svg(m, &path, opts)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured_triangle_mesh;

    #[test]
    fn one_polygon_per_cell() {
        let m = generate_structured_triangle_mesh(1).unwrap();
        let svg = render_svg(&m, &SvgOptions::default());
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn defaults_and_markers() {
        let m = generate_structured_triangle_mesh(1).unwrap();
        let svg = render_svg(&m, &SvgOptions::default());
        assert!(svg.contains(r##"stroke="#1f2d3d""##));
        assert!(svg.contains(r##"fill="#dfe8f3""##));
        let opts = SvgOptions {
            vertex_markers: true,
            ..Default::default()
        };
        assert_eq!(render_svg(&m, &opts).matches("<circle").count(), 4);
    }

    #[test]
    fn one_file_per_level() {
        let dir = tempfile::tempdir().unwrap();
        let levels: Vec<_> = (1..=4)
            .map(|n| generate_structured_triangle_mesh(n).unwrap())
            .collect();
        let paths = export_hierarchy_svg(&levels, dir.path(), &SvgOptions::default()).unwrap();
        assert_eq!(paths.len(), 4);
        for (j, p) in paths.iter().enumerate() {
            assert!(p.ends_with(format!("level_{}.svg", j + 1)));
            assert!(p.exists());
        }
    }
}
