//! SVG scatter of a planar cloud, its projection onto a line through the
//! origin, and a few connecting geodesic arcs. Pure emission.

use crate::ball::{Geodesic, Point};
use crate::error::{Error, Result};
use crate::experiments::project_cloud;
use crate::fractals::PointCloud;
use crate::grassmann::{embed, MPlane};

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Direction of the projection line, degrees from the first axis.
    pub angle_deg: f64,
    /// Canvas side in pixels.
    pub size: u32,
    /// Number of sample points whose connecting geodesics get drawn.
    pub geodesic_count: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { angle_deg: 30.0, size: 640, geodesic_count: 12 }
    }
}

/// Pixel coordinates of a model point: the unit disk fills the canvas.
fn to_px(size: u32, x: f64, y: f64) -> (f64, f64) {
    let half = size as f64 / 2.0;
    (half + x * half * 0.95, half - y * half * 0.95)
}

/// Renders a 2-dimensional cloud. Points must lie inside the unit disk
/// (embed the cloud first).
pub fn render_svg(cloud: &PointCloud<f64>, opts: &RenderOptions) -> Result<String> {
    if cloud.is_empty() {
        return Err(Error::DegenerateInput("nothing to render: empty cloud".into()));
    }
    if cloud.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "render needs a 2-dimensional cloud, got {}",
            cloud.dim()
        )));
    }
    for p in cloud.iter_points() {
        if p[0] * p[0] + p[1] * p[1] >= 1.0 {
            return Err(Error::OutsideBall {
                norm: (p[0] * p[0] + p[1] * p[1]).sqrt(),
                guard: 0.0,
            });
        }
    }
    let theta = opts.angle_deg.to_radians();
    let line = MPlane::<f64>::from_basis(2, 1, vec![theta.cos(), theta.sin()])?;

    let size = opts.size;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    // Ideal boundary.
    let (cx, cy) = to_px(size, 0.0, 0.0);
    svg.push_str(&format!(
        "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        size as f64 / 2.0 * 0.95
    ));
    // The projection line, drawn across the disk.
    let (x0, y0) = to_px(size, -theta.cos(), -theta.sin());
    let (x1, y1) = to_px(size, theta.cos(), theta.sin());
    svg.push_str(&format!(
        "<line class=\"plane\" x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x1:.3}\" y2=\"{y1:.3}\" stroke=\"#888\" stroke-width=\"1\"/>\n"
    ));

    // Cloud scatter.
    svg.push_str("<g class=\"cloud\" fill=\"#1f77b4\">\n");
    for p in cloud.iter_points() {
        let (px, py) = to_px(size, p[0], p[1]);
        svg.push_str(&format!("<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"1\"/>\n"));
    }
    svg.push_str("</g>\n");

    // Projected feet.
    let projected = project_cloud(&line, cloud);
    svg.push_str("<g class=\"proj\" fill=\"#d62728\">\n");
    for u in projected.iter_points() {
        let q = embed(&line, u)?;
        let (px, py) = to_px(size, q[0], q[1]);
        svg.push_str(&format!("<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"1.5\"/>\n"));
    }
    svg.push_str("</g>\n");

    // A few connecting geodesics, sampled as polylines.
    let step = (cloud.len() / opts.geodesic_count.max(1)).max(1);
    svg.push_str("<g class=\"geodesics\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"0.6\">\n");
    for i in (0..cloud.len()).step_by(step) {
        let p = cloud.point(i);
        let u = projected.point(i);
        let q = embed(&line, u)?;
        let a = Point::new(p.to_vec())?;
        let b = Point::new(q)?;
        if a == b {
            continue;
        }
        let g = Geodesic::new(a, b)?;
        let mut path = String::from("<polyline points=\"");
        for s in 0..=16 {
            let t = s as f64 / 16.0;
            let pt = g.point_at(t)?;
            let (px, py) = to_px(size, pt.coords()[0], pt.coords()[1]);
            path.push_str(&format!("{px:.3},{py:.3} "));
        }
        path.push_str("\"/>\n");
        svg.push_str(&path);
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractals::{embed_in_ball, generate_depth, CloudMeta, Ifs};

    #[test]
    fn empty_cloud_is_an_error() {
        let empty = PointCloud::<f64>::from_rows(2, vec![], CloudMeta::default());
        assert!(empty.is_err()); // cannot even construct one
    }

    #[test]
    fn scene_renders_and_feet_sit_on_the_line() {
        let ifs = Ifs::four_corner(0.25).unwrap();
        let cloud = embed_in_ball(&generate_depth(&ifs, 3).unwrap(), 0.5).unwrap();
        let opts = RenderOptions::default();
        let svg = render_svg(&cloud, &opts).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("class=\"proj\""));

        // Every projected marker must sit on the drawn line within a pixel.
        let theta = opts.angle_deg.to_radians();
        let (dx, dy) = (theta.cos(), theta.sin());
        let half = opts.size as f64 / 2.0;
        let mut seen = 0;
        let mut in_proj = false;
        for line in svg.lines() {
            if line.contains("class=\"proj\"") {
                in_proj = true;
                continue;
            }
            if in_proj && line.starts_with("</g>") {
                break;
            }
            if in_proj && line.starts_with("<circle") {
                let cx: f64 = field(line, "cx").unwrap();
                let cy: f64 = field(line, "cy").unwrap();
                // Back to model coordinates.
                let x = (cx - half) / (half * 0.95);
                let y = (half - cy) / (half * 0.95);
                // Distance to the line through the origin with direction d.
                let off = (x * dy - y * dx).abs() * half * 0.95;
                assert!(off <= 1.0, "marker {seen} off the line by {off} px");
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    fn field(line: &str, name: &str) -> Option<f64> {
        let key = format!("{name}=\"");
        let start = line.find(&key)? + key.len();
        let end = start + line[start..].find('"')?;
        line[start..end].parse().ok()
    }
}
