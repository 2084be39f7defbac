//! Static SVG rendering of scenarios and plans.

use std::fmt::Write;

use crate::geometry::{Point2, Polygon2};
use crate::plan_io::PlanFile;
use crate::scenario::Scenario;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn points_attr(points: &[Point2]) -> String {
    let mut s = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{},{}", p.x, p.y).unwrap();
    }
    s
}

fn polygon(out: &mut String, poly: &Polygon2, fill: &str, stroke: &str) {
    writeln!(
        out,
        r#"    <polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="0.05"/>"#,
        points_attr(poly.vertices())
    )
    .unwrap();
}

/// Workspace, obstacles, start and target discs, and if a plan is given one
/// trace per robot with discs at every keyframe.
pub fn render_svg(scenario: &Scenario, plan: Option<&PlanFile>) -> String {
    let (lo, hi) = scenario.workspace.bounding_box();
    let margin = 0.05 * (hi.x - lo.x).max(hi.y - lo.y);
    let (w, h) = (hi.x - lo.x + 2.0 * margin, hi.y - lo.y + 2.0 * margin);
    let px = 800.0 / w.max(h);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {w} {h}">"#,
        (w * px).round(),
        (h * px).round(),
        lo.x - margin,
        -(hi.y + margin),
    )
    .unwrap();
    writeln!(out, "  <title>{}</title>", escape(&scenario.name)).unwrap();
    // world y points up
    writeln!(out, r#"  <g transform="scale(1,-1)">"#).unwrap();
    polygon(&mut out, &scenario.workspace, "#ffffff", "#000000");
    for obs in &scenario.obstacles {
        polygon(&mut out, obs, "#808080", "#404040");
    }
    if let Some(plan) = plan {
        for (r, waypoints) in plan.waypoints(scenario).iter().enumerate() {
            let radius = scenario.robots[r].radius;
            writeln!(
                out,
                r#"    <polyline points="{}" fill="none" stroke="{}" stroke-width="0.06"/>"#,
                points_attr(waypoints),
                color(r)
            )
            .unwrap();
            for p in &waypoints[1..waypoints.len().saturating_sub(1)] {
                writeln!(
                    out,
                    r#"    <circle cx="{}" cy="{}" r="{radius}" fill="{}" fill-opacity="0.12" stroke="none"/>"#,
                    p.x,
                    p.y,
                    color(r)
                )
                .unwrap();
            }
        }
    }
    for (r, robot) in scenario.robots.iter().enumerate() {
        writeln!(
            out,
            r#"    <circle cx="{}" cy="{}" r="{}" fill="{}" fill-opacity="0.6" stroke="{}" stroke-width="0.04"/>"#,
            robot.start.x,
            robot.start.y,
            robot.radius,
            color(r),
            color(r)
        )
        .unwrap();
        writeln!(
            out,
            r#"    <circle cx="{}" cy="{}" r="{}" fill="none" stroke="{}" stroke-width="0.04" stroke-dasharray="0.1,0.08"/>"#,
            robot.target.x,
            robot.target.y,
            robot.radius,
            color(r)
        )
        .unwrap();
    }
    writeln!(out, "  </g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
