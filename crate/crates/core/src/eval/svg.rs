use std::fmt::Write as _;
use std::path::Path;

use super::{EpisodeRecord, EvalError, MetricsSummary};
use crate::sim::RobotStatus;

const PIXELS_PER_METER: f64 = 12.0;
const MARGIN: f64 = 20.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];
const REACHED_COLOR: &str = "#2ca02c";
const FAILED_COLOR: &str = "#d62728";
const OBSTACLE_COLOR: &str = "#555555";

struct Canvas {
    extent: f64,
}

impl Canvas {
    fn x(&self, x: f64) -> f64 {
        MARGIN + x * PIXELS_PER_METER
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.extent - y) * PIXELS_PER_METER
    }

    fn len(&self, d: f64) -> f64 {
        d * PIXELS_PER_METER
    }
}

/// Standalone SVG of one episode: workspace frame, obstacles, vortex cores,
/// goals and robot paths, with each robot's final position marked green if
/// it reached its goal and red otherwise.
pub fn trajectory_svg(record: &EpisodeRecord) -> String {
    let scenario = &record.scenario;
    let canvas = Canvas {
        extent: scenario.params.workspace_extent,
    };
    let side = 2.0 * MARGIN + canvas.len(canvas.extent);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side:.0}" height="{side:.0}" viewBox="0 0 {side:.1} {side:.1}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect class="workspace" x="{m:.1}" y="{m:.1}" width="{w:.1}" height="{w:.1}" fill="white" stroke="black"/>"#,
        m = MARGIN,
        w = canvas.len(canvas.extent)
    );
    for v in &scenario.vortices {
        let color = if v.circulation >= 0.0 { "#4a90d9" } else { "#d98c4a" };
        let _ = writeln!(
            s,
            r#"<circle class="vortex" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-dasharray="6 4"/>"#,
            canvas.x(v.center.x),
            canvas.y(v.center.y),
            canvas.len(v.core_radius)
        );
    }
    for o in &scenario.obstacles {
        let _ = writeln!(
            s,
            r#"<circle class="obstacle" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{OBSTACLE_COLOR}"/>"#,
            canvas.x(o.center.x),
            canvas.y(o.center.y),
            canvas.len(o.radius)
        );
    }
    for (i, spawn) in scenario.robots.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<circle class="goal" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            canvas.x(spawn.goal.x),
            canvas.y(spawn.goal.y),
            canvas.len(scenario.params.goal_threshold)
        );
        let _ = writeln!(
            s,
            r#"<rect class="start" x="{:.2}" y="{:.2}" width="8" height="8" fill="{color}"/>"#,
            canvas.x(spawn.start.x) - 4.0,
            canvas.y(spawn.start.y) - 4.0
        );
    }
    for track in &record.robots {
        let color = PALETTE[track.robot_id % PALETTE.len()];
        let start = scenario.robots[track.robot_id].start;
        let mut points = format!("{:.2},{:.2}", canvas.x(start.x), canvas.y(start.y));
        for r in &track.rows {
            let _ = write!(points, " {:.2},{:.2}", canvas.x(r.x), canvas.y(r.y));
        }
        let _ = writeln!(
            s,
            r#"<polyline class="trajectory" points="{points}" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
        let end = track
            .rows
            .last()
            .map_or(start, |r| crate::sim::Vec2::new(r.x, r.y));
        let (class, marker) = if track.outcome == RobotStatus::ReachedGoal {
            ("reached", REACHED_COLOR)
        } else {
            ("failed", FAILED_COLOR)
        };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{marker}"/>"#,
            canvas.x(end.x),
            canvas.y(end.y),
            canvas.len(scenario.params.robot_radius)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(record: &EpisodeRecord, path: &Path) -> Result<(), EvalError> {
    std::fs::write(path, trajectory_svg(record))?;
    Ok(())
}

/// Bar chart of success rate per level, annotated with median travel time
/// and energy.
pub fn render_metrics_svg(summary: &MetricsSummary, title: &str) -> String {
    let bar = 60.0;
    let gap = 30.0;
    let plot_h = 300.0;
    let left = 60.0;
    let top = 40.0;
    let width = left + summary.levels.len() as f64 * (bar + gap) + gap;
    let height = top + plot_h + 80.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{b}" stroke="black"/><line x1="{left}" y1="{b}" x2="{width:.1}" y2="{b}" stroke="black"/>"#,
        b = top + plot_h
    );
    for tick in 0..=4 {
        let frac = tick as f64 / 4.0;
        let y = top + plot_h * (1.0 - frac);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.2}</text>"#,
            left - 6.0,
            y + 4.0,
            frac
        );
    }
    for (i, level) in summary.levels.iter().enumerate() {
        let x = left + gap + i as f64 * (bar + gap);
        let h = plot_h * level.success_rate;
        let _ = writeln!(
            s,
            r#"<rect class="success" x="{x:.1}" y="{:.1}" width="{bar}" height="{h:.1}" fill="{REACHED_COLOR}"/>"#,
            top + plot_h - h
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} robots</text>"#,
            x + bar / 2.0,
            top + plot_h + 16.0,
            level.robots
        );
        let median = |d: &Option<super::Distribution>| d.as_ref().map_or("-".to_string(), |d| format!("{:.1}", d.median));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t {} / e {}</text>"#,
            x + bar / 2.0,
            top + plot_h + 32.0,
            median(&level.travel_time),
            median(&level.energy)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
