//! SVG Gantt charts: time on the x-axis, one lane per machine.

use std::fmt::Write;

use malleable::{ModelError, Schedule, SpeedModel};

pub const LANE_HEIGHT: f64 = 24.0;
pub const CHART_WIDTH: f64 = 800.0;
pub const MARGIN: f64 = 40.0;

/// A job's rectangle over a run of adjacent machine lanes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GanttRect {
    pub job: usize,
    pub first_lane: usize,
    pub lanes: usize,
    pub start: f64,
    pub end: f64,
}

/// One rectangle per job and maximal run of consecutive machines in its set.
pub fn gantt_rects<M: SpeedModel + ?Sized>(model: &M, schedule: &Schedule) -> Result<Vec<GanttRect>, ModelError> {
    let mut rects = Vec::new();
    for (job, (&set, &start)) in schedule.sets.iter().zip(&schedule.starts).enumerate() {
        if set.is_empty() {
            continue;
        }
        let end = start + model.processing_time(job, set)?;
        let mut lanes = set.iter().peekable();
        while let Some(first) = lanes.next() {
            let mut last = first;
            while lanes.peek() == Some(&(last + 1)) {
                last = lanes.next().unwrap();
            }
            rects.push(GanttRect {
                job,
                first_lane: first,
                lanes: last - first + 1,
                start,
                end,
            });
        }
    }
    Ok(rects)
}

fn color(job: usize) -> String {
    let hue = (job as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},65%,60%)")
}

/// Renders `schedule` as a standalone SVG document.
pub fn emit_gantt<M: SpeedModel + ?Sized>(model: &M, schedule: &Schedule) -> Result<String, ModelError> {
    let m = model.machine_count();
    let rects = gantt_rects(model, schedule)?;
    let span = rects.iter().map(|r| r.end).fold(0.0, f64::max);
    let scale = if span > 0.0 { CHART_WIDTH / span } else { 0.0 };
    let width = CHART_WIDTH + 2.0 * MARGIN;
    let height = m as f64 * LANE_HEIGHT + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    for i in 0..m {
        let y = MARGIN + i as f64 * LANE_HEIGHT;
        let _ = writeln!(
            svg,
            r##"<rect class="lane" x="{MARGIN}" y="{y}" width="{CHART_WIDTH}" height="{LANE_HEIGHT}" fill="none" stroke="#ccc"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">M{i}</text>"#,
            MARGIN - 4.0,
            y + LANE_HEIGHT * 0.7
        );
    }
    for r in rects {
        let x = MARGIN + r.start * scale;
        let y = MARGIN + r.first_lane as f64 * LANE_HEIGHT;
        let w = (r.end - r.start) * scale;
        let h = r.lanes as f64 * LANE_HEIGHT;
        let _ = writeln!(
            svg,
            r##"<rect class="job" data-job="{}" x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{}" stroke="#333"><title>job {} [{:.4}, {:.4})</title></rect>"##,
            r.job,
            color(r.job),
            r.job,
            r.start,
            r.end
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="12">makespan {span:.4}</text>"#,
        height - MARGIN / 3.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
