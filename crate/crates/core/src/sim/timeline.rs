//! Per-agent timeline rendering (plain text or SVG).

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{EventKind, SimTrace};
use crate::scene::{AgentId, ObjectId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimelineFormat {
    Text,
    Svg,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unsupported timeline format {0:?} (expected text or svg)")]
pub struct UnknownFormat(pub String);

impl FromStr for TimelineFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(TimelineFormat::Text),
            "svg" => Ok(TimelineFormat::Svg),
            other => Err(UnknownFormat(other.to_owned())),
        }
    }
}

impl TimelineFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TimelineFormat::Text => "txt",
            TimelineFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    Move,
    /// Queued behind another agent's use of the object.
    Wait,
    /// Dwell at a destination without interacting.
    Visit,
    Interact,
    Carry,
}

impl SpanKind {
    fn label(self) -> &'static str {
        match self {
            SpanKind::Move => "move",
            SpanKind::Wait => "wait",
            SpanKind::Visit => "visit",
            SpanKind::Interact => "interact",
            SpanKind::Carry => "carry",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub kind: SpanKind,
    pub start: f64,
    pub end: f64,
    pub object_id: Option<ObjectId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    pub agent_id: AgentId,
    pub spans: Vec<Span>,
    pub idle_at: Option<f64>,
}

/// Spans per agent, one lane per agent in the trace, in plan order.
pub fn lanes(trace: &SimTrace) -> Vec<Lane> {
    trace
        .final_states
        .iter()
        .map(|state| {
            let agent = &state.agent_id;
            let mut spans = Vec::new();
            let mut idle_at = None;
            let mut open_move: Option<(f64, Option<ObjectId>)> = None;
            let mut open_arrive: Option<(f64, Option<ObjectId>)> = None;
            let mut open_interact: Option<(f64, Option<ObjectId>)> = None;
            let mut open_carry: Option<(f64, Option<ObjectId>)> = None;
            let mut push = |kind, (start, object_id): (f64, Option<ObjectId>), end: f64| {
                spans.push(Span {
                    kind,
                    start,
                    end,
                    object_id,
                })
            };

            for e in trace.events_for(agent) {
                match e.kind {
                    EventKind::MoveStart | EventKind::Idle => {
                        if let Some(open) = open_arrive.take() {
                            push(SpanKind::Visit, open, e.time);
                        }
                        if e.kind == EventKind::Idle {
                            idle_at = Some(e.time);
                        } else {
                            open_move = Some((e.time, e.object_id.clone()));
                        }
                    }
                    EventKind::Arrive => {
                        if let Some(open) = open_move.take() {
                            push(SpanKind::Move, open, e.time);
                        }
                        open_arrive = Some((e.time, e.object_id.clone()));
                    }
                    EventKind::InteractStart => {
                        if let Some(open) = open_arrive.take() {
                            if e.time > open.0 {
                                push(SpanKind::Wait, open, e.time);
                            }
                        }
                        open_interact = Some((e.time, e.object_id.clone()));
                    }
                    EventKind::InteractEnd => {
                        if let Some(open) = open_interact.take() {
                            push(SpanKind::Interact, open, e.time);
                        }
                    }
                    EventKind::Attach => open_carry = Some((e.time, e.object_id.clone())),
                    EventKind::DropDestroy => {
                        if let Some(open) = open_carry.take() {
                            push(SpanKind::Carry, open, e.time);
                        }
                    }
                    EventKind::Toggle | EventKind::Conflict => {}
                }
            }
            spans.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
            Lane {
                agent_id: agent.clone(),
                spans,
                idle_at,
            }
        })
        .collect()
}

fn object_label(o: &Option<ObjectId>) -> &str {
    o.as_ref().map_or("", |o| o.as_str())
}

fn render_text(trace: &SimTrace, lanes: &[Lane]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# timeline: {} lane(s), end {:.3} s",
        lanes.len(),
        trace.end_time()
    );
    for lane in lanes {
        let _ = writeln!(out, "lane {}", lane.agent_id);
        for span in &lane.spans {
            let _ = writeln!(
                out,
                "  {:<8} {:>9.3} -> {:>9.3}  {}",
                span.kind.label(),
                span.start,
                span.end,
                object_label(&span.object_id)
            );
        }
        if let Some(t) = lane.idle_at {
            let _ = writeln!(out, "  {:<8} {:>9.3}", "idle", t);
        }
    }
    out
}

const LANE_HEIGHT: f64 = 36.0;
const HEADER: f64 = 28.0;
const GUTTER: f64 = 70.0;
const PX_PER_SECOND: f64 = 40.0;

fn span_color(kind: SpanKind) -> &'static str {
    match kind {
        SpanKind::Move => "#9ecae1",
        SpanKind::Wait => "#fdae6b",
        SpanKind::Visit => "#d9d9d9",
        SpanKind::Interact => "#74c476",
        SpanKind::Carry => "#9e9ac8",
    }
}

fn render_svg(trace: &SimTrace, lanes: &[Lane]) -> String {
    let end = trace.end_time();
    let width = GUTTER + end * PX_PER_SECOND + 20.0;
    let height = HEADER + lanes.len() as f64 * LANE_HEIGHT + 8.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(
        out,
        r#"<text class="header" x="4" y="16">timeline: {} lane(s), end {:.3} s</text>"#,
        lanes.len(),
        end
    );
    for (i, lane) in lanes.iter().enumerate() {
        let top = HEADER + i as f64 * LANE_HEIGHT;
        let _ = writeln!(out, r#"<g class="lane" data-agent="{}">"#, lane.agent_id);
        let _ = writeln!(
            out,
            r#"<text x="4" y="{:.1}">{}</text>"#,
            top + LANE_HEIGHT / 2.0 + 4.0,
            lane.agent_id
        );
        for span in &lane.spans {
            // Carry sits in the upper half of the lane, everything else below it.
            let (y, h) = if span.kind == SpanKind::Carry {
                (top + 2.0, 8.0)
            } else {
                (top + 12.0, LANE_HEIGHT - 16.0)
            };
            let x = GUTTER + span.start * PX_PER_SECOND;
            let w = (span.end - span.start) * PX_PER_SECOND;
            let _ = writeln!(
                out,
                r#"<rect class="span {kind}" x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="{fill}"><title>{kind} {obj} {s:.3}-{e:.3}</title></rect>"#,
                kind = span.kind.label(),
                fill = span_color(span.kind),
                obj = object_label(&span.object_id),
                s = span.start,
                e = span.end,
            );
        }
        if let Some(t) = lane.idle_at {
            let x = GUTTER + t * PX_PER_SECOND;
            let _ = writeln!(
                out,
                r#"<line class="idle" x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
                top + 2.0,
                top + LANE_HEIGHT - 2.0
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_timeline(trace: &SimTrace, format: TimelineFormat) -> String {
    let lanes = lanes(trace);
    match format {
        TimelineFormat::Text => render_text(trace, &lanes),
        TimelineFormat::Svg => render_svg(trace, &lanes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::director::parse_plan;
    use crate::scene::{AgentSpec, ObjectSpec, Scene};
    use crate::sim::{simulate, ConflictPolicy};

    fn single_agent_trace() -> SimTrace {
        let scene = Scene {
            agents: vec![AgentSpec {
                name: "Guy".into(),
                id: "A_1".into(),
                tags: vec![],
                position: [0.0; 3],
            }],
            objects: vec![ObjectSpec {
                stationary: true,
                ..ObjectSpec::plain("Obj_1", "Chair", [3.0, 0.0, 0.0])
            }],
        };
        let plan = parse_plan("A_1 {Obj_1 (T, 5, 1.5, F, T, F)}").unwrap();
        simulate(&scene, &plan, ConflictPolicy::Wait).unwrap()
    }

    #[test]
    fn single_lane_text() {
        let text = render_timeline(&single_agent_trace(), TimelineFormat::Text);
        assert_eq!(
            text,
            "# timeline: 1 lane(s), end 7.000 s\n\
             lane A_1\n  \
             move         0.000 ->     2.000  Obj_1\n  \
             interact     2.000 ->     7.000  Obj_1\n  \
             idle         7.000\n"
        );
    }

    #[test]
    fn empty_trace_has_header_only() {
        let trace = SimTrace::default();
        assert_eq!(
            render_timeline(&trace, TimelineFormat::Text),
            "# timeline: 0 lane(s), end 0.000 s\n"
        );
        let svg = render_timeline(&trace, TimelineFormat::Svg);
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("class=\"lane\""));
    }

    #[test]
    fn svg_is_deterministic() {
        let trace = single_agent_trace();
        let a = render_timeline(&trace, TimelineFormat::Svg);
        assert_eq!(a, render_timeline(&trace, TimelineFormat::Svg));
        assert_eq!(a.matches("class=\"span interact\"").count(), 1);
        assert_eq!(a.matches("class=\"lane\"").count(), 1);
    }

    #[test]
    fn format_tokens() {
        assert_eq!("svg".parse(), Ok(TimelineFormat::Svg));
        assert_eq!("text".parse(), Ok(TimelineFormat::Text));
        assert_eq!(
            "png".parse::<TimelineFormat>(),
            Err(UnknownFormat("png".into()))
        );
    }
}
