//! Reference computations written independently of the library, shared by the
//! property tests and the acceptance harness.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use scene_director::director::{ActionPlan, DestinationKind};
use scene_director::scene::{AgentId, ObjectId, Scene};
use scene_director::sim::{EventKind, SimTrace};

/// Product of two non-negative decimal strings, schoolbook style.
pub fn dec_mul(a: &str, b: &str) -> String {
    let a: Vec<u32> = a.bytes().rev().map(|c| u32::from(c - b'0')).collect();
    let b: Vec<u32> = b.bytes().rev().map(|c| u32::from(c - b'0')).collect();
    let mut acc = vec![0u32; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        let mut carry = 0;
        for (j, y) in b.iter().enumerate() {
            let cur = acc[i + j] + x * y + carry;
            acc[i + j] = cur % 10;
            carry = cur / 10;
        }
        let mut k = i + b.len();
        while carry > 0 {
            let cur = acc[k] + carry;
            acc[k] = cur % 10;
            carry = cur / 10;
            k += 1;
        }
    }
    while acc.len() > 1 && *acc.last().unwrap() == 0 {
        acc.pop();
    }
    acc.iter()
        .rev()
        .map(|d| char::from(b'0' + *d as u8))
        .collect()
}

/// `(m * v * d) ^ n` as a decimal string.
pub fn dec_scenarios(m: u64, v: u64, d: u64, n: u32) -> String {
    let base = dec_mul(&dec_mul(&m.to_string(), &v.to_string()), &d.to_string());
    let mut out = "1".to_owned();
    for _ in 0..n {
        out = dec_mul(&out, &base);
    }
    out
}

/// Textbook two-pass sample standard deviation.
pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Arrival times for one agent with no waiting: each leg starts when the
/// previous destination ends.
pub fn expected_arrivals(scene: &Scene, plan: &ActionPlan, agent: &AgentId) -> Vec<f64> {
    let a = scene.agents.iter().find(|a| &a.id == agent).unwrap();
    let (mut x, mut z) = (a.position[0], a.position[2]);
    let mut t = 0.0;
    let mut out = Vec::new();
    for d in plan.queue(agent).unwrap() {
        let o = scene.objects.iter().find(|o| o.id == d.object_id).unwrap();
        let (ox, oz) = (o.position[0], o.position[2]);
        let dist = ((ox - x) * (ox - x) + (oz - z) * (oz - z)).sqrt();
        t += dist / d.speed;
        out.push(t);
        t += d.duration;
        x = ox;
        z = oz;
    }
    out
}

/// Checks every structural invariant of a successful run.
pub fn check_trace(scene: &Scene, plan: &ActionPlan, trace: &SimTrace) -> Result<(), String> {
    // Non-decreasing time.
    for w in trace.events.windows(2) {
        if w[1].time < w[0].time {
            return Err(format!("time goes backwards: {:?} then {:?}", w[0], w[1]));
        }
    }

    // Per-agent ordering: move_start/arrive alternate; interact_start/end pair.
    for entry in &plan.entries {
        let mut moving = false;
        let mut interacting = false;
        let mut arrivals = 0;
        for e in trace.events_for(&entry.agent_id) {
            match e.kind {
                EventKind::MoveStart if moving || interacting => {
                    return Err(format!(
                        "{} move_start out of order at {}",
                        entry.agent_id, e.time
                    ))
                }
                EventKind::MoveStart => moving = true,
                EventKind::Arrive if !moving => {
                    return Err(format!("{} arrive without move", entry.agent_id))
                }
                EventKind::Arrive => {
                    moving = false;
                    arrivals += 1;
                }
                EventKind::InteractStart if interacting => return Err("nested interaction".into()),
                EventKind::InteractStart => interacting = true,
                EventKind::InteractEnd if !interacting => {
                    return Err("interact_end without start".into())
                }
                EventKind::InteractEnd => interacting = false,
                _ => {}
            }
        }
        if arrivals != entry.queue.len() {
            return Err(format!(
                "{} arrived {arrivals} times for {} destinations",
                entry.agent_id,
                entry.queue.len()
            ));
        }
        let idles = trace
            .events_for(&entry.agent_id)
            .filter(|e| e.kind == EventKind::Idle)
            .count();
        if idles != 1 {
            return Err(format!("{} has {idles} idle events", entry.agent_id));
        }
    }
    for s in &trace.final_states {
        if s.carried_object.is_some() || s.lower_channel.is_some() || s.upper_channel.is_some() {
            return Err(format!("{} ends with a channel in use", s.agent_id));
        }
        if format!("{:?}", s.mode) != "Idle" {
            return Err(format!("{} ends {:?}", s.agent_id, s.mode));
        }
    }

    // Grab lifecycle.
    let grabbed: HashSet<&ObjectId> = plan
        .entries
        .iter()
        .flat_map(|e| &e.queue)
        .filter(|d| d.kind() == DestinationKind::Grab)
        .map(|d| &d.object_id)
        .collect();
    for id in &trace.destroyed_objects {
        if !grabbed.contains(id) {
            return Err(format!("{id} destroyed but never grabbed"));
        }
    }
    for id in &grabbed {
        let count = |k: EventKind| {
            trace
                .events
                .iter()
                .filter(|e| e.kind == k && e.object_id.as_ref() == Some(*id))
                .count()
        };
        if count(EventKind::Attach) != 1 || count(EventKind::DropDestroy) != 1 {
            return Err(format!("{id} attached or destroyed more than once"));
        }
        if trace.destroyed_objects.iter().filter(|d| d == id).count() != 1 {
            return Err(format!("{id} not destroyed exactly once"));
        }
        let gone = trace
            .events
            .iter()
            .position(|e| e.kind == EventKind::DropDestroy && e.object_id.as_ref() == Some(*id))
            .unwrap();
        if trace.events[gone + 1..]
            .iter()
            .any(|e| e.object_id.as_ref() == Some(*id) && e.kind != EventKind::Idle)
        {
            return Err(format!("{id} referenced after destruction"));
        }
    }

    // Exclusive occupancy. Objects that are grabbed see no other use.
    let mut spans: HashMap<&ObjectId, Vec<(&AgentId, f64, f64)>> = HashMap::new();
    for entry in &plan.entries {
        let mut open: Option<(&ObjectId, f64)> = None;
        for e in trace.events_for(&entry.agent_id) {
            let Some(obj) = e.object_id.as_ref() else {
                continue;
            };
            if grabbed.contains(obj) {
                continue;
            }
            match e.kind {
                EventKind::InteractStart => open = Some((obj, e.time)),
                EventKind::InteractEnd => {
                    let (o, start) = open.take().unwrap();
                    spans
                        .entry(o)
                        .or_default()
                        .push((&entry.agent_id, start, e.time));
                }
                _ => {}
            }
        }
    }
    for (obj, uses) in &spans {
        for (i, a) in uses.iter().enumerate() {
            for b in &uses[i + 1..] {
                if a.0 != b.0 && a.1 < b.2 && b.1 < a.2 {
                    return Err(format!("{obj} held by {} and {} at once", a.0, b.0));
                }
            }
        }
    }

    // Toggles: final state is the initial state flipped once per toggle.
    for o in scene.objects.iter().filter(|o| o.basic) {
        let flips = trace
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Toggle && e.object_id.as_ref() == Some(&o.id))
            .count();
        let expected = o.initial_state ^ (flips % 2 == 1);
        if trace.object_state(&o.id) != Some(expected) {
            return Err(format!("{} state after {flips} toggles is wrong", o.id));
        }
    }

    // Linear bound on event count.
    let dests = plan.destination_count();
    if trace.events.len() > 8 * dests + plan.entries.len() {
        return Err(format!(
            "{} events for {dests} destinations",
            trace.events.len()
        ));
    }
    Ok(())
}

/// Entities read back from a scene description, in order of appearance.
#[derive(Debug, PartialEq)]
pub enum Described {
    Agent {
        name: String,
        id: String,
        tags: Vec<String>,
        position: [String; 3],
    },
    Object {
        id: String,
        name: String,
        flags: [bool; 4],
        tags: Vec<String>,
        position: [String; 3],
    },
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str, String> {
    let line = line.ok_or(format!("missing {key}"))?;
    let rest = line
        .strip_prefix(key)
        .ok_or(format!("expected {key:?}, got {line:?}"))?;
    Ok(rest.strip_prefix(' ').unwrap_or(rest))
}

fn yes_no(s: &str) -> Result<bool, String> {
    match s {
        "Yes" => Ok(true),
        "No" => Ok(false),
        other => Err(format!("expected Yes/No, got {other:?}")),
    }
}

fn tags(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(", ").map(str::to_owned).collect()
    }
}

fn position(s: &str) -> Result<[String; 3], String> {
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or(format!("bad position {s:?}"))?;
    let parts: Vec<String> = inner.split(", ").map(str::to_owned).collect();
    parts.try_into().map_err(|_| format!("bad position {s:?}"))
}

/// Reads a scene description back into its entities.
pub fn read_description(text: &str) -> Result<Vec<Described>, String> {
    const RULE: &str = "----------";
    let mut lines = text.lines();
    let expect = |want: &str, lines: &mut std::str::Lines| match lines.next() {
        Some(l) if l == want => Ok(()),
        other => Err(format!("expected {want:?}, got {other:?}")),
    };
    expect("Scene Description:", &mut lines)?;
    expect(RULE, &mut lines)?;
    expect("Actors:", &mut lines)?;
    expect(RULE, &mut lines)?;
    let mut out = Vec::new();
    loop {
        let line = lines.next();
        if line == Some(RULE) {
            break;
        }
        let name = field(line, "Name:")?.to_owned();
        let id = field(lines.next(), "ID:")?.to_owned();
        let t = tags(field(lines.next(), "Tags:")?);
        let p = position(field(lines.next(), "Position:")?)?;
        expect(RULE, &mut lines)?;
        out.push(Described::Agent {
            name,
            id,
            tags: t,
            position: p,
        });
    }
    expect("Interactable Objects:", &mut lines)?;
    expect(RULE, &mut lines)?;
    loop {
        let line = lines.next();
        if line == Some(RULE) {
            break;
        }
        let id = field(line, "Object ID:")?.to_owned();
        let name = field(lines.next(), "Name:")?.to_owned();
        let flags = [
            yes_no(field(lines.next(), "Is Grabbable:")?)?,
            yes_no(field(lines.next(), "Is Stationary:")?)?,
            yes_no(field(lines.next(), "Is Stationary Compatible:")?)?,
            yes_no(field(lines.next(), "Is Basic Interaction:")?)?,
        ];
        let t = tags(field(lines.next(), "Tags:")?);
        let p = position(field(lines.next(), "Position:")?)?;
        expect(RULE, &mut lines)?;
        out.push(Described::Object {
            id,
            name,
            flags,
            tags: t,
            position: p,
        });
    }
    expect("END", &mut lines)?;
    expect(RULE, &mut lines)?;
    if let Some(extra) = lines.next() {
        return Err(format!("trailing line {extra:?}"));
    }
    Ok(out)
}

/// A coordinate as the description should print it: two decimals, no leading
/// zero, and `0` for anything that rounds to zero.
pub fn expected_coordinate(x: f64) -> String {
    let cents = (x * 100.0).round() as i64;
    if cents == 0 {
        return "0".into();
    }
    let sign = if cents < 0 { "-" } else { "" };
    let whole = cents.abs() / 100;
    let frac = cents.abs() % 100;
    if whole == 0 {
        format!("{sign}.{frac:02}")
    } else {
        format!("{sign}{whole}.{frac:02}")
    }
}
