use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use super::{
    floor_point, AgentMode, AgentState, ConflictPolicy, ConflictRecord, EventKind, ObjectState,
    PathProvider, Point, SimError, SimEvent, SimTrace, StraightLine,
};
use crate::director::{
    validate_plan, ActionPlan, Destination, DestinationKind, Strictness, ViolationCode,
};
use crate::scene::{validate_scene, AgentId, ObjectId, ObjectSpec, Scene};

/// Wake-up classes at equal times: finishing (which releases objects) runs
/// before arrivals, so back-to-back use of an object is not a conflict.
const FINISH: u8 = 0;
const ARRIVE: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Wake {
    time: f64,
    class: u8,
    agent: usize,
}

impl Eq for Wake {}

impl Ord for Wake {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap.
        other
            .time
            .total_cmp(&self.time)
            .then(other.class.cmp(&self.class))
            .then(other.agent.cmp(&self.agent))
    }
}

impl PartialOrd for Wake {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Runner<'a> {
    id: AgentId,
    queue: &'a [Destination],
    state: AgentState,
    /// Queue index of the destination where the carried object was attached.
    carry_from: Option<usize>,
    /// Arrival time at the current destination, for wait accounting.
    arrived_at: f64,
}

struct Occupant {
    agent: usize,
    until: f64,
}

struct World<'a, P> {
    scene: &'a Scene,
    paths: &'a P,
    policy: ConflictPolicy,
    runners: Vec<Runner<'a>>,
    heap: BinaryHeap<Wake>,
    occupied: HashMap<&'a ObjectId, Occupant>,
    waiters: HashMap<&'a ObjectId, VecDeque<usize>>,
    carried_by: HashMap<ObjectId, usize>,
    destroyed: Vec<ObjectId>,
    toggles: HashMap<&'a ObjectId, bool>,
    trace: SimTrace,
}

impl<'a, P: PathProvider> World<'a, P> {
    fn emit(
        &mut self,
        time: f64,
        agent: usize,
        kind: EventKind,
        object: Option<&ObjectId>,
        detail: impl Into<String>,
    ) {
        self.trace.events.push(SimEvent {
            time,
            agent_id: Some(self.runners[agent].id.clone()),
            kind,
            object_id: object.cloned(),
            detail: detail.into(),
        });
    }

    fn dest(&self, agent: usize) -> &'a Destination {
        let r = &self.runners[agent];
        &r.queue[r.state.queue_cursor]
    }

    fn object(&self, id: &ObjectId) -> &'a ObjectSpec {
        // Presence is a checked precondition.
        self.scene.object(id).expect("object exists in scene")
    }

    fn check_available(&self, agent: usize, object: &ObjectId, time: f64) -> Result<(), SimError> {
        if self.destroyed.contains(object) {
            return Err(SimError::DestroyedObject {
                agent: self.runners[agent].id.clone(),
                object: object.clone(),
                time,
            });
        }
        if let Some(&holder) = self.carried_by.get(object) {
            return Err(SimError::CarriedObject {
                agent: self.runners[agent].id.clone(),
                object: object.clone(),
                holder: self.runners[holder].id.clone(),
                time,
            });
        }
        Ok(())
    }

    fn drop_carried(&mut self, agent: usize, time: f64, detail: &str) {
        let Some(object) = self.runners[agent].state.carried_object.take() else {
            return;
        };
        let r = &mut self.runners[agent];
        r.state.upper_channel = None;
        r.carry_from = None;
        self.carried_by.remove(&object);
        self.emit(time, agent, EventKind::DropDestroy, Some(&object), detail);
        self.destroyed.push(object);
    }

    /// Begin the destination at the cursor, or finalize if the queue is done.
    fn start_next(&mut self, agent: usize, time: f64) -> Result<(), SimError> {
        let r = &self.runners[agent];
        if r.state.queue_cursor >= r.queue.len() {
            self.drop_carried(agent, time, "queue finished");
            let r = &mut self.runners[agent];
            r.state.mode = AgentMode::Idle;
            r.state.lower_channel = None;
            self.emit(time, agent, EventKind::Idle, None, "");
            return Ok(());
        }
        let dest = self.dest(agent);
        self.check_available(agent, &dest.object_id, time)?;
        let target = floor_point(&self.object(&dest.object_id).position);
        let from = self.runners[agent].state.position;
        let arrive = time + self.paths.distance(from, target) / dest.speed;
        self.runners[agent].state.mode = AgentMode::Moving;
        self.emit(
            time,
            agent,
            EventKind::MoveStart,
            Some(&dest.object_id),
            format!("speed {}", dest.speed),
        );
        self.heap.push(Wake {
            time: arrive,
            class: ARRIVE,
            agent,
        });
        Ok(())
    }

    fn arrive(&mut self, agent: usize, time: f64) -> Result<(), SimError> {
        let dest = self.dest(agent);
        let object = self.object(&dest.object_id);
        {
            let r = &mut self.runners[agent];
            r.state.position = floor_point(&object.position);
            r.arrived_at = time;
        }
        self.emit(time, agent, EventKind::Arrive, Some(&object.id), "");
        self.check_available(agent, &object.id, time)?;

        match dest.kind() {
            DestinationKind::Visit => {
                self.runners[agent].state.mode = AgentMode::Waiting;
                self.heap.push(Wake {
                    time: time + dest.duration,
                    class: FINISH,
                    agent,
                });
            }
            DestinationKind::Grab => {
                self.drop_carried(agent, time, "released for a new grab");
                let r = &mut self.runners[agent];
                r.state.carried_object = Some(object.id.clone());
                r.state.upper_channel = Some(object.id.clone());
                r.carry_from = Some(r.state.queue_cursor);
                self.carried_by.insert(object.id.clone(), agent);
                self.emit(
                    time,
                    agent,
                    EventKind::Attach,
                    Some(&object.id),
                    "upper channel",
                );
                self.begin_interaction(agent, time);
            }
            DestinationKind::Normal | DestinationKind::Stationary | DestinationKind::Basic => {
                if dest.kind() == DestinationKind::Stationary
                    && self.runners[agent].state.carried_object.is_some()
                    && !object.stationary_compatible
                {
                    self.drop_carried(
                        agent,
                        time,
                        "warning: carried object is not compatible with this stationary action",
                    );
                }
                match self.occupied.get(&object.id) {
                    None => self.begin_interaction(agent, time),
                    Some(holder) => {
                        let record = ConflictRecord {
                            object_id: object.id.clone(),
                            agents: vec![
                                self.runners[holder.agent].id.clone(),
                                self.runners[agent].id.clone(),
                            ],
                            interval: (time, holder.until.min(time + dest.duration)),
                        };
                        match self.policy {
                            ConflictPolicy::Fail => return Err(SimError::Conflict(record)),
                            ConflictPolicy::Wait => {
                                self.runners[agent].state.mode = AgentMode::Waiting;
                                self.waiters.entry(&object.id).or_default().push_back(agent);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn begin_interaction(&mut self, agent: usize, time: f64) {
        let dest = self.dest(agent);
        let object = self.object(&dest.object_id);
        let kind = dest.kind();
        let end = time + dest.duration;
        if kind.is_exclusive() {
            self.occupied
                .insert(&object.id, Occupant { agent, until: end });
        }
        self.runners[agent].state.mode = AgentMode::Interacting;
        self.emit(
            time,
            agent,
            EventKind::InteractStart,
            Some(&object.id),
            format!("{kind:?}").to_lowercase(),
        );
        match kind {
            DestinationKind::Stationary => {
                self.runners[agent].state.lower_channel = Some(object.id.clone());
            }
            DestinationKind::Basic => {
                let state = self
                    .toggles
                    .entry(&object.id)
                    .or_insert(object.initial_state);
                *state = !*state;
                let detail = if *state { "off -> on" } else { "on -> off" };
                self.emit(time, agent, EventKind::Toggle, Some(&object.id), detail);
            }
            _ => {}
        }
        self.heap.push(Wake {
            time: end,
            class: FINISH,
            agent,
        });
    }

    fn finish(&mut self, agent: usize, time: f64) -> Result<(), SimError> {
        let dest = self.dest(agent);
        let kind = dest.kind();
        if kind != DestinationKind::Visit {
            self.emit(
                time,
                agent,
                EventKind::InteractEnd,
                Some(&dest.object_id),
                "",
            );
        }
        if kind == DestinationKind::Stationary {
            self.runners[agent].state.lower_channel = None;
        }
        let cursor = self.runners[agent].state.queue_cursor;
        if self.runners[agent]
            .carry_from
            .is_some_and(|from| from < cursor)
        {
            self.drop_carried(agent, time, "done");
        }
        if kind.is_exclusive() {
            self.occupied.remove(&dest.object_id);
            let next = self
                .waiters
                .get_mut(&dest.object_id)
                .and_then(VecDeque::pop_front);
            if let Some(waiter) = next {
                let since = self.runners[waiter].arrived_at;
                let record = ConflictRecord {
                    object_id: dest.object_id.clone(),
                    agents: vec![
                        self.runners[agent].id.clone(),
                        self.runners[waiter].id.clone(),
                    ],
                    interval: (since, time),
                };
                self.emit(
                    time,
                    waiter,
                    EventKind::Conflict,
                    Some(&dest.object_id),
                    format!("waited {:.3}s for {}", time - since, self.runners[agent].id),
                );
                self.trace.conflicts.push(record);
                self.begin_interaction(waiter, time);
            }
        }
        self.runners[agent].state.queue_cursor += 1;
        self.start_next(agent, time)
    }
}

fn check_preconditions(scene: &Scene, plan: &ActionPlan) -> Result<(), SimError> {
    if let Some(v) = validate_scene(scene).into_iter().next() {
        return Err(SimError::Precondition(v.to_string()));
    }
    if scene.is_empty() {
        return Err(SimError::Precondition(
            "scene needs at least one agent and one object".into(),
        ));
    }
    // Grab reuse is left to run time, where it surfaces as a destroyed or
    // carried object reference.
    let report = validate_plan(plan, scene, Strictness::Lenient);
    if let Some(v) = report.errors().find(|v| v.code != ViolationCode::GrabReuse) {
        return Err(SimError::Precondition(format!(
            "{} at {}: {}",
            v.code, v.location, v.message
        )));
    }
    Ok(())
}

pub fn simulate(
    scene: &Scene,
    plan: &ActionPlan,
    policy: ConflictPolicy,
) -> Result<SimTrace, SimError> {
    simulate_with(scene, plan, policy, &StraightLine)
}

pub fn simulate_with<P: PathProvider>(
    scene: &Scene,
    plan: &ActionPlan,
    policy: ConflictPolicy,
    paths: &P,
) -> Result<SimTrace, SimError> {
    check_preconditions(scene, plan)?;

    let runners = plan
        .entries
        .iter()
        .map(|entry| {
            let agent = scene.agent(&entry.agent_id).expect("checked");
            let position: Point = floor_point(&agent.position);
            Runner {
                id: entry.agent_id.clone(),
                queue: &entry.queue,
                state: AgentState {
                    agent_id: entry.agent_id.clone(),
                    position,
                    mode: AgentMode::Idle,
                    carried_object: None,
                    lower_channel: None,
                    upper_channel: None,
                    queue_cursor: 0,
                },
                carry_from: None,
                arrived_at: 0.0,
            }
        })
        .collect();

    let mut world = World {
        scene,
        paths,
        policy,
        runners,
        heap: BinaryHeap::new(),
        occupied: HashMap::new(),
        waiters: HashMap::new(),
        carried_by: HashMap::new(),
        destroyed: Vec::new(),
        toggles: HashMap::new(),
        trace: SimTrace::default(),
    };

    for agent in 0..world.runners.len() {
        world.start_next(agent, 0.0)?;
    }
    while let Some(wake) = world.heap.pop() {
        match wake.class {
            ARRIVE => world.arrive(wake.agent, wake.time)?,
            _ => world.finish(wake.agent, wake.time)?,
        }
    }

    let World {
        runners,
        destroyed,
        toggles,
        mut trace,
        ..
    } = world;
    trace.final_states = runners.into_iter().map(|r| r.state).collect();
    trace.object_states = scene
        .objects
        .iter()
        .filter(|o| o.basic)
        .map(|o| ObjectState {
            object_id: o.id.clone(),
            on: toggles.get(&o.id).copied().unwrap_or(o.initial_state),
        })
        .collect();
    trace.destroyed_objects = destroyed;
    Ok(trace)
}
