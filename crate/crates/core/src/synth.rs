//! Seeded scene and plan generators for tests, benchmarks, and the scenario
//! catalog.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::director::{
    ActionPlan, AgentQueue, Destination, BASIC_DURATION_RANGE, DURATION_RANGE, SPEED_RANGE,
};
use crate::scene::{Affordance, AgentId, AgentSpec, ObjectId, ObjectSpec, Position, Scene};

pub struct CatalogItem {
    pub name: &'static str,
    pub affordance: Affordance,
    pub stationary_compatible: bool,
    pub tags: &'static [&'static str],
}

pub const CATALOG: &[CatalogItem] = &[
    CatalogItem {
        name: "Light Switch",
        affordance: Affordance::Basic,
        stationary_compatible: false,
        tags: &["light", "switch", "toggle"],
    },
    CatalogItem {
        name: "Chair",
        affordance: Affordance::Stationary,
        stationary_compatible: false,
        tags: &["chair", "sit", "stay", "relax"],
    },
    CatalogItem {
        name: "Bed",
        affordance: Affordance::Stationary,
        stationary_compatible: false,
        tags: &["bed", "sleep", "rest"],
    },
    CatalogItem {
        name: "Computer",
        affordance: Affordance::Stationary,
        stationary_compatible: false,
        tags: &["work", "play games", "desktop", "office work"],
    },
    CatalogItem {
        name: "Couch",
        affordance: Affordance::Stationary,
        stationary_compatible: true,
        tags: &["couch", "sit", "relax", "read"],
    },
    CatalogItem {
        name: "Book",
        affordance: Affordance::Grab,
        stationary_compatible: false,
        tags: &["book", "read", "carry"],
    },
    CatalogItem {
        name: "Box",
        affordance: Affordance::Grab,
        stationary_compatible: false,
        tags: &["box", "carry", "move"],
    },
    CatalogItem {
        name: "Plant",
        affordance: Affordance::Plain,
        stationary_compatible: false,
        tags: &["plant", "look", "decoration"],
    },
];

const AGENT_NAMES: &[(&str, &[&str])] = &[
    ("Guy", &["male", "college student", "casual"]),
    ("Maya", &["female", "engineer", "focused"]),
    ("Omar", &["male", "retired", "talkative"]),
    ("Lena", &["female", "artist", "restless"]),
    ("Theo", &["male", "child", "curious"]),
    ("Ines", &["female", "nurse", "tired"]),
];

impl CatalogItem {
    pub fn object(&self, number: u64, position: Position) -> ObjectSpec {
        ObjectSpec {
            grabbable: self.affordance == Affordance::Grab,
            stationary: self.affordance == Affordance::Stationary,
            stationary_compatible: self.stationary_compatible,
            basic: self.affordance == Affordance::Basic,
            tags: self.tags.iter().map(|t| (*t).to_owned()).collect(),
            ..ObjectSpec::plain(ObjectId::numbered(number).as_str(), self.name, position)
        }
    }
}

/// Rounds to two decimals, the precision scene descriptions print.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// A floor position within `extent` of the origin, on a 1 cm grid.
pub fn floor_position(rng: &mut impl Rng, extent: f64) -> Position {
    [
        round2(rng.random_range(-extent..=extent)),
        round2(rng.random_range(0.0..=0.5)),
        round2(rng.random_range(-extent..=extent)),
    ]
}

pub fn agent(number: u64, position: Position) -> AgentSpec {
    let (name, tags) = AGENT_NAMES[(number as usize - 1) % AGENT_NAMES.len()];
    AgentSpec {
        name: name.to_owned(),
        id: AgentId::numbered(number),
        tags: tags.iter().map(|t| (*t).to_owned()).collect(),
        position,
    }
}

/// Scene with the given counts, catalog objects chosen at random.
pub fn random_scene(seed: u64, agents: usize, objects: usize, extent: f64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = (1..=agents as u64)
        .map(|n| agent(n, floor_position(&mut rng, extent)))
        .collect();
    let objects = (1..=objects as u64)
        .map(|n| {
            let item = &CATALOG[rng.random_range(0..CATALOG.len())];
            item.object(n, floor_position(&mut rng, extent))
        })
        .collect();
    Scene { agents, objects }
}

/// Uniform in `range`, rounded to two decimals and clamped back into it.
fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    round2(rng.random_range(lo..=hi)).clamp(lo, hi)
}

/// A plan that passes strict validation on `scene` but may contain timing
/// conflicts. Every agent gets one to `max_len` destinations.
///
/// # Panics
///
/// Panics if the scene has no objects.
pub fn random_plan(scene: &Scene, seed: u64, max_len: usize) -> ActionPlan {
    assert!(!scene.objects.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut referenced: HashSet<&ObjectId> = HashSet::new();
    let mut grabbed: HashSet<&ObjectId> = HashSet::new();
    let mut entries = Vec::new();

    for a in &scene.agents {
        let len = rng.random_range(1..=max_len.max(1));
        let mut queue = Vec::with_capacity(len);
        for _ in 0..len {
            let free: Vec<&ObjectSpec> = scene
                .objects
                .iter()
                .filter(|o| !grabbed.contains(&o.id))
                .collect();
            let object = free[rng.random_range(0..free.len())];
            let speed = draw(&mut rng, SPEED_RANGE);
            let roll = rng.random_range(0..10);
            let may_grab = !referenced.contains(&object.id) && free.len() > 1;
            let (interact, grab, stationary, basic) = match object.affordance() {
                _ if roll == 0 => (false, false, false, false),
                _ if roll == 1 => (true, false, false, false),
                Affordance::Grab if may_grab => (true, true, false, false),
                Affordance::Grab => (false, false, false, false),
                Affordance::Stationary => (true, false, true, false),
                Affordance::Basic => (true, false, false, true),
                Affordance::Plain => (false, false, false, false),
            };
            let duration = if interact && basic {
                draw(&mut rng, BASIC_DURATION_RANGE)
            } else {
                draw(&mut rng, DURATION_RANGE)
            };
            if grab {
                grabbed.insert(&object.id);
            }
            referenced.insert(&object.id);
            queue.push(Destination {
                object_id: object.id.clone(),
                interact,
                duration,
                speed,
                grab,
                stationary,
                basic,
            });
        }
        entries.push(AgentQueue {
            agent_id: a.id.clone(),
            queue,
        });
    }
    ActionPlan { entries }
}
