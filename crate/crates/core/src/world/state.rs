use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::WorldConfig;
use super::WorldError;
use crate::syntax::{CategoryName, ConstantName, Property, RoomName};
use crate::taxonomy::Taxonomy;

pub type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

pub fn horizontal_distance(a: Vec3, b: Vec3) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Pose {
    /// meters
    pub position: Vec3,
    /// radians
    pub yaw: f64,
}

impl Pose {
    pub fn at(position: Vec3) -> Self {
        Pose { position, yaw: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite()) && self.yaw.is_finite()
    }
}

/// Axis-aligned box, inclusive on every face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    /// Non-degenerate footprint on the floor plane.
    pub fn has_area(&self) -> bool {
        self.min[0] < self.max[0] && self.min[1] < self.max[1] && self.min[2] <= self.max[2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedState {
    /// °C
    pub temperature: f64,
    /// Highest temperature seen this episode, °C.
    pub temperature_max: f64,
    /// Lowest temperature seen this episode, °C.
    pub temperature_min: f64,
    pub wetness: f64,
    pub dust_level: f64,
    pub stain_level: f64,
    pub toggled_on: bool,
    pub open: bool,
    pub sliced: bool,
}

impl ExtendedState {
    pub fn at_temperature(t: f64) -> Self {
        ExtendedState {
            temperature: t,
            temperature_max: t,
            temperature_min: t,
            wetness: 0.0,
            dust_level: 0.0,
            stain_level: 0.0,
            toggled_on: false,
            open: false,
            sliced: false,
        }
    }

    pub(crate) fn set_temperature(&mut self, t: f64) {
        self.temperature = t;
        self.temperature_max = self.temperature_max.max(t);
        self.temperature_min = self.temperature_min.min(t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub cook: f64,
    pub burn: f64,
    pub freeze: f64,
}

impl Thresholds {
    pub fn from_config(c: &WorldConfig) -> Self {
        Thresholds {
            cook: c.cook_threshold,
            burn: c.burn_threshold,
            freeze: c.freeze_threshold,
        }
    }
}

/// Identifier of a physical object in a scene (`countertop_84`, `apple.n.01_1`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(s: impl Into<String>) -> Self {
        ObjectId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&ConstantName> for ObjectId {
    fn from(c: &ConstantName) -> Self {
        ObjectId(c.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub category: CategoryName,
    pub pose: Pose,
    pub ext: ExtendedState,
    pub thresholds: Thresholds,
    /// m
    pub bounding_radius: f64,
    /// Scene furniture that cannot be grasped.
    pub fixed: bool,
    /// Semantic properties inherited from the category.
    pub properties: BTreeSet<Property>,
}

impl ObjectInstance {
    pub fn new(
        id: ObjectId,
        category: CategoryName,
        position: Vec3,
        taxonomy: &Taxonomy,
        config: &WorldConfig,
    ) -> Result<Self, WorldError> {
        let properties = taxonomy.properties(&category)?.clone();
        Ok(ObjectInstance {
            id,
            category,
            pose: Pose::at(position),
            ext: ExtendedState::at_temperature(config.ambient_temperature),
            thresholds: Thresholds::from_config(config),
            bounding_radius: config.default_object_radius,
            fixed: false,
            properties,
        })
    }

    pub fn has(&self, prop: &str) -> bool {
        self.properties.iter().any(|p| p.as_str() == prop)
    }

    pub fn position(&self) -> Vec3 {
        self.pose.position
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub const BOTH: [Hand; 2] = [Hand::Left, Hand::Right];
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hand::Left => "left",
            Hand::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AgentState {
    pub body: Pose,
    pub left_hand: Pose,
    pub right_hand: Pose,
    pub left_held: Option<ObjectId>,
    pub right_held: Option<ObjectId>,
    pub left_contact: Option<ObjectId>,
    pub right_contact: Option<ObjectId>,
}

/// Hand rest offsets relative to the body origin.
const LEFT_REST: Vec3 = [0.0, 0.25, 1.0];
const RIGHT_REST: Vec3 = [0.0, -0.25, 1.0];

impl AgentState {
    pub fn standing_at(body: Pose) -> Self {
        let mut a = AgentState {
            body,
            ..Default::default()
        };
        a.left_hand = Pose::at(add(body.position, LEFT_REST));
        a.right_hand = Pose::at(add(body.position, RIGHT_REST));
        a
    }

    pub fn rest_position(&self, hand: Hand) -> Vec3 {
        match hand {
            Hand::Left => add(self.body.position, LEFT_REST),
            Hand::Right => add(self.body.position, RIGHT_REST),
        }
    }

    pub fn held(&self, hand: Hand) -> Option<&ObjectId> {
        match hand {
            Hand::Left => self.left_held.as_ref(),
            Hand::Right => self.right_held.as_ref(),
        }
    }

    pub fn contact(&self, hand: Hand) -> Option<&ObjectId> {
        match hand {
            Hand::Left => self.left_contact.as_ref(),
            Hand::Right => self.right_contact.as_ref(),
        }
    }

    pub fn hand(&self, hand: Hand) -> &Pose {
        match hand {
            Hand::Left => &self.left_hand,
            Hand::Right => &self.right_hand,
        }
    }

    pub(crate) fn hand_mut(&mut self, hand: Hand) -> &mut Pose {
        match hand {
            Hand::Left => &mut self.left_hand,
            Hand::Right => &mut self.right_hand,
        }
    }

    pub(crate) fn set_held(&mut self, hand: Hand, id: Option<ObjectId>) {
        match hand {
            Hand::Left => {
                self.left_contact = id.clone();
                self.left_held = id;
            }
            Hand::Right => {
                self.right_contact = id.clone();
                self.right_held = id;
            }
        }
    }

    pub fn holding(&self, id: &ObjectId) -> Option<Hand> {
        Hand::BOTH.into_iter().find(|h| self.held(*h) == Some(id))
    }
}

/// How an object currently rests in the scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    OnTop(ObjectId),
    Inside(ObjectId),
    Floor,
    Held,
    /// No recorded support (e.g. wall-mounted fixtures).
    Free,
}

/// Object-centric symbolic world. Updates produce new values; nothing here
/// is shared mutably.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub objects: BTreeMap<ObjectId, ObjectInstance>,
    pub rooms: BTreeMap<RoomName, Aabb>,
    /// object → object it rests directly on top of
    pub support: BTreeMap<ObjectId, ObjectId>,
    /// object → object it is directly inside of
    pub containment: BTreeMap<ObjectId, ObjectId>,
    pub on_floor: BTreeSet<ObjectId>,
    pub agent: AgentState,
    /// simulated seconds
    pub clock: f64,
    /// Activity constants bound to scene objects.
    pub aliases: BTreeMap<ConstantName, ObjectId>,
    pub config: WorldConfig,
}

impl SceneState {
    pub fn empty(config: WorldConfig) -> Self {
        SceneState {
            objects: BTreeMap::new(),
            rooms: BTreeMap::new(),
            support: BTreeMap::new(),
            containment: BTreeMap::new(),
            on_floor: BTreeSet::new(),
            agent: AgentState::standing_at(Pose::default()),
            clock: 0.0,
            aliases: BTreeMap::new(),
            config,
        }
    }

    pub fn object(&self, id: &ObjectId) -> Result<&ObjectInstance, WorldError> {
        self.objects
            .get(id)
            .ok_or_else(|| WorldError::UnknownObject(id.clone()))
    }


    /// Scene object standing for an activity constant: its alias if bound,
    /// otherwise an object whose id is the constant's own name.
    pub fn resolve_constant(&self, c: &ConstantName) -> Result<&ObjectId, WorldError> {
        if let Some(id) = self.aliases.get(c) {
            return Ok(id);
        }
        self.objects
            .get_key_value(&ObjectId::from(c))
            .map(|(k, _)| k)
            .ok_or_else(|| WorldError::UnknownConstant(c.clone()))
    }

    /// Resolves a user-facing name: an activity constant or a raw object id.
    pub fn resolve_name(&self, name: &str) -> Result<ObjectId, WorldError> {
        if let Ok(c) = name.parse::<ConstantName>() {
            if let Ok(id) = self.resolve_constant(&c) {
                return Ok(id.clone());
            }
        }
        let id = ObjectId::new(name);
        self.object(&id)?;
        Ok(id)
    }

    pub fn placement(&self, id: &ObjectId) -> Placement {
        if let Some(s) = self.support.get(id) {
            Placement::OnTop(s.clone())
        } else if let Some(c) = self.containment.get(id) {
            Placement::Inside(c.clone())
        } else if self.on_floor.contains(id) {
            Placement::Floor
        } else if self.agent.holding(id).is_some() {
            Placement::Held
        } else {
            Placement::Free
        }
    }

    /// Direct parent through either support or containment.
    pub fn parent(&self, id: &ObjectId) -> Option<&ObjectId> {
        self.support.get(id).or_else(|| self.containment.get(id))
    }

    /// Walks support/containment parents upward, nearest first.
    pub fn ancestors<'a>(&'a self, id: &ObjectId) -> impl Iterator<Item = &'a ObjectId> + 'a {
        let mut cur = self.parent(id);
        let limit = self.objects.len();
        let mut steps = 0;
        std::iter::from_fn(move || {
            let next = cur?;
            steps += 1;
            if steps > limit {
                return None;
            }
            cur = self.parent(next);
            Some(next)
        })
    }

    /// Transitive containers through containment links only.
    pub fn containers<'a>(&'a self, id: &ObjectId) -> impl Iterator<Item = &'a ObjectId> + 'a {
        let mut cur = self.containment.get(id);
        let limit = self.objects.len();
        let mut steps = 0;
        std::iter::from_fn(move || {
            let next = cur?;
            steps += 1;
            if steps > limit {
                return None;
            }
            cur = self.containment.get(next);
            Some(next)
        })
    }

    /// `id` together with everything resting on or in it, transitively.
    pub fn subtree(&self, id: &ObjectId) -> Vec<ObjectId> {
        let mut children: BTreeMap<&ObjectId, Vec<&ObjectId>> = BTreeMap::new();
        for (child, parent) in self.support.iter().chain(&self.containment) {
            children.entry(parent).or_default().push(child);
        }
        let mut out = vec![id.clone()];
        let mut i = 0;
        while i < out.len() {
            if let Some(cs) = children.get(&out[i]) {
                for c in cs {
                    if !out.contains(c) {
                        out.push((*c).clone());
                    }
                }
            }
            i += 1;
        }
        out
    }

    /// Moves `id` to `position`, carrying everything resting on or in it.
    pub(crate) fn move_tree(&mut self, id: &ObjectId, position: Vec3) {
        let Some(obj) = self.objects.get(id) else { return };
        let delta = sub(position, obj.pose.position);
        for member in self.subtree(id) {
            if let Some(o) = self.objects.get_mut(&member) {
                o.pose.position = add(o.pose.position, delta);
            }
        }
    }

    /// Clears every placement relation of `id`.
    pub(crate) fn detach(&mut self, id: &ObjectId) {
        self.support.remove(id);
        self.containment.remove(id);
        self.on_floor.remove(id);
    }

    /// Moves the body; hands return to rest and carry what they hold.
    pub(crate) fn move_body(&mut self, body: Pose) {
        self.agent.body = body;
        for hand in Hand::BOTH {
            let rest = self.agent.rest_position(hand);
            self.agent.hand_mut(hand).position = rest;
            if let Some(held) = self.agent.held(hand).cloned() {
                self.move_tree(&held, rest);
            }
        }
    }

    /// Structural invariants: forest-shaped placement graphs, one placement
    /// mode per object, held ⇒ contact, ordered temperature history.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (child, parent) in self.support.iter().chain(&self.containment) {
            if !self.objects.contains_key(child) || !self.objects.contains_key(parent) {
                return Err(format!("placement {child} -> {parent} names an unknown object"));
            }
        }
        for id in self.objects.keys() {
            let modes = [
                self.support.contains_key(id),
                self.containment.contains_key(id),
                self.on_floor.contains(id),
                self.agent.holding(id).is_some(),
            ];
            if modes.iter().filter(|m| **m).count() > 1 {
                return Err(format!("{id} has more than one placement mode"));
            }
            let mut cur = self.parent(id);
            let mut steps = 0;
            while let Some(p) = cur {
                if p == id || steps > self.objects.len() {
                    return Err(format!("placement cycle through {id}"));
                }
                steps += 1;
                cur = self.parent(p);
            }
            let ext = &self.objects[id].ext;
            if !(ext.temperature_min <= ext.temperature && ext.temperature <= ext.temperature_max) {
                return Err(format!("{id} temperature outside its history"));
            }
        }
        for hand in Hand::BOTH {
            if let Some(h) = self.agent.held(hand) {
                if self.agent.contact(hand) != Some(h) {
                    return Err(format!("{hand} hand holds {h} without contact"));
                }
                if !self.objects.contains_key(h) {
                    return Err(format!("{hand} hand holds unknown {h}"));
                }
            }
        }
        if self.agent.left_held.is_some() && self.agent.left_held == self.agent.right_held {
            return Err("both hands hold the same object".into());
        }
        Ok(())
    }
}
