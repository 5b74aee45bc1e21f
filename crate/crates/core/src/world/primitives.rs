//! Symbolic action primitives.
//!
//! Each primitive either succeeds and returns a new state with the clock
//! advanced by its fixed duration, or fails and leaves the input untouched.

use std::fmt;
use std::str::FromStr;

use super::state::{horizontal_distance, Hand, ObjectId, Pose, SceneState, Vec3};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    NavigateTo(ObjectId),
    Grasp(Hand, ObjectId),
    PlaceOnTop(Hand, ObjectId),
    PlaceInside(Hand, ObjectId),
    Open(ObjectId),
    Close(ObjectId),
    Toggle(ObjectId),
    Slice { target: ObjectId, tool: ObjectId },
    Wipe { target: ObjectId, tool: ObjectId },
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::NavigateTo(_) => "navigate_to",
            Action::Grasp(..) => "grasp",
            Action::PlaceOnTop(..) => "place_on_top",
            Action::PlaceInside(..) => "place_inside",
            Action::Open(_) => "open",
            Action::Close(_) => "close",
            Action::Toggle(_) => "toggle",
            Action::Slice { .. } => "slice",
            Action::Wipe { .. } => "wipe",
        }
    }

    pub fn is_placement(&self) -> bool {
        matches!(self, Action::PlaceOnTop(..) | Action::PlaceInside(..))
    }

    fn duration(&self, state: &SceneState) -> f64 {
        let d = &state.config.durations;
        match self {
            Action::NavigateTo(_) => d.navigate,
            Action::Grasp(..) => d.grasp,
            Action::PlaceOnTop(..) | Action::PlaceInside(..) => d.place,
            Action::Open(_) => d.open,
            Action::Close(_) => d.close,
            Action::Toggle(_) => d.toggle,
            Action::Slice { .. } => d.slice,
            Action::Wipe { .. } => d.wipe,
        }
    }

    /// Rewrites every object reference, e.g. to resolve activity constants.
    pub fn map_objects<E>(
        self,
        mut f: impl FnMut(ObjectId) -> Result<ObjectId, E>,
    ) -> Result<Action, E> {
        Ok(match self {
            Action::NavigateTo(o) => Action::NavigateTo(f(o)?),
            Action::Grasp(h, o) => Action::Grasp(h, f(o)?),
            Action::PlaceOnTop(h, o) => Action::PlaceOnTop(h, f(o)?),
            Action::PlaceInside(h, o) => Action::PlaceInside(h, f(o)?),
            Action::Open(o) => Action::Open(f(o)?),
            Action::Close(o) => Action::Close(f(o)?),
            Action::Toggle(o) => Action::Toggle(f(o)?),
            Action::Slice { target, tool } => Action::Slice {
                target: f(target)?,
                tool: f(tool)?,
            },
            Action::Wipe { target, tool } => Action::Wipe {
                target: f(target)?,
                tool: f(tool)?,
            },
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match self {
            Action::NavigateTo(o) | Action::Open(o) | Action::Close(o) | Action::Toggle(o) => {
                write!(f, "{name} {o}")
            }
            Action::Grasp(h, o) | Action::PlaceOnTop(h, o) | Action::PlaceInside(h, o) => {
                write!(f, "{name} {h} {o}")
            }
            Action::Slice { target, tool } | Action::Wipe { target, tool } => {
                write!(f, "{name} {target} {tool}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse action `{0}`")]
pub struct ActionParseError(pub String);

impl FromStr for Action {
    type Err = ActionParseError;

    /// `navigate_to <obj>`, `grasp <left|right> <obj>`, `slice <obj> <tool>`, ...
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ActionParseError(s.trim().to_string());
        let words: Vec<&str> = s.split_whitespace().collect();
        let hand = |w: &str| match w {
            "left" => Ok(Hand::Left),
            "right" => Ok(Hand::Right),
            _ => Err(bad()),
        };
        let id = |w: &str| ObjectId::new(w);
        Ok(match words.as_slice() {
            ["navigate_to", o] => Action::NavigateTo(id(o)),
            ["grasp", h, o] => Action::Grasp(hand(h)?, id(o)),
            ["place_on_top", h, o] => Action::PlaceOnTop(hand(h)?, id(o)),
            ["place_inside", h, o] => Action::PlaceInside(hand(h)?, id(o)),
            ["open", o] => Action::Open(id(o)),
            ["close", o] => Action::Close(id(o)),
            ["toggle", o] => Action::Toggle(id(o)),
            ["slice", o, t] => Action::Slice {
                target: id(o),
                tool: id(t),
            },
            ["wipe", o, t] => Action::Wipe {
                target: id(o),
                tool: id(t),
            },
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrimitiveFailure {
    #[error("unknown object `{0}`")]
    UnknownObject(ObjectId),
    #[error("`{0}` is out of reach")]
    Unreachable(ObjectId),
    #[error("{0} hand is already holding something")]
    HandOccupied(Hand),
    #[error("{0} hand is empty")]
    HandEmpty(Hand),
    #[error("`{0}` is a fixed scene object")]
    FixedObject(ObjectId),
    #[error("`{0}` is already held")]
    AlreadyHeld(ObjectId),
    #[error("`{0}` is enclosed in or is a closed container")]
    ContainerClosed(ObjectId),
    #[error("`{0}` cannot be opened or closed")]
    NotOpenable(ObjectId),
    #[error("`{0}` cannot be toggled")]
    NotToggleable(ObjectId),
    #[error("`{0}` cannot be sliced")]
    NotSliceable(ObjectId),
    #[error("`{0}` is not a slicing tool")]
    NotASlicer(ObjectId),
    #[error("tool `{0}` must be held")]
    ToolNotHeld(ObjectId),
    #[error("placing onto `{0}` would create a placement cycle")]
    WouldCreateCycle(ObjectId),
}

type Outcome = Result<SceneState, PrimitiveFailure>;

fn known(state: &SceneState, id: &ObjectId) -> Result<(), PrimitiveFailure> {
    if state.objects.contains_key(id) {
        Ok(())
    } else {
        Err(PrimitiveFailure::UnknownObject(id.clone()))
    }
}

fn reachable(state: &SceneState, id: &ObjectId) -> Result<(), PrimitiveFailure> {
    known(state, id)?;
    let carried = state
        .ancestors(id)
        .chain(std::iter::once(id))
        .any(|a| state.agent.holding(a).is_some());
    let d = horizontal_distance(state.agent.body.position, state.objects[id].position());
    if carried || d <= state.config.reach_radius {
        Ok(())
    } else {
        Err(PrimitiveFailure::Unreachable(id.clone()))
    }
}

/// An enclosing container (any containment ancestor) that is openable and closed.
fn closed_enclosure(state: &SceneState, id: &ObjectId) -> Option<ObjectId> {
    let mut cur = id.clone();
    while let Some(parent) = state.parent(&cur) {
        let inside = state.containment.get(&cur) == Some(parent);
        let p = &state.objects[parent];
        if inside && p.has("openable") && !p.ext.open {
            return Some(parent.clone());
        }
        cur = parent.clone();
    }
    None
}

fn held_tool(state: &SceneState, tool: &ObjectId) -> Result<(), PrimitiveFailure> {
    known(state, tool)?;
    state
        .agent
        .holding(tool)
        .map(|_| ())
        .ok_or_else(|| PrimitiveFailure::ToolNotHeld(tool.clone()))
}

/// Deterministic horizontal spread for the k-th item placed on one target.
fn spread(k: usize, radius: f64) -> Vec3 {
    if k == 0 {
        return [0.0, 0.0, 0.0];
    }
    let angle = k as f64 * 2.399_963_229_728_653; // golden angle
    let r = 0.4 * radius;
    [r * angle.cos(), r * angle.sin(), 0.0]
}

/// Applies one primitive. Failures leave `state` unchanged.
pub fn apply_primitive(state: &SceneState, action: &Action) -> Outcome {
    let mut next = state.clone();
    match action {
        Action::NavigateTo(target) => {
            known(state, target)?;
            let t = &state.objects[target];
            let p = t.position();
            let stand = [p[0] - (t.bounding_radius + 0.5), p[1], 0.0];
            next.move_body(Pose {
                position: stand,
                yaw: 0.0,
            });
        }
        Action::Grasp(hand, target) => {
            known(state, target)?;
            if state.agent.held(*hand).is_some() {
                return Err(PrimitiveFailure::HandOccupied(*hand));
            }
            let obj = &state.objects[target];
            if obj.fixed {
                return Err(PrimitiveFailure::FixedObject(target.clone()));
            }
            if state.agent.holding(target).is_some() {
                return Err(PrimitiveFailure::AlreadyHeld(target.clone()));
            }
            reachable(state, target)?;
            if closed_enclosure(state, target).is_some() {
                return Err(PrimitiveFailure::ContainerClosed(target.clone()));
            }
            next.detach(target);
            next.agent.set_held(*hand, Some(target.clone()));
            next.agent.hand_mut(*hand).position = obj.position();
        }
        Action::PlaceOnTop(hand, target) | Action::PlaceInside(hand, target) => {
            let held = state
                .agent
                .held(*hand)
                .cloned()
                .ok_or(PrimitiveFailure::HandEmpty(*hand))?;
            known(state, target)?;
            if state.subtree(&held).contains(target) {
                return Err(PrimitiveFailure::WouldCreateCycle(target.clone()));
            }
            reachable(state, target)?;
            let inside = matches!(action, Action::PlaceInside(..));
            let t = &state.objects[target];
            if inside && t.has("openable") && !t.ext.open {
                return Err(PrimitiveFailure::ContainerClosed(target.clone()));
            }
            let relation = if inside {
                &state.containment
            } else {
                &state.support
            };
            let k = relation.values().filter(|p| *p == target).count();
            let offset = spread(k, t.bounding_radius);
            let base = t.position();
            let o = &state.objects[&held];
            let z = if inside {
                base[2]
            } else {
                base[2] + t.bounding_radius + o.bounding_radius
            };
            let dest = [base[0] + offset[0], base[1] + offset[1], z];
            next.move_tree(&held, dest);
            next.agent.hand_mut(*hand).position = dest;
            next.agent.set_held(*hand, None);
            if inside {
                next.containment.insert(held, target.clone());
            } else {
                next.support.insert(held, target.clone());
            }
        }
        Action::Open(target) | Action::Close(target) => {
            known(state, target)?;
            if !state.objects[target].has("openable") {
                return Err(PrimitiveFailure::NotOpenable(target.clone()));
            }
            reachable(state, target)?;
            next.objects.get_mut(target).expect("known").ext.open = matches!(action, Action::Open(_));
        }
        Action::Toggle(target) => {
            known(state, target)?;
            if !state.objects[target].has("toggleable") {
                return Err(PrimitiveFailure::NotToggleable(target.clone()));
            }
            reachable(state, target)?;
            let ext = &mut next.objects.get_mut(target).expect("known").ext;
            ext.toggled_on = !ext.toggled_on;
        }
        Action::Slice { target, tool } => {
            held_tool(state, tool)?;
            if !state.objects[tool].has("slicer") {
                return Err(PrimitiveFailure::NotASlicer(tool.clone()));
            }
            known(state, target)?;
            if !state.objects[target].has("sliceable") {
                return Err(PrimitiveFailure::NotSliceable(target.clone()));
            }
            reachable(state, target)?;
            next.objects.get_mut(target).expect("known").ext.sliced = true;
        }
        Action::Wipe { target, tool } => {
            held_tool(state, tool)?;
            reachable(state, target)?;
            let damp = state.objects[tool].ext.wetness >= state.config.soaked_cutoff;
            let ext = &mut next.objects.get_mut(target).expect("known").ext;
            if damp {
                ext.stain_level = 0.0;
            } else {
                ext.dust_level = 0.0;
            }
        }
    }
    next.clock += action.duration(state);
    Ok(next)
}
